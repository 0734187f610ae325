//! Multiple Riordan arrays over a modulus `ell`.
//!
//! A spec `(g; f_1, ..., f_ell)` assigns column `k` the generating function
//! `g * f_1^{e_1} ... f_ell^{e_ell}` with `e_i = floor((k + ell - i) / ell)`,
//! so successive columns pick up the multipliers cyclically:
//! `g, g f_1, g f_1 f_2, ..., g f_1 f_2 ... f_ell, g f_1^2 f_2 ... f_ell, ...`
//! Grading keeps the bookkeeping honest: `g` is supported on exponents
//! divisible by `ell` and each proper multiplier on exponents congruent to 1,
//! which forces column `k` onto the residue class `k mod ell`.
//!
//! Proper specs (every `f_i` vanishing to order exactly 1) form a group:
//! [`MultiRiordanSpec::mmul`], [`MultiRiordanSpec::minv`],
//! [`MultiRiordanSpec::group_identity`]. The classical theory writes the
//! group law and the sequence characterizations through the root
//! `h = (f_1 ... f_ell)^{1/ell}` and its compositional inverse, but every
//! formula this module needs depends on those only through `h^ell`, so the
//! implementation never extracts a root and stays exact over the rationals
//! even when `h` itself would have an irrational leading coefficient. The
//! key device is the compressed variable `x` standing for `t^ell`: writing
//! `f_1 ... f_ell = t^ell * Phi(t^ell)`, the series `u = (inverse of h)^ell`
//! satisfies `u * Phi(u) = t^ell`, i.e. `u` is the compositional inverse of
//! `x * Phi(x)` evaluated at `x = t^ell`.
//!
//! Square ("type") specs relax the multipliers to constant term nonzero and
//! residue 0; their rows off the residue-0 grading vanish and
//! [`MultiRiordanSpec::associate`] ties them back to a proper spec by an
//! index shift, exactly as in the classical case.

use crate::matrix::{MatrixError, RationalMatrix};
use crate::rational::rat_to_string;
use crate::riordan::{RecurrenceViolation, RiordanError, RiordanKind, RiordanSpec};
use crate::series::{GradedSeries, Series, SeriesError};
use crate::Rational;
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum MultiRiordanError {
    #[error("a multiple spec needs a modulus of at least 2, got {0}")]
    EllTooSmall(usize),
    #[error("expected {ell} multiplier series, got {got}")]
    MultiplierCountMismatch { ell: usize, got: usize },
    #[error("g must have a nonzero constant term")]
    UnitConstantTermRequired,
    #[error("multiplier {index} of a proper spec must vanish to order exactly 1")]
    ImproperMultiplier { index: usize },
    #[error("multiplier {index} of a square spec must not vanish at 0")]
    SquareMultiplierVanishes { index: usize },
    #[error("specs carry different moduli: {left} vs {right}")]
    EllMismatch { left: usize, right: usize },
    #[error("operation requires a {expected} spec, found {found}")]
    KindMismatch { expected: RiordanKind, found: RiordanKind },
    #[error("column grading (residue {residue} mod {modulus}) does not fit the array modulus {ell}")]
    ResidueOutOfRange { residue: usize, modulus: usize, ell: usize },
    #[error("insufficient truncation: need order {needed}, have {available}")]
    InsufficientTruncation { needed: usize, available: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Riordan(#[from] RiordanError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `(g; f_1, ..., f_ell)` with the grading already checked. The kind tag
/// reuses [`RiordanKind`]: `Proper` for the group case, `Square` for type
/// arrays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiRiordanSpec {
    ell: usize,
    g: GradedSeries,
    f: Vec<GradedSeries>,
    kind: RiordanKind,
}

impl MultiRiordanSpec {
    /// Proper spec: `g(0) != 0`, each `f_i` supported on residue 1 with
    /// valuation exactly 1.
    pub fn proper(ell: usize, g: Series, f: Vec<Series>) -> Result<Self, MultiRiordanError> {
        Self::validated(ell, g, f, RiordanKind::Proper)
    }

    /// Square ("type") spec: `g(0) != 0`, each `f_i` supported on residue 0
    /// with a nonzero constant term.
    pub fn square(ell: usize, g: Series, f: Vec<Series>) -> Result<Self, MultiRiordanError> {
        Self::validated(ell, g, f, RiordanKind::Square)
    }

    fn validated(
        ell: usize,
        g: Series,
        f: Vec<Series>,
        kind: RiordanKind,
    ) -> Result<Self, MultiRiordanError> {
        if ell < 2 {
            return Err(MultiRiordanError::EllTooSmall(ell));
        }
        if f.len() != ell {
            return Err(MultiRiordanError::MultiplierCountMismatch { ell, got: f.len() });
        }
        if g.constant_term().is_zero() {
            return Err(MultiRiordanError::UnitConstantTermRequired);
        }
        let g = GradedSeries::new(g, ell, 0)?;
        let mut graded = Vec::with_capacity(ell);
        for (index, fi) in f.into_iter().enumerate() {
            match kind {
                RiordanKind::Proper => {
                    if fi.valuation() != Some(1) {
                        return Err(MultiRiordanError::ImproperMultiplier { index });
                    }
                    graded.push(GradedSeries::new(fi, ell, 1)?);
                }
                RiordanKind::Square => {
                    if fi.constant_term().is_zero() {
                        return Err(MultiRiordanError::SquareMultiplierVanishes { index });
                    }
                    graded.push(GradedSeries::new(fi, ell, 0)?);
                }
            }
        }
        Ok(MultiRiordanSpec { ell, g, f: graded, kind })
    }

    /// The group identity `(1; t, ..., t)` at the given truncation order.
    pub fn group_identity(ell: usize, order: usize) -> Self {
        assert!(ell >= 2, "modulus must be at least 2");
        let f = (0..ell).map(|_| Series::t(order.max(1))).collect();
        Self::proper(ell, Series::one(order), f).expect("the identity spec is always well formed")
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn kind(&self) -> RiordanKind {
        self.kind
    }

    pub fn g(&self) -> &Series {
        self.g.series()
    }

    /// The `i`-th multiplier, 0-based. Panics if `i >= ell`.
    pub fn multiplier(&self, i: usize) -> &Series {
        self.f[i].series()
    }

    pub fn multipliers(&self) -> impl Iterator<Item = &Series> {
        self.f.iter().map(|fi| fi.series())
    }

    /// The truncation order every component is good for.
    pub fn order(&self) -> usize {
        self.f.iter().map(|fi| fi.series().order()).fold(self.g.series().order(), usize::min)
    }

    fn require_kind(&self, expected: RiordanKind) -> Result<(), MultiRiordanError> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(MultiRiordanError::KindMismatch { expected, found: self.kind })
        }
    }

    /// `f_1 f_2 ... f_ell` truncated to `order`.
    fn multiplier_product(&self, order: usize) -> Series {
        let mut prod = Series::one(order);
        for fi in &self.f {
            prod = prod.mul(&fi.series().truncated(order));
        }
        prod
    }

    /// Materialize the leading `rows x cols` block by walking the columns.
    ///
    /// Proper specs need truncation order at least `rows - 1`; square specs
    /// mirror the classical convention and ask for `rows + cols - 2`.
    pub fn mbuild(&self, rows: usize, cols: usize) -> Result<RationalMatrix, MultiRiordanError> {
        let available = self.order();
        let needed = match self.kind {
            RiordanKind::Proper => rows.saturating_sub(1),
            RiordanKind::Square => (rows + cols).saturating_sub(2),
        };
        if needed > available {
            return Err(MultiRiordanError::InsufficientTruncation { needed, available });
        }
        let mut out = RationalMatrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return Ok(out);
        }
        let mut col = self.g.series().truncated(available);
        for k in 0..cols {
            for n in 0..rows {
                *out.entry_mut(n, k) = col.coeff(n)?.clone();
            }
            if k + 1 < cols {
                col = col.mul(&self.f[k % self.ell].series().truncated(available));
            }
        }
        Ok(out)
    }

    /// One entry, by running the column walk up to column `k`.
    pub fn entry(&self, n: usize, k: usize) -> Result<Rational, MultiRiordanError> {
        let available = self.order();
        let needed = match self.kind {
            RiordanKind::Proper => n,
            RiordanKind::Square => n + k,
        };
        if needed > available {
            return Err(MultiRiordanError::InsufficientTruncation { needed, available });
        }
        if self.kind == RiordanKind::Proper && k > n {
            return Ok(Rational::zero());
        }
        let mut col = self.g.series().truncated(available);
        for c in 0..k {
            col = col.mul(&self.f[c % self.ell].series().truncated(available));
        }
        Ok(col.coeff(n)?.clone())
    }

    /// The coefficient of `y^k t^n` in the bivariate sum
    /// `g * (sum of y^j f_1 .. f_j for j < ell) / (1 - y^ell f_1 .. f_ell)`,
    /// computed through the closed form of the `y^k` slice. This is an
    /// independent route to [`MultiRiordanSpec::entry`]: it exponentiates the
    /// multipliers instead of walking columns.
    pub fn bivariate_coeff(&self, n: usize, k: usize) -> Result<Rational, MultiRiordanError> {
        let available = self.order();
        let needed = match self.kind {
            RiordanKind::Proper => n,
            RiordanKind::Square => n + k,
        };
        if needed > available {
            return Err(MultiRiordanError::InsufficientTruncation { needed, available });
        }
        let mut gf = self.g.series().truncated(available);
        for (i, fi) in self.f.iter().enumerate() {
            let e = (k + self.ell - (i + 1)) / self.ell;
            if e > 0 {
                gf = gf.mul(&fi.series().truncated(available).pow(e));
            }
        }
        Ok(gf.coeff(n)?.clone())
    }

    /// Group law. With `h` the `ell`-th root of the left factor's
    /// `f_1 ... f_ell`, the product of `(g; f_1, ...)` and `(d; h_1, ...)`
    /// is `(g * d(h); (f_1/h) h_1(h), ..., (f_ell/h) h_ell(h))`. Writing
    /// `d` and each `h_i` through their graded parts shows every component
    /// only needs `h^ell = f_1 ... f_ell`, so no root is taken.
    pub fn mmul(&self, rhs: &Self) -> Result<Self, MultiRiordanError> {
        if self.ell != rhs.ell {
            return Err(MultiRiordanError::EllMismatch { left: self.ell, right: rhs.ell });
        }
        self.require_kind(RiordanKind::Proper)?;
        rhs.require_kind(RiordanKind::Proper)?;
        let r = self.order().min(rhs.order());
        let fprod = self.multiplier_product(r);
        let dg = compact_residue(rhs.g.series(), self.ell, 0);
        let g_new = self.g.series().truncated(r).mul(&subst(&dg, &fprod, r)?);
        let mut f_new = Vec::with_capacity(self.ell);
        for (fi, hi) in self.f.iter().zip(&rhs.f) {
            let hi_x = compact_residue(hi.series(), self.ell, 1);
            f_new.push(fi.series().truncated(r).mul(&subst(&hi_x, &fprod, r)?));
        }
        Self::proper(self.ell, g_new, f_new)
    }

    /// Group inverse `(1/g(hbar); t hbar / f_1(hbar), ...)` where `hbar`
    /// inverts the root `h`. In the compressed variable this collapses to
    /// `(1/gamma(u); t / phi_1(u), ..., t / phi_ell(u))` with `u = hbar^ell`,
    /// `gamma` the graded part of `g` and `phi_i` the graded part of `f_i`.
    pub fn minv(&self) -> Result<Self, MultiRiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        let cv = self.compacted();
        if cv.xorder < 1 {
            return Err(MultiRiordanError::InsufficientTruncation {
                needed: self.ell + 1,
                available: self.order(),
            });
        }
        let m = cv.xorder;
        let ubar = cv.ubar()?;
        let g_new = Series::one(m).div(&cv.gamma.compose(&ubar)?)?;
        let mut f_new = Vec::with_capacity(self.ell);
        for phi in &cv.phis {
            let slice = Series::one(m).div(&phi.compose(&ubar)?)?;
            f_new.push(expand_residue(&slice, self.ell).mul_t_pow(1));
        }
        Self::proper(self.ell, expand_residue(&g_new, self.ell), f_new)
    }

    /// Tie a square spec to the proper spec `(g; t f_1, ..., t f_ell)`. The
    /// square array and the proper array then satisfy the index identity
    /// `square[n][k] = proper[n + k][k]`.
    pub fn associate(&self) -> Result<Self, MultiRiordanError> {
        self.require_kind(RiordanKind::Square)?;
        let f = self.f.iter().map(|fi| fi.series().mul_t_pow(1)).collect();
        Self::proper(self.ell, self.g.series().clone(), f)
    }

    /// Fundamental theorem: a column vector whose generating function lives
    /// on residue `j` is carried to `g * (f_1 .. f_j / h^j) * A_j(h)`. The
    /// graded part `alpha` of `A_j` absorbs the root: the image is
    /// `g * f_1 .. f_j * alpha(f_1 .. f_ell)`, which must agree with the
    /// matrix-vector product against [`MultiRiordanSpec::mbuild`] on every
    /// row the truncation covers.
    pub fn ft_apply(&self, column_gf: &GradedSeries) -> Result<Series, MultiRiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        if column_gf.modulus() != self.ell {
            return Err(MultiRiordanError::ResidueOutOfRange {
                residue: column_gf.residue(),
                modulus: column_gf.modulus(),
                ell: self.ell,
            });
        }
        let j = column_gf.residue();
        let r = self.order().min(column_gf.series().order());
        let alpha = compact_residue(column_gf.series(), self.ell, j);
        let fprod = self.multiplier_product(r);
        let mut prefix = self.g.series().truncated(r);
        for fi in self.f.iter().take(j) {
            prefix = prefix.mul(&fi.series().truncated(r));
        }
        Ok(prefix.mul(&subst(&alpha, &fprod, r)?))
    }

    /// Row sums, antidiagonal sums, and the bivariate cross-check on the
    /// leading `terms x terms` block.
    ///
    /// `row_sums` and `diag_sums` are read off the built block. The row-sum
    /// closed form `g (1 + f_1 + f_1 f_2 + ...) / (1 - f_1 .. f_ell)` is
    /// compared against the block; the analogous antidiagonal form is only
    /// compared for `ell = 2`, where its shape is settled. Every block entry
    /// is also recomputed through [`MultiRiordanSpec::bivariate_coeff`].
    pub fn sum_gfs(&self, terms: usize) -> Result<SumReport, MultiRiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        assert!(terms >= 1, "at least one term is needed");
        let block = self.mbuild(terms, terms)?;
        let row_sums = Series::from_coeffs(
            (0..terms)
                .map(|n| block.row(n).iter().fold(Rational::zero(), |acc, c| acc + c))
                .collect(),
        );
        let diag_sums = Series::from_coeffs(
            (0..terms)
                .map(|s| (0..=s).fold(Rational::zero(), |acc, k| acc + block.entry(s - k, k)))
                .collect(),
        );
        let mut bivariate_matches = true;
        'outer: for n in 0..terms {
            for k in 0..terms {
                if *block.entry(n, k) != self.bivariate_coeff(n, k)? {
                    bivariate_matches = false;
                    break 'outer;
                }
            }
        }
        let order = self.order();
        let fprod = self.multiplier_product(order);
        let mut prefix = self.g.series().truncated(order);
        let mut numerator = prefix.clone();
        for fi in self.f.iter().take(self.ell - 1) {
            prefix = prefix.mul(&fi.series().truncated(order));
            numerator = numerator.add(&prefix);
        }
        let row_formula = numerator.div(&Series::one(order).sub(&fprod))?;
        let row_formula_matches = row_sums.agrees_on_common_order(&row_formula);
        let diag_formula_matches = if self.ell == 2 {
            let mut prefix = self.g.series().truncated(order);
            let mut numerator = prefix.clone();
            for (i, fi) in self.f.iter().take(self.ell - 1).enumerate() {
                prefix = prefix.mul(&fi.series().truncated(order)).mul_t_pow(1).truncated(order);
                let _ = i;
                numerator = numerator.add(&prefix);
            }
            let denom = Series::one(order).sub(&fprod.mul_t_pow(self.ell).truncated(order));
            let diag_formula = numerator.div(&denom)?;
            Some(diag_sums.agrees_on_common_order(&diag_formula))
        } else {
            None
        };
        Ok(SumReport { row_sums, diag_sums, bivariate_matches, row_formula_matches, diag_formula_matches })
    }

    /// Exact membership tests for the standard subgroups: Appell (every
    /// `f_i = t`), Lagrange (`g = 1`), derivative (`g = h'` for the root
    /// `h`, decidable only when the root exists over the rationals), and
    /// one Bell flag per multiplier (`f_i = t g`).
    pub fn subgroup_membership(&self) -> Result<SubgroupMembership, MultiRiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        let order = self.order();
        let t = Series::t(order.max(1));
        let one = Series::one(order);
        let appell = self.f.iter().all(|fi| fi.series().agrees_on_common_order(&t));
        let lagrange = self.g.series().agrees_on_common_order(&one);
        let derivative = match self.multiplier_product(order).ell_root(self.ell) {
            Ok(h) => self.g.series().agrees_on_common_order(&h.derivative()),
            Err(_) => false,
        };
        let tg = self.g.series().truncated(order).mul_t_pow(1);
        let bell = self.f.iter().map(|fi| fi.series().agrees_on_common_order(&tg)).collect();
        Ok(SubgroupMembership { appell, lagrange, derivative, bell })
    }

    /// The sequence characterization: one `A` and `ell` sequences
    /// `Z_0, ..., Z_{ell-1}`, all supported on multiples of `ell`.
    ///
    /// For a proper spec, with `ubar` the compositional inverse of
    /// `x * phi_1(x) ... phi_ell(x)` (the compressed form of
    /// `f_1 ... f_ell`):
    ///
    /// * `A(t) = x / ubar(x)` at `x = t^ell`;
    /// * `Z_0(t) = (1 - g(0)/gamma(ubar)) / ubar` at `x = t^ell`;
    /// * `Z_m(t) = (1 - g(0) f_{1,1} .. f_{m,1} / (gamma(ubar) phi_1(ubar)
    ///   .. phi_m(ubar))) / ubar` at `x = t^ell`, where `f_{i,1}` is the
    ///   coefficient of `t` in `f_i`.
    ///
    /// A square spec delegates to its associated proper spec, whose
    /// sequences drive the type-array recurrences checked by
    /// [`MultiRiordanSpec::mtype_recurrence_check`].
    pub fn mseq(&self) -> Result<SeqChar, MultiRiordanError> {
        if self.kind == RiordanKind::Square {
            return self.associate()?.mseq();
        }
        let cv = self.compacted();
        if cv.xorder < 1 {
            return Err(MultiRiordanError::InsufficientTruncation {
                needed: self.ell + 1,
                available: self.order(),
            });
        }
        let m = cv.xorder;
        let ubar = cv.ubar()?;
        let a_x = Series::t(m + 1).div(&ubar)?;
        let g0 = self.g.series().constant_term().clone();
        let gamma_u = cv.gamma.compose(&ubar)?;
        let mut z_xs = Vec::with_capacity(self.ell);
        let num0 = Series::one(m).sub(&Series::constant(g0.clone(), m).div(&gamma_u)?);
        z_xs.push(num0.div(&ubar)?);
        let mut den = gamma_u;
        let mut scale = g0;
        for i in 1..self.ell {
            den = den.mul(&cv.phis[i - 1].compose(&ubar)?);
            scale = &scale * cv.phis[i - 1].constant_term();
            let num = Series::one(m).sub(&Series::constant(scale.clone(), m).div(&den)?);
            z_xs.push(num.div(&ubar)?);
        }
        Ok(SeqChar {
            ell: self.ell,
            a: expand_residue(&a_x, self.ell),
            z: z_xs.iter().map(|z| expand_residue(z, self.ell)).collect(),
        })
    }

    /// Assemble the production matrix from the sequence characterization:
    /// column `m < ell` carries `Z_m` down the rows `m, m + ell, ...`, and
    /// column `k >= ell` carries the `A`-coefficients down the rows
    /// `k - ell, k, k + ell, ...`. The defining property is that `D * P`
    /// equals `D` with its first `ell` rows removed, `D` being any tall
    /// enough block of the array.
    pub fn production_matrix(&self, size: usize) -> Result<ProductionMatrix, MultiRiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        let seq = self.mseq()?;
        let needed = size.saturating_sub(1);
        let available =
            seq.z.iter().map(|z| z.order()).fold(seq.a.order(), usize::min);
        if needed > available {
            return Err(MultiRiordanError::InsufficientTruncation { needed, available });
        }
        let mut entries = RationalMatrix::zeros(size, size);
        for m in 0..self.ell.min(size) {
            let mut q = 0;
            while m + q * self.ell < size {
                *entries.entry_mut(m + q * self.ell, m) = seq.z[m].coeff(q * self.ell)?.clone();
                q += 1;
            }
        }
        for k in self.ell..size {
            let mut j = 0;
            while k - self.ell + j * self.ell < size {
                *entries.entry_mut(k - self.ell + j * self.ell, k) =
                    seq.a.coeff(j * self.ell)?.clone();
                j += 1;
            }
        }
        Ok(ProductionMatrix { ell: self.ell, entries })
    }

    /// The same matrix, obtained without the sequence characterization: a
    /// forward-substitution solve of `D_top * P = D_shifted` on a block with
    /// `ell` extra rows. Exactness makes the two routes bit-identical.
    pub fn production_matrix_by_solve(
        &self,
        size: usize,
    ) -> Result<ProductionMatrix, MultiRiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        let block = self.mbuild(size + self.ell, size)?;
        let entries = block
            .leading_block(size, size)
            .solve_lower_triangular(&block.without_leading_rows(self.ell))?;
        Ok(ProductionMatrix { ell: self.ell, entries })
    }

    /// Split a proper multiple array into `ell` classical Riordan specs
    /// `(g f_1 .. f_{i-1} / t^{i-1}, f_1 .. f_ell)`. Interleaving their
    /// columns with row shifts rebuilds the original array:
    /// `multi[n][ell q + j] = piece_j[n - j][q]`.
    pub fn decompose(&self) -> Result<Vec<RiordanSpec>, MultiRiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        let order = self.order();
        let fprod = self.multiplier_product(order);
        let mut acc = self.g.series().truncated(order);
        let mut pieces = Vec::with_capacity(self.ell);
        for i in 0..self.ell {
            let gi = if i == 0 {
                acc.clone()
            } else {
                acc.div(&Series::monomial(Rational::one(), i, acc.order()))?
            };
            pieces.push(RiordanSpec::proper(gi, fprod.clone())?);
            if i + 1 < self.ell {
                acc = acc.mul(&self.f[i].series().truncated(order));
            }
        }
        Ok(pieces)
    }

    /// Entrywise verification of the type-array recurrences on the leading
    /// `depth x depth` block:
    ///
    /// * columns `k >= ell` against the `A`-sequence,
    ///   `d[n][k] = sum_j a_j d[n - j ell][k + ell (j - 1)]`;
    /// * column `m = 0` against `Z_0` and columns `1 <= m < ell` against
    ///   `Z_m`, `d[n][m] = sum_j z_{m,j} d[n - (j+1) ell][m + j ell]` for
    ///   `n >= 1`.
    ///
    /// Terms whose row index would go negative vanish. The sequences are
    /// those of the associated proper spec.
    pub fn mtype_recurrence_check(
        &self,
        depth: usize,
    ) -> Result<MTypeRecurrenceReport, MultiRiordanError> {
        self.require_kind(RiordanKind::Square)?;
        let seq = self.mseq()?;
        let jmax = depth.saturating_sub(1) / self.ell;
        let wide = depth + self.ell * jmax;
        let block = self.mbuild(depth, wide)?;
        let a_needed = depth.saturating_sub(1);
        let z_needed = depth.saturating_sub(1 + self.ell);
        if seq.a.order() < a_needed || seq.z.iter().any(|z| z.order() < z_needed) {
            return Err(MultiRiordanError::InsufficientTruncation {
                needed: a_needed,
                available: seq.z.iter().map(|z| z.order()).fold(seq.a.order(), usize::min),
            });
        }
        let mut a_rule = Vec::new();
        for n in 0..depth {
            for k in self.ell..depth {
                let mut rhs = Rational::zero();
                let mut j = 0;
                while j * self.ell <= n {
                    let row = n - j * self.ell;
                    let col = k + self.ell * j - self.ell;
                    rhs += seq.a.coeff(j * self.ell)? * block.entry(row, col);
                    j += 1;
                }
                if *block.entry(n, k) != rhs {
                    a_rule.push(RecurrenceViolation {
                        row: n,
                        col: k,
                        left: block.entry(n, k).clone(),
                        right: rhs,
                    });
                }
            }
        }
        let mut z_rule = Vec::new();
        let mut zm_rule = Vec::new();
        for m in 0..self.ell.min(depth) {
            for n in 1..depth {
                let mut rhs = Rational::zero();
                let mut j = 0;
                while n >= (j + 1) * self.ell {
                    let row = n - (j + 1) * self.ell;
                    let col = m + j * self.ell;
                    rhs += seq.z[m].coeff(j * self.ell)? * block.entry(row, col);
                    j += 1;
                }
                if *block.entry(n, m) != rhs {
                    let violation = RecurrenceViolation {
                        row: n,
                        col: m,
                        left: block.entry(n, m).clone(),
                        right: rhs,
                    };
                    if m == 0 {
                        z_rule.push(violation);
                    } else {
                        zm_rule.push(violation);
                    }
                }
            }
        }
        Ok(MTypeRecurrenceReport { depth, a_rule, z_rule, zm_rule })
    }

    fn compacted(&self) -> Compacted {
        let gamma = compact_residue(self.g.series(), self.ell, 0);
        let phis: Vec<Series> =
            self.f.iter().map(|fi| compact_residue(fi.series(), self.ell, 1)).collect();
        let xorder = phis.iter().map(|p| p.order()).fold(gamma.order(), usize::min);
        Compacted {
            gamma: gamma.truncated(xorder),
            phis: phis.iter().map(|p| p.truncated(xorder)).collect(),
            xorder,
        }
    }
}

impl fmt::Display for MultiRiordanSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{} spec mod {}: ({}", self.kind, self.ell, self.g.series())?;
        for fi in &self.f {
            write!(out, "; {}", fi.series())?;
        }
        out.write_str(")")
    }
}

/// The compressed view of a proper spec: `gamma` collects the coefficients
/// of `g` at exponents `0, ell, 2 ell, ...` and each `phi_i` those of `f_i`
/// at `1, ell + 1, ...`, so that `g(t) = gamma(t^ell)` and
/// `f_i(t) = t phi_i(t^ell)`.
struct Compacted {
    gamma: Series,
    phis: Vec<Series>,
    xorder: usize,
}

impl Compacted {
    /// The compositional inverse of `x * phi_1(x) ... phi_ell(x)`, which is
    /// `hbar^ell` read in the compressed variable. The product is known one
    /// order beyond `xorder` once the shift by `x` is taken into account.
    fn ubar(&self) -> Result<Series, SeriesError> {
        let mut prod = Series::one(self.xorder);
        for phi in &self.phis {
            prod = prod.mul(phi);
        }
        prod.mul_t_pow(1).comp_inverse()
    }
}

/// The `A` and `Z_0, ..., Z_{ell-1}` sequences of a spec, stored as series
/// in `t` supported on multiples of `ell`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqChar {
    ell: usize,
    a: Series,
    z: Vec<Series>,
}

impl SeqChar {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn a(&self) -> &Series {
        &self.a
    }

    /// `Z_m`. Panics if `m >= ell`.
    pub fn z(&self, m: usize) -> &Series {
        &self.z[m]
    }

    pub fn z_all(&self) -> &[Series] {
        &self.z
    }

    /// The `j`-th strided coefficient `a_j = [t^{j ell}] A`.
    pub fn a_term(&self, j: usize) -> Result<&Rational, SeriesError> {
        self.a.coeff(j * self.ell)
    }

    /// The `j`-th strided coefficient `z_{m,j} = [t^{j ell}] Z_m`.
    pub fn z_term(&self, m: usize, j: usize) -> Result<&Rational, SeriesError> {
        self.z[m].coeff(j * self.ell)
    }
}

impl serde::Serialize for SeqChar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        fn strided(series: &Series, stride: usize) -> Vec<String> {
            (0..=series.order() / stride)
                .map(|j| rat_to_string(&series.coeffs()[j * stride]))
                .collect()
        }
        let mut state = serializer.serialize_struct("SeqChar", 4)?;
        state.serialize_field("ell", &self.ell)?;
        state.serialize_field("stride", &self.ell)?;
        state.serialize_field("A", &strided(&self.a, self.ell))?;
        state.serialize_field(
            "Z",
            &self.z.iter().map(|z| strided(z, self.ell)).collect::<Vec<_>>(),
        )?;
        state.end()
    }
}

/// A square production matrix `P` with `D * P` equal to `D` shifted up by
/// `ell` rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductionMatrix {
    ell: usize,
    entries: RationalMatrix,
}

impl ProductionMatrix {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn entries(&self) -> &RationalMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> RationalMatrix {
        self.entries
    }
}

/// Sums over the leading block, with the formula and dual-route checks that
/// come with them. `diag_formula_matches` is `None` when the closed
/// antidiagonal form is not emitted (every modulus except 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumReport {
    pub row_sums: Series,
    pub diag_sums: Series,
    pub bivariate_matches: bool,
    pub row_formula_matches: bool,
    pub diag_formula_matches: Option<bool>,
}

/// Exact subgroup flags; `bell[i]` records whether `f_i = t g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupMembership {
    pub appell: bool,
    pub lagrange: bool,
    pub derivative: bool,
    pub bell: Vec<bool>,
}

/// Violations of the type-array recurrences, split by which rule failed:
/// `a_rule` for columns `k >= ell`, `z_rule` for column 0, `zm_rule` for the
/// remaining residue columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MTypeRecurrenceReport {
    pub depth: usize,
    pub a_rule: Vec<RecurrenceViolation>,
    pub z_rule: Vec<RecurrenceViolation>,
    pub zm_rule: Vec<RecurrenceViolation>,
}

impl MTypeRecurrenceReport {
    pub fn all_hold(&self) -> bool {
        self.a_rule.is_empty() && self.z_rule.is_empty() && self.zm_rule.is_empty()
    }
}

/// Collect the coefficients of `series` at exponents `residue mod modulus`
/// into a series in the compressed variable.
pub(crate) fn compact_residue(series: &Series, modulus: usize, residue: usize) -> Series {
    let mut coeffs = Vec::new();
    let mut idx = residue;
    while idx <= series.order() {
        coeffs.push(series.coeffs()[idx].clone());
        idx += modulus;
    }
    if coeffs.is_empty() {
        coeffs.push(Rational::zero());
    }
    Series::from_coeffs(coeffs)
}

/// Re-expand a compressed series, sending `x^k` to `t^{k modulus}`. The
/// result is certified through `order * modulus + modulus - 1`: the skipped
/// exponents in the final stretch are exact zeros.
pub(crate) fn expand_residue(compressed: &Series, modulus: usize) -> Series {
    let order = compressed.order() * modulus + modulus - 1;
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (k, c) in compressed.coeffs().iter().enumerate() {
        coeffs[k * modulus] = c.clone();
    }
    Series::from_coeffs(coeffs)
}

/// Evaluate a compressed series at `inner`, keeping the full target order.
/// Sound whenever the terms beyond the outer truncation cannot reach
/// `order`, i.e. `(outer.order() + 1) * valuation(inner) > order`; the
/// callers in this module all satisfy that by construction.
fn subst(outer: &Series, inner: &Series, order: usize) -> Result<Series, SeriesError> {
    let padded = if outer.order() >= order {
        outer.truncated(order)
    } else {
        outer.zero_padded_to(order)
    };
    padded.compose(&inner.truncated(order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;
    use crate::series::supported_on;
    use crate::testkit::{alt_mod, cyclic_spec, cyclic_square_spec, geom_mod, one_plus_mod};
    use proptest::prelude::*;

    fn frozen_cyclic_block() -> RationalMatrix {
        RationalMatrix::from_i64_rows(&[
            &[1, 0, 0, 0, 0, 0, 0, 0, 0],
            &[0, 1, 0, 0, 0, 0, 0, 0, 0],
            &[0, 0, 1, 0, 0, 0, 0, 0, 0],
            &[1, 0, 0, 1, 0, 0, 0, 0, 0],
            &[0, 2, 0, 0, 1, 0, 0, 0, 0],
            &[0, 0, 3, 0, 0, 1, 0, 0, 0],
            &[1, 0, 0, 2, 0, 0, 1, 0, 0],
            &[0, 3, 0, 0, 3, 0, 0, 1, 0],
            &[0, 0, 5, 0, 0, 4, 0, 0, 1],
        ])
    }

    #[test]
    fn cyclic_spec_matches_hand_table() {
        let block = cyclic_spec(10).mbuild(9, 9).unwrap();
        assert_eq!(block, frozen_cyclic_block());
    }

    #[test]
    fn entry_and_bivariate_routes_agree_with_build() {
        let spec = cyclic_spec(12);
        let block = spec.mbuild(9, 9).unwrap();
        for n in 0..9 {
            for k in 0..9 {
                assert_eq!(spec.entry(n, k).unwrap(), *block.entry(n, k));
                assert_eq!(spec.bivariate_coeff(n, k).unwrap(), *block.entry(n, k));
            }
        }
    }

    #[test]
    fn columns_carry_the_residue_grading() {
        let spec = cyclic_spec(12);
        let block = spec.mbuild(12, 9).unwrap();
        for k in 0..9 {
            let column =
                Series::from_coeffs((0..12).map(|n| block.entry(n, k).clone()).collect());
            assert!(supported_on(&column, 3, k % 3));
        }
    }

    #[test]
    fn identity_spec_is_two_sided_neutral() {
        let id = MultiRiordanSpec::group_identity(3, 12);
        assert_eq!(id.mbuild(8, 8).unwrap(), RationalMatrix::identity(8));
        let spec = cyclic_spec(12);
        let right = spec.mmul(&id).unwrap();
        let left = id.mmul(&spec).unwrap();
        for side in [&left, &right] {
            assert!(side.g().agrees_on_common_order(spec.g()));
            for i in 0..3 {
                assert!(side.multiplier(i).agrees_on_common_order(spec.multiplier(i)));
            }
        }
        let inv = id.minv().unwrap();
        assert!(inv.g().agrees_on_common_order(&Series::one(4)));
        assert!(inv.multiplier(2).agrees_on_common_order(&Series::t(4)));
    }

    #[test]
    fn square_array_matches_hand_table() {
        let block = cyclic_square_spec(24).mbuild(10, 9).unwrap();
        let expected = RationalMatrix::from_i64_rows(&[
            &[1, 1, 1, 1, 1, 1, 1, 1, 1],
            &[0, 0, 0, 0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0, 0, 0, 0],
            &[1, 2, 3, 2, 3, 4, 3, 4, 5],
            &[0, 0, 0, 0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0, 0, 0, 0],
            &[1, 3, 5, 3, 6, 9, 6, 10, 14],
            &[0, 0, 0, 0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0, 0, 0, 0],
            &[1, 4, 7, 4, 10, 16, 10, 20, 30],
        ]);
        assert_eq!(block, expected);
    }

    #[test]
    fn product_matches_matrix_product() {
        let a = cyclic_spec(20);
        let b = MultiRiordanSpec::proper(
            3,
            one_plus_mod(3, 20),
            vec![
                one_plus_mod(3, 19).mul_t_pow(1),
                geom_mod(3, 19).mul_t_pow(1),
                Series::t(20),
            ],
        )
        .unwrap();
        let ab = a.mmul(&b).unwrap();
        let lhs = ab.mbuild(9, 9).unwrap();
        let rhs = a.mbuild(9, 9).unwrap().mul(&b.mbuild(9, 9).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_components_follow_the_root_formula() {
        // For the cyclic spec the root inverse is t/(1+t^3)^{1/3}, and the
        // inverse spec works out to
        //   (1/(1+t^3); t/(1+t^3), t(1+t^3)/(1+2t^3), t(1+2t^3)/(1+t^3)).
        let inv = cyclic_spec(30).minv().unwrap();
        assert!(inv.g().agrees_on_common_order(&alt_mod(3, 9)));
        assert!(inv.multiplier(0).agrees_on_common_order(&alt_mod(3, 9).mul_t_pow(1)));
        let f2 = Series::from_i64s(&[0, 1, 0, 0, -1, 0, 0, 2, 0, 0, -4]);
        assert!(inv.multiplier(1).agrees_to(&f2, 10).unwrap());
        let f3 = Series::from_i64s(&[0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 1]);
        assert!(inv.multiplier(2).agrees_to(&f3, 10).unwrap());
    }

    #[test]
    fn inverse_round_trips_to_identity() {
        let spec = cyclic_spec(30);
        let inv = spec.minv().unwrap();
        for product in [spec.mmul(&inv).unwrap(), inv.mmul(&spec).unwrap()] {
            assert!(product.g().agrees_to(&Series::one(24), 24).unwrap());
            for i in 0..3 {
                assert!(product.multiplier(i).agrees_to(&Series::t(24), 24).unwrap());
            }
        }
    }

    #[test]
    fn sequences_match_hand_values() {
        let seq = cyclic_spec(30).mseq().unwrap();
        assert_eq!(seq.ell(), 3);
        // A = 1 + t^3.
        let mut expected_a = vec![0i64; seq.a().order() + 1];
        expected_a[0] = 1;
        expected_a[3] = 1;
        assert_eq!(seq.a(), &Series::from_i64s(&expected_a));
        // Z_0 = 1.
        assert!(seq.z(0).agrees_on_common_order(&Series::one(0)));
        // Z_1 = 1 + 1/(1+t^3) strided as 2, -1, 1, -1, ...
        let z1: Vec<i64> = (0..=8)
            .map(|j| if j == 0 { 2 } else if j % 2 == 1 { -1 } else { 1 })
            .collect();
        // Z_2 = (3 + 2t^3)/(1 + 2t^3) strided as 3, -4, 8, -16, ...
        let z2: Vec<i64> =
            (0..=8).map(|j| if j == 0 { 3 } else { (-2i64).pow((j - 1) as u32) * -4 }).collect();
        for (m, expected) in [(1, z1), (2, z2)] {
            for (j, want) in expected.iter().enumerate() {
                assert_eq!(
                    seq.z_term(m, j).unwrap(),
                    &rat_int(*want),
                    "Z_{m} strided term {j}"
                );
            }
        }
        // Off-stride coefficients vanish.
        assert!(supported_on(seq.a(), 3, 0));
        assert!(seq.z_all().iter().all(|z| supported_on(z, 3, 0)));
    }

    #[test]
    fn identity_sequences_are_trivial() {
        let seq = MultiRiordanSpec::group_identity(3, 12).mseq().unwrap();
        assert!(seq.a().agrees_on_common_order(&Series::one(0)));
        assert!(seq.z_all().iter().all(|z| z.is_zero()));
    }

    #[test]
    fn appell_and_lagrange_are_read_off_the_sequences() {
        // All multipliers equal to t: A collapses to 1, Z_0 does not vanish.
        let appell =
            MultiRiordanSpec::proper(2, geom_mod(2, 12), vec![Series::t(12), Series::t(12)])
                .unwrap();
        let seq = appell.mseq().unwrap();
        assert!(seq.a().agrees_on_common_order(&Series::one(8)));
        assert!(!seq.z(0).is_zero());
        let flags = appell.subgroup_membership().unwrap();
        assert!(flags.appell && !flags.lagrange);

        // Unit g: Z_0 vanishes, A does not collapse.
        let lagrange = MultiRiordanSpec::proper(
            2,
            Series::one(12),
            vec![geom_mod(2, 11).mul_t_pow(1), one_plus_mod(2, 11).mul_t_pow(1)],
        )
        .unwrap();
        let seq = lagrange.mseq().unwrap();
        assert!(seq.z(0).is_zero());
        assert!(!seq.a().agrees_on_common_order(&Series::one(8)));
        let flags = lagrange.subgroup_membership().unwrap();
        assert!(flags.lagrange && !flags.appell);
    }

    #[test]
    fn derivative_and_bell_flags() {
        // f_1 = f_2 = t(1+t^2) has root h = t(1+t^2), so g = h' = 1 + 3t^2
        // lands in the derivative subgroup.
        let h_prime = Series::from_i64s(&[1, 0, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        let deriv = MultiRiordanSpec::proper(
            2,
            h_prime,
            vec![one_plus_mod(2, 11).mul_t_pow(1), one_plus_mod(2, 11).mul_t_pow(1)],
        )
        .unwrap();
        let flags = deriv.subgroup_membership().unwrap();
        assert!(flags.derivative && !flags.appell && !flags.lagrange);

        // f_1 = t g qualifies for the first Bell flag only.
        let bell = MultiRiordanSpec::proper(
            2,
            geom_mod(2, 12),
            vec![geom_mod(2, 11).mul_t_pow(1), Series::t(12)],
        )
        .unwrap();
        assert_eq!(bell.subgroup_membership().unwrap().bell, vec![true, false]);
    }

    #[test]
    fn sequence_char_serializes_strided() {
        let seq = cyclic_spec(30).mseq().unwrap();
        let value = serde_json::to_value(&seq).unwrap();
        assert_eq!(value["ell"], 3);
        assert_eq!(value["stride"], 3);
        assert_eq!(value["A"][0], "1");
        assert_eq!(value["A"][1], "1");
        assert_eq!(value["A"][2], "0");
        assert_eq!(value["Z"][0][0], "1");
        assert_eq!(value["Z"][1][1], "-1");
        assert_eq!(value["Z"][2][2], "8");
    }

    #[test]
    fn production_matrix_matches_hand_table_and_solve() {
        let spec = cyclic_spec(30);
        let expected = RationalMatrix::from_i64_rows(&[
            &[1, 0, 0, 1, 0, 0, 0, 0, 0],
            &[0, 2, 0, 0, 1, 0, 0, 0, 0],
            &[0, 0, 3, 0, 0, 1, 0, 0, 0],
            &[0, 0, 0, 1, 0, 0, 1, 0, 0],
            &[0, -1, 0, 0, 1, 0, 0, 1, 0],
            &[0, 0, -4, 0, 0, 1, 0, 0, 1],
            &[0, 0, 0, 0, 0, 0, 1, 0, 0],
            &[0, 1, 0, 0, 0, 0, 0, 1, 0],
            &[0, 0, 8, 0, 0, 0, 0, 0, 1],
        ]);
        let assembled = spec.production_matrix(9).unwrap();
        assert_eq!(assembled.entries(), &expected);
        let solved = spec.production_matrix_by_solve(9).unwrap();
        assert_eq!(assembled.entries(), solved.entries());
        // Defining property: D * P is D with its first three rows removed.
        let tall = spec.mbuild(12, 9).unwrap();
        let product = tall.leading_block(9, 9).mul(&expected).unwrap();
        assert_eq!(product, tall.without_leading_rows(3));
    }

    #[test]
    fn identity_production_matrix_is_the_shift() {
        let p = MultiRiordanSpec::group_identity(3, 12).production_matrix(9).unwrap();
        let expected = RationalMatrix::from_fn(9, 9, |i, j| {
            if j >= 3 && i + 3 == j {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        assert_eq!(p.entries(), &expected);
    }

    #[test]
    fn rows_rebuild_from_the_production_matrix() {
        let spec = cyclic_spec(30);
        let p = spec.production_matrix(9).unwrap();
        let block = spec.mbuild(9, 9).unwrap();
        let mut rebuilt = RationalMatrix::zeros(9, 9);
        for n in 0..3 {
            for k in 0..9 {
                *rebuilt.entry_mut(n, k) = block.entry(n, k).clone();
            }
        }
        for n in 0..6 {
            for k in 0..9 {
                let mut acc = Rational::zero();
                for m in 0..9 {
                    acc += rebuilt.entry(n, m) * p.entries().entry(m, k);
                }
                *rebuilt.entry_mut(n + 3, k) = acc;
            }
        }
        assert_eq!(rebuilt, block);
    }

    #[test]
    fn fundamental_theorem_reproduces_columns() {
        let spec = cyclic_spec(20);
        let constant = GradedSeries::new(Series::one(18), 3, 0).unwrap();
        assert!(spec.ft_apply(&constant).unwrap().agrees_on_common_order(spec.g()));
        let t_input = GradedSeries::new(Series::t(18), 3, 1).unwrap();
        let image = spec.ft_apply(&t_input).unwrap();
        // g f_1 = t/(1-t^3)^2 = t + 2t^4 + 3t^7 + ...
        let expected = Series::from_i64s(&[0, 1, 0, 0, 2, 0, 0, 3, 0]);
        assert!(image.agrees_to(&expected, 8).unwrap());
    }

    #[test]
    fn fundamental_theorem_matches_matrix_vector_product() {
        let spec = cyclic_spec(20);
        let block = spec.mbuild(12, 12).unwrap();
        let inputs = [
            (0usize, vec![1i64, 2, -1]),
            (1, vec![1, -1, 0, 4]),
            (2, vec![3, 0, 1]),
        ];
        for (residue, strided) in inputs {
            let mut coeffs = vec![Rational::zero(); 12];
            for (j, c) in strided.iter().enumerate() {
                coeffs[residue + 3 * j] = rat_int(*c);
            }
            let graded =
                GradedSeries::new(Series::from_coeffs(coeffs.clone()), 3, residue).unwrap();
            let image = spec.ft_apply(&graded).unwrap();
            let oracle = block.mul_vec(&coeffs).unwrap();
            for (n, want) in oracle.iter().enumerate() {
                assert_eq!(image.coeff(n).unwrap(), want, "row {n}, residue {residue}");
            }
        }
    }

    #[test]
    fn fundamental_theorem_rejects_foreign_grading() {
        let spec = cyclic_spec(12);
        let foreign = GradedSeries::new(Series::t(8), 2, 1).unwrap();
        assert!(matches!(
            spec.ft_apply(&foreign),
            Err(MultiRiordanError::ResidueOutOfRange { modulus: 2, ell: 3, .. })
        ));
    }

    #[test]
    fn row_and_diagonal_sums() {
        let report = cyclic_spec(16).sum_gfs(9).unwrap();
        assert_eq!(report.row_sums, Series::from_i64s(&[1, 1, 1, 2, 3, 4, 4, 7, 10]));
        assert!(report.bivariate_matches);
        assert!(report.row_formula_matches);
        assert_eq!(report.diag_formula_matches, None);
        assert_eq!(cyclic_spec(16).bivariate_coeff(7, 4).unwrap(), rat_int(3));
    }

    #[test]
    fn modulus_two_diagonal_sums_match_the_closed_form() {
        let spec = MultiRiordanSpec::proper(
            2,
            geom_mod(2, 14),
            vec![geom_mod(2, 13).mul_t_pow(1), one_plus_mod(2, 13).mul_t_pow(1)],
        )
        .unwrap();
        let report = spec.sum_gfs(10).unwrap();
        assert!(report.bivariate_matches);
        assert!(report.row_formula_matches);
        assert_eq!(report.diag_formula_matches, Some(true));
    }

    #[test]
    fn decomposition_interleaves_back() {
        let spec = cyclic_spec(14);
        let pieces = spec.decompose().unwrap();
        assert_eq!(pieces.len(), 3);
        // First piece is (1/(1-t^3), t^3/(1-t^3)); its column 0 revisits the
        // parent's column 0.
        assert!(pieces[0].g().agrees_on_common_order(&geom_mod(3, 14)));
        assert!(pieces[0].f().agrees_on_common_order(&geom_mod(3, 11).mul_t_pow(3)));
        let col0 = pieces[0].build(7, 1).unwrap();
        for n in 0..7 {
            assert_eq!(*col0.entry(n, 0), rat_int(if n % 3 == 0 { 1 } else { 0 }));
        }
        let block = spec.mbuild(9, 9).unwrap();
        for n in 0..9 {
            for k in 0..9 {
                let (q, j) = (k / 3, k % 3);
                let expected = if n < j {
                    Rational::zero()
                } else {
                    pieces[j].entry(n - j, q).unwrap()
                };
                assert_eq!(*block.entry(n, k), expected, "entry ({n},{k})");
            }
        }
    }

    #[test]
    fn identity_decomposes_into_monomial_pieces() {
        let pieces = MultiRiordanSpec::group_identity(3, 9).decompose().unwrap();
        for piece in pieces {
            assert!(piece.g().agrees_on_common_order(&Series::one(6)));
            assert!(piece
                .f()
                .agrees_on_common_order(&Series::monomial(Rational::one(), 3, 9)));
        }
    }

    #[test]
    fn square_recurrences_hold_on_the_cyclic_example() {
        let report = cyclic_square_spec(32).mtype_recurrence_check(9).unwrap();
        assert!(report.all_hold(), "violations: {report:?}");
        assert_eq!(report.depth, 9);
    }

    #[test]
    fn constant_square_spec_degenerates_consistently() {
        let ones = Series::one(16);
        let spec = MultiRiordanSpec::square(
            3,
            ones.clone(),
            vec![ones.clone(), ones.clone(), ones],
        )
        .unwrap();
        assert!(spec.mtype_recurrence_check(6).unwrap().all_hold());
    }

    #[test]
    fn association_bridges_square_and_proper() {
        let square = cyclic_square_spec(24);
        let assoc = square.associate().unwrap();
        let reference = cyclic_spec(20);
        assert!(assoc.g().agrees_on_common_order(reference.g()));
        for i in 0..3 {
            assert!(assoc.multiplier(i).agrees_on_common_order(reference.multiplier(i)));
        }
        let square_block = square.mbuild(10, 9).unwrap();
        let proper_block = assoc.mbuild(19, 9).unwrap();
        for n in 0..10 {
            for k in 0..9 {
                assert_eq!(square_block.entry(n, k), proper_block.entry(n + k, k));
            }
        }
    }

    #[test]
    fn constructors_reject_malformed_specs() {
        let order = 9;
        let g = geom_mod(3, order);
        let t = Series::t(order);
        assert!(matches!(
            MultiRiordanSpec::proper(1, g.clone(), vec![t.clone()]),
            Err(MultiRiordanError::EllTooSmall(1))
        ));
        assert!(matches!(
            MultiRiordanSpec::proper(3, g.clone(), vec![t.clone(), t.clone()]),
            Err(MultiRiordanError::MultiplierCountMismatch { ell: 3, got: 2 })
        ));
        assert!(matches!(
            MultiRiordanSpec::proper(
                3,
                Series::monomial(Rational::one(), 3, order),
                vec![t.clone(), t.clone(), t.clone()]
            ),
            Err(MultiRiordanError::UnitConstantTermRequired)
        ));
        assert!(matches!(
            MultiRiordanSpec::proper(
                3,
                g.clone(),
                vec![Series::monomial(Rational::one(), 2, order), t.clone(), t.clone()]
            ),
            Err(MultiRiordanError::ImproperMultiplier { index: 0 })
        ));
        assert!(matches!(
            MultiRiordanSpec::proper(
                3,
                g.clone(),
                vec![t.clone(), Series::from_i64s(&[0, 1, 1]), t.clone()]
            ),
            Err(MultiRiordanError::Series(SeriesError::GradingViolation { .. }))
        ));
        assert!(matches!(
            MultiRiordanSpec::square(
                3,
                g.clone(),
                vec![g.clone(), Series::monomial(Rational::one(), 3, order), g.clone()]
            ),
            Err(MultiRiordanError::SquareMultiplierVanishes { index: 1 })
        ));
    }

    #[test]
    fn operations_check_kind_modulus_and_truncation() {
        let proper = cyclic_spec(10);
        let square = cyclic_square_spec(20);
        let two = MultiRiordanSpec::group_identity(2, 10);
        assert!(matches!(
            proper.mbuild(12, 12),
            Err(MultiRiordanError::InsufficientTruncation { needed: 11, available: 10 })
        ));
        assert!(matches!(
            proper.mmul(&two),
            Err(MultiRiordanError::EllMismatch { left: 3, right: 2 })
        ));
        assert!(matches!(
            square.minv(),
            Err(MultiRiordanError::KindMismatch { expected: RiordanKind::Proper, .. })
        ));
        assert!(matches!(
            proper.mtype_recurrence_check(4),
            Err(MultiRiordanError::KindMismatch { expected: RiordanKind::Square, .. })
        ));
        assert!(matches!(
            proper.associate(),
            Err(MultiRiordanError::KindMismatch { expected: RiordanKind::Square, .. })
        ));
        assert!(proper.production_matrix(40).is_err());
        let shown = format!("{proper}");
        assert!(shown.starts_with("proper spec mod 3"));
    }

    fn stride_series(xcoeffs: &[i64], ell: usize, shift: usize, order: usize) -> Series {
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (k, c) in xcoeffs.iter().enumerate() {
            let idx = k * ell + shift;
            if idx <= order {
                coeffs[idx] = rat_int(*c);
            }
        }
        Series::from_coeffs(coeffs)
    }

    fn multi_spec(ell: usize, order: usize) -> impl Strategy<Value = MultiRiordanSpec> {
        let g_tail = proptest::collection::vec(-3i64..=3, order / ell);
        let leads = proptest::collection::vec(proptest::sample::select(vec![1i64, -1, 2]), ell);
        let tails = proptest::collection::vec(
            proptest::collection::vec(-2i64..=2, order.saturating_sub(1) / ell),
            ell,
        );
        (1i64..=3, g_tail, leads, tails).prop_map(move |(g0, g_tail, leads, tails)| {
            let mut g_coeffs = vec![g0];
            g_coeffs.extend(g_tail);
            let g = stride_series(&g_coeffs, ell, 0, order);
            let f = leads
                .into_iter()
                .zip(tails)
                .map(|(lead, tail)| {
                    let mut f_coeffs = vec![lead];
                    f_coeffs.extend(tail);
                    stride_series(&f_coeffs, ell, 1, order)
                })
                .collect();
            MultiRiordanSpec::proper(ell, g, f).expect("strategy output is well formed")
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn product_is_functorial_mod2(a in multi_spec(2, 14), b in multi_spec(2, 14)) {
            let ab = a.mmul(&b).unwrap();
            let lhs = ab.mbuild(7, 7).unwrap();
            let rhs = a.mbuild(7, 7).unwrap().mul(&b.mbuild(7, 7).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn product_is_functorial_mod3(a in multi_spec(3, 14), b in multi_spec(3, 14)) {
            let ab = a.mmul(&b).unwrap();
            let lhs = ab.mbuild(7, 7).unwrap();
            let rhs = a.mbuild(7, 7).unwrap().mul(&b.mbuild(7, 7).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn product_associates(
            a in multi_spec(2, 14),
            b in multi_spec(2, 14),
            c in multi_spec(2, 14),
        ) {
            let left = a.mmul(&b).unwrap().mmul(&c).unwrap();
            let right = a.mmul(&b.mmul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn inverse_round_trips(a in multi_spec(2, 14)) {
            let inv = a.minv().unwrap();
            let product = a.mmul(&inv).unwrap();
            prop_assert!(product.g().agrees_to(&Series::one(10), 10).unwrap());
            for i in 0..2 {
                prop_assert!(product.multiplier(i).agrees_to(&Series::t(10), 10).unwrap());
            }
            let double = inv.minv().unwrap();
            prop_assert!(double.g().agrees_to(a.g(), 10).unwrap());
            for i in 0..2 {
                prop_assert!(double.multiplier(i).agrees_to(a.multiplier(i), 10).unwrap());
            }
        }

        #[test]
        fn production_layout_matches_solve(a in multi_spec(3, 15)) {
            let assembled = a.production_matrix(6).unwrap();
            let solved = a.production_matrix_by_solve(6).unwrap();
            prop_assert_eq!(assembled.entries(), solved.entries());
        }

        #[test]
        fn fundamental_theorem_is_the_matrix_action(
            a in multi_spec(2, 14),
            strided in proptest::collection::vec(-3i64..=3, 5),
            residue in 0usize..2,
        ) {
            let mut coeffs = vec![Rational::zero(); 13];
            for (j, c) in strided.iter().enumerate() {
                let idx = residue + 2 * j;
                if idx < coeffs.len() {
                    coeffs[idx] = rat_int(*c);
                }
            }
            let graded = GradedSeries::new(Series::from_coeffs(coeffs.clone()), 2, residue).unwrap();
            let image = a.ft_apply(&graded).unwrap();
            let block = a.mbuild(10, 13).unwrap();
            let oracle = block.mul_vec(&coeffs).unwrap();
            for (n, want) in oracle.iter().enumerate() {
                prop_assert_eq!(image.coeff(n).unwrap(), want);
            }
        }
    }
}
