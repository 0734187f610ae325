//! Classical Riordan arrays in their two guises.
//!
//! A *proper* spec `(g, f)` with `g(0) != 0`, `f(0) = 0`, `f' (0) != 0` realizes
//! the familiar lower-triangular array `d[n][k] = [t^n] g f^k`. A *square* or
//! "type" spec keeps the same entry formula but lets `f(0) != 0`, producing a
//! full square matrix. The two are tied together by [`RiordanSpec::associate`]:
//! the square array of `(g, f)` is the triangular array of `(g, t f)` read
//! along shifted diagonals.
//!
//! Proper specs form a group under [`RiordanSpec::mul`]; square specs instead
//! carry sequence characterizations ([`RiordanSpec::a_sequence`],
//! [`RiordanSpec::z_sequence`]) and a partial order ([`RiordanSpec::poset_compare`])
//! whose witnesses are transit matrices between the associated triangles.

use crate::matrix::{MatrixError, RationalMatrix};
use crate::series::{Series, SeriesError};
use crate::Rational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RiordanError {
    #[error("g(0) must be nonzero")]
    UnitConstantTermRequired,
    #[error("a proper spec needs f(0) = 0 and f nonzero")]
    ImproperMultiplier,
    #[error("a square spec needs f(0) != 0")]
    SquareMultiplierVanishes,
    #[error("operation defined for {expected}-kind specs, got {found}-kind")]
    KindMismatch {
        expected: RiordanKind,
        found: RiordanKind,
    },
    #[error("series truncated to order {available}, need at least {needed}")]
    InsufficientTruncation { needed: usize, available: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiordanKind {
    /// `f(0) = 0`, `f != 0`: lower-triangular array, group element when
    /// `f'(0) != 0`.
    Proper,
    /// `f(0) != 0`: square array.
    Square,
}

impl fmt::Display for RiordanKind {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(match self {
            RiordanKind::Proper => "proper",
            RiordanKind::Square => "square",
        })
    }
}

/// A pair of truncated series together with the kind tag that fixes how the
/// matrix is laid out. Entries are always `[t^n] g f^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RiordanSpec {
    g: Series,
    f: Series,
    kind: RiordanKind,
}

impl RiordanSpec {
    /// Proper (triangular) spec. `f` may have valuation above 1, as happens
    /// for the interleaving factors of a multiple array; operations that are
    /// only meaningful on the Riordan group (inverse, sequence extraction)
    /// additionally demand valuation exactly 1 and fail cleanly otherwise.
    pub fn proper(g: Series, f: Series) -> Result<Self, RiordanError> {
        if g.constant_term().is_zero() {
            return Err(RiordanError::UnitConstantTermRequired);
        }
        match f.valuation() {
            Some(v) if v >= 1 => Ok(RiordanSpec { g, f, kind: RiordanKind::Proper }),
            _ => Err(RiordanError::ImproperMultiplier),
        }
    }

    /// Square ("type") spec: the multiplier keeps a nonzero constant term, so
    /// every column generating function has valuation 0 and the array fills a
    /// full rectangle.
    pub fn square(g: Series, f: Series) -> Result<Self, RiordanError> {
        if g.constant_term().is_zero() {
            return Err(RiordanError::UnitConstantTermRequired);
        }
        if f.constant_term().is_zero() {
            return Err(RiordanError::SquareMultiplierVanishes);
        }
        Ok(RiordanSpec { g, f, kind: RiordanKind::Square })
    }

    /// The group identity `(1, t)` at the given truncation order.
    pub fn group_identity(order: usize) -> Self {
        RiordanSpec {
            g: Series::one(order),
            f: Series::t(order.max(1)),
            kind: RiordanKind::Proper,
        }
    }

    pub fn g(&self) -> &Series {
        &self.g
    }

    pub fn f(&self) -> &Series {
        &self.f
    }

    pub fn kind(&self) -> RiordanKind {
        self.kind
    }

    /// The truncation order both series are good for.
    pub fn order(&self) -> usize {
        self.g.order().min(self.f.order())
    }

    fn require_kind(&self, expected: RiordanKind) -> Result<(), RiordanError> {
        if self.kind == expected {
            Ok(())
        } else {
            Err(RiordanError::KindMismatch { expected, found: self.kind })
        }
    }

    /// Materialize the leading `rows x cols` block.
    ///
    /// Proper specs need truncation order at least `rows - 1`; square specs
    /// ask for `rows + cols - 2` so that every entry a caller can reach via
    /// the association identity `d[n][k] = tri[n + k][k]` is also covered.
    pub fn build(&self, rows: usize, cols: usize) -> Result<RationalMatrix, RiordanError> {
        let needed = match self.kind {
            RiordanKind::Proper => rows.saturating_sub(1),
            RiordanKind::Square => (rows + cols).saturating_sub(2),
        };
        if self.order() < needed {
            return Err(RiordanError::InsufficientTruncation {
                needed,
                available: self.order(),
            });
        }
        let mut m = RationalMatrix::zeros(rows, cols);
        let mut col = self.g.clone();
        for k in 0..cols {
            for n in 0..rows {
                *m.entry_mut(n, k) = col.coeff(n)?.clone();
            }
            if k + 1 < cols {
                col = col.mul(&self.f);
            }
        }
        Ok(m)
    }

    /// Single entry `[t^n] g f^k`, without materializing a block.
    pub fn entry(&self, n: usize, k: usize) -> Result<Rational, RiordanError> {
        if self.order() < n {
            return Err(RiordanError::InsufficientTruncation { needed: n, available: self.order() });
        }
        Ok(self.g.mul(&self.f.pow(k)).coeff(n)?.clone())
    }

    /// Group product: `(g1, f1) * (g2, f2) = (g1 * g2(f1), f2(f1))`. On
    /// matrices this is the ordinary product of the triangular blocks.
    pub fn mul(&self, rhs: &RiordanSpec) -> Result<RiordanSpec, RiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        rhs.require_kind(RiordanKind::Proper)?;
        let g = self.g.mul(&rhs.g.compose(&self.f)?);
        let f = rhs.f.compose(&self.f)?;
        Ok(RiordanSpec { g, f, kind: RiordanKind::Proper })
    }

    /// Group inverse `(1 / g(fbar), fbar)` with `fbar` the compositional
    /// inverse of `f`.
    pub fn inv(&self) -> Result<RiordanSpec, RiordanError> {
        self.require_kind(RiordanKind::Proper)?;
        let fbar = self.f.comp_inverse()?;
        let g_at = self.g.compose(&fbar)?;
        let g = Series::one(g_at.order()).div(&g_at)?;
        Ok(RiordanSpec { g, f: fbar, kind: RiordanKind::Proper })
    }

    /// The proper spec `(g, t f)` whose triangle carries the square array
    /// along shifted diagonals: `square[n][k] = triangle[n + k][k]`.
    pub fn associate(&self) -> Result<RiordanSpec, RiordanError> {
        self.require_kind(RiordanKind::Square)?;
        Ok(RiordanSpec {
            g: self.g.clone(),
            f: self.f.mul_t_pow(1),
            kind: RiordanKind::Proper,
        })
    }

    /// First `terms` coefficients of the A-sequence of a square spec:
    /// `A(t) = t / w(t)` where `w` is the compositional inverse of `t f`.
    /// The defining recurrence is
    /// `d[n][k] = sum_j a_j * d[n-j][k+j-1]` for `k >= 1`.
    pub fn a_sequence(&self, terms: usize) -> Result<Series, RiordanError> {
        self.require_kind(RiordanKind::Square)?;
        let w = self.f.mul_t_pow(1).comp_inverse()?;
        let a = Series::t(w.order()).div(&w)?;
        let needed = terms.saturating_sub(1);
        if a.order() < needed {
            return Err(RiordanError::InsufficientTruncation { needed, available: a.order() });
        }
        Ok(a.truncated(needed))
    }

    /// First `terms` coefficients of the Z-sequence of a square spec:
    /// `Z(t) = (1 - g(0) / g(w)) / w` with `w` as in [`Self::a_sequence`],
    /// so that `g = g(0) / (1 - t Z(t f))`. The defining recurrence is
    /// `d[n][0] = sum_j z_j * d[n-j-1][j]` for `n >= 1`.
    pub fn z_sequence(&self, terms: usize) -> Result<Series, RiordanError> {
        self.require_kind(RiordanKind::Square)?;
        let w = self.f.mul_t_pow(1).comp_inverse()?;
        let g_at = self.g.compose(&w)?;
        let head = Series::constant(self.g.constant_term().clone(), g_at.order()).div(&g_at)?;
        let z = Series::one(head.order()).sub(&head).div(&w)?;
        let needed = terms.saturating_sub(1);
        if z.order() < needed {
            return Err(RiordanError::InsufficientTruncation { needed, available: z.order() });
        }
        Ok(z.truncated(needed))
    }

    /// Entrywise audit of the four sequence recurrences on the leading
    /// `depth x depth` block of a square spec. Interior entries are checked
    /// against the A-sequence, head-column entries against the Z-sequence,
    /// and both again through their "chained" forms, which re-expand the
    /// same-column term into powers of `a_0` (resp. `z_0`):
    ///
    /// * `a_rule`:   `d[n][k] = sum_{j=0..n} a_j d[n-j][k+j-1]`, `k >= 1`;
    /// * `z_rule`:   `d[n][0] = sum_{j=0..n-1} z_j d[n-j-1][j]`, `n >= 1`;
    /// * `a_chain`:  `d[n][k] = sum_{l=0..k} sum_{j=1..n} a_0^l a_j d[n-j][k+j-l-1]`;
    /// * `z_chain`:  `d[n][0] = z_0^n d[0][0]
    ///                + sum_{l=1..n-1} z_0^{l-1} sum_{j=1..n-l} z_j d[n-j-l][j]`.
    ///
    /// `a_rule`, `z_rule` and `z_chain` hold for every square spec. The
    /// chained A-form terminates its expansion with a `d[n][-1] = 0`
    /// convention that is only consistent when `g(0) f = a_0 g`; when the
    /// spec violates that proportionality the report lists the offending
    /// entries rather than erroring.
    pub fn check_recurrences(&self, depth: usize) -> Result<RecurrenceReport, RiordanError> {
        self.require_kind(RiordanKind::Square)?;
        let mut report = RecurrenceReport {
            depth,
            a_rule: Vec::new(),
            z_rule: Vec::new(),
            a_chain: Vec::new(),
            z_chain: Vec::new(),
        };
        if depth == 0 {
            return Ok(report);
        }
        // Interior rules reach columns up to 2*depth - 2, so build wide.
        let wide = 2 * depth - 1;
        let m = self.build(depth, wide)?;
        let a = self.a_sequence(depth)?;
        let z = self.z_sequence(depth)?;
        let a = a.coeffs();
        let z = z.coeffs();

        for n in 0..depth {
            for k in 1..depth {
                let mut rhs = Rational::zero();
                for (j, aj) in a.iter().enumerate().take(n + 1) {
                    rhs += aj * m.entry(n - j, k + j - 1);
                }
                push_if_off(&mut report.a_rule, n, k, m.entry(n, k), rhs);
            }
        }
        for n in 1..depth {
            let mut rhs = Rational::zero();
            for (j, zj) in z.iter().enumerate().take(n) {
                rhs += zj * m.entry(n - j - 1, j);
            }
            push_if_off(&mut report.z_rule, n, 0, m.entry(n, 0), rhs);
        }
        for n in 1..depth {
            for k in 1..depth {
                let mut rhs = Rational::zero();
                let mut a0_pow = Rational::one();
                for l in 0..=k {
                    for (j, aj) in a.iter().enumerate().take(n + 1).skip(1) {
                        // k + j - l - 1 >= 0 because j >= 1 and l <= k.
                        rhs += &a0_pow * aj * m.entry(n - j, k + j - l - 1);
                    }
                    a0_pow *= &a[0];
                }
                push_if_off(&mut report.a_chain, n, k, m.entry(n, k), rhs);
            }
        }
        for n in 1..depth {
            let mut rhs = pow_rat(&z[0], n) * m.entry(0, 0);
            let mut z0_pow = Rational::one();
            for l in 1..n {
                for (j, zj) in z.iter().enumerate().take(n - l + 1).skip(1) {
                    rhs += &z0_pow * zj * m.entry(n - j - l, j);
                }
                z0_pow *= &z[0];
            }
            push_if_off(&mut report.z_chain, n, 0, m.entry(n, 0), rhs);
        }
        Ok(report)
    }

    /// Compare two square specs of the same depth in the Riordan poset.
    ///
    /// `entrywise` records plain `<=` on the blocks. When both blocks consist
    /// of nonnegative integers, the transit matrix `T` with
    /// `assoc(self) * T = assoc(other)` is solved from the associated
    /// triangles by forward substitution, and `comparable` reports whether
    /// every inspected entry of `T` is nonnegative. Blocks with negative or
    /// fractional entries skip the transit computation (the witness stays
    /// `None`), but the entrywise comparison is still returned.
    pub fn poset_compare(
        &self,
        other: &RiordanSpec,
        depth: usize,
    ) -> Result<PosetComparison, RiordanError> {
        self.require_kind(RiordanKind::Square)?;
        other.require_kind(RiordanKind::Square)?;
        let ma = self.build(depth, depth)?;
        let mb = other.build(depth, depth)?;
        let mut entrywise = true;
        'scan: for n in 0..depth {
            for k in 0..depth {
                if ma.entry(n, k) > mb.entry(n, k) {
                    entrywise = false;
                    break 'scan;
                }
            }
        }
        let transit = if nonneg_integer_block(&ma) && nonneg_integer_block(&mb) {
            let ta = self.associate()?.build(depth, depth)?;
            let tb = other.associate()?.build(depth, depth)?;
            let t = ta.solve_lower_triangular(&tb)?;
            TransitWitness { comparable: t.is_entrywise_nonnegative(), transit: Some(t) }
        } else {
            TransitWitness { comparable: false, transit: None }
        };
        Ok(PosetComparison { entrywise, transit })
    }
}

impl fmt::Display for RiordanSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{} ({}; {})", self.kind, self.g, self.f)
    }
}

fn pow_rat(base: &Rational, e: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}

fn push_if_off(
    sink: &mut Vec<RecurrenceViolation>,
    row: usize,
    col: usize,
    left: &Rational,
    right: Rational,
) {
    if *left != right {
        sink.push(RecurrenceViolation { row, col, left: left.clone(), right });
    }
}

fn nonneg_integer_block(m: &RationalMatrix) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().all(|e| e.is_integer() && !e.is_negative()))
}

/// One failed instance of a recurrence: the entry at `(row, col)` on the left
/// and what the recurrence predicted on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceViolation {
    pub row: usize,
    pub col: usize,
    pub left: Rational,
    pub right: Rational,
}

/// Outcome of [`RiordanSpec::check_recurrences`]: empty vectors mean the rule
/// held at every inspected entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceReport {
    pub depth: usize,
    pub a_rule: Vec<RecurrenceViolation>,
    pub z_rule: Vec<RecurrenceViolation>,
    pub a_chain: Vec<RecurrenceViolation>,
    pub z_chain: Vec<RecurrenceViolation>,
}

impl RecurrenceReport {
    pub fn all_hold(&self) -> bool {
        self.a_rule.is_empty()
            && self.z_rule.is_empty()
            && self.a_chain.is_empty()
            && self.z_chain.is_empty()
    }
}

/// Transit evidence for the Riordan poset. `transit` is `None` when the
/// precondition (nonnegative integer blocks) failed and the witness was not
/// computed; otherwise it holds `T` with `assoc(a) * T = assoc(b)` on the
/// inspected block, and `comparable` says whether `T` is entrywise
/// nonnegative there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitWitness {
    pub comparable: bool,
    pub transit: Option<RationalMatrix>,
}

/// Result of [`RiordanSpec::poset_compare`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetComparison {
    pub entrywise: bool,
    pub transit: TransitWitness,
}
