//! Truncated formal power series over exact rationals.
//!
//! A [`Series`] stores the coefficients of `t^0 .. t^N` densely; `N` is the
//! truncation order and is always explicit. Coefficients beyond the order
//! are *unknown*, never assumed zero, so binary operations return a result
//! at the smaller of the two input orders and order-losing operations
//! (division by a series of positive valuation, compositional inverse of
//! shifted inputs, root extraction at positive valuation) report the order
//! they could actually certify. Two series can only be compared up to the
//! smaller truncation order; [`Series::agrees_to`] makes the comparison
//! order explicit so tests cannot pass vacuously.
//!
//! The valuation of the all-zero truncation is `None` (no nonzero
//! coefficient is visible), which callers must treat as "at least N+1,
//! possibly infinite".

use crate::rational::{nth_root_exact, rat_to_string, Rational};
use num_traits::{One, Zero};
use std::fmt;

/// Errors from series arithmetic. Each variant names the violated
/// precondition and carries enough context to report it.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    /// Division `a / b` needs `valuation(b) <= valuation(a)`; a divisor that
    /// is zero to its whole truncation order counts as higher valuation.
    #[error("division by a series of higher valuation (dividend valuation {}, divisor valuation {})",
        fmt_val(.dividend), fmt_val(.divisor))]
    DivisionByHigherValuation { dividend: Option<usize>, divisor: Option<usize> },

    /// `f(g)` requires `g(0) = 0`; otherwise every coefficient of the result
    /// would depend on infinitely many coefficients of `f`.
    #[error("composition requires an inner series with zero constant term, found {0}")]
    CompositionWithUnitConstantTerm(String),

    /// Compositional inversion requires valuation exactly 1.
    #[error("series is not compositionally invertible: valuation must be exactly 1")]
    NotCompositionallyInvertible,

    /// `ell`-th roots exist in the series ring only when the valuation is a
    /// multiple of `ell`.
    #[error("valuation {valuation} is not divisible by {ell}")]
    ValuationNotDivisible { valuation: usize, ell: usize },

    /// The leading coefficient must be a perfect `ell`-th power of a
    /// positive rational for the root to stay inside the rationals.
    #[error("leading coefficient {coefficient} is not the {ell}-th power of a positive rational")]
    LeadingCoefficientNotPerfectPower { coefficient: String, ell: usize },

    /// Asked for a coefficient beyond the truncation order.
    #[error("coefficient index {index} exceeds truncation order {order}")]
    IndexBeyondTruncation { index: usize, order: usize },

    /// A graded series has a nonzero coefficient at an index outside its
    /// residue class.
    #[error("nonzero coefficient at index {index}, which is not {residue} mod {modulus}")]
    GradingViolation { index: usize, modulus: usize, residue: usize },

    /// An operation needs its operands truncated to at least the given order.
    #[error("operation needs truncation order at least {needed}, have {have}")]
    InsufficientTruncation { needed: usize, have: usize },
}

fn fmt_val(v: &Option<usize>) -> String {
    match v {
        Some(n) => n.to_string(),
        None => "beyond the truncation order".to_string(),
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    // invariant: non-empty; order = coeffs.len() - 1
    coeffs: Vec<Rational>,
}

impl Series {
    /// Wrap an explicit coefficient list `c_0 .. c_N`. Panics when empty:
    /// there is no series without at least the constant term.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series carries at least its constant term");
        Series { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Series::from_coeffs(coeffs.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    pub fn zero(order: usize) -> Self {
        Series { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Series::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); order + 1];
        coeffs[0] = c;
        Series { coeffs }
    }

    /// `c * t^k`, truncated to `order`. If `k > order` the monomial is not
    /// visible at this truncation and the all-zero series is returned.
    pub fn monomial(c: Rational, k: usize, order: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); order + 1];
        if k <= order {
            coeffs[k] = c;
        }
        Series { coeffs }
    }

    /// The identity series `t`.
    pub fn t(order: usize) -> Self {
        Series::monomial(Rational::one(), 1, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `t^n`; an index beyond the truncation order is an
    /// error, not zero.
    pub fn coeff(&self, n: usize) -> Result<&Rational, SeriesError> {
        self.coeffs.get(n).ok_or(SeriesError::IndexBeyondTruncation { index: n, order: self.order() })
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    /// Index of the lowest nonzero coefficient, or `None` when the series is
    /// zero to its whole truncation order.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Zero to the whole truncation order.
    pub fn is_zero(&self) -> bool {
        self.valuation().is_none()
    }

    /// Drop coefficients above `order`. Panics if asked for more coefficients
    /// than are known; truncation never invents data.
    pub fn truncated(&self, order: usize) -> Series {
        assert!(
            order <= self.order(),
            "cannot extend truncation order {} to {}",
            self.order(),
            order
        );
        Series { coeffs: self.coeffs[..=order].to_vec() }
    }

    /// Extend with placeholder zeros. The extra coefficients are *not* data;
    /// this is only sound inside algorithms (like Newton refinement) that
    /// never let the padded range influence the certified range.
    pub(crate) fn zero_padded_to(&self, order: usize) -> Series {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, Rational::zero());
        Series { coeffs }
    }

    pub fn neg(&self) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn add(&self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|i| &self.coeffs[i] + &rhs.coeffs[i]).collect();
        Series { coeffs }
    }

    pub fn sub(&self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let coeffs = (0..=n).map(|i| &self.coeffs[i] - &rhs.coeffs[i]).collect();
        Series { coeffs }
    }

    pub fn scale(&self, c: &Rational) -> Series {
        Series { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Add a constant to the `t^0` coefficient.
    pub fn add_scalar(&self, c: &Rational) -> Series {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] += c;
        Series { coeffs }
    }

    /// Cauchy product, truncated to the smaller input order.
    pub fn mul(&self, rhs: &Series) -> Series {
        let n = self.order().min(rhs.order());
        let mut coeffs = vec![Rational::zero(); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if !rhs.coeffs[j].is_zero() {
                    coeffs[i + j] += &self.coeffs[i] * &rhs.coeffs[j];
                }
            }
        }
        Series { coeffs }
    }

    /// Nonnegative power by repeated multiplication. `f^0 = 1` at the same
    /// order.
    pub fn pow(&self, e: usize) -> Series {
        let mut acc = Series::one(self.order());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Integer power; negative exponents go through division by `f^|e|`,
    /// which requires `f` to have valuation 0.
    pub fn pow_i(&self, e: i64) -> Result<Series, SeriesError> {
        if e >= 0 {
            Ok(self.pow(e as usize))
        } else {
            Series::one(self.order()).div(&self.pow((-e) as usize))
        }
    }

    /// Multiply by `t^k`. Every product coefficient up to `order + k` is
    /// determined by the known ones, so the order *increases* by `k`.
    pub fn mul_t_pow(&self, k: usize) -> Series {
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + k];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i + k] = c.clone();
        }
        Series { coeffs }
    }

    /// Exact division, requested as `a / b` with
    /// `valuation(b) <= valuation(a)`. The result is certified to order
    /// `N - valuation(b)` where `N` is the common truncation order. A zero
    /// dividend yields the zero series; a zero divisor is rejected as having
    /// higher valuation than anything.
    pub fn div(&self, rhs: &Series) -> Result<Series, SeriesError> {
        let n = self.order().min(rhs.order());
        let vb = match rhs.valuation() {
            Some(v) if v <= n => v,
            other => {
                return Err(SeriesError::DivisionByHigherValuation {
                    dividend: self.valuation(),
                    divisor: other,
                })
            }
        };
        match self.valuation() {
            None => return Ok(Series::zero(n - vb)),
            Some(va) if va >= vb => {}
            va => {
                return Err(SeriesError::DivisionByHigherValuation { dividend: va, divisor: Some(vb) })
            }
        }
        // strip t^vb from both; the divisor now has a unit constant term
        let m = n - vb;
        let a: Vec<&Rational> = self.coeffs[vb..=n].iter().collect();
        let b: Vec<&Rational> = rhs.coeffs[vb..=n].iter().collect();
        let b0 = b[0];
        let mut q = vec![Rational::zero(); m + 1];
        for i in 0..=m {
            let mut acc = a[i].clone();
            for j in 0..i {
                if !q[j].is_zero() {
                    acc -= &q[j] * b[i - j];
                }
            }
            q[i] = acc / b0;
        }
        Ok(Series { coeffs: q })
    }

    /// Composition `self(inner)`. The inner series must vanish at 0; the
    /// result is exact to the smaller of the two truncation orders.
    pub fn compose(&self, inner: &Series) -> Result<Series, SeriesError> {
        if !inner.constant_term().is_zero() {
            return Err(SeriesError::CompositionWithUnitConstantTerm(rat_to_string(
                inner.constant_term(),
            )));
        }
        let n = self.order().min(inner.order());
        let g = inner.truncated(n);
        // Horner over the outer coefficients; terms of self beyond t^n cannot
        // reach degree <= n because the inner valuation is at least 1.
        let mut acc = Series::constant(self.coeffs[n].clone(), n);
        for i in (0..n).rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] += &self.coeffs[i];
        }
        Ok(acc)
    }

    /// Compositional inverse by the triangular coefficient solve: the
    /// coefficient of `t^m` in `self(result)` is linear in the unknown
    /// `result[m]` with invertible coefficient `self[1]`, so each step is a
    /// one-unknown solve against the target series `t`.
    pub fn comp_inverse(&self) -> Result<Series, SeriesError> {
        let f1 = self.invertibility_check()?;
        let n = self.order();
        let mut inv = vec![Rational::zero(); n + 1];
        inv[1] = f1.recip();
        for m in 2..=n {
            let partial = Series { coeffs: inv[..=m].to_vec() };
            let c = self.truncated(m).compose(&partial)?.coeffs[m].clone();
            inv[m] = -c / &f1;
        }
        Ok(Series { coeffs: inv })
    }

    /// Compositional inverse by Newton refinement of `self(x) = t`,
    /// quadratically enlarging the certified range. Exact arithmetic makes
    /// this bit-identical to [`Series::comp_inverse`]; it exists as an
    /// independently-derived cross-check and a faster path at large orders.
    pub fn comp_inverse_newton(&self) -> Result<Series, SeriesError> {
        let f1 = self.invertibility_check()?;
        let n = self.order();
        // Padding the input by one slot keeps the derivative at full order;
        // the padded coefficient only influences coefficients beyond t^n of
        // any intermediate, never the certified range.
        let deriv = self.zero_padded_to(n + 1).derivative();
        let target = Series::t(n);
        let mut x = Series::monomial(f1.recip(), 1, n);
        let mut correct = 1usize;
        while correct < n {
            let err = self.compose(&x)?.sub(&target);
            if err.is_zero() {
                break;
            }
            let slope = deriv.compose(&x)?;
            x = x.sub(&err.div(&slope)?);
            correct = (correct * 2).min(n);
        }
        Ok(x)
    }

    fn invertibility_check(&self) -> Result<Rational, SeriesError> {
        if self.valuation() == Some(1) {
            Ok(self.coeffs[1].clone())
        } else {
            Err(SeriesError::NotCompositionallyInvertible)
        }
    }

    /// Formal `ell`-th root. The valuation must be divisible by `ell` and
    /// the leading coefficient a perfect `ell`-th power of a positive
    /// rational; the branch returned has a positive leading coefficient.
    /// The zero series is its own root. For a valuation `v > 0` the result
    /// is certified to order `N - v + v/ell`.
    pub fn ell_root(&self, ell: usize) -> Result<Series, SeriesError> {
        assert!(ell >= 1, "root degree must be positive");
        let v = match self.valuation() {
            None => return Ok(self.clone()),
            Some(v) => v,
        };
        if v % ell != 0 {
            return Err(SeriesError::ValuationNotDivisible { valuation: v, ell });
        }
        let lead = &self.coeffs[v];
        let root_lead = nth_root_exact(lead, ell as u32).ok_or_else(|| {
            SeriesError::LeadingCoefficientNotPerfectPower { coefficient: rat_to_string(lead), ell }
        })?;
        // normalize to 1 + u with valuation(u) >= 1, take the binomial
        // series (1+u)^(1/ell), then restore the leading monomial
        let m = self.order() - v;
        let unit: Vec<Rational> = self.coeffs[v..].iter().map(|c| c / lead).collect();
        let mut u = Series { coeffs: unit };
        u.coeffs[0] = Rational::zero();
        let alpha = Rational::new(1.into(), (ell as i64).into());
        let mut acc = Series::one(m);
        let mut u_pow = Series::one(m);
        let mut binom = Rational::one();
        for k in 1..=m {
            // C(alpha, k) = C(alpha, k-1) * (alpha - k + 1) / k
            binom *= (&alpha - Rational::from_integer((k as i64 - 1).into()))
                / Rational::from_integer((k as i64).into());
            u_pow = u_pow.mul(&u);
            if u_pow.is_zero() {
                break;
            }
            acc = acc.add(&u_pow.scale(&binom));
        }
        Ok(acc.scale(&root_lead).mul_t_pow(v / ell))
    }

    /// Termwise derivative; the top coefficient cannot be recovered, so the
    /// order drops by one (a constant differentiates to the zero series of
    /// order 0).
    pub fn derivative(&self) -> Series {
        if self.order() == 0 {
            return Series::zero(0);
        }
        let coeffs = (1..=self.order())
            .map(|i| &self.coeffs[i] * Rational::from_integer((i as i64).into()))
            .collect();
        Series { coeffs }
    }

    /// `theta = t d/dt`: multiplies the coefficient of `t^n` by `n`. Unlike
    /// [`Series::derivative`] this loses no order.
    pub fn theta(&self) -> Series {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
            .collect();
        Series { coeffs }
    }

    /// Do the two series agree on all coefficients `t^0 .. t^upto`?
    /// Errors when either truncation order is smaller than `upto`, so a
    /// comparison can never succeed for lack of data.
    pub fn agrees_to(&self, other: &Series, upto: usize) -> Result<bool, SeriesError> {
        for s in [self, other] {
            if s.order() < upto {
                return Err(SeriesError::IndexBeyondTruncation { index: upto, order: s.order() });
            }
        }
        Ok((0..=upto).all(|i| self.coeffs[i] == other.coeffs[i]))
    }

    /// Agreement up to the smaller truncation order.
    pub fn agrees_on_common_order(&self, other: &Series) -> bool {
        let n = self.order().min(other.order());
        self.agrees_to(other, n).expect("common order is available on both sides")
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = rat_to_string(c);
            if first {
                first = false;
            } else if cs.starts_with('-') {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = cs.trim_start_matches('-');
            let leading_minus = !first && cs.starts_with('-');
            let shown = if leading_minus { mag } else { cs.as_str() };
            match i {
                0 => write!(f, "{shown}")?,
                1 if mag == "1" => write!(f, "{}t", if leading_minus || shown != "1" { shown.trim_end_matches('1') } else { "" })?,
                1 => write!(f, "{shown}*t")?,
                _ if mag == "1" => write!(f, "t^{i}")?,
                _ => write!(f, "{shown}*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(t^{})", self.order() + 1)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct SeriesWire {
    order: usize,
    coeffs: Vec<String>,
}

impl serde::Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let coeffs = self.coeffs.iter().map(rat_to_string).collect();
        SeriesWire { order: self.order(), coeffs }.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = SeriesWire::deserialize(deserializer)?;
        if wire.coeffs.len() != wire.order + 1 {
            return Err(D::Error::custom(format!(
                "series of order {} must carry {} coefficients, got {}",
                wire.order,
                wire.order + 1,
                wire.coeffs.len()
            )));
        }
        let coeffs = wire
            .coeffs
            .iter()
            .map(|s| crate::rational::rat_from_str(s).map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Series::from_coeffs(coeffs))
    }
}

/// A series constrained to one residue class: every index with a nonzero
/// coefficient is `residue` mod `modulus`. Products add residues, which is
/// exactly the bookkeeping multiple Riordan arrays need.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSeries {
    series: Series,
    modulus: usize,
    residue: usize,
}

impl GradedSeries {
    pub fn new(series: Series, modulus: usize, residue: usize) -> Result<Self, SeriesError> {
        assert!(modulus >= 1, "grading modulus must be positive");
        assert!(residue < modulus, "residue must be reduced mod the modulus");
        if let Some(index) = violating_index(&series, modulus, residue) {
            return Err(SeriesError::GradingViolation { index, modulus, residue });
        }
        Ok(GradedSeries { series, modulus, residue })
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    pub fn into_series(self) -> Series {
        self.series
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn residue(&self) -> usize {
        self.residue
    }

    /// Product of graded series: supports are additive, so the residues add
    /// mod the common modulus.
    pub fn mul(&self, rhs: &GradedSeries) -> Result<GradedSeries, SeriesError> {
        assert_eq!(self.modulus, rhs.modulus, "graded product needs a common modulus");
        GradedSeries::new(self.series.mul(&rhs.series), self.modulus, (self.residue + rhs.residue) % self.modulus)
    }
}

fn violating_index(series: &Series, modulus: usize, residue: usize) -> Option<usize> {
    series
        .coeffs()
        .iter()
        .enumerate()
        .find(|(i, c)| !c.is_zero() && i % modulus != residue)
        .map(|(i, _)| i)
}

/// Is the series supported on `residue` mod `modulus`?
pub fn supported_on(series: &Series, modulus: usize, residue: usize) -> bool {
    violating_index(series, modulus, residue).is_none()
}
