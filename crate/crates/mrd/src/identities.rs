//! Umbral and Riordan-sum identities, checked exactly.
//!
//! The machinery is the Euler operator `theta = t d/dt` and the Stirling
//! subset numbers that expand its powers (Grunert's formula). Everything
//! downstream is a finite identity between exact rationals: the binomial
//! power sums in [`umbral_check`], the array-weighted sums of
//! [`riosum_check`] built from a proper array and its two constant-shifted
//! type companions, and the Fuss-Catalan instantiation of the same sum in
//! [`fuss_identity_check`]. Each check evaluates both sides independently
//! and returns an [`IdentityReport`] listing every evaluation point, so a
//! failure pins down the exact parameters rather than a bare boolean.

use crate::gfexpr::fuss_series;
use crate::rational::{binomial, rat_to_string};
use crate::riordan::{RiordanError, RiordanKind, RiordanSpec};
use crate::series::{Series, SeriesError};
use crate::Rational;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::ser::{SerializeMap, SerializeStruct};
use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum IdentityError {
    #[error("Stirling subset number ({m}, {k}) lies outside the table (k <= m <= {max})")]
    IndexOutOfRange { m: usize, k: usize, max: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Riordan(#[from] RiordanError),
}

/// Triangular table of Stirling subset numbers, filled by the recurrence
/// `{m, k} = k {m-1, k} + {m-1, k-1}` from `{0, 0} = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stirling2Table {
    rows: Vec<Vec<BigInt>>,
}

impl Stirling2Table {
    pub fn new(max_m: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_m + 1);
        rows.push(vec![BigInt::one()]);
        for m in 1..=max_m {
            let prev = &rows[m - 1];
            let mut row = Vec::with_capacity(m + 1);
            row.push(BigInt::zero());
            for k in 1..=m {
                let stay = prev.get(k).cloned().unwrap_or_default();
                row.push(BigInt::from(k) * stay + &prev[k - 1]);
            }
            rows.push(row);
        }
        Stirling2Table { rows }
    }

    pub fn max_m(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn value(&self, m: usize, k: usize) -> Result<&BigInt, IdentityError> {
        if m > self.max_m() || k > m {
            return Err(IdentityError::IndexOutOfRange { m, k, max: self.max_m() });
        }
        Ok(&self.rows[m][k])
    }

    pub fn row(&self, m: usize) -> Result<&[BigInt], IdentityError> {
        if m > self.max_m() {
            return Err(IdentityError::IndexOutOfRange { m, k: 0, max: self.max_m() });
        }
        Ok(&self.rows[m])
    }
}

/// Single Stirling subset number `{m, k}`.
pub fn stirling2(m: usize, k: usize) -> Result<BigInt, IdentityError> {
    if k > m {
        return Err(IdentityError::IndexOutOfRange { m, k, max: m });
    }
    Ok(Stirling2Table::new(m).rows[m][k].clone())
}

/// One evaluation point of an identity: the parameters it was instantiated
/// at, and the exact value of each side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityPoint {
    pub params: Vec<(String, String)>,
    pub left: Rational,
    pub right: Rational,
}

impl IdentityPoint {
    fn new(params: &[(&str, String)], left: Rational, right: Rational) -> Self {
        IdentityPoint {
            params: params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            left,
            right,
        }
    }

    pub fn holds(&self) -> bool {
        self.left == self.right
    }
}

impl serde::Serialize for IdentityPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Params<'a>(&'a [(String, String)]);
        impl serde::Serialize for Params<'_> {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for (key, value) in self.0 {
                    map.serialize_entry(key, value)?;
                }
                map.end()
            }
        }
        let mut state = serializer.serialize_struct("IdentityPoint", 4)?;
        state.serialize_field("params", &Params(&self.params))?;
        state.serialize_field("left", &rat_to_string(&self.left))?;
        state.serialize_field("right", &rat_to_string(&self.right))?;
        state.serialize_field("ok", &self.holds())?;
        state.end()
    }
}

/// A named identity together with every point it was evaluated at.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: String,
    pub points: Vec<IdentityPoint>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.points.iter().all(IdentityPoint::holds)
    }

    pub fn verdict(&self) -> &'static str {
        if self.holds() {
            "holds"
        } else {
            "fails"
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityPoint> {
        self.points.iter().filter(|p| !p.holds())
    }
}

impl serde::Serialize for IdentityReport {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("IdentityReport", 3)?;
        state.serialize_field("name", &self.name)?;
        state.serialize_field("verdict", self.verdict())?;
        state.serialize_field("points", &self.points)?;
        state.end()
    }
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `base^exp` over the integers, with `0^0 = 1`.
fn int_pow(base: usize, exp: usize) -> BigInt {
    BigInt::from(base).pow(exp as u32)
}

fn rat_pow(x: &Rational, exp: usize) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exp {
        out *= x;
    }
    out
}

fn big(value: BigInt) -> Rational {
    Rational::from_integer(value)
}

/// Check Grunert's expansion `theta^m = sum_k {m, k} t^k D^k` on a concrete
/// series, and the power-sum consequence
/// `sum_k k^m t^k = sum_k {m, k} k! t^k / (1-t)^(k+1)`.
///
/// The operator side is applied coefficientwise (`theta` scales the `n`-th
/// coefficient by `n`), the expansion side by repeated formal derivatives,
/// so the two routes share no code. The report carries one point per
/// coefficient: `part = "operator"` for the expansion applied to `f` up to
/// its own truncation order, `part = "power-sums"` for the second identity
/// up to `order`.
pub fn grunert_check(f: &Series, m: usize, order: usize) -> IdentityReport {
    let table = Stirling2Table::new(m);
    let mut points = Vec::new();

    let theta_m = Series::from_coeffs(
        f.coeffs()
            .iter()
            .enumerate()
            .map(|(n, c)| big(int_pow(n, m)) * c)
            .collect(),
    );
    let mut expansion = Series::from_coeffs(vec![Rational::zero(); f.order() + 1]);
    for k in 0..=m.min(f.order()) {
        let mut term = f.clone();
        for _ in 0..k {
            term = term.derivative();
        }
        let weight = big(table.rows[m][k].clone());
        expansion = expansion.add(&term.mul_t_pow(k).truncated(f.order()).scale(&weight));
    }
    for n in 0..=f.order() {
        points.push(IdentityPoint::new(
            &[("part", "operator".into()), ("m", m.to_string()), ("n", n.to_string())],
            theta_m.coeffs()[n].clone(),
            expansion.coeffs()[n].clone(),
        ));
    }

    let powers = Series::from_coeffs((0..=order).map(|k| big(int_pow(k, m))).collect());
    let one_minus_t = Series::from_i64s(&[1, -1]).zero_padded_to(order);
    let mut rhs = Series::from_coeffs(vec![Rational::zero(); order + 1]);
    for k in 0..=m {
        let weight = big(table.rows[m][k].clone() * factorial(k));
        let term = Series::monomial(weight, k, order)
            .div(&one_minus_t.pow(k + 1))
            .expect("unit denominator");
        rhs = rhs.add(&term.truncated(order));
    }
    for n in 0..=order {
        points.push(IdentityPoint::new(
            &[("part", "power-sums".into()), ("m", m.to_string()), ("n", n.to_string())],
            powers.coeffs()[n].clone(),
            rhs.coeffs()[n].clone(),
        ));
    }

    IdentityReport { name: "grunert".into(), points }
}

/// Evaluate both umbral power-sum identities at one point:
///
/// * plain: `sum_k C(n,k) k^m x^(n-k) = sum_k {m, k} C(n,k) k! (x+1)^(n-k)`,
/// * alternating: `sum_k C(n,k) k^m (-1)^(n-k) x^(n-k)
///   = sum_k {m, k} C(n,k) k! (1-x)^(n-k)`,
///
/// with the right-hand sums over `k <= min(m, n)` and the convention
/// `0^0 = 1` (which is what makes the `m = 0` case the binomial theorem).
pub fn umbral_check(m: usize, n: usize, x: &Rational) -> IdentityReport {
    let table = Stirling2Table::new(m);
    let n_big = BigInt::from(n);
    let params = |form: &str| {
        [
            ("form", form.to_string()),
            ("m", m.to_string()),
            ("n", n.to_string()),
            ("x", rat_to_string(x)),
        ]
    };

    let mut left_plain = Rational::zero();
    let mut left_alt = Rational::zero();
    for k in 0..=n {
        let base = big(binomial(&n_big, k) * int_pow(k, m)) * rat_pow(x, n - k);
        if (n - k).is_multiple_of(2) {
            left_alt += &base;
        } else {
            left_alt -= &base;
        }
        left_plain += base;
    }

    let x_plus = x + Rational::one();
    let one_minus = Rational::one() - x;
    let mut right_plain = Rational::zero();
    let mut right_alt = Rational::zero();
    for k in 0..=m.min(n) {
        let weight = big(table.rows[m][k].clone() * binomial(&n_big, k) * factorial(k));
        right_plain += &weight * rat_pow(&x_plus, n - k);
        right_alt += weight * rat_pow(&one_minus, n - k);
    }

    IdentityReport {
        name: "umbral".into(),
        points: vec![
            IdentityPoint::new(&params("plain"), left_plain, right_plain),
            IdentityPoint::new(&params("alternating"), left_alt, right_alt),
        ],
    }
}

/// Riordan-sum identities: from a proper array `R = (g, f)` form the two
/// type arrays `(g, f+1)` and `(g, f-1)` and check, at one `(m, n, s)`,
///
/// * plain: `sum_k C(n,k) r[s, n-k] k^m
///   = sum_k {m, k} C(n,k) k! r_plus[s, n-k]`,
/// * alternating: `sum_k C(n,k) (-1)^(n-k) r[s, n-k] k^m
///   = sum_k {m, k} C(n,k) (-1)^(n-k) k! r_minus[s, n-k]`.
///
/// Entries of the proper array above its diagonal are zero, so the left
/// sums truncate on their own; the right sums stop at `min(m, n)`. The
/// spec must be truncated to order at least `n + s` (the type blocks need
/// it).
pub fn riosum_check(
    spec: &RiordanSpec,
    m: usize,
    n: usize,
    s: usize,
) -> Result<IdentityReport, IdentityError> {
    if spec.kind() != RiordanKind::Proper {
        return Err(RiordanError::KindMismatch {
            expected: RiordanKind::Proper,
            found: spec.kind(),
        }
        .into());
    }
    let table = Stirling2Table::new(m);
    let plus = RiordanSpec::square(spec.g().clone(), spec.f().add_scalar(&Rational::one()))?;
    let minus =
        RiordanSpec::square(spec.g().clone(), spec.f().add_scalar(&big(BigInt::from(-1))))?;
    let base = spec.build(s + 1, n + 1)?;
    let plus_block = plus.build(s + 1, n + 1)?;
    let minus_block = minus.build(s + 1, n + 1)?;
    let n_big = BigInt::from(n);

    let mut left_plain = Rational::zero();
    let mut left_alt = Rational::zero();
    for k in 0..=n {
        let term = big(binomial(&n_big, k) * int_pow(k, m)) * base.entry(s, n - k);
        if (n - k).is_multiple_of(2) {
            left_alt += &term;
        } else {
            left_alt -= &term;
        }
        left_plain += term;
    }
    let mut right_plain = Rational::zero();
    let mut right_alt = Rational::zero();
    for k in 0..=m.min(n) {
        let weight = big(table.rows[m][k].clone() * binomial(&n_big, k) * factorial(k));
        right_plain += &weight * plus_block.entry(s, n - k);
        let alt_term = weight * minus_block.entry(s, n - k);
        if (n - k).is_multiple_of(2) {
            right_alt += alt_term;
        } else {
            right_alt -= alt_term;
        }
    }

    let params = |form: &str| {
        [
            ("form", form.to_string()),
            ("m", m.to_string()),
            ("n", n.to_string()),
            ("s", s.to_string()),
        ]
    };
    Ok(IdentityReport {
        name: "riordan-sum".into(),
        points: vec![
            IdentityPoint::new(&params("plain"), left_plain, right_plain),
            IdentityPoint::new(&params("alternating"), left_alt, right_alt),
        ],
    })
}

/// Fuss series of order `ell`: the fixed point of `F = 1 + t F^ell`.
/// `ell = 2` gives the Catalan numbers, `ell = 1` the geometric series.
pub fn fuss(ell: usize, order: usize) -> Series {
    fuss_series(ell, order)
}

/// The power `F_ell^r`, for any integer `r`, computed two ways that must
/// agree: direct powering of the fixed point, and the Lambert coefficient
/// formula `r/(ell*n + r) C(ell*n + r, n)`. The formula is evaluated in the
/// cancelled form `r (x-1)(x-2)...(x-n+1) / n!` with `x = ell*n + r`, which
/// stays defined when `x = 0` (the coefficient there is `(r/n)(-1)^(n-1)`).
pub fn fuss_power(ell: usize, r: i64, order: usize) -> Series {
    assert!(ell >= 1, "the fixed point needs a positive power");
    let coeffs = (0..=order)
        .map(|n| {
            if n == 0 {
                return Rational::one();
            }
            let x = BigInt::from(ell as i64 * n as i64 + r);
            let mut num = BigInt::from(r);
            for i in 1..n {
                num *= &x - BigInt::from(i);
            }
            Rational::new(num, factorial(n))
        })
        .collect();
    let lambert = Series::from_coeffs(coeffs);
    let powered = fuss_series(ell, order)
        .pow_i(r)
        .expect("the fixed point has a unit constant term");
    assert_eq!(lambert, powered, "Lambert coefficients must match direct powering");
    lambert
}

fn fuss_proper_entry(ell: usize, p: usize, n: usize, k: usize) -> Rational {
    if k > n {
        return Rational::zero();
    }
    let top = BigInt::from(p + ell * n);
    Rational::new(BigInt::from(p + ell * k) * binomial(&top, n - k), top)
}

fn fuss_type_entry(ell: usize, p: usize, n: usize, k: usize) -> Rational {
    let top = BigInt::from(ell * n + p + k);
    Rational::new(BigInt::from(p + k) * binomial(&top, n), top)
}

/// The Fuss-Catalan instantiation of [`riosum_check`]: the proper array
/// `(F^p, F-1)` has entries `(p + ell*k)/(p + ell*n) C(p + ell*n, n-k)`,
/// its type companion `(F^p, F)` has entries
/// `(p + k)/(ell*n + p + k) C(ell*n + p + k, n)`, and weighting row `s` of
/// each by the umbral sums gives a binomial identity in closed form.
///
/// Three routes are compared: the closed-form entries against series-built
/// blocks (`part = "proper-entry"` / `"type-entry"`), the closed-form sum
/// identity (`part = "closed-sum"`), and the generic array-sum check run on
/// the same spec (`part = "array-sum"`). Hand-written forms of the closed
/// sum sometimes index the entries by the summation variable itself; the
/// identity requires the complementary index `n - k`, which is what is
/// checked here.
pub fn fuss_identity_check(
    ell: usize,
    p: usize,
    m: usize,
    n: usize,
    s: usize,
) -> IdentityReport {
    assert!(ell >= 1, "the fixed point needs a positive power");
    assert!(p >= 1, "the leading power must be positive");
    let rows = n.max(s) + 1;
    let cols = n + 1;
    let order = rows + cols;
    let f = fuss_series(ell, order);
    let f_pow = f.pow(p);
    let proper =
        RiordanSpec::proper(f_pow.clone(), f.add_scalar(&big(BigInt::from(-1))))
            .expect("F - 1 has valuation one");
    let type_spec = RiordanSpec::square(f_pow, f).expect("F has a unit constant term");
    let proper_block = proper.build(rows, cols).expect("order chosen to fit");
    let type_block = type_spec.build(rows, cols).expect("order chosen to fit");

    let mut points = Vec::new();
    let entry_params = |part: &str, row: usize, col: usize| {
        [
            ("part", part.to_string()),
            ("ell", ell.to_string()),
            ("p", p.to_string()),
            ("n", row.to_string()),
            ("k", col.to_string()),
        ]
    };
    for row in 0..rows {
        for col in 0..cols {
            points.push(IdentityPoint::new(
                &entry_params("proper-entry", row, col),
                proper_block.entry(row, col).clone(),
                fuss_proper_entry(ell, p, row, col),
            ));
            points.push(IdentityPoint::new(
                &entry_params("type-entry", row, col),
                type_block.entry(row, col).clone(),
                fuss_type_entry(ell, p, row, col),
            ));
        }
    }

    let table = Stirling2Table::new(m);
    let n_big = BigInt::from(n);
    let mut left = Rational::zero();
    for k in 0..=n {
        left += big(binomial(&n_big, k) * int_pow(k, m)) * fuss_proper_entry(ell, p, s, n - k);
    }
    let mut right = Rational::zero();
    for k in 0..=m.min(n) {
        right += big(table.rows[m][k].clone() * binomial(&n_big, k) * factorial(k))
            * fuss_type_entry(ell, p, s, n - k);
    }
    let sum_params = |part: &str| {
        [
            ("part", part.to_string()),
            ("ell", ell.to_string()),
            ("p", p.to_string()),
            ("m", m.to_string()),
            ("n", n.to_string()),
            ("s", s.to_string()),
        ]
    };
    points.push(IdentityPoint::new(&sum_params("closed-sum"), left, right));

    let generic = riosum_check(&proper, m, n, s).expect("order chosen to fit");
    for point in generic.points {
        let mut params = vec![("part".to_string(), "array-sum".to_string())];
        params.extend(point.params);
        points.push(IdentityPoint { params, left: point.left, right: point.right });
    }

    IdentityReport { name: "fuss-catalan-sum".into(), points }
}
