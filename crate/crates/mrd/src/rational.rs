//! Arbitrary-precision rational scalars and their canonical text form.
//!
//! [`Rational`] is `num_rational::BigRational`: always in lowest terms with a
//! positive denominator, so equality is structural. The canonical text form
//! used by every serializer in this crate is `"p/q"`, shortened to `"p"`
//! when the denominator is one.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

pub type Rational = num_rational::BigRational;

/// Build a rational from machine integers. Panics on a zero denominator.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Canonical text form: `"p"` when the denominator is one, else `"p/q"`.
pub fn rat_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `"p"` or `"p/q"`. The result is reduced to canonical form; a zero
/// denominator is rejected rather than panicking.
pub fn rat_from_str(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (num_str, den_str) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let p = BigInt::from_str(num_str).map_err(|_| format!("invalid integer `{num_str}`"))?;
    let q = BigInt::from_str(den_str).map_err(|_| format!("invalid integer `{den_str}`"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(Rational::new(p, q))
}

/// Exact `n`-th root of a positive rational, if one exists.
///
/// Returns the positive rational `d` with `d^n == r`, or `None` when `r` is
/// not positive or not a perfect `n`-th power.
pub fn nth_root_exact(r: &Rational, n: u32) -> Option<Rational> {
    if n == 0 || !r.is_positive() {
        return None;
    }
    if n == 1 {
        return Some(r.clone());
    }
    let p = r.numer();
    let q = r.denom();
    let rp = p.nth_root(n);
    let rq = q.nth_root(n);
    if &num_traits::pow(rp.clone(), n as usize) == p && &num_traits::pow(rq.clone(), n as usize) == q {
        Some(Rational::new(rp, rq))
    } else {
        None
    }
}

/// Generalized binomial coefficient `C(a, k)` for integer `a` (possibly
/// negative or smaller than `k`), as the falling factorial over `k!`.
/// Always an integer for integer `a`.
pub fn binomial(a: &BigInt, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= a - BigInt::from(i as i64);
        den *= BigInt::from((i + 1) as i64);
    }
    // falling factorials of integers are divisible by k!
    num / den
}

pub fn binomial_i64(a: i64, k: usize) -> BigInt {
    binomial(&BigInt::from(a), k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text_round_trip() {
        for (s, expect) in [("3/6", "1/2"), ("4/2", "2"), ("-3/9", "-1/3"), ("7", "7"), ("0/5", "0"), ("5/-10", "-1/2")] {
            let r = rat_from_str(s).unwrap();
            assert_eq!(rat_to_string(&r), expect);
        }
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("abc").is_err());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(nth_root_exact(&rat(8, 27), 3), Some(rat(2, 3)));
        assert_eq!(nth_root_exact(&rat(4, 1), 2), Some(rat(2, 1)));
        assert_eq!(nth_root_exact(&rat(2, 1), 2), None);
        assert_eq!(nth_root_exact(&rat(-8, 1), 3), None, "negative bases are rejected");
        assert_eq!(nth_root_exact(&rat(9, 16), 2), Some(rat(3, 4)));
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(binomial_i64(7, 2), BigInt::from(21));
        assert_eq!(binomial_i64(7, 0), BigInt::from(1));
        assert_eq!(binomial_i64(3, 5), BigInt::from(0));
        assert_eq!(binomial_i64(-2, 3), BigInt::from(-4));
        assert_eq!(binomial_i64(-1, 4), BigInt::from(1));
    }
}
