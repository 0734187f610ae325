//! Closed-form fixtures shared by the unit tests: geometric-style series on
//! a stride, and the running modulus-3 example specs they assemble into.

use crate::multiriordan::MultiRiordanSpec;
use crate::rational::rat_int;
use crate::series::Series;
use crate::Rational;
use num_traits::{One, Zero};

/// `1/(1 - t^m)` truncated at `order`.
pub(crate) fn geom_mod(m: usize, order: usize) -> Series {
    Series::from_coeffs(
        (0..=order)
            .map(|n| if n % m == 0 { Rational::one() } else { Rational::zero() })
            .collect(),
    )
}

/// `1/(1 + t^m)` truncated at `order`.
pub(crate) fn alt_mod(m: usize, order: usize) -> Series {
    Series::from_coeffs(
        (0..=order)
            .map(|n| {
                if n % m == 0 {
                    rat_int(if (n / m).is_multiple_of(2) { 1 } else { -1 })
                } else {
                    Rational::zero()
                }
            })
            .collect(),
    )
}

/// `1 + t^m` truncated at `order`.
pub(crate) fn one_plus_mod(m: usize, order: usize) -> Series {
    let mut coeffs = vec![Rational::zero(); order + 1];
    coeffs[0] = Rational::one();
    coeffs[m] = Rational::one();
    Series::from_coeffs(coeffs)
}

/// `(1/(1-t^3); t/(1-t^3), t(1+t^3), t/(1+t^3))`, the running proper
/// example with modulus 3.
pub(crate) fn cyclic_spec(order: usize) -> MultiRiordanSpec {
    let g = geom_mod(3, order);
    let f1 = geom_mod(3, order - 1).mul_t_pow(1);
    let f2 = one_plus_mod(3, order - 1).mul_t_pow(1);
    let f3 = alt_mod(3, order - 1).mul_t_pow(1);
    MultiRiordanSpec::proper(3, g, vec![f1, f2, f3]).expect("well formed")
}

/// The square companion `(1/(1-t^3); 1/(1-t^3), 1+t^3, 1/(1+t^3))`.
pub(crate) fn cyclic_square_spec(order: usize) -> MultiRiordanSpec {
    MultiRiordanSpec::square(
        3,
        geom_mod(3, order),
        vec![geom_mod(3, order), one_plus_mod(3, order), alt_mod(3, order)],
    )
    .expect("well formed")
}
