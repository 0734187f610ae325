//! Fixtures shared by the integration suites: deterministic pseudo-random
//! proper specs and the handful of series the tests keep reaching for.

#![allow(dead_code)]

use mrd::multiriordan::MultiRiordanSpec;
use mrd::rational::rat_int;
use mrd::series::Series;
use rand::Rng;

/// `1/(1-t)` truncated at `order`.
pub fn geometric(order: usize) -> Series {
    Series::from_coeffs(vec![rat_int(1); order + 1])
}

/// Integer coefficients placed on the arithmetic progression
/// `residue, residue + ell, residue + 2 ell, ...`, zero elsewhere.
pub fn stride_series(coeffs: &[i64], ell: usize, residue: usize, order: usize) -> Series {
    let mut out = vec![rat_int(0); order + 1];
    for (q, &c) in coeffs.iter().enumerate() {
        let idx = q * ell + residue;
        if idx <= order {
            out[idx] = rat_int(c);
        }
    }
    Series::from_coeffs(out)
}

/// A random proper spec with small integer coefficients: `g` has a nonzero
/// constant term and support on multiples of `ell`, each multiplier has a
/// nonzero linear term and support on `1 mod ell`. Every such spec is
/// invertible in the group, so the suites can exercise the group law
/// without rejection sampling.
pub fn random_proper_spec<R: Rng>(rng: &mut R, ell: usize, order: usize) -> MultiRiordanSpec {
    let slots = order / ell + 1;
    let mut g_coeffs = vec![rng.gen_range(1..=3i64)];
    for _ in 1..slots {
        g_coeffs.push(rng.gen_range(-3..=3i64));
    }
    let g = stride_series(&g_coeffs, ell, 0, order);
    let leads = [1i64, -1, 2];
    let f = (0..ell)
        .map(|_| {
            let mut c = vec![leads[rng.gen_range(0..leads.len())]];
            for _ in 1..slots {
                c.push(rng.gen_range(-2..=2i64));
            }
            stride_series(&c, ell, 1, order)
        })
        .collect();
    MultiRiordanSpec::proper(ell, g, f).expect("generated spec is well formed")
}
