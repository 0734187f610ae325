//! Spec-level group laws on randomly generated proper specs. The acceptance
//! checklist compares built blocks; these tests compare the generating
//! functions themselves, which is the stronger statement (two specs can
//! only build the same array if their series agree).

mod common;

use mrd::multiriordan::{MultiRiordanError, MultiRiordanSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::random_proper_spec;

fn specs_agree(a: &MultiRiordanSpec, b: &MultiRiordanSpec) -> bool {
    a.ell() == b.ell()
        && a.g().agrees_on_common_order(b.g())
        && a.multipliers()
            .zip(b.multipliers())
            .all(|(fa, fb)| fa.agrees_on_common_order(fb))
}

#[test]
fn identity_is_neutral_on_both_sides() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for ell in [2usize, 3, 4] {
        let e = MultiRiordanSpec::group_identity(ell, 24);
        for _ in 0..8 {
            let a = random_proper_spec(&mut rng, ell, 24);
            assert!(specs_agree(&e.mmul(&a).unwrap(), &a));
            assert!(specs_agree(&a.mmul(&e).unwrap(), &a));
        }
    }
}

#[test]
fn double_inverse_returns_the_spec() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for ell in [2usize, 3, 4] {
        for _ in 0..8 {
            let a = random_proper_spec(&mut rng, ell, 24);
            let back = a.minv().unwrap().minv().unwrap();
            assert!(specs_agree(&back, &a), "double inverse drifted for ell={ell}");
        }
    }
}

#[test]
fn inverse_antidistributes_over_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for ell in [2usize, 3, 4] {
        for _ in 0..8 {
            let a = random_proper_spec(&mut rng, ell, 24);
            let b = random_proper_spec(&mut rng, ell, 24);
            let lhs = a.mmul(&b).unwrap().minv().unwrap();
            let rhs = b.minv().unwrap().mmul(&a.minv().unwrap()).unwrap();
            assert!(specs_agree(&lhs, &rhs), "(ab)^-1 != b^-1 a^-1 for ell={ell}");
        }
    }
}

#[test]
fn products_respect_cancellation() {
    // a * x = a * y forces x = y once a is invertible.
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for ell in [2usize, 3] {
        let a = random_proper_spec(&mut rng, ell, 24);
        let x = random_proper_spec(&mut rng, ell, 24);
        let recovered = a.minv().unwrap().mmul(&a.mmul(&x).unwrap()).unwrap();
        assert!(specs_agree(&recovered, &x), "cancellation failed for ell={ell}");
    }
}

#[test]
fn mixed_multiplier_counts_are_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let two = random_proper_spec(&mut rng, 2, 12);
    let three = random_proper_spec(&mut rng, 3, 12);
    assert!(matches!(
        two.mmul(&three),
        Err(MultiRiordanError::EllMismatch { left: 2, right: 3 })
    ));
}
