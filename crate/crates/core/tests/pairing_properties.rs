//! Pairing identities on the compiled curves, plus the two attack
//! demonstrations.

use ark_ec::{AffineRepr, CurveGroup};
use ark_ff::{Field, One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use stealth_pairing::curve::{g1, g2, gt_exp, gt_generator, gt_inverse, gt_is_one, gt_mul, pair, random_fr};
use stealth_pairing::protocols::attacks::{demo_attack_ref3, demo_attack_ref4};
use stealth_pairing::{Bls12_381, Bn254, CurveSuite};

const SAMPLES: usize = 100;

fn check<S: CurveSuite>(seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (p, q) = (g1::<S>(), g2::<S>());
    assert!(!gt_is_one::<S>(&pair::<S>(&p, &q)));
    assert_eq!(pair::<S>(&p, &q), gt_generator::<S>());

    for _ in 0..SAMPLES {
        let (a, b, c, d) = (
            random_fr::<S, _>(&mut rng),
            random_fr::<S, _>(&mut rng),
            random_fr::<S, _>(&mut rng),
            random_fr::<S, _>(&mut rng),
        );
        let r = (p * a).into_affine();
        let s = (p * b).into_affine();
        let t = (q * c).into_affine();
        let u = (q * d).into_affine();

        // e(R+S, T) = e(R,T) e(S,T) and e(R, S+T) = e(R,S) e(R,T)
        assert_eq!(
            pair::<S>(&(r + s).into_affine(), &t),
            gt_mul::<S>(&pair::<S>(&r, &t), &pair::<S>(&s, &t))
        );
        assert_eq!(
            pair::<S>(&r, &(t + u).into_affine()),
            gt_mul::<S>(&pair::<S>(&r, &t), &pair::<S>(&r, &u))
        );

        // e(S, -T) = e(-S, T) = e(S, T)^-1
        let e = pair::<S>(&s, &t);
        let inv = gt_inverse::<S>(&e);
        assert_eq!(pair::<S>(&s, &(-t.into_group()).into_affine()), inv);
        assert_eq!(pair::<S>(&(-s.into_group()).into_affine(), &t), inv);
        assert!(gt_is_one::<S>(&gt_mul::<S>(&e, &inv)));

        // e(aS, bT) = e(bS, aT) = e(S, T)^(ab)
        let lhs = pair::<S>(&(s * a).into_affine(), &(t * b).into_affine());
        let mid = pair::<S>(&(s * b).into_affine(), &(t * a).into_affine());
        assert_eq!(lhs, mid);
        assert_eq!(lhs, gt_exp::<S>(&e, &(a * b)));

        // Non-degeneracy on random nonzero inputs.
        if !a.is_zero() && !c.is_zero() {
            assert!(!gt_is_one::<S>(&pair::<S>(&r, &t)));
        }
    }

    // The group has order r.
    let minus_one = -<stealth_pairing::curve::Fr<S>>::one();
    let e = gt_generator::<S>();
    assert!(gt_is_one::<S>(&gt_mul::<S>(&gt_exp::<S>(&e, &minus_one), &e)));
    assert!(pair::<S>(&<_ as AffineRepr>::zero(), &q).0.is_one());
    assert_ne!(e.0, <stealth_pairing::curve::TargetField<S>>::ONE);
}

fn attacks<S: CurveSuite>(seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    for _ in 0..SAMPLES {
        let k = random_fr::<S, _>(&mut rng);
        let v = random_fr::<S, _>(&mut rng);
        let r = random_fr::<S, _>(&mut rng);
        let (a, b) = demo_attack_ref3::<S>(k, v, r);
        assert_eq!(a, b);
        assert_eq!(a, (g1::<S>() * (k * v * r)).into_affine());
        let (a, b) = demo_attack_ref4::<S>(k, r);
        assert_eq!(a, b);
        assert_eq!(a, gt_exp::<S>(&gt_generator::<S>(), &(k * r)));
    }
}

#[test]
fn bn254_pairing_properties() {
    check::<Bn254>(1);
}

#[test]
fn bls12_381_pairing_properties() {
    check::<Bls12_381>(2);
}

#[test]
fn attack_equalities_hold() {
    attacks::<Bn254>(3);
    attacks::<Bls12_381>(4);
}
