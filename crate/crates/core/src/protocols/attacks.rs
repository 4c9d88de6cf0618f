//! Why the single-key pairing constructions are unsafe.
//!
//! Both demos return two values the attacker can compute and which are equal;
//! equality is the attack.

use ark_ec::CurveGroup;

use crate::curve::{g1, g2, pair, CurveSuite, Fr, G1, G1Affine, Gt};

/// Single-key scheme with stealth key `k*v*R`. Whoever learns the stealth
/// private key `k*v` for one payment links every other payment `R'` to the
/// same recipient, since `(k*v)*R' = r'*(v*K)`.
///
/// Returns `((k*v)*R, (r*v)*K)` with `R = r*g1`, `K = k*g1`.
pub fn demo_attack_ref3<S: CurveSuite>(k: Fr<S>, v: Fr<S>, r: Fr<S>) -> (G1Affine<S>, G1Affine<S>) {
    let g = G1::<S>::from(g1::<S>());
    let big_r = g * r;
    let big_k = g * k;
    ((big_r * (k * v)).into_affine(), (big_k * (r * v)).into_affine())
}

/// Single-key scheme keyed on `e(R, K)`-style values: anyone holding only
/// public `R` and `K` (in G1) computes `e(r*K, g2)`, which equals the
/// recipient's `e(R, k*g2)`.
///
/// Returns `(e(R, k*g2), e(r*K, g2))`.
pub fn demo_attack_ref4<S: CurveSuite>(k: Fr<S>, r: Fr<S>) -> (Gt<S>, Gt<S>) {
    let g = G1::<S>::from(g1::<S>());
    let big_r = (g * r).into_affine();
    let big_k = g * k;
    let k_g2 = (g2::<S>() * k).into_affine();
    (
        pair::<S>(&big_r, &k_g2),
        pair::<S>(&(big_k * r).into_affine(), &g2::<S>()),
    )
}
