//! Curve layer: the pairing-friendly suites, the secp256k1 group, Keccak-256
//! and the canonical encodings every other module builds on.
//!
//! Everything above this module is generic over [`CurveSuite`]. A suite pins
//! a type-3 pairing engine together with its G1 configuration; the G1 config
//! must expose a GLV endomorphism because the scanner's fixed-scalar
//! multiplier decomposes the viewing key once and reuses the decomposition.

mod codec;
mod hash;

use std::fmt;
use std::str::FromStr;

use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::scalar_mul::glv::GLVConfig;
use ark_ec::short_weierstrass::{Affine, Projective};
use ark_ec::{AffineRepr, CurveConfig, PrimeGroup};
use ark_ff::{UniformRand, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use codec::{
    field_elements_be, field_from_be_bytes, field_to_be_bytes, from_hex, g1_from_bytes, g1_to_bytes, g2_from_bytes,
    g2_to_bytes, gt_first_coordinate, gt_from_bytes, gt_to_bytes, secp_from_bytes, secp_to_bytes,
    secp_uncompressed_xy, to_hex,
};
pub use hash::{digest_to_fr, digest_to_secp_scalar, hash_to_fr, hash_to_secp_scalar, keccak256, Digest32};

/// Identifier of a pairing-friendly curve.
///
/// All six names parse so that records from other deployments can be read and
/// skipped; only the suites compiled into this build can be computed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveId {
    #[serde(rename = "bn254")]
    Bn254,
    #[serde(rename = "bls12-377")]
    Bls12_377,
    #[serde(rename = "bls12-381")]
    Bls12_381,
    #[serde(rename = "bls24-315")]
    Bls24_315,
    #[serde(rename = "bw6-633")]
    Bw6_633,
    #[serde(rename = "bw6-761")]
    Bw6_761,
}

impl CurveId {
    pub const ALL: [CurveId; 6] = [
        CurveId::Bn254,
        CurveId::Bls12_377,
        CurveId::Bls12_381,
        CurveId::Bls24_315,
        CurveId::Bw6_633,
        CurveId::Bw6_761,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveId::Bn254 => "bn254",
            CurveId::Bls12_377 => "bls12-377",
            CurveId::Bls12_381 => "bls12-381",
            CurveId::Bls24_315 => "bls24-315",
            CurveId::Bw6_633 => "bw6-633",
            CurveId::Bw6_761 => "bw6-761",
        }
    }

    pub fn is_bw6(self) -> bool {
        matches!(self, CurveId::Bw6_633 | CurveId::Bw6_761)
    }

    /// Whether arithmetic for this curve is available in this build.
    pub fn is_compiled(self) -> bool {
        compiled_curves().contains(&self)
    }
}

impl fmt::Display for CurveId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurveId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CurveId::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::decode(format!("unknown curve {s:?}")))
    }
}

/// Curves whose arithmetic is compiled in, in ascending cost order.
pub fn compiled_curves() -> Vec<CurveId> {
    let mut out = vec![CurveId::Bn254];
    #[cfg(feature = "bls12-377")]
    out.push(CurveId::Bls12_377);
    out.push(CurveId::Bls12_381);
    #[cfg(feature = "bw6-761")]
    out.push(CurveId::Bw6_761);
    out
}

/// A type-3 pairing suite.
pub trait CurveSuite:
    Copy + Clone + fmt::Debug + Default + PartialEq + Eq + Send + Sync + 'static
{
    const ID: CurveId;

    type G1Config: GLVConfig;

    type Engine: Pairing<
        ScalarField = <Self::G1Config as CurveConfig>::ScalarField,
        G1 = Projective<Self::G1Config>,
        G1Affine = Affine<Self::G1Config>,
    >;
}

pub type Fr<S> = <<S as CurveSuite>::Engine as Pairing>::ScalarField;
pub type Fq<S> = <<S as CurveSuite>::G1Config as CurveConfig>::BaseField;
pub type G1<S> = Projective<<S as CurveSuite>::G1Config>;
pub type G1Affine<S> = Affine<<S as CurveSuite>::G1Config>;
pub type G2<S> = <<S as CurveSuite>::Engine as Pairing>::G2;
pub type G2Affine<S> = <<S as CurveSuite>::Engine as Pairing>::G2Affine;
pub type G2Prepared<S> = <<S as CurveSuite>::Engine as Pairing>::G2Prepared;
pub type TargetField<S> = <<S as CurveSuite>::Engine as Pairing>::TargetField;
/// Element of the target group. arkworks writes GT additively; the helpers
/// [`gt_mul`] and [`gt_exp`] give the multiplicative reading used in the
/// protocol descriptions.
pub type Gt<S> = PairingOutput<<S as CurveSuite>::Engine>;

pub type SecpConfig = ark_secp256k1::Config;
pub type SecpScalar = ark_secp256k1::Fr;
pub type SecpBase = ark_secp256k1::Fq;
pub type SecpPoint = ark_secp256k1::Projective;
pub type SecpAffine = ark_secp256k1::Affine;

macro_rules! suite {
    ($(#[$meta:meta])* $name:ident, $id:expr, $g1:ty, $engine:ty) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
        pub struct $name;

        $(#[$meta])*
        impl CurveSuite for $name {
            const ID: CurveId = $id;
            type G1Config = $g1;
            type Engine = $engine;
        }
    };
}

suite!(Bn254, CurveId::Bn254, ark_bn254::g1::Config, ark_bn254::Bn254);
suite!(
    Bls12_381,
    CurveId::Bls12_381,
    ark_bls12_381::g1::Config,
    ark_bls12_381::Bls12_381
);
suite!(
    #[cfg(feature = "bls12-377")]
    Bls12_377,
    CurveId::Bls12_377,
    ark_bls12_377::g1::Config,
    ark_bls12_377::Bls12_377
);
suite!(
    #[cfg(feature = "bw6-761")]
    Bw6_761,
    CurveId::Bw6_761,
    ark_bw6_761::g1::Config,
    ark_bw6_761::BW6_761
);

/// Runs generic code for a curve chosen at runtime.
pub trait SuiteVisitor {
    type Output;

    fn visit<S: CurveSuite>(self) -> Self::Output;
}

pub fn dispatch<V: SuiteVisitor>(curve: CurveId, visitor: V) -> Result<V::Output> {
    match curve {
        CurveId::Bn254 => Ok(visitor.visit::<Bn254>()),
        CurveId::Bls12_381 => Ok(visitor.visit::<Bls12_381>()),
        #[cfg(feature = "bls12-377")]
        CurveId::Bls12_377 => Ok(visitor.visit::<Bls12_377>()),
        #[cfg(feature = "bw6-761")]
        CurveId::Bw6_761 => Ok(visitor.visit::<Bw6_761>()),
        #[allow(unreachable_patterns)]
        other => Err(Error::UnsupportedCurve(other)),
    }
}

pub fn g1<S: CurveSuite>() -> G1Affine<S> {
    G1Affine::<S>::generator()
}

pub fn g2<S: CurveSuite>() -> G2Affine<S> {
    G2Affine::<S>::generator()
}

pub fn secp_generator() -> SecpAffine {
    SecpAffine::generator()
}

/// The optimal Ate pairing `e(p, q)`.
pub fn pair<S: CurveSuite>(p: &G1Affine<S>, q: &G2Affine<S>) -> Gt<S> {
    S::Engine::pairing(*p, *q)
}

/// Pairing against a precomputed second argument.
pub fn pair_prepared<S: CurveSuite>(p: &G1Affine<S>, q: &G2Prepared<S>) -> Gt<S> {
    let ml = S::Engine::multi_miller_loop([*p], [q.clone()]);
    S::Engine::final_exponentiation(ml).expect("final exponentiation of a Miller loop output")
}

/// `e(g1, g2)`, the generator of GT.
pub fn gt_generator<S: CurveSuite>() -> Gt<S> {
    Gt::<S>::generator()
}

/// Product of two GT elements.
pub fn gt_mul<S: CurveSuite>(a: &Gt<S>, b: &Gt<S>) -> Gt<S> {
    *a + *b
}

/// `x^s` in GT.
pub fn gt_exp<S: CurveSuite>(x: &Gt<S>, s: &Fr<S>) -> Gt<S> {
    *x * *s
}

pub fn gt_inverse<S: CurveSuite>(x: &Gt<S>) -> Gt<S> {
    -*x
}

pub fn gt_is_one<S: CurveSuite>(x: &Gt<S>) -> bool {
    x.is_zero()
}

/// Uniform nonzero scalar of the pairing group order.
pub fn random_fr<S: CurveSuite, R: Rng + ?Sized>(rng: &mut R) -> Fr<S> {
    loop {
        let s = Fr::<S>::rand(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Uniform nonzero secp256k1 scalar.
pub fn random_secp_scalar<R: Rng + ?Sized>(rng: &mut R) -> SecpScalar {
    loop {
        let s = SecpScalar::rand(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use ark_ec::CurveGroup;
    use ark_ff::{Field, One, PrimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(0x5eed)
    }

    fn pairing_properties<S: CurveSuite>(samples: usize) {
        let mut rng = rng();
        let g1 = g1::<S>();
        let g2 = g2::<S>();
        let base = pair::<S>(&g1, &g2);
        assert!(!gt_is_one::<S>(&base));

        let doubled = (g1.into_group() + g1).into_affine();
        assert_eq!(pair::<S>(&doubled, &g2), gt_mul::<S>(&base, &base));

        for _ in 0..samples {
            let r = (g1 * random_fr::<S, _>(&mut rng)).into_affine();
            let s = (g1 * random_fr::<S, _>(&mut rng)).into_affine();
            let t = (g2 * random_fr::<S, _>(&mut rng)).into_affine();
            let u = (g2 * random_fr::<S, _>(&mut rng)).into_affine();

            let rs = (r.into_group() + s).into_affine();
            assert_eq!(
                pair::<S>(&rs, &t),
                gt_mul::<S>(&pair::<S>(&r, &t), &pair::<S>(&s, &t))
            );
            let tu = (t.into_group() + u).into_affine();
            assert_eq!(
                pair::<S>(&r, &tu),
                gt_mul::<S>(&pair::<S>(&r, &t), &pair::<S>(&r, &u))
            );

            let neg_t = (-t.into_group()).into_affine();
            let neg_r = -r;
            let inv = gt_inverse::<S>(&pair::<S>(&r, &t));
            assert_eq!(pair::<S>(&r, &neg_t), inv);
            assert_eq!(pair::<S>(&neg_r, &t), inv);

            let a = random_fr::<S, _>(&mut rng);
            let b = random_fr::<S, _>(&mut rng);
            let lhs = pair::<S>(&(r * a).into_affine(), &(t * b).into_affine());
            let swapped = pair::<S>(&(r * b).into_affine(), &(t * a).into_affine());
            assert_eq!(lhs, swapped);
            assert_eq!(lhs, gt_exp::<S>(&pair::<S>(&r, &t), &(a * b)));
        }
    }

    #[test]
    fn bn254_pairing_properties() {
        pairing_properties::<Bn254>(8);
    }

    #[test]
    fn bls12_381_pairing_properties() {
        pairing_properties::<Bls12_381>(4);
    }

    #[test]
    fn prepared_pairing_matches_single_shot() {
        let mut rng = rng();
        let q = (g2::<Bn254>() * random_fr::<Bn254, _>(&mut rng)).into_affine();
        let prepared = G2Prepared::<Bn254>::from(q);
        for _ in 0..4 {
            let p = (g1::<Bn254>() * random_fr::<Bn254, _>(&mut rng)).into_affine();
            assert_eq!(pair_prepared::<Bn254>(&p, &prepared), pair::<Bn254>(&p, &q));
        }
    }

    #[test]
    fn group_law_edge_cases() {
        let g = g1::<Bn254>();
        assert!((g * Fr::<Bn254>::zero()).is_zero());
        assert_eq!((secp_generator() * SecpScalar::one()).into_affine(), secp_generator());
        let minus_one = -Fr::<Bn254>::one();
        assert!((g * minus_one + g).is_zero());
        let secp_minus_one = -SecpScalar::one();
        assert!((secp_generator() * secp_minus_one + secp_generator()).is_zero());
    }

    #[test]
    fn gt_generator_has_prime_order() {
        let gt = gt_generator::<Bn254>();
        assert_eq!(gt, pair::<Bn254>(&g1::<Bn254>(), &g2::<Bn254>()));
        let lifted = gt.0.pow(Fr::<Bn254>::MODULUS);
        assert!(lifted.is_one());
    }

    #[test]
    fn curve_ids_round_trip_and_dispatch() {
        for id in CurveId::ALL {
            assert_eq!(id.as_str().parse::<CurveId>().unwrap(), id);
        }
        assert!("bn256".parse::<CurveId>().is_err());

        struct Name;
        impl SuiteVisitor for Name {
            type Output = CurveId;
            fn visit<S: CurveSuite>(self) -> CurveId {
                S::ID
            }
        }
        for id in compiled_curves() {
            assert_eq!(dispatch(id, Name).unwrap(), id);
        }
        assert!(matches!(
            dispatch(CurveId::Bls24_315, Name),
            Err(Error::UnsupportedCurve(CurveId::Bls24_315))
        ));
    }
}
