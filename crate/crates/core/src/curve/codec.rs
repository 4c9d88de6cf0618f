//! Canonical byte encodings.
//!
//! * G1 / G2 of a pairing suite: arkworks compressed form (little-endian x
//!   with the sign and infinity flags in the top bits), validated on decode
//!   for curve membership and subgroup membership.
//! * secp256k1: SEC1 compressed, `0x02|0x03 || x` big-endian, `0x00` for the
//!   identity.
//! * GT: the base-prime-field coefficients of the extension element in
//!   arkworks' tower order, each written big-endian at the limb width of the
//!   base field.

use ark_ec::short_weierstrass::SWCurveConfig;
use ark_ec::AffineRepr;
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};

use super::{CurveSuite, Fr, G1Affine, G2Affine, Gt, SecpAffine, SecpBase, SecpConfig, SecpScalar, TargetField};
use crate::error::{Error, Result};

type BasePrime<S> = <TargetField<S> as Field>::BasePrimeField;

/// Lowercase, `0x`-prefixed hex.
pub fn to_hex(bytes: &[u8]) -> String {
    format!("0x{}", hex::encode(bytes))
}

pub fn from_hex(s: &str) -> Result<Vec<u8>> {
    let body = s
        .strip_prefix("0x")
        .ok_or_else(|| Error::decode(format!("hex string {s:?} lacks 0x prefix")))?;
    hex::decode(body).map_err(|e| Error::decode(format!("bad hex {s:?}: {e}")))
}

/// Big-endian encoding at the full limb width of `F`.
pub fn field_to_be_bytes<F: PrimeField>(f: &F) -> Vec<u8> {
    f.into_bigint().to_bytes_be()
}

/// Inverse of [`field_to_be_bytes`]; rejects wrong lengths and values that
/// are not fully reduced.
pub fn field_from_be_bytes<F: PrimeField>(bytes: &[u8]) -> Result<F> {
    let width = F::zero().into_bigint().to_bytes_be().len();
    if bytes.len() != width {
        return Err(Error::decode(format!(
            "field element must be {width} bytes, got {}",
            bytes.len()
        )));
    }
    let f = F::from_be_bytes_mod_order(bytes);
    if field_to_be_bytes(&f) != bytes {
        return Err(Error::decode("field element is not canonical"));
    }
    Ok(f)
}

fn ark_encode<T: CanonicalSerialize>(x: &T) -> Vec<u8> {
    let mut out = Vec::with_capacity(x.compressed_size());
    x.serialize_compressed(&mut out)
        .expect("serializing into a Vec cannot fail");
    out
}

fn ark_decode<T: CanonicalDeserialize>(bytes: &[u8], what: &str) -> Result<T> {
    let mut reader = bytes;
    let value = T::deserialize_compressed(&mut reader)
        .map_err(|e| Error::decode(format!("invalid {what}: {e}")))?;
    if !reader.is_empty() {
        return Err(Error::decode(format!("trailing bytes after {what}")));
    }
    Ok(value)
}

pub fn g1_to_bytes<S: CurveSuite>(p: &G1Affine<S>) -> Vec<u8> {
    ark_encode(p)
}

pub fn g1_from_bytes<S: CurveSuite>(bytes: &[u8]) -> Result<G1Affine<S>> {
    ark_decode(bytes, "G1 point")
}

pub fn g2_to_bytes<S: CurveSuite>(p: &G2Affine<S>) -> Vec<u8> {
    ark_encode(p)
}

pub fn g2_from_bytes<S: CurveSuite>(bytes: &[u8]) -> Result<G2Affine<S>> {
    ark_decode(bytes, "G2 point")
}

/// Base-prime-field coefficients of `f`, each big-endian, concatenated.
pub fn field_elements_be<F: Field>(f: &F) -> Vec<u8> {
    let mut out = Vec::new();
    for c in f.to_base_prime_field_elements() {
        out.extend_from_slice(&field_to_be_bytes(&c));
    }
    out
}

pub fn gt_to_bytes<S: CurveSuite>(x: &Gt<S>) -> Vec<u8> {
    field_elements_be(&x.0)
}

pub fn gt_from_bytes<S: CurveSuite>(bytes: &[u8]) -> Result<Gt<S>> {
    let width = field_to_be_bytes(&BasePrime::<S>::zero()).len();
    let degree = TargetField::<S>::extension_degree() as usize;
    if bytes.len() != width * degree {
        return Err(Error::decode(format!(
            "GT element must be {} bytes, got {}",
            width * degree,
            bytes.len()
        )));
    }
    let coeffs = bytes
        .chunks(width)
        .map(field_from_be_bytes::<BasePrime<S>>)
        .collect::<Result<Vec<_>>>()?;
    let x = TargetField::<S>::from_base_prime_field_elems(coeffs)
        .ok_or_else(|| Error::decode("GT coefficient count"))?;
    if x.is_zero() || !x.pow(Fr::<S>::MODULUS).is_one() {
        return Err(Error::decode("GT element outside the order-p subgroup"));
    }
    Ok(ark_ec::pairing::PairingOutput(x))
}

/// The first base-field coefficient of `x`, as a big-endian integer reduced
/// modulo the secp256k1 group order.
pub fn gt_first_coordinate<S: CurveSuite>(x: &Gt<S>) -> SecpScalar {
    let first = x
        .0
        .to_base_prime_field_elements()
        .next()
        .expect("extension element has coefficients");
    SecpScalar::from_be_bytes_mod_order(&field_to_be_bytes(&first))
}

fn secp_be(f: &SecpBase) -> [u8; 32] {
    let mut out = [0u8; 32];
    out.copy_from_slice(&field_to_be_bytes(f));
    out
}

/// SEC1 compressed encoding (33 bytes, or the single byte `0x00` for the
/// identity).
pub fn secp_to_bytes(p: &SecpAffine) -> Vec<u8> {
    match p.xy() {
        None => vec![0x00],
        Some((x, y)) => {
            let mut out = Vec::with_capacity(33);
            out.push(if y.into_bigint().is_odd() { 0x03 } else { 0x02 });
            out.extend_from_slice(&secp_be(&x));
            out
        }
    }
}

pub fn secp_from_bytes(bytes: &[u8]) -> Result<SecpAffine> {
    match bytes {
        [0x00] => Ok(SecpAffine::identity()),
        [prefix @ (0x02 | 0x03), x @ ..] if x.len() == 32 => {
            let x = field_from_be_bytes::<SecpBase>(x)?;
            let rhs = x.square() * x + SecpConfig::COEFF_B;
            let mut y = rhs
                .sqrt()
                .ok_or_else(|| Error::decode("secp256k1 x-coordinate is not on the curve"))?;
            if y.into_bigint().is_odd() != (*prefix == 0x03) {
                y = -y;
            }
            Ok(SecpAffine::new_unchecked(x, y))
        }
        _ => Err(Error::decode(format!(
            "malformed SEC1 compressed point ({} bytes)",
            bytes.len()
        ))),
    }
}

/// Uncompressed coordinates without the SEC1 prefix, as hashed for
/// Ethereum addresses.
pub fn secp_uncompressed_xy(p: &SecpAffine) -> [u8; 64] {
    let mut out = [0u8; 64];
    if let Some((x, y)) = p.xy() {
        out[..32].copy_from_slice(&secp_be(&x));
        out[32..].copy_from_slice(&secp_be(&y));
    }
    out
}
