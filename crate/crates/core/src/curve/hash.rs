use std::fmt;

use ark_ff::PrimeField;
use tiny_keccak::{Hasher, Keccak};

use super::{CurveSuite, Fr, SecpScalar};

/// A Keccak-256 output.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest32(pub [u8; 32]);

impl Digest32 {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl AsRef<[u8]> for Digest32 {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Digest32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest32(0x{})", hex::encode(self.0))
    }
}

impl fmt::Display for Digest32 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

/// Keccak-256 with the original (pre-SHA-3) padding, as used by Ethereum.
pub fn keccak256(data: &[u8]) -> Digest32 {
    let mut hasher = Keccak::v256();
    hasher.update(data);
    let mut out = [0u8; 32];
    hasher.finalize(&mut out);
    Digest32(out)
}

/// Digest read as a big-endian integer and reduced into the pairing scalar field.
pub fn digest_to_fr<S: CurveSuite>(d: &Digest32) -> Fr<S> {
    Fr::<S>::from_be_bytes_mod_order(&d.0)
}

pub fn digest_to_secp_scalar(d: &Digest32) -> SecpScalar {
    SecpScalar::from_be_bytes_mod_order(&d.0)
}

/// `keccak256(bytes) mod p`. Callers pass the canonical encoding of a group
/// element.
pub fn hash_to_fr<S: CurveSuite>(bytes: &[u8]) -> Fr<S> {
    digest_to_fr::<S>(&keccak256(bytes))
}

/// `keccak256(bytes) mod n` for the secp256k1 order `n`.
pub fn hash_to_secp_scalar(bytes: &[u8]) -> SecpScalar {
    digest_to_secp_scalar(&keccak256(bytes))
}
