//! Sender, viewer and recipient derivations for P1, P2, P3, SK and DKSAP.
//!
//! Shared secrets and stealth public keys per protocol (`r` ephemeral, `k`
//! spending, `v`/`V` viewing, `H` Keccak-256 reduced into the relevant
//! scalar field):
//!
//! | protocol | shared secret           | stealth public key       | stealth private key |
//! |----------|-------------------------|--------------------------|---------------------|
//! | P1       | `r*V = v*R` in G1       | `e(r*V, K)`              | `k*v`               |
//! | P2       | `r*V = v*R` in G1       | `e(H(r*V)*g1, K)`        | `k*H(v*R)`          |
//! | P3       | `r*V = v*R` in G1       | `b*K`, `b = c0(e(r*V, g2))` | `b*k`            |
//! | SK       | `e(K, g2)^r = e(R, V)`  | `K + H(S)*g1`            | `k + H(S)`          |
//! | DKSAP    | `r*V = v*R` on secp256k1| `K + H(S)*g_e`           | `k + H(S)`          |
//!
//! `c0` is the first base-field coefficient of the GT element read as a
//! big-endian integer modulo the secp256k1 order.

pub mod attacks;
mod tag;

use std::fmt;
use std::str::FromStr;

use ark_ec::{AffineRepr, CurveGroup};
use ark_ff::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{
    self, digest_to_fr, digest_to_secp_scalar, field_to_be_bytes, from_hex, g1, g1_from_bytes,
    g1_to_bytes, g2, gt_exp, gt_first_coordinate, gt_generator, gt_to_bytes, keccak256, pair,
    secp_from_bytes, secp_generator, secp_to_bytes, secp_uncompressed_xy, to_hex, CurveId,
    CurveSuite, Digest32, Fr, G1Affine, Gt, SecpAffine, SecpScalar,
};
use crate::error::{Error, Result};
use crate::keys::{MetaAddress, ProtocolId, SpendingKey, ViewingKey};

pub use tag::{
    compute_view_tag, tag_policy_check, TagPolicy, TagVariant, ViewTag, ViewTagConfig,
    BASE_SECURITY_BITS, MAX_TAG_BITS,
};
pub(crate) use tag::x_le;

/// Value both the sender (via `r`) and the viewing-key holder can compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SharedValue<S: CurveSuite> {
    G1(G1Affine<S>),
    Gt(Gt<S>),
    Secp(SecpAffine),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SharedSecret<S: CurveSuite> {
    protocol: ProtocolId,
    value: SharedValue<S>,
}

impl<S: CurveSuite> SharedSecret<S> {
    pub fn new(protocol: ProtocolId, value: SharedValue<S>) -> Result<Self> {
        let ok = matches!(
            (protocol, &value),
            (ProtocolId::P1 | ProtocolId::P2 | ProtocolId::P3, SharedValue::G1(_))
                | (ProtocolId::Sk, SharedValue::Gt(_))
                | (ProtocolId::Dksap, SharedValue::Secp(_))
        );
        if !ok {
            return Err(Error::decode(format!(
                "shared secret of the wrong group for {protocol}"
            )));
        }
        Ok(SharedSecret { protocol, value })
    }

    pub fn protocol(&self) -> ProtocolId {
        self.protocol
    }

    pub fn value(&self) -> &SharedValue<S> {
        &self.value
    }

    /// Canonical encoding; the input to every hash of the shared secret.
    pub fn to_bytes(&self) -> Vec<u8> {
        match &self.value {
            SharedValue::G1(p) => g1_to_bytes::<S>(p),
            SharedValue::Gt(x) => gt_to_bytes::<S>(x),
            SharedValue::Secp(p) => secp_to_bytes(p),
        }
    }

    pub fn digest(&self) -> Digest32 {
        keccak256(&self.to_bytes())
    }

    pub(crate) fn check_protocol(&self, protocol: ProtocolId) -> Result<()> {
        protocol.expect(self.protocol)
    }
}

/// Secret half of the sender's single-use key.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EphemeralSecret<S: CurveSuite> {
    Fr(Fr<S>),
    Secp(SecpScalar),
}

/// Single-use sender key `r` with public part `R = r*g1` (`r*g_e` for DKSAP).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EphemeralKey<S: CurveSuite> {
    protocol: ProtocolId,
    secret: EphemeralSecret<S>,
}

impl<S: CurveSuite> EphemeralKey<S> {
    pub fn generate<R: Rng + ?Sized>(protocol: ProtocolId, rng: &mut R) -> Self {
        let secret = match protocol {
            ProtocolId::Dksap => EphemeralSecret::Secp(curve::random_secp_scalar(rng)),
            _ => EphemeralSecret::Fr(curve::random_fr::<S, _>(rng)),
        };
        EphemeralKey { protocol, secret }
    }

    pub fn new(protocol: ProtocolId, secret: EphemeralSecret<S>) -> Result<Self> {
        let ok = match secret {
            EphemeralSecret::Fr(r) => protocol != ProtocolId::Dksap && !r.is_zero(),
            EphemeralSecret::Secp(r) => protocol == ProtocolId::Dksap && !r.is_zero(),
        };
        if !ok {
            return Err(Error::decode(format!("invalid ephemeral scalar for {protocol}")));
        }
        Ok(EphemeralKey { protocol, secret })
    }

    pub fn protocol(&self) -> ProtocolId {
        self.protocol
    }

    pub fn secret(&self) -> &EphemeralSecret<S> {
        &self.secret
    }

    pub fn public(&self) -> EphemeralPub<S> {
        match self.secret {
            EphemeralSecret::Fr(r) => EphemeralPub::G1((g1::<S>() * r).into_affine()),
            EphemeralSecret::Secp(r) => EphemeralPub::Secp((secp_generator() * r).into_affine()),
        }
    }
}

/// Ephemeral public key `R` as published in an announcement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EphemeralPub<S: CurveSuite> {
    G1(G1Affine<S>),
    Secp(SecpAffine),
}

impl<S: CurveSuite> EphemeralPub<S> {
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            EphemeralPub::G1(p) => g1_to_bytes::<S>(p),
            EphemeralPub::Secp(p) => secp_to_bytes(p),
        }
    }

    /// Decodes `R` into the group `protocol` publishes it in.
    pub fn from_bytes(protocol: ProtocolId, bytes: &[u8]) -> Result<Self> {
        let r = match protocol {
            ProtocolId::Dksap => EphemeralPub::Secp(secp_from_bytes(bytes)?),
            _ => EphemeralPub::G1(g1_from_bytes::<S>(bytes)?),
        };
        if r.is_identity() {
            return Err(Error::decode("ephemeral public key is the identity"));
        }
        Ok(r)
    }

    fn is_identity(&self) -> bool {
        match self {
            EphemeralPub::G1(p) => p.is_zero(),
            EphemeralPub::Secp(p) => p.is_zero(),
        }
    }

    fn g1(&self, protocol: ProtocolId) -> Result<&G1Affine<S>> {
        match self {
            EphemeralPub::G1(p) => Ok(p),
            EphemeralPub::Secp(_) => Err(Error::decode(format!(
                "{protocol} announcement carries a secp256k1 ephemeral key"
            ))),
        }
    }

    fn secp(&self) -> Result<&SecpAffine> {
        match self {
            EphemeralPub::Secp(p) => Ok(p),
            EphemeralPub::G1(_) => Err(Error::decode("dksap announcement carries a G1 ephemeral key")),
        }
    }
}

/// 20-byte stealth address: the last 20 bytes of the Keccak-256 of the
/// public key's encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StealthAddress(pub [u8; 20]);

impl StealthAddress {
    pub fn from_encoded_key(bytes: &[u8]) -> Self {
        let d = keccak256(bytes);
        let mut out = [0u8; 20];
        out.copy_from_slice(&d.0[12..]);
        StealthAddress(out)
    }
}

impl fmt::Display for StealthAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{}", hex::encode(self.0))
    }
}

impl fmt::Debug for StealthAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StealthAddress({self})")
    }
}

impl FromStr for StealthAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bytes = from_hex(s)?;
        let arr: [u8; 20] = bytes
            .try_into()
            .map_err(|_| Error::decode(format!("address {s:?} is not 20 bytes")))?;
        Ok(StealthAddress(arr))
    }
}

impl Serialize for StealthAddress {
    fn serialize<Ser: serde::Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StealthAddress {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Public key of a stealth address. P1 and P2 keys live in GT, P3 and DKSAP
/// keys on secp256k1, SK keys in G1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StealthPubKey<S: CurveSuite> {
    Gt(Gt<S>),
    Secp(SecpAffine),
    G1(G1Affine<S>),
}

impl<S: CurveSuite> StealthPubKey<S> {
    /// Encoding hashed into the address: uncompressed `x || y` without
    /// prefix on secp256k1, the canonical encoding otherwise.
    pub fn address_preimage(&self) -> Vec<u8> {
        match self {
            StealthPubKey::Gt(x) => gt_to_bytes::<S>(x),
            StealthPubKey::Secp(p) => secp_uncompressed_xy(p).to_vec(),
            StealthPubKey::G1(p) => g1_to_bytes::<S>(p),
        }
    }

    pub fn address(&self) -> StealthAddress {
        StealthAddress::from_encoded_key(&self.address_preimage())
    }

    pub fn to_hex(&self) -> String {
        match self {
            StealthPubKey::Gt(x) => to_hex(&gt_to_bytes::<S>(x)),
            StealthPubKey::Secp(p) => to_hex(&secp_to_bytes(p)),
            StealthPubKey::G1(p) => to_hex(&g1_to_bytes::<S>(p)),
        }
    }
}

/// Private key of one stealth address.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StealthPrivKey<S: CurveSuite> {
    P1(Fr<S>),
    P2(Fr<S>),
    P3(SecpScalar),
    Sk(Fr<S>),
    Dksap(SecpScalar),
}

impl<S: CurveSuite> StealthPrivKey<S> {
    pub fn protocol(&self) -> ProtocolId {
        match self {
            StealthPrivKey::P1(_) => ProtocolId::P1,
            StealthPrivKey::P2(_) => ProtocolId::P2,
            StealthPrivKey::P3(_) => ProtocolId::P3,
            StealthPrivKey::Sk(_) => ProtocolId::Sk,
            StealthPrivKey::Dksap(_) => ProtocolId::Dksap,
        }
    }

    /// Big-endian hex of the scalar.
    pub fn to_hex(&self) -> String {
        match self {
            StealthPrivKey::P1(x) | StealthPrivKey::P2(x) | StealthPrivKey::Sk(x) => {
                to_hex(&field_to_be_bytes(x))
            }
            StealthPrivKey::P3(x) | StealthPrivKey::Dksap(x) => to_hex(&field_to_be_bytes(x)),
        }
    }
}

/// One entry of the ephemeral public key registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Announcement<S: CurveSuite> {
    /// Position in the registry, assigned on append.
    pub index: u64,
    pub protocol: ProtocolId,
    pub ephemeral: EphemeralPub<S>,
    pub tag: ViewTag,
    /// Stealth address the sender paid, when published alongside `R`.
    pub address: Option<StealthAddress>,
}

/// JSON-lines form of an [`Announcement`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnouncementRecord {
    pub idx: u64,
    pub proto: ProtocolId,
    pub curve: CurveId,
    #[serde(rename = "R")]
    pub ephemeral: String,
    pub tag: String,
    pub tagbits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub addr: Option<StealthAddress>,
}

impl<S: CurveSuite> Announcement<S> {
    pub fn to_record(&self) -> AnnouncementRecord {
        AnnouncementRecord {
            idx: self.index,
            proto: self.protocol,
            curve: S::ID,
            ephemeral: to_hex(&self.ephemeral.to_bytes()),
            tag: self.tag.to_hex(),
            tagbits: self.tag.bits(),
            addr: self.address,
        }
    }

    pub fn from_record(rec: &AnnouncementRecord) -> Result<Self> {
        if rec.curve != S::ID {
            return Err(Error::CurveMismatch {
                expected: S::ID,
                found: rec.curve,
            });
        }
        Ok(Announcement {
            index: rec.idx,
            protocol: rec.proto,
            ephemeral: EphemeralPub::from_bytes(rec.proto, &from_hex(&rec.ephemeral)?)?,
            tag: ViewTag::from_hex(&rec.tag, rec.tagbits)?,
            address: rec.addr,
        })
    }
}

/// What the sender publishes and pays to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SenderOutput<S: CurveSuite> {
    pub announcement: Announcement<S>,
    pub pub_key: StealthPubKey<S>,
    pub address: StealthAddress,
    /// Result of [`tag_policy_check`] for the configuration used.
    pub policy: TagPolicy,
}

/// `b` for P3: the first coordinate of `e(r*V, g2)` as a secp256k1 scalar.
pub fn p3_scalar<S: CurveSuite>(pairing_value: &Gt<S>) -> Result<SecpScalar> {
    let b = gt_first_coordinate::<S>(pairing_value);
    if b.is_zero() {
        Err(Error::DegenerateEphemeral)
    } else {
        Ok(b)
    }
}

/// Shared secret from the sender's side.
pub fn sender_shared<S: CurveSuite>(
    meta: &MetaAddress<S>,
    eph: &EphemeralKey<S>,
) -> Result<SharedSecret<S>> {
    meta.protocol().expect(eph.protocol())?;
    let value = match (meta, &eph.secret) {
        (
            MetaAddress::P1 { view, .. } | MetaAddress::P2 { view, .. } | MetaAddress::P3 { view, .. },
            EphemeralSecret::Fr(r),
        ) => SharedValue::G1((*view * r).into_affine()),
        (MetaAddress::Sk { spend }, EphemeralSecret::Fr(r)) => {
            SharedValue::Gt(gt_exp::<S>(&pair::<S>(spend, &g2::<S>()), r))
        }
        (MetaAddress::Dksap { view, .. }, EphemeralSecret::Secp(r)) => {
            SharedValue::Secp((*view * r).into_affine())
        }
        _ => unreachable!("EphemeralKey constructors tie the scalar type to the protocol"),
    };
    SharedSecret::new(meta.protocol(), value)
}

/// Shared secret from the viewing-key holder's side.
pub fn recipient_shared<S: CurveSuite>(
    viewing: &ViewingKey<S>,
    ann: &Announcement<S>,
) -> Result<SharedSecret<S>> {
    viewing.protocol().expect(ann.protocol)?;
    let protocol = ann.protocol;
    let value = match viewing {
        ViewingKey::P1(v) | ViewingKey::P2(v) | ViewingKey::P3(v) => {
            SharedValue::G1((*ann.ephemeral.g1(protocol)? * v).into_affine())
        }
        ViewingKey::Sk(big_v) => SharedValue::Gt(pair::<S>(ann.ephemeral.g1(protocol)?, big_v)),
        ViewingKey::Dksap(v) => SharedValue::Secp((*ann.ephemeral.secp()? * v).into_affine()),
    };
    SharedSecret::new(protocol, value)
}

/// Stealth public key from the shared secret and the public meta-address.
/// Both the sender and a viewer end here.
pub fn stealth_pub_from_shared<S: CurveSuite>(
    meta: &MetaAddress<S>,
    shared: &SharedSecret<S>,
) -> Result<StealthPubKey<S>> {
    shared.check_protocol(meta.protocol())?;
    let pk = match (meta, &shared.value) {
        (MetaAddress::P1 { spend, .. }, SharedValue::G1(s)) => StealthPubKey::Gt(pair::<S>(s, spend)),
        (MetaAddress::P2 { spend, .. }, SharedValue::G1(_)) => {
            let h = digest_to_fr::<S>(&shared.digest());
            StealthPubKey::Gt(pair::<S>(&(g1::<S>() * h).into_affine(), spend))
        }
        (MetaAddress::P3 { spend, .. }, SharedValue::G1(s)) => {
            let b = p3_scalar::<S>(&pair::<S>(s, &g2::<S>()))?;
            StealthPubKey::Secp((*spend * b).into_affine())
        }
        (MetaAddress::Sk { spend }, SharedValue::Gt(_)) => {
            let h = digest_to_fr::<S>(&shared.digest());
            StealthPubKey::G1((*spend + g1::<S>() * h).into_affine())
        }
        (MetaAddress::Dksap { spend, .. }, SharedValue::Secp(_)) => {
            let h = digest_to_secp_scalar(&shared.digest());
            StealthPubKey::Secp((*spend + secp_generator() * h).into_affine())
        }
        _ => unreachable!("SharedSecret::new ties the value group to the protocol"),
    };
    Ok(pk)
}

/// Sender side: derives the announcement (ephemeral key and view tag), the
/// stealth public key and its address.
pub fn sender_derive<S: CurveSuite>(
    meta: &MetaAddress<S>,
    eph: &EphemeralKey<S>,
    cfg: ViewTagConfig,
) -> Result<SenderOutput<S>> {
    let protocol = meta.protocol();
    let shared = sender_shared(meta, eph)?;
    let tag = compute_view_tag(protocol, &shared, cfg)?;
    let pub_key = stealth_pub_from_shared(meta, &shared)?;
    let address = pub_key.address();
    Ok(SenderOutput {
        announcement: Announcement {
            index: 0,
            protocol,
            ephemeral: eph.public(),
            tag,
            address: Some(address),
        },
        pub_key,
        address,
        policy: tag_policy_check(protocol, cfg),
    })
}

/// Draws an ephemeral key and derives, drawing again in the (negligible) case
/// that P3 maps the pairing value to a zero scalar.
pub fn send<S: CurveSuite, R: Rng + ?Sized>(
    meta: &MetaAddress<S>,
    cfg: ViewTagConfig,
    rng: &mut R,
) -> Result<(EphemeralKey<S>, SenderOutput<S>)> {
    loop {
        let eph = EphemeralKey::generate(meta.protocol(), rng);
        match sender_derive(meta, &eph, cfg) {
            Err(Error::DegenerateEphemeral) => continue,
            other => return other.map(|out| (eph, out)),
        }
    }
}

/// Viewer side: the stealth public key and address from the viewing key and
/// public data only.
pub fn viewer_derive_pub<S: CurveSuite>(
    viewing: &ViewingKey<S>,
    meta: &MetaAddress<S>,
    ann: &Announcement<S>,
) -> Result<(StealthPubKey<S>, StealthAddress)> {
    meta.protocol().expect(viewing.protocol())?;
    let shared = recipient_shared(viewing, ann)?;
    let pk = stealth_pub_from_shared(meta, &shared)?;
    Ok((pk, pk.address()))
}

/// Private key from the shared secret; the one place a spending key is used.
pub fn stealth_priv_from_shared<S: CurveSuite>(
    spending: &SpendingKey<S>,
    viewing: &ViewingKey<S>,
    shared: &SharedSecret<S>,
) -> Result<StealthPrivKey<S>> {
    spending.protocol().expect(viewing.protocol())?;
    shared.check_protocol(spending.protocol())?;
    let sk = match (spending, viewing, &shared.value) {
        (SpendingKey::P1(k), ViewingKey::P1(v), _) => StealthPrivKey::P1(*k * v),
        (SpendingKey::P2(k), _, _) => StealthPrivKey::P2(*k * digest_to_fr::<S>(&shared.digest())),
        (SpendingKey::P3(k), _, SharedValue::G1(s)) => {
            StealthPrivKey::P3(p3_scalar::<S>(&pair::<S>(s, &g2::<S>()))? * k)
        }
        (SpendingKey::Sk(k), _, _) => StealthPrivKey::Sk(*k + digest_to_fr::<S>(&shared.digest())),
        (SpendingKey::Dksap(k), _, _) => {
            StealthPrivKey::Dksap(*k + digest_to_secp_scalar(&shared.digest()))
        }
        _ => unreachable!("protocols checked above"),
    };
    Ok(sk)
}

/// Recipient side: the private key of the stealth address in `ann`.
pub fn recipient_derive_priv<S: CurveSuite>(
    spending: &SpendingKey<S>,
    viewing: &ViewingKey<S>,
    ann: &Announcement<S>,
) -> Result<StealthPrivKey<S>> {
    spending.protocol().expect(ann.protocol)?;
    let shared = recipient_shared(viewing, ann)?;
    stealth_priv_from_shared(spending, viewing, &shared)
}

/// Public key implied by a stealth private key. P1 needs `R` from the
/// announcement; the other protocols ignore it beyond the protocol check.
pub fn priv_to_pub<S: CurveSuite>(
    priv_key: &StealthPrivKey<S>,
    ann: &Announcement<S>,
) -> Result<StealthPubKey<S>> {
    priv_key.protocol().expect(ann.protocol)?;
    Ok(match priv_key {
        StealthPrivKey::P1(x) => {
            let r = ann.ephemeral.g1(ann.protocol)?;
            StealthPubKey::Gt(gt_exp::<S>(&pair::<S>(r, &g2::<S>()), x))
        }
        StealthPrivKey::P2(x) => StealthPubKey::Gt(gt_exp::<S>(&gt_generator::<S>(), x)),
        StealthPrivKey::P3(x) | StealthPrivKey::Dksap(x) => {
            StealthPubKey::Secp((secp_generator() * x).into_affine())
        }
        StealthPrivKey::Sk(x) => StealthPubKey::G1((g1::<S>() * x).into_affine()),
    })
}

#[cfg(test)]
mod tests {
    use ark_ff::{BigInteger, Field, One, PrimeField};
    use num_bigint::BigUint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    use super::*;
    use crate::curve::{Bls12_381, Bn254};
    use crate::keys::{gen_keys, RecipientKeys};

    type S = Bn254;

    fn rng(seed: u64) -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(seed)
    }

    fn hash8() -> ViewTagConfig {
        ViewTagConfig::hash(8).unwrap()
    }

    fn round<C: CurveSuite>(keys: &RecipientKeys<C>, rng: &mut ChaCha20Rng, cfg: ViewTagConfig) {
        let (_, out) = send(&keys.meta, cfg, rng).unwrap();
        let ann = out.announcement;
        let (viewer_pk, viewer_addr) = viewer_derive_pub(&keys.viewing, &keys.meta, &ann).unwrap();
        let sk = recipient_derive_priv(&keys.spending, &keys.viewing, &ann).unwrap();
        let from_priv = priv_to_pub(&sk, &ann).unwrap();
        assert_eq!(viewer_pk, out.pub_key);
        assert_eq!(from_priv, out.pub_key);
        assert_eq!(viewer_addr, out.address);
        assert_eq!(from_priv.address(), out.address);
        assert_eq!(ann.address, Some(out.address));
    }

    #[test]
    fn every_protocol_agrees_end_to_end() {
        let mut rng = rng(1);
        for proto in ProtocolId::ALL {
            for _ in 0..10 {
                let keys = gen_keys::<S, _>(proto, &mut rng);
                round(&keys, &mut rng, hash8());
            }
            let keys = gen_keys::<Bls12_381, _>(proto, &mut rng);
            round(&keys, &mut rng, hash8());
        }
    }

    #[test]
    fn xcoord_tags_work_for_point_secrets() {
        let mut rng = rng(2);
        for proto in [ProtocolId::P1, ProtocolId::P2, ProtocolId::P3, ProtocolId::Dksap] {
            let keys = gen_keys::<S, _>(proto, &mut rng);
            round(&keys, &mut rng, ViewTagConfig::xcoord(16).unwrap());
        }
        let keys = gen_keys::<S, _>(ProtocolId::Sk, &mut rng);
        let eph = EphemeralKey::generate(ProtocolId::Sk, &mut rng);
        assert!(matches!(
            sender_derive(&keys.meta, &eph, ViewTagConfig::xcoord(8).unwrap()),
            Err(Error::UnsupportedVariant { .. })
        ));
    }

    #[test]
    fn p1_public_key_is_generator_to_rvk() {
        // e(r*V, K) = e(g1, g2)^(r*v*k), computed from the exponent product.
        for (k, v, r) in [(2u64, 3u64, 5u64), (7, 11, 13), (1, 1, 1)] {
            let (k, v, r) = (Fr::<S>::from(k), Fr::<S>::from(v), Fr::<S>::from(r));
            let meta = MetaAddress::<S>::P1 {
                spend: (g2::<S>() * k).into_affine(),
                view: (g1::<S>() * v).into_affine(),
            };
            let eph = EphemeralKey::new(ProtocolId::P1, EphemeralSecret::Fr(r)).unwrap();
            let out = sender_derive(&meta, &eph, hash8()).unwrap();
            let expected = gt_exp::<S>(&gt_generator::<S>(), &(r * v * k));
            assert_eq!(out.pub_key, StealthPubKey::Gt(expected));
        }
    }

    #[test]
    fn p3_private_key_matches_exponent_oracle() {
        let mut rng = rng(3);
        let n = BigUint::from_bytes_be(&SecpScalar::MODULUS.to_bytes_be());
        for (v, r) in [(3u64, 4u64), (17, 19), (123456789, 987654321)] {
            let k = curve::random_secp_scalar(&mut rng);
            let (v, r) = (Fr::<S>::from(v), Fr::<S>::from(r));
            let keys = RecipientKeys::<S> {
                spending: SpendingKey::P3(k),
                viewing: ViewingKey::P3(v),
                meta: MetaAddress::P3 {
                    spend: (secp_generator() * k).into_affine(),
                    view: (g1::<S>() * v).into_affine(),
                },
            };
            let eph = EphemeralKey::new(ProtocolId::P3, EphemeralSecret::Fr(r)).unwrap();
            let out = sender_derive(&keys.meta, &eph, hash8()).unwrap();
            let sk = recipient_derive_priv(&keys.spending, &keys.viewing, &out.announcement).unwrap();

            // Oracle: e(r*V, g2) = e(g1, g2)^(r*v); its first tower coefficient,
            // big-endian, reduced mod n, times k mod n.
            let gt = gt_generator::<S>().0.pow((r * v).into_bigint());
            let c0 = gt.to_base_prime_field_elements().next().unwrap();
            let b = BigUint::from_bytes_be(&c0.into_bigint().to_bytes_be()) % &n;
            let kk = BigUint::from_bytes_be(&k.into_bigint().to_bytes_be());
            let want = (b * kk) % &n;
            let StealthPrivKey::P3(got) = sk else { unreachable!() };
            assert_eq!(BigUint::from_bytes_be(&got.into_bigint().to_bytes_be()), want);
        }
    }

    #[test]
    fn shared_secret_symmetry_for_p3() {
        let mut rng = rng(4);
        let keys = gen_keys::<S, _>(ProtocolId::P3, &mut rng);
        let eph = EphemeralKey::generate(ProtocolId::P3, &mut rng);
        let out = sender_derive(&keys.meta, &eph, hash8()).unwrap();
        let a = sender_shared(&keys.meta, &eph).unwrap();
        let b = recipient_shared(&keys.viewing, &out.announcement).unwrap();
        assert_eq!(a, b);
        let (SharedValue::G1(a), SharedValue::G1(b)) = (a.value(), b.value()) else { unreachable!() };
        assert_eq!(
            p3_scalar::<S>(&pair::<S>(a, &g2::<S>())).unwrap(),
            p3_scalar::<S>(&pair::<S>(b, &g2::<S>())).unwrap()
        );
    }

    #[test]
    fn dksap_matches_independent_recomputation() {
        let mut rng = rng(5);
        let k = curve::random_secp_scalar(&mut rng);
        let v = curve::random_secp_scalar(&mut rng);
        let r = curve::random_secp_scalar(&mut rng);
        let meta = MetaAddress::<S>::Dksap {
            spend: (secp_generator() * k).into_affine(),
            view: (secp_generator() * v).into_affine(),
        };
        let eph = EphemeralKey::new(ProtocolId::Dksap, EphemeralSecret::Secp(r)).unwrap();
        let out = sender_derive(&meta, &eph, hash8()).unwrap();

        // Recipient recomputation: S = v*R, pub = (k + H(S))*g_e.
        let big_r = (secp_generator() * r).into_affine();
        let s = (big_r * v).into_affine();
        let h = SecpScalar::from_be_bytes_mod_order(&keccak256(&secp_to_bytes(&s)).0);
        let expected = (secp_generator() * (k + h)).into_affine();
        assert_eq!(out.pub_key, StealthPubKey::Secp(expected));
        assert_eq!(out.announcement.tag.value(), keccak256(&secp_to_bytes(&s)).0[0] as u64);
    }

    #[test]
    fn hash_tag_is_first_digest_byte() {
        let mut rng = rng(6);
        let keys = gen_keys::<S, _>(ProtocolId::P2, &mut rng);
        let eph = EphemeralKey::generate(ProtocolId::P2, &mut rng);
        let out = sender_derive(&keys.meta, &eph, hash8()).unwrap();
        let MetaAddress::P2 { view, .. } = keys.meta else { unreachable!() };
        let EphemeralSecret::Fr(r) = eph.secret() else { unreachable!() };
        let point = (view * r).into_affine();
        let first = keccak256(&g1_to_bytes::<S>(&point)).0[0];
        assert_eq!(out.announcement.tag, ViewTag::new(8, first as u64).unwrap());
    }

    #[test]
    fn p1_private_key_is_reused_p2_is_not() {
        let mut rng = rng(7);
        let keys = gen_keys::<S, _>(ProtocolId::P1, &mut rng);
        let a = send(&keys.meta, hash8(), &mut rng).unwrap().1.announcement;
        let b = send(&keys.meta, hash8(), &mut rng).unwrap().1.announcement;
        assert_eq!(
            recipient_derive_priv(&keys.spending, &keys.viewing, &a).unwrap(),
            recipient_derive_priv(&keys.spending, &keys.viewing, &b).unwrap()
        );
        let keys = gen_keys::<S, _>(ProtocolId::P2, &mut rng);
        let a = send(&keys.meta, hash8(), &mut rng).unwrap().1.announcement;
        let b = send(&keys.meta, hash8(), &mut rng).unwrap().1.announcement;
        assert_ne!(
            recipient_derive_priv(&keys.spending, &keys.viewing, &a).unwrap(),
            recipient_derive_priv(&keys.spending, &keys.viewing, &b).unwrap()
        );
    }

    #[test]
    fn p1_viewer_needs_only_v_and_public_k() {
        let mut rng = rng(8);
        let keys = gen_keys::<S, _>(ProtocolId::P1, &mut rng);
        let (_, out) = send(&keys.meta, hash8(), &mut rng).unwrap();
        let public_only = MetaAddress::<S>::decode(&keys.meta.encode()).unwrap();
        let (pk, _) = viewer_derive_pub(&keys.viewing, &public_only, &out.announcement).unwrap();
        assert_eq!(pk, out.pub_key);
    }

    #[test]
    fn wrong_viewing_key_misses() {
        let mut rng = rng(9);
        for proto in ProtocolId::ALL {
            let keys = gen_keys::<S, _>(proto, &mut rng);
            let (_, out) = send(&keys.meta, hash8(), &mut rng).unwrap();
            for _ in 0..5 {
                let other = gen_keys::<S, _>(proto, &mut rng);
                let (_, addr) = viewer_derive_pub(&other.viewing, &keys.meta, &out.announcement).unwrap();
                assert_ne!(addr, out.address);
            }
        }
    }

    #[test]
    fn priv_to_pub_identities() {
        let mut rng = rng(10);
        let keys = gen_keys::<S, _>(ProtocolId::Sk, &mut rng);
        let (_, out) = send(&keys.meta, hash8(), &mut rng).unwrap();
        let sk = recipient_derive_priv(&keys.spending, &keys.viewing, &out.announcement).unwrap();
        let StealthPrivKey::Sk(x) = sk else { unreachable!() };
        let SpendingKey::Sk(k) = keys.spending else { unreachable!() };
        let MetaAddress::Sk { spend } = keys.meta else { unreachable!() };
        let h = x - k;
        assert_eq!(
            priv_to_pub(&sk, &out.announcement).unwrap(),
            StealthPubKey::G1((spend + g1::<S>() * h).into_affine())
        );
    }

    #[test]
    fn mismatches_are_rejected() {
        let mut rng = rng(11);
        let p1 = gen_keys::<S, _>(ProtocolId::P1, &mut rng);
        let p2 = gen_keys::<S, _>(ProtocolId::P2, &mut rng);
        let eph = EphemeralKey::generate(ProtocolId::P2, &mut rng);
        assert!(matches!(
            sender_derive(&p1.meta, &eph, hash8()),
            Err(Error::ProtocolMismatch { .. })
        ));
        let (_, out) = send(&p2.meta, hash8(), &mut rng).unwrap();
        assert!(viewer_derive_pub(&p1.viewing, &p1.meta, &out.announcement).is_err());
        assert!(recipient_derive_priv(&p1.spending, &p1.viewing, &out.announcement).is_err());
        assert!(recipient_derive_priv(&p1.spending, &p2.viewing, &out.announcement).is_err());
        assert!(EphemeralKey::<S>::new(ProtocolId::Dksap, EphemeralSecret::Fr(Fr::<S>::one())).is_err());
        assert!(EphemeralKey::<S>::new(ProtocolId::P1, EphemeralSecret::Fr(Fr::<S>::zero())).is_err());
    }

    #[test]
    fn announcement_record_round_trip() {
        let mut rng = rng(12);
        for proto in ProtocolId::ALL {
            let keys = gen_keys::<S, _>(proto, &mut rng);
            let (_, mut out) = send(&keys.meta, ViewTagConfig::hash(44).unwrap(), &mut rng).unwrap();
            out.announcement.index = 42;
            let rec = out.announcement.to_record();
            let json = serde_json::to_string(&rec).unwrap();
            assert!(json.contains("\"R\":\"0x"));
            let back: AnnouncementRecord = serde_json::from_str(&json).unwrap();
            assert_eq!(Announcement::<S>::from_record(&back).unwrap(), out.announcement);
            assert!(Announcement::<Bls12_381>::from_record(&back).is_err());
        }
    }

    #[test]
    fn address_parsing() {
        let a = StealthAddress([0xab; 20]);
        let s = a.to_string();
        assert_eq!(s.len(), 42);
        assert_eq!(s.parse::<StealthAddress>().unwrap(), a);
        assert!("0xabcd".parse::<StealthAddress>().is_err());
    }
}
