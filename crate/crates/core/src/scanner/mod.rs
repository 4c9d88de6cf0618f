//! The recipient's scan loop: recompute each announcement's view tag from the
//! viewing key, and finish the derivation only where the tag matches.
//!
//! | protocol | per announcement          | after a tag match                  |
//! |----------|---------------------------|------------------------------------|
//! | P1       | `v*R`, tag                | `e(v*R, K)`                        |
//! | P2       | `v*R`, tag                | `h*g1`, `e(h*g1, K)`               |
//! | P3       | `v*R`, tag                | `e(v*R, g2)`, `b*K`                |
//! | SK       | `e(R, V)`, hash           | `h*g1`                             |
//! | DKSAP    | `v*R`, tag                | `h*g_e`                            |
//!
//! A [`ScanContext`] built with [`ScanMode::Precomputed`] holds a recoded
//! viewing key for `v*R`, the prepared (line-cached) constant G2 argument of
//! the protocol's pairing, and fixed-base tables for the constant bases.
//! [`ScanMode::Naive`] uses single-shot operations throughout; both modes
//! return identical results.

pub mod precompute;

use ark_ec::CurveGroup;
use serde::{Deserialize, Serialize};

use crate::curve::{
    g1, g1_to_bytes, g2, gt_to_bytes, keccak256, pair, pair_prepared, secp_generator, secp_to_bytes,
    digest_to_fr, digest_to_secp_scalar, CurveSuite, Digest32, Fr, G1Affine, G2Affine, G2Prepared,
    Gt, SecpAffine, SecpConfig, SecpScalar,
};
use crate::error::{Error, Result};
use crate::keys::{MetaAddress, ProtocolId, RecipientKeys, SpendingKey, ViewingKey};
use crate::protocols::{
    p3_scalar, Announcement, EphemeralPub, SharedValue,
    StealthAddress, StealthPrivKey, StealthPubKey, TagVariant,
};
use crate::registry::Registry;

use self::precompute::{FixedBase, GlvFixedScalar, WnafFixedScalar};

/// Announcements whose shared secrets are normalized with one inversion.
const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Precomputed,
    Naive,
}

enum Engine<S: CurveSuite> {
    Naive,
    /// P1, P2, P3. `pairing` is prepared `K` (P1, P2) or `g2` (P3).
    Point {
        v: GlvFixedScalar<S::G1Config>,
        pairing: G2Prepared<S>,
        g1: Option<FixedBase<S::G1Config>>,
        spend: Option<FixedBase<SecpConfig>>,
    },
    Sk {
        view: G2Prepared<S>,
        g1: FixedBase<S::G1Config>,
    },
    Dksap {
        v: WnafFixedScalar<SecpConfig>,
        generator: FixedBase<SecpConfig>,
    },
}

/// Everything a recipient (or a viewer, without the spending key) needs to
/// scan. Immutable once built.
pub struct ScanContext<S: CurveSuite> {
    protocol: ProtocolId,
    viewing: ViewingKey<S>,
    meta: MetaAddress<S>,
    spending: Option<SpendingKey<S>>,
    variant: TagVariant,
    mode: ScanMode,
    engine: Engine<S>,
}

impl<S: CurveSuite> std::fmt::Debug for ScanContext<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScanContext")
            .field("curve", &S::ID)
            .field("protocol", &self.protocol)
            .field("variant", &self.variant)
            .field("mode", &self.mode)
            .field("spending", &self.spending.is_some())
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanResult<S: CurveSuite> {
    pub index: u64,
    pub pub_key: StealthPubKey<S>,
    pub address: StealthAddress,
    /// Present when the context holds the spending key.
    pub priv_key: Option<StealthPrivKey<S>>,
    /// Whether `address` equals the address published in the announcement;
    /// `None` when none was published.
    pub confirmed: Option<bool>,
    /// Tag matches in the whole scan, false positives included.
    pub tag_matches_total: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanStats {
    /// Announcements of the context's protocol and curve.
    pub inspected: u64,
    /// Announcements of another protocol or curve.
    pub skipped: u64,
    pub tag_matches: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport<S: CurveSuite> {
    /// Every tag match in index order, false positives included.
    pub results: Vec<ScanResult<S>>,
    pub stats: ScanStats,
}

impl<S: CurveSuite> ScanReport<S> {
    /// Results not ruled out by a published address.
    pub fn owned(&self) -> impl Iterator<Item = &ScanResult<S>> {
        self.results.iter().filter(|r| r.confirmed != Some(false))
    }

    pub fn true_matches(&self) -> usize {
        self.results.iter().filter(|r| r.confirmed == Some(true)).count()
    }
}

impl<S: CurveSuite> ScanContext<S> {
    /// Builds a context for the viewing key `viewing` of `meta`. Pass the
    /// spending key to have stealth private keys derived on a match.
    pub fn new(
        viewing: ViewingKey<S>,
        meta: MetaAddress<S>,
        spending: Option<SpendingKey<S>>,
        variant: TagVariant,
        mode: ScanMode,
    ) -> Result<Self> {
        let protocol = meta.protocol();
        protocol.expect(viewing.protocol())?;
        if let Some(k) = &spending {
            protocol.expect(k.protocol())?;
        }
        if protocol == ProtocolId::Sk && variant == TagVariant::XCoord {
            return Err(Error::UnsupportedVariant { protocol, variant });
        }
        let engine = match mode {
            ScanMode::Naive => Engine::Naive,
            ScanMode::Precomputed => Self::precompute(&viewing, &meta),
        };
        Ok(ScanContext {
            protocol,
            viewing,
            meta,
            spending,
            variant,
            mode,
            engine,
        })
    }

    pub fn from_keys(keys: &RecipientKeys<S>, with_spending: bool, variant: TagVariant, mode: ScanMode) -> Result<Self> {
        let spending = with_spending.then_some(keys.spending);
        Self::new(keys.viewing, keys.meta, spending, variant, mode)
    }

    fn precompute(viewing: &ViewingKey<S>, meta: &MetaAddress<S>) -> Engine<S> {
        let g1_table = || FixedBase::new(&g1::<S>());
        match (viewing, meta) {
            (ViewingKey::P1(v), MetaAddress::P1 { spend, .. }) => Engine::Point {
                v: GlvFixedScalar::new(*v),
                pairing: (*spend).into(),
                g1: None,
                spend: None,
            },
            (ViewingKey::P2(v), MetaAddress::P2 { spend, .. }) => Engine::Point {
                v: GlvFixedScalar::new(*v),
                pairing: (*spend).into(),
                g1: Some(g1_table()),
                spend: None,
            },
            (ViewingKey::P3(v), MetaAddress::P3 { spend, .. }) => Engine::Point {
                v: GlvFixedScalar::new(*v),
                pairing: g2::<S>().into(),
                g1: None,
                spend: Some(FixedBase::new(spend)),
            },
            (ViewingKey::Sk(big_v), MetaAddress::Sk { .. }) => Engine::Sk {
                view: (*big_v).into(),
                g1: g1_table(),
            },
            (ViewingKey::Dksap(v), MetaAddress::Dksap { .. }) => Engine::Dksap {
                v: WnafFixedScalar::new(*v),
                generator: FixedBase::new(&secp_generator()),
            },
            _ => unreachable!("protocols checked by the caller"),
        }
    }

    pub fn protocol(&self) -> ProtocolId {
        self.protocol
    }

    pub fn mode(&self) -> ScanMode {
        self.mode
    }

    pub fn variant(&self) -> TagVariant {
        self.variant
    }

    pub fn meta(&self) -> &MetaAddress<S> {
        &self.meta
    }

    /// Scans registry records from index `from` onwards. Records of other
    /// curves and protocols are counted in `stats.skipped`.
    pub fn scan_registry(&self, registry: &Registry, from: u64) -> Result<ScanReport<S>> {
        let decoded = registry.decode::<S>(from)?;
        let mut report = self.scan(&decoded.announcements);
        report.stats.skipped += decoded.skipped;
        Ok(report)
    }

    /// Scans decoded announcements.
    pub fn scan(&self, anns: &[Announcement<S>]) -> ScanReport<S> {
        let mut stats = ScanStats::default();
        let mut results = Vec::new();
        let mine = |a: &&Announcement<S>| a.protocol == self.protocol;
        for chunk in anns.chunks(CHUNK) {
            let own: Vec<&Announcement<S>> = chunk.iter().filter(mine).collect();
            stats.skipped += (chunk.len() - own.len()) as u64;
            stats.inspected += own.len() as u64;
            match self.protocol {
                ProtocolId::P1 | ProtocolId::P2 | ProtocolId::P3 => {
                    self.scan_point_chunk(&own, &mut stats, &mut results)
                }
                ProtocolId::Sk => self.scan_sk_chunk(&own, &mut stats, &mut results),
                ProtocolId::Dksap => self.scan_dksap_chunk(&own, &mut stats, &mut results),
            }
        }
        for r in &mut results {
            r.tag_matches_total = stats.tag_matches;
        }
        ScanReport { results, stats }
    }

    fn scan_point_chunk(&self, anns: &[&Announcement<S>], stats: &mut ScanStats, out: &mut Vec<ScanResult<S>>) {
        let (ViewingKey::P1(v) | ViewingKey::P2(v) | ViewingKey::P3(v)) = &self.viewing else {
            unreachable!()
        };
        let shared: Vec<G1Affine<S>> = match &self.engine {
            Engine::Point { v: table, .. } => {
                let points: Vec<G1Affine<S>> = anns.iter().map(|a| *g1_ephemeral(a)).collect();
                table.mul_batch(&points)
            }
            _ => anns.iter().map(|a| (*g1_ephemeral(a) * v).into_affine()).collect(),
        };
        for (a, s) in anns.iter().zip(shared) {
            let (hit, digest) = match self.variant {
                TagVariant::Hash => {
                    let d = keccak256(&g1_to_bytes::<S>(&s));
                    (a.tag.matches(d.as_ref()), Some(d))
                }
                TagVariant::XCoord => (a.tag.matches(&crate::protocols::x_le(&s)), None),
            };
            if hit {
                stats.tag_matches += 1;
                if let Some(r) = self.finish(a, SharedValue::G1(s), digest) {
                    out.push(r);
                }
            }
        }
    }

    fn scan_sk_chunk(&self, anns: &[&Announcement<S>], stats: &mut ScanStats, out: &mut Vec<ScanResult<S>>) {
        let ViewingKey::Sk(big_v) = &self.viewing else { unreachable!() };
        for a in anns {
            let r = g1_ephemeral(a);
            let s: Gt<S> = match &self.engine {
                Engine::Sk { view, .. } => pair_prepared::<S>(r, view),
                _ => pair::<S>(r, big_v),
            };
            let d = keccak256(&gt_to_bytes::<S>(&s));
            if a.tag.matches(d.as_ref()) {
                stats.tag_matches += 1;
                if let Some(r) = self.finish(a, SharedValue::Gt(s), Some(d)) {
                    out.push(r);
                }
            }
        }
    }

    fn scan_dksap_chunk(&self, anns: &[&Announcement<S>], stats: &mut ScanStats, out: &mut Vec<ScanResult<S>>) {
        let ViewingKey::Dksap(v) = &self.viewing else { unreachable!() };
        let shared: Vec<SecpAffine> = match &self.engine {
            Engine::Dksap { v: table, .. } => {
                let points: Vec<SecpAffine> = anns.iter().map(|a| *secp_ephemeral(a)).collect();
                table.mul_batch(&points)
            }
            _ => anns.iter().map(|a| (*secp_ephemeral(a) * v).into_affine()).collect(),
        };
        for (a, s) in anns.iter().zip(shared) {
            let (hit, digest) = match self.variant {
                TagVariant::Hash => {
                    let d = keccak256(&secp_to_bytes(&s));
                    (a.tag.matches(d.as_ref()), Some(d))
                }
                TagVariant::XCoord => (a.tag.matches(&crate::protocols::x_le(&s)), None),
            };
            if hit {
                stats.tag_matches += 1;
                if let Some(r) = self.finish(a, SharedValue::Secp(s), digest) {
                    out.push(r);
                }
            }
        }
    }

    /// Post-match work: the stealth public key, its address and, with a
    /// spending key, the private key. `None` only for a P3 announcement
    /// whose pairing value maps to a zero scalar, which no sender emits.
    fn finish(&self, a: &Announcement<S>, value: SharedValue<S>, digest: Option<Digest32>) -> Option<ScanResult<S>> {
        let digest = || digest.unwrap_or_else(|| keccak256(&shared_bytes(&value)));
        let k = self.spending.as_ref();
        let (pub_key, priv_key) = match (&self.meta, &value) {
            (MetaAddress::P1 { spend, .. }, SharedValue::G1(s)) => {
                let priv_key = match (k, &self.viewing) {
                    (Some(SpendingKey::P1(k)), ViewingKey::P1(v)) => Some(StealthPrivKey::P1(*k * v)),
                    _ => None,
                };
                (StealthPubKey::Gt(self.pair_point(s, spend)), priv_key)
            }
            (MetaAddress::P2 { spend, .. }, SharedValue::G1(_)) => {
                let h = digest_to_fr::<S>(&digest());
                let priv_key = match k {
                    Some(SpendingKey::P2(k)) => Some(StealthPrivKey::P2(*k * h)),
                    _ => None,
                };
                (StealthPubKey::Gt(self.pair_point(&self.g1_mul(&h), spend)), priv_key)
            }
            (MetaAddress::P3 { spend, .. }, SharedValue::G1(s)) => {
                let b = p3_scalar::<S>(&self.pair_point(s, &g2::<S>())).ok()?;
                let priv_key = match k {
                    Some(SpendingKey::P3(k)) => Some(StealthPrivKey::P3(b * k)),
                    _ => None,
                };
                (StealthPubKey::Secp(self.secp_spend_mul(spend, &b)), priv_key)
            }
            (MetaAddress::Sk { spend }, SharedValue::Gt(_)) => {
                let h = digest_to_fr::<S>(&digest());
                let priv_key = match k {
                    Some(SpendingKey::Sk(k)) => Some(StealthPrivKey::Sk(*k + h)),
                    _ => None,
                };
                (StealthPubKey::G1((*spend + self.g1_mul(&h)).into_affine()), priv_key)
            }
            (MetaAddress::Dksap { spend, .. }, SharedValue::Secp(_)) => {
                let h = digest_to_secp_scalar(&digest());
                let priv_key = match k {
                    Some(SpendingKey::Dksap(k)) => Some(StealthPrivKey::Dksap(*k + h)),
                    _ => None,
                };
                (StealthPubKey::Secp((*spend + self.secp_gen_mul(&h)).into_affine()), priv_key)
            }
            _ => unreachable!("group fixed by protocol"),
        };
        let address = pub_key.address();
        Some(ScanResult {
            index: a.index,
            pub_key,
            address,
            priv_key,
            confirmed: a.address.map(|x| x == address),
            tag_matches_total: 0,
        })
    }

    /// `e(p, q)` where `q` is the protocol's constant G2 argument.
    fn pair_point(&self, p: &G1Affine<S>, q: &G2Affine<S>) -> Gt<S> {
        match &self.engine {
            Engine::Point { pairing, .. } => pair_prepared::<S>(p, pairing),
            _ => pair::<S>(p, q),
        }
    }

    fn g1_mul(&self, k: &Fr<S>) -> G1Affine<S> {
        match &self.engine {
            Engine::Point { g1: Some(t), .. } | Engine::Sk { g1: t, .. } => t.mul(k),
            _ => (g1::<S>() * k).into_affine(),
        }
    }

    fn secp_spend_mul(&self, spend: &SecpAffine, k: &SecpScalar) -> SecpAffine {
        match &self.engine {
            Engine::Point { spend: Some(t), .. } => t.mul(k),
            _ => (*spend * k).into_affine(),
        }
    }

    fn secp_gen_mul(&self, k: &SecpScalar) -> SecpAffine {
        match &self.engine {
            Engine::Dksap { generator, .. } => generator.mul(k),
            _ => (secp_generator() * k).into_affine(),
        }
    }
}

fn shared_bytes<S: CurveSuite>(value: &SharedValue<S>) -> Vec<u8> {
    match value {
        SharedValue::G1(p) => g1_to_bytes::<S>(p),
        SharedValue::Gt(x) => gt_to_bytes::<S>(x),
        SharedValue::Secp(p) => secp_to_bytes(p),
    }
}

fn g1_ephemeral<S: CurveSuite>(a: &Announcement<S>) -> &G1Affine<S> {
    match &a.ephemeral {
        EphemeralPub::G1(p) => p,
        EphemeralPub::Secp(_) => unreachable!("decoding ties the group to the protocol"),
    }
}

fn secp_ephemeral<S: CurveSuite>(a: &Announcement<S>) -> &SecpAffine {
    match &a.ephemeral {
        EphemeralPub::Secp(p) => p,
        EphemeralPub::G1(_) => unreachable!("decoding ties the group to the protocol"),
    }
}

/// Scans `registry` from index `from` with `ctx`.
pub fn scan<S: CurveSuite>(ctx: &ScanContext<S>, registry: &Registry, from: u64) -> Result<ScanReport<S>> {
    ctx.scan_registry(registry, from)
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    use super::*;
    use crate::curve::{Bls12_381, Bn254};
    use crate::keys::gen_keys;
    use crate::protocols::{recipient_derive_priv, send, viewer_derive_pub, ViewTagConfig};

    type S = Bn254;

    /// `foreign` announcements to other recipients with `owned` to `keys`
    /// spread among them, each with a published address.
    fn mixed<C: CurveSuite>(
        keys: &RecipientKeys<C>,
        cfg: ViewTagConfig,
        foreign: usize,
        owned: usize,
        rng: &mut ChaCha20Rng,
    ) -> Vec<Announcement<C>> {
        let mut out = Vec::new();
        let total = foreign + owned;
        let mut owned_left = owned;
        for i in 0..total {
            let to_me = owned_left > 0 && (rng.gen_ratio(owned as u32, total as u32) || total - i == owned_left);
            let meta = if to_me {
                owned_left -= 1;
                keys.meta
            } else {
                gen_keys::<C, _>(keys.protocol(), rng).meta
            };
            let mut a = send(&meta, cfg, rng).unwrap().1.announcement;
            a.index = i as u64;
            out.push(a);
        }
        out
    }

    #[test]
    fn precomputed_and_naive_agree() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for proto in ProtocolId::ALL {
            let variants: &[TagVariant] = if proto == ProtocolId::Sk {
                &[TagVariant::Hash]
            } else {
                &[TagVariant::Hash, TagVariant::XCoord]
            };
            for &variant in variants {
                let keys = gen_keys::<S, _>(proto, &mut rng);
                let cfg = ViewTagConfig::new(variant, 4).unwrap();
                let anns = mixed(&keys, cfg, 60, 3, &mut rng);
                let pre = ScanContext::from_keys(&keys, true, variant, ScanMode::Precomputed).unwrap();
                let naive = ScanContext::from_keys(&keys, true, variant, ScanMode::Naive).unwrap();
                let a = pre.scan(&anns);
                assert_eq!(a, naive.scan(&anns), "{proto} {variant}");
                assert_eq!(a, pre.scan(&anns));
                assert_eq!(a.true_matches(), 3, "{proto} {variant}");
                assert_eq!(a.stats.inspected, 63);
            }
        }
    }

    #[test]
    fn results_are_sound_and_complete() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for proto in ProtocolId::ALL {
            let keys = gen_keys::<S, _>(proto, &mut rng);
            let anns = mixed(&keys, ViewTagConfig::hash(4).unwrap(), 40, 4, &mut rng);
            let report = ScanContext::from_keys(&keys, true, TagVariant::Hash, ScanMode::Precomputed)
                .unwrap()
                .scan(&anns);
            for r in &report.results {
                let a = &anns[r.index as usize];
                let (pk, addr) = viewer_derive_pub(&keys.viewing, &keys.meta, a).unwrap();
                assert_eq!((pk, addr), (r.pub_key, r.address));
                assert_eq!(r.priv_key, Some(recipient_derive_priv(&keys.spending, &keys.viewing, a).unwrap()));
                assert_eq!(r.tag_matches_total, report.stats.tag_matches);
            }
            assert!(report.results.windows(2).all(|w| w[0].index < w[1].index));
            let owned: Vec<u64> = report.owned().map(|r| r.index).collect();
            let expected: Vec<u64> = anns
                .iter()
                .filter(|a| viewer_derive_pub(&keys.viewing, &keys.meta, a).unwrap().1 == a.address.unwrap())
                .map(|a| a.index)
                .collect();
            assert_eq!(owned, expected);
            assert_eq!(owned.len(), 4);
        }
    }

    #[test]
    fn zero_bit_tags_reach_every_announcement() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let keys = gen_keys::<S, _>(ProtocolId::P3, &mut rng);
        let anns = mixed(&keys, ViewTagConfig::hash(0).unwrap(), 20, 2, &mut rng);
        let report = ScanContext::from_keys(&keys, false, TagVariant::Hash, ScanMode::Precomputed)
            .unwrap()
            .scan(&anns);
        assert_eq!(report.stats.tag_matches, 22);
        assert_eq!(report.true_matches(), 2);
        assert!(report.results.iter().all(|r| r.priv_key.is_none()));
    }

    #[test]
    fn other_protocols_and_curves_are_skipped() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let keys = gen_keys::<S, _>(ProtocolId::P2, &mut rng);
        let cfg = ViewTagConfig::hash(8).unwrap();
        let mut reg = Registry::in_memory();
        for a in mixed(&keys, cfg, 3, 1, &mut rng) {
            reg.append(&a).unwrap();
        }
        let p3 = gen_keys::<S, _>(ProtocolId::P3, &mut rng);
        reg.append(&send(&p3.meta, cfg, &mut rng).unwrap().1.announcement).unwrap();
        let bls = gen_keys::<Bls12_381, _>(ProtocolId::P2, &mut rng);
        reg.append(&send(&bls.meta, cfg, &mut rng).unwrap().1.announcement).unwrap();

        let ctx = ScanContext::from_keys(&keys, false, TagVariant::Hash, ScanMode::Precomputed).unwrap();
        let report = scan(&ctx, &reg, 0).unwrap();
        assert_eq!(report.stats.inspected, 4);
        assert_eq!(report.stats.skipped, 2);
        assert_eq!(report.owned().count(), 1);
        assert_eq!(scan(&ctx, &reg, reg.count()).unwrap().results.len(), 0);
    }

    #[test]
    fn sk_rejects_coordinate_tags() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let keys = gen_keys::<S, _>(ProtocolId::Sk, &mut rng);
        assert!(matches!(
            ScanContext::from_keys(&keys, false, TagVariant::XCoord, ScanMode::Naive),
            Err(Error::UnsupportedVariant { .. })
        ));
    }
}
