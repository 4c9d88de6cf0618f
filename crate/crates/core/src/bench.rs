//! Scan-time and per-operation benchmarks.
//!
//! Each seed gets one recipient and a registry of `A` announcements: `A - 1`
//! sent to freshly drawn recipients plus one sent to the recipient at a
//! random position. Only the scan itself is timed. P1, P2 and P3 share the
//! viewing key and the foreign announcements of a seed, so their scans see
//! the same tag matches and differ only in the work after a match.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use ark_ec::scalar_mul::BatchMulPreprocessing;
use ark_ec::{AffineRepr, CurveGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::curve::{
    self, dispatch, g1, g2, gt_generator, keccak256, pair, pair_prepared, random_fr, random_secp_scalar,
    secp_generator, CurveId, CurveSuite, Fr, G1Affine, G2Prepared, SecpAffine, SuiteVisitor,
};
use crate::error::{Error, Result};
use crate::keys::{public_parts, ProtocolId, RecipientKeys, SpendingKey, ViewingKey};
use crate::protocols::{
    compute_view_tag, send, Announcement, EphemeralPub, SharedSecret, SharedValue, TagVariant, ViewTag,
    ViewTagConfig,
};
use crate::scanner::precompute::GlvFixedScalar;
use crate::scanner::{ScanContext, ScanMode};

pub const CSV_HEADER: &str = "proto,curve,A,tag_variant,tag_bits,seed,scan_ms,tag_matches,true_matches";
pub const OPS_CSV_HEADER: &str = "operation,curve,repetitions,mean_us";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub protocols: Vec<ProtocolId>,
    /// Announcement counts `A`.
    pub counts: Vec<usize>,
    pub tags: Vec<ViewTagConfig>,
    pub curves: Vec<CurveId>,
    pub seeds: Vec<u64>,
    /// Repetitions per operation in [`bench_ops`].
    pub repetitions: usize,
    /// Timed scans per configuration and seed. `scan_ms` is the fastest one:
    /// interference from the host only ever adds time.
    pub rounds: usize,
    pub mode: ScanMode,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            protocols: vec![ProtocolId::P1, ProtocolId::P2, ProtocolId::P3, ProtocolId::Sk],
            counts: vec![5000, 10000, 20000, 40000, 80000],
            tags: vec![ViewTagConfig::hash(8).expect("valid width")],
            curves: vec![CurveId::Bn254],
            seeds: (1..=10).collect(),
            repetitions: 1000,
            rounds: 1,
            mode: ScanMode::Precomputed,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.protocols.is_empty() {
            return bad("no protocols");
        }
        if self.counts.is_empty() || self.counts.contains(&0) {
            return bad("counts must be nonempty and at least 1");
        }
        if self.tags.is_empty() {
            return bad("no tag configurations");
        }
        if self.seeds.is_empty() {
            return bad("seeds must be nonempty");
        }
        if self.repetitions == 0 || self.rounds == 0 {
            return bad("repetitions and rounds must be at least 1");
        }
        if self.curves.is_empty() {
            return bad("no curves");
        }
        if let Some(c) = self.curves.iter().find(|c| !c.is_compiled()) {
            return Err(Error::UnsupportedCurve(*c));
        }
        if self.protocols.contains(&ProtocolId::Sk) && self.tags.iter().any(|t| t.variant() == TagVariant::XCoord) {
            return Err(Error::UnsupportedVariant {
                protocol: ProtocolId::Sk,
                variant: TagVariant::XCoord,
            });
        }
        Ok(())
    }
}

/// One timed scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub proto: ProtocolId,
    pub curve: CurveId,
    #[serde(rename = "A")]
    pub count: usize,
    pub tag_variant: TagVariant,
    pub tag_bits: u32,
    pub seed: u64,
    pub scan_ms: f64,
    pub tag_matches: u64,
    pub true_matches: u64,
}

/// Means over all seeds of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanAggregate {
    pub proto: ProtocolId,
    pub curve: CurveId,
    pub count: usize,
    pub tag: ViewTagConfig,
    pub seeds: usize,
    pub mean_ms: f64,
    pub mean_tag_matches: f64,
    pub mean_true_matches: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<ScanRow>,
}

type AggKey = (CurveId, usize, ProtocolId, TagVariant, u32);

impl BenchReport {
    pub fn aggregates(&self) -> Vec<ScanAggregate> {
        let mut groups: BTreeMap<AggKey, Vec<&ScanRow>> = BTreeMap::new();
        for r in &self.rows {
            let key = (r.curve, r.count, r.proto, r.tag_variant, r.tag_bits);
            groups.entry(key).or_default().push(r);
        }
        groups
            .into_iter()
            .map(|((curve, count, proto, variant, bits), rows)| {
                let n = rows.len() as f64;
                ScanAggregate {
                    proto,
                    curve,
                    count,
                    tag: ViewTagConfig::new(variant, bits).expect("validated"),
                    seeds: rows.len(),
                    mean_ms: rows.iter().map(|r| r.scan_ms).sum::<f64>() / n,
                    mean_tag_matches: rows.iter().map(|r| r.tag_matches as f64).sum::<f64>() / n,
                    mean_true_matches: rows.iter().map(|r| r.true_matches as f64).sum::<f64>() / n,
                }
            })
            .collect()
    }

    /// Mean scan time of one configuration.
    pub fn mean_ms(&self, proto: ProtocolId, curve: CurveId, count: usize, tag: ViewTagConfig) -> Option<f64> {
        self.aggregates()
            .into_iter()
            .find(|a| a.proto == proto && a.curve == curve && a.count == count && a.tag == tag)
            .map(|a| a.mean_ms)
    }

    /// Per-seed rows, then one `seed = mean` row per configuration.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{:.3},{},{}",
                r.proto, r.curve, r.count, r.tag_variant, r.tag_bits, r.seed, r.scan_ms, r.tag_matches, r.true_matches
            );
        }
        for a in self.aggregates() {
            let _ = writeln!(
                out,
                "{},{},{},{},{},mean,{:.3},{:.2},{:.2}",
                a.proto,
                a.curve,
                a.count,
                a.tag.variant(),
                a.tag.bits(),
                a.mean_ms,
                a.mean_tag_matches,
                a.mean_true_matches
            );
        }
        out
    }

    /// Fixed-width summary of the aggregates.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<6} {:<10} {:>8} {:>10} {:>6} {:>12} {:>12}\n",
            "proto", "curve", "A", "tag", "seeds", "mean ms", "tag matches"
        );
        for a in self.aggregates() {
            let _ = writeln!(
                out,
                "{:<6} {:<10} {:>8} {:>10} {:>6} {:>12.2} {:>12.1}",
                a.proto,
                a.curve,
                a.count,
                format!("{}/{}", a.tag.variant(), a.tag.bits()),
                a.seeds,
                a.mean_ms,
                a.mean_tag_matches
            );
        }
        out
    }
}

/// Deterministic RNG for one purpose within a seed.
fn rng_for(seed: u64, label: &str, extra: u64) -> ChaCha20Rng {
    let mut input = Vec::with_capacity(label.len() + 16);
    input.extend_from_slice(&seed.to_be_bytes());
    input.extend_from_slice(label.as_bytes());
    input.extend_from_slice(&extra.to_be_bytes());
    ChaCha20Rng::from_seed(keccak256(&input).0)
}

/// Foreign announcements are produced in blocks of this many to bound memory.
const GEN_BLOCK: usize = 1 << 15;

/// `R` and the widest tag of each foreign announcement.
type Foreign<S> = Vec<(EphemeralPub<S>, ViewTag)>;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Family {
    /// P1, P2, P3: shared secret `r*V` in G1.
    Point,
    Sk,
    Dksap,
}

fn family(p: ProtocolId) -> Family {
    match p {
        ProtocolId::P1 | ProtocolId::P2 | ProtocolId::P3 => Family::Point,
        ProtocolId::Sk => Family::Sk,
        ProtocolId::Dksap => Family::Dksap,
    }
}

fn tag_of<S: CurveSuite>(protocol: ProtocolId, value: SharedValue<S>, cfg: ViewTagConfig) -> ViewTag {
    let shared = SharedSecret::new(protocol, value).expect("group matches protocol");
    compute_view_tag(protocol, &shared, cfg).expect("variant checked in validate")
}

/// Announcements to `n` fresh recipients. Each recipient's viewing key `v'`
/// and each `r` are drawn at random; `R = r*G` and the shared secret
/// `(r*v')*G` (or `e(g1, g2)^(r*k')` for SK) are exactly what a sender
/// would publish and derive.
fn foreign<S: CurveSuite>(fam: Family, n: usize, cfg: ViewTagConfig, rng: &mut ChaCha20Rng) -> Foreign<S> {
    let mut out = Vec::with_capacity(n);
    match fam {
        Family::Point | Family::Sk => {
            let table = BatchMulPreprocessing::new(g1::<S>().into_group(), n.min(GEN_BLOCK));
            let proto = if fam == Family::Sk { ProtocolId::Sk } else { ProtocolId::P3 };
            let mut left = n;
            while left > 0 {
                let m = left.min(GEN_BLOCK);
                left -= m;
                let rs: Vec<Fr<S>> = (0..m).map(|_| random_fr::<S, _>(rng)).collect();
                let secrets: Vec<Fr<S>> = rs.iter().map(|r| *r * random_fr::<S, _>(rng)).collect();
                let big_r: Vec<G1Affine<S>> = table.batch_mul(&rs);
                if fam == Family::Point {
                    let shared: Vec<G1Affine<S>> = table.batch_mul(&secrets);
                    for (r, s) in big_r.into_iter().zip(shared) {
                        out.push((EphemeralPub::G1(r), tag_of::<S>(proto, SharedValue::G1(s), cfg)));
                    }
                } else {
                    let gen = gt_generator::<S>();
                    for (r, t) in big_r.into_iter().zip(secrets) {
                        out.push((EphemeralPub::G1(r), tag_of::<S>(proto, SharedValue::Gt(gen * t), cfg)));
                    }
                }
            }
        }
        Family::Dksap => {
            let table = BatchMulPreprocessing::new(secp_generator().into_group(), n.min(GEN_BLOCK));
            let mut left = n;
            while left > 0 {
                let m = left.min(GEN_BLOCK);
                left -= m;
                let rs: Vec<_> = (0..m).map(|_| random_secp_scalar(rng)).collect();
                let secrets: Vec<_> = rs.iter().map(|r| *r * random_secp_scalar(rng)).collect();
                let big_r: Vec<SecpAffine> = table.batch_mul(&rs);
                let shared: Vec<SecpAffine> = table.batch_mul(&secrets);
                for (r, s) in big_r.into_iter().zip(shared) {
                    out.push((EphemeralPub::Secp(r), tag_of::<S>(ProtocolId::Dksap, SharedValue::Secp(s), cfg)));
                }
            }
        }
    }
    out
}

/// Recipient keys for `protocol`; P1, P2 and P3 of one seed share `v`.
fn recipient<S: CurveSuite>(protocol: ProtocolId, seed: u64) -> RecipientKeys<S> {
    let mut rng = rng_for(seed, "viewing", 0);
    let v = random_fr::<S, _>(&mut rng);
    let mut rng = rng_for(seed, "spending", protocol as u64);
    let (spending, viewing) = match protocol {
        ProtocolId::P1 => (SpendingKey::P1(random_fr::<S, _>(&mut rng)), ViewingKey::P1(v)),
        ProtocolId::P2 => (SpendingKey::P2(random_fr::<S, _>(&mut rng)), ViewingKey::P2(v)),
        ProtocolId::P3 => (SpendingKey::P3(random_secp_scalar(&mut rng)), ViewingKey::P3(v)),
        ProtocolId::Sk => {
            let k = random_fr::<S, _>(&mut rng);
            (SpendingKey::Sk(k), ViewingKey::Sk((g2::<S>() * k).into_affine()))
        }
        ProtocolId::Dksap => (
            SpendingKey::Dksap(random_secp_scalar(&mut rng)),
            ViewingKey::Dksap(random_secp_scalar(&mut rng)),
        ),
    };
    let meta = public_parts(&spending, &viewing).expect("consistent keys");
    RecipientKeys { spending, viewing, meta }
}

/// The announcement registry one scan runs over.
fn registry_for<S: CurveSuite>(
    keys: &RecipientKeys<S>,
    foreign: &Foreign<S>,
    owned_at: usize,
    cfg: ViewTagConfig,
    seed: u64,
) -> Vec<Announcement<S>> {
    let protocol = keys.protocol();
    let mut rng = rng_for(seed, "owned", protocol as u64);
    let wide = ViewTagConfig::new(cfg.variant(), foreign.first().map_or(cfg.bits(), |f| f.1.bits()))
        .expect("valid width");
    let (_, mut owned) = send(&keys.meta, wide, &mut rng).expect("fresh ephemeral");
    owned.announcement.tag = owned.announcement.tag.truncate(cfg.bits()).expect("narrower");
    let mut out = Vec::with_capacity(foreign.len() + 1);
    for (i, (r, tag)) in foreign.iter().enumerate() {
        if i == owned_at {
            out.push(owned.announcement);
        }
        out.push(Announcement {
            index: 0,
            protocol,
            ephemeral: *r,
            tag: tag.truncate(cfg.bits()).expect("narrower"),
            address: None,
        });
    }
    if owned_at >= foreign.len() {
        out.push(owned.announcement);
    }
    for (i, a) in out.iter_mut().enumerate() {
        a.index = i as u64;
    }
    out
}

struct ScanRun<'a> {
    cfg: &'a BenchConfig,
    progress: &'a mut dyn FnMut(&ScanRow),
}

impl SuiteVisitor for ScanRun<'_> {
    type Output = Result<Vec<ScanRow>>;

    fn visit<S: CurveSuite>(self) -> Self::Output {
        let cfg = self.cfg;
        let mut rows = Vec::new();
        let mut families: Vec<Family> = cfg.protocols.iter().map(|p| family(*p)).collect();
        families.sort();
        families.dedup();
        let variants: Vec<TagVariant> = {
            let mut v: Vec<_> = cfg.tags.iter().map(|t| t.variant()).collect();
            v.sort();
            v.dedup();
            v
        };
        for &count in &cfg.counts {
            for (si, &seed) in cfg.seeds.iter().enumerate() {
                let owned_at = rng_for(seed, "position", count as u64).gen_range(0..count);
                for &fam in &families {
                    for &variant in &variants {
                        let widest = cfg.tags.iter().filter(|t| t.variant() == variant).map(|t| t.bits()).max();
                        let Some(widest) = widest else { continue };
                        let wide = ViewTagConfig::new(variant, widest)?;
                        let mut rng = rng_for(seed, "foreign", ((fam as u64) << 40) | count as u64);
                        let foreign = foreign::<S>(fam, count - 1, wide, &mut rng);

                        let protos = cfg.protocols.iter().copied().filter(|p| family(*p) == fam);
                        let mut runs = Vec::new();
                        for tag in cfg.tags.iter().filter(|t| t.variant() == variant) {
                            for proto in protos.clone() {
                                let keys = recipient::<S>(proto, seed);
                                let anns = registry_for(&keys, &foreign, owned_at, *tag, seed);
                                let ctx = ScanContext::from_keys(&keys, true, variant, cfg.mode)?;
                                runs.push((proto, *tag, anns, ctx, f64::INFINITY, None));
                            }
                        }
                        drop(foreign);
                        // Round-robin with a rotating start, so slow phases of the
                        // machine fall on every configuration alike.
                        for round in 0..cfg.rounds {
                            let n = runs.len();
                            for j in 0..n {
                                let (_, _, anns, ctx, best_ms, report) = &mut runs[(j + si + round) % n];
                                let start = Instant::now();
                                let r = ctx.scan(anns);
                                *best_ms = best_ms.min(start.elapsed().as_secs_f64() * 1e3);
                                report.get_or_insert(r);
                            }
                        }
                        for (proto, tag, _, _, best_ms, report) in runs {
                            let report = report.expect("rounds >= 1");
                            let row = ScanRow {
                                proto,
                                curve: S::ID,
                                count,
                                tag_variant: variant,
                                tag_bits: tag.bits(),
                                seed,
                                scan_ms: best_ms,
                                tag_matches: report.stats.tag_matches,
                                true_matches: report.true_matches() as u64,
                            };
                            (self.progress)(&row);
                            rows.push(row);
                        }
                    }
                }
            }
        }
        Ok(rows)
    }
}

/// Times registry scans for every configuration in `cfg`. `progress` sees
/// each row as it is produced.
pub fn bench_scan_with(cfg: &BenchConfig, progress: &mut dyn FnMut(&ScanRow)) -> Result<BenchReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for &curve in &cfg.curves {
        rows.extend(dispatch(curve, ScanRun { cfg, progress: &mut *progress })??);
    }
    Ok(BenchReport { rows })
}

pub fn bench_scan(cfg: &BenchConfig) -> Result<BenchReport> {
    bench_scan_with(cfg, &mut |_| {})
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpRow {
    pub operation: &'static str,
    pub curve: CurveId,
    pub repetitions: usize,
    pub mean_us: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OpsReport {
    pub rows: Vec<OpRow>,
}

impl OpsReport {
    pub fn mean_us(&self, operation: &str, curve: CurveId) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.operation == operation && r.curve == curve)
            .map(|r| r.mean_us)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(OPS_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{:.3}", r.operation, r.curve, r.repetitions, r.mean_us);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("{:<20} {:<10} {:>12}\n", "operation", "curve", "mean us");
        for r in &self.rows {
            let _ = writeln!(out, "{:<20} {:<10} {:>12.2}", r.operation, r.curve, r.mean_us);
        }
        out
    }
}

/// Operations timed by [`bench_ops`], in report order.
pub const OPERATIONS: [&str; 7] = [
    "ecmul_precompute",
    "ecmul",
    "ecmul_naive",
    "pairing_precompute",
    "pairing",
    "pairing_naive",
    "keccak256",
];

struct OpsRun {
    repetitions: usize,
    seed: u64,
}

fn mean_us<T>(inputs: &[T], mut f: impl FnMut(&T)) -> f64 {
    let start = Instant::now();
    for x in inputs {
        f(x);
    }
    start.elapsed().as_secs_f64() * 1e6 / inputs.len() as f64
}

/// Means of two variants of one operation, timed in alternating blocks so
/// that host noise falls on both.
fn paired_means_us<T>(inputs: &[T], mut a: impl FnMut(&T), mut b: impl FnMut(&T)) -> (f64, f64) {
    let (mut ta, mut tb) = (0.0, 0.0);
    for (i, block) in inputs.chunks(16).enumerate() {
        let time = |f: &mut dyn FnMut(&T)| {
            let start = Instant::now();
            block.iter().for_each(&mut *f);
            start.elapsed().as_secs_f64()
        };
        if i % 2 == 0 {
            ta += time(&mut a);
            tb += time(&mut b);
        } else {
            tb += time(&mut b);
            ta += time(&mut a);
        }
    }
    let n = inputs.len() as f64;
    (ta * 1e6 / n, tb * 1e6 / n)
}

impl SuiteVisitor for OpsRun {
    type Output = Vec<OpRow>;

    /// The scan's own operations: `v*R` in G1, `e(P, Q)` with `Q` fixed,
    /// Keccak-256 of a compressed G1 point. Inputs are drawn beforehand.
    fn visit<S: CurveSuite>(self) -> Vec<OpRow> {
        let n = self.repetitions;
        let mut rng = rng_for(self.seed, "ops", 0);
        let v = random_fr::<S, _>(&mut rng);
        let scalars: Vec<Fr<S>> = (0..n).map(|_| random_fr::<S, _>(&mut rng)).collect();
        let table = BatchMulPreprocessing::new(g1::<S>().into_group(), n);
        let points: Vec<G1Affine<S>> = table.batch_mul(&scalars);
        let q = (g2::<S>() * random_fr::<S, _>(&mut rng)).into_affine();
        let encoded: Vec<Vec<u8>> = points.iter().map(|p| curve::g1_to_bytes::<S>(p)).collect();

        let mut sink = 0u64;
        let row = |operation, mean_us| OpRow {
            operation,
            curve: S::ID,
            repetitions: n,
            mean_us,
        };
        let mut rows = Vec::new();
        rows.push(row("ecmul_precompute", mean_us(&scalars, |k| {
            let _ = std::hint::black_box(GlvFixedScalar::<S::G1Config>::new(*k));
        })));
        let fixed = GlvFixedScalar::<S::G1Config>::new(v);
        let (ecmul, ecmul_naive) = paired_means_us(
            &points,
            |p| {
                let _ = std::hint::black_box(fixed.mul(p));
            },
            |p| {
                let _ = std::hint::black_box(*p * v);
            },
        );
        rows.push(row("ecmul", ecmul));
        rows.push(row("ecmul_naive", ecmul_naive));
        let qs = vec![q; n];
        rows.push(row("pairing_precompute", mean_us(&qs, |q| {
            let _ = std::hint::black_box(G2Prepared::<S>::from(*q));
        })));
        let prepared = G2Prepared::<S>::from(q);
        let (pairing, pairing_naive) = paired_means_us(
            &points,
            |p| {
                let _ = std::hint::black_box(pair_prepared::<S>(p, &prepared));
            },
            |p| {
                let _ = std::hint::black_box(pair::<S>(p, &q));
            },
        );
        rows.push(row("pairing", pairing));
        rows.push(row("pairing_naive", pairing_naive));
        rows.push(row("keccak256", mean_us(&encoded, |b| {
            sink ^= std::hint::black_box(keccak256(b)).0[0] as u64;
        })));
        std::hint::black_box(sink);
        rows
    }
}

/// Mean time per operation over `cfg.repetitions` runs, per configured curve.
pub fn bench_ops(cfg: &BenchConfig) -> Result<OpsReport> {
    cfg.validate()?;
    let seed = cfg.seeds[0];
    let mut rows = Vec::new();
    for &curve in &cfg.curves {
        rows.extend(dispatch(
            curve,
            OpsRun {
                repetitions: cfg.repetitions,
                seed,
            },
        )?);
    }
    Ok(OpsReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(protocols: Vec<ProtocolId>, tags: Vec<ViewTagConfig>) -> BenchConfig {
        BenchConfig {
            protocols,
            counts: vec![300],
            tags,
            seeds: vec![1, 2],
            repetitions: 2,
            ..BenchConfig::default()
        }
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg: BenchConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg, BenchConfig::default());
        assert_eq!(cfg.counts, vec![5000, 10000, 20000, 40000, 80000]);
        assert_eq!(cfg.seeds.len(), 10);
        assert_eq!(cfg.repetitions, 1000);
        let cfg: BenchConfig =
            serde_json::from_str(r#"{"protocols":["p3"],"tags":[{"variant":"hash","bits":16}],"counts":[10]}"#).unwrap();
        assert!(cfg.validate().is_ok());
        assert!(serde_json::from_str::<BenchConfig>(r#"{"bogus":1}"#).is_err());
        for bad in [
            BenchConfig { counts: vec![0], ..BenchConfig::default() },
            BenchConfig { seeds: vec![], ..BenchConfig::default() },
            BenchConfig { curves: vec![CurveId::Bls24_315], ..BenchConfig::default() },
            BenchConfig { tags: vec![ViewTagConfig::xcoord(8).unwrap()], ..BenchConfig::default() },
        ] {
            assert!(bad.validate().is_err());
            assert!(bench_scan(&bad).is_err());
        }
    }

    #[test]
    fn every_scan_finds_its_one_announcement() {
        let cfg = small(
            ProtocolId::ALL.to_vec(),
            vec![ViewTagConfig::hash(4).unwrap(), ViewTagConfig::hash(8).unwrap()],
        );
        let report = bench_scan(&cfg).unwrap();
        assert_eq!(report.rows.len(), 5 * 2 * 2);
        assert!(report.rows.iter().all(|r| r.true_matches == 1 && r.tag_matches >= 1));
        // P1, P2 and P3 of one seed see the same tags.
        for seed in [1, 2] {
            let m: Vec<u64> = report
                .rows
                .iter()
                .filter(|r| r.seed == seed && r.tag_bits == 4 && family(r.proto) == Family::Point)
                .map(|r| r.tag_matches)
                .collect();
            assert_eq!(m.len(), 3);
            assert!(m.iter().all(|x| *x == m[0]));
        }
        let again = bench_scan(&cfg).unwrap();
        let counts = |r: &BenchReport| r.rows.iter().map(|x| (x.tag_matches, x.true_matches)).collect::<Vec<_>>();
        assert_eq!(counts(&report), counts(&again));
    }

    #[test]
    fn xcoord_fixtures_work() {
        let cfg = small(vec![ProtocolId::P1, ProtocolId::Dksap], vec![ViewTagConfig::xcoord(4).unwrap()]);
        let report = bench_scan(&cfg).unwrap();
        assert!(report.rows.iter().all(|r| r.true_matches == 1));
    }

    #[test]
    fn csv_shape() {
        let cfg = BenchConfig {
            counts: vec![50],
            seeds: vec![7],
            ..small(vec![ProtocolId::P3], vec![ViewTagConfig::hash(8).unwrap()])
        };
        let report = bench_scan(&cfg).unwrap();
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("p3,bn254,50,hash,8,7,"));
        assert!(lines[2].starts_with("p3,bn254,50,hash,8,mean,"));
        assert!(lines.iter().all(|l| l.split(',').count() == 9));
        assert!(report.to_table().contains("hash/8"));
    }

    #[test]
    fn ops_table_is_complete_with_one_repetition() {
        let cfg = BenchConfig {
            repetitions: 1,
            ..BenchConfig::default()
        };
        let report = bench_ops(&cfg).unwrap();
        assert_eq!(report.rows.len(), OPERATIONS.len());
        for (row, op) in report.rows.iter().zip(OPERATIONS) {
            assert_eq!(row.operation, op);
            assert!(row.mean_us > 0.0);
        }
        assert_eq!(report.to_csv().lines().count(), OPERATIONS.len() + 1);
    }
}
