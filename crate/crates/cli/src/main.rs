use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::rngs::OsRng;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use stealth_pairing::bench::{bench_ops, bench_scan_with, BenchConfig, ScanRow};
use stealth_pairing::curve::{g1_to_bytes, gt_to_bytes, random_fr, to_hex};
use stealth_pairing::keys::MetaHeader;
use stealth_pairing::protocols::attacks::{demo_attack_ref3, demo_attack_ref4};
use stealth_pairing::{
    dispatch, gen_keys, send, CurveId, CurveSuite, Error, KeyFile, MetaAddress, ProtocolId, Registry, Result,
    ScanContext, ScanMode, SuiteVisitor, TagPolicy, TagVariant, ViewTagConfig,
};

#[derive(Parser)]
#[command(name = "stealthpair", version, about = "Pairing-based stealth addresses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate recipient keys and print the stealth meta-address.
    Keygen {
        #[arg(long)]
        proto: ProtocolId,
        /// Seed for reproducible keys; fresh OS randomness otherwise.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "bn254")]
        curve: CurveId,
    },
    /// Publish a meta-address under a name.
    Register {
        #[arg(long)]
        name: String,
        #[arg(long)]
        meta: String,
        #[arg(long)]
        registry: PathBuf,
    },
    /// Pay to a registered name: append an announcement, print the address.
    Send {
        #[arg(long)]
        name: String,
        #[arg(long)]
        proto: ProtocolId,
        #[arg(long, default_value = "hash")]
        tag_variant: TagVariant,
        #[arg(long, default_value_t = 8)]
        tag_bits: u32,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Defaults to the curve of the most recent matching registration.
        #[arg(long)]
        curve: Option<CurveId>,
    },
    /// Scan the announcement registry with a key file; prints one JSON line
    /// per owned announcement.
    Scan {
        #[arg(long)]
        keys: PathBuf,
        #[arg(long)]
        registry: PathBuf,
        #[arg(long, default_value_t = 0)]
        from: u64,
        #[arg(long, default_value = "hash")]
        tag_variant: TagVariant,
        #[arg(long, value_enum, default_value_t = Mode::Precomputed)]
        mode: Mode,
        /// Also print tag matches ruled out by the published address.
        #[arg(long)]
        all: bool,
    },
    /// Run the benchmark harness; CSV goes to stdout or --out.
    Bench {
        #[arg(value_enum)]
        kind: BenchKind,
        #[command(flatten)]
        opts: BenchOpts,
    },
    /// Demonstrations.
    Demo {
        #[arg(value_enum)]
        what: Demo,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "bn254")]
        curve: CurveId,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Precomputed,
    Naive,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchKind {
    Scan,
    Ops,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Attacks,
}

#[derive(Args)]
struct BenchOpts {
    /// Path to a JSON config, or the JSON itself.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a summary table to stderr when done.
    #[arg(long)]
    table: bool,
}

fn rng(seed: Option<u64>) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed.unwrap_or_else(|| OsRng.next_u64()))
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Keygen {
            proto,
            seed,
            out,
            curve,
        } => {
            let file = dispatch(curve, Keygen { proto, seed })?;
            fs::write(&out, serde_json::to_string_pretty(&file)? + "\n")?;
            println!("{}", file.meta);
            Ok(())
        }
        Command::Register { name, meta, registry } => {
            let header = MetaHeader::parse(&meta)?;
            let mut reg = Registry::open(&registry)?;
            dispatch(header.curve, RegisterMeta { reg: &mut reg, name: &name, meta: &meta })?
        }
        Command::Send {
            name,
            proto,
            tag_variant,
            tag_bits,
            registry,
            seed,
            curve,
        } => {
            let cfg = ViewTagConfig::new(tag_variant, tag_bits)?;
            let mut reg = Registry::open(&registry)?;
            let curve = match curve {
                Some(c) => c,
                None => reg
                    .lookup(&name)?
                    .iter()
                    .rev()
                    .find(|r| r.proto == proto)
                    .map(|r| r.curve)
                    .ok_or_else(|| Error::NotFound(format!("no {proto} meta-address for {name:?}")))?,
            };
            let visitor = SendTo {
                reg: &mut reg,
                name: &name,
                proto,
                cfg,
                seed,
            };
            let (idx, address, policy) = dispatch(curve, visitor)??;
            if let TagPolicy::Warning {
                effective_security_bits,
            } = policy
            {
                eprintln!(
                    "warning: {proto} with a {tag_bits}-bit {tag_variant} tag: effective security {effective_security_bits} bits"
                );
            }
            eprintln!("announcement {idx}");
            println!("{address}");
            Ok(())
        }
        Command::Scan {
            keys,
            registry,
            from,
            tag_variant,
            mode,
            all,
        } => {
            let file: KeyFile = serde_json::from_str(&fs::read_to_string(&keys)?)?;
            let reg = Registry::open(&registry)?;
            let mode = match mode {
                Mode::Precomputed => ScanMode::Precomputed,
                Mode::Naive => ScanMode::Naive,
            };
            let visitor = ScanWith {
                file: &file,
                reg: &reg,
                from,
                variant: tag_variant,
                mode,
                all,
            };
            let lines = dispatch(file.curve, visitor)??;
            let mut out = io::stdout().lock();
            for line in lines {
                writeln!(out, "{line}")?;
            }
            Ok(())
        }
        Command::Bench { kind, opts } => bench(kind, &opts),
        Command::Demo { what: Demo::Attacks, seed, curve } => {
            dispatch(curve, Attacks { seed })?;
            Ok(())
        }
    }
}

struct Keygen {
    proto: ProtocolId,
    seed: Option<u64>,
}

impl SuiteVisitor for Keygen {
    type Output = KeyFile;

    fn visit<S: CurveSuite>(self) -> KeyFile {
        KeyFile::from_keys(&gen_keys::<S, _>(self.proto, &mut rng(self.seed)))
    }
}

struct RegisterMeta<'a> {
    reg: &'a mut Registry,
    name: &'a str,
    meta: &'a str,
}

impl SuiteVisitor for RegisterMeta<'_> {
    type Output = Result<()>;

    fn visit<S: CurveSuite>(self) -> Result<()> {
        let meta = MetaAddress::<S>::decode(self.meta)?;
        self.reg.register(self.name, &meta)
    }
}

struct SendTo<'a> {
    reg: &'a mut Registry,
    name: &'a str,
    proto: ProtocolId,
    cfg: ViewTagConfig,
    seed: Option<u64>,
}

impl SuiteVisitor for SendTo<'_> {
    type Output = Result<(u64, stealth_pairing::StealthAddress, TagPolicy)>;

    fn visit<S: CurveSuite>(self) -> Self::Output {
        let meta = self.reg.lookup_meta::<S>(self.name, self.proto)?;
        let (_, out) = send(&meta, self.cfg, &mut rng(self.seed))?;
        let idx = self.reg.append(&out.announcement)?;
        Ok((idx, out.address, out.policy))
    }
}

#[derive(Serialize)]
struct ScanLine {
    idx: u64,
    proto: ProtocolId,
    curve: CurveId,
    address: String,
    #[serde(rename = "pub")]
    pub_key: String,
    #[serde(rename = "priv", skip_serializing_if = "Option::is_none")]
    priv_key: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    confirmed: Option<bool>,
}

struct ScanWith<'a> {
    file: &'a KeyFile,
    reg: &'a Registry,
    from: u64,
    variant: TagVariant,
    mode: ScanMode,
    all: bool,
}

impl SuiteVisitor for ScanWith<'_> {
    type Output = Result<Vec<String>>;

    fn visit<S: CurveSuite>(self) -> Self::Output {
        let keys = self.file.to_keys::<S>()?;
        let ctx = ScanContext::from_keys(&keys, true, self.variant, self.mode)?;
        let report = ctx.scan_registry(self.reg, self.from)?;
        let results: Vec<_> = if self.all {
            report.results.iter().collect()
        } else {
            report.owned().collect()
        };
        results
            .into_iter()
            .map(|r| {
                let line = ScanLine {
                    idx: r.index,
                    proto: keys.protocol(),
                    curve: S::ID,
                    address: r.address.to_string(),
                    pub_key: r.pub_key.to_hex(),
                    priv_key: r.priv_key.map(|k| k.to_hex()),
                    confirmed: r.confirmed,
                };
                Ok(serde_json::to_string(&line)?)
            })
            .collect()
    }
}

struct Attacks {
    seed: Option<u64>,
}

impl SuiteVisitor for Attacks {
    type Output = ();

    fn visit<S: CurveSuite>(self) {
        let mut rng = rng(self.seed);
        let k = random_fr::<S, _>(&mut rng);
        let v = random_fr::<S, _>(&mut rng);
        let r = random_fr::<S, _>(&mut rng);
        println!("curve {}", S::ID);

        println!("type-1 pairing protocol: a sender holding the viewing key v derives the private key");
        let (a, b) = demo_attack_ref3::<S>(k, v, r);
        println!("  (k*v)*R = {}", to_hex(&g1_to_bytes::<S>(&a)));
        println!("  (r*v)*K = {}", to_hex(&g1_to_bytes::<S>(&b)));
        println!("  equal: {}", a == b);

        println!("pairing protocol with the spending key in G2: the sender computes the recipient's secret");
        let (a, b) = demo_attack_ref4::<S>(k, r);
        println!("  e(R, k*g2) = {}", short(&to_hex(&gt_to_bytes::<S>(&a))));
        println!("  e(r*K, g2) = {}", short(&to_hex(&gt_to_bytes::<S>(&b))));
        println!("  equal: {}", a == b);
    }
}

fn short(hex: &str) -> String {
    if hex.len() <= 64 {
        hex.to_string()
    } else {
        format!("{}..{} ({} bytes)", &hex[..32], &hex[hex.len() - 32..], hex.len() / 2)
    }
}

fn load_config(arg: Option<&str>) -> Result<BenchConfig> {
    let text = match arg {
        None => return Ok(BenchConfig::default()),
        Some(s) if s.trim_start().starts_with('{') => s.to_string(),
        Some(path) => fs::read_to_string(path)?,
    };
    let cfg: BenchConfig = serde_json::from_str(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

fn write_output(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn bench(kind: BenchKind, opts: &BenchOpts) -> Result<()> {
    let cfg = load_config(opts.config.as_deref())?;
    match kind {
        BenchKind::Scan => {
            let mut progress = |row: &ScanRow| {
                eprintln!(
                    "{} {} A={} {}/{} seed={} {:.1} ms ({} tag matches)",
                    row.proto, row.curve, row.count, row.tag_variant, row.tag_bits, row.seed, row.scan_ms, row.tag_matches
                );
            };
            let report = bench_scan_with(&cfg, &mut progress)?;
            write_output(opts.out.as_deref(), &report.to_csv())?;
            if opts.table {
                eprint!("{}", report.to_table());
            }
        }
        BenchKind::Ops => {
            let report = bench_ops(&cfg)?;
            write_output(opts.out.as_deref(), &report.to_csv())?;
            if opts.table {
                eprint!("{}", report.to_table());
            }
        }
    }
    Ok(())
}
