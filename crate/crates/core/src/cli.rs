//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::collections::BTreeSet;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constellation::Pam;
use crate::demap::SoftWord;
use crate::fec::load_alist;
use crate::permcode::CodeIndexMap;
use crate::shellcode::{census_rows, ShellCode};
use crate::sim::{
    self, awgn, bmd_montecarlo, mi_montecarlo, snr_norm_db, ChannelConfig, CodeSource, Demapper, PasSystem,
};
use crate::trellis::build_trellis;
use crate::{presets, Error};

/// Per-dimension SNR convention written into every manifest.
pub const SNR_DEFINITION: &str = "snr_db = 10 log10(E / (n sigma^2)), per real dimension";

#[derive(Debug, Parser)]
#[command(name = "spherecode", version, about = "Spherical codes over PAM: census, demapping and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type-class census of a complete shell as CSV.
    Census {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'E')]
        energy: u64,
        #[arg(short = 'p')]
        p: usize,
    },
    /// Energy-trellis queries.
    Trellis {
        #[command(subcommand)]
        cmd: TrellisCmd,
    },
    /// Map an index to a codeword, or a codeword back to its index.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Code index (decimal).
        #[arg(long, conflicts_with = "decode")]
        index: Option<String>,
        /// Comma-separated amplitudes to rank.
        #[arg(long)]
        decode: Option<String>,
    },
    /// Run one soft demapper on one received word and print per-bit LLRs.
    LlrDemo {
        #[command(flatten)]
        code: CodeArgs,
        /// Received word, comma separated. Drawn at random when absent.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// exact, sbs, orbit or bcjr.
        #[arg(long, default_value = "orbit")]
        method: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Monte-Carlo campaigns over an SNR grid.
    Simulate {
        kind: SimKind,
        #[command(flatten)]
        args: SimArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum TrellisCmd {
    /// Per-depth state counts, edge total and path count.
    Stats {
        #[arg(short = 'n')]
        n: usize,
        #[arg(short = 'E')]
        energy: u64,
        #[arg(short = 'p')]
        p: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimKind {
    Mi,
    Bmd,
    Bler,
}

/// A code either by preset name or as the maximal `k`-class partial shell.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CodeArgs {
    /// Named preset, e.g. n12code2.
    #[arg(long)]
    pub code: Option<String>,
    #[arg(short = 'n')]
    pub n: Option<usize>,
    #[arg(short = 'E')]
    pub energy: Option<u64>,
    #[arg(short = 'p')]
    pub p: Option<usize>,
    /// Number of retained classes (all when absent).
    #[arg(short = 'k')]
    pub k: Option<usize>,
}

impl CodeArgs {
    pub fn build(&self) -> Result<ShellCode, CliError> {
        match (&self.code, self.n, self.energy, self.p) {
            (Some(name), None, None, None) if self.k.is_none() => Ok(presets::code(name)?),
            (None, Some(n), Some(e), Some(p)) => {
                let pam = Pam::new(p)?;
                Ok(match self.k {
                    Some(k) => ShellCode::partial(n, e, &pam, k)?,
                    None => ShellCode::complete(n, e, &pam)?,
                })
            }
            _ => Err(CliError::Config(
                "select a code with either --code <preset> or -n, -E, -p (and optionally -k)".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// SNR grid in dB: `start:step:stop`, a comma list, or one value.
    #[arg(long, allow_hyphen_values = true)]
    pub snr: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// List size for MI estimation.
    #[arg(short = 'L', long = "list-size", default_value_t = 15_625)]
    pub list_size: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Demappers to compare (bmd and bler); repeatable.
    #[arg(long = "demapper")]
    pub demappers: Vec<String>,
    /// alist parity-check matrix (bler).
    #[arg(long)]
    pub ldpc: Option<PathBuf>,
    /// Frames per SNR point (bler).
    #[arg(long, default_value_t = 1000)]
    pub frames: usize,
    /// Seed of the index spreading map (bmd and bler).
    #[arg(long = "map-seed", default_value_t = 1)]
    pub map_seed: u64,
    #[arg(short = 'o', long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => CliError::Runtime(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

/// Parses `a:step:b` (inclusive), `a,b,c` or a single value.
pub fn parse_snr_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("bad SNR grid `{s}` (expected start:step:stop, a comma list or a value)"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [a, step, b] => {
            let (a, step, b) = (num(a)?, num(step)?, num(b)?);
            if step.is_nan() || step <= 0.0 || b < a {
                return Err(bad());
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            (0..count).map(|i| a + i as f64 * step).collect()
        }
        [one] => one.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(bad()),
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("bad {what} entry `{t}`")))
        })
        .collect()
}

/// SHA-256 over the exact census (multiplicities and sizes) and the number
/// of retained classes.
pub fn census_hash(code: &ShellCode) -> String {
    let mut h = Sha256::new();
    h.update(format!("n={} E={} p={} k={}\n", code.n(), code.energy(), code.pam().p(), code.k()));
    for (tc, size) in code.census().iter().zip(code.census_sizes()) {
        h.update(format!("{:?}:{size}\n", tc.pam_multiplicities(code.pam().p())));
    }
    format!("{:x}", h.finalize())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CodeSummary {
    n: usize,
    energy: u64,
    p: usize,
    classes: usize,
    size: String,
    census_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    kind: SimKind,
    config: SimArgs,
    code: CodeSummary,
    snr_definition: String,
    grid: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Row {
    snr_db: f64,
    snr_norm_db: f64,
    metric: String,
    value: f64,
    std_err: f64,
}

/// Path of the JSON manifest written next to a CSV output.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut p = out.as_os_str().to_owned();
    p.push(".manifest.json");
    PathBuf::from(p)
}

// per-point seed, independent of which points were already done
fn point_seed(seed: u64, snr_db: f64) -> u64 {
    let mut z = seed ^ snr_db.to_bits().rotate_left(17);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn simulate(kind: SimKind, args: &SimArgs) -> Result<(), CliError> {
    let grid = parse_snr_grid(&args.snr)?;
    if args.trials == 0 || args.list_size == 0 || args.frames == 0 {
        return Err(CliError::Config("--trials, --list-size and --frames must be positive".into()));
    }
    let code = args.code.build()?;
    let demappers: Vec<Demapper> = args
        .demappers
        .iter()
        .map(|d| d.parse::<Demapper>())
        .collect::<Result<_, _>>()?;
    if kind != SimKind::Mi && demappers.is_empty() {
        return Err(CliError::Config("bmd and bler need at least one --demapper".into()));
    }
    let map = CodeIndexMap::from_seed(code.size().clone(), args.map_seed)?;
    let pas = match kind {
        SimKind::Bler => {
            let path = args
                .ldpc
                .as_ref()
                .ok_or_else(|| CliError::Config("bler needs --ldpc <alist file>".into()))?;
            let pc = load_alist(path).map_err(|e| match e {
                Error::Io(io) => CliError::Config(format!("{}: {io}", path.display())),
                other => CliError::from(other),
            })?;
            Some(PasSystem::new(code.clone(), map.clone(), pc)?)
        }
        _ => None,
    };

    let manifest = Manifest {
        tool: "spherecode".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        kind,
        config: args.clone(),
        code: CodeSummary {
            n: code.n(),
            energy: code.energy(),
            p: code.pam().p(),
            classes: code.k(),
            size: code.size().to_string(),
            census_sha256: census_hash(&code),
        },
        snr_definition: SNR_DEFINITION.into(),
        grid: grid.clone(),
    };
    let done = prepare_output(&args.out, &manifest)?;

    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&args.out)
        .map_err(|e| io_err(&args.out, e))?;
    let fresh = file.metadata().map_err(|e| io_err(&args.out, e))?.len() == 0;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    let src = CodeSource::new(code.clone(), Some(map))?;
    for &snr in &grid {
        if done.contains(&snr.to_bits()) {
            continue;
        }
        let cfg = ChannelConfig::from_snr(code.energy(), code.n(), snr, point_seed(args.seed, snr));
        let rows: Vec<Row> = match kind {
            SimKind::Mi => {
                let est = mi_montecarlo(&code, cfg, args.trials, args.list_size)?;
                vec![row(snr, est.mi, "mi", est.mi, est.std_err)]
            }
            SimKind::Bmd => {
                let (est, _) = bmd_montecarlo(&src, &demappers, cfg, args.trials)?;
                demappers
                    .iter()
                    .zip(est)
                    .map(|(d, e)| {
                        let r = e.rate_per_dim(code.n());
                        row(snr, r, &format!("bmd_{}", d.name()), r, e.std_err / code.n() as f64)
                    })
                    .collect()
            }
            SimKind::Bler => {
                let sys = pas.as_ref().expect("set up above");
                let est = sys.run(&demappers, cfg, args.frames)?;
                demappers
                    .iter()
                    .zip(est)
                    .map(|(d, e)| row(snr, sys.rate(), &format!("bler_{}", d.name()), e.bler, e.std_err))
                    .collect()
            }
        };
        for r in rows {
            w.serialize(r).map_err(|e| io_err(&args.out, e))?;
        }
        w.flush().map_err(|e| io_err(&args.out, e))?;
    }
    Ok(())
}

fn row(snr: f64, rho: f64, metric: &str, value: f64, std_err: f64) -> Row {
    Row {
        snr_db: snr,
        snr_norm_db: snr_norm_db(snr, rho),
        metric: metric.into(),
        value,
        std_err,
    }
}

// writes or checks the manifest; returns SNR points already in the CSV
fn prepare_output(out: &Path, manifest: &Manifest) -> Result<BTreeSet<u64>, CliError> {
    let mpath = manifest_path(out);
    let mut done = BTreeSet::new();
    if out.exists() {
        let text = fs::read_to_string(&mpath).map_err(|_| {
            CliError::Config(format!(
                "{} exists without its manifest {}; remove it or choose another --out",
                out.display(),
                mpath.display()
            ))
        })?;
        let old: Manifest = serde_json::from_str(&text).map_err(|e| io_err(&mpath, e))?;
        if &old != manifest {
            return Err(CliError::Config(format!(
                "{} was produced with a different configuration; remove it or choose another --out",
                out.display()
            )));
        }
        let mut r = csv::Reader::from_path(out).map_err(|e| io_err(out, e))?;
        for rec in r.deserialize::<Row>() {
            done.insert(rec.map_err(|e| io_err(out, e))?.snr_db.to_bits());
        }
    } else {
        let json = serde_json::to_string_pretty(manifest).map_err(|e| io_err(&mpath, e))?;
        fs::write(&mpath, json + "\n").map_err(|e| io_err(&mpath, e))?;
    }
    Ok(done)
}

fn census(n: usize, energy: u64, p: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let pam = Pam::new(p)?;
    let shell = ShellCode::complete(n, energy, &pam)?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=p).map(|i| format!("m{i}")).collect();
    header.extend(["size_log2".into(), "cumulative_log2".into()]);
    let csv_err = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(&header).map_err(csv_err)?;
    for (m, size, cum) in census_rows(&shell) {
        let mut rec: Vec<String> = m.iter().map(ToString::to_string).collect();
        rec.push(format!("{size:.6}"));
        rec.push(format!("{cum:.6}"));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Runtime(e.to_string()))
}

fn trellis_stats(n: usize, energy: u64, p: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let t = build_trellis(n, energy, &Pam::new(p)?)?;
    let io = |e: std::io::Error| CliError::Runtime(e.to_string());
    writeln!(out, "quantity,depth,value").map_err(io)?;
    for (j, s) in t.state_counts().iter().enumerate() {
        writeln!(out, "states,{j},{s}").map_err(io)?;
    }
    writeln!(out, "edges,all,{}", t.edge_count()).map_err(io)?;
    writeln!(out, "paths,all,{}", t.path_count()).map_err(io)
}

fn encode(code: &ShellCode, index: Option<&str>, decode: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Runtime(e.to_string());
    match (index, decode) {
        (Some(q), None) => {
            let q: BigUint = q
                .parse()
                .map_err(|_| CliError::Config(format!("bad index `{q}`")))?;
            let (class, _) = code.encode(&q)?;
            let amps = code.encode_amplitudes(&q)?;
            let s: Vec<String> = amps.iter().map(ToString::to_string).collect();
            writeln!(out, "class={class} codeword={}", s.join(",")).map_err(io)
        }
        (None, Some(a)) => {
            let amps: Vec<u32> = parse_list(a, "amplitude")?;
            writeln!(out, "index={}", code.decode_amplitudes(&amps)?).map_err(io)
        }
        _ => Err(CliError::Config("give exactly one of --index or --decode".into())),
    }
}

fn llr_demo(
    code: &ShellCode,
    y: Option<&str>,
    sigma: f64,
    method: &str,
    seed: u64,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let d: Demapper = method.parse()?;
    let sw = match y {
        Some(y) => {
            let y: Vec<f64> = parse_list(y, "received value")?;
            if y.len() != code.n() {
                return Err(CliError::Config(format!("y has {} entries, the code has length {}", y.len(), code.n())));
            }
            SoftWord::new(y, sigma)?
        }
        None => {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let src = CodeSource::new(code.clone(), None)?;
            let (_, x) = src.draw(&mut rng)?;
            awgn(&x, sigma, &mut rng)?
        }
    };
    let ctx = sim::DemapContext::new(code, None, &[d])?;
    let llr = ctx.llr(d, &sw)?;
    let io = |e: std::io::Error| CliError::Runtime(e.to_string());
    writeln!(out, "symbol,bit,kind,llr").map_err(io)?;
    for j in 0..llr.n() {
        writeln!(out, "{j},0,sign,{:.6}", llr.sign(j)).map_err(io)?;
        for b in 0..code.pam().amp_bits() {
            writeln!(out, "{j},{},amp,{:.6}", b + 1, llr.amp(j, b)).map_err(io)?;
        }
    }
    Ok(())
}

/// Runs one parsed command, writing its report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Census { n, energy, p } => census(*n, *energy, *p, out),
        Command::Trellis {
            cmd: TrellisCmd::Stats { n, energy, p },
        } => trellis_stats(*n, *energy, *p, out),
        Command::Encode { code, index, decode } => encode(&code.build()?, index.as_deref(), decode.as_deref(), out),
        Command::LlrDemo {
            code,
            y,
            sigma,
            method,
            seed,
        } => llr_demo(&code.build()?, y.as_deref(), *sigma, method, *seed, out),
        Command::Simulate { kind, args } => simulate(*kind, args),
    }
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn run() -> u8 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
