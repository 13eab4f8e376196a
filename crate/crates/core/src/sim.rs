//! Monte-Carlo harness: AWGN channel, mutual information by orbit list
//! decoding, scalar PAM baselines, BMD rates and the PAS block-error loop.
//!
//! SNR is per dimension, `E / (n σ²)` for a code of energy `E`.

use std::str::FromStr;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assignment::murty_k_best;
use crate::constellation::{Labeling, Pam};
use crate::demap::{
    llr_orbit_frozen, llr_symbol_by_symbol_with_priors, orbit_assignment, symbol_priors, ExhaustiveCodebook,
    LlrVector, SoftWord, EXHAUSTIVE_BUDGET,
};
use crate::fec::{bp_decode, ParityCheck, SystematicEncoder, DEFAULT_MAX_ITER};
use crate::numeric::{bit_cross_entropy, log2_big, logsumexp, KahanSum};
use crate::permcode::{bits_to_biguint, biguint_to_bits, random_below, CodeIndexMap};
use crate::shellcode::ShellCode;
use crate::trellis::{build_trellis, EnergyTrellis};
use crate::{Error, Result};

/// Number of independent PRNG streams trials are split over. Fixed so that
/// results do not depend on the thread count.
pub const SHARDS: usize = 16;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Noise level giving per-dimension SNR `snr_db` for symbols of mean energy
/// `energy / n`.
pub fn sigma_for_snr(energy: f64, n: usize, snr_db: f64) -> f64 {
    (energy / (n as f64 * db_to_linear(snr_db))).sqrt()
}

pub fn snr_db(energy: f64, n: usize, sigma: f64) -> f64 {
    linear_to_db(energy / (n as f64 * sigma * sigma))
}

/// Rate-normalised SNR `SNR / (2^{2ρ} - 1)` in dB, `ρ` in bits per dimension.
pub fn snr_norm_db(snr_db: f64, rho: f64) -> f64 {
    snr_db - linear_to_db((2.0 * rho).exp2() - 1.0)
}

/// AWGN capacity `½ log2(1 + SNR)` in bits per dimension.
pub fn capacity(snr_db: f64) -> f64 {
    0.5 * (1.0 + db_to_linear(snr_db)).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn from_snr(energy: u64, n: usize, snr_db: f64, seed: u64) -> Self {
        ChannelConfig {
            sigma: sigma_for_snr(energy as f64, n, snr_db),
            seed,
        }
    }

    pub fn snr_db(&self, energy: u64, n: usize) -> f64 {
        snr_db(energy as f64, n, self.sigma)
    }
}

/// `y = x + σ z` with `z` standard normal.
pub fn awgn<R: Rng + ?Sized>(x: &[i64], sigma: f64, rng: &mut R) -> Result<SoftWord> {
    let y = x
        .iter()
        .map(|&s| s as f64 + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    SoftWord::new(y, sigma)
}

/// Runs `trials` independent trials over [`SHARDS`] PRNG streams derived
/// from `seed`. Output order is the trial order, whatever the thread count.
pub fn run_sharded<T, F>(trials: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha20Rng) -> T + Sync,
{
    let per = trials.div_ceil(SHARDS);
    (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let lo = (shard * per).min(trials);
            let hi = ((shard + 1) * per).min(trials);
            (lo..hi).map(|_| f(&mut rng)).collect::<Vec<T>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Mean with a bootstrap standard error and 95 % percentile interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub mean: f64,
    pub std_err: f64,
    pub lo: f64,
    pub hi: f64,
}

pub const BOOTSTRAP_RESAMPLES: usize = 400;

pub fn bootstrap_mean(samples: &[f64], seed: u64) -> Bootstrap {
    let n = samples.len();
    let mean = kahan_mean(samples);
    if n < 2 {
        return Bootstrap {
            mean,
            std_err: 0.0,
            lo: mean,
            hi: mean,
        };
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut means: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let mut acc = KahanSum::default();
            for _ in 0..n {
                acc.add(samples[rng.random_range(0..n)]);
            }
            acc.value() / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let m = kahan_mean(&means);
    let var = means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (means.len() - 1) as f64;
    let at = |q: f64| means[((q * (means.len() - 1) as f64).round()) as usize];
    Bootstrap {
        mean,
        std_err: var.sqrt(),
        lo: at(0.025),
        hi: at(0.975),
    }
}

fn kahan_mean(xs: &[f64]) -> f64 {
    let mut acc = KahanSum::default();
    xs.iter().for_each(|&x| acc.add(x));
    acc.value() / xs.len().max(1) as f64
}

/// A code plus the optional index map that selects its data-carrying part.
#[derive(Debug, Clone)]
pub struct CodeSource {
    pub code: ShellCode,
    pub map: Option<CodeIndexMap>,
}

impl CodeSource {
    pub fn new(code: ShellCode, map: Option<CodeIndexMap>) -> Result<Self> {
        if let Some(m) = &map {
            if m.modulus() != code.size() {
                return Err(Error::InvalidParameter("index map modulus does not match the code".into()));
            }
        }
        Ok(CodeSource { code, map })
    }

    /// Entropy in bits of a uniformly drawn Variant II codeword.
    pub fn entropy_bits(&self) -> f64 {
        let amp = match &self.map {
            Some(m) => m.k_a() as f64,
            None => log2_big(self.code.size()),
        };
        amp + self.code.n() as f64
    }

    /// Draws a uniform codeword: its unsigned amplitudes and a signed word.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(Vec<u32>, Vec<i64>)> {
        let q = match &self.map {
            Some(m) => m.spread(&random_below(rng, &m.span()))?,
            None => random_below(rng, self.code.size()),
        };
        let amps = self.code.encode_amplitudes(&q)?;
        let signed = amps
            .iter()
            .map(|&a| if rng.random_bool(0.5) { -(a as i64) } else { a as i64 })
            .collect();
        Ok((amps, signed))
    }
}

fn gaussian_loglik(x: &[i64], sw: &SoftWord) -> f64 {
    let s = sw.sigma();
    let d2: f64 = x.iter().zip(sw.y()).map(|(&a, &y)| (y - a as f64).powi(2)).sum();
    -d2 / (2.0 * s * s) - x.len() as f64 * ((2.0 * std::f64::consts::PI).sqrt() * s).ln()
}

/// Log-likelihoods of the `l` most likely orbits of a (shell) code, found
/// by one k-best search per retained class.
pub fn orbit_list_logliks(code: &ShellCode, sw: &SoftWord, l: usize) -> Result<Vec<f64>> {
    let s2 = sw.sigma() * sw.sigma();
    let n = code.n() as f64;
    let base = -(sw.energy_y() + code.energy() as f64) / (2.0 * s2) - n * ((2.0 * std::f64::consts::PI).sqrt() * sw.sigma()).ln();
    let mut all = Vec::new();
    for tc in code.classes() {
        let inst = orbit_assignment(sw, tc)?;
        let list = murty_k_best(&inst, l, None)?;
        all.extend(list.solutions.iter().map(|m| base + m.reward));
    }
    all.sort_by(|a, b| b.total_cmp(a));
    all.truncate(l);
    Ok(all)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    /// Bits per dimension.
    pub mi: f64,
    pub std_err: f64,
    pub trials: usize,
    pub list_size: usize,
}

/// Mutual information of the full (non-expurgated) Variant II code, with
/// `p(y)` approximated from the `l` most likely orbits.
pub fn mi_montecarlo(code: &ShellCode, cfg: ChannelConfig, trials: usize, l: usize) -> Result<MiEstimate> {
    if l == 0 || trials == 0 {
        return Err(Error::InvalidParameter("trials and list size must be positive".into()));
    }
    let src = CodeSource::new(code.clone(), None)?;
    let log_m = log2_big(code.size()) * std::f64::consts::LN_2;
    let n = code.n() as f64;
    let samples = run_sharded(trials, cfg.seed, |rng| -> Result<f64> {
        let (_, x) = src.draw(rng)?;
        let sw = awgn(&x, cfg.sigma, rng)?;
        let list = orbit_list_logliks(code, &sw, l)?;
        let log_py = logsumexp(&list) - log_m;
        Ok((gaussian_loglik(&x, &sw) - log_py) / (n * std::f64::consts::LN_2))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let b = bootstrap_mean(&samples, cfg.seed ^ 0x5EED);
    Ok(MiEstimate {
        mi: b.mean,
        std_err: b.std_err,
        trials,
        list_size: l,
    })
}

/// Gauss–Hermite nodes and weights for `∫ e^{-t²} f(t) dt`.
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // orthonormal Hermite recurrence
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2 - (j as f64 / (j as f64 + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Input distribution over the 2p signed PAM symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InputDistribution {
    Uniform,
    /// `P(s) ∝ exp(-ν s²)`.
    MaxwellBoltzmann { nu: f64 },
}

impl InputDistribution {
    /// Probabilities over `pam.symbols()` (ascending).
    pub fn probabilities(&self, pam: &Pam) -> Vec<f64> {
        let syms = pam.symbols();
        let raw: Vec<f64> = match *self {
            InputDistribution::Uniform => vec![1.0; syms.len()],
            InputDistribution::MaxwellBoltzmann { nu } => {
                syms.iter().map(|&s| (-nu * (s * s) as f64).exp()).collect()
            }
        };
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    }
}

const GH_NODES: usize = 96;

/// Mutual information in bits of the scalar AWGN channel with a PAM input,
/// at per-dimension SNR `snr_db` relative to the input's average power.
pub fn pam_mi(pam: &Pam, dist: InputDistribution, snr_db: f64) -> f64 {
    let probs = dist.probabilities(pam);
    let syms: Vec<f64> = pam.symbols().iter().map(|&s| s as f64).collect();
    let power: f64 = probs.iter().zip(&syms).map(|(p, s)| p * s * s).sum();
    let sigma = (power / db_to_linear(snr_db)).sqrt();
    pam_mi_sigma(&syms, &probs, sigma)
}

fn pam_mi_sigma(syms: &[f64], probs: &[f64], sigma: f64) -> f64 {
    let (t, w) = gauss_hermite(GH_NODES);
    let norm = std::f64::consts::PI.sqrt();
    let mut mi = 0.0;
    let mut terms = vec![0.0; syms.len()];
    for (&x, &px) in syms.iter().zip(probs) {
        if px == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (&ti, &wi) in t.iter().zip(&w) {
            let z = std::f64::consts::SQRT_2 * ti;
            let y = x + sigma * z;
            // log p(y|x) - log p(y), Gaussian constants cancel
            for ((term, &s), &ps) in terms.iter_mut().zip(syms).zip(probs) {
                *term = if ps > 0.0 { ps.ln() - (y - s).powi(2) / (2.0 * sigma * sigma) } else { f64::NEG_INFINITY };
            }
            inner += wi * (-z * z / 2.0 - logsumexp(&terms));
        }
        mi += px * inner / norm;
    }
    (mi / std::f64::consts::LN_2).max(0.0)
}

/// Maxwell–Boltzmann PAM MI maximised over `ν` at fixed SNR; returns the MI
/// and the optimising `ν` (golden-section search).
pub fn pam_mi_mb_optimized(pam: &Pam, snr_db: f64) -> (f64, f64) {
    let f = |nu: f64| pam_mi(pam, InputDistribution::MaxwellBoltzmann { nu }, snr_db);
    let (mut a, mut b) = (0.0f64, 0.5f64);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let nu = (a + b) / 2.0;
    let best = f(nu).max(f(0.0));
    (best, if f(nu) >= f(0.0) { nu } else { 0.0 })
}

/// Soft demapping method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Demapper {
    Exact,
    SymbolBySymbol,
    OrbitFrozen,
    Bcjr,
}

impl Demapper {
    pub fn name(self) -> &'static str {
        match self {
            Demapper::Exact => "exact",
            Demapper::SymbolBySymbol => "sbs",
            Demapper::OrbitFrozen => "orbit",
            Demapper::Bcjr => "bcjr",
        }
    }
}

impl FromStr for Demapper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Demapper::Exact),
            "sbs" => Ok(Demapper::SymbolBySymbol),
            "orbit" => Ok(Demapper::OrbitFrozen),
            "bcjr" => Ok(Demapper::Bcjr),
            other => Err(Error::InvalidParameter(format!(
                "unknown demapper `{other}` (expected exact, sbs, orbit or bcjr)"
            ))),
        }
    }
}

/// Precomputed state for running several demappers on one code.
#[derive(Debug, Clone)]
pub struct DemapContext {
    code: ShellCode,
    priors: Vec<f64>,
    codebook: Option<ExhaustiveCodebook>,
    trellis: Option<EnergyTrellis>,
}

impl DemapContext {
    pub fn new(code: &ShellCode, map: Option<&CodeIndexMap>, demappers: &[Demapper]) -> Result<Self> {
        let codebook = if demappers.contains(&Demapper::Exact) {
            Some(ExhaustiveCodebook::new(code, map, EXHAUSTIVE_BUDGET)?)
        } else {
            None
        };
        let trellis = if demappers.contains(&Demapper::Bcjr) {
            Some(build_trellis(code.n(), code.energy(), code.pam())?)
        } else {
            None
        };
        Ok(DemapContext {
            code: code.clone(),
            priors: symbol_priors(code),
            codebook,
            trellis,
        })
    }

    pub fn llr(&self, d: Demapper, sw: &SoftWord) -> Result<LlrVector> {
        match d {
            Demapper::Exact => self
                .codebook
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("exact demapper was not prepared".into()))?
                .llr(sw),
            Demapper::SymbolBySymbol => Ok(llr_symbol_by_symbol_with_priors(sw, self.code.pam(), &self.priors)),
            Demapper::OrbitFrozen => llr_orbit_frozen(sw, &self.code),
            Demapper::Bcjr => self
                .trellis
                .as_ref()
                .ok_or_else(|| Error::InvalidParameter("BCJR demapper was not prepared".into()))?
                .bcjr_llrs(sw),
        }
    }
}

/// Label bits of a signed word: per symbol, sign first then amplitude bits.
pub fn label_bits(pam: &Pam, x: &[i64]) -> Result<Vec<bool>> {
    let lab = Labeling::gray(pam);
    let mut out = Vec::with_capacity(x.len() * lab.bits_per_symbol());
    for &s in x {
        out.extend(lab.label_of(pam, s)?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmdEstimate {
    /// Achievable rate in bits per codeword.
    pub rate: f64,
    pub entropy_b: f64,
    pub cond_sum: f64,
    pub std_err: f64,
    pub trials: usize,
}

impl BmdEstimate {
    pub fn rate_per_dim(&self, n: usize) -> f64 {
        self.rate / n as f64
    }
}

/// Paired BMD estimates: every demapper sees the same codewords and noise.
/// Also returns the per-trial cross-entropy sums for paired comparisons.
pub fn bmd_montecarlo(
    src: &CodeSource,
    demappers: &[Demapper],
    cfg: ChannelConfig,
    trials: usize,
) -> Result<(Vec<BmdEstimate>, Vec<Vec<f64>>)> {
    if trials == 0 || demappers.is_empty() {
        return Err(Error::InvalidParameter("need at least one trial and one demapper".into()));
    }
    let ctx = DemapContext::new(&src.code, src.map.as_ref(), demappers)?;
    let pam = src.code.pam().clone();
    let rows = run_sharded(trials, cfg.seed, |rng| -> Result<Vec<f64>> {
        let (_, x) = src.draw(rng)?;
        let bits = label_bits(&pam, &x)?;
        let sw = awgn(&x, cfg.sigma, rng)?;
        demappers
            .iter()
            .map(|&d| {
                let llr = ctx.llr(d, &sw)?;
                Ok(bits.iter().zip(&llr.llr).map(|(&b, &l)| bit_cross_entropy(b, l)).sum())
            })
            .collect()
    })
    .into_iter()
    .collect::<Result<Vec<Vec<f64>>>>()?;
    let h = src.entropy_bits();
    let per_demapper: Vec<Vec<f64>> = (0..demappers.len()).map(|k| rows.iter().map(|r| r[k]).collect()).collect();
    let estimates = per_demapper
        .iter()
        .enumerate()
        .map(|(k, samples)| {
            let b = bootstrap_mean(samples, cfg.seed ^ (k as u64 + 1));
            BmdEstimate {
                rate: (h - b.mean).max(0.0),
                entropy_b: h,
                cond_sum: b.mean,
                std_err: b.std_err,
                trials,
            }
        })
        .collect();
    Ok((estimates, per_demapper))
}

/// Frame layout of the PAS loop: how label bits of `C` codewords map onto
/// one LDPC codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PasLayout {
    pub codewords_per_frame: usize,
    pub amp_bits: usize,
    pub sign_bits: usize,
    pub systematic_sign_bits: usize,
    pub parity_bits: usize,
}

/// Transmitter and receiver of the PAS scheme for one code and LDPC code.
#[derive(Debug, Clone)]
pub struct PasSystem {
    src: CodeSource,
    map: CodeIndexMap,
    pc: ParityCheck,
    enc: SystematicEncoder,
    layout: PasLayout,
    labeling: Labeling,
}

/// Per-demapper outcome of a PAS run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlerEstimate {
    pub bler: f64,
    pub std_err: f64,
    pub block_errors: usize,
    pub blocks: usize,
    pub frames: usize,
}

impl PasSystem {
    pub fn new(code: ShellCode, map: CodeIndexMap, pc: ParityCheck) -> Result<Self> {
        let enc = SystematicEncoder::new(&pc)?;
        let pam = code.pam().clone();
        let n = code.n();
        let per_cw = n * pam.bits_per_symbol();
        let big_n = pc.n();
        let k = enc.k();
        if !big_n.is_multiple_of(per_cw) {
            return Err(Error::FrameLayout(format!(
                "LDPC length {big_n} is not a multiple of {per_cw} label bits per codeword ({n} symbols × {} bits)",
                pam.bits_per_symbol()
            )));
        }
        let c = big_n / per_cw;
        let amp_bits = c * n * pam.amp_bits();
        let sign_bits = c * n;
        if k < amp_bits {
            return Err(Error::FrameLayout(format!(
                "{k} information bits cannot hold {amp_bits} amplitude bits ({c} codewords × {n} × {})",
                pam.amp_bits()
            )));
        }
        let parity = big_n - k;
        if parity > sign_bits {
            return Err(Error::FrameLayout(format!(
                "{parity} parity bits exceed the {sign_bits} sign positions"
            )));
        }
        let layout = PasLayout {
            codewords_per_frame: c,
            amp_bits,
            sign_bits,
            systematic_sign_bits: k - amp_bits,
            parity_bits: parity,
        };
        Ok(PasSystem {
            src: CodeSource::new(code, Some(map.clone()))?,
            map,
            pc,
            enc,
            layout,
            labeling: Labeling::gray(&pam),
        })
    }

    pub fn layout(&self) -> PasLayout {
        self.layout
    }

    pub fn code(&self) -> &ShellCode {
        &self.src.code
    }

    /// Net information bits per dimension.
    pub fn rate(&self) -> f64 {
        let c = self.layout.codewords_per_frame as f64;
        (c * self.map.k_a() as f64 + self.layout.systematic_sign_bits as f64) / (c * self.src.code.n() as f64)
    }

    // sign slot s = j · C + c for symbol j of codeword c; the first slots are
    // systematic so data signs spread evenly across codewords
    fn sign_slot(&self, c: usize, j: usize) -> usize {
        j * self.layout.codewords_per_frame + c
    }

    /// Runs `frames` frames; every demapper decodes the same received words.
    pub fn run(&self, demappers: &[Demapper], cfg: ChannelConfig, frames: usize) -> Result<Vec<BlerEstimate>> {
        let ctx = DemapContext::new(&self.src.code, Some(&self.map), demappers)?;
        let per_frame = run_sharded(frames, cfg.seed, |rng| self.frame(&ctx, demappers, cfg.sigma, rng))
            .into_iter()
            .collect::<Result<Vec<Vec<usize>>>>()?;
        let blocks_per_frame = self.layout.codewords_per_frame;
        Ok((0..demappers.len())
            .map(|k| {
                let errs: Vec<f64> = per_frame.iter().map(|r| r[k] as f64 / blocks_per_frame as f64).collect();
                let b = bootstrap_mean(&errs, cfg.seed ^ (0xB1E5 + k as u64));
                let block_errors = per_frame.iter().map(|r| r[k]).sum();
                BlerEstimate {
                    bler: b.mean,
                    std_err: b.std_err,
                    block_errors,
                    blocks: frames * blocks_per_frame,
                    frames,
                }
            })
            .collect())
    }

    /// Per-frame block-error counts for each demapper.
    pub fn frame<R: Rng + ?Sized>(&self, ctx: &DemapContext, demappers: &[Demapper], sigma: f64, rng: &mut R) -> Result<Vec<usize>> {
        let code = &self.src.code;
        let pam = code.pam();
        let n = code.n();
        let ab = pam.amp_bits();
        let lay = self.layout;
        let c_count = lay.codewords_per_frame;
        // data: amplitude indices and systematic sign bits
        let mut indices = Vec::with_capacity(c_count);
        let mut amps = Vec::with_capacity(c_count);
        for _ in 0..c_count {
            let i = random_below(rng, &self.map.span());
            let q = self.map.spread(&i)?;
            amps.push(code.encode_amplitudes(&q)?);
            indices.push(i);
        }
        let sys_signs: Vec<bool> = (0..lay.systematic_sign_bits).map(|_| rng.random_bool(0.5)).collect();
        let mut info = Vec::with_capacity(self.enc.k());
        for word in &amps {
            for &a in word {
                let r = pam.rank_of(a).expect("in PAM");
                info.extend((0..ab).map(|b| self.labeling.amp_bit(r, b)));
            }
        }
        info.extend_from_slice(&sys_signs);
        let cw = self.enc.encode(&info)?;
        // sign slot values: systematic first, then parity
        let mut signs = vec![false; lay.sign_bits];
        signs[..lay.systematic_sign_bits].copy_from_slice(&sys_signs);
        for (k, &pos) in self.enc.parity_positions().iter().enumerate() {
            signs[lay.systematic_sign_bits + k] = cw[pos];
        }
        let words: Vec<Vec<i64>> = (0..c_count)
            .map(|c| {
                (0..n)
                    .map(|j| {
                        let a = amps[c][j] as i64;
                        if signs[self.sign_slot(c, j)] { -a } else { a }
                    })
                    .collect()
            })
            .collect();
        let received: Vec<SoftWord> = words.iter().map(|x| awgn(x, sigma, rng)).collect::<Result<_>>()?;
        let mut out = Vec::with_capacity(demappers.len());
        for &d in demappers {
            let mut amp_llr = Vec::with_capacity(lay.amp_bits);
            let mut sign_llr = vec![0.0; lay.sign_bits];
            for (c, sw) in received.iter().enumerate() {
                let llr = ctx.llr(d, sw)?;
                for j in 0..n {
                    sign_llr[self.sign_slot(c, j)] = llr.sign(j);
                    amp_llr.extend((0..ab).map(|b| llr.amp(j, b)));
                }
            }
            let mut channel = vec![0.0; self.pc.n()];
            let info_llr = amp_llr.iter().chain(&sign_llr[..lay.systematic_sign_bits]);
            for (&pos, &l) in self.enc.info_positions().iter().zip(info_llr) {
                channel[pos] = l;
            }
            for (k, &pos) in self.enc.parity_positions().iter().enumerate() {
                channel[pos] = sign_llr[lay.systematic_sign_bits + k];
            }
            let dec = bp_decode(&self.pc, &channel, DEFAULT_MAX_ITER)?;
            let got = self.enc.extract(&dec.bits);
            let got_signs = &got[lay.amp_bits..];
            let mut errors = 0;
            for c in 0..c_count {
                let bits = &got[c * n * ab..(c + 1) * n * ab];
                let ok_amp = self.recover_index(bits).is_some_and(|i| i == indices[c]);
                let ok_sign = (0..n)
                    .map(|j| self.sign_slot(c, j))
                    .filter(|&s| s < lay.systematic_sign_bits)
                    .all(|s| got_signs[s] == sys_signs[s]);
                if !(ok_amp && ok_sign) {
                    errors += 1;
                }
            }
            out.push(errors);
        }
        Ok(out)
    }

    // amplitude label bits of one codeword → data index, or None on any
    // invalid label, non-codeword or rejected index
    fn recover_index(&self, bits: &[bool]) -> Option<BigUint> {
        let code = &self.src.code;
        let ab = code.pam().amp_bits();
        let amps: Option<Vec<u32>> = bits
            .chunks(ab.max(1))
            .map(|chunk| {
                let label = bits_to_biguint(chunk);
                let label = u32::try_from(&label).ok()?;
                let r = self.labeling.rank_of_label(label)?;
                Some(code.pam().amplitudes()[r])
            })
            .collect();
        let q = code.decode_amplitudes(&amps?).ok()?;
        self.map.unspread(&q)
    }
}

/// `width`-bit big-endian rendering of an index, as used for data words.
pub fn index_bits(i: &BigUint, width: usize) -> Vec<bool> {
    biguint_to_bits(i, width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fec::ira_code;
    use crate::permcode::TypeClass;

    fn code2() -> ShellCode {
        let tc = TypeClass::new(vec![1, 3, 5, 7], vec![5, 3, 3, 1]).unwrap();
        ShellCode::single(&tc, &Pam::new(4).unwrap()).unwrap()
    }

    #[test]
    fn awgn_statistics() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let x = vec![3i64; 1_000_000];
        let sw = awgn(&x, 0.7, &mut rng).unwrap();
        let d: Vec<f64> = sw.y().iter().map(|y| y - 3.0).collect();
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / d.len() as f64;
        assert!(mean.abs() < 5.0 * 0.7 / 1e3);
        assert!((var / 0.49 - 1.0).abs() < 0.01);
        let tiny = awgn(&[1, -3], 1e-12, &mut rng).unwrap();
        assert!((tiny.y()[1] + 3.0).abs() < 1e-9);
    }

    #[test]
    fn snr_round_trip() {
        let cfg = ChannelConfig::from_snr(156, 12, 9.0, 0);
        assert!((cfg.snr_db(156, 12) - 9.0).abs() < 1e-9);
        assert!((snr_norm_db(10.0, 0.5) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_hermite_moments() {
        let (x, w) = gauss_hermite(GH_NODES);
        let pi = std::f64::consts::PI;
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((m0 - pi.sqrt()).abs() < 1e-12);
        assert!((m2 - pi.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn pam_mi_limits_and_shaping() {
        let p4 = Pam::new(4).unwrap();
        assert!((pam_mi(&p4, InputDistribution::Uniform, 45.0) - 3.0).abs() < 1e-6);
        assert!(pam_mi(&p4, InputDistribution::Uniform, -40.0) < 1e-4);
        let uni = pam_mi(&p4, InputDistribution::Uniform, 12.0);
        let (mb, nu) = pam_mi_mb_optimized(&p4, 12.0);
        assert!(mb >= uni - 1e-9 && nu > 0.0);
        assert!(mb <= capacity(12.0));
        // BPSK closed form at 0 dB is about 0.486
        let bpsk = pam_mi(&Pam::new(1).unwrap(), InputDistribution::Uniform, 0.0);
        assert!((bpsk - 0.4859).abs() < 1e-3, "{bpsk}");
    }

    #[test]
    fn bootstrap_on_constant_and_spread() {
        let b = bootstrap_mean(&[2.0; 50], 1);
        assert_eq!((b.mean, b.std_err), (2.0, 0.0));
        let xs: Vec<f64> = (0..1000).map(|i| (i % 10) as f64).collect();
        let b = bootstrap_mean(&xs, 1);
        let analytic = (8.25f64 / 1000.0).sqrt();
        assert!((b.std_err / analytic - 1.0).abs() < 0.2);
        assert!(b.lo < b.mean && b.mean < b.hi);
    }

    #[test]
    fn sharding_is_deterministic() {
        let a = run_sharded(37, 5, |rng| rng.random::<u64>());
        let b = run_sharded(37, 5, |rng| rng.random::<u64>());
        assert_eq!(a, b);
        assert_eq!(a.len(), 37);
    }

    #[test]
    fn mi_small_list_is_not_below_full_list() {
        let code = ShellCode::complete(6, 22, &Pam::new(2).unwrap()).unwrap();
        let total = code.size().to_string().parse::<usize>().unwrap();
        let cfg = ChannelConfig::from_snr(22, 6, 4.0, 11);
        let full = mi_montecarlo(&code, cfg, 300, total).unwrap();
        let small = mi_montecarlo(&code, cfg, 300, 2).unwrap();
        assert!(small.mi >= full.mi - 2.0 * full.std_err);
        assert!(full.mi <= capacity(4.0) + 3.0 * full.std_err);
    }

    #[test]
    fn bmd_noiseless_limit() {
        let src = CodeSource::new(code2(), Some(CodeIndexMap::from_seed(BigUint::from(110_880u32), 1).unwrap())).unwrap();
        let cfg = ChannelConfig { sigma: 0.02, seed: 3 };
        let (est, _) = bmd_montecarlo(&src, &[Demapper::SymbolBySymbol, Demapper::OrbitFrozen], cfg, 40).unwrap();
        for e in est {
            assert!(e.cond_sum < 1e-6);
            assert!((e.rate - 28.0).abs() < 1e-6);
        }
    }

    #[test]
    fn pas_layout_and_noiseless_frames() {
        let code = code2();
        let map = CodeIndexMap::from_seed(code.size().clone(), 9).unwrap();
        let pc = ira_code(486, 162, 3, 7).unwrap();
        let sys = PasSystem::new(code.clone(), map.clone(), pc).unwrap();
        let lay = sys.layout();
        assert_eq!(lay.codewords_per_frame, 18);
        assert_eq!(lay.amp_bits, 432);
        assert_eq!(lay.systematic_sign_bits, 54);
        assert!((sys.rate() - (18.0 * 16.0 + 54.0) / 216.0).abs() < 1e-12);
        let cfg = ChannelConfig { sigma: 0.05, seed: 1 };
        let res = sys.run(&[Demapper::SymbolBySymbol, Demapper::OrbitFrozen], cfg, 20).unwrap();
        assert!(res.iter().all(|r| r.block_errors == 0));
        let half = ira_code(324, 324, 3, 7).unwrap();
        assert!(matches!(PasSystem::new(code, map, half), Err(Error::FrameLayout(_))));
    }
}
