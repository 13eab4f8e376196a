//! Soft demapping of Variant II permutation and shell codewords.
//!
//! Every demapper here produces, for each position `j` and amplitude rank
//! `r`, a log-score `A[j][r]`: the log of the total (unsigned, orbit)
//! likelihood mass of the hypotheses with `|c_j| = a_r`. Signs are then
//! marginalised in closed form, since within an orbit the sign of position
//! `j` is `+` with probability `e^{y a/σ²} / (2 cosh(y a/σ²))`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::assignment::{AssignmentInstance, PairRule};
use crate::constellation::{Labeling, Pam};
use crate::numeric::{logcosh, logsumexp};
use crate::permcode::{CodeIndexMap, TypeClass};
use crate::shellcode::ShellCode;
use crate::{Error, Result};

/// Saturation value for LLRs whose hypothesis set on one side is empty.
pub const LLR_MAX: f64 = 60.0;

/// Default cap on the number of orbits the exact demapper will visit.
pub const EXHAUSTIVE_BUDGET: u64 = 1 << 22;

/// A received word with its noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftWord {
    y: Vec<f64>,
    sigma: f64,
    energy_y: f64,
}

impl SoftWord {
    pub fn new(y: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if y.is_empty() || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("received word must be non-empty and finite".into()));
        }
        let energy_y = y.iter().map(|v| v * v).sum();
        Ok(SoftWord { y, sigma, energy_y })
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn energy_y(&self) -> f64 {
        self.energy_y
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.y.len() != n {
            return Err(Error::InvalidParameter(format!(
                "received word has length {} but the code has length {n}",
                self.y.len()
            )));
        }
        Ok(())
    }
}

/// Per-bit LLRs in natural-log units, grouped per symbol: sign bit first,
/// then the amplitude label bits, most significant first.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector {
    pub llr: Vec<f64>,
    bits_per_symbol: usize,
}

impl LlrVector {
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn n(&self) -> usize {
        self.llr.len() / self.bits_per_symbol
    }

    pub fn sign(&self, j: usize) -> f64 {
        self.llr[j * self.bits_per_symbol]
    }

    /// LLR of amplitude bit `b` (0 = most significant) of symbol `j`.
    pub fn amp(&self, j: usize, b: usize) -> f64 {
        self.llr[j * self.bits_per_symbol + 1 + b]
    }

    pub fn symbol(&self, j: usize) -> &[f64] {
        &self.llr[j * self.bits_per_symbol..(j + 1) * self.bits_per_symbol]
    }
}

fn saturate(x: f64) -> f64 {
    if x.is_infinite() {
        x.signum() * LLR_MAX
    } else {
        x
    }
}

/// Turns per-(position, rank) log-scores into bit LLRs. `scores` is laid out
/// row-major as `n × p`; `-inf` marks amplitudes that cannot occur.
pub fn llrs_from_scores(scores: &[f64], sw: &SoftWord, pam: &Pam) -> LlrVector {
    let p = pam.p();
    let n = sw.n();
    debug_assert_eq!(scores.len(), n * p);
    let labeling = Labeling::gray(pam);
    let nb = labeling.amp_bits();
    let bps = labeling.bits_per_symbol();
    let s2 = sw.sigma * sw.sigma;
    let mut llr = Vec::with_capacity(n * bps);
    let mut plus = vec![0.0; p];
    let mut minus = vec![0.0; p];
    for j in 0..n {
        let row = &scores[j * p..(j + 1) * p];
        for (r, &a) in pam.amplitudes().iter().enumerate() {
            let t = sw.y[j] * a as f64 / s2;
            let lc = logcosh(t);
            plus[r] = row[r] + t - lc;
            minus[r] = row[r] - t - lc;
        }
        llr.push(saturate(logsumexp(&plus) - logsumexp(&minus)));
        for b in 0..nb {
            let mut zero = f64::NEG_INFINITY;
            let mut one = f64::NEG_INFINITY;
            for (r, &s) in row.iter().enumerate() {
                let acc = if labeling.amp_bit(r, b) { &mut one } else { &mut zero };
                *acc = crate::numeric::logaddexp(*acc, s);
            }
            llr.push(saturate(zero - one));
        }
    }
    LlrVector {
        llr,
        bits_per_symbol: bps,
    }
}

/// `logcosh(|y_j| a_r / σ²)` for every position and PAM rank, row-major.
pub fn logcosh_table(sw: &SoftWord, pam: &Pam) -> Vec<f64> {
    let s2 = sw.sigma * sw.sigma;
    sw.y
        .iter()
        .flat_map(|&y| pam.amplitudes().iter().map(move |&a| logcosh(y * a as f64 / s2)))
        .collect()
}

/// Log of the orbit likelihood: the Gaussian likelihood of `y` averaged over
/// all sign patterns of the unsigned codeword `x`.
pub fn orbit_loglik(x: &[u32], sw: &SoftWord) -> Result<f64> {
    sw.check_len(x.len())?;
    if x.contains(&0) {
        return Err(Error::InvalidParameter("orbit representatives must be positive".into()));
    }
    let s2 = sw.sigma * sw.sigma;
    let n = x.len() as f64;
    let energy: f64 = x.iter().map(|&a| (a as f64) * (a as f64)).sum();
    let corr: f64 = x
        .iter()
        .zip(&sw.y)
        .map(|(&a, &y)| logcosh(y * a as f64 / s2))
        .sum();
    Ok(-(sw.energy_y + energy) / (2.0 * s2) - n * ((2.0 * std::f64::consts::PI).sqrt() * sw.sigma).ln() + corr)
}

/// All surviving unsigned codewords of a code, stored as PAM ranks, for
/// exhaustive demapping.
#[derive(Debug, Clone)]
pub struct ExhaustiveCodebook {
    n: usize,
    pam: Pam,
    ranks: Vec<u8>,
}

impl ExhaustiveCodebook {
    /// Enumerates the code, or the data-carrying part of it when `map` is
    /// given. Refuses if more than `budget` orbits would be visited.
    pub fn new(code: &ShellCode, map: Option<&CodeIndexMap>, budget: u64) -> Result<Self> {
        let pam = code.pam().clone();
        if pam.p() > 256 {
            return Err(Error::InvalidParameter("exhaustive demapping supports p ≤ 256".into()));
        }
        let count = match map {
            Some(m) => {
                if m.modulus() != code.size() {
                    return Err(Error::InvalidParameter(format!(
                        "index map modulus {} does not match code size {}",
                        m.modulus(),
                        code.size()
                    )));
                }
                m.span()
            }
            None => code.size().clone(),
        };
        let orbits = count.to_u64().filter(|&c| c <= budget).ok_or_else(|| Error::BudgetExceeded {
            needed: count.to_string(),
            budget,
        })?;
        let n = code.n();
        let mut ranks = Vec::with_capacity(orbits as usize * n);
        let mut i = BigUint::zero();
        for _ in 0..orbits {
            let q = match map {
                Some(m) => m.spread(&i)?,
                None => i.clone(),
            };
            for a in code.encode_amplitudes(&q)? {
                ranks.push(pam.rank_of(a).expect("code amplitudes are in the PAM") as u8);
            }
            i += 1u32;
        }
        Ok(ExhaustiveCodebook { n, pam, ranks })
    }

    pub fn len(&self) -> usize {
        self.ranks.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pam(&self) -> &Pam {
        &self.pam
    }

    /// Unsigned codeword `i` as amplitudes.
    pub fn codeword(&self, i: usize) -> Vec<u32> {
        self.ranks[i * self.n..(i + 1) * self.n]
            .iter()
            .map(|&r| self.pam.amplitudes()[r as usize])
            .collect()
    }

    /// Exact bit LLRs: every signed codeword of the codebook is a hypothesis.
    pub fn llr(&self, sw: &SoftWord) -> Result<LlrVector> {
        sw.check_len(self.n)?;
        let p = self.pam.p();
        let n = self.n;
        let table = logcosh_table(sw, &self.pam);
        // a²/(2σ²) is constant on the sphere, so orbit scores are Σ logcosh
        let orbit_scores: Vec<f64> = self
            .ranks
            .chunks_exact(n)
            .map(|w| w.iter().enumerate().map(|(j, &r)| table[j * p + r as usize]).sum())
            .collect();
        let top = orbit_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut mass = vec![0.0; n * p];
        for (w, &s) in self.ranks.chunks_exact(n).zip(&orbit_scores) {
            let e = (s - top).exp();
            for (j, &r) in w.iter().enumerate() {
                mass[j * p + r as usize] += e;
            }
        }
        let scores: Vec<f64> = mass.iter().map(|&m| m.ln() + top).collect();
        Ok(llrs_from_scores(&scores, sw, &self.pam))
    }
}

/// Exact LLRs by exhaustive enumeration; see [`ExhaustiveCodebook`].
pub fn llr_exact(sw: &SoftWord, code: &ShellCode, map: Option<&CodeIndexMap>) -> Result<LlrVector> {
    ExhaustiveCodebook::new(code, map, EXHAUSTIVE_BUDGET)?.llr(sw)
}

/// Per-symbol amplitude priors used by the symbol-by-symbol demapper:
/// the expected count of each PAM rank in a uniformly drawn codeword.
pub fn symbol_priors(code: &ShellCode) -> Vec<f64> {
    code.amplitude_marginal()
        .into_iter()
        .map(|f| f * code.n() as f64)
        .collect()
}

/// Symbol-by-symbol LLRs: each symbol is demapped on its own with the
/// amplitude prior `m_s`, ignoring the code constraint.
pub fn llr_symbol_by_symbol(sw: &SoftWord, code: &ShellCode) -> Result<LlrVector> {
    sw.check_len(code.n())?;
    Ok(llr_symbol_by_symbol_with_priors(sw, code.pam(), &symbol_priors(code)))
}

/// Symbol-by-symbol LLRs with explicit (unnormalised) amplitude priors.
pub fn llr_symbol_by_symbol_with_priors(sw: &SoftWord, pam: &Pam, priors: &[f64]) -> LlrVector {
    let p = pam.p();
    let s2 = sw.sigma * sw.sigma;
    let mut scores = Vec::with_capacity(sw.n() * p);
    for &y in &sw.y {
        for (r, &a) in pam.amplitudes().iter().enumerate() {
            let a = a as f64;
            scores.push(priors[r].ln() - a * a / (2.0 * s2) + logcosh(y * a / s2));
        }
    }
    llrs_from_scores(&scores, sw, pam)
}

/// Orbit-decoding assignment instance for one type class: rows are
/// positions weighted by `|y_j|/σ²`, levels are the class amplitudes.
pub fn orbit_assignment(sw: &SoftWord, tc: &TypeClass) -> Result<AssignmentInstance> {
    sw.check_len(tc.n())?;
    let s2 = sw.sigma * sw.sigma;
    AssignmentInstance::with_levels(
        sw.y.iter().map(|y| y.abs() / s2).collect(),
        tc.mu().iter().map(|&a| a as f64).collect(),
        tc.m().to_vec(),
        PairRule::LogCosh,
    )
}

/// Positions sorted by ascending `|y|` (ties by index).
fn positions_ascending(sw: &SoftWord) -> Vec<usize> {
    let mut order: Vec<usize> = (0..sw.n()).collect();
    order.sort_by(|&a, &b| sw.y[a].abs().total_cmp(&sw.y[b].abs()).then(a.cmp(&b)));
    order
}

/// Best orbit of `tc` with position `j` frozen to amplitude `s`: the
/// remaining amplitudes are sorted-matched to the remaining `|y|`.
pub fn frozen_best_orbit(sw: &SoftWord, tc: &TypeClass, j: usize, s: u32) -> Result<Vec<u32>> {
    sw.check_len(tc.n())?;
    if j >= tc.n() {
        return Err(Error::InvalidParameter(format!("position {j} out of range")));
    }
    if tc.multiplicity_of(s) == 0 {
        return Err(Error::InvalidParameter(format!("amplitude {s} is not in the type class")));
    }
    let mut rest = tc.initial_vector();
    let at = rest.iter().position(|&a| a == s).expect("checked above");
    rest.remove(at);
    let mut out = vec![0; tc.n()];
    out[j] = s;
    for (pos, a) in positions_ascending(sw).into_iter().filter(|&pos| pos != j).zip(rest) {
        out[pos] = a;
    }
    Ok(out)
}

/// Orbit decoding with frozen symbols. Returns the LLRs and the number of
/// inner-loop steps, for complexity accounting.
pub fn llr_orbit_frozen_counted(sw: &SoftWord, code: &ShellCode) -> Result<(LlrVector, u64)> {
    sw.check_len(code.n())?;
    let pam = code.pam();
    let p = pam.p();
    let n = code.n();
    let table = logcosh_table(sw, pam);
    let order = positions_ascending(sw);
    let mut scores = vec![f64::NEG_INFINITY; n * p];
    let mut ops = 0u64;
    let mut ranks = Vec::with_capacity(n);
    for tc in code.classes() {
        // class initial vector as ascending PAM ranks
        ranks.clear();
        ranks.extend(tc.initial_vector().iter().map(|&a| pam.rank_of(a).expect("in PAM")));
        for j in 0..n {
            for (level, &a) in tc.mu().iter().enumerate() {
                let r = pam.rank_of(a).expect("in PAM");
                // drop the first copy of rank r from the sorted amplitudes
                let drop_at: usize = tc.m()[..level].iter().sum();
                let mut s = table[j * p + r];
                let mut k = 0;
                for &pos in &order {
                    if pos == j {
                        continue;
                    }
                    if k == drop_at {
                        k += 1;
                    }
                    s += table[pos * p + ranks[k]];
                    k += 1;
                    ops += 1;
                }
                let slot = &mut scores[j * p + r];
                if s > *slot {
                    *slot = s;
                }
            }
        }
    }
    Ok((llrs_from_scores(&scores, sw, pam), ops))
}

/// Orbit decoding with frozen symbols; see [`llr_orbit_frozen_counted`].
pub fn llr_orbit_frozen(sw: &SoftWord, code: &ShellCode) -> Result<LlrVector> {
    llr_orbit_frozen_counted(sw, code).map(|(l, _)| l)
}
