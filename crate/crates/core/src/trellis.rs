//! Energy trellis of a complete shell code and BCJR demapping on it.
//!
//! States at depth `j` are the squared-norm prefixes `Σ_{i<j} a_i²` that can
//! still be completed to the target energy. Each path from the root to the
//! terminal state is one unsigned codeword.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::constellation::Pam;
use crate::demap::{llrs_from_scores, LlrVector, SoftWord};
use crate::numeric::{logaddexp, logcosh};
use crate::shellcode::ShellCode;
use crate::{Error, Result};

/// One trellis branch between depths `j` and `j + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub rank: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct EnergyTrellis {
    n: usize,
    energy: u64,
    pam: Pam,
    states: Vec<Vec<u64>>,
    edges: Vec<Vec<Edge>>,
}

/// Builds the trimmed trellis of the complete `(n, energy, p)` shell.
pub fn build_trellis(n: usize, energy: u64, pam: &Pam) -> Result<EnergyTrellis> {
    let sq: Vec<u64> = pam.amplitudes().iter().map(|&a| a as u64 * a as u64).collect();
    let mut forward = vec![vec![0u64]];
    for j in 0..n {
        let mut next: Vec<u64> = forward[j]
            .iter()
            .flat_map(|&e| sq.iter().map(move |&s| e + s))
            .filter(|&e| e <= energy)
            .collect();
        next.sort_unstable();
        next.dedup();
        forward.push(next);
    }
    if n == 0 || forward[n].binary_search(&energy).is_err() {
        return Err(Error::EmptyCode {
            n,
            energy,
            size: pam.size(),
        });
    }
    let mut states = vec![Vec::new(); n + 1];
    states[n] = vec![energy];
    for j in (0..n).rev() {
        let later = &states[j + 1];
        states[j] = forward[j]
            .iter()
            .copied()
            .filter(|&e| sq.iter().any(|&s| later.binary_search(&(e + s)).is_ok()))
            .collect();
    }
    let edges = (0..n)
        .map(|j| {
            let mut out = Vec::new();
            for (from, &e) in states[j].iter().enumerate() {
                for (rank, &s) in sq.iter().enumerate() {
                    if let Ok(to) = states[j + 1].binary_search(&(e + s)) {
                        out.push(Edge { from, rank, to });
                    }
                }
            }
            out
        })
        .collect();
    Ok(EnergyTrellis {
        n,
        energy,
        pam: pam.clone(),
        states,
        edges,
    })
}

/// Log-domain forward and backward metrics of one BCJR pass.
#[derive(Debug, Clone)]
pub struct BcjrWorkspace {
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
    /// Log posterior of each PAM rank at each position, row-major `n × p`.
    pub log_posteriors: Vec<f64>,
}

/// Outcome of hard decoding a partial shell code on the complete trellis.
#[derive(Debug, Clone, PartialEq)]
pub enum Decision {
    /// The best path is a codeword of the partial code.
    Accepted { codeword: Vec<i64>, class: usize },
    /// The best path lies in a class the partial code does not use.
    Rejected { codeword: Vec<i64> },
}

impl EnergyTrellis {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energy(&self) -> u64 {
        self.energy
    }

    pub fn pam(&self) -> &Pam {
        &self.pam
    }

    /// Accumulated energies at depth `j`, ascending.
    pub fn states(&self, j: usize) -> &[u64] {
        &self.states[j]
    }

    pub fn edges(&self, j: usize) -> &[Edge] {
        &self.edges[j]
    }

    pub fn state_counts(&self) -> Vec<usize> {
        self.states.iter().map(Vec::len).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }

    /// Number of root-to-terminal paths, i.e. unsigned codewords.
    pub fn path_count(&self) -> BigUint {
        let mut count = vec![BigUint::one()];
        for j in 0..self.n {
            let mut next = vec![BigUint::zero(); self.states[j + 1].len()];
            for e in &self.edges[j] {
                next[e.to] += &count[e.from];
            }
            count = next;
        }
        count.pop().expect("terminal state")
    }

    fn branch_metrics(&self, sw: &SoftWord) -> Result<Vec<f64>> {
        if sw.n() != self.n {
            return Err(Error::InvalidParameter(format!(
                "received word has length {} but the trellis has depth {}",
                sw.n(),
                self.n
            )));
        }
        let s2 = sw.sigma() * sw.sigma();
        Ok(sw
            .y()
            .iter()
            .flat_map(|&y| {
                self.pam.amplitudes().iter().map(move |&a| {
                    let a = a as f64;
                    logcosh(y * a / s2) - a * a / (2.0 * s2)
                })
            })
            .collect())
    }

    /// Forward-backward pass with a uniform prior over paths.
    pub fn bcjr(&self, sw: &SoftWord) -> Result<BcjrWorkspace> {
        let gamma = self.branch_metrics(sw)?;
        let p = self.pam.p();
        let n = self.n;
        let mut alpha: Vec<Vec<f64>> = self.states.iter().map(|s| vec![f64::NEG_INFINITY; s.len()]).collect();
        let mut beta = alpha.clone();
        alpha[0][0] = 0.0;
        for j in 0..n {
            let (done, rest) = alpha.split_at_mut(j + 1);
            for e in &self.edges[j] {
                let v = done[j][e.from] + gamma[j * p + e.rank];
                rest[0][e.to] = logaddexp(rest[0][e.to], v);
            }
        }
        beta[n][0] = 0.0;
        for j in (0..n).rev() {
            let (head, tail) = beta.split_at_mut(j + 1);
            for e in &self.edges[j] {
                let v = tail[0][e.to] + gamma[j * p + e.rank];
                head[j][e.from] = logaddexp(head[j][e.from], v);
            }
        }
        let mut log_posteriors = vec![f64::NEG_INFINITY; n * p];
        for j in 0..n {
            let row = &mut log_posteriors[j * p..(j + 1) * p];
            for e in &self.edges[j] {
                let v = alpha[j][e.from] + gamma[j * p + e.rank] + beta[j + 1][e.to];
                row[e.rank] = logaddexp(row[e.rank], v);
            }
            let total = row.iter().fold(f64::NEG_INFINITY, |acc, &v| logaddexp(acc, v));
            row.iter_mut().for_each(|v| *v -= total);
        }
        Ok(BcjrWorkspace {
            alpha,
            beta,
            log_posteriors,
        })
    }

    /// Posterior `P(|x_j| = a_r | y)` for every position and PAM rank.
    pub fn bcjr_posteriors(&self, sw: &SoftWord) -> Result<Vec<Vec<f64>>> {
        let p = self.pam.p();
        let ws = self.bcjr(sw)?;
        Ok(ws.log_posteriors.chunks(p).map(|row| row.iter().map(|v| v.exp()).collect()).collect())
    }

    /// Bit LLRs from the amplitude posteriors; sign bits use the
    /// per-amplitude sign posterior.
    pub fn bcjr_llrs(&self, sw: &SoftWord) -> Result<LlrVector> {
        let ws = self.bcjr(sw)?;
        Ok(llrs_from_scores(&ws.log_posteriors, sw, &self.pam))
    }

    /// Most likely unsigned path (Viterbi on the BCJR branch metrics), with
    /// signs taken from `y`.
    pub fn viterbi(&self, sw: &SoftWord) -> Result<Vec<i64>> {
        let gamma = self.branch_metrics(sw)?;
        let p = self.pam.p();
        let n = self.n;
        let mut score: Vec<Vec<f64>> = self.states.iter().map(|s| vec![f64::NEG_INFINITY; s.len()]).collect();
        let mut back: Vec<Vec<usize>> = self.states.iter().map(|s| vec![usize::MAX; s.len()]).collect();
        score[0][0] = 0.0;
        for j in 0..n {
            for (k, e) in self.edges[j].iter().enumerate() {
                let v = score[j][e.from] + gamma[j * p + e.rank];
                if v > score[j + 1][e.to] {
                    score[j + 1][e.to] = v;
                    back[j + 1][e.to] = k;
                }
            }
        }
        let mut out = vec![0i64; n];
        let mut state = 0;
        for j in (0..n).rev() {
            let e = self.edges[j][back[j + 1][state]];
            let a = self.pam.amplitudes()[e.rank] as i64;
            out[j] = if sw.y()[j] < 0.0 { -a } else { a };
            state = e.from;
        }
        Ok(out)
    }

    /// Hard decision for a partial shell code: decode on the complete
    /// trellis and reject paths outside the retained classes.
    pub fn hard_decode_with_membership(&self, sw: &SoftWord, shell: &ShellCode) -> Result<Decision> {
        if shell.n() != self.n || shell.energy() != self.energy || shell.pam() != &self.pam {
            return Err(Error::InvalidParameter("shell and trellis parameters differ".into()));
        }
        let codeword = self.viterbi(sw)?;
        let amps: Vec<u32> = codeword.iter().map(|s| s.unsigned_abs() as u32).collect();
        Ok(match shell.class_of(&amps) {
            Some(class) => Decision::Accepted { codeword, class },
            None => Decision::Rejected { codeword },
        })
    }
}
