//! Binary LDPC codes: alist I/O, systematic encoding over GF(2) and
//! sum-product belief-propagation decoding.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::{Error, Result};

/// Sparse parity-check matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheck {
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl ParityCheck {
    /// Builds a matrix from 0-based row supports.
    pub fn from_rows(n: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut cols = vec![Vec::new(); n];
        for (i, row) in rows.iter().enumerate() {
            let mut sorted = row.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidParameter(format!("row {i} repeats a column")));
            }
            for &c in row {
                if c >= n {
                    return Err(Error::InvalidParameter(format!("row {i} references column {c} ≥ {n}")));
                }
                cols[c].push(i);
            }
        }
        Ok(ParityCheck { n, rows, cols })
    }

    /// Number of columns (code length).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks.
    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    /// Design rate `(N - M) / N`.
    pub fn rate(&self) -> f64 {
        (self.n - self.m()) as f64 / self.n as f64
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn syndrome_ok(&self, bits: &[bool]) -> bool {
        self.rows
            .iter()
            .all(|row| !row.iter().fold(false, |acc, &c| acc ^ bits[c]))
    }

    /// Renders the matrix in alist format.
    pub fn to_alist(&self) -> String {
        let max_col = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = String::new();
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "{} {}", self.n, self.m());
        let _ = writeln!(s, "{max_col} {max_row}");
        let _ = writeln!(s, "{}", join(&self.cols.iter().map(Vec::len).collect::<Vec<_>>()));
        let _ = writeln!(s, "{}", join(&self.rows.iter().map(Vec::len).collect::<Vec<_>>()));
        for (lists, width) in [(&self.cols, max_col), (&self.rows, max_row)] {
            for list in lists.iter() {
                let mut entries: Vec<usize> = list.iter().map(|&i| i + 1).collect();
                entries.sort_unstable();
                entries.resize(width, 0);
                let _ = writeln!(s, "{}", join(&entries));
            }
        }
        s
    }
}

/// Reads an alist file.
pub fn load_alist(path: impl AsRef<Path>) -> Result<ParityCheck> {
    parse_alist(&std::fs::read_to_string(path)?)
}

/// Parses alist text. Degree headers are checked against the lists, and the
/// column and row lists must describe the same matrix.
pub fn parse_alist(text: &str) -> Result<ParityCheck> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (no, line) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("unexpected end of file while reading {what}"),
        })?;
        let nums = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line: no,
                    msg: format!("{what}: `{t}` is not a non-negative integer"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((no, nums))
    };
    let expect_len = |no: usize, nums: &[usize], len: usize, what: &str| -> Result<()> {
        if nums.len() != len {
            return Err(Error::Parse {
                line: no,
                msg: format!("{what}: expected {len} entries, found {}", nums.len()),
            });
        }
        Ok(())
    };
    let (no, dims) = next_numbers("dimensions")?;
    expect_len(no, &dims, 2, "dimensions")?;
    let (n, m) = (dims[0], dims[1]);
    if n == 0 || m == 0 {
        return Err(Error::Parse {
            line: no,
            msg: "matrix dimensions must be positive".into(),
        });
    }
    let (no, maxes) = next_numbers("maximum degrees")?;
    expect_len(no, &maxes, 2, "maximum degrees")?;
    let (no, col_deg) = next_numbers("column degrees")?;
    expect_len(no, &col_deg, n, "column degrees")?;
    let (no, row_deg) = next_numbers("row degrees")?;
    expect_len(no, &row_deg, m, "row degrees")?;
    let mut read_lists = |count: usize, degs: &[usize], max: usize, bound: usize, what: &str| -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::with_capacity(count);
        for (k, &deg) in degs.iter().enumerate().take(count) {
            let (no, nums) = next_numbers(what)?;
            if deg > max {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("{what} {}: degree {deg} exceeds the declared maximum {max}", k + 1),
                });
            }
            let entries: Vec<usize> = nums.iter().copied().filter(|&v| v != 0).collect();
            if entries.len() != deg || nums[..deg.min(nums.len())].contains(&0) {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("{what} {}: degree header says {deg}, list has {} entries", k + 1, entries.len()),
                });
            }
            let mut seen = entries.clone();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("{what} {}: duplicate entry", k + 1),
                });
            }
            if let Some(&bad) = entries.iter().find(|&&v| v > bound) {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("{what} {}: index {bad} out of range 1..={bound}", k + 1),
                });
            }
            out.push(entries.into_iter().map(|v| v - 1).collect());
        }
        Ok(out)
    };
    let cols = read_lists(n, &col_deg, maxes[0], m, "column")?;
    let rows = read_lists(m, &row_deg, maxes[1], n, "row")?;
    let pc = ParityCheck::from_rows(n, rows).map_err(|e| Error::Parse {
        line: 0,
        msg: e.to_string(),
    })?;
    for (c, list) in cols.iter().enumerate() {
        let mut a = list.clone();
        a.sort_unstable();
        let mut b = pc.cols[c].clone();
        b.sort_unstable();
        if a != b {
            return Err(Error::Parse {
                line: 0,
                msg: format!("column {} list disagrees with the row lists", c + 1),
            });
        }
    }
    Ok(pc)
}

/// Result of belief-propagation decoding.
#[derive(Debug, Clone, PartialEq)]
pub struct BpOutput {
    pub bits: Vec<bool>,
    pub converged: bool,
    pub iterations: usize,
    /// Posterior LLRs after the last iteration.
    pub llr: Vec<f64>,
}

pub const DEFAULT_MAX_ITER: usize = 50;

/// Sum-product decoding with tanh-rule check updates. LLRs are natural-log,
/// positive favouring bit 0. Stops as soon as every posterior is non-zero
/// and the hard decision satisfies every check.
pub fn bp_decode(pc: &ParityCheck, llr_in: &[f64], max_iter: usize) -> Result<BpOutput> {
    if llr_in.len() != pc.n {
        return Err(Error::InvalidParameter(format!(
            "expected {} LLRs, got {}",
            pc.n,
            llr_in.len()
        )));
    }
    // edge e belongs to row r; edges of a row are contiguous
    let mut row_start = Vec::with_capacity(pc.m() + 1);
    let mut edge_col = Vec::with_capacity(pc.edge_count());
    row_start.push(0);
    for row in &pc.rows {
        edge_col.extend_from_slice(row);
        row_start.push(edge_col.len());
    }
    let mut v2c: Vec<f64> = edge_col.iter().map(|&c| llr_in[c]).collect();
    let mut c2v = vec![0.0; edge_col.len()];
    let mut post = llr_in.to_vec();
    let mut bits: Vec<bool> = post.iter().map(|&l| l < 0.0).collect();
    let mut tanhs = Vec::new();
    const LIMIT: f64 = 1.0 - 1e-15;
    for iter in 1..=max_iter {
        for r in 0..pc.m() {
            let span = row_start[r]..row_start[r + 1];
            tanhs.clear();
            tanhs.extend(v2c[span.clone()].iter().map(|&v| (v / 2.0).tanh()));
            // exclusive products via prefix and suffix passes
            let mut prefix = 1.0;
            for (k, e) in span.clone().enumerate() {
                c2v[e] = prefix;
                prefix *= tanhs[k];
            }
            let mut suffix = 1.0;
            for (k, e) in span.clone().enumerate().rev() {
                let t = (c2v[e] * suffix).clamp(-LIMIT, LIMIT);
                c2v[e] = 2.0 * t.atanh();
                suffix *= tanhs[k];
            }
        }
        post.copy_from_slice(llr_in);
        for (e, &c) in edge_col.iter().enumerate() {
            post[c] += c2v[e];
        }
        for (e, &c) in edge_col.iter().enumerate() {
            v2c[e] = post[c] - c2v[e];
        }
        for (b, &l) in bits.iter_mut().zip(&post) {
            *b = l < 0.0;
        }
        // a zero posterior is an undecided bit and blocks convergence
        if post.iter().all(|&l| l != 0.0) && pc.syndrome_ok(&bits) {
            return Ok(BpOutput {
                bits,
                converged: true,
                iterations: iter,
                llr: post,
            });
        }
    }
    Ok(BpOutput {
        bits,
        converged: false,
        iterations: max_iter,
        llr: post,
    })
}

/// Systematic encoder obtained by row-reducing `H` over GF(2). Columns
/// without a pivot carry information; pivot columns carry parity.
#[derive(Debug, Clone)]
pub struct SystematicEncoder {
    n: usize,
    info_positions: Vec<usize>,
    parity_positions: Vec<usize>,
    // for each parity position: the info indices it sums
    parity_taps: Vec<Vec<usize>>,
}

impl SystematicEncoder {
    pub fn new(pc: &ParityCheck) -> Result<Self> {
        let n = pc.n;
        let m = pc.m();
        let words = n.div_ceil(64);
        let mut mat: Vec<Vec<u64>> = pc
            .rows
            .iter()
            .map(|row| {
                let mut w = vec![0u64; words];
                for &c in row {
                    w[c / 64] |= 1 << (c % 64);
                }
                w
            })
            .collect();
        let bit = |row: &[u64], c: usize| row[c / 64] >> (c % 64) & 1 == 1;
        let mut pivots = Vec::with_capacity(m);
        let mut rank = 0;
        // eliminate from the right so parity tends to land on the last columns
        for c in (0..n).rev() {
            if rank == m {
                break;
            }
            let Some(sel) = (rank..m).find(|&r| bit(&mat[r], c)) else {
                continue;
            };
            mat.swap(rank, sel);
            let pivot_row = mat[rank].clone();
            for (r, row) in mat.iter_mut().enumerate() {
                if r != rank && bit(row, c) {
                    for (a, b) in row.iter_mut().zip(&pivot_row) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(c);
            rank += 1;
        }
        if rank < m {
            return Err(Error::RankDeficient { rank, rows: m });
        }
        let mut is_pivot = vec![false; n];
        pivots.iter().for_each(|&c| is_pivot[c] = true);
        let info_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let parity_taps = (0..m)
            .map(|r| {
                info_positions
                    .iter()
                    .enumerate()
                    .filter(|&(_, &c)| bit(&mat[r], c))
                    .map(|(k, _)| k)
                    .collect()
            })
            .collect();
        Ok(SystematicEncoder {
            n,
            info_positions,
            parity_positions: pivots,
            parity_taps,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of information bits `K`.
    pub fn k(&self) -> usize {
        self.info_positions.len()
    }

    pub fn info_positions(&self) -> &[usize] {
        &self.info_positions
    }

    pub fn parity_positions(&self) -> &[usize] {
        &self.parity_positions
    }

    pub fn encode(&self, info: &[bool]) -> Result<Vec<bool>> {
        if info.len() != self.k() {
            return Err(Error::InvalidParameter(format!(
                "expected {} information bits, got {}",
                self.k(),
                info.len()
            )));
        }
        let mut cw = vec![false; self.n];
        for (&pos, &b) in self.info_positions.iter().zip(info) {
            cw[pos] = b;
        }
        for (&pos, taps) in self.parity_positions.iter().zip(&self.parity_taps) {
            cw[pos] = taps.iter().fold(false, |acc, &k| acc ^ info[k]);
        }
        Ok(cw)
    }

    /// Information bits of a codeword.
    pub fn extract(&self, cw: &[bool]) -> Vec<bool> {
        self.info_positions.iter().map(|&p| cw[p]).collect()
    }
}

/// Irregular repeat-accumulate style code: `H = [A | T]` with `A` a random
/// column-weight-`w` block over `k` information columns (no 4-cycles among
/// them) and `T` the `m × m` dual-diagonal accumulator.
pub fn ira_code(k: usize, m: usize, w: usize, seed: u64) -> Result<ParityCheck> {
    if w < 2 || w > m || k == 0 {
        return Err(Error::InvalidParameter(format!("invalid IRA parameters k={k}, m={m}, w={w}")));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let cap = (k * w).div_ceil(m);
    let mut deg = vec![0usize; m];
    let mut used_pairs = std::collections::HashSet::new();
    let mut rows: Vec<Vec<usize>> = vec![Vec::new(); m];
    for c in 0..k {
        let mut placed = false;
        for attempt in 0..10_000 {
            let slack = if attempt < 5_000 { 0 } else { 1 };
            let mut candidates: Vec<usize> = (0..m).filter(|&r| deg[r] < cap + slack).collect();
            if candidates.len() < w {
                candidates = (0..m).collect();
            }
            candidates.shuffle(&mut rng);
            // prefer lightly loaded rows
            candidates.sort_by_key(|&r| deg[r]);
            let pick: Vec<usize> = candidates[..w].to_vec();
            let pairs: Vec<(usize, usize)> = pick
                .iter()
                .enumerate()
                .flat_map(|(i, &a)| pick[i + 1..].iter().map(move |&b| (a.min(b), a.max(b))))
                .collect();
            if pairs.iter().any(|p| used_pairs.contains(p)) && attempt < 9_000 {
                continue;
            }
            used_pairs.extend(pairs);
            for &r in &pick {
                deg[r] += 1;
                rows[r].push(c);
            }
            placed = true;
            break;
        }
        if !placed {
            return Err(Error::InvalidParameter(format!("could not place column {c}")));
        }
    }
    for (r, row) in rows.iter_mut().enumerate() {
        row.push(k + r);
        if r > 0 {
            row.push(k + r - 1);
        }
        row.sort_unstable();
    }
    ParityCheck::from_rows(k + m, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    const SMALL: &str = "6 3\n2 3\n1 2 2 2 1 1\n3 3 3\n1\n1 2\n2 3\n1 3\n2\n3\n1 2 4\n2 3 5\n3 4 6\n";

    fn small() -> ParityCheck {
        parse_alist(SMALL).unwrap()
    }

    #[test]
    fn parse_small_fixture() {
        let pc = small();
        assert_eq!((pc.m(), pc.n()), (3, 6));
        assert_eq!(pc.rows()[0], vec![0, 1, 3]);
        assert_eq!(parse_alist(&pc.to_alist()).unwrap(), pc);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad_degree = SMALL.replace("1 2 2 2 1 1", "1 2 2 2 1 2");
        match parse_alist(&bad_degree) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 10),
            other => panic!("{other:?}"),
        }
        let bad_index = SMALL.replace("3 4 6", "3 4 7");
        assert!(matches!(parse_alist(&bad_index), Err(Error::Parse { line: 13, .. })));
        assert!(matches!(parse_alist("6 3\n1 3\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_alist("6 x\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn encoder_on_small_code() {
        let pc = small();
        let enc = SystematicEncoder::new(&pc).unwrap();
        assert_eq!(enc.k(), 3);
        assert_eq!(enc.encode(&[false; 3]).unwrap(), vec![false; 6]);
        let cw = enc.encode(&[true, false, false]).unwrap();
        assert!(pc.syndrome_ok(&cw));
        assert_eq!(enc.extract(&cw), vec![true, false, false]);
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let info: Vec<bool> = (0..3).map(|_| rng.random_bool(0.5)).collect();
            let cw = enc.encode(&info).unwrap();
            assert!(pc.syndrome_ok(&cw));
            assert_eq!(enc.extract(&cw), info);
        }
    }

    #[test]
    fn rank_deficient_matrix_is_rejected() {
        let pc = ParityCheck::from_rows(4, vec![vec![0, 1], vec![2, 3], vec![0, 1, 2, 3]]).unwrap();
        assert!(matches!(
            SystematicEncoder::new(&pc),
            Err(Error::RankDeficient { rank: 2, rows: 3 })
        ));
    }

    #[test]
    fn bp_basics() {
        let pc = small();
        let out = bp_decode(&pc, &[10.0; 6], 50).unwrap();
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
        let mut llr = [10.0; 6];
        llr[1] = -8.0;
        let out = bp_decode(&pc, &llr, 50).unwrap();
        assert!(out.converged);
        assert_eq!(out.bits, vec![false; 6]);
        let flat = bp_decode(&pc, &[0.0; 6], 50).unwrap();
        assert!(!flat.converged);
        assert_eq!(flat.iterations, 50);
    }

    #[test]
    fn ira_construction() {
        let pc = ira_code(486, 162, 3, 7).unwrap();
        assert_eq!((pc.n(), pc.m()), (648, 162));
        assert!((pc.rate() - 0.75).abs() < 1e-12);
        let enc = SystematicEncoder::new(&pc).unwrap();
        assert_eq!(enc.k(), 486);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..20 {
            let info: Vec<bool> = (0..486).map(|_| rng.random_bool(0.5)).collect();
            let cw = enc.encode(&info).unwrap();
            assert!(pc.syndrome_ok(&cw));
            let llr: Vec<f64> = cw.iter().map(|&b| if b { -6.0 } else { 6.0 }).collect();
            let out = bp_decode(&pc, &llr, 50).unwrap();
            assert!(out.converged);
            assert_eq!(enc.extract(&out.bits), info);
        }
    }
}
