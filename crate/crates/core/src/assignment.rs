//! Assignment problems with monotone (rearrangement-friendly) weights and a
//! specialised k-best list search.
//!
//! Rows carry weights `w_U(i)`; columns are grouped into *levels*, each with
//! a weight `w_V(l)` and a capacity. A solution assigns every row to a level
//! without exceeding capacities. With unit capacities this is the ordinary
//! balanced assignment problem; with capacities `m_i` it ranks distinct
//! arrangements of a multiset, which is what permutation-code list decoding
//! needs.
//!
//! The pair weight is `g(w_U(i), w_V(l))` where `g` is either the product or
//! `ln cosh` of the product. Both are non-decreasing and supermodular on the
//! domain where they are used, so sorting both sides and pairing them in
//! order is optimal.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::numeric::logcosh;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairRule {
    /// `g(u, v) = u·v`
    Product,
    /// `g(u, v) = ln cosh(u·v)`, monotone for non-negative weights only
    LogCosh,
}

impl PairRule {
    #[inline]
    pub fn eval(self, u: f64, v: f64) -> f64 {
        match self {
            PairRule::Product => u * v,
            PairRule::LogCosh => logcosh(u * v),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssignmentInstance {
    row_weights: Vec<f64>,
    level_weights: Vec<f64>,
    capacities: Vec<usize>,
    rule: PairRule,
    // rows by descending weight (ties: lower index first)
    rows_desc: Vec<usize>,
    // levels by ascending weight (ties: lower index first)
    levels_asc: Vec<usize>,
    table: Vec<f64>,
}

impl AssignmentInstance {
    /// Balanced instance with one column per entry of `col_weights`.
    pub fn new(row_weights: Vec<f64>, col_weights: Vec<f64>, rule: PairRule) -> Result<Self> {
        let caps = vec![1; col_weights.len()];
        Self::with_levels(row_weights, col_weights, caps, rule)
    }

    /// Instance whose columns are levels with the given capacities.
    pub fn with_levels(
        row_weights: Vec<f64>,
        level_weights: Vec<f64>,
        capacities: Vec<usize>,
        rule: PairRule,
    ) -> Result<Self> {
        if level_weights.len() != capacities.len() {
            return Err(Error::InvalidParameter(
                "level weights and capacities differ in length".into(),
            ));
        }
        let n = row_weights.len();
        if capacities.iter().sum::<usize>() != n || n == 0 {
            return Err(Error::InvalidParameter(format!(
                "capacities sum to {} but there are {n} rows",
                capacities.iter().sum::<usize>()
            )));
        }
        if row_weights.iter().chain(&level_weights).any(|w| w.is_nan()) {
            return Err(Error::InvalidParameter("NaN weight".into()));
        }
        let mut rows_desc: Vec<usize> = (0..n).collect();
        rows_desc.sort_by(|&a, &b| row_weights[b].total_cmp(&row_weights[a]).then(a.cmp(&b)));
        let mut levels_asc: Vec<usize> = (0..level_weights.len()).collect();
        levels_asc.sort_by(|&a, &b| level_weights[a].total_cmp(&level_weights[b]).then(a.cmp(&b)));
        let u = level_weights.len();
        let mut table = Vec::with_capacity(n * u);
        for &r in &row_weights {
            for &v in &level_weights {
                table.push(rule.eval(r, v));
            }
        }
        Ok(AssignmentInstance {
            row_weights,
            level_weights,
            capacities,
            rule,
            rows_desc,
            levels_asc,
            table,
        })
    }

    pub fn n(&self) -> usize {
        self.row_weights.len()
    }

    pub fn levels(&self) -> usize {
        self.level_weights.len()
    }

    pub fn row_weights(&self) -> &[f64] {
        &self.row_weights
    }

    pub fn level_weights(&self) -> &[f64] {
        &self.level_weights
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn rule(&self) -> PairRule {
        self.rule
    }

    /// Rows in the ordered enumeration (descending `w_U`).
    pub fn rows_desc(&self) -> &[usize] {
        &self.rows_desc
    }

    #[inline]
    pub fn weight(&self, row: usize, level: usize) -> f64 {
        self.table[row * self.level_weights.len() + level]
    }

    pub fn reward(&self, assignment: &[usize]) -> f64 {
        assignment
            .iter()
            .enumerate()
            .map(|(r, &l)| self.weight(r, l))
            .sum()
    }

    fn check_monotone(&self) -> Result<()> {
        if self.rule == PairRule::LogCosh
            && self
                .row_weights
                .iter()
                .chain(&self.level_weights)
                .any(|&w| w < 0.0)
        {
            return Err(Error::NonMonotoneRule(
                "log-cosh weights need non-negative vertex weights".into(),
            ));
        }
        Ok(())
    }
}

/// A row-to-level assignment and its total reward.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    pub assignment: Vec<usize>,
    pub reward: f64,
}

/// Inclusion and exclusion constraints on (row, level) pairs, plus the
/// cell's optimal solution once solved.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateCell {
    pub include: Vec<(usize, usize)>,
    pub exclude: Vec<(usize, usize)>,
    pub solution: Option<Matching>,
}

impl CandidateCell {
    pub fn with_include(include: Vec<(usize, usize)>) -> Self {
        CandidateCell {
            include,
            ..Default::default()
        }
    }

    /// True if `assignment` satisfies the cell's constraints.
    pub fn admits(&self, assignment: &[usize]) -> bool {
        self.include.iter().all(|&(r, l)| assignment[r] == l)
            && self.exclude.iter().all(|&(r, l)| assignment[r] != l)
    }

    /// Partitions the cell minus its solution `s` by the ordered enumeration
    /// of `s`'s free edges. Child `i` fixes the first `i` free edges and
    /// excludes edge `i + 1`; the parent's exclusions survive only in child 0.
    pub fn children(&self, inst: &AssignmentInstance, s: &[usize]) -> Vec<CandidateCell> {
        let mut fixed = vec![false; inst.n()];
        for &(r, _) in &self.include {
            fixed[r] = true;
        }
        let free: Vec<usize> = inst.rows_desc.iter().copied().filter(|&r| !fixed[r]).collect();
        let mut out = Vec::with_capacity(free.len().saturating_sub(1));
        let mut include = self.include.clone();
        for (i, &row) in free.iter().enumerate().take(free.len().saturating_sub(1)) {
            let mut exclude = if i == 0 { self.exclude.clone() } else { Vec::new() };
            exclude.push((row, s[row]));
            out.push(CandidateCell {
                include: include.clone(),
                exclude,
                solution: None,
            });
            include.push((row, s[row]));
        }
        out
    }
}

/// Optimal assignment by sorting both sides (rearrangement inequality).
pub fn solve_sorted(inst: &AssignmentInstance) -> Result<Matching> {
    inst.check_monotone()?;
    Ok(solve_cell(inst, &CandidateCell::default()).expect("unconstrained instance is feasible"))
}

/// Optimal assignment when every excluded pair lies in the row with the
/// largest `w_U`: that row takes its best admissible level first, the rest
/// is solved by sorting. `Ok(None)` means every level is excluded for that
/// row (an empty cell).
pub fn solve_almost_multiplicative(
    inst: &AssignmentInstance,
    exclude: &[(usize, usize)],
) -> Result<Option<Matching>> {
    inst.check_monotone()?;
    let top = inst.rows_desc[0];
    if let Some(&(r, _)) = exclude.iter().find(|&&(r, _)| r != top) {
        return Err(Error::NonMonotoneRule(format!(
            "exclusion in row {r} but the largest-weight row is {top}"
        )));
    }
    let cell = CandidateCell {
        exclude: exclude.to_vec(),
        ..Default::default()
    };
    Ok(solve_cell(inst, &cell))
}

/// Solves a cell produced by the ordered partition. Returns `None` if the
/// cell is empty.
pub fn solve_cell(inst: &AssignmentInstance, cell: &CandidateCell) -> Option<Matching> {
    let n = inst.n();
    let u = inst.levels();
    let mut assignment = vec![usize::MAX; n];
    let mut remaining = inst.capacities.clone();
    for &(r, l) in &cell.include {
        if assignment[r] != usize::MAX || remaining[l] == 0 {
            return None;
        }
        assignment[r] = l;
        remaining[l] -= 1;
    }
    let lead = inst.rows_desc.iter().copied().find(|&r| assignment[r] == usize::MAX);
    if let Some(lead) = lead {
        debug_assert!(
            cell.exclude.iter().all(|&(r, _)| r == lead || assignment[r] != usize::MAX),
            "exclusions outside the leading free row break the sorted solution"
        );
        let excluded = |l: usize| cell.exclude.iter().any(|&(r, x)| r == lead && x == l);
        // the leading row takes the largest admissible level
        let pick = inst
            .levels_asc
            .iter()
            .rev()
            .copied()
            .find(|&l| remaining[l] > 0 && !excluded(l))?;
        assignment[lead] = pick;
        remaining[pick] -= 1;
        // remaining free rows ascending, paired with remaining slots ascending
        let mut level_iter = inst.levels_asc.iter().copied().peekable();
        for &r in inst.rows_desc.iter().rev() {
            if assignment[r] != usize::MAX {
                continue;
            }
            loop {
                let l = *level_iter.peek().expect("capacities cover all rows");
                if remaining[l] > 0 {
                    remaining[l] -= 1;
                    assignment[r] = l;
                    break;
                }
                level_iter.next();
            }
        }
    }
    debug_assert!(remaining.iter().all(|&c| c == 0) || u == 0);
    let reward = inst.reward(&assignment);
    Some(Matching { assignment, reward })
}

#[derive(Debug, Clone, Copy)]
struct Key {
    reward: f64,
    seq: u64,
}

impl PartialEq for Key {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Key {}
impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Key {
    // best first: higher reward, then earlier insertion
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .reward
            .total_cmp(&self.reward)
            .then(self.seq.cmp(&other.seq))
    }
}

/// Result of a k-best search.
#[derive(Debug, Clone, Default)]
pub struct KBestList {
    /// Solutions with non-increasing rewards.
    pub solutions: Vec<Matching>,
    /// Number of cells expanded (including skipped, disallowed candidates).
    pub expanded: usize,
}

/// Membership test for the allowed set of solutions.
pub type Allowed<'a> = &'a dyn Fn(&[usize]) -> bool;

/// The `l` best assignments, ranked by reward.
pub fn murty_k_best(inst: &AssignmentInstance, l: usize, allowed: Option<Allowed<'_>>) -> Result<KBestList> {
    murty_k_best_in(inst, CandidateCell::default(), l, allowed)
}

/// [`murty_k_best`] restricted to the assignments admitted by `root`.
///
/// The root's exclusions, if any, must lie in its leading free row.
pub fn murty_k_best_in(
    inst: &AssignmentInstance,
    root: CandidateCell,
    l: usize,
    allowed: Option<Allowed<'_>>,
) -> Result<KBestList> {
    if l == 0 {
        return Err(Error::InvalidParameter("list size must be at least 1".into()));
    }
    inst.check_monotone()?;
    let mut out = KBestList::default();
    let mut frontier: BTreeMap<Key, CandidateCell> = BTreeMap::new();
    let mut seq = 0u64;
    let mut root = root;
    if let Some(sol) = solve_cell(inst, &root) {
        let key = Key {
            reward: sol.reward,
            seq,
        };
        seq += 1;
        root.solution = Some(sol);
        frontier.insert(key, root);
    }
    while let Some((_, cell)) = frontier.pop_first() {
        let sol = cell.solution.clone().expect("frontier cells are solved");
        out.expanded += 1;
        let keep = allowed.is_none_or(|f| f(&sol.assignment));
        for mut child in cell.children(inst, &sol.assignment) {
            if let Some(cs) = solve_cell(inst, &child) {
                debug_assert!(cs.reward <= sol.reward + 1e-9 * sol.reward.abs().max(1.0));
                let key = Key {
                    reward: cs.reward,
                    seq,
                };
                seq += 1;
                child.solution = Some(cs);
                frontier.insert(key, child);
            }
        }
        if keep {
            out.solutions.push(sol);
            if out.solutions.len() == l {
                break;
            }
        }
        if allowed.is_none() {
            // only the best l - found cells can still contribute
            let room = l - out.solutions.len();
            while frontier.len() > room {
                frontier.pop_last();
            }
        }
    }
    Ok(out)
}

/// Reference O(n³) Hungarian solver for a dense reward matrix (maximisation).
/// `-inf` entries are forbidden pairs. Returns `None` if no finite perfect
/// matching exists.
pub fn solve_general(weights: &[Vec<f64>]) -> Option<(Vec<usize>, f64)> {
    let n = weights.len();
    if n == 0 {
        return Some((Vec::new(), 0.0));
    }
    let finite_max = weights
        .iter()
        .flatten()
        .filter(|w| w.is_finite())
        .fold(0.0f64, |a, &w| a.max(w.abs()));
    let big = (finite_max + 1.0) * (n as f64 + 1.0) * 4.0;
    let cost = |i: usize, j: usize| -> f64 {
        let w = weights[i][j];
        if w.is_finite() {
            -w
        } else {
            big
        }
    };
    // 1-based potentials formulation
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    if assignment.iter().enumerate().any(|(i, &j)| !weights[i][j].is_finite()) {
        return None;
    }
    let reward = assignment.iter().enumerate().map(|(i, &j)| weights[i][j]).sum();
    Some((assignment, reward))
}
