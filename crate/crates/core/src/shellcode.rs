//! Complete and partial shell codes: all words of ℳⁿ on one energy sphere,
//! organised as a union of type classes.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::constellation::Pam;
use crate::numeric::log2_big;
use crate::permcode::{encode_v1_with_size, inv_encode_v1, TypeClass};
use crate::{Error, Result};

/// Every type class of length `n` and energy `energy` over the PAM amplitudes,
/// largest first. Ties are broken by descending multiplicity vector.
pub fn enumerate_type_classes(n: usize, energy: u64, pam: &Pam) -> Vec<TypeClass> {
    if n == 0 {
        return Vec::new();
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    let sq: Vec<u64> = pam.amplitudes().iter().map(|&a| (a as u64) * (a as u64)).collect();
    let mut m = vec![0usize; pam.p()];
    collect_classes(pam.p() - 1, n, energy, &sq, &mut m, &mut found);
    sort_classes(&mut found);
    found
        .into_iter()
        .map(|full| TypeClass::from_pam_multiplicities(&full).expect("non-empty class"))
        .collect()
}

fn collect_classes(
    rank: usize,
    count: usize,
    energy: u64,
    sq: &[u64],
    m: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if rank == 0 {
        if energy == count as u64 {
            m[0] = count;
            out.push(m.clone());
            m[0] = 0;
        }
        return;
    }
    // with c symbols left over ranks 0..=rank: c ≤ e ≤ c·a_rank²
    if energy < count as u64 || energy > count as u64 * sq[rank] {
        return;
    }
    for k in 0..=count {
        let used = k as u64 * sq[rank];
        if used > energy {
            break;
        }
        let rest_count = count - k;
        let rest_energy = energy - used;
        // the cheapest completion uses all ones; bail once even that overshoots
        if rest_energy < rest_count as u64 {
            break;
        }
        m[rank] = k;
        collect_classes(rank - 1, rest_count, rest_energy, sq, m, out);
        m[rank] = 0;
    }
}

fn sort_classes(classes: &mut [Vec<usize>]) {
    let mut keyed: Vec<(BigUint, Vec<usize>)> = classes
        .iter()
        .map(|m| (crate::permcode::multinomial(m), m.clone()))
        .collect();
    keyed.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| b.1.cmp(&a.1)));
    for (slot, (_, m)) in classes.iter_mut().zip(keyed) {
        *slot = m;
    }
}

/// A union of type classes sharing one energy: the retained classes of a
/// complete shell's census.
#[derive(Debug, Clone)]
pub struct ShellCode {
    n: usize,
    energy: u64,
    pam: Pam,
    census: Vec<TypeClass>,
    census_sizes: Vec<BigUint>,
    retained: Vec<usize>,
    cumulative: Vec<BigUint>,
}

impl ShellCode {
    /// The complete `(n, energy, p)` shell code.
    pub fn complete(n: usize, energy: u64, pam: &Pam) -> Result<Self> {
        let census = Self::census_or_err(n, energy, pam)?;
        let t = census.len();
        Ok(Self::build(n, energy, pam, census, (0..t).collect()))
    }

    /// The maximal `k`-class partial shell code.
    pub fn partial(n: usize, energy: u64, pam: &Pam, k: usize) -> Result<Self> {
        let census = Self::census_or_err(n, energy, pam)?;
        if k == 0 || k > census.len() {
            return Err(Error::InvalidParameter(format!(
                "k = {k} must lie in [1, {}]",
                census.len()
            )));
        }
        Ok(Self::build(n, energy, pam, census, (0..k).collect()))
    }

    /// A single permutation code viewed as a one-class subcode of its shell.
    pub fn single(tc: &TypeClass, pam: &Pam) -> Result<Self> {
        if tc.mu().iter().any(|&a| pam.rank_of(a).is_none()) {
            return Err(Error::InvalidParameter(format!(
                "amplitudes {:?} are not all in {}-PAM",
                tc.mu(),
                pam.size()
            )));
        }
        let census = Self::census_or_err(tc.n(), tc.energy(), pam)?;
        let idx = census
            .iter()
            .position(|c| c == tc)
            .expect("a type class belongs to the census of its own shell");
        Ok(Self::build(tc.n(), tc.energy(), pam, census, vec![idx]))
    }

    fn census_or_err(n: usize, energy: u64, pam: &Pam) -> Result<Vec<TypeClass>> {
        let census = enumerate_type_classes(n, energy, pam);
        if census.is_empty() {
            return Err(Error::EmptyCode {
                n,
                energy,
                size: pam.size(),
            });
        }
        Ok(census)
    }

    fn build(n: usize, energy: u64, pam: &Pam, census: Vec<TypeClass>, retained: Vec<usize>) -> Self {
        let census_sizes: Vec<BigUint> = census.iter().map(TypeClass::size).collect();
        let mut acc = BigUint::zero();
        let cumulative = retained
            .iter()
            .map(|&i| {
                acc += &census_sizes[i];
                acc.clone()
            })
            .collect();
        ShellCode {
            n,
            energy,
            pam: pam.clone(),
            census,
            census_sizes,
            retained,
            cumulative,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energy(&self) -> u64 {
        self.energy
    }

    pub fn pam(&self) -> &Pam {
        &self.pam
    }

    /// Number of retained classes.
    pub fn k(&self) -> usize {
        self.retained.len()
    }

    /// Number of classes in the complete shell, `t(n, E, p)`.
    pub fn t(&self) -> usize {
        self.census.len()
    }

    pub fn is_complete(&self) -> bool {
        self.retained.len() == self.census.len()
    }

    /// Retained class `i` (0-based, in retained order).
    pub fn class(&self, i: usize) -> &TypeClass {
        &self.census[self.retained[i]]
    }

    pub fn class_size(&self, i: usize) -> &BigUint {
        &self.census_sizes[self.retained[i]]
    }

    pub fn classes(&self) -> impl Iterator<Item = &TypeClass> + '_ {
        self.retained.iter().map(move |&i| &self.census[i])
    }

    /// The complete census, largest class first.
    pub fn census(&self) -> &[TypeClass] {
        &self.census
    }

    pub fn census_sizes(&self) -> &[BigUint] {
        &self.census_sizes
    }

    /// Prefix sums of retained class sizes.
    pub fn cumulative(&self) -> &[BigUint] {
        &self.cumulative
    }

    /// Number of unsigned (Variant I) codewords.
    pub fn size(&self) -> &BigUint {
        self.cumulative.last().expect("at least one class")
    }

    /// Index of the retained class containing `amplitudes`, if any.
    pub fn class_of(&self, amplitudes: &[u32]) -> Option<usize> {
        if amplitudes.len() != self.n {
            return None;
        }
        let mut full = vec![0usize; self.pam.p()];
        for &a in amplitudes {
            full[self.pam.rank_of(a)?] += 1;
        }
        self.retained
            .iter()
            .position(|&i| self.census[i].pam_multiplicities(self.pam.p()) == full)
    }

    /// Class-aware lexicographic encoder. Returns the 0-based retained class
    /// index and the index vector into that class's amplitudes.
    pub fn encode(&self, q: &BigUint) -> Result<(usize, Vec<usize>)> {
        if q >= self.size() {
            return Err(Error::IndexOutOfRange {
                index: q.to_string(),
                size: self.size().to_string(),
            });
        }
        let kappa = self.cumulative.partition_point(|cs| cs <= q);
        let offset = if kappa == 0 {
            BigUint::zero()
        } else {
            &self.cumulative[kappa - 1] * 1u32
        };
        let local = q - offset;
        let c = encode_v1_with_size(local, self.class(kappa), self.class_size(kappa).clone());
        Ok((kappa, c))
    }

    /// Encodes straight to amplitudes.
    pub fn encode_amplitudes(&self, q: &BigUint) -> Result<Vec<u32>> {
        let (kappa, c) = self.encode(q)?;
        Ok(self.class(kappa).codeword(&c))
    }

    /// Inverse of [`ShellCode::encode`].
    pub fn decode(&self, kappa: usize, c: &[usize]) -> Result<BigUint> {
        if kappa >= self.k() {
            return Err(Error::InvalidCodeword(format!("class {kappa} is not retained")));
        }
        let local = inv_encode_v1(c, self.class(kappa))?;
        Ok(if kappa == 0 {
            local
        } else {
            local + &self.cumulative[kappa - 1]
        })
    }

    /// Index of an amplitude vector, or an error if it is not a codeword.
    pub fn decode_amplitudes(&self, amplitudes: &[u32]) -> Result<BigUint> {
        let kappa = self
            .class_of(amplitudes)
            .ok_or_else(|| Error::InvalidCodeword(format!("{amplitudes:?} is not in the code")))?;
        let c = self.class(kappa).indices_of(amplitudes)?;
        self.decode(kappa, &c)
    }

    /// Variant II rate in bits per dimension, `(n + log2 |C_I|) / n`.
    pub fn rate(&self) -> f64 {
        (self.n as f64 + log2_big(self.size())) / self.n as f64
    }

    /// Rate of the maximal `k`-class partial code relative to the complete
    /// code, both measured on Variant II sizes.
    pub fn partial_rate_fraction(&self, k: usize) -> Result<f64> {
        if k == 0 || k > self.t() {
            return Err(Error::InvalidParameter(format!(
                "k = {k} must lie in [1, {}]",
                self.t()
            )));
        }
        let part: BigUint = self.census_sizes[..k].iter().sum();
        let all: BigUint = self.census_sizes.iter().sum();
        let n = self.n as f64;
        Ok((n + log2_big(&part)) / (n + log2_big(&all)))
    }

    /// Marginal amplitude distribution of a uniformly drawn codeword, over
    /// PAM ranks `0..p`.
    pub fn amplitude_marginal(&self) -> Vec<f64> {
        let p = self.pam.p();
        let total = log2_big(self.size());
        let mut marg = vec![0.0; p];
        for (i, tc) in self.classes().enumerate() {
            // weight = |class| / |code|, evaluated in the log domain
            let w = (log2_big(self.class_size(i)) - total).exp2();
            for (r, &c) in tc.pam_multiplicities(p).iter().enumerate() {
                marg[r] += w * c as f64 / self.n as f64;
            }
        }
        marg
    }

    /// Sorted union of the amplitudes used by the retained classes.
    pub fn amplitude_levels(&self) -> Vec<u32> {
        let mut levels: Vec<u32> = self.classes().flat_map(|c| c.mu().iter().copied()).collect();
        levels.sort_unstable();
        levels.dedup();
        levels
    }
}

/// Real-valued multiplicities `m_i ∝ exp(λ a_i²)` meeting the count and
/// energy constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct BoltzmannFit {
    pub n: usize,
    pub energy: u64,
    pub p: usize,
    pub lambda: f64,
    pub m_real: Vec<f64>,
}

fn boltzmann_weights(lambda: f64, sq: &[f64]) -> Vec<f64> {
    let max = sq.iter().map(|s| lambda * s).fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = sq.iter().map(|s| (lambda * s - max).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Solves for λ by bisection on `[-50, 50]`; the mean energy is increasing
/// in λ.
pub fn boltzmann_fit(n: usize, energy: u64, pam: &Pam) -> Result<BoltzmannFit> {
    let sq: Vec<f64> = pam.amplitudes().iter().map(|&a| (a as f64).powi(2)).collect();
    let min = n as u64;
    let max = n as u64 * (pam.max_amplitude() as u64).pow(2);
    if n == 0 || energy <= min || energy >= max {
        return Err(Error::DegenerateDistribution { energy, min, max });
    }
    let target = energy as f64 / n as f64;
    let mean = |lambda: f64| -> f64 {
        boltzmann_weights(lambda, &sq)
            .iter()
            .zip(&sq)
            .map(|(w, s)| w * s)
            .sum()
    };
    let (mut lo, mut hi) = (-50.0f64, 50.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = mean(mid) - target;
        if r.abs() <= 1e-12 * target {
            lo = mid;
            hi = mid;
            break;
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let m_real = boltzmann_weights(lambda, &sq)
        .into_iter()
        .map(|w| w * n as f64)
        .collect();
    Ok(BoltzmannFit {
        n,
        energy,
        p: pam.p(),
        lambda,
        m_real,
    })
}

/// Searches integer multiplicities within `±radius` of the real-valued fit
/// and returns the `k` largest feasible classes.
pub fn largest_classes_near_boltzmann(fit: &BoltzmannFit, k: usize, radius: usize) -> Vec<TypeClass> {
    let r = radius as f64;
    let ranges: Vec<(usize, usize)> = fit
        .m_real
        .iter()
        .map(|&x| {
            let lo = (x - r - 1e-9).ceil().max(0.0) as usize;
            let hi = (x + r + 1e-9).floor().max(0.0) as usize;
            (lo, hi.min(fit.n))
        })
        .collect();
    let sq: Vec<u64> = (0..fit.p as u64).map(|i| (2 * i + 1).pow(2)).collect();
    let mut found = Vec::new();
    let mut cur = vec![0usize; fit.p];
    #[allow(clippy::too_many_arguments)]
    fn walk(
        i: usize,
        ranges: &[(usize, usize)],
        sq: &[u64],
        cur: &mut Vec<usize>,
        count: usize,
        energy: u64,
        fit: &BoltzmannFit,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == ranges.len() {
            if count == fit.n && energy == fit.energy {
                out.push(cur.clone());
            }
            return;
        }
        for v in ranges[i].0..=ranges[i].1 {
            let c = count + v;
            let e = energy + v as u64 * sq[i];
            if c > fit.n || e > fit.energy {
                break;
            }
            cur[i] = v;
            walk(i + 1, ranges, sq, cur, c, e, fit, out);
        }
        cur[i] = 0;
    }
    walk(0, &ranges, &sq, &mut cur, 0, 0, fit, &mut found);
    sort_classes(&mut found);
    found
        .into_iter()
        .take(k)
        .map(|m| TypeClass::from_pam_multiplicities(&m).expect("non-empty class"))
        .collect()
}

/// `log2` of the Variant I size of a class.
pub fn class_log2_size(tc: &TypeClass) -> f64 {
    log2_big(&tc.size())
}

/// Rows of the census table: full multiplicities, `log2` size and `log2` of
/// the cumulative size.
pub fn census_rows(shell: &ShellCode) -> Vec<(Vec<usize>, f64, f64)> {
    let mut acc = BigUint::zero();
    shell
        .census()
        .iter()
        .zip(shell.census_sizes())
        .map(|(tc, size)| {
            acc += size;
            (
                tc.pam_multiplicities(shell.pam().p()),
                log2_big(size),
                log2_big(&acc),
            )
        })
        .collect()
}

/// Number of words of ℳⁿ with squared norm `energy`, by dynamic programming
/// over positions (independent of the type-class enumeration).
pub fn sphere_point_count(n: usize, energy: u64, pam: &Pam) -> BigUint {
    let e = energy as usize;
    let mut ways = vec![BigUint::zero(); e + 1];
    ways[0] = BigUint::from(1u8);
    for _ in 0..n {
        let mut next = vec![BigUint::zero(); e + 1];
        for (acc, w) in ways.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            for &a in pam.amplitudes() {
                let s = acc + (a as usize) * (a as usize);
                if s <= e {
                    // two signs per amplitude
                    next[s] += w * 2u32;
                }
            }
        }
        ways = next;
    }
    ways[e].clone()
}
