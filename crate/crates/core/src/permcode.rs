//! Permutation codes over PAM amplitudes.
//!
//! A [`TypeClass`] is the multiset of amplitudes of an initial vector. Its
//! Variant I code holds every distinct arrangement of that multiset; the
//! Variant II code additionally allows every sign pattern. Codewords are
//! ranked lexicographically by [`encode_v1`] and [`inv_encode_v1`].

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::numeric::log2_big;
use crate::{Error, Result};

/// Distinct amplitudes `mu` (strictly increasing, positive) with their
/// multiplicities `m` (all at least one).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTypeClass", into = "RawTypeClass")]
pub struct TypeClass {
    mu: Vec<u32>,
    m: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawTypeClass {
    mu: Vec<u32>,
    m: Vec<usize>,
}

impl TryFrom<RawTypeClass> for TypeClass {
    type Error = Error;
    fn try_from(raw: RawTypeClass) -> Result<Self> {
        TypeClass::new(raw.mu, raw.m)
    }
}

impl From<TypeClass> for RawTypeClass {
    fn from(tc: TypeClass) -> Self {
        RawTypeClass { mu: tc.mu, m: tc.m }
    }
}

impl TypeClass {
    pub fn new(mu: Vec<u32>, m: Vec<usize>) -> Result<Self> {
        if mu.is_empty() || mu.len() != m.len() {
            return Err(Error::InvalidParameter(format!(
                "type class needs equally long non-empty mu and m (got {} and {})",
                mu.len(),
                m.len()
            )));
        }
        if mu[0] == 0 || mu.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "amplitudes must be positive and strictly increasing: {mu:?}"
            )));
        }
        if m.contains(&0) {
            return Err(Error::InvalidParameter(format!(
                "multiplicities must be at least one: {m:?}"
            )));
        }
        Ok(TypeClass { mu, m })
    }

    /// Builds the type class of an initial vector (any order is accepted).
    pub fn from_initial_vector(x: &[u32]) -> Result<Self> {
        let mut v = x.to_vec();
        v.sort_unstable();
        let mut mu = Vec::new();
        let mut m = Vec::new();
        for a in v {
            if mu.last() == Some(&a) {
                *m.last_mut().unwrap() += 1;
            } else {
                mu.push(a);
                m.push(1);
            }
        }
        TypeClass::new(mu, m)
    }

    /// Builds a type class over PAM amplitudes `1, 3, 5, …` from a full
    /// multiplicity vector that may contain zeros.
    pub fn from_pam_multiplicities(full: &[usize]) -> Result<Self> {
        let (mu, m) = full
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (2 * i as u32 + 1, c))
            .unzip();
        TypeClass::new(mu, m)
    }

    pub fn mu(&self) -> &[u32] {
        &self.mu
    }

    pub fn m(&self) -> &[usize] {
        &self.m
    }

    /// Number of distinct amplitudes `u`.
    pub fn u(&self) -> usize {
        self.mu.len()
    }

    pub fn n(&self) -> usize {
        self.m.iter().sum()
    }

    pub fn energy(&self) -> u64 {
        self.mu
            .iter()
            .zip(&self.m)
            .map(|(&a, &c)| (a as u64) * (a as u64) * c as u64)
            .sum()
    }

    /// The sorted initial vector.
    pub fn initial_vector(&self) -> Vec<u32> {
        self.mu
            .iter()
            .zip(&self.m)
            .flat_map(|(&a, &c)| std::iter::repeat_n(a, c))
            .collect()
    }

    /// Multiplicities over PAM amplitude ranks `0..p` (zeros included).
    pub fn pam_multiplicities(&self, p: usize) -> Vec<usize> {
        let mut full = vec![0; p];
        for (&a, &c) in self.mu.iter().zip(&self.m) {
            let r = (a as usize - 1) / 2;
            if r < p {
                full[r] = c;
            }
        }
        full
    }

    /// Multiplicity of amplitude `a` (zero if absent).
    pub fn multiplicity_of(&self, a: u32) -> usize {
        self.mu
            .binary_search(&a)
            .map(|i| self.m[i])
            .unwrap_or(0)
    }

    /// Variant I size `n! / (m_1! ⋯ m_u!)`.
    pub fn size(&self) -> BigUint {
        multinomial(&self.m)
    }

    /// Maps an index vector to amplitudes, `mu[c]`.
    pub fn codeword(&self, c: &[usize]) -> Vec<u32> {
        c.iter().map(|&i| self.mu[i]).collect()
    }

    /// Maps amplitudes back to indices into `mu`.
    pub fn indices_of(&self, amplitudes: &[u32]) -> Result<Vec<usize>> {
        amplitudes
            .iter()
            .map(|a| {
                self.mu.binary_search(a).map_err(|_| {
                    Error::InvalidCodeword(format!("amplitude {a} is not in {:?}", self.mu))
                })
            })
            .collect()
    }

    /// True if `amplitudes` is an arrangement of this type's multiset.
    pub fn contains(&self, amplitudes: &[u32]) -> bool {
        if amplitudes.len() != self.n() {
            return false;
        }
        let mut counts = vec![0usize; self.u()];
        for a in amplitudes {
            match self.mu.binary_search(a) {
                Ok(i) => counts[i] += 1,
                Err(_) => return false,
            }
        }
        counts == self.m
    }
}

/// `(Σ m)! / Π m_i!` computed exactly.
pub fn multinomial(m: &[usize]) -> BigUint {
    let mut result = BigUint::one();
    let mut total = 0usize;
    for &k in m {
        for j in 1..=k {
            total += 1;
            result *= total;
            result /= j;
        }
    }
    result
}

/// Code size and rates in bits per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeAndRate {
    pub size: BigUint,
    pub rate_v1: f64,
    pub rate_v2: f64,
}

pub fn size_and_rate(tc: &TypeClass) -> SizeAndRate {
    let size = tc.size();
    let rate_v1 = log2_big(&size) / tc.n() as f64;
    SizeAndRate {
        size,
        rate_v1,
        rate_v2: 1.0 + rate_v1,
    }
}

/// `floor(log2 x)` for `x ≥ 1`.
pub fn floor_log2(x: &BigUint) -> u64 {
    x.bits().saturating_sub(1)
}

/// Lexicographic encoder: the `q`-th arrangement of the type, as indices
/// into `mu`.
pub fn encode_v1(q: &BigUint, tc: &TypeClass) -> Result<Vec<usize>> {
    let size = tc.size();
    if q >= &size {
        return Err(Error::IndexOutOfRange {
            index: q.to_string(),
            size: size.to_string(),
        });
    }
    Ok(encode_v1_with_size(q.clone(), tc, size))
}

pub(crate) fn encode_v1_with_size(mut q: BigUint, tc: &TypeClass, mut size: BigUint) -> Vec<usize> {
    let n = tc.n();
    let mut m = tc.m.clone();
    let mut c = Vec::with_capacity(n);
    for index in 0..n {
        let remaining = n - index;
        let mut letter = 0;
        loop {
            let size_temp = &size * m[letter] / remaining;
            if q < size_temp {
                size = size_temp;
                break;
            }
            q -= size_temp;
            letter += 1;
        }
        c.push(letter);
        m[letter] -= 1;
    }
    c
}

/// Inverse of [`encode_v1`]: the lexicographic rank of an index vector.
pub fn inv_encode_v1(c: &[usize], tc: &TypeClass) -> Result<BigUint> {
    let n = tc.n();
    if c.len() != n {
        return Err(Error::InvalidCodeword(format!(
            "length {} does not match blocklength {n}",
            c.len()
        )));
    }
    let mut counts = vec![0usize; tc.u()];
    for &l in c {
        if l >= tc.u() {
            return Err(Error::InvalidCodeword(format!("letter index {l} out of range")));
        }
        counts[l] += 1;
    }
    if counts != tc.m {
        return Err(Error::InvalidCodeword(format!(
            "letter counts {counts:?} differ from the type {:?}",
            tc.m
        )));
    }
    Ok(inv_encode_v1_unchecked(c, tc, tc.size()))
}

pub(crate) fn inv_encode_v1_unchecked(c: &[usize], tc: &TypeClass, mut size: BigUint) -> BigUint {
    let n = tc.n();
    let mut m = tc.m.clone();
    let mut q = BigUint::zero();
    for (index, &letter) in c.iter().enumerate() {
        let remaining = n - index;
        for &mk in &m[..letter] {
            q += &size * mk / remaining;
        }
        size = &size * m[letter] / remaining;
        m[letter] -= 1;
    }
    q
}

/// Number of input bits of the Variant II encoder, `n + floor(log2 |C_I|)`.
pub fn v2_input_bits(tc: &TypeClass) -> usize {
    tc.n() + floor_log2(&tc.size()) as usize
}

/// Variant II encoder. The first `n` bits are signs (1 negates), the
/// remaining bits are the Variant I index, most significant bit first.
pub fn encode_v2(bits: &[bool], tc: &TypeClass) -> Result<Vec<i64>> {
    let k = v2_input_bits(tc);
    if bits.len() != k {
        return Err(Error::InvalidParameter(format!(
            "Variant II encoder expects {k} bits, got {}",
            bits.len()
        )));
    }
    let n = tc.n();
    let q = bits_to_biguint(&bits[n..]);
    let c = encode_v1(&q, tc)?;
    Ok(c.iter()
        .zip(&bits[..n])
        .map(|(&l, &s)| {
            let a = tc.mu[l] as i64;
            if s {
                -a
            } else {
                a
            }
        })
        .collect())
}

/// Inverse of [`encode_v2`].
pub fn inv_encode_v2(codeword: &[i64], tc: &TypeClass) -> Result<Vec<bool>> {
    let n = tc.n();
    let amps: Vec<u32> = codeword
        .iter()
        .map(|&s| u32::try_from(s.unsigned_abs()).unwrap_or(u32::MAX))
        .collect();
    let c = tc.indices_of(&amps)?;
    let q = inv_encode_v1(&c, tc)?;
    let ka = floor_log2(&tc.size()) as usize;
    if q.bits() as usize > ka {
        return Err(Error::InvalidCodeword(format!(
            "index {q} is outside the expurgated range [0, 2^{ka})"
        )));
    }
    let mut bits: Vec<bool> = codeword.iter().map(|&s| s < 0).collect();
    bits.extend(biguint_to_bits(&q, ka));
    debug_assert_eq!(bits.len(), n + ka);
    Ok(bits)
}

pub fn bits_to_biguint(bits: &[bool]) -> BigUint {
    let mut q = BigUint::zero();
    for &b in bits {
        q <<= 1usize;
        if b {
            q += 1u32;
        }
    }
    q
}

/// `width` bits of `x`, most significant first.
pub fn biguint_to_bits(x: &BigUint, width: usize) -> Vec<bool> {
    (0..width).rev().map(|i| x.bit(i as u64)).collect()
}

/// Uniform integer in `[0, bound)`.
pub fn random_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "empty range");
    if let Some(b) = bound.to_u64() {
        return BigUint::from(rng.random_range(0..b));
    }
    let bits = bound.bits();
    let nbytes = bits.div_ceil(8) as usize;
    let excess = (nbytes * 8) as u64 - bits;
    let mut buf = vec![0u8; nbytes];
    loop {
        rng.fill(&mut buf[..]);
        // big-endian: clear the unused high bits of the first byte
        buf[0] &= 0xffu8 >> excess;
        let x = BigUint::from_bytes_be(&buf);
        if &x < bound {
            return x;
        }
    }
}

/// Affine index spreading `q = (e·i + d) mod M` used with expurgated codes.
///
/// Only the first `2^{k_a}` indices carry data, `k_a = floor(log2 M)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeIndexMap {
    k_a: u64,
    modulus: BigUint,
    e: BigUint,
    e_inv: BigUint,
    d: BigUint,
}

impl CodeIndexMap {
    /// Spreading with explicit parameters.
    pub fn new(modulus: BigUint, e: BigUint, d: BigUint) -> Result<Self> {
        if modulus.is_zero() {
            return Err(Error::InvalidParameter("modulus must be positive".into()));
        }
        let k_a = floor_log2(&modulus);
        let span = BigUint::one() << k_a;
        if d >= span {
            return Err(Error::InvalidParameter(format!(
                "dither {d} must lie in [0, 2^{k_a})"
            )));
        }
        let e = e % &modulus;
        if !e.gcd(&modulus).is_one() {
            return Err(Error::InvalidParameter(format!(
                "multiplier {e} is not coprime with {modulus}"
            )));
        }
        let e_inv = if modulus.is_one() {
            BigUint::zero()
        } else {
            e.modinv(&modulus).expect("coprime multiplier has an inverse")
        };
        Ok(CodeIndexMap {
            k_a,
            modulus,
            e,
            e_inv,
            d,
        })
    }

    /// `e = 1, d = 0`: plain expurgation to the first `2^{k_a}` codewords.
    pub fn identity(modulus: BigUint) -> Result<Self> {
        Self::new(modulus, BigUint::one(), BigUint::zero())
    }

    /// Draws `e` uniformly among odd integers in `[1, M)` coprime with `M`
    /// and `d` uniformly in `[0, 2^{k_a})` from a ChaCha stream seeded with
    /// `seed`, so both ends of a link derive the same map.
    pub fn from_seed(modulus: BigUint, seed: u64) -> Result<Self> {
        if modulus.is_zero() {
            return Err(Error::InvalidParameter("modulus must be positive".into()));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let odd_count: BigUint = &modulus >> 1usize;
        let e = if odd_count.is_zero() {
            BigUint::one()
        } else {
            loop {
                let j = random_below(&mut rng, &odd_count);
                let e = (j << 1usize) + 1u32;
                if e.gcd(&modulus).is_one() {
                    break e;
                }
            }
        };
        let span = BigUint::one() << floor_log2(&modulus);
        let d = random_below(&mut rng, &span);
        Self::new(modulus, e, d)
    }

    pub fn k_a(&self) -> u64 {
        self.k_a
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn e(&self) -> &BigUint {
        &self.e
    }

    pub fn d(&self) -> &BigUint {
        &self.d
    }

    /// `2^{k_a}`, the number of data-carrying indices.
    pub fn span(&self) -> BigUint {
        BigUint::one() << self.k_a
    }

    pub fn spread(&self, i: &BigUint) -> Result<BigUint> {
        if i.bits() > self.k_a {
            return Err(Error::IndexOutOfRange {
                index: i.to_string(),
                size: format!("2^{}", self.k_a),
            });
        }
        Ok((&self.e * i + &self.d) % &self.modulus)
    }

    /// Inverse of [`CodeIndexMap::spread`]; `None` when `q` is not the image
    /// of a data-carrying index.
    pub fn unspread(&self, q: &BigUint) -> Option<BigUint> {
        if q >= &self.modulus {
            return None;
        }
        let shifted = (q + &self.modulus - (&self.d % &self.modulus)) % &self.modulus;
        let i = (&self.e_inv * shifted) % &self.modulus;
        (i.bits() <= self.k_a).then_some(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn tc(mu: &[u32], m: &[usize]) -> TypeClass {
        TypeClass::new(mu.to_vec(), m.to_vec()).unwrap()
    }

    /// All distinct arrangements of a multiset of indices in lexicographic
    /// order, generated by repeated next-permutation.
    fn lex_arrangements(m: &[usize]) -> Vec<Vec<usize>> {
        let mut cur: Vec<usize> = m
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i, c))
            .collect();
        let mut out = vec![cur.clone()];
        loop {
            let n = cur.len();
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
            out.push(cur.clone());
        }
        out
    }

    #[test]
    fn size_and_rate_examples() {
        let s = size_and_rate(&tc(&[1, 3, 5, 7], &[5, 3, 3, 1]));
        assert_eq!(s.size, BigUint::from(110880u32));
        assert!((s.rate_v1 * 12.0 - 16.7586).abs() < 1e-3);
        let s = size_and_rate(&tc(&[1, 3], &[5, 3]));
        assert_eq!(s.size, BigUint::from(56u32));
        assert_eq!(s.size.clone() << 8usize, BigUint::from(14336u32));
        let s = size_and_rate(&tc(&[1], &[9]));
        assert_eq!(s.size, BigUint::one());
        assert_eq!(s.rate_v1, 0.0);
        assert_eq!(s.rate_v2, 1.0);
    }

    #[test]
    fn type_class_validation() {
        assert!(TypeClass::new(vec![3, 1], vec![1, 1]).is_err());
        assert!(TypeClass::new(vec![1, 3], vec![1, 0]).is_err());
        assert!(TypeClass::new(vec![0], vec![1]).is_err());
        assert!(TypeClass::new(vec![], vec![]).is_err());
        let t = TypeClass::from_initial_vector(&[3, 1, 5, 1]).unwrap();
        assert_eq!(t, tc(&[1, 3, 5], &[2, 1, 1]));
        assert_eq!(t.energy(), 1 + 1 + 9 + 25);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = tc(&[1, 3, 5, 7], &[5, 3, 3, 1]);
        let s = serde_json::to_string(&t).unwrap();
        assert_eq!(s, r#"{"mu":[1,3,5,7],"m":[5,3,3,1]}"#);
        assert_eq!(serde_json::from_str::<TypeClass>(&s).unwrap(), t);
        assert!(serde_json::from_str::<TypeClass>(r#"{"mu":[3,1],"m":[1,1]}"#).is_err());
    }

    #[test]
    fn encode_small_examples() {
        let t = tc(&[1, 3], &[7, 1]);
        let c0 = encode_v1(&BigUint::zero(), &t).unwrap();
        assert_eq!(t.codeword(&c0), vec![1, 1, 1, 1, 1, 1, 1, 3]);
        let c7 = encode_v1(&BigUint::from(7u8), &t).unwrap();
        assert_eq!(t.codeword(&c7), vec![3, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(inv_encode_v1(&c0, &t).unwrap(), BigUint::zero());
        assert_eq!(inv_encode_v1(&c7, &t).unwrap(), BigUint::from(7u8));
        assert!(matches!(
            encode_v1(&BigUint::from(8u8), &t),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn expurgation_boundary_codeword() {
        let t = tc(&[1, 3, 5, 7], &[5, 3, 3, 1]);
        let q = (BigUint::one() << 16usize) - 1u32;
        let c = encode_v1(&q, &t).unwrap();
        assert_eq!(t.codeword(&c), vec![3, 5, 1, 3, 1, 1, 1, 3, 5, 1, 5, 7]);
    }

    #[test]
    fn encoder_matches_lexicographic_enumeration() {
        for m in [vec![7, 1], vec![5, 3], vec![2, 2, 2], vec![3, 1, 2, 1], vec![1, 1, 1, 1]] {
            let mu: Vec<u32> = (0..m.len() as u32).map(|i| 2 * i + 1).collect();
            let t = tc(&mu, &m);
            let all = lex_arrangements(&m);
            assert_eq!(BigUint::from(all.len()), t.size());
            for (q, expect) in all.iter().enumerate() {
                let q = BigUint::from(q);
                assert_eq!(&encode_v1(&q, &t).unwrap(), expect);
                assert_eq!(inv_encode_v1(expect, &t).unwrap(), q);
            }
        }
    }

    #[test]
    fn inverse_rejects_wrong_type() {
        let t = tc(&[1, 3], &[7, 1]);
        assert!(inv_encode_v1(&[0, 0, 0, 0, 0, 0, 1, 1], &t).is_err());
        assert!(inv_encode_v1(&[0, 0, 1], &t).is_err());
        assert!(inv_encode_v1(&[0, 0, 0, 0, 0, 0, 0, 2], &t).is_err());
    }

    #[test]
    fn variant2_examples() {
        let t = tc(&[1, 3], &[7, 1]);
        assert_eq!(v2_input_bits(&t), 11);
        let zeros = vec![false; 11];
        assert_eq!(encode_v2(&zeros, &t).unwrap(), vec![1, 1, 1, 1, 1, 1, 1, 3]);
        let mut b = zeros.clone();
        b[0] = true;
        assert_eq!(encode_v2(&b, &t).unwrap(), vec![-1, 1, 1, 1, 1, 1, 1, 3]);
        b[8] = true;
        b[9] = true;
        b[10] = true;
        assert_eq!(encode_v2(&b, &t).unwrap(), vec![-3, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(inv_encode_v2(&[-3, 1, 1, 1, 1, 1, 1, 1], &t).unwrap(), b);
        assert!(encode_v2(&b[..10], &t).is_err());
    }

    #[test]
    fn variant2_codewords_have_constant_energy() {
        let t = tc(&[1, 3, 5, 7], &[5, 3, 3, 1]);
        let k = v2_input_bits(&t);
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..200 {
            let bits: Vec<bool> = (0..k).map(|_| rng.random()).collect();
            let c = encode_v2(&bits, &t).unwrap();
            let e: i64 = c.iter().map(|x| x * x).sum();
            assert_eq!(e as u64, t.energy());
            assert_eq!(inv_encode_v2(&c, &t).unwrap(), bits);
        }
    }

    #[test]
    fn spread_identity_and_roundtrip() {
        let id = CodeIndexMap::identity(BigUint::from(110880u32)).unwrap();
        assert_eq!(id.k_a(), 16);
        for i in [0u32, 1, 500, 65535] {
            let i = BigUint::from(i);
            assert_eq!(id.spread(&i).unwrap(), i);
        }
        // e = 12347 is odd and coprime with 110880 = 2^5·3^2·5·7·11
        let map = CodeIndexMap::new(
            BigUint::from(110880u32),
            BigUint::from(12347u32),
            BigUint::from(777u32),
        )
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let i = BigUint::from(rng.random_range(0u32..65536));
            let q = map.spread(&i).unwrap();
            assert!(q < BigUint::from(110880u32));
            assert_eq!(map.unspread(&q), Some(i));
        }
        assert!(map.spread(&BigUint::from(65536u32)).is_err());
    }

    #[test]
    fn unspread_rejects_exactly_the_unused_indices() {
        let map = CodeIndexMap::from_seed(BigUint::from(56u32), 9).unwrap();
        assert_eq!(map.k_a(), 5);
        let accepted = (0u32..56)
            .filter(|&q| map.unspread(&BigUint::from(q)).is_some())
            .count();
        assert_eq!(accepted, 32);
    }

    #[test]
    fn spread_parameter_validation() {
        let m = BigUint::from(110880u32);
        assert!(CodeIndexMap::new(m.clone(), BigUint::from(12345u32), BigUint::zero()).is_err());
        assert!(CodeIndexMap::new(m.clone(), BigUint::one(), BigUint::from(65536u32)).is_err());
        let seeded = CodeIndexMap::from_seed(m.clone(), 42).unwrap();
        assert!(seeded.e().is_odd());
        assert_eq!(seeded, CodeIndexMap::from_seed(m, 42).unwrap());
    }

    proptest! {
        #[test]
        fn encode_inverse_roundtrip(m in prop::collection::vec(1usize..5, 1..5), seed in any::<u64>()) {
            let mu: Vec<u32> = (0..m.len() as u32).map(|i| 2 * i + 1).collect();
            let t = TypeClass::new(mu, m).unwrap();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let q = random_below(&mut rng, &t.size());
            let c = encode_v1(&q, &t).unwrap();
            prop_assert!(t.contains(&t.codeword(&c)));
            prop_assert_eq!(inv_encode_v1(&c, &t).unwrap(), q);
        }

        #[test]
        fn spread_roundtrip(modulus in 1u64..1_000_000, seed in any::<u64>(), frac in 0.0f64..1.0) {
            let map = CodeIndexMap::from_seed(BigUint::from(modulus), seed).unwrap();
            let span = 1u64 << map.k_a();
            let i = BigUint::from(((span as f64 * frac) as u64).min(span - 1));
            let q = map.spread(&i).unwrap();
            prop_assert_eq!(map.unspread(&q), Some(i));
        }
    }
}
