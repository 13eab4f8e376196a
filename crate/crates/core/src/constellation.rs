//! 2p-PAM constellations and their bit labeling.
//!
//! Symbols are the unnormalised odd integers `±1, ±3, …, ±(2p-1)`. Each
//! symbol carries `1 + log2 p` label bits: a sign bit first (0 for positive)
//! followed by the binary-reflected Gray code of the amplitude rank.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pam {
    p: usize,
    amplitudes: Vec<u32>,
    amp_bits: usize,
}

impl Pam {
    /// Builds the 2p-PAM constellation. `p` must be a power of two.
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 || !p.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "number of amplitude levels must be a power of two, got {p}"
            )));
        }
        if p > 1 << 15 {
            return Err(Error::InvalidParameter(format!("p = {p} is too large")));
        }
        let amplitudes = (0..p as u32).map(|i| 2 * i + 1).collect();
        Ok(Pam {
            p,
            amplitudes,
            amp_bits: p.trailing_zeros() as usize,
        })
    }

    /// Amplitude alphabet `1, 3, …, 2p-1` for any `p ≥ 1`. Used for shell
    /// structure (census, trellis) where the PAM size need not be a power of
    /// two; labels then use `ceil(log2 p)` amplitude bits.
    pub fn levels(p: usize) -> Result<Self> {
        if p == 0 || p > 1 << 15 {
            return Err(Error::InvalidParameter(format!("number of amplitude levels out of range: {p}")));
        }
        let amplitudes = (0..p as u32).map(|i| 2 * i + 1).collect();
        Ok(Pam {
            p,
            amplitudes,
            amp_bits: p.next_power_of_two().trailing_zeros() as usize,
        })
    }

    /// Smallest PAM whose amplitude set contains `max_amplitude`.
    pub fn covering(max_amplitude: u32) -> Result<Self> {
        if max_amplitude.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "amplitude {max_amplitude} is not odd"
            )));
        }
        let levels = (max_amplitude as usize).div_ceil(2);
        Pam::new(levels.next_power_of_two())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Constellation size `2p`.
    pub fn size(&self) -> usize {
        2 * self.p
    }

    pub fn amplitudes(&self) -> &[u32] {
        &self.amplitudes
    }

    pub fn max_amplitude(&self) -> u32 {
        2 * self.p as u32 - 1
    }

    /// Number of amplitude label bits, `ceil(log2 p)`.
    pub fn amp_bits(&self) -> usize {
        self.amp_bits
    }

    pub fn bits_per_symbol(&self) -> usize {
        1 + self.amp_bits
    }

    /// Rank of an amplitude (0 for 1, 1 for 3, ...), if it belongs to the PAM.
    pub fn rank_of(&self, amplitude: u32) -> Option<usize> {
        if amplitude % 2 == 1 && amplitude <= self.max_amplitude() {
            Some((amplitude as usize - 1) / 2)
        } else {
            None
        }
    }

    /// All 2p signed symbols in ascending order.
    pub fn symbols(&self) -> Vec<i64> {
        let mut s: Vec<i64> = self.amplitudes.iter().rev().map(|&a| -(a as i64)).collect();
        s.extend(self.amplitudes.iter().map(|&a| a as i64));
        s
    }

    /// Average energy under the uniform distribution, `(4p² - 1) / 3`.
    pub fn average_power(&self) -> f64 {
        let p = self.p as f64;
        (4.0 * p * p - 1.0) / 3.0
    }
}

/// Sign-magnitude labeling: sign bit first, then the BRGC of the amplitude
/// rank, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    amp_labels: Vec<u32>,
    amp_bits: usize,
}

impl Labeling {
    pub fn gray(pam: &Pam) -> Self {
        let amp_labels = (0..pam.p() as u32).map(|r| r ^ (r >> 1)).collect();
        Labeling {
            amp_labels,
            amp_bits: pam.amp_bits(),
        }
    }

    /// Position of the sign bit within a symbol label.
    pub fn sign_bit_position(&self) -> usize {
        0
    }

    pub fn amp_bits(&self) -> usize {
        self.amp_bits
    }

    pub fn bits_per_symbol(&self) -> usize {
        1 + self.amp_bits
    }

    /// Gray label of the amplitude with the given rank, as an integer.
    pub fn amp_label(&self, rank: usize) -> u32 {
        self.amp_labels[rank]
    }

    /// Bit `b` (0 = most significant) of the amplitude label of `rank`.
    #[inline]
    pub fn amp_bit(&self, rank: usize, b: usize) -> bool {
        (self.amp_labels[rank] >> (self.amp_bits - 1 - b)) & 1 == 1
    }

    /// Inverse of [`Labeling::amp_label`].
    pub fn rank_of_label(&self, label: u32) -> Option<usize> {
        self.amp_labels.iter().position(|&l| l == label)
    }

    /// Label of one signed symbol.
    pub fn label_of(&self, pam: &Pam, symbol: i64) -> Result<Vec<bool>> {
        let mag = symbol.unsigned_abs();
        let rank = u32::try_from(mag)
            .ok()
            .and_then(|a| pam.rank_of(a))
            .ok_or(Error::InvalidSymbol {
                symbol,
                size: pam.size(),
            })?;
        let mut bits = Vec::with_capacity(self.bits_per_symbol());
        bits.push(symbol < 0);
        bits.extend((0..self.amp_bits).map(|b| self.amp_bit(rank, b)));
        Ok(bits)
    }
}

/// Renders a bit label as a `0`/`1` string.
pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// `label_of` returning the label as a string, e.g. `"110"` for `-7` in 8-PAM.
pub fn label_of(pam: &Pam, labeling: &Labeling, symbol: i64) -> Result<String> {
    labeling.label_of(pam, symbol).map(|b| bits_to_string(&b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_pam_examples() {
        let p4 = Pam::new(4).unwrap();
        assert_eq!(p4.amplitudes(), &[1, 3, 5, 7]);
        assert_eq!(p4.symbols(), vec![-7, -5, -3, -1, 1, 3, 5, 7]);
        assert_eq!(p4.bits_per_symbol(), 3);
        assert_eq!(Pam::new(1).unwrap().amplitudes(), &[1]);
        assert_eq!(Pam::new(1).unwrap().symbols(), vec![-1, 1]);
        assert_eq!(Pam::new(2).unwrap().amplitudes(), &[1, 3]);
    }

    #[test]
    fn make_pam_rejects_bad_p() {
        assert!(Pam::new(0).is_err());
        assert!(Pam::new(3).is_err());
        assert!(Pam::new(6).is_err());
    }

    #[test]
    fn label_examples() {
        let pam = Pam::new(4).unwrap();
        let lab = Labeling::gray(&pam);
        assert_eq!(label_of(&pam, &lab, 1).unwrap(), "000");
        assert_eq!(label_of(&pam, &lab, -7).unwrap(), "110");
        let bpsk = Pam::new(1).unwrap();
        assert_eq!(label_of(&bpsk, &Labeling::gray(&bpsk), -1).unwrap(), "1");
    }

    #[test]
    fn label_rejects_foreign_symbols() {
        let pam = Pam::new(4).unwrap();
        let lab = Labeling::gray(&pam);
        for s in [0, 2, 9, -9, -4] {
            assert!(matches!(
                lab.label_of(&pam, s),
                Err(Error::InvalidSymbol { .. })
            ));
        }
    }

    #[test]
    fn gray_property_and_injectivity() {
        let mut p = 1;
        while p <= 64 {
            let pam = Pam::new(p).unwrap();
            let lab = Labeling::gray(&pam);
            for r in 1..p {
                let d = (lab.amp_label(r) ^ lab.amp_label(r - 1)).count_ones();
                assert_eq!(d, 1, "p={p} rank {r}");
            }
            let mut seen = std::collections::HashSet::new();
            for s in pam.symbols() {
                assert!(seen.insert(lab.label_of(&pam, s).unwrap()));
            }
            assert_eq!(seen.len(), 2 * p);
            p *= 2;
        }
    }

    #[test]
    fn average_power_matches_uniform_mean() {
        for p in [1, 2, 4, 8] {
            let pam = Pam::new(p).unwrap();
            let mean: f64 = pam.amplitudes().iter().map(|&a| (a * a) as f64).sum::<f64>() / p as f64;
            assert!((pam.average_power() - mean).abs() < 1e-12);
        }
        assert_eq!(Pam::new(4).unwrap().average_power(), 21.0);
    }
}
