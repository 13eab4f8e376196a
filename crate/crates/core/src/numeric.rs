//! Small log-domain helpers shared by the demappers, the trellis and the
//! simulation harness.

use std::f64::consts::LN_2;

/// `ln cosh(t)` without overflow: `|t| - ln 2 + ln(1 + e^{-2|t|})`.
#[inline]
pub fn logcosh(t: f64) -> f64 {
    let a = t.abs();
    a - LN_2 + (-2.0 * a).exp().ln_1p()
}

/// `ln(e^a + e^b)`, treating `-inf` as an empty term.
#[inline]
pub fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`; `-inf` for an empty slice.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Streaming log-sum-exp accumulator.
#[derive(Debug, Clone, Copy)]
pub struct LogAcc(pub f64);

impl Default for LogAcc {
    fn default() -> Self {
        LogAcc(f64::NEG_INFINITY)
    }
}

impl LogAcc {
    #[inline]
    pub fn add(&mut self, x: f64) {
        self.0 = logaddexp(self.0, x);
    }
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Binary cross-entropy `log2(1 + e^{-(1-2b) L})` of a bit against its LLR
/// (natural-log LLR, positive favours 0).
#[inline]
pub fn bit_cross_entropy(bit: bool, llr: f64) -> f64 {
    let s = if bit { -llr } else { llr };
    // log2(1 + e^{-s}) computed stably
    let v = if s > 0.0 {
        (-s).exp().ln_1p()
    } else {
        -s + s.exp().ln_1p()
    };
    v / LN_2
}

/// `log2` of a big unsigned integer, accurate to f64 precision.
pub fn log2_big(x: &num_bigint::BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        // exact conversion through f64 is fine below the exponent limit
        use num_traits::ToPrimitive;
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top: num_bigint::BigUint = x >> shift;
    use num_traits::ToPrimitive;
    top.to_f64().unwrap().log2() + shift as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logcosh_matches_direct_and_is_finite() {
        for &t in &[0.0, 0.3, -1.7, 5.0, 20.0] {
            assert!((logcosh(t) - f64::cosh(t).ln()).abs() < 1e-12);
        }
        assert_eq!(logcosh(0.0), 0.0);
        let big = logcosh(1000.0);
        assert!((big - (1000.0 - LN_2)).abs() < 1e-9);
    }

    #[test]
    fn logsumexp_basic() {
        let v = logsumexp(&[0.0, 0.0]);
        assert!((v - LN_2).abs() < 1e-15);
        assert_eq!(logsumexp(&[]), f64::NEG_INFINITY);
        assert!((logaddexp(f64::NEG_INFINITY, 1.5) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn cross_entropy_limits() {
        assert!((bit_cross_entropy(false, 0.0) - 1.0).abs() < 1e-15);
        assert!(bit_cross_entropy(false, 50.0) < 1e-20);
        assert!((bit_cross_entropy(true, 50.0) - 50.0 / LN_2).abs() < 1e-9);
    }

    #[test]
    fn log2_big_large_values() {
        let x = num_bigint::BigUint::from(1u8) << 2000usize;
        assert!((log2_big(&x) - 2000.0).abs() < 1e-9);
        let y = num_bigint::BigUint::from(110880u32);
        assert!((log2_big(&y) - 110880f64.log2()).abs() < 1e-12);
    }
}
