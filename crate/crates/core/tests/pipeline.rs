//! Cross-module checks: encoders against the demappers and estimators that
//! consume them.

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use spherecode::constellation::Pam;
use spherecode::demap::{llr_exact, llr_orbit_frozen, SoftWord};
use spherecode::permcode::CodeIndexMap;
use spherecode::presets;
use spherecode::shellcode::{sphere_point_count, ShellCode};
use spherecode::sim::{bmd_montecarlo, capacity, label_bits, mi_montecarlo, ChannelConfig, CodeSource, Demapper};
use spherecode::trellis::{build_trellis, Decision};

#[test]
fn bmd_does_not_exceed_mi() {
    let code = presets::code("n12code2").unwrap();
    let snr = 9.0;
    let cfg = ChannelConfig::from_snr(code.energy(), 12, snr, 21);
    let mi = mi_montecarlo(&code, cfg, 400, 256).unwrap();
    // full code so the two rates share the same input entropy
    let src = CodeSource::new(code.clone(), None).unwrap();
    let (bmd, _) = bmd_montecarlo(&src, &[Demapper::OrbitFrozen, Demapper::SymbolBySymbol], cfg, 400).unwrap();
    for b in bmd {
        let r = b.rate_per_dim(12);
        assert!(r <= mi.mi + 2.0 * (mi.std_err + b.std_err / 12.0), "{r} vs {}", mi.mi);
        assert!(r <= capacity(snr));
    }
}

#[test]
fn exact_llr_signs_match_the_sent_bits_at_low_noise() {
    let code = presets::code("n12code2").unwrap();
    let map = CodeIndexMap::from_seed(code.size().clone(), 3).unwrap();
    let src = CodeSource::new(code.clone(), Some(map.clone())).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    for _ in 0..20 {
        let (_, x) = src.draw(&mut rng).unwrap();
        let bits = label_bits(code.pam(), &x).unwrap();
        let y: Vec<f64> = x.iter().map(|&s| s as f64).collect();
        let sw = SoftWord::new(y, 0.3).unwrap();
        for llr in [llr_exact(&sw, &code, Some(&map)).unwrap(), llr_orbit_frozen(&sw, &code).unwrap()] {
            for (b, l) in bits.iter().zip(&llr.llr) {
                assert_eq!(*b, *l < 0.0);
            }
        }
    }
}

#[test]
fn trellis_membership_accepts_partial_codewords() {
    let pam = Pam::new(4).unwrap();
    let shell = ShellCode::partial(8, 32, &pam, 1).unwrap();
    let t = build_trellis(8, 32, &pam).unwrap();
    let src = CodeSource::new(shell.clone(), None).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    for _ in 0..20 {
        let (_, x) = src.draw(&mut rng).unwrap();
        let sw = SoftWord::new(x.iter().map(|&s| s as f64).collect(), 0.1).unwrap();
        match t.hard_decode_with_membership(&sw, &shell).unwrap() {
            Decision::Accepted { codeword, class } => {
                assert_eq!(codeword, x);
                assert_eq!(class, 0);
            }
            Decision::Rejected { .. } => panic!("rejected a transmitted codeword"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shell_encoding_round_trips(n in 2usize..9, extra in 0u64..12, q in any::<u64>()) {
        let pam = Pam::new(4).unwrap();
        let energy = n as u64 + 8 * extra;
        if let Ok(shell) = ShellCode::complete(n, energy, &pam) {
            prop_assert_eq!(sphere_point_count(n, energy, &pam), shell.size() << n);
            let q = BigUint::from(q) % shell.size();
            let amps = shell.encode_amplitudes(&q).unwrap();
            prop_assert_eq!(amps.iter().map(|&a| (a * a) as u64).sum::<u64>(), energy);
            prop_assert_eq!(shell.decode_amplitudes(&amps).unwrap(), q);
        }
    }

    #[test]
    fn spreading_is_a_bijection_onto_its_image(seed in any::<u64>(), i in any::<u32>()) {
        let code = presets::code("n12code1").unwrap();
        let map = CodeIndexMap::from_seed(code.size().clone(), seed).unwrap();
        let i = BigUint::from(i) % map.span();
        let q = map.spread(&i).unwrap();
        prop_assert!(&q < code.size());
        prop_assert_eq!(map.unspread(&q), Some(i));
    }
}
