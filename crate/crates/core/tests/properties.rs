//! Property tests for the invariants of each module.

use orbgrand_fbl::bounds::{self, CodebookSize, McConfig, RcuSampler};
use orbgrand_fbl::channel::{BinaryInputChannel, BpskAwgn, ReliabilityModel};
use orbgrand_fbl::codes::{self, bpsk, ep_stream, DecodeOutcome, LinearCode};
use orbgrand_fbl::mc::{self, Moments};
use orbgrand_fbl::metric::{hard_decision, orb_metric, ranks};
use orbgrand_fbl::saddlepoint::{cgf_d1, rate_function, solve_saddlepoint, D_MIN};
use orbgrand_fbl::tail::{exact_cdf_table, TailTable};
use proptest::prelude::*;

fn codeword_and_llrs(max_n: usize) -> impl Strategy<Value = (Vec<i8>, Vec<f64>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { 1i8 } else { -1 }), n),
            prop::collection::vec(-20.0f64..20.0, n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ranks_form_a_permutation(v in prop::collection::vec(0.0f64..10.0, 0..200)) {
        let mut r = ranks(&v);
        r.sort_unstable();
        prop_assert_eq!(r, (1..=v.len() as u32).collect::<Vec<_>>());
    }

    #[test]
    fn metric_in_support((x, l) in codeword_and_llrs(64)) {
        let m = orb_metric(&x, &l).unwrap();
        let n = x.len() as u64;
        prop_assert!(m.s <= n * (n + 1) / 2);
        prop_assert!(m.d() >= 0.0 && m.d() <= 0.5 + 0.5 / n as f64);
    }

    #[test]
    fn metric_invariant_to_positive_llr_scaling((x, l) in codeword_and_llrs(64), c in 1e-3f64..1e3) {
        let scaled: Vec<f64> = l.iter().map(|v| v * c).collect();
        prop_assert_eq!(orb_metric(&x, &l).unwrap().s, orb_metric(&x, &scaled).unwrap().s);
    }

    #[test]
    fn metric_permutation_equivariant((x, l) in codeword_and_llrs(48), seed in any::<u64>()) {
        // Distinct reliabilities keep ranks free of index tie-breaks.
        let l: Vec<f64> = l.iter().enumerate().map(|(i, v)| v + 1e-9 * i as f64 * v.signum()).collect();
        let mut perm: Vec<usize> = (0..x.len()).collect();
        let mut rng = mc::substream(seed, 0);
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let px: Vec<i8> = perm.iter().map(|&i| x[i]).collect();
        let pl: Vec<f64> = perm.iter().map(|&i| l[i]).collect();
        prop_assert_eq!(orb_metric(&x, &l).unwrap().s, orb_metric(&px, &pl).unwrap().s);
    }

    #[test]
    fn hard_decision_word_has_zero_metric(l in prop::collection::vec(-5.0f64..5.0, 1..64)) {
        let hard: Vec<i8> = l.iter().map(|&v| hard_decision(v)).collect();
        prop_assert_eq!(orb_metric(&hard, &l).unwrap().s, 0);
        let anti: Vec<i8> = hard.iter().map(|v| -v).collect();
        let n = l.len() as u64;
        prop_assert_eq!(orb_metric(&anti, &l).unwrap().s, n * (n + 1) / 2);
    }

    #[test]
    fn tail_table_symmetric_and_monotone(n in 1usize..160) {
        let t: TailTable<f64> = exact_cdf_table(n).unwrap();
        let top = t.support_max();
        let mut prev = 0.0;
        for s in 0..=top {
            let v = t.lookup(s).unwrap();
            prop_assert!(v >= prev);
            prev = v;
            if s < top {
                let mirror = t.lookup(top - s - 1).unwrap();
                prop_assert!((v + mirror - 1.0).abs() < 1e-13, "s = {}", s);
            }
        }
        prop_assert!((prev - 1.0).abs() < 1e-13);
        prop_assert!(t.lookup(top + 1).is_err());
    }

    #[test]
    fn saddlepoint_round_trip(d in D_MIN..0.2499f64) {
        let sol = solve_saddlepoint(d).unwrap();
        prop_assert!(sol.theta_d < 0.0);
        prop_assert!((cgf_d1(sol.theta_d) - d).abs() < 1e-11);
        prop_assert!(sol.rate >= 0.0 && sol.rate < std::f64::consts::LN_2);
        prop_assert!(sol.prefactor > 0.0 && sol.kpp > 0.0);
    }

    #[test]
    fn rate_function_decreasing(a in 1e-3f64..0.24, b in 1e-3f64..0.24) {
        prop_assume!((a - b).abs() > 1e-6);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(rate_function(lo).unwrap() > rate_function(hi).unwrap());
    }

    #[test]
    fn moments_merge_matches_single_pass(v in prop::collection::vec(-1e3f64..1e3, 2..300), cut in 0usize..300) {
        let cut = cut.min(v.len());
        let whole: Moments = v.iter().copied().collect();
        let left: Moments = v[..cut].iter().copied().collect();
        let right: Moments = v[cut..].iter().copied().collect();
        let merged = left.merge(&right);
        prop_assert_eq!(merged.count, whole.count);
        prop_assert!((merged.mean - whole.mean).abs() < 1e-9 * (1.0 + whole.mean.abs()));
        prop_assert!((merged.m2 - whole.m2).abs() < 1e-7 * (1.0 + whole.m2.abs()));
    }

    #[test]
    fn codebook_size_from_rate_is_ceiling(rate in 0.01f64..0.69, n in 1usize..40) {
        let m = CodebookSize::from_rate(rate, n).unwrap();
        let want = (n as f64 * rate).exp().ceil();
        prop_assert_eq!(m.exact().unwrap() as f64, want);
    }

    #[test]
    fn q_inverse_is_decreasing(a in 1e-12f64..0.999, b in 1e-12f64..0.999) {
        prop_assume!(a < b * (1.0 - 1e-9));
        prop_assert!(bounds::q_inv(a).unwrap() > bounds::q_inv(b).unwrap());
    }

    #[test]
    fn linear_code_words_have_zero_syndrome(n in 2usize..=128, k_frac in 0.05f64..0.95, msg in any::<u128>(), seed in any::<u64>()) {
        let k = ((n as f64 * k_frac) as usize).clamp(1, n - 1);
        let code = LinearCode::random_systematic(n, k, &mut mc::substream(seed, 0)).unwrap();
        let msg = msg & ((1u128 << k) - 1);
        let w = code.encode(msg);
        prop_assert!(code.is_codeword(w));
        prop_assert_eq!(code.syndrome(w ^ 1), code.syndrome(1));
        // Systematic: the message occupies the first k positions.
        prop_assert_eq!(w & ((1u128 << k) - 1), msg);
    }

    #[test]
    fn orbgrand_on_clean_channel_needs_one_query(n in 8usize..=64, seed in any::<u64>()) {
        let mut rng = mc::substream(seed, 0);
        let code = LinearCode::random_systematic(n, n / 2, &mut rng).unwrap();
        let w = code.encode(rand::Rng::random::<u128>(&mut rng) & ((1u128 << (n / 2)) - 1));
        let llrs: Vec<f64> = bpsk(w, n).iter().map(|&x| 3.0 * f64::from(x)).collect();
        prop_assert_eq!(codes::orbgrand_decode(&code, &llrs, 1).unwrap(), DecodeOutcome::Codeword { word: w, queries: 1 });
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ep_stream_weights_nondecreasing(n in 1usize..=60, q in 1u64..3000) {
        let mut last = (0u64, 0usize);
        let mut count = 0;
        for p in ep_stream(n, q) {
            count += 1;
            let key = (p.weight(), p.flip_set.len());
            prop_assert!(key >= last);
            last = key;
            prop_assert!(p.flip_set.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(p.flip_set.iter().all(|&r| r >= 1 && r as usize <= n));
        }
        let all = if n >= 63 { u64::MAX } else { 1u64 << n };
        prop_assert_eq!(count as u64, q.min(all));
    }

    #[test]
    fn rcu_monotone_in_codebook_size(n in 4usize..64, snr in -3.0f64..4.0, seed in any::<u64>()) {
        let ch = BpskAwgn::new(snr).unwrap();
        for sampler in [
            RcuSampler::orb(&ch, n, McConfig::new(2000, seed)).unwrap(),
            RcuSampler::ml_relaxed(&ch, n, McConfig::new(2000, seed)).unwrap(),
        ] {
            let mut prev = 0.0;
            for ln_m in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0] {
                let m = CodebookSize::from_ln_m(ln_m).unwrap();
                let e = sampler.estimate(m);
                prop_assert!(e.value >= prev && e.value <= 1.0);
                prev = e.value;
            }
        }
    }

    #[test]
    fn na_rate_increases_with_epsilon_and_stays_below_capacity(snr in -4.0f64..6.0, n in 50usize..5000, e1 in 1e-8f64..0.4, e2 in 1e-8f64..0.4) {
        prop_assume!((e1 - e2).abs() > 1e-9);
        let ch = BpskAwgn::new(snr).unwrap();
        let model = ReliabilityModel::compute(&ch).unwrap();
        let (c, v) = bounds::capacity_and_dispersion(&ch).unwrap();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(bounds::orb_na_rate(&model, n, lo).unwrap() < bounds::orb_na_rate(&model, n, hi).unwrap());
        prop_assert!(bounds::na_converse_rate(c, v, n, lo).unwrap() < bounds::na_converse_rate(c, v, n, hi).unwrap());
        prop_assert!(model.i_orb <= c + 1e-12);
    }

    #[test]
    fn na_epsilon_inverts_na_rate(snr in -2.0f64..4.0, n in 100usize..3000, eps in 1e-6f64..0.2) {
        let ch = BpskAwgn::new(snr).unwrap();
        let model = ReliabilityModel::compute(&ch).unwrap();
        let ln_m1 = bounds::orb_na_ln_m_minus_1(&model, n, eps).unwrap();
        let m = CodebookSize::from_ln_m(ln_m1 + (-ln_m1).exp().ln_1p()).unwrap();
        let back = bounds::orb_na_epsilon(&model, n, m).unwrap();
        prop_assert!((back / eps - 1.0).abs() < 1e-6, "{} vs {}", back, eps);
    }

    #[test]
    fn llr_sign_matches_likelihoods(snr in -5.0f64..10.0, y in -4.0f64..4.0) {
        let ch = BpskAwgn::new(snr).unwrap();
        let l = ch.llr(y);
        let (p, m) = (ch.q_plus(y), ch.q_minus(y));
        if p > 0.0 && m > 0.0 {
            prop_assert!((l - (p / m).ln()).abs() < 1e-8 * l.abs().max(1.0));
        }
    }

    #[test]
    fn mc_independent_of_thread_count(seed in any::<u64>()) {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                mc::estimate_mean(10_000, 16, seed, |rng| rand::Rng::random::<f64>(rng))
            })
        };
        let (a, b) = (run(1), run(3));
        prop_assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        prop_assert_eq!(a.m2.to_bits(), b.m2.to_bits());
    }
}
