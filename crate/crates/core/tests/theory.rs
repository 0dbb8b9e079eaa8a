use pa_evolve::edge_weights::{classify, ClassifyOptions, SeriesConvention, Verdict, WeightDistribution};
use pa_evolve::theory::{
    build_ledger, checkpoint_times, expected_good_paths, k_graph, q_weighted, time_warp, time_warp_inverse, EmptyArgmax,
    LedgerParams, Tau,
};

fn tau25() -> Tau {
    Tau::new(2.5).unwrap()
}

/// K written out directly: 2 max(1, floor((ln ln t - ln(1 v ln(t'/t))) / |ln(tau - 2)|)).
fn k_direct(t: f64, tp: f64, tau: f64) -> u32 {
    let num = t.ln().ln() - (tp / t).ln().max(1.0).ln();
    2 * ((num / (tau - 2.0).ln().abs()).floor().max(1.0) as u32)
}

#[test]
fn checkpoints_match_a_linear_scan() {
    for (t, tau) in [(10_000u64, 2.5), (2_000, 2.3), (50_000, 2.8)] {
        let tt = Tau::new(tau).unwrap();
        let got = checkpoint_times(t, tt).unwrap();
        let mut want = vec![t];
        let k0 = k_direct(t as f64, t as f64, tau);
        let mut prev = k0;
        let mut tp = t;
        while want.len() < got.len() + 1 && tp < t * 10_000_000 {
            tp += 1;
            let k = k_direct(t as f64, tp as f64, tau);
            if k < prev {
                if k + 2 * want.len() as u32 == k0 {
                    want.push(tp);
                }
                prev = k;
            }
            if k == 2 {
                break;
            }
        }
        let want: Vec<u64> = want.into_iter().filter(|&x| k_direct(t as f64, x as f64, tau) >= 2).collect();
        assert_eq!(got, want[..got.len()].to_vec(), "t={t} tau={tau}");
    }
}

#[test]
fn profile_examples() {
    let t = 1_000_000u64;
    assert_eq!(k_graph(t, t, tau25()).unwrap(), 6);
    assert_eq!(q_weighted(t, t, tau25(), &WeightDistribution::deterministic(1.0).unwrap()).unwrap(), 6.0);
    let q = q_weighted(t, t, tau25(), &WeightDistribution::exponential(1.0).unwrap()).unwrap();
    let want: f64 = (1..=6).map(|k| -(1.0 - (-(2f64.powf(k as f64 / 2.0))).exp()).ln()).sum();
    assert!((q - want).abs() < 1e-12, "{q} vs {want}");
    let tp = time_warp(1e5, 0.3).unwrap();
    assert!((time_warp_inverse(1e5, tp).unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn good_path_sums_match_nested_loops() {
    let (nu, g) = (1.3, 0.6);
    let bound = |p: &[u64]| -> f64 {
        p.windows(2).map(|e| nu * (e[0].min(e[1]) as f64).powf(-g) * (e[0].max(e[1]) as f64).powf(g - 1.0)).product()
    };
    let tp = 12u64;
    let ell = [1u64, 3, 2, 4];
    for (x, y) in [(1u64, 12u64), (5, 7), (12, 3)] {
        let mut two = 0.0;
        for a in ell[1]..=tp {
            if a != x && a != y {
                two += bound(&[x, a, y]);
            }
        }
        let got = expected_good_paths(tp, &ell, 0, 2, x, y, nu, g).unwrap();
        assert!((got - two).abs() <= 1e-12 * two, "{got} vs {two}");
        let mut three = 0.0;
        for a in ell[1]..=tp {
            for b in ell[2]..=tp {
                if a != b && ![x, y].contains(&a) && ![x, y].contains(&b) {
                    three += bound(&[x, a, b, y]);
                }
            }
        }
        let got = expected_good_paths(tp, &ell, 0, 3, x, y, nu, g).unwrap();
        assert!((got - three).abs() <= 1e-12 * three, "{got} vs {three}");
    }
    assert_eq!(expected_good_paths(tp, &ell, 0, 2, 4, 4, nu, g).unwrap(), 0.0);
    assert!(expected_good_paths(200, &ell, 0, 2, 1, 2, nu, g).is_err());
}

#[test]
fn classification_cases() {
    let opts = ClassifyOptions::default();
    let c = |d: WeightDistribution| classify(&d, &opts);
    let exp = c(WeightDistribution::exponential(1.0).unwrap());
    assert!(exp.explosive());
    assert!((exp.i1_partial - 0.5276).abs() < 1e-3, "{}", exp.i1_partial);
    assert!(c(WeightDistribution::uniform(0.0, 1.0).unwrap()).explosive());
    let det = c(WeightDistribution::deterministic(1.0).unwrap());
    assert_eq!(det.i1, Verdict::Infinite);
    assert_eq!(det.i2_partial, 0.0);
    assert!(det.i2_finite());
    assert_eq!(c(WeightDistribution::triple_flat(1.0).unwrap()).i2, Verdict::Infinite);
    assert_eq!(c(WeightDistribution::triple_flat(0.5).unwrap()).i2, Verdict::Finite);
    let printed = classify(
        &WeightDistribution::exponential(1.0).unwrap(),
        &ClassifyOptions { convention: SeriesConvention::AsPrinted, ..Default::default() },
    );
    assert!(printed.inconclusive());
}

#[test]
fn ledger_constants_fitted_at_two_hold_everywhere() {
    for t in [10_000u64, 1_000_000] {
        let mut p = LedgerParams::new(tau25(), t);
        assert!(build_ledger(&p, &[t], None).is_err(), "nu = 1 leaves the argmax empty");
        p.empty_argmax = EmptyArgmax::FloorAtTwo;
        let tps: Vec<u64> = checkpoint_times(t, tau25()).unwrap().into_iter().take(3).collect();
        let l = build_ledger(&p, &tps, None).unwrap();
        assert!(l.floored_levels() > 0);
        let c = l.check_convolution_bounds(l.fit_c());
        let b = l.check_eta_growth(l.fit_b());
        assert!(c.passed(), "{c:?}");
        assert!(b.passed(), "{b:?}");
    }
}
