use proptest::prelude::*;

use pa_evolve::distance_engine::{bidirectional_bfs, bidirectional_dijkstra, exact_hops, exact_weighted, View, Workspace};
use pa_evolve::edge_weights::WeightDistribution;
use pa_evolve::io::{parse_snapshot, snapshot_string, RawConfig};
use pa_evolve::pam_graph::{GrowOptions, GrowingGraph, ModelParams, SamplerKind};
use pa_evolve::stats::quantile;
use pa_evolve::theory::{checkpoint_times, k_graph, q_weighted, Tau};

fn params() -> impl Strategy<Value = ModelParams> {
    prop_oneof![
        (1u32..4, 0.05f64..0.95, 0.0f64..3.0).prop_map(|(m, f, extra)| {
            let d = -(m as f64) * (1.0 - f) + extra * f;
            ModelParams::fpa(m, d).unwrap()
        }),
        (0.1f64..0.9, 0.1f64..1.0).prop_map(|(g, b)| ModelParams::vpa(g, b).unwrap()),
    ]
}

fn weights() -> impl Strategy<Value = WeightDistribution> {
    prop_oneof![
        Just(WeightDistribution::deterministic(1.0).unwrap()),
        (0.1f64..5.0).prop_map(|r| WeightDistribution::exponential(r).unwrap()),
        (0.0f64..1.0, 0.1f64..2.0).prop_map(|(a, w)| WeightDistribution::uniform(a, a + w).unwrap()),
        (0.3f64..2.0).prop_map(|b| WeightDistribution::triple_flat(b).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn distances_never_increase(p in params(), w in weights(), seed in any::<u64>(), a in 1u32..60, b in 1u32..60) {
        let mut g = GrowingGraph::new(p, seed, GrowOptions::default());
        g.grow_to(60, &w).unwrap();
        let mut ws = Workspace::default();
        let mut prev = (None, None);
        for tp in (60..=600).step_by(60) {
            g.grow_to(tp, &w).unwrap();
            let v = View::now(&g);
            let h = bidirectional_bfs(&v, a, b, None, &mut ws);
            let d = bidirectional_dijkstra(&v, a, b, None, &mut ws);
            if let Some(ph) = prev.0 { prop_assert!(h <= ph); }
            if let Some(pd) = prev.1 { prop_assert!(d <= pd); }
            prev = (Some(h), Some(d));
        }
    }

    #[test]
    fn bidirectional_equals_unidirectional(p in params(), w in weights(), seed in any::<u64>(), tp in 2u32..400, a in 1u32..400, b in 1u32..400) {
        let mut g = GrowingGraph::new(p, seed, GrowOptions::default());
        g.grow_to(400, &w).unwrap();
        let (a, b) = (a.min(tp), b.min(tp));
        let v = View::at(&g, tp);
        let mut ws = Workspace::default();
        prop_assert_eq!(bidirectional_bfs(&v, a, b, None, &mut ws), exact_hops(&v, a, b));
        let (x, y) = (bidirectional_dijkstra(&v, a, b, None, &mut ws), exact_weighted(&v, a, b));
        match (x.finite(), y.finite()) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-9 * y.max(1.0)),
            (None, None) => {}
            _ => prop_assert!(false, "reachability differs"),
        }
    }

    #[test]
    fn samplers_share_the_edge_count(p in params(), seed in any::<u64>()) {
        let w = WeightDistribution::deterministic(1.0).unwrap();
        let mut a = GrowingGraph::new(p, seed, GrowOptions::default());
        let mut b = GrowingGraph::new(p, seed, GrowOptions { sampler: SamplerKind::Fenwick, ..Default::default() });
        a.grow_to(300, &w).unwrap();
        b.grow_to(300, &w).unwrap();
        if let ModelParams::Fpa { m, .. } = p {
            prop_assert_eq!(a.edge_count(), b.edge_count());
            prop_assert_eq!(a.edge_count() as u32, m * 299);
        }
        prop_assert!(a.edges().iter().all(|e| e.low >= 1 && e.low < e.high));
    }

    #[test]
    fn profiles_are_non_increasing_even_and_clamped(tau in 2.05f64..2.95, lt in 3.0f64..12.0, f1 in 0.0f64..30.0, f2 in 0.0f64..30.0, w in weights()) {
        let tau = Tau::new(tau).unwrap();
        let t = 10f64.powf(lt) as u64;
        let (lo, hi) = (f1.min(f2), f1.max(f2));
        let t1 = (t as f64 * lo.exp()).min(1e18) as u64;
        let t2 = (t as f64 * hi.exp()).min(1e18) as u64;
        let (k1, k2) = (k_graph(t, t1, tau).unwrap(), k_graph(t, t2, tau).unwrap());
        prop_assert!(k2 <= k1 && k2 >= 2 && k1 % 2 == 0);
        prop_assert!(q_weighted(t, t2, tau, &w).unwrap() <= q_weighted(t, t1, tau, &w).unwrap() + 1e-12);
    }

    #[test]
    fn checkpoints_drop_by_two(tau in 2.05f64..2.95, lt in 2.0f64..12.0) {
        let tau = Tau::new(tau).unwrap();
        let t = 10f64.powf(lt) as u64;
        let ts = checkpoint_times(t, tau).unwrap();
        let k0 = k_graph(t, t, tau).unwrap();
        for (i, &ti) in ts.iter().enumerate() {
            prop_assert_eq!(k_graph(t, ti, tau).unwrap(), k0 - 2 * i as u32);
            if ti > t {
                prop_assert!(k_graph(t, ti - 1, tau).unwrap() > k0 - 2 * i as u32);
            }
        }
    }

    #[test]
    fn inverse_cdf_is_a_quantile(w in weights(), y in 1e-12f64..1.0) {
        let x = w.inverse_cdf(y).unwrap();
        prop_assert!(w.cdf(x) >= y * (1.0 - 1e-9));
        prop_assert!(w.inverse_cdf((y * 0.5).max(1e-300)).unwrap() <= x);
    }

    #[test]
    fn snapshots_round_trip(p in params(), w in weights(), seed in any::<u64>(), t in 1u32..300) {
        let mut g = GrowingGraph::new(p, seed, GrowOptions::default());
        g.grow_to(t, &w).unwrap();
        let h = parse_snapshot(&snapshot_string(&g)).unwrap();
        prop_assert_eq!(g.edges(), h.edges());
        prop_assert_eq!(snapshot_string(&g), snapshot_string(&h));
    }

    #[test]
    fn config_echo_is_idempotent(m in 1u32..5, f in 0.01f64..0.99, t in 16u64..100_000, seed in 0u64..=i64::MAX as u64, reps in 1usize..500) {
        let delta = -(m as f64) * f;
        let raw = RawConfig { variant: Some("fpa".into()), m: Some(m), delta: Some(delta), t: Some(t), seed: Some(seed), replicas: Some(reps), ..Default::default() };
        match raw.resolve() {
            Ok(c) => {
                let again = RawConfig::from_toml(&c.echo()).unwrap().resolve().unwrap();
                prop_assert_eq!(&c, &again);
                prop_assert_eq!(c.hash(), again.hash());
            }
            Err(e) => prop_assert!(e.to_string().contains("delta"), "{}", e),
        }
    }

    #[test]
    fn oversized_seed_is_rejected(seed in (i64::MAX as u64 + 1)..=u64::MAX) {
        let raw = RawConfig { variant: Some("fpa".into()), delta: Some(-0.5), t: Some(100), seed: Some(seed), ..Default::default() };
        prop_assert!(raw.resolve().unwrap_err().to_string().contains("seed"));
    }

    #[test]
    fn quantiles_are_ordered(xs in prop::collection::vec(-1e6f64..1e6, 1..50), p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let (lo, hi) = (p.min(q), p.max(q));
        let (a, b) = (quantile(&xs, lo), quantile(&xs, hi));
        prop_assert!(a <= b);
        let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(a >= min && b <= max);
    }
}
