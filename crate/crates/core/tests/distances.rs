use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};

use pa_evolve::distance_engine::{
    bidirectional_bfs, bidirectional_dijkstra, evolve_distance, exact_hops, exact_weighted, Distance, TheoryCurve,
    View, Workspace,
};
use pa_evolve::edge_weights::WeightDistribution;
use pa_evolve::pam_graph::{GrowOptions, GrowingGraph, ModelParams};
use pa_evolve::rng::rng_from_seed;
use pa_evolve::theory::Tau;
use rand::Rng;

/// The graph at time `tp` as a petgraph, vertex v at index v.
fn snapshot(g: &GrowingGraph, tp: u32) -> UnGraph<(), f64> {
    let mut pg = UnGraph::with_capacity(tp as usize + 1, g.edge_count());
    for _ in 0..=tp {
        pg.add_node(());
    }
    for e in g.edges().iter().filter(|e| e.high <= tp) {
        pg.add_edge(NodeIndex::new(e.low as usize), NodeIndex::new(e.high as usize), e.weight);
    }
    pg
}

fn oracle(pg: &UnGraph<(), f64>, x: u32, y: u32) -> (Option<u32>, Option<f64>) {
    let target = NodeIndex::new(y as usize);
    let hops = dijkstra(pg, NodeIndex::new(x as usize), Some(target), |_| 1u32).get(&target).copied();
    let w = dijkstra(pg, NodeIndex::new(x as usize), Some(target), |e| *e.weight()).get(&target).copied();
    (hops, w)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

#[test]
fn searches_match_petgraph() {
    let dist = WeightDistribution::exponential(1.0).unwrap();
    let mut ws = Workspace::default();
    for (i, params) in [ModelParams::fpa(2, -1.0).unwrap(), ModelParams::fpa(1, 0.0).unwrap(), ModelParams::vpa(0.6, 0.5).unwrap()]
        .into_iter()
        .enumerate()
    {
        let mut g = GrowingGraph::new(params, 40 + i as u64, GrowOptions::default());
        g.grow_to(1500, &dist).unwrap();
        let mut rng = rng_from_seed(i as u64);
        for tp in [300u32, 900, 1500] {
            let pg = snapshot(&g, tp);
            let view = View::at(&g, tp);
            for _ in 0..40 {
                let x = rng.random_range(1..=tp);
                let y = rng.random_range(1..=tp);
                let (h, w) = oracle(&pg, x, y);
                assert_eq!(exact_hops(&view, x, y).finite(), h);
                assert_eq!(bidirectional_bfs(&view, x, y, None, &mut ws).finite(), h);
                for (got, want) in [
                    (exact_weighted(&view, x, y).finite(), w),
                    (bidirectional_dijkstra(&view, x, y, None, &mut ws).finite(), w),
                ] {
                    match (got, want) {
                        (Some(a), Some(b)) => assert!(close(a, b), "{a} vs {b}"),
                        (None, None) => {}
                        other => panic!("reachability differs: {other:?}"),
                    }
                }
            }
        }
    }
}

#[test]
fn upper_bound_caps_are_respected() {
    let dist = WeightDistribution::uniform(0.5, 1.5).unwrap();
    let mut g = GrowingGraph::new(ModelParams::fpa(2, 0.0).unwrap(), 3, GrowOptions::default());
    g.grow_to(2000, &dist).unwrap();
    let view = View::now(&g);
    let mut ws = Workspace::default();
    let mut rng = rng_from_seed(17);
    for _ in 0..100 {
        let (x, y) = (rng.random_range(1..=2000), rng.random_range(1..=2000));
        let d = exact_hops(&view, x, y).finite().unwrap();
        // a cap at or below the truth is returned as is
        assert_eq!(bidirectional_bfs(&view, x, y, Some(d), &mut ws), Distance::Finite(d));
        assert_eq!(bidirectional_bfs(&view, x, y, Some(d + 3), &mut ws), Distance::Finite(d));
        let w = exact_weighted(&view, x, y).finite().unwrap();
        let got = bidirectional_dijkstra(&view, x, y, Some(w * 1.5 + 1.0), &mut ws).finite().unwrap();
        assert!(close(got, w));
    }
}

#[test]
fn trajectories_match_from_scratch_and_never_increase() {
    let dist = WeightDistribution::exponential(1.0).unwrap();
    let tau = Tau::new(2.5).unwrap();
    let mut ws = Workspace::default();
    for seed in 0..10u64 {
        let mut g = GrowingGraph::new(ModelParams::fpa(2, -1.0).unwrap(), seed, GrowOptions::default());
        g.grow_to(100, &dist).unwrap();
        let mut rng = rng_from_seed(seed + 500);
        let u = rng.random_range(1..=100);
        let v = rng.random_range(1..=100);
        let cps: Vec<u32> = (100..=2000).step_by(50).collect();
        let curve = TheoryCurve { t: 100, tau, dist: dist.clone() };
        let tr = evolve_distance(&mut g, &dist, u, v, &cps, true, &curve, &mut ws).unwrap();
        assert_eq!(tr.monotonicity_violations(), 0);
        for p in &tr.points {
            let (h, w) = oracle(&snapshot(&g, p.tp), u, v);
            assert_eq!(p.dg.finite(), h);
            let dl = p.dl.unwrap().finite();
            assert!(match (dl, w) {
                (Some(a), Some(b)) => close(a, b),
                (None, None) => true,
                _ => false,
            });
        }
    }
}
