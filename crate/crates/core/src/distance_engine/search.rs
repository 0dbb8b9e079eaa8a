use std::collections::BinaryHeap;

use super::{Distance, HeapItem, View};

#[derive(Default)]
struct Side {
    mark: Vec<u32>,
    done: Vec<u32>,
    hops: Vec<u32>,
    wt: Vec<f64>,
}

impl Side {
    fn ensure(&mut self, n: usize) {
        if self.mark.len() < n {
            self.mark.resize(n, 0);
            self.done.resize(n, 0);
            self.hops.resize(n, 0);
            self.wt.resize(n, 0.0);
        }
    }
}

/// Reusable scratch space for repeated searches on a growing graph.
#[derive(Default)]
pub struct Workspace {
    a: Side,
    b: Side,
    epoch: u32,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    fn begin(&mut self, n: usize) -> u32 {
        self.a.ensure(n);
        self.b.ensure(n);
        if self.epoch == u32::MAX {
            for s in [&mut self.a, &mut self.b] {
                s.mark.fill(0);
                s.done.fill(0);
            }
            self.epoch = 0;
        }
        self.epoch += 1;
        self.epoch
    }
}

/// Hop distance between x and y, never above `upper` (a known path length).
pub fn bidirectional_bfs(view: &View<'_>, x: u32, y: u32, upper: Option<u32>, ws: &mut Workspace) -> Distance<u32> {
    if x == y {
        return Distance::Finite(0);
    }
    let cap = upper.unwrap_or(u32::MAX);
    let ep = ws.begin(view.time() as usize + 1);
    let (sa, sb) = (&mut ws.a, &mut ws.b);
    sa.mark[x as usize] = ep;
    sa.hops[x as usize] = 0;
    sb.mark[y as usize] = ep;
    sb.hops[y as usize] = 0;
    let mut front_a = vec![x];
    let mut front_b = vec![y];
    let (mut ra, mut rb) = (0u32, 0u32);
    let mut next = Vec::new();
    loop {
        if ra.saturating_add(rb).saturating_add(1) >= cap {
            return Distance::Finite(cap);
        }
        if front_a.is_empty() || front_b.is_empty() {
            return upper.map_or(Distance::Unreachable, Distance::Finite);
        }
        let expand_a = front_a.len() <= front_b.len();
        let (front, this, other, radius) = if expand_a {
            (&mut front_a, &mut *sa, &*sb, &mut ra)
        } else {
            (&mut front_b, &mut *sb, &*sa, &mut rb)
        };
        let nd = *radius + 1;
        let mut best = u32::MAX;
        next.clear();
        for &u in front.iter() {
            view.for_each_neighbor(u, |w, _| {
                let wi = w as usize;
                if this.mark[wi] != ep {
                    this.mark[wi] = ep;
                    this.hops[wi] = nd;
                    next.push(w);
                    if other.mark[wi] == ep {
                        best = best.min(nd + other.hops[wi]);
                    }
                }
            });
        }
        *radius = nd;
        std::mem::swap(front, &mut next);
        if best != u32::MAX {
            return Distance::Finite(best.min(cap));
        }
    }
}

/// Weighted distance between x and y, never above `upper` (a known path weight).
pub fn bidirectional_dijkstra(
    view: &View<'_>,
    x: u32,
    y: u32,
    upper: Option<f64>,
    ws: &mut Workspace,
) -> Distance<f64> {
    if x == y {
        return Distance::Finite(0.0);
    }
    let ep = ws.begin(view.time() as usize + 1);
    let (sa, sb) = (&mut ws.a, &mut ws.b);
    let mut mu = upper.unwrap_or(f64::INFINITY);
    sa.mark[x as usize] = ep;
    sa.wt[x as usize] = 0.0;
    sb.mark[y as usize] = ep;
    sb.wt[y as usize] = 0.0;
    let mut heap_a = BinaryHeap::from([HeapItem(0.0, x)]);
    let mut heap_b = BinaryHeap::from([HeapItem(0.0, y)]);
    loop {
        let (Some(ta), Some(tb)) = (heap_a.peek(), heap_b.peek()) else { break };
        if ta.0 + tb.0 >= mu {
            break;
        }
        let use_a = ta.0 <= tb.0;
        let (heap, this, other) =
            if use_a { (&mut heap_a, &mut *sa, &*sb) } else { (&mut heap_b, &mut *sb, &*sa) };
        let HeapItem(d, u) = heap.pop().unwrap();
        if this.done[u as usize] == ep {
            continue;
        }
        this.done[u as usize] = ep;
        view.for_each_neighbor(u, |w, c| {
            let wi = w as usize;
            let nd = d + c;
            if this.mark[wi] != ep || nd < this.wt[wi] {
                this.mark[wi] = ep;
                this.wt[wi] = nd;
                heap.push(HeapItem(nd, w));
            }
            if other.mark[wi] == ep {
                let via = this.wt[wi] + other.wt[wi];
                if via < mu {
                    mu = via;
                }
            }
        });
    }
    if mu.is_finite() {
        Distance::Finite(mu)
    } else {
        Distance::Unreachable
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance_engine::{exact_hops, exact_weighted};
    use crate::edge_weights::WeightDistribution;
    use crate::pam_graph::{GrowOptions, GrowingGraph, ModelParams};
    use crate::rng::rng_from_seed;
    use rand::Rng;

    #[test]
    fn agrees_with_unidirectional_search() {
        let exp = WeightDistribution::exponential(1.0).unwrap();
        let mut ws = Workspace::new();
        let mut rng = rng_from_seed(11);
        for seed in 0..5 {
            let mut g = GrowingGraph::new(ModelParams::vpa(0.6, 0.3).unwrap(), seed, GrowOptions::default());
            g.grow_to(400, &exp).unwrap();
            let view = View::now(&g);
            for _ in 0..50 {
                let x = rng.random_range(1..=400);
                let y = rng.random_range(1..=400);
                assert_eq!(bidirectional_bfs(&view, x, y, None, &mut ws), exact_hops(&view, x, y));
                let a = bidirectional_dijkstra(&view, x, y, None, &mut ws);
                let b = exact_weighted(&view, x, y);
                match (a, b) {
                    (Distance::Finite(a), Distance::Finite(b)) => assert!((a - b).abs() < 1e-9),
                    (a, b) => assert_eq!(a, b),
                }
            }
        }
    }

    #[test]
    fn upper_bound_is_respected() {
        let unit = WeightDistribution::deterministic(1.0).unwrap();
        let mut g = GrowingGraph::new(ModelParams::fpa(2, 0.0).unwrap(), 1, GrowOptions::default());
        g.grow_to(300, &unit).unwrap();
        let view = View::now(&g);
        let mut ws = Workspace::new();
        let d = exact_hops(&view, 1, 300).finite().unwrap();
        assert_eq!(bidirectional_bfs(&view, 1, 300, Some(d), &mut ws), Distance::Finite(d));
        assert_eq!(bidirectional_bfs(&view, 1, 300, Some(d + 3), &mut ws), Distance::Finite(d));
        let w = bidirectional_dijkstra(&view, 1, 300, Some(d as f64 + 0.5), &mut ws);
        assert_eq!(w, Distance::Finite(d as f64));
    }
}
