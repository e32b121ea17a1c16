//! Simple random walk on a built hull.
//!
//! The walk picks a uniform incident edge, so parallel edges weigh in with
//! their multiplicity. The frontier is an absorbing screen: a walk stops the
//! first time it stands on a frontier vertex.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHED};
use crate::map::HalfPlaneMap;
use crate::rng::RngStream;

/// Treatment of original boundary vertices other than the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OriginalBoundary {
    #[default]
    Ordinary,
    Absorbing,
}

#[derive(Clone, Debug)]
pub struct WalkArena {
    graph: Graph,
    root: u32,
    dist: Vec<u32>,
    stop: Vec<bool>,
}

impl WalkArena {
    pub fn from_map(map: &HalfPlaneMap, boundary: OriginalBoundary) -> Result<Self> {
        if !map.holes().is_empty() {
            return Err(Error::MissingGeometry);
        }
        let originals: Vec<u32> = match boundary {
            OriginalBoundary::Ordinary => Vec::new(),
            OriginalBoundary::Absorbing => (1..map.vertex_count() as u32)
                .filter(|&v| map.boundary_index(v).is_some())
                .collect(),
        };
        Self::from_graph(map.graph(), 0, &map.frontier_vertices(), &originals)
    }

    /// Arena on an explicit graph; the walk stops on `frontier` and `absorbing`.
    pub fn from_graph(graph: Graph, root: u32, frontier: &[u32], absorbing: &[u32]) -> Result<Self> {
        if root as usize >= graph.vertex_count() {
            return Err(Error::Degenerate("walk root outside the map"));
        }
        let dist = graph.bfs(root);
        let mut stop = vec![false; graph.vertex_count()];
        for &v in frontier.iter().chain(absorbing) {
            if v != root {
                stop[v as usize] = true;
            }
        }
        Ok(WalkArena { graph, root, dist, stop })
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn distance(&self, v: u32) -> u32 {
        self.dist[v as usize]
    }

    #[inline]
    pub fn step(&self, v: u32, rng: &mut RngStream) -> u32 {
        let nbrs = self.graph.neighbors(v);
        nbrs[rng.below(nbrs.len() as u64) as usize].0
    }

    fn is_stop(&self, v: u32) -> bool {
        self.stop[v as usize]
    }
}

/// State of a walk at time `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicSample {
    pub n: u64,
    pub distance: u32,
    /// Visits to the root during steps `1..=n`.
    pub returns: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkRecord {
    pub seed: u64,
    /// Steps actually taken.
    pub steps: u64,
    /// Samples at `n = 1, 2, 4, ...` up to the stop.
    pub displacement: Vec<DyadicSample>,
    pub final_distance: u32,
    pub max_distance: u32,
    pub returns_to_root: u64,
    pub hit_frontier: bool,
}

/// Walk from the root for at most `steps` steps.
pub fn run_srw(arena: &WalkArena, steps: u64, rng: &mut RngStream) -> Result<WalkRecord> {
    if arena.graph.degree(arena.root) == 0 {
        return Err(Error::Degenerate("walk root has no edges"));
    }
    let mut v = arena.root;
    let mut next_mark = 1u64;
    let mut rec = WalkRecord {
        seed: rng.seed(),
        steps: 0,
        displacement: Vec::new(),
        final_distance: 0,
        max_distance: 0,
        returns_to_root: 0,
        hit_frontier: false,
    };
    for n in 1..=steps {
        v = arena.step(v, rng);
        let d = arena.dist[v as usize];
        debug_assert_ne!(d, UNREACHED);
        rec.steps = n;
        rec.max_distance = rec.max_distance.max(d);
        if v == arena.root {
            rec.returns_to_root += 1;
        }
        if n == next_mark {
            rec.displacement.push(DyadicSample {
                n,
                distance: d,
                returns: rec.returns_to_root,
            });
            next_mark *= 2;
        }
        if arena.is_stop(v) {
            rec.hit_frontier = true;
            break;
        }
    }
    rec.final_distance = arena.dist[v as usize];
    Ok(rec)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnSeries {
    /// `at_root[t]`: fraction of walks at the root at time `t`.
    pub at_root: Vec<f64>,
    /// `stopped[t]`: fraction of walks that hit the frontier by time `t`.
    pub stopped: Vec<f64>,
    pub walks: u64,
}

impl ReturnSeries {
    /// `p_{2n}` for `n = 0, 1, ...`.
    pub fn even(&self) -> Vec<f64> {
        self.at_root.iter().step_by(2).copied().collect()
    }

    pub fn odd(&self) -> Vec<f64> {
        self.at_root.iter().skip(1).step_by(2).copied().collect()
    }
}

/// Empirical return frequencies up to time `t_max`; stopped walks count as
/// away from the root.
pub fn return_probability(arena: &WalkArena, t_max: u64, walks: u64, rng: &mut RngStream) -> ReturnSeries {
    let len = t_max as usize + 1;
    let mut at_root = vec![0u64; len];
    let mut stopped = vec![0u64; len];
    for _ in 0..walks {
        let mut v = arena.root;
        at_root[0] += 1;
        for t in 1..len {
            v = arena.step(v, rng);
            if v == arena.root {
                at_root[t] += 1;
            }
            if arena.is_stop(v) {
                for s in stopped.iter_mut().skip(t) {
                    *s += 1;
                }
                break;
            }
        }
    }
    let w = walks.max(1) as f64;
    ReturnSeries {
        at_root: at_root.iter().map(|&c| c as f64 / w).collect(),
        stopped: stopped.iter().map(|&c| c as f64 / w).collect(),
        walks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::model_params;
    use crate::explorer::{explore, ExploreConfig, Mode};
    use proptest::prelude::*;

    #[test]
    fn triangle_neighbours_are_equally_likely() {
        let g = Graph::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]);
        let arena = WalkArena::from_graph(g, 0, &[], &[]).unwrap();
        let mut r = RngStream::new(1);
        let n = 100_000;
        let ones = (0..n).filter(|_| arena.step(0, &mut r) == 1).count() as f64;
        let sd = (n as f64 * 0.25).sqrt();
        assert!((ones - n as f64 / 2.0).abs() < 4.0 * sd);
    }

    #[test]
    fn parallel_edges_count_with_multiplicity() {
        let g = Graph::from_edges(3, vec![(0, 1), (0, 1), (0, 2)]);
        let arena = WalkArena::from_graph(g, 0, &[], &[]).unwrap();
        let mut r = RngStream::new(2);
        let n = 90_000;
        let ones = (0..n).filter(|_| arena.step(0, &mut r) == 1).count() as f64;
        let p = 2.0 / 3.0;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((ones - n as f64 * p).abs() < 4.0 * sd);
    }

    #[test]
    fn time_zero_return_is_one() {
        let g = Graph::from_edges(3, vec![(0, 1), (1, 2), (2, 0)]);
        let arena = WalkArena::from_graph(g, 0, &[], &[]).unwrap();
        let s = return_probability(&arena, 9, 1000, &mut RngStream::new(3));
        assert_eq!(s.at_root[0], 1.0);
        assert_eq!(s.at_root[1], 0.0);
        // on a triangle odd returns happen from time 3 on
        assert!(s.odd()[1] > 0.0);
        assert_eq!(s.even().len(), 5);
    }

    #[test]
    fn hull_walk_stops_on_frontier() {
        let params = model_params(0.3).unwrap();
        let ex = explore(&params, &ExploreConfig::new(5, Mode::Full), &mut RngStream::new(4)).unwrap();
        let map = ex.map.unwrap();
        let arena = WalkArena::from_map(&map, OriginalBoundary::Ordinary).unwrap();
        let rec = run_srw(&arena, 1 << 20, &mut RngStream::new(5)).unwrap();
        assert!(rec.hit_frontier);
        assert_eq!(rec.final_distance, 5);
        let skel = explore(&params, &ExploreConfig::new(5, Mode::Skeleton), &mut RngStream::new(4)).unwrap();
        let holes = !skel.map.as_ref().unwrap().holes().is_empty();
        assert_eq!(WalkArena::from_map(skel.map.as_ref().unwrap(), OriginalBoundary::Ordinary).is_err(), holes);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn displacement_is_lipschitz(seed in any::<u64>(), absorb in any::<bool>()) {
            let params = model_params(0.5).unwrap();
            let ex = explore(&params, &ExploreConfig::new(4, Mode::Full), &mut RngStream::new(seed)).unwrap();
            let mode = if absorb { OriginalBoundary::Absorbing } else { OriginalBoundary::Ordinary };
            let arena = WalkArena::from_map(ex.map.as_ref().unwrap(), mode).unwrap();
            let mut r = RngStream::new(seed ^ 1);
            let mut v = arena.root();
            for n in 1..500u32 {
                let w = arena.step(v, &mut r);
                prop_assert!(arena.distance(w).abs_diff(arena.distance(v)) <= 1);
                prop_assert!(arena.distance(w) <= n);
                v = w;
            }
            let rec = run_srw(&arena, 4096, &mut RngStream::new(seed)).unwrap();
            for s in &rec.displacement {
                prop_assert!(s.distance as u64 <= s.n);
                prop_assert!(s.returns <= s.n / 2);
            }
        }
    }
}
