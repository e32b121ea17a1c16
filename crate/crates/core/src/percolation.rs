//! Site percolation on the map, explored through the boundary only.
//!
//! The root-cluster walk and the interface walk never build geometry: by the
//! domain Markov property each peeling step only moves segment lengths. The
//! multi-junction explorer follows every interface leaving a boundary stretch
//! at once on a run-length encoded boundary.

use alloc::vec;
use alloc::vec::Vec;

use crate::analytic::{step_prob, ModelParams};
use crate::error::{domain, Error, Result};
use crate::explorer::{explore, ExploreConfig, Mode};
use crate::graph::UnionFind;
use crate::rng::RngStream;
use crate::stats::{mean_and_se, median};

const NIL: u32 = u32::MAX;

fn require_supercritical(params: &ModelParams) -> Result<()> {
    if params.is_supercritical() {
        Ok(())
    } else {
        Err(domain(
            "alpha",
            params.alpha,
            "alpha > 2/3; below the transition every cluster is finite and p_c = 1",
        ))
    }
}

/// One peeling step as seen by a boundary exploration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryStep {
    /// Alpha step revealing a vertex of the given colour (`true` = black).
    Reveal(bool),
    Right(u64),
    Left(u64),
}

/// Step law with the colour of revealed vertices. Draws use one uniform
/// for the shape and one more for a colour or a left swallow's size, so
/// walks at different `p` from one seed share their shapes.
#[derive(Clone, Debug)]
pub struct PercLaw {
    alpha: f64,
    p: f64,
    // cum[j] = sum_{i <= j+1} p_i / 2
    cum: Vec<f64>,
    half_swallow: f64,
}

impl PercLaw {
    pub fn new(params: &ModelParams, p: f64) -> Result<Self> {
        require_supercritical(params)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("p", p, "[0, 1]"));
        }
        let mut cum = Vec::new();
        let mut acc = 0.0;
        for i in 1u64.. {
            let pi = step_prob(params, i, None)? / 2.0;
            acc += pi;
            cum.push(acc);
            if pi < 1e-18 * acc || i >= 100_000 {
                break;
            }
        }
        Ok(PercLaw {
            alpha: params.alpha,
            p,
            cum,
            half_swallow: (1.0 - params.alpha) / 2.0,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `P(swallow of size i on one given side) = p_i / 2`.
    pub fn side_prob(&self, i: u64) -> f64 {
        match i {
            0 => 0.0,
            1 => self.cum[0],
            _ if (i as usize) <= self.cum.len() => self.cum[i as usize - 1] - self.cum[i as usize - 2],
            _ => 0.0,
        }
    }

    fn size_at(&self, u: f64) -> u64 {
        self.cum.partition_point(|&c| c <= u) as u64 + 1
    }

    #[inline]
    pub fn draw(&self, rng: &mut RngStream) -> BoundaryStep {
        let u = rng.uniform();
        if u < self.alpha {
            return BoundaryStep::Reveal(rng.uniform() < self.p);
        }
        let v = u - self.alpha;
        if v < self.half_swallow {
            BoundaryStep::Right(self.size_at(v))
        } else {
            BoundaryStep::Left(self.size_at(rng.uniform() * self.half_swallow))
        }
    }

    /// Increment of the black count in the root-cluster walk.
    #[inline]
    pub fn increment(&self, rng: &mut RngStream) -> i64 {
        match self.draw(rng) {
            BoundaryStep::Reveal(true) => 1,
            BoundaryStep::Right(i) => -(i as i64),
            _ => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClusterWalk {
    pub survived: bool,
    pub steps: u64,
}

/// Black count of the root cluster under an all-white boundary, run until
/// it dies or reaches `cap`.
pub fn root_cluster_walk(law: &PercLaw, rng: &mut RngStream, cap: u64) -> ClusterWalk {
    let cap = cap as i64;
    let mut b = 1i64;
    let mut steps = 0;
    loop {
        b += law.increment(rng);
        steps += 1;
        if b <= 0 {
            return ClusterWalk { survived: false, steps };
        }
        if b >= cap {
            return ClusterWalk { survived: true, steps };
        }
    }
}

/// Fraction of `trials` root-cluster walks reaching `cap`; trial `j` uses
/// the replica stream `(seed, j)`.
pub fn survival_probability(law: &PercLaw, seed: u64, trials: u64, cap: u64) -> f64 {
    let hits = (0..trials)
        .filter(|&j| root_cluster_walk(law, &mut RngStream::for_replica(seed, j), cap).survived)
        .count();
    hits as f64 / trials as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InterfaceOutcome {
    BlackDied,
    WhiteDied,
    BothExceededCap,
    CapSteps,
    /// The root edge was not bichromatic.
    NoInterface,
}

/// Segment state of the interface exploration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PercFrontier {
    pub white_len: u64,
    pub black_len: u64,
    pub p: f64,
    pub step_count: u64,
    pub outcome: InterfaceOutcome,
}

impl PercFrontier {
    pub fn infinite(&self) -> bool {
        self.outcome == InterfaceOutcome::BothExceededCap
    }
}

/// Interface exploration from a white root vertex with a black right
/// neighbour. A fully swallowed segment is refilled by revealing free
/// vertices up to the first one of its colour; when that happens the
/// starting interface is finite and the exploration stops.
pub fn interface_walk(law: &PercLaw, rng: &mut RngStream, cap: u64, max_steps: u64) -> PercFrontier {
    let (mut w, mut b) = (1u64, 1u64);
    let mut steps = 0u64;
    let p = law.p();
    let finish = |w, b, steps, outcome| PercFrontier {
        white_len: w,
        black_len: b,
        p,
        step_count: steps,
        outcome,
    };
    loop {
        if w > cap && b > cap {
            return finish(w, b, steps, InterfaceOutcome::BothExceededCap);
        }
        if steps >= max_steps {
            return finish(w, b, steps, InterfaceOutcome::CapSteps);
        }
        steps += 1;
        match law.draw(rng) {
            BoundaryStep::Reveal(true) => b += 1,
            BoundaryStep::Reveal(false) => w += 1,
            BoundaryStep::Right(i) if i < b => b -= i,
            BoundaryStep::Right(_) => {
                if rng.uniform() < p {
                    b = 1;
                } else {
                    w = w.saturating_add(1).saturating_add(rng.geometric(p));
                    b = 1;
                    return finish(w, b, steps, InterfaceOutcome::BlackDied);
                }
            }
            BoundaryStep::Left(i) if i < w => w -= i,
            BoundaryStep::Left(_) => {
                if rng.uniform() < p {
                    b = b.saturating_add(1).saturating_add(rng.geometric(1.0 - p));
                    w = 1;
                    return finish(w, b, steps, InterfaceOutcome::WhiteDied);
                } else {
                    w = 1;
                }
            }
        }
    }
}

/// Interface from the root edge under an i.i.d. boundary colouring.
pub fn interface_trial(law: &PercLaw, swapped: &PercLaw, rng: &mut RngStream, cap: u64, max_steps: u64) -> PercFrontier {
    let p = law.p();
    let left_black = rng.uniform() < p;
    let right_black = rng.uniform() < p;
    match (left_black, right_black) {
        (false, true) => interface_walk(law, rng, cap, max_steps),
        // Colour swap turns black-white into white-black at 1 - p.
        (true, false) => {
            let mut f = interface_walk(swapped, rng, cap, max_steps);
            core::mem::swap(&mut f.white_len, &mut f.black_len);
            f.outcome = match f.outcome {
                InterfaceOutcome::BlackDied => InterfaceOutcome::WhiteDied,
                InterfaceOutcome::WhiteDied => InterfaceOutcome::BlackDied,
                o => o,
            };
            f.p = p;
            f
        }
        _ => PercFrontier {
            white_len: 0,
            black_len: 0,
            p,
            step_count: 0,
            outcome: InterfaceOutcome::NoInterface,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PcEstimate {
    pub p_c: f64,
    pub lo: f64,
    pub hi: f64,
    /// Survival frequency measured at `lo` and `hi`.
    pub survival_lo: f64,
    pub survival_hi: f64,
    pub trials: u64,
}

/// Bisection for the `p` where `survival(p)` crosses `threshold`.
pub fn bisect_threshold(mut survival: impl FnMut(f64) -> f64, threshold: f64, tol: f64, trials: u64) -> PcEstimate {
    let (mut lo, mut hi) = (0.0, 1.0);
    let (mut s_lo, mut s_hi) = (0.0, 1.0);
    while hi - lo > 2.0 * tol {
        let mid = 0.5 * (lo + hi);
        let s = survival(mid);
        if s > threshold {
            hi = mid;
            s_hi = s;
        } else {
            lo = mid;
            s_lo = s;
        }
    }
    PcEstimate {
        p_c: 0.5 * (lo + hi),
        lo,
        hi,
        survival_lo: s_lo,
        survival_hi: s_hi,
        trials,
    }
}

/// Threshold estimate from root-cluster survival; all `p` share one seed.
pub fn estimate_pc(params: &ModelParams, rng: &mut RngStream, trials: u64, cap: u64) -> Result<PcEstimate> {
    require_supercritical(params)?;
    let seed = rng.next_u64();
    let mut err = None;
    let est = bisect_threshold(
        |p| match PercLaw::new(params, p) {
            Ok(law) => survival_probability(&law, seed, trials, cap),
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        0.02,
        0.005,
        trials,
    );
    match err {
        Some(e) => Err(e),
        None => Ok(est),
    }
}

/// Outcome of following every interface leaving a boundary stretch.
#[derive(Clone, Debug, PartialEq)]
pub struct StretchOutcome {
    /// Edges in the stretch.
    pub k: u64,
    /// Bichromatic edges in the stretch.
    pub junctions: u64,
    /// Interfaces still alive with both sides above the cap.
    pub infinite: u64,
    pub white_clusters: u64,
    pub black_clusters: u64,
    /// Neighbouring infinite interfaces whose facing sides differ in colour.
    pub inconsistent: u64,
    pub steps: u64,
    pub capped: bool,
}

#[derive(Clone, Copy, Debug)]
struct Seg {
    black: bool,
    len: u64,
    prev: u32,
    next: u32,
    // junction to the right of this segment
    junction: u32,
}

struct Stretch {
    segs: Vec<Seg>,
    // left segment of each junction, NIL once dead
    left_of: Vec<u32>,
    head: u32,
    tail: u32,
}

impl Stretch {
    fn new(colors: &[bool]) -> Self {
        let mut segs: Vec<Seg> = Vec::new();
        let mut left_of = Vec::new();
        for &c in colors {
            match segs.last_mut() {
                Some(s) if s.black == c => s.len += 1,
                _ => {
                    let id = segs.len() as u32;
                    if let Some(prev) = segs.last_mut() {
                        prev.next = id;
                        prev.junction = left_of.len() as u32;
                        left_of.push(id - 1);
                    }
                    segs.push(Seg {
                        black: c,
                        len: 1,
                        prev: if id == 0 { NIL } else { id - 1 },
                        next: NIL,
                        junction: NIL,
                    });
                }
            }
        }
        let tail = segs.len() as u32 - 1;
        Stretch {
            segs,
            left_of,
            head: 0,
            tail,
        }
    }

    fn push_seg(&mut self, black: bool) -> u32 {
        self.segs.push(Seg {
            black,
            len: 1,
            prev: NIL,
            next: NIL,
            junction: NIL,
        });
        self.segs.len() as u32 - 1
    }

    fn kill_right_junction(&mut self, s: u32) {
        let j = self.segs[s as usize].junction;
        if j != NIL {
            self.left_of[j as usize] = NIL;
            self.segs[s as usize].junction = NIL;
        }
    }

    fn join(&mut self, a: u32, b: u32) {
        if a != NIL {
            self.segs[a as usize].next = b;
        } else {
            self.head = b;
        }
        if b != NIL {
            self.segs[b as usize].prev = a;
        } else {
            self.tail = a;
        }
    }

    fn min_side(&self, j: u32) -> u64 {
        let s = self.left_of[j as usize];
        let t = self.segs[s as usize].next;
        self.segs[s as usize].len.min(self.segs[t as usize].len)
    }

    /// Merge segment `b` into `a` (same colour), `b` right after `a`.
    fn absorb_right(&mut self, a: u32, b: u32) {
        self.segs[a as usize].len += self.segs[b as usize].len;
        let jb = self.segs[b as usize].junction;
        self.segs[a as usize].junction = jb;
        if jb != NIL {
            self.left_of[jb as usize] = a;
        }
        let nb = self.segs[b as usize].next;
        self.join(a, nb);
    }

    fn peel(&mut self, j: u32, step: BoundaryStep, rng: &mut RngStream, p: f64) {
        let s = self.left_of[j as usize];
        let t = self.segs[s as usize].next;
        match step {
            BoundaryStep::Reveal(c) => {
                if c == self.segs[s as usize].black {
                    self.segs[s as usize].len += 1;
                } else {
                    self.segs[t as usize].len += 1;
                }
            }
            BoundaryStep::Right(i) => {
                let color = self.segs[s as usize].black;
                let mut rem = i;
                let mut cur = t;
                loop {
                    if cur == NIL {
                        let c = rng.uniform() < p;
                        self.kill_right_junction(s);
                        if c == color {
                            self.segs[s as usize].len += 1;
                            self.join(s, NIL);
                        } else {
                            let n = self.push_seg(c);
                            self.join(s, n);
                            self.join(n, NIL);
                            self.segs[s as usize].junction = j;
                            self.left_of[j as usize] = s;
                        }
                        break;
                    }
                    let len = self.segs[cur as usize].len;
                    if rem < len {
                        self.segs[cur as usize].len -= rem;
                        self.join(s, cur);
                        if self.segs[cur as usize].black == color {
                            self.kill_right_junction(s);
                            self.absorb_right(s, cur);
                        }
                        break;
                    }
                    rem -= len;
                    self.kill_right_junction(cur);
                    cur = self.segs[cur as usize].next;
                }
            }
            BoundaryStep::Left(i) => {
                let color = self.segs[t as usize].black;
                let mut rem = i;
                let mut cur = s;
                loop {
                    if cur == NIL {
                        let c = rng.uniform() < p;
                        if c == color {
                            self.left_of[j as usize] = NIL;
                            self.segs[t as usize].len += 1;
                            self.join(NIL, t);
                        } else {
                            let n = self.push_seg(c);
                            self.join(NIL, n);
                            self.join(n, t);
                            self.segs[n as usize].junction = j;
                            self.left_of[j as usize] = n;
                        }
                        break;
                    }
                    let len = self.segs[cur as usize].len;
                    if rem < len {
                        self.segs[cur as usize].len -= rem;
                        self.join(cur, t);
                        if self.segs[cur as usize].black == color {
                            self.left_of[j as usize] = NIL;
                            self.segs[cur as usize].junction = NIL;
                            self.absorb_right(cur, t);
                        } else {
                            self.segs[cur as usize].junction = j;
                            self.left_of[j as usize] = cur;
                        }
                        break;
                    }
                    rem -= len;
                    let before = self.segs[cur as usize].prev;
                    if before != NIL {
                        self.kill_right_junction(before);
                    }
                    if cur != s {
                        self.segs[cur as usize].junction = NIL;
                    }
                    cur = before;
                }
            }
        }
    }
}

/// Follow every interface from a stretch of `k` boundary edges with i.i.d.
/// colours until each surviving one has both sides longer than `cap`.
pub fn explore_stretch(law: &PercLaw, rng: &mut RngStream, k: u64, cap: u64, max_steps: u64) -> StretchOutcome {
    let p = law.p();
    let colors: Vec<bool> = (0..=k).map(|_| rng.uniform() < p).collect();
    let mut st = Stretch::new(&colors);
    let junctions = st.left_of.len() as u64;
    let mut steps = 0u64;
    let mut capped = false;
    loop {
        let mut pending = false;
        for j in 0..st.left_of.len() as u32 {
            while st.left_of[j as usize] != NIL && st.min_side(j) <= cap {
                if steps >= max_steps {
                    capped = true;
                    break;
                }
                pending = true;
                let step = law.draw(rng);
                st.peel(j, step, rng, p);
                steps += 1;
            }
        }
        if capped || !pending {
            break;
        }
    }
    let mut alive: Vec<u32> = Vec::new();
    let mut s = st.head;
    while s != NIL {
        let j = st.segs[s as usize].junction;
        if j != NIL && st.left_of[j as usize] == s {
            alive.push(s);
        }
        s = st.segs[s as usize].next;
    }
    let (mut white, mut black, mut inconsistent) = (0u64, 0u64, 0u64);
    let mut count = |b: bool| if b { black += 1 } else { white += 1 };
    for (n, &s) in alive.iter().enumerate() {
        let left = st.segs[s as usize].black;
        let right = st.segs[st.segs[s as usize].next as usize].black;
        if n == 0 {
            count(left);
        } else {
            let prev_right = st.segs[st.segs[alive[n - 1] as usize].next as usize].black;
            if prev_right != left {
                inconsistent += 1;
                count(left);
            }
        }
        count(right);
    }
    StretchOutcome {
        k,
        junctions,
        infinite: alive.len() as u64,
        white_clusters: white,
        black_clusters: black,
        inconsistent,
        steps,
        capped,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityEstimate {
    /// Half the frequency of an infinite interface at the root edge.
    pub rho_a: f64,
    pub rho_a_se: f64,
    /// Half of `E_k / k` from stretch explorations.
    pub rho_b: f64,
    pub rho_b_se: f64,
    pub ek_over_k: f64,
    pub wk_inf_over_k: f64,
    pub bk_inf_over_k: f64,
    /// Largest `|W_k - B_k|` over replicas.
    pub max_wb_gap: u64,
    pub capped: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct DensityConfig {
    pub k: u64,
    pub replicas: u64,
    pub trials: u64,
    pub cap: u64,
    pub max_steps: u64,
}

pub fn interface_density(params: &ModelParams, p: f64, rng: &mut RngStream, cfg: &DensityConfig) -> Result<DensityEstimate> {
    let law = PercLaw::new(params, p)?;
    let swapped = PercLaw::new(params, 1.0 - p)?;
    let seed = rng.next_u64();
    let hits: Vec<f64> = (0..cfg.trials)
        .map(|j| {
            let f = interface_trial(&law, &swapped, &mut RngStream::for_replica(seed, j), cfg.cap, cfg.max_steps);
            f.infinite() as u8 as f64
        })
        .collect();
    let stretch: Vec<StretchOutcome> = (0..cfg.replicas)
        .map(|j| explore_stretch(&law, &mut RngStream::for_replica(seed ^ 0x5354_5245_5443_4800, j), cfg.k, cfg.cap, cfg.max_steps))
        .collect();
    Ok(combine_density(&hits, &stretch))
}

/// Reduce interface trials (1 for infinite) and stretch outcomes.
pub fn combine_density(hits: &[f64], stretch: &[StretchOutcome]) -> DensityEstimate {
    let (fa, sa) = mean_and_se(hits);
    let ek: Vec<f64> = stretch.iter().map(|s| s.infinite as f64 / s.k as f64).collect();
    let (fb, sb) = mean_and_se(&ek);
    let avg = |f: &dyn Fn(&StretchOutcome) -> u64| {
        stretch.iter().map(|s| f(s) as f64 / s.k as f64).sum::<f64>() / stretch.len().max(1) as f64
    };
    DensityEstimate {
        rho_a: fa / 2.0,
        rho_a_se: sa / 2.0,
        rho_b: fb / 2.0,
        rho_b_se: sb / 2.0,
        ek_over_k: fb,
        wk_inf_over_k: avg(&|s| s.white_clusters),
        bk_inf_over_k: avg(&|s| s.black_clusters),
        max_wb_gap: stretch
            .iter()
            .map(|s| s.white_clusters.abs_diff(s.black_clusters))
            .max()
            .unwrap_or(0),
        capped: stretch.iter().any(|s| s.capped),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FullMapComparison {
    pub radius: u32,
    pub ps: Vec<f64>,
    pub reach: Vec<f64>,
    pub survival: Vec<f64>,
    /// Cap of the boundary walk: median hull boundary length.
    pub walk_cap: u64,
    pub reach_crossing: Option<f64>,
    pub survival_crossing: Option<f64>,
}

/// Linear interpolation of where an increasing curve crosses `level`.
pub fn crossing(ps: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    for w in 0..ps.len().saturating_sub(1) {
        let (y0, y1) = (ys[w], ys[w + 1]);
        if y0 < level && y1 >= level {
            return Some(ps[w] + (level - y0) / (y1 - y0) * (ps[w + 1] - ps[w]));
        }
    }
    None
}

/// Compare the probability that the root's black cluster reaches `∂B_R` in
/// built hulls (root black, every other vertex i.i.d.) with boundary-walk
/// survival over a grid of `p`.
pub fn full_map_percolation_check(
    params: &ModelParams,
    ps: &[f64],
    rng: &mut RngStream,
    radius: u32,
    replicas: u32,
    walk_trials: u64,
) -> Result<FullMapComparison> {
    require_supercritical(params)?;
    let mut reach = vec![0.0; ps.len()];
    let mut lengths = Vec::with_capacity(replicas as usize);
    let cfg = ExploreConfig::new(radius, Mode::Skeleton);
    for _ in 0..replicas {
        let ex = explore(params, &cfg, &mut RngStream::new(rng.next_u64()))?;
        if !ex.trace.is_complete() {
            return Err(Error::Degenerate("hull exploration hit a resource cap"));
        }
        lengths.push(ex.trace.rows[radius as usize].boundary_len as f64);
        let map = ex.map.unwrap();
        let n = map.vertex_count();
        let u: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let frontier = map.frontier_vertices();
        for (slot, &p) in ps.iter().enumerate() {
            let black = |v: u32| v == 0 || u[v as usize] < p;
            let mut uf = UnionFind::new(n);
            for (_, [a, b]) in map.revealed_edges() {
                if black(a) && black(b) {
                    uf.union(a, b);
                }
            }
            let root = uf.find(0);
            if frontier.iter().any(|&v| black(v) && uf.find(v) == root) {
                reach[slot] += 1.0;
            }
        }
    }
    for r in reach.iter_mut() {
        *r /= replicas as f64;
    }
    let walk_cap = (median(&mut lengths) as u64).max(2);
    let seed = rng.next_u64();
    let mut survival = Vec::with_capacity(ps.len());
    for &p in ps {
        let law = PercLaw::new(params, p)?;
        survival.push(survival_probability(&law, seed, walk_trials, walk_cap));
    }
    Ok(FullMapComparison {
        radius,
        reach_crossing: crossing(ps, &reach, 0.5),
        survival_crossing: crossing(ps, &survival, 0.5),
        ps: ps.to_vec(),
        reach,
        survival,
        walk_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{analytic_drifts, model_params};
    use proptest::prelude::*;

    fn law(alpha: f64, p: f64) -> PercLaw {
        PercLaw::new(&model_params(alpha).unwrap(), p).unwrap()
    }

    #[test]
    fn subcritical_is_refused() {
        assert!(PercLaw::new(&model_params(0.5).unwrap(), 0.5).is_err());
        assert!(estimate_pc(&model_params(0.3).unwrap(), &mut RngStream::new(0), 10, 10).is_err());
    }

    #[test]
    fn increment_law_atoms() {
        let l = law(0.8, 0.5);
        let mut r = RngStream::new(4);
        let n = 1_000_000u64;
        let mut counts = alloc::collections::BTreeMap::new();
        for _ in 0..n {
            *counts.entry(l.increment(&mut r)).or_insert(0u64) += 1;
        }
        let check = |v: i64, p: f64| {
            let c = *counts.get(&v).unwrap_or(&0) as f64;
            let sd = (n as f64 * p * (1.0 - p)).sqrt().max(1.0);
            assert!((c - n as f64 * p).abs() < 4.0 * sd, "atom {v}: {c} vs {}", n as f64 * p);
        };
        check(1, 0.4);
        for i in 1..=20 {
            check(-(i as i64), l.side_prob(i));
        }
        let zero = 1.0 - 0.4 - (0.2 / 2.0);
        check(0, zero);
    }

    #[test]
    fn mean_increment_matches_drift() {
        let l = law(0.8, 0.5);
        let mut r = RngStream::new(5);
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| l.increment(&mut r) as f64).collect();
        let (m, se) = mean_and_se(&xs);
        let target = analytic_drifts(0.8, Some(0.5)).unwrap().perc_drift.unwrap();
        assert!((m - target).abs() < 3.0 * se, "{m} vs {target}");
    }

    #[test]
    fn zero_p_never_survives() {
        let l = law(0.8, 0.0);
        assert_eq!(survival_probability(&l, 1, 2000, 50), 0.0);
        let l = law(0.8, 1.0);
        assert!(survival_probability(&l, 1, 2000, 50) > 0.5);
    }

    #[test]
    fn survival_is_monotone_with_common_numbers() {
        let mut last = 0.0;
        for n in 0..=10 {
            let p = 0.1 * n as f64;
            let s = survival_probability(&law(0.75, p), 99, 3000, 200);
            assert!(s >= last, "p {p}");
            last = s;
        }
    }

    #[test]
    fn interface_outside_window_dies() {
        let l = law(0.8, 0.05);
        let mut r = RngStream::new(6);
        let inf = (0..2000).filter(|_| interface_walk(&l, &mut r, 200, 1 << 24).infinite()).count();
        assert!(inf <= 20);
    }

    #[test]
    fn interface_color_symmetry() {
        let (a, b) = (law(0.8, 0.3), law(0.8, 0.7));
        let n = 4000;
        let fa = (0..n).filter(|&j| interface_walk(&a, &mut RngStream::for_replica(1, j), 200, 1 << 24).infinite()).count() as f64 / n as f64;
        let fb = (0..n).filter(|&j| interface_walk(&b, &mut RngStream::for_replica(2, j), 200, 1 << 24).infinite()).count() as f64 / n as f64;
        let se = ((fa * (1.0 - fa) + fb * (1.0 - fb)) / n as f64).sqrt();
        assert!((fa - fb).abs() < 3.0 * se + 1e-9, "{fa} {fb}");
    }

    #[test]
    fn stretch_two_vertices() {
        let mut st = Stretch::new(&[false, true]);
        assert_eq!(st.left_of, vec![0]);
        let mut r = RngStream::new(0);
        st.peel(0, BoundaryStep::Reveal(true), &mut r, 0.5);
        assert_eq!(st.segs[1].len, 2);
        st.peel(0, BoundaryStep::Right(1), &mut r, 0.5);
        assert_eq!(st.segs[1].len, 1);
        st.peel(0, BoundaryStep::Left(3), &mut r, 0.5);
        // whichever colour the fresh apex had, the black segment remains
        assert!(st.segs[1].len >= 1);
    }

    #[test]
    fn stretch_swallow_kills_inner_junctions() {
        // W B W B: swallowing three vertices right of the first junction
        // removes the two junctions inside the hole.
        let mut st = Stretch::new(&[false, true, false, true, true]);
        assert_eq!(st.left_of.len(), 3);
        let mut r = RngStream::new(0);
        st.peel(0, BoundaryStep::Right(2), &mut r, 0.5);
        assert_eq!(st.left_of[1], NIL);
        assert_eq!(st.left_of[2], NIL);
        assert_ne!(st.left_of[0], NIL);
        let s = st.left_of[0];
        let t = st.segs[s as usize].next;
        assert!(st.segs[t as usize].black);
        assert_eq!(st.segs[t as usize].len, 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn stretch_clusters_alternate(seed in any::<u64>(), k in 1u64..60) {
            let l = law(0.8, 0.5);
            let out = explore_stretch(&l, &mut RngStream::new(seed), k, 40, 1 << 24);
            prop_assert!(out.infinite <= out.junctions);
            prop_assert!(out.junctions <= k);
            if out.inconsistent == 0 {
                prop_assert!(out.white_clusters.abs_diff(out.black_clusters) <= 1);
                if out.infinite > 0 {
                    prop_assert_eq!(out.white_clusters + out.black_clusters, out.infinite + 1);
                }
            }
        }
    }

    #[test]
    fn full_map_extremes() {
        let params = model_params(0.7).unwrap();
        let cmp = full_map_percolation_check(&params, &[0.0, 1.0], &mut RngStream::new(3), 3, 10, 200).unwrap();
        assert_eq!(cmp.reach, vec![0.0, 1.0]);
    }
}
