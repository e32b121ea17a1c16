//! Radius-by-radius hull exploration.
//!
//! Peeling always happens at the edge right of the leftmost vertex of the
//! current hull boundary `∂B_r` still on the frontier. Once none is left the
//! next radius is complete and every frontier vertex is marked.
//!
//! The stats-only back-end keeps four counters instead of a map. Seen from
//! the peeled vertex `v`, the revealed frontier reads
//! `[a unmarked] v [c unmarked] [d marked]`, with unrevealed original
//! boundary vertices beyond both ends. Both back-ends draw random numbers in
//! the same order, so a seed yields the same trace in either.

use alloc::vec;
use alloc::vec::Vec;

use crate::analytic::ModelParams;
use crate::error::{domain, Error, Result};
use crate::map::{HalfPlaneMap, HoleFill, VertexId};
use crate::rng::RngStream;
use crate::sampler::{FreeLaw, PeelEvent, Shape, Side, StepLaw, DEFAULT_I_MAX};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    StatsOnly,
    /// Map with holes kept as counts.
    Skeleton,
    /// Map with every hole triangulated.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    MaxSteps,
    MaxVertices,
}

#[derive(Clone, Copy, Debug)]
pub struct ExploreConfig {
    pub radius: u32,
    pub mode: Mode,
    pub max_steps: u64,
    pub max_vertices: u64,
    pub record_steps: bool,
    pub i_max: u64,
}

impl ExploreConfig {
    pub fn new(radius: u32, mode: Mode) -> Self {
        ExploreConfig {
            radius,
            mode,
            max_steps: 100_000_000,
            max_vertices: if mode == Mode::StatsOnly { u64::MAX / 4 } else { 20_000_000 },
            record_steps: false,
            i_max: DEFAULT_I_MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HullRow {
    pub r: u32,
    pub tau: u64,
    pub boundary_len: u64,
    pub volume: u64,
    /// `tau_{r+1} - tau_r`, known for every row but the last.
    pub delta_tau: Option<u64>,
}

/// `X_n`, `V_n` and `S_n = V_n - X_n` after step `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub x: u64,
    pub v: u64,
    pub s: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HullTrace {
    pub alpha: f64,
    pub rows: Vec<HullRow>,
    /// Entry `n` is the state after `n` steps; entry 0 is the start.
    pub steps: Option<Vec<StepRecord>>,
    pub truncated: Option<Truncation>,
    pub truncated_draws: u64,
    pub total_steps: u64,
}

impl HullTrace {
    pub fn is_complete(&self) -> bool {
        self.truncated.is_none()
    }

    pub fn row(&self, r: u32) -> Option<&HullRow> {
        self.rows.get(r as usize)
    }
}

/// Sizes of `P_{tau_r}`: its faces and revealed vertices are id and
/// reveal-order prefixes of the final map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub faces: usize,
    pub revealed: usize,
}

#[derive(Clone, Debug)]
pub struct Exploration {
    pub trace: HullTrace,
    pub map: Option<HalfPlaneMap>,
    pub snapshots: Vec<Snapshot>,
}

trait Backend {
    /// Apply one step; returns whether the current radius completed.
    fn step(&mut self, shape: Shape, free: &FreeLaw, rng: &mut RngStream) -> Result<bool>;
    fn x(&self) -> u64;
    fn v(&self) -> u64;
    fn snapshot(&self) -> Snapshot {
        Snapshot { faces: 0, revealed: 0 }
    }
}

#[derive(Clone, Debug)]
struct Counters {
    a: u64,
    c: u64,
    d: u64,
    x: u64,
    v: u64,
}

impl Counters {
    fn new() -> Self {
        Counters { a: 0, c: 0, d: 0, x: 1, v: 1 }
    }
}

impl Backend for Counters {
    fn step(&mut self, shape: Shape, free: &FreeLaw, rng: &mut RngStream) -> Result<bool> {
        match shape {
            Shape::Alpha => {
                if self.c + self.d == 0 {
                    self.c = 2;
                    self.x += 2;
                    self.v += 2;
                } else {
                    self.c += 1;
                    self.x += 1;
                    self.v += 1;
                }
                Ok(false)
            }
            Shape::Swallow { side: Side::Right, i, .. } => {
                let k = free.sample_count(i + 1, rng);
                self.v += k;
                let right = self.c + self.d;
                if i < self.c {
                    self.c -= i;
                    self.x -= i;
                } else if i < right {
                    self.d -= i - self.c;
                    self.c = 0;
                    self.x -= i;
                } else {
                    self.v += i - right + 1;
                    self.x = self.x - right + 1;
                    self.c = 1;
                    self.d = 0;
                }
                Ok(false)
            }
            Shape::Swallow { side: Side::Left, i, .. } => {
                let k = free.sample_count(i + 1, rng);
                self.v += k;
                if self.c + self.d == 0 {
                    self.c = 1;
                    self.x += 1;
                    self.v += 1;
                }
                let inner = i - 1;
                if inner < self.a {
                    self.a -= inner;
                    self.x -= inner;
                } else {
                    self.x = self.x - self.a + 1;
                    self.v += inner - self.a + 1;
                    self.a = 1;
                }
                self.x -= 1;
                if self.d > 0 {
                    self.a += self.c;
                    self.c = 0;
                    self.d -= 1;
                    Ok(false)
                } else {
                    debug_assert_eq!(self.x, self.a + self.c);
                    self.a = 0;
                    self.c = 0;
                    self.d = self.x - 1;
                    Ok(true)
                }
            }
        }
    }

    fn x(&self) -> u64 {
        self.x
    }

    fn v(&self) -> u64 {
        self.v
    }
}

#[derive(Clone, Debug)]
struct Geometry {
    map: HalfPlaneMap,
    fill: HoleFill,
    marked: Vec<bool>,
    marked_left: u64,
    cur: VertexId,
}

impl Geometry {
    fn new(fill: HoleFill) -> Self {
        Geometry {
            map: HalfPlaneMap::new(),
            fill,
            marked: vec![true],
            marked_left: 1,
            cur: 0,
        }
    }

    fn is_marked(&self, v: VertexId) -> bool {
        self.marked.get(v as usize).copied().unwrap_or(false)
    }
}

impl Backend for Geometry {
    fn step(&mut self, shape: Shape, free: &FreeLaw, rng: &mut RngStream) -> Result<bool> {
        let event = match shape {
            Shape::Alpha => PeelEvent::AlphaStep,
            Shape::Swallow { side, i, truncated } => PeelEvent::Swallow {
                side,
                i,
                hole_internal_count: if self.fill == HoleFill::CountOnly {
                    free.sample_count(i + 1, rng)
                } else {
                    0
                },
                truncated,
            },
        };
        let out = self.map.apply_step(self.cur, &event, self.fill, free, rng)?;
        for &s in &out.swallowed {
            if self.is_marked(s) {
                self.marked_left -= 1;
            }
        }
        if self.map.is_on_frontier(self.cur) {
            return Ok(false);
        }
        if self.marked_left > 0 {
            let mut v = out.apex;
            while !self.is_marked(v) || !self.map.is_on_frontier(v) {
                v = self.map.frontier_next(v).ok_or(Error::Degenerate("marked vertex lost"))?;
            }
            self.cur = v;
            return Ok(false);
        }
        self.marked.clear();
        self.marked.resize(self.map.vertex_count(), false);
        let frontier = self.map.frontier_vertices();
        for &v in &frontier {
            self.marked[v as usize] = true;
        }
        self.marked_left = frontier.len() as u64;
        self.cur = frontier[0];
        Ok(true)
    }

    fn x(&self) -> u64 {
        self.map.frontier_len()
    }

    fn v(&self) -> u64 {
        self.map.revealed_count()
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot {
            faces: self.map.face_count(),
            revealed: self.map.revealed_order().len(),
        }
    }
}

fn run<B: Backend>(
    backend: &mut B,
    params: &ModelParams,
    cfg: &ExploreConfig,
    rng: &mut RngStream,
) -> Result<(HullTrace, Vec<Snapshot>)> {
    let mut law = StepLaw::with_i_max(*params, cfg.i_max);
    let free = FreeLaw::new(params.theta)?;
    let mut rows = vec![HullRow {
        r: 0,
        tau: 0,
        boundary_len: backend.x(),
        volume: backend.v(),
        delta_tau: None,
    }];
    let mut snapshots = vec![backend.snapshot()];
    let mut steps = cfg.record_steps.then(|| {
        vec![StepRecord {
            x: backend.x(),
            v: backend.v(),
            s: backend.v() - backend.x(),
        }]
    });
    let mut truncated = None;
    let mut n = 0u64;
    let mut r = 0u32;
    while r < cfg.radius {
        if n >= cfg.max_steps {
            truncated = Some(Truncation::MaxSteps);
            break;
        }
        if backend.v() > cfg.max_vertices {
            truncated = Some(Truncation::MaxVertices);
            break;
        }
        let shape = law.draw(rng);
        let done = backend.step(shape, &free, rng)?;
        n += 1;
        let (x, v) = (backend.x(), backend.v());
        if let Some(s) = steps.as_mut() {
            s.push(StepRecord { x, v, s: v - x });
        }
        if done {
            r += 1;
            let last = rows.last_mut().unwrap();
            last.delta_tau = Some(n - last.tau);
            rows.push(HullRow {
                r,
                tau: n,
                boundary_len: x,
                volume: v,
                delta_tau: None,
            });
            snapshots.push(backend.snapshot());
        }
    }
    let trace = HullTrace {
        alpha: params.alpha,
        rows,
        steps,
        truncated,
        truncated_draws: law.truncated_draws(),
        total_steps: n,
    };
    Ok((trace, snapshots))
}

/// Explore hulls of radius `0..=cfg.radius`.
pub fn explore(params: &ModelParams, cfg: &ExploreConfig, rng: &mut RngStream) -> Result<Exploration> {
    if cfg.radius < 1 {
        return Err(domain("radius", cfg.radius as f64, "R >= 1"));
    }
    match cfg.mode {
        Mode::StatsOnly => {
            let mut b = Counters::new();
            let (trace, _) = run(&mut b, params, cfg, rng)?;
            Ok(Exploration {
                trace,
                map: None,
                snapshots: Vec::new(),
            })
        }
        Mode::Skeleton | Mode::Full => {
            let fill = if cfg.mode == Mode::Full { HoleFill::Joint } else { HoleFill::CountOnly };
            let mut b = Geometry::new(fill);
            let (trace, snapshots) = run(&mut b, params, cfg, rng)?;
            Ok(Exploration {
                trace,
                map: Some(b.map),
                snapshots,
            })
        }
    }
}

/// Partial sums `sum_{k=1}^{r} 1 / (2 delta_tau_k)` over every radius whose
/// increment is known.
pub fn resistance_lower_bound(trace: &HullTrace) -> Vec<f64> {
    let mut acc = 0.0;
    trace
        .rows
        .iter()
        .skip(1)
        .map_while(|row| row.delta_tau)
        .map(|dt| {
            acc += 0.5 / dt as f64;
            acc
        })
        .collect()
}

/// Average of `(tau_R - tau_{R/2}) / (R - R/2)` over subcritical replicas.
pub fn stationary_gamma(params: &ModelParams, replicas: u32, radius: u32, rng: &mut RngStream) -> Result<f64> {
    if params.alpha >= crate::analytic::ALPHA_CRITICAL {
        return Err(domain("alpha", params.alpha, "alpha < 2/3"));
    }
    if radius < 2 || replicas == 0 {
        return Err(domain("radius", radius as f64, "R >= 2 and at least one replica"));
    }
    let half = radius / 2;
    let cfg = ExploreConfig::new(radius, Mode::StatsOnly);
    let mut sum = 0.0;
    for _ in 0..replicas {
        let mut stream = RngStream::new(rng.next_u64());
        let ex = explore(params, &cfg, &mut stream)?;
        let rows = &ex.trace.rows;
        if !ex.trace.is_complete() {
            return Err(Error::Degenerate("exploration hit a resource cap"));
        }
        sum += (rows[radius as usize].tau - rows[half as usize].tau) as f64 / (radius - half) as f64;
    }
    Ok(sum / replicas as f64)
}
