//! Explicit finite portion of a half-planar triangulation under peeling.
//!
//! Vertices, edges and faces are creation-ordered ids. The frontier is a
//! doubly linked chain over the infinite original boundary, materialized
//! lazily on both sides. Faces store both their vertices and their edges so
//! that parallel edges stay distinct.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::analytic::ln_phi;
use crate::error::{Error, Result};
use crate::graph::{Graph, UnionFind};
use crate::rng::RngStream;
use crate::sampler::{Decision, FreeLaw, PeelEvent, Side};

pub type VertexId = u32;
pub type EdgeId = u32;
pub type FaceId = u32;
pub const NIL: u32 = u32::MAX;
const INTERNAL: i64 = i64::MIN;

/// How a swallowed hole is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HoleFill {
    /// Keep only the pre-sampled internal count.
    CountOnly,
    /// Build geometry realizing the pre-sampled count exactly.
    Conditioned,
    /// Draw geometry and count together; the event's count is ignored.
    Joint,
}

/// A hole kept as a count: its boundary cycle as `(vertex, edge to next)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonHole {
    pub boundary: Vec<(VertexId, EdgeId)>,
    pub internal_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub face: FaceId,
    pub apex: VertexId,
    pub hole_count: u64,
    /// Frontier vertices removed by the step, in frontier order.
    pub swallowed: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HullSets {
    pub vertices: Vec<VertexId>,
    pub faces: Vec<FaceId>,
}

type Poly = VecDeque<(VertexId, EdgeId)>;

#[derive(Clone, Debug)]
pub struct HalfPlaneMap {
    boundary: Vec<i64>,
    revealed: Vec<bool>,
    on_chain: Vec<bool>,
    prev: Vec<u32>,
    next: Vec<u32>,
    next_edge: Vec<u32>,
    edge_ends: Vec<[VertexId; 2]>,
    edge_faces: Vec<[FaceId; 2]>,
    edge_original: Vec<bool>,
    face_vertices: Vec<[VertexId; 3]>,
    face_edges: Vec<[EdgeId; 3]>,
    left_end: VertexId,
    right_end: VertexId,
    left_index: i64,
    right_index: i64,
    root_edge: EdgeId,
    holes: Vec<PolygonHole>,
    hidden_internal: u64,
    revealed_order: Vec<VertexId>,
    frontier_len: u64,
    steps: u64,
    alpha_steps: u64,
    hole_count_total: u64,
}

impl Default for HalfPlaneMap {
    fn default() -> Self {
        Self::new()
    }
}

impl HalfPlaneMap {
    /// The root vertex `b_0` revealed, with the root edge to `b_1`.
    pub fn new() -> Self {
        let mut m = HalfPlaneMap {
            boundary: Vec::new(),
            revealed: Vec::new(),
            on_chain: Vec::new(),
            prev: Vec::new(),
            next: Vec::new(),
            next_edge: Vec::new(),
            edge_ends: Vec::new(),
            edge_faces: Vec::new(),
            edge_original: Vec::new(),
            face_vertices: Vec::new(),
            face_edges: Vec::new(),
            left_end: 0,
            right_end: 1,
            left_index: 0,
            right_index: 1,
            root_edge: 0,
            holes: Vec::new(),
            hidden_internal: 0,
            revealed_order: Vec::new(),
            frontier_len: 0,
            steps: 0,
            alpha_steps: 0,
            hole_count_total: 0,
        };
        let b0 = m.new_vertex(0);
        let b1 = m.new_vertex(1);
        m.on_chain[b0 as usize] = true;
        m.on_chain[b1 as usize] = true;
        m.root_edge = m.new_edge(b0, b1, true);
        m.link(b0, b1, m.root_edge);
        m.reveal(b0);
        m
    }

    // ---- construction primitives ----

    fn new_vertex(&mut self, boundary: i64) -> VertexId {
        let id = self.boundary.len() as u32;
        self.boundary.push(boundary);
        self.revealed.push(false);
        self.on_chain.push(false);
        self.prev.push(NIL);
        self.next.push(NIL);
        self.next_edge.push(NIL);
        id
    }

    fn new_edge(&mut self, a: VertexId, b: VertexId, original: bool) -> EdgeId {
        debug_assert_ne!(a, b, "self-loop");
        let id = self.edge_ends.len() as u32;
        self.edge_ends.push([a, b]);
        self.edge_faces.push([NIL, NIL]);
        self.edge_original.push(original);
        id
    }

    fn new_face(&mut self, v: [VertexId; 3], e: [EdgeId; 3]) -> FaceId {
        debug_assert!(v[0] != v[1] && v[1] != v[2] && v[0] != v[2]);
        let id = self.face_vertices.len() as u32;
        for &edge in &e {
            let slot = &mut self.edge_faces[edge as usize];
            if slot[0] == NIL {
                slot[0] = id;
            } else {
                debug_assert_eq!(slot[1], NIL, "edge with three faces");
                slot[1] = id;
            }
        }
        self.face_vertices.push(v);
        self.face_edges.push(e);
        id
    }

    fn link(&mut self, a: VertexId, b: VertexId, e: EdgeId) {
        self.next[a as usize] = b;
        self.prev[b as usize] = a;
        self.next_edge[a as usize] = e;
    }

    fn reveal(&mut self, v: VertexId) {
        if !self.revealed[v as usize] {
            self.revealed[v as usize] = true;
            self.revealed_order.push(v);
            if self.on_chain[v as usize] {
                self.frontier_len += 1;
            }
        }
    }

    fn unchain(&mut self, v: VertexId) {
        let i = v as usize;
        self.on_chain[i] = false;
        self.prev[i] = NIL;
        self.next[i] = NIL;
        self.next_edge[i] = NIL;
        if self.revealed[i] {
            self.frontier_len -= 1;
        }
    }

    fn right_of(&mut self, v: VertexId) -> VertexId {
        if v == self.right_end {
            self.right_index += 1;
            let w = self.new_vertex(self.right_index);
            self.on_chain[w as usize] = true;
            let e = self.new_edge(v, w, true);
            self.link(v, w, e);
            self.right_end = w;
        }
        self.next[v as usize]
    }

    fn left_of(&mut self, v: VertexId) -> VertexId {
        if v == self.left_end {
            self.left_index -= 1;
            let w = self.new_vertex(self.left_index);
            self.on_chain[w as usize] = true;
            let e = self.new_edge(w, v, true);
            self.link(w, v, e);
            self.left_end = w;
        }
        self.prev[v as usize]
    }

    // ---- queries ----

    pub fn root(&self) -> (VertexId, VertexId) {
        (0, 1)
    }

    pub fn root_edge(&self) -> EdgeId {
        self.root_edge
    }

    /// Leftmost frontier edge incident to a revealed face, the edge the
    /// unexplored part is rooted at.
    pub fn unexplored_root_edge(&self) -> Option<EdgeId> {
        let mut v = self.left_end;
        while v != NIL && self.next[v as usize] != NIL {
            let e = self.next_edge[v as usize];
            if self.edge_faces[e as usize][0] != NIL {
                return Some(e);
            }
            v = self.next[v as usize];
        }
        None
    }

    pub fn vertex_count(&self) -> usize {
        self.boundary.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_ends.len()
    }

    pub fn face_count(&self) -> usize {
        self.face_vertices.len()
    }

    pub fn faces(&self) -> &[[VertexId; 3]] {
        &self.face_vertices
    }

    pub fn face_edges(&self) -> &[[EdgeId; 3]] {
        &self.face_edges
    }

    pub fn edge_ends(&self, e: EdgeId) -> [VertexId; 2] {
        self.edge_ends[e as usize]
    }

    pub fn edge_is_revealed(&self, e: EdgeId) -> bool {
        self.edge_faces[e as usize][0] != NIL
    }

    pub fn is_revealed(&self, v: VertexId) -> bool {
        self.revealed[v as usize]
    }

    pub fn is_on_frontier(&self, v: VertexId) -> bool {
        self.on_chain[v as usize]
    }

    pub fn boundary_index(&self, v: VertexId) -> Option<i64> {
        let b = self.boundary[v as usize];
        (b != INTERNAL).then_some(b)
    }

    /// Revealed vertices in the order they were revealed.
    pub fn revealed_order(&self) -> &[VertexId] {
        &self.revealed_order
    }

    /// Revealed vertices including those inside count-only holes.
    pub fn revealed_count(&self) -> u64 {
        self.revealed_order.len() as u64 + self.hidden_internal
    }

    /// Number of revealed vertices on the frontier.
    pub fn frontier_len(&self) -> u64 {
        self.frontier_len
    }

    pub fn frontier_next(&self, v: VertexId) -> Option<VertexId> {
        let w = self.next[v as usize];
        (w != NIL).then_some(w)
    }

    pub fn leftmost_revealed(&self) -> VertexId {
        let mut v = self.left_end;
        while !self.revealed[v as usize] {
            v = self.next[v as usize];
        }
        v
    }

    /// Revealed frontier vertices from left to right.
    pub fn frontier_vertices(&self) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut v = self.left_end;
        while v != NIL {
            if self.revealed[v as usize] {
                out.push(v);
            }
            v = self.next[v as usize];
        }
        out
    }

    pub fn holes(&self) -> &[PolygonHole] {
        &self.holes
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn alpha_steps(&self) -> u64 {
        self.alpha_steps
    }

    pub fn hole_count_total(&self) -> u64 {
        self.hole_count_total
    }

    /// Original boundary vertices that have been revealed.
    pub fn revealed_original_count(&self) -> u64 {
        self.revealed_order.iter().filter(|&&v| self.boundary[v as usize] != INTERNAL).count() as u64
    }

    /// Edges incident to at least one revealed face, in creation order.
    pub fn revealed_edges(&self) -> impl Iterator<Item = (EdgeId, [VertexId; 2])> + '_ {
        self.edge_ends
            .iter()
            .enumerate()
            .filter(move |(e, _)| self.edge_faces[*e][0] != NIL)
            .map(|(e, &ends)| (e as u32, ends))
    }

    /// Graph over all vertex ids with the revealed edges.
    pub fn graph(&self) -> Graph {
        Graph::from_edges(
            self.vertex_count(),
            self.revealed_edges().map(|(_, [a, b])| (a, b)).collect(),
        )
    }

    fn frontier_edge_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.edge_count()];
        let mut v = self.left_end;
        while v != NIL && self.next[v as usize] != NIL {
            mask[self.next_edge[v as usize] as usize] = true;
            v = self.next[v as usize];
        }
        mask
    }

    // ---- peeling ----

    /// Peel the frontier edge from `at` to its right neighbour.
    pub fn apply_step(
        &mut self,
        at: VertexId,
        event: &PeelEvent,
        fill: HoleFill,
        free: &FreeLaw,
        rng: &mut RngStream,
    ) -> Result<StepOutcome> {
        if at as usize >= self.vertex_count() || !self.on_chain[at as usize] {
            return Err(Error::NotOnFrontier(at));
        }
        self.steps += 1;
        match *event {
            PeelEvent::AlphaStep => Ok(self.alpha_step(at)),
            PeelEvent::Swallow {
                side,
                i,
                hole_internal_count,
                ..
            } => self.swallow(at, side, i, hole_internal_count, fill, free, rng),
        }
    }

    fn alpha_step(&mut self, at: VertexId) -> StepOutcome {
        self.alpha_steps += 1;
        let w = self.right_of(at);
        let e = self.next_edge[at as usize];
        let x = self.new_vertex(INTERNAL);
        self.on_chain[x as usize] = true;
        let e1 = self.new_edge(at, x, false);
        let e2 = self.new_edge(x, w, false);
        let face = self.new_face([at, w, x], [e, e2, e1]);
        self.link(at, x, e1);
        self.link(x, w, e2);
        self.reveal(at);
        self.reveal(w);
        self.reveal(x);
        StepOutcome {
            face,
            apex: x,
            hole_count: 0,
            swallowed: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn swallow(
        &mut self,
        at: VertexId,
        side: Side,
        i: u64,
        count: u64,
        fill: HoleFill,
        free: &FreeLaw,
        rng: &mut RngStream,
    ) -> Result<StepOutcome> {
        assert!(i >= 1);
        let w = self.right_of(at);
        let e_peel = self.next_edge[at as usize];
        // Hole cycle as (vertex, edge to next); the closing edge comes last.
        let mut poly: Poly = VecDeque::with_capacity(i as usize + 1);
        let apex;
        let mut swallowed = Vec::with_capacity(i as usize);
        match side {
            Side::Right => {
                let mut cur = w;
                for _ in 0..i {
                    let nxt = self.right_of(cur);
                    poly.push_back((cur, self.next_edge[cur as usize]));
                    cur = nxt;
                }
                poly.push_back((cur, NIL));
                apex = cur;
                swallowed.extend(poly.iter().take(i as usize).map(|&(v, _)| v));
            }
            Side::Left => {
                poly.push_front((at, NIL));
                let mut cur = at;
                for _ in 0..i {
                    cur = self.left_of(cur);
                    poly.push_front((cur, self.next_edge[cur as usize]));
                }
                apex = cur;
                swallowed.extend(poly.iter().skip(1).map(|&(v, _)| v));
            }
        }
        for &(v, _) in poly.iter() {
            self.reveal(v);
        }
        self.reveal(at);
        self.reveal(w);

        let m = poly.len() as u64;
        let glued = m == 2
            && match fill {
                HoleFill::Joint => free.closes_empty(rng),
                _ => count == 0,
            };
        let (first, last) = (poly[0].0, poly[poly.len() - 1].0);
        let h = if glued { poly[0].1 } else { self.new_edge(last, first, false) };
        poly.back_mut().unwrap().1 = h;

        let face = match side {
            Side::Right => {
                let e_new = self.new_edge(at, apex, false);
                let f = self.new_face([at, w, apex], [e_peel, h, e_new]);
                for &v in &swallowed {
                    self.unchain(v);
                }
                self.link(at, apex, e_new);
                f
            }
            Side::Left => {
                let e_new = self.new_edge(apex, w, false);
                let f = self.new_face([apex, at, w], [h, e_peel, e_new]);
                for &v in &swallowed {
                    self.unchain(v);
                }
                self.link(apex, w, e_new);
                if self.left_end == at {
                    self.left_end = apex;
                }
                f
            }
        };
        if side == Side::Right && swallowed.contains(&self.right_end) {
            self.right_end = apex;
        }

        let hole_count = if glued {
            0
        } else {
            match fill {
                HoleFill::CountOnly => {
                    self.hidden_internal += count;
                    self.holes.push(PolygonHole {
                        boundary: poly.into_iter().collect(),
                        internal_count: count,
                    });
                    count
                }
                HoleFill::Joint => self.fill_joint(poly, free, rng),
                HoleFill::Conditioned => self.fill_conditioned(poly, count, rng),
            }
        };
        self.hole_count_total += hole_count;
        Ok(StepOutcome {
            face,
            apex,
            hole_count,
            swallowed,
        })
    }

    // ---- hole filling ----

    fn internal_apex(&mut self, d: &mut Poly) {
        let (x0, e0) = d.pop_front().unwrap();
        let x1 = d.front().unwrap().0;
        let y = self.new_vertex(INTERNAL);
        self.reveal(y);
        let a = self.new_edge(x0, y, false);
        let b = self.new_edge(y, x1, false);
        self.new_face([x0, x1, y], [e0, b, a]);
        d.push_front((y, b));
        d.push_front((x0, a));
    }

    /// Triangle on the root edge with apex `x_j`; returns the two pieces,
    /// extracting the smaller one so the cost is proportional to it.
    fn split(&mut self, mut d: Poly, j: usize, fill_left: bool, fill_right: bool) -> (Poly, Poly) {
        let m = d.len();
        let (x0, e0) = d[0];
        let x1 = d[1].0;
        let xj = d[j].0;
        let c_left = if j == 2 && !fill_left { d[1].1 } else { self.new_edge(xj, x1, false) };
        let c_right = if j == m - 1 && !fill_right { d[m - 1].1 } else { self.new_edge(x0, xj, false) };
        self.new_face([x0, x1, xj], [e0, c_left, c_right]);
        if j - 1 <= m - j {
            d.pop_front();
            let mut left: Poly = VecDeque::with_capacity(j);
            for _ in 0..j - 1 {
                left.push_back(d.pop_front().unwrap());
            }
            left.push_back((xj, c_left));
            d.push_back((x0, c_right));
            (left, d)
        } else {
            let mut right: Poly = VecDeque::with_capacity(m - j + 1);
            for _ in 0..m - j {
                right.push_front(d.pop_back().unwrap());
            }
            right.push_back((x0, c_right));
            d.pop_front();
            d.push_back((xj, c_left));
            (d, right)
        }
    }

    /// Free triangulation of a polygon that needs at least one face. Draws
    /// random numbers in the same order as [`FreeLaw::sample_count`].
    fn fill_joint(&mut self, poly: Poly, free: &FreeLaw, rng: &mut RngStream) -> u64 {
        let mut count = 0;
        let mut stack = vec![poly];
        while let Some(mut d) = stack.pop() {
            if d.len() == 2 {
                self.internal_apex(&mut d);
                count += 1;
            }
            loop {
                let m = d.len() as u64;
                match free.decide(m, rng) {
                    Decision::Internal => {
                        self.internal_apex(&mut d);
                        count += 1;
                    }
                    Decision::Split(s) => {
                        let fill_left = free.needs_faces(s + 1, rng);
                        let fill_right = free.needs_faces(m - s, rng);
                        let (left, right) = self.split(d, s as usize + 1, fill_left, fill_right);
                        if fill_left {
                            stack.push(left);
                        }
                        if fill_right {
                            stack.push(right);
                        }
                        break;
                    }
                }
            }
        }
        count
    }

    /// Free triangulation conditioned on exactly `target` internal vertices.
    /// Each decision weighs all `O(m * target)` options; meant for small holes.
    fn fill_conditioned(&mut self, poly: Poly, target: u64, rng: &mut RngStream) -> u64 {
        let mut stack = vec![(poly, target)];
        let mut options: Vec<(f64, u64, u64)> = Vec::new();
        while let Some((mut d, mut n)) = stack.pop() {
            loop {
                let m = d.len() as u64;
                if m == 2 {
                    debug_assert!(n > 0);
                    self.internal_apex(&mut d);
                    n -= 1;
                    continue;
                }
                let base = ln_phi(n, m);
                options.clear();
                if n > 0 {
                    options.push((libm::exp(ln_phi(n - 1, m + 1) - base), 0, 0));
                }
                for s in 1..=m - 2 {
                    for n1 in 0..=n {
                        let w = libm::exp(ln_phi(n1, s + 1) + ln_phi(n - n1, m - s) - base);
                        options.push((w, s, n1));
                    }
                }
                let total: f64 = options.iter().map(|o| o.0).sum();
                let mut u = rng.uniform() * total;
                let mut pick = options[options.len() - 1];
                for &o in options.iter() {
                    if u < o.0 {
                        pick = o;
                        break;
                    }
                    u -= o.0;
                }
                let (_, s, n1) = pick;
                if s == 0 {
                    self.internal_apex(&mut d);
                    n -= 1;
                    continue;
                }
                let (a, b) = (s + 1, m - s);
                let fill_left = a != 2 || n1 > 0;
                let fill_right = b != 2 || n - n1 > 0;
                let (left, right) = self.split(d, s as usize + 1, fill_left, fill_right);
                if fill_left {
                    stack.push((left, n1));
                }
                if fill_right {
                    stack.push((right, n - n1));
                }
                break;
            }
        }
        target
    }

    /// Replace every count-only hole by geometry realizing its count.
    pub fn fill_recorded_holes(&mut self, rng: &mut RngStream) {
        let holes = core::mem::take(&mut self.holes);
        for hole in holes {
            self.hidden_internal -= hole.internal_count;
            self.fill_conditioned(hole.boundary.into_iter().collect(), hole.internal_count, rng);
        }
    }

    // ---- hulls and cuts ----

    /// Hull of radius `r` around the root vertex: faces with a vertex at
    /// distance `< r`, plus every finite component of their complement.
    pub fn bfs_hull(&self, r: u32) -> Result<HullSets> {
        self.bfs_hulls(r).map(|mut v| v.pop().unwrap_or_default())
    }

    /// Hulls of radius `1..=r_max`, sharing one BFS.
    pub fn bfs_hulls(&self, r_max: u32) -> Result<Vec<HullSets>> {
        if !self.holes.is_empty() {
            return Err(Error::MissingGeometry);
        }
        let dist = self.graph().bfs(0);
        let on_frontier_edge = self.frontier_edge_mask();
        let nf = self.face_count();
        let face_min: Vec<u32> = self
            .face_vertices
            .iter()
            .map(|f| f.iter().map(|&v| dist[v as usize]).min().unwrap())
            .collect();
        let mut out = Vec::with_capacity(r_max as usize);
        for r in 1..=r_max {
            for v in self.frontier_vertices() {
                let d = dist[v as usize];
                if d < r {
                    return Err(Error::InsufficientExploration { radius: r, distance: d });
                }
            }
            let in_ball_face: Vec<bool> = face_min.iter().map(|&d| d < r).collect();
            let mut in_ball_vertex = vec![false; self.vertex_count()];
            for (f, vs) in self.face_vertices.iter().enumerate() {
                if in_ball_face[f] {
                    for &v in vs {
                        in_ball_vertex[v as usize] = true;
                    }
                }
            }
            let mut uf = UnionFind::new(nf);
            for faces in &self.edge_faces {
                let [a, b] = *faces;
                if a != NIL && b != NIL && !in_ball_face[a as usize] && !in_ball_face[b as usize] {
                    uf.union(a, b);
                }
            }
            let mut infinite = vec![false; nf];
            for f in 0..nf {
                if in_ball_face[f] {
                    continue;
                }
                let touches = self.face_edges[f].iter().any(|&e| on_frontier_edge[e as usize])
                    || self.face_vertices[f]
                        .iter()
                        .any(|&v| self.on_chain[v as usize] && !in_ball_vertex[v as usize]);
                if touches {
                    let root = uf.find(f as u32);
                    infinite[root as usize] = true;
                }
            }
            let mut faces = Vec::new();
            let mut vmask = vec![false; self.vertex_count()];
            for f in 0..nf {
                let keep = in_ball_face[f] || !infinite[uf.find(f as u32) as usize];
                if keep {
                    faces.push(f as u32);
                    for &v in &self.face_vertices[f] {
                        vmask[v as usize] = true;
                    }
                }
            }
            let vertices = (0..self.vertex_count() as u32).filter(|&v| vmask[v as usize]).collect();
            out.push(HullSets { vertices, faces });
        }
        Ok(out)
    }

    /// Edges whose two endpoints separate the root vertex from the frontier.
    /// In a peeled map these are exactly the revealed chords joining an
    /// original vertex left of the root to one right of it.
    pub fn find_root_cutedges(&self) -> Vec<EdgeId> {
        self.revealed_edges()
            .filter(|&(_, [a, b])| {
                let (x, y) = (self.boundary[a as usize], self.boundary[b as usize]);
                x != INTERNAL && y != INTERNAL && ((x < 0 && y > 0) || (x > 0 && y < 0))
            })
            .map(|(e, _)| e)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::model_params;
    use crate::graph::separating_edges;
    use crate::sampler::{sample_step, StepLaw};
    use proptest::prelude::*;

    fn free(theta: f64) -> FreeLaw {
        FreeLaw::new(theta).unwrap()
    }

    fn sw(side: Side, i: u64, k: u64) -> PeelEvent {
        PeelEvent::Swallow {
            side,
            i,
            hole_internal_count: k,
            truncated: false,
        }
    }

    fn check_invariants(m: &HalfPlaneMap) {
        // frontier is a simple path with consistent links
        let mut seen = alloc::collections::BTreeSet::new();
        let mut v = m.left_end;
        let mut count = 0;
        while v != NIL {
            assert!(seen.insert(v));
            assert!(m.on_chain[v as usize]);
            let w = m.next[v as usize];
            if w != NIL {
                assert_eq!(m.prev[w as usize], v);
                let [a, b] = m.edge_ends[m.next_edge[v as usize] as usize];
                assert!((a, b) == (v, w) || (a, b) == (w, v));
            } else {
                assert_eq!(v, m.right_end);
            }
            if m.revealed[v as usize] {
                count += 1;
            }
            v = w;
        }
        assert_eq!(count, m.frontier_len);
        assert_eq!(seen.len(), m.on_chain.iter().filter(|&&c| c).count());
        for ends in &m.edge_ends {
            assert_ne!(ends[0], ends[1]);
        }
        for (f, vs) in m.face_vertices.iter().enumerate() {
            assert!(vs[0] != vs[1] && vs[1] != vs[2] && vs[0] != vs[2]);
            for &e in &m.face_edges[f] {
                let [a, b] = m.edge_ends[e as usize];
                assert!(vs.contains(&a) && vs.contains(&b));
                assert!(m.edge_faces[e as usize].contains(&(f as u32)));
            }
        }
        // accounting
        let revealed_originals = m.revealed_original_count();
        assert_eq!(m.revealed_count(), revealed_originals + m.alpha_steps + m.hole_count_total);
        // Euler on the revealed disk: V - E + F = 1 over revealed vertices/edges/faces
        if m.holes.is_empty() && m.face_count() > 0 {
            let v = m.revealed_order.len() as i64;
            let e = m.revealed_edges().count() as i64;
            let f = m.face_count() as i64;
            assert_eq!(v - e + f, 1);
        }
    }

    #[test]
    fn alpha_step_adds_one_vertex_and_face() {
        let mut m = HalfPlaneMap::new();
        let mut r = RngStream::new(1);
        let f = free(0.1);
        assert_eq!(m.revealed_edges().count(), 0);
        let before = m.frontier_len();
        m.apply_step(0, &PeelEvent::AlphaStep, HoleFill::Joint, &f, &mut r).unwrap();
        assert_eq!(m.face_count(), 1);
        assert_eq!(m.frontier_len(), before + 2); // b_1 joins P as well
        assert_eq!(m.revealed_edges().count(), 3);
        let x = m.apply_step(0, &PeelEvent::AlphaStep, HoleFill::Joint, &f, &mut r).unwrap();
        assert_eq!(m.frontier_len(), 4);
        assert_eq!(x.apex, 3);
        check_invariants(&m);
    }

    #[test]
    fn empty_right_one_glues() {
        let mut m = HalfPlaneMap::new();
        let mut r = RngStream::new(1);
        let f = free(0.1);
        m.apply_step(0, &PeelEvent::AlphaStep, HoleFill::Joint, &f, &mut r).unwrap();
        let (v0, e0, x0) = (m.vertex_count(), m.edge_count(), m.frontier_len());
        let out = m.apply_step(0, &sw(Side::Right, 1, 0), HoleFill::CountOnly, &f, &mut r).unwrap();
        assert_eq!(m.face_count(), 2);
        assert_eq!(m.frontier_len(), x0 - 1);
        assert_eq!(m.vertex_count(), v0);
        assert_eq!(m.edge_count(), e0 + 1);
        assert_eq!(out.swallowed, vec![2]);
        check_invariants(&m);
    }

    #[test]
    fn right_three_filled_obeys_euler() {
        let f = free(0.1);
        for seed in 0..50 {
            let mut m = HalfPlaneMap::new();
            let mut r = RngStream::new(seed);
            for _ in 0..4 {
                m.apply_step(0, &PeelEvent::AlphaStep, HoleFill::Joint, &f, &mut r).unwrap();
            }
            let (v0, x0, faces0, e0) = (m.revealed_count(), m.frontier_len(), m.face_count(), m.edge_count());
            let k = seed % 4;
            let out = m.apply_step(0, &sw(Side::Right, 3, k), HoleFill::Conditioned, &f, &mut r).unwrap();
            assert_eq!(out.hole_count, k);
            assert_eq!(m.revealed_count(), v0 + k);
            assert_eq!(m.frontier_len(), x0 - 3);
            // hole disk: 4 boundary vertices, k internal, faces 2k + 2
            let hole_faces = m.face_count() - faces0 - 1;
            assert_eq!(hole_faces as u64, 2 * k + 2);
            let new_edges = (m.edge_count() - e0) as i64 - 1; // minus the new frontier edge
            let hole_v = 4 + k as i64;
            let hole_e = 3 + new_edges; // three swallowed frontier edges plus new ones
            assert_eq!(hole_v - hole_e + (hole_faces as i64 + 1), 2);
            check_invariants(&m);
        }
    }

    #[test]
    fn left_steps_extend_boundary_lazily() {
        let f = free(0.0);
        let mut m = HalfPlaneMap::new();
        let mut r = RngStream::new(3);
        let out = m.apply_step(0, &sw(Side::Left, 3, 0), HoleFill::Joint, &f, &mut r).unwrap();
        assert_eq!(m.boundary_index(out.apex), Some(-3));
        assert_eq!(out.swallowed.len(), 3);
        assert_eq!(m.frontier_len(), 2);
        assert_eq!(m.leftmost_revealed(), out.apex);
        let out = m.apply_step(out.apex, &sw(Side::Right, 5, 0), HoleFill::Joint, &f, &mut r).unwrap();
        assert_eq!(m.boundary_index(out.apex), Some(6));
        check_invariants(&m);
        assert_eq!(m.find_root_cutedges().len(), 2);
    }

    #[test]
    fn quadrilateral_diagonals_are_uniform() {
        let f = free(0.0);
        let mut r = RngStream::new(5);
        let n = 100_000;
        let mut first = 0;
        for _ in 0..n {
            let mut m = HalfPlaneMap::new();
            // (R,3) encloses the 4-gon b_1 b_2 b_3 b_4
            m.apply_step(0, &sw(Side::Right, 3, 0), HoleFill::Joint, &f, &mut r).unwrap();
            assert_eq!(m.face_count(), 3);
            let diag_13 = m.revealed_edges().any(|(_, [a, b])| {
                let (x, y) = (m.boundary_index(a).unwrap(), m.boundary_index(b).unwrap());
                (x.min(y), x.max(y)) == (1, 3)
            });
            first += diag_13 as u32;
        }
        let sd = (n as f64 * 0.25).sqrt();
        assert!((first as f64 - n as f64 / 2.0).abs() < 3.0 * sd, "{first}");
    }

    #[test]
    fn triangle_hole_empty_frequency() {
        let f = free(0.1);
        let mut r = RngStream::new(6);
        let n = 1_000_000;
        let mut empty = 0;
        for _ in 0..n {
            let mut m = HalfPlaneMap::new();
            let out = m.apply_step(0, &sw(Side::Right, 2, 0), HoleFill::Joint, &f, &mut r).unwrap();
            empty += (out.hole_count == 0) as u32;
        }
        let p = 1.0 / 1.464_843_75;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        assert!((empty as f64 - n as f64 * p).abs() < 3.0 * sd);
    }

    #[test]
    fn joint_fill_matches_count_sampler_stream() {
        let f = free(0.13);
        for seed in 0..200 {
            let mut r1 = RngStream::new(seed);
            let mut r2 = RngStream::new(seed);
            let m_gon = 2 + seed % 12;
            let count = f.sample_count(m_gon, &mut r1);
            let mut m = HalfPlaneMap::new();
            let out = m
                .apply_step(0, &sw(Side::Right, m_gon - 1, 0), HoleFill::Joint, &f, &mut r2)
                .unwrap();
            assert_eq!(out.hole_count, count);
            assert_eq!(r1.next_u64(), r2.next_u64());
            assert_eq!(m.face_count() as u64, 1 + if m_gon == 2 && count == 0 { 0 } else { 2 * count + m_gon - 2 });
            check_invariants(&m);
        }
    }

    #[test]
    fn recorded_holes_fill_later() {
        let p = model_params(0.3).unwrap();
        let mut law = StepLaw::with_i_max(p, 30);
        let f = free(p.theta);
        let mut r = RngStream::new(12);
        let mut m = HalfPlaneMap::new();
        for _ in 0..40 {
            let ev = sample_step(&mut law, &f, &mut r);
            let at = m.leftmost_revealed();
            m.apply_step(at, &ev, HoleFill::CountOnly, &f, &mut r).unwrap();
        }
        let before = m.revealed_count();
        assert!(m.bfs_hull(1).is_err());
        m.fill_recorded_holes(&mut r);
        assert_eq!(m.revealed_count(), before);
        assert!(m.holes().is_empty());
        check_invariants(&m);
    }

    #[test]
    fn two_triangle_cut_both_routes() {
        let f = free(0.0);
        let mut r = RngStream::new(0);
        let mut m = HalfPlaneMap::new();
        // (L,1) with empty 2-gon: triangle (b_-1, b_0, b_1); then an alpha step above it
        m.apply_step(0, &sw(Side::Left, 1, 0), HoleFill::Joint, &f, &mut r).unwrap();
        let left = m.leftmost_revealed();
        m.apply_step(left, &PeelEvent::AlphaStep, HoleFill::Joint, &f, &mut r).unwrap();
        assert_eq!(m.face_count(), 2);
        let cuts = m.find_root_cutedges();
        assert_eq!(cuts.len(), 1);
        let [a, b] = m.edge_ends(cuts[0]);
        let mut idx = [m.boundary_index(a).unwrap(), m.boundary_index(b).unwrap()];
        idx.sort();
        assert_eq!(idx, [-1, 1]);
        let g = m.graph();
        let brute = separating_edges(&g, 0, &m.frontier_vertices());
        let brute_pairs: Vec<_> = brute.iter().map(|&e| g.edges()[e as usize]).collect();
        assert_eq!(brute_pairs, vec![(a, b)]);
    }

    fn random_map(alpha: f64, steps: usize, seed: u64, fill: HoleFill) -> HalfPlaneMap {
        let p = model_params(alpha).unwrap();
        let mut law = StepLaw::with_i_max(p, 40);
        let f = free(p.theta);
        let mut r = RngStream::new(seed);
        let mut m = HalfPlaneMap::new();
        for _ in 0..steps {
            let ev = sample_step(&mut law, &f, &mut r);
            let fr = m.frontier_vertices();
            let at = fr[r.below(fr.len() as u64) as usize];
            m.apply_step(at, &ev, fill, &f, &mut r).unwrap();
        }
        m
    }

    #[test]
    fn chord_rule_matches_brute_force() {
        for seed in 0..60 {
            let alpha = if seed % 2 == 0 { 0.3 } else { 0.8 };
            let m = random_map(alpha, 25, seed, HoleFill::Joint);
            let g = m.graph();
            let brute: Vec<(u32, u32)> = separating_edges(&g, 0, &m.frontier_vertices())
                .iter()
                .map(|&e| g.edges()[e as usize])
                .collect();
            let mut fast: Vec<(u32, u32)> = m
                .find_root_cutedges()
                .iter()
                .map(|&e| {
                    let [a, b] = m.edge_ends(e);
                    (a, b)
                })
                .collect();
            let mut brute = brute;
            fast.sort();
            brute.sort();
            assert_eq!(fast, brute, "seed {seed}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn random_peeling_keeps_invariants(alpha in 0.0f64..0.95, steps in 1usize..60, seed in any::<u64>(), joint in any::<bool>()) {
            let fill = if joint { HoleFill::Joint } else { HoleFill::CountOnly };
            let m = random_map(alpha, steps, seed, fill);
            check_invariants(&m);
            prop_assert!(m.face_count() as u64 >= m.steps());
        }
    }
}
