//! Exact samplers for peeling steps, free-triangulation counts and `W`.

use alloc::vec::Vec;

use crate::analytic::{z_ratio, ModelParams, THETA_MAX};
use crate::error::{domain, Result};
use crate::rng::RngStream;

pub const DEFAULT_I_MAX: u64 = 1_000_000;
const TABLE_CAP: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A step before its hole content is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Alpha,
    Swallow { side: Side, i: u64, truncated: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PeelEvent {
    AlphaStep,
    Swallow {
        side: Side,
        i: u64,
        hole_internal_count: u64,
        truncated: bool,
    },
}

impl PeelEvent {
    /// Change of the frontier length: `+1` or `-i`.
    pub fn boundary_change(&self) -> i64 {
        match *self {
            PeelEvent::AlphaStep => 1,
            PeelEvent::Swallow { i, .. } => -(i as i64),
        }
    }
}

/// Inverse-CDF sampler of the step law, extended lazily.
#[derive(Clone, Debug)]
pub struct StepLaw {
    params: ModelParams,
    i_max: u64,
    // cdf[j] = alpha + p_1 + ... + p_{j+1}, summed with compensation
    cdf: Vec<f64>,
    comp: f64,
    last_p: f64,
    truncated_draws: u64,
}

struct Scan {
    n: u64,
    sum: f64,
    comp: f64,
    p: f64,
}

impl StepLaw {
    pub fn new(params: ModelParams) -> Self {
        Self::with_i_max(params, DEFAULT_I_MAX)
    }

    pub fn with_i_max(params: ModelParams, i_max: u64) -> Self {
        let mut law = StepLaw {
            params,
            i_max: i_max.max(1),
            cdf: Vec::new(),
            comp: 0.0,
            last_p: 0.0,
            truncated_draws: 0,
        };
        law.extend_to(64.min(law.i_max as usize));
        law
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn i_max(&self) -> u64 {
        self.i_max
    }

    pub fn truncated_draws(&self) -> u64 {
        self.truncated_draws
    }

    #[inline]
    fn next_p(&self, n: u64, p_n: f64) -> f64 {
        if n == 0 {
            let s = 1.0 - 2.0 * self.params.theta;
            2.0 * self.params.beta * (1.0 - 3.0 * self.params.theta) / (s * s)
        } else {
            p_n * self.params.beta * z_ratio(n + 1, self.params.theta)
        }
    }

    fn scan_state(&self) -> Scan {
        Scan {
            n: self.cdf.len() as u64,
            sum: self.cdf.last().copied().unwrap_or(self.params.alpha),
            comp: self.comp,
            p: self.last_p,
        }
    }

    #[inline]
    fn advance(&self, s: &mut Scan) {
        let p = self.next_p(s.n, s.p);
        let y = p - s.comp;
        let t = s.sum + y;
        s.comp = (t - s.sum) - y;
        s.sum = t;
        s.p = p;
        s.n += 1;
    }

    fn extend_to(&mut self, len: usize) {
        let len = len.min(TABLE_CAP).min(self.i_max as usize);
        let mut s = self.scan_state();
        while self.cdf.len() < len {
            self.advance(&mut s);
            self.cdf.push(s.sum);
        }
        self.comp = s.comp;
        self.last_p = s.p;
    }

    /// `i` such that `cdf(i-1) <= u < cdf(i)`, for `u >= alpha`; capped at `i_max`.
    fn locate(&mut self, u: f64) -> (u64, bool) {
        while *self.cdf.last().unwrap() <= u
            && self.cdf.len() < TABLE_CAP
            && (self.cdf.len() as u64) < self.i_max
        {
            let target = (self.cdf.len() * 2).min(TABLE_CAP);
            self.extend_to(target);
        }
        if *self.cdf.last().unwrap() > u {
            let j = self.cdf.partition_point(|&c| c <= u);
            return (j as u64 + 1, false);
        }
        let mut s = self.scan_state();
        while s.n < self.i_max {
            self.advance(&mut s);
            if s.sum > u {
                return (s.n, false);
            }
        }
        (self.i_max, true)
    }

    pub fn draw(&mut self, rng: &mut RngStream) -> Shape {
        let u = rng.uniform();
        if u < self.params.alpha {
            return Shape::Alpha;
        }
        let (i, truncated) = self.locate(u);
        if truncated {
            self.truncated_draws += 1;
        }
        let side = if rng.bit() { Side::Right } else { Side::Left };
        Shape::Swallow { side, i, truncated }
    }

    /// `p_i` by running the ratio recurrence from `p_1`.
    pub fn p(&self, i: u64) -> f64 {
        assert!(i >= 1);
        let mut p = 0.0;
        for n in 0..i {
            p = self.next_p(n, p);
        }
        p
    }

    /// Probability mass of steps with `i > i_max`, the part a capped draw misrepresents.
    /// Above criticality the tail is bounded by a geometric majorant once it is negligible.
    pub fn residual_mass(&self) -> f64 {
        let s2 = 1.0 - 2.0 * self.params.theta;
        let limit = 4.0 * self.params.beta / (s2 * s2);
        let majorant = |s: &Scan| {
            let r = limit.max(self.params.beta * z_ratio(s.n + 1, self.params.theta));
            s.p * r / (1.0 - r)
        };
        let mut s = self.scan_state();
        while s.n < self.i_max {
            if limit < 1.0 && s.n > 0 && majorant(&s) < 1e-30 {
                return majorant(&s);
            }
            self.advance(&mut s);
        }
        if limit < 1.0 {
            majorant(&s)
        } else {
            (1.0 - s.sum).max(0.0)
        }
    }
}

/// Outcome of peeling the root edge of an `m`-gon with `m >= 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    /// The apex is a new internal vertex.
    Internal,
    /// The apex is polygon vertex `d + 1`; pieces have `d + 1` and `m - d` sides.
    Split(u64),
}

/// Boltzmann law of triangulations of polygons with parameter `theta`.
#[derive(Clone, Copy, Debug)]
pub struct FreeLaw {
    theta: f64,
    q: f64,
    z2: f64,
}

impl FreeLaw {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..THETA_MAX - 1e-12).contains(&theta) {
            return Err(domain("theta", theta, "[0, 1/6)"));
        }
        let s = 1.0 - 2.0 * theta;
        Ok(FreeLaw {
            theta,
            q: theta * s * s,
            z2: (1.0 - 3.0 * theta) / (s * s),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    fn ratio(&self, m: u64) -> f64 {
        z_ratio(m, self.theta)
    }

    /// Whether a fresh 2-gon is glued shut (probability `1/Z_2`).
    #[inline]
    pub fn closes_empty(&self, rng: &mut RngStream) -> bool {
        rng.uniform() * self.z2 < 1.0
    }

    /// Whether a fresh piece with `m` sides needs faces; only 2-gons may not.
    #[inline]
    pub fn needs_faces(&self, m: u64, rng: &mut RngStream) -> bool {
        m != 2 || !self.closes_empty(rng)
    }

    pub fn decide(&self, m: u64, rng: &mut RngStream) -> Decision {
        debug_assert!(m >= 3);
        let u = rng.uniform();
        let p_int = self.q * self.ratio(m);
        if u < p_int {
            return Decision::Internal;
        }
        let mut target = u - p_int;
        // Split weights Z_{d+1} Z_{m-d} / Z_m are symmetric in d <-> m-1-d:
        // walk inward from both ends so the cost is the smaller piece.
        let mut w = self.z2 / self.ratio(m - 1);
        let (mut lo, mut hi) = (1u64, m - 2);
        loop {
            if lo >= hi {
                return Decision::Split(lo);
            }
            if target < w {
                return Decision::Split(lo);
            }
            target -= w;
            if target < w {
                return Decision::Split(hi);
            }
            target -= w;
            w *= self.ratio(lo + 1) / self.ratio(hi);
            lo += 1;
            hi -= 1;
        }
    }

    /// Internal-vertex count of a free triangulation of an `m`-gon.
    pub fn sample_count(&self, m: u64, rng: &mut RngStream) -> u64 {
        let mut count = 0u64;
        let mut stack: Vec<u64> = Vec::new();
        if self.needs_faces(m, rng) {
            stack.push(m);
        }
        while let Some(mut s) = stack.pop() {
            if s == 2 {
                count += 1;
                s = 3;
            }
            loop {
                match self.decide(s, rng) {
                    Decision::Internal => {
                        count += 1;
                        s += 1;
                    }
                    Decision::Split(d) => {
                        let (a, b) = (d + 1, s - d);
                        let fill_a = self.needs_faces(a, rng);
                        let fill_b = self.needs_faces(b, rng);
                        if fill_a {
                            stack.push(a);
                        }
                        if fill_b {
                            stack.push(b);
                        }
                        break;
                    }
                }
            }
        }
        count
    }
}

pub fn sample_free_internal_count(m: u64, theta: f64, rng: &mut RngStream) -> Result<u64> {
    if m < 2 {
        return Err(domain("m", m as f64, "m >= 2"));
    }
    Ok(FreeLaw::new(theta)?.sample_count(m, rng))
}

/// A full peeling event: the step shape followed by its hole count.
pub fn sample_step(law: &mut StepLaw, free: &FreeLaw, rng: &mut RngStream) -> PeelEvent {
    match law.draw(rng) {
        Shape::Alpha => PeelEvent::AlphaStep,
        Shape::Swallow { side, i, truncated } => PeelEvent::Swallow {
            side,
            i,
            hole_internal_count: free.sample_count(i + 1, rng),
            truncated,
        },
    }
}

/// One draw of `W = Y + I_{Y+1}`; the flag reports a capped `Y`.
pub fn sample_w(law: &mut StepLaw, free: &FreeLaw, rng: &mut RngStream) -> (u64, bool) {
    match law.draw(rng) {
        Shape::Alpha => (0, false),
        Shape::Swallow { i, truncated, .. } => (i + free.sample_count(i + 1, rng), truncated),
    }
}

/// `min(W, cap)`, skipping the hole when `Y` alone already reaches `cap`.
pub fn sample_w_capped(law: &mut StepLaw, free: &FreeLaw, cap: u64, rng: &mut RngStream) -> u64 {
    match law.draw(rng) {
        Shape::Alpha => 0,
        Shape::Swallow { i, .. } if i >= cap => cap,
        Shape::Swallow { i, .. } => (i + free.sample_count(i + 1, rng)).min(cap),
    }
}
