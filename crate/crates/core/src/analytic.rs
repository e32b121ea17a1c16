//! Closed-form quantities: enumeration, partition functions, step
//! probabilities, drifts, thresholds and tail constants.

use libm::{exp, lgamma, log, sqrt};
use num_bigint::BigUint;
use num_traits::One;

use crate::error::{domain, Error, Result};

pub const ALPHA_CRITICAL: f64 = 2.0 / 3.0;
pub const THETA_MAX: f64 = 1.0 / 6.0;
pub const Q_MAX: f64 = 2.0 / 27.0;
const CRITICAL_TOL: f64 = 1e-12;
const PI: f64 = core::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        }
    }
}

/// `alpha` together with every constant derived from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub regime: Regime,
    pub beta: f64,
    pub q: f64,
    pub theta: f64,
    pub p_c: Option<f64>,
    pub p_u: Option<f64>,
}

impl ModelParams {
    pub fn new(alpha: f64) -> Result<Self> {
        model_params(alpha)
    }

    pub fn is_supercritical(&self) -> bool {
        self.regime == Regime::Supercritical
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain("alpha", alpha, "[0, 1)"));
    }
    Ok(())
}

pub fn regime_of(alpha: f64) -> Regime {
    if (alpha - ALPHA_CRITICAL).abs() <= CRITICAL_TOL {
        Regime::Critical
    } else if alpha < ALPHA_CRITICAL {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    }
}

pub fn beta_of(alpha: f64) -> f64 {
    if alpha <= ALPHA_CRITICAL {
        (2.0 - alpha) * (2.0 - alpha) / 16.0
    } else {
        alpha * (1.0 - alpha) / 2.0
    }
}

fn cubic(theta: f64) -> f64 {
    let s = 1.0 - 2.0 * theta;
    theta * s * s
}

/// Root of `theta (1 - 2 theta)^2 = q` on `[0, 1/6]` by bisection.
pub fn solve_theta(q: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    if q >= cubic(THETA_MAX) {
        return THETA_MAX;
    }
    let (mut lo, mut hi) = (0.0f64, THETA_MAX);
    for _ in 0..200 {
        if hi - lo <= 1e-15 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if cubic(mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn model_params(alpha: f64) -> Result<ModelParams> {
    check_alpha(alpha)?;
    let regime = regime_of(alpha);
    let beta = beta_of(alpha);
    let q = alpha * beta;
    let theta = solve_theta(q);
    let (p_c, p_u) = if regime == Regime::Supercritical {
        let s = sqrt(3.0 - 2.0 / alpha);
        (Some(0.5 * (1.0 - s)), Some(0.5 * (1.0 + s)))
    } else {
        (None, None)
    };
    Ok(ModelParams {
        alpha,
        regime,
        beta,
        q,
        theta,
        p_c,
        p_u,
    })
}

fn factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for j in 2..=n {
        acc *= j;
    }
    acc
}

/// Number of triangulations of an `m`-gon with `n` internal vertices.
pub fn phi(n: u64, m: u64) -> Result<BigUint> {
    if m < 2 {
        return Err(domain("m", m as f64, "m >= 2"));
    }
    if n == 0 && m == 2 {
        return Ok(BigUint::one());
    }
    let k = m - 2;
    let num = (BigUint::one() << (n + 1)) * factorial(2 * k + 1) * factorial(2 * k + 3 * n);
    let kf = factorial(k);
    let den = &kf * &kf * factorial(n) * factorial(2 * k + 2 * n + 2);
    Ok(num / den)
}

/// `ln phi(n, m)` in floating point; `-inf` never occurs since every count is positive.
pub fn ln_phi(n: u64, m: u64) -> f64 {
    debug_assert!(m >= 2);
    if n == 0 && m == 2 {
        return 0.0;
    }
    let k = (m - 2) as f64;
    let n = n as f64;
    (n + 1.0) * core::f64::consts::LN_2 + lgamma(2.0 * k + 2.0) + lgamma(2.0 * k + 3.0 * n + 1.0)
        - 2.0 * lgamma(k + 1.0)
        - lgamma(n + 1.0)
        - lgamma(2.0 * k + 2.0 * n + 3.0)
}

/// `phi(n+1, m) / phi(n, m)`.
pub fn phi_ratio_n(n: u64, m: u64) -> f64 {
    if n == 0 && m == 2 {
        return 1.0;
    }
    let k = (m - 2) as f64;
    let n = n as f64;
    let a = 2.0 * k + 3.0 * n;
    2.0 * (a + 3.0) * (a + 2.0) * (a + 1.0)
        / ((n + 1.0) * (2.0 * k + 2.0 * n + 4.0) * (2.0 * k + 2.0 * n + 3.0))
}

/// `ln Z_m` for an `m`-gon.
pub fn ln_partition_z(m: u64, theta: f64) -> f64 {
    debug_assert!(m >= 2);
    let k = (m - 2) as f64;
    let lead = (1.0 - 6.0 * theta) * k + 2.0 - 6.0 * theta;
    log(lead) + lgamma(2.0 * k + 1.0) - lgamma(k + 1.0) - lgamma(k + 3.0)
        - (2.0 * k + 2.0) * log(1.0 - 2.0 * theta)
}

/// Partition function `Z_m` of free triangulations of an `m`-gon.
pub fn partition_z(m: u64, theta: f64) -> Result<f64> {
    if m < 2 {
        return Err(domain("m", m as f64, "m >= 2"));
    }
    if !(0.0..=THETA_MAX + 1e-15).contains(&theta) {
        return Err(domain("theta", theta, "[0, 1/6]"));
    }
    Ok(exp(ln_partition_z(m, theta)))
}

/// `Z_{m+1} / Z_m`, exact up to rounding, valid for `m >= 2`.
pub fn z_ratio(m: u64, theta: f64) -> f64 {
    let j = (m - 2) as f64;
    let c = 1.0 - 6.0 * theta;
    let lead = (c * (j + 1.0) + 2.0 - 6.0 * theta) / (c * j + 2.0 - 6.0 * theta);
    let s = 1.0 - 2.0 * theta;
    lead * 2.0 * (2.0 * j + 1.0) / (j + 3.0) / (s * s)
}

/// Mean and variance of the number of internal vertices of a free
/// triangulation of an `m`-gon.
pub fn free_moments(m: u64, theta: f64) -> Result<(f64, f64)> {
    if m < 2 {
        return Err(domain("m", m as f64, "m >= 2"));
    }
    if theta < 0.0 {
        return Err(domain("theta", theta, "[0, 1/6)"));
    }
    if theta >= THETA_MAX - 1e-15 {
        return Err(Error::Singular("free_moments"));
    }
    let mf = m as f64;
    let d = (1.0 - 6.0 * theta) * mf + 6.0 * theta;
    let mean = (mf - 1.0) * (2.0 * mf - 3.0) * 2.0 * theta / d;
    let var = (mf - 1.0) * (2.0 * mf - 3.0) * mf * (1.0 - 2.0 * theta) * 2.0 * theta
        / (d * d * (1.0 - 6.0 * theta));
    Ok((mean, var))
}

/// Step probability. `p_i` (both sides together) when `k` is `None`, else
/// `p_{i,k}`, the probability that the hole also holds `k` internal vertices.
pub fn step_prob(params: &ModelParams, i: u64, k: Option<u64>) -> Result<f64> {
    if i == 0 {
        return Err(domain("i", 0.0, "i >= 1"));
    }
    let base = core::f64::consts::LN_2 + (i as f64) * log(params.beta);
    Ok(match k {
        None => exp(base + ln_partition_z(i + 1, params.theta)),
        Some(0) => exp(base + ln_phi(0, i + 1)),
        Some(_) if params.q == 0.0 => 0.0,
        Some(k) => exp(base + ln_phi(k, i + 1) + (k as f64) * log(params.q)),
    })
}

/// Asymptotic constant of `p_i i^{3/2}` in the subcritical regime.
pub fn step_tail_constant(alpha: f64) -> f64 {
    (1.0 - 1.5 * alpha) / (2.0 * sqrt(PI))
}

/// Asymptotic mass `sum_{i > n} p_i` in the subcritical regime.
pub fn step_tail_mass(alpha: f64, n: u64) -> f64 {
    (1.0 - 1.5 * alpha) / sqrt(PI) / sqrt(n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableNormalizers {
    pub c_alpha: f64,
    pub a_n: f64,
    pub b_n: f64,
}

/// Tail constant of `W`. Below criticality `1 - 6 theta = 1 - 3 alpha / 2`, and the
/// reduced form avoids dividing by the badly conditioned `1 - 6 theta` near `alpha = 2/3`.
pub fn c_alpha(params: &ModelParams) -> f64 {
    let a = params.alpha;
    if params.regime == Regime::Subcritical {
        return sqrt((1.0 - 1.5 * a) * (1.0 - 0.5 * a) / PI);
    }
    let t = params.theta;
    (1.0 - 1.5 * a) * sqrt(1.0 - 2.0 * t) / sqrt(PI * (1.0 - 6.0 * t))
}

pub fn stable_normalizers(alpha: f64, n: u64) -> Result<StableNormalizers> {
    check_alpha(alpha)?;
    if regime_of(alpha) != Regime::Subcritical {
        return Err(domain("alpha", alpha, "[0, 2/3)"));
    }
    if n == 0 {
        return Err(domain("n", 0.0, "n >= 1"));
    }
    let params = model_params(alpha)?;
    let c = c_alpha(&params);
    let a = c * c * (n as f64) * (n as f64);
    Ok(StableNormalizers {
        c_alpha: c,
        a_n: a,
        b_n: a,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drifts {
    pub boundary_drift: f64,
    pub perc_drift: Option<f64>,
    pub p_c: f64,
    pub p_u: f64,
}

pub fn analytic_drifts(alpha: f64, p: Option<f64>) -> Result<Drifts> {
    if !(alpha > ALPHA_CRITICAL && alpha < 1.0) {
        return Err(domain("alpha", alpha, "(2/3, 1)"));
    }
    if let Some(p) = p {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain("p", p, "[0, 1]"));
        }
    }
    let drift = sqrt(alpha * (3.0 * alpha - 2.0));
    let s = sqrt(3.0 - 2.0 / alpha);
    Ok(Drifts {
        boundary_drift: drift,
        perc_drift: p.map(|p| alpha * p - 0.5 * (alpha - drift)),
        p_c: 0.5 * (1.0 - s),
        p_u: 0.5 * (1.0 + s),
    })
}

/// Probability that a given finite map with `i` boundary vertices on the
/// original boundary, `j` further boundary vertices and `k` internal
/// vertices sits at the root.
pub fn submap_probability(i: u64, j: u64, k: u64, params: &ModelParams) -> Result<f64> {
    if i < 2 {
        return Err(domain("i", i as f64, "i >= 2"));
    }
    let a = libm::pow(params.alpha, (k + j) as f64);
    let b = libm::pow(params.beta, (i + k - 2) as f64);
    Ok(a * b)
}

pub fn levy_density(x: f64) -> f64 {
    if x <= 0.0 || !x.is_finite() {
        return 0.0;
    }
    exp(-0.5 / x) / sqrt(2.0 * PI * x * x * x)
}

/// Survival function of the standard Levy law, `P(L > x) = erf(sqrt(1/(2x)))`.
pub fn levy_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    libm::erf(sqrt(0.5 / x))
}

/// Median of the standard Levy law, `1 / (2 erfc^{-1}(1/2)^2)`.
pub const LEVY_MEDIAN: f64 = 2.198_109_338_317_732;
