//! Summary statistics and tail fitters.

use alloc::vec::Vec;

use crate::error::{domain, Error, Result};

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, libm::sqrt(var / n as f64))
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let (_, se) = mean_and_se(xs);
    se * se * xs.len() as f64
}

/// Quantile of sorted data with linear interpolation between order statistics.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sort(xs: &mut [f64]) {
    xs.sort_unstable_by(|a, b| a.total_cmp(b));
}

pub fn median(xs: &mut [f64]) -> f64 {
    sort(xs);
    quantile(xs, 0.5)
}

/// Fraction of sorted samples strictly above `x`.
pub fn survival_at(sorted: &[f64], x: f64) -> f64 {
    let above = sorted.len() - sorted.partition_point(|&s| s <= x);
    above as f64 / sorted.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub n: usize,
}

impl LinearFit {
    /// Normal-approximation confidence interval for the slope.
    pub fn slope_ci(&self, z: f64) -> (f64, f64) {
        (self.slope - z * self.slope_se, self.slope + z * self.slope_se)
    }
}

pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    let n = xs.len();
    if n != ys.len() || n < 3 {
        return Err(domain("points", n as f64, "at least 3 paired points"));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::Degenerate("all abscissae equal"));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    Ok(LinearFit {
        slope,
        intercept,
        slope_se: libm::sqrt(rss / (n - 2) as f64 / sxx),
        n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    Power,
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitMethod {
    LogLinear,
    LogLog,
    TailRatio,
    Ks,
}

impl FitMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            FitMethod::LogLinear => "log-linear",
            FitMethod::LogLog => "log-log",
            FitMethod::TailRatio => "tail-ratio",
            FitMethod::Ks => "ks",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult {
    pub estimate: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub method: FitMethod,
}

const GRID: usize = 25;
pub const MIN_TAIL_SAMPLES: usize = 1000;

/// Slope of the empirical survival function: `log S` against `log x`
/// (power) or against `x` (exponential), over the window between the
/// given quantiles.
pub fn fit_tail_window(samples: &[f64], kind: TailKind, q_lo: f64, q_hi: f64) -> Result<FitResult> {
    if samples.len() < MIN_TAIL_SAMPLES {
        return Err(domain("samples", samples.len() as f64, "at least 1000 samples"));
    }
    let mut s = samples.to_vec();
    sort(&mut s);
    let (lo, hi) = (quantile(&s, q_lo), quantile(&s, q_hi));
    fit_sorted(&s, kind, lo, hi)
}

/// Power-law fit over the decade of values centred on the median.
pub fn fit_central_decade(samples: &[f64]) -> Result<FitResult> {
    if samples.len() < MIN_TAIL_SAMPLES {
        return Err(domain("samples", samples.len() as f64, "at least 1000 samples"));
    }
    let mut s = samples.to_vec();
    sort(&mut s);
    let m = quantile(&s, 0.5);
    let half = libm::sqrt(10.0);
    fit_sorted(&s, TailKind::Power, m / half, m * half)
}

fn fit_sorted(s: &[f64], kind: TailKind, lo: f64, hi: f64) -> Result<FitResult> {
    if hi <= lo || hi.is_nan() {
        return Err(Error::Degenerate("samples are constant over the fit window"));
    }
    if kind == TailKind::Power && lo <= 0.0 {
        return Err(domain("window start", lo, "positive values for a power-law fit"));
    }
    let mut xs = Vec::with_capacity(GRID);
    let mut ys = Vec::with_capacity(GRID);
    for j in 0..GRID {
        let t = j as f64 / (GRID - 1) as f64;
        let x = match kind {
            TailKind::Power => libm::exp(libm::log(lo) + t * (libm::log(hi) - libm::log(lo))),
            TailKind::Exponential => lo + t * (hi - lo),
        };
        let surv = survival_at(s, x);
        if surv <= 0.0 {
            continue;
        }
        xs.push(match kind {
            TailKind::Power => libm::log(x),
            TailKind::Exponential => x,
        });
        ys.push(libm::log(surv));
    }
    let fit = linear_fit(&xs, &ys)?;
    Ok(FitResult {
        estimate: fit.slope,
        stderr: fit.slope_se.max(f64::EPSILON),
        window: (lo, hi),
        method: match kind {
            TailKind::Power => FitMethod::LogLog,
            TailKind::Exponential => FitMethod::LogLinear,
        },
    })
}

/// [`fit_tail_window`] over the central window: the 50%-99% quantiles for
/// power laws, 10%-99% for exponential tails.
pub fn fit_tail(samples: &[f64], kind: TailKind) -> Result<FitResult> {
    match kind {
        TailKind::Power => fit_tail_window(samples, kind, 0.5, 0.99),
        TailKind::Exponential => fit_tail_window(samples, kind, 0.1, 0.99),
    }
}

/// Local power exponent `log2(S(2x) / S(x))` with a delta-method error.
pub fn tail_ratio(samples: &[f64], x: f64) -> Result<FitResult> {
    let mut s = samples.to_vec();
    sort(&mut s);
    let n = s.len() as f64;
    let (a, b) = (survival_at(&s, x), survival_at(&s, 2.0 * x));
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::Degenerate("no samples beyond the ratio point"));
    }
    let se = libm::sqrt((1.0 - b / a) / (b * n)) / core::f64::consts::LN_2;
    Ok(FitResult {
        estimate: libm::log2(b / a),
        stderr: se.max(f64::EPSILON),
        window: (x, 2.0 * x),
        method: FitMethod::TailRatio,
    })
}

/// Kolmogorov-Smirnov distance between samples and a continuous cdf.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    sort(&mut s);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn mean_and_quantiles() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let (m, se) = mean_and_se(&xs);
        assert_eq!(m, 2.5);
        assert!((se - libm::sqrt(5.0 / 3.0 / 4.0)).abs() < 1e-12);
        assert_eq!(quantile(&xs, 0.5), 2.5);
        assert_eq!(quantile(&xs, 1.0), 4.0);
        assert_eq!(survival_at(&xs, 2.0), 0.5);
    }

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - 2.0 * x).collect();
        let f = linear_fit(&xs, &ys).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12 && (f.intercept - 3.0).abs() < 1e-12);
        assert!(f.slope_se < 1e-12);
        assert!(linear_fit(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn synthetic_exponential_tail() {
        let mut r = RngStream::new(1);
        let xs: Vec<f64> = (0..100_000).map(|_| -libm::log(r.uniform_pos())).collect();
        let f = fit_tail(&xs, TailKind::Exponential).unwrap();
        assert!((f.estimate + 1.0).abs() < 0.05, "{f:?}");
        assert!(f.stderr > 0.0);
    }

    #[test]
    fn synthetic_pareto_tail() {
        let mut r = RngStream::new(2);
        let xs: Vec<f64> = (0..100_000).map(|_| {
                let u = r.uniform_pos();
                1.0 / (u * u)
            })
            .collect();
        let f = fit_tail(&xs, TailKind::Power).unwrap();
        assert!((f.estimate + 0.5).abs() < 0.05, "{f:?}");
        let t = tail_ratio(&xs, 100.0).unwrap();
        assert!((t.estimate + 0.5).abs() < 5.0 * t.stderr);
        let d = fit_central_decade(&xs).unwrap();
        assert!((d.estimate + 0.5).abs() < 0.05, "{d:?}");
        assert!((d.window.1 / d.window.0 - 10.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_samples_fail() {
        assert!(fit_tail(&[2.0; 5000], TailKind::Exponential).is_err());
        assert!(fit_tail(&[2.0; 10], TailKind::Power).is_err());
    }

    #[test]
    fn ks_of_uniform() {
        let mut r = RngStream::new(3);
        let xs: Vec<f64> = (0..20_000).map(|_| r.uniform()).collect();
        let d = ks_statistic(&xs, |x| x.clamp(0.0, 1.0));
        assert!(d < 1.36 / libm::sqrt(20_000.0));
    }
}
