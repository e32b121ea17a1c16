use std::io::Write;

use peelab_core::analytic::{c_alpha, model_params};
use peelab_core::sampler::{sample_w_capped, FreeLaw, StepLaw};
use peelab_core::{ModelParams, Regime, RngStream};
use serde::Serialize;
use serde_json::json;

use super::{Ctx, Report};
use crate::cli::TailsArgs;
use crate::error::{LabError, LabResult};
use crate::parallel::fan_out;

/// Samples per stream; fixed so results do not depend on the worker count.
const CHUNK: u64 = 1 << 16;

#[derive(Serialize, Clone, Copy, Debug, PartialEq)]
pub struct TailRow {
    pub x: u64,
    pub survival: f64,
    /// `sqrt(x) P(W > x)`, which tends to `c_alpha`.
    pub sqrt_x_survival: f64,
    pub c_alpha: f64,
    /// `E[W; W < x]`.
    pub truncated_mean: f64,
    /// `E[W; W < x] / (c_alpha sqrt(x))`, which tends to 1.
    pub truncated_ratio: f64,
}

/// `min(W, x + 1)` for `samples` draws, chunk `c` on stream `(seed, c)`.
fn draw(params: &ModelParams, a: &TailsArgs) -> LabResult<(Vec<u64>, u64)> {
    let free = FreeLaw::new(params.theta)?;
    let chunks = a.samples.div_ceil(CHUNK);
    let parts = fan_out(chunks, |c| {
        let mut law = StepLaw::with_i_max(*params, a.i_max);
        let mut rng = RngStream::for_replica(a.seed, c);
        let n = CHUNK.min(a.samples - c * CHUNK);
        let ws: Vec<u64> = (0..n).map(|_| sample_w_capped(&mut law, &free, a.x + 1, &mut rng)).collect();
        (ws, law.truncated_draws())
    });
    let truncated = parts.iter().map(|p| p.1).sum();
    Ok((parts.into_iter().flat_map(|p| p.0).collect(), truncated))
}

/// Tail rows at `10, 100, ...` below `x` and at `x`, from sorted samples.
pub fn tail_table(sorted: &[u64], x: u64, c: f64) -> Vec<TailRow> {
    let mut grid: Vec<u64> = std::iter::successors(Some(10u64), |g| g.checked_mul(10))
        .take_while(|&g| g < x)
        .collect();
    grid.push(x);
    let n = sorted.len() as f64;
    grid.into_iter()
        .map(|g| {
            let below = sorted.partition_point(|&w| w < g);
            let above = sorted.len() - sorted.partition_point(|&w| w <= g);
            let sum: f64 = sorted[..below].iter().map(|&w| w as f64).sum();
            let survival = above as f64 / n;
            let root = (g as f64).sqrt();
            TailRow {
                x: g,
                survival,
                sqrt_x_survival: root * survival,
                c_alpha: c,
                truncated_mean: sum / n,
                truncated_ratio: sum / n / (c * root),
            }
        })
        .collect()
}

pub(super) fn tails(a: &TailsArgs, ctx: &Ctx, w: &mut dyn Write) -> LabResult<Report> {
    let params = model_params(a.alpha)?;
    if params.regime != Regime::Subcritical {
        return Err(LabError::Usage(format!("tails needs alpha < 2/3, got {}", a.alpha)));
    }
    if a.samples == 0 || a.x == 0 {
        return Err(LabError::Usage("tails needs --samples and --x above 0".into()));
    }
    let c = c_alpha(&params);
    let (mut ws, truncated_draws) = draw(&params, a)?;
    ws.sort_unstable();
    let rows = tail_table(&ws, a.x, c);
    ctx.table(w, &rows)?;
    let last = *rows.last().expect("grid ends at x");
    let rel = |v: f64, target: f64| (v - target).abs() / target;
    let summary = ctx.summary(json!({
        "samples": a.samples,
        "x": a.x,
        "c_alpha": c,
        "sqrt_x_survival": last.sqrt_x_survival,
        "survival_rel_err": rel(last.sqrt_x_survival, c),
        "truncated_ratio": last.truncated_ratio,
        "truncated_rel_err": rel(last.truncated_ratio, 1.0),
        "step_draws_beyond_i_max": truncated_draws,
    }));
    Ok(Report {
        summary: Some(summary),
        truncated: false,
    })
}
