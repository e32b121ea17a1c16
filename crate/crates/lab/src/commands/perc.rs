use std::io::Write;

use peelab_core::analytic::model_params;
use peelab_core::percolation::{
    bisect_threshold, combine_density, explore_stretch, interface_trial, root_cluster_walk, DensityEstimate, PercLaw,
};
use peelab_core::rng::split_seed;
use peelab_core::stats::mean_and_se;
use peelab_core::RngStream;
use serde::Serialize;
use serde_json::json;

use super::{Ctx, Report};
use crate::cli::PercolationArgs;
use crate::error::LabResult;
use crate::parallel::fan_out;

#[derive(Serialize)]
struct PercRow {
    alpha: f64,
    p: f64,
    cap: u64,
    trials: u64,
    survival: f64,
    rho_hat: Option<f64>,
    #[serde(rename = "Ek_over_k")]
    ek_over_k: Option<f64>,
    stderr: f64,
}

/// Survival frequency; every `p` reuses the same streams.
fn survival(law: &PercLaw, seed: u64, trials: u64, cap: u64) -> (f64, f64) {
    let hits = fan_out(trials, |j| {
        root_cluster_walk(law, &mut RngStream::for_replica(seed, j), cap).survived as u8 as f64
    });
    mean_and_se(&hits)
}

fn density(law: &PercLaw, swapped: &PercLaw, a: &PercolationArgs) -> DensityEstimate {
    let (s_hit, s_stretch) = (split_seed(a.seed, 1), split_seed(a.seed, 2));
    let hits = fan_out(a.trials, |j| {
        let f = interface_trial(law, swapped, &mut RngStream::for_replica(s_hit, j), a.interface_cap, a.max_steps);
        f.infinite() as u8 as f64
    });
    let stretch = fan_out(a.replicas, |j| {
        explore_stretch(law, &mut RngStream::for_replica(s_stretch, j), a.k, a.interface_cap, a.max_steps)
    });
    combine_density(&hits, &stretch)
}

pub(super) fn percolation(a: &PercolationArgs, ctx: &Ctx, w: &mut dyn Write) -> LabResult<Report> {
    let params = model_params(a.alpha)?;
    let s_surv = split_seed(a.seed, 0);
    let mut rows = Vec::with_capacity(a.p.len());
    let mut per_p = Vec::with_capacity(a.p.len());
    let mut capped = false;
    for &p in &a.p {
        let law = PercLaw::new(&params, p)?;
        let (surv, se) = survival(&law, s_surv, a.trials, a.cap);
        let dens = if a.k > 0 {
            let d = density(&law, &PercLaw::new(&params, 1.0 - p)?, a);
            capped |= d.capped;
            Some(d)
        } else {
            None
        };
        rows.push(PercRow {
            alpha: a.alpha,
            p,
            cap: a.cap,
            trials: a.trials,
            survival: surv,
            rho_hat: dens.map(|d| d.rho_a),
            ek_over_k: dens.map(|d| d.ek_over_k),
            stderr: se,
        });
        per_p.push(json!({
            "p": p,
            "survival": surv,
            "survival_stderr": se,
            "density": dens.map(|d| json!({
                "rho_a": d.rho_a,
                "rho_a_stderr": d.rho_a_se,
                "rho_b": d.rho_b,
                "rho_b_stderr": d.rho_b_se,
                "Ek_over_k": d.ek_over_k,
                "Wk_inf_over_k": d.wk_inf_over_k,
                "Bk_inf_over_k": d.bk_inf_over_k,
                "max_wb_gap": d.max_wb_gap,
                "capped": d.capped,
            })),
        }));
    }
    ctx.table(w, &rows)?;
    let estimate = if a.estimate_pc {
        let mut err = None;
        let est = bisect_threshold(
            |p| match PercLaw::new(&params, p) {
                Ok(law) => survival(&law, s_surv, a.trials, a.cap).0,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            0.02,
            0.005,
            a.trials,
        );
        if let Some(e) = err {
            return Err(e.into());
        }
        Some(json!({
            "p_c": est.p_c,
            "bracket": [est.lo, est.hi],
            "survival_at_bracket": [est.survival_lo, est.survival_hi],
        }))
    } else {
        None
    };
    let summary = ctx.summary(json!({
        "analytic_p_c": params.p_c,
        "analytic_p_u": params.p_u,
        "estimate_pc": estimate,
        "points": per_p,
    }));
    Ok(Report {
        summary: Some(summary),
        truncated: capped,
    })
}
