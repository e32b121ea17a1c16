use std::io::Write;

use peelab_core::analytic::model_params;
use peelab_core::explorer::{explore, resistance_lower_bound, ExploreConfig, Mode, Truncation};
use peelab_core::stats::{linear_fit, median};
use peelab_core::{ModelParams, RngStream};
use serde::Serialize;
use serde_json::{json, Value};

use super::{Ctx, Report};
use crate::cli::{Format, HullMode, HullStatsArgs, MapMode, SampleMapArgs};
use crate::edgelist::EdgeList;
use crate::error::LabResult;
use crate::output;
use crate::parallel::fan_out;

fn truncation_name(t: Option<Truncation>) -> Option<&'static str> {
    t.map(|t| match t {
        Truncation::MaxSteps => "max-steps",
        Truncation::MaxVertices => "max-vertices",
    })
}

pub(super) fn sample_map(a: &SampleMapArgs, ctx: &Ctx, w: &mut dyn Write) -> LabResult<Report> {
    let params = model_params(a.alpha)?;
    let mode = match a.mode {
        MapMode::Skeleton => Mode::Skeleton,
        MapMode::Full => Mode::Full,
    };
    let mut cfg = ExploreConfig::new(a.radius, mode);
    cfg.i_max = a.i_max;
    cfg.max_vertices = a.max_vertices;
    // same stream as replica 0 of hull-stats
    let ex = explore(&params, &cfg, &mut RngStream::for_replica(a.seed, 0))?;
    let map = ex.map.expect("map back-end");
    let list = EdgeList::from_map(&map);
    match ctx.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            w.write_all(output::header_line(ctx.name, &ctx.config.to_string()).as_bytes())?;
            list.write(w)?;
        }
        Format::Json => {
            let doc = json!({
                "schema": output::SCHEMA,
                "subcommand": ctx.name,
                "config": ctx.config,
                "vertices": list.vertices,
                "root": [list.root.0, list.root.1],
                "frontier": list.frontier,
                "edges": list.edges,
            });
            serde_json::to_writer(&mut *w, &doc)?;
            writeln!(w)?;
        }
    }
    let last = ex.trace.rows.last().copied();
    let summary = ctx.summary(json!({
        "vertices": map.vertex_count(),
        "revealed_vertices": map.revealed_count(),
        "edges": list.edges.len(),
        "faces": map.face_count(),
        "steps": map.steps(),
        "count_only_holes": map.holes().len(),
        "radius_reached": last.map(|r| r.r),
        "boundary_len": last.map(|r| r.boundary_len),
        "root_cut_edges": map.find_root_cutedges().len(),
        "truncated": truncation_name(ex.trace.truncated),
    }));
    Ok(Report {
        summary: Some(summary),
        truncated: ex.trace.truncated.is_some(),
    })
}

#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct HullCsvRow {
    pub replica: u64,
    pub seed: u64,
    pub r: u32,
    pub tau_r: u64,
    pub boundary_len: u64,
    pub volume: u64,
    pub delta_tau: Option<u64>,
    pub resistance_bound: Option<f64>,
    pub iso_ratio: f64,
    /// Root cut-edges of the whole explored map, on the last row only.
    pub cut_edges: Option<u64>,
}

/// Explore replica `j` of a hull-stats run.
pub fn hull_replica(params: &ModelParams, cfg: &ExploreConfig, master: u64, j: u64) -> LabResult<(Vec<HullCsvRow>, Option<Truncation>)> {
    let mut rng = RngStream::for_replica(master, j);
    let seed = rng.seed();
    let ex = explore(params, cfg, &mut rng)?;
    let res = resistance_lower_bound(&ex.trace);
    let cut = ex.map.as_ref().map(|m| m.find_root_cutedges().len() as u64);
    let n = ex.trace.rows.len();
    let rows = ex
        .trace
        .rows
        .iter()
        .enumerate()
        .map(|(i, row)| HullCsvRow {
            replica: j,
            seed,
            r: row.r,
            tau_r: row.tau,
            boundary_len: row.boundary_len,
            volume: row.volume,
            delta_tau: row.delta_tau,
            resistance_bound: match row.r {
                0 => Some(0.0),
                r => res.get(r as usize - 1).copied(),
            },
            iso_ratio: row.boundary_len as f64 / row.volume as f64,
            cut_edges: if i + 1 == n { cut } else { None },
        })
        .collect();
    Ok((rows, ex.trace.truncated))
}

pub(super) fn hull_stats(a: &HullStatsArgs, ctx: &Ctx, w: &mut dyn Write) -> LabResult<Report> {
    let params = model_params(a.alpha)?;
    let mode = match a.mode {
        HullMode::Stats => Mode::StatsOnly,
        HullMode::Skeleton => Mode::Skeleton,
        HullMode::Full => Mode::Full,
    };
    let mut cfg = ExploreConfig::new(a.radius, mode);
    cfg.i_max = a.i_max;
    cfg.max_steps = a.max_steps;
    if mode != Mode::StatsOnly {
        cfg.max_vertices = a.max_vertices;
    }
    let results = fan_out(a.replicas, |j| hull_replica(&params, &cfg, a.seed, j));
    let mut rows = Vec::new();
    let mut truncated = 0u64;
    for res in results {
        let (r, t) = res?;
        truncated += t.is_some() as u64;
        rows.extend(r);
    }
    ctx.table(w, &rows)?;
    let summary = ctx.summary(summarize(&rows, a.radius, a.replicas, truncated));
    Ok(Report {
        summary: Some(summary),
        truncated: truncated > 0,
    })
}

fn slope_json(xs: &[f64], ys: &[f64]) -> Value {
    match linear_fit(xs, ys) {
        Ok(f) => json!({ "slope": f.slope, "stderr": f.slope_se, "points": f.n }),
        Err(_) => Value::Null,
    }
}

fn summarize(rows: &[HullCsvRow], radius: u32, replicas: u64, truncated: u64) -> Value {
    let at = |r: u32| rows.iter().filter(move |row| row.r == r);
    let mut b: Vec<f64> = at(radius).map(|row| row.boundary_len as f64).collect();
    let mut v: Vec<f64> = at(radius).map(|row| row.volume as f64).collect();
    let mut cuts: Vec<f64> = rows.iter().filter_map(|row| row.cut_edges).map(|c| c as f64).collect();
    let with_cut = cuts.iter().filter(|&&c| c >= 1.0).count();
    // per-radius median boundary and mean log volume over the upper half
    let (mut rs, mut med_b, mut log_v) = (Vec::new(), Vec::new(), Vec::new());
    for r in radius / 2..=radius {
        let mut br: Vec<f64> = at(r).map(|row| row.boundary_len as f64).collect();
        if br.is_empty() {
            continue;
        }
        let lv: Vec<f64> = at(r).map(|row| (row.volume as f64).ln()).collect();
        rs.push(r as f64);
        med_b.push(median(&mut br));
        log_v.push(lv.iter().sum::<f64>() / lv.len() as f64);
    }
    json!({
        "replicas": replicas,
        "complete": replicas - truncated,
        "truncated": truncated,
        "median_boundary_len": (!b.is_empty()).then(|| median(&mut b)),
        "median_volume": (!v.is_empty()).then(|| median(&mut v)),
        "median_boundary_slope": slope_json(&rs, &med_b),
        "log_volume_slope": slope_json(&rs, &log_v),
        "median_cut_edges": (!cuts.is_empty()).then(|| median(&mut cuts)),
        "fraction_with_cut_edge": (!cuts.is_empty()).then(|| with_cut as f64 / cuts.len() as f64),
    })
}
