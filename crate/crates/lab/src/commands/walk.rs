use std::fs::File;
use std::io::{BufReader, Write};

use peelab_core::analytic::model_params;
use peelab_core::explorer::{explore, ExploreConfig, Mode};
use peelab_core::rng::split_seed;
use peelab_core::stats::median;
use peelab_core::walker::{return_probability, run_srw, OriginalBoundary, WalkArena, WalkRecord};
use peelab_core::RngStream;
use serde::Serialize;
use serde_json::{json, Value};

use super::{Ctx, Report};
use crate::cli::WalkArgs;
use crate::edgelist::EdgeList;
use crate::error::{LabError, LabResult};
use crate::parallel::fan_out;

#[derive(Serialize)]
struct WalkRow {
    seed: u64,
    n: u64,
    displacement: u32,
    returns: u64,
    hit_frontier: bool,
}

/// Dyadic samples, then the stopping time if it is not one of them.
fn walk_rows(rec: &WalkRecord) -> Vec<WalkRow> {
    let mut rows: Vec<WalkRow> = rec
        .displacement
        .iter()
        .map(|s| WalkRow {
            seed: rec.seed,
            n: s.n,
            displacement: s.distance,
            returns: s.returns,
            hit_frontier: false,
        })
        .collect();
    match rows.last_mut() {
        Some(last) if last.n == rec.steps => last.hit_frontier = rec.hit_frontier,
        _ if rec.steps > 0 => rows.push(WalkRow {
            seed: rec.seed,
            n: rec.steps,
            displacement: rec.final_distance,
            returns: rec.returns_to_root,
            hit_frontier: rec.hit_frontier,
        }),
        _ => {}
    }
    rows
}

fn build_arena(a: &WalkArgs) -> LabResult<(WalkArena, Value, bool)> {
    if let Some(path) = &a.map {
        if a.absorb_original {
            return Err(LabError::Usage("--absorb-original needs a sampled hull, not --map".into()));
        }
        let list = EdgeList::read(BufReader::new(File::open(path)?))?;
        let info = json!({ "source": path.display().to_string(), "vertices": list.vertices, "edges": list.edges.len() });
        let arena = WalkArena::from_graph(list.graph(), list.root.0, &list.frontier, &[])?;
        return Ok((arena, info, false));
    }
    let (Some(alpha), Some(radius)) = (a.alpha, a.radius) else {
        return Err(LabError::Usage("walk needs --alpha and --radius, or --map".into()));
    };
    let params = model_params(alpha)?;
    let mut cfg = ExploreConfig::new(radius, Mode::Full);
    cfg.max_vertices = a.max_vertices;
    let ex = explore(&params, &cfg, &mut RngStream::for_replica(a.seed, 0))?;
    let map = ex.map.expect("map back-end");
    let boundary = if a.absorb_original {
        OriginalBoundary::Absorbing
    } else {
        OriginalBoundary::Ordinary
    };
    let info = json!({
        "vertices": map.vertex_count(),
        "edges": map.revealed_edges().count(),
        "frontier_len": map.frontier_len(),
        "radius_reached": ex.trace.rows.last().map(|r| r.r),
    });
    Ok((WalkArena::from_map(&map, boundary)?, info, ex.trace.truncated.is_some()))
}

pub(super) fn walk(a: &WalkArgs, ctx: &Ctx, w: &mut dyn Write) -> LabResult<Report> {
    let (arena, hull, truncated) = build_arena(a)?;
    let s_walk = split_seed(a.seed, 1);
    let records = fan_out(a.walks, |j| run_srw(&arena, a.steps, &mut RngStream::for_replica(s_walk, j)));
    let records = records.into_iter().collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<WalkRow> = records.iter().flat_map(walk_rows).collect();
    ctx.table(w, &rows)?;

    let mut by_n = Vec::new();
    let mut n = 1u64;
    while n <= a.steps {
        let mut d: Vec<f64> = records
            .iter()
            .filter_map(|r| r.displacement.iter().find(|s| s.n == n))
            .map(|s| s.distance as f64)
            .collect();
        if d.is_empty() {
            break;
        }
        let running = d.len();
        by_n.push(json!({ "n": n, "walks": running, "median_displacement": median(&mut d) }));
        n *= 2;
    }
    let mut finals: Vec<f64> = records.iter().map(|r| r.final_distance as f64).collect();
    let hit = records.iter().filter(|r| r.hit_frontier).count();
    let returns = a.returns.map(|t_max| {
        let s_ret = split_seed(a.seed, 2);
        let series = fan_out(a.walks, |j| return_probability(&arena, t_max, 1, &mut RngStream::for_replica(s_ret, j)));
        let len = t_max as usize + 1;
        let mut at_root = vec![0.0; len];
        let mut stopped = vec![0.0; len];
        for s in &series {
            for t in 0..len {
                at_root[t] += s.at_root[t];
                stopped[t] += s.stopped[t];
            }
        }
        let k = a.walks.max(1) as f64;
        let even: Vec<f64> = at_root.iter().step_by(2).map(|x| x / k).collect();
        json!({ "t_max": t_max, "p_even": even, "stopped_by_t_max": stopped[len - 1] / k })
    });
    let summary = ctx.summary(json!({
        "hull": hull,
        "walks": a.walks,
        "hit_fraction": hit as f64 / a.walks.max(1) as f64,
        "median_final_distance": (!finals.is_empty()).then(|| median(&mut finals)),
        "displacement": by_n,
        "returns": returns,
    }));
    Ok(Report {
        summary: Some(summary),
        truncated,
    })
}
