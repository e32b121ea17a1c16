//! Subcommand runners. Each writes its data table to the sink and returns
//! an optional JSON summary.

mod hull;
mod perc;
mod tails;
mod walk;

use std::io::Write;

use peelab_core::analytic::{analytic_drifts, c_alpha, model_params, phi};
use peelab_core::Regime;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{Cli, Command, ConstantsArgs, EnumerateArgs, Format};
use crate::error::LabResult;
use crate::output::{self, SCHEMA};
use crate::parallel;

pub use hull::{hull_replica, HullCsvRow};
pub use tails::{tail_table, TailRow};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// A resource cap stopped part of the run.
    pub truncated: bool,
}

pub(crate) struct Report {
    pub summary: Option<Value>,
    pub truncated: bool,
}

impl Report {
    fn done(summary: Option<Value>) -> LabResult<Self> {
        Ok(Report {
            summary,
            truncated: false,
        })
    }
}

pub(crate) struct Ctx {
    pub name: &'static str,
    pub format: Option<Format>,
    pub config: Value,
}

impl Ctx {
    fn table<T: Serialize>(&self, w: &mut dyn Write, rows: &[T]) -> LabResult<()> {
        output::write_table(w, self.format.unwrap_or(Format::Csv), self.name, &self.config, rows)
    }

    /// Single-record output: an object by default, a one-row table for CSV.
    fn record<T: Serialize>(&self, w: &mut dyn Write, rec: &T) -> LabResult<()> {
        match self.format.unwrap_or(Format::Json) {
            Format::Csv => self.table(w, std::slice::from_ref(rec)),
            Format::Json => {
                let mut obj = json!({ "schema": SCHEMA, "subcommand": self.name, "config": self.config });
                if let (Value::Object(o), Value::Object(r)) = (&mut obj, serde_json::to_value(rec)?) {
                    o.extend(r);
                }
                serde_json::to_writer_pretty(&mut *w, &obj)?;
                writeln!(w)?;
                Ok(())
            }
        }
    }

    pub(crate) fn summary(&self, body: Value) -> Value {
        let mut obj = json!({ "schema": SCHEMA, "subcommand": self.name, "config": self.config });
        if let (Value::Object(o), Value::Object(b)) = (&mut obj, body) {
            o.extend(b);
        }
        obj
    }
}

/// Run one command line: data to `--output` (or stdout), summary beside it
/// (or to stderr).
pub fn run(cli: &Cli) -> LabResult<Outcome> {
    let pool = parallel::pool(parallel::worker_count(cli.workers)?)?;
    let ctx = Ctx {
        name: cli.command.name(),
        format: cli.format,
        config: serde_json::to_value(&cli.command)?,
    };
    let mut data = output::open_data(cli.output.as_deref())?;
    let report = pool.install(|| dispatch(&cli.command, &ctx, &mut *data));
    data.flush()?;
    let report = report?;
    if let Some(s) = &report.summary {
        output::write_summary(cli.output.as_deref(), s)?;
    }
    Ok(Outcome {
        truncated: report.truncated,
    })
}

fn dispatch(cmd: &Command, ctx: &Ctx, w: &mut (dyn Write + Send)) -> LabResult<Report> {
    match cmd {
        Command::Constants(a) => constants(a, ctx, w),
        Command::Enumerate(a) => enumerate(a, ctx, w),
        Command::SampleMap(a) => hull::sample_map(a, ctx, w),
        Command::HullStats(a) => hull::hull_stats(a, ctx, w),
        Command::Percolation(a) => perc::percolation(a, ctx, w),
        Command::Walk(a) => walk::walk(a, ctx, w),
        Command::Tails(a) => tails::tails(a, ctx, w),
    }
}

#[derive(Serialize)]
struct ConstantsRow {
    alpha: f64,
    regime: &'static str,
    beta: f64,
    q: f64,
    theta: f64,
    p_c: Option<f64>,
    p_u: Option<f64>,
    boundary_drift: Option<f64>,
    perc_drift: Option<f64>,
    c_alpha: Option<f64>,
}

fn constants(a: &ConstantsArgs, ctx: &Ctx, w: &mut dyn Write) -> LabResult<Report> {
    let params = model_params(a.alpha)?;
    let drifts = if params.is_supercritical() || a.p.is_some() {
        Some(analytic_drifts(a.alpha, a.p)?)
    } else {
        None
    };
    let row = ConstantsRow {
        alpha: params.alpha,
        regime: params.regime.as_str(),
        beta: params.beta,
        q: params.q,
        theta: params.theta,
        p_c: params.p_c,
        p_u: params.p_u,
        boundary_drift: drifts.map(|d| d.boundary_drift),
        perc_drift: drifts.and_then(|d| d.perc_drift),
        c_alpha: (params.regime == Regime::Subcritical).then(|| c_alpha(&params)),
    };
    ctx.record(w, &row)?;
    Report::done(None)
}

fn enumerate(a: &EnumerateArgs, ctx: &Ctx, w: &mut dyn Write) -> LabResult<Report> {
    let count = phi(a.n, a.m)?.to_string();
    match ctx.format {
        None => writeln!(w, "{count}")?,
        Some(Format::Csv) => {
            w.write_all(output::header_line(ctx.name, &ctx.config.to_string()).as_bytes())?;
            writeln!(w, "n,m,phi\n{},{},{count}", a.n, a.m)?;
        }
        // written by hand so large counts stay exact JSON integers
        Some(Format::Json) => writeln!(
            w,
            r#"{{"schema":{SCHEMA},"subcommand":"enumerate","config":{},"n":{},"m":{},"phi":{count}}}"#,
            ctx.config, a.n, a.m
        )?,
    }
    Report::done(None)
}
