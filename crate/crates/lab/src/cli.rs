use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Clone)]
#[command(name = "peelab", version, about = "Simulation lab for domain-Markov half-planar triangulations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Data file; standard output when absent. The JSON summary goes next to
    /// it as `<output>.summary.json`, or to standard error.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; overrides the PEELAB_WORKERS environment variable.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Serialize, Debug, Clone)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Model constants for one alpha.
    Constants(ConstantsArgs),
    /// Exact count of triangulations of an m-gon with n internal vertices.
    Enumerate(EnumerateArgs),
    /// Explore a hull and export it as an edge list.
    SampleMap(SampleMapArgs),
    /// Hull boundary, volume and peeling times per radius.
    HullStats(HullStatsArgs),
    /// Root-cluster survival and interface density.
    Percolation(PercolationArgs),
    /// Simple random walk on a sampled hull.
    Walk(WalkArgs),
    /// Tail of the swallowed-vertex count below criticality.
    Tails(TailsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::Enumerate(_) => "enumerate",
            Command::SampleMap(_) => "sample-map",
            Command::HullStats(_) => "hull-stats",
            Command::Percolation(_) => "percolation",
            Command::Walk(_) => "walk",
            Command::Tails(_) => "tails",
        }
    }
}

/// Accepts plain integers, `1_000_000` and exact scientific forms like `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let t = s.replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    match t.parse::<f64>() {
        Ok(f) if f >= 0.0 && f.fract() == 0.0 && f < 1.8e19 => Ok(f as u64),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

fn parse_count32(s: &str) -> Result<u32, String> {
    let v = parse_count(s)?;
    u32::try_from(v).map_err(|_| format!("`{s}` does not fit in 32 bits"))
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct ConstantsArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Also report the percolation drift at this p.
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct EnumerateArgs {
    #[arg(long, value_parser = parse_count)]
    pub n: u64,
    #[arg(long, value_parser = parse_count)]
    pub m: u64,
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MapMode {
    /// Count-only holes.
    Skeleton,
    /// Every hole triangulated.
    Full,
}

#[derive(ValueEnum, Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum HullMode {
    /// Counters only, no map.
    Stats,
    Skeleton,
    Full,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct SampleMapArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_count32)]
    pub radius: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = MapMode::Full)]
    pub mode: MapMode,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub i_max: u64,
    #[arg(long, value_parser = parse_count, default_value = "20000000")]
    pub max_vertices: u64,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct HullStatsArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_count32)]
    pub radius: u32,
    #[arg(long, value_parser = parse_count, default_value = "1")]
    pub replicas: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `skeleton` or `full` also count root cut-edges.
    #[arg(long, value_enum, default_value_t = HullMode::Stats)]
    pub mode: HullMode,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub i_max: u64,
    #[arg(long, value_parser = parse_count, default_value = "100000000")]
    pub max_steps: u64,
    #[arg(long, value_parser = parse_count, default_value = "20000000")]
    pub max_vertices: u64,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct PercolationArgs {
    #[arg(long)]
    pub alpha: f64,
    /// One or more site probabilities, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub p: Vec<f64>,
    /// Black count at which the root cluster counts as infinite.
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub cap: u64,
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Boundary stretch length for the interface density; 0 skips it.
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    pub k: u64,
    /// Stretch explorations per p.
    #[arg(long, value_parser = parse_count, default_value = "20")]
    pub replicas: u64,
    /// Interface length at which an interface counts as infinite.
    #[arg(long, value_parser = parse_count, default_value = "1000")]
    pub interface_cap: u64,
    #[arg(long, value_parser = parse_count, default_value = "100000000")]
    pub max_steps: u64,
    /// Also bisect for p_c from the survival curve.
    #[arg(long)]
    pub estimate_pc: bool,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct WalkArgs {
    #[arg(long, required_unless_present = "map")]
    pub alpha: Option<f64>,
    #[arg(long, value_parser = parse_count32, required_unless_present = "map")]
    pub radius: Option<u32>,
    #[arg(long, value_parser = parse_count, default_value = "100")]
    pub walks: u64,
    /// Step budget per walk.
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub steps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stop walks on original boundary vertices too.
    #[arg(long)]
    pub absorb_original: bool,
    /// Also estimate return probabilities up to this time.
    #[arg(long, value_parser = parse_count)]
    pub returns: Option<u64>,
    /// Walk on an exported edge list instead of a fresh hull.
    #[arg(long)]
    pub map: Option<std::path::PathBuf>,
    #[arg(long, value_parser = parse_count, default_value = "20000000")]
    pub max_vertices: u64,
}

#[derive(Args, Serialize, Debug, Clone)]
pub struct TailsArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub samples: u64,
    /// Largest tail point.
    #[arg(long, value_parser = parse_count, default_value = "10000")]
    pub x: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub i_max: u64,
}
