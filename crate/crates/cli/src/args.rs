use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "entangle", version, about = "Entanglement measures and QFI for small bipartite states")]
pub struct Cli {
    /// Worker threads (default: all logical cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Draw a seeded random ensemble of density matrices (JSONL)
    Sample(SampleArgs),
    /// Entanglement measures for every state in a JSONL file (CSV)
    Measure(MeasureArgs),
    /// Local-rotation extrema of the mean QFI (CSV)
    Optimize(OptimizeArgs),
    /// A quantity along a decoherence channel's strength grid (CSV)
    Sweep(SweepArgs),
    /// Mean QFI of α|W_N⟩ + e^{iφ}β|GHZ_N⟩ over α (CSV)
    SuperpositionScan(ScanArgs),
    /// Ordering-class counts over measurement results (CSV)
    Census(CensusArgs),
    /// Scatter plot of two result columns (SVG)
    Scatter(ScatterArgs),
    /// Re-run a recorded command and compare output checksums
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldArg {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleArg {
    /// Hilbert–Schmidt mixed states
    Hs,
    /// Uniformly random pure states
    Pure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusMode {
    /// Relations between every unordered pair of states
    Pair,
    /// Relation between two measures on each state
    State,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxesArg {
    Xzx,
    Xyx,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SampleArgs {
    /// Bipartite dimensions, e.g. 2x2 or 2x3
    #[arg(long, default_value = "2x2")]
    pub dims: String,
    #[arg(long)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = FieldArg::Complex)]
    pub field: FieldArg,
    #[arg(long, value_enum, default_value_t = EnsembleArg::Hs)]
    pub measure: EnsembleArg,
    #[arg(long, env = "ENTANGLE_BENCH_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct MeasureArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated subset of concurrence,c_max,negativity,log_negativity,neg_eig,eof,ree
    #[arg(long, default_value = "all")]
    pub measures: String,
    /// Frank–Wolfe gap tolerance for the REE estimate
    #[arg(long, default_value_t = 1e-4)]
    pub ree_tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub ree_max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct OptimizeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Grid step in radians; accepts forms like pi/2 or 0.5
    #[arg(long, default_value = "pi/2")]
    pub step: String,
    /// Finer step for states the coarse grid barely improves
    #[arg(long, default_value = "pi/3")]
    pub refine: String,
    /// Relative improvement below which the finer grid is searched (0 disables)
    #[arg(long, default_value_t = 0.01)]
    pub refine_threshold: f64,
    #[arg(long, value_enum, default_value_t = AxesArg::Xzx)]
    pub axes: AxesArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// ghzN, wN, wlike3, bell or bell1..bell4
    #[arg(long)]
    pub state: String,
    /// adc, aac, dpc or pdc
    #[arg(long)]
    pub channel: String,
    /// mean_qfi, concurrence, negativity or ree
    #[arg(long, default_value = "mean_qfi")]
    pub quantity: String,
    #[arg(long, default_value_t = 101)]
    pub p_steps: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScanArgs {
    /// Number of qubits, 2 to 5
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 101)]
    pub alpha_steps: usize,
    /// Relative phase φ in radians
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phase: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CensusArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Optimizer output to join by id (adds F, FMAX, FMIN)
    #[arg(long)]
    pub mqfi: Option<PathBuf>,
    /// Comma-separated measure names, e.g. C,N,E
    #[arg(long, default_value = "C,N,E")]
    pub measures: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = CensusMode::Pair)]
    pub mode: CensusMode,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScatterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub mqfi: Option<PathBuf>,
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written next to an earlier output
    #[arg(long)]
    pub manifest: PathBuf,
    /// Keep the regenerated file instead of deleting it
    #[arg(long)]
    pub keep: bool,
}

fn absolutize(p: &mut PathBuf) {
    if let Ok(abs) = std::path::absolute(&*p) {
        *p = abs;
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sample(_) => "sample",
            Self::Measure(_) => "measure",
            Self::Optimize(_) => "optimize",
            Self::Sweep(_) => "sweep",
            Self::SuperpositionScan(_) => "superposition-scan",
            Self::Census(_) => "census",
            Self::Scatter(_) => "scatter",
            Self::Replay(_) => "replay",
        }
    }

    pub fn inputs(&self) -> Vec<&Path> {
        match self {
            Self::Measure(a) => vec![&a.input],
            Self::Optimize(a) => vec![&a.input],
            Self::Census(a) => std::iter::once(a.input.as_path()).chain(a.mqfi.as_deref()).collect(),
            Self::Scatter(a) => std::iter::once(a.input.as_path()).chain(a.mqfi.as_deref()).collect(),
            _ => Vec::new(),
        }
    }

    pub fn out_mut(&mut self) -> Option<&mut PathBuf> {
        match self {
            Self::Sample(a) => Some(&mut a.out),
            Self::Measure(a) => Some(&mut a.out),
            Self::Optimize(a) => Some(&mut a.out),
            Self::Sweep(a) => Some(&mut a.out),
            Self::SuperpositionScan(a) => Some(&mut a.out),
            Self::Census(a) => Some(&mut a.out),
            Self::Scatter(a) => Some(&mut a.out),
            Self::Replay(_) => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Self::Sample(a) => Some(a.seed),
            _ => None,
        }
    }

    /// Rewrites every path as absolute so a manifest replays from any
    /// working directory.
    pub fn absolutize_paths(&mut self) {
        match self {
            Self::Measure(a) => absolutize(&mut a.input),
            Self::Optimize(a) => absolutize(&mut a.input),
            Self::Census(a) => {
                absolutize(&mut a.input);
                if let Some(m) = a.mqfi.as_mut() {
                    absolutize(m);
                }
            }
            Self::Scatter(a) => {
                absolutize(&mut a.input);
                if let Some(m) = a.mqfi.as_mut() {
                    absolutize(m);
                }
            }
            Self::Replay(a) => absolutize(&mut a.manifest),
            _ => {}
        }
        if let Some(out) = self.out_mut() {
            absolutize(out);
        }
    }
}
