use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "anharmonic", version, about = "Two-dimensional quartic anharmonic oscillators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one of the five preset cases end to end.
    Case(CaseArgs),
    /// Lowest Rayleigh–Ritz levels of a preset at θ = 0.
    Spectrum(SpectrumArgs),
    /// Lowest complex-rotation resonance of a preset.
    Resonance(ResonanceArgs),
    /// Riccati–Padé eigenvalue of p² + x² + g x⁴.
    Rpm(RpmArgs),
    /// Apply a preset's reference coordinate map to its potential.
    Transform(TransformArgs),
    /// Point group, boundedness and separating rotation of a preset.
    Symmetry(SymmetryArgs),
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum State {
    Even,
    Odd,
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub enum OmegaPolicy {
    Fixed(f64),
    Optimal,
}

impl FromStr for OmegaPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "optimal" {
            return Ok(OmegaPolicy::Optimal);
        }
        let v = s
            .strip_prefix("fixed:")
            .ok_or_else(|| format!("expected `optimal` or `fixed:<value>`, got `{s}`"))?;
        let w: f64 = v.parse().map_err(|_| format!("invalid frequency `{v}`"))?;
        if !(w > 0.0 && w.is_finite()) {
            return Err(format!("frequency must be positive, got {w}"));
        }
        Ok(OmegaPolicy::Fixed(w))
    }
}

/// Radians, or a multiple of π written as `0.06pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let (num, scale) = match s.strip_suffix("pi") {
        Some(n) => (n, PI),
        None => (s, 1.0),
    };
    let v: f64 = num.trim().parse().map_err(|_| format!("invalid angle `{s}`"))?;
    Ok(v * scale)
}

#[derive(Args, Debug, Clone)]
pub struct ThetaArgs {
    #[arg(long, value_parser = parse_angle, default_value = "0.03pi")]
    pub theta_min: f64,
    #[arg(long, value_parser = parse_angle, default_value = "0.10pi")]
    pub theta_max: f64,
    #[arg(long, default_value_t = 15)]
    pub theta_steps: usize,
}

#[derive(Args, Debug, Clone)]
pub struct PrecisionArgs {
    /// Requested RPM precision in decimal digits.
    #[arg(long, env = "OSC_PRECISION_DIGITS", default_value_t = 80)]
    pub digits: u32,
    #[arg(long, default_value_t = 25)]
    pub dmax: usize,
}

#[derive(Args, Debug)]
pub struct CaseArgs {
    /// Preset number, 1 to 5.
    pub id: u8,
    /// Coupling; each case has its own default.
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub omega: Option<OmegaPolicy>,
    #[command(flatten)]
    pub theta: ThetaArgs,
    #[command(flatten)]
    pub precision: PrecisionArgs,
    /// Case 3 only: print the resonance table as CSV.
    #[arg(long)]
    pub emit_table1: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub case: u8,
    #[arg(long, default_value = "1")]
    pub lambda: String,
    #[arg(long, default_value_t = 20)]
    pub nmax: usize,
    #[arg(long, default_value = "optimal")]
    pub omega: OmegaPolicy,
    /// Number of levels to report.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Diagonalize after applying the preset's reference map.
    #[arg(long)]
    pub transformed: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ResonanceArgs {
    #[arg(long, default_value_t = 3)]
    pub case: u8,
    #[arg(long, default_value = "0.10")]
    pub lambda: String,
    #[arg(long, default_value_t = 30)]
    pub nmax: usize,
    #[arg(long, default_value = "fixed:1")]
    pub omega: OmegaPolicy,
    #[command(flatten)]
    pub theta: ThetaArgs,
    /// Print the result as a resonance-table CSV row.
    #[arg(long)]
    pub emit_table1: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RpmArgs {
    /// Quartic coupling, as a decimal literal.
    #[arg(long)]
    pub g: String,
    #[arg(long, value_enum, default_value_t = State::Even)]
    pub state: State,
    #[command(flatten)]
    pub precision: PrecisionArgs,
    #[arg(long, default_value_t = 0)]
    pub displacement: usize,
    /// Starting energy; defaults to a variational estimate.
    #[arg(long)]
    pub seed: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long)]
    pub case: u8,
    #[arg(long, default_value = "1")]
    pub lambda: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SymmetryArgs {
    #[arg(long)]
    pub case: u8,
    #[arg(long, default_value = "1")]
    pub lambda: String,
    #[command(flatten)]
    pub output: OutputArgs,
}
