use std::path::PathBuf;
use std::str::FromStr;

use biharm::grid::{RadialGrid, Spacing};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// `MIN:MAX:COUNT[:linear|log]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl FromStr for RangeSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(format!("expected MIN:MAX:COUNT[:linear|log], got `{s}`"));
        }
        let num = |v: &str, what: &str| v.trim().parse::<f64>().map_err(|_| format!("{what} `{v}` is not a number"));
        let min = num(parts[0], "MIN")?;
        let max = num(parts[1], "MAX")?;
        let count: usize = parts[2].trim().parse().map_err(|_| format!("COUNT `{}` is not a positive integer", parts[2]))?;
        let spacing = match parts.get(3).map(|s| s.trim()) {
            None | Some("linear") => Spacing::Linear,
            Some("log") => Spacing::Log,
            Some(other) => return Err(format!("spacing `{other}` must be `linear` or `log`")),
        };
        if count == 0 {
            return Err("COUNT must be positive".into());
        }
        if !(min.is_finite() && max.is_finite()) || min < 0.0 {
            return Err("MIN and MAX must be finite and MIN non-negative".into());
        }
        if count > 1 && !(max > min) {
            return Err(format!("range {min}:{max} is empty or reversed"));
        }
        if spacing == Spacing::Log && !(min > 0.0) {
            return Err("log spacing needs MIN > 0".into());
        }
        Ok(RangeSpec { min, max, count, spacing })
    }
}

impl RangeSpec {
    pub fn grid(&self) -> biharm::Result<RadialGrid> {
        RadialGrid::spaced(self.min, self.max, self.count, self.spacing)
    }
}

fn tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if t > 0.0 && t <= 1e-2 {
        Ok(t)
    } else {
        Err(format!("tolerance {t} must lie in (0, 1e-2]"))
    }
}

fn positive_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if k > 0 => Ok(k),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "biharm", version, about = "Tables for the biharmonic heat equation")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for inner parallel loops.
    #[arg(long, value_parser = positive_count, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bessel zeros or values J_mu.
    Bessel(BesselArgs),
    /// Kernel profile f_N.
    Kernel(KernelArgs),
    /// Self-similar profile F_{N,beta}.
    Profile(ProfileArgs),
    /// Linear solution S(t)|x|^{-beta}.
    Solution(SolutionArgs),
    /// Bisection for the positivity threshold in beta.
    Scan(ScanArgs),
    /// Evolved Riesz potential of a radial density.
    Riesz(RieszArgs),
    /// Self-similar solution of the semilinear problem.
    Semilinear(SemilinearArgs),
    /// The bound H(x, t) on the nonlinear correction.
    Hbound(HboundArgs),
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["zeros", "eval"])))]
pub struct BesselArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub mu: f64,
    #[arg(long, value_parser = positive_count)]
    pub zeros: Option<usize>,
    #[arg(long, value_name = "ETA-RANGE")]
    pub eval: Option<RangeSpec>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["eval", "sign_changes", "identity_check"])))]
pub struct KernelArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long, value_name = "ETA-RANGE")]
    pub eval: Option<RangeSpec>,
    #[arg(long, value_name = "ETA-MAX")]
    pub sign_changes: Option<f64>,
    #[arg(long)]
    pub identity_check: bool,
    #[arg(long, value_parser = tolerance, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, value_name = "RANGE")]
    pub eta: RangeSpec,
    /// Attach a positivity certificate to the metadata.
    #[arg(long)]
    pub certify: bool,
    #[arg(long, value_parser = tolerance, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SolutionArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, value_name = "RANGE")]
    pub x: RangeSpec,
    #[arg(long, value_name = "RANGE")]
    pub t: RangeSpec,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub beta_lo: f64,
    #[arg(long)]
    pub beta_hi: f64,
    #[arg(long)]
    pub resolution: f64,
}

#[derive(Debug, Args)]
pub struct RieszArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub q: f64,
    /// Two-column CSV of (radius, value).
    #[arg(long, value_name = "FILE")]
    pub density: PathBuf,
    #[arg(long, value_name = "RANGE")]
    pub x: RangeSpec,
    #[arg(long, value_name = "RANGE")]
    pub t: RangeSpec,
}

#[derive(Debug, Args)]
pub struct SemilinearArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, value_parser = positive_count, default_value_t = 15)]
    pub max_iters: usize,
    #[arg(long, value_parser = tolerance, default_value_t = 1e-8)]
    pub tol: f64,
    /// Attach the envelope constants to the metadata.
    #[arg(long)]
    pub envelopes: bool,
}

#[derive(Debug, Args)]
pub struct HboundArgs {
    #[arg(long)]
    pub dim: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_name = "RANGE")]
    pub x: RangeSpec,
    #[arg(long, value_name = "RANGE")]
    pub t: RangeSpec,
}
