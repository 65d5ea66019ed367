use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use dampedwig::langevin::{Scheme, SdeConfig};
use dampedwig::phase::gmatrix::MAX_SIZE;
use dampedwig::{DerivedParams, ModelParams};

/// Curves A, B and C of the phase expectation, as `(D, B)`.
pub const PHASE_CURVES: [(&str, f64, f64); 3] =
    [("A", 1000.0, 0.02), ("B", 10.0, 0.05), ("C", 5.0, 0.05)];

pub const DEFAULT_D: f64 = 5.0;
pub const DEFAULT_B: f64 = 0.05;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(
    name = "dampedwig",
    version,
    about = "Wigner-Weyl observables of a noise-driven damped oscillator, as CSV"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Ground-state survival probability: exact, long-time and frictionless.
    Survival,
    /// Expectation of the canonical phase from the ground state.
    PhaseMean,
    /// Eigenvalues of the truncated phase operators.
    Spectrum,
    /// Monte-Carlo oracle, normalisation and limit checks.
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Survival => "survival",
            Command::PhaseMean => "phase-mean",
            Command::Spectrum => "spectrum",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Temperature D = 2 Theta / (hbar omega).
    #[arg(long = "D", global = true, allow_negative_numbers = true)]
    pub d: Option<f64>,
    /// Friction B = beta / omega.
    #[arg(long = "B", global = true, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Noise strength N_o = mu / (m omega^2 hbar); defaults to B D.
    #[arg(long = "No", global = true, allow_negative_numbers = true)]
    pub n0: Option<f64>,
    /// Phase matrix size.
    #[arg(long, global = true, default_value_t = 150)]
    pub nmax: usize,
    /// Comma-separated beta t values for the spectrum.
    #[arg(long = "beta-t", global = true, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [0.0, 2.0, 5.0])]
    pub beta_t: Vec<f64>,
    /// Largest omega t.
    #[arg(
        long,
        global = true,
        default_value_t = 100.0,
        allow_negative_numbers = true
    )]
    pub tmax: f64,
    /// Output spacing in omega t.
    #[arg(
        long = "dt-out",
        global = true,
        default_value_t = 0.5,
        allow_negative_numbers = true
    )]
    pub dt_out: f64,
    /// Langevin step omega dt.
    #[arg(
        long,
        global = true,
        default_value_t = 0.005,
        allow_negative_numbers = true
    )]
    pub dt: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 20_000)]
    pub trajectories: usize,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Absolute tolerance of angular quadratures.
    #[arg(
        long,
        global = true,
        default_value_t = 1e-10,
        allow_negative_numbers = true
    )]
    pub tol: f64,
    /// Compare the oracle against beta scaled by this factor.
    #[arg(
        long = "perturb-beta",
        global = true,
        default_value_t = 1.0,
        allow_negative_numbers = true
    )]
    pub perturb_beta: f64,
}

/// Fully validated configuration of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub model: ModelParams,
    pub derived: DerivedParams,
    /// Whether `--D`/`--B` were given; phase-mean then draws one custom curve.
    pub custom_model: bool,
    pub nmax: usize,
    pub beta_t: Vec<f64>,
    pub tmax: f64,
    pub dt_out: f64,
    pub dt: f64,
    pub seed: u64,
    pub trajectories: usize,
    pub out: Option<PathBuf>,
    pub tol: f64,
    pub perturb_beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn finite_nonneg(name: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(bad(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Most output rows a single run may request.
pub const MAX_ROWS: usize = 1_000_000;

impl RunConfig {
    pub fn new(command: Command, o: &Options) -> Result<Self, ConfigError> {
        let dd = o.d.unwrap_or(DEFAULT_D);
        let b = o.b.unwrap_or(DEFAULT_B);
        finite_nonneg("D", dd)?;
        finite_nonneg("B", b)?;
        let model = match o.n0 {
            Some(n0) => {
                finite_nonneg("No", n0)?;
                ModelParams::dimensionless(dd, b, n0)
            }
            None => ModelParams::thermal_dimensionless(dd, b),
        };
        let derived = model.derive().map_err(|e| bad(e.to_string()))?;
        finite_nonneg("tmax", o.tmax)?;
        if !(o.dt_out.is_finite() && o.dt_out > 0.0) {
            return Err(bad(format!("dt-out must be > 0, got {}", o.dt_out)));
        }
        if o.tmax / o.dt_out >= MAX_ROWS as f64 {
            return Err(bad(format!("tmax / dt-out exceeds {MAX_ROWS} rows")));
        }
        if o.nmax == 0 || o.nmax > MAX_SIZE {
            return Err(bad(format!(
                "nmax must be in 1..={MAX_SIZE}, got {}",
                o.nmax
            )));
        }
        if o.beta_t.is_empty() {
            return Err(bad("beta-t list is empty"));
        }
        for &bt in &o.beta_t {
            finite_nonneg("beta-t", bt)?;
        }
        if !(o.tol.is_finite() && o.tol > 0.0) {
            return Err(bad(format!("tol must be > 0, got {}", o.tol)));
        }
        if !(o.perturb_beta.is_finite() && o.perturb_beta > 0.0) {
            return Err(bad(format!(
                "perturb-beta must be > 0, got {}",
                o.perturb_beta
            )));
        }
        if o.trajectories < 1000 {
            return Err(bad(format!(
                "trajectories must be at least 1000, got {}",
                o.trajectories
            )));
        }
        let rc = RunConfig {
            command,
            model,
            derived,
            custom_model: o.d.is_some() || o.b.is_some() || o.n0.is_some(),
            nmax: o.nmax,
            beta_t: o.beta_t.clone(),
            tmax: o.tmax,
            dt_out: o.dt_out,
            dt: o.dt,
            seed: o.seed,
            trajectories: o.trajectories,
            out: o.out.clone(),
            tol: o.tol,
            perturb_beta: o.perturb_beta,
        };
        if command == Command::Validate {
            rc.sde_config().validate().map_err(|e| bad(e.to_string()))?;
            model
                .with_beta(model.beta * o.perturb_beta)
                .derive()
                .map_err(|e| bad(format!("perturbed model: {e}")))?;
        }
        Ok(rc)
    }

    pub fn from_cli(cli: &Cli) -> Result<Self, ConfigError> {
        Self::new(cli.command, &cli.options)
    }

    /// Output times `0, dt_out, ...` up to `tmax`.
    pub fn time_grid(&self) -> Vec<f64> {
        let n = (self.tmax / self.dt_out * (1.0 + 1e-12)).floor() as usize;
        (0..=n).map(|i| i as f64 * self.dt_out).collect()
    }

    /// Langevin run over `[0, tmax]`, reporting every `dt_out`.
    pub fn sde_config(&self) -> SdeConfig {
        let n_steps = (self.tmax / self.dt).round().max(1.0) as usize;
        let every = ((self.dt_out / self.dt).round() as usize).clamp(1, n_steps);
        SdeConfig {
            dt: self.dt,
            n_steps: n_steps - n_steps % every,
            n_trajectories: self.trajectories,
            seed: self.seed,
            scheme: Scheme::Heun,
            report_every: every,
        }
    }

    /// `#`-prefixed metadata block recording the full configuration.
    pub fn header(&self) -> String {
        let mut s = String::new();
        let m = &self.derived;
        let bts: Vec<String> = self.beta_t.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(
            s,
            "# dampedwig {} (git {})",
            env!("CARGO_PKG_VERSION"),
            env!("DAMPEDWIG_GIT_HASH")
        );
        let _ = writeln!(s, "# command: {}", self.command.name());
        let _ = writeln!(
            s,
            "# model: D={} B={} No={} thermal={}",
            m.temperature_d, m.friction_b, m.noise_n0, self.model.thermal_consistency
        );
        let _ = writeln!(
            s,
            "# grid: tmax={} dt_out={} nmax={} beta_t={}",
            self.tmax,
            self.dt_out,
            self.nmax,
            bts.join(",")
        );
        let _ = writeln!(
            s,
            "# oracle: dt={} seed={} trajectories={} perturb_beta={} scheme=heun",
            self.dt, self.seed, self.trajectories, self.perturb_beta
        );
        let _ = writeln!(s, "# tol: {:e}", self.tol);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn parse(args: &[&str]) -> Result<RunConfig, ConfigError> {
        let cli = Cli::try_parse_from(std::iter::once("dampedwig").chain(args.iter().copied()))
            .expect("arguments parse");
        RunConfig::from_cli(&cli)
    }

    #[test]
    fn default_model_is_d5_b005_thermal() {
        let rc = parse(&["survival"]).unwrap();
        assert_eq!(rc.derived.temperature_d, 5.0);
        assert_eq!(rc.derived.friction_b, 0.05);
        assert!((rc.derived.noise_n0 - 0.25).abs() < 1e-15);
        assert!(!rc.custom_model);
        assert_eq!(rc.beta_t, vec![0.0, 2.0, 5.0]);
    }

    #[test]
    fn explicit_noise_breaks_thermal_consistency() {
        let rc = parse(&["survival", "--No", "0.7", "--B", "0.1"]).unwrap();
        assert_eq!(rc.derived.noise_n0, 0.7);
        assert!(!rc.model.thermal_consistency);
        assert!(rc.custom_model);
    }

    #[test]
    fn time_grid_includes_endpoint() {
        let rc = parse(&["survival", "--tmax", "0.3", "--dt-out", "0.1"]).unwrap();
        assert_eq!(rc.time_grid().len(), 4);
        let rc = parse(&["survival", "--tmax", "0"]).unwrap();
        assert_eq!(rc.time_grid(), vec![0.0]);
    }

    #[test]
    fn sde_reports_land_on_output_grid() {
        let rc = parse(&[
            "validate", "--tmax", "10", "--dt-out", "0.5", "--dt", "0.01",
        ])
        .unwrap();
        let c = rc.sde_config();
        assert_eq!((c.n_steps, c.report_every), (1000, 50));
        assert_eq!(c.n_reports(), 21);
    }

    #[test]
    fn rejects_bad_values() {
        for args in [
            &["survival", "--B", "2"][..],
            &["survival", "--No", "-0.1"],
            &["spectrum", "--beta-t", "0,-1"],
            &["survival", "--tmax", "inf"],
            &["spectrum", "--nmax", "5000"],
            &["validate", "--perturb-beta", "0"],
            &["validate", "--dt", "0.2"],
        ] {
            assert!(parse(args).is_err(), "{args:?}");
        }
    }

    #[test]
    fn header_records_configuration() {
        let h = parse(&["spectrum", "--beta-t", "1,3"]).unwrap().header();
        assert!(h.lines().all(|l| l.starts_with("# ")));
        assert!(h.contains("# command: spectrum"));
        assert!(h.contains("beta_t=1,3"));
        assert!(h.contains("(git "));
    }
}
