//! Flag definitions and their mapping onto [`ScenarioConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use squeezed_discord::bath::{Method, SqueezedBathSpec};
use squeezed_discord::dynamics::Convention;
use squeezed_discord::states::XStateParams;

use crate::commands::Command;
use crate::config::{Format, Range, ScenarioConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "sqdisc",
    version,
    about = "Discord dynamics of two qubits in a common squeezed reservoir",
    long_about = "Discord dynamics of two qubits in a common squeezed reservoir.\n\n\
        Every computational subcommand reads an optional JSON scenario (--config) and applies \
        flag overrides on top. Each artifact is written with a sibling <artifact>.manifest.json.\n\n\
        Exit codes: 0 success, 2 config error, 3 numerical failure, 4 IO error."
)]
pub struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "SQDISC_WORKERS")]
    pub workers: Option<usize>,

    /// Directory for artifacts whose path is not given explicitly.
    #[arg(long, global = true, env = "SQDISC_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,

    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Correlations along a time grid (CSV: tau,gamma,alpha,I,C,chi,Q).
    Trace {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Print the density matrix at this time as JSON to stdout.
        #[arg(long, value_name = "TAU")]
        dump_state: Option<f64>,
    },
    /// Critical time classification, optionally swept over c1 (JSON by default).
    Critical {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Discord over a (c1, tau) grid (CSV: r,theta,c1,tau,Q).
    Phase {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Amplification rate against c1 with curve intersections (CSV: r,theta,c1,R).
    Amplify {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Speed-limit time (CSV: c1,r,theta,tau,Theta,Lambda_op,tau_qsl).
    Qsl {
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Run a named figure scenario; flags override the preset.
    Preset {
        /// Preset name; see --list.
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        #[arg(long)]
        list: bool,
        /// Print the preset's scenario JSON instead of running it.
        #[arg(long)]
        show: bool,
        #[command(flatten)]
        scenario: ScenarioArgs,
    },
    /// Oracle-equivalence and invariant checks with a pass/fail table.
    Validate {
        /// Smaller samples for a quick run.
        #[arg(long)]
        fast: bool,
        #[arg(long, default_value_t = crate::validate::SEED)]
        seed: u64,
        /// Override a check tolerance, e.g. marginals=1e-10. Repeatable.
        #[arg(long = "set-tolerance", value_name = "NAME=VALUE")]
        set_tolerance: Vec<String>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Analytic,
    Quadrature,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    TimeAverage,
    PlainIntegral,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

/// Flags shared by every computational subcommand. Angles accept `pi`
/// expressions such as `pi/2` or `3pi/4`; ranges are `MIN:MAX:POINTS`.
#[derive(Debug, Default, Args)]
pub struct ScenarioArgs {
    /// JSON scenario file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Artifact path (overrides output.path).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,

    #[arg(long, allow_hyphen_values = true)]
    pub c1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c3: Option<f64>,

    /// Squeezing strength.
    #[arg(long)]
    pub r: Option<f64>,
    /// Squeezing phase.
    #[arg(long, value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Inverse temperature in units of 1/omega_c; `inf` for zero temperature.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub omega_c: Option<f64>,

    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long)]
    pub quad_rel_tol: Option<f64>,
    #[arg(long)]
    pub quad_abs_tol: Option<f64>,

    /// Time grid in units of 1/omega_c.
    #[arg(long, value_parser = parse_range, value_name = "MIN:MAX:N")]
    pub tau: Option<Range>,
    #[arg(long, value_parser = parse_range, value_name = "MIN:MAX:N")]
    pub c1_range: Option<Range>,
    /// Comma-separated squeezing phases.
    #[arg(long, value_parser = parse_angle_list, allow_hyphen_values = true)]
    pub thetas: Option<AngleList>,
    /// Comma-separated squeezing strengths.
    #[arg(long, value_parser = parse_angle_list)]
    pub rs: Option<AngleList>,

    #[arg(long, value_enum)]
    pub convention: Option<ConventionArg>,
    /// Window for the amplification rate.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Evolution time for the speed limit.
    #[arg(long)]
    pub drive_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleList(pub Vec<f64>);

/// Parses `1.5`, `pi`, `-pi/4`, `3pi/4`, `2*pi`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let bad = || format!("cannot parse angle `{s}`");
    let Some(at) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let coef = t[..at].trim_end_matches('*');
    let coef = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &t[at + 2..];
    let den = match rest {
        "" => 1.0,
        r => r.strip_prefix('/').and_then(|d| d.parse::<f64>().ok()).ok_or_else(bad)?,
    };
    let v = coef * std::f64::consts::PI / den;
    if v.is_finite() { Ok(v) } else { Err(bad()) }
}

pub fn parse_angle_list(s: &str) -> Result<AngleList, String> {
    s.split(',').map(parse_angle).collect::<Result<Vec<_>, _>>().map(AngleList)
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("expected MIN:MAX:POINTS, got `{s}`");
    let [lo, hi, n] = parts[..] else { return Err(bad()) };
    Ok(Range::new(
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
        n.trim().parse().map_err(|_| bad())?,
    ))
}

impl ScenarioArgs {
    /// Base config from `--config` (or `base`), then every flag on top.
    pub fn resolve(&self, base: ScenarioConfig) -> CliResult<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => base,
        };
        self.apply(&mut cfg)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&self, cfg: &mut ScenarioConfig) -> CliResult<()> {
        if self.c1.is_some() || self.c2.is_some() || self.c3.is_some() {
            cfg.state = XStateParams::new(
                self.c1.unwrap_or(cfg.state.c1()),
                self.c2.unwrap_or(cfg.state.c2()),
                self.c3.unwrap_or(cfg.state.c3()),
            )?;
        }
        let b = cfg.bath;
        if self.r.is_some() || self.theta.is_some() || self.beta.is_some() || self.omega_c.is_some() {
            cfg.bath = SqueezedBathSpec::new(
                self.r.unwrap_or(b.r()),
                self.theta.unwrap_or(b.theta()),
                self.beta.unwrap_or(b.beta()),
                self.omega_c.unwrap_or(b.omega_c()),
                b.spectral(),
            )?;
        }
        if let Some(m) = self.method {
            cfg.method.kind = match m {
                MethodArg::Analytic => Method::AnalyticZeroT,
                MethodArg::Quadrature => Method::Quadrature,
            };
        }
        if let Some(t) = self.quad_rel_tol {
            cfg.method.quad_rel_tol = t;
        }
        if let Some(t) = self.quad_abs_tol {
            cfg.method.quad_abs_tol = t;
        }
        if let Some(r) = self.tau {
            cfg.grid.tau = r;
        }
        if let Some(r) = self.c1_range {
            cfg.grid.c1 = Some(r);
        }
        // an explicit r or θ list replaces explicit pairs
        if self.thetas.is_some() || self.rs.is_some() {
            cfg.grid.pairs = None;
        }
        if let Some(AngleList(v)) = &self.thetas {
            cfg.grid.theta = Some(v.clone());
        }
        if let Some(AngleList(v)) = &self.rs {
            cfg.grid.r = Some(v.clone());
        }
        if let Some(c) = self.convention {
            cfg.convention = match c {
                ConventionArg::TimeAverage => Convention::TimeAverage,
                ConventionArg::PlainIntegral => Convention::PlainIntegral,
            };
        }
        if let Some(h) = self.horizon {
            cfg.horizon = h;
        }
        if let Some(t) = self.drive_time {
            cfg.drive_time = t;
        }
        if let Some(p) = &self.out {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = self.format {
            cfg.output.format = Some(match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            });
        }
        Ok(())
    }
}

impl Sub {
    pub fn command(&self) -> Option<Command> {
        Some(match self {
            Sub::Trace { .. } => Command::Trace,
            Sub::Critical { .. } => Command::Critical,
            Sub::Phase { .. } => Command::Phase,
            Sub::Amplify { .. } => Command::Amplify,
            Sub::Qsl { .. } => Command::Qsl,
            Sub::Preset { .. } | Sub::Validate { .. } => return None,
        })
    }
}
