//! Oracle-equivalence and invariant checks, runnable from an installed
//! binary. Random states come from a fixed seed so reruns are identical.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use squeezed_discord::bath::{gamma_analytic_zero_t, gamma_quadrature, DephasingProfile, SqueezedBathSpec};
use squeezed_discord::correlations::{discord_bruteforce, discord_closed, omega, BruteForceOptions};
use squeezed_discord::dynamics::{
    amplification_rate, classify_critical_time, corner_at, linspace, CriticalKind, DEFAULT_HORIZON,
};
use squeezed_discord::qsl::{lambda_op, lambda_op_closed, qsl_time};
use squeezed_discord::states::{eigenvalues_closed, with_corner, XStateParams};

use crate::error::{CliError, CliResult};

pub const SEED: u64 = 0x5eed_d15c;

#[derive(Debug, Clone, Copy)]
pub struct ValidateOptions {
    /// Smaller samples; every check still runs.
    pub fast: bool,
    pub seed: u64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { fast: false, seed: SEED }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub description: &'static str,
    /// Largest deviation seen; the check passes when it is `<= tolerance`.
    pub max_error: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub passed: bool,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub fast: bool,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<width$}  {}  max_err={:<10.3e} tol={:<8.1e} n={:<5} {:.2}s",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.max_error,
                c.tolerance,
                c.samples,
                c.seconds,
            );
        }
        let _ = writeln!(out, "{} of {} checks passed", self.checks.len() - self.failures(), self.checks.len());
        out
    }
}

type CheckFn = fn(&ValidateOptions, &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)>;

struct Check {
    name: &'static str,
    description: &'static str,
    tolerance: f64,
    run: CheckFn,
}

const CHECKS: &[Check] = &[
    Check {
        name: "gamma-quadrature",
        description: "quadrature decoherence function against the zero-temperature closed form",
        tolerance: 1e-8,
        run: gamma_quadrature_check,
    },
    Check {
        name: "spectrum-closed-form",
        description: "closed-form X-state spectrum against the dense eigensolver",
        tolerance: 1e-10,
        run: spectrum_check,
    },
    Check {
        name: "information-balance",
        description: "I = C + Q",
        tolerance: 1e-12,
        run: balance_check,
    },
    Check {
        name: "marginals",
        description: "single-qubit marginals stay maximally mixed",
        tolerance: 1e-12,
        run: marginal_check,
    },
    Check {
        name: "discord-bruteforce",
        description: "closed-form discord against measurement optimization",
        tolerance: 1e-6,
        run: discord_check,
    },
    Check {
        name: "critical-closed-form",
        description: "critical time root against the unsqueezed closed form",
        tolerance: 1e-8,
        run: critical_closed_check,
    },
    Check {
        name: "critical-residual",
        description: "sudden-change condition at the returned critical time",
        tolerance: 1e-9,
        run: critical_residual_check,
    },
    Check {
        name: "lambda-closed-form",
        description: "time-averaged generator norm against its closed form",
        tolerance: 1e-8,
        run: lambda_check,
    },
    Check {
        name: "qsl-bound",
        description: "speed-limit time never exceeds the actual time",
        tolerance: 1e-12,
        run: qsl_bound_check,
    },
    Check {
        name: "stationary-rate",
        description: "amplification rate of a stationary state is one",
        tolerance: 1e-12,
        run: stationary_rate_check,
    },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Parses `NAME=VALUE` overrides; unknown names are config errors.
pub fn parse_overrides(items: &[String]) -> CliResult<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("tolerance override `{item}` is not NAME=VALUE")))?;
        if !CHECKS.iter().any(|c| c.name == name) {
            return Err(CliError::Config(format!(
                "unknown check `{name}`; known: {}",
                check_names().join(", ")
            )));
        }
        let v: f64 = value
            .parse()
            .map_err(|_| CliError::Config(format!("tolerance for `{name}` is not a number: `{value}`")))?;
        if !(v >= 0.0) {
            return Err(CliError::Config(format!("tolerance for `{name}` must be >= 0")));
        }
        out.insert(name.to_owned(), v);
    }
    Ok(out)
}

/// Runs every check; numerical errors inside a check count as failures.
pub fn run_checks(opts: &ValidateOptions, overrides: &BTreeMap<String, f64>) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let checks = CHECKS
        .iter()
        .map(|c| {
            let start = Instant::now();
            let tolerance = overrides.get(c.name).copied().unwrap_or(c.tolerance);
            let (max_error, samples) = (c.run)(opts, &mut rng).unwrap_or((f64::INFINITY, 0));
            CheckOutcome {
                name: c.name,
                description: c.description,
                max_error,
                tolerance,
                samples,
                passed: max_error <= tolerance,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect();
    ValidationReport {
        fast: opts.fast,
        seed: opts.seed,
        checks,
    }
}

/// Uniform sample from the physical tetrahedron.
pub fn random_state(rng: &mut ChaCha8Rng) -> XStateParams {
    loop {
        let c: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if let Ok(p) = XStateParams::new(c[0], c[1], c[2]) {
            return p;
        }
    }
}

/// A state with a corner somewhere between its initial value and zero.
fn random_case(rng: &mut ChaCha8Rng) -> (XStateParams, f64) {
    let p = random_state(rng);
    let alpha = p.corner() * rng.random_range(0.0..=1.0);
    (p, alpha)
}

fn samples(opts: &ValidateOptions, fast: usize, full: usize) -> usize {
    if opts.fast { fast } else { full }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn gamma_quadrature_check(opts: &ValidateOptions, _: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let taus = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
    let mut settings = vec![(0.0, 0.0)];
    let rs: &[f64] = if opts.fast { &[0.5] } else { &[0.25, 0.5, 1.0] };
    for &r in rs {
        for t in [0.0, FRAC_PI_4, FRAC_PI_2, PI] {
            settings.push((r, t));
        }
    }
    let errs: Vec<f64> = settings
        .par_iter()
        .map(|&(r, t)| {
            let bath = SqueezedBathSpec::vacuum(r, t)?;
            let quad = DephasingProfile::quadrature(bath).with_tolerances(1e-10, 1e-14)?;
            let mut worst: f64 = 0.0;
            for &tau in &taus {
                worst = worst.max((gamma_quadrature(&quad, tau)? - gamma_analytic_zero_t(&bath, tau)?).abs());
            }
            Ok(worst)
        })
        .collect::<squeezed_discord::Result<_>>()?;
    Ok((errs.iter().copied().fold(0.0, f64::max), settings.len() * taus.len()))
}

fn spectrum_check(opts: &ValidateOptions, rng: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let n = samples(opts, 200, 2000);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (p, a) = random_case(rng);
        let closed = eigenvalues_closed(&p, a)?.sorted();
        let dense = with_corner(&p, a)?.eigenvalues();
        worst = worst.max(max_abs_diff(&closed, &dense));
    }
    Ok((worst, n))
}

fn balance_check(opts: &ValidateOptions, rng: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let n = samples(opts, 200, 2000);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (p, a) = random_case(rng);
        let c = discord_closed(&p, a)?;
        worst = worst.max((c.mutual_info - c.classical - c.discord).abs());
    }
    Ok((worst, n))
}

fn marginal_check(opts: &ValidateOptions, rng: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let n = samples(opts, 200, 2000);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let (p, a) = random_case(rng);
        let rho = with_corner(&p, a)?;
        for m in [rho.reduced_a(), rho.reduced_b()] {
            for i in 0..2 {
                for j in 0..2 {
                    let want = if i == j { 0.5 } else { 0.0 };
                    worst = worst.max((m[(i, j)] - want).norm());
                }
            }
        }
    }
    Ok((worst, n))
}

fn discord_check(opts: &ValidateOptions, rng: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let n = samples(opts, 12, 100);
    let cases: Vec<(XStateParams, f64)> = (0..n).map(|_| random_case(rng)).collect();
    let bf = BruteForceOptions::default();
    let errs: Vec<f64> = cases
        .iter()
        .map(|(p, a)| Ok((discord_closed(p, *a)?.discord - discord_bruteforce(&with_corner(p, *a)?, &bf)?).abs()))
        .collect::<squeezed_discord::Result<_>>()?;
    Ok((errs.iter().copied().fold(0.0, f64::max), n))
}

fn finite_cases(n: usize) -> Vec<XStateParams> {
    // c3 = s·c1 with s in (1/2, 1) keeps the corner branch ahead at τ = 0 and
    // the c3 branch ahead as τ → ∞
    let mut out = Vec::new();
    for c1 in linspace(0.1, 0.5, n) {
        for s in linspace(0.52, 0.98, n) {
            out.push(XStateParams::new(c1, 0.0, s * c1).expect("physical"));
        }
    }
    out
}

fn critical_closed_check(opts: &ValidateOptions, _: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let cases = finite_cases(samples(opts, 4, 10));
    let profile = DephasingProfile::analytic(SqueezedBathSpec::vacuum(0.0, 0.0)?)?;
    let errs: Vec<f64> = cases
        .par_iter()
        .map(|p| {
            let res = classify_critical_time(p, &profile)?;
            Ok(match (res.kind, res.tau_c, res.k_target) {
                (CriticalKind::Finite, Some(tc), Some(k)) => (tc - (k.powf(-FRAC_PI_2) - 1.0).sqrt()).abs(),
                _ => f64::INFINITY,
            })
        })
        .collect::<squeezed_discord::Result<_>>()?;
    Ok((errs.iter().copied().fold(0.0, f64::max), cases.len()))
}

fn critical_residual_check(opts: &ValidateOptions, _: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let cases = finite_cases(samples(opts, 3, 6));
    let settings: Vec<(f64, f64)> = [0.1, 0.5, 1.0]
        .iter()
        .flat_map(|&r| [0.0, FRAC_PI_2, PI].map(|t| (r, t)))
        .collect();
    let work: Vec<(XStateParams, (f64, f64))> =
        cases.iter().flat_map(|p| settings.iter().map(move |s| (*p, *s))).collect();
    let errs: Vec<f64> = work
        .par_iter()
        .map(|(p, (r, t))| {
            let profile = DephasingProfile::analytic(SqueezedBathSpec::vacuum(*r, *t)?)?;
            let res = classify_critical_time(p, &profile)?;
            Ok(match res.tau_c {
                Some(tc) => (omega(p, corner_at(p, &profile, tc)?.1) - p.c3().abs()).abs(),
                None => 0.0,
            })
        })
        .collect::<squeezed_discord::Result<_>>()?;
    Ok((errs.iter().copied().fold(0.0, f64::max), work.len()))
}

fn lambda_check(opts: &ValidateOptions, rng: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let n = samples(opts, 10, 60);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = random_state(rng);
        let bath = SqueezedBathSpec::vacuum(rng.random_range(0.0..1.0), rng.random_range(0.0..2.0 * PI))?;
        let profile = DephasingProfile::analytic(bath)?;
        let tau = rng.random_range(0.1..5.0);
        worst = worst.max((lambda_op(&p, &profile, tau)? - lambda_op_closed(&p, &profile, tau)?).abs());
    }
    Ok((worst, n))
}

fn qsl_bound_check(opts: &ValidateOptions, rng: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let n = samples(opts, 20, 150);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..n {
        let p = random_state(rng);
        let bath = SqueezedBathSpec::vacuum(rng.random_range(0.0..1.5), rng.random_range(0.0..2.0 * PI))?;
        let tau = rng.random_range(0.05..10.0);
        let rec = qsl_time(&p, &DephasingProfile::analytic(bath)?, tau)?;
        worst = worst.max(rec.tau_qsl - tau);
    }
    Ok((worst.max(0.0), n))
}

fn stationary_rate_check(opts: &ValidateOptions, rng: &mut ChaCha8Rng) -> squeezed_discord::Result<(f64, usize)> {
    let n = samples(opts, 10, 50);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < n {
        let c = rng.random_range(-0.45..0.45);
        let c3 = rng.random_range(-0.05..0.05);
        let Ok(p) = XStateParams::new(c, c, c3) else { continue };
        let bath = SqueezedBathSpec::vacuum(rng.random_range(0.0..1.0), rng.random_range(0.0..2.0 * PI))?;
        let profile = DephasingProfile::analytic(bath)?;
        match amplification_rate(&p, &profile, DEFAULT_HORIZON, Default::default()) {
            Ok(r) => worst = worst.max((r - 1.0).abs()),
            // zero initial discord has no rate; not a failure
            Err(squeezed_discord::Error::UndefinedRate { .. }) => {}
            Err(e) => return Err(e),
        }
        done += 1;
    }
    Ok((worst, n))
}
