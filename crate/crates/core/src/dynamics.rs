//! Discord traces, sudden-change critical times, steady state and the
//! amplification rate.
//!
//! Times are scaled, `τ = ω_c t`. The corner coherence of the evolved state is
//! `α(τ) = (c1 − c2) e^{-4Γ(τ)}`; everything else in the X state is frozen.

use std::cell::RefCell;

use rayon::prelude::*;
use roots::{find_root_brent, SearchError};
use serde::{Deserialize, Serialize};

use crate::bath::DephasingProfile;
use crate::correlations::{discord_closed, CorrelationRecord};
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::states::XStateParams;

/// Default window for [`amplification_rate`].
pub const DEFAULT_HORIZON: f64 = 3.0;

/// Time used in place of τ = ∞ when a trace is compared to the steady state.
pub const LONG_TIME_PROXY: f64 = 200.0;

/// Initial discord below which the amplification rate is undefined.
pub const MIN_INITIAL_DISCORD: f64 = 1e-12;

/// Branch ties closer than this are resolved to the boundary class, so a c1
/// one ulp off a boundary does not ask for a root at τ ~ 1e12.
pub const BOUNDARY_TOL: f64 = 1e-12;
const ROOT_RESIDUAL_TOL: f64 = 1e-13;
const ROOT_TAU_TOL: f64 = 1e-12;
const BRACKET_LIMIT: f64 = 1e12;
const RATE_REL_TOL: f64 = 1e-8;
const RATE_ABS_TOL: f64 = 1e-13;

/// Corner coherence α(τ).
pub fn corner_at(params: &XStateParams, profile: &DephasingProfile, tau: f64) -> Result<(f64, f64)> {
    let gamma = profile.gamma(tau)?;
    Ok((gamma, params.corner() * (-4.0 * gamma).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    /// χ switches from Ω to |c3| at a finite τ_c.
    Finite,
    /// Ω stays above |c3| for every finite time.
    Infinite,
    /// χ = |c3| already at τ = 0.
    NoTransition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalTimeResult {
    pub kind: CriticalKind,
    /// Present iff `kind` is `Finite`.
    pub tau_c: Option<f64>,
    /// `(2|c3| − |c1 + c2|)/|c1 − c2|`, the attenuation at the switch; absent
    /// when `c1 = c2`.
    pub k_target: Option<f64>,
}

/// Classifies the sudden change of the classical correlation and, if it
/// happens at finite time, solves `|c1 − c2| e^{-4Γ(τ)} = 2|c3| − |c1 + c2|`.
pub fn classify_critical_time(params: &XStateParams, profile: &DephasingProfile) -> Result<CriticalTimeResult> {
    let corner = params.corner().abs();
    let inner = params.inner().abs();
    let c3 = params.c3().abs();
    let omega_0 = 0.5 * (corner + inner);
    let omega_inf = 0.5 * inner;
    let target = 2.0 * c3 - inner;
    let k_target = (corner > 0.0).then(|| target / corner);

    if omega_0 <= c3 + BOUNDARY_TOL {
        return Ok(CriticalTimeResult {
            kind: CriticalKind::NoTransition,
            tau_c: None,
            k_target,
        });
    }
    if omega_inf + BOUNDARY_TOL >= c3 {
        return Ok(CriticalTimeResult {
            kind: CriticalKind::Infinite,
            tau_c: None,
            k_target,
        });
    }

    // f(0) = corner − target > 0 here; f decreases towards −target < 0.
    let first_error: RefCell<Option<Error>> = RefCell::new(None);
    let f = |tau: f64| match profile.attenuation(tau) {
        Ok(att) => corner * att - target,
        Err(e) => {
            first_error.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };

    let (mut lo, mut hi) = (0.0, 1.0);
    loop {
        let v = f(hi);
        if let Some(e) = first_error.borrow_mut().take() {
            return Err(e);
        }
        if v <= 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > BRACKET_LIMIT {
            return Err(Error::RootFinding(format!(
                "no sign change of |c1-c2| e^(-4 Gamma) - {target} below tau = {BRACKET_LIMIT:e} \
                 (c1={}, c2={}, c3={})",
                params.c1(),
                params.c2(),
                params.c3()
            )));
        }
    }

    let mut conv = Tolerance;
    let tau_c = find_root_brent(lo, hi, &f, &mut conv);
    if let Some(e) = first_error.borrow_mut().take() {
        return Err(e);
    }
    let tau_c = tau_c.map_err(|e| {
        let why = match e {
            SearchError::NoConvergency => "no convergence",
            SearchError::NoBracketing => "bracket lost",
            SearchError::ZeroDerivative => "zero derivative",
        };
        Error::RootFinding(format!("{why} on [{lo}, {hi}] for target attenuation {:?}", k_target))
    })?;

    Ok(CriticalTimeResult {
        kind: CriticalKind::Finite,
        tau_c: Some(tau_c),
        k_target,
    })
}

struct Tolerance;

impl roots::Convergency<f64> for Tolerance {
    fn is_root_found(&mut self, y: f64) -> bool {
        y.abs() < ROOT_RESIDUAL_TOL
    }

    fn is_converged(&mut self, x1: f64, x2: f64) -> bool {
        (x1 - x2).abs() < ROOT_TAU_TOL * x1.abs().max(1.0)
    }

    fn is_iteration_limit_reached(&mut self, iter: usize) -> bool {
        iter >= 500
    }
}

/// A discord trace over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRequest {
    pub params: XStateParams,
    pub profile: DephasingProfile,
    tau_grid: Vec<f64>,
}

impl TraceRequest {
    /// The grid must be strictly increasing and start at τ ≥ 0.
    pub fn new(params: XStateParams, profile: DephasingProfile, tau_grid: Vec<f64>) -> Result<Self> {
        if tau_grid.is_empty() {
            return Err(Error::Config("tau grid is empty".into()));
        }
        if !(tau_grid[0] >= 0.0) {
            return Err(domain("tau_grid[0]", tau_grid[0], ">= 0"));
        }
        if let Some(w) = tau_grid.windows(2).find(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Config(format!(
                "tau grid must be strictly increasing and finite ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self {
            params,
            profile,
            tau_grid,
        })
    }

    pub fn tau_grid(&self) -> &[f64] {
        &self.tau_grid
    }
}

/// Evaluates (Γ, α, I, C, χ, Q) at every grid time, in grid order.
pub fn trace(request: &TraceRequest) -> Result<Vec<CorrelationRecord>> {
    request
        .tau_grid
        .par_iter()
        .map(|&tau| {
            let (gamma, alpha) = corner_at(&request.params, &request.profile, tau)?;
            Ok(CorrelationRecord::new(
                tau,
                gamma,
                alpha,
                &discord_closed(&request.params, alpha)?,
            ))
        })
        .collect()
}

/// Discord of the fully dephased state (α = 0); independent of the bath.
pub fn steady_state_discord(params: &XStateParams) -> Result<f64> {
    Ok(discord_closed(params, 0.0)?.discord)
}

/// Normalisation of the amplification rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    /// `(1/H) ∫₀^H Q dτ / Q(0)`.
    #[default]
    TimeAverage,
    /// `∫₀^H Q dτ / Q(0)`.
    PlainIntegral,
}

/// Ratio of the windowed discord to the initial discord.
pub fn amplification_rate(
    params: &XStateParams,
    profile: &DephasingProfile,
    horizon: f64,
    convention: Convention,
) -> Result<f64> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(domain("horizon", horizon, "finite and > 0"));
    }
    let q0 = discord_closed(params, params.corner())?.discord;
    if !(q0 > MIN_INITIAL_DISCORD) {
        return Err(Error::UndefinedRate { initial: q0 });
    }

    let first_error: RefCell<Option<Error>> = RefCell::new(None);
    let q = |tau: f64| {
        let r = corner_at(params, profile, tau).and_then(|(_, alpha)| discord_closed(params, alpha));
        match r {
            Ok(c) => c.discord,
            Err(e) => {
                first_error.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    // Q has a kink at τ_c; integrate the two smooth pieces separately.
    let mut breaks = vec![0.0];
    if let Some(tc) = classify_critical_time(params, profile)?.tau_c {
        if tc < horizon {
            breaks.push(tc);
        }
    }
    breaks.push(horizon);

    let opts = QuadOptions::with_tolerances(RATE_REL_TOL, RATE_ABS_TOL);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let piece = integrate(&q, w[0], w[1], opts);
        if let Some(e) = first_error.borrow_mut().take() {
            return Err(e);
        }
        total += piece?.value;
    }
    let mean = match convention {
        Convention::TimeAverage => total / horizon,
        Convention::PlainIntegral => total,
    };
    Ok(mean / q0)
}

/// `n` evenly spaced points on `[lo, hi]`; a single point is `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// Ranges for [`phase_diagram`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramSpec {
    pub c1_min: f64,
    pub c1_max: f64,
    pub c1_points: usize,
    pub c2: f64,
    pub c3: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_points: usize,
}

/// Q on a (c1, τ) grid, row-major in c1. Unphysical c1 rows are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram {
    pub c1: Vec<f64>,
    pub tau: Vec<f64>,
    pub q: Vec<Vec<Option<f64>>>,
}

impl PhaseDiagram {
    /// `true` where the cell holds a physical state.
    pub fn mask(&self) -> Vec<Vec<bool>> {
        self.q.iter().map(|row| row.iter().map(Option::is_some).collect()).collect()
    }

    pub fn invalid_cells(&self) -> usize {
        self.q.iter().flatten().filter(|v| v.is_none()).count()
    }

    pub fn get(&self, i_c1: usize, i_tau: usize) -> Option<f64> {
        self.q[i_c1][i_tau]
    }
}

pub fn phase_diagram(spec: &PhaseDiagramSpec, profile: &DephasingProfile) -> Result<PhaseDiagram> {
    if spec.c1_points == 0 || spec.tau_points == 0 {
        return Err(Error::Config("phase diagram needs at least one point per axis".into()));
    }
    if !(spec.c1_max >= spec.c1_min) || !(spec.tau_max >= spec.tau_min) || !(spec.tau_min >= 0.0) {
        return Err(Error::Config(format!(
            "invalid phase-diagram ranges c1 [{}, {}], tau [{}, {}]",
            spec.c1_min, spec.c1_max, spec.tau_min, spec.tau_max
        )));
    }
    let c1 = linspace(spec.c1_min, spec.c1_max, spec.c1_points);
    let tau = linspace(spec.tau_min, spec.tau_max, spec.tau_points);

    // the attenuation does not depend on the state
    let att: Vec<f64> = tau
        .par_iter()
        .map(|&t| profile.attenuation(t))
        .collect::<Result<_>>()?;

    let q: Vec<Vec<Option<f64>>> = c1
        .par_iter()
        .map(|&c| -> Result<Vec<Option<f64>>> {
            let Ok(params) = XStateParams::new(c, spec.c2, spec.c3) else {
                return Ok(vec![None; att.len()]);
            };
            att.iter()
                .map(|&a| Ok(Some(discord_closed(&params, params.corner() * a)?.discord)))
                .collect()
        })
        .collect::<Result<_>>()?;

    let diagram = PhaseDiagram { c1, tau, q };
    if diagram.invalid_cells() == spec.c1_points * spec.tau_points {
        return Err(Error::Config(format!(
            "no physical state in c1 [{}, {}] with c2 = {}, c3 = {}",
            spec.c1_min, spec.c1_max, spec.c2, spec.c3
        )));
    }
    Ok(diagram)
}

/// R(c1) at fixed (c2, c3); `None` where the state is unphysical or Q(0) = 0.
pub fn amplification_curve(
    c1: &[f64],
    c2: f64,
    c3: f64,
    profile: &DephasingProfile,
    horizon: f64,
    convention: Convention,
) -> Result<Vec<Option<f64>>> {
    c1.par_iter()
        .map(|&c| {
            let Ok(params) = XStateParams::new(c, c2, c3) else {
                return Ok(None);
            };
            match amplification_rate(&params, profile, horizon, convention) {
                Ok(r) => Ok(Some(r)),
                Err(Error::UndefinedRate { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// A point where two curves cross.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub x: f64,
    pub y: f64,
}

/// All sign changes of `f − g` on a uniform scan of `[lo, hi]`, each refined
/// by bisection to `|Δx| < 1e-10`.
pub fn find_crossings<F, G>(f: F, g: G, lo: f64, hi: f64, samples: usize) -> Result<Vec<Crossing>>
where
    F: Fn(f64) -> Result<f64> + Sync,
    G: Fn(f64) -> Result<f64> + Sync,
{
    let xs = linspace(lo, hi, samples.max(2));
    let diff = |x: f64| -> Result<f64> { Ok(f(x)? - g(x)?) };
    let ds: Vec<f64> = xs.par_iter().map(|&x| diff(x)).collect::<Result<_>>()?;

    let mut out = Vec::new();
    for i in 0..xs.len() - 1 {
        let (mut a, mut b, mut da) = (xs[i], xs[i + 1], ds[i]);
        if da == 0.0 {
            out.push(Crossing { x: a, y: f(a)? });
            continue;
        }
        if da * ds[i + 1] >= 0.0 {
            continue;
        }
        while b - a > 1e-10 {
            let m = 0.5 * (a + b);
            let dm = diff(m)?;
            if dm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if da * dm < 0.0 {
                b = m;
            } else {
                a = m;
                da = dm;
            }
        }
        let x = 0.5 * (a + b);
        out.push(Crossing {
            x,
            y: 0.5 * (f(x)? + g(x)?),
        });
    }
    Ok(out)
}

/// Smallest c1 in `[lo, hi]` with `R > 1 + threshold`, by scan then
/// bisection. Cells where R is undefined count as "not amplified".
#[allow(clippy::too_many_arguments)]
pub fn amplification_onset(
    c2: f64,
    c3: f64,
    profile: &DephasingProfile,
    horizon: f64,
    convention: Convention,
    threshold: f64,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<Option<f64>> {
    let xs = linspace(lo, hi, samples.max(2));
    let rs = amplification_curve(&xs, c2, c3, profile, horizon, convention)?;
    let above = |r: Option<f64>| r.is_some_and(|r| r > 1.0 + threshold);
    let Some(first) = rs.iter().position(|&r| above(r)) else {
        return Ok(None);
    };
    if first == 0 {
        return Ok(Some(xs[0]));
    }
    let (mut a, mut b) = (xs[first - 1], xs[first]);
    while b - a > 1e-10 {
        let m = 0.5 * (a + b);
        let r = amplification_curve(&[m], c2, c3, profile, horizon, convention)?[0];
        if above(r) {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(Some(b))
}
