//! Relative-purity quantum speed limit for the dephasing two-qubit state.
//!
//! All rates here are per unit of scaled time `τ = ω_c t`:
//!
//! ```text
//! τ_QSL = sin²Θ · Tr ρ₀² / Λ_op,   Λ_op = (1/τ) ∫₀^τ ‖L(ρ_s)‖_op ds
//! ```
//!
//! where `cos²Θ = Tr[ρ₀ρ_τ]/Tr ρ₀²` and `L(ρ) = dρ/dτ`.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bath::DephasingProfile;
use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::states::{build_initial, with_corner, DensityMatrix4, Matrix4c, XStateParams};

/// Λ_op below this is treated as a stationary evolution.
pub const STATIONARY_LAMBDA: f64 = 1e-14;

const LAMBDA_REL_TOL: f64 = 1e-8;
const LAMBDA_ABS_TOL: f64 = 1e-15;

/// Result of [`qsl_time`] for one drive time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslRecord {
    /// Relative-purity angle Θ in `[0, π/2]`.
    pub theta_angle: f64,
    pub lambda_op: f64,
    pub tau_qsl: f64,
    pub purity_0: f64,
    pub drive_time: f64,
    /// `Λ_op` vanished and `τ_QSL` was set to zero.
    pub stationary: bool,
}

/// `Θ = arccos √(Tr[ρ₀ρ_t]/Tr ρ₀²)`.
pub fn relative_purity_angle(rho0: &DensityMatrix4, rho_t: &DensityMatrix4) -> Result<f64> {
    let purity = rho0.purity();
    if !(purity > 0.0) {
        return Err(domain("Tr rho0^2", purity, "> 0"));
    }
    let ratio = (rho0.overlap(rho_t) / purity).clamp(0.0, 1.0);
    Ok(ratio.sqrt().acos())
}

/// `dρ/dτ` of the evolved X state: only the corners move,
/// `d(α/4)/dτ = −(c1 − c2) (dΓ/dτ) e^{-4Γ}`.
pub fn liouvillian(params: &XStateParams, profile: &DephasingProfile, tau: f64) -> Result<Matrix4c> {
    let corner = corner_derivative(params, profile, tau)?;
    let mut l = Matrix4c::zeros();
    l[(0, 3)] = Complex64::new(corner, 0.0);
    l[(3, 0)] = Complex64::new(corner, 0.0);
    Ok(l)
}

fn corner_derivative(params: &XStateParams, profile: &DephasingProfile, tau: f64) -> Result<f64> {
    if params.is_stationary() {
        return Ok(0.0);
    }
    Ok(-params.corner() * profile.rate_scaled(tau)? * profile.attenuation(tau)?)
}

/// Operator (spectral), Hilbert–Schmidt and trace norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixNorms {
    pub op: f64,
    pub hs: f64,
    pub tr: f64,
}

pub fn operator_norms(m: &Matrix4c) -> MatrixNorms {
    let sv = m.singular_values();
    MatrixNorms {
        op: sv.max(),
        hs: m.norm(),
        tr: sv.sum(),
    }
}

/// `Λ_op` by adaptive quadrature of `|c1 − c2| |dΓ/dτ e^{-4Γ}|` over `[0, τ]`.
pub fn lambda_op(params: &XStateParams, profile: &DephasingProfile, drive_time: f64) -> Result<f64> {
    check_drive_time(drive_time)?;
    if params.is_stationary() {
        return Ok(0.0);
    }
    let first_error: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |s: f64| match corner_derivative(params, profile, s) {
        Ok(v) => v.abs(),
        Err(e) => {
            first_error.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let opts = QuadOptions::with_tolerances(LAMBDA_REL_TOL, LAMBDA_ABS_TOL);
    let res = integrate(integrand, 0.0, drive_time, opts);
    if let Some(e) = first_error.borrow_mut().take() {
        return Err(e);
    }
    Ok(res?.value / drive_time)
}

/// `|c1 − c2| (1 − e^{-4Γ(τ)}) / (4τ)`; equals [`lambda_op`] when Γ is
/// non-decreasing on `[0, τ]`.
pub fn lambda_op_closed(params: &XStateParams, profile: &DephasingProfile, drive_time: f64) -> Result<f64> {
    check_drive_time(drive_time)?;
    Ok(params.corner().abs() * -(-4.0 * profile.gamma(drive_time)?).exp_m1() / (4.0 * drive_time))
}

fn check_drive_time(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(domain("drive_time", tau, "finite and > 0"))
    }
}

pub fn qsl_time(params: &XStateParams, profile: &DephasingProfile, drive_time: f64) -> Result<QslRecord> {
    let lambda = lambda_op(params, profile, drive_time)?;
    let rho0 = build_initial(params);
    let rho_t = with_corner(params, params.corner() * profile.attenuation(drive_time)?)?;
    let theta_angle = relative_purity_angle(&rho0, &rho_t)?;
    let purity_0 = rho0.purity();
    let stationary = lambda < STATIONARY_LAMBDA;
    let tau_qsl = if stationary {
        0.0
    } else {
        theta_angle.sin().powi(2) * purity_0 / lambda
    };
    Ok(QslRecord {
        theta_angle,
        lambda_op: lambda,
        tau_qsl,
        purity_0,
        drive_time,
        stationary,
    })
}

/// Location of the extremes of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepExtrema {
    pub argmin: f64,
    pub argmax: f64,
}

/// Relative spread below which a sweep is reported as flat.
pub const FLAT_SWEEP: f64 = 1e-9;

fn is_flat(ys: &[f64]) -> bool {
    let (lo, hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    !(hi - lo > FLAT_SWEEP * hi.abs().max(lo.abs()))
}

/// Vertex of the parabola through the samples around `i` (or `xs[i]` at an
/// end of the sweep).
fn refine(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    if i == 0 || i + 1 == xs.len() {
        return xs[i];
    }
    let (x0, x1, x2) = (xs[i - 1], xs[i], xs[i + 1]);
    let (y0, y1, y2) = (ys[i - 1], ys[i], ys[i + 1]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        x1
    } else {
        x1 - 0.5 * num / den
    }
}

/// Argmin and argmax of a sweep `(xs, ys)`; `None` when the sweep is flat.
/// For a curve symmetric about an axis one of the two lies on it.
pub fn sweep_extrema(xs: &[f64], ys: &[f64]) -> Option<SweepExtrema> {
    if xs.len() != ys.len() || xs.len() < 3 || is_flat(ys) {
        return None;
    }
    let pick = |better: fn(f64, f64) -> bool| {
        (1..ys.len()).fold(0, |best, i| if better(ys[i], ys[best]) { i } else { best })
    };
    let imin = pick(|a, b| a < b);
    let imax = pick(|a, b| a > b);
    Some(SweepExtrema {
        argmin: refine(xs, ys, imin),
        argmax: refine(xs, ys, imax),
    })
}

/// Interior maximum of a sweep that rises then falls; `None` if the sweep is
/// flat or its maximum sits at an end.
pub fn turning_point(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let ext = sweep_extrema(xs, ys)?;
    let last = *xs.last()?;
    (ext.argmax > xs[0] && ext.argmax < last).then_some(ext.argmax)
}
