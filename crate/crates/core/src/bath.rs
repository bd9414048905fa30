//! Dephasing factor of two qubits coupled to a common squeezed reservoir.
//!
//! Every function here takes the scaled time `τ = ω_c t`. The dephasing
//! factor is
//!
//! ```text
//! Γ(τ) = (2/π) ∫₀^∞ dx j(x) coth(β ω_c x / 2) (1 − cos xτ)/x² · [cosh 2r − sinh 2r cos(xτ − θ)]
//! ```
//!
//! with `x = ω/ω_c` and `j(x) = J(ω_c x)/ω_c` (`x e^{-x}/2` for the Ohmic
//! density). At zero temperature and Ohmic `j` the integral has the closed
//! form evaluated by [`gamma_analytic_zero_t`].

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Upper integration limit in units of ω_c; the exponential cutoff leaves a
/// tail below 1e-20 beyond it.
pub const CUTOFF_EXTENT: f64 = 50.0;

/// Below `SMALL_FREQUENCY · ω_c` the integrand is replaced by its series limit.
pub const SMALL_FREQUENCY: f64 = 1e-8;

pub const DEFAULT_QUAD_REL_TOL: f64 = 1e-10;
pub const DEFAULT_QUAD_ABS_TOL: f64 = 1e-14;

/// Reservoir spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum SpectralDensity {
    /// `J(ω) = ω e^{-ω/ω_c} / 2`.
    #[default]
    Ohmic,
}

impl SpectralDensity {
    /// `J(ω_c x) / ω_c`.
    pub fn scaled(self, x: f64) -> f64 {
        match self {
            SpectralDensity::Ohmic => 0.5 * x * (-x).exp(),
        }
    }

    /// `J(ω_c x) / (ω_c x)`, finite at `x = 0`.
    pub fn scaled_over_x(self, x: f64) -> f64 {
        match self {
            SpectralDensity::Ohmic => 0.5 * (-x).exp(),
        }
    }
}

/// Squeezed thermal (or vacuum) reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBath", into = "RawBath")]
pub struct SqueezedBathSpec {
    r: f64,
    theta: f64,
    beta: f64,
    omega_c: f64,
    spectral: SpectralDensity,
}

impl SqueezedBathSpec {
    pub fn new(r: f64, theta: f64, beta: f64, omega_c: f64, spectral: SpectralDensity) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(domain("r", r, "finite and >= 0"));
        }
        if !theta.is_finite() {
            return Err(domain("theta", theta, "finite"));
        }
        if !(beta > 0.0) {
            return Err(domain("beta", beta, "> 0 or +inf"));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(domain("omega_c", omega_c, "finite and > 0"));
        }
        Ok(Self {
            r,
            theta: normalize_phase(theta),
            beta,
            omega_c,
            spectral,
        })
    }

    /// Zero-temperature Ohmic bath with `ω_c = 1`.
    pub fn vacuum(r: f64, theta: f64) -> Result<Self> {
        Self::new(r, theta, f64::INFINITY, 1.0, SpectralDensity::Ohmic)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Squeezing phase in `[0, 2π)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn spectral(&self) -> SpectralDensity {
        self.spectral
    }

    pub fn is_zero_temperature(&self) -> bool {
        self.beta.is_infinite()
    }

    pub fn with_squeezing(self, r: f64, theta: f64) -> Result<Self> {
        Self::new(r, theta, self.beta, self.omega_c, self.spectral)
    }

    /// `cosh 2r − sinh 2r cos θ`, the small-time growth coefficient of Γ.
    pub fn initial_growth(&self) -> f64 {
        (2.0 * self.r).cosh() - (2.0 * self.r).sinh() * self.theta.cos()
    }
}

/// Maps a phase into `[0, 2π)`.
pub fn normalize_phase(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBath {
    r: f64,
    #[serde(default)]
    theta: f64,
    #[serde(default = "infinite", with = "beta_repr")]
    beta: f64,
    #[serde(default = "unit")]
    omega_c: f64,
    #[serde(default)]
    spectral: SpectralDensity,
}

fn infinite() -> f64 {
    f64::INFINITY
}

fn unit() -> f64 {
    1.0
}

impl TryFrom<RawBath> for SqueezedBathSpec {
    type Error = Error;

    fn try_from(raw: RawBath) -> Result<Self> {
        Self::new(raw.r, raw.theta, raw.beta, raw.omega_c, raw.spectral)
    }
}

impl From<SqueezedBathSpec> for RawBath {
    fn from(b: SqueezedBathSpec) -> Self {
        RawBath {
            r: b.r,
            theta: b.theta,
            beta: b.beta,
            omega_c: b.omega_c,
            spectral: b.spectral,
        }
    }
}

/// `β` as JSON: a number, or `"inf"` / `null` for zero temperature.
mod beta_repr {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(beta: &f64, s: S) -> Result<S::Ok, S::Error> {
        if beta.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*beta)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct BetaVisitor;

        impl<'de> Visitor<'de> for BetaVisitor {
            type Value = f64;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive number, \"inf\" or null")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v.to_ascii_lowercase().as_str() {
                    "inf" | "infinity" => Ok(f64::INFINITY),
                    other => other.parse().map_err(E::custom),
                }
            }

            fn visit_unit<E: de::Error>(self) -> Result<f64, E> {
                Ok(f64::INFINITY)
            }
        }

        d.deserialize_any(BetaVisitor)
    }
}

/// How Γ is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Closed form, zero temperature and Ohmic density only.
    #[default]
    AnalyticZeroT,
    Quadrature,
}

/// A bath together with the evaluation method for Γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DephasingProfile {
    pub bath: SqueezedBathSpec,
    pub method: Method,
    pub quad_rel_tol: f64,
    pub quad_abs_tol: f64,
}

impl DephasingProfile {
    pub fn new(bath: SqueezedBathSpec, method: Method) -> Result<Self> {
        if method == Method::AnalyticZeroT {
            check_analytic(&bath)?;
        }
        Ok(Self {
            bath,
            method,
            quad_rel_tol: DEFAULT_QUAD_REL_TOL,
            quad_abs_tol: DEFAULT_QUAD_ABS_TOL,
        })
    }

    pub fn analytic(bath: SqueezedBathSpec) -> Result<Self> {
        Self::new(bath, Method::AnalyticZeroT)
    }

    pub fn quadrature(bath: SqueezedBathSpec) -> Self {
        Self::new(bath, Method::Quadrature).expect("quadrature accepts every bath")
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol >= 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be positive (rel {rel_tol}, abs {abs_tol})"
            )));
        }
        self.quad_rel_tol = rel_tol;
        self.quad_abs_tol = abs_tol;
        Ok(self)
    }

    /// Same method and tolerances, different bath.
    pub fn with_bath(self, bath: SqueezedBathSpec) -> Result<Self> {
        let mut p = Self::new(bath, self.method)?;
        p.quad_rel_tol = self.quad_rel_tol;
        p.quad_abs_tol = self.quad_abs_tol;
        Ok(p)
    }

    /// Γ(τ).
    pub fn gamma(&self, tau: f64) -> Result<f64> {
        match self.method {
            Method::AnalyticZeroT => gamma_analytic_zero_t(&self.bath, tau),
            Method::Quadrature => gamma_quadrature(self, tau),
        }
    }

    /// dΓ/dτ.
    pub fn rate_scaled(&self, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        match self.method {
            Method::AnalyticZeroT => Ok(analytic_rate_scaled(&self.bath, tau)),
            Method::Quadrature => {
                let h = finite_difference_step(tau);
                if tau >= h {
                    Ok((self.gamma(tau + h)? - self.gamma(tau - h)?) / (2.0 * h))
                } else {
                    let g0 = self.gamma(tau)?;
                    let g1 = self.gamma(tau + h)?;
                    let g2 = self.gamma(tau + 2.0 * h)?;
                    Ok((-3.0 * g0 + 4.0 * g1 - g2) / (2.0 * h))
                }
            }
        }
    }

    /// e^{-4Γ(τ)}.
    pub fn attenuation(&self, tau: f64) -> Result<f64> {
        Ok((-4.0 * self.gamma(tau)?).exp())
    }
}

fn check_analytic(bath: &SqueezedBathSpec) -> Result<()> {
    if !bath.is_zero_temperature() {
        return Err(Error::Config(format!(
            "analytic zero-temperature dephasing requires beta = inf, got {}",
            bath.beta
        )));
    }
    if bath.spectral != SpectralDensity::Ohmic {
        return Err(Error::Config(
            "analytic zero-temperature dephasing requires an Ohmic spectral density".into(),
        ));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(domain("tau", tau, "finite and >= 0"))
    }
}

/// Central-difference step used for γ in quadrature mode.
pub fn finite_difference_step(tau: f64) -> f64 {
    (1e-4 * tau).max(1e-5)
}

/// Closed-form Γ(τ) for a zero-temperature Ohmic bath.
pub fn gamma_analytic_zero_t(bath: &SqueezedBathSpec, tau: f64) -> Result<f64> {
    check_analytic(bath)?;
    check_tau(tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let t2 = tau * tau;
    let a = t2.ln_1p();
    let b = 0.5 * (4.0 * t2).ln_1p() - a;
    let c = 2.0 * tau.atan() - (2.0 * tau).atan();
    let (ch, sh) = ((2.0 * bath.r).cosh(), (2.0 * bath.r).sinh());
    Ok((a * ch - sh * (b * bath.theta.cos() + c * bath.theta.sin())) / TAU)
}

fn analytic_rate_scaled(bath: &SqueezedBathSpec, tau: f64) -> f64 {
    let t2 = tau * tau;
    let da = 2.0 * tau / (1.0 + t2);
    let db = 4.0 * tau / (1.0 + 4.0 * t2) - da;
    let dc = 2.0 / (1.0 + t2) - 2.0 / (1.0 + 4.0 * t2);
    let (ch, sh) = ((2.0 * bath.r).cosh(), (2.0 * bath.r).sinh());
    (da * ch - sh * (db * bath.theta.cos() + dc * bath.theta.sin())) / TAU
}

/// Γ(τ) by adaptive quadrature over `[0, 50 ω_c]`, valid at any temperature.
pub fn gamma_quadrature(profile: &DephasingProfile, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    let bath = profile.bath;
    let scaled_beta = bath.beta * bath.omega_c;
    let (ch, sh) = ((2.0 * bath.r).cosh(), (2.0 * bath.r).sinh());
    let theta = bath.theta;
    let spectral = bath.spectral;
    let s0 = bath.initial_growth();

    let integrand = move |x: f64| -> f64 {
        if x < SMALL_FREQUENCY {
            // j(x)/x → slope, (1 − cos xτ)/x² → τ²/2, x·coth(bx/2) → 2/b + b x²/6
            let slope = spectral.scaled_over_x(0.0);
            let thermal_x = if scaled_beta.is_infinite() {
                x
            } else {
                2.0 / scaled_beta + scaled_beta * x * x / 6.0
            };
            return 2.0 / PI * slope * thermal_x * 0.5 * tau * tau * s0;
        }
        let thermal = if scaled_beta.is_infinite() {
            1.0
        } else {
            1.0 / (0.5 * scaled_beta * x).tanh()
        };
        let half = (0.5 * x * tau).sin();
        let one_minus_cos = 2.0 * half * half;
        let squeeze = ch - sh * (x * tau - theta).cos();
        2.0 / PI * spectral.scaled(x) * thermal * one_minus_cos / (x * x) * squeeze
    };

    // roughly one panel per half period of cos(xτ)
    let panels = ((CUTOFF_EXTENT * tau / PI).ceil() as usize).clamp(8, 4096);
    let opts = QuadOptions::with_tolerances(profile.quad_rel_tol, profile.quad_abs_tol).panels(panels);
    Ok(integrate(integrand, 0.0, CUTOFF_EXTENT, opts)?.value)
}

/// γ(t) = dΓ/dt in units of 1/time, evaluated at scaled time `tau`.
pub fn gamma_rate(profile: &DephasingProfile, tau: f64) -> Result<f64> {
    Ok(profile.bath.omega_c * profile.rate_scaled(tau)?)
}

/// e^{-4Γ(τ)}, the decay of the two-qubit corner coherence.
pub fn attenuation(profile: &DephasingProfile, tau: f64) -> Result<f64> {
    profile.attenuation(tau)
}
