//! X-type two-qubit states and dense density-matrix utilities.
//!
//! Matrices use the product basis `{|ee⟩, |eg⟩, |ge⟩, |gg⟩}` (index `2a + b`
//! with `e = 0`, `g = 1`), so `σ_z = diag(1, −1)` on each qubit.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

pub type Matrix4c = Matrix4<Complex64>;
pub type Matrix2c = Matrix2<Complex64>;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_FLOOR, 0)` are treated as roundoff and clamped.
pub const EIGEN_FLOOR: f64 = 1e-10;

/// Slack on the positivity inequalities so that grid points landing on a
/// boundary through rounding (0.1·7 = 0.7000000000000001) stay valid.
pub const PHYSICALITY_TOL: f64 = 1e-12;

/// Correlation coefficients `(c1, c2, c3)` of `¼(𝟙 + Σ c_i σ_i⊗σ_i)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct XStateParams {
    c1: f64,
    c2: f64,
    c3: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    c1: f64,
    c2: f64,
    c3: f64,
}

impl TryFrom<RawParams> for XStateParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        Self::new(raw.c1, raw.c2, raw.c3)
    }
}

impl From<XStateParams> for RawParams {
    fn from(p: XStateParams) -> Self {
        RawParams {
            c1: p.c1,
            c2: p.c2,
            c3: p.c3,
        }
    }
}

impl XStateParams {
    /// Fails unless `|c_i| ≤ 1`, `1 + c3 ≥ |c1 − c2|` and `1 − c3 ≥ |c1 + c2|`.
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        for (what, v) in [("c1", c1), ("c2", c2), ("c3", c3)] {
            if !(v.abs() <= 1.0) {
                return Err(domain(what, v, "|c_i| <= 1"));
            }
        }
        let unphysical = |inequality| Error::Unphysical { c1, c2, c3, inequality };
        if 1.0 + c3 + PHYSICALITY_TOL < (c1 - c2).abs() {
            return Err(unphysical("1 + c3 >= |c1 - c2|"));
        }
        if 1.0 - c3 + PHYSICALITY_TOL < (c1 + c2).abs() {
            return Err(unphysical("1 - c3 >= |c1 + c2|"));
        }
        Ok(Self { c1, c2, c3 })
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    /// `c1 − c2`, the initial corner coherence α(0).
    pub fn corner(&self) -> f64 {
        self.c1 - self.c2
    }

    /// `c1 + c2`, the frozen inner-block coherence.
    pub fn inner(&self) -> f64 {
        self.c1 + self.c2
    }

    /// True when the state does not evolve under common-bath dephasing.
    pub fn is_stationary(&self) -> bool {
        self.c1 == self.c2
    }
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4(Matrix4c);

impl DensityMatrix4 {
    /// Validates hermiticity, unit trace and positivity; stores the
    /// Hermitian part.
    pub fn new(m: Matrix4c) -> Result<Self> {
        let herm_err = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm_err > HERMITICITY_TOL {
            return Err(Error::Invariant(format!("matrix not Hermitian (max deviation {herm_err:e})")));
        }
        let m = (m + m.adjoint()).scale(0.5);
        let tr = m.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Invariant(format!("trace {tr} differs from 1")));
        }
        let rho = Self(m);
        rho.spectrum()?;
        Ok(rho)
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// Eigenvalues from the dense Hermitian eigensolver, ascending, unclamped.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = self.0.symmetric_eigenvalues();
        let mut mu = [eig[0], eig[1], eig[2], eig[3]];
        mu.sort_by(f64::total_cmp);
        mu
    }

    /// Dense spectrum with the roundoff floor applied.
    pub fn spectrum(&self) -> Result<SpectrumRecord> {
        SpectrumRecord::new(self.eigenvalues())
    }

    pub fn von_neumann_entropy(&self) -> Result<f64> {
        Ok(von_neumann_entropy(&self.spectrum()?))
    }

    /// `ρ_A = Tr_B ρ`.
    pub fn reduced_a(&self) -> Matrix2c {
        Matrix2c::from_fn(|a, a2| self.0[(2 * a, 2 * a2)] + self.0[(2 * a + 1, 2 * a2 + 1)])
    }

    /// `ρ_B = Tr_A ρ`.
    pub fn reduced_b(&self) -> Matrix2c {
        Matrix2c::from_fn(|b, b2| self.0[(b, b2)] + self.0[(2 + b, 2 + b2)])
    }

    /// `Tr[ρ σ]`.
    pub fn overlap(&self, other: &DensityMatrix4) -> f64 {
        (self.0 * other.0).trace().re
    }

    /// `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        self.overlap(self)
    }
}

impl Serialize for DensityMatrix4 {
    /// Row-major `[[[re, im], ...], ...]`.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..4)
            .map(|i| (0..4).map(|j| [self.0[(i, j)].re, self.0[(i, j)].im]).collect())
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix4 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = <[[[f64; 2]; 4]; 4]>::deserialize(d)?;
        let m = Matrix4c::from_fn(|i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
        DensityMatrix4::new(m).map_err(D::Error::custom)
    }
}

/// Four eigenvalues of a two-qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumRecord {
    mu: [f64; 4],
}

impl SpectrumRecord {
    /// Clamps values in `[-1e-10, 0)` to zero; fails on anything more
    /// negative, above 1, or on a sum away from 1.
    pub fn new(mu: [f64; 4]) -> Result<Self> {
        let mut out = mu;
        for v in &mut out {
            if !v.is_finite() || *v < -EIGEN_FLOOR || *v > 1.0 + EIGEN_FLOOR {
                return Err(Error::Invariant(format!("eigenvalue {v} outside [0, 1] (spectrum {mu:?})")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        let sum: f64 = mu.iter().sum();
        if (sum - 1.0).abs() > TRACE_TOL {
            return Err(Error::Invariant(format!("spectrum sums to {sum}")));
        }
        Ok(Self { mu: out })
    }

    pub fn mu(&self) -> [f64; 4] {
        self.mu
    }

    /// Eigenvalues in ascending order.
    pub fn sorted(&self) -> [f64; 4] {
        let mut s = self.mu;
        s.sort_by(f64::total_cmp);
        s
    }
}

/// `−Σ p log₂ p` with `0 log 0 = 0`.
pub fn shannon_bits(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.log2()).sum::<f64>()
}

pub fn von_neumann_entropy(spectrum: &SpectrumRecord) -> f64 {
    shannon_bits(&spectrum.mu)
}

/// Entropy of a 2×2 Hermitian, positive matrix with trace `p`, normalised by
/// `p` (i.e. the entropy of `m / p`).
pub(crate) fn qubit_entropy(a: f64, d: f64, off: Complex64) -> f64 {
    let p = a + d;
    if p <= 0.0 {
        return 0.0;
    }
    let half_gap = (0.25 * (a - d) * (a - d) + off.norm_sqr()).sqrt();
    let l1 = ((0.5 * p + half_gap) / p).clamp(0.0, 1.0);
    shannon_bits(&[l1, 1.0 - l1])
}

pub fn matrix2_entropy(m: &Matrix2c) -> f64 {
    qubit_entropy(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)])
}

fn x_matrix(params: &XStateParams, corner: f64) -> Matrix4c {
    let c = |v: f64| Complex64::new(0.25 * v, 0.0);
    let (p, m) = (1.0 + params.c3, 1.0 - params.c3);
    let inner = params.inner();
    let z = Complex64::new(0.0, 0.0);
    Matrix4c::new(
        c(p), z, z, c(corner),
        z, c(m), c(inner), z,
        z, c(inner), c(m), z,
        c(corner), z, z, c(p),
    )
}

/// The initial X state `¼(𝟙 + Σ c_i σ_i⊗σ_i)`.
pub fn build_initial(params: &XStateParams) -> DensityMatrix4 {
    DensityMatrix4(x_matrix(params, params.corner()))
}

/// State after common-bath dephasing: the corner coherence is multiplied by
/// `attenuation = e^{-4Γ}`; diagonal and inner block are frozen.
pub fn evolve(params: &XStateParams, attenuation: f64) -> Result<DensityMatrix4> {
    if !(attenuation > 0.0 && attenuation <= 1.0) {
        return Err(domain("attenuation", attenuation, "in (0, 1]"));
    }
    Ok(DensityMatrix4(x_matrix(params, params.corner() * attenuation)))
}

/// Like [`evolve`] but parameterised by the corner coherence α directly;
/// accepts `α = 0` (the infinite-time limit).
pub fn with_corner(params: &XStateParams, alpha: f64) -> Result<DensityMatrix4> {
    check_alpha(params, alpha)?;
    Ok(DensityMatrix4(x_matrix(params, alpha)))
}

pub(crate) fn check_alpha(params: &XStateParams, alpha: f64) -> Result<()> {
    if alpha.abs() <= params.corner().abs() * (1.0 + 1e-12) {
        Ok(())
    } else {
        Err(domain("alpha", alpha, "|alpha| <= |c1 - c2|"))
    }
}

/// Closed-form spectrum `μ₁,₂ = (1 + c3 ∓ α)/4`, `μ₃,₄ = (1 − c3 ∓ (c1 + c2))/4`.
pub fn eigenvalues_closed(params: &XStateParams, alpha: f64) -> Result<SpectrumRecord> {
    check_alpha(params, alpha)?;
    let (c3, inner) = (params.c3, params.inner());
    SpectrumRecord::new([
        0.25 * (1.0 + c3 - alpha),
        0.25 * (1.0 + c3 + alpha),
        0.25 * (1.0 - c3 - inner),
        0.25 * (1.0 - c3 + inner),
    ])
}
