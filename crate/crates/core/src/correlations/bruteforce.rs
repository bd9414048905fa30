//! Classical correlation by explicit optimization over projective
//! measurements on qubit B.
//!
//! The measurement basis is
//! `|ϑ₁⟩ = cos ϑ |g⟩ + e^{iφ} sin ϑ |e⟩`, `|ϑ₂⟩ = e^{-iφ} sin ϑ |g⟩ − cos ϑ |e⟩`.
//! A coarse grid over `(ϑ, φ)` is followed by Nelder–Mead refinement from
//! the best few grid cells.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::states::{matrix2_entropy, qubit_entropy, DensityMatrix4};

/// Below this probability a measurement branch contributes nothing.
pub const DEGENERATE_PROBABILITY: f64 = 1e-14;

/// Measurement angles, `ϑ ∈ [0, π/2]`, `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorParams {
    vartheta: f64,
    phi: f64,
}

impl ProjectorParams {
    pub fn new(vartheta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&vartheta) {
            return Err(domain("vartheta", vartheta, "in [0, pi/2]"));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(domain("phi", phi, "in [0, 2pi)"));
        }
        Ok(Self { vartheta, phi })
    }

    /// Folds arbitrary angles onto the canonical ranges; the projector pair
    /// is unchanged (`ϑ → ϑ + π` flips the sign of both vectors and
    /// `ϑ → π − ϑ, φ → φ + π` does the same).
    pub fn canonical(vartheta: f64, phi: f64) -> Self {
        let mut vt = vartheta.rem_euclid(PI);
        let mut ph = phi;
        if vt > FRAC_PI_2 {
            vt = PI - vt;
            ph += PI;
        }
        let ph = crate::bath::normalize_phase(ph);
        Self {
            vartheta: vt.clamp(0.0, FRAC_PI_2),
            phi: ph,
        }
    }

    pub fn vartheta(&self) -> f64 {
        self.vartheta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceOptions {
    pub grid_vartheta: usize,
    pub grid_phi: usize,
    /// Nelder–Mead stops when the simplex spread in the objective is below this.
    pub objective_tol: f64,
    /// Number of best grid cells used as refinement starts.
    pub starts: usize,
    pub max_iterations: usize,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            grid_vartheta: 200,
            grid_phi: 200,
            objective_tol: 1e-8,
            starts: 3,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalOptimum {
    pub value: f64,
    pub argmax: ProjectorParams,
    pub evaluations: usize,
}

/// Pre-extracted state data shared by every objective evaluation.
struct Objective {
    rho: [[Complex64; 4]; 4],
    entropy_a: f64,
}

impl Objective {
    fn new(rho: &DensityMatrix4) -> Self {
        let m = rho.matrix();
        let mut arr = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in arr.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = m[(i, j)];
            }
        }
        Self {
            rho: arr,
            entropy_a: matrix2_entropy(&rho.reduced_a()),
        }
    }

    /// `p_k S(ρ_{A|k})` for the B-vector `v = (v_e, v_g)`.
    fn branch(&self, v: [Complex64; 2]) -> f64 {
        // M[a][a'] = Σ_{b,b'} conj(v_b) ρ[2a+b][2a'+b'] v_{b'}
        let block = |a: usize, a2: usize| -> Complex64 {
            let mut s = Complex64::new(0.0, 0.0);
            for b in 0..2 {
                for b2 in 0..2 {
                    s += v[b].conj() * self.rho[2 * a + b][2 * a2 + b2] * v[b2];
                }
            }
            s
        };
        let (m00, m11, m01) = (block(0, 0).re, block(1, 1).re, block(0, 1));
        let p = m00 + m11;
        if p < DEGENERATE_PROBABILITY {
            return 0.0;
        }
        p * qubit_entropy(m00, m11, m01)
    }

    fn eval(&self, vartheta: f64, phi: f64) -> f64 {
        let (s, c) = vartheta.sin_cos();
        let e = Complex64::from_polar(1.0, phi);
        // components ordered (e, g)
        let v1 = [e * s, Complex64::new(c, 0.0)];
        let v2 = [Complex64::new(-c, 0.0), e.conj() * s];
        self.entropy_a - self.branch(v1) - self.branch(v2)
    }
}

/// `S(ρ_A) − Σ_k p_k S(ρ_{A|k})` for the measurement at the given angles.
pub fn measurement_objective(rho: &DensityMatrix4, angles: &ProjectorParams) -> f64 {
    Objective::new(rho).eval(angles.vartheta, angles.phi)
}

/// Maximizes the measurement objective: grid search then Nelder–Mead.
pub fn classical_correlation_bruteforce(rho: &DensityMatrix4, opts: &BruteForceOptions) -> ClassicalOptimum {
    let obj = Objective::new(rho);
    let (nt, np) = (opts.grid_vartheta.max(2), opts.grid_phi.max(1));
    let dt = FRAC_PI_2 / (nt - 1) as f64;
    let dp = TAU / np as f64;

    let values: Vec<f64> = (0..nt * np)
        .into_par_iter()
        .map(|k| obj.eval(dt * (k / np) as f64, dp * (k % np) as f64))
        .collect();

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut evaluations = values.len();
    let mut best = (values[order[0]], dt * (order[0] / np) as f64, dp * (order[0] % np) as f64);
    for &k in order.iter().take(opts.starts.max(1)) {
        let start = [dt * (k / np) as f64, dp * (k % np) as f64];
        let (x, fx, n) = nelder_mead_max(|p| obj.eval(p[0], p[1]), start, [dt, dp], opts);
        evaluations += n;
        if fx > best.0 {
            best = (fx, x[0], x[1]);
        }
    }

    ClassicalOptimum {
        value: best.0,
        argmax: ProjectorParams::canonical(best.1, best.2),
        evaluations,
    }
}

/// `S(ρ_A) + S(ρ_B) − S(ρ_AB)` from dense entropies.
pub fn mutual_information(rho: &DensityMatrix4) -> Result<f64> {
    Ok(matrix2_entropy(&rho.reduced_a()) + matrix2_entropy(&rho.reduced_b()) - rho.von_neumann_entropy()?)
}

/// `Q = I − C` with both terms computed without any X-state shortcut.
pub fn discord_bruteforce(rho: &DensityMatrix4, opts: &BruteForceOptions) -> Result<f64> {
    Ok(mutual_information(rho)? - classical_correlation_bruteforce(rho, opts).value)
}

fn nelder_mead_max<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    step: [f64; 2],
    opts: &BruteForceOptions,
) -> ([f64; 2], f64, usize) {
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    // minimize the negated objective
    let g = |p: [f64; 2]| -f(p);
    let mut vals = simplex.map(g);
    let mut evals = 3;

    for _ in 0..opts.max_iterations {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        simplex = idx.map(|i| simplex[i]);
        vals = idx.map(|i| vals[i]);

        let size = (1..3)
            .map(|i| (simplex[i][0] - simplex[0][0]).abs().max((simplex[i][1] - simplex[0][1]).abs()))
            .fold(0.0, f64::max);
        if (vals[2] - vals[0]).abs() < opts.objective_tol * 1e-2 && size < 1e-7 {
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };

        let xr = along(-1.0);
        let fr = g(xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = g(xe);
            evals += 1;
            if fe < fr {
                simplex[2] = xe;
                vals[2] = fe;
            } else {
                simplex[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            simplex[2] = xr;
            vals[2] = fr;
        } else {
            let (xc, fc) = if fr < vals[2] {
                let xc = along(-0.5);
                (xc, g(xc))
            } else {
                let xc = along(0.5);
                (xc, g(xc))
            };
            evals += 1;
            if fc < vals[2].min(fr) {
                simplex[2] = xc;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    vals[i] = g(simplex[i]);
                }
                evals += 2;
            }
        }
    }

    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (simplex[best], -vals[best], evals)
}
