//! Mutual information, classical correlation and quantum discord.
//!
//! The closed forms here apply to the X states of [`crate::states`]; the
//! [`bruteforce`] submodule optimizes over projective measurements for any
//! two-qubit state and serves as the independent check.

pub mod bruteforce;

pub use bruteforce::{
    classical_correlation_bruteforce, discord_bruteforce, measurement_objective, mutual_information,
    BruteForceOptions, ClassicalOptimum, ProjectorParams,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::states::{check_alpha, eigenvalues_closed, shannon_bits, SpectrumRecord, XStateParams};

/// Which term of `χ = max{|c3|, Ω}` is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiBranch {
    /// `χ = |c3|` (also reported at exact ties).
    C3,
    /// `χ = Ω = (|α| + |c1 + c2|)/2`.
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi {
    pub value: f64,
    pub branch: ChiBranch,
}

/// `Ω = (|α| + |c1 + c2|)/2`.
pub fn omega(params: &XStateParams, alpha: f64) -> f64 {
    0.5 * (alpha.abs() + params.inner().abs())
}

pub fn chi(params: &XStateParams, alpha: f64) -> Result<Chi> {
    check_alpha(params, alpha)?;
    let (om, c3) = (omega(params, alpha), params.c3().abs());
    Ok(if om > c3 {
        Chi {
            value: om,
            branch: ChiBranch::Omega,
        }
    } else {
        Chi {
            value: c3,
            branch: ChiBranch::C3,
        }
    })
}

/// `I = 2 + Σ μ log₂ μ`; valid because both marginals are maximally mixed.
pub fn mutual_information_closed(spectrum: &SpectrumRecord) -> f64 {
    2.0 - shannon_bits(&spectrum.mu())
}

/// `C = Σ_{±} (1 ± χ)/2 · log₂(1 ± χ)`.
pub fn classical_correlation_closed(chi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&chi) {
        return Err(domain("chi", chi, "in [0, 1]"));
    }
    let term = |x: f64| if x > 0.0 { 0.5 * x * x.log2() } else { 0.0 };
    Ok(term(1.0 - chi) + term(1.0 + chi))
}

/// Closed-form correlations of an X state at corner coherence α.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlations {
    pub mutual_info: f64,
    pub classical: f64,
    pub chi: f64,
    pub branch: ChiBranch,
    pub discord: f64,
}

pub fn discord_closed(params: &XStateParams, alpha: f64) -> Result<Correlations> {
    let spectrum = eigenvalues_closed(params, alpha)?;
    let mutual_info = mutual_information_closed(&spectrum);
    let Chi { value, branch } = chi(params, alpha)?;
    let classical = classical_correlation_closed(value)?;
    Ok(Correlations {
        mutual_info,
        classical,
        chi: value,
        branch,
        discord: mutual_info - classical,
    })
}

/// One time point of a discord trace. Serializes to the CSV columns
/// `tau,gamma,alpha,I,C,chi,Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub tau: f64,
    pub gamma: f64,
    pub alpha: f64,
    #[serde(rename = "I")]
    pub mutual_info: f64,
    #[serde(rename = "C")]
    pub classical: f64,
    pub chi: f64,
    #[serde(rename = "Q")]
    pub discord: f64,
}

impl CorrelationRecord {
    pub const CSV_HEADER: [&'static str; 7] = ["tau", "gamma", "alpha", "I", "C", "chi", "Q"];

    pub fn new(tau: f64, gamma: f64, alpha: f64, c: &Correlations) -> Self {
        Self {
            tau,
            gamma,
            alpha,
            mutual_info: c.mutual_info,
            classical: c.classical,
            chi: c.chi,
            discord: c.discord,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::SpectrumRecord;
    use approx::assert_relative_eq;

    fn params(c1: f64, c2: f64, c3: f64) -> XStateParams {
        XStateParams::new(c1, c2, c3).unwrap()
    }

    #[test]
    fn mutual_information_examples() {
        assert_eq!(mutual_information_closed(&SpectrumRecord::new([0.25; 4]).unwrap()), 0.0);
        assert_eq!(mutual_information_closed(&SpectrumRecord::new([0.0, 1.0, 0.0, 0.0]).unwrap()), 2.0);
        let s = SpectrumRecord::new([0.24447, 0.40553, 0.05, 0.3]).unwrap();
        // generic route: S(A) + S(B) − S(AB) with maximally mixed marginals
        let generic = 1.0 + 1.0 - crate::states::von_neumann_entropy(&s);
        assert_relative_eq!(mutual_information_closed(&s), generic, epsilon = 1e-15);
        // 2 + Σ μ log₂ μ evaluated independently (numpy): 0.2379362087
        assert!((mutual_information_closed(&s) - 0.237_936_208_7).abs() < 1e-9);
    }

    #[test]
    fn chi_examples() {
        let p = params(0.5, 0.0, 0.3);
        let c = chi(&p, 0.5).unwrap();
        assert_eq!((c.value, c.branch), (0.5, ChiBranch::Omega));
        let c = chi(&p, 0.0).unwrap();
        assert_eq!((c.value, c.branch), (0.3, ChiBranch::C3));

        let p = params(0.9, 0.6, -0.6);
        for att in [1.0, 0.5, 1e-3, 1e-12] {
            let c = chi(&p, 0.3 * att).unwrap();
            assert_eq!(c.branch, ChiBranch::Omega);
            assert!(c.value > 0.6);
        }
    }

    #[test]
    fn chi_tie_reports_c3_branch() {
        let p = params(0.6, 0.0, 0.3);
        let c = chi(&p, 0.0).unwrap();
        assert_eq!(c.branch, ChiBranch::C3);
        assert_eq!(c.value, 0.3);
    }

    #[test]
    fn classical_examples() {
        assert_eq!(classical_correlation_closed(0.0).unwrap(), 0.0);
        assert_eq!(classical_correlation_closed(1.0).unwrap(), 1.0);
        let expected = 0.35 * 0.7f64.log2() + 0.65 * 1.3f64.log2();
        assert_relative_eq!(classical_correlation_closed(0.3).unwrap(), expected, epsilon = 1e-15);
        assert!((expected - 0.06593).abs() < 1e-5);
        assert!(classical_correlation_closed(1.1).is_err());
        assert!(classical_correlation_closed(-0.1).is_err());
    }

    #[test]
    fn discord_examples() {
        assert_eq!(discord_closed(&params(0.0, 0.0, 0.0), 0.0).unwrap().discord, 0.0);

        let bell = discord_closed(&params(1.0, -1.0, 1.0), 2.0).unwrap();
        assert_eq!((bell.mutual_info, bell.classical, bell.discord), (2.0, 1.0, 1.0));

        let p = params(0.5, 0.0, 0.3);
        let c = discord_closed(&p, 0.0).unwrap();
        let i = 2.0 - shannon_bits(&[0.325, 0.325, 0.05, 0.3]);
        let cc = classical_correlation_closed(0.3).unwrap();
        assert_relative_eq!(c.discord, i - cc, epsilon = 1e-15);
        assert_eq!(c.mutual_info - c.classical, c.discord);
    }

    #[test]
    fn sign_flip_symmetry() {
        let (a, b) = (params(0.4, -0.1, 0.2), params(-0.4, 0.1, 0.2));
        for alpha in [0.5, 0.2, 0.0] {
            let x = discord_closed(&a, alpha).unwrap();
            let y = discord_closed(&b, -alpha).unwrap();
            assert_relative_eq!(x.discord, y.discord, epsilon = 1e-15);
            assert_relative_eq!(x.classical, y.classical, epsilon = 1e-15);
        }
    }

    #[test]
    fn record_csv_names() {
        let r = CorrelationRecord::new(1.0, 0.1, 0.2, &discord_closed(&params(0.5, 0.0, 0.3), 0.2).unwrap());
        let v = serde_json::to_value(r).unwrap();
        for key in CorrelationRecord::CSV_HEADER {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
