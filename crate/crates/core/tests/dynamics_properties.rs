use std::f64::consts::{FRAC_PI_2, PI};

use approx::assert_relative_eq;
use proptest::prelude::*;
use squeezed_discord::bath::{DephasingProfile, SqueezedBathSpec};
use squeezed_discord::correlations::classical_correlation_closed;
use squeezed_discord::dynamics::{
    classify_critical_time, corner_at, linspace, steady_state_discord, trace, CriticalKind, TraceRequest,
    LONG_TIME_PROXY,
};
use squeezed_discord::states::XStateParams;

fn vac(r: f64, theta: f64) -> DephasingProfile {
    DephasingProfile::analytic(SqueezedBathSpec::vacuum(r, theta).unwrap()).unwrap()
}

fn tau_c(c1: f64, c2: f64, c3: f64, r: f64, theta: f64) -> f64 {
    let p = XStateParams::new(c1, c2, c3).unwrap();
    classify_critical_time(&p, &vac(r, theta)).unwrap().tau_c.unwrap()
}

#[test]
fn root_solver_matches_closed_form_on_grid() {
    // with c2 = 0 the transition is finite iff c1/2 < |c3| < c1
    for c1 in linspace(0.1, 0.5, 10) {
        for s in linspace(0.52, 0.98, 10) {
            let p = XStateParams::new(c1, 0.0, s * c1).unwrap();
            let res = classify_critical_time(&p, &vac(0.0, 0.0)).unwrap();
            assert_eq!(res.kind, CriticalKind::Finite);
            let k = res.k_target.unwrap();
            let closed = (k.powf(-FRAC_PI_2) - 1.0).sqrt();
            assert!((res.tau_c.unwrap() - closed).abs() < 1e-8 * closed.max(1.0));
        }
    }
}

proptest! {
    #[test]
    fn residual_at_critical_time(c1 in 0.301..0.599f64, r in 0.0..=1.0f64, theta in 0.0..(2.0 * PI)) {
        let p = XStateParams::new(c1, 0.0, 0.3).unwrap();
        let prof = vac(r, theta);
        let res = classify_critical_time(&p, &prof).unwrap();
        prop_assert_eq!(res.kind, CriticalKind::Finite);
        let (_, alpha) = corner_at(&p, &prof, res.tau_c.unwrap()).unwrap();
        prop_assert!((alpha.abs() + p.inner().abs() - 2.0 * p.c3().abs()).abs() < 1e-9);
    }
}

#[test]
fn critical_time_increases_with_c1() {
    for (r, theta) in [(0.0, 0.0), (0.5, 0.0), (0.5, FRAC_PI_2), (1.0, PI)] {
        let ts: Vec<f64> = linspace(0.305, 0.595, 30).iter().map(|&c| tau_c(c, 0.0, 0.3, r, theta)).collect();
        assert!(ts.windows(2).all(|w| w[1] > w[0]), "r={r} θ={theta}: {ts:?}");
    }
}

#[test]
fn critical_time_increases_with_theta_on_quarter_period() {
    let ts: Vec<f64> = linspace(0.0, FRAC_PI_2, 20).iter().map(|&th| tau_c(0.5, 0.0, 0.3, 0.5, th)).collect();
    assert!(ts.windows(2).all(|w| w[1] > w[0]), "{ts:?}");
}

#[test]
fn critical_time_decreases_with_r_beyond_small_squeezing() {
    // the curve has a shallow maximum at r ≈ 0.229, so density starts past it
    let ts: Vec<f64> = linspace(0.25, 1.0, 16).iter().map(|&r| tau_c(0.5, 0.0, 0.3, r, FRAC_PI_2)).collect();
    assert!(ts.windows(2).all(|w| w[1] < w[0]), "{ts:?}");
    let t = |r| tau_c(0.5, 0.0, 0.3, r, FRAC_PI_2);
    assert!(t(0.1) > t(0.5) && t(0.5) > t(1.0));
}

#[test]
fn steady_state_reached_for_the_finite_family() {
    let p = XStateParams::new(0.5, 0.0, 0.3).unwrap();
    let ss = steady_state_discord(&p).unwrap();
    for r in [0.0, 0.5, 1.0] {
        for theta in [0.0, FRAC_PI_2, PI] {
            let req = TraceRequest::new(p, vac(r, theta), vec![0.0, LONG_TIME_PROXY]).unwrap();
            let last = trace(&req).unwrap()[1].discord;
            assert!((last - ss).abs() < 1e-4, "r={r} θ={theta}: {last} vs {ss}");
        }
    }
}

#[test]
fn infinite_family_approaches_steady_state_slowly() {
    // power-law decay of the attenuation keeps this family ~1e-4 away at τ = 200
    let p = XStateParams::new(0.9, 0.6, -0.6).unwrap();
    let ss = steady_state_discord(&p).unwrap();
    let at = |tau| {
        let req = TraceRequest::new(p, vac(0.0, 0.0), vec![tau]).unwrap();
        trace(&req).unwrap()[0].discord
    };
    let (d200, d1e6) = ((at(LONG_TIME_PROXY) - ss).abs(), (at(1e6) - ss).abs());
    assert!(d1e6 < d200 && d1e6 < 1e-6);
}

#[test]
fn classical_correlation_frozen_after_critical_time() {
    let p = XStateParams::new(0.45, 0.0, 0.3).unwrap();
    for (r, theta) in [(0.0, 0.0), (0.5, 1.0), (1.0, 3.0)] {
        let prof = vac(r, theta);
        let tc = classify_critical_time(&p, &prof).unwrap().tau_c.unwrap();
        let grid: Vec<f64> = linspace(0.0, 4.0 * tc, 80);
        let frozen = classical_correlation_closed(0.3).unwrap();
        for rec in trace(&TraceRequest::new(p, prof, grid).unwrap()).unwrap() {
            if rec.tau > tc * (1.0 + 1e-9) {
                assert_eq!(rec.classical, frozen);
            } else {
                let omega = 0.5 * (rec.alpha.abs() + p.inner().abs());
                assert_relative_eq!(rec.classical, classical_correlation_closed(omega).unwrap(), epsilon = 1e-15);
            }
        }
    }
}
