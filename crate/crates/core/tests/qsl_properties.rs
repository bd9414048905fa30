use std::f64::consts::TAU;

use proptest::prelude::*;
use squeezed_discord::bath::{DephasingProfile, SqueezedBathSpec};
use squeezed_discord::qsl::{lambda_op, lambda_op_closed, qsl_time};
use squeezed_discord::states::XStateParams;

fn vac(r: f64, theta: f64) -> DephasingProfile {
    DephasingProfile::analytic(SqueezedBathSpec::vacuum(r, theta).unwrap()).unwrap()
}

fn x_state() -> impl Strategy<Value = XStateParams> {
    (-1.0..=1.0f64, -1.0..=1.0f64, -1.0..=1.0f64).prop_filter_map("unphysical", |(c1, c2, c3)| XStateParams::new(c1, c2, c3).ok())
}

proptest! {
    #[test]
    fn bound_never_exceeds_drive_time(p in x_state(), r in 0.0..=1.0f64, theta in 0.0..TAU, tau in 0.01..=20.0f64) {
        let rec = qsl_time(&p, &vac(r, theta), tau).unwrap();
        prop_assert!(rec.tau_qsl >= 0.0);
        prop_assert!(rec.tau_qsl <= tau * (1.0 + 1e-9), "{} > {}", rec.tau_qsl, tau);
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&rec.theta_angle));
    }

    #[test]
    fn lambda_quadrature_matches_closed_form(p in x_state(), r in 0.0..=1.0f64, theta in 0.0..TAU, tau in 0.01..=20.0f64) {
        let prof = vac(r, theta);
        let q = lambda_op(&p, &prof, tau).unwrap();
        let c = lambda_op_closed(&p, &prof, tau).unwrap();
        prop_assert!((q - c).abs() <= 1e-8 * c.abs().max(1e-12), "{q} vs {c}");
    }
}

#[test]
fn stationary_states_have_zero_bound() {
    for c in [-0.4, 0.0, 0.3] {
        let p = XStateParams::new(c, c, 0.1).unwrap();
        let rec = qsl_time(&p, &vac(0.5, 1.0), 2.0).unwrap();
        assert!(rec.stationary);
        assert_eq!(rec.tau_qsl, 0.0);
    }
}
