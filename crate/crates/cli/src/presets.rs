//! Named scenarios that regenerate the data behind each figure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use squeezed_discord::states::XStateParams;

use crate::commands::Command;
use crate::config::{Range, ScenarioConfig};

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub command: Command,
    pub description: &'static str,
    pub config: ScenarioConfig,
}

pub const NAMES: &[&str] = &[
    "fig1-theta",
    "fig1-r",
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "fig8",
    "fig8-theta",
    "fig8-r",
    "fig9a",
    "fig9b",
];

const THETAS: [f64; 3] = [0.0, FRAC_PI_4, FRAC_PI_2];
const RS: [f64; 3] = [0.1, 0.5, 1.0];

fn base(c1: f64, c2: f64, c3: f64) -> ScenarioConfig {
    ScenarioConfig {
        state: XStateParams::new(c1, c2, c3).expect("preset state is physical"),
        ..ScenarioConfig::default()
    }
}

/// θ sweep at r = 0.5 followed by r sweep at θ = π/2.
fn figure_pairs() -> Vec<[f64; 2]> {
    THETAS.iter().map(|&t| [0.5, t]).chain(RS.iter().filter(|&&r| r != 0.5).map(|&r| [r, FRAC_PI_2])).collect()
}

pub fn preset(name: &str) -> Option<Preset> {
    let (command, description, config) = match name {
        "fig1-theta" => {
            let mut c = base(0.5, 0.0, 0.3);
            c.grid.tau = Range::new(0.0, 10.0, 401);
            c.grid.r = Some(vec![0.5]);
            c.grid.theta = Some(THETAS.to_vec());
            (Command::Trace, "correlation traces for theta in {0, pi/4, pi/2}, r = 0.5", c)
        }
        "fig1-r" => {
            let mut c = base(0.5, 0.0, 0.3);
            c.grid.tau = Range::new(0.0, 10.0, 401);
            c.grid.r = Some(RS.to_vec());
            c.grid.theta = Some(vec![FRAC_PI_2]);
            (Command::Trace, "correlation traces for r in {0.1, 0.5, 1}, theta = pi/2", c)
        }
        "fig2" => {
            let mut c = base(0.5, 0.0, 0.3);
            c.grid.c1 = Some(Range::new(0.301, 0.599, 150));
            let mut pairs = figure_pairs();
            pairs.push([0.0, 0.0]);
            c.grid.pairs = Some(pairs);
            c.output.format = Some(crate::config::Format::Csv);
            (Command::Critical, "critical time against c1 for the squeezing settings of the trace figures", c)
        }
        "fig3" => {
            let mut c = base(0.5, 0.0, 0.3);
            c.bath = c.bath.with_squeezing(0.5, FRAC_PI_2).expect("valid squeezing");
            c.grid.c1 = Some(Range::new(0.0, 0.7, 71));
            c.grid.tau = Range::new(0.0, 10.0, 101);
            (Command::Phase, "discord over (c1, tau) for c2 = 0, c3 = 0.3", c)
        }
        "fig4" => {
            let mut c = base(0.5, 0.0, 0.3);
            c.grid.c1 = Some(Range::new(0.3, 0.7, 81));
            c.grid.pairs = Some(vec![[0.5, 0.0], [0.5, FRAC_PI_4], [0.5, FRAC_PI_2], [0.1, FRAC_PI_2], [1.0, FRAC_PI_2]]);
            (Command::Amplify, "amplification rate against c1 for c2 = 0, c3 = 0.3, with curve intersections", c)
        }
        "fig5" => {
            let mut c = base(0.9, 0.6, -0.6);
            c.grid.tau = Range::new(0.0, 10.0, 401);
            c.grid.pairs = Some(figure_pairs());
            (Command::Trace, "correlation traces for c = (0.9, 0.6, -0.6)", c)
        }
        "fig6" => {
            let mut c = base(0.9, 0.6, -0.6);
            c.bath = c.bath.with_squeezing(0.5, FRAC_PI_2).expect("valid squeezing");
            c.grid.c1 = Some(Range::new(0.2, 1.0, 81));
            c.grid.tau = Range::new(0.0, 10.0, 101);
            (Command::Phase, "discord over (c1, tau) for c2 = 0.6, c3 = -0.6", c)
        }
        "fig8" => {
            let mut c = base(0.9, 0.6, -0.6);
            c.grid.c1 = Some(Range::new(0.61, 0.99, 39));
            c.grid.pairs = Some(figure_pairs());
            (Command::Amplify, "amplification rate against c1 for c2 = 0.6, c3 = -0.6", c)
        }
        "fig8-theta" => {
            let mut c = base(0.9, 0.6, -0.6);
            c.grid.r = Some(vec![0.5]);
            c.grid.theta = Some(full_turn(72));
            (Command::Amplify, "amplification rate against theta at c1 = 0.9, r = 0.5", c)
        }
        "fig8-r" => {
            let mut c = base(0.9, 0.6, -0.6);
            c.grid.r = Some(sweep(0.0, 1.5, 61));
            c.grid.theta = Some(vec![FRAC_PI_2]);
            (Command::Amplify, "amplification rate against r at c1 = 0.9, theta = pi/2", c)
        }
        "fig9a" => {
            let mut c = base(0.5, 0.0, 0.3);
            c.grid.c1 = Some(Range::new(0.1, 0.7, 13));
            c.grid.r = Some(vec![0.5]);
            c.grid.theta = Some(full_turn(120));
            (Command::Qsl, "speed-limit time over (theta, c1) at r = 0.5, tau = 1", c)
        }
        "fig9b" => {
            let mut c = base(0.5, 0.0, 0.3);
            c.grid.c1 = Some(Range::new(0.1, 0.7, 13));
            c.grid.r = Some(sweep(0.0, 1.0, 101));
            c.grid.theta = Some(vec![FRAC_PI_2]);
            (Command::Qsl, "speed-limit time over (r, c1) at theta = pi/2, tau = 1", c)
        }
        _ => return None,
    };
    let name = NAMES.iter().copied().find(|n| *n == name)?;
    Some(Preset {
        name,
        command,
        description,
        config,
    })
}

/// `n` phases covering [0, 2π) without repeating 0 ≡ 2π.
fn full_turn(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

fn sweep(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    Range::new(lo, hi, n).values()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves_and_validates() {
        for name in NAMES {
            let p = preset(name).unwrap_or_else(|| panic!("{name}"));
            assert_eq!(p.name, *name);
            p.config.validate().unwrap();
        }
        assert!(preset("fig7").is_none());
    }

    #[test]
    fn fig1_theta_matches_its_description() {
        let p = preset("fig1-theta").unwrap();
        let s = p.config.squeezings().unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|s| s.r == 0.5));
        assert_eq!(s[2].theta, FRAC_PI_2);
        assert_eq!((p.config.state.c1(), p.config.state.c2(), p.config.state.c3()), (0.5, 0.0, 0.3));
    }

    #[test]
    fn fig9_scans_include_the_reference_c1_values() {
        let c1s = preset("fig9a").unwrap().config.c1_values();
        for want in [0.4, 0.5, 0.6] {
            assert!(c1s.iter().any(|c| (c - want).abs() < 1e-12), "{want}");
        }
    }
}
