//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! fails. Run with `cargo test -p squeezed-discord-cli --test acceptance`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqdisc::commands::cmd_phase;
use sqdisc::config::{Range, ScenarioConfig};
use sqdisc::validate::random_state;
use squeezed_discord::bath::{gamma_analytic_zero_t, gamma_quadrature, DephasingProfile, SqueezedBathSpec};
use squeezed_discord::correlations::{discord_bruteforce, discord_closed, BruteForceOptions};
use squeezed_discord::dynamics::{
    amplification_onset, amplification_rate, classify_critical_time, corner_at, find_crossings, linspace,
    steady_state_discord, trace, Convention, CriticalKind, TraceRequest, DEFAULT_HORIZON,
};
use squeezed_discord::qsl::{lambda_op, lambda_op_closed, qsl_time, sweep_extrema, turning_point};
use squeezed_discord::states::{
    eigenvalues_closed, evolve, with_corner, XStateParams, EIGEN_FLOOR, HERMITICITY_TOL, TRACE_TOL,
};
use squeezed_discord::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        passed,
        detail: detail.into(),
    })
}

fn x(c1: f64, c2: f64, c3: f64) -> XStateParams {
    XStateParams::new(c1, c2, c3).expect("physical test state")
}

fn vac(r: f64, theta: f64) -> DephasingProfile {
    DephasingProfile::analytic(SqueezedBathSpec::vacuum(r, theta).expect("bath")).expect("profile")
}

fn grid3x3() -> Vec<(f64, f64)> {
    [0.0, 0.5, 1.0].iter().flat_map(|&r| [0.0, FRAC_PI_2, PI].map(|t| (r, t))).collect()
}

fn max(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn dephasing_oracle() -> Result<Outcome> {
    let taus = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];
    let unsqueezed = SqueezedBathSpec::vacuum(0.0, 0.0)?;
    let quad = DephasingProfile::quadrature(unsqueezed);
    let mut err0: f64 = 0.0;
    for &t in &taus {
        err0 = err0.max((gamma_quadrature(&quad, t)? - gamma_analytic_zero_t(&unsqueezed, t)?).abs());
    }
    let mut err_sq: f64 = 0.0;
    for r in [0.25, 0.5, 1.0] {
        for theta in [0.0, FRAC_PI_4, FRAC_PI_2, PI] {
            let bath = SqueezedBathSpec::vacuum(r, theta)?;
            let quad = DephasingProfile::quadrature(bath).with_tolerances(1e-10, 1e-14)?;
            for &t in &taus {
                err_sq = err_sq.max((gamma_quadrature(&quad, t)? - gamma_analytic_zero_t(&bath, t)?).abs());
            }
        }
    }
    outcome(
        err0 <= 1e-8 && err_sq <= 1e-8,
        format!("max |quad - closed| r=0: {err0:.2e}, squeezed: {err_sq:.2e} (tol 1e-8)"),
    )
}

fn discord_oracle() -> Result<Outcome> {
    let bf = BruteForceOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n_random = 120;
    let mut err_random: f64 = 0.0;
    for _ in 0..n_random {
        let p = random_state(&mut rng);
        let alpha = p.corner() * rng.random_range(0.0..=1.0);
        let d = (discord_closed(&p, alpha)?.discord - discord_bruteforce(&with_corner(&p, alpha)?, &bf)?).abs();
        err_random = err_random.max(d);
    }
    let profile = vac(0.5, FRAC_PI_2);
    let mut err_family: f64 = 0.0;
    let mut n_family = 0;
    for p in [x(0.35, 0.0, 0.3), x(0.5, 0.0, 0.3), x(0.65, 0.0, 0.3), x(0.7, 0.6, -0.6), x(0.9, 0.6, -0.6)] {
        for tau in linspace(0.0, 10.0, 20) {
            let (_, alpha) = corner_at(&p, &profile, tau)?;
            let d = (discord_closed(&p, alpha)?.discord - discord_bruteforce(&with_corner(&p, alpha)?, &bf)?).abs();
            err_family = err_family.max(d);
            n_family += 1;
        }
    }
    outcome(
        err_random <= 1e-6 && err_family <= 1e-6,
        format!(
            "max |closed - brute force| over {n_random} random states: {err_random:.2e}, \
             over {n_family} family points: {err_family:.2e} (tol 1e-6)"
        ),
    )
}

fn classification() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut checked = 0;
    let mut expect = |c1: f64, c2: f64, c3: f64, want: CriticalKind, r: f64, t: f64| -> Result<()> {
        let got = classify_critical_time(&x(c1, c2, c3), &vac(r, t))?.kind;
        checked += 1;
        if got != want {
            bad.push(format!("c=({c1},{c2},{c3}) r={r} theta={t:.3}: {got:?} != {want:?}"));
        }
        Ok(())
    };
    for (r, t) in grid3x3() {
        for c1 in linspace(0.301, 0.599, 100) {
            expect(c1, 0.0, 0.3, CriticalKind::Finite, r, t)?;
        }
        for c1 in linspace(0.0, 0.299, 30) {
            expect(c1, 0.0, 0.3, CriticalKind::NoTransition, r, t)?;
        }
        for c1 in linspace(0.601, 0.7, 30) {
            expect(c1, 0.0, 0.3, CriticalKind::Infinite, r, t)?;
        }
        expect(0.3, 0.0, 0.3, CriticalKind::NoTransition, r, t)?;
        expect(0.6, 0.0, 0.3, CriticalKind::Infinite, r, t)?;
        for c1 in linspace(0.601, 0.999, 50) {
            expect(c1, 0.6, -0.6, CriticalKind::Infinite, r, t)?;
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{checked} classifications as expected")
        } else {
            format!("{} of {checked} wrong, first: {}", bad.len(), bad[0])
        },
    )
}

fn root_solver() -> Result<Outcome> {
    let mut closed_err: f64 = 0.0;
    let mut finite = 0;
    let cases: Vec<XStateParams> = linspace(0.1, 0.5, 10)
        .into_iter()
        .flat_map(|c1| linspace(0.52, 0.98, 10).into_iter().map(move |s| x(c1, 0.0, s * c1)))
        .collect();
    let unsqueezed = vac(0.0, 0.0);
    for p in &cases {
        let res = classify_critical_time(p, &unsqueezed)?;
        if let (CriticalKind::Finite, Some(tc), Some(k)) = (res.kind, res.tau_c, res.k_target) {
            finite += 1;
            closed_err = closed_err.max((tc - (k.powf(-FRAC_PI_2) - 1.0).sqrt()).abs());
        }
    }
    let mut residual: f64 = 0.0;
    let mut squeezed = 0;
    let family = linspace(0.301, 0.599, 30).into_iter().map(|c1| x(c1, 0.0, 0.3));
    let all: Vec<XStateParams> = cases.iter().copied().chain(family).collect();
    for r in [0.1, 0.5, 1.0] {
        for theta in [0.0, FRAC_PI_4, FRAC_PI_2, PI] {
            let profile = vac(r, theta);
            for p in &all {
                if let Some(tc) = classify_critical_time(p, &profile)?.tau_c {
                    let target = 2.0 * p.c3().abs() - p.inner().abs();
                    residual = residual.max((p.corner().abs() * profile.attenuation(tc)? - target).abs());
                    squeezed += 1;
                }
            }
        }
    }
    outcome(
        finite == 100 && closed_err <= 1e-8 && residual < 1e-9,
        format!(
            "{finite}/100 finite r=0 cases, max |root - closed| {closed_err:.2e} (tol 1e-8); \
             max residual over {squeezed} squeezed roots {residual:.2e} (tol 1e-9)"
        ),
    )
}

fn squeezing_trends() -> Result<Outcome> {
    let p = x(0.5, 0.0, 0.3);
    let tc = |r: f64, t: f64| -> Result<f64> {
        Ok(classify_critical_time(&p, &vac(r, t))?.tau_c.expect("finite family"))
    };
    let th = [tc(0.5, 0.0)?, tc(0.5, FRAC_PI_4)?, tc(0.5, FRAC_PI_2)?];
    let rs = [tc(0.1, FRAC_PI_2)?, tc(0.5, FRAC_PI_2)?, tc(1.0, FRAC_PI_2)?];
    let theta_ok = th[0] < th[1] && th[1] < th[2];
    let r_ok = rs[0] > rs[1] && rs[1] > rs[2];
    let mut c1_ok = true;
    for (r, t) in [(0.0, 0.0), (0.5, 0.0), (0.5, FRAC_PI_4), (0.5, FRAC_PI_2), (0.1, FRAC_PI_2), (1.0, FRAC_PI_2)] {
        let profile = vac(r, t);
        let mut prev = f64::NEG_INFINITY;
        for c1 in linspace(0.301, 0.599, 150) {
            let tc = classify_critical_time(&x(c1, 0.0, 0.3), &profile)?.tau_c.unwrap_or(f64::NAN);
            c1_ok &= tc > prev;
            prev = tc;
        }
    }
    outcome(
        theta_ok && r_ok && c1_ok,
        format!(
            "tau_c over theta {{0, pi/4, pi/2}}: {:.4} < {:.4} < {:.4} [{}]; over r {{0.1, 0.5, 1}}: \
             {:.4} > {:.4} > {:.4} [{}]; increasing in c1 [{}]",
            th[0], th[1], th[2], theta_ok, rs[0], rs[1], rs[2], r_ok, c1_ok
        ),
    )
}

fn steady_state() -> Result<Outcome> {
    let mut worst = Vec::new();
    for p in [x(0.5, 0.0, 0.3), x(0.9, 0.6, -0.6)] {
        let q_ss = steady_state_discord(&p)?;
        let mut dev: f64 = 0.0;
        for (r, t) in grid3x3() {
            let q = trace(&TraceRequest::new(p, vac(r, t), vec![200.0])?)?[0].discord;
            dev = dev.max((q - q_ss).abs());
        }
        worst.push((p, dev));
    }
    let passed = worst.iter().all(|(_, d)| *d < 1e-4);
    let detail = worst
        .iter()
        .map(|(p, d)| format!("c=({},{},{}): max |Q(200) - Q_ss| {d:.2e}", p.c1(), p.c2(), p.c3()))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(passed, format!("{detail} (tol 1e-4)"))
}

fn intersection(a: (f64, f64), b: (f64, f64), conv: Convention) -> Result<Vec<(f64, f64)>> {
    let rate = |(r, t): (f64, f64), c1: f64| amplification_rate(&XStateParams::new(c1, 0.0, 0.3)?, &vac(r, t), DEFAULT_HORIZON, conv);
    Ok(find_crossings(|c| rate(a, c), |c| rate(b, c), 0.3, 0.7, 81)?.into_iter().map(|c| (c.x, c.y)).collect())
}

fn amplification_intersections() -> Result<Outcome> {
    let near = |found: &[(f64, f64)], c: f64, r: f64| {
        found.iter().any(|&(x, y)| (x - c).abs() <= 0.02 && (y - r).abs() <= 0.05)
    };
    let mut tried = Vec::new();
    for conv in [Convention::TimeAverage, Convention::PlainIntegral] {
        let theta = intersection((0.5, 0.0), (0.5, FRAC_PI_2), conv)?;
        let r = intersection((0.1, FRAC_PI_2), (1.0, FRAC_PI_2), conv)?;
        let ok = near(&theta, 0.421, 1.176) && near(&r, 0.436, 1.219);
        let fmt = |v: &[(f64, f64)]| v.iter().map(|(x, y)| format!("({x:.4}, {y:.4})")).collect::<Vec<_>>().join(" ");
        tried.push(format!("{conv:?}: theta curves cross at {}; r curves at {}", fmt(&theta), fmt(&r)));
        if ok {
            return outcome(true, format!("convention {conv:?} pinned; {}", tried.join("; ")));
        }
    }
    outcome(false, tried.join("; "))
}

fn no_amplification_region() -> Result<Outcome> {
    let settings = [(0.5, 0.0), (0.5, FRAC_PI_4), (0.5, FRAC_PI_2), (0.1, FRAC_PI_2), (1.0, FRAC_PI_2)];
    let mut onsets = Vec::new();
    for (r, t) in settings {
        let onset = amplification_onset(0.0, 0.3, &vac(r, t), DEFAULT_HORIZON, Convention::TimeAverage, 1e-3, 0.0, 0.7, 141)?;
        onsets.push(((r, t), onset));
    }
    let passed = onsets.iter().all(|(_, o)| o.is_some_and(|c| (0.40..=0.45).contains(&c)));
    let detail = onsets
        .iter()
        .map(|((r, t), o)| format!("r={r} theta={t:.3}: {}", o.map_or("none".into(), |c| format!("{c:.4}"))))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(passed, format!("onset c1 with R > 1.001 in [0.40, 0.45]: {detail}"))
}

fn qsl_properties() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut excess = f64::NEG_INFINITY;
    let mut lambda_err: f64 = 0.0;
    for _ in 0..200 {
        let p = random_state(&mut rng);
        let profile = vac(rng.random_range(0.0..1.5), rng.random_range(0.0..2.0 * PI));
        let tau = rng.random_range(0.05..10.0);
        excess = excess.max(qsl_time(&p, &profile, tau)?.tau_qsl - tau);
        let window_non_negative = linspace(0.0, tau, 200).iter().try_fold(true, |acc, &s| {
            Ok::<_, squeezed_discord::Error>(acc && profile.rate_scaled(s)? >= 0.0)
        })?;
        if window_non_negative {
            lambda_err = lambda_err.max((lambda_op(&p, &profile, tau)? - lambda_op_closed(&p, &profile, tau)?).abs());
        }
    }
    let bound_ok = excess <= 0.0;
    let lambda_ok = lambda_err <= 1e-8;

    let mut stationary_max: f64 = 0.0;
    for c in [-0.4, 0.0, 0.3] {
        for (r, t) in grid3x3() {
            stationary_max = stationary_max.max(qsl_time(&x(c, c, 0.1), &vac(r, t), 1.0)?.tau_qsl.abs());
        }
    }
    let stationary_ok = stationary_max == 0.0;

    let thetas: Vec<f64> = (0..360).map(|k| 2.0 * PI * k as f64 / 360.0).collect();
    let rs = linspace(0.0, 1.0, 201);
    let (mut axis_ok, mut turn_ok) = (true, true);
    let mut axes = Vec::new();
    let mut turns = Vec::new();
    for c1 in [0.4, 0.5, 0.6] {
        let p = x(c1, 0.0, 0.3);
        let ys: Vec<f64> = thetas.iter().map(|&t| qsl_time(&p, &vac(0.5, t), 1.0).map(|q| q.tau_qsl)).collect::<Result<_>>()?;
        let ext = sweep_extrema(&thetas, &ys);
        axis_ok &= ext.is_some_and(|e| (e.argmin - 2.76).abs() <= 0.05 || (e.argmax - 2.76).abs() <= 0.05);
        axes.push(ext.map_or("flat".to_string(), |e| format!("min {:.3} max {:.3}", e.argmin, e.argmax)));
        let ys: Vec<f64> = rs.iter().map(|&r| qsl_time(&p, &vac(r, FRAC_PI_2), 1.0).map(|q| q.tau_qsl)).collect::<Result<_>>()?;
        let tp = turning_point(&rs, &ys);
        turn_ok &= tp.is_some_and(|r| (r - 0.18).abs() <= 0.03);
        turns.push(tp.map_or("none".to_string(), |r| format!("{r:.3}")));
    }
    outcome(
        bound_ok && lambda_ok && stationary_ok && axis_ok && turn_ok,
        format!(
            "max(tau_qsl - tau) {excess:.2e} [{bound_ok}]; stationary max tau_qsl {stationary_max:e} [{stationary_ok}]; \
             Lambda quad vs closed {lambda_err:.2e} [{lambda_ok}]; theta axis near 2.76 for c1 {{0.4,0.5,0.6}}: {} [{axis_ok}]; \
             r turning point near 0.18: {} [{turn_ok}]",
            axes.join(", "),
            turns.join(", ")
        ),
    )
}

fn structural_invariants() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut herm, mut tr, mut spec, mut bal, mut marg) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut min_eig = f64::INFINITY;
    let n = 2000;
    for _ in 0..n {
        let p = random_state(&mut rng);
        let rho = evolve(&p, rng.random_range(0.0..=1.0f64).max(f64::MIN_POSITIVE))?;
        let m = rho.matrix();
        for i in 0..4 {
            for j in 0..4 {
                herm = herm.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        tr = tr.max((m.trace().re - 1.0).abs());
        let dense = rho.eigenvalues();
        min_eig = min_eig.min(dense[0]);
        let alpha = rho.entry(0, 3).re * 4.0;
        let closed = eigenvalues_closed(&p, alpha)?.sorted();
        spec = spec.max(max(closed.iter().zip(&dense).map(|(a, b)| (a - b).abs())));
        let c = discord_closed(&p, alpha)?;
        bal = bal.max((c.mutual_info - c.classical - c.discord).abs());
        for red in [rho.reduced_a(), rho.reduced_b()] {
            for i in 0..2 {
                for j in 0..2 {
                    let want = if i == j { 0.5 } else { 0.0 };
                    marg = marg.max((red[(i, j)] - want).norm());
                }
            }
        }
    }
    let passed = herm <= HERMITICITY_TOL
        && tr <= TRACE_TOL
        && min_eig >= -EIGEN_FLOOR
        && spec <= 1e-10
        && bal <= 1e-12
        && marg <= 1e-12;
    outcome(
        passed,
        format!(
            "{n} evolved states: hermiticity {herm:.1e}, trace {tr:.1e}, smallest eigenvalue {min_eig:.1e}, \
             closed vs dense spectrum {spec:.1e}, |I - C - Q| {bal:.1e}, marginal deviation {marg:.1e}"
        ),
    )
}

fn determinism() -> Result<Outcome> {
    let mut cfg = ScenarioConfig::default();
    cfg.grid.c1 = Some(Range::new(0.0, 0.9, 46));
    cfg.grid.tau = Range::new(0.0, 10.0, 101);
    cfg.grid.theta = Some(vec![0.0, FRAC_PI_4, FRAC_PI_2]);
    cfg.grid.r = Some(vec![0.1, 0.5, 1.0]);
    let many = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).max(4);
    let run = |workers: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("pool");
        pool.install(|| cmd_phase(&cfg)).map(|a| a.body).map_err(|e| e.to_string())
    };
    let (one, n) = match (run(1), run(many)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return outcome(false, format!("phase failed: {e}")),
    };
    outcome(
        one == n,
        format!("phase CSV with 1 and {many} workers: {} bytes each, identical = {}", one.len(), one == n),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<Outcome>); 11] = [
        ("dephasing oracle equivalence", dephasing_oracle),
        ("discord oracle equivalence", discord_oracle),
        ("critical-time classification", classification),
        ("root solver vs closed form", root_solver),
        ("squeezing trends of tau_c", squeezing_trends),
        ("steady-state independence", steady_state),
        ("amplification intersections", amplification_intersections),
        ("no-amplification region", no_amplification_region),
        ("speed-limit properties", qsl_properties),
        ("structural invariants", structural_invariants),
        ("determinism across workers", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check().unwrap_or_else(|e| Outcome {
            passed: false,
            detail: format!("error: {e}"),
        });
        println!(
            "criterion {:>2} {} {name}: {} ({:.1}s)",
            i + 1,
            if out.passed { "PASS" } else { "FAIL" },
            out.detail,
            start.elapsed().as_secs_f64()
        );
        if !out.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of {} criteria fail: {failed:?}", failed.len(), criteria.len());
        ExitCode::FAILURE
    }
}
