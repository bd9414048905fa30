//! The computational subcommands. Each returns the artifact bytes plus a
//! report; writing files is left to [`emit`].

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use squeezed_discord::bath::SpectralDensity;
use squeezed_discord::correlations::CorrelationRecord;
use squeezed_discord::dynamics::{
    amplification_curve, amplification_onset, amplification_rate, classify_critical_time, find_crossings,
    phase_diagram, trace, CriticalKind, PhaseDiagramSpec, TraceRequest,
};
use squeezed_discord::qsl::{qsl_time, sweep_extrema, turning_point};
use squeezed_discord::states::XStateParams;

use crate::config::{Format, ScenarioConfig, Squeezing};
use crate::error::{CliError, CliResult};
use crate::manifest::{unix_now, RunManifest, TaskTiming};
use crate::table::{fmt_f64, fmt_opt, Table};

/// Threshold on `R − 1` used for the amplification-onset report.
pub const ONSET_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Trace,
    Critical,
    Phase,
    Amplify,
    Qsl,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Trace => "trace",
            Command::Critical => "critical",
            Command::Phase => "phase",
            Command::Amplify => "amplify",
            Command::Qsl => "qsl",
        }
    }

    pub fn default_format(self) -> Format {
        match self {
            Command::Critical => Format::Json,
            _ => Format::Csv,
        }
    }
}

/// Output of one command, not yet written anywhere.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub command: Command,
    pub format: Format,
    pub body: Vec<u8>,
    pub report: Value,
    pub warnings: Vec<String>,
    pub timings: Vec<TaskTiming>,
}

pub fn run(command: Command, cfg: &ScenarioConfig) -> CliResult<Artifact> {
    cfg.validate()?;
    match command {
        Command::Trace => cmd_trace(cfg),
        Command::Critical => cmd_critical(cfg),
        Command::Phase => cmd_phase(cfg),
        Command::Amplify => cmd_amplify(cfg),
        Command::Qsl => cmd_qsl(cfg),
    }
}

struct Builder {
    command: Command,
    format: Format,
    warnings: Vec<String>,
    timings: Vec<TaskTiming>,
    clock: Instant,
}

impl Builder {
    fn new(command: Command, cfg: &ScenarioConfig) -> Self {
        Self {
            command,
            format: cfg.output.format.unwrap_or(command.default_format()),
            warnings: Vec::new(),
            timings: Vec::new(),
            clock: Instant::now(),
        }
    }

    fn lap(&mut self, task: &str) {
        self.timings.push(TaskTiming {
            task: task.into(),
            seconds: self.clock.elapsed().as_secs_f64(),
        });
        self.clock = Instant::now();
    }

    fn finish(mut self, table: Table, json_body: impl Serialize, report: Value) -> CliResult<Artifact> {
        let body = match self.format {
            Format::Csv => table.to_csv()?,
            Format::Json => {
                let mut b = serde_json::to_vec_pretty(&json_body).expect("artifact serializes");
                b.push(b'\n');
                b
            }
        };
        self.lap("encode");
        Ok(Artifact {
            command: self.command,
            format: self.format,
            body,
            report,
            warnings: self.warnings,
            timings: self.timings,
        })
    }
}

fn squeezing_json(s: &Squeezing) -> Value {
    json!({ "r": s.r, "theta": s.theta })
}

fn state_with_c1(cfg: &ScenarioConfig, c1: f64) -> Option<XStateParams> {
    XStateParams::new(c1, cfg.state.c2(), cfg.state.c3()).ok()
}

#[derive(Serialize)]
struct TraceBlock<'a> {
    r: f64,
    theta: f64,
    records: &'a [CorrelationRecord],
}

pub fn cmd_trace(cfg: &ScenarioConfig) -> CliResult<Artifact> {
    let mut b = Builder::new(Command::Trace, cfg);
    let squeezings = cfg.squeezings()?;
    let grid = cfg.grid.tau.values();
    let traces: Vec<Vec<CorrelationRecord>> = squeezings
        .par_iter()
        .map(|s| trace(&TraceRequest::new(cfg.state, s.profile, grid.clone())?))
        .collect::<Result<_, _>>()?;
    let critical: Vec<Value> = squeezings
        .par_iter()
        .map(|s| {
            let c = classify_critical_time(&cfg.state, &s.profile)?;
            Ok(json!({ "r": s.r, "theta": s.theta, "kind": c.kind, "tau_c": c.tau_c }))
        })
        .collect::<CliResult<_>>()?;
    b.lap("compute");

    for (s, recs) in squeezings.iter().zip(&traces) {
        if let Some(w) = recs.windows(2).find(|w| w[1].gamma < w[0].gamma - 1e-10) {
            b.warnings.push(format!(
                "Gamma decreases between tau = {} and {} (r = {}, theta = {})",
                w[0].tau, w[1].tau, s.r, s.theta
            ));
        }
    }

    let multi = squeezings.len() > 1;
    let mut header: Vec<&str> = if multi { vec!["r", "theta"] } else { vec![] };
    header.extend(CorrelationRecord::CSV_HEADER);
    let mut table = Table::new(&header);
    for (s, recs) in squeezings.iter().zip(&traces) {
        for rec in recs {
            let mut row = if multi { vec![fmt_f64(s.r), fmt_f64(s.theta)] } else { vec![] };
            row.extend(
                [rec.tau, rec.gamma, rec.alpha, rec.mutual_info, rec.classical, rec.chi, rec.discord].map(fmt_f64),
            );
            table.push(row);
        }
    }
    let blocks: Vec<TraceBlock> = squeezings
        .iter()
        .zip(&traces)
        .map(|(s, recs)| TraceBlock {
            r: s.r,
            theta: s.theta,
            records: recs,
        })
        .collect();
    let report = json!({ "traces": traces.len(), "points_per_trace": grid.len(), "critical": critical });
    b.finish(table, blocks, report)
}

#[derive(Debug, Clone, Serialize)]
struct CriticalRow {
    r: f64,
    theta: f64,
    c1: f64,
    c2: f64,
    c3: f64,
    /// `finite`, `infinite`, `no_transition` or `unphysical`.
    kind: String,
    tau_c: Option<f64>,
    k_target: Option<f64>,
    /// Closed form, only for an unsqueezed zero-temperature Ohmic bath.
    tau_c_closed: Option<f64>,
}

pub fn cmd_critical(cfg: &ScenarioConfig) -> CliResult<Artifact> {
    let mut b = Builder::new(Command::Critical, cfg);
    let squeezings = cfg.squeezings()?;
    let c1s = cfg.c1_values();
    let cells: Vec<(Squeezing, f64)> = squeezings.iter().flat_map(|s| c1s.iter().map(move |&c| (*s, c))).collect();
    let rows: Vec<CriticalRow> = cells
        .par_iter()
        .map(|&(s, c1)| {
            let mut row = CriticalRow {
                r: s.r,
                theta: s.theta,
                c1,
                c2: cfg.state.c2(),
                c3: cfg.state.c3(),
                kind: "unphysical".into(),
                tau_c: None,
                k_target: None,
                tau_c_closed: None,
            };
            let Some(params) = state_with_c1(cfg, c1) else {
                return Ok(row);
            };
            let res = classify_critical_time(&params, &s.profile)?;
            row.kind = serde_json::to_value(res.kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            row.tau_c = res.tau_c;
            row.k_target = res.k_target;
            let bath = s.profile.bath;
            if res.kind == CriticalKind::Finite
                && bath.r() == 0.0
                && bath.is_zero_temperature()
                && bath.spectral() == SpectralDensity::Ohmic
            {
                row.tau_c_closed = res.k_target.map(|k| (k.powf(-FRAC_PI_2) - 1.0).sqrt());
            }
            Ok(row)
        })
        .collect::<CliResult<_>>()?;
    b.lap("compute");

    let unphysical = rows.iter().filter(|r| r.kind == "unphysical").count();
    if unphysical > 0 {
        b.warnings.push(format!("{unphysical} unphysical (c1, c2, c3) cells skipped"));
    }
    let mut table = Table::new(&["r", "theta", "c1", "kind", "tau_c", "k_target", "tau_c_closed"]);
    for row in &rows {
        table.push(vec![
            fmt_f64(row.r),
            fmt_f64(row.theta),
            fmt_f64(row.c1),
            row.kind.clone(),
            fmt_opt(row.tau_c),
            fmt_opt(row.k_target),
            fmt_opt(row.tau_c_closed),
        ]);
    }
    let report = json!({ "cells": rows.len(), "unphysical": unphysical });
    let body = if rows.len() == 1 {
        serde_json::to_value(&rows[0])
    } else {
        serde_json::to_value(&rows)
    }
    .expect("rows serialize");
    b.finish(table, body, report)
}

#[derive(Serialize)]
struct PhaseBlock {
    r: f64,
    theta: f64,
    c1: Vec<f64>,
    tau: Vec<f64>,
    q: Vec<Vec<Option<f64>>>,
}

pub fn cmd_phase(cfg: &ScenarioConfig) -> CliResult<Artifact> {
    let mut b = Builder::new(Command::Phase, cfg);
    let squeezings = cfg.squeezings()?;
    let c1 = cfg.grid.c1.unwrap_or(crate::config::Range::new(cfg.state.c1(), cfg.state.c1(), 1));
    let spec = PhaseDiagramSpec {
        c1_min: c1.min,
        c1_max: c1.max,
        c1_points: c1.points,
        c2: cfg.state.c2(),
        c3: cfg.state.c3(),
        tau_min: cfg.grid.tau.min,
        tau_max: cfg.grid.tau.max,
        tau_points: cfg.grid.tau.points,
    };
    let diagrams = squeezings
        .par_iter()
        .map(|s| phase_diagram(&spec, &s.profile))
        .collect::<Result<Vec<_>, _>>()?;
    b.lap("compute");

    let masked: usize = diagrams.iter().map(|d| d.invalid_cells()).sum();
    if masked > 0 {
        b.warnings.push(format!("{masked} unphysical cells masked"));
    }
    let mut table = Table::new(&["r", "theta", "c1", "tau", "Q"]);
    for (s, d) in squeezings.iter().zip(&diagrams) {
        for (i, &c) in d.c1.iter().enumerate() {
            for (j, &t) in d.tau.iter().enumerate() {
                table.push(vec![fmt_f64(s.r), fmt_f64(s.theta), fmt_f64(c), fmt_f64(t), fmt_opt(d.get(i, j))]);
            }
        }
    }
    let blocks: Vec<PhaseBlock> = squeezings
        .iter()
        .zip(diagrams)
        .map(|(s, d)| PhaseBlock {
            r: s.r,
            theta: s.theta,
            c1: d.c1,
            tau: d.tau,
            q: d.q,
        })
        .collect();
    let report = json!({ "cells": table.len(), "masked": masked });
    b.finish(table, blocks, report)
}

#[derive(Serialize)]
struct CurveBlock {
    r: f64,
    theta: f64,
    c1: Vec<f64>,
    rate: Vec<Option<f64>>,
}

pub fn cmd_amplify(cfg: &ScenarioConfig) -> CliResult<Artifact> {
    let mut b = Builder::new(Command::Amplify, cfg);
    let squeezings = cfg.squeezings()?;
    let c1s = cfg.c1_values();
    let (c2, c3) = (cfg.state.c2(), cfg.state.c3());
    let curves: Vec<Vec<Option<f64>>> = squeezings
        .par_iter()
        .map(|s| amplification_curve(&c1s, c2, c3, &s.profile, cfg.horizon, cfg.convention))
        .collect::<Result<_, _>>()?;
    b.lap("curves");

    // curves that differ in exactly one squeezing parameter
    let pairs: Vec<(usize, usize)> = (0..squeezings.len())
        .flat_map(|i| (i + 1..squeezings.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| (squeezings[i].r == squeezings[j].r) != (squeezings[i].theta == squeezings[j].theta))
        .collect();
    let rate = |s: &Squeezing, c1: f64| -> squeezed_discord::Result<f64> {
        amplification_rate(&XStateParams::new(c1, c2, c3)?, &s.profile, cfg.horizon, cfg.convention)
    };
    let mut crossings = Vec::new();
    if c1s.len() >= 2 {
        for &(i, j) in &pairs {
            let valid: Vec<usize> = (0..c1s.len()).filter(|&k| curves[i][k].is_some() && curves[j][k].is_some()).collect();
            let (Some(&first), Some(&last)) = (valid.first(), valid.last()) else { continue };
            if last == first {
                continue;
            }
            let (si, sj) = (squeezings[i], squeezings[j]);
            let found = find_crossings(|x| rate(&si, x), |x| rate(&sj, x), c1s[first], c1s[last], last - first + 1)?;
            for c in found {
                crossings.push(json!({
                    "a": squeezing_json(&si),
                    "b": squeezing_json(&sj),
                    "c1": c.x,
                    "R": c.y,
                }));
            }
        }
    }
    let onsets: Vec<Value> = if c1s.len() >= 2 {
        squeezings
            .par_iter()
            .map(|s| {
                let onset = amplification_onset(
                    c2,
                    c3,
                    &s.profile,
                    cfg.horizon,
                    cfg.convention,
                    ONSET_THRESHOLD,
                    c1s[0],
                    c1s[c1s.len() - 1],
                    c1s.len(),
                )?;
                Ok(json!({ "r": s.r, "theta": s.theta, "c1": onset }))
            })
            .collect::<CliResult<_>>()?
    } else {
        Vec::new()
    };
    b.lap("report");

    let undefined: usize = curves.iter().flatten().filter(|r| r.is_none()).count();
    if undefined > 0 {
        b.warnings.push(format!("{undefined} cells without a defined rate (unphysical or zero initial discord)"));
    }
    let mut table = Table::new(&["r", "theta", "c1", "R"]);
    for (s, curve) in squeezings.iter().zip(&curves) {
        for (&c, &r) in c1s.iter().zip(curve) {
            table.push(vec![fmt_f64(s.r), fmt_f64(s.theta), fmt_f64(c), fmt_opt(r)]);
        }
    }
    let blocks: Vec<CurveBlock> = squeezings
        .iter()
        .zip(curves)
        .map(|(s, rate)| CurveBlock {
            r: s.r,
            theta: s.theta,
            c1: c1s.clone(),
            rate,
        })
        .collect();
    let report = json!({
        "convention": cfg.convention,
        "horizon": cfg.horizon,
        "intersections": crossings,
        "onset_threshold": ONSET_THRESHOLD,
        "onsets": onsets,
    });
    b.finish(table, blocks, report)
}

#[derive(Debug, Clone, Copy, Serialize)]
struct QslRow {
    c1: f64,
    r: f64,
    theta: f64,
    tau: f64,
    #[serde(rename = "Theta")]
    theta_angle: f64,
    #[serde(rename = "Lambda_op")]
    lambda_op: f64,
    tau_qsl: f64,
    stationary: bool,
}

pub fn cmd_qsl(cfg: &ScenarioConfig) -> CliResult<Artifact> {
    let mut b = Builder::new(Command::Qsl, cfg);
    let squeezings = cfg.squeezings()?;
    let c1s = cfg.c1_values();
    let cells: Vec<(f64, Squeezing)> = c1s.iter().flat_map(|&c| squeezings.iter().map(move |s| (c, *s))).collect();
    let rows: Vec<Option<QslRow>> = cells
        .par_iter()
        .map(|&(c1, s)| {
            let Some(params) = state_with_c1(cfg, c1) else {
                return Ok(None);
            };
            let rec = qsl_time(&params, &s.profile, cfg.drive_time)?;
            Ok(Some(QslRow {
                c1,
                r: s.r,
                theta: s.theta,
                tau: cfg.drive_time,
                theta_angle: rec.theta_angle,
                lambda_op: rec.lambda_op,
                tau_qsl: rec.tau_qsl,
                stationary: rec.stationary,
            }))
        })
        .collect::<CliResult<_>>()?;
    b.lap("compute");

    let rows: Vec<QslRow> = rows.into_iter().flatten().collect();
    if rows.len() < cells.len() {
        b.warnings.push(format!("{} unphysical (c1, c2, c3) cells skipped", cells.len() - rows.len()));
    }

    // symmetry axis over θ at fixed (c1, r); turning point over r at fixed (c1, θ)
    let mut theta_axes = Vec::new();
    let mut turning_points = Vec::new();
    for &c1 in &c1s {
        let here: Vec<&QslRow> = rows.iter().filter(|row| row.c1 == c1).collect();
        let mut rs: Vec<f64> = here.iter().map(|row| row.r).collect();
        rs.dedup();
        let mut thetas: Vec<f64> = here.iter().map(|row| row.theta).collect();
        thetas.sort_by(f64::total_cmp);
        thetas.dedup();
        for &r in &rs {
            let mut sweep: Vec<(f64, f64)> = here.iter().filter(|row| row.r == r).map(|row| (row.theta, row.tau_qsl)).collect();
            if sweep.len() < 3 {
                continue;
            }
            sweep.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (xs, ys): (Vec<f64>, Vec<f64>) = sweep.into_iter().unzip();
            let ext = sweep_extrema(&xs, &ys);
            theta_axes.push(json!({
                "c1": c1,
                "r": r,
                "flat": ext.is_none(),
                "argmin": ext.map(|e| e.argmin),
                "argmax": ext.map(|e| e.argmax),
            }));
        }
        for &theta in &thetas {
            let mut sweep: Vec<(f64, f64)> =
                here.iter().filter(|row| row.theta == theta).map(|row| (row.r, row.tau_qsl)).collect();
            if sweep.len() < 3 {
                continue;
            }
            sweep.sort_by(|a, b| a.0.total_cmp(&b.0));
            let (xs, ys): (Vec<f64>, Vec<f64>) = sweep.into_iter().unzip();
            turning_points.push(json!({
                "c1": c1,
                "theta": theta,
                "flat": sweep_extrema(&xs, &ys).is_none(),
                "r": turning_point(&xs, &ys),
            }));
        }
    }
    b.lap("report");

    let mut table = Table::new(&["c1", "r", "theta", "tau", "Theta", "Lambda_op", "tau_qsl"]);
    for row in &rows {
        table.push(
            [row.c1, row.r, row.theta, row.tau, row.theta_angle, row.lambda_op, row.tau_qsl]
                .map(fmt_f64)
                .to_vec(),
        );
    }
    let report = json!({
        "cells": rows.len(),
        "stationary": rows.iter().filter(|row| row.stationary).count(),
        "theta_symmetry": theta_axes,
        "r_turning_points": turning_points,
    });
    b.finish(table, &rows, report)
}

/// Where an artifact goes when the config names no path.
pub fn default_output_path(out_dir: &Path, stem: &str, format: Format) -> PathBuf {
    out_dir.join(format!("{stem}.{}", format.extension()))
}

/// Writes the artifact and its manifest; returns both paths.
pub fn emit(
    artifact: &Artifact,
    cfg: &ScenarioConfig,
    path: &Path,
    workers: usize,
    started_unix: f64,
    started: Instant,
) -> CliResult<(PathBuf, PathBuf)> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, &artifact.body).map_err(|e| CliError::io(path, e))?;
    let manifest = RunManifest {
        tool: "sqdisc".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: artifact.command.name().into(),
        config_hash: cfg.hash(),
        config: cfg.clone(),
        started_unix,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        workers,
        timings: artifact.timings.clone(),
        warnings: artifact.warnings.clone(),
        report: artifact.report.clone(),
    };
    let mpath = manifest.write(path)?;
    Ok((path.to_path_buf(), mpath))
}

pub fn now() -> (f64, Instant) {
    (unix_now(), Instant::now())
}
