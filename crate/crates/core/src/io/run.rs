//! Command driver: runs one analysis from a resolved configuration and writes
//! its artifacts plus `manifest.json` into the output directory.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::bifpoint::BifurcationPoint;
use crate::codim2::{analyze_plane, BifCurve, CurveKind, EventKind, PlaneReport, TraceOptions};
use crate::cycles::{
    classify_band, continue_from_hopf, detect_fold_of_cycles, integrate, mark_snic, trace_flc_curve, Band,
    ContinuationOptions, CycleBranch, FlcOptions, IntegratorOptions, Record, TIME_SCALE,
};
use crate::equilibria::{default_x_range, locate_hopf, locate_saddle_nodes, sweep_branch, Codim1Tolerances};
use crate::error::{Error, Result};
use crate::io::config::RunConfig;
use crate::io::csv::{fmt_num, write_atomic, CsvTable};
use crate::linalg::roots::linspace;
use crate::model::{Model, System};
use crate::scenarios::{lowest_equilibrium, seizure_scenario, simulate_sde, NoiseSpec, SdeOptions, SdeTrajectory, SegmentOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Equilibria,
    Codim2,
    Cycles,
    FlcCurve,
    Simulate,
    Sde,
    Seizure,
    Bands,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Equilibria,
        Command::Codim2,
        Command::Cycles,
        Command::FlcCurve,
        Command::Simulate,
        Command::Sde,
        Command::Seizure,
        Command::Bands,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Equilibria => "equilibria",
            Command::Codim2 => "codim2",
            Command::Cycles => "cycles",
            Command::FlcCurve => "flc-curve",
            Command::Simulate => "simulate",
            Command::Sde => "sde",
            Command::Seizure => "seizure",
            Command::Bands => "bands",
        }
    }

    pub fn parse(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

/// Files written by a run, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub partial: bool,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Writer<'_> {
    fn csv(&mut self, name: &str, t: &CsvTable) -> Result<()> {
        self.bytes(name, t.to_text().as_bytes())
    }

    fn json<V: Serialize>(&mut self, name: &str, v: &V) -> Result<()> {
        let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        self.bytes(name, s.as_bytes())
    }

    fn bytes(&mut self, name: &str, b: &[u8]) -> Result<()> {
        write_atomic(&self.dir.join(name), b)?;
        self.files.push(name.to_string());
        Ok(())
    }
}

fn codim1_tolerances(cfg: &RunConfig) -> Codim1Tolerances {
    let d = Codim1Tolerances::default();
    Codim1Tolerances {
        xtol: cfg.tolerance("xtol", d.xtol),
        unstable_re: cfg.tolerance("unstable_re", d.unstable_re),
        imag_axis: cfg.tolerance("imag_axis", d.imag_axis),
        omega_min: cfg.tolerance("omega_min", d.omega_min),
        sn_nondegenerate: cfg.tolerance("sn_nondegenerate", d.sn_nondegenerate),
        l1_degenerate: cfg.tolerance("l1_degenerate", d.l1_degenerate),
    }
}

fn continuation_options(cfg: &RunConfig, base: ContinuationOptions) -> ContinuationOptions {
    let mut c = base;
    c.shoot.int_tol = cfg.tolerance("int_tol", c.shoot.int_tol);
    c.shoot.residual_tol = cfg.tolerance("residual_tol", c.shoot.residual_tol);
    c
}

fn x_grid(cfg: &RunConfig, model: &Model<f64>) -> Vec<f64> {
    let (lo, hi, n) = default_x_range(model.kind());
    match cfg.range {
        Some(r) => linspace(r.lo, r.hi, r.points(n)),
        None => linspace(lo, hi, n),
    }
}

fn p_range(cfg: &RunConfig) -> (f64, f64) {
    cfg.p_range.map_or((-6.0, 40.0), |r| (r.lo, r.hi))
}

fn require<T: Clone>(v: &Option<T>, path: &str, cmd: Command) -> Result<T> {
    v.clone().ok_or_else(|| Error::Config { path: path.into(), msg: format!("required by `{}`", cmd.as_str()) })
}

/// Runs `cmd`, writing artifacts and the manifest. On a numerical failure the
/// manifest is still written with `partial: true` before the error returns.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let model = cfg.build_model()?;
    std::fs::create_dir_all(&cfg.out)?;
    let start = Instant::now();
    let mut w = Writer { dir: &cfg.out, files: Vec::new() };
    let res = match cmd {
        Command::Equilibria => run_equilibria(cfg, &model, &mut w),
        Command::Codim2 => run_codim2(cfg, &model, &mut w),
        Command::Cycles => run_cycles(cfg, &model, &mut w),
        Command::FlcCurve => run_flc(cfg, &model, &mut w),
        Command::Simulate => run_simulate(cfg, &model, &mut w),
        Command::Sde => run_sde(cfg, &model, &mut w),
        Command::Seizure => run_seizure(cfg, &model, &mut w),
        Command::Bands => run_bands(cfg, &mut w),
    };
    let partial = res.is_err();
    let manifest = json!({
        "command": cmd.as_str(),
        "preset": cfg.preset_name(),
        "overrides": cfg.set,
        "params": model.param_names().iter().map(|n| (n.to_string(), model.param(n).unwrap_or(f64::NAN))).collect::<std::collections::BTreeMap<_, _>>(),
        "seed": cfg.seed,
        "tolerances": cfg.tol,
        "version": env!("CARGO_PKG_VERSION"),
        "wall_time_s": start.elapsed().as_secs_f64(),
        "partial": partial,
        "error": res.as_ref().err().map(|e| e.to_string()),
        "files": w.files,
    });
    w.json("manifest.json", &manifest)?;
    res?;
    Ok(RunOutcome { out_dir: cfg.out.clone(), files: w.files, partial })
}

fn run_equilibria(cfg: &RunConfig, model: &Model<f64>, w: &mut Writer) -> Result<()> {
    let tol = codim1_tolerances(cfg);
    let grid = x_grid(cfg, model);
    let branch = sweep_branch(model, (grid[0], grid[grid.len() - 1]), grid.len())?;
    let names = model.kind().component_names();
    let mut header = vec!["X", "P"];
    header.extend(names.iter().map(|n| *n));
    header.extend(["n_unstable", "stable", "max_re"]);
    let mut t = CsvTable::new(&header);
    for s in &branch.samples {
        let mut row = vec![fmt_num(s.x), fmt_num(s.p)];
        row.extend(s.state.iter().map(|v| fmt_num(*v)));
        let max_re = s.eigenvalues.iter().map(|z| z.re).fold(f64::NAN, f64::max);
        row.extend([s.n_unstable.to_string(), s.stable.to_string(), fmt_num(max_re)]);
        t.push(row);
    }
    w.csv("equilibria.csv", &t)?;
    let input = model.input_name();
    let mut points: Vec<BifurcationPoint> =
        locate_saddle_nodes(model, &grid, &tol).iter().map(|i| i.to_point(&[input], &[], input, &tol)).collect();
    points.extend(locate_hopf(model, &grid, &tol).iter().map(|h| h.to_point(&[input], &[], input, &tol)));
    points.sort_by(|a, b| a.get(input).partial_cmp(&b.get(input)).unwrap());
    w.json("bifpoints.json", &points)
}

fn curve_table(curves: &[BifCurve], kind: CurveKind) -> CsvTable {
    let mut t = match kind {
        CurveKind::SaddleNode => CsvTable::new(&["curve", "theta", "P", "X", "transversality", "quadratic", "lambda2"]),
        CurveKind::Hopf => CsvTable::new(&["curve", "theta", "P", "X", "omega", "l1", "transversality"]),
    };
    for (k, c) in curves.iter().enumerate() {
        for s in &c.samples {
            let tail = match kind {
                CurveKind::SaddleNode => [s.transversality, s.quadratic, s.lambda2],
                CurveKind::Hopf => [s.omega, s.l1, s.transversality],
            };
            let mut row = vec![k.to_string(), fmt_num(s.theta), fmt_num(s.p), fmt_num(s.x)];
            row.extend(tail.iter().map(|v| fmt_num(*v)));
            t.push(row);
        }
    }
    t
}

fn run_codim2(cfg: &RunConfig, model: &Model<f64>, w: &mut Writer) -> Result<()> {
    let [theta, _] = require(&cfg.pair, "pair", Command::Codim2)?;
    let range = require(&cfg.range, "range", Command::Codim2)?;
    let mut opts = TraceOptions::for_model(model);
    opts.tol = codim1_tolerances(cfg);
    let radius = cfg.tolerance("dbt_radius", 0.05);
    let rep: PlaneReport = analyze_plane(model, &theta, (range.lo, range.hi), range.points(121), &opts, radius)?;
    w.csv("sn_curves.csv", &curve_table(&rep.sn_curves, CurveKind::SaddleNode))?;
    w.csv("hopf_curves.csv", &curve_table(&rep.hopf_curves, CurveKind::Hopf))?;
    let mut ev = CsvTable::new(&["curve_kind", "curve", "event", "theta", "P", "X", "paired", "refined"]);
    for (kind, curves) in [("saddle_node", &rep.sn_curves), ("hopf", &rep.hopf_curves)] {
        for (k, c) in curves.iter().enumerate() {
            for e in &c.events {
                let name = match e.kind {
                    EventKind::Birth => "birth",
                    EventKind::Death => "death",
                };
                ev.push(vec![
                    kind.into(),
                    k.to_string(),
                    name.into(),
                    fmt_num(e.theta),
                    fmt_num(e.p),
                    fmt_num(e.x),
                    e.paired.to_string(),
                    e.refined.to_string(),
                ]);
            }
        }
    }
    w.csv("events.csv", &ev)?;
    w.json("bifpoints.json", &rep.points)
}

fn branch_table(branch: &CycleBranch) -> CsvTable {
    let mut t = CsvTable::new(&[
        "P",
        "period",
        "freq_hz",
        "x_min",
        "x_max",
        "max_nontrivial_multiplier_modulus",
        "stable",
        "band",
        "event",
    ]);
    for pt in &branch.points {
        let c = &pt.cycle;
        t.push(vec![
            fmt_num(c.p),
            fmt_num(c.period),
            fmt_num(c.freq_hz(TIME_SCALE)),
            fmt_num(c.x_min),
            fmt_num(c.x_max),
            fmt_num(c.max_nontrivial_modulus()),
            c.stable.to_string(),
            c.band.as_str().into(),
            pt.event.map_or("", |e| e.as_str()).into(),
        ]);
    }
    t
}

fn run_cycles(cfg: &RunConfig, model: &Model<f64>, w: &mut Writer) -> Result<()> {
    let tol = codim1_tolerances(cfg);
    let (lo, hi, n) = default_x_range(model.kind());
    let grid = linspace(lo, hi, n);
    let hopf = locate_hopf(model, &grid, &tol);
    let sn: Vec<f64> = locate_saddle_nodes(model, &grid, &tol).iter().map(|s| s.p).collect();
    let opts = continuation_options(cfg, ContinuationOptions::default());
    let input = model.input_name();
    let mut points = Vec::new();
    let mut summary = Vec::new();
    for (k, h) in hopf.iter().enumerate() {
        let mut branch = match continue_from_hopf(model, h, p_range(cfg), &opts) {
            Ok(b) => b,
            Err(e) if e.is_numerical() => {
                log::warn!("no cycle family from the Hopf point at {input} = {}: {e}", h.p);
                summary.push(json!({"branch": k, "hopf_p": h.p, "error": e.to_string()}));
                continue;
            }
            Err(e) => return Err(e),
        };
        points.push(h.to_point(&[input], &[], input, &tol));
        points.extend(detect_fold_of_cycles(model, &branch));
        points.extend(mark_snic(&mut branch, &sn, opts.snic_period, 0.05));
        let name = format!("cycles_{k}.csv");
        w.csv(&name, &branch_table(&branch))?;
        summary.push(json!({
            "branch": k,
            "file": name,
            "hopf_p": h.p,
            "points": branch.points.len(),
            "folds": branch.folds.len(),
            "termination": format!("{:?}", branch.termination),
        }));
    }
    w.json("branches.json", &summary)?;
    w.json("bifpoints.json", &points)
}

fn run_flc(cfg: &RunConfig, model: &Model<f64>, w: &mut Writer) -> Result<()> {
    let theta = match (&cfg.param, &cfg.pair) {
        (Some(p), _) => p.clone(),
        (None, Some([a, _])) => a.clone(),
        _ => return Err(Error::Config { path: "param".into(), msg: "required by `flc-curve`".into() }),
    };
    let range = require(&cfg.range, "range", Command::FlcCurve)?;
    let mut opts = FlcOptions::default();
    opts.cont = continuation_options(cfg, opts.cont);
    opts.p_range = p_range(cfg);
    let thetas = linspace(range.lo, range.hi, range.points(31));
    let rep = trace_flc_curve(model, &theta, &thetas, &opts)?;
    let mut t = CsvTable::new(&["curve", "theta", "P", "period"]);
    for (k, c) in rep.curves.iter().enumerate() {
        for &(th, p, per) in &c.samples {
            t.push(vec![k.to_string(), fmt_num(th), fmt_num(p), fmt_num(per)]);
        }
    }
    w.csv("flc.csv", &t)?;
    w.json("bifpoints.json", &rep.points)
}

fn initial_state(cfg: &RunConfig, model: &Model<f64>, p: f64) -> Result<Vec<f64>> {
    match &cfg.x0 {
        Some(x) => Ok(x.clone()),
        None => lowest_equilibrium(model, p),
    }
}

fn traj_header(model: &Model<f64>) -> Vec<&'static str> {
    let mut h = vec!["tau"];
    h.extend(model.kind().component_names().iter().copied());
    h.push("P_instantaneous");
    h
}

fn run_simulate(cfg: &RunConfig, model: &Model<f64>, w: &mut Writer) -> Result<()> {
    let t_end = cfg.t_end.unwrap_or(100.0);
    let out_dt = cfg.output_dt.unwrap_or(0.1);
    let x0 = initial_state(cfg, model, model.input())?;
    let tol = cfg.tolerance("int_tol", 1e-10);
    let tr = integrate(model, &x0, (0.0, t_end), &IntegratorOptions::with_tol(tol).record(Record::Every(out_dt)))?;
    let mut t = CsvTable::new(&traj_header(model));
    for (time, s) in tr.times.iter().zip(&tr.states) {
        let mut row = vec![fmt_num(*time)];
        row.extend(s.iter().map(|v| fmt_num(*v)));
        row.push(fmt_num(model.input()));
        t.push(row);
    }
    w.csv("traj.csv", &t)
}

fn noise_spec(cfg: &RunConfig, cmd: Command) -> Result<NoiseSpec> {
    let n = require(&cfg.noise, "noise", cmd)?;
    let spec = NoiseSpec { mean: n.mean, slope: n.slope, std: n.std, seed: cfg.seed };
    spec.validate().map_err(|e| Error::Config { path: "noise".into(), msg: e.to_string() })?;
    Ok(spec)
}

fn sde_options(cfg: &RunConfig) -> Result<SdeOptions> {
    let dt = cfg.dt.unwrap_or(1e-3);
    if dt > 1e-3 {
        return Err(Error::Config { path: "dt".into(), msg: "stochastic steps must not exceed 1e-3".into() });
    }
    let out_dt = cfg.output_dt.unwrap_or(0.1);
    let every = ((out_dt / dt).round() as usize).max(1);
    Ok(SdeOptions { dt, record_every: every, ..SdeOptions::default() })
}

fn sde_table(model: &Model<f64>, tr: &SdeTrajectory) -> CsvTable {
    let mut t = CsvTable::new(&traj_header(model));
    for ((time, s), p) in tr.times.iter().zip(&tr.states).zip(&tr.p_inst) {
        let mut row = vec![fmt_num(*time)];
        row.extend(s.iter().map(|v| fmt_num(*v)));
        row.push(fmt_num(*p));
        t.push(row);
    }
    t
}

fn run_sde(cfg: &RunConfig, model: &Model<f64>, w: &mut Writer) -> Result<()> {
    let noise = noise_spec(cfg, Command::Sde)?;
    let opts = sde_options(cfg)?;
    let x0 = initial_state(cfg, model, noise.mean)?;
    let tr = simulate_sde(model, &x0, &noise, cfg.t_end.unwrap_or(100.0), &opts)?;
    w.csv("traj.csv", &sde_table(model, &tr))
}

fn run_seizure(cfg: &RunConfig, model: &Model<f64>, w: &mut Writer) -> Result<()> {
    let noise = noise_spec(cfg, Command::Seizure)?;
    let opts = sde_options(cfg)?;
    let t_end = cfg.t_end.unwrap_or(1000.0);
    let run = seizure_scenario(model, &noise, t_end, &opts, &SegmentOptions::default())?;
    w.csv("traj.csv", &sde_table(model, &run.trajectory))?;
    let mut t = CsvTable::new(&["time", "amplitude", "is_pds"]);
    for s in &run.spikes.spikes {
        t.push(vec![fmt_num(s.time), fmt_num(s.amplitude), s.is_pds.to_string()]);
    }
    w.csv("spikes.csv", &t)?;
    w.json("phases.json", &json!({ "phases": run.phases, "epochs": run.epochs }))
}

fn run_bands(cfg: &RunConfig, w: &mut Writer) -> Result<()> {
    let input = require(&cfg.input, "input", Command::Bands)?;
    let table = CsvTable::read(&input)?;
    let periods = table.numeric_column("period")?;
    let ps = table.numeric_column("P").unwrap_or_else(|_| vec![f64::NAN; periods.len()]);
    let mut t = CsvTable::new(&["P", "period", "freq_hz", "band"]);
    for (p, per) in ps.iter().zip(&periods) {
        let band: Band = classify_band(*per, TIME_SCALE)?;
        t.push(vec![fmt_num(*p), fmt_num(*per), fmt_num(TIME_SCALE / per), band.as_str().into()]);
    }
    w.csv("bands.csv", &t)
}
