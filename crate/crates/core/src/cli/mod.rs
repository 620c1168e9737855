//! Configuration-driven front end: runs, sweeps and the closed-form table check.

pub mod config;
pub mod table1;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::dynamics::{
    compare_trajectories, evolve_effective, evolve_exact, rabi_effective, rabi_exact_relevant, ComparisonReport, TimeGrid,
    Trajectory,
};
use crate::error::Error;
use crate::model::Preset;
use crate::numkernel::{C64, ZERO};
use crate::picture::{effective_for_plan, ConditionKind};

pub use config::{Method, ResolvedPlan, ResolvedRun, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Io(String),
    #[error("numerical error in {context}: {source}")]
    Numerical { context: String, source: Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => EXIT_CONFIG,
            CliError::Numerical { .. } => EXIT_NUMERICAL,
        }
    }
}

fn numerical(context: impl Into<String>) -> impl FnOnce(Error) -> CliError {
    move |source| CliError::Numerical { context: context.into(), source }
}

fn condition_tag(c: ConditionKind) -> String {
    match c {
        ConditionKind::Fixed(v) => format!("fixed{v}"),
        other => other.to_string(),
    }
}

/// One output file of a run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub method: Method,
    pub plan: Option<String>,
    pub condition: Option<ConditionKind>,
    pub shift: f64,
    pub rabi: Option<f64>,
    pub comparison: Option<ComparisonReport>,
    pub path: PathBuf,
}

/// Writes `t,<label>_pop,...` with 17 significant digits.
pub fn write_populations_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let header: Vec<String> = std::iter::once("t".to_string()).chain(traj.labels.iter().map(|l| format!("{l}_pop"))).collect();
    w.write_record(&header).map_err(io)?;
    for (t, pops) in traj.times.iter().zip(&traj.populations) {
        let row: Vec<String> = std::iter::once(t).chain(pops).map(|v| format!("{v:.16e}")).collect();
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn output_path(prefix: &Path, tag: &str) -> PathBuf {
    let stem = prefix.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    prefix.with_file_name(format!("{stem}_{tag}.csv"))
}

fn prepare_output_dir(prefix: &Path) -> Result<(), CliError> {
    match prefix.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
        }
        _ => Ok(()),
    }
}

/// Initial state: all population in the first relevant state of the first plan.
pub fn initial_state(run: &ResolvedRun) -> Vec<C64> {
    let mut psi = vec![ZERO; run.scenario.dim()];
    psi[run.plans[0].plan.relevant[0]] = C64::new(1.0, 0.0);
    psi
}

/// Executes a resolved run, writing one CSV per trajectory.
pub fn run(cfg: &RunConfig) -> Result<Vec<RunRecord>, CliError> {
    let run = cfg.resolve()?;
    let grid = TimeGrid::new(run.t_max, run.steps).map_err(|e| CliError::Config(e.to_string()))?;
    prepare_output_dir(&run.output)?;
    let psi0 = initial_state(&run);
    let s = &run.scenario;
    let mut records = Vec::new();

    let exact = if run.methods.contains(&Method::Exact) {
        let mut traj = evolve_exact(&s.matrix, &s.labels, &psi0, &grid).map_err(numerical("exact"))?;
        if run.plans[0].plan.relevant.len() >= 2 {
            traj.rabi = Some(rabi_exact_relevant(&s.matrix, &run.plans[0].plan.relevant).map_err(numerical("exact"))?);
        }
        let path = output_path(&run.output, "exact");
        write_populations_csv(&path, &traj)?;
        records.push(RunRecord {
            method: Method::Exact,
            plan: None,
            condition: None,
            shift: 0.0,
            rabi: traj.rabi,
            comparison: None,
            path,
        });
        Some(traj)
    } else {
        None
    };

    let many_plans = run.plans.len() > 1;
    for plan in &run.plans {
        for &method in &run.methods {
            let Some(order) = method.order() else { continue };
            for &cond in &run.conditions {
                let context = format!("{}/{} (plan {})", method.name(), cond, plan.name);
                let model = effective_for_plan(&s.matrix, &s.labels, &plan.plan, &plan.orders(order), cond)
                    .map_err(numerical(&context))?;
                let traj = evolve_effective(&model, &psi0, &grid).map_err(numerical(&context))?;
                let mut tag = format!("{}_{}", method.name(), condition_tag(cond));
                if many_plans {
                    tag = format!("{tag}_{}", plan.name);
                }
                let path = output_path(&run.output, &tag);
                write_populations_csv(&path, &traj)?;
                let comparison =
                    exact.as_ref().map(|e| compare_trajectories(e, &traj)).transpose().map_err(numerical(&context))?;
                records.push(RunRecord {
                    method,
                    plan: Some(plan.name.clone()),
                    condition: Some(cond),
                    shift: model.shift(),
                    rabi: traj.rabi,
                    comparison,
                    path,
                });
            }
        }
    }
    Ok(records)
}

fn opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.prec$e}"))
}

/// Plain-text summary of a run. Rabi frequencies are smallest adjacent gaps:
/// of the effective spectrum, and for the exact row of the eigenstates with
/// the most weight on the relevant states.
pub fn summary_table(records: &[RunRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<9} {:<10} {:<12} {:>13} {:>13} {:>11} {:>11} {:>11}  file",
        "method", "plan", "condition", "shift", "rabi", "rabi_rel", "max_dpop", "rms_dpop"
    );
    for r in records {
        let cmp = r.comparison.as_ref();
        let _ = writeln!(
            out,
            "{:<9} {:<10} {:<12} {:>13.6e} {:>13} {:>11} {:>11} {:>11}  {}",
            r.method.name(),
            r.plan.as_deref().unwrap_or("-"),
            r.condition.map_or_else(|| "-".to_string(), |c| c.to_string()),
            r.shift,
            opt(r.rabi, 6),
            opt(cmp.and_then(|c| c.rabi_relative), 3),
            opt(cmp.map(ComparisonReport::worst_max), 3),
            opt(cmp.map(ComparisonReport::worst_rms), 3),
            r.path.display()
        );
    }
    out
}

/// One line of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub method: Method,
    pub plan: String,
    pub condition: String,
    pub rabi: Option<f64>,
    pub rel_error: Option<f64>,
    /// `ok`, or `error:<kind>` for a point that failed.
    pub status: String,
}

fn sweep_point(cfg: &RunConfig, param: &str, value: f64) -> Vec<SweepRow> {
    let mut cfg = cfg.clone();
    cfg.set_parameter(param, value);
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let run = match cfg.resolve() {
        Ok(r) => r,
        Err(e) => {
            let status = match &e {
                CliError::Numerical { source, .. } => format!("error:{}", source.kind()),
                _ => "error:invalid_point".to_string(),
            };
            return methods
                .into_iter()
                .map(|method| SweepRow {
                    value,
                    method,
                    plan: "-".into(),
                    condition: "-".into(),
                    rabi: None,
                    rel_error: None,
                    status: status.clone(),
                })
                .collect();
        }
    };
    let s = &run.scenario;
    let exact = rabi_exact_relevant(&s.matrix, &run.plans[0].plan.relevant);
    let rel = |r: f64| exact.as_ref().ok().filter(|e| **e != 0.0).map(|e| (r - e) / e);
    let mut rows = Vec::new();
    for &method in &run.methods {
        match method.order() {
            None => rows.push(match &exact {
                Ok(r) => SweepRow {
                    value,
                    method,
                    plan: "-".into(),
                    condition: "-".into(),
                    rabi: Some(*r),
                    rel_error: Some(0.0),
                    status: "ok".into(),
                },
                Err(e) => SweepRow {
                    value,
                    method,
                    plan: "-".into(),
                    condition: "-".into(),
                    rabi: None,
                    rel_error: None,
                    status: format!("error:{}", e.kind()),
                },
            }),
            Some(order) => {
                for plan in &run.plans {
                    for &cond in &run.conditions {
                        let result = effective_for_plan(&s.matrix, &s.labels, &plan.plan, &plan.orders(order), cond)
                            .and_then(|m| rabi_effective(&m));
                        let (rabi, rel_error, status) = match result {
                            Ok(r) => (Some(r), rel(r), "ok".to_string()),
                            Err(e) => (None, None, format!("error:{}", e.kind())),
                        };
                        rows.push(SweepRow {
                            value,
                            method,
                            plan: plan.name.clone(),
                            condition: cond.to_string(),
                            rabi,
                            rel_error,
                            status,
                        });
                    }
                }
            }
        }
    }
    rows
}

/// Evaluates Rabi frequencies over `points` equally spaced values of a preset
/// parameter. Points run in parallel; failing points yield tagged rows.
pub fn sweep(cfg: &RunConfig, param: &str, from: f64, to: f64, points: usize) -> Result<Vec<SweepRow>, CliError> {
    cfg.resolve()?;
    let config::ScenarioSpec::Preset(name) = &cfg.scenario else {
        return Err(CliError::Config("sweeps need a preset scenario".into()));
    };
    let preset = Preset::from_name(name).expect("validated by resolve");
    if !preset.params().contains(&param) {
        return Err(CliError::Config(format!("{param:?} is not a parameter of {name} ({})", preset.params().join(", "))));
    }
    if points == 0 || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Config("sweep needs finite bounds and at least one point".into()));
    }
    let (lo, hi) = if from <= to { (from, to) } else { (to, from) };
    let values: Vec<f64> =
        if points == 1 { vec![lo] } else { (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect() };
    let rows: Vec<Vec<SweepRow>> = values.par_iter().map(|&v| sweep_point(cfg, param, v)).collect();
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_sweep_csv(path: &Path, param: &str, rows: &[SweepRow]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    prepare_output_dir(path)?;
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record([param, "method", "plan", "condition", "rabi", "rel_error", "status"]).map_err(io)?;
    let num = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x:.16e}"));
    for r in rows {
        w.write_record([
            format!("{:.16e}", r.value),
            r.method.name().to_string(),
            r.plan.clone(),
            r.condition.clone(),
            num(r.rabi),
            num(r.rel_error),
            r.status.clone(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Default sweep output: `<output>_sweep_<param>.csv`.
pub fn sweep_output_path(cfg: &RunConfig, param: &str) -> PathBuf {
    output_path(&cfg.output, &format!("sweep_{param}"))
}

pub fn list_scenarios() -> String {
    let mut out = String::new();
    for p in Preset::ALL {
        let _ = writeln!(out, "{:<11} {}", p.name(), p.description());
        let _ = writeln!(out, "{:<11} parameters: {}", "", p.params().join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path, methods: &str, condition: &str) -> RunConfig {
        let text = format!(
            r#"
scenario = "lambda"
delta_ref = 1.0
methods = {methods}
condition = {condition}
output = "{}"
[parameters]
omega0 = 0.4
omega1 = 0.3
delta = 1.0
detuning = "compensate"
[grid]
t_max = 20.0
steps = 200
"#,
            dir.join("out/run").display()
        );
        RunConfig::from_toml(&text).unwrap()
    }

    #[test]
    fn run_writes_one_file_per_method() {
        let dir = tempfile::tempdir().unwrap();
        let records = run(&config(dir.path(), r#"["markov1", "exact", "markov0"]"#, r#""a""#)).unwrap();
        assert_eq!(records.len(), 3);
        for r in &records {
            assert!(r.path.exists());
            assert_eq!(r.shift, 0.0);
        }
        let text = std::fs::read_to_string(&records[0].path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,g_pop,t_pop,e_pop");
        assert_eq!(lines.count(), 201);
        assert!(summary_table(&records).contains("markov1"));
    }

    #[test]
    fn csv_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), r#"["markov1d"]"#, r#""b""#);
        let a = std::fs::read(&run(&cfg).unwrap()[0].path).unwrap();
        let b = std::fs::read(&run(&cfg).unwrap()[0].path).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn singular_shift_is_numerical_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = run(&config(dir.path(), r#"["markov0"]"#, r#""fixed:-1.0""#)).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_NUMERICAL);
        assert!(err.to_string().contains("stage 0"), "{err}");
    }

    #[test]
    fn sweep_isolates_failures() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), r#"["exact", "markov0"]"#, r#""fixed:-1.0""#);
        // delta = 1 makes the fixed shift singular; the other points are fine.
        let rows = sweep(&cfg, "delta", 0.5, 1.5, 3).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!(rows[3].status, "error:singular_block");
        assert!(rows.iter().enumerate().filter(|(i, _)| *i != 3).all(|(_, r)| r.status == "ok"));
        assert!(sweep(&cfg, "omega7", 0.0, 1.0, 2).is_err());
    }

    #[test]
    fn sweep_error_grows_with_coupling() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), r#"["markov1"]"#, r#""a""#);
        let rows = sweep(&cfg, "omega0", 0.1, 0.5, 5).unwrap();
        let errs: Vec<f64> = rows.iter().map(|r| r.rel_error.unwrap().abs()).collect();
        assert!(errs.last() > errs.first());
    }
}
