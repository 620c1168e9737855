//! TOML run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::CliError;
use crate::elimination::Order;
use crate::model::{compensating_detuning, PartitionPlan, Preset, Scenario};
use crate::numkernel::{ComplexMatrix, C64};
use crate::picture::ConditionKind;

/// Keyword accepted for the `detuning` parameter of presets that support it.
pub const COMPENSATE: &str = "compensate";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSpec,
    /// Unit for every angular frequency in the file.
    pub delta_ref: f64,
    #[serde(default)]
    pub parameters: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub plan: PlanSpec,
    pub methods: Vec<Method>,
    pub condition: ConditionSpec,
    pub grid: GridSpec,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSpec {
    Preset(String),
    Inline(InlineMatrix),
}

/// A Hermitian matrix given row by row, in units of `delta_ref`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineMatrix {
    pub real: Vec<Vec<f64>>,
    #[serde(default)]
    pub imag: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PlanSpec {
    /// `"default"` or `"alt"`, the splits shipped with a preset.
    Named(String),
    Custom(Vec<CustomPlan>),
}

impl Default for PlanSpec {
    fn default() -> Self {
        PlanSpec::Named("default".into())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomPlan {
    pub name: String,
    pub relevant: Vec<String>,
    /// Irrelevant labels per elimination step, applied in order.
    pub stages: Vec<Vec<String>>,
    /// Order used for every step but the last; defaults to zeroth order.
    #[serde(default)]
    pub inner_order: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Markov0,
    Markov1,
    Markov1d,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Markov0 => "markov0",
            Method::Markov1 => "markov1",
            Method::Markov1d => "markov1d",
        }
    }

    pub fn order(self) -> Option<Order> {
        match self {
            Method::Exact => None,
            Method::Markov0 => Some(Order::M0),
            Method::Markov1 => Some(Order::M1),
            Method::Markov1d => Some(Order::M1D),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ConditionSpec {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_max: f64,
    pub steps: usize,
}

/// A split of the basis, resolved to indices.
#[derive(Debug, Clone)]
pub struct ResolvedPlan {
    pub name: String,
    pub plan: PartitionPlan,
    pub inner_order: Order,
}

impl ResolvedPlan {
    /// Order of each elimination step when the last one uses `last`.
    pub fn orders(&self, last: Order) -> Vec<Order> {
        let mut orders = vec![self.inner_order; self.plan.stages.len()];
        *orders.last_mut().expect("plan has stages") = last;
        orders
    }
}

/// Everything needed to execute a run, validated and in absolute units.
#[derive(Debug, Clone)]
pub struct ResolvedRun {
    pub scenario: Scenario,
    pub plans: Vec<ResolvedPlan>,
    pub methods: Vec<Method>,
    pub conditions: Vec<ConditionKind>,
    pub t_max: f64,
    pub steps: usize,
    pub output: PathBuf,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| config_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        if cfg.output.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.output = dir.join(&cfg.output);
            }
        }
        Ok(cfg)
    }

    /// Numeric value of a preset parameter, before scaling by `delta_ref`.
    pub fn set_parameter(&mut self, name: &str, value: f64) {
        self.parameters.insert(name.to_string(), ParamValue::Number(value));
    }

    fn conditions(&self) -> Result<Vec<ConditionKind>, CliError> {
        let raw = match &self.condition {
            ConditionSpec::One(s) => vec![s.clone()],
            ConditionSpec::Many(v) => v.clone(),
        };
        if raw.is_empty() {
            return Err(config_err("condition list is empty"));
        }
        raw.iter().map(|s| s.parse::<ConditionKind>().map_err(config_err)).collect()
    }

    fn preset_values(&self, preset: Preset) -> Result<Vec<f64>, CliError> {
        let names = preset.params();
        if let Some(extra) = self.parameters.keys().find(|k| !names.contains(&k.as_str())) {
            return Err(config_err(format!(
                "unknown parameter {extra:?} for scenario {} (expected {})",
                preset.name(),
                names.join(", ")
            )));
        }
        let mut values = Vec::with_capacity(names.len());
        let mut compensate = None;
        for (i, name) in names.iter().enumerate() {
            match self.parameters.get(*name) {
                None => return Err(config_err(format!("missing parameter {name:?}"))),
                Some(ParamValue::Number(v)) if v.is_finite() => values.push(v * self.delta_ref),
                Some(ParamValue::Number(v)) => return Err(config_err(format!("parameter {name:?} is {v}"))),
                Some(ParamValue::Keyword(k)) if k == COMPENSATE && *name == "detuning" => {
                    if !preset.has_compensable_detuning() {
                        return Err(config_err(format!("{COMPENSATE:?} is not available for {}", preset.name())));
                    }
                    compensate = Some(i);
                    values.push(0.0);
                }
                Some(ParamValue::Keyword(k)) => {
                    return Err(config_err(format!("parameter {name:?}: expected a number, got {k:?}")))
                }
            }
        }
        if let Some(i) = compensate {
            values[i] = compensating_detuning(values[0], values[1], values[2]);
        }
        Ok(values)
    }

    fn build_scenario(&self) -> Result<Scenario, CliError> {
        match &self.scenario {
            ScenarioSpec::Preset(name) => {
                let preset = Preset::from_name(name).ok_or_else(|| {
                    let known: Vec<_> = Preset::ALL.iter().map(|p| p.name()).collect();
                    config_err(format!("unknown scenario {name:?} (known: {})", known.join(", ")))
                })?;
                let values = self.preset_values(preset)?;
                preset.build(&values).map_err(|source| CliError::Numerical { context: format!("scenario {name}"), source })
            }
            ScenarioSpec::Inline(m) => {
                if !self.parameters.is_empty() {
                    return Err(config_err("parameters are only used with preset scenarios"));
                }
                let d = m.real.len();
                if d < 2 || m.real.iter().any(|r| r.len() != d) {
                    return Err(config_err("inline matrix must be square with dimension >= 2"));
                }
                if let Some(im) = &m.imag {
                    if im.len() != d || im.iter().any(|r| r.len() != d) {
                        return Err(config_err("imag part must have the shape of the real part"));
                    }
                }
                let entries = (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| {
                        let im = m.imag.as_ref().map_or(0.0, |x| x[i][j]);
                        C64::new(m.real[i][j], im) * self.delta_ref
                    })
                    .collect();
                let matrix = ComplexMatrix::from_row_major(d, d, entries).map_err(|e| config_err(e.to_string()))?;
                let labels = match &m.labels {
                    Some(l) if l.len() == d => l.clone(),
                    Some(l) => return Err(config_err(format!("{} labels for dimension {d}", l.len()))),
                    None => (0..d).map(|i| i.to_string()).collect(),
                };
                Ok(Scenario {
                    name: "inline".into(),
                    matrix,
                    labels,
                    // Replaced by the custom plan; an inline scenario has no default split.
                    plan: PartitionPlan::one_shot(vec![], vec![]),
                    alt_plan: None,
                })
            }
        }
    }

    fn resolve_plans(&self, scenario: &Scenario) -> Result<Vec<ResolvedPlan>, CliError> {
        let inline = matches!(self.scenario, ScenarioSpec::Inline(_));
        let plans = match &self.plan {
            PlanSpec::Named(name) if inline => {
                return Err(config_err(format!("inline scenarios need an explicit plan, got {name:?}")))
            }
            PlanSpec::Named(name) if name == "default" => {
                vec![ResolvedPlan { name: "default".into(), plan: scenario.plan.clone(), inner_order: Order::M0 }]
            }
            PlanSpec::Named(name) if name == "alt" => {
                let plan = scenario
                    .alt_plan
                    .clone()
                    .ok_or_else(|| config_err(format!("scenario {} has no alternative plan", scenario.name)))?;
                vec![ResolvedPlan { name: "alt".into(), plan, inner_order: Order::M0 }]
            }
            PlanSpec::Named(name) => return Err(config_err(format!("unknown plan {name:?} (default, alt or a list)"))),
            PlanSpec::Custom(list) => {
                if list.is_empty() {
                    return Err(config_err("plan list is empty"));
                }
                let index = |label: &String| {
                    scenario.label_index(label).ok_or_else(|| config_err(format!("plan refers to unknown state {label:?}")))
                };
                let mut out: Vec<ResolvedPlan> = Vec::new();
                for p in list {
                    if out.iter().any(|q| q.name == p.name) {
                        return Err(config_err(format!("duplicate plan name {:?}", p.name)));
                    }
                    let relevant = p.relevant.iter().map(index).collect::<Result<Vec<_>, _>>()?;
                    let stages = p
                        .stages
                        .iter()
                        .map(|s| s.iter().map(index).collect::<Result<Vec<_>, _>>())
                        .collect::<Result<Vec<_>, _>>()?;
                    let inner_order = match &p.inner_order {
                        None => Order::M0,
                        Some(s) => s.parse().map_err(|e: crate::Error| config_err(e.to_string()))?,
                    };
                    out.push(ResolvedPlan { name: p.name.clone(), plan: PartitionPlan::new(relevant, stages), inner_order });
                }
                out
            }
        };
        for p in &plans {
            p.plan.validate(scenario.dim()).map_err(|e| config_err(format!("plan {}: {e}", p.name)))?;
        }
        Ok(plans)
    }

    /// Validates the configuration and builds the scenario in absolute units.
    pub fn resolve(&self) -> Result<ResolvedRun, CliError> {
        if !(self.delta_ref.is_finite() && self.delta_ref > 0.0) {
            return Err(config_err(format!("delta_ref must be positive, got {}", self.delta_ref)));
        }
        if self.methods.is_empty() {
            return Err(config_err("methods must not be empty"));
        }
        let mut methods = self.methods.clone();
        methods.sort();
        methods.dedup();
        if !(self.grid.t_max.is_finite() && self.grid.t_max > 0.0) {
            return Err(config_err(format!("grid.t_max must be positive, got {}", self.grid.t_max)));
        }
        if self.grid.steps < 2 {
            return Err(config_err(format!("grid.steps must be at least 2, got {}", self.grid.steps)));
        }
        let conditions = self.conditions()?;
        let scenario = self.build_scenario()?;
        let plans = self.resolve_plans(&scenario)?;
        Ok(ResolvedRun {
            scenario,
            plans,
            methods,
            conditions,
            t_max: self.grid.t_max,
            steps: self.grid.steps,
            output: self.output.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG3: &str = r#"
scenario = "lambda"
delta_ref = 1.0
methods = ["exact", "markov0", "markov1"]
condition = "a"
output = "out/fig3"

[parameters]
omega0 = 0.4
omega1 = 0.3
delta = 1.0
detuning = "compensate"

[grid]
t_max = 120.0
steps = 12000
"#;

    #[test]
    fn parses_preset_config() {
        let run = RunConfig::from_toml(FIG3).unwrap().resolve().unwrap();
        assert_eq!(run.methods, vec![Method::Exact, Method::Markov0, Method::Markov1]);
        assert_eq!(run.plans.len(), 1);
        let det = run.scenario.matrix[(1, 1)].re - run.scenario.matrix[(0, 0)].re;
        assert!((det - (0.09 - 0.16) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = FIG3.replace("condition = \"a\"", "condition = \"a\"\nconditon = \"b\"");
        assert!(matches!(RunConfig::from_toml(&bad), Err(CliError::Config(_))));
        let bad = FIG3.replace("omega1 = 0.3", "omega1 = 0.3\nomega9 = 1.0");
        assert!(RunConfig::from_toml(&bad).unwrap().resolve().is_err());
    }

    #[test]
    fn empty_methods_and_bad_grid() {
        let cfg = RunConfig::from_toml(&FIG3.replace(r#"["exact", "markov0", "markov1"]"#, "[]")).unwrap();
        assert!(matches!(cfg.resolve(), Err(CliError::Config(_))));
        let cfg = RunConfig::from_toml(&FIG3.replace("steps = 12000", "steps = 1")).unwrap();
        assert!(cfg.resolve().is_err());
    }

    #[test]
    fn delta_ref_scales_frequencies() {
        let cfg = RunConfig::from_toml(&FIG3.replace("delta_ref = 1.0", "delta_ref = 2.0")).unwrap();
        let run = cfg.resolve().unwrap();
        assert!((run.scenario.matrix[(2, 2)].re - 2.0).abs() < 1e-15);
        assert!((run.scenario.matrix[(0, 2)].re - 0.4).abs() < 1e-15);
    }

    #[test]
    fn inline_matrix_with_custom_plan() {
        let text = r#"
scenario = { real = [[0.0, 0.0, 0.2], [0.0, 0.0, 0.15], [0.2, 0.15, 1.0]], labels = ["a", "b", "c"] }
delta_ref = 1.0
methods = ["markov1"]
condition = ["a", "fixed:0.5"]
output = "x"
plan = [{ name = "p", relevant = ["a", "b"], stages = [["c"]] }]
[grid]
t_max = 1.0
steps = 10
"#;
        let run = RunConfig::from_toml(text).unwrap().resolve().unwrap();
        assert_eq!(run.conditions, vec![ConditionKind::TraceZero, ConditionKind::Fixed(0.5)]);
        assert_eq!(run.plans[0].plan.relevant, vec![0, 1]);
        assert_eq!(run.plans[0].orders(Order::M1), vec![Order::M1]);
    }
}
