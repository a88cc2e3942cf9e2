//! Declarative experiment files: a single self-describing JSON document per
//! scenario, archived alongside its outputs. CLI flags only select the
//! subcommand and file paths.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use selmut_core::{FamilySpec, FitnessModel, Measure, StoppingRule};

/// Output files a scenario can declare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    TrajectoryCsv,
    LimitJson,
    DiagnosticsCsv,
    ChecksJson,
}

impl OutputKind {
    pub fn file_name(self) -> &'static str {
        match self {
            OutputKind::TrajectoryCsv => "trajectory.csv",
            OutputKind::LimitJson => "limit.json",
            OutputKind::DiagnosticsCsv => "diagnostics.csv",
            OutputKind::ChecksJson => "checks.json",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MeasureSpec {
    Atoms {
        atoms: Vec<AtomSpec>,
    },
    Family {
        #[serde(flatten)]
        family: FamilySpec,
        n: usize,
    },
}

#[derive(Debug, Deserialize)]
struct AtomSpec {
    x: f64,
    m: f64,
}

impl MeasureSpec {
    fn resolve(&self, field: &str) -> Result<Measure> {
        let measure = match self {
            MeasureSpec::Atoms { atoms } => {
                Measure::from_atoms(atoms.iter().map(|a| (a.x, a.m)))
                    .with_context(|| format!("invalid atoms in `{field}`"))?
            }
            MeasureSpec::Family { family, n } => family
                .discretize(*n)
                .with_context(|| format!("invalid family in `{field}`"))?,
        };
        if !measure.is_probability() {
            bail!(
                "`{field}` must resolve to a probability measure, got total mass {}",
                measure.total_mass()
            );
        }
        Ok(measure)
    }
}

#[derive(Debug, Deserialize)]
struct StopSpec {
    max_iterations: Option<usize>,
    tv_tolerance: Option<f64>,
}

/// Verification battery sizes; the defaults match the standard suite.
#[derive(Debug, Clone, Deserialize)]
#[serde(default)]
pub struct VerifySpec {
    pub pairs: usize,
    pub coupling_pairs: usize,
    pub coupling_steps: usize,
    pub recursion_scenarios: usize,
    pub recursion_steps: usize,
    /// Truncation points as fractions of M for the weak-continuity check.
    pub a_fractions: Vec<f64>,
    pub final_levy_bound: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        VerifySpec {
            pairs: 1000,
            coupling_pairs: 100,
            coupling_steps: 200,
            recursion_scenarios: 50,
            recursion_steps: 200,
            a_fractions: vec![0.9, 0.99, 0.999],
            final_levy_bound: 0.002,
        }
    }
}

#[derive(Debug, Deserialize)]
struct ScenarioFile {
    model: FitnessModel,
    beta: f64,
    p0: MeasureSpec,
    q: MeasureSpec,
    stop: Option<StopSpec>,
    seed: Option<u64>,
    outputs: Option<Vec<OutputKind>>,
    verify: Option<VerifySpec>,
}

/// A fully validated scenario with all defaults resolved.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub model: FitnessModel,
    pub beta: f64,
    pub p0: Measure,
    pub q: Measure,
    pub stop: StoppingRule,
    pub seed: u64,
    /// Declared outputs; empty means "everything the subcommand produces".
    pub outputs: Vec<OutputKind>,
    pub verify: VerifySpec,
}

pub fn parse_scenario(path: &Path) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read scenario file {}", path.display()))?;
    parse_scenario_str(&text).with_context(|| format!("in scenario {}", path.display()))
}

pub fn parse_scenario_str(text: &str) -> Result<ScenarioConfig> {
    let file: ScenarioFile =
        serde_json::from_str(text).context("scenario does not match the schema")?;

    if !(file.beta > 0.0 && file.beta < 1.0) {
        bail!("beta must lie in (0,1), got {}", file.beta);
    }
    file.model.validate().context("invalid model")?;

    let p0 = file.p0.resolve("p0")?;
    let q = file.q.resolve("q")?;

    let defaults = StoppingRule::default();
    let stop = match file.stop {
        Some(s) => StoppingRule::new(
            s.max_iterations.unwrap_or(defaults.max_iterations),
            s.tv_tolerance.unwrap_or(defaults.tv_tolerance),
        )
        .context("invalid stop rule")?,
        None => defaults,
    };

    Ok(ScenarioConfig {
        model: file.model,
        beta: file.beta,
        p0,
        q,
        stop,
        seed: file.seed.unwrap_or(0),
        outputs: file.outputs.unwrap_or_default(),
        verify: file.verify.unwrap_or_default(),
    })
}

/// Informal schema of the scenario file, printed by `selmut schema`.
pub const SCHEMA: &str = r#"{
  "model": "{\"kind\": \"kingman\"} or {\"kind\": \"lenski\", \"gamma\": <number > 1>}",
  "beta": "mutation probability, number in (0,1)",
  "p0": "initial type distribution: {\"atoms\": [{\"x\": <loc>, \"m\": <mass>}, ...]} or {\"family\": \"uniform\"|\"power\"|\"truncated-exponential\", <params>, \"n\": <atom count>}",
  "q": "mutant type distribution, same forms as p0",
  "stop": "optional: {\"max_iterations\": <int, default 100000>, \"tv_tolerance\": <number, default 1e-12>}",
  "seed": "optional: integer seed for the verification suites, default 0",
  "outputs": "optional: subset of [\"trajectory_csv\", \"limit_json\", \"diagnostics_csv\", \"checks_json\"]; empty means everything the subcommand produces",
  "verify": "optional: {\"pairs\": 1000, \"coupling_pairs\": 100, \"coupling_steps\": 200, \"recursion_scenarios\": 50, \"recursion_steps\": 200, \"a_fractions\": [0.9, 0.99, 0.999], \"final_levy_bound\": 0.002}",
  "family params": {
    "uniform": "lo, hi",
    "power": "k (density ~ x^k), lo, hi",
    "truncated-exponential": "rate (density ~ e^{-rate x}), lo, hi"
  }
}"#;
