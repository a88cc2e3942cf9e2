//! The selection–mutation recursion
//! `p_i = (1-β) s(x, p_{i-1}) p_{i-1} + β q`, its degenerate branch, the
//! upper-support normalization ("Convention (*)"), and trajectory execution
//! with per-step diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::FitnessModel;
use crate::measure::{total_variation, union_walk, Atom, Measure};

/// When to stop iterating: after `max_iterations` steps, or as soon as the
/// total variation between consecutive states drops under `tv_tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub max_iterations: usize,
    pub tv_tolerance: f64,
}

impl StoppingRule {
    pub fn new(max_iterations: usize, tv_tolerance: f64) -> Result<Self> {
        if max_iterations < 1 {
            return Err(Error::InvalidStoppingRule(
                "max_iterations must be at least 1".into(),
            ));
        }
        if !tv_tolerance.is_finite() || tv_tolerance <= 0.0 {
            return Err(Error::InvalidStoppingRule(format!(
                "tv_tolerance must be positive and finite, got {tv_tolerance}"
            )));
        }
        Ok(StoppingRule {
            max_iterations,
            tv_tolerance,
        })
    }
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            max_iterations: 100_000,
            tv_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Converged,
    MaxIterations,
}

/// Diagnostics for the step taking `p_{i-1}` to `p_i`, computed on the raw
/// (pre-renormalization) output so the recursion is observable as written.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub iteration: usize,
    /// Total variation between `p_{i-1}` and the raw `p_i`.
    pub tv_delta: f64,
    /// `∫ w(x, p_{i-1}) p_{i-1}(dx)`; 0 on the degenerate branch.
    pub mean_fitness: f64,
    /// Raw `p_i({M})` for the ambient bound `M`.
    pub atom_mass_at_m: f64,
    /// Cycle time `t_{p_{i-1}}` (Lenski only).
    pub cycle_time: Option<f64>,
}

/// A trajectory run. By default only the endpoints and the diagnostic series
/// are kept; the full state history is opt-in via
/// [`iterate_with_history`].
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub initial: Measure,
    pub last: Measure,
    /// The state before `last`; `None` when no step ran.
    pub previous: Option<Measure>,
    /// Full `p_0 ... p_n` when history was requested.
    pub history: Option<Vec<Measure>>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub stop_reason: StopReason,
    /// Ambient bound `M = max(m_{p_0}, m_q)` whose atom mass is tracked.
    pub ambient: f64,
}

impl Trajectory {
    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.diagnostics.len()
    }

    pub fn final_state(&self) -> &Measure {
        &self.last
    }

    /// Diagnostics as CSV with columns
    /// `iteration,tv_delta,mean_fitness,atom_mass_at_M,cycle_time`
    /// (cycle_time left empty for Kingman).
    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from("iteration,tv_delta,mean_fitness,atom_mass_at_M,cycle_time\n");
        for d in &self.diagnostics {
            let t = d.cycle_time.map(|t| t.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                d.iteration, d.tv_delta, d.mean_fitness, d.atom_mass_at_m, t
            ));
        }
        out
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidBeta(beta));
    }
    Ok(())
}

struct RawStep {
    raw: Measure,
    mean_fitness: f64,
    cycle_time: Option<f64>,
}

/// One application of the recursion without renormalization.
fn step_raw(model: &FitnessModel, p: &Measure, q: &Measure, beta: f64) -> Result<RawStep> {
    check_beta(beta)?;
    let eval = match model.evaluate(p) {
        Ok(eval) => Some(eval),
        Err(Error::DegeneratePopulation) => None,
        Err(e) => return Err(e),
    };

    let mut atoms = Vec::with_capacity(p.len() + q.len());
    for (x, pm, qm) in union_walk(p, q) {
        let selected = match &eval {
            Some(eval) => eval.advantage(x) * pm,
            None => pm, // degenerate branch: p_i = (1-β) p_{i-1} + β q
        };
        let mass = (1.0 - beta) * selected + beta * qm;
        if mass > 0.0 {
            atoms.push(Atom { location: x, mass });
        }
    }
    Ok(RawStep {
        raw: Measure::from_sorted_unchecked(atoms),
        mean_fitness: eval.map_or(0.0, |e| e.mean_fitness()),
        cycle_time: eval.and_then(|e| e.cycle_time()),
    })
}

/// One step of the recursion, renormalized so the total mass is exactly 1.
pub fn step(model: &FitnessModel, p: &Measure, q: &Measure, beta: f64) -> Result<Measure> {
    step_raw(model, p, q, beta)?.raw.normalized()
}

/// Result of enforcing Convention (*): `m_q ≤ m_{p_0}` with `M = m_{p_0}`.
#[derive(Debug, Clone)]
pub struct ConventionStar {
    pub p0: Measure,
    pub q: Measure,
    /// `M = m_{p_0}` after enforcement.
    pub ambient: f64,
    /// Whether `p_0` was replaced by one application of the step.
    pub rewrote: bool,
}

/// Enforces Convention (*): when `m_q > m_{p_0}`, replaces `p_0` by `p_1`
/// (one application of the recursion), after which `m_q ≤ m_{p_0}` holds and
/// the ambient bound is `M = m_{p_0}`.
pub fn apply_convention_star(
    model: &FitnessModel,
    p0: &Measure,
    q: &Measure,
    beta: f64,
) -> Result<ConventionStar> {
    check_beta(beta)?;
    let m_p0 = p0.upper_support().ok_or(Error::EmptyMeasure)?;
    let m_q = q.upper_support().ok_or(Error::EmptyMeasure)?;
    if m_q <= m_p0 {
        return Ok(ConventionStar {
            p0: p0.clone(),
            q: q.clone(),
            ambient: m_p0,
            rewrote: false,
        });
    }
    let p1 = step(model, p0, q, beta)?;
    let ambient = p1.upper_support().expect("step output is nonempty");
    Ok(ConventionStar {
        p0: p1,
        q: q.clone(),
        ambient,
        rewrote: true,
    })
}

fn run(
    model: &FitnessModel,
    p0: &Measure,
    q: &Measure,
    beta: f64,
    stop: StoppingRule,
    keep_history: bool,
) -> Result<Trajectory> {
    check_beta(beta)?;
    let m_p0 = p0.upper_support().ok_or(Error::EmptyMeasure)?;
    let m_q = q.upper_support().ok_or(Error::EmptyMeasure)?;
    let ambient = m_p0.max(m_q);

    let mut history = keep_history.then(|| vec![p0.clone()]);
    let mut diagnostics = Vec::new();
    let mut previous: Option<Measure> = None;
    let mut current = p0.clone();
    let mut stop_reason = StopReason::MaxIterations;

    for iteration in 1..=stop.max_iterations {
        let stepped = step_raw(model, &current, q, beta)?;
        let tv_delta = total_variation(&current, &stepped.raw);
        diagnostics.push(StepDiagnostics {
            iteration,
            tv_delta,
            mean_fitness: stepped.mean_fitness,
            atom_mass_at_m: stepped.raw.mass_at(ambient),
            cycle_time: stepped.cycle_time,
        });
        let next = stepped.raw.normalized()?;
        if let Some(h) = history.as_mut() {
            h.push(next.clone());
        }
        previous = Some(std::mem::replace(&mut current, next));
        if tv_delta < stop.tv_tolerance {
            stop_reason = StopReason::Converged;
            break;
        }
    }

    Ok(Trajectory {
        initial: p0.clone(),
        last: current,
        previous,
        history,
        diagnostics,
        stop_reason,
        ambient,
    })
}

/// Iterates the recursion from `p_0`, recording only the endpoints and the
/// diagnostic series. Expects Convention (*) to have been applied.
pub fn iterate(
    model: &FitnessModel,
    p0: &Measure,
    q: &Measure,
    beta: f64,
    stop: StoppingRule,
) -> Result<Trajectory> {
    run(model, p0, q, beta, stop, false)
}

/// Like [`iterate`] but retains every state `p_0 ... p_n`.
pub fn iterate_with_history(
    model: &FitnessModel,
    p0: &Measure,
    q: &Measure,
    beta: f64,
    stop: StoppingRule,
) -> Result<Trajectory> {
    run(model, p0, q, beta, stop, true)
}
