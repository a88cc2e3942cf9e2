//! Fitness models: the linear (Kingman) fitness `x` and the daily-cycle
//! (Lenski) fitness `e^{t_u x}`, together with the selective advantage
//! `s(x, u) = w(x, u) / ∫ w(y, u) u(dy)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::solve::{bisect, RootSolve};

/// Mean fitness below this floor is treated as exactly zero and routed to
/// the degenerate branch of the recursion.
pub const MEAN_FITNESS_FLOOR: f64 = 1e-300;

/// Absolute residual target for the cycle-time equation `∫e^{tx}u(dx) = γ`.
const CYCLE_RESIDUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FitnessModel {
    /// Fitness `x ↦ x`.
    Kingman,
    /// Fitness `x ↦ e^{t_u x}` where `t_u` solves `∫ e^{t_u x} u(dx) = γ`;
    /// `gamma > 1` is the daily growth capacity.
    Lenski { gamma: f64 },
}

impl FitnessModel {
    pub fn lenski(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma <= 1.0 {
            return Err(Error::InvalidGamma(gamma));
        }
        Ok(FitnessModel::Lenski { gamma })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FitnessModel::Kingman => Ok(()),
            FitnessModel::Lenski { gamma } => {
                if gamma > 1.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidGamma(gamma))
                }
            }
        }
    }

    pub fn is_lenski(&self) -> bool {
        matches!(self, FitnessModel::Lenski { .. })
    }

    /// Evaluates the model once against a population `u`, solving the cycle
    /// time for Lenski. Fails with [`Error::DegeneratePopulation`] when the
    /// mean fitness is (effectively) zero, which callers map to the
    /// degenerate branch of the recursion.
    pub fn evaluate(&self, u: &Measure) -> Result<FitnessEval> {
        self.validate()?;
        match *self {
            FitnessModel::Kingman => {
                let mean = u.mean();
                if mean < MEAN_FITNESS_FLOOR {
                    return Err(Error::DegeneratePopulation);
                }
                Ok(FitnessEval::Kingman { mean })
            }
            FitnessModel::Lenski { gamma } => {
                let solve = solve_cycle_time(u, gamma)?;
                let mean = u.exp_moment(solve.value)?;
                Ok(FitnessEval::Lenski {
                    cycle_time: solve.value,
                    mean,
                })
            }
        }
    }
}

/// Per-population fitness evaluation: the cycle time (Lenski) is solved once
/// per measure and reused for every atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitnessEval {
    Kingman { mean: f64 },
    Lenski { cycle_time: f64, mean: f64 },
}

impl FitnessEval {
    /// `w(x, u)`.
    pub fn weight(&self, x: f64) -> f64 {
        match *self {
            FitnessEval::Kingman { .. } => x,
            FitnessEval::Lenski { cycle_time, .. } => (cycle_time * x).exp(),
        }
    }

    /// `∫ w(x, u) u(dx)`. For Lenski this equals γ up to the cycle-time
    /// residual.
    pub fn mean_fitness(&self) -> f64 {
        match *self {
            FitnessEval::Kingman { mean } | FitnessEval::Lenski { mean, .. } => mean,
        }
    }

    /// Selective advantage `s(x, u) = w(x, u) / ∫ w u`.
    pub fn advantage(&self, x: f64) -> f64 {
        self.weight(x) / self.mean_fitness()
    }

    pub fn cycle_time(&self) -> Option<f64> {
        match *self {
            FitnessEval::Kingman { .. } => None,
            FitnessEval::Lenski { cycle_time, .. } => Some(cycle_time),
        }
    }
}

/// Solves the cycle-time equation `∫ e^{t x} u(dx) = γ` to a reported
/// residual, bracketing by doubling from `[0, 1]` and bisecting.
///
/// `t > 0` always, since the exp moment is 1 at `t = 0` and `γ > 1`.
pub fn solve_cycle_time(u: &Measure, gamma: f64) -> Result<RootSolve> {
    if !gamma.is_finite() || gamma <= 1.0 {
        return Err(Error::InvalidGamma(gamma));
    }
    if !u.is_probability() {
        return Err(Error::NotProbability {
            total_mass: u.total_mass(),
        });
    }
    if !u.atoms().iter().any(|a| a.location > 0.0) {
        // exp moment is identically 1: the population never reaches capacity
        return Err(Error::DegeneratePopulation);
    }

    let mut hi = 1.0;
    while u.exp_moment(hi)? < gamma {
        hi *= 2.0;
    }
    let solve = bisect(
        0.0,
        hi,
        |t| u.exp_moment(t).ok().map(|e| e - gamma),
        -1.0, // exp_moment(u, 0) = 1 < gamma
        false,
        CYCLE_RESIDUAL_TOL,
    )?;
    if solve.residual > 1e-10 * gamma {
        return Err(Error::BracketFailure(format!(
            "cycle time residual {} exceeds 1e-10 * gamma",
            solve.residual
        )));
    }
    Ok(solve)
}

/// The cycle time `t_u` itself.
pub fn lenski_time(u: &Measure, gamma: f64) -> Result<f64> {
    solve_cycle_time(u, gamma).map(|s| s.value)
}

/// `w(x, u)` under `model`.
pub fn fitness_weight(model: &FitnessModel, x: f64, u: &Measure) -> Result<f64> {
    match model {
        FitnessModel::Kingman => Ok(x),
        FitnessModel::Lenski { .. } => Ok(model.evaluate(u)?.weight(x)),
    }
}

/// `∫ w(x, u) u(dx)` under `model`. Returns 0 for a Kingman population with
/// all mass at 0 (the degenerate-branch sentinel); Lenski propagates
/// [`Error::DegeneratePopulation`] since no cycle time exists there.
pub fn mean_fitness(model: &FitnessModel, u: &Measure) -> Result<f64> {
    match model {
        FitnessModel::Kingman => Ok(u.mean()),
        FitnessModel::Lenski { .. } => Ok(model.evaluate(u)?.mean_fitness()),
    }
}

/// `s(x, u) = w(x, u) / ∫ w u`; errors when the mean fitness vanishes so the
/// caller can take the degenerate branch.
pub fn selective_advantage(model: &FitnessModel, x: f64, u: &Measure) -> Result<f64> {
    Ok(model.evaluate(u)?.advantage(x))
}
