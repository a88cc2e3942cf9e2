//! Machine-checkable embodiments of the model assumptions and of the
//! scalar recursions used in the convergence arguments: monotonicity of the
//! selective advantage under mass transport to the top type (assumption 1),
//! the quantified gap at the top type (assumption 2), weak continuity of the
//! truncated limits (assumption 3), the two-trajectory coupling, and the
//! atom-mass product/sum recursion.
//!
//! Randomness is seed-deterministic: the same seed produces the same pairs
//! on every platform.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::step;
use crate::error::{Error, Result};
use crate::fitness::{FitnessModel, MEAN_FITNESS_FLOOR};
use crate::limits::{kingman_limit, lenski_limit, LimitResult};
use crate::measure::{levy_distance, Interval, Measure};

/// Absolute violation tolerance; all checked quantities are O(1) on a
/// normalized type space.
pub const CHECK_TOL: f64 = 1e-10;

/// Outcome of one verification check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub worst_violation: f64,
    pub witness: Option<String>,
    pub seeds: Vec<u64>,
}

impl CheckReport {
    fn new(check: &str, passed: bool, worst_violation: f64) -> Self {
        CheckReport {
            check: check.to_string(),
            passed,
            worst_violation,
            witness: None,
            seeds: Vec::new(),
        }
    }

    fn with_witness(mut self, witness: String) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn with_seeds(mut self, seeds: Vec<u64>) -> Self {
        self.seeds = seeds;
        self
    }
}

/// A pair `(u, v)` with `v` obtained from `u` by moving mass up to the top
/// type: `v_{[0,M)} ≺ u_{[0,M)}` and `v({M}) = u({M}) + moved_mass`.
#[derive(Debug, Clone)]
pub struct DominatedPair {
    pub u: Measure,
    pub v: Measure,
    pub moved_mass: f64,
}

fn dominated_pair_from<R: Rng>(rng: &mut R, base: &Measure, m: f64) -> DominatedPair {
    debug_assert!(base.upper_support().is_none_or(|s| s <= m));
    let mut moved = 0.0;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(base.len() + 1);
    let mut top_mass = 0.0;
    for atom in base.atoms() {
        if atom.location < m {
            let fraction: f64 = rng.random();
            let r = fraction * atom.mass;
            moved += r;
            pairs.push((atom.location, atom.mass - r));
        } else {
            top_mass = atom.mass;
        }
    }
    pairs.push((m, top_mass + moved));
    let v = Measure::from_atoms(pairs).expect("dominated pair atoms are valid");
    DominatedPair {
        u: base.clone(),
        v,
        moved_mass: moved,
    }
}

/// Builds a [`DominatedPair`] from `base` by moving an independent uniform
/// fraction of each atom below `m` up to `m`. Deterministic given `seed`.
pub fn generate_dominated_pair(seed: u64, base: &Measure, m: f64) -> DominatedPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    dominated_pair_from(&mut rng, base, m)
}

/// Draws a random atomic probability measure on `[0, m]`: 2–6 atoms at
/// uniform locations with normalized uniform masses, optionally forcing an
/// atom at the top type `m`.
pub fn sample_probability_measure<R: Rng>(rng: &mut R, m: f64, force_top: bool) -> Measure {
    let k: usize = rng.random_range(2..=6);
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|_| (rng.random::<f64>() * m, 0.05 + rng.random::<f64>()))
        .collect();
    if force_top {
        pairs.push((m, 0.05 + rng.random::<f64>()));
    }
    let total: f64 = pairs.iter().map(|(_, w)| w).sum();
    Measure::from_atoms(pairs.into_iter().map(|(x, w)| (x, w / total)))
        .expect("sampled atoms are valid")
}

/// Assumption 1: for every pair and every grid point,
/// `s(x, u) ≥ s(x, v)`. Pairs whose mean fitness vanishes are excluded as
/// hypothesis-level degeneracies.
pub fn check_assumption1(
    model: &FitnessModel,
    pairs: &[DominatedPair],
    grid: &[f64],
) -> CheckReport {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    let mut skipped = 0usize;
    for (idx, pair) in pairs.iter().enumerate() {
        let (eu, ev) = match (model.evaluate(&pair.u), model.evaluate(&pair.v)) {
            (Ok(eu), Ok(ev)) => (eu, ev),
            _ => {
                skipped += 1;
                continue;
            }
        };
        for &x in grid {
            let violation = ev.advantage(x) - eu.advantage(x);
            if violation > worst {
                worst = violation;
                if violation > CHECK_TOL {
                    witness = Some(format!(
                        "pair {idx} at x = {x}: s(x,v) = {} exceeds s(x,u) = {}",
                        ev.advantage(x),
                        eu.advantage(x)
                    ));
                }
            }
        }
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    let mut report = CheckReport::new("assumption1", worst <= CHECK_TOL, worst);
    if let Some(w) = witness {
        report = report.with_witness(w);
    } else if skipped > 0 {
        report = report.with_witness(format!("{skipped} degenerate pairs excluded"));
    }
    report
}

/// Assumption 2 for the linear fitness model with the explicit constant
/// `c(a, ε) = 1 / (1 - ε(1 - a))`, on a type space normalized to `M = 1`:
/// whenever `D_u(a) ≥ D_v(a) + ε`, checks `s(1, u) ≥ s(1, v) · c(a, ε)`.
pub fn check_assumption2_kingman(pair: &DominatedPair, a: f64, eps: f64) -> CheckReport {
    let name = "assumption2_kingman";
    let mean_u = pair.u.mean();
    let mean_v = pair.v.mean();
    if mean_u < MEAN_FITNESS_FLOOR || mean_v < MEAN_FITNESS_FLOOR {
        return CheckReport::new(name, true, 0.0)
            .with_witness("hypothesis unmet: degenerate mean fitness".into());
    }
    if pair.u.cdf(a) < pair.v.cdf(a) + eps {
        return CheckReport::new(name, true, 0.0).with_witness(format!(
            "hypothesis unmet: D_u({a}) = {} < D_v({a}) + {eps}",
            pair.u.cdf(a)
        ));
    }
    let denom = 1.0 - eps * (1.0 - a);
    if denom <= 0.0 {
        return CheckReport::new(name, true, 0.0)
            .with_witness("hypothesis unmet: c(a, eps) is unbounded".into());
    }
    let c = 1.0 / denom;
    // s(1, u) = 1 / mean(u) for the linear fitness at M = 1
    let deficit = c / mean_v - 1.0 / mean_u;
    let mut report = CheckReport::new(name, deficit <= CHECK_TOL, deficit);
    if deficit > CHECK_TOL {
        report = report.with_witness(format!(
            "s(1,u) = {} falls short of s(1,v)·c = {} (c = {c})",
            1.0 / mean_u,
            c / mean_v
        ));
    }
    report
}

/// Assumption 2 for the daily-cycle model, qualitatively: no explicit
/// constant is available, so only the strict inequality `s(M, u) > s(M, v)`
/// is checked and the margin reported.
pub fn check_assumption2_lenski(
    pair: &DominatedPair,
    a: f64,
    eps: f64,
    gamma: f64,
) -> Result<CheckReport> {
    let name = "assumption2_lenski";
    let model = FitnessModel::lenski(gamma)?;
    if pair.u.cdf(a) < pair.v.cdf(a) + eps {
        return Ok(CheckReport::new(name, true, 0.0)
            .with_witness(format!("hypothesis unmet: D_u({a}) < D_v({a}) + {eps}")));
    }
    let (eu, ev) = match (model.evaluate(&pair.u), model.evaluate(&pair.v)) {
        (Ok(eu), Ok(ev)) => (eu, ev),
        _ => {
            return Ok(CheckReport::new(name, true, 0.0)
                .with_witness("hypothesis unmet: degenerate population".into()))
        }
    };
    let m = pair
        .u
        .upper_support()
        .unwrap_or(0.0)
        .max(pair.v.upper_support().unwrap_or(0.0));
    let margin = eu.advantage(m) - ev.advantage(m);
    Ok(CheckReport::new(name, margin > 0.0, -margin)
        .with_witness(format!("strict margin s(M,u) - s(M,v) = {margin}")))
}

/// Runs the coupled trajectories `h_i` and `ĥ_i` (shared mutant
/// distribution `q`) for `n` steps and checks that the component relation
/// `(ĥ_i)_{[0,M)} ≺ (h_i)_{[0,M)}` and the mass ordering
/// `ĥ_i({M}) ≥ h_i({M})` propagate.
pub fn check_coupling(
    model: &FitnessModel,
    h0: &Measure,
    hhat0: &Measure,
    q: &Measure,
    beta: f64,
    n: usize,
) -> Result<CheckReport> {
    let m = h0
        .upper_support()
        .ok_or(Error::EmptyMeasure)?
        .max(hhat0.upper_support().ok_or(Error::EmptyMeasure)?)
        .max(q.upper_support().ok_or(Error::EmptyMeasure)?);
    let below = Interval::right_open(0.0, m);
    if hhat0.component_violation(h0, below) > CHECK_TOL {
        return Err(Error::Precondition(
            "initial states do not satisfy the component relation below M".into(),
        ));
    }

    let mut h = h0.clone();
    let mut hhat = hhat0.clone();
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for i in 1..=n {
        h = step(model, &h, q, beta)?;
        hhat = step(model, &hhat, q, beta)?;
        let comp = hhat.component_violation(&h, below);
        let mass = h.mass_at(m) - hhat.mass_at(m);
        let v = comp.max(mass);
        if v > worst {
            worst = v;
            if v > CHECK_TOL {
                witness = Some(format!(
                    "step {i}: component violation {comp}, mass ordering violation {mass}"
                ));
            }
        }
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    let mut report = CheckReport::new("coupling", worst <= CHECK_TOL, worst);
    if let Some(w) = witness {
        report = report.with_witness(w);
    }
    Ok(report)
}

/// Predicts `p_i({M})` for `i = 0..n` through the scalar product/sum
/// recursion on the per-step selective advantages at `M`, independently of
/// the measure-level bookkeeping:
///
/// ```text
/// R_{i,1} = (1-β)^i ∏_k s(M, p_k),   R_{i,2} = β ∑_k (1-β)^k ∏_j s(M, p_{i-1-j})
/// p_i({M}) = R_{i,1} p_0({M}) + R_{i,2} q({M})
/// ```
///
/// computed stably as `A_i = (1-β) s(M, p_{i-1}) A_{i-1}` and
/// `B_i = (1-β) s(M, p_{i-1}) B_{i-1} + β`.
pub fn atom_mass_recursion(
    model: &FitnessModel,
    p0: &Measure,
    q: &Measure,
    beta: f64,
    n: usize,
) -> Result<Vec<f64>> {
    let m = p0
        .upper_support()
        .ok_or(Error::EmptyMeasure)?
        .max(q.upper_support().ok_or(Error::EmptyMeasure)?);
    let p0_top = p0.mass_at(m);
    let q_top = q.mass_at(m);

    let mut predicted = Vec::with_capacity(n + 1);
    predicted.push(p0_top);
    let mut a_coeff = 1.0; // R_{i,1}(M)
    let mut b_coeff = 0.0; // R_{i,2}(M)
    let mut current = p0.clone();
    for _ in 1..=n {
        // degenerate branch multiplies masses by (1-β) with no selection
        let s_top = match model.evaluate(&current) {
            Ok(eval) => eval.advantage(m),
            Err(Error::DegeneratePopulation) => 1.0,
            Err(e) => return Err(e),
        };
        a_coeff *= (1.0 - beta) * s_top;
        b_coeff = (1.0 - beta) * s_top * b_coeff + beta;
        predicted.push(a_coeff * p0_top + b_coeff * q_top);
        current = step(model, &current, q, beta)?;
    }
    Ok(predicted)
}

fn limit_at(model: &FitnessModel, q: &Measure, beta: f64, a: f64) -> Result<LimitResult> {
    match *model {
        FitnessModel::Kingman => kingman_limit(q, beta, a),
        FitnessModel::Lenski { gamma } => lenski_limit(q, beta, gamma, a),
    }
}

/// Lévy distances between the truncated limits `p^{a,*}` and the full limit
/// `p^{M,*}`, one entry per value in `a_values`.
pub fn assumption3_distances(
    model: &FitnessModel,
    q: &Measure,
    beta: f64,
    m: f64,
    a_values: &[f64],
) -> Result<Vec<f64>> {
    let full = limit_at(model, q, beta, m)?.measure();
    a_values
        .iter()
        .map(|&a| {
            Ok(levy_distance(
                &limit_at(model, q, beta, a)?.measure(),
                &full,
            ))
        })
        .collect()
}

/// Assumption 3 diagnostic: the distance sequence along `a_values`
/// (increasing toward `M`) must be nonincreasing within a 1e-3 slack and
/// end below `final_bound`. The reported violation is positive exactly when
/// one of the two conditions fails.
pub fn assumption3_diagnostic(
    model: &FitnessModel,
    q: &Measure,
    beta: f64,
    m: f64,
    a_values: &[f64],
    final_bound: f64,
) -> Result<CheckReport> {
    const MONOTONE_SLACK: f64 = 1e-3;
    let distances = assumption3_distances(model, q, beta, m, a_values)?;
    let mono_violation = distances
        .windows(2)
        .map(|w| w[1] - w[0] - MONOTONE_SLACK)
        .fold(f64::NEG_INFINITY, f64::max);
    let bound_violation = distances.last().map_or(0.0, |d| d - final_bound);
    let worst = mono_violation.max(bound_violation).max(0.0);
    Ok(CheckReport::new("assumption3", worst <= 0.0, worst)
        .with_witness(format!("levy distances to p^(M,*): {distances:?}")))
}

// ---------------------------------------------------------------------------
// Seeded suites
// ---------------------------------------------------------------------------

/// Assumption-1 suite over `n_pairs` seeded dominated pairs on `[0, 1]`,
/// each checked on a uniform 21-point grid.
pub fn assumption1_suite(model: &FitnessModel, n_pairs: usize, seed: u64) -> CheckReport {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let mut pairs = Vec::with_capacity(n_pairs);
    for j in 0..n_pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(j as u64));
        let base = sample_probability_measure(&mut rng, 1.0, j % 3 == 0);
        pairs.push(dominated_pair_from(&mut rng, &base, 1.0));
    }
    check_assumption1(model, &pairs, &grid).with_seeds(vec![seed])
}

/// Assumption-2 suite: seeded pairs with drawn `(a, ε)`; only
/// hypothesis-satisfying pairs count. Uses the explicit constant for the
/// linear model and the qualitative margin check for the daily-cycle model.
pub fn assumption2_suite(model: &FitnessModel, n_pairs: usize, seed: u64) -> Result<CheckReport> {
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0usize;
    let mut witness = None;
    for j in 0..n_pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(j as u64));
        let base = sample_probability_measure(&mut rng, 1.0, j % 4 == 0);
        let pair = dominated_pair_from(&mut rng, &base, 1.0);
        let a: f64 = rng.random::<f64>() * 0.95;
        let eps: f64 = 0.01 + 0.3 * rng.random::<f64>();
        if pair.u.cdf(a) < pair.v.cdf(a) + eps {
            continue;
        }
        let report = match *model {
            FitnessModel::Kingman => check_assumption2_kingman(&pair, a, eps),
            FitnessModel::Lenski { gamma } => check_assumption2_lenski(&pair, a, eps, gamma)?,
        };
        if report
            .witness
            .as_deref()
            .is_some_and(|w| w.starts_with("hypothesis unmet"))
        {
            continue;
        }
        checked += 1;
        if report.worst_violation > worst {
            worst = report.worst_violation;
            if !report.passed {
                witness = report.witness.clone();
            }
        }
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    let name = match model {
        FitnessModel::Kingman => "assumption2_kingman",
        FitnessModel::Lenski { .. } => "assumption2_lenski",
    };
    let passed = match model {
        FitnessModel::Kingman => worst <= CHECK_TOL,
        FitnessModel::Lenski { .. } => worst < 0.0 || checked == 0,
    };
    let mut report = CheckReport::new(name, passed, worst).with_seeds(vec![seed]);
    report = match witness {
        Some(w) => report.with_witness(w),
        None => report.with_witness(format!("{checked} hypothesis-satisfying pairs checked")),
    };
    Ok(report)
}

/// Coupling suite: seeded `(h_0, ĥ_0, q)` triples run for `steps`
/// generations each; every fifth pair uses `ĥ_0 = δ_M`, which instantiates
/// the bound `p_i({M}) ≤ p̂_i({M})`.
pub fn coupling_suite(
    model: &FitnessModel,
    beta: f64,
    n_pairs: usize,
    steps: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for j in 0..n_pairs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(j as u64));
        let base = sample_probability_measure(&mut rng, 1.0, j % 2 == 0);
        let q = sample_probability_measure(&mut rng, 1.0, j % 3 == 0);
        let (h0, hhat0) = if j % 5 == 0 {
            (base, Measure::dirac(1.0))
        } else {
            let pair = dominated_pair_from(&mut rng, &base, 1.0);
            (pair.u, pair.v)
        };
        let report = check_coupling(model, &h0, &hhat0, &q, beta, steps)?;
        if report.worst_violation > worst {
            worst = report.worst_violation;
            if !report.passed {
                witness = Some(format!("pair {j}: {}", report.witness.unwrap_or_default()));
            }
        }
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    let mut report = CheckReport::new("coupling", worst <= CHECK_TOL, worst).with_seeds(vec![seed]);
    if let Some(w) = witness {
        report = report.with_witness(w);
    }
    Ok(report)
}

/// Atom-mass recursion suite: seeded `(p_0, q, β)` scenarios; the scalar
/// recursion must agree with the direct trajectory masses at `M`.
pub fn recursion_suite(
    model: &FitnessModel,
    n_scenarios: usize,
    steps: usize,
    seed: u64,
) -> Result<CheckReport> {
    let mut worst = f64::NEG_INFINITY;
    let mut witness = None;
    for j in 0..n_scenarios {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(j as u64));
        let p0 = sample_probability_measure(&mut rng, 1.0, j % 2 == 0);
        let q = sample_probability_measure(&mut rng, 1.0, j % 3 == 0);
        let beta = 0.1 + 0.8 * rng.random::<f64>();
        let predicted = atom_mass_recursion(model, &p0, &q, beta, steps)?;

        let m = p0.upper_support().unwrap().max(q.upper_support().unwrap());
        let mut current = p0.clone();
        let mut direct = vec![current.mass_at(m)];
        for _ in 1..=steps {
            current = step(model, &current, &q, beta)?;
            direct.push(current.mass_at(m));
        }
        for (i, (p, d)) in predicted.iter().zip(&direct).enumerate() {
            let gap = (p - d).abs();
            if gap > worst {
                worst = gap;
                if gap > CHECK_TOL {
                    witness = Some(format!(
                        "scenario {j} step {i}: recursion {p} vs trajectory {d}"
                    ));
                }
            }
        }
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    let mut report =
        CheckReport::new("atom_mass_recursion", worst <= CHECK_TOL, worst).with_seeds(vec![seed]);
    if let Some(w) = witness {
        report = report.with_witness(w);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::total_variation;

    fn m(pairs: &[(f64, f64)]) -> Measure {
        Measure::from_atoms(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn dominated_pair_construction() {
        // nothing below M: the pair degenerates to (δ_M, δ_M)
        let pair = generate_dominated_pair(7, &Measure::dirac(1.0), 1.0);
        assert_eq!(pair.moved_mass, 0.0);
        assert_eq!(pair.u, pair.v);

        // base δ_0: v = (1-f) δ_0 + f δ_M for the drawn fraction f
        let pair = generate_dominated_pair(42, &Measure::dirac(0.0), 1.0);
        let f = pair.moved_mass;
        assert!(f > 0.0 && f < 1.0);
        assert!((pair.v.mass_at(0.0) - (1.0 - f)).abs() < 1e-15);
        assert!((pair.v.mass_at(1.0) - f).abs() < 1e-15);
    }

    #[test]
    fn dominated_pair_satisfies_component_relation() {
        let below = Interval::right_open(0.0, 1.0);
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = sample_probability_measure(&mut rng, 1.0, seed % 2 == 0);
            let pair = dominated_pair_from(&mut rng, &base, 1.0);
            assert!(pair
                .v
                .restrict(below)
                .is_component_of(&pair.u.restrict(below), below));
            assert!(
                (pair.v.mass_at(1.0) - pair.u.mass_at(1.0) - pair.moved_mass).abs() < 1e-12,
                "seed {seed}"
            );
            assert!(pair.v.is_probability());
        }
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let base = m(&[(0.2, 0.4), (0.7, 0.6)]);
        let a = generate_dominated_pair(123, &base, 1.0);
        let b = generate_dominated_pair(123, &base, 1.0);
        assert_eq!(a.v, b.v);
        let c = generate_dominated_pair(124, &base, 1.0);
        assert_ne!(a.v, c.v);
    }

    #[test]
    fn assumption1_holds_for_both_models() {
        for model in [FitnessModel::Kingman, FitnessModel::lenski(100.0).unwrap()] {
            let report = assumption1_suite(&model, 100, 9);
            assert!(report.passed, "{model:?}: {report:?}");
            assert!(report.worst_violation <= CHECK_TOL);
        }
    }

    #[test]
    fn assumption1_equal_pairs_have_zero_violation() {
        let u = m(&[(0.3, 0.5), (0.9, 0.5)]);
        let pair = DominatedPair {
            u: u.clone(),
            v: u,
            moved_mass: 0.0,
        };
        let report = check_assumption1(&FitnessModel::Kingman, &[pair], &[0.0, 0.5, 1.0]);
        assert!(report.passed);
        assert_eq!(report.worst_violation, 0.0);
    }

    #[test]
    fn assumption2_constant_example() {
        // c(0.5, 0.2) = 1 / (1 - 0.1)
        let c: f64 = 1.0 / (1.0 - 0.2 * (1.0 - 0.5));
        assert!((c - 1.0 / 0.9).abs() < 1e-15);

        let base = m(&[(0.2, 0.6), (1.0, 0.4)]);
        let pair = generate_dominated_pair(5, &base, 1.0);
        let eps = pair.u.cdf(0.5) - pair.v.cdf(0.5);
        assert!(eps > 0.0, "seeded pair should move mass from below 0.5");
        let report = check_assumption2_kingman(&pair, 0.5, eps * 0.99);
        assert!(report.passed, "{report:?}");
    }

    #[test]
    fn assumption2_at_eps_zero_reduces_to_assumption1() {
        // c(a, 0) = 1, so the check degenerates to s(1,u) >= s(1,v)
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = sample_probability_measure(&mut rng, 1.0, seed % 2 == 0);
            let pair = dominated_pair_from(&mut rng, &base, 1.0);
            let report = check_assumption2_kingman(&pair, 0.3, 0.0);
            assert!(report.passed, "seed {seed}: {report:?}");
        }
    }

    #[test]
    fn assumption2_hypothesis_unmet_is_not_failure() {
        let u = Measure::dirac(1.0);
        let pair = DominatedPair {
            u: u.clone(),
            v: u,
            moved_mass: 0.0,
        };
        let report = check_assumption2_kingman(&pair, 0.5, 0.2);
        assert!(report.passed);
        assert!(report.witness.unwrap().starts_with("hypothesis unmet"));

        // degenerate mean fitness is reported at hypothesis level
        let pair = generate_dominated_pair(3, &Measure::dirac(0.0), 1.0);
        let degenerate = DominatedPair {
            u: Measure::dirac(0.0),
            v: pair.v,
            moved_mass: pair.moved_mass,
        };
        let report = check_assumption2_kingman(&degenerate, 0.5, 1.0);
        assert!(report.passed);
        assert!(report.witness.unwrap().starts_with("hypothesis unmet"));
    }

    #[test]
    fn coupling_identical_states_stay_equal() {
        let h0 = m(&[(0.4, 0.5), (1.0, 0.5)]);
        let q = m(&[(0.1, 1.0)]);
        let report = check_coupling(&FitnessModel::Kingman, &h0, &h0, &q, 0.5, 50).unwrap();
        assert!(report.passed);
        assert!(report.worst_violation.abs() < 1e-14);
    }

    #[test]
    fn coupling_from_delta_top_bounds_the_atom() {
        let h0 = m(&[(0.2, 0.3), (0.8, 0.7)]);
        let q = m(&[(0.1, 0.6), (1.0, 0.4)]);
        for model in [FitnessModel::Kingman, FitnessModel::lenski(100.0).unwrap()] {
            let report = check_coupling(&model, &h0, &Measure::dirac(1.0), &q, 0.4, 100).unwrap();
            assert!(report.passed, "{model:?}: {report:?}");
        }
    }

    #[test]
    fn coupling_rejects_unordered_inputs() {
        let h0 = Measure::dirac(1.0);
        let hhat0 = m(&[(0.2, 1.0)]); // all mass below M: not a component order
        let q = Measure::dirac(0.5);
        assert!(matches!(
            check_coupling(&FitnessModel::Kingman, &h0, &hhat0, &q, 0.5, 5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn recursion_base_case_is_initial_mass() {
        let p0 = m(&[(0.3, 0.4), (1.0, 0.6)]);
        let q = Measure::dirac(0.0);
        let seq = atom_mass_recursion(&FitnessModel::Kingman, &p0, &q, 0.5, 0).unwrap();
        assert_eq!(seq, vec![0.6]);
    }

    #[test]
    fn recursion_matches_trajectory_for_delta_top_start() {
        // with q({M}) = 0 the sequence is exactly (1-β)^i ∏ s(M, p_k)
        let q = m(&[(0.2, 0.5), (0.4, 0.5)]);
        let beta = 0.5;
        let predicted =
            atom_mass_recursion(&FitnessModel::Kingman, &Measure::dirac(1.0), &q, beta, 30)
                .unwrap();
        let mut current = Measure::dirac(1.0);
        for (i, p) in predicted.iter().enumerate() {
            assert!((p - current.mass_at(1.0)).abs() <= 1e-10, "step {i}");
            if i < 30 {
                current = step(&FitnessModel::Kingman, &current, &q, beta).unwrap();
            }
        }
    }

    #[test]
    fn recursion_suite_agrees_for_both_models() {
        for model in [FitnessModel::Kingman, FitnessModel::lenski(100.0).unwrap()] {
            let report = recursion_suite(&model, 10, 50, 21).unwrap();
            assert!(report.passed, "{model:?}: {report:?}");
        }
    }

    #[test]
    fn assumption3_dirac_mutant_distance_is_gap() {
        // q = δ_M: q^a = δ_a and p^{a,*} = δ_a, so the distance is M - a
        let d = assumption3_distances(
            &FitnessModel::Kingman,
            &Measure::dirac(1.0),
            0.5,
            1.0,
            &[0.9, 0.99, 0.999],
        )
        .unwrap();
        assert!((d[0] - 0.1).abs() < 1e-6);
        assert!((d[1] - 0.01).abs() < 1e-6);
        assert!((d[2] - 0.001).abs() < 1e-6);
    }

    #[test]
    fn assumption3_diagnostic_for_mutants_at_zero() {
        for model in [FitnessModel::Kingman, FitnessModel::lenski(100.0).unwrap()] {
            let report = assumption3_diagnostic(
                &model,
                &Measure::dirac(0.0),
                0.5,
                1.0,
                &[0.9, 0.99, 0.999],
                0.002,
            )
            .unwrap();
            assert!(report.passed, "{model:?}: {report:?}");
        }
        // single a = M: distance 0
        let d = assumption3_distances(
            &FitnessModel::Kingman,
            &Measure::dirac(0.0),
            0.5,
            1.0,
            &[1.0],
        )
        .unwrap();
        assert_eq!(d, vec![0.0]);
    }

    #[test]
    fn check_report_json_fields() {
        let report = CheckReport::new("demo", true, 0.0).with_seeds(vec![1, 2]);
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains(r#""check":"demo""#));
        assert!(text.contains(r#""passed":true"#));
        assert!(text.contains(r#""worst_violation":0.0"#));
        assert!(text.contains(r#""witness":null"#));
        assert!(text.contains(r#""seeds":[1,2]"#));
    }

    #[test]
    fn sampled_measures_are_probabilities() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for i in 0..20 {
            let u = sample_probability_measure(&mut rng, 1.0, i % 2 == 0);
            assert!(u.is_probability());
            assert!(u.upper_support().unwrap() <= 1.0);
            if i % 2 == 0 {
                assert!(u.mass_at(1.0) > 0.0);
            }
        }
    }

    #[test]
    fn suites_are_deterministic() {
        let model = FitnessModel::Kingman;
        let a = assumption1_suite(&model, 20, 5);
        let b = assumption1_suite(&model, 20, 5);
        assert_eq!(a.worst_violation, b.worst_violation);
        let a = recursion_suite(&model, 5, 20, 5).unwrap();
        let b = recursion_suite(&model, 5, 20, 5).unwrap();
        assert_eq!(a.worst_violation, b.worst_violation);
    }

    #[test]
    fn equal_dominated_pair_trajectories_coincide() {
        // sanity link between the coupling check and plain iteration
        let base = m(&[(0.3, 0.6), (1.0, 0.4)]);
        let q = m(&[(0.25, 1.0)]);
        let mut h = base.clone();
        let mut hhat = base;
        for _ in 0..10 {
            h = step(&FitnessModel::Kingman, &h, &q, 0.5).unwrap();
            hhat = step(&FitnessModel::Kingman, &hhat, &q, 0.5).unwrap();
        }
        assert!(total_variation(&h, &hhat) < 1e-15);
    }
}
