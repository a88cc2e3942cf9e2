//! Scenario execution: applies Convention (*), runs the requested
//! computation, and writes the declared outputs.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use selmut_core::{
    apply_convention_star, assumption1_suite, assumption2_suite, assumption3_diagnostic,
    coupling_suite, iterate, kingman_limit, kolmogorov_distance, lenski_limit, levy_distance,
    recursion_suite, total_variation, CheckReport, ConventionStar, FitnessModel, LimitResult,
    Measure, StopReason, Trajectory,
};

use crate::scenario::{OutputKind, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Iterate,
    Limit,
    Verify,
    Compare,
}

impl Action {
    fn produces(self) -> &'static [OutputKind] {
        match self {
            Action::Iterate => &[OutputKind::TrajectoryCsv, OutputKind::DiagnosticsCsv],
            Action::Limit => &[OutputKind::LimitJson],
            Action::Verify => &[OutputKind::ChecksJson],
            Action::Compare => &[
                OutputKind::TrajectoryCsv,
                OutputKind::DiagnosticsCsv,
                OutputKind::LimitJson,
            ],
        }
    }
}

/// Runs one scenario under `action`, writing outputs into `out_dir`.
pub fn run_scenario(
    action: Action,
    config: &ScenarioConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let producible = action.produces();
    for declared in &config.outputs {
        if !producible.contains(declared) {
            eprintln!(
                "note: declared output {} is not produced by this subcommand",
                declared.file_name()
            );
        }
    }
    let wants = |kind: OutputKind| -> bool {
        producible.contains(&kind) && (config.outputs.is_empty() || config.outputs.contains(&kind))
    };

    let convention = apply_convention_star(&config.model, &config.p0, &config.q, config.beta)
        .context("Convention (*) enforcement failed")?;
    if convention.rewrote {
        println!(
            "convention (*): p0 replaced by one step; ambient M = {}",
            convention.ambient
        );
    }

    let mut written = Vec::new();
    let mut write = |name: &str, contents: String| -> Result<()> {
        std::fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        let path = out_dir.join(name);
        std::fs::write(&path, contents)
            .with_context(|| format!("cannot write {}", path.display()))?;
        written.push(path);
        Ok(())
    };

    let trajectory = match action {
        Action::Iterate | Action::Compare => Some(
            iterate(
                &config.model,
                &convention.p0,
                &convention.q,
                config.beta,
                config.stop,
            )
            .context("trajectory run failed")?,
        ),
        _ => None,
    };
    let limit = match action {
        Action::Limit | Action::Compare => Some(
            limit_at(
                &config.model,
                &convention.q,
                config.beta,
                convention.ambient,
            )
            .context("limit computation failed")?,
        ),
        _ => None,
    };

    if let Some(t) = &trajectory {
        println!(
            "iterate: {} iterations, {}, final tv delta {}",
            t.steps(),
            stop_reason_str(t.stop_reason),
            t.diagnostics.last().map_or(0.0, |d| d.tv_delta)
        );
        if wants(OutputKind::TrajectoryCsv) {
            write("trajectory.csv", t.diagnostics_csv())?;
        }
        if wants(OutputKind::DiagnosticsCsv) {
            write("diagnostics.csv", diagnostics_csv(config, &convention, t))?;
        }
    }

    if let Some(l) = &limit {
        println!(
            "limit: {}, criterion {}, atom at {} = {}",
            match l.case {
                selmut_core::LimitCase::Case1 => "case1",
                selmut_core::LimitCase::Case2 => "case2",
            },
            l.criterion,
            l.truncation,
            l.atom_at_a
        );
        if wants(OutputKind::LimitJson) {
            let mut text = serde_json::to_string_pretty(l)?;
            text.push('\n');
            write("limit.json", text)?;
        }
    }

    if action == Action::Verify {
        let checks = verification_battery(config, &convention)?;
        let passed = checks.iter().filter(|c| c.passed).count();
        println!("verify: {passed}/{} checks passed", checks.len());
        for check in &checks {
            println!(
                "  {} {}: worst violation {}",
                if check.passed { "PASS" } else { "FAIL" },
                check.check,
                check.worst_violation
            );
        }
        if wants(OutputKind::ChecksJson) {
            let mut text = serde_json::to_string_pretty(&checks)?;
            text.push('\n');
            write("checks.json", text)?;
        }
    }

    if action == Action::Compare {
        let (t, l) = (trajectory.as_ref().unwrap(), limit.as_ref().unwrap());
        let limit_measure = l.measure();
        let report = CompareReport {
            iterations: t.steps(),
            stop_reason: stop_reason_str(t.stop_reason).to_string(),
            tv_gap: total_variation(t.final_state(), &limit_measure),
            kolmogorov_gap: kolmogorov_distance(t.final_state(), &limit_measure),
            levy_gap: levy_distance(t.final_state(), &limit_measure),
            final_state: t.final_state().clone(),
            limit: l.clone(),
        };
        println!(
            "compare: tv gap {}, kolmogorov gap {}, levy gap {}",
            report.tv_gap, report.kolmogorov_gap, report.levy_gap
        );
        let mut text = serde_json::to_string_pretty(&report)?;
        text.push('\n');
        write("compare.json", text)?;
    }

    Ok(written)
}

fn limit_at(
    model: &FitnessModel,
    q: &Measure,
    beta: f64,
    a: f64,
) -> selmut_core::Result<LimitResult> {
    match *model {
        FitnessModel::Kingman => kingman_limit(q, beta, a),
        FitnessModel::Lenski { gamma } => lenski_limit(q, beta, gamma, a),
    }
}

fn stop_reason_str(reason: StopReason) -> &'static str {
    match reason {
        StopReason::Converged => "converged",
        StopReason::MaxIterations => "max_iterations",
    }
}

fn diagnostics_csv(config: &ScenarioConfig, convention: &ConventionStar, t: &Trajectory) -> String {
    let model = match config.model {
        FitnessModel::Kingman => "kingman".to_string(),
        FitnessModel::Lenski { gamma } => format!("lenski(gamma={gamma})"),
    };
    let last = t.diagnostics.last();
    let mut out = String::from("key,value\n");
    let mut row = |k: &str, v: String| {
        out.push_str(k);
        out.push(',');
        out.push_str(&v);
        out.push('\n');
    };
    row("model", model);
    row("beta", config.beta.to_string());
    row("ambient_m", convention.ambient.to_string());
    row("convention_star_rewrote_p0", convention.rewrote.to_string());
    row("iterations", t.steps().to_string());
    row("stop_reason", stop_reason_str(t.stop_reason).to_string());
    row(
        "final_tv_delta",
        last.map_or(String::new(), |d| d.tv_delta.to_string()),
    );
    row(
        "final_mean_fitness",
        last.map_or(String::new(), |d| d.mean_fitness.to_string()),
    );
    row(
        "final_atom_mass_at_M",
        t.last.mass_at(t.ambient).to_string(),
    );
    row("final_total_mass", t.last.total_mass().to_string());
    row(
        "final_cycle_time",
        last.and_then(|d| d.cycle_time)
            .map_or(String::new(), |c| c.to_string()),
    );
    out
}

#[derive(Serialize)]
struct CompareReport {
    iterations: usize,
    stop_reason: String,
    tv_gap: f64,
    kolmogorov_gap: f64,
    levy_gap: f64,
    final_state: Measure,
    limit: LimitResult,
}

fn verification_battery(
    config: &ScenarioConfig,
    convention: &ConventionStar,
) -> Result<Vec<CheckReport>> {
    let v = &config.verify;
    let model = &config.model;
    let seed = config.seed;
    let a_values: Vec<f64> = v
        .a_fractions
        .iter()
        .map(|f| f * convention.ambient)
        .collect();

    let checks = vec![
        assumption1_suite(model, v.pairs, seed),
        assumption2_suite(model, v.pairs, seed.wrapping_add(1))?,
        coupling_suite(
            model,
            config.beta,
            v.coupling_pairs,
            v.coupling_steps,
            seed.wrapping_add(2),
        )?,
        recursion_suite(
            model,
            v.recursion_scenarios,
            v.recursion_steps,
            seed.wrapping_add(3),
        )?,
        assumption3_diagnostic(
            model,
            &convention.q,
            config.beta,
            convention.ambient,
            &a_values,
            v.final_levy_bound,
        )?,
    ];
    Ok(checks)
}
