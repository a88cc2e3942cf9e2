//! Acceptance suite: one test per criterion, each printing a PASS line once
//! its assertions hold. Run with `cargo test -p selmut-cli --test acceptance
//! -- --nocapture` to see the lines.

use std::process::Command;
use std::time::{Duration, Instant};

use selmut_core::{
    assumption1_suite, assumption2_suite, assumption3_distances, atom_mass_recursion,
    coupling_suite, iterate, iterate_with_history, kingman_criterion, kingman_limit,
    kolmogorov_distance, lenski_criterion, lenski_limit, sample_probability_measure,
    solve_cycle_time, solve_kingman_s, solve_lenski_s, step, total_variation, FitnessModel,
    Interval, LimitCase, Measure, StoppingRule,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn m(pairs: &[(f64, f64)]) -> Measure {
    Measure::from_atoms(pairs.iter().copied()).unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

#[test]
fn criterion_01_kingman_two_atom_fixed_point() {
    let q = Measure::dirac(0.0);
    let p0 = Measure::dirac(1.0);
    let stop = StoppingRule::new(10, 1e-13).unwrap();

    let ((trajectory, limit), elapsed) = timed(|| {
        let t = iterate_with_history(&FitnessModel::Kingman, &p0, &q, 0.5, stop).unwrap();
        let l = kingman_limit(&q, 0.5, 1.0).unwrap();
        (t, l)
    });

    let states = trajectory.history.as_ref().unwrap();
    let fixed = m(&[(0.0, 0.5), (1.0, 0.5)]);
    assert!(states.len() >= 3, "needs at least p_0, p_1, p_2");
    assert_eq!(states[2], fixed, "p_2 must equal the fixed point exactly");
    assert!(total_variation(&states[2], &limit.measure()) <= 1e-12);
    assert!(elapsed < Duration::from_millis(1), "took {elapsed:?}");
    println!(
        "PASS criterion 1: Kingman two-atom fixed point reached exactly in 2 steps ({elapsed:?})"
    );
}

#[test]
fn criterion_02_kingman_case1() {
    let q = m(&[(0.2, 0.5), (0.4, 0.5)]);
    let beta = 0.8;
    let p0 = Measure::dirac(1.0);

    let criterion = kingman_criterion(&q, beta, 1.0).unwrap();
    assert!(
        (criterion - 7.0 / 6.0).abs() < 1e-12,
        "criterion {criterion}"
    );
    assert!(criterion > 1.0);

    let ((trajectory, limit), elapsed) = timed(|| {
        let stop = StoppingRule::new(10_000, 1e-12).unwrap();
        let t = iterate(&FitnessModel::Kingman, &p0, &q, beta, stop).unwrap();
        let l = kingman_limit(&q, beta, 1.0).unwrap();
        (t, l)
    });

    assert_eq!(limit.case, LimitCase::Case1);
    assert!(trajectory.steps() <= 10_000);
    let tv = total_variation(trajectory.final_state(), &limit.measure());
    assert!(tv <= 1e-8, "tv gap {tv}");
    let atom = trajectory.final_state().mass_at(1.0);
    assert!(atom < 1e-8, "atom mass at 1 is {atom}");
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "PASS criterion 2: Kingman case 1, tv gap {tv:.2e}, top atom {atom:.2e} ({elapsed:?})"
    );
}

#[test]
fn criterion_03_kingman_case2_discretized() {
    let q = selmut_core::FamilySpec::Uniform { lo: 0.0, hi: 0.5 }
        .discretize(256)
        .unwrap();
    let beta = 0.5;
    let p0 = Measure::dirac(1.0);

    let ((trajectory, limit), elapsed) = timed(|| {
        let stop = StoppingRule::new(100_000, 1e-12).unwrap();
        let t = iterate(&FitnessModel::Kingman, &p0, &q, beta, stop).unwrap();
        let l = kingman_limit(&q, beta, 1.0).unwrap();
        (t, l)
    });

    assert_eq!(limit.case, LimitCase::Case2);
    // the limit atom and the criterion are two views of the same sum
    let self_consistency = (limit.atom_at_a - (1.0 - limit.criterion)).abs();
    assert!(
        self_consistency <= 1e-9,
        "atom vs 1 - criterion: {self_consistency}"
    );

    assert!(trajectory.steps() <= 100_000);
    let atom_gap = (trajectory.final_state().mass_at(1.0) - limit.atom_at_a).abs();
    assert!(atom_gap <= 1e-4, "atom gap {atom_gap}");

    let below = Interval::closed(0.0, 0.5);
    let ks = kolmogorov_distance(
        &trajectory.final_state().restrict(below),
        &limit.measure().restrict(below),
    );
    assert!(ks <= 1e-6, "kolmogorov distance on [0, 0.5] is {ks}");
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "PASS criterion 3: Kingman case 2 at 257 atoms, atom gap {atom_gap:.2e}, ks {ks:.2e} ({elapsed:?})"
    );
}

#[test]
fn criterion_04_lenski_two_atom_fixed_point() {
    let q = Measure::dirac(0.0);
    let p0 = Measure::dirac(1.0);
    let model = FitnessModel::lenski(100.0).unwrap();

    let ((trajectory, limit), elapsed) = timed(|| {
        let stop = StoppingRule::new(10_000, 1e-12).unwrap();
        let t = iterate(&model, &p0, &q, 0.5, stop).unwrap();
        let l = lenski_limit(&q, 0.5, 100.0, 1.0).unwrap();
        (t, l)
    });

    // hand-derived fixed point: m_0 = βγ/(γ-1+β) = 50/99.5
    let m0 = 0.5 * 100.0 / 99.5;
    assert!((limit.measure().mass_at(0.0) - m0).abs() <= 1e-12);
    assert!((limit.measure().mass_at(1.0) - (1.0 - m0)).abs() <= 1e-12);
    assert!((m0 - 0.502513).abs() < 1e-6 && ((1.0 - m0) - 0.497487).abs() < 1e-6);

    assert!(trajectory.steps() <= 10_000);
    let tv = total_variation(trajectory.final_state(), &limit.measure());
    assert!(tv <= 1e-10, "tv gap {tv}");
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("PASS criterion 4: Lenski two-atom fixed point, tv gap {tv:.2e} ({elapsed:?})");
}

#[test]
fn criterion_05_lenski_case1() {
    let q = m(&[(0.5, 0.5), (0.9, 0.5)]);
    let beta = 0.8;
    let gamma = 100.0;
    let p0 = Measure::dirac(1.0);
    let model = FitnessModel::lenski(gamma).unwrap();

    let criterion = lenski_criterion(&q, beta, gamma, 1.0).unwrap();
    assert!(criterion > 1.0, "criterion {criterion}");

    let ((trajectory, limit), elapsed) = timed(|| {
        let stop = StoppingRule::new(10_000, 1e-12).unwrap();
        let t = iterate(&model, &p0, &q, beta, stop).unwrap();
        let l = lenski_limit(&q, beta, gamma, 1.0).unwrap();
        (t, l)
    });

    assert_eq!(limit.case, LimitCase::Case1);
    let solve = limit.solve.unwrap();
    assert!(solve.residual <= 1e-12, "root residual {}", solve.residual);
    assert!(trajectory.steps() <= 10_000);
    let tv = total_variation(trajectory.final_state(), &limit.measure());
    assert!(tv <= 1e-6, "tv gap {tv}");
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "PASS criterion 5: Lenski case 1, root residual {:.2e}, tv gap {tv:.2e} ({elapsed:?})",
        solve.residual
    );
}

#[test]
fn criterion_06_fixed_point_residual_suite() {
    let mut case1 = [0usize; 2];
    let mut case2 = [0usize; 2];
    let mut worst: f64 = 0.0;
    for j in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + j);
        let q = sample_probability_measure(&mut rng, 1.0, j % 4 == 0);
        let beta = 0.15 + 0.7 * rng.random::<f64>();
        let (model, idx) = if j % 2 == 0 {
            (FitnessModel::Kingman, 0)
        } else {
            (FitnessModel::lenski(100.0).unwrap(), 1)
        };
        let limit = match model {
            FitnessModel::Kingman => kingman_limit(&q, beta, 1.0).unwrap(),
            FitnessModel::Lenski { gamma } => lenski_limit(&q, beta, gamma, 1.0).unwrap(),
        };
        match limit.case {
            LimitCase::Case1 => case1[idx] += 1,
            LimitCase::Case2 => case2[idx] += 1,
        }
        let p = limit.measure();
        let next = step(&model, &p, &q.truncate_at(1.0), beta).unwrap();
        let tv = total_variation(&next, &p);
        assert!(
            tv <= 1e-10,
            "combo {j} ({model:?}, case {:?}): tv {tv}",
            limit.case
        );
        worst = worst.max(tv);
    }
    assert!(
        case1[0] > 0 && case2[0] > 0,
        "Kingman cases seen: {case1:?}/{case2:?}"
    );
    assert!(
        case1[1] > 0 && case2[1] > 0,
        "Lenski cases seen: {case1:?}/{case2:?}"
    );
    println!("PASS criterion 6: 20 seeded limits are step fixed points, worst tv {worst:.2e}");
}

#[test]
fn criterion_07_assumption_property_suites() {
    let start = Instant::now();
    for model in [FitnessModel::Kingman, FitnessModel::lenski(100.0).unwrap()] {
        let a1 = assumption1_suite(&model, 1000, 70);
        assert!(a1.passed, "{model:?} assumption 1: {a1:?}");
        assert!(a1.worst_violation <= 1e-10);

        let coupling = coupling_suite(&model, 0.5, 100, 200, 71).unwrap();
        assert!(coupling.passed, "{model:?} coupling: {coupling:?}");
    }
    let a2 = assumption2_suite(&FitnessModel::Kingman, 1000, 72).unwrap();
    assert!(a2.passed, "assumption 2 with the explicit constant: {a2:?}");
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!("PASS criterion 7: assumption suites (1000 pairs, 100x200 coupling) ({elapsed:?})");
}

#[test]
fn criterion_08_atom_mass_recursion_oracle() {
    let mut worst: f64 = 0.0;
    for (model_idx, model) in [FitnessModel::Kingman, FitnessModel::lenski(100.0).unwrap()]
        .iter()
        .enumerate()
    {
        for j in 0..25u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(800 + 100 * model_idx as u64 + j);
            let p0 = sample_probability_measure(&mut rng, 1.0, j % 2 == 0);
            let q = sample_probability_measure(&mut rng, 1.0, j % 3 == 0);
            let beta = 0.1 + 0.8 * rng.random::<f64>();
            let steps = 200;

            let predicted = atom_mass_recursion(model, &p0, &q, beta, steps).unwrap();
            let mut state = p0.clone();
            let mm = p0.upper_support().unwrap().max(q.upper_support().unwrap());
            for (i, want) in predicted.iter().enumerate() {
                let got = state.mass_at(mm);
                let gap = (want - got).abs();
                assert!(gap <= 1e-10, "{model:?} scenario {j} step {i}: gap {gap}");
                worst = worst.max(gap);
                if i < steps {
                    state = step(model, &state, &q, beta).unwrap();
                }
            }
        }
    }
    println!(
        "PASS criterion 8: atom-mass recursion agrees over 50 scenarios, worst gap {worst:.2e}"
    );
}

#[test]
fn criterion_09_monotone_approach_from_delta_m() {
    let cases = [
        (FitnessModel::Kingman, m(&[(0.2, 0.5), (0.4, 0.5)]), 0.8),
        (
            FitnessModel::lenski(100.0).unwrap(),
            m(&[(0.5, 0.5), (0.9, 0.5)]),
            0.8,
        ),
    ];
    let below = Interval::right_open(0.0, 1.0);
    for (model, q, beta) in cases {
        let stop = StoppingRule::new(1000, 1e-300).unwrap(); // never stop early
        let t = iterate_with_history(&model, &Measure::dirac(1.0), &q, beta, stop).unwrap();
        let states = t.history.as_ref().unwrap();
        assert_eq!(states.len(), 1001);
        for (i, pair) in states.windows(2).enumerate() {
            assert!(
                pair[0].is_component_of(&pair[1], below),
                "{model:?} step {i}: states below M are not monotone"
            );
            let (a0, a1) = (pair[0].mass_at(1.0), pair[1].mass_at(1.0));
            assert!(
                a1 <= a0 + 1e-12,
                "{model:?} step {i}: atom rose {a0} -> {a1}"
            );
        }
    }
    println!("PASS criterion 9: delta_M trajectories are componentwise monotone over 1000 steps");
}

#[test]
fn criterion_10_assumption3_diagnostic() {
    let a_values = [0.9, 0.99, 0.999];
    for model in [FitnessModel::Kingman, FitnessModel::lenski(100.0).unwrap()] {
        let d = assumption3_distances(&model, &Measure::dirac(0.0), 0.5, 1.0, &a_values).unwrap();
        for w in d.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-3,
                "{model:?}: distances not nonincreasing: {d:?}"
            );
        }
        assert!(d[2] <= 0.002, "{model:?}: final distance {}", d[2]);
        println!("PASS criterion 10 ({model:?}): levy distances {d:?}");
    }
}

#[test]
fn criterion_11_root_finder_contract() {
    // criterion 2: the case-1 root solve
    let q2 = m(&[(0.2, 0.5), (0.4, 0.5)]);
    let s = solve_kingman_s(&q2, 0.8, 1.0).unwrap();
    assert!(s.residual <= 1e-12 && s.iterations <= 200, "{s:?}");

    // criterion 5: the Lenski case-1 root solve
    let q5 = m(&[(0.5, 0.5), (0.9, 0.5)]);
    let s = solve_lenski_s(&q5, 0.8, 100.0, 1.0).unwrap();
    assert!(s.residual <= 1e-12 && s.iterations <= 200, "{s:?}");

    // criteria 4 and 5: every cycle-time solve along the trajectories
    for (q, beta) in [(Measure::dirac(0.0), 0.5), (q5, 0.8)] {
        let model = FitnessModel::lenski(100.0).unwrap();
        let stop = StoppingRule::new(10_000, 1e-12).unwrap();
        let t = iterate_with_history(&model, &Measure::dirac(1.0), &q, beta, stop).unwrap();
        for (i, state) in t.history.as_ref().unwrap().iter().enumerate() {
            let solve = solve_cycle_time(state, 100.0).unwrap();
            assert!(
                solve.residual <= 1e-12 && solve.iterations <= 200,
                "state {i}: {solve:?}"
            );
        }
    }
    println!("PASS criterion 11: all root solves meet residual 1e-12 within 200 iterations");
}

#[test]
fn criterion_12_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let scenario_path = dir.path().join("scenario.json");
    std::fs::write(
        &scenario_path,
        r#"{
  "model": {"kind": "kingman"},
  "beta": 0.8,
  "p0": {"atoms": [{"x": 1, "m": 1}]},
  "q": {"atoms": [{"x": 0.2, "m": 0.5}, {"x": 0.4, "m": 0.5}]},
  "stop": {"max_iterations": 10000, "tv_tolerance": 1e-12},
  "seed": 7
}"#,
    )
    .unwrap();

    let run = |out: &str| {
        let out_dir = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_selmut"))
            .args(["compare", "--scenario"])
            .arg(&scenario_path)
            .arg("--out-dir")
            .arg(&out_dir)
            .status()
            .expect("binary runs");
        assert!(status.success());
        out_dir
    };
    let first = run("a");
    let second = run("b");

    for name in [
        "trajectory.csv",
        "diagnostics.csv",
        "limit.json",
        "compare.json",
    ] {
        let a = std::fs::read(first.join(name)).unwrap();
        let b = std::fs::read(second.join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    println!("PASS criterion 12: repeated CLI runs are byte-identical");
}
