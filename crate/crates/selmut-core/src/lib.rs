//! Numerical engine for measure-valued selection–mutation dynamics with
//! house-of-cards mutation.
//!
//! The population state is a finite atomic probability measure on `[0, M]`.
//! Each generation applies
//!
//! ```text
//! p_i = (1 - β) · s(x, p_{i-1}) · p_{i-1} + β · q
//! ```
//!
//! where `q` is the mutant type distribution and `s(x, u)` is the selective
//! advantage of type `x` under the chosen fitness model (linear fitness, or
//! the daily-cycle fitness of a serial-transfer experiment). The crate
//! provides:
//!
//! - exact atomic-measure algebra with dominance relations and the total
//!   variation / Kolmogorov / Lévy distances ([`measure`]),
//! - the two fitness models and the cycle-time solver ([`fitness`]),
//! - the recursion, upper-support normalization, and trajectory execution
//!   with diagnostics ([`dynamics`]),
//! - closed-form limit distributions with criterion evaluation, monotone
//!   root solving, and condensation detection ([`limits`]),
//! - randomized property checks for the monotonicity assumptions, the
//!   coupling construction, and the atom-mass recursion ([`verify`]).

pub mod dynamics;
pub mod error;
pub mod fitness;
pub mod limits;
pub mod measure;
pub mod solve;
pub mod verify;

pub use dynamics::{
    apply_convention_star, iterate, iterate_with_history, step, ConventionStar, StepDiagnostics,
    StopReason, StoppingRule, Trajectory,
};
pub use error::{Error, Result};
pub use fitness::{
    fitness_weight, lenski_time, mean_fitness, selective_advantage, solve_cycle_time, FitnessEval,
    FitnessModel,
};
pub use limits::{
    condensation_report, kingman_criterion, kingman_limit, lenski_criterion, lenski_limit,
    solve_kingman_s, solve_lenski_s, CondensationReport, LimitCase, LimitResult,
};
pub use measure::{
    kolmogorov_distance, levy_distance, total_variation, Atom, FamilySpec, Interval, Measure,
};
pub use solve::RootSolve;
pub use verify::{
    assumption1_suite, assumption2_suite, assumption3_diagnostic, assumption3_distances,
    atom_mass_recursion, check_assumption1, check_assumption2_kingman, check_assumption2_lenski,
    check_coupling, coupling_suite, generate_dominated_pair, recursion_suite,
    sample_probability_measure, CheckReport, DominatedPair,
};
