//! Shared fixtures for the benchmarks.

use selmut_core::{FamilySpec, Measure};

/// A 256-atom discretized uniform mutant distribution on [0, 0.5].
pub fn discretized_q() -> Measure {
    FamilySpec::Uniform { lo: 0.0, hi: 0.5 }
        .discretize(256)
        .expect("valid family")
}

/// A two-atom mutant distribution placing mass near the top type.
pub fn two_atom_q() -> Measure {
    Measure::from_atoms([(0.5, 0.5), (0.9, 0.5)]).expect("valid atoms")
}
