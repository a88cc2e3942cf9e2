//! Finite nonnegative atomic measures on a bounded interval `[0, M]`.
//!
//! A [`Measure`] is a sorted list of point masses. All of the dynamics in
//! this crate run on atomic measures, so every integral appearing in the
//! model is an exact finite sum; no quadrature is used anywhere.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Locations closer than `MERGE_TOL_SCALE * max(1, M)` are identified.
const MERGE_TOL_SCALE: f64 = 1e-12;

/// `|total_mass - 1| <= PROB_TOL` qualifies as a probability measure.
pub const PROB_TOL: f64 = 1e-9;

/// Slack for atomwise component comparisons.
pub const COMPONENT_SLACK: f64 = 1e-12;

/// Absolute accuracy of the bisected Lévy distance.
const LEVY_ACCURACY: f64 = 1e-9;

/// A point mass: `mass` concentrated at `location`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    #[serde(rename = "x")]
    pub location: f64,
    #[serde(rename = "m")]
    pub mass: f64,
}

/// An interval with individually open or closed endpoints, used to restrict
/// measures to sets like `[0, M)`, `[0, a]`, `(m, M]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }
    }

    /// `[lo, hi]`
    pub fn closed(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, true)
    }

    /// `[lo, hi)`
    pub fn right_open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, true, false)
    }

    /// `(lo, hi]`
    pub fn left_open(lo: f64, hi: f64) -> Self {
        Self::new(lo, hi, false, true)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed {
            x >= self.lo
        } else {
            x > self.lo
        };
        let below = if self.hi_closed {
            x <= self.hi
        } else {
            x < self.hi
        };
        above && below
    }
}

/// A finite nonnegative atomic measure.
///
/// Invariants maintained by every constructor:
/// - atom locations are strictly increasing (locations within the merge
///   tolerance are coalesced),
/// - all masses are positive (zero-mass atoms are dropped),
/// - `total_mass` caches the exact sum of the masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    atoms: Vec<Atom>,
    total_mass: f64,
}

impl Measure {
    /// Builds a measure from `(location, mass)` pairs: validates, sorts,
    /// merges nearby locations, and drops zero-mass atoms.
    pub fn from_atoms<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        Self::build(pairs, f64::INFINITY)
    }

    /// Like [`Measure::from_atoms`] but rejects locations above `bound`.
    pub fn from_atoms_bounded<I>(pairs: I, bound: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        Self::build(pairs, bound)
    }

    fn build<I>(pairs: I, bound: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut atoms: Vec<Atom> = Vec::new();
        for (location, mass) in pairs {
            if !location.is_finite() || !mass.is_finite() {
                return Err(Error::NonFiniteAtom { location, mass });
            }
            if mass < 0.0 {
                return Err(Error::NegativeMass { location, mass });
            }
            if location < 0.0 || location > bound {
                return Err(Error::LocationOutOfBounds { location, bound });
            }
            atoms.push(Atom { location, mass });
        }
        atoms.sort_by(|a, b| a.location.total_cmp(&b.location));

        let max_loc = atoms.last().map_or(0.0, |a| a.location);
        let tol = MERGE_TOL_SCALE * max_loc.max(1.0);

        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(last) if atom.location - last.location <= tol => last.mass += atom.mass,
                _ => merged.push(atom),
            }
        }
        merged.retain(|a| a.mass > 0.0);

        let total_mass = merged.iter().map(|a| a.mass).sum();
        Ok(Measure {
            atoms: merged,
            total_mass,
        })
    }

    /// The Dirac measure `δ_x`.
    pub fn dirac(x: f64) -> Self {
        assert!(
            x.is_finite() && x >= 0.0,
            "dirac location must be finite and nonnegative"
        );
        Measure {
            atoms: vec![Atom {
                location: x,
                mass: 1.0,
            }],
            total_mass: 1.0,
        }
    }

    /// The zero measure (legal value, e.g. as the result of a restriction).
    pub fn empty() -> Self {
        Measure {
            atoms: Vec::new(),
            total_mass: 0.0,
        }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass - 1.0).abs() <= PROB_TOL
    }

    fn merge_tol(&self) -> f64 {
        MERGE_TOL_SCALE * self.atoms.last().map_or(0.0, |a| a.location).max(1.0)
    }

    /// Point mass `u({x})`, identifying locations within the merge tolerance.
    pub fn mass_at(&self, x: f64) -> f64 {
        let tol = self.merge_tol().max(MERGE_TOL_SCALE * x.abs().max(1.0));
        match self.atoms.binary_search_by(|a| a.location.total_cmp(&x)) {
            Ok(i) => self.atoms[i].mass,
            Err(i) => {
                if i < self.atoms.len() && (self.atoms[i].location - x).abs() <= tol {
                    self.atoms[i].mass
                } else if i > 0 && (x - self.atoms[i - 1].location).abs() <= tol {
                    self.atoms[i - 1].mass
                } else {
                    0.0
                }
            }
        }
    }

    /// Distribution function `D_u(x) = u([0, x])`, right-continuous.
    pub fn cdf(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.location <= x)
            .map(|a| a.mass)
            .sum()
    }

    /// Left limit `u([0, x)) = D_u(x-)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .take_while(|a| a.location < x)
            .map(|a| a.mass)
            .sum()
    }

    /// Largest atom location `m_u`; `None` for the empty measure.
    pub fn upper_support(&self) -> Option<f64> {
        self.atoms.last().map(|a| a.location)
    }

    /// Restriction `u_A(B) = u(B ∩ A)`: keeps atoms inside `A` unchanged.
    pub fn restrict(&self, a: Interval) -> Measure {
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .copied()
            .filter(|at| a.contains(at.location))
            .collect();
        let total_mass = atoms.iter().map(|at| at.mass).sum();
        Measure { atoms, total_mass }
    }

    /// Truncation `h^a = h_{[0,a)} + h([a, m_h]) δ_a`; returns `h` unchanged
    /// when `a > m_h`.
    pub fn truncate_at(&self, a: f64) -> Measure {
        assert!(a >= 0.0, "truncation point must be nonnegative");
        let tail: f64 = self
            .atoms
            .iter()
            .filter(|at| at.location >= a)
            .map(|at| at.mass)
            .sum();
        if tail == 0.0 {
            return self.clone();
        }
        let mut atoms: Vec<Atom> = self
            .atoms
            .iter()
            .copied()
            .filter(|at| at.location < a)
            .collect();
        atoms.push(Atom {
            location: a,
            mass: tail,
        });
        Measure {
            atoms,
            total_mass: self.total_mass,
        }
    }

    /// `∫ x u(dx)` as an exact atom sum.
    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.location * a.mass).sum()
    }

    /// `∫ e^{t x} u(dx)` as an exact atom sum.
    ///
    /// Signals overflow when `t * m_u > 700` (just short of the largest
    /// finite `exp` argument for f64).
    pub fn exp_moment(&self, t: f64) -> Result<f64> {
        if let Some(m) = self.upper_support() {
            if t * m > 700.0 {
                return Err(Error::ExpOverflow { product: t * m });
            }
        }
        Ok(self
            .atoms
            .iter()
            .map(|a| (t * a.location).exp() * a.mass)
            .sum())
    }

    /// Largest atomwise excess of `self` over `other` inside `a`:
    /// `max_x (self_A({x}) - other_A({x}))`. Nonpositive when `self_A` is a
    /// component of `other_A`; 0 when neither measure charges `a`.
    pub fn component_violation(&self, other: &Measure, a: Interval) -> f64 {
        let worst = union_walk(self, other)
            .filter(|(x, _, _)| a.contains(*x))
            .map(|(_, mu, mv)| mu - mv)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst == f64::NEG_INFINITY {
            0.0
        } else {
            worst
        }
    }

    /// Whether `self_A ≺ other_A`, i.e. `other_A - self_A` is a nonnegative
    /// measure (up to [`COMPONENT_SLACK`]).
    pub fn is_component_of(&self, other: &Measure, a: Interval) -> bool {
        self.component_violation(other, a) <= COMPONENT_SLACK
    }

    /// Stochastic dominance `self ≤ other`: `D_self(x) ≥ D_other(x)` at every
    /// atom location of either measure. Requires probability measures.
    pub fn stochastically_dominated_by(&self, other: &Measure) -> Result<bool> {
        for m in [self, other] {
            if !m.is_probability() {
                return Err(Error::NotProbability {
                    total_mass: m.total_mass,
                });
            }
        }
        let mut du = 0.0;
        let mut dv = 0.0;
        for (_, mu, mv) in union_walk(self, other) {
            du += mu;
            dv += mv;
            if du < dv - COMPONENT_SLACK {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Rescales masses so the total is exactly 1.
    pub fn normalized(&self) -> Result<Measure> {
        if self.total_mass <= 0.0 {
            return Err(Error::EmptyMeasure);
        }
        let atoms: Vec<Atom> = self
            .atoms
            .iter()
            .map(|a| Atom {
                location: a.location,
                mass: a.mass / self.total_mass,
            })
            .collect();
        let total_mass = atoms.iter().map(|a| a.mass).sum();
        Ok(Measure { atoms, total_mass })
    }

    /// Builds a measure from presorted, premerged atoms. Internal fast path
    /// for the dynamics step, which only rescales masses on a fixed support.
    pub(crate) fn from_sorted_unchecked(atoms: Vec<Atom>) -> Measure {
        debug_assert!(atoms.windows(2).all(|w| w[0].location < w[1].location));
        debug_assert!(atoms.iter().all(|a| a.mass > 0.0));
        let total_mass = atoms.iter().map(|a| a.mass).sum();
        Measure { atoms, total_mass }
    }

    /// CSV body with header `x,m`; shortest round-trip decimal formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,m\n");
        for a in &self.atoms {
            out.push_str(&format!("{},{}\n", a.location, a.mass));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Measure> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line == "x,m") {
                continue;
            }
            let mut fields = line.split(',');
            let (x, m) = match (fields.next(), fields.next(), fields.next()) {
                (Some(x), Some(m), None) => (x, m),
                _ => return Err(Error::Parse(format!("csv line {}: expected `x,m`", i + 1))),
            };
            let x: f64 = x
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("csv line {}: {e}", i + 1)))?;
            let m: f64 = m
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("csv line {}: {e}", i + 1)))?;
            pairs.push((x, m));
        }
        Measure::from_atoms(pairs)
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            atoms: &'a [Atom],
        }
        Repr { atoms: &self.atoms }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            atoms: Vec<Atom>,
        }
        let repr = Repr::deserialize(deserializer)?;
        Measure::from_atoms(repr.atoms.into_iter().map(|a| (a.location, a.mass)))
            .map_err(serde::de::Error::custom)
    }
}

/// Walks the union of two atom supports in location order, yielding
/// `(location, u_mass, v_mass)`. Locations within the merge tolerance are
/// identified.
pub(crate) fn union_walk<'a>(
    u: &'a Measure,
    v: &'a Measure,
) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
    let tol = u.merge_tol().max(v.merge_tol());
    let mut i = 0;
    let mut j = 0;
    std::iter::from_fn(move || {
        let ua = u.atoms.get(i);
        let va = v.atoms.get(j);
        match (ua, va) {
            (None, None) => None,
            (Some(a), None) => {
                i += 1;
                Some((a.location, a.mass, 0.0))
            }
            (None, Some(b)) => {
                j += 1;
                Some((b.location, 0.0, b.mass))
            }
            (Some(a), Some(b)) => {
                if (a.location - b.location).abs() <= tol {
                    i += 1;
                    j += 1;
                    Some((a.location, a.mass, b.mass))
                } else if a.location < b.location {
                    i += 1;
                    Some((a.location, a.mass, 0.0))
                } else {
                    j += 1;
                    Some((b.location, 0.0, b.mass))
                }
            }
        }
    })
}

/// Total variation distance: half the sum of absolute atomwise differences.
pub fn total_variation(u: &Measure, v: &Measure) -> f64 {
    0.5 * union_walk(u, v)
        .map(|(_, mu, mv)| (mu - mv).abs())
        .sum::<f64>()
}

/// Kolmogorov (uniform CDF) distance over the union of atom locations.
pub fn kolmogorov_distance(u: &Measure, v: &Measure) -> f64 {
    let mut du = 0.0;
    let mut dv = 0.0;
    let mut worst: f64 = 0.0;
    for (_, mu, mv) in union_walk(u, v) {
        du += mu;
        dv += mv;
        worst = worst.max((du - dv).abs());
    }
    worst
}

/// Lévy distance between probability measures: the infimum ε with
/// `D_u(x-ε)-ε ≤ D_v(x) ≤ D_u(x+ε)+ε` for all `x`, bisected to absolute
/// accuracy 1e-9.
pub fn levy_distance(u: &Measure, v: &Measure) -> f64 {
    // One-sided band check: D_a(x) <= D_b(x+eps) + eps for all x. The gap is
    // a right-continuous step function, so it suffices to test values and
    // left limits at the breakpoints of both sides.
    fn band_holds(a: &Measure, b: &Measure, eps: f64) -> bool {
        let candidates = a
            .atoms
            .iter()
            .map(|at| at.location)
            .chain(b.atoms.iter().map(|at| at.location - eps));
        for c in candidates {
            if a.cdf(c) > b.cdf(c + eps) + eps + 1e-15 {
                return false;
            }
            if a.cdf_left(c) > b.cdf_left(c + eps) + eps + 1e-15 {
                return false;
            }
        }
        true
    }
    let feasible = |eps: f64| band_holds(u, v, eps) && band_holds(v, u, eps);

    if feasible(0.0) {
        return 0.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    while hi - lo > LEVY_ACCURACY {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Parametric families available for discretization into atomic measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilySpec {
    /// Uniform density on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Density proportional to `x^k` on `[lo, hi]`.
    Power { k: f64, lo: f64, hi: f64 },
    /// Density proportional to `e^{-rate x}` on `[lo, hi]`.
    TruncatedExponential { rate: f64, lo: f64, hi: f64 },
}

impl FamilySpec {
    fn bounds(&self) -> (f64, f64) {
        match *self {
            FamilySpec::Uniform { lo, hi }
            | FamilySpec::Power { lo, hi, .. }
            | FamilySpec::TruncatedExponential { lo, hi, .. } => (lo, hi),
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds();
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi <= lo {
            return Err(Error::InvalidFamily(format!(
                "bounds [{lo}, {hi}] must satisfy 0 <= lo < hi"
            )));
        }
        match *self {
            FamilySpec::Power { k, lo, .. } => {
                if !k.is_finite() {
                    return Err(Error::InvalidFamily(format!(
                        "power exponent {k} is not finite"
                    )));
                }
                if lo == 0.0 && k <= -1.0 {
                    return Err(Error::InvalidFamily(format!(
                        "density x^{k} is not integrable at 0"
                    )));
                }
            }
            FamilySpec::TruncatedExponential { rate, .. } => {
                if !rate.is_finite() || rate == 0.0 {
                    return Err(Error::InvalidFamily(format!(
                        "exponential rate {rate} must be finite and nonzero"
                    )));
                }
            }
            FamilySpec::Uniform { .. } => {}
        }
        Ok(())
    }

    /// Exact CDF increment of the normalized family over `[c0, c1] ⊆ [lo, hi]`.
    fn cdf_increment(&self, c0: f64, c1: f64) -> f64 {
        match *self {
            FamilySpec::Uniform { lo, hi } => (c1 - c0) / (hi - lo),
            FamilySpec::Power { k, lo, hi } => {
                if k == -1.0 {
                    (c1.ln() - c0.ln()) / (hi.ln() - lo.ln())
                } else {
                    let p = k + 1.0;
                    (c1.powf(p) - c0.powf(p)) / (hi.powf(p) - lo.powf(p))
                }
            }
            FamilySpec::TruncatedExponential { rate, lo, hi } => {
                // (e^{-r c0} - e^{-r c1}) / (e^{-r lo} - e^{-r hi}), written
                // with expm1 so nearly-flat cells keep full precision.
                let num = (-rate * (c1 - c0)).exp_m1();
                let den = (-rate * (hi - lo)).exp_m1();
                (-rate * (c0 - lo)).exp() * num / den
            }
        }
    }

    /// Discretizes into `n` atoms at cell midpoints, each carrying the exact
    /// CDF increment of its cell; total mass is 1 up to rounding.
    pub fn discretize(&self, n: usize) -> Result<Measure> {
        self.validate()?;
        if n < 1 {
            return Err(Error::InvalidFamily("discretization needs n >= 1".into()));
        }
        let (lo, hi) = self.bounds();
        let w = (hi - lo) / n as f64;
        let mut pairs = Vec::with_capacity(n);
        for j in 0..n {
            let c0 = lo + j as f64 * w;
            let c1 = if j + 1 == n {
                hi
            } else {
                lo + (j + 1) as f64 * w
            };
            let mid = lo + (j as f64 + 0.5) * w;
            pairs.push((mid, self.cdf_increment(c0, c1)));
        }
        Measure::from_atoms(pairs)
    }
}
