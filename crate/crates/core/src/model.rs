//! Physical systems, quantum numbers and unit conventions.
//!
//! All parameters default to natural units (ℏ = m = a = ω = I = 1).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Complex, Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants<T> {
    hbar: T,
}

impl<T: Real> Constants<T> {
    pub fn new(hbar: T) -> Result<Self> {
        if !(hbar > T::zero() && hbar.is_finite()) {
            return Err(Error::Domain(format!("hbar must be positive and finite, got {hbar}")));
        }
        Ok(Self { hbar })
    }

    #[inline]
    pub fn hbar(&self) -> T {
        self.hbar
    }

    /// The Heisenberg lower bound ℏ/2.
    #[inline]
    pub fn heisenberg_bound(&self) -> T {
        self.hbar / T::lit(2.0)
    }
}

impl<T: Real> Default for Constants<T> {
    fn default() -> Self {
        Self { hbar: T::one() }
    }
}

/// Which of the three systems a [`SystemSpec`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Box,
    Ring,
    Oscillator,
}

impl SystemKind {
    pub fn tag(self) -> &'static str {
        match self {
            SystemKind::Box => "box",
            SystemKind::Ring => "ring",
            SystemKind::Oscillator => "oscillator",
        }
    }

    /// Smallest admissible quantum number, if bounded below.
    pub fn min_level(self) -> Option<i64> {
        match self {
            SystemKind::Box => Some(1),
            SystemKind::Oscillator => Some(0),
            SystemKind::Ring => None,
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "box" => Ok(SystemKind::Box),
            "ring" => Ok(SystemKind::Ring),
            "oscillator" | "harmonic" | "sho" => Ok(SystemKind::Oscillator),
            other => Err(Error::Config(format!("unknown system '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System<T> {
    /// Infinite square well on `[0, length]`.
    Box { length: T, mass: T },
    /// Free rotation with moment of inertia `I = mR²`.
    Ring { inertia: T },
    /// Potential `½mω²x²`.
    Oscillator { mass: T, omega: T },
}

/// A physical system together with its constants. Parameters are validated
/// positive at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemSpec<T> {
    system: System<T>,
    constants: Constants<T>,
}

fn positive<T: Real>(name: &str, v: T) -> Result<T> {
    if v > T::zero() && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<T: Real> SystemSpec<T> {
    pub fn particle_in_box(length: T, mass: T, constants: Constants<T>) -> Result<Self> {
        Ok(Self { system: System::Box { length: positive("box length", length)?, mass: positive("mass", mass)? }, constants })
    }

    pub fn ring(inertia: T, constants: Constants<T>) -> Result<Self> {
        Ok(Self { system: System::Ring { inertia: positive("moment of inertia", inertia)? }, constants })
    }

    pub fn oscillator(mass: T, omega: T, constants: Constants<T>) -> Result<Self> {
        Ok(Self { system: System::Oscillator { mass: positive("mass", mass)?, omega: positive("omega", omega)? }, constants })
    }

    /// The system in natural units.
    pub fn natural(kind: SystemKind) -> Self {
        let one = T::one();
        let system = match kind {
            SystemKind::Box => System::Box { length: one, mass: one },
            SystemKind::Ring => System::Ring { inertia: one },
            SystemKind::Oscillator => System::Oscillator { mass: one, omega: one },
        };
        Self { system, constants: Constants::default() }
    }

    pub fn system(&self) -> System<T> {
        self.system
    }

    pub fn constants(&self) -> Constants<T> {
        self.constants
    }

    pub fn hbar(&self) -> T {
        self.constants.hbar
    }

    pub fn kind(&self) -> SystemKind {
        match self.system {
            System::Box { .. } => SystemKind::Box,
            System::Ring { .. } => SystemKind::Ring,
            System::Oscillator { .. } => SystemKind::Oscillator,
        }
    }

    /// Inertial parameter of the kinetic term: the mass, or `I` for the ring.
    pub fn inertial_mass(&self) -> T {
        match self.system {
            System::Box { mass, .. } | System::Oscillator { mass, .. } => mass,
            System::Ring { inertia } => inertia,
        }
    }

    /// Potential energy at coordinate `x` (zero inside the box and on the ring).
    pub fn potential(&self, x: T) -> T {
        match self.system {
            System::Oscillator { mass, omega } => T::lit(0.5) * mass * omega * omega * x * x,
            _ => T::zero(),
        }
    }

    /// Builds a validated [`StateIndex`] for this system.
    pub fn state(&self, value: i64) -> Result<StateIndex> {
        validate_state(self, StateIndex::new(value))
    }

    /// Named parameters as `(key, value)` pairs, for report metadata.
    pub fn parameters(&self) -> Vec<(&'static str, T)> {
        let mut out = match self.system {
            System::Box { length, mass } => vec![("length", length), ("mass", mass)],
            System::Ring { inertia } => vec![("inertia", inertia)],
            System::Oscillator { mass, omega } => vec![("mass", mass), ("omega", omega)],
        };
        out.push(("hbar", self.constants.hbar));
        out
    }
}

/// An integer quantum number: `n` for the box and oscillator, `m` for the ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateIndex(i64);

impl StateIndex {
    /// An unchecked index; use [`validate_state`] or [`SystemSpec::state`].
    pub const fn new(value: i64) -> Self {
        Self(value)
    }

    pub const fn value(self) -> i64 {
        self.0
    }
}

/// Returns `idx` unchanged when it is admissible for `spec`: box `n ≥ 1`,
/// oscillator `n ≥ 0`, ring any integer.
pub fn validate_state<T: Real>(spec: &SystemSpec<T>, idx: StateIndex) -> Result<StateIndex> {
    match spec.kind().min_level() {
        Some(min) if idx.0 < min => Err(Error::Domain(format!("{} quantum number must be >= {min}, got {}", spec.kind(), idx.0))),
        _ => Ok(idx),
    }
}

/// Interior nodes of the eigenfunction: `n − 1` for the box, `n` for the
/// oscillator and `2|m|` zeros of `Re ψ_m = cos(mθ)/√(2π)` over one period for
/// the ring. Assumes a validated index.
pub fn predicted_node_count<T: Real>(spec: &SystemSpec<T>, idx: StateIndex) -> usize {
    let v = idx.0;
    match spec.kind() {
        SystemKind::Box => (v - 1).max(0) as usize,
        SystemKind::Oscillator => v.max(0) as usize,
        SystemKind::Ring => 2 * v.unsigned_abs() as usize,
    }
}

/// Normalized superposition `Σ c_k ψ_{m_k}` of ring eigenstates.
#[derive(Debug, Clone, PartialEq)]
pub struct RingSuperposition<T> {
    terms: Vec<(i64, Complex<T>)>,
}

impl<T: Real> RingSuperposition<T> {
    pub fn new(terms: Vec<(i64, Complex<T>)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Domain("superposition needs at least one term".into()));
        }
        for (i, (m, _)) in terms.iter().enumerate() {
            if terms[..i].iter().any(|(other, _)| other == m) {
                return Err(Error::Domain(format!("duplicate m = {m} in superposition")));
            }
        }
        let norm = terms.iter().fold(T::zero(), |acc, (_, c)| acc + c.norm_sqr());
        let tolerance = T::lit(1e-12).max(T::lit(16.0) * T::epsilon());
        if (norm - T::one()).abs() > tolerance {
            return Err(Error::Normalization { norm: norm.to_f64_lossy(), tolerance: tolerance.to_f64_lossy() });
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(i64, Complex<T>)] {
        &self.terms
    }
}

/// A ring state: a single `m` eigenstate or a superposition.
#[derive(Debug, Clone, PartialEq)]
pub enum RingState<T> {
    Definite(i64),
    Superposition(RingSuperposition<T>),
}

impl<T: Real> RingState<T> {
    /// `(m, c)` pairs; a definite state is the single term `(m, 1)`.
    pub fn terms(&self) -> Vec<(i64, Complex<T>)> {
        match self {
            RingState::Definite(m) => vec![(*m, Complex::new(T::one(), T::zero()))],
            RingState::Superposition(s) => s.terms.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural(kind: SystemKind) -> SystemSpec<f64> {
        SystemSpec::natural(kind)
    }

    #[test]
    fn validate_state_bounds() {
        let b = natural(SystemKind::Box);
        assert_eq!(validate_state(&b, StateIndex::new(1)), Ok(StateIndex::new(1)));
        assert!(matches!(validate_state(&b, StateIndex::new(0)), Err(Error::Domain(_))));
        let r = natural(SystemKind::Ring);
        assert_eq!(validate_state(&r, StateIndex::new(-3)).unwrap().value(), -3);
        let o = natural(SystemKind::Oscillator);
        assert!(validate_state(&o, StateIndex::new(0)).is_ok());
        assert!(validate_state(&o, StateIndex::new(-1)).is_err());
    }

    #[test]
    fn validate_state_is_idempotent() {
        for kind in [SystemKind::Box, SystemKind::Ring, SystemKind::Oscillator] {
            let spec = natural(kind);
            for v in -5..=5 {
                if let Ok(once) = validate_state(&spec, StateIndex::new(v)) {
                    assert_eq!(validate_state(&spec, once), Ok(once));
                }
            }
        }
    }

    #[test]
    fn node_count_predictions() {
        let b = natural(SystemKind::Box);
        let o = natural(SystemKind::Oscillator);
        let r = natural(SystemKind::Ring);
        assert_eq!(predicted_node_count(&b, StateIndex::new(1)), 0);
        assert_eq!(predicted_node_count(&o, StateIndex::new(3)), 3);
        assert_eq!(predicted_node_count(&r, StateIndex::new(2)), 4);
        assert_eq!(predicted_node_count(&r, StateIndex::new(-2)), 4);
        for v in 1..40 {
            assert!(predicted_node_count(&b, StateIndex::new(v + 1)) >= predicted_node_count(&b, StateIndex::new(v)));
            assert!(predicted_node_count(&o, StateIndex::new(v + 1)) >= predicted_node_count(&o, StateIndex::new(v)));
            assert!(predicted_node_count(&r, StateIndex::new(-v - 1)) >= predicted_node_count(&r, StateIndex::new(v)));
        }
    }

    #[test]
    fn parameters_must_be_positive() {
        let c = Constants::default();
        assert!(SystemSpec::particle_in_box(0.0, 1.0, c).is_err());
        assert!(SystemSpec::ring(-1.0, c).is_err());
        assert!(SystemSpec::oscillator(1.0, f64::NAN, c).is_err());
        assert!(Constants::new(0.0f64).is_err());
    }

    #[test]
    fn superposition_validation() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ok = RingSuperposition::new(vec![(1, Complex::new(h, 0.0)), (-1, Complex::new(0.0, h))]);
        assert!(ok.is_ok());
        let dup = RingSuperposition::new(vec![(1, Complex::new(h, 0.0)), (1, Complex::new(h, 0.0))]);
        assert!(matches!(dup, Err(Error::Domain(_))));
        let unnormalized = RingSuperposition::new(vec![(0, Complex::new(0.5, 0.0)), (2, Complex::new(0.5, 0.0))]);
        assert!(matches!(unnormalized, Err(Error::Normalization { .. })));
    }
}
