//! Closed-form wavefunctions, energies, expectation values and uncertainties.

use serde::{Deserialize, Serialize};

use crate::model::{predicted_node_count, validate_state, RingState, StateIndex, System, SystemKind, SystemSpec};
use crate::{Complex, Error, Real, Result};

/// Which computation route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Oracle,
    Eigen,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Analytic => "analytic",
            Provenance::Oracle => "oracle",
            Provenance::Eigen => "eigen",
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(Provenance::Analytic),
            "oracle" => Ok(Provenance::Oracle),
            "eigen" => Ok(Provenance::Eigen),
            other => Err(Error::Config(format!("unknown path '{other}'"))),
        }
    }
}

/// First and second moments of the coordinate `q` (x, or θ on the ring) and
/// its conjugate momentum `p` (p, or L_z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationSet<T> {
    pub mean_q: T,
    pub mean_q2: T,
    pub mean_p: T,
    pub mean_p2: T,
    pub provenance: Provenance,
}

impl<T: Real> ExpectationSet<T> {
    pub fn variance_q(&self) -> T {
        self.mean_q2 - self.mean_q * self.mean_q
    }

    pub fn variance_p(&self) -> T {
        self.mean_p2 - self.mean_p * self.mean_p
    }
}

/// Uncertainties of one state. For ring states `delta_q` is Δθ and `delta_p`
/// is ΔL_z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyRecord<T> {
    pub delta_q: T,
    pub delta_p: T,
    pub product: T,
    /// ℏ/2.
    pub bound: T,
    pub energy: T,
    pub nodes_predicted: usize,
    /// Sign changes measured on a sampled state, when one was sampled.
    pub nodes_counted: Option<usize>,
    pub provenance: Provenance,
}

impl<T: Real> UncertaintyRecord<T> {
    /// `product ≥ bound − slack`.
    pub fn satisfies_bound(&self, slack: T) -> bool {
        self.product >= self.bound - slack
    }
}

fn require_kind<T: Real>(spec: &SystemSpec<T>, kind: SystemKind, op: &str) -> Result<()> {
    if spec.kind() == kind {
        Ok(())
    } else {
        Err(Error::Domain(format!("{op} requires a {kind} system, got {}", spec.kind())))
    }
}

fn box_params<T: Real>(spec: &SystemSpec<T>, n: i64, op: &str) -> Result<(T, T, T)> {
    require_kind(spec, SystemKind::Box, op)?;
    validate_state(spec, StateIndex::new(n))?;
    let System::Box { length, mass } = spec.system() else { unreachable!() };
    Ok((length, mass, T::from_level(n)))
}

fn oscillator_params<T: Real>(spec: &SystemSpec<T>, n: i64, op: &str) -> Result<(T, T, T)> {
    require_kind(spec, SystemKind::Oscillator, op)?;
    validate_state(spec, StateIndex::new(n))?;
    let System::Oscillator { mass, omega } = spec.system() else { unreachable!() };
    Ok((mass, omega, T::from_level(n) + T::lit(0.5)))
}

fn ring_inertia<T: Real>(spec: &SystemSpec<T>, op: &str) -> Result<T> {
    require_kind(spec, SystemKind::Ring, op)?;
    let System::Ring { inertia } = spec.system() else { unreachable!() };
    Ok(inertia)
}

// ---------------------------------------------------------------------------
// particle in a box

/// `√(2/a) sin(nπx/a)` on `0 ≤ x ≤ a`.
pub fn box_psi<T: Real>(spec: &SystemSpec<T>, n: i64, x: T) -> Result<T> {
    let (a, _, nf) = box_params(spec, n, "box_psi")?;
    if !(x >= T::zero() && x <= a) {
        return Err(Error::Domain(format!("x = {x} outside the box [0, {a}]")));
    }
    Ok((T::lit(2.0) / a).sqrt() * (nf * T::PI() * x / a).sin())
}

pub fn box_energy<T: Real>(spec: &SystemSpec<T>, n: i64) -> Result<T> {
    let (a, m, nf) = box_params(spec, n, "box_energy")?;
    let hbar = spec.hbar();
    Ok(hbar * hbar * nf * nf * T::PI() * T::PI() / (T::lit(2.0) * m * a * a))
}

/// `⟨x⟩ = a/2`, `⟨x²⟩ = a²(1/3 − 1/(2n²π²))`, `⟨p⟩ = 0`, `⟨p²⟩ = ℏ²n²π²/a²`.
pub fn box_expectations<T: Real>(spec: &SystemSpec<T>, n: i64) -> Result<ExpectationSet<T>> {
    let (a, _, nf) = box_params(spec, n, "box_expectations")?;
    let hbar = spec.hbar();
    let pi = T::PI();
    let k = hbar * nf * pi / a;
    Ok(ExpectationSet {
        mean_q: a / T::lit(2.0),
        mean_q2: a * a * (T::one() / T::lit(3.0) - T::one() / (T::lit(2.0) * nf * nf * pi * pi)),
        mean_p: T::zero(),
        mean_p2: k * k,
        provenance: Provenance::Analytic,
    })
}

fn box_width_factor<T: Real>(nf: T) -> T {
    let pi = T::PI();
    (T::one() / T::lit(12.0) - T::one() / (T::lit(2.0) * nf * nf * pi * pi)).sqrt()
}

/// `Δx = a√(1/12 − 1/(2n²π²))`, `Δp = ℏnπ/a`, `ΔxΔp = ℏnπ√(1/12 − 1/(2n²π²))`.
pub fn box_uncertainties<T: Real>(spec: &SystemSpec<T>, n: i64) -> Result<UncertaintyRecord<T>> {
    let (a, _, nf) = box_params(spec, n, "box_uncertainties")?;
    let hbar = spec.hbar();
    let width = box_width_factor(nf);
    Ok(UncertaintyRecord {
        delta_q: a * width,
        delta_p: hbar * nf * T::PI() / a,
        product: hbar * nf * T::PI() * width,
        bound: spec.constants().heisenberg_bound(),
        energy: box_energy(spec, n)?,
        nodes_predicted: predicted_node_count(spec, StateIndex::new(n)),
        nodes_counted: None,
        provenance: Provenance::Analytic,
    })
}

// ---------------------------------------------------------------------------
// particle on a ring

/// `e^{imθ}/√(2π)`; θ is reduced into `[0, 2π)` first.
pub fn ring_psi<T: Real>(spec: &SystemSpec<T>, m: i64, theta: T) -> Result<Complex<T>> {
    ring_inertia(spec, "ring_psi")?;
    Ok(ring_eigenfunction(m, theta))
}

pub(crate) fn ring_eigenfunction<T: Real>(m: i64, theta: T) -> Complex<T> {
    let tau = T::TAU();
    let reduced = theta - tau * (theta / tau).floor();
    let phase = T::from_level(m) * reduced;
    Complex::new(phase.cos(), phase.sin()).scale(T::one() / tau.sqrt())
}

/// `m²ℏ²/(2I)`.
pub fn ring_energy<T: Real>(spec: &SystemSpec<T>, m: i64) -> Result<T> {
    let inertia = ring_inertia(spec, "ring_energy")?;
    let hbar = spec.hbar();
    let mf = T::from_level(m);
    Ok(mf * mf * hbar * hbar / (T::lit(2.0) * inertia))
}

/// `|ψ_m(θ)|² = 1/(2π)` for every `m` and `θ`.
pub fn ring_density<T: Real>(spec: &SystemSpec<T>, _m: i64, _theta: T) -> Result<T> {
    ring_inertia(spec, "ring_density")?;
    Ok(T::one() / T::TAU())
}

/// `(⟨L_z⟩, ΔL_z)`: `(mℏ, 0)` for a definite state, the weighted mean and
/// standard deviation of `mℏ` over `|c_m|²` for a superposition.
pub fn ring_lz_stats<T: Real>(spec: &SystemSpec<T>, state: &RingState<T>) -> Result<(T, T)> {
    ring_inertia(spec, "ring_lz_stats")?;
    let hbar = spec.hbar();
    let terms = state.terms();
    let mean = terms.iter().fold(T::zero(), |acc, (m, c)| acc + c.norm_sqr() * T::from_level(*m));
    let variance = terms.iter().fold(T::zero(), |acc, (m, c)| {
        let d = T::from_level(*m) - mean;
        acc + c.norm_sqr() * d * d
    });
    Ok((hbar * mean, hbar * variance.sqrt()))
}

/// `(mean θ, Δθ)` of `|ψ(θ)|²` taken as a density on the fixed branch
/// `[0, 2π)`. Uniform density gives `(π, 2π/√12)`.
///
/// For a superposition the density is `(1/2π)|Σ c_k e^{i m_k θ}|²` and the
/// moments follow from `∫₀^{2π} θ e^{iqθ} dθ = −2πi/q` and
/// `∫₀^{2π} θ² e^{iqθ} dθ = −4π²i/q + 4π/q²` for nonzero integer `q`.
pub fn ring_theta_stats<T: Real>(spec: &SystemSpec<T>, state: &RingState<T>) -> Result<(T, T)> {
    ring_inertia(spec, "ring_theta_stats")?;
    let pi = T::PI();
    let tau = T::TAU();
    let terms = state.terms();
    let weight = terms.iter().fold(T::zero(), |acc, (_, c)| acc + c.norm_sqr());
    // diagonal part: uniform density of total weight `weight`
    let mut first = weight * tau * pi;
    let mut second = weight * T::lit(8.0) * pi * pi * pi / T::lit(3.0);
    for (j, (mj, cj)) in terms.iter().enumerate() {
        for (k, (mk, ck)) in terms.iter().enumerate() {
            if j == k {
                continue;
            }
            let q = T::from_level(mj - mk);
            let amp = *cj * ck.conj();
            let first_int = Complex::new(T::zero(), -tau / q);
            let second_int = Complex::new(T::lit(4.0) * pi / (q * q), -T::lit(4.0) * pi * pi / q);
            first = first + (amp * first_int).re;
            second = second + (amp * second_int).re;
        }
    }
    let mean = first / tau;
    let mean_sq = second / tau;
    Ok((mean, (mean_sq - mean * mean).max(T::zero()).sqrt()))
}

/// Expectation set `(⟨θ⟩, ⟨θ²⟩, ⟨L_z⟩, ⟨L_z²⟩)` of a ring state.
pub fn ring_expectations<T: Real>(spec: &SystemSpec<T>, state: &RingState<T>) -> Result<ExpectationSet<T>> {
    let (mean_theta, delta_theta) = ring_theta_stats(spec, state)?;
    let (mean_lz, delta_lz) = ring_lz_stats(spec, state)?;
    Ok(ExpectationSet {
        mean_q: mean_theta,
        mean_q2: delta_theta * delta_theta + mean_theta * mean_theta,
        mean_p: mean_lz,
        mean_p2: delta_lz * delta_lz + mean_lz * mean_lz,
        provenance: Provenance::Analytic,
    })
}

/// Record for a definite-`m` ring state: Δθ from [`ring_theta_stats`], ΔL_z = 0.
/// The product is reported but carries no bound claim.
pub fn ring_uncertainties<T: Real>(spec: &SystemSpec<T>, m: i64) -> Result<UncertaintyRecord<T>> {
    let state = RingState::Definite(m);
    let (_, delta_theta) = ring_theta_stats(spec, &state)?;
    let (_, delta_lz) = ring_lz_stats(spec, &state)?;
    Ok(UncertaintyRecord {
        delta_q: delta_theta,
        delta_p: delta_lz,
        product: delta_theta * delta_lz,
        bound: spec.constants().heisenberg_bound(),
        energy: ring_energy(spec, m)?,
        nodes_predicted: predicted_node_count(spec, StateIndex::new(m)),
        nodes_counted: None,
        provenance: Provenance::Analytic,
    })
}

// ---------------------------------------------------------------------------
// harmonic oscillator

/// `(n + ½)ℏω`.
pub fn oscillator_energy<T: Real>(spec: &SystemSpec<T>, n: i64) -> Result<T> {
    let (_, omega, level) = oscillator_params(spec, n, "oscillator_energy")?;
    Ok(level * spec.hbar() * omega)
}

/// `⟨x⟩ = ⟨p⟩ = 0`, `⟨x²⟩ = ℏ(n+½)/(mω)`, `⟨p²⟩ = mℏω(n+½)`.
pub fn oscillator_expectations<T: Real>(spec: &SystemSpec<T>, n: i64) -> Result<ExpectationSet<T>> {
    let (mass, omega, level) = oscillator_params(spec, n, "oscillator_expectations")?;
    let hbar = spec.hbar();
    Ok(ExpectationSet {
        mean_q: T::zero(),
        mean_q2: hbar * level / (mass * omega),
        mean_p: T::zero(),
        mean_p2: mass * hbar * omega * level,
        provenance: Provenance::Analytic,
    })
}

/// `Δx = √(ℏ(n+½)/(mω))`, `Δp = √(mℏω(n+½))`, `ΔxΔp = ℏ(n+½)`.
pub fn oscillator_uncertainties<T: Real>(spec: &SystemSpec<T>, n: i64) -> Result<UncertaintyRecord<T>> {
    let (mass, omega, level) = oscillator_params(spec, n, "oscillator_uncertainties")?;
    let hbar = spec.hbar();
    Ok(UncertaintyRecord {
        delta_q: (hbar * level / (mass * omega)).sqrt(),
        delta_p: (mass * hbar * omega * level).sqrt(),
        product: hbar * level,
        bound: spec.constants().heisenberg_bound(),
        energy: level * hbar * omega,
        nodes_predicted: predicted_node_count(spec, StateIndex::new(n)),
        nodes_counted: None,
        provenance: Provenance::Analytic,
    })
}

// ---------------------------------------------------------------------------
// dispatch

pub fn energy<T: Real>(spec: &SystemSpec<T>, level: i64) -> Result<T> {
    match spec.kind() {
        SystemKind::Box => box_energy(spec, level),
        SystemKind::Ring => ring_energy(spec, level),
        SystemKind::Oscillator => oscillator_energy(spec, level),
    }
}

pub fn uncertainties<T: Real>(spec: &SystemSpec<T>, level: i64) -> Result<UncertaintyRecord<T>> {
    match spec.kind() {
        SystemKind::Box => box_uncertainties(spec, level),
        SystemKind::Ring => ring_uncertainties(spec, level),
        SystemKind::Oscillator => oscillator_uncertainties(spec, level),
    }
}

/// The eigenfunction of `spec` at `level`, evaluated at `q`. Real for the box
/// and oscillator.
pub fn wavefunction<T: Real>(spec: &SystemSpec<T>, level: i64, q: T) -> Result<Complex<T>> {
    match spec.kind() {
        SystemKind::Box => box_psi(spec, level, q).map(|v| Complex::new(v, T::zero())),
        SystemKind::Ring => ring_psi(spec, level, q),
        SystemKind::Oscillator => crate::special::oscillator_psi(spec, level, q).map(|v| Complex::new(v, T::zero())),
    }
}
