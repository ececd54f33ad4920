//! Quadrature route: samples wavefunctions on uniform grids and computes
//! moments, uncertainties and energies numerically.
//!
//! Integrals use composite Simpson on closed grids and the trapezoid rule on
//! periodic grids. Derivatives use eighth-order central differences; points
//! beyond the grid come from the boundary policy (odd reflection at a
//! Dirichlet wall, zero outside an open domain, wraparound on a ring).

use serde::Serialize;

use crate::analytic::{self, Provenance, UncertaintyRecord};
use crate::model::{predicted_node_count, validate_state, RingState, StateIndex, System, SystemKind, SystemSpec};
use crate::nodes::{count_nodes, NodePolicy};
use crate::{Complex, Error, Real, Result};

/// Largest tolerated deviation of `∫|ψ|²` from one.
pub const NORMALIZATION_TOL: f64 = 1e-6;
/// Largest tolerated relative change of `⟨p²⟩` between spacing `h` and `2h`.
pub const RESOLUTION_TOL: f64 = 1e-5;
pub const DEFAULT_POINTS: usize = 4001;
pub const DEFAULT_RING_POINTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    /// ψ vanishes at both ends (box walls).
    Dirichlet,
    /// ψ(upper) = ψ(lower); the upper endpoint is not a grid point.
    Periodic,
    /// Truncated infinite domain; ψ taken as zero outside.
    Open,
}

impl Boundary {
    pub fn for_system(kind: SystemKind) -> Self {
        match kind {
            SystemKind::Box => Boundary::Dirichlet,
            SystemKind::Ring => Boundary::Periodic,
            SystemKind::Oscillator => Boundary::Open,
        }
    }
}

/// Uniform grid. Closed grids include both endpoints and need an odd point
/// count; periodic grids exclude the upper endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    lower: T,
    upper: T,
    points: usize,
    boundary: Boundary,
}

impl<T: Real> GridSpec<T> {
    pub fn new(lower: T, upper: T, points: usize, boundary: Boundary) -> Result<Self> {
        if !(upper > lower && lower.is_finite() && upper.is_finite()) {
            return Err(Error::Grid(format!("grid needs finite bounds with upper > lower, got [{lower}, {upper}]")));
        }
        if points < 3 {
            return Err(Error::Grid(format!("grid needs at least 3 points, got {points}")));
        }
        if boundary != Boundary::Periodic && points.is_multiple_of(2) {
            return Err(Error::Grid(format!("composite Simpson needs an odd point count, got {points}")));
        }
        Ok(Self { lower, upper, points, boundary })
    }

    pub fn lower(&self) -> T {
        self.lower
    }

    pub fn upper(&self) -> T {
        self.upper
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spacing(&self) -> T {
        let intervals = match self.boundary {
            Boundary::Periodic => self.points,
            _ => self.points - 1,
        };
        (self.upper - self.lower) / T::from_count(intervals)
    }

    pub fn coord(&self, i: usize) -> T {
        if self.boundary != Boundary::Periodic && i == self.points - 1 {
            self.upper
        } else {
            self.lower + T::from_count(i) * self.spacing()
        }
    }

    pub fn coords(&self) -> Vec<T> {
        (0..self.points).map(|i| self.coord(i)).collect()
    }

    /// Same domain with twice the resolution (spacing halved).
    pub fn refined(&self) -> Self {
        let points = match self.boundary {
            Boundary::Periodic => 2 * self.points,
            _ => 2 * self.points - 1,
        };
        Self { points, ..*self }
    }

    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.lower, self.upper, points, self.boundary)
    }
}

/// Half-width of the truncated oscillator domain, in units of `√(ℏ/mω)`.
pub fn oscillator_half_width(max_level: i64) -> f64 {
    (8.0 * (2.0 * max_level.max(0) as f64 + 1.0).sqrt()).max(12.0)
}

/// Default grid resolving every level up to `max_level`: `[0, a]` for the
/// box, `[0, 2π)` for the ring, `±max(8√(2n+1), 12)·√(ℏ/mω)` for the
/// oscillator. `points` overrides the default count.
pub fn default_grid<T: Real>(spec: &SystemSpec<T>, max_level: i64, points: Option<usize>) -> Result<GridSpec<T>> {
    match spec.system() {
        System::Box { length, .. } => GridSpec::new(T::zero(), length, points.unwrap_or(DEFAULT_POINTS), Boundary::Dirichlet),
        System::Ring { .. } => GridSpec::new(T::zero(), T::TAU(), points.unwrap_or(DEFAULT_RING_POINTS), Boundary::Periodic),
        System::Oscillator { mass, omega } => {
            let half = T::lit(oscillator_half_width(max_level)) * (spec.hbar() / (mass * omega)).sqrt();
            GridSpec::new(-half, half, points.unwrap_or(DEFAULT_POINTS), Boundary::Open)
        }
    }
}

/// Quadrature weights (without the factor `h`) for `n` equally spaced
/// points on a closed interval: composite Simpson, finishing with Simpson's
/// 3/8 rule when the interval count is odd.
fn closed_weights<T: Real>(n: usize) -> Vec<T> {
    let mut w = vec![T::zero(); n];
    let intervals = n - 1;
    let third = T::one() / T::lit(3.0);
    let simpson_end = if intervals.is_multiple_of(2) { intervals } else { intervals.saturating_sub(3) };
    let mut i = 0;
    while i + 2 <= simpson_end {
        w[i] = w[i] + third;
        w[i + 1] = w[i + 1] + T::lit(4.0) * third;
        w[i + 2] = w[i + 2] + third;
        i += 2;
    }
    if simpson_end < intervals {
        let e = T::lit(3.0 / 8.0);
        let s = simpson_end;
        w[s] = w[s] + e;
        w[s + 1] = w[s + 1] + T::lit(3.0) * e;
        w[s + 2] = w[s + 2] + T::lit(3.0) * e;
        w[s + 3] = w[s + 3] + e;
    }
    w
}

fn closed_integral<T: Real>(h: T, values: &[T]) -> T {
    let w = closed_weights::<T>(values.len());
    h * w.iter().zip(values).fold(T::zero(), |acc, (&wi, &v)| acc + wi * v)
}

/// Integral of `values` sampled on `grid`: composite Simpson on closed grids,
/// trapezoid (spectrally accurate for smooth periodic integrands) on periodic
/// grids.
pub fn quad<T: Real>(grid: &GridSpec<T>, values: &[T]) -> Result<T> {
    if values.len() != grid.points {
        return Err(Error::Grid(format!("{} samples for a {}-point grid", values.len(), grid.points)));
    }
    let h = grid.spacing();
    match grid.boundary {
        Boundary::Periodic => Ok(h * values.iter().fold(T::zero(), |acc, &v| acc + v)),
        _ => {
            if grid.points.is_multiple_of(2) {
                return Err(Error::Grid(format!("composite Simpson needs an odd point count, got {}", grid.points)));
            }
            Ok(closed_integral(h, values))
        }
    }
}

/// Integral of a non-periodic integrand (such as `θ·ρ(θ)`) over the full
/// domain; on periodic grids the wraparound sample closes the interval.
fn integrate_open_integrand<T: Real>(grid: &GridSpec<T>, f: impl Fn(T, usize) -> T) -> T {
    let h = grid.spacing();
    match grid.boundary {
        Boundary::Periodic => {
            let vals: Vec<T> = (0..=grid.points).map(|i| f(grid.lower + T::from_count(i) * h, i % grid.points)).collect();
            closed_integral(h, &vals)
        }
        _ => {
            let vals: Vec<T> = (0..grid.points).map(|i| f(grid.coord(i), i)).collect();
            closed_integral(h, &vals)
        }
    }
}

/// Complex samples of a state on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction<T> {
    grid: GridSpec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(grid: GridSpec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.points {
            return Err(Error::Grid(format!("{} samples for a {}-point grid", values.len(), grid.points)));
        }
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: GridSpec<T>, values: Vec<T>) -> Result<Self> {
        Self::new(grid, values.into_iter().map(|v| Complex::new(v, T::zero())).collect())
    }

    pub fn from_fn(grid: GridSpec<T>, f: impl Fn(T) -> Result<Complex<T>>) -> Result<Self> {
        let values = grid.coords().into_iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn real_part(&self) -> Vec<T> {
        self.values.iter().map(|z| z.re).collect()
    }

    pub fn density(&self) -> Vec<T> {
        self.values.iter().map(|z| z.norm_sqr()).collect()
    }

    /// `∫|ψ|²`.
    pub fn norm_sqr(&self) -> T {
        quad(&self.grid, &self.density()).expect("grid validated at construction")
    }

    /// Rescales so that `∫|ψ|² = 1`.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm_sqr();
        if !(norm > T::zero() && norm.is_finite()) {
            return Err(Error::Degenerate(format!("cannot normalize a state with integral {norm}")));
        }
        let s = T::one() / norm.sqrt();
        for z in &mut self.values {
            *z = z.scale(s);
        }
        Ok(self)
    }

    fn check_normalized(&self) -> Result<()> {
        let norm = self.norm_sqr();
        let tolerance = T::lit(NORMALIZATION_TOL);
        if (norm - T::one()).abs() > tolerance || !norm.is_finite() {
            return Err(Error::Normalization { norm: norm.to_f64_lossy(), tolerance: NORMALIZATION_TOL });
        }
        Ok(())
    }

    /// Sample at signed index `i`, continuing past the ends by the boundary policy.
    fn ghost(&self, i: isize) -> Complex<T> {
        let n = self.values.len() as isize;
        if (0..n).contains(&i) {
            return self.values[i as usize];
        }
        match self.grid.boundary {
            Boundary::Periodic => self.values[i.rem_euclid(n) as usize],
            Boundary::Open => Complex::new(T::zero(), T::zero()),
            Boundary::Dirichlet => {
                let mirrored = if i < 0 { -i } else { 2 * (n - 1) - i };
                if (0..n).contains(&mirrored) {
                    -self.values[mirrored as usize]
                } else {
                    Complex::new(T::zero(), T::zero())
                }
            }
        }
    }

    /// Eighth-order central first derivative with stencil step `step·h`.
    pub fn derivative(&self, step: usize) -> Vec<Complex<T>> {
        const C: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
        let h = self.grid.spacing() * T::from_count(step);
        let s = step as isize;
        (0..self.values.len() as isize)
            .map(|i| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (k, &c) in C.iter().enumerate() {
                    let off = (k as isize + 1) * s;
                    acc = acc + (self.ghost(i + off) - self.ghost(i - off)).scale(T::lit(c));
                }
                acc.unscale(h)
            })
            .collect()
    }

    /// Eighth-order central second derivative.
    pub fn second_derivative(&self) -> Vec<Complex<T>> {
        const C: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
        let h = self.grid.spacing();
        (0..self.values.len() as isize)
            .map(|i| {
                let mut acc = self.ghost(i).scale(T::lit(C[0]));
                for (k, &c) in C.iter().enumerate().skip(1) {
                    let off = k as isize;
                    acc = acc + (self.ghost(i + off) + self.ghost(i - off)).scale(T::lit(c));
                }
                acc.unscale(h * h)
            })
            .collect()
    }
}

/// Samples the `level` eigenfunction of `spec` on `grid`.
pub fn sample_state<T: Real>(spec: &SystemSpec<T>, level: i64, grid: &GridSpec<T>) -> Result<SampledFunction<T>> {
    validate_state(spec, StateIndex::new(level))?;
    SampledFunction::from_fn(*grid, |q| analytic::wavefunction(spec, level, q))
}

/// Samples a ring state (definite or superposed) on a periodic grid.
pub fn sample_ring_state<T: Real>(state: &RingState<T>, grid: &GridSpec<T>) -> Result<SampledFunction<T>> {
    let terms = state.terms();
    SampledFunction::from_fn(*grid, |theta| {
        Ok(terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (m, c)| acc + *c * analytic::ring_eigenfunction(*m, theta)))
    })
}

/// First moment, second moment and centred variance of one observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    pub mean: T,
    pub mean_sq: T,
    pub variance: T,
}

fn position_stats<T: Real>(psi: &SampledFunction<T>) -> Result<Moments<T>> {
    psi.check_normalized()?;
    let rho = psi.density();
    let grid = psi.grid;
    let mean = integrate_open_integrand(&grid, |q, i| q * rho[i]);
    let mean_sq = integrate_open_integrand(&grid, |q, i| q * q * rho[i]);
    let variance = integrate_open_integrand(&grid, |q, i| (q - mean) * (q - mean) * rho[i]);
    Ok(Moments { mean, mean_sq, variance })
}

/// `(⟨q⟩, ⟨q²⟩)` by quadrature of `q|ψ|²` and `q²|ψ|²`. On a ring `q` is θ on
/// the branch `[lower, upper)`.
pub fn position_moments<T: Real>(psi: &SampledFunction<T>) -> Result<(T, T)> {
    position_stats(psi).map(|m| (m.mean, m.mean_sq))
}

fn momentum_stats<T: Real>(psi: &SampledFunction<T>, hbar: T) -> Result<Moments<T>> {
    psi.check_normalized()?;
    let grid = psi.grid;
    let d = psi.derivative(1);
    // Re ∫ψ*(−iℏψ′) = ℏ ∫ Im(ψ*ψ′)
    let current: Vec<T> = psi.values.iter().zip(&d).map(|(p, dp)| (p.conj() * dp).im).collect();
    let mean = hbar * quad(&grid, &current)?;
    let grad: Vec<T> = d.iter().map(|z| z.norm_sqr()).collect();
    let mean_sq = hbar * hbar * quad(&grid, &grad)?;
    let spread: Vec<T> =
        psi.values.iter().zip(&d).map(|(p, dp)| (Complex::new(T::zero(), -hbar) * dp - p.scale(mean)).norm_sqr()).collect();
    let variance = quad(&grid, &spread)?;

    if grid.points >= 17 {
        let coarse: Vec<T> = psi.derivative(2).iter().map(|z| z.norm_sqr()).collect();
        let coarse_sq = hbar * hbar * quad(&grid, &coarse)?;
        let scale = mean_sq.abs().max(hbar * hbar / (grid.upper - grid.lower).powi(2));
        let disagreement = (coarse_sq - mean_sq).abs() / scale;
        if disagreement > T::lit(RESOLUTION_TOL) {
            return Err(Error::Grid(format!(
                "grid too coarse: <p^2> changes by {:.2e} (relative) between spacing h and 2h",
                disagreement.to_f64_lossy()
            )));
        }
    }
    Ok(Moments { mean, mean_sq, variance })
}

/// `(⟨p⟩, ⟨p²⟩)` with `⟨p²⟩ = ℏ²∫|ψ′|²`. Fails with a grid error when the
/// derivative is under-resolved.
pub fn momentum_moments<T: Real>(psi: &SampledFunction<T>, hbar: T) -> Result<(T, T)> {
    momentum_stats(psi, hbar).map(|m| (m.mean, m.mean_sq))
}

/// `⟨p²⟩` in the second-derivative form `−ℏ² Re ∫ψ*ψ″`.
pub fn momentum_sq_second_derivative<T: Real>(psi: &SampledFunction<T>, hbar: T) -> Result<T> {
    psi.check_normalized()?;
    let d2 = psi.second_derivative();
    let integrand: Vec<T> = psi.values.iter().zip(&d2).map(|(p, q)| (p.conj() * q).re).collect();
    Ok(-hbar * hbar * quad(&psi.grid, &integrand)?)
}

/// All four moments of a sampled state.
pub fn oracle_expectations<T: Real>(psi: &SampledFunction<T>, hbar: T) -> Result<analytic::ExpectationSet<T>> {
    let pos = position_stats(psi)?;
    let mom = momentum_stats(psi, hbar)?;
    Ok(analytic::ExpectationSet {
        mean_q: pos.mean,
        mean_q2: pos.mean_sq,
        mean_p: mom.mean,
        mean_p2: mom.mean_sq,
        provenance: Provenance::Oracle,
    })
}

fn check_grid_matches<T: Real>(spec: &SystemSpec<T>, grid: &GridSpec<T>) -> Result<()> {
    let want = Boundary::for_system(spec.kind());
    if grid.boundary != want {
        return Err(Error::Grid(format!("{} needs a {want:?} grid, got {:?}", spec.kind(), grid.boundary)));
    }
    Ok(())
}

/// Uncertainty record of an arbitrary sampled state of `spec`: centred
/// variances, energy `⟨p²⟩/2m + ∫V|ψ|²`, and sign changes of `Re ψ`.
pub fn sampled_uncertainties<T: Real>(
    spec: &SystemSpec<T>,
    psi: &SampledFunction<T>,
    nodes_predicted: usize,
    provenance: Provenance,
) -> Result<UncertaintyRecord<T>> {
    check_grid_matches(spec, &psi.grid)?;
    let hbar = spec.hbar();
    let pos = position_stats(psi)?;
    let mom = momentum_stats(psi, hbar)?;
    let potential: Vec<T> = psi.grid.coords().into_iter().zip(psi.density()).map(|(q, r)| spec.potential(q) * r).collect();
    let energy = mom.mean_sq / (T::lit(2.0) * spec.inertial_mass()) + quad(&psi.grid, &potential)?;
    let delta_q = pos.variance.max(T::zero()).sqrt();
    let delta_p = mom.variance.max(T::zero()).sqrt();
    let nodes = count_nodes(&psi.real_part(), &psi.grid, NodePolicy::for_grid(&psi.grid))?;
    Ok(UncertaintyRecord {
        delta_q,
        delta_p,
        product: delta_q * delta_p,
        bound: spec.constants().heisenberg_bound(),
        energy,
        nodes_predicted,
        nodes_counted: Some(nodes.count),
        provenance,
    })
}

/// Samples the eigenstate on `grid` (or the default grid) and assembles its
/// uncertainty record without any closed-form moment.
pub fn oracle_uncertainties<T: Real>(spec: &SystemSpec<T>, idx: StateIndex, grid: Option<&GridSpec<T>>) -> Result<UncertaintyRecord<T>> {
    let idx = validate_state(spec, idx)?;
    let grid = match grid {
        Some(g) => *g,
        None => default_grid(spec, idx.value(), None)?,
    };
    check_grid_matches(spec, &grid)?;
    let psi = sample_state(spec, idx.value(), &grid)?;
    sampled_uncertainties(spec, &psi, predicted_node_count(spec, idx), Provenance::Oracle)
}

/// `(⟨L_z⟩, ΔL_z)` of a ring state by quadrature of `−iℏ d/dθ`.
pub fn ring_lz_quadrature<T: Real>(spec: &SystemSpec<T>, state: &RingState<T>, grid: Option<&GridSpec<T>>) -> Result<(T, T)> {
    let grid = match grid {
        Some(g) => *g,
        None => default_grid(spec, 0, None)?,
    };
    check_grid_matches(spec, &grid)?;
    let psi = sample_ring_state(state, &grid)?;
    let m = momentum_stats(&psi, spec.hbar())?;
    Ok((m.mean, m.variance.max(T::zero()).sqrt()))
}

/// `(mean θ, Δθ)` of a ring state by quadrature on the branch `[0, 2π)`.
pub fn ring_theta_quadrature<T: Real>(spec: &SystemSpec<T>, state: &RingState<T>, grid: Option<&GridSpec<T>>) -> Result<(T, T)> {
    let grid = match grid {
        Some(g) => *g,
        None => default_grid(spec, 0, None)?,
    };
    check_grid_matches(spec, &grid)?;
    let psi = sample_ring_state(state, &grid)?;
    let p = position_stats(&psi)?;
    Ok((p.mean, p.variance.max(T::zero()).sqrt()))
}
