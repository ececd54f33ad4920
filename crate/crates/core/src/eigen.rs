//! Finite-difference Hamiltonians and their lowest eigenpairs.
//!
//! The three-point Laplacian gives `H_ii = ℏ²/(m h²) + V(x_i)` and a uniform
//! coupling `−ℏ²/(2m h²)` between neighbours. Box and oscillator keep only
//! the interior points (ψ = 0 at the ends); the ring couples the last point
//! back to the first.

use crate::analytic::{Provenance, UncertaintyRecord};
use crate::linalg::{dot, SymTridiag};
use crate::model::{predicted_node_count, StateIndex, SystemKind, SystemSpec};
use crate::oracle::{sampled_uncertainties, Boundary, GridSpec, SampledFunction};
use crate::{Complex, Error, Real, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Tridiagonal,
    PeriodicTridiagonal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian<T> {
    grid: GridSpec<T>,
    diagonal: Vec<T>,
    off_diagonal: T,
    potential: Vec<T>,
    topology: Topology,
}

impl<T: Real> Hamiltonian<T> {
    pub fn grid(&self) -> &GridSpec<T> {
        &self.grid
    }

    pub fn diagonal(&self) -> &[T] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> T {
        self.off_diagonal
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Number of unknowns.
    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    /// Grid index of the first unknown.
    fn first_index(&self) -> usize {
        match self.topology {
            Topology::Tridiagonal => 1,
            Topology::PeriodicTridiagonal => 0,
        }
    }

    fn as_sym(&self) -> SymTridiag<T> {
        SymTridiag {
            diag: self.diagonal.clone(),
            off: vec![self.off_diagonal; self.dim().saturating_sub(1)],
            corner: (self.topology == Topology::PeriodicTridiagonal).then_some(self.off_diagonal),
        }
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        self.as_sym().matvec(v)
    }

    /// Dense copy, for inspection of small matrices.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut e = vec![T::zero(); n];
                e[i] = T::one();
                self.apply(&e)
            })
            .collect()
    }

    /// `vᵀHv / vᵀv` with the kinetic part as a sum of squared neighbour
    /// differences, which avoids the cancellation in `2v_i − v_{i−1} − v_{i+1}`.
    fn rayleigh_quotient(&self, v: &[T]) -> T {
        let kappa = -self.off_diagonal;
        let n = v.len();
        let mut kinetic = T::zero();
        for i in 0..n.saturating_sub(1) {
            let d = v[i + 1] - v[i];
            kinetic = kinetic + d * d;
        }
        match self.topology {
            Topology::Tridiagonal => kinetic = kinetic + v[0] * v[0] + v[n - 1] * v[n - 1],
            Topology::PeriodicTridiagonal => {
                let d = v[0] - v[n - 1];
                kinetic = kinetic + d * d;
            }
        }
        let potential = v.iter().zip(&self.potential).fold(T::zero(), |acc, (&x, &p)| acc + p * x * x);
        (kappa * kinetic + potential) / dot(v, v)
    }
}

/// Three-point finite-difference Hamiltonian of `spec` on `grid`.
pub fn build_hamiltonian<T: Real>(spec: &SystemSpec<T>, grid: &GridSpec<T>) -> Result<Hamiltonian<T>> {
    let want = Boundary::for_system(spec.kind());
    if grid.boundary() != want {
        return Err(Error::Grid(format!("{} Hamiltonian needs a {want:?} grid, got {:?}", spec.kind(), grid.boundary())));
    }
    let h = grid.spacing();
    let hbar = spec.hbar();
    let kappa = hbar * hbar / (T::lit(2.0) * spec.inertial_mass() * h * h);
    let (topology, range) = match spec.kind() {
        SystemKind::Ring => (Topology::PeriodicTridiagonal, 0..grid.points()),
        _ => (Topology::Tridiagonal, 1..grid.points() - 1),
    };
    let potential: Vec<T> = range.map(|i| spec.potential(grid.coord(i))).collect();
    let diagonal = potential.iter().map(|&v| T::lit(2.0) * kappa + v).collect();
    Ok(Hamiltonian { grid: *grid, diagonal, off_diagonal: -kappa, potential, topology })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    /// Ascending.
    pub energies: Vec<T>,
    /// Eigenvectors on the full grid (zero at excluded end points), with
    /// `∫|ψ|² = 1` and the first significant component positive.
    pub states: Vec<SampledFunction<T>>,
    /// `‖Hv − Ev‖₂` for the unit-2-norm eigenvector `v`.
    pub residuals: Vec<T>,
}

/// Residual tolerance for an eigenpair: `1e-8·max(max|E|, 1)`, floored at
/// the rounding level `64·ε·‖H‖` of the matrix-vector product.
fn residual_tolerance<T: Real>(max_energy: T, norm: T) -> T {
    (T::lit(1e-8) * max_energy.abs().max(T::one())).max(T::lit(64.0) * T::epsilon() * norm)
}

/// The `k` lowest eigenpairs of `h`: Sturm bisection for the eigenvalues,
/// inverse iteration for the vectors, energies refined by the Rayleigh
/// quotient.
pub fn solve_lowest<T: Real>(h: &Hamiltonian<T>, k: usize) -> Result<EigenResult<T>> {
    if k == 0 || k > h.dim() {
        return Err(Error::Domain(format!("requested {k} eigenpairs of a {}-dimensional Hamiltonian", h.dim())));
    }
    let sym = h.as_sym();
    let bisected = sym.lowest_eigenvalues(k);
    let max_energy = bisected.iter().fold(T::zero(), |acc, e| acc.max(e.abs()));
    let tol = residual_tolerance(max_energy, sym.norm());

    let mut vectors: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut pairs: Vec<(T, Vec<T>, T)> = Vec::with_capacity(k);
    for (j, &lambda) in bisected.iter().enumerate() {
        let (mut v, _) = sym.eigenvector(lambda, &vectors, j, tol)?;
        let lead = v.iter().fold(T::zero(), |acc, x| acc.max(x.abs())) * T::lit(1e-6);
        if v.iter().find(|x| x.abs() > lead).is_some_and(|&x| x < T::zero()) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        let energy = h.rayleigh_quotient(&v);
        let hv = sym.matvec(&v);
        let residual = hv.iter().zip(&v).fold(T::zero(), |acc, (&a, &x)| acc + (a - energy * x) * (a - energy * x)).sqrt();
        if residual.is_nan() || residual > tol {
            return Err(Error::Convergence(format!("eigenpair {j}: residual {residual:e} above {tol:e}")));
        }
        vectors.push(v.clone());
        pairs.push((energy, v, residual));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite energies"));

    let grid = *h.grid();
    let first = h.first_index();
    let mut result = EigenResult { energies: Vec::with_capacity(k), states: Vec::with_capacity(k), residuals: Vec::with_capacity(k) };
    for (energy, v, residual) in pairs {
        let mut full = vec![T::zero(); grid.points()];
        full[first..first + v.len()].copy_from_slice(&v);
        result.states.push(SampledFunction::from_real(grid, full)?.normalized()?);
        result.energies.push(energy);
        result.residuals.push(residual);
    }
    Ok(result)
}

/// Quantum number of the `index`-th lowest level: `n = index + 1` (box),
/// `n = index` (oscillator), `|m| = ⌈index/2⌉` (ring).
pub fn level_for_index(kind: SystemKind, index: usize) -> i64 {
    match kind {
        SystemKind::Box => index as i64 + 1,
        SystemKind::Oscillator => index as i64,
        SystemKind::Ring => index.div_ceil(2) as i64,
    }
}

/// Number of lowest eigenpairs needed to reach `level`.
pub fn levels_needed(kind: SystemKind, level: i64) -> usize {
    match kind {
        SystemKind::Box => level.max(1) as usize,
        SystemKind::Oscillator => level.max(0) as usize + 1,
        SystemKind::Ring => 2 * level.unsigned_abs() as usize + 1,
    }
}

/// Rotates the degenerate ring pair for `|m|` into the `L_z` eigenstate of
/// sign `m` and fixes the global phase so that `ψ(θ₀)` is real and positive.
pub fn ring_lz_eigenstate<T: Real>(result: &EigenResult<T>, m: i64, hbar: T) -> Result<SampledFunction<T>> {
    let am = m.unsigned_abs() as usize;
    if 2 * am >= result.states.len() {
        return Err(Error::Domain(format!("ring level m = {m} not among the {} computed eigenpairs", result.states.len())));
    }
    if am == 0 {
        return Ok(result.states[0].clone());
    }
    let (u, v) = (&result.states[2 * am - 1], &result.states[2 * am]);
    let grid = *u.grid();
    let inv_sqrt2 = T::one() / T::lit(2.0).sqrt();
    let combine = |sign: T| -> Vec<Complex<T>> {
        u.values().iter().zip(v.values()).map(|(a, b)| Complex::new(a.re, sign * b.re).scale(inv_sqrt2)).collect()
    };
    let mut psi = SampledFunction::new(grid, combine(T::one()))?;
    let (lz, _) = crate::oracle::momentum_moments(&psi, hbar)?;
    if (lz < T::zero()) != (m < 0) {
        psi = SampledFunction::new(grid, combine(-T::one()))?;
    }
    let z0 = psi.values()[0];
    let phase = if z0.norm() > T::zero() { z0.conj().unscale(z0.norm()) } else { Complex::new(T::one(), T::zero()) };
    SampledFunction::new(grid, psi.values().iter().map(|z| z * phase).collect())?.normalized()
}

/// Uncertainty record of the `index`-th eigenvector, computed by the
/// quadrature route, with its measured node count.
pub fn eigen_uncertainties<T: Real>(spec: &SystemSpec<T>, result: &EigenResult<T>, index: usize) -> Result<UncertaintyRecord<T>> {
    let psi = result
        .states
        .get(index)
        .ok_or_else(|| Error::Domain(format!("eigenpair {index} not computed ({} available)", result.states.len())))?;
    let level = level_for_index(spec.kind(), index);
    let mut record = sampled_uncertainties(spec, psi, predicted_node_count(spec, StateIndex::new(level)), Provenance::Eigen)?;
    record.energy = result.energies[index];
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::default_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn natural(kind: SystemKind) -> SystemSpec<f64> {
        SystemSpec::natural(kind)
    }

    #[test]
    fn box_hamiltonian_structure() {
        let b = natural(SystemKind::Box);
        let g = GridSpec::new(0.0, 1.0, 11, Boundary::Dirichlet).unwrap();
        let h = build_hamiltonian(&b, &g).unwrap();
        assert_eq!(h.dim(), 9);
        assert_eq!(h.topology(), Topology::Tridiagonal);
        let m = h.to_dense();
        assert_eq!(m[0][8], 0.0);
        assert_relative_eq!(m[0][0], 100.0);
        assert_relative_eq!(m[0][1], -50.0);
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(m[i][j], m[j][i]);
            }
        }
    }

    #[test]
    fn ring_hamiltonian_has_corner_couplings() {
        let r = natural(SystemKind::Ring);
        let g = GridSpec::new(0.0, 2.0 * PI, 8, Boundary::Periodic).unwrap();
        let h = build_hamiltonian(&r, &g).unwrap();
        let m = h.to_dense();
        assert_eq!(m.len(), 8);
        assert!(m[0][7] != 0.0 && m[7][0] == m[0][7]);
    }

    #[test]
    fn oscillator_diagonal_includes_potential() {
        let o = natural(SystemKind::Oscillator);
        let g = GridSpec::new(-12.0, 12.0, 241, Boundary::Open).unwrap();
        let h = build_hamiltonian(&o, &g).unwrap();
        let kin = 1.0 / (g.spacing() * g.spacing());
        for (j, &d) in h.diagonal().iter().enumerate() {
            let x = g.coord(j + 1);
            assert_relative_eq!(d, kin + 0.5 * x * x, max_relative = 1e-12);
        }
    }

    #[test]
    fn topology_mismatch_is_a_grid_error() {
        let r = natural(SystemKind::Ring);
        let g = GridSpec::new(0.0, 1.0, 11, Boundary::Dirichlet).unwrap();
        assert!(matches!(build_hamiltonian(&r, &g), Err(Error::Grid(_))));
    }

    #[test]
    fn box_ground_state_energy() {
        let b = natural(SystemKind::Box);
        let g = GridSpec::new(0.0, 1.0, 2001, Boundary::Dirichlet).unwrap();
        let res = solve_lowest(&build_hamiltonian(&b, &g).unwrap(), 1).unwrap();
        assert_relative_eq!(res.energies[0], 4.934_802_200_544_679, max_relative = 1e-4);
    }

    #[test]
    fn oscillator_lowest_three() {
        let o = natural(SystemKind::Oscillator);
        let g = default_grid(&o, 2, None).unwrap();
        let res = solve_lowest(&build_hamiltonian(&o, &g).unwrap(), 3).unwrap();
        for (n, e) in res.energies.iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-4);
        }
    }

    #[test]
    fn ring_lowest_three_with_degeneracy() {
        let r = natural(SystemKind::Ring);
        let g = default_grid(&r, 1, None).unwrap();
        let res = solve_lowest(&build_hamiltonian(&r, &g).unwrap(), 3).unwrap();
        assert!(res.energies[0].abs() < 1e-4);
        assert!((res.energies[1] - 0.5).abs() < 1e-4);
        assert!((res.energies[2] - 0.5).abs() < 1e-4);
        assert_relative_eq!(res.energies[1], res.energies[2], max_relative = 1e-8);
    }

    #[test]
    fn states_are_normalized_with_sign_convention() {
        let b = natural(SystemKind::Box);
        let g = GridSpec::new(0.0, 1.0, 401, Boundary::Dirichlet).unwrap();
        let res = solve_lowest(&build_hamiltonian(&b, &g).unwrap(), 4).unwrap();
        for s in &res.states {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
            assert!(s.values()[1].re > 0.0);
        }
    }

    #[test]
    fn too_many_levels_is_rejected() {
        let b = natural(SystemKind::Box);
        let g = GridSpec::new(0.0, 1.0, 11, Boundary::Dirichlet).unwrap();
        let h = build_hamiltonian(&b, &g).unwrap();
        assert!(matches!(solve_lowest(&h, 10), Err(Error::Domain(_))));
        assert!(matches!(solve_lowest(&h, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn eigen_uncertainty_examples() {
        let b = natural(SystemKind::Box);
        let g = default_grid(&b, 1, None).unwrap();
        let res = solve_lowest(&build_hamiltonian(&b, &g).unwrap(), 1).unwrap();
        let r = eigen_uncertainties(&b, &res, 0).unwrap();
        assert!((r.product - 0.5679).abs() < 1e-3);

        let o = natural(SystemKind::Oscillator);
        let g = default_grid(&o, 4, None).unwrap();
        let res = solve_lowest(&build_hamiltonian(&o, &g).unwrap(), 5).unwrap();
        assert!((eigen_uncertainties(&o, &res, 0).unwrap().product - 0.5).abs() < 1e-3);
        assert_eq!(eigen_uncertainties(&o, &res, 4).unwrap().nodes_counted, Some(4));
    }

    #[test]
    fn ring_pairs_rotate_into_lz_eigenstates() {
        let r = natural(SystemKind::Ring);
        let g = default_grid(&r, 3, None).unwrap();
        let res = solve_lowest(&build_hamiltonian(&r, &g).unwrap(), 7).unwrap();
        for m in -3i64..=3 {
            let psi = ring_lz_eigenstate(&res, m, 1.0).unwrap();
            let (lz, p2) = crate::oracle::momentum_moments(&psi, 1.0).unwrap();
            assert!((lz - m as f64).abs() < 1e-6, "m={m} lz={lz}");
            assert!((p2 - lz * lz).abs() < 1e-6);
            assert!(psi.values()[0].im.abs() < 1e-12 && psi.values()[0].re > 0.0);
        }
    }

    #[test]
    fn level_index_mapping() {
        assert_eq!(level_for_index(SystemKind::Box, 0), 1);
        assert_eq!(level_for_index(SystemKind::Oscillator, 4), 4);
        assert_eq!(level_for_index(SystemKind::Ring, 0), 0);
        assert_eq!(level_for_index(SystemKind::Ring, 1), 1);
        assert_eq!(level_for_index(SystemKind::Ring, 2), 1);
        assert_eq!(level_for_index(SystemKind::Ring, 3), 2);
        assert_eq!(levels_needed(SystemKind::Ring, -2), 5);
        assert_eq!(levels_needed(SystemKind::Box, 3), 3);
        assert_eq!(levels_needed(SystemKind::Oscillator, 3), 4);
    }
}
