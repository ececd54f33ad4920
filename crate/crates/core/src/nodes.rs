//! Node counting on sampled real functions and flatness of ring densities.

use crate::oracle::{Boundary, GridSpec};
use crate::{Error, Real, Result};

/// Samples with `|f| ≤ ZERO_THRESHOLD · max|f|` are treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodePolicy {
    /// Discard zeros forced by hard walls.
    pub dirichlet_walls: bool,
    /// Count the sign change between the last and first sample.
    pub periodic: bool,
    /// Tolerate mostly-zero samples (truncated tails of an open domain).
    pub open_tails: bool,
}

impl NodePolicy {
    pub fn for_grid<T: Real>(grid: &GridSpec<T>) -> Self {
        let b = grid.boundary();
        Self { dirichlet_walls: b == Boundary::Dirichlet, periodic: b == Boundary::Periodic, open_tails: b == Boundary::Open }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeReport<T> {
    pub count: usize,
    /// Interpolated sign-change positions, strictly increasing.
    pub locations: Vec<T>,
    pub boundary_excluded: usize,
}

/// Counts strict sign changes between consecutive significant samples.
///
/// Near-zero samples are bridged, so a function that touches zero without
/// changing sign has no node there. Node positions come from linear
/// interpolation between the bracketing significant samples.
pub fn count_nodes<T: Real>(values: &[T], grid: &GridSpec<T>, policy: NodePolicy) -> Result<NodeReport<T>> {
    if values.len() != grid.points() {
        return Err(Error::Grid(format!("{} samples for a {}-point grid", values.len(), grid.points())));
    }
    let max = values.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if !(max > T::zero() && max.is_finite()) {
        return Err(Error::Degenerate(format!("function is numerically zero or non-finite (max |f| = {max})")));
    }
    let eps = T::lit(ZERO_THRESHOLD) * max;
    let significant: Vec<usize> = (0..values.len()).filter(|&i| values[i].abs() > eps).collect();
    let zeros = values.len() - significant.len();
    if !policy.open_tails && 2 * zeros > values.len() {
        return Err(Error::Degenerate(format!("{zeros} of {} samples are numerically zero", values.len())));
    }

    let h = grid.spacing();
    let coords = grid.coords();
    let period = grid.upper() - grid.lower();
    let mut boundary_excluded = 0;
    if policy.dirichlet_walls {
        boundary_excluded += usize::from(values[0].abs() <= eps) + usize::from(values[values.len() - 1].abs() <= eps);
    }

    let crossing = |xa: T, fa: T, xb: T, fb: T| xa + (xb - xa) * fa / (fa - fb);
    let mut locations = Vec::new();
    for pair in significant.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if (values[a] < T::zero()) != (values[b] < T::zero()) {
            let x = crossing(coords[a], values[a], coords[b], values[b]);
            if policy.dirichlet_walls && (x - grid.lower() <= h || grid.upper() - x <= h) {
                boundary_excluded += 1;
            } else {
                locations.push(x);
            }
        }
    }
    if policy.periodic && significant.len() >= 2 {
        let (a, b) = (significant[significant.len() - 1], significant[0]);
        if (values[a] < T::zero()) != (values[b] < T::zero()) {
            let mut x = crossing(coords[a], values[a], coords[b] + period, values[b]);
            if x >= grid.upper() {
                x = x - period;
            }
            locations.push(x);
        }
        locations.sort_by(|x, y| x.partial_cmp(y).expect("finite node locations"));
    }
    Ok(NodeReport { count: locations.len(), locations, boundary_excluded })
}

/// `(max |ρ − mean ρ|, min ρ > 0)` for density samples.
pub fn density_flatness<T: Real>(density: &[T]) -> (T, bool) {
    let Some(&first) = density.first() else {
        return (T::zero(), false);
    };
    // offset from the first sample keeps a constant input exactly constant
    let shift = density.iter().fold(T::zero(), |acc, &r| acc + (r - first)) / T::from_count(density.len());
    let mean = first + shift;
    let deviation = density.iter().fold(T::zero(), |acc, &r| acc.max((r - mean).abs()));
    let min = density.iter().fold(T::infinity(), |acc, &r| acc.min(r));
    (deviation, min > T::zero())
}
