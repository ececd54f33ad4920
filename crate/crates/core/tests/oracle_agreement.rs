use qnodes_core::analytic::{self, Provenance};
use qnodes_core::oracle::{self, default_grid, Boundary, GridSpec};
use qnodes_core::{Error, StateIndex, SystemKind, SystemSpec, SystemSpecF64};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn check_level(spec: &SystemSpecF64, level: i64, tol: f64) {
    let exact = analytic::uncertainties(spec, level).unwrap();
    let quad = oracle::oracle_uncertainties(spec, StateIndex::new(level), None).unwrap();
    assert_eq!(quad.provenance, Provenance::Oracle);
    for (name, a, b) in [
        ("energy", quad.energy, exact.energy),
        ("delta_q", quad.delta_q, exact.delta_q),
        ("delta_p", quad.delta_p, exact.delta_p),
        ("product", quad.product, exact.product),
    ] {
        assert!(rel(a, b) < tol, "{} level {level} {name}: {a} vs {b}", spec.kind());
    }
    assert_eq!(quad.nodes_counted, Some(exact.nodes_predicted));
}

#[test]
fn box_levels_1_to_20() {
    let spec = SystemSpec::natural(SystemKind::Box);
    for n in 1..=20 {
        check_level(&spec, n, 1e-6);
    }
}

#[test]
fn box_with_physical_parameters() {
    let spec = SystemSpec::particle_in_box(3.7, 0.4, qnodes_core::Constants::new(1.3).unwrap()).unwrap();
    for n in [1, 7, 20] {
        check_level(&spec, n, 1e-6);
    }
}

#[test]
fn oscillator_levels_0_to_20() {
    let spec = SystemSpec::natural(SystemKind::Oscillator);
    for n in 0..=20 {
        check_level(&spec, n, 1e-6);
    }
}

#[test]
fn oscillator_with_physical_parameters() {
    let spec = SystemSpec::oscillator(2.5, 0.3, qnodes_core::Constants::new(0.7).unwrap()).unwrap();
    for n in [0, 5, 20] {
        check_level(&spec, n, 1e-6);
    }
}

#[test]
fn ring_levels_up_to_ten() {
    let spec = SystemSpec::natural(SystemKind::Ring);
    for m in -10..=10 {
        check_level(&spec, m, 1e-6);
        let quad = oracle::oracle_uncertainties(&spec, StateIndex::new(m), None).unwrap();
        assert!(quad.delta_p.abs() < 1e-10, "m={m}: {}", quad.delta_p);
    }
}

#[test]
fn ground_state_box_product_recomputed() {
    let spec = SystemSpec::<f64>::natural(SystemKind::Box);
    let quad = oracle::oracle_uncertainties(&spec, StateIndex::new(1), None).unwrap();
    assert!((quad.product - 0.567_861_808_386_612).abs() < 1e-6);
}

#[test]
fn coarse_grid_is_rejected() {
    let spec = SystemSpec::<f64>::natural(SystemKind::Box);
    let grid = GridSpec::new(0.0, 1.0, 101, Boundary::Dirichlet).unwrap();
    let err = oracle::oracle_uncertainties(&spec, StateIndex::new(20), Some(&grid)).unwrap_err();
    assert!(matches!(err.root(), Error::Grid(_)), "{err}");
}

#[test]
fn default_grids_have_documented_sizes() {
    let b = default_grid(&SystemSpec::<f64>::natural(SystemKind::Box), 1, None).unwrap();
    assert_eq!((b.points(), b.boundary()), (4001, Boundary::Dirichlet));
    let r = default_grid(&SystemSpec::<f64>::natural(SystemKind::Ring), 1, None).unwrap();
    assert_eq!((r.points(), r.boundary()), (4096, Boundary::Periodic));
    let o = default_grid(&SystemSpec::<f64>::natural(SystemKind::Oscillator), 20, None).unwrap();
    assert_eq!(o.boundary(), Boundary::Open);
    assert!((o.upper() - 8.0 * 41f64.sqrt()).abs() < 1e-12);
}
