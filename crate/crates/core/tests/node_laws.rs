use qnodes_core::analytic::{ring_density, Provenance};
use qnodes_core::nodes::{count_nodes, density_flatness, NodePolicy};
use qnodes_core::oracle::{default_grid, sample_state};
use qnodes_core::report::{node_table, SweepConfig};
use qnodes_core::{SystemKind, SystemSpec};

#[test]
fn sampled_states_follow_node_laws() {
    for (kind, lo, hi) in [(SystemKind::Box, 1, 20), (SystemKind::Oscillator, 0, 20), (SystemKind::Ring, -10, 10)] {
        let cfg = SweepConfig::new(SystemSpec::natural(kind), lo, hi, &[Provenance::Analytic]).unwrap();
        for r in node_table(&cfg).unwrap() {
            assert_eq!(r.nodes_counted, r.nodes_predicted, "{kind} level {}", r.level);
            assert!(r.locations.windows(2).all(|w| w[0] < w[1]));
        }
    }
}

#[test]
fn counts_survive_fourfold_refinement() {
    for (kind, levels) in [(SystemKind::Box, 1..=20), (SystemKind::Oscillator, 0..=20), (SystemKind::Ring, 0..=10)] {
        let spec = SystemSpec::<f64>::natural(kind);
        for level in levels {
            let g = default_grid(&spec, level, None).unwrap();
            let points = if kind == SystemKind::Ring { 4 * g.points() } else { 4 * (g.points() - 1) + 1 };
            let fine = g.with_points(points).unwrap();
            let count =
                |grid| count_nodes(&sample_state(&spec, level, grid).unwrap().real_part(), grid, NodePolicy::for_grid(grid)).unwrap().count;
            assert_eq!(count(&g), count(&fine), "{kind} level {level}");
        }
    }
}

#[test]
fn box_node_positions_at_k_over_n() {
    let spec = SystemSpec::<f64>::natural(SystemKind::Box);
    for n in 2..=20 {
        let g = default_grid(&spec, n, None).unwrap();
        let psi = sample_state(&spec, n, &g).unwrap();
        let r = count_nodes(&psi.real_part(), &g, NodePolicy::for_grid(&g)).unwrap();
        for (k, x) in r.locations.iter().enumerate() {
            let want = (k + 1) as f64 / n as f64;
            assert!((x - want).abs() < g.spacing(), "n={n} k={}: {x}", k + 1);
        }
    }
}

#[test]
fn ring_densities_flat_and_positive() {
    let spec = SystemSpec::<f64>::natural(SystemKind::Ring);
    let g = default_grid(&spec, 0, None).unwrap();
    for m in -10..=10 {
        let exact: Vec<f64> = g.coords().iter().map(|&t| ring_density(&spec, m, t).unwrap()).collect();
        assert_eq!(density_flatness(&exact), (0.0, true), "m={m}");
        // |cos + i sin|² only equals 1 to rounding
        let sampled = sample_state(&spec, m, &g).unwrap().density();
        let (dev, positive) = density_flatness(&sampled);
        assert!(dev < 1e-15 && positive, "m={m}: {dev:e}");
    }
}
