mod common;

use proptest::prelude::*;
use seccap_core::lp::{check_feasible, solve_lp, trace_region, LinearProgram, LpStatus, RegionModel, Sense, Weights};
use seccap_core::models::{presets, LinkSharingRegion, SchemeRegion};

#[test]
fn check_feasible_examples() {
    let empty = LinearProgram::new(3);
    assert!(check_feasible(&empty, &[0.0, 1.0, 7.5], 1e-9));
    let mut lp = LinearProgram::new(1);
    lp.push(vec![1.0], Sense::Le, 0.5);
    assert!(!check_feasible(&lp, &[0.6], 1e-9));
    assert!(check_feasible(&lp, &[0.5], 1e-9));
    assert!(!check_feasible(&lp, &[-0.1], 1e-9));
}

#[test]
fn simplex_matches_vertex_enumeration_on_seeded_lps() {
    let mut rng = common::rng(0xC0FFEE);
    for case in 0..100 {
        let vars = 3 + case % 8;
        let rows = 2 + case % 6;
        let lp = common::random_lp(&mut rng, vars, rows);
        let oracle = common::vertex_enumeration_max(&lp);
        let sol = solve_lp(&lp).unwrap();
        match oracle {
            None => assert_eq!(sol.status, LpStatus::Infeasible, "case {case}"),
            Some(v) => {
                assert_eq!(sol.status, LpStatus::Optimal, "case {case}");
                assert!((sol.value - v).abs() < 1e-8, "case {case}: {} vs {v}", sol.value);
                assert!(check_feasible(&lp, &sol.point, 1e-9));
            }
        }
    }
}

#[test]
fn optimal_points_are_feasible_on_scheme_instances() {
    for net in [presets::y_network(), presets::ry_network(), presets::x_network()] {
        let region = SchemeRegion::new(net);
        for w in Weights::sweep(16) {
            let lp = region.lp(w);
            let sol = solve_lp(&lp).unwrap();
            assert!(sol.is_optimal());
            assert!(check_feasible(&lp, &sol.point, 1e-9));
            assert!(sol.point.iter().all(|&x| x >= -1e-12));
        }
    }
}

#[test]
fn traced_frontier_is_sorted_and_deduplicated() {
    for net in [presets::y_network(), presets::ry_network(), presets::x_network()] {
        let pts = trace_region(&SchemeRegion::new(net), 64).unwrap();
        assert!(!pts.is_empty());
        for pair in pts.windows(2) {
            assert!(pair[0].r1 >= pair[1].r1);
            assert!(pair[0].distance(&pair[1]) >= 1e-7);
        }
    }
}

/// The optimum for each weight dominates every other traced vertex.
#[test]
fn support_function_property() {
    for net in [presets::y_network(), presets::ry_network(), presets::x_network()] {
        for region in [&SchemeRegion::new(net.clone()) as &dyn RegionModel, &LinkSharingRegion::new(net.clone())] {
            let pts = trace_region(region, 32).unwrap();
            for w in Weights::sweep(32) {
                let (v, _) = region.solve(w).unwrap();
                for p in &pts {
                    assert!(v >= w.dot(p.r1, p.r2) - 1e-9);
                }
            }
        }
    }
}

fn arb_lp() -> impl Strategy<Value = LinearProgram> {
    (3usize..=6, 1usize..=5, any::<u64>()).prop_map(|(v, r, seed)| common::random_lp(&mut common::rng(seed), v, r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_simplex_equals_enumeration(lp in arb_lp()) {
        let sol = solve_lp(&lp).unwrap();
        match common::vertex_enumeration_max(&lp) {
            None => prop_assert_eq!(sol.status, LpStatus::Infeasible),
            Some(v) => {
                prop_assert!(sol.is_optimal());
                prop_assert!((sol.value - v).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn prop_objective_scaling(lp in arb_lp(), c in 0.01f64..100.0) {
        let base = solve_lp(&lp).unwrap();
        let mut scaled = lp.clone();
        for v in scaled.objective.iter_mut() {
            *v *= c;
        }
        let s = solve_lp(&scaled).unwrap();
        prop_assert_eq!(base.status, s.status);
        if base.is_optimal() {
            prop_assert!((s.value - c * base.value).abs() < 1e-8 * (1.0 + c * base.value.abs()));
            for (a, b) in base.point.iter().zip(&s.point) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn prop_solver_is_deterministic(lp in arb_lp()) {
        let (a, b) = (solve_lp(&lp).unwrap(), solve_lp(&lp).unwrap());
        // infeasible outcomes carry a NaN value
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(a.point, b.point);
    }

    #[test]
    fn prop_support_function_on_random_y(d in prop::array::uniform3(0.0f64..0.9), de in prop::array::uniform3(0.05f64..1.0)) {
        let net = seccap_core::models::NetworkModel::y([(d[0], de[0]), (d[1], de[1]), (d[2], de[2])]).unwrap();
        let region = SchemeRegion::new(net);
        let pts = trace_region(&region, 12).unwrap();
        for w in Weights::sweep(12) {
            let (v, _) = region.solve(w).unwrap();
            for p in &pts {
                prop_assert!(v >= w.dot(p.r1, p.r2) - 1e-9);
            }
        }
    }
}

#[test]
fn box_region_corners() {
    struct Box2;
    impl RegionModel for Box2 {
        fn lp(&self, w: Weights) -> LinearProgram {
            let mut lp = LinearProgram::new(2).with_objective(vec![w.w1, w.w2]);
            lp.push(vec![1.0, 0.0], Sense::Le, 0.3);
            lp.push(vec![0.0, 1.0], Sense::Le, 0.2);
            lp
        }
        fn variable_names(&self) -> Vec<String> {
            vec!["R1".into(), "R2".into()]
        }
    }
    let pts = trace_region(&Box2, 16).unwrap();
    assert!(pts.iter().any(|p| (p.r1 - 0.3).abs() < 1e-12 && (p.r2 - 0.2).abs() < 1e-12));
    assert!(pts.iter().all(|p| p.r1 <= 0.3 + 1e-12 && p.r2 <= 0.2 + 1e-12));
}
