use fracrd::grid::{BoundaryCondition, Field, Grid};
use fracrd::transforms::{SpectralField, TransformPlan};
use proptest::prelude::*;

fn bc() -> impl Strategy<Value = BoundaryCondition> {
    prop_oneof![
        Just(BoundaryCondition::Periodic),
        Just(BoundaryCondition::Dirichlet),
        Just(BoundaryCondition::Neumann),
    ]
}

fn grid_and_values() -> impl Strategy<Value = (Grid, Vec<f64>, Vec<f64>)> {
    (
        prop_oneof![Just(4usize), Just(8), Just(16), Just(32)],
        bc(),
        1usize..=3,
    )
        .prop_filter("keep 3D small", |(n, _, d)| *d < 3 || *n <= 16)
        .prop_flat_map(|(n, bc, dim)| {
            let g = Grid::cube(dim, 0.0, 1.0, n, bc).unwrap();
            let len = g.len();
            (
                Just(g),
                proptest::collection::vec(-1.0f64..1.0, len),
                proptest::collection::vec(-1.0f64..1.0, len),
            )
        })
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip((g, u, _) in grid_and_values()) {
        let plan = TransformPlan::new(&g);
        let f = Field::from_values(g, u).unwrap();
        let back = plan.inverse(&plan.forward(&f).unwrap()).unwrap();
        let scale = max_abs(f.values().iter().map(|v| v.abs())).max(1e-300);
        let err = max_abs(back.values().iter().zip(f.values()).map(|(a, b)| (a - b).abs()));
        prop_assert!(err <= 1e-12 * scale, "round trip error {err:e}");
    }

    #[test]
    fn linearity((g, u, v) in grid_and_values(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let plan = TransformPlan::new(&g);
        let fu = plan.forward(&Field::from_values(g, u.clone()).unwrap()).unwrap();
        let fv = plan.forward(&Field::from_values(g, v.clone()).unwrap()).unwrap();
        let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let fw = plan.forward(&Field::from_values(g, w).unwrap()).unwrap();
        let scale = max_abs(fw.values().iter().map(|z| z.norm())).max(1.0);
        let err = max_abs(
            fw.values()
                .iter()
                .zip(fu.values().iter().zip(fv.values()))
                .map(|(w, (x, y))| (w - (x * a + y * b)).norm()),
        );
        prop_assert!(err <= 1e-12 * scale, "linearity error {err:e}");
    }

    #[test]
    fn inverse_of_zero_is_zero((g, _, _) in grid_and_values()) {
        let plan = TransformPlan::new(&g);
        let back = plan.inverse(&SpectralField::zeros(g)).unwrap();
        prop_assert!(back.values().iter().all(|v| *v == 0.0));
    }
}
