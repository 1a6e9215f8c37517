use cpfif::optimize::{penalty, PenaltyConfig};
use cpfif::{AffineMaps, DataSet, DerivativeScheme, FifModel, Grid, ScalingVector, SplineModel};
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = DataSet> {
    (3usize..8).prop_flat_map(|m| {
        (
            -2.0..2.0f64,
            prop::collection::vec(0.2..2.0f64, m - 1),
            prop::collection::vec(-3.0..3.0f64, m),
        )
            .prop_map(|(x0, gaps, y)| {
                let mut x = vec![x0];
                for g in gaps {
                    x.push(x.last().unwrap() + g);
                }
                DataSet::new(x, y).unwrap()
            })
    })
}

/// A dataset with factors `λ_s = u_s · a_s^order`, `u_s ∈ (-0.9, 0.9)`.
fn model(order: i32) -> impl Strategy<Value = FifModel> {
    dataset().prop_flat_map(move |data| {
        let n = data.intervals();
        prop::collection::vec(-0.9..0.9f64, n).prop_map(move |u| {
            let maps = AffineMaps::new(&data);
            let lam = u
                .iter()
                .zip(maps.ratios())
                .map(|(u, a)| u * a.powi(order))
                .collect();
            let spline = SplineModel::with_scheme(data.clone(), DerivativeScheme::NaturalSpline);
            FifModel::curvature_preserving(ScalingVector::new(lam).unwrap(), spline).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interpolates_data(f in model(1)) {
        let d = f.data();
        for (x, y) in d.x().iter().zip(d.y()) {
            prop_assert!((f.eval(*x, 1e-12).unwrap() - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn self_referential(f in model(1), t in 0.0..1.0f64) {
        let d = f.data();
        let x = d.x_first() + t * d.span();
        let fx = f.eval(x, 1e-13).unwrap();
        for s in 0..d.intervals() {
            let lhs = f.eval(f.maps().apply(s, x), 1e-13).unwrap();
            let rhs = f.map_component(s, x, fx);
            prop_assert!((lhs - rhs).abs() <= 1e-10, "s={s} {lhs} {rhs}");
        }
    }

    #[test]
    fn maps_round_trip(data in dataset(), t in 0.0..1.0f64) {
        let maps = AffineMaps::new(&data);
        let x = data.x_first() + t * data.span();
        for s in 0..maps.len() {
            let back = maps.invert(s, maps.apply(s, x));
            prop_assert!((back - x).abs() <= 1e-12 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn first_derivative_continuous_at_knots(f in model(2)) {
        let d = f.data();
        let h = 1e-7;
        for &k in &d.x()[1..d.len() - 1] {
            let left = f.eval_derivative(k - h, 1, 1e-13).unwrap();
            let right = f.eval_derivative(k + h, 1, 1e-13).unwrap();
            let c = f.spline().sup_norms(&Grid::over(d, 257).unwrap()).c;
            // F'' is bounded by roughly C / (1 - ρ) when |λ_s| < a_s²
            prop_assert!((left - right).abs() <= 2.0 * h * 20.0 * (1.0 + c), "{left} {right}");
        }
    }

    #[test]
    fn penalty_non_negative(f in model(2)) {
        let cfg = PenaltyConfig { grid_size: 257, ..PenaltyConfig::default() };
        let j = penalty(f.lambda(), f.spline(), &cfg).unwrap();
        prop_assert!(j >= 0.0 && j.is_finite());
    }
}
