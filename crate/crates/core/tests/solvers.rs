use hyperfront::gas::{self, SimilarityParams, State};
use hyperfront::riemann::{ars_fronts, solve_boundary, solve_interior};
use hyperfront::wave::{wave_curve, Family};
use proptest::prelude::*;

fn params(tau: f64) -> SimilarityParams<f64> {
    SimilarityParams::new(1.4, 0.5, tau).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn boundary_state_is_tangent(dr in -0.04f64..0.04, v in -0.04f64..0.04, theta in -0.05f64..0.05,
                                 tau in prop_oneof![Just(0.0), 0.0f64..0.2]) {
        let p = params(tau);
        let u = State::new(1.0 + dr, v);
        let f = solve_boundary(u, theta, &p).unwrap();
        prop_assert!(gas::wall_slip_residual(f.wall_state, theta, &p).unwrap().abs() <= 1e-12);
        if let Some(w) = f.waves.first() {
            prop_assert_eq!(w.left, u);
            prop_assert!(w.speed < 0.0);
        }
    }

    #[test]
    fn fan_is_chained_and_ordered(a in -0.04f64..0.04, b in -0.04f64..0.04, c in -0.04f64..0.04, d in -0.04f64..0.04,
                                  tau in prop_oneof![Just(0.0), Just(0.1)]) {
        let p = params(tau);
        let (l, r) = (State::new(1.0 + a, b), State::new(1.0 + c, d));
        let f = solve_interior(l, r, &p).unwrap();
        let mut at = l;
        let mut speed = f64::NEG_INFINITY;
        for w in &f.waves {
            prop_assert_eq!(w.left, at);
            prop_assert!(w.speed > speed);
            at = w.right;
            speed = w.speed;
        }
        prop_assert!(at.sup_dist(r) <= 1e-9);
    }

    #[test]
    fn ars_refinement_preserves_end_states(alpha in 0.001f64..0.05, nu in 4u32..20, tau in prop_oneof![Just(0.0), Just(0.1)]) {
        let p = params(tau);
        let l = State::background();
        let r = wave_curve(Family::Two, alpha, l, &p).unwrap().state;
        let f = solve_interior(l, r, &p).unwrap();
        let fronts = ars_fronts(&f.waves, nu, &p).unwrap();
        prop_assert_eq!(fronts.len() as f64, (alpha * nu as f64).ceil());
        prop_assert!(fronts.iter().all(|w| w.strength <= 1.0 / nu as f64 + 1e-15));
        prop_assert!(fronts.last().unwrap().right.sup_dist(r) <= 1e-9);
    }
}
