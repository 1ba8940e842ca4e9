//! Property tests: scheme invariants under randomized inputs, and
//! no-panic guarantees for the text front ends.

use mfg_theta::harness::config::Config;
use mfg_theta::harness::expressions::parse_expression;
use mfg_theta::implicit_heat::{solve_b1, HeatSolveOptions};
use mfg_theta::theta_scheme::{fp_forward, stencil_coefficients_positive};
use mfg_theta::torus_grid::{
    divergence_h, gradient_h, laplacian_h, Grid, ScalarField, VectorField,
};
use proptest::prelude::*;

fn small_grid() -> Grid {
    // d = 1, N = 8, T = 8, theta = 0.75, sigma = 0.2: CFL-admissible for
    // |v| <= 2(1-theta)sigma/h = 0.8
    Grid::new(1, 8, 8, 0.75, 0.2).unwrap()
}

fn scalar_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 8)
}

fn density_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, 8).prop_map(|vals| {
        let s: f64 = vals.iter().sum();
        vals.into_iter().map(|v| v / s).collect()
    })
}

fn control_curve() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-0.8f64..0.8, 8), 8)
}

proptest! {
    #[test]
    fn heat_solve_preserves_mass_and_positivity(vals in density_values()) {
        let g = small_grid();
        let m = ScalarField { grid: g, values: vals };
        let y = solve_b1(&m, g.theta * g.sigma, &HeatSolveOptions::default()).unwrap();
        prop_assert!((y.total_mass() - m.total_mass()).abs() < 1e-12);
        prop_assert!(y.min() >= -1e-12);
    }

    #[test]
    fn heat_solve_is_linear(a in scalar_values(), b in scalar_values(), c in -3.0f64..3.0) {
        let g = small_grid();
        let fa = ScalarField { grid: g, values: a };
        let fb = ScalarField { grid: g, values: b };
        let opts = HeatSolveOptions::default();
        let w = g.theta * g.sigma;
        let combined = solve_b1(&fa.add(&fb.scale(c)), w, &opts).unwrap();
        let separate = solve_b1(&fa, w, &opts).unwrap()
            .add(&solve_b1(&fb, w, &opts).unwrap().scale(c));
        prop_assert!(combined.sub(&separate).norm_inf() < 1e-10);
    }

    #[test]
    fn integration_by_parts_random(mu in scalar_values(), w in scalar_values()) {
        let g = small_grid();
        let mu = ScalarField { grid: g, values: mu };
        let w = VectorField { grid: g, values: w };
        let lhs = gradient_h(&mu).dot(&w);
        let rhs = -mu.dot(&divergence_h(&w));
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs()));
    }

    #[test]
    fn laplacian_kills_constants(c in -100.0f64..100.0) {
        let g = small_grid();
        let f = ScalarField::constant(g, c);
        prop_assert!(laplacian_h(&f).norm_inf() == 0.0);
    }

    #[test]
    fn fp_forward_keeps_probability_simplex(
        m0 in density_values(),
        vs in control_curve(),
    ) {
        let g = small_grid();
        let m0 = ScalarField { grid: g, values: m0 };
        let v: Vec<VectorField> = vs
            .into_iter()
            .map(|row| VectorField { grid: g, values: row })
            .collect();
        prop_assert!(stencil_coefficients_positive(g, &v));
        let (m, _) = fp_forward(&v, &m0, None, g).unwrap();
        for slice in &m {
            prop_assert!((slice.total_mass() - 1.0).abs() < 1e-12);
            prop_assert!(slice.min() >= -1e-12);
        }
    }

    #[test]
    fn expression_parser_never_panics(s in "\\PC*") {
        let _ = parse_expression(&s);
    }

    #[test]
    fn expression_parser_total_on_structured_input(
        kind in 0usize..4,
        a in -1e6f64..1e6,
        b in -1e6f64..1e6,
    ) {
        let s = match kind {
            0 => format!("cos_sum"),
            1 => format!("gaussian_bump({a}, {b})"),
            2 => format!("gaussian_bump({a};{b})"),
            _ => format!("{a}*{b}"),
        };
        let _ = parse_expression(&s);
    }

    #[test]
    fn config_parser_never_panics(s in "\\PC*") {
        let _ = Config::from_str(&s);
    }
}
