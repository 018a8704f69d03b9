use std::sync::Arc;

use proptest::prelude::*;
use regflux::flux_model::{
    galilean_shift, CompositeFlux, InterfaceFlux, RiemannCoefficient, SmoothFlux, TwoArgFlux,
};
use regflux::hyperbolic::{godunov_flux, ScalarFlux};
use regflux::parabolic::{
    contraction_bound, solve_fv, solve_mild, FvParams, Grid1D, MildParams, Profile,
};
use regflux::regulated::Curve;
use regflux::vvlimit::{eps_sweep, jensen_i, SweepPolicy};

fn interface(c: f64) -> InterfaceFlux {
    InterfaceFlux::new(
        SmoothFlux::concave_quadratic(),
        SmoothFlux::concave_quadratic().scaled(2.0),
        Curve::linear(0.0, 1.0, 0.1, c),
    )
    .unwrap()
}

/// Step data on `cells / 8` blocks, zero on the outer quarter of the grid.
fn blocky(values: &[f64], cells: usize) -> Vec<f64> {
    let blocks = values.len();
    (0..cells)
        .map(|j| {
            let k = j * blocks / cells;
            if k < blocks / 4 || k >= blocks - blocks / 4 {
                0.0
            } else {
                values[k]
            }
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interface_takes_left_flux_up_to_the_curve(t in 0.0f64..1.0, dx in -1.0f64..1.0, w in 0.0f64..1.0) {
        let f = interface(0.3);
        let g = f.gamma().position(t);
        let field = f.clone().into_field();
        let x = g + dx;
        let expect = if x <= g { f.left().value(w) } else { f.right().value(w) };
        prop_assert_eq!(field.value(t, x, w), expect);
        prop_assert_eq!(field.value(t, g, w), f.left().value(w));
    }

    #[test]
    fn endpoint_conditions_hold_at_every_point(t in 0.0f64..1.0, x in -2.0f64..2.0) {
        let composite = CompositeFlux::new(
            TwoArgFlux::shifted_logistic(),
            Arc::new(RiemannCoefficient { left: 1.0, right: 0.0, x0: 0.0, speed: 0.5 }),
        )
        .into_field();
        for field in [interface(0.3).into_field(), composite] {
            prop_assert_eq!(field.value(t, x, 0.0), 0.0);
            prop_assert!((field.value(t, x, 1.0) - field.value(t, 0.0, 1.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn shift_of_a_stationary_interface_is_the_identity(t in 0.0f64..1.0, x in -1.0f64..1.0, w in 0.0f64..1.0) {
        let f = InterfaceFlux::stationary(SmoothFlux::concave_quadratic(), SmoothFlux::concave_quadratic().scaled(3.0)).unwrap();
        prop_assert_eq!(galilean_shift(&f).value(t, x, w), f.into_field().value(t, x, w));
    }

    #[test]
    fn godunov_flux_is_consistent(v in 0.0f64..1.0) {
        let g = ScalarFlux::burgers((0.0, 1.0));
        prop_assert_eq!(godunov_flux(&g, &[0.0], v, v), g.g(v));
    }

    // I = k²(v − w)⁴/12 for a quadratic flux with f'' = k: the Jensen gap of an affine f_ω.
    #[test]
    fn jensen_of_quadratic_fluxes_is_quartic(v in 0.0f64..1.0, w in 0.0f64..1.0) {
        let burgers = regflux::flux_model::FluxField::homogeneous(SmoothFlux::burgers());
        let cq = regflux::flux_model::FluxField::homogeneous(SmoothFlux::concave_quadratic());
        let d4 = (v - w).powi(4);
        prop_assert!((jensen_i(&burgers, 0.0, 0.0, v, w) - d4 / 12.0).abs() <= 1e-12);
        prop_assert!((jensen_i(&cq, 0.0, 0.0, v, w) - d4 / 3.0).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fv_keeps_the_unit_interval_and_conserves_mass(values in proptest::collection::vec(0.0f64..=1.0, 16)) {
        let grid = Grid1D::new(-2.0, 2.0, 128).unwrap();
        let u0 = blocky(&values, 128);
        let s = solve_fv(&interface(0.3).into_field(), &grid, &u0, 0.02, 0.5, &FvParams { cfl: 0.5, samples: 8 }).unwrap();
        for p in &s.profiles {
            prop_assert!(p.iter().all(|&u| (0.0..=1.0).contains(&u)));
        }
        let m0: f64 = u0.iter().sum::<f64>() * grid.dx();
        prop_assert!(s.diagnostics.mass_drift() <= 1e-12 * m0.max(1e-300));
    }

    // Contraction needs no ordering; both data vanish near the ends of the grid.
    #[test]
    fn fv_contracts_unordered_pairs(
        a in proptest::collection::vec(0.0f64..=1.0, 16),
        b in proptest::collection::vec(0.0f64..=1.0, 16),
    ) {
        let grid = Grid1D::new(-2.0, 2.0, 128).unwrap();
        let f = interface(-0.2).into_field();
        let p = FvParams { cfl: 0.5, samples: 8 };
        let s = solve_fv(&f, &grid, &blocky(&a, 128), 0.02, 0.5, &p).unwrap();
        let r = solve_fv(&f, &grid, &blocky(&b, 128), 0.02, 0.5, &p).unwrap();
        for k in 1..s.times.len() {
            prop_assert!(s.l1_distance(&r, k).unwrap() <= s.l1_distance(&r, k - 1).unwrap() + 1e-10);
        }
    }
}

#[test]
fn measured_picard_ratio_respects_the_block_bound() {
    let grid = Grid1D::new(-3.0, 3.0, 300).unwrap();
    let u0 = Profile::Bump {
        center: 0.0,
        radius: 1.0,
        height: 0.9,
    }
    .cell_averages(&grid);
    let eps = 0.1;
    for flux in [
        regflux::flux_model::FluxField::homogeneous(SmoothFlux::burgers()),
        interface(0.0).into_field(),
    ] {
        let s = solve_mild(
            &flux,
            &grid,
            &u0,
            eps,
            0.1,
            &MildParams {
                samples: 4,
                ..MildParams::default()
            },
        )
        .unwrap();
        let blocks = &s.diagnostics.blocks;
        assert!(!blocks.is_empty());
        for b in blocks.iter().filter(|b| b.iterations > 2) {
            let bound = contraction_bound(flux.lip(), eps, b.length) + 0.05;
            assert!(b.ratio <= bound, "{} > {bound}", b.ratio);
        }
    }
}

#[test]
fn gap_matrix_is_symmetric_with_zero_diagonal() {
    let mut policy = SweepPolicy::new(-1.0, 1.0);
    policy.samples = 8;
    let r = eps_sweep(
        &interface(0.0).into_field(),
        &Profile::Riemann {
            left: 0.3,
            right: 0.8,
            x0: 0.0,
        },
        &[0.2, 0.1, 0.05],
        0.25,
        &policy,
    )
    .unwrap();
    for (i, row) in r.pairwise_gaps.iter().enumerate() {
        assert_eq!(row[i], 0.0);
        for (j, g) in row.iter().enumerate() {
            assert_eq!(*g, r.pairwise_gaps[j][i]);
        }
    }
}

// Expansive interface data: characteristics leave the interface on both sides. The gaps still
// decrease strictly, but only at a pre-asymptotic rate above the 0.8 ratio.
#[test]
fn expansive_interface_data_converge_slowly() {
    let mut policy = SweepPolicy::new(-1.0, 1.0);
    policy.samples = 32;
    let r = eps_sweep(
        &InterfaceFlux::stationary(
            SmoothFlux::concave_quadratic(),
            SmoothFlux::concave_quadratic().scaled(2.0),
        )
        .unwrap()
        .into_field(),
        &Profile::Riemann {
            left: 0.8,
            right: 0.3,
            x0: 0.0,
        },
        &[0.2, 0.1, 0.05, 0.025, 0.0125],
        0.5,
        &policy,
    )
    .unwrap();
    assert!(
        r.consecutive_gaps.windows(2).all(|w| w[1] < w[0]),
        "{:?}",
        r.consecutive_gaps
    );
    assert!(
        r.ratios.iter().all(|&q| q > 0.75 && q < 0.9),
        "{:?}",
        r.ratios
    );
}
