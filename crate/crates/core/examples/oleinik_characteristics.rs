//! Godunov for Burgers with a rarefaction followed by a shock; the one-sided Lipschitz bound
//! and minimal forward characteristics: one inside the fan, which is a ray, and one from the
//! fan origin, which grid data place only to within the smeared fan edge.

use regflux::hyperbolic::{
    check_oleinik, default_lambda, min_forward_characteristic, solve_godunov, GodunovParams,
    ScalarFlux,
};
use regflux::parabolic::{Grid1D, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = ScalarFlux::burgers((0.0, 1.0));
    let grid = Grid1D::new(-2.0, 4.0, 1200)?;
    let v0 = Profile::Steps {
        breakpoints: vec![0.0, 1.0],
        values: vec![0.2, 1.0, 0.2],
    };
    let v = solve_godunov(
        &g,
        &v0.cell_averages(&grid),
        2.0,
        &grid,
        &GodunovParams::default(),
    )?;

    let report = check_oleinik(&v, default_lambda(&v), &[0.5, 1.0, 2.0]);
    for s in &report.samples {
        println!(
            "t = {}: excess {:.2e}, slack {:.2e}",
            s.t, s.excess, s.slack
        );
    }
    println!("one-sided Lipschitz: {}", report.passed);

    // the fan spans 0.2t < x < t; the ray through (0.5, 0.3) has slope 0.6
    let ray = min_forward_characteristic(&v, 0.5, 0.3, 2.0)?;
    let origin = min_forward_characteristic(&v, 0.0, 0.0, 2.0)?;
    for t in [0.5, 1.0, 2.0] {
        println!(
            "t = {t}: ray x = {:.3} (exact {:.3}), from origin x = {:.3} (slowest ray {:.3})",
            ray.curve.position(t),
            0.6 * t,
            origin.curve.position(t),
            0.2 * t
        );
    }
    Ok(())
}
