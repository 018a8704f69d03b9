//! Entropy-side diagnostics of a viscous run: the Jensen functional of the flux, entropy
//! fluxes, dissipation on a window and weak residuals against bump test functions.

use regflux::flux_model::{FluxField, SmoothFlux};
use regflux::parabolic::{solve_fv, FvParams, Grid1D, Profile};
use regflux::vvlimit::{
    entropy_dissipation, jensen_i, weak_residual, EntropyPair, TestFunction, Window,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let burgers = FluxField::homogeneous(SmoothFlux::burgers());
    println!(
        "I(1, 0) = {:.12} (1/12 = {:.12})",
        jensen_i(&burgers, 0.0, 0.0, 1.0, 0.0),
        1.0 / 12.0
    );

    let eta = EntropyPair::quadratic();
    for w in [0.25, 0.5, 1.0] {
        println!(
            "q_{}({w}) = {:.6}",
            eta.name(),
            eta.q(&burgers, 0.0, 0.0, w)?
        );
    }

    let grid = Grid1D::new(-3.0, 3.0, 1200)?;
    let u0 = Profile::Bump {
        center: 0.0,
        radius: 1.0,
        height: 0.9,
    }
    .cell_averages(&grid);
    let tests = TestFunction::catalog(1.0, -1.5, 1.5);
    let window = Window {
        t0: 0.0,
        t1: 1.0,
        x0: -1.5,
        x1: 1.5,
    };
    println!("{:>7} {:>12} {:>12}", "eps", "dissipation", "max |R|");
    for eps in [0.04, 0.02, 0.01] {
        let run = solve_fv(
            &burgers,
            &grid,
            &u0,
            eps,
            1.0,
            &FvParams {
                cfl: 0.5,
                samples: 32,
            },
        )?;
        let res = weak_residual(&run, &burgers, &tests)?;
        let worst = res.iter().map(|r| r.abs()).fold(0.0, f64::max);
        println!(
            "{eps:>7} {:>12.5} {worst:>12.3e}",
            entropy_dissipation(&run, window)?
        );
    }
    Ok(())
}
