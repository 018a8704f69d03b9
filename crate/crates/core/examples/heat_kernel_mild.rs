//! The mild solver with zero flux reproduces the heat semigroup: `G(1, ·)` spreads to
//! `G(1 + εt, ·)`.

use regflux::flux_model::{FluxField, SmoothFlux};
use regflux::parabolic::{solve_mild, Grid1D, MildParams, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps = 0.1;
    let grid = Grid1D::new(-8.0, 8.0, 6400)?;
    let u0 = Profile::Gaussian {
        time: 1.0,
        center: 0.0,
        mass: 1.0,
    }
    .cell_averages(&grid);
    let flux = FluxField::homogeneous(SmoothFlux::linear(0.0));
    let sol = solve_mild(
        &flux,
        &grid,
        &u0,
        eps,
        1.0,
        &MildParams {
            samples: 4,
            ..Default::default()
        },
    )?;

    println!("{:>6} {:>12} {:>8}", "t", "sup error", "picard");
    for (k, t) in sol.times.iter().enumerate() {
        let exact = Profile::Gaussian {
            time: 1.0 + eps * t,
            center: 0.0,
            mass: 1.0,
        }
        .cell_averages(&grid);
        let err = sol.profiles[k]
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{t:>6.2} {err:>12.3e} {:>8}",
            sol.diagnostics.picard_iters[k]
        );
    }
    Ok(())
}
