//! Viscous Burgers shock joining 1 and 0: both solvers against the exact traveling wave,
//! which moves at speed ½.

use regflux::flux_model::{FluxField, SmoothFlux};
use regflux::parabolic::{solve_fv, solve_mild, FvParams, Grid1D, MildParams, Profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (eps, t_end, x0) = (0.05, 1.0, -0.25);
    let grid = Grid1D::new(-2.0, 2.0, 1600)?;
    let wave = |t: f64| Profile::TravelingWave {
        left: 1.0,
        right: 0.0,
        x0: x0 + 0.5 * t,
        eps,
    };
    let u0 = wave(0.0).cell_averages(&grid);
    let flux = FluxField::homogeneous(SmoothFlux::burgers());

    let fv = solve_fv(
        &flux,
        &grid,
        &u0,
        eps,
        t_end,
        &FvParams {
            cfl: 0.5,
            samples: 4,
        },
    )?;
    let mild = solve_mild(
        &flux,
        &grid,
        &u0,
        eps,
        t_end,
        &MildParams {
            samples: 4,
            ..Default::default()
        },
    )?;
    let exact = wave(t_end).cell_averages(&grid);
    let l1 = |u: &[f64]| {
        u.iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * grid.dx()
    };

    println!(
        "L1 error at T = {t_end}: fv {:.3e}, mild {:.3e}",
        l1(&fv.profiles[4]),
        l1(&mild.profiles[4])
    );
    println!("cross-solver L1: {:.3e}", fv.l1_distance(&mild, 4)?);
    println!(
        "fv mass + outflow drift: {:.1e}",
        fv.diagnostics.mass_drift()
    );
    Ok(())
}
