//! Exact front tracking for Burgers with data 1, 0, 1, then a regulated decomposition of the
//! solution with budget ε = 0.25 and its certificate.

use regflux::hyperbolic::{ScalarFlux, SolutionForm};
use regflux::parabolic::Profile;
use regflux::regulated::Rectangle;
use regflux::triangular::{certify, solve_entropy, VMethod};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = ScalarFlux::burgers((0.0, 1.0));
    let v0 = Profile::Steps {
        breakpoints: vec![0.0, 1.0],
        values: vec![1.0, 0.0, 1.0],
    };
    let (v, method) = solve_entropy(
        &g,
        &v0,
        4.0,
        (-2.0, 6.0),
        16,
        0.005,
        Some(VMethod::FrontTracking),
    )?;
    println!("method {method:?}, exact: {}", v.is_exact());
    if let SolutionForm::Waves(w) = &v.form {
        println!(
            "{} fronts, {} interaction times",
            w.fronts.len(),
            w.events.len()
        );
        for t in [0.0, 1.0, 2.0, 4.0] {
            println!(
                "t = {t}: {} active fronts, TV {:.3}",
                w.active(t).len(),
                v.total_variation(t)
            );
        }
    }

    let rect = Rectangle {
        t_max: 4.0,
        x_min: -1.0,
        x_max: 4.0,
    };
    let (e, c) = certify(&v, 0.25, rect)?;
    println!(
        "{} bands from {} characteristics; uncovered time {:.3}, sup distance {:.3}, certified {}",
        e.field.bands().len(),
        e.points.len(),
        c.uncovered_time,
        c.sup_distance,
        c.passed
    );
    Ok(())
}
