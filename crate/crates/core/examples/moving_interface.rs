//! An interface moving along `γ(t) = 0.3t`. The Galilean shift turns it into a stationary
//! interface; the sweep converges in either frame.

use regflux::flux_model::{galilean_shift, InterfaceFlux, SmoothFlux};
use regflux::parabolic::Profile;
use regflux::regulated::Curve;
use regflux::vvlimit::{eps_sweep, SweepPolicy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cq = SmoothFlux::concave_quadratic();
    let iface = InterfaceFlux::new(
        cq.clone(),
        cq.scaled(2.0),
        Curve::linear(0.0, 0.5, 0.0, 0.3),
    )?;
    let shifted = galilean_shift(&iface);
    // in the moving frame the flux is f − 0.3ω on each side, switching at x = 0
    for (x, w) in [(-0.1, 0.4), (0.1, 0.4)] {
        println!(
            "shifted f(0.25, {x}, {w}) = {:.4}",
            shifted.value(0.25, x, w)
        );
    }

    let data = Profile::Riemann {
        left: 0.3,
        right: 0.8,
        x0: 0.0,
    };
    let mut policy = SweepPolicy::new(-1.0, 1.0);
    policy.samples = 32;
    let schedule = [0.2, 0.1, 0.05, 0.025];
    for (label, flux) in [("lab", iface.clone().into_field()), ("moving", shifted)] {
        let r = eps_sweep(&flux, &data, &schedule, 0.5, &policy)?;
        let gaps: Vec<String> = r
            .consecutive_gaps
            .iter()
            .map(|g| format!("{g:.3e}"))
            .collect();
        println!("{label:>6} frame gaps [{}]", gaps.join(", "));
    }
    Ok(())
}
