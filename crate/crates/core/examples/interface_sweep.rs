//! Vanishing-viscosity sweep across a stationary interface between `ω(1−ω)` and `2ω(1−ω)`:
//! sup-gaps of the integrated profiles shrink as ε halves.

use regflux::flux_model::{InterfaceFlux, SmoothFlux};
use regflux::parabolic::Profile;
use regflux::vvlimit::{entropy_dissipation, eps_sweep, SweepPolicy, Window};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cq = SmoothFlux::concave_quadratic();
    let flux = InterfaceFlux::stationary(cq.clone(), cq.scaled(2.0))?.into_field();
    let data = Profile::Riemann {
        left: 0.3,
        right: 0.8,
        x0: 0.0,
    };
    let mut policy = SweepPolicy::new(-1.0, 1.0);
    policy.samples = 32;
    let r = eps_sweep(&flux, &data, &[0.2, 0.1, 0.05, 0.025, 0.0125], 0.5, &policy)?;

    let window = Window {
        t0: 0.0,
        t1: 0.5,
        x0: -0.5,
        x1: 0.5,
    };
    println!(
        "{:>8} {:>12} {:>8} {:>12}",
        "eps", "gap", "ratio", "dissipation"
    );
    for (k, run) in r.runs.iter().enumerate() {
        let gap = k.checked_sub(1).map(|i| r.consecutive_gaps[i]);
        let ratio = k.checked_sub(2).map(|i| r.ratios[i]);
        println!(
            "{:>8} {:>12} {:>8} {:>12.4}",
            run.eps,
            gap.map_or("-".into(), |g| format!("{g:.3e}")),
            ratio.map_or("-".into(), |q| format!("{q:.3}")),
            entropy_dissipation(&run.solution, window)?
        );
    }
    println!("cauchy (ratio ≤ {}): {:?}", r.cauchy_ratio, r.cauchy_pass);
    Ok(())
}
