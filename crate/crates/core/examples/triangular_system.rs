//! The triangular system `v_t + g(v)_x = 0`, `u_t + F(v, u)_x = ε u_xx`: `v` by front
//! tracking, its regulated certificate, then a viscosity sweep for `u` and weak residuals.

use regflux::flux_model::TwoArgFlux;
use regflux::hyperbolic::ScalarFlux;
use regflux::parabolic::Profile;
use regflux::triangular::{solve_triangular, TriangularScenario};
use regflux::vvlimit::SweepPolicy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut policy = SweepPolicy::new(-1.0, 1.5);
    policy.samples = 16;
    let sc = TriangularScenario {
        g: ScalarFlux::burgers((0.0, 1.0)),
        big_f: TwoArgFlux::shifted_logistic(),
        v0: Profile::Riemann {
            left: 1.0,
            right: 0.0,
            x0: 0.0,
        },
        u0: Profile::Bump {
            center: 0.0,
            radius: 0.6,
            height: 0.8,
        },
        schedule: vec![0.1, 0.05, 0.025, 0.0125],
        t_end: 1.0,
        eps_reg: 0.25,
        policy,
        pl_segments: 8,
        godunov_dx: 0.005,
        tests: None,
    };
    let r = solve_triangular(&sc)?;
    println!("v by {:?}", r.v_method);
    if let Some(c) = &r.certificate {
        println!(
            "regulated certificate: uncovered {:.3}, sup distance {:.3}",
            c.uncovered_time, c.sup_distance
        );
    }
    let gaps: Vec<String> = r
        .sweep
        .consecutive_gaps
        .iter()
        .map(|g| format!("{g:.3e}"))
        .collect();
    println!(
        "u gaps [{}], cauchy {:?}",
        gaps.join(", "),
        r.sweep.cauchy_pass
    );
    for (phi, res) in r.tests.iter().zip(&r.weak_residuals) {
        println!(
            "weak residual at (t {:.2}, x {:.2}): {res:+.3e}",
            phi.tc, phi.xc
        );
    }
    println!("class F membership: {:?}", r.class_f_membership());
    Ok(())
}
