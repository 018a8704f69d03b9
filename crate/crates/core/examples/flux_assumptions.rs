//! Catalog fluxes and the structural assumptions they declare, checked empirically on a
//! sampling plan; mollification of an interface flux.

use std::sync::Arc;

use regflux::flux_model::{
    mollify, verify_assumptions, CompositeFlux, FluxField, InterfaceFlux, RiemannCoefficient,
    SamplingPlan, SmoothFlux, TwoArgFlux,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cq = SmoothFlux::concave_quadratic();
    let interface = InterfaceFlux::stationary(cq.clone(), cq.scaled(2.0))?.into_field();
    let fluxes = vec![
        FluxField::homogeneous(SmoothFlux::burgers()),
        FluxField::homogeneous(SmoothFlux::cubic()),
        mollify(&interface, 0.1)?,
        interface,
        CompositeFlux::new(
            TwoArgFlux::shifted_logistic(),
            Arc::new(RiemannCoefficient {
                left: 1.0,
                right: 0.0,
                x0: 0.0,
                speed: 0.5,
            }),
        )
        .into_field(),
    ];
    let plan = SamplingPlan::uniform((0.0, 1.0, 5), (-1.0, 1.0, 41), (0.0, 1.0, 101));
    println!(
        "{:<66} {:>6} {:>10} {:>20} {:>6}",
        "flux", "L", "est. L", "declared f1/f2/f3", "f2 ok"
    );
    for f in &fluxes {
        let r = verify_assumptions(f, &plan)?;
        let a = f.assumptions();
        println!(
            "{:<66} {:>6.3} {:>10.4} {:>20} {:>6}",
            f.name(),
            f.lip(),
            r.lipschitz_estimate,
            format!("{}/{}/{}", a.f1, a.f2, a.f3),
            r.f2_ok
        );
    }
    Ok(())
}
