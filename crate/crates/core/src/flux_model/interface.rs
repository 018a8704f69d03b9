use std::sync::Arc;

use super::{Assumptions, FluxError, FluxField, FluxFunction, Side, SmoothFlux};
use crate::regulated::Curve;

/// `f_l(ω)` on `{x ≤ γ(t)}` and `f_r(ω)` on `{x > γ(t)}`.
#[derive(Clone, Debug)]
pub struct InterfaceFlux {
    left: SmoothFlux,
    right: SmoothFlux,
    gamma: Curve,
}

impl InterfaceFlux {
    /// Requires `f_l(0) = f_r(0) = 0` and `f_l(1) = f_r(1)`.
    pub fn new(left: SmoothFlux, right: SmoothFlux, gamma: Curve) -> Result<Self, FluxError> {
        let tol = 1e-14;
        if left.value(0.0).abs() > tol || right.value(0.0).abs() > tol {
            return Err(FluxError::Assumption(format!(
                "interface fluxes must vanish at 0 (f_l(0)={}, f_r(0)={})",
                left.value(0.0),
                right.value(0.0)
            )));
        }
        if (left.value(1.0) - right.value(1.0)).abs() > tol {
            return Err(FluxError::Assumption(format!(
                "interface fluxes must agree at 1 (f_l(1)={}, f_r(1)={})",
                left.value(1.0),
                right.value(1.0)
            )));
        }
        Ok(Self { left, right, gamma })
    }

    pub fn stationary(left: SmoothFlux, right: SmoothFlux) -> Result<Self, FluxError> {
        Self::new(left, right, Curve::constant(0.0))
    }

    pub fn left(&self) -> &SmoothFlux {
        &self.left
    }

    pub fn right(&self) -> &SmoothFlux {
        &self.right
    }

    pub fn gamma(&self) -> &Curve {
        &self.gamma
    }

    /// Step representation of `γ̇`.
    pub fn gamma_dot(&self, t: f64) -> f64 {
        self.gamma.slope(t)
    }

    pub fn lip(&self) -> f64 {
        self.left
            .lipschitz_on(0.0, 1.0)
            .max(self.right.lipschitz_on(0.0, 1.0))
    }

    pub fn into_field(self) -> FluxField {
        let name = format!("interface({},{})", self.left.name(), self.right.name());
        let lip = self.lip();
        FluxField::new(name, Arc::new(self), lip).with_assumptions(Assumptions {
            f1: true,
            f2: true,
            f3: true,
        })
    }

    fn pick(&self, side: Side, t: f64, x: f64) -> &SmoothFlux {
        let g = self.gamma.position(t);
        let left = match side {
            Side::Left => x <= g,
            Side::Right => x < g,
        };
        if left {
            &self.left
        } else {
            &self.right
        }
    }
}

impl FluxFunction for InterfaceFlux {
    fn value(&self, t: f64, x: f64, w: f64) -> f64 {
        self.pick(Side::Left, t, x).value(w)
    }

    fn value_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        self.pick(side, t, x).value(w)
    }

    fn d_omega(&self, t: f64, x: f64, w: f64) -> f64 {
        self.pick(Side::Left, t, x).derivative(w)
    }

    fn d_omega_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        self.pick(side, t, x).derivative(w)
    }
}

/// Interface frozen at `x = 0` in the frame moving with `γ`.
struct ShiftedInterface {
    inner: InterfaceFlux,
}

impl ShiftedInterface {
    fn pick(&self, side: Side, x: f64) -> &SmoothFlux {
        let left = match side {
            Side::Left => x <= 0.0,
            Side::Right => x < 0.0,
        };
        if left {
            &self.inner.left
        } else {
            &self.inner.right
        }
    }
}

impl FluxFunction for ShiftedInterface {
    fn value(&self, t: f64, x: f64, w: f64) -> f64 {
        self.pick(Side::Left, x).value(w) - self.inner.gamma_dot(t) * w
    }

    fn value_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        self.pick(side, x).value(w) - self.inner.gamma_dot(t) * w
    }

    fn d_omega(&self, t: f64, x: f64, w: f64) -> f64 {
        self.pick(Side::Left, x).derivative(w) - self.inner.gamma_dot(t)
    }

    fn d_omega_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        self.pick(side, x).derivative(w) - self.inner.gamma_dot(t)
    }
}

/// The moving-frame flux `f̃(t, x, ω) = f_{l/r}(ω) − γ̇(t) ω` with the interface at `x = 0`.
///
/// If `ũ` solves the shifted problem with data `u0(· + γ(0))` then `u(t, x) = ũ(t, x − γ(t))`.
pub fn galilean_shift(flux: &InterfaceFlux) -> FluxField {
    let gl = flux.gamma.lipschitz();
    let lip = flux.lip() + gl;
    FluxField::new(
        format!("shifted({},{})", flux.left.name(), flux.right.name()),
        Arc::new(ShiftedInterface {
            inner: flux.clone(),
        }),
        lip,
    )
    .with_assumptions(Assumptions {
        f1: true,
        f2: true,
        f3: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> (SmoothFlux, SmoothFlux) {
        (
            SmoothFlux::concave_quadratic(),
            SmoothFlux::concave_quadratic().scaled(2.0),
        )
    }

    #[test]
    fn boundary_goes_left() {
        let (l, r) = pair();
        let f = InterfaceFlux::new(l, r, Curve::linear(0.0, 2.0, 0.0, 0.5)).unwrap();
        assert_eq!(f.value(1.0, 0.5, 0.5), 0.25);
        assert_eq!(f.value(1.0, 0.6, 0.5), 0.5);
        assert_eq!(f.value_from(Side::Right, 1.0, 0.5, 0.5), 0.5);
        assert_eq!(f.value_from(Side::Left, 1.0, 0.5, 0.5), 0.25);
    }

    #[test]
    fn rejects_mismatched_endpoint() {
        let r = SmoothFlux::burgers();
        assert!(matches!(
            InterfaceFlux::stationary(SmoothFlux::concave_quadratic(), r),
            Err(FluxError::Assumption(_))
        ));
    }

    #[test]
    fn shift_subtracts_interface_speed() {
        let (l, r) = pair();
        let f =
            InterfaceFlux::new(l.clone(), r.clone(), Curve::linear(0.0, 2.0, 0.0, 0.3)).unwrap();
        let g = galilean_shift(&f);
        for &w in &[0.0, 0.2, 0.7, 1.0] {
            assert!((g.value(0.5, -0.1, w) - (l.value(w) - 0.3 * w)).abs() < 1e-15);
            assert!((g.value(0.5, 0.1, w) - (r.value(w) - 0.3 * w)).abs() < 1e-15);
        }
    }

    #[test]
    fn shift_of_stationary_is_identity() {
        let (l, r) = pair();
        let f = InterfaceFlux::stationary(l, r).unwrap();
        let g = galilean_shift(&f);
        for k in 0..50 {
            let x = -1.0 + 0.04 * k as f64;
            let w = k as f64 / 49.0;
            assert_eq!(g.value(0.3, x, w), f.value(0.3, x, w));
        }
    }

    #[test]
    fn piecewise_gamma_gives_two_valued_speed() {
        let (l, r) = pair();
        let gamma = Curve::new(vec![(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]).unwrap();
        let f = InterfaceFlux::new(l.clone(), r, gamma).unwrap();
        let g = galilean_shift(&f);
        assert_eq!(g.value(0.5, -1.0, 0.5), l.value(0.5));
        assert_eq!(g.value(1.5, -1.0, 0.5), l.value(0.5) - 0.5);
    }
}
