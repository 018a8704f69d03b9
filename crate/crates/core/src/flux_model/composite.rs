use std::fmt;
use std::sync::Arc;

use super::{Assumptions, FluxField, FluxFunction, Side, TwoArgFlux};

/// A coefficient `v(t, x)` with one-sided limits in `x`.
pub trait CoefficientField: Send + Sync {
    fn coefficient(&self, t: f64, x: f64) -> f64;

    fn coefficient_from(&self, side: Side, t: f64, x: f64) -> f64 {
        let _ = side;
        self.coefficient(t, x)
    }

    /// Bounds `[lo, hi]` on the values taken.
    fn coefficient_range(&self) -> (f64, f64);

    /// Finitely many values the coefficient takes, when known; used for assumption checks.
    fn sample_values(&self) -> Vec<f64> {
        let (lo, hi) = self.coefficient_range();
        (0..=16).map(|k| lo + (hi - lo) * k as f64 / 16.0).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantCoefficient(pub f64);

impl CoefficientField for ConstantCoefficient {
    fn coefficient(&self, _t: f64, _x: f64) -> f64 {
        self.0
    }

    fn coefficient_range(&self) -> (f64, f64) {
        (self.0, self.0)
    }

    fn sample_values(&self) -> Vec<f64> {
        vec![self.0]
    }
}

/// `v = left` for `x < x0 + s t`, `right` otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannCoefficient {
    pub left: f64,
    pub right: f64,
    pub x0: f64,
    pub speed: f64,
}

impl CoefficientField for RiemannCoefficient {
    fn coefficient(&self, t: f64, x: f64) -> f64 {
        if x < self.x0 + self.speed * t {
            self.left
        } else {
            self.right
        }
    }

    fn coefficient_from(&self, side: Side, t: f64, x: f64) -> f64 {
        let s = self.x0 + self.speed * t;
        let left = match side {
            Side::Left => x <= s,
            Side::Right => x < s,
        };
        if left {
            self.left
        } else {
            self.right
        }
    }

    fn coefficient_range(&self) -> (f64, f64) {
        (self.left.min(self.right), self.left.max(self.right))
    }

    fn sample_values(&self) -> Vec<f64> {
        vec![self.left, self.right]
    }
}

/// A user-supplied closed-form `v(t, x)`.
#[derive(Clone)]
pub struct ClosedFormCoefficient {
    f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    range: (f64, f64),
}

impl ClosedFormCoefficient {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, range: (f64, f64)) -> Self {
        Self {
            f: Arc::new(f),
            range,
        }
    }
}

impl CoefficientField for ClosedFormCoefficient {
    fn coefficient(&self, t: f64, x: f64) -> f64 {
        (self.f)(t, x)
    }

    fn coefficient_range(&self) -> (f64, f64) {
        self.range
    }
}

/// `f(t, x, ω) = F(v(t, x), ω)`.
#[derive(Clone)]
pub struct CompositeFlux {
    function: TwoArgFlux,
    coefficient: Arc<dyn CoefficientField>,
}

impl fmt::Debug for CompositeFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CompositeFlux({:?})", self.function)
    }
}

impl CompositeFlux {
    pub fn new(function: TwoArgFlux, coefficient: Arc<dyn CoefficientField>) -> Self {
        Self {
            function,
            coefficient,
        }
    }

    pub fn function(&self) -> &TwoArgFlux {
        &self.function
    }

    pub fn coefficient(&self) -> &Arc<dyn CoefficientField> {
        &self.coefficient
    }

    /// Whether `F(α, 0) = 0` and `F(α, 1) = h₁` hold on the coefficient's sample values.
    pub fn satisfies_endpoint_conditions(&self) -> bool {
        self.function
            .endpoint_value(&self.coefficient.sample_values())
            .is_ok()
    }

    pub fn into_field(self) -> FluxField {
        let (lo, hi) = self.coefficient.coefficient_range();
        let lip = self.function.lip(lo, hi);
        let f2 = self.satisfies_endpoint_conditions();
        FluxField::new(
            format!("composite({})", self.function.name()),
            Arc::new(self),
            lip,
        )
        .with_assumptions(Assumptions {
            f1: true,
            f2,
            f3: true,
        })
    }
}

impl FluxFunction for CompositeFlux {
    fn value(&self, t: f64, x: f64, w: f64) -> f64 {
        self.function.value(self.coefficient.coefficient(t, x), w)
    }

    fn value_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        self.function
            .value(self.coefficient.coefficient_from(side, t, x), w)
    }

    fn d_omega(&self, t: f64, x: f64, w: f64) -> f64 {
        self.function.d_omega(self.coefficient.coefficient(t, x), w)
    }

    fn d_omega_from(&self, side: Side, t: f64, x: f64, w: f64) -> f64 {
        self.function
            .d_omega(self.coefficient.coefficient_from(side, t, x), w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_coefficient_substitution() {
        let f = CompositeFlux::new(
            TwoArgFlux::alpha_logistic(),
            Arc::new(ConstantCoefficient(1.0)),
        )
        .into_field();
        assert_eq!(f.eval(0.0, 0.0, 0.5).unwrap(), 0.25);
        assert_eq!(f.eval(3.0, -2.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn riemann_coefficient_one_sided() {
        let v = RiemannCoefficient {
            left: 1.0,
            right: 0.0,
            x0: 0.0,
            speed: 0.5,
        };
        let f = CompositeFlux::new(TwoArgFlux::shifted_logistic(), Arc::new(v)).into_field();
        assert!(f.assumptions().f2);
        assert_eq!(f.value_from(Side::Left, 1.0, 0.5, 0.5), 0.5);
        assert_eq!(f.value_from(Side::Right, 1.0, 0.5, 0.5), 0.25);
        assert!((f.lip() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn alpha_linear_fails_endpoint_flag() {
        let v = RiemannCoefficient {
            left: 1.0,
            right: 0.0,
            x0: 0.0,
            speed: 0.0,
        };
        let f = CompositeFlux::new(TwoArgFlux::alpha_linear(), Arc::new(v)).into_field();
        assert!(!f.assumptions().f2);
    }
}
