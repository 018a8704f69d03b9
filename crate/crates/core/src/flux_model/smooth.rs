use std::fmt;
use std::sync::Arc;

use super::{Assumptions, FluxError, FluxField, FluxFunction};

type Fn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type Fn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A smooth one-state flux `g(ω)` with analytic first and second derivatives.
#[derive(Clone)]
pub struct SmoothFlux {
    name: String,
    f: Fn1,
    df: Fn1,
    d2f: Fn1,
}

impl fmt::Debug for SmoothFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothFlux({})", self.name)
    }
}

impl SmoothFlux {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            df: Arc::new(df),
            d2f: Arc::new(d2f),
        }
    }

    /// `ω²/2`
    pub fn burgers() -> Self {
        Self::new("burgers", |w| 0.5 * w * w, |w| w, |_| 1.0)
    }

    /// `ω(1-ω)`
    pub fn concave_quadratic() -> Self {
        Self::new(
            "concave_quadratic",
            |w| w * (1.0 - w),
            |w| 1.0 - 2.0 * w,
            |_| -2.0,
        )
    }

    /// `ω³`, inflection at 0.
    pub fn cubic() -> Self {
        Self::new("cubic", |w| w * w * w, |w| 3.0 * w * w, |w| 6.0 * w)
    }

    /// `cω`
    pub fn linear(c: f64) -> Self {
        Self::new(format!("linear({c})"), move |w| c * w, move |_| c, |_| 0.0)
    }

    /// Looks up `burgers`, `concave_quadratic`, `cubic` or `zero`.
    pub fn from_catalog(name: &str) -> Result<Self, FluxError> {
        match name {
            "burgers" => Ok(Self::burgers()),
            "concave_quadratic" => Ok(Self::concave_quadratic()),
            "cubic" => Ok(Self::cubic()),
            "zero" => Ok(Self::linear(0.0)),
            other => Err(FluxError::UnknownCatalog(other.to_string())),
        }
    }

    /// `k · g(ω)`
    pub fn scaled(self, k: f64) -> Self {
        let (f, df, d2f) = (self.f, self.df, self.d2f);
        Self {
            name: if k == 1.0 {
                self.name
            } else {
                format!("{k}*{}", self.name)
            },
            f: Arc::new(move |w| k * f(w)),
            df: Arc::new(move |w| k * df(w)),
            d2f: Arc::new(move |w| k * d2f(w)),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn value(&self, w: f64) -> f64 {
        (self.f)(w)
    }

    #[inline]
    pub fn derivative(&self, w: f64) -> f64 {
        (self.df)(w)
    }

    #[inline]
    pub fn second_derivative(&self, w: f64) -> f64 {
        (self.d2f)(w)
    }

    /// Sampled `max |g'|` on `[lo, hi]`.
    pub fn lipschitz_on(&self, lo: f64, hi: f64) -> f64 {
        let n = 2000;
        (0..=n)
            .map(|k| {
                let w = lo + (hi - lo) * k as f64 / n as f64;
                self.derivative(w).abs()
            })
            .fold(0.0, f64::max)
    }
}

impl FluxFunction for SmoothFlux {
    fn value(&self, _t: f64, _x: f64, w: f64) -> f64 {
        (self.f)(w)
    }

    fn d_omega(&self, _t: f64, _x: f64, w: f64) -> f64 {
        (self.df)(w)
    }

    fn d_omega_from(&self, _side: super::Side, _t: f64, _x: f64, w: f64) -> f64 {
        (self.df)(w)
    }
}

/// A smooth two-argument function `F(α, ω)` used in composite fluxes.
#[derive(Clone)]
pub struct TwoArgFlux {
    name: String,
    f: Fn2,
    d_omega: Fn2,
    d2_omega: Fn2,
    lip: Fn2,
}

impl fmt::Debug for TwoArgFlux {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TwoArgFlux({})", self.name)
    }
}

impl TwoArgFlux {
    /// `lip(a, b)` must bound `|F_ω(α, ω)|` for `α ∈ [a, b]`, `ω ∈ [0, 1]`.
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d_omega: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        d2_omega: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        lip: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            d_omega: Arc::new(d_omega),
            d2_omega: Arc::new(d2_omega),
            lip: Arc::new(lip),
        }
    }

    /// `α ω (1-ω)`
    pub fn alpha_logistic() -> Self {
        Self::new(
            "alpha_logistic",
            |a, w| a * w * (1.0 - w),
            |a, w| a * (1.0 - 2.0 * w),
            |a, _| -2.0 * a,
            |lo, hi| lo.abs().max(hi.abs()),
        )
    }

    /// `(1+α) ω (1-ω)`
    pub fn shifted_logistic() -> Self {
        Self::new(
            "shifted_logistic",
            |a, w| (1.0 + a) * w * (1.0 - w),
            |a, w| (1.0 + a) * (1.0 - 2.0 * w),
            |a, _| -2.0 * (1.0 + a),
            |lo, hi| (1.0 + lo).abs().max((1.0 + hi).abs()),
        )
    }

    /// `α ω`; violates `F(α, 1) = h₁`.
    pub fn alpha_linear() -> Self {
        Self::new(
            "alpha_linear",
            |a, w| a * w,
            |a, _| a,
            |_, _| 0.0,
            |lo, hi| lo.abs().max(hi.abs()),
        )
    }

    pub fn from_catalog(name: &str) -> Result<Self, FluxError> {
        match name {
            "alpha_logistic" => Ok(Self::alpha_logistic()),
            "shifted_logistic" => Ok(Self::shifted_logistic()),
            "alpha_linear" => Ok(Self::alpha_linear()),
            other => Err(FluxError::UnknownCatalog(other.to_string())),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn value(&self, alpha: f64, w: f64) -> f64 {
        (self.f)(alpha, w)
    }

    #[inline]
    pub fn d_omega(&self, alpha: f64, w: f64) -> f64 {
        (self.d_omega)(alpha, w)
    }

    #[inline]
    pub fn d2_omega(&self, alpha: f64, w: f64) -> f64 {
        (self.d2_omega)(alpha, w)
    }

    pub fn lip(&self, alpha_lo: f64, alpha_hi: f64) -> f64 {
        (self.lip)(alpha_lo, alpha_hi)
    }

    /// Checks `F(α, 0) = 0` and `F(α, 1) = h₁` on the given coefficient values and
    /// returns `h₁`.
    pub fn endpoint_value(&self, alphas: &[f64]) -> Result<f64, FluxError> {
        let Some(&first) = alphas.first() else {
            return Err(FluxError::InvalidParameter("no coefficient values".into()));
        };
        let h1 = self.value(first, 1.0);
        for &a in alphas {
            let at_zero = self.value(a, 0.0);
            if at_zero.abs() > 1e-12 {
                return Err(FluxError::Assumption(format!(
                    "{}: F({a}, 0) = {at_zero} != 0",
                    self.name
                )));
            }
            let at_one = self.value(a, 1.0);
            if (at_one - h1).abs() > 1e-12 {
                return Err(FluxError::Assumption(format!(
                    "{}: F({a}, 1) = {at_one} != h1 = {h1}",
                    self.name
                )));
            }
        }
        Ok(h1)
    }

    /// The homogeneous flux `ω ↦ F(α, ω)`.
    pub fn freeze(&self, alpha: f64) -> FluxField {
        let f2 = self.endpoint_value(&[alpha]).is_ok();
        FluxField::new(
            format!("{}[alpha={alpha}]", self.name),
            Arc::new(Frozen {
                inner: self.clone(),
                alpha,
            }),
            self.lip(alpha, alpha),
        )
        .with_assumptions(Assumptions {
            f1: true,
            f2,
            f3: false,
        })
    }
}

struct Frozen {
    inner: TwoArgFlux,
    alpha: f64,
}

impl FluxFunction for Frozen {
    fn value(&self, _t: f64, _x: f64, w: f64) -> f64 {
        self.inner.value(self.alpha, w)
    }

    fn d_omega(&self, _t: f64, _x: f64, w: f64) -> f64 {
        self.inner.d_omega(self.alpha, w)
    }

    fn d_omega_from(&self, _side: super::Side, _t: f64, _x: f64, w: f64) -> f64 {
        self.inner.d_omega(self.alpha, w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_lookup() {
        assert!(SmoothFlux::from_catalog("burgers").is_ok());
        assert!(matches!(
            SmoothFlux::from_catalog("nope"),
            Err(FluxError::UnknownCatalog(_))
        ));
        assert!(TwoArgFlux::from_catalog("shifted_logistic").is_ok());
    }

    #[test]
    fn scaled_flux() {
        let g = SmoothFlux::concave_quadratic().scaled(2.0);
        assert_eq!(g.value(0.5), 0.5);
        assert_eq!(g.derivative(0.0), 2.0);
        assert!((g.lipschitz_on(0.0, 1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_check() {
        let f = TwoArgFlux::shifted_logistic();
        assert_eq!(f.endpoint_value(&[0.0, 1.0, 2.5]).unwrap(), 0.0);
        let g = TwoArgFlux::alpha_linear();
        assert!(matches!(
            g.endpoint_value(&[0.0, 1.0]),
            Err(FluxError::Assumption(_))
        ));
    }
}
