//! Regulated functions of two variables: time bands, ordered Lipschitz interface curves and
//! piecewise-constant values between them.

mod curve;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flux_model::{CoefficientField, CompositeFlux, Side, TwoArgFlux};

pub use curve::Curve;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegulatedError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("point (t={t}, x={x}) outside the field rectangle")]
    OutsideRectangle { t: f64, x: f64 },
    #[error("sample grid is empty")]
    EmptySamples,
    #[error("flux assumption violated: {0}")]
    Assumption(String),
}

/// `[0, T] × [x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub t_max: f64,
    pub x_min: f64,
    pub x_max: f64,
}

impl Rectangle {
    pub fn contains(&self, t: f64, x: f64) -> bool {
        (0.0..=self.t_max).contains(&t) && (self.x_min..=self.x_max).contains(&x)
    }
}

/// One time band `[a, b]` with curves `γ_1 < … < γ_N` and constants `α_0, …, α_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub a: f64,
    pub b: f64,
    pub curves: Vec<Curve>,
    pub alphas: Vec<f64>,
}

impl Band {
    fn index(&self, side: Side, t: f64, x: f64) -> usize {
        self.curves
            .iter()
            .filter(|c| {
                let g = c.position(t);
                match side {
                    Side::Right => g <= x,
                    Side::Left => g < x,
                }
            })
            .count()
    }

    /// Right-continuous value at `(t, x)`.
    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.alphas[self.index(Side::Right, t, x)]
    }

    pub fn value_from(&self, side: Side, t: f64, x: f64) -> f64 {
        self.alphas[self.index(side, t, x)]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawField")]
pub struct RegulatedField {
    rectangle: Rectangle,
    tolerance: f64,
    bands: Vec<Band>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    rectangle: Rectangle,
    tolerance: f64,
    bands: Vec<Band>,
}

impl TryFrom<RawField> for RegulatedField {
    type Error = RegulatedError;

    fn try_from(r: RawField) -> Result<Self, Self::Error> {
        RegulatedField::new(r.rectangle, r.bands, r.tolerance)
    }
}

impl RegulatedField {
    /// Checks structure only; ordering and coverage are reported by [`validate_field`].
    pub fn new(
        rectangle: Rectangle,
        mut bands: Vec<Band>,
        tolerance: f64,
    ) -> Result<Self, RegulatedError> {
        if !(rectangle.t_max > 0.0 && rectangle.x_max > rectangle.x_min) {
            return Err(RegulatedError::InvalidField(format!(
                "degenerate rectangle {rectangle:?}"
            )));
        }
        if !(tolerance >= 0.0) {
            return Err(RegulatedError::InvalidField(format!(
                "tolerance must be nonnegative, got {tolerance}"
            )));
        }
        for (i, b) in bands.iter().enumerate() {
            if !(b.a <= b.b) {
                return Err(RegulatedError::InvalidField(format!(
                    "band {i} has a > b ({} > {})",
                    b.a, b.b
                )));
            }
            if b.alphas.len() != b.curves.len() + 1 {
                return Err(RegulatedError::InvalidField(format!(
                    "band {i}: {} curves need {} constants, got {}",
                    b.curves.len(),
                    b.curves.len() + 1,
                    b.alphas.len()
                )));
            }
            if b.alphas.iter().any(|a| !a.is_finite()) {
                return Err(RegulatedError::InvalidField(format!(
                    "band {i} has non-finite constants"
                )));
            }
        }
        bands.sort_by(|p, q| p.a.total_cmp(&q.a));
        Ok(Self {
            rectangle,
            tolerance,
            bands,
        })
    }

    pub fn rectangle(&self) -> Rectangle {
        self.rectangle
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn band_at(&self, t: f64) -> Option<&Band> {
        self.bands.iter().find(|b| b.a <= t && t <= b.b)
    }

    /// Measure of `[0, T]` not covered by any band.
    pub fn uncovered_time(&self) -> f64 {
        let mut covered = 0.0;
        let mut reach = 0.0_f64;
        for b in &self.bands {
            let a = b.a.clamp(0.0, self.rectangle.t_max).max(reach);
            let e = b.b.clamp(0.0, self.rectangle.t_max);
            if e > a {
                covered += e - a;
                reach = e;
            }
        }
        (self.rectangle.t_max - covered).max(0.0)
    }

    // band used outside the covered set: nearest endpoint in time
    fn nearest_band(&self, t: f64) -> Option<(&Band, f64)> {
        if let Some(b) = self.band_at(t) {
            return Some((b, t));
        }
        self.bands
            .iter()
            .map(|b| {
                let s = t.clamp(b.a, b.b);
                (b, s, (s - t).abs())
            })
            .min_by(|p, q| p.2.total_cmp(&q.2))
            .map(|(b, s, _)| (b, s))
    }

    pub fn values(&self) -> Vec<f64> {
        self.bands
            .iter()
            .flat_map(|b| b.alphas.iter().copied())
            .collect()
    }
}

/// Value of the step field at `(t, x)`; `None` when `t` lies in no band.
pub fn eval_field(field: &RegulatedField, t: f64, x: f64) -> Result<Option<f64>, RegulatedError> {
    if !(t.is_finite() && x.is_finite()) || !field.rectangle.contains(t, x) {
        return Err(RegulatedError::OutsideRectangle { t, x });
    }
    Ok(field.band_at(t).map(|b| b.value(t, x)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrderingViolation {
    pub band: usize,
    pub curve: usize,
    /// First sampled time at which `γ_{k+1} − γ_k ≤ 0`.
    pub time: f64,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub bands_disjoint: bool,
    pub bands_inside: bool,
    pub uncovered_time: f64,
    pub budget: f64,
    pub coverage_ok: bool,
    pub ordering_violations: Vec<OrderingViolation>,
    /// Smallest sampled gap between consecutive curves, over all bands.
    pub worst_margin: Option<f64>,
    /// Per band, per curve.
    pub lipschitz: Vec<Vec<f64>>,
    pub passed: bool,
}

fn band_times(b: &Band) -> Vec<f64> {
    let mut ts: Vec<f64> = (0..=64)
        .map(|k| b.a + (b.b - b.a) * k as f64 / 64.0)
        .collect();
    for c in &b.curves {
        ts.extend(c.points().map(|p| p.0).filter(|&t| t >= b.a && t <= b.b));
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Checks the band, ordering and coverage conditions; violations are reported, not raised.
pub fn validate_field(field: &RegulatedField) -> ValidationReport {
    let t_max = field.rectangle.t_max;
    let bands = &field.bands;
    let bands_disjoint = bands.windows(2).all(|w| w[0].b <= w[1].a);
    let bands_inside = bands.iter().all(|b| b.a >= 0.0 && b.b <= t_max);
    let uncovered = field.uncovered_time();
    let coverage_ok = uncovered <= field.tolerance + 1e-12 * t_max.max(1.0);

    let mut violations = Vec::new();
    let mut worst: Option<f64> = None;
    for (i, b) in bands.iter().enumerate() {
        let ts = band_times(b);
        for k in 0..b.curves.len().saturating_sub(1) {
            let mut first: Option<(f64, f64)> = None;
            for &t in &ts {
                let m = b.curves[k + 1].position(t) - b.curves[k].position(t);
                worst = Some(worst.map_or(m, |w| w.min(m)));
                if m <= 0.0 && first.is_none() {
                    first = Some((t, m));
                }
            }
            if let Some((time, margin)) = first {
                violations.push(OrderingViolation {
                    band: i,
                    curve: k,
                    time,
                    margin,
                });
            }
        }
    }
    let lipschitz = bands
        .iter()
        .map(|b| b.curves.iter().map(Curve::lipschitz).collect())
        .collect();
    let passed = bands_disjoint && bands_inside && coverage_ok && violations.is_empty();
    ValidationReport {
        bands_disjoint,
        bands_inside,
        uncovered_time: uncovered,
        budget: field.tolerance,
        coverage_ok,
        ordering_violations: violations,
        worst_margin: worst,
        lipschitz,
        passed,
    }
}

/// Lattice sizes for [`sup_distance`]: `nt` times per band and `nx` positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleGrid {
    pub nt: usize,
    pub nx: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupDistanceReport {
    pub per_band: Vec<f64>,
    pub uncovered_time: f64,
}

impl SupDistanceReport {
    pub fn max(&self) -> f64 {
        self.per_band.iter().copied().fold(0.0, f64::max)
    }
}

/// Per-band sup of `|χ_i − reference|` on a sample lattice, skipping one lattice step
/// around each curve.
pub fn sup_distance(
    field: &RegulatedField,
    reference: &(dyn Fn(f64, f64) -> f64 + Sync),
    samples: SampleGrid,
) -> Result<SupDistanceReport, RegulatedError> {
    if samples.nt == 0 || samples.nx < 2 {
        return Err(RegulatedError::EmptySamples);
    }
    let r = field.rectangle;
    let hx = (r.x_max - r.x_min) / (samples.nx - 1) as f64;
    let per_band = field
        .bands
        .iter()
        .map(|b| {
            let mut sup: f64 = 0.0;
            for k in 0..samples.nt {
                let t = if samples.nt == 1 {
                    b.a
                } else {
                    b.a + (b.b - b.a) * k as f64 / (samples.nt - 1) as f64
                };
                let gs: Vec<f64> = b.curves.iter().map(|c| c.position(t)).collect();
                for j in 0..samples.nx {
                    let x = r.x_min + hx * j as f64;
                    if gs.iter().any(|g| (x - g).abs() <= hx) {
                        continue;
                    }
                    sup = sup.max((b.value(t, x) - reference(t, x)).abs());
                }
            }
            sup
        })
        .collect();
    Ok(SupDistanceReport {
        per_band,
        uncovered_time: field.uncovered_time(),
    })
}

impl CoefficientField for RegulatedField {
    fn coefficient(&self, t: f64, x: f64) -> f64 {
        self.coefficient_from(Side::Right, t, x)
    }

    fn coefficient_from(&self, side: Side, t: f64, x: f64) -> f64 {
        match self.nearest_band(t) {
            Some((b, s)) => b.value_from(side, s, x),
            None => 0.0,
        }
    }

    fn coefficient_range(&self) -> (f64, f64) {
        let v = self.values();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    fn sample_values(&self) -> Vec<f64> {
        self.values()
    }
}

/// `F(χ(t, x), ω)`; requires `F(α, 0) = 0` and `F(α, 1) = h₁` at every constant.
pub fn compose(f: &TwoArgFlux, field: &RegulatedField) -> Result<CompositeFlux, RegulatedError> {
    if field.bands.is_empty() {
        return Err(RegulatedError::InvalidField("field has no bands".into()));
    }
    f.endpoint_value(&field.values())
        .map_err(|e| RegulatedError::Assumption(e.to_string()))?;
    Ok(CompositeFlux::new(f.clone(), Arc::new(field.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rect() -> Rectangle {
        Rectangle {
            t_max: 2.0,
            x_min: -1.0,
            x_max: 2.0,
        }
    }

    fn shock_field() -> RegulatedField {
        RegulatedField::new(
            rect(),
            vec![Band {
                a: 0.0,
                b: 2.0,
                curves: vec![Curve::linear(0.0, 2.0, 0.0, 0.5)],
                alphas: vec![1.0, 0.0],
            }],
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn eval_conventions() {
        let f = shock_field();
        assert_eq!(eval_field(&f, 1.0, 0.0).unwrap(), Some(1.0));
        assert_eq!(eval_field(&f, 1.0, 0.5).unwrap(), Some(0.0));
        assert!(matches!(
            eval_field(&f, 3.0, 0.0),
            Err(RegulatedError::OutsideRectangle { .. })
        ));
    }

    #[test]
    fn gap_is_uncovered() {
        let mut bands = shock_field().bands;
        bands[0].b = 0.9;
        bands.push(Band {
            a: 1.0,
            b: 2.0,
            curves: vec![],
            alphas: vec![0.3],
        });
        let f = RegulatedField::new(rect(), bands, 0.2).unwrap();
        assert_eq!(eval_field(&f, 0.95, 0.0).unwrap(), None);
        assert!((f.uncovered_time() - 0.1).abs() < 1e-15);
        // composition outside bands uses the nearest band endpoint
        assert_eq!(f.coefficient(0.96, 0.0), 0.3);
        assert_eq!(f.coefficient(0.94, 0.0), 1.0);
    }

    #[test]
    fn crossing_curves_reported() {
        let f = RegulatedField::new(
            rect(),
            vec![Band {
                a: 0.0,
                b: 2.0,
                curves: vec![
                    Curve::linear(0.0, 2.0, 0.0, 1.0),
                    Curve::linear(0.0, 2.0, 0.5, 0.0),
                ],
                alphas: vec![1.0, 0.5, 0.0],
            }],
            0.1,
        )
        .unwrap();
        let r = validate_field(&f);
        assert!(!r.passed);
        assert_eq!(r.ordering_violations.len(), 1);
        assert!((r.ordering_violations[0].time - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coverage_budget() {
        let f = RegulatedField::new(
            rect(),
            vec![Band {
                a: 0.05,
                b: 2.0,
                curves: vec![],
                alphas: vec![0.0],
            }],
            0.1,
        )
        .unwrap();
        let r = validate_field(&f);
        assert!(r.passed, "{r:?}");
        let s = validate_field(&shock_field());
        assert!(s.passed);
        assert_eq!(s.lipschitz, vec![vec![0.5]]);
    }

    #[test]
    fn sup_distance_of_self_and_offset() {
        let f = shock_field();
        let g = SampleGrid { nt: 20, nx: 50 };
        let same = |t: f64, x: f64| f.band_at(t).unwrap().value(t, x);
        assert_eq!(sup_distance(&f, &same, g).unwrap().max(), 0.0);
        let off = |t: f64, x: f64| same(t, x) + 0.3;
        let r = sup_distance(&f, &off, g).unwrap();
        assert!(r.per_band.iter().all(|d| (d - 0.3).abs() < 1e-15));
        assert!(matches!(
            sup_distance(&f, &same, SampleGrid { nt: 0, nx: 5 }),
            Err(RegulatedError::EmptySamples)
        ));
    }

    #[test]
    fn compose_checks_endpoint_condition() {
        let mut f = shock_field();
        f.bands[0].alphas = vec![2.0, 0.5];
        let c = compose(&TwoArgFlux::alpha_logistic(), &f).unwrap();
        use crate::flux_model::FluxFunction;
        assert_eq!(c.value(1.0, 0.0, 0.5), 0.5);
        assert_eq!(c.value(1.0, 1.0, 1.0), 0.0);
        assert!(matches!(
            compose(&TwoArgFlux::alpha_linear(), &f),
            Err(RegulatedError::Assumption(_))
        ));
    }

    #[test]
    fn serde_roundtrip() {
        let f = shock_field();
        let s = serde_json::to_string(&f).unwrap();
        let back: RegulatedField = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = s.replace("\"alphas\":[1.0,0.0]", "\"alphas\":[1.0]");
        assert!(serde_json::from_str::<RegulatedField>(&bad).is_err());
    }

    proptest! {
        #[test]
        fn piecewise_constant_between_curves(
            slopes in proptest::collection::vec(-0.3f64..0.3, 1..4),
            t in 0.0f64..2.0,
        ) {
            let n = slopes.len();
            let curves: Vec<Curve> = slopes
                .iter()
                .enumerate()
                .map(|(k, &s)| Curve::linear(0.0, 2.0, k as f64 * 0.6 - 0.5, s))
                .collect();
            let alphas: Vec<f64> = (0..=n).map(|k| k as f64).collect();
            let f = RegulatedField::new(
                rect(),
                vec![Band { a: 0.0, b: 2.0, curves: curves.clone(), alphas }],
                0.0,
            )
            .unwrap();
            let gs: Vec<f64> = curves.iter().map(|c| c.position(t)).collect();
            for j in 0..300 {
                let x = -1.0 + 3.0 * j as f64 / 299.0;
                let v = eval_field(&f, t, x).unwrap().unwrap();
                let expect = gs.iter().filter(|&&g| g <= x).count() as f64;
                prop_assert_eq!(v, expect);
            }
        }
    }
}
