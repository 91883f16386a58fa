//! Low-dimensional witnesses: the snowflake line, a line whose dilatations
//! come from a nonlinear chart, and a plane with degenerate tangent distance.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::{Point, Scale};
use crate::structure::{DilatationStructure, Model};

/// `ℝ` with `d(x, y) = |x − y|^α` and `δ_ε^x y = x + ε^{1/α}(y − x)`.
#[derive(Clone, Debug)]
pub struct Snowflake {
    alpha: f64,
}

impl DilatationStructure for Snowflake {
    fn name(&self) -> String {
        format!("snowflake:alpha={}", self.alpha)
    }

    fn dim(&self) -> usize {
        1
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        (x.value() - y.value()).abs().powf(self.alpha)
    }

    fn dilate_raw(&self, eps: Scale, x: &Point, y: &Point) -> Point {
        let k = eps.value().powf(1.0 / self.alpha);
        Point::scalar(x.value() + k * (y.value() - x.value()))
    }
}

pub fn snowflake(alpha: f64) -> Result<Model> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "snowflake exponent must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(Arc::new(Snowflake { alpha }))
}

pub type RealMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `ℝ` with `δ_ε^x u = φ⁻¹(φ(x) + ε(φ(u) − φ(x)))` and the plain Euclidean
/// distance, so that `(1/ε)d(δ_ε^x u, δ_ε^x v)` has a nontrivial limit
/// `|φ(u) − φ(v)| / φ′(x)`.
#[derive(Clone)]
pub struct ChartLine {
    label: String,
    phi: RealMap,
    phi_inv: RealMap,
}

impl fmt::Debug for ChartLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartLine").field("label", &self.label).finish()
    }
}

impl ChartLine {
    pub fn phi(&self, t: f64) -> f64 {
        (self.phi)(t)
    }

    pub fn phi_inv(&self, s: f64) -> f64 {
        (self.phi_inv)(s)
    }
}

impl DilatationStructure for ChartLine {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn dim(&self) -> usize {
        1
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        (x.value() - y.value()).abs()
    }

    fn dilate_raw(&self, eps: Scale, x: &Point, y: &Point) -> Point {
        let px = self.phi(x.value());
        let py = self.phi(y.value());
        Point::scalar(self.phi_inv(px + eps.value() * (py - px)))
    }
}

const ROUND_TRIP_TOL: f64 = 1e-12;

/// Builds a chart line, checking `φ⁻¹ ∘ φ` on a grid over `[-3, 3]`.
pub fn chart_deformed_line(label: impl Into<String>, phi: RealMap, phi_inv: RealMap) -> Result<Arc<ChartLine>> {
    for k in 0..=120 {
        let t = -3.0 + 0.05 * k as f64;
        let err = (phi_inv(phi(t)) - t).abs();
        if err.is_nan() || err > ROUND_TRIP_TOL * t.abs().max(1.0) {
            return Err(Error::RoundTrip {
                error: err,
                at: format!("{t}"),
            });
        }
    }
    Ok(Arc::new(ChartLine {
        label: label.into(),
        phi,
        phi_inv,
    }))
}

/// Solves `t + a·sin t = s` by Newton's method.
pub fn sine_chart_inverse(a: f64, s: f64) -> f64 {
    let mut t = s;
    for _ in 0..60 {
        let step = (t + a * t.sin() - s) / (1.0 + a * t.cos());
        t -= step;
        if step.abs() <= 1e-17 * t.abs().max(1.0) {
            break;
        }
    }
    t
}

/// The chart `φ(t) = t + a·sin t`, strictly increasing for `|a| < 1`.
pub fn chart_sine(a: f64) -> Result<Arc<ChartLine>> {
    if a.is_nan() || a.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "chart-sine needs |a| < 1 for a monotone chart, got {a}"
        )));
    }
    chart_deformed_line(
        format!("chart-sine:a={a}"),
        Arc::new(move |t: f64| t + a * t.sin()),
        Arc::new(move |s: f64| sine_chart_inverse(a, s)),
    )
}

/// `ℝ²` with `δ_ε^x u = x + (ε(u₁ − x₁), ε²(u₂ − x₂))` and the Euclidean
/// distance; the tangent distance only sees the first coordinate.
#[derive(Clone, Debug, Default)]
pub struct DegeneratePlane;

impl DilatationStructure for DegeneratePlane {
    fn name(&self) -> String {
        "degenerate-plane".into()
    }

    fn dim(&self) -> usize {
        2
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        x.coord_dist(y)
    }

    fn dilate_raw(&self, eps: Scale, x: &Point, y: &Point) -> Point {
        let e = eps.value();
        Point(vec![
            x.0[0] + e * (y.0[0] - x.0[0]),
            x.0[1] + e * e * (y.0[1] - x.0[1]),
        ])
    }
}

pub fn degenerate_plane() -> Model {
    Arc::new(DegeneratePlane)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::euclidean;

    #[test]
    fn snowflake_scales_distance_linearly() {
        let ds = snowflake(0.5).unwrap();
        let e = Scale::of(0.5);
        let x = Point::scalar(0.0);
        let du = ds.dilate_raw(e, &x, &Point::scalar(1.0));
        let dv = ds.dilate_raw(e, &x, &Point::scalar(4.0));
        let d = ds.distance(&du, &dv);
        assert!((d - 0.5 * 3f64.sqrt()).abs() < 1e-15);
        assert!((d - 0.866_025_403_784_438_6).abs() < 1e-12);
        assert!(snowflake(0.0).is_err());
        assert!(snowflake(1.5).is_err());
    }

    #[test]
    fn snowflake_one_is_euclidean_line() {
        let s = snowflake(1.0).unwrap();
        let e = euclidean(1).unwrap();
        let (x, y) = (Point::scalar(0.3), Point::scalar(-1.2));
        let eps = Scale::of(0.37);
        assert_eq!(s.dilate_raw(eps, &x, &y), e.dilate_raw(eps, &x, &y));
        assert_eq!(s.distance(&x, &y), e.distance(&x, &y));
    }

    #[test]
    fn sine_inverse_round_trips() {
        for k in 0..50 {
            let t = -5.0 + 0.2 * k as f64;
            let s = t + 0.1 * t.sin();
            assert!((sine_chart_inverse(0.1, s) - t).abs() < 1e-14);
        }
        assert!(chart_sine(1.0).is_err());
    }

    #[test]
    fn inaccurate_inverse_is_rejected() {
        let res = chart_deformed_line(
            "bad",
            Arc::new(|t: f64| t + 0.1 * t.sin()),
            Arc::new(|s: f64| s),
        );
        assert!(matches!(res, Err(Error::RoundTrip { .. })));
    }

    #[test]
    fn identity_chart_is_euclidean() {
        let ds = chart_deformed_line("id", Arc::new(|t| t), Arc::new(|t| t)).unwrap();
        let e = euclidean(1).unwrap();
        let (x, y) = (Point::scalar(0.25), Point::scalar(2.0));
        let eps = Scale::of(0.3);
        assert_eq!(ds.dilate_raw(eps, &x, &y), e.dilate_raw(eps, &x, &y));
    }

    #[test]
    fn degenerate_plane_contracts_second_axis_quadratically() {
        let ds = degenerate_plane();
        let x = Point(vec![0.5, -0.5]);
        let e = Scale::of(0.1);
        let u = Point(vec![0.5, 0.5]);
        let v = Point(vec![0.5, 1.5]);
        let r = ds.distance(&ds.dilate_raw(e, &x, &u), &ds.dilate_raw(e, &x, &v)) / e.value();
        assert!((r - 0.1).abs() < 1e-15);
        assert_eq!(ds.dilate_raw(e, &x, &x), x);
    }
}
