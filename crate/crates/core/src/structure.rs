//! The dilatation-structure contract and the finite-scale operations built
//! from it.
//!
//! A structure supplies a distance `d` and dilatations `δ_ε^x y`. Everything
//! else in the crate (difference, sum, inverse, tangent limits) is derived
//! from those two maps.

use std::sync::Arc;

use crate::error::{DomainError, Error, Result};
use crate::point::{Point, Scale};

/// Default radius `A` of the closed ball contained in `U(x)`.
pub const DEFAULT_RADIUS_A: f64 = 2.0;
/// Default radius `B` bounding the images of dilatations of scale > 1.
pub const DEFAULT_RADIUS_B: f64 = 4.0;

/// Where dilatations are defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    Global,
    /// For `ε ≤ 1`, `δ_ε^x` is defined on the closed ball `B̄(x, A)`; for
    /// `ε > 1` on the set `W_ε(x)` of points whose image lands in `B(x, B)`.
    Local { a: f64, b: f64 },
}

pub trait DilatationStructure: Send + Sync {
    fn name(&self) -> String;

    /// Number of coordinates of a point.
    fn dim(&self) -> usize;

    fn distance(&self, x: &Point, y: &Point) -> f64;

    /// `δ_ε^x y` with no domain check.
    fn dilate_raw(&self, eps: Scale, x: &Point, y: &Point) -> Point;

    fn domain(&self) -> Domain {
        Domain::Global
    }

    /// `δ_ε^x y`, failing outside the domain.
    fn dilate(&self, eps: Scale, x: &Point, y: &Point) -> Result<Point, DomainError> {
        match self.domain() {
            Domain::Global => Ok(self.dilate_raw(eps, x, y)),
            Domain::Local { a, b } => {
                if eps.value() <= 1.0 {
                    let r = self.distance(x, y);
                    if r > a {
                        return Err(domain_error(eps, x, y, format!("d(x, y) = {r} exceeds A = {a}")));
                    }
                    Ok(self.dilate_raw(eps, x, y))
                } else {
                    let out = self.dilate_raw(eps, x, y);
                    let r = self.distance(x, &out);
                    if r.is_nan() || r >= b {
                        return Err(domain_error(eps, x, y, format!("image at distance {r} leaves B = {b}")));
                    }
                    Ok(out)
                }
            }
        }
    }
}

/// Shared handle to a structure.
pub type Model = Arc<dyn DilatationStructure>;

fn domain_error(eps: Scale, x: &Point, y: &Point, reason: String) -> DomainError {
    DomainError {
        eps: eps.value(),
        base: x.to_string(),
        arg: y.to_string(),
        reason,
    }
}

/// A structure restricted to local neighbourhoods of radii `A < B`.
pub struct LocalRestriction {
    inner: Model,
    a: f64,
    b: f64,
}

impl DilatationStructure for LocalRestriction {
    fn name(&self) -> String {
        format!("local({};A={};B={})", self.inner.name(), self.a, self.b)
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        self.inner.distance(x, y)
    }

    fn dilate_raw(&self, eps: Scale, x: &Point, y: &Point) -> Point {
        self.inner.dilate_raw(eps, x, y)
    }

    fn domain(&self) -> Domain {
        Domain::Local { a: self.a, b: self.b }
    }
}

/// Restricts `ds` to balls of radius `a` (domain) and `b` (codomain).
pub fn restrict(ds: Model, a: f64, b: f64) -> Result<Model> {
    if !(a > 1.0 && b > a) {
        return Err(Error::InvalidParameter(format!(
            "local radii need 1 < A < B, got A = {a}, B = {b}"
        )));
    }
    Ok(Arc::new(LocalRestriction { inner: ds, a, b }))
}

/// `Δ_ε^x(u, v) = δ_{ε⁻¹}^{δ_ε^x u} δ_ε^x v`.
pub fn delta_eps(
    ds: &dyn DilatationStructure,
    eps: Scale,
    x: &Point,
    u: &Point,
    v: &Point,
) -> Result<Point, DomainError> {
    let base = ds.dilate(eps, x, u)?;
    let arg = ds.dilate(eps, x, v)?;
    ds.dilate(eps.inverse(), &base, &arg)
}

/// `Σ_ε^x(u, v) = δ_{ε⁻¹}^x δ_ε^{δ_ε^x u} v`.
pub fn sigma_eps(
    ds: &dyn DilatationStructure,
    eps: Scale,
    x: &Point,
    u: &Point,
    v: &Point,
) -> Result<Point, DomainError> {
    let shifted = ds.dilate(eps, x, u)?;
    let arg = ds.dilate(eps, &shifted, v)?;
    ds.dilate(eps.inverse(), x, &arg)
}

/// `inv_ε^x(u) = δ_{ε⁻¹}^{δ_ε^x u} x`.
pub fn inv_eps(ds: &dyn DilatationStructure, eps: Scale, x: &Point, u: &Point) -> Result<Point, DomainError> {
    let base = ds.dilate(eps, x, u)?;
    ds.dilate(eps.inverse(), &base, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::euclidean;

    fn p(v: f64) -> Point {
        Point::scalar(v)
    }

    #[test]
    fn euclidean_line_operations() {
        let ds = euclidean(1).unwrap();
        let e = Scale::of(0.5);
        assert_eq!(delta_eps(ds.as_ref(), e, &p(0.0), &p(1.0), &p(2.0)).unwrap(), p(1.5));
        assert_eq!(sigma_eps(ds.as_ref(), e, &p(0.0), &p(1.0), &p(2.0)).unwrap(), p(2.5));
        assert_eq!(inv_eps(ds.as_ref(), e, &p(0.0), &p(1.0)).unwrap(), p(-0.5));
        assert_eq!(inv_eps(ds.as_ref(), e, &p(0.3), &p(0.3)).unwrap(), p(0.3));
    }

    #[test]
    fn local_domain_rejects_far_points() {
        let ds = restrict(euclidean(1).unwrap(), DEFAULT_RADIUS_A, DEFAULT_RADIUS_B).unwrap();
        assert!(ds.dilate(Scale::of(0.5), &p(0.0), &p(1.5)).is_ok());
        let err = ds.dilate(Scale::of(0.5), &p(0.0), &p(3.0)).unwrap_err();
        assert!(err.reason.contains("exceeds A"));
        // scale 10 sends 0.5 to 5, outside B = 4
        assert!(ds.dilate(Scale::of(10.0), &p(0.0), &p(0.5)).is_err());
        assert!(ds.dilate(Scale::of(10.0), &p(0.0), &p(0.3)).is_ok());
        assert!(restrict(euclidean(1).unwrap(), 0.5, 4.0).is_err());
        assert!(restrict(euclidean(1).unwrap(), 3.0, 2.0).is_err());
    }

    #[test]
    fn local_domain_propagates_through_delta() {
        let ds = restrict(euclidean(1).unwrap(), 2.0, 4.0).unwrap();
        let e = Scale::of(0.1);
        // δ_ε^0 1 = 0.1, δ_ε^0 3.5 fails the A-ball check
        assert!(delta_eps(ds.as_ref(), e, &p(0.0), &p(1.0), &p(3.5)).is_err());
        assert!(delta_eps(ds.as_ref(), e, &p(0.0), &p(1.0), &p(1.5)).is_ok());
    }
}
