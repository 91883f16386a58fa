use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::{Point, Scale};
use crate::sampling::{box_point, rng};
use crate::structure::{DilatationStructure, Domain, Model};

pub type PointMap = Arc<dyn Fn(&Point) -> Point + Send + Sync>;

/// The push-forward of a structure along a bijection `f`:
/// `(f*δ)_ε^{f(x)} f(u) = f(δ_ε^x u)` and `d̄(a, b) = d(f⁻¹a, f⁻¹b)`.
pub struct Transported {
    label: String,
    f: PointMap,
    f_inv: PointMap,
    source: Model,
}

impl fmt::Debug for Transported {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transported").field("label", &self.label).finish()
    }
}

impl Transported {
    pub fn source(&self) -> &Model {
        &self.source
    }

    pub fn forward(&self, p: &Point) -> Point {
        (self.f)(p)
    }

    pub fn backward(&self, p: &Point) -> Point {
        (self.f_inv)(p)
    }
}

impl DilatationStructure for Transported {
    fn name(&self) -> String {
        self.label.clone()
    }

    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn distance(&self, a: &Point, b: &Point) -> f64 {
        self.source.distance(&(self.f_inv)(a), &(self.f_inv)(b))
    }

    fn dilate_raw(&self, eps: Scale, a: &Point, b: &Point) -> Point {
        (self.f)(&self.source.dilate_raw(eps, &(self.f_inv)(a), &(self.f_inv)(b)))
    }

    fn domain(&self) -> Domain {
        self.source.domain()
    }
}

const ROUND_TRIP_TOL: f64 = 1e-12;
const PROBES: usize = 64;

/// Transports `ds` along `f`; both round trips are probed on the coordinate
/// box of half-width 2 around the origin.
pub fn transport_ds(label: impl Into<String>, f: PointMap, f_inv: PointMap, ds: Model) -> Result<Arc<Transported>> {
    let mut r = rng(0x7a5b);
    let origin = Point::zeros(ds.dim());
    for _ in 0..PROBES {
        let p = box_point(&mut r, &origin, 2.0);
        for (what, back) in [("f⁻¹∘f", f_inv(&f(&p))), ("f∘f⁻¹", f(&f_inv(&p)))] {
            let err = back.coord_dist(&p);
            if err.is_nan() || err > ROUND_TRIP_TOL * p.norm().max(1.0) {
                return Err(Error::RoundTrip {
                    error: err,
                    at: format!("{what} at {p}"),
                });
            }
        }
    }
    Ok(Arc::new(Transported {
        label: label.into(),
        f,
        f_inv,
        source: ds,
    }))
}
