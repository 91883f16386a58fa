use std::sync::Arc;

use crate::error::{Error, Result};
use crate::point::{Point, Scale};
use crate::structure::{DilatationStructure, Model};

/// `ℝⁿ` with `δ_ε^x y = x + ε(−x + y)` and the Euclidean distance.
#[derive(Clone, Debug)]
pub struct Euclidean {
    n: usize,
}

impl DilatationStructure for Euclidean {
    fn name(&self) -> String {
        format!("euclidean:n={}", self.n)
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        x.coord_dist(y)
    }

    fn dilate_raw(&self, eps: Scale, x: &Point, y: &Point) -> Point {
        let e = eps.value();
        Point(x.0.iter().zip(&y.0).map(|(a, b)| a + e * (b - a)).collect())
    }
}

pub fn euclidean(n: usize) -> Result<Model> {
    if n == 0 {
        return Err(Error::InvalidParameter("euclidean dimension must be >= 1".into()));
    }
    Ok(Arc::new(Euclidean { n }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dilates_toward_base() {
        let ds = euclidean(1).unwrap();
        let y = ds.dilate_raw(Scale::of(0.5), &Point::scalar(0.0), &Point::scalar(1.0));
        assert_eq!(y, Point::scalar(0.5));
        let x = Point(vec![0.3, -1.0]);
        assert_eq!(ds.name(), "euclidean:n=1");
        let ds2 = euclidean(2).unwrap();
        assert_eq!(ds2.dilate_raw(Scale::of(0.37), &x, &x), x);
        assert!(euclidean(0).is_err());
    }

    #[test]
    fn exact_cone_scaling() {
        let ds = euclidean(3).unwrap();
        let x = Point(vec![0.25, 0.5, -0.25]);
        let u = Point(vec![1.0, 0.0, 0.5]);
        let v = Point(vec![-0.5, 0.75, 0.0]);
        let e = Scale::of(0.125);
        let lhs = ds.distance(&ds.dilate_raw(e, &x, &u), &ds.dilate_raw(e, &x, &v)) / e.value();
        assert!((lhs - ds.distance(&u, &v)).abs() < 1e-14);
    }
}
