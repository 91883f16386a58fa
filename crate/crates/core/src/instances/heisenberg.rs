//! The Heisenberg group `H(n) = ℝ^{2n} × ℝ`.
//!
//! Points are stored as `[x_1, …, x_{2n}, x̄]`. The group law is
//! `(x, x̄)(y, ȳ) = (x + y, x̄ + ȳ + 2ω(x, y))` with the canonical symplectic
//! form `ω(x, y) = Σ_i x_i y_{n+i} − x_{n+i} y_i`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::instances::group::NormedGroup;
use crate::point::{Point, Scale};

/// Canonical symplectic form on `ℝ^{2n}`; only the first `2n` entries of each
/// slice are read.
pub fn omega(n: usize, x: &[f64], y: &[f64]) -> f64 {
    (0..n).map(|i| x[i] * y[n + i] - x[n + i] * y[i]).sum()
}

fn mul(n: usize, a: &Point, b: &Point) -> Point {
    let h = 2 * n;
    let mut out = Vec::with_capacity(h + 1);
    out.extend(a.0[..h].iter().zip(&b.0[..h]).map(|(p, q)| p + q));
    out.push(a.0[h] + b.0[h] + 2.0 * omega(n, &a.0, &b.0));
    Point(out)
}

fn horizontal_norm(n: usize, a: &Point) -> f64 {
    a.0[..2 * n].iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `H(n)` with the Carnot dilatations `δ_ε(x, x̄) = (εx, ε²x̄)` and the
/// homogeneous gauge `g(x, x̄) = max{‖x‖, √|x̄|}`.
#[derive(Clone, Debug)]
pub struct Heisenberg {
    n: usize,
}

impl Heisenberg {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gauge(&self, a: &Point) -> f64 {
        horizontal_norm(self.n, a).max(a.0[2 * self.n].abs().sqrt())
    }
}

impl NormedGroup for Heisenberg {
    fn name(&self) -> String {
        format!("heisenberg:n={}", self.n)
    }

    fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn identity(&self) -> Point {
        Point::zeros(self.dim())
    }

    fn mul(&self, a: &Point, b: &Point) -> Point {
        mul(self.n, a, b)
    }

    fn inverse(&self, a: &Point) -> Point {
        a.scale(-1.0)
    }

    fn dilate(&self, eps: Scale, a: &Point) -> Point {
        let e = eps.value();
        let h = 2 * self.n;
        let mut out: Vec<f64> = a.0[..h].iter().map(|c| e * c).collect();
        out.push(e * e * a.0[h]);
        Point(out)
    }

    fn norm(&self, a: &Point) -> f64 {
        self.gauge(a)
    }
}

pub fn heisenberg(n: usize) -> Result<Arc<Heisenberg>> {
    if n == 0 {
        return Err(Error::InvalidParameter("heisenberg index n must be >= 1".into()));
    }
    Ok(Arc::new(Heisenberg { n }))
}

/// `H(1)` with isotropic dilatations `δ_ε(x, x̄) = (εx, εx̄)` and the
/// Euclidean coordinate norm, claimed only within radius 0.1 of `e`.
///
/// The dilatations are not automorphisms, so
/// `β_ε(x, y) = (x + y, x̄ + ȳ + 2εω(x, y))` tends to coordinate addition.
#[derive(Clone, Debug, Default)]
pub struct IsoHeisenberg;

pub const ISO_VALIDITY_RADIUS: f64 = 0.1;

impl NormedGroup for IsoHeisenberg {
    fn name(&self) -> String {
        "iso-heisenberg".into()
    }

    fn dim(&self) -> usize {
        3
    }

    fn identity(&self) -> Point {
        Point::zeros(3)
    }

    fn mul(&self, a: &Point, b: &Point) -> Point {
        mul(1, a, b)
    }

    fn inverse(&self, a: &Point) -> Point {
        a.scale(-1.0)
    }

    fn dilate(&self, eps: Scale, a: &Point) -> Point {
        a.scale(eps.value())
    }

    fn norm(&self, a: &Point) -> f64 {
        a.norm()
    }

    fn validity_radius(&self) -> f64 {
        ISO_VALIDITY_RADIUS
    }
}

pub fn iso_heisenberg() -> Arc<IsoHeisenberg> {
    Arc::new(IsoHeisenberg)
}
