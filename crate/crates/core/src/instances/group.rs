//! Normed groups with dilatations, the structures they induce, and the
//! double group `G × G`.

use std::sync::Arc;

use crate::error::Result;
use crate::limit::{estimate_scalar_limit, LimitConfig, LimitEstimate};
use crate::point::{Point, Scale};
use crate::sampling::{box_point, rng};
use crate::structure::{DilatationStructure, Model};

/// A group with a one-parameter family of dilatations `δ_ε` fixing the
/// neutral element, and a norm valid near it.
pub trait NormedGroup: Send + Sync {
    fn name(&self) -> String;
    fn dim(&self) -> usize;
    fn identity(&self) -> Point;
    fn mul(&self, a: &Point, b: &Point) -> Point;
    fn inverse(&self, a: &Point) -> Point;
    /// `δ_ε a`, based at the neutral element.
    fn dilate(&self, eps: Scale, a: &Point) -> Point;
    fn norm(&self, a: &Point) -> f64;

    /// Radius (in the norm) of the neighbourhood of `e` where the norm
    /// axioms are claimed.
    fn validity_radius(&self) -> f64 {
        f64::INFINITY
    }
}

pub type Group = Arc<dyn NormedGroup>;

/// `β_ε(a, b) = δ_ε⁻¹((δ_ε a)(δ_ε b))`.
pub fn beta_eps(g: &dyn NormedGroup, eps: Scale, a: &Point, b: &Point) -> Point {
    let prod = g.mul(&g.dilate(eps, a), &g.dilate(eps, b));
    g.dilate(eps.inverse(), &prod)
}

/// The structure `δ_ε^x u = x δ_ε(x⁻¹u)`, `d(x, y) = ‖x⁻¹y‖` on a group.
pub struct GroupStructure {
    group: Group,
}

impl GroupStructure {
    pub fn group(&self) -> &Group {
        &self.group
    }
}

impl DilatationStructure for GroupStructure {
    fn name(&self) -> String {
        self.group.name()
    }

    fn dim(&self) -> usize {
        self.group.dim()
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        self.group.norm(&self.group.mul(&self.group.inverse(x), y))
    }

    fn dilate_raw(&self, eps: Scale, x: &Point, y: &Point) -> Point {
        let g = &self.group;
        g.mul(x, &g.dilate(eps, &g.mul(&g.inverse(x), y)))
    }
}

pub fn group_to_ds(g: Group) -> Model {
    Arc::new(GroupStructure { group: g })
}

/// `G × G` with `(x, u)(y, v) = (xy, y⁻¹uyv)`, component-wise dilatations and
/// the max norm.
pub struct DoubleGroup {
    base: Group,
}

impl DoubleGroup {
    pub fn base(&self) -> &Group {
        &self.base
    }

    pub fn pair(&self, x: &Point, y: &Point) -> Point {
        x.concat(y)
    }

    pub fn unpair(&self, p: &Point) -> (Point, Point) {
        p.split(self.base.dim())
    }

    /// The group operation of the base seen as a map `G × G → G`.
    pub fn op(&self, p: &Point) -> Point {
        let (x, y) = self.unpair(p);
        self.base.mul(&x, &y)
    }
}

impl NormedGroup for DoubleGroup {
    fn name(&self) -> String {
        format!("double:{}", self.base.name())
    }

    fn dim(&self) -> usize {
        2 * self.base.dim()
    }

    fn identity(&self) -> Point {
        let e = self.base.identity();
        e.concat(&e)
    }

    fn mul(&self, a: &Point, b: &Point) -> Point {
        let g = &self.base;
        let (x, u) = self.unpair(a);
        let (y, v) = self.unpair(b);
        let xy = g.mul(&x, &y);
        let conj = g.mul(&g.mul(&g.inverse(&y), &u), &y);
        xy.concat(&g.mul(&conj, &v))
    }

    fn inverse(&self, a: &Point) -> Point {
        let g = &self.base;
        let (x, y) = self.unpair(a);
        let xi = g.inverse(&x);
        let second = g.mul(&g.mul(&x, &g.inverse(&y)), &xi);
        xi.concat(&second)
    }

    fn dilate(&self, eps: Scale, a: &Point) -> Point {
        let (x, y) = self.unpair(a);
        self.base.dilate(eps, &x).concat(&self.base.dilate(eps, &y))
    }

    fn norm(&self, a: &Point) -> f64 {
        let (x, y) = self.unpair(a);
        self.base.norm(&x).max(self.base.norm(&y))
    }

    fn validity_radius(&self) -> f64 {
        self.base.validity_radius()
    }
}

pub fn double_group(g: Group) -> Arc<DoubleGroup> {
    Arc::new(DoubleGroup { base: g })
}

/// Estimates `‖a‖^N = lim (1/ε)‖δ_ε a‖`.
pub fn limit_norm(g: &dyn NormedGroup, a: &Point, config: &LimitConfig) -> Result<LimitEstimate> {
    estimate_scalar_limit(|eps| Ok(g.norm(&g.dilate(eps, a)) / eps.value()), config)
}

/// Sampled checks of the group and norm axioms near `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupDiagnostics {
    pub samples: usize,
    pub associativity: f64,
    pub identity: f64,
    pub inverse: f64,
    /// max |‖a⁻¹‖ − ‖a‖|
    pub norm_symmetry: f64,
    /// Smallest norm seen on a non-identity sample.
    pub min_norm: f64,
    /// max of ‖ab‖ − ‖a‖ − ‖b‖ (positive means subadditivity fails).
    pub subadditivity_excess: f64,
    /// Coordinate gap of `δ_ε⁻¹((δ_ε a)⁻¹)` from `a⁻¹` at the smallest scale.
    pub h2_defect: f64,
}

/// Samples `count` elements in the coordinate box of half-width `radius`
/// around `e` and measures each axiom's worst defect.
pub fn diagnose_group(g: &dyn NormedGroup, radius: f64, count: usize, seed: u64) -> GroupDiagnostics {
    let mut r = rng(seed);
    let e = g.identity();
    let mut d = GroupDiagnostics {
        samples: count,
        associativity: 0.0,
        identity: 0.0,
        inverse: 0.0,
        norm_symmetry: 0.0,
        min_norm: f64::INFINITY,
        subadditivity_excess: f64::NEG_INFINITY,
        h2_defect: 0.0,
    };
    let h2_scale = Scale::of(1e-3);
    for _ in 0..count {
        let a = box_point(&mut r, &e, radius);
        let b = box_point(&mut r, &e, radius);
        let c = box_point(&mut r, &e, radius);
        let lhs = g.mul(&g.mul(&a, &b), &c);
        let rhs = g.mul(&a, &g.mul(&b, &c));
        d.associativity = d.associativity.max(lhs.coord_dist(&rhs));
        d.identity = d
            .identity
            .max(g.mul(&a, &e).coord_dist(&a))
            .max(g.mul(&e, &a).coord_dist(&a));
        let ai = g.inverse(&a);
        d.inverse = d
            .inverse
            .max(g.mul(&a, &ai).coord_dist(&e))
            .max(g.mul(&ai, &a).coord_dist(&e));
        d.norm_symmetry = d.norm_symmetry.max((g.norm(&ai) - g.norm(&a)).abs());
        if a != e {
            d.min_norm = d.min_norm.min(g.norm(&a));
        }
        d.subadditivity_excess = d
            .subadditivity_excess
            .max(g.norm(&g.mul(&a, &b)) - g.norm(&a) - g.norm(&b));
        let h2 = g.dilate(h2_scale.inverse(), &g.inverse(&g.dilate(h2_scale, &a)));
        d.h2_defect = d.h2_defect.max(h2.coord_dist(&ai));
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::heisenberg::heisenberg;

    fn h1() -> Group {
        heisenberg(1).unwrap()
    }

    #[test]
    fn double_group_inverse_and_identity() {
        let g2 = double_group(h1());
        let p = g2.pair(&Point(vec![1.0, 0.5, -0.25]), &Point(vec![0.0, 1.0, 2.0]));
        let prod = g2.mul(&p, &g2.inverse(&p));
        assert!(prod.coord_dist(&g2.identity()) == 0.0, "{prod}");
        let first = g2.pair(&Point(vec![1.0, 0.0, 0.0]), &Point::zeros(3));
        assert_eq!(g2.norm(&first), h1().norm(&Point(vec![1.0, 0.0, 0.0])));
    }

    #[test]
    fn op_is_a_morphism() {
        let g2 = double_group(h1());
        let mut r = rng(3);
        for _ in 0..200 {
            let a = box_point(&mut r, &g2.identity(), 1.0);
            let b = box_point(&mut r, &g2.identity(), 1.0);
            let lhs = g2.op(&g2.mul(&a, &b));
            let rhs = g2.base().mul(&g2.op(&a), &g2.op(&b));
            assert!(lhs.coord_dist(&rhs) < 1e-13);
        }
    }

    #[test]
    fn structure_fixes_base_and_uses_group_dilation_at_e() {
        let g = h1();
        let ds = group_to_ds(g.clone());
        let u = Point(vec![0.3, -0.2, 0.7]);
        let e = Scale::of(0.4);
        assert_eq!(ds.dilate_raw(e, &g.identity(), &u), g.dilate(e, &u));
        let x = Point(vec![1.0, 2.0, 3.0]);
        assert!(ds.dilate_raw(e, &x, &x).coord_dist(&x) < 1e-15);
    }

    #[test]
    fn norm_limit_of_identity_is_zero() {
        let g = h1();
        let est = limit_norm(g.as_ref(), &g.identity(), &LimitConfig::default()).unwrap();
        assert_eq!(est.scalar(), 0.0);
    }
}
