//! Concrete model spaces.

pub mod euclidean;
pub mod group;
pub mod heisenberg;
pub mod lines;
pub mod registry;
pub mod transport;

pub use euclidean::{euclidean, Euclidean};
pub use group::{
    beta_eps, diagnose_group, double_group, group_to_ds, limit_norm, DoubleGroup, Group, GroupDiagnostics,
    GroupStructure, NormedGroup,
};
pub use heisenberg::{heisenberg, iso_heisenberg, Heisenberg, IsoHeisenberg};
pub use lines::{chart_deformed_line, chart_sine, degenerate_plane, snowflake, ChartLine, DegeneratePlane, Snowflake};
pub use registry::{build_instance, Instance, REGISTRY};
pub use transport::{transport_ds, PointMap, Transported};

use crate::point::Point;
use crate::sampling::{box_point, rng};
use crate::structure::DilatationStructure;

/// Worst sampled violation of the triangle inequality.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangleReport {
    pub samples: usize,
    /// max of `d(a, c) / (d(a, b) + d(b, c))`; above 1 means a violation.
    pub worst_ratio: f64,
    pub violations: usize,
    pub witness: Option<(Point, Point, Point)>,
}

/// Samples triples in the coordinate box of half-width `radius` around
/// `center` and records violations beyond `tol`.
pub fn triangle_diagnostic(
    ds: &dyn DilatationStructure,
    center: &Point,
    radius: f64,
    count: usize,
    tol: f64,
    seed: u64,
) -> TriangleReport {
    let mut r = rng(seed);
    let mut report = TriangleReport {
        samples: count,
        worst_ratio: 0.0,
        violations: 0,
        witness: None,
    };
    for _ in 0..count {
        let a = box_point(&mut r, center, radius);
        let b = box_point(&mut r, center, radius);
        let c = box_point(&mut r, center, radius);
        let direct = ds.distance(&a, &c);
        let via = ds.distance(&a, &b) + ds.distance(&b, &c);
        if direct > via + tol {
            report.violations += 1;
        }
        if via > 0.0 {
            let ratio = direct / via;
            if ratio > report.worst_ratio {
                report.worst_ratio = ratio;
                if direct > via + tol {
                    report.witness = Some((a, b, c));
                }
            }
        }
    }
    report
}
