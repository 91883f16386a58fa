//! Sampled verification of the axioms and of the finite-scale identities.
//!
//! Defects between two computed points are measured in coordinate distance;
//! quantities that are themselves distances use the model distance.

use crate::csv::Table;
use crate::limit::ScaleSchedule;
use crate::point::{Point, Scale};
use crate::sampling::TripleSampler;
use crate::structure::{delta_eps, inv_eps, sigma_eps, DilatationStructure};

/// One line of the convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomRow {
    pub eps: f64,
    pub quantity: &'static str,
    pub value: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub instance: String,
    pub seed: u64,
    pub samples: usize,
    /// Samples dropped because a dilatation left its domain.
    pub skipped: usize,
    /// `δ_ε^x x = x`
    pub a1: f64,
    /// `δ_1^x u = u`
    pub a1_unit: f64,
    /// `δ_{ε⁻¹}^x δ_ε^x u = u`
    pub a0_inverse: f64,
    /// `δ_ε^x δ_μ^x u = δ_{εμ}^x u` over the schedule grid
    pub a2: f64,
    /// max `|(1/ε)d(δ_ε^x u, δ_ε^x v) − d(u, v)|`
    pub cone: f64,
    /// Largest change of `(1/ε)d(δ_ε^x u, δ_ε^x v)` between the last two scales.
    pub a3_last_gap: f64,
    /// Largest change of `Δ_ε^x(u, v)` between the last two scales.
    pub a4_last_gap: f64,
    pub rows: Vec<AxiomRow>,
}

impl AxiomReport {
    /// A0-inverse, A1 and A2 all within `tol`.
    pub fn exact_axioms_hold(&self, tol: f64) -> bool {
        self.a1 <= tol && self.a1_unit <= tol && self.a0_inverse <= tol && self.a2 <= tol
    }

    /// A3 and A4 tables Cauchy within `tol` at the end of the schedule.
    pub fn limits_converged(&self, tol: f64) -> bool {
        self.a3_last_gap <= tol && self.a4_last_gap <= tol
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["epsilon", "quantity", "value_or_defect", "samples", "seed"]);
        for r in &self.rows {
            t.push(vec![
                r.eps.to_string(),
                r.quantity.to_string(),
                r.value.to_string(),
                r.samples.to_string(),
                self.seed.to_string(),
            ]);
        }
        t
    }
}

/// Measures A0-inverse, A1, A2 per scale and the Cauchy behaviour of the A3
/// and A4 tables over `schedule`.
///
/// A sample whose evaluation leaves the domain at any scale is skipped
/// entirely, so every row aggregates the same samples.
pub fn verify_axioms(ds: &dyn DilatationStructure, sampler: &TripleSampler, schedule: &ScaleSchedule) -> AxiomReport {
    let scales = schedule.scales();
    let n = scales.len();
    let mut a1 = vec![0.0_f64; n];
    let mut a0 = vec![0.0_f64; n];
    let mut a2 = vec![0.0_f64; n];
    let mut cone = vec![0.0_f64; n];
    let mut a3_gap = vec![0.0_f64; n];
    let mut a4_gap = vec![0.0_f64; n];
    let mut a1_unit = 0.0_f64;
    let mut used = 0;
    let mut skipped = 0;

    for (x, u, v) in sampler.triples() {
        let Some(m) = measure_sample(ds, &scales, &x, &u, &v) else {
            skipped += 1;
            continue;
        };
        used += 1;
        a1_unit = a1_unit.max(m.a1_unit);
        for k in 0..n {
            a1[k] = a1[k].max(m.a1[k]);
            a0[k] = a0[k].max(m.a0[k]);
            a2[k] = a2[k].max(m.a2[k]);
            cone[k] = cone[k].max(m.cone[k]);
            if k > 0 {
                a3_gap[k] = a3_gap[k].max((m.ratio[k] - m.ratio[k - 1]).abs());
                a4_gap[k] = a4_gap[k].max(m.delta[k].coord_dist(&m.delta[k - 1]));
            }
        }
    }

    let mut rows = vec![AxiomRow {
        eps: 1.0,
        quantity: "A1-unit",
        value: a1_unit,
        samples: used,
    }];
    for (k, eps) in scales.iter().enumerate() {
        let e = eps.value();
        let mut push = |quantity, value| {
            rows.push(AxiomRow {
                eps: e,
                quantity,
                value,
                samples: used,
            })
        };
        push("A1", a1[k]);
        push("A0-inverse", a0[k]);
        push("A2", a2[k]);
        push("A3-cone", cone[k]);
        if k > 0 {
            push("A3-gap", a3_gap[k]);
            push("A4-gap", a4_gap[k]);
        }
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    AxiomReport {
        instance: ds.name(),
        seed: sampler.seed,
        samples: used,
        skipped,
        a1: max(&a1),
        a1_unit,
        a0_inverse: max(&a0),
        a2: max(&a2),
        cone: max(&cone),
        a3_last_gap: if n > 1 { a3_gap[n - 1] } else { 0.0 },
        a4_last_gap: if n > 1 { a4_gap[n - 1] } else { 0.0 },
        rows,
    }
}

struct SampleMeasure {
    a1_unit: f64,
    a1: Vec<f64>,
    a0: Vec<f64>,
    a2: Vec<f64>,
    cone: Vec<f64>,
    ratio: Vec<f64>,
    delta: Vec<Point>,
}

fn measure_sample(ds: &dyn DilatationStructure, scales: &[Scale], x: &Point, u: &Point, v: &Point) -> Option<SampleMeasure> {
    let duv = ds.distance(u, v);
    let mut m = SampleMeasure {
        a1_unit: ds.dilate(Scale::of(1.0), x, u).ok()?.coord_dist(u),
        a1: Vec::new(),
        a0: Vec::new(),
        a2: Vec::new(),
        cone: Vec::new(),
        ratio: Vec::new(),
        delta: Vec::new(),
    };
    for &eps in scales {
        m.a1.push(ds.dilate(eps, x, x).ok()?.coord_dist(x));
        let du = ds.dilate(eps, x, u).ok()?;
        let dv = ds.dilate(eps, x, v).ok()?;
        m.a0.push(ds.dilate(eps.inverse(), x, &du).ok()?.coord_dist(u));
        let mut worst = 0.0_f64;
        for &mu in scales {
            let lhs = ds.dilate(eps, x, &ds.dilate(mu, x, u).ok()?).ok()?;
            let rhs = ds.dilate(eps * mu, x, u).ok()?;
            worst = worst.max(lhs.coord_dist(&rhs));
        }
        m.a2.push(worst);
        let r = ds.distance(&du, &dv) / eps.value();
        m.cone.push((r - duv).abs());
        m.ratio.push(r);
        m.delta.push(delta_eps(ds, eps, x, u, v).ok()?);
    }
    Some(m)
}

/// Worst defects of the finite-scale identities of the sum, difference and
/// inverse operations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiniteIdentityReport {
    pub samples: usize,
    pub skipped: usize,
    /// `Σ_ε^x(x, u) = u`
    pub sum_with_base: f64,
    /// `Σ_ε^x(u, Δ_ε^x(u, v)) = v` and `Δ_ε^x(u, Σ_ε^x(u, v)) = v`
    pub sum_difference_inverse: f64,
    /// `inv_ε^{δ_ε^x u} inv_ε^x(u) = u`
    pub shifted_involution: f64,
    /// `Σ_ε^x(u, Σ_ε^{δ_ε^x u}(v, w)) = Σ_ε^x(Σ_ε^x(u, v), w)`
    pub shifted_associativity: f64,
    /// `Δ_ε^x(u, v) = Σ_ε^{δ_ε^x u}(inv_ε^x(u), v)`
    pub difference_as_sum: f64,
    /// `Δ_ε^x(δ_μ^x u, δ_μ^x v) = δ_μ^{δ_{εμ}^x u} Δ_{εμ}^x(u, v)`
    pub rescaled_difference: f64,
}

impl FiniteIdentityReport {
    pub fn rows(&self) -> [(&'static str, f64); 6] {
        [
            ("sum-with-base", self.sum_with_base),
            ("sum-difference-inverse", self.sum_difference_inverse),
            ("shifted-involution", self.shifted_involution),
            ("shifted-associativity", self.shifted_associativity),
            ("difference-as-sum", self.difference_as_sum),
            ("rescaled-difference", self.rescaled_difference),
        ]
    }

    pub fn max_defect(&self) -> f64 {
        self.rows().iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Checks the finite-scale identities on quadruples from `sampler`, for each
/// `ε` in `eps_list` and, for the rescaling identity, each `μ` in `mus`.
pub fn check_finite_identities(
    ds: &dyn DilatationStructure,
    sampler: &TripleSampler,
    eps_list: &[f64],
    mus: &[f64],
) -> FiniteIdentityReport {
    let mut rep = FiniteIdentityReport::default();
    for (x, u, v, w) in sampler.quadruples() {
        match identity_defects(ds, eps_list, mus, &x, &u, &v, &w) {
            Some(d) => {
                rep.samples += 1;
                rep.sum_with_base = rep.sum_with_base.max(d[0]);
                rep.sum_difference_inverse = rep.sum_difference_inverse.max(d[1]);
                rep.shifted_involution = rep.shifted_involution.max(d[2]);
                rep.shifted_associativity = rep.shifted_associativity.max(d[3]);
                rep.difference_as_sum = rep.difference_as_sum.max(d[4]);
                rep.rescaled_difference = rep.rescaled_difference.max(d[5]);
            }
            None => rep.skipped += 1,
        }
    }
    rep
}

#[allow(clippy::too_many_arguments)]
fn identity_defects(
    ds: &dyn DilatationStructure,
    eps_list: &[f64],
    mus: &[f64],
    x: &Point,
    u: &Point,
    v: &Point,
    w: &Point,
) -> Option<[f64; 6]> {
    let mut d = [0.0_f64; 6];
    for &e in eps_list {
        let eps = Scale::of(e);
        d[0] = d[0].max(sigma_eps(ds, eps, x, x, u).ok()?.coord_dist(u));

        let dl = delta_eps(ds, eps, x, u, v).ok()?;
        let sm = sigma_eps(ds, eps, x, u, v).ok()?;
        let back1 = sigma_eps(ds, eps, x, u, &dl).ok()?.coord_dist(v);
        let back2 = delta_eps(ds, eps, x, u, &sm).ok()?.coord_dist(v);
        d[1] = d[1].max(back1).max(back2);

        let shifted = ds.dilate(eps, x, u).ok()?;
        let iu = inv_eps(ds, eps, x, u).ok()?;
        d[2] = d[2].max(inv_eps(ds, eps, &shifted, &iu).ok()?.coord_dist(u));

        let inner = sigma_eps(ds, eps, &shifted, v, w).ok()?;
        let lhs = sigma_eps(ds, eps, x, u, &inner).ok()?;
        let rhs = sigma_eps(ds, eps, x, &sm, w).ok()?;
        d[3] = d[3].max(lhs.coord_dist(&rhs));

        d[4] = d[4].max(dl.coord_dist(&sigma_eps(ds, eps, &shifted, &iu, v).ok()?));

        for &m in mus {
            let mu = Scale::of(m);
            d[5] = d[5].max(rescaled_difference_defect(ds, eps, mu, x, u, v).ok()?);
        }
    }
    Some(d)
}

/// Coordinate gap between `Δ_ε^x(δ_μ^x u, δ_μ^x v)` and
/// `δ_μ^{δ_{εμ}^x u} Δ_{εμ}^x(u, v)`.
pub fn rescaled_difference_defect(
    ds: &dyn DilatationStructure,
    eps: Scale,
    mu: Scale,
    x: &Point,
    u: &Point,
    v: &Point,
) -> Result<f64, crate::error::DomainError> {
    let mu_u = ds.dilate(mu, x, u)?;
    let mu_v = ds.dilate(mu, x, v)?;
    let lhs = delta_eps(ds, eps, x, &mu_u, &mu_v)?;
    let em = eps * mu;
    let base = ds.dilate(em, x, u)?;
    let rhs = ds.dilate(mu, &base, &delta_eps(ds, em, x, u, v)?)?;
    Ok(lhs.coord_dist(&rhs))
}
