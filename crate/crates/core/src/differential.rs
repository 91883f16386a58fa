//! Derivatives between dilatation structures, conical morphism checks,
//! equivalence of structures and differentiability of the group operation.

use crate::csv::Table;
use crate::error::{Error, Result};
use crate::instances::group::{DoubleGroup, NormedGroup};
use crate::limit::{estimate_limit, LimitConfig, LimitEstimate, ScaleSchedule};
use crate::point::{Point, Scale};
use crate::sampling::TripleSampler;
use crate::structure::DilatationStructure;
use crate::tangent::{beta_limit, tangent_sigma, MORPHISM_SCALES};

/// Sampled derivative `Df(x)`: one limit per direction.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeEstimate {
    pub basepoint: Point,
    pub image: Point,
    pub directions: Vec<(Point, LimitEstimate)>,
    /// `None` when a directional limit failed to converge.
    pub morphism_defect: Option<f64>,
    pub converged: bool,
}

impl DerivativeEstimate {
    pub fn value(&self, k: usize) -> &Point {
        &self.directions[k].1.value
    }

    /// Indices of directions whose tables are declared divergent.
    pub fn divergent(&self) -> Vec<usize> {
        self.directions
            .iter()
            .enumerate()
            .filter(|(_, (_, e))| e.is_divergent())
            .map(|(k, _)| k)
            .collect()
    }

    /// Rows `basepoint,direction,epsilon,value`, then one summary row per
    /// direction with epsilon `limit`.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["basepoint", "direction", "epsilon", "value"]);
        let base = self.basepoint.join(";");
        for (u, est) in &self.directions {
            for (eps, v) in &est.table {
                t.push(vec![base.clone(), u.join(";"), eps.to_string(), v.join(";")]);
            }
        }
        for (u, est) in &self.directions {
            let status = if est.is_divergent() {
                "divergent"
            } else if est.converged {
                "converged"
            } else {
                "unconverged"
            };
            t.push(vec![
                base.clone(),
                u.join(";"),
                "limit".into(),
                est.value.join(";"),
                status.into(),
            ]);
        }
        if let Some(m) = self.morphism_defect {
            t.push(vec![base, "morphism-defect".into(), "limit".into(), m.to_string()]);
        }
        t
    }
}

/// The rescaled map `u ↦ δ̄_{1/ε}^{f(x)} f(δ_ε^x u)` at one scale.
pub fn rescaled_map<F>(
    f: &F,
    src: &dyn DilatationStructure,
    dst: &dyn DilatationStructure,
    x: &Point,
    eps: Scale,
    u: &Point,
) -> Result<Point>
where
    F: Fn(&Point) -> Point + ?Sized,
{
    let fx = f(x);
    let moved = f(&src.dilate(eps, x, u)?);
    Ok(dst.dilate(eps.inverse(), &fx, &moved)?)
}

/// `Df(x)(u) = lim δ̄_{1/ε}^{f(x)} f(δ_ε^x u)` for one direction.
pub fn directional_derivative<F>(
    f: &F,
    src: &dyn DilatationStructure,
    dst: &dyn DilatationStructure,
    x: &Point,
    u: &Point,
    config: &LimitConfig,
) -> Result<LimitEstimate>
where
    F: Fn(&Point) -> Point + ?Sized,
{
    estimate_limit(|eps| rescaled_map(f, src, dst, x, eps, u), config)
}

/// Estimates `Df(x)` on `directions`. When every direction converges, the
/// morphism defect is measured on all pairs of directions and the scales
/// [`MORPHISM_SCALES`].
pub fn pansu_derivative<F>(
    f: &F,
    src: &dyn DilatationStructure,
    dst: &dyn DilatationStructure,
    x: &Point,
    directions: &[Point],
    config: &LimitConfig,
) -> Result<DerivativeEstimate>
where
    F: Fn(&Point) -> Point + ?Sized,
{
    let mut dirs = Vec::with_capacity(directions.len());
    for u in directions {
        dirs.push((u.clone(), directional_derivative(f, src, dst, x, u, config)?));
    }
    let converged = dirs.iter().all(|(_, e)| e.converged && !e.is_divergent());
    let fx = f(x);
    let morphism_defect = if converged {
        let q = |u: &Point| directional_derivative(f, src, dst, x, u, config).map(|e| e.value);
        let pairs: Vec<(Point, Point)> = directions
            .iter()
            .enumerate()
            .flat_map(|(i, u)| directions[i + 1..].iter().map(move |v| (u.clone(), v.clone())))
            .collect();
        Some(morphism_defect_on(&q, src, x, dst, &fx, &pairs, directions, &MORPHISM_SCALES, config)?)
    } else {
        None
    };
    Ok(DerivativeEstimate {
        basepoint: x.clone(),
        image: fx,
        directions: dirs,
        morphism_defect,
        converged,
    })
}

#[allow(clippy::too_many_arguments)]
fn morphism_defect_on<Q>(
    q: &Q,
    src: &dyn DilatationStructure,
    x: &Point,
    dst: &dyn DilatationStructure,
    y: &Point,
    pairs: &[(Point, Point)],
    singles: &[Point],
    mus: &[f64],
    config: &LimitConfig,
) -> Result<f64>
where
    Q: Fn(&Point) -> Result<Point>,
{
    let mut worst = 0.0_f64;
    for (u, v) in pairs {
        let lhs = q(&tangent_sigma(src, x, u, v, config)?.value)?;
        let rhs = tangent_sigma(dst, y, &q(u)?, &q(v)?, config)?.value;
        worst = worst.max(lhs.coord_dist(&rhs));
    }
    for &m in mus {
        let mu = Scale::new(m)?;
        for u in singles {
            let lhs = q(&src.dilate(mu, x, u)?)?;
            let rhs = dst.dilate(mu, y, &q(u)?)?;
            worst = worst.max(lhs.coord_dist(&rhs));
        }
    }
    Ok(worst)
}

/// Largest coordinate defect of `Q` as a conical group morphism from the
/// tangent space at `x` to the one at `y`: `Q(Σˣ(u, v))` against
/// `Σ̄ʸ(Q u, Q v)` and `Q(δ_μˣ u)` against `δ̄_μʸ Q(u)`, over sampled `u, v`.
#[allow(clippy::too_many_arguments)]
pub fn morphism_defect<Q>(
    q: &Q,
    src: &dyn DilatationStructure,
    x: &Point,
    dst: &dyn DilatationStructure,
    y: &Point,
    sampler: &TripleSampler,
    mus: &[f64],
    config: &LimitConfig,
) -> Result<f64>
where
    Q: Fn(&Point) -> Result<Point>,
{
    let triples = sampler.triples();
    let pairs: Vec<(Point, Point)> = triples.iter().map(|(_, u, v)| (u.clone(), v.clone())).collect();
    let singles: Vec<Point> = triples.into_iter().map(|(_, u, _)| u).collect();
    morphism_defect_on(q, src, x, dst, y, &pairs, &singles, mus, config)
}

/// Least-squares affine model `u ↦ f(x) + A(u − x)` of a derivative on a
/// vector space.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFit {
    /// Row-major, `dst dim × src dim`.
    pub matrix: Vec<Vec<f64>>,
    pub residual: f64,
}

/// Fits the sampled derivative by an affine map through `f(x)`.
pub fn affine_fit(est: &DerivativeEstimate) -> Result<AffineFit> {
    let n = est.basepoint.dim();
    let m = est.image.dim();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = est
        .directions
        .iter()
        .map(|(u, e)| (u.sub(&est.basepoint).0, e.value.sub(&est.image).0))
        .collect();
    if rows.len() < n {
        return Err(Error::InvalidParameter(format!("{} directions cannot determine a {m}x{n} matrix", rows.len())));
    }
    // normal equations (UᵀU) Aᵀ = UᵀW
    let mut gram = vec![vec![0.0; n]; n];
    let mut rhs = vec![vec![0.0; m]; n];
    for (u, w) in &rows {
        for i in 0..n {
            for j in 0..n {
                gram[i][j] += u[i] * u[j];
            }
            for k in 0..m {
                rhs[i][k] += u[i] * w[k];
            }
        }
    }
    let solution = solve(gram, rhs)?;
    let matrix: Vec<Vec<f64>> = (0..m).map(|k| (0..n).map(|i| solution[i][k]).collect()).collect();
    let residual = rows
        .iter()
        .map(|(u, w)| {
            (0..m)
                .map(|k| (w[k] - (0..n).map(|i| matrix[k][i] * u[i]).sum::<f64>()).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(AffineFit { matrix, residual })
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty");
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::InvalidParameter("directions do not span the source".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                let (pivot_a, pivot_b) = (a[col].clone(), b[col].clone());
                for (t, s) in a[r].iter_mut().zip(&pivot_a) {
                    *t -= f * s;
                }
                for (t, s) in b[r].iter_mut().zip(&pivot_b) {
                    *t -= f * s;
                }
            }
        }
    }
    Ok((0..n)
        .map(|r| b[r].iter().map(|v| v / a[r][r]).collect())
        .collect())
}

/// Central finite-difference Jacobian of `f` at `x`.
pub fn finite_difference_jacobian<F>(f: &F, x: &Point, h: f64) -> Vec<Vec<f64>>
where
    F: Fn(&Point) -> Point + ?Sized,
{
    let n = x.dim();
    let cols: Vec<Point> = (0..n)
        .map(|i| {
            let mut plus = x.clone();
            let mut minus = x.clone();
            plus.0[i] += h;
            minus.0[i] -= h;
            f(&plus).sub(&f(&minus)).scale(0.5 / h)
        })
        .collect();
    let m = cols.first().map_or(0, Point::dim);
    (0..m).map(|k| cols.iter().map(|c| c.0[k]).collect()).collect()
}

/// The limit maps `Qˣ(u) = lim (δ̄_ε^x)⁻¹ δ_ε^x u` and
/// `Pˣ(u) = lim (δ_ε^x)⁻¹ δ̄_ε^x u` between two structures on one space.
pub struct EquivalenceMaps<'a> {
    pub ds: &'a dyn DilatationStructure,
    pub ds_bar: &'a dyn DilatationStructure,
    pub x: Point,
    pub config: LimitConfig,
}

impl<'a> EquivalenceMaps<'a> {
    pub fn q(&self, u: &Point) -> Result<LimitEstimate> {
        estimate_limit(
            |eps| {
                let a = self.ds.dilate(eps, &self.x, u)?;
                Ok(self.ds_bar.dilate(eps.inverse(), &self.x, &a)?)
            },
            &self.config,
        )
    }

    pub fn p(&self, u: &Point) -> Result<LimitEstimate> {
        estimate_limit(
            |eps| {
                let a = self.ds_bar.dilate(eps, &self.x, u)?;
                Ok(self.ds.dilate(eps.inverse(), &self.x, &a)?)
            },
            &self.config,
        )
    }
}

pub fn equivalence_maps<'a>(
    ds: &'a dyn DilatationStructure,
    ds_bar: &'a dyn DilatationStructure,
    x: &Point,
    config: &LimitConfig,
) -> Result<EquivalenceMaps<'a>> {
    if ds.dim() != ds_bar.dim() {
        return Err(Error::Dimension {
            expected: ds.dim(),
            got: ds_bar.dim(),
        });
    }
    Ok(EquivalenceMaps {
        ds,
        ds_bar,
        x: x.clone(),
        config: config.clone(),
    })
}

/// Per-basepoint entries of [`check_equivalence`].
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceEntry {
    pub basepoint: Point,
    pub q_converged: bool,
    pub p_converged: bool,
    pub q_divergent: bool,
    pub p_divergent: bool,
    /// Worst `(1/ε)|δ_ε^x u − δ̄_ε^x Qˣ(u)|` at the last scale, in coordinates.
    pub q_defect: f64,
    /// Worst `(1/ε)|δ̄_ε^x u − δ_ε^x Pˣ(u)|` at the last scale, in coordinates.
    pub p_defect: f64,
    /// Worst `d(Pˣ(Qˣ(u)), u)` in coordinates.
    pub round_trip: f64,
    /// Table of the first divergent direction, if any.
    pub growth: Option<LimitEstimate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceReport {
    /// Sampled `min d̄/d` and `max d̄/d`.
    pub lipschitz_low: f64,
    pub lipschitz_high: f64,
    pub entries: Vec<EquivalenceEntry>,
    /// Sample radius around each basepoint.
    pub radius: f64,
}

impl EquivalenceReport {
    pub fn max_q_defect(&self) -> f64 {
        self.entries.iter().map(|e| e.q_defect).fold(0.0, f64::max)
    }

    pub fn max_p_defect(&self) -> f64 {
        self.entries.iter().map(|e| e.p_defect).fold(0.0, f64::max)
    }

    /// `Some(true)` when both maps converge everywhere with defects within
    /// `tol`, `Some(false)` when a map diverges, `None` otherwise.
    pub fn verdict(&self, tol: f64) -> Option<bool> {
        if self.entries.iter().any(|e| e.q_divergent || e.p_divergent) {
            return Some(false);
        }
        let all_converged = self.entries.iter().all(|e| e.q_converged && e.p_converged);
        if !all_converged || !self.lipschitz_low.is_finite() || self.lipschitz_low <= 0.0 {
            return None;
        }
        Some(self.max_q_defect() <= tol && self.max_p_defect() <= tol)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&[
            "basepoint",
            "q_converged",
            "p_converged",
            "q_divergent",
            "p_divergent",
            "q_defect",
            "p_defect",
            "round_trip",
        ]);
        for e in &self.entries {
            t.push(vec![
                e.basepoint.join(";"),
                e.q_converged.to_string(),
                e.p_converged.to_string(),
                e.q_divergent.to_string(),
                e.p_divergent.to_string(),
                e.q_defect.to_string(),
                e.p_defect.to_string(),
                e.round_trip.to_string(),
            ]);
        }
        t.push(vec![
            "lipschitz".into(),
            self.lipschitz_low.to_string(),
            self.lipschitz_high.to_string(),
        ]);
        t
    }
}

/// Samples the identity map between `ds` and `ds_bar` for bilipschitz
/// ratios, and at each basepoint of `sampler` estimates `Qˣ`, `Pˣ` and the
/// defects of their defining limits at the last scale of `config`.
pub fn check_equivalence(
    ds: &dyn DilatationStructure,
    ds_bar: &dyn DilatationStructure,
    sampler: &TripleSampler,
    config: &LimitConfig,
) -> Result<EquivalenceReport> {
    let last = config.schedule.last();
    let e = last.value();
    let mut low = f64::INFINITY;
    let mut high = 0.0_f64;
    let mut entries = Vec::new();
    for (x, u, v) in sampler.triples() {
        let d = ds.distance(&u, &v);
        if d > 0.0 {
            let ratio = ds_bar.distance(&u, &v) / d;
            low = low.min(ratio);
            high = high.max(ratio);
        }
        let maps = equivalence_maps(ds, ds_bar, &x, config)?;
        let q = maps.q(&u)?;
        let p = maps.p(&u)?;
        let q_div = q.is_divergent();
        let p_div = p.is_divergent();
        let (q_defect, p_defect, round_trip) = if q_div || p_div {
            (f64::INFINITY, f64::INFINITY, f64::INFINITY)
        } else {
            let qd = ds.dilate(last, &x, &u)?.coord_dist(&ds_bar.dilate(last, &x, &q.value)?) / e;
            let pd = ds_bar.dilate(last, &x, &u)?.coord_dist(&ds.dilate(last, &x, &p.value)?) / e;
            let back = maps.p(&q.value)?;
            (qd, pd, back.value.coord_dist(&u))
        };
        let growth = if q_div {
            Some(q.clone())
        } else if p_div {
            Some(p.clone())
        } else {
            None
        };
        entries.push(EquivalenceEntry {
            basepoint: x,
            q_converged: q.converged,
            p_converged: p.converged,
            q_divergent: q_div,
            p_divergent: p_div,
            q_defect,
            p_defect,
            round_trip,
            growth,
        });
    }
    Ok(EquivalenceReport {
        lipschitz_low: low,
        lipschitz_high: high,
        entries,
        radius: sampler.offset_radius,
    })
}

/// Largest coordinate defect of `Σ̄ˣ(u, v) = Qˣ(Σˣ(Pˣu, Pˣv))` over the
/// sampled `u, v` at the fixed basepoint `x`.
pub fn check_tangent_isomorphism(
    ds: &dyn DilatationStructure,
    ds_bar: &dyn DilatationStructure,
    x: &Point,
    sampler: &TripleSampler,
    config: &LimitConfig,
) -> Result<f64> {
    let maps = equivalence_maps(ds, ds_bar, x, config)?;
    let mut worst = 0.0_f64;
    for (_, u, v) in sampler.triples() {
        let (pu, pv) = (maps.p(&u)?, maps.p(&v)?);
        let sigma = tangent_sigma(ds, x, &pu.value, &pv.value, config)?;
        let q = maps.q(&sigma.value)?;
        let sigma_bar = tangent_sigma(ds_bar, x, &u, &v, config)?;
        if [&pu, &pv, &sigma, &q, &sigma_bar].iter().any(|e| e.is_divergent()) {
            return Err(Error::LimitEvaluation {
                eps: config.schedule.last().value(),
                message: "a constituent limit diverged".into(),
            });
        }
        worst = worst.max(q.value.coord_dist(&sigma_bar.value));
    }
    Ok(worst)
}

/// Defect tables for the differentiability of `op(x, y) = xy` on the double
/// group, with candidate derivative `Q^{(x,y)}(u, v) = xy · β((x, y)⁻¹(u, v))`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpDiffReport {
    /// `(ε, max over samples of (1/ε) d(op(δ_ε^{(x,y)}(u, v)), δ_ε^{xy} Q(u, v)))`
    /// in coordinates.
    pub defects: Vec<(f64, f64)>,
    /// Coordinate distance from `Q^{(e,e)}(u, v)` to `β(u, v)`, worst sample.
    pub identity_defect: f64,
    pub samples: usize,
}

impl OpDiffReport {
    pub fn max_defect(&self) -> f64 {
        self.defects.iter().map(|d| d.1).fold(0.0, f64::max)
    }

    /// Ratios of consecutive defects, larger scale over smaller.
    pub fn decay_ratios(&self) -> Vec<f64> {
        self.defects.windows(2).map(|w| w[0].1 / w[1].1).collect()
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["epsilon", "max_defect", "samples"]);
        for (e, d) in &self.defects {
            t.push(vec![e.to_string(), d.to_string(), self.samples.to_string()]);
        }
        t.push(vec![
            "identity".into(),
            self.identity_defect.to_string(),
            self.samples.to_string(),
        ]);
        t
    }
}

/// `Q^{(x,y)}(u, v)` on the double group `dg`.
pub fn op_derivative(dg: &DoubleGroup, x: &Point, y: &Point, u: &Point, v: &Point, config: &LimitConfig) -> Result<Point> {
    let g = dg.base();
    let rel = dg.mul(&dg.inverse(&dg.pair(x, y)), &dg.pair(u, v));
    let (a, b) = dg.unpair(&rel);
    let beta = beta_limit(g.as_ref(), &a, &b, config)?;
    Ok(g.mul(&g.mul(x, y), &beta.value))
}

/// Checks the differentiability of `op` on sampled base pairs `(x, y)` and
/// directions `(u, v)` taken from the quadruples of `sampler`.
pub fn check_op_differentiable(
    dg: &DoubleGroup,
    sampler: &TripleSampler,
    schedule: &ScaleSchedule,
    config: &LimitConfig,
) -> Result<OpDiffReport> {
    let g = dg.base();
    let quads = sampler.quadruples();
    let mut prepared = Vec::with_capacity(quads.len());
    for (x, y, u, v) in &quads {
        let base = dg.pair(x, y);
        let dir = dg.pair(u, v);
        let xy = g.mul(x, y);
        let q = op_derivative(dg, x, y, u, v, config)?;
        prepared.push((base, dir, xy, q));
    }
    let mut defects = Vec::new();
    for eps in schedule.scales() {
        let mut worst = 0.0_f64;
        for (base, dir, xy, q) in &prepared {
            let moved = dg.mul(base, &dg.dilate(eps, &dg.mul(&dg.inverse(base), dir)));
            let lhs = dg.op(&moved);
            let rhs = g.mul(xy, &g.dilate(eps, &g.mul(&g.inverse(xy), q)));
            worst = worst.max(lhs.coord_dist(&rhs) / eps.value());
        }
        defects.push((eps.value(), worst));
    }
    let e = g.identity();
    let mut identity_defect = 0.0_f64;
    for (_, _, u, v) in &quads {
        let q = op_derivative(dg, &e, &e, u, v, config)?;
        let beta = beta_limit(g.as_ref(), u, v, config)?;
        identity_defect = identity_defect.max(q.coord_dist(&beta.value));
    }
    Ok(OpDiffReport {
        defects,
        identity_defect,
        samples: quads.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::heisenberg::omega;
    use crate::instances::lines::sine_chart_inverse;
    use crate::instances::{
        chart_sine, degenerate_plane, double_group, euclidean, group_to_ds, heisenberg, iso_heisenberg,
        transport_ds, PointMap,
    };
    use std::sync::Arc;

    fn p(v: &[f64]) -> Point {
        Point(v.to_vec())
    }

    fn rich() -> LimitConfig {
        LimitConfig::default().with_richardson(true)
    }

    #[test]
    fn square_map_derivative() {
        let e = euclidean(1).unwrap();
        let f = |t: &Point| Point::scalar(t.value() * t.value());
        let x = Point::scalar(1.0);
        let est = pansu_derivative(&f, e.as_ref(), e.as_ref(), &x, &[Point::scalar(1.5), Point::scalar(0.0)], &rich()).unwrap();
        assert!((est.value(0).value() - 2.0).abs() < 1e-10);
        assert!(est.converged);
        assert!(est.morphism_defect.unwrap() <= 1e-9);
        let fit = affine_fit(&est).unwrap();
        let fd = finite_difference_jacobian(&f, &x, 1e-5);
        assert!(fit.residual <= 1e-9);
        assert!((fit.matrix[0][0] - fd[0][0]).abs() < 1e-4);
    }

    #[test]
    fn morphism_defect_examples() {
        let e = euclidean(1).unwrap();
        let x = Point::scalar(0.0);
        let s = TripleSampler::at(x.clone(), 1.0, 20, 3);
        let cfg = rich();
        let id = |u: &Point| Ok(u.clone());
        assert_eq!(morphism_defect(&id, e.as_ref(), &x, e.as_ref(), &x, &s, &MORPHISM_SCALES, &cfg).unwrap(), 0.0);
        let lin = |u: &Point| Ok(u.scale(-2.5));
        assert!(morphism_defect(&lin, e.as_ref(), &x, e.as_ref(), &x, &s, &MORPHISM_SCALES, &cfg).unwrap() <= 1e-12);
        let sq = |u: &Point| Ok(Point::scalar(u.value() * u.value()));
        assert!(morphism_defect(&sq, e.as_ref(), &x, e.as_ref(), &x, &s, &MORPHISM_SCALES, &cfg).unwrap() >= 0.1);
    }

    #[test]
    fn chain_rule_for_linear_maps() {
        let e = euclidean(2).unwrap();
        let f = |u: &Point| p(&[2.0 * u.0[0] + u.0[1], -u.0[1]]);
        let g = |u: &Point| p(&[u.0[0] - 3.0 * u.0[1], 0.5 * u.0[0]]);
        let fg = |u: &Point| f(&g(u));
        let x = p(&[0.3, -0.7]);
        let cfg = LimitConfig::default();
        for u in [p(&[1.0, 0.0]), p(&[0.2, 1.4])] {
            let composed = directional_derivative(&fg, e.as_ref(), e.as_ref(), &x, &u, &cfg).unwrap();
            let inner = directional_derivative(&g, e.as_ref(), e.as_ref(), &x, &u, &cfg).unwrap();
            let outer = directional_derivative(&f, e.as_ref(), e.as_ref(), &g(&x), &inner.value, &cfg).unwrap();
            assert!(composed.value.coord_dist(&outer.value) <= 1e-12);
        }
    }

    #[test]
    fn heisenberg_translations() {
        let h = heisenberg(1).unwrap();
        let ds = group_to_ds(h.clone());
        let g = p(&[1.0, 0.0, 0.0]);
        let e = h.identity();
        let dirs = [p(&[0.0, 1.0, 0.0]), p(&[0.5, -0.25, 0.125])];
        let cfg = LimitConfig::default();
        let left = |a: &Point| h.mul(&g, a);
        let est = pansu_derivative(&left, ds.as_ref(), ds.as_ref(), &e, &dirs, &cfg).unwrap();
        assert!(est.converged);
        assert!(est.morphism_defect.unwrap() <= 1e-9, "{:?}", est.morphism_defect);

        let right = |a: &Point| h.mul(a, &g);
        let est = pansu_derivative(&right, ds.as_ref(), ds.as_ref(), &e, &dirs[..1], &cfg).unwrap();
        assert!(!est.converged);
        assert_eq!(est.divergent(), vec![0]);
        let table = &est.directions[0].1.table;
        let n = table.len();
        let growth = (table[n - 1].1 .0[2] - table[n - 2].1 .0[2]).abs();
        let predicted = 2.0 * omega(1, &dirs[0].0, &g.0).abs() / table[n - 1].0;
        assert!((growth / predicted - 1.0).abs() < 0.1, "{growth} vs {predicted}");
    }

    #[test]
    fn chart_sine_equivalence() {
        let e = euclidean(1).unwrap();
        let c = chart_sine(0.1).unwrap();
        let x = Point::scalar(0.0);
        let cfg = LimitConfig::fine();
        let maps = equivalence_maps(e.as_ref(), c.as_ref(), &x, &cfg).unwrap();
        let q = maps.q(&Point::scalar(1.0)).unwrap();
        let oracle = sine_chart_inverse(0.1, 1.1);
        assert!((q.scalar() - oracle).abs() < 1e-9);
        assert!((oracle - 1.0150).abs() < 1e-3);
        let back = maps.p(&q.value).unwrap();
        assert!((back.scalar() - 1.0).abs() <= 10.0 * (q.error_bound + back.error_bound).max(1e-12));

        let s = TripleSampler::at(x.clone(), 0.5, 10, 1);
        let rep = check_equivalence(e.as_ref(), c.as_ref(), &s, &rich()).unwrap();
        assert_eq!(rep.verdict(1e-3), Some(true), "{rep:?}");
        assert!(rep.lipschitz_low > 0.5 && rep.lipschitz_high <= 1.0 + 1e-12);
        let iso = check_tangent_isomorphism(e.as_ref(), c.as_ref(), &x, &s, &cfg).unwrap();
        assert!(iso <= 1e-3, "{iso}");
    }

    #[test]
    fn identical_structures_are_equivalent() {
        let h = group_to_ds(heisenberg(1).unwrap());
        let s = TripleSampler::new(3, 8, 2);
        let rep = check_equivalence(h.as_ref(), h.as_ref(), &s, &LimitConfig::default()).unwrap();
        assert_eq!(rep.verdict(1e-12), Some(true));
        assert!(rep.max_q_defect() <= 1e-12 && rep.max_p_defect() <= 1e-12);
    }

    #[test]
    fn degenerate_plane_is_not_equivalent() {
        let e = euclidean(2).unwrap();
        let d = degenerate_plane();
        let s = TripleSampler::at(p(&[0.0, 0.0]), 0.5, 5, 4);
        let forward = check_equivalence(e.as_ref(), d.as_ref(), &s, &LimitConfig::default()).unwrap();
        assert_eq!(forward.verdict(1e-3), Some(false));
        assert!(forward.entries.iter().all(|e| e.q_divergent && !e.p_divergent));
        let backward = check_equivalence(d.as_ref(), e.as_ref(), &s, &LimitConfig::default()).unwrap();
        assert!(backward.entries.iter().all(|e| e.p_divergent));
    }

    #[test]
    fn transported_structure_is_differentiable() {
        let src = euclidean(2).unwrap();
        let f: PointMap = Arc::new(|a: &Point| p(&[a.0[0] + 0.2 * a.0[1].sin(), a.0[1]]));
        let f_inv: PointMap = Arc::new(|a: &Point| p(&[a.0[0] - 0.2 * a.0[1].sin(), a.0[1]]));
        let bar = transport_ds("shear", f.clone(), f_inv, src.clone()).unwrap();
        let x = p(&[0.4, 0.3]);
        let dirs = [p(&[1.4, 0.3]), p(&[0.4, 1.3]), p(&[1.0, 1.0])];
        let est = pansu_derivative(f.as_ref(), src.as_ref(), bar.as_ref(), &x, &dirs, &LimitConfig::default()).unwrap();
        assert!(est.converged);
        assert!(est.morphism_defect.unwrap() <= 1e-9);
    }

    #[test]
    fn op_differentiability() {
        let h = double_group(heisenberg(1).unwrap());
        let s = TripleSampler::new(3, 20, 9);
        let sched = ScaleSchedule::default();
        let rep = check_op_differentiable(&h, &s, &sched, &LimitConfig::fine()).unwrap();
        assert!(rep.max_defect() <= 1e-9, "{rep:?}");
        assert!(rep.identity_defect <= 1e-12);

        let iso = double_group(iso_heisenberg());
        let s = TripleSampler::new(3, 20, 9).with_offset(0.03).with_base(crate::sampling::BaseSampling::Box {
            center: Point::zeros(3),
            radius: 0.03,
        });
        let rep = check_op_differentiable(&iso, &s, &ScaleSchedule::new(0.1, 0.5, 6).unwrap(), &LimitConfig::fine()).unwrap();
        for r in rep.decay_ratios() {
            assert!((1.5..=2.5).contains(&r), "{rep:?}");
        }
    }

    #[test]
    fn op_derivative_at_identity_is_beta() {
        let h = heisenberg(1).unwrap();
        let dg = double_group(h.clone());
        let e = h.identity();
        let (u, v) = (p(&[1.0, 0.0, 0.0]), p(&[0.0, 1.0, 0.0]));
        let cfg = LimitConfig::default();
        let q = op_derivative(&dg, &e, &e, &u, &v, &cfg).unwrap();
        assert_eq!(q, beta_limit(h.as_ref(), &u, &v, &cfg).unwrap().value);
        assert!(q.coord_dist(&p(&[1.0, 1.0, 2.0])) <= 1e-15);
    }
}
