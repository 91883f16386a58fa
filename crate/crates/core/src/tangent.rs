//! Tangent operations at a point: the limits `dˣ`, `Δˣ`, `Σˣ`, `invˣ`, and
//! checks that they form a conical group.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::csv::Table;
use crate::error::Result;
use crate::instances::group::{beta_eps, NormedGroup};
use crate::limit::{estimate_limit, estimate_scalar_limit, LimitConfig, LimitEstimate};
use crate::point::{Point, Scale};
use crate::sampling::TripleSampler;
use crate::structure::{delta_eps, inv_eps, sigma_eps, DilatationStructure, Model};

/// `dˣ(u, v) = lim (1/ε) d(δ_ε^x u, δ_ε^x v)`.
pub fn tangent_distance(
    ds: &dyn DilatationStructure,
    x: &Point,
    u: &Point,
    v: &Point,
    config: &LimitConfig,
) -> Result<LimitEstimate> {
    estimate_scalar_limit(
        |eps| {
            let du = ds.dilate(eps, x, u)?;
            let dv = ds.dilate(eps, x, v)?;
            Ok(ds.distance(&du, &dv) / eps.value())
        },
        config,
    )
}

/// `Δˣ(u, v) = lim Δ_ε^x(u, v)`.
pub fn tangent_delta(
    ds: &dyn DilatationStructure,
    x: &Point,
    u: &Point,
    v: &Point,
    config: &LimitConfig,
) -> Result<LimitEstimate> {
    estimate_limit(|eps| Ok(delta_eps(ds, eps, x, u, v)?), config)
}

/// `Σˣ(u, v) = lim Σ_ε^x(u, v)`.
pub fn tangent_sigma(
    ds: &dyn DilatationStructure,
    x: &Point,
    u: &Point,
    v: &Point,
    config: &LimitConfig,
) -> Result<LimitEstimate> {
    estimate_limit(|eps| Ok(sigma_eps(ds, eps, x, u, v)?), config)
}

/// `invˣ(u) = lim inv_ε^x(u)`.
pub fn tangent_inv(ds: &dyn DilatationStructure, x: &Point, u: &Point, config: &LimitConfig) -> Result<LimitEstimate> {
    estimate_limit(|eps| Ok(inv_eps(ds, eps, x, u)?), config)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    Dist,
    Delta,
    Sigma,
    Inv,
}

type MemoKey = (Op, Vec<u64>, Vec<u64>);

/// Limit-backed tangent operations at a fixed basepoint, memoized per
/// argument.
pub struct TangentOps {
    ds: Model,
    x: Point,
    config: LimitConfig,
    memo: Mutex<HashMap<MemoKey, LimitEstimate>>,
}

impl TangentOps {
    pub fn new(ds: Model, x: Point, config: LimitConfig) -> Self {
        TangentOps {
            ds,
            x,
            config,
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn basepoint(&self) -> &Point {
        &self.x
    }

    pub fn ds(&self) -> &Model {
        &self.ds
    }

    pub fn config(&self) -> &LimitConfig {
        &self.config
    }

    fn cached<F>(&self, op: Op, u: &Point, v: Option<&Point>, compute: F) -> Result<LimitEstimate>
    where
        F: FnOnce() -> Result<LimitEstimate>,
    {
        let key = (op, u.bits(), v.map(Point::bits).unwrap_or_default());
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return Ok(hit.clone());
        }
        let est = compute()?;
        self.memo.lock().expect("memo lock").entry(key).or_insert_with(|| est.clone());
        Ok(est)
    }

    pub fn dist(&self, u: &Point, v: &Point) -> Result<LimitEstimate> {
        self.cached(Op::Dist, u, Some(v), || {
            tangent_distance(self.ds.as_ref(), &self.x, u, v, &self.config)
        })
    }

    pub fn delta(&self, u: &Point, v: &Point) -> Result<LimitEstimate> {
        self.cached(Op::Delta, u, Some(v), || {
            tangent_delta(self.ds.as_ref(), &self.x, u, v, &self.config)
        })
    }

    pub fn sigma(&self, u: &Point, v: &Point) -> Result<LimitEstimate> {
        self.cached(Op::Sigma, u, Some(v), || {
            tangent_sigma(self.ds.as_ref(), &self.x, u, v, &self.config)
        })
    }

    pub fn inv(&self, u: &Point) -> Result<LimitEstimate> {
        self.cached(Op::Inv, u, None, || tangent_inv(self.ds.as_ref(), &self.x, u, &self.config))
    }

    /// `δ_μ^x u`, which needs no limit.
    pub fn dilate(&self, mu: Scale, u: &Point) -> Result<Point> {
        Ok(self.ds.dilate(mu, &self.x, u)?)
    }

    /// The infinitesimal translation `L_u^x = Δˣ(u, ·)`.
    pub fn translation<'a>(&'a self, u: &'a Point) -> impl Fn(&Point) -> Result<LimitEstimate> + 'a {
        move |v| self.delta(u, v)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.lock().expect("memo lock").len()
    }
}

/// `L_u^x(v) = lim Δ_ε^x(u, v)` as a map of `v`.
pub fn infinitesimal_translation(
    ds: Model,
    x: Point,
    u: Point,
    config: LimitConfig,
) -> impl Fn(&Point) -> Result<LimitEstimate> {
    move |v| tangent_delta(ds.as_ref(), &x, &u, v, &config)
}

/// One line of a conical-group report.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicalEntry {
    pub property: &'static str,
    pub max_defect: f64,
    /// Every limit the entry depends on converged.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConicalGroupReport {
    pub basepoint: Point,
    pub samples: usize,
    pub seed: u64,
    pub entries: Vec<ConicalEntry>,
    /// Largest `|Σˣ(u, v) − Σˣ(v, u)|`, with its pair. Informational: a
    /// conical group need not be commutative.
    pub commutator: f64,
    pub commutator_witness: Option<(Point, Point)>,
}

impl ConicalGroupReport {
    pub fn entry(&self, property: &str) -> Option<&ConicalEntry> {
        self.entries.iter().find(|e| e.property == property)
    }

    pub fn max_defect(&self) -> f64 {
        self.entries.iter().map(|e| e.max_defect).fold(0.0, f64::max)
    }

    /// `Some(true)` when every entry is within `tol`, `None` when an entry
    /// within tolerance rests on a limit that did not converge.
    pub fn verdict(&self, tol: f64) -> Option<bool> {
        if self.entries.iter().any(|e| e.max_defect > tol) {
            return Some(false);
        }
        if self.entries.iter().any(|e| !e.converged) {
            return None;
        }
        Some(true)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["property", "max_defect", "samples", "converged"]);
        for e in &self.entries {
            t.push(vec![
                e.property.to_string(),
                e.max_defect.to_string(),
                self.samples.to_string(),
                e.converged.to_string(),
            ]);
        }
        t.push(vec![
            "commutator".into(),
            self.commutator.to_string(),
            self.samples.to_string(),
            "true".into(),
        ]);
        t
    }
}

/// Scales at which the dilatation-morphism law is checked.
pub const MORPHISM_SCALES: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Default)]
struct Acc {
    defect: f64,
    converged: bool,
}

impl Acc {
    fn new() -> Self {
        Acc {
            defect: 0.0,
            converged: true,
        }
    }

    fn add(&mut self, defect: f64, ests: &[&LimitEstimate]) {
        self.defect = self.defect.max(defect);
        self.converged &= ests.iter().all(|e| e.converged);
    }

    fn entry(self, property: &'static str) -> ConicalEntry {
        ConicalEntry {
            property,
            max_defect: self.defect,
            converged: self.converged,
        }
    }
}

/// Checks the conical-group axioms of `(Σˣ, invˣ, δ^x)` and the
/// `dˣ`-isometry of left translations `Σˣ(u, ·)` and of infinitesimal
/// translations `Δˣ(u, ·)`.
///
/// Arguments come from `sampler.quadruples()`; the sampled basepoints are
/// ignored in favour of the basepoint of `ops`.
pub fn check_conical_group(ops: &TangentOps, sampler: &TripleSampler) -> Result<ConicalGroupReport> {
    let x = ops.basepoint().clone();
    let mut assoc = Acc::new();
    let mut left_neutral = Acc::new();
    let mut right_neutral = Acc::new();
    let mut inverse = Acc::new();
    let mut morphism = Acc::new();
    let mut isometry = Acc::new();
    let mut translation = Acc::new();
    let mut commutator = 0.0_f64;
    let mut witness = None;
    let quads = sampler.quadruples();

    for (_, u, v, w) in &quads {
        let uv = ops.sigma(u, v)?;
        let vu = ops.sigma(v, u)?;
        let gap = uv.value.coord_dist(&vu.value);
        if gap > commutator {
            commutator = gap;
            witness = Some((u.clone(), v.clone()));
        }

        let vw = ops.sigma(v, w)?;
        let l = ops.sigma(&uv.value, w)?;
        let r = ops.sigma(u, &vw.value)?;
        assoc.add(l.value.coord_dist(&r.value), &[&uv, &vw, &l, &r]);

        let xu = ops.sigma(&x, u)?;
        left_neutral.add(xu.value.coord_dist(u), &[&xu]);
        let ux = ops.sigma(u, &x)?;
        right_neutral.add(ux.value.coord_dist(u), &[&ux]);

        let iu = ops.inv(u)?;
        let a = ops.sigma(u, &iu.value)?;
        let b = ops.sigma(&iu.value, u)?;
        inverse.add(a.value.coord_dist(&x).max(b.value.coord_dist(&x)), &[&iu, &a, &b]);

        for m in MORPHISM_SCALES {
            let mu = Scale::of(m);
            let lhs = ops.dilate(mu, &uv.value)?;
            let rhs = ops.sigma(&ops.dilate(mu, u)?, &ops.dilate(mu, v)?)?;
            morphism.add(lhs.coord_dist(&rhs.value), &[&uv, &rhs]);
        }

        let uw = ops.sigma(u, w)?;
        let d_img = ops.dist(&uv.value, &uw.value)?;
        let d_vw = ops.dist(v, w)?;
        isometry.add((d_img.scalar() - d_vw.scalar()).abs(), &[&uv, &uw, &d_img, &d_vw]);

        let tv = ops.delta(u, v)?;
        let tw = ops.delta(u, w)?;
        let d_t = ops.dist(&tv.value, &tw.value)?;
        translation.add((d_t.scalar() - d_vw.scalar()).abs(), &[&tv, &tw, &d_t, &d_vw]);
    }

    Ok(ConicalGroupReport {
        basepoint: x,
        samples: quads.len(),
        seed: sampler.seed,
        entries: vec![
            assoc.entry("associativity"),
            left_neutral.entry("left-neutral"),
            right_neutral.entry("right-neutral"),
            inverse.entry("inverse"),
            morphism.entry("dilatation-morphism"),
            isometry.entry("left-translation-isometry"),
            translation.entry("infinitesimal-translation-isometry"),
        ],
        commutator,
        commutator_witness: witness,
    })
}

/// `β(a, b) = lim δ_ε⁻¹((δ_ε a)(δ_ε b))`.
pub fn beta_limit(g: &dyn NormedGroup, a: &Point, b: &Point, config: &LimitConfig) -> Result<LimitEstimate> {
    estimate_limit(|eps| Ok(beta_eps(g, eps, a, b)), config)
}

/// The commutator `[L_{(δ_λ x)⁻¹}, δ_λ⁻¹](y) = (δ_λ x)⁻¹ β_λ(x, y)`.
pub fn virtual_translation(g: &dyn NormedGroup, x: &Point, y: &Point, lambda: Scale) -> Point {
    g.mul(&g.inverse(&g.dilate(lambda, x)), &beta_eps(g, lambda, x, y))
}

/// Coordinate distance from the commutator at scale `λ` to its limit
/// `β(x, y)`. Measured in coordinates because the homogeneous gauge turns
/// a first-order coordinate defect into an `O(√λ)` distance.
pub fn virtual_translation_defect(g: &dyn NormedGroup, x: &Point, y: &Point, lambda: Scale) -> Result<f64> {
    let beta = beta_limit(g, x, y, &LimitConfig::fine())?;
    Ok(virtual_translation(g, x, y, lambda).coord_dist(&beta.value))
}

/// A pair `u ≠ v` with vanishing tangent distance.
#[derive(Clone, Debug, PartialEq)]
pub struct DegeneracyWitness {
    pub u: Point,
    pub v: Point,
    pub estimate: LimitEstimate,
}

/// Searches the sampled pairs and the pairs `(x, x + e_i)` along coordinate
/// axes for `u ≠ v` with `dˣ(u, v) ≤ 10 · cauchy_tol`.
pub fn check_degenerate(
    ds: &dyn DilatationStructure,
    x: &Point,
    sampler: &TripleSampler,
    config: &LimitConfig,
) -> Result<Option<DegeneracyWitness>> {
    let threshold = 10.0 * config.cauchy_tol;
    let mut candidates: Vec<(Point, Point)> = (0..x.dim())
        .map(|i| {
            let mut v = x.clone();
            v.0[i] += 1.0;
            (x.clone(), v)
        })
        .collect();
    candidates.extend(sampler.triples().into_iter().map(|(_, u, v)| (u, v)));
    for (u, v) in candidates {
        if u.coord_dist(&v) <= 1e-9 {
            continue;
        }
        let est = match tangent_distance(ds, x, &u, &v, config) {
            Ok(e) => e,
            Err(crate::error::Error::LimitEvaluation { .. }) => continue,
            Err(e) => return Err(e),
        };
        if est.scalar().abs() <= threshold && !est.is_divergent() {
            return Ok(Some(DegeneracyWitness { u, v, estimate: est }));
        }
    }
    Ok(None)
}
