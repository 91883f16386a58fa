//! Finite pointed metric spaces, Gromov–Hausdorff estimates between them,
//! metric profiles and tangent-convergence tables.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::csv::Table;
use crate::error::{Error, Result};
use crate::limit::{LimitConfig, LimitEstimate};
use crate::point::{Point, Scale};
use crate::sampling::{box_point, rng, TripleSampler};
use crate::structure::DilatationStructure;
use crate::tangent::tangent_distance;

/// A finite pointed metric space.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMetricSample {
    /// Coordinates of the points, when they come from a model; may be empty.
    pub points: Vec<Point>,
    pub dist: Vec<Vec<f64>>,
    pub basepoint: usize,
}

const SYMMETRY_TOL: f64 = 1e-12;

impl FiniteMetricSample {
    pub fn new(dist: Vec<Vec<f64>>, basepoint: usize) -> Result<Self> {
        let n = dist.len();
        if n == 0 {
            return Err(Error::InvalidParameter("a sample needs at least one point".into()));
        }
        if basepoint >= n {
            return Err(Error::InvalidParameter(format!("basepoint {basepoint} out of range for {n} points")));
        }
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: row.len(),
                });
            }
            if row[i] != 0.0 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at {i}")));
            }
            for (j, &d) in row.iter().enumerate() {
                if d.is_nan() || d < 0.0 || (d - dist[j][i]).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidParameter(format!("entry ({i}, {j}) is negative or asymmetric")));
                }
            }
        }
        Ok(FiniteMetricSample {
            points: Vec::new(),
            dist,
            basepoint,
        })
    }

    /// Points with distances computed by `d`.
    pub fn from_points<F>(points: Vec<Point>, basepoint: usize, d: F) -> Result<Self>
    where
        F: Fn(&Point, &Point) -> f64,
    {
        let n = points.len();
        let mut dist = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = d(&points[i], &points[j]);
                dist[i][j] = v;
                dist[j][i] = v;
            }
        }
        let mut s = Self::new(dist, basepoint)?;
        s.points = points;
        Ok(s)
    }

    /// Reals with `|a − b|`.
    pub fn on_line(values: &[f64], basepoint: usize) -> Result<Self> {
        let pts = values.iter().map(|&v| Point::scalar(v)).collect();
        Self::from_points(pts, basepoint, |a, b| (a.value() - b.value()).abs())
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().flatten().copied().fold(0.0, f64::max)
    }

    /// Largest nearest-neighbour distance; 0 for a single point.
    pub fn mesh(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i)
                    .map(|j| self.dist[i][j])
                    .fold(f64::INFINITY, f64::min)
            })
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max)
    }

    /// The same points with all distances multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Self {
        FiniteMetricSample {
            points: self.points.clone(),
            dist: self
                .dist
                .iter()
                .map(|r| r.iter().map(|d| d * factor).collect())
                .collect(),
            basepoint: self.basepoint,
        }
    }

    /// Header `n,basepoint`, then the distance matrix.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["n", "basepoint"]);
        t.push(vec![self.len().to_string(), self.basepoint.to_string()]);
        for row in &self.dist {
            t.push(row.iter().map(|d| d.to_string()).collect());
        }
        t
    }
}

/// A relation between two samples, as index pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct Correspondence {
    pub pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        Correspondence { pairs }
    }

    /// `{(i, i)}` over `n` points.
    pub fn identity(n: usize) -> Self {
        Correspondence::new((0..n).map(|i| (i, i)).collect())
    }
}

fn density_defect(s: &FiniteMetricSample, covered: &[bool]) -> f64 {
    (0..s.len())
        .map(|i| {
            (0..s.len())
                .filter(|&j| covered[j])
                .map(|j| s.dist[i][j])
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn mu_of(s1: &FiniteMetricSample, s2: &FiniteMetricSample, pairs: &[(usize, usize)]) -> f64 {
    let mut dom = vec![false; s1.len()];
    let mut im = vec![false; s2.len()];
    let mut distortion = 0.0_f64;
    for (k, &(a, b)) in pairs.iter().enumerate() {
        dom[a] = true;
        im[b] = true;
        for &(c, d) in &pairs[..k] {
            distortion = distortion.max((s2.dist[b][d] - s1.dist[a][c]).abs());
        }
    }
    distortion.max(density_defect(s1, &dom)).max(density_defect(s2, &im))
}

/// Least `μ` admissible for `rho`: the largest of the density defects of its
/// domain and image and of its distortion.
pub fn admissible_mu(s1: &FiniteMetricSample, s2: &FiniteMetricSample, rho: &Correspondence) -> Result<f64> {
    if !rho.pairs.contains(&(s1.basepoint, s2.basepoint)) {
        return Err(Error::MissingBasepointPair);
    }
    for &(a, b) in &rho.pairs {
        if a >= s1.len() || b >= s2.len() {
            return Err(Error::InvalidParameter(format!("pair ({a}, {b}) out of range")));
        }
    }
    Ok(mu_of(s1, s2, &rho.pairs))
}

/// Total point count up to which [`gh_exact_small`] runs.
pub const EXACT_SIZE_LIMIT: usize = 10;

/// Exact minimum of [`admissible_mu`] over all relations containing the
/// basepoint pair.
///
/// For a threshold `t`, pairs of `s1 × s2` whose mutual distortion is at
/// most `t` form a compatibility graph; a relation of distortion `≤ t` is a
/// clique of it, and density only improves on larger cliques. So `t` is
/// attainable iff some maximal clique through the basepoint pair has
/// density defects `≤ t`. The optimum is one of finitely many candidate
/// values, found by bisection over them.
pub fn gh_exact_small(s1: &FiniteMetricSample, s2: &FiniteMetricSample) -> Result<f64> {
    let total = s1.len() + s2.len();
    if total > EXACT_SIZE_LIMIT {
        return Err(Error::SizeBound {
            limit: EXACT_SIZE_LIMIT,
            got: total,
        });
    }
    let pairs: Vec<(usize, usize)> = (0..s1.len())
        .flat_map(|a| (0..s2.len()).map(move |b| (a, b)))
        .collect();
    let np = pairs.len();
    let mut distortion = vec![vec![0.0; np]; np];
    let mut candidates: Vec<f64> = vec![0.0];
    for p in 0..np {
        for q in 0..np {
            let (a, b) = pairs[p];
            let (c, d) = pairs[q];
            distortion[p][q] = (s2.dist[b][d] - s1.dist[a][c]).abs();
            candidates.push(distortion[p][q]);
        }
    }
    candidates.extend(s1.dist.iter().flatten());
    candidates.extend(s2.dist.iter().flatten());
    candidates.sort_by(|a, b| a.total_cmp(b));
    candidates.dedup();

    let root = pairs
        .iter()
        .position(|&p| p == (s1.basepoint, s2.basepoint))
        .expect("basepoint pair is in the product");
    let feasible = |t: f64| -> bool {
        let adj: Vec<Vec<bool>> = (0..np)
            .map(|p| (0..np).map(|q| p != q && distortion[p][q] <= t).collect())
            .collect();
        let mut found = false;
        let start: BTreeSet<usize> = (0..np).filter(|&q| adj[root][q]).collect();
        bron_kerbosch(&adj, &mut vec![root], start, BTreeSet::new(), &mut |clique| {
            let sel: Vec<(usize, usize)> = clique.iter().map(|&k| pairs[k]).collect();
            if mu_of(s1, s2, &sel) <= t {
                found = true;
            }
            found
        });
        found
    };
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Enumerates maximal cliques extending `r`; `visit` returns `true` to stop.
fn bron_kerbosch<F>(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    mut p: BTreeSet<usize>,
    mut x: BTreeSet<usize>,
    visit: &mut F,
) -> bool
where
    F: FnMut(&[usize]) -> bool,
{
    if p.is_empty() && x.is_empty() {
        return visit(r);
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p or x non-empty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        r.push(v);
        let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
        if bron_kerbosch(adj, r, np, nx, visit) {
            return true;
        }
        r.pop();
        p.remove(&v);
        x.insert(v);
    }
    false
}

fn sorted_row(s: &FiniteMetricSample, i: usize) -> Vec<f64> {
    let mut r = s.dist[i].clone();
    r.sort_by(|a, b| a.total_cmp(b));
    r
}

/// Mismatch between the distance profiles of `i ∈ s1` and `j ∈ s2`.
fn profile_cost(s1: &FiniteMetricSample, i: usize, s2: &FiniteMetricSample, j: usize) -> f64 {
    let (a, b) = (sorted_row(s1, i), sorted_row(s2, j));
    let base = (s1.dist[s1.basepoint][i] - s2.dist[s2.basepoint][j]).abs();
    let n = a.len().min(b.len());
    let spread = (0..n)
        .map(|k| {
            let ka = k * (a.len() - 1) / n.max(1);
            let kb = k * (b.len() - 1) / n.max(1);
            (a[ka] - b[kb]).abs()
        })
        .fold(0.0, f64::max);
    base + spread
}

/// Number of local-search starts in [`gh_upper_bound`] besides the greedy one.
pub const HEURISTIC_RESTARTS: usize = 8;

/// Upper bound on the exact value by a heuristic relation.
///
/// A relation is encoded as an optional partner for every point of either
/// sample. The first start matches distance profiles greedily, the others
/// are seeded random; each is improved by single-slot reassignment until no
/// move lowers the admissible `μ`.
pub fn gh_upper_bound(s1: &FiniteMetricSample, s2: &FiniteMetricSample, seed: u64) -> f64 {
    let (n1, n2) = (s1.len(), s2.len());
    let greedy: Vec<Option<usize>> = (0..n1)
        .map(|i| {
            (0..n2).min_by(|&a, &b| profile_cost(s1, i, s2, a).total_cmp(&profile_cost(s1, i, s2, b)))
        })
        .chain((0..n2).map(|j| {
            (0..n1).min_by(|&a, &b| profile_cost(s1, a, s2, j).total_cmp(&profile_cost(s1, b, s2, j)))
        }))
        .collect();
    let relation = |slots: &[Option<usize>]| -> Vec<(usize, usize)> {
        let mut set = BTreeSet::from([(s1.basepoint, s2.basepoint)]);
        for (k, s) in slots.iter().enumerate() {
            if let Some(t) = *s {
                set.insert(if k < n1 { (k, t) } else { (t, k - n1) });
            }
        }
        set.into_iter().collect()
    };
    let mut r = rng(seed);
    let mut best = f64::INFINITY;
    for start in 0..=HEURISTIC_RESTARTS {
        let mut slots = if start == 0 {
            greedy.clone()
        } else {
            (0..n1 + n2)
                .map(|k| Some(r.gen_range(0..if k < n1 { n2 } else { n1 })))
                .collect()
        };
        let mut current = mu_of(s1, s2, &relation(&slots));
        let mut order: Vec<usize> = (0..n1 + n2).collect();
        loop {
            order.shuffle(&mut r);
            let mut improved = false;
            for &k in &order {
                let len = if k < n1 { n2 } else { n1 };
                let old = slots[k];
                for t in std::iter::once(None).chain((0..len).map(Some)) {
                    if t == old {
                        continue;
                    }
                    slots[k] = t;
                    let mu = mu_of(s1, s2, &relation(&slots));
                    if mu < current {
                        current = mu;
                        improved = true;
                        break;
                    }
                    slots[k] = old;
                }
            }
            if !improved {
                break;
            }
        }
        best = best.min(current);
    }
    best
}

/// Half-width of the coordinate box of pre-images used around `x`.
pub fn preimage_radius(x: &Point) -> f64 {
    2.0 + 2.0 * x.0.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
}

/// The metric profile `[B̄(x, ε), (1/ε)d, x]` at finite resolution.
///
/// Pre-images on a regular grid around `x` are mapped by `δ_ε^x` and kept
/// when they land in `B̄(x, ε)`. The grid is refined until at least
/// `resolution − 1` points survive; a seeded subset of exactly that many is
/// kept. Index 0 is the basepoint. The same grid and subset are used for
/// every `ε`, so exact cones give identical tables.
pub fn sample_profile(
    ds: &dyn DilatationStructure,
    x: &Point,
    eps: Scale,
    resolution: usize,
    seed: u64,
) -> Result<FiniteMetricSample> {
    if resolution == 0 {
        return Err(Error::InvalidParameter("resolution must be >= 1".into()));
    }
    let dim = ds.dim();
    let radius = preimage_radius(x);
    let mut kept: Vec<Point> = Vec::new();
    if resolution > 1 {
        let mut per_axis = 3;
        loop {
            kept = grid_images(ds, x, eps, radius, per_axis)?;
            if kept.len() >= resolution - 1 {
                break;
            }
            let total = (per_axis as f64).powi(dim as i32);
            if total > 2.0e6 {
                return Err(Error::Sampling(format!(
                    "only {} points of the ball found at scale {}",
                    kept.len(),
                    eps
                )));
            }
            per_axis = per_axis * 3 / 2 + 1;
        }
        kept.shuffle(&mut rng(seed));
        kept.truncate(resolution - 1);
    }
    let mut points = vec![x.clone()];
    points.extend(kept);
    let e = eps.value();
    FiniteMetricSample::from_points(points, 0, |a, b| ds.distance(a, b) / e)
}

fn grid_images(ds: &dyn DilatationStructure, x: &Point, eps: Scale, radius: f64, per_axis: usize) -> Result<Vec<Point>> {
    let dim = ds.dim();
    let step = 2.0 * radius / (per_axis - 1) as f64;
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let q = Point(
            (0..dim)
                .map(|k| x.0[k] - radius + step * idx[k] as f64)
                .collect(),
        );
        if q.coord_dist(x) > 1e-12 {
            let image = ds.dilate(eps, x, &q)?;
            if ds.distance(x, &image) <= eps.value() {
                out.push(image);
            }
        }
        let mut k = 0;
        loop {
            if k == dim {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Pre-images drawn uniformly from the ball `B̄(x, 1)` by rejection from the
/// enclosing box.
fn unit_ball_preimages(ds: &dyn DilatationStructure, x: &Point, count: usize, seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    let radius = preimage_radius(x);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 1000 * count.max(1) {
        tries += 1;
        let q = box_point(&mut r, x, radius);
        if ds.distance(x, &q) <= 1.0 {
            out.push(q);
        }
    }
    out
}

/// For each `ε`, the sup over sampled `u, v ∈ B̄(x, ε)` of
/// `(1/ε)|d(u, v) − dˣ(u, v)|`.
///
/// The points are `δ_ε^x` images of one fixed set of pre-images, so rows
/// for different `ε` compare like with like.
pub fn tangent_convergence_table(
    ds: &dyn DilatationStructure,
    x: &Point,
    eps_list: &[f64],
    count: usize,
    seed: u64,
    config: &LimitConfig,
) -> Result<Vec<(f64, f64)>> {
    let pre = unit_ball_preimages(ds, x, count, seed);
    let mut out = Vec::with_capacity(eps_list.len());
    for &e in eps_list {
        let eps = Scale::new(e)?;
        let pts: Vec<Point> = pre
            .iter()
            .map(|q| ds.dilate(eps, x, q))
            .collect::<std::result::Result<_, _>>()?;
        let mut sup = 0.0_f64;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if ds.distance(x, &pts[i]) > e || ds.distance(x, &pts[j]) > e {
                    continue;
                }
                let dx = tangent_distance(ds, x, &pts[i], &pts[j], config)?;
                sup = sup.max((ds.distance(&pts[i], &pts[j]) - dx.scalar()).abs() / e);
            }
        }
        out.push((e, sup));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConeReport {
    /// `(μ, max |dˣ(u, v) − (1/μ)dˣ(δ_μ^x u, δ_μ^x v)|)`
    pub defects: Vec<(f64, f64)>,
    /// Largest error bound among the limits used.
    pub max_error_bound: f64,
    pub converged: bool,
    pub samples: usize,
}

impl ConeReport {
    pub fn max_defect(&self) -> f64 {
        self.defects.iter().map(|d| d.1).fold(0.0, f64::max)
    }
}

/// Checks the cone property of `dˣ` for each `μ` on sampled pairs.
pub fn check_cone_property(
    ds: &dyn DilatationStructure,
    x: &Point,
    mus: &[f64],
    sampler: &TripleSampler,
    config: &LimitConfig,
) -> Result<ConeReport> {
    let pairs: Vec<(Point, Point)> = sampler.triples().into_iter().map(|(_, u, v)| (u, v)).collect();
    let mut rep = ConeReport {
        defects: Vec::new(),
        max_error_bound: 0.0,
        converged: true,
        samples: pairs.len(),
    };
    let track = |est: &LimitEstimate, rep: &mut ConeReport| {
        rep.max_error_bound = rep.max_error_bound.max(est.error_bound);
        rep.converged &= est.converged;
    };
    let base: Vec<LimitEstimate> = pairs
        .iter()
        .map(|(u, v)| tangent_distance(ds, x, u, v, config))
        .collect::<Result<_>>()?;
    for est in &base {
        track(est, &mut rep);
    }
    for &m in mus {
        let mu = Scale::new(m)?;
        let mut worst = 0.0_f64;
        for ((u, v), d) in pairs.iter().zip(&base) {
            let du = ds.dilate(mu, x, u)?;
            let dv = ds.dilate(mu, x, v)?;
            let scaled = tangent_distance(ds, x, &du, &dv, config)?;
            track(&scaled, &mut rep);
            worst = worst.max((d.scalar() - scaled.scalar() / m).abs());
        }
        rep.defects.push((m, worst));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{chart_sine, euclidean, group_to_ds, heisenberg};

    fn line(v: &[f64]) -> FiniteMetricSample {
        FiniteMetricSample::on_line(v, 0).unwrap()
    }

    #[test]
    fn sample_validation() {
        assert!(FiniteMetricSample::new(vec![], 0).is_err());
        assert!(FiniteMetricSample::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]], 0).is_err());
        assert!(FiniteMetricSample::new(vec![vec![0.0]], 1).is_err());
        let s = line(&[0.0, 1.0, 3.0]);
        assert_eq!(s.diameter(), 3.0);
        assert_eq!(s.mesh(), 2.0);
        assert_eq!(s.to_table().to_csv(), "n,basepoint\n3,0\n0,1,3\n1,0,2\n3,2,0\n");
    }

    #[test]
    fn admissible_examples() {
        let a = line(&[0.0, 1.0]);
        assert_eq!(admissible_mu(&a, &a, &Correspondence::identity(2)).unwrap(), 0.0);
        let b = line(&[0.0, 1.2]);
        let mu = admissible_mu(&a, &b, &Correspondence::identity(2)).unwrap();
        assert!((mu - 0.2).abs() < 1e-12);
        let c = line(&[0.0]);
        assert_eq!(admissible_mu(&a, &c, &Correspondence::new(vec![(0, 0)])).unwrap(), 1.0);
        assert!(matches!(
            admissible_mu(&a, &b, &Correspondence::new(vec![(1, 1)])),
            Err(Error::MissingBasepointPair)
        ));
    }

    #[test]
    fn exact_examples() {
        let a = line(&[0.0, 1.0]);
        assert_eq!(gh_exact_small(&a, &a).unwrap(), 0.0);
        assert_eq!(gh_exact_small(&a, &line(&[0.0])).unwrap(), 1.0);
        assert!((gh_exact_small(&a, &line(&[0.0, 1.2])).unwrap() - 0.2).abs() < 1e-12);
        let big = line(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(matches!(gh_exact_small(&big, &big), Err(Error::SizeBound { limit: 10, got: 12 })));
    }

    #[test]
    fn exact_matches_brute_force() {
        // all relations through the basepoint pair, for tiny samples
        let mut r = rng(17);
        for _ in 0..30 {
            let n1 = r.gen_range(1..=3);
            let n2 = r.gen_range(1..=3);
            let s1 = line(&(0..n1).map(|_| r.gen_range(0.0..2.0)).collect::<Vec<_>>());
            let s2 = line(&(0..n2).map(|_| r.gen_range(0.0..2.0)).collect::<Vec<_>>());
            let all: Vec<(usize, usize)> = (0..n1).flat_map(|a| (0..n2).map(move |b| (a, b))).collect();
            let mut best = f64::INFINITY;
            for mask in 0u32..(1 << all.len()) {
                let pairs: Vec<_> = all.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, p)| *p).collect();
                if let Ok(mu) = admissible_mu(&s1, &s2, &Correspondence::new(pairs)) {
                    best = best.min(mu);
                }
            }
            let exact = gh_exact_small(&s1, &s2).unwrap();
            assert!((exact - best).abs() < 1e-12, "{exact} vs {best}");
        }
    }

    #[test]
    fn heuristic_examples() {
        let a = line(&[0.0, 1.0]);
        assert!(gh_upper_bound(&a, &a, 0) <= 1e-12);
        assert!((gh_upper_bound(&a, &line(&[0.0, 1.2]), 0) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn euclidean_profiles_are_scale_invariant() {
        let ds = euclidean(1).unwrap();
        let x = Point::scalar(0.0);
        let p1 = sample_profile(ds.as_ref(), &x, Scale::of(0.5), 9, 1).unwrap();
        let p2 = sample_profile(ds.as_ref(), &x, Scale::of(0.125), 9, 1).unwrap();
        assert_eq!(p1.len(), 9);
        for (r1, r2) in p1.dist.iter().zip(&p2.dist) {
            for (a, b) in r1.iter().zip(r2) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        assert!(p1.dist[0].iter().all(|&d| d <= 1.0 + 1e-12));
        let single = sample_profile(ds.as_ref(), &x, Scale::of(0.5), 1, 1).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single.dist, vec![vec![0.0]]);
    }

    #[test]
    fn heisenberg_profiles_match() {
        let ds = group_to_ds(heisenberg(1).unwrap());
        let e = Point::zeros(3);
        let p1 = sample_profile(ds.as_ref(), &e, Scale::of(0.5), 20, 2).unwrap();
        let p2 = sample_profile(ds.as_ref(), &e, Scale::of(0.25), 20, 2).unwrap();
        let gh = gh_upper_bound(&p1, &p2, 3);
        assert!(gh <= 2.0 * p1.mesh().max(p2.mesh()), "{gh}");
    }

    #[test]
    fn convergence_tables() {
        let cfg = LimitConfig::default().with_richardson(true);
        let e = euclidean(2).unwrap();
        let t = tangent_convergence_table(e.as_ref(), &Point::zeros(2), &[0.1, 0.05], 10, 1, &cfg).unwrap();
        assert!(t.iter().all(|r| r.1 <= 1e-9));
        let c = chart_sine(0.1).unwrap();
        let t = tangent_convergence_table(c.as_ref(), &Point::scalar(1.0), &[0.1, 0.05, 0.025, 0.0125], 12, 1, &cfg).unwrap();
        for w in t.windows(2) {
            assert!(w[1].1 < w[0].1, "{t:?}");
        }
    }

    #[test]
    fn cone_property() {
        let cfg = LimitConfig::default().with_richardson(true);
        let h = group_to_ds(heisenberg(1).unwrap());
        let e = Point::zeros(3);
        let s = TripleSampler::at(e.clone(), 0.5, 10, 1);
        let rep = check_cone_property(h.as_ref(), &e, &[0.5], &s, &cfg).unwrap();
        assert!(rep.max_defect() <= 1e-12, "{rep:?}");
        let c = chart_sine(0.1).unwrap();
        let x = Point::scalar(0.0);
        let s = TripleSampler::at(x.clone(), 0.5, 10, 1);
        let rep = check_cone_property(c.as_ref(), &x, &[0.25, 0.5], &s, &cfg).unwrap();
        assert!(rep.max_defect() <= 10.0 * rep.max_error_bound.max(1e-12), "{rep:?}");
    }
}
