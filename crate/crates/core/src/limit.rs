//! Numerical ε → 0 limits over geometric scale schedules.

use crate::error::{Error, Result};
use crate::point::{Point, Scale};

/// Geometric schedule `start · ratio^k`, `k = 0..count`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleSchedule {
    start: Scale,
    ratio: f64,
    count: usize,
}

impl ScaleSchedule {
    pub fn new(start: f64, ratio: f64, count: usize) -> Result<Self> {
        let start = Scale::new(start)?;
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "schedule ratio must lie in (0,1), got {ratio}"
            )));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("schedule needs at least one scale".into()));
        }
        Ok(ScaleSchedule { start, ratio, count })
    }

    /// Schedule from `start` whose last point is the smallest one not below
    /// `last` (up to rounding).
    pub fn down_to(start: f64, ratio: f64, last: f64) -> Result<Self> {
        let count = ((last / start).ln() / ratio.ln() + 1e-9).floor() as usize + 1;
        Self::new(start, ratio, count.max(1))
    }

    pub fn start(&self) -> Scale {
        self.start
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn scales(&self) -> Vec<Scale> {
        (0..self.count)
            .map(|k| Scale::of(self.start.value() * self.ratio.powi(k as i32)))
            .collect()
    }

    pub fn last(&self) -> Scale {
        Scale::of(self.start.value() * self.ratio.powi(self.count as i32 - 1))
    }
}

impl Default for ScaleSchedule {
    fn default() -> Self {
        ScaleSchedule {
            start: Scale::of(0.1),
            ratio: 0.5,
            count: 10,
        }
    }
}

pub const DEFAULT_CAUCHY_TOL: f64 = 1e-6;

/// Gap shrink factor a convergent table must show at every one of its last
/// three steps.
pub const SHRINK_FACTOR: f64 = 1.2;

#[derive(Clone, Debug, PartialEq)]
pub struct LimitConfig {
    pub schedule: ScaleSchedule,
    pub cauchy_tol: f64,
    pub richardson: bool,
}

impl LimitConfig {
    pub fn new(schedule: ScaleSchedule, cauchy_tol: f64, richardson: bool) -> Self {
        LimitConfig {
            schedule,
            cauchy_tol,
            richardson,
        }
    }

    /// Schedule reaching ε ≈ 1.5e-7 with first-order extrapolation.
    ///
    /// Used where identities must hold to ~1e-9: the extrapolation error of a
    /// quadratic-in-ε table is `c·ε₁ε₂`, below 1e-13 here.
    pub fn fine() -> Self {
        LimitConfig {
            schedule: ScaleSchedule::new(0.01, 0.5, 16).expect("static schedule"),
            cauchy_tol: DEFAULT_CAUCHY_TOL,
            richardson: true,
        }
    }

    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.cauchy_tol = tol;
        self
    }
}

impl Default for LimitConfig {
    fn default() -> Self {
        LimitConfig {
            schedule: ScaleSchedule::default(),
            cauchy_tol: DEFAULT_CAUCHY_TOL,
            richardson: false,
        }
    }
}

/// Value of an ε → 0 limit, with the table it was read from.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitEstimate {
    pub value: Point,
    /// Coordinate distance between the last two table values, or between
    /// the last two extrapolants when extrapolation is on.
    pub error_bound: f64,
    pub converged: bool,
    pub table: Vec<(f64, Point)>,
    pub cauchy_tol: f64,
}

impl LimitEstimate {
    /// A limit known in closed form; its table is the single value.
    pub fn exact(value: Point) -> Self {
        LimitEstimate {
            table: vec![(0.0, value.clone())],
            value,
            error_bound: 0.0,
            converged: true,
            cauchy_tol: 0.0,
        }
    }

    pub fn scalar(&self) -> f64 {
        self.value.value()
    }

    pub fn last_raw(&self) -> &Point {
        &self.table.last().expect("non-empty table").1
    }

    /// Coordinate distances between consecutive table entries.
    pub fn gaps(&self) -> Vec<f64> {
        self.table
            .windows(2)
            .map(|w| w[0].1.coord_dist(&w[1].1))
            .collect()
    }

    /// True when the last three steps all fail to shrink the gap by
    /// [`SHRINK_FACTOR`]. Gaps at rounding level count as converged.
    pub fn is_divergent(&self) -> bool {
        if self.table.iter().any(|(_, p)| !p.is_finite()) {
            return true;
        }
        let gaps = self.gaps();
        if gaps.len() < 2 {
            return false;
        }
        let magnitude = self
            .table
            .iter()
            .map(|(_, p)| p.norm())
            .fold(1.0_f64, f64::max);
        // roundoff in δ_{1/ε} grows like 1/ε or 1/ε², so half the digits
        // are treated as noise
        let floor = f64::EPSILON.sqrt() * magnitude;
        if *gaps.last().unwrap() <= floor {
            return false;
        }
        let steps = gaps.len().min(4);
        let tail = &gaps[gaps.len() - steps..];
        tail.windows(2)
            .all(|w| w[1] > floor && w[0] < SHRINK_FACTOR * w[1])
    }
}

/// First-order extrapolant `(ε₂f(ε₁) − ε₁f(ε₂)) / (ε₂ − ε₁)`.
pub fn richardson(e1: f64, f1: &Point, e2: f64, f2: &Point) -> Point {
    let denom = e2 - e1;
    Point(
        f1.0.iter()
            .zip(&f2.0)
            .map(|(a, b)| (e2 * a - e1 * b) / denom)
            .collect(),
    )
}

/// Tabulates `f` over the schedule and reads off the limit.
///
/// `converged` holds iff the error bound is within `cauchy_tol`. An evaluation failure aborts with the offending scale.
pub fn estimate_limit<F>(mut f: F, config: &LimitConfig) -> Result<LimitEstimate>
where
    F: FnMut(Scale) -> Result<Point>,
{
    let mut table = Vec::with_capacity(config.schedule.count());
    for eps in config.schedule.scales() {
        let value = f(eps).map_err(|e| match e {
            Error::LimitEvaluation { .. } => e,
            other => Error::LimitEvaluation {
                eps: eps.value(),
                message: other.to_string(),
            },
        })?;
        table.push((eps.value(), value));
    }
    Ok(summarize(table, config))
}

/// Scalar convenience over [`estimate_limit`].
pub fn estimate_scalar_limit<F>(mut f: F, config: &LimitConfig) -> Result<LimitEstimate>
where
    F: FnMut(Scale) -> Result<f64>,
{
    estimate_limit(|eps| f(eps).map(Point::scalar), config)
}

fn summarize(table: Vec<(f64, Point)>, config: &LimitConfig) -> LimitEstimate {
    let n = table.len();
    let (value, error_bound) = if n >= 2 {
        let (e1, f1) = &table[n - 2];
        let (e2, f2) = &table[n - 1];
        if config.richardson {
            let value = richardson(*e1, f1, *e2, f2);
            let bound = if n >= 3 {
                let (e0, f0) = &table[n - 3];
                richardson(*e0, f0, *e1, f1).coord_dist(&value)
            } else {
                f1.coord_dist(f2)
            };
            (value, bound)
        } else {
            (f2.clone(), f1.coord_dist(f2))
        }
    } else {
        (table[0].1.clone(), f64::INFINITY)
    };
    let converged = error_bound.is_finite() && value.is_finite() && error_bound <= config.cauchy_tol;
    LimitEstimate {
        value,
        error_bound,
        converged,
        table,
        cauchy_tol: config.cauchy_tol,
    }
}
