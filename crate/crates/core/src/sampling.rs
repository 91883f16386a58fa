//! Seeded samplers for points, pairs and triples near a basepoint.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::point::Point;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the coordinate box `center + [-r, r]^dim`.
pub fn box_point<R: Rng>(rng: &mut R, center: &Point, radius: f64) -> Point {
    Point(
        center
            .0
            .iter()
            .map(|c| c + rng.gen_range(-radius..=radius))
            .collect(),
    )
}

/// How basepoints are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseSampling {
    Fixed(Point),
    Box { center: Point, radius: f64 },
}

/// Draws `(x, u, v)` with `u, v` in a coordinate box around `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct TripleSampler {
    pub base: BaseSampling,
    pub offset_radius: f64,
    pub count: usize,
    pub seed: u64,
}

impl TripleSampler {
    /// Basepoints in `[-0.5, 0.5]^dim`, offsets of half-width 0.5.
    pub fn new(dim: usize, count: usize, seed: u64) -> Self {
        TripleSampler {
            base: BaseSampling::Box {
                center: Point::zeros(dim),
                radius: 0.5,
            },
            offset_radius: 0.5,
            count,
            seed,
        }
    }

    /// All triples share the basepoint `x`.
    pub fn at(x: Point, offset_radius: f64, count: usize, seed: u64) -> Self {
        TripleSampler {
            base: BaseSampling::Fixed(x),
            offset_radius,
            count,
            seed,
        }
    }

    pub fn with_offset(mut self, r: f64) -> Self {
        self.offset_radius = r;
        self
    }

    pub fn with_base(mut self, base: BaseSampling) -> Self {
        self.base = base;
        self
    }

    pub fn triples(&self) -> Vec<(Point, Point, Point)> {
        let mut rng = rng(self.seed);
        (0..self.count)
            .map(|_| {
                let x = match &self.base {
                    BaseSampling::Fixed(p) => p.clone(),
                    BaseSampling::Box { center, radius } => box_point(&mut rng, center, *radius),
                };
                let u = box_point(&mut rng, &x, self.offset_radius);
                let v = box_point(&mut rng, &x, self.offset_radius);
                (x, u, v)
            })
            .collect()
    }

    /// Quadruples `(x, u, v, w)`, for identities in three arguments.
    pub fn quadruples(&self) -> Vec<(Point, Point, Point, Point)> {
        let mut rng = rng(self.seed);
        (0..self.count)
            .map(|_| {
                let x = match &self.base {
                    BaseSampling::Fixed(p) => p.clone(),
                    BaseSampling::Box { center, radius } => box_point(&mut rng, center, *radius),
                };
                let u = box_point(&mut rng, &x, self.offset_radius);
                let v = box_point(&mut rng, &x, self.offset_radius);
                let w = box_point(&mut rng, &x, self.offset_radius);
                (x, u, v, w)
            })
            .collect()
    }
}
