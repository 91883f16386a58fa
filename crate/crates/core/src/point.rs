//! Points of the model spaces and the scale parameter.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A point of a model space, stored in global coordinates.
///
/// Heisenberg points are laid out as the horizontal `2n` coordinates followed
/// by the vertical one; points of a double group concatenate both factors.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn scalar(value: f64) -> Self {
        Point(vec![value])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// First coordinate; the natural reading of one-dimensional points.
    pub fn value(&self) -> f64 {
        self.0[0]
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, factor: f64) -> Point {
        Point(self.0.iter().map(|a| a * factor).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// Euclidean distance between coordinate vectors.
    ///
    /// Used to compare two computed points for numerical agreement, which is
    /// not the same thing as the model distance.
    pub fn coord_dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Concatenates two points (used for pairs in the double group).
    pub fn concat(&self, other: &Point) -> Point {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Point(v)
    }

    /// Splits a point into its leading `n` coordinates and the rest.
    pub fn split(&self, n: usize) -> (Point, Point) {
        (Point(self.0[..n].to_vec()), Point(self.0[n..].to_vec()))
    }

    /// Bit pattern of the coordinates, for memo keys.
    pub fn bits(&self) -> Vec<u64> {
        self.0.iter().map(|c| c.to_bits()).collect()
    }

    /// Coordinates joined by `sep`, using the shortest round-trip formatting.
    pub fn join(&self, sep: &str) -> String {
        self.0
            .iter()
            .map(|c| format!("{c}"))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.join(", "))
    }
}

impl FromStr for Point {
    type Err = Error;

    /// Parses comma-separated reals, e.g. `1,0,0`.
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad coordinate `{tok}` in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(Error::InvalidParameter("empty point".into()));
        }
        Ok(Point(coords))
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl From<f64> for Point {
    fn from(v: f64) -> Self {
        Point::scalar(v)
    }
}

/// A dilatation coefficient: a positive real.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Scale(f64);

impl Scale {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Scale(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "scale must be a finite positive real, got {value}"
            )))
        }
    }

    /// Panics if `value` is not a finite positive real.
    pub fn of(value: f64) -> Self {
        Self::new(value).expect("invalid scale")
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn inverse(self) -> Self {
        Scale(1.0 / self.0)
    }

}

impl std::ops::Mul for Scale {
    type Output = Scale;

    fn mul(self, other: Scale) -> Scale {
        Scale(self.0 * other.0)
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
