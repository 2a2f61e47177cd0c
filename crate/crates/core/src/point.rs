//! Dense iterate vectors in R^d.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

/// A dense point in R^d.
///
/// Construction through [`Point::new`] rejects non-finite coordinates. The
/// arithmetic helpers do not re-check finiteness on every result; solvers
/// call [`Point::is_finite`] once per inner iteration and abort on failure.
#[derive(Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        if let Some(j) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { coordinate: j });
        }
        Ok(Self { coords })
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        Self {
            coords: vec![0.0; d],
        }
    }

    pub fn filled(d: usize, value: f64) -> Self {
        assert!(d >= 1, "dimension must be at least 1");
        Self {
            coords: vec![value; d],
        }
    }

    /// Wraps raw coordinates produced by trusted arithmetic.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn check_dim(&self, other: &Point) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Point {
        Point::from_raw(self.coords.iter().map(|c| c * factor).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// `self += factor * other`
    pub fn axpy(&mut self, factor: f64, other: &Point) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += factor * b;
        }
    }

    /// `self + step * direction`, used for perturbed evaluation points.
    pub fn offset(&self, step: f64, direction: &Point) -> Point {
        let mut out = self.clone();
        out.axpy(step, direction);
        out
    }

    /// Linear combination `Σ w_k p_k` of equally sized points.
    pub fn combination(terms: &[(f64, &Point)]) -> Point {
        let d = terms[0].1.dim();
        let mut out = vec![0.0; d];
        for (w, p) in terms {
            debug_assert_eq!(p.dim(), d);
            for (o, c) in out.iter_mut().zip(&p.coords) {
                *o += w * c;
            }
        }
        Point::from_raw(out)
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, j: usize) -> &f64 {
        &self.coords[j]
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Point").field(&self.coords).finish()
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Point::new(coords)
    }
}
