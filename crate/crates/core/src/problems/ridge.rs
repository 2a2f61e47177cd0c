use super::{check_lambda, dot, norm_sq, Dataset};
use crate::error::Result;
use crate::objective::{FiniteSum, GradientOracle};

/// `f_i(x) = ½(⟨a_i, x⟩ − y_i)² + λ‖x‖²`
#[derive(Clone, Debug)]
pub struct RidgeObjective {
    data: Dataset,
    lambda: f64,
    smoothness: f64,
}

impl RidgeObjective {
    pub fn new(data: Dataset, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let smoothness = data.max_row_norm_sq() + 2.0 * lambda;
        Ok(Self {
            data,
            lambda,
            smoothness,
        })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl FiniteSum for RidgeObjective {
    fn num_components(&self) -> usize {
        self.data.len()
    }

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn component(&self, i: usize, x: &[f64]) -> f64 {
        let r = dot(self.data.row(i), x) - self.data.label(i);
        0.5 * r * r + self.lambda * norm_sq(x)
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn strong_convexity(&self) -> f64 {
        2.0 * self.lambda
    }
}

impl GradientOracle for RidgeObjective {
    fn component_gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let a = self.data.row(i);
        let r = dot(a, x) - self.data.label(i);
        a.iter()
            .zip(x)
            .map(|(a, x)| r * a + 2.0 * self.lambda * x)
            .collect()
    }
}
