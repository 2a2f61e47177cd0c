use super::{check_lambda, dot, norm_sq, Dataset};
use crate::error::Result;
use crate::objective::{FiniteSum, GradientOracle};

/// `f_i(x) = log(1 + exp(−y_i⟨a_i, x⟩)) + λ‖x‖²`
#[derive(Clone, Debug)]
pub struct LogisticObjective {
    data: Dataset,
    lambda: f64,
    smoothness: f64,
}

impl LogisticObjective {
    pub fn new(data: Dataset, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        data.check_classification()?;
        let smoothness = data.max_row_norm_sq() / 4.0 + 2.0 * lambda;
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

/// `log(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl FiniteSum for LogisticObjective {
    fn num_components(&self) -> usize {
        self.data.len()
    }

    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn component(&self, i: usize, x: &[f64]) -> f64 {
        let margin = self.data.label(i) * dot(self.data.row(i), x);
        softplus(-margin) + self.lambda * norm_sq(x)
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn strong_convexity(&self) -> f64 {
        2.0 * self.lambda
    }
}

impl GradientOracle for LogisticObjective {
    fn component_gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        let y = self.data.label(i);
        let a = self.data.row(i);
        let weight = -y * sigmoid(-y * dot(a, x));
        a.iter()
            .zip(x)
            .map(|(a, x)| weight * a + 2.0 * self.lambda * x)
            .collect()
    }
}
