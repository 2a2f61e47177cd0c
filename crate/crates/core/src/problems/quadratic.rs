use crate::error::{Error, Result};
use crate::objective::{FiniteSum, GradientOracle};
use crate::point::Point;
use crate::rng::RngStream;

/// `f_i(x) = ½ Σ_j D_ij x_j²` with nonnegative diagonal spectra.
#[derive(Clone, Debug)]
pub struct QuadraticObjective {
    /// Row-major `n × d`.
    diag: Vec<f64>,
    n: usize,
    d: usize,
    smoothness: f64,
    strong_convexity: f64,
}

/// A synthetic quadratic together with its known minimizer and value.
#[derive(Clone, Debug)]
pub struct QuadraticProblem {
    pub objective: QuadraticObjective,
    pub x_star: Point,
    pub f_star: f64,
}

impl QuadraticObjective {
    /// Objective from explicit per-component diagonals.
    pub fn from_diagonals(
        rows: Vec<Vec<f64>>,
        smoothness: f64,
        strong_convexity: f64,
    ) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if n == 0 || d == 0 {
            return Err(Error::EmptyInput);
        }
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidParameter(
                "diagonals have unequal lengths".into(),
            ));
        }
        let diag = rows.concat();
        if diag
            .iter()
            .any(|&v| !(v.is_finite() && (0.0..=smoothness).contains(&v)))
        {
            return Err(Error::InvalidParameter(format!(
                "diagonal entries must lie in [0, {smoothness}]"
            )));
        }
        Ok(Self {
            diag,
            n,
            d,
            smoothness,
            strong_convexity,
        })
    }

    pub fn diagonal(&self, i: usize) -> &[f64] {
        &self.diag[i * self.d..(i + 1) * self.d]
    }

    /// Diagonal of the average Hessian `(1/n) Σ D_i`.
    pub fn mean_diagonal(&self) -> Vec<f64> {
        let mut mean = vec![0.0; self.d];
        for row in self.diag.chunks_exact(self.d) {
            mean.iter_mut().zip(row).for_each(|(m, v)| *m += v);
        }
        mean.iter_mut().for_each(|m| *m /= self.n as f64);
        mean
    }
}

impl FiniteSum for QuadraticObjective {
    fn num_components(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn component(&self, i: usize, x: &[f64]) -> f64 {
        0.5 * self
            .diagonal(i)
            .iter()
            .zip(x)
            .map(|(h, x)| h * x * x)
            .sum::<f64>()
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }
}

impl GradientOracle for QuadraticObjective {
    fn component_gradient(&self, i: usize, x: &[f64]) -> Vec<f64> {
        self.diagonal(i).iter().zip(x).map(|(h, x)| h * x).collect()
    }
}

/// Random diagonal quadratic whose average Hessian has eigenvalues
/// log-spaced from `tau` to `l` (just `l` when `d = 1`). Each component
/// spectrum is the average plus a zero-mean perturbation kept inside
/// `[0, l]`, so every `f_i` is `l`-smooth and `x* = 0`, `f* = 0`.
pub fn quadratic_objective(
    d: usize,
    n: usize,
    tau: f64,
    l: f64,
    seed: u64,
) -> Result<QuadraticProblem> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need d, n >= 1, got d = {d}, n = {n}"
        )));
    }
    if !(tau.is_finite() && l.is_finite() && tau > 0.0 && tau <= l) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < tau <= L, got tau = {tau}, L = {l}"
        )));
    }
    let eigen: Vec<f64> = if d == 1 {
        vec![l]
    } else {
        let ratio = (l / tau).ln();
        (0..d)
            .map(|j| match j {
                0 => tau,
                j if j == d - 1 => l,
                j => tau * (ratio * j as f64 / (d - 1) as f64).exp(),
            })
            .collect()
    };

    let mut rng = RngStream::new(seed);
    let mut rows = vec![eigen.clone(); n];
    for (j, &lambda) in eigen.iter().enumerate() {
        let mut column: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let mean = column.iter().sum::<f64>() / n as f64;
        column.iter_mut().for_each(|c| *c -= mean);
        let up = column.iter().cloned().fold(0.0, f64::max);
        let down = column.iter().map(|c| -c).fold(0.0, f64::max);
        let mut scale = f64::INFINITY;
        if up > 0.0 {
            scale = scale.min((l - lambda) / up);
        }
        if down > 0.0 {
            scale = scale.min(lambda / down);
        }
        if scale.is_finite() {
            for (row, c) in rows.iter_mut().zip(&column) {
                row[j] = (lambda + 0.9 * scale * c).clamp(0.0, l);
            }
        }
        // push the rounding drift of the column mean into the last row
        let drift = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64 - lambda;
        if drift != 0.0 {
            let fix = &mut rows[n - 1][j];
            *fix = (*fix - drift * n as f64).clamp(0.0, l);
        }
    }

    Ok(QuadraticProblem {
        objective: QuadraticObjective::from_diagonals(rows, l, tau)?,
        x_star: Point::zeros(d),
        f_star: 0.0,
    })
}
