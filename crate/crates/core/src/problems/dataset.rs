use crate::error::{Error, Result};

/// Dense `n × d` feature matrix (row-major) with one label per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    labels: Vec<f64>,
    dim: usize,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::InvalidParameter(format!(
                "row {i} has {} features, expected {dim}",
                row.len()
            )));
        }
        Self::from_flat(rows.concat(), labels, dim)
    }

    pub fn from_flat(features: Vec<f64>, labels: Vec<f64>, dim: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "dataset needs at least one feature".into(),
            ));
        }
        if features.len() != labels.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: labels.len() * dim,
                found: features.len(),
            });
        }
        if features.iter().chain(&labels).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "dataset contains non-finite values".into(),
            ));
        }
        Ok(Self {
            features,
            labels,
            dim,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.features.chunks_exact(self.dim)
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    pub fn max_row_norm_sq(&self) -> f64 {
        self.rows().map(super::norm_sq).fold(0.0, f64::max)
    }

    /// Divides every feature by `max_i ‖a_i‖` so the largest row has unit
    /// norm. No-op on an all-zero matrix.
    pub fn scale_to_unit_max_norm(&mut self) {
        let norm = self.max_row_norm_sq().sqrt();
        if norm > 0.0 {
            self.features.iter_mut().for_each(|v| *v /= norm);
        }
    }

    /// Errors unless every label is −1 or +1.
    pub fn check_classification(&self) -> Result<()> {
        match self.labels.iter().position(|&y| y != 1.0 && y != -1.0) {
            None => Ok(()),
            Some(i) => Err(Error::InvalidParameter(format!(
                "label {} of sample {i} is not -1 or +1",
                self.labels[i]
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout() {
        let data = Dataset::new(vec![vec![1.0, 2.0], vec![3.0, 4.0]], vec![1.0, -1.0]).unwrap();
        assert_eq!((data.len(), data.dim()), (2, 2));
        assert_eq!(data.row(1), &[3.0, 4.0]);
        assert_eq!(data.max_row_norm_sq(), 25.0);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Dataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![1.0, 1.0]).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![1.0, 1.0]).is_err());
        assert!(matches!(
            Dataset::new(vec![], vec![]),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn unit_scaling() {
        let mut data = Dataset::new(vec![vec![3.0, 4.0], vec![1.0, 0.0]], vec![1.0, 1.0]).unwrap();
        data.scale_to_unit_max_norm();
        assert!((data.max_row_norm_sq() - 1.0).abs() < 1e-15);
        assert_eq!(data.row(1), &[0.2, 0.0]);
    }

    #[test]
    fn classification_labels() {
        let ok = Dataset::new(vec![vec![1.0], vec![2.0]], vec![1.0, -1.0]).unwrap();
        assert!(ok.check_classification().is_ok());
        let bad = Dataset::new(vec![vec![1.0], vec![2.0]], vec![1.0, 0.0]).unwrap();
        assert!(bad.check_classification().is_err());
    }
}
