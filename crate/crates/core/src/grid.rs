//! Rectangular row-major grids of points over a parameter box `R^k`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("axis {axis} has {nodes} nodes; at least 3 are required")]
    TooCoarse { axis: usize, nodes: usize },
    #[error("grid expects {expected} values, got {found}")]
    Size { expected: usize, found: usize },
    #[error("shape and step lists differ in length")]
    Rank,
}

/// Values at the nodes `t = (j_1 h_1, ..., j_k h_k)`, last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    shape: Vec<usize>,
    steps: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(shape: Vec<usize>, steps: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self, GridError> {
        if shape.len() != steps.len() {
            return Err(GridError::Rank);
        }
        let expected: usize = shape.iter().product();
        if values.len() != expected {
            return Err(GridError::Size { expected, found: values.len() });
        }
        Ok(Grid { shape, steps, values })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().enumerate().map(|(a, &j)| j * self.stride(a)).sum()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.shape.len()];
        for a in (0..self.shape.len()).rev() {
            out[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        out
    }

    pub fn parameters(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).iter().zip(&self.steps).map(|(&j, &h)| j as f64 * h).collect()
    }

    pub fn require_fine(&self) -> Result<(), GridError> {
        match self.shape.iter().position(|&m| m < 3) {
            Some(axis) => Err(GridError::TooCoarse { axis, nodes: self.shape[axis] }),
            None => Ok(()),
        }
    }

    /// Second-order derivative of scalar node data `f` along `axis`: central
    /// in the interior, one-sided three-point stencils at the ends.
    pub fn derivative(&self, f: &[f64], axis: usize, flat: usize) -> f64 {
        let j = self.multi_index(flat)[axis];
        let s = self.stride(axis);
        let h = self.steps[axis];
        let m = self.shape[axis];
        if j == 0 {
            (-3.0 * f[flat] + 4.0 * f[flat + s] - f[flat + 2 * s]) / (2.0 * h)
        } else if j == m - 1 {
            (3.0 * f[flat] - 4.0 * f[flat - s] + f[flat - 2 * s]) / (2.0 * h)
        } else {
            (f[flat + s] - f[flat - s]) / (2.0 * h)
        }
    }

    /// True when the node is interior along every axis.
    pub fn is_interior(&self, flat: usize) -> bool {
        self.multi_index(flat).iter().zip(&self.shape).all(|(&j, &m)| j > 0 && j + 1 < m)
    }
}
