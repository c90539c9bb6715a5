//! Coordinate charts on the base space, the k-tangent bundle, the k-cotangent
//! bundle, and the parameter space `R^k` of integral sections.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Shared handle to a chart. Charts are immutable once built.
pub type Chart = Arc<ChartSpace>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChartKind {
    /// `x_1 .. x_n`
    Base,
    /// `x_i` followed by `v_A_i`
    KTangent,
    /// `x_i` followed by `p_A_i`
    KCotangent,
    /// `t_1 .. t_k`, the domain of integral sections.
    Parameter,
}

impl fmt::Display for ChartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChartKind::Base => "base",
            ChartKind::KTangent => "k-tangent",
            ChartKind::KCotangent => "k-cotangent",
            ChartKind::Parameter => "parameter",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("chart needs n >= 1 and k >= 1 (got n={n}, k={k})")]
    BadDimension { n: usize, k: usize },
    #[error("chart mismatch: expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("copy index {index} out of range 1..={k}")]
    CopyIndex { index: usize, k: usize },
    #[error("point has {found} coordinates, chart has {expected}")]
    PointDimension { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChartSpace {
    n: usize,
    k: usize,
    kind: ChartKind,
    names: Vec<String>,
}

impl ChartSpace {
    pub fn new(kind: ChartKind, n: usize, k: usize) -> Result<Chart, ChartError> {
        if n == 0 || k == 0 {
            return Err(ChartError::BadDimension { n, k });
        }
        let mut names = Vec::new();
        match kind {
            ChartKind::Parameter => {
                names.extend((1..=k).map(|a| format!("t_{a}")));
            }
            _ => {
                names.extend((1..=n).map(|i| format!("x_{i}")));
                let fiber = match kind {
                    ChartKind::KTangent => Some('v'),
                    ChartKind::KCotangent => Some('p'),
                    _ => None,
                };
                if let Some(letter) = fiber {
                    for a in 1..=k {
                        for i in 1..=n {
                            names.push(format!("{letter}_{a}_{i}"));
                        }
                    }
                }
            }
        }
        Ok(Arc::new(ChartSpace { n, k, kind, names }))
    }

    pub fn base(n: usize) -> Result<Chart, ChartError> {
        Self::new(ChartKind::Base, n, 1)
    }

    pub fn k_tangent(n: usize, k: usize) -> Result<Chart, ChartError> {
        Self::new(ChartKind::KTangent, n, k)
    }

    pub fn k_cotangent(n: usize, k: usize) -> Result<Chart, ChartError> {
        Self::new(ChartKind::KCotangent, n, k)
    }

    pub fn parameters(k: usize) -> Result<Chart, ChartError> {
        Self::new(ChartKind::Parameter, k, k)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    /// Total number of coordinates `N`.
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Zero-based index of base coordinate `x_i` (1-based `i`).
    pub fn x_index(&self, i: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.n);
        i - 1
    }

    /// Zero-based index of fiber coordinate `v_A_i` / `p_A_i` (1-based `A`, `i`).
    pub fn fiber_index(&self, a: usize, i: usize) -> usize {
        debug_assert!(matches!(self.kind, ChartKind::KTangent | ChartKind::KCotangent));
        debug_assert!(a >= 1 && a <= self.k && i >= 1 && i <= self.n);
        self.n + (a - 1) * self.n + (i - 1)
    }

    /// True for coordinates along the fibres (`v_A_i` or `p_A_i`).
    pub fn is_fiber(&self, index: usize) -> bool {
        matches!(self.kind, ChartKind::KTangent | ChartKind::KCotangent) && index >= self.n
    }

    pub fn check_point(&self, point: &[f64]) -> Result<(), ChartError> {
        if point.len() != self.dim() {
            return Err(ChartError::PointDimension { expected: self.dim(), found: point.len() });
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!("{} chart (n={}, k={})", self.kind, self.n, self.k)
    }
}

/// Fails with [`ChartError::Mismatch`] unless both charts are the same.
pub fn ensure_same(expected: &ChartSpace, found: &ChartSpace) -> Result<(), ChartError> {
    if expected == found {
        Ok(())
    } else {
        Err(ChartError::Mismatch { expected: expected.describe(), found: found.describe() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinate_ordering() {
        let c = ChartSpace::k_tangent(2, 2).unwrap();
        assert_eq!(c.names(), ["x_1", "x_2", "v_1_1", "v_1_2", "v_2_1", "v_2_2"]);
        assert_eq!(c.fiber_index(2, 1), 4);
        let p = ChartSpace::k_cotangent(1, 3).unwrap();
        assert_eq!(p.names(), ["x_1", "p_1_1", "p_2_1", "p_3_1"]);
        assert_eq!(ChartSpace::parameters(2).unwrap().names(), ["t_1", "t_2"]);
    }

    #[test]
    fn rejects_zero_dimensions() {
        assert!(ChartSpace::k_tangent(0, 2).is_err());
        assert!(ChartSpace::k_tangent(1, 0).is_err());
    }
}
