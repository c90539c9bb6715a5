/// Worst value of a nonnegative defect over a sample set, with the point
/// where it occurred.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub max: f64,
    pub witness: Vec<f64>,
}

impl Residual {
    pub fn zero() -> Self {
        Residual { max: 0.0, witness: Vec::new() }
    }

    /// Maximum of `defect` over `points`. Ties keep the first witness.
    pub fn over<E>(points: &[Vec<f64>], mut defect: impl FnMut(&[f64]) -> Result<f64, E>) -> Result<Self, E> {
        let mut worst = Residual::zero();
        for p in points {
            let d = defect(p)?;
            if d > worst.max || worst.witness.is_empty() {
                worst = Residual { max: d, witness: p.clone() };
            }
        }
        Ok(worst)
    }

    pub fn merge(&mut self, other: Residual) {
        if other.max > self.max || self.witness.is_empty() {
            *self = other;
        }
    }

    pub fn within(&self, tolerance: f64) -> bool {
        self.max <= tolerance
    }
}
