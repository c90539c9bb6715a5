//! Seeded sample points in a box `[-h, h]^N`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_COUNT: usize = 64;
pub const DEFAULT_HALF_WIDTH: f64 = 1.0;
/// Draws allowed per requested point before giving up.
pub const MAX_OVERSAMPLING: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("only {accepted} of {requested} sample points were valid after {drawn} draws")]
pub struct SamplingError {
    pub requested: usize,
    pub accepted: usize,
    pub drawn: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    pub half_width: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { count: DEFAULT_COUNT, seed: DEFAULT_SEED, half_width: DEFAULT_HALF_WIDTH }
    }
}

impl SampleSpec {
    pub fn new(count: usize, seed: u64, half_width: f64) -> Self {
        SampleSpec { count, seed, half_width }
    }

    /// Every point is accepted.
    pub fn draw(&self, dim: usize) -> Vec<Vec<f64>> {
        self.draw_valid(dim, |_| true).expect("unconditional sampling cannot fail")
    }

    /// Points rejected by `accept` are discarded and redrawn, up to
    /// `MAX_OVERSAMPLING * count` draws in total.
    pub fn draw_valid(&self, dim: usize, accept: impl Fn(&[f64]) -> bool) -> Result<Vec<Vec<f64>>, SamplingError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let budget = MAX_OVERSAMPLING * self.count.max(1);
        let mut points = Vec::with_capacity(self.count);
        let mut drawn = 0;
        while points.len() < self.count {
            if drawn == budget {
                return Err(SamplingError { requested: self.count, accepted: points.len(), drawn });
            }
            drawn += 1;
            let p: Vec<f64> = (0..dim).map(|_| rng.gen_range(-self.half_width..=self.half_width)).collect();
            if accept(&p) {
                points.push(p);
            }
        }
        Ok(points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_box() {
        let spec = SampleSpec::new(16, 7, 0.5);
        let a = spec.draw(3);
        assert_eq!(a, spec.draw(3));
        assert!(a.iter().flatten().all(|v| v.abs() <= 0.5));
    }

    #[test]
    fn rejection_redraws_then_gives_up() {
        let spec = SampleSpec::new(8, 1, 1.0);
        let pts = spec.draw_valid(1, |p| p[0] > 0.0).unwrap();
        assert!(pts.iter().all(|p| p[0] > 0.0));
        let err = spec.draw_valid(1, |_| false).unwrap_err();
        assert_eq!(err.drawn, 80);
    }
}
