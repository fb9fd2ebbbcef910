//! Rational-grid quantization.
//!
//! The planner snaps rewards to a fixed grid of multiples of 1/denominator
//! and then works in scaled integer arithmetic, which makes optimal values
//! and cost ties exact. The bundled tabletop data lives on the quarter grid,
//! so the default denominator of 4 represents it without change.

use crate::error::{Error, Result};
use crate::graph::RewardVector;

pub const DEFAULT_DENOMINATOR: u32 = 4;

/// Scales reals onto the integer grid `k / denominator`, rounding half away
/// from zero. Off-grid inputs are snapped deterministically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Quantizer {
    denominator: u32,
}

impl Quantizer {
    pub fn new(denominator: u32) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidProblem(
                "quantization denominator must be at least 1".into(),
            ));
        }
        Ok(Self { denominator })
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    pub fn scale(&self, value: f64) -> i64 {
        (value * f64::from(self.denominator)).round() as i64
    }

    pub fn scale_vector(&self, r: &RewardVector) -> [i64; 3] {
        [self.scale(r.dx), self.scale(r.dy), self.scale(r.dtheta)]
    }

    pub fn unscale(&self, scaled: i64) -> f64 {
        scaled as f64 / f64::from(self.denominator)
    }

    pub fn unscale_vector(&self, scaled: [i64; 3]) -> RewardVector {
        RewardVector::new(
            self.unscale(scaled[0]),
            self.unscale(scaled[1]),
            self.unscale(scaled[2]),
        )
    }

    /// Largest grid integer k with k/denominator <= value, robust to the
    /// floating-point representation of on-grid values.
    pub fn floor_bound(&self, value: f64) -> i64 {
        let v = value * f64::from(self.denominator);
        let r = v.round();
        if (v - r).abs() < 1e-6 {
            r as i64
        } else {
            v.floor() as i64
        }
    }

    /// Smallest grid integer k with k/denominator >= value.
    pub fn ceil_bound(&self, value: f64) -> i64 {
        let v = value * f64::from(self.denominator);
        let r = v.round();
        if (v - r).abs() < 1e-6 {
            r as i64
        } else {
            v.ceil() as i64
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarters_are_exact() {
        let q = Quantizer::new(4).unwrap();
        assert_eq!(q.scale(8.5), 34);
        assert_eq!(q.scale(-0.75), -3);
        assert_eq!(q.scale(7.5), 30);
        assert_eq!(q.unscale(34), 8.5);
        assert_eq!(q.scale_vector(&RewardVector::new(1.0, 0.5, -15.0)), [4, 2, -60]);
    }

    #[test]
    fn off_grid_values_snap() {
        let q = Quantizer::new(4).unwrap();
        assert_eq!(q.scale(0.3), 1); // 1.2 -> 1
        assert_eq!(q.scale(0.4), 2); // 1.6 -> 2
        assert_eq!(q.scale(-0.3), -1);
        assert_eq!(q.scale(0.375), 2); // half away from zero
    }

    #[test]
    fn bounds_are_exact_on_grid() {
        let q = Quantizer::new(4).unwrap();
        assert_eq!(q.floor_bound(1.0), 4);
        assert_eq!(q.ceil_bound(-1.0), -4);
        assert_eq!(q.floor_bound(0.3), 1); // 1.2 -> 1
        assert_eq!(q.ceil_bound(0.3), 2);
        // robust to representation noise around integers
        assert_eq!(q.floor_bound(0.7499999999999), 3);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(Quantizer::new(0).is_err());
    }
}
