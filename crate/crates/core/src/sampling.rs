//! Seeded random phase points in the domain of each system.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::maps::natural_to_transformed;
use crate::phase::{PhasePoint, Vec3};

/// Range of position radii drawn for Kepler and natural-chart points.
pub const RADIUS_RANGE: (f64, f64) = (0.1, 10.0);
/// Fraction of the chart ball `|x| < 2/√|k|` used for `k < 0`.
pub const BALL_FRACTION: f64 = 0.9;

/// Sign class of the Kepler energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyClass {
    Negative,
    Zero,
    Positive,
}

impl EnergyClass {
    pub const ALL: [EnergyClass; 3] = [EnergyClass::Negative, EnergyClass::Zero, EnergyClass::Positive];

    pub fn label(&self) -> &'static str {
        match self {
            EnergyClass::Negative => "H<0",
            EnergyClass::Zero => "H=0",
            EnergyClass::Positive => "H>0",
        }
    }
}

/// Deterministic generator of phase points.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    /// Uniform on the unit sphere (rejection from the cube).
    pub fn unit_vector(&mut self) -> Vec3 {
        loop {
            let v = Vec3::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0));
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return v / n;
            }
        }
    }

    /// Random vector with norm uniform in `[lo, hi)`.
    pub fn vector(&mut self, lo: f64, hi: f64) -> Vec3 {
        self.unit_vector() * self.uniform(lo, hi)
    }

    /// Kepler point for attractive `α > 0` whose energy has the given sign.
    /// For the zero class `|p|² = 2α/|x|` up to rounding.
    pub fn kepler_point(&mut self, alpha: f64, class: EnergyClass) -> PhasePoint {
        let r = self.uniform(RADIUS_RANGE.0, RADIUS_RANGE.1);
        let x = self.unit_vector() * r;
        let escape = 2.0 * alpha.abs() / r;
        let ratio = match class {
            EnergyClass::Negative => self.uniform(0.05, 0.95),
            EnergyClass::Zero => 1.0,
            EnergyClass::Positive => self.uniform(1.05, 3.0),
        };
        let p = self.unit_vector() * (ratio * escape).sqrt();
        PhasePoint::new(x, p)
    }

    /// Natural-chart point for curvature `k`, inside the chart ball for `k < 0`.
    pub fn natural_point(&mut self, k: f64) -> PhasePoint {
        let hi = if k < 0.0 { BALL_FRACTION * 2.0 / (-k).sqrt() } else { 3.0 };
        let x = self.vector(0.05 * hi.min(1.0), hi);
        let p = self.vector(0.1, 2.0);
        PhasePoint::new(x, p)
    }

    /// Transformed-chart image of a natural-chart point. For `k < 0` these
    /// all lie on the branch `k + |p̄|²/2 > 0`.
    pub fn transformed_image_point(&mut self, k: f64) -> PhasePoint {
        loop {
            if let Ok(z) = natural_to_transformed(&self.natural_point(k)) {
                return z;
            }
        }
    }

    /// Transformed-chart point drawn directly, so `k + |p̄|²/2` takes both
    /// signs when `k < 0`.
    pub fn transformed_point(&mut self) -> PhasePoint {
        PhasePoint::new(self.vector(0.1, 3.0), self.vector(0.0, 2.5))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kepler::{kepler_energy, KeplerParams};

    #[test]
    fn same_seed_same_points() {
        let (mut a, mut b) = (Sampler::new(7), Sampler::new(7));
        for _ in 0..10 {
            assert_eq!(a.natural_point(1.0), b.natural_point(1.0));
        }
    }

    #[test]
    fn kepler_points_have_the_requested_energy_sign() {
        let mut s = Sampler::new(1);
        let a = KeplerParams::new(1.3).unwrap();
        for _ in 0..200 {
            assert!(kepler_energy(&s.kepler_point(1.3, EnergyClass::Negative), &a).unwrap() < 0.0);
            assert!(kepler_energy(&s.kepler_point(1.3, EnergyClass::Positive), &a).unwrap() > 0.0);
            let z = s.kepler_point(1.3, EnergyClass::Zero);
            assert!(kepler_energy(&z, &a).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn negative_curvature_points_stay_in_the_ball() {
        let mut s = Sampler::new(3);
        for _ in 0..200 {
            assert!(s.natural_point(-1.0).position.norm() < 2.0);
        }
        let mut repulsive = 0;
        for _ in 0..200 {
            let z = s.transformed_point();
            if -1.0 + 0.5 * z.momentum.norm_squared() < 0.0 {
                repulsive += 1;
            }
            let w = s.transformed_image_point(-1.0);
            assert!(-1.0 + 0.5 * w.momentum.norm_squared() > 0.0);
        }
        assert!(repulsive > 10);
    }
}
