//! Seeded sampling of test points and parameters.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quat::Quaternion;

/// Deterministic source of random quaternions.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Coordinates drawn independently from `[-scale, scale)`.
    pub fn quaternion(&mut self, scale: f64) -> Quaternion {
        Quaternion::new(
            self.uniform(-scale, scale),
            self.uniform(-scale, scale),
            self.uniform(-scale, scale),
            self.uniform(-scale, scale),
        )
    }

    /// Uniform direction on S^3 (rejection from the cube).
    pub fn unit(&mut self) -> Quaternion {
        loop {
            let q = self.quaternion(1.0);
            let n = q.norm();
            if n > 1e-3 && n <= 1.0 {
                return q / n;
            }
        }
    }

    /// Uniform in the 4-ball of the given radius.
    pub fn in_ball(&mut self, center: Quaternion, radius: f64) -> Quaternion {
        self.in_shell(center, 0.0, radius)
    }

    /// Uniform (in volume) in the shell `r_min <= |x - center| <= r_max`.
    pub fn in_shell(&mut self, center: Quaternion, r_min: f64, r_max: f64) -> Quaternion {
        let u = self.uniform(0.0, 1.0);
        let r = (r_min.powi(4) + u * (r_max.powi(4) - r_min.powi(4))).powf(0.25);
        center + self.unit() * r
    }

    /// Quaternion with norm at most `bound`.
    pub fn bounded(&mut self, bound: f64) -> Quaternion {
        self.in_ball(Quaternion::ZERO, bound)
    }

    /// Uniform in an axis-aligned box.
    pub fn in_box(&mut self, lo: [f64; 4], hi: [f64; 4]) -> Quaternion {
        Quaternion::new(
            self.uniform(lo[0], hi[0]),
            self.uniform(lo[1], hi[1]),
            self.uniform(lo[2], hi[2]),
            self.uniform(lo[3], hi[3]),
        )
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}
