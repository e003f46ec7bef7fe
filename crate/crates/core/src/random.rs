//! Seeded random smooth potentials for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::potentials::{Gaussian, Potential};

/// Ranges for sums of Gaussian bumps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSumSpec {
    pub min_bumps: usize,
    pub max_bumps: usize,
    /// Bump heights are drawn from `[amp_min, amp_max]` with a random sign.
    pub amp_min: f64,
    pub amp_max: f64,
    pub width_min: f64,
    pub width_max: f64,
    /// Centres lie in `[-center_range, center_range]`.
    pub center_range: f64,
}

impl Default for GaussianSumSpec {
    fn default() -> Self {
        GaussianSumSpec {
            min_bumps: 1,
            max_bumps: 4,
            amp_min: 0.05,
            amp_max: 1.0,
            width_min: 0.3,
            width_max: 2.0,
            center_range: 3.0,
        }
    }
}

/// One generated potential with the bumps that define it.
#[derive(Debug, Clone)]
pub struct RandomCase {
    pub seed: u64,
    pub index: usize,
    pub bumps: Vec<Gaussian>,
    pub potential: Potential,
}

#[derive(Debug, Clone, Serialize)]
struct BumpRecord {
    amplitude: f64,
    center: f64,
    width: f64,
}

impl RandomCase {
    /// Compact description, e.g. for failure messages.
    pub fn describe(&self) -> String {
        let rec: Vec<BumpRecord> = self
            .bumps
            .iter()
            .map(|b| BumpRecord {
                amplitude: b.amplitude,
                center: b.center,
                width: b.width,
            })
            .collect();
        format!(
            "random[seed={}, index={}] {}",
            self.seed,
            self.index,
            serde_json::to_string(&rec).unwrap_or_default()
        )
    }
}

pub fn random_bumps<R: Rng>(rng: &mut R, spec: &GaussianSumSpec) -> Vec<Gaussian> {
    let n = rng.gen_range(spec.min_bumps..=spec.max_bumps.max(spec.min_bumps));
    (0..n)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            Gaussian {
                amplitude: sign * rng.gen_range(spec.amp_min..=spec.amp_max),
                center: rng.gen_range(-spec.center_range..=spec.center_range),
                width: rng.gen_range(spec.width_min..=spec.width_max),
            }
        })
        .collect()
}

/// `count` potentials from one seed; the same seed always yields the same suite.
pub fn random_suite(seed: u64, count: usize, spec: &GaussianSumSpec) -> Result<Vec<RandomCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|index| {
            let bumps = random_bumps(&mut rng, spec);
            let potential = Potential::gaussians(bumps.clone())?.with_label(format!("random_{index}"));
            Ok(RandomCase {
                seed,
                index,
                bumps,
                potential,
            })
        })
        .collect()
}

/// `count` energies log-spaced over `[lo, hi]`.
pub fn log_energies(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln();
    (0..count)
        .map(|i| lo * (r * i as f64 / (count - 1) as f64).exp())
        .collect()
}
