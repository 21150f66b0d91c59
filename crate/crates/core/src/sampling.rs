//! Seeded random parameter points covering all three regimes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::units::{make_channel, ChannelParams, Regime, Spin};

/// Default seed when `KLEINB_SEED` is not set.
pub const DEFAULT_SEED: u64 = 0x5EED_C1E1;

/// Seed from the `KLEINB_SEED` environment variable, falling back to
/// [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var("KLEINB_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

#[derive(Debug, Clone)]
pub struct SampleRanges {
    pub max_n: u32,
    pub max_b: f64,
    /// Largest kinetic energy above the channel threshold.
    pub max_kinetic: f64,
    /// Largest step height above the top of the gap in the Klein regime.
    pub max_klein_depth: f64,
    /// Minimum relative distance kept from thresholds, `E = M_n` and
    /// `E = V0 ± M_n`, and from the line `V0 = E + 1` where the two
    /// transmitted spinors become parallel.
    pub margin: f64,
}

impl Default for SampleRanges {
    fn default() -> Self {
        Self {
            max_n: 20,
            max_b: 1.0,
            max_kinetic: 10.0,
            max_klein_depth: 50.0,
            margin: 1e-3,
        }
    }
}

/// Deterministic stream of valid channels, cycling through the three
/// regimes so each gets a third of the points.
pub struct ParamSampler {
    rng: ChaCha8Rng,
    ranges: SampleRanges,
    counter: u64,
}

impl ParamSampler {
    pub fn new(seed: u64, ranges: SampleRanges) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ranges,
            counter: 0,
        }
    }

    pub fn next_in(&mut self, regime: Regime) -> ChannelParams {
        let r = &self.ranges;
        let n = self.rng.random_range(0..=r.max_n);
        let spin = if n == 0 || self.rng.random_bool(0.5) {
            Spin::Down
        } else {
            Spin::Up
        };
        let b = self.rng.random_range(0.0..=r.max_b);
        let mass = (1.0 + 2.0 * b * f64::from(n)).sqrt();
        let energy = mass * (1.0 + r.margin) + self.rng.random_range(0.0..r.max_kinetic);
        let gap = mass * (1.0 + r.margin);
        let v0 = match regime {
            Regime::CaseII => {
                // V0 < E - M_n
                let top = (energy - gap).max(0.0);
                self.rng.random_range(0.0..=top)
            }
            Regime::CaseIII => {
                let lo = (energy - mass).max(0.0);
                loop {
                    let v0: f64 = self.rng.random_range(lo..=energy + mass);
                    if (energy + 1.0 - v0).abs() >= r.margin * (1.0 + v0) {
                        break v0;
                    }
                }
            }
            Regime::CaseI => energy + gap + self.rng.random_range(0.0..r.max_klein_depth),
        };
        make_channel(energy, v0, b, spin, n).expect("sampled channel is open")
    }
}

impl Iterator for ParamSampler {
    type Item = ChannelParams;

    fn next(&mut self) -> Option<ChannelParams> {
        let regime = match self.counter % 3 {
            0 => Regime::CaseI,
            1 => Regime::CaseII,
            _ => Regime::CaseIII,
        };
        self.counter += 1;
        let mut p = self.next_in(regime);
        // a Case II draw can collapse into the gap when E sits right at the margin
        while p.regime() != regime {
            p = self.next_in(regime);
        }
        Some(p)
    }
}

/// `count` seeded points, in generation order.
pub fn sample_points(seed: u64, count: usize) -> Vec<ChannelParams> {
    ParamSampler::new(seed, SampleRanges::default())
        .take(count)
        .collect()
}
