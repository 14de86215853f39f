//! Bursty traffic generation.
//!
//! Each demand carries a short-term mean rate `mu_st`. Burst events arrive
//! network-wide with negative-exponentially distributed intervals at rate
//! `lambda * |D|`; each burst picks one demand uniformly and redraws its
//! short-term mean from `N(mu_burst, sigma_burst)`. The offered rate per
//! simulation step is drawn from `N(mu_st, sigma_short)`. Negative samples
//! are clamped to zero.
//!
//! # Reproducibility
//!
//! All randomness comes from ChaCha8 streams derived from a single seed:
//! stream 0 drives burst timing, demand selection and burst magnitudes;
//! stream `1 + d` drives the per-step fluctuations of demand `d`. Given
//! (seed, parameters), every emitted rate is fully determined.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficParams {
    /// Burst event density per second and demand.
    pub lambda_per_s: f64,
    /// Mean of the short-term mean redraw (Gbit/s).
    pub mu_burst_gbps: f64,
    /// Standard deviation of the short-term mean redraw (Gbit/s).
    pub sigma_burst_gbps: f64,
    /// Standard deviation of the per-step fluctuation (Gbit/s).
    pub sigma_short_gbps: f64,
}

/// Inverse-CDF sample of a negative-exponential interval with the given
/// rate, from a uniform draw in (0, 1].
pub fn interval_from_uniform(u: f64, rate_per_s: f64) -> f64 {
    debug_assert!(u > 0.0 && u <= 1.0);
    -u.ln() / rate_per_s
}

/// Per-run traffic state and RNG streams.
pub struct TrafficGenerator {
    params: TrafficParams,
    /// Current short-term mean per demand (Gbit/s).
    pub mu_st: Vec<f64>,
    /// Absolute time of the next burst event (s).
    pub next_burst_s: f64,
    burst_rng: ChaCha8Rng,
    demand_rngs: Vec<ChaCha8Rng>,
    burst_count: u64,
}

impl TrafficGenerator {
    /// Initializes all demands: each draws its short-term mean once, and
    /// the first burst interval is sampled.
    pub fn new(seed: u64, params: TrafficParams, demand_count: usize) -> Self {
        assert!(demand_count >= 1);
        assert!(params.lambda_per_s > 0.0);
        let mut burst_rng = ChaCha8Rng::seed_from_u64(seed);
        burst_rng.set_stream(0);
        let demand_rngs = (0..demand_count)
            .map(|d| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(1 + d as u64);
                r
            })
            .collect();
        let mut gen = TrafficGenerator {
            params,
            mu_st: vec![0.0; demand_count],
            next_burst_s: 0.0,
            burst_rng,
            demand_rngs,
            burst_count: 0,
        };
        for d in 0..demand_count {
            gen.mu_st[d] = gen.draw_burst_mean();
        }
        gen.next_burst_s = gen.sample_burst_interval();
        gen
    }

    fn draw_burst_mean(&mut self) -> f64 {
        let n = Normal::new(self.params.mu_burst_gbps, self.params.sigma_burst_gbps)
            .expect("sigma_burst must be finite and nonnegative");
        n.sample(&mut self.burst_rng).max(0.0)
    }

    /// Draws the next inter-burst interval; the network-wide burst rate
    /// is `lambda * |D|` so that per-demand burst density stays
    /// comparable across network sizes.
    pub fn sample_burst_interval(&mut self) -> f64 {
        let rate = self.params.lambda_per_s * self.demand_rngs.len() as f64;
        let u: f64 = 1.0 - self.burst_rng.gen::<f64>();
        interval_from_uniform(u, rate)
    }

    /// Applies one burst: uniformly selects a demand and redraws its
    /// short-term mean, then schedules the next burst.
    pub fn apply_burst(&mut self) {
        let d = self.burst_rng.gen_range(0..self.demand_rngs.len());
        self.mu_st[d] = self.draw_burst_mean();
        self.burst_count += 1;
        let dt = self.sample_burst_interval();
        self.next_burst_s += dt;
    }

    /// Samples the offered rate of every demand for the step starting at
    /// `now_s`, applying any bursts due before or at that instant.
    pub fn sample_instant_rates(&mut self, now_s: f64) -> Vec<f64> {
        while self.next_burst_s <= now_s {
            self.apply_burst();
        }
        let sigma = self.params.sigma_short_gbps;
        self.mu_st
            .iter()
            .enumerate()
            .map(|(d, &mu)| {
                let n = Normal::new(mu, sigma).expect("sigma_short must be nonnegative");
                n.sample(&mut self.demand_rngs[d]).max(0.0)
            })
            .collect()
    }

    pub fn bursts_applied(&self) -> u64 {
        self.burst_count
    }
}
