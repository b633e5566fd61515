//! Complex baseband signals and the calibrated AWGN channel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::rng::RngStream;

/// An `n x d` block of complex channel symbols (`n` tokens, `d` dimensions
/// per token). Codec outputs are unit average power.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    data: Vec<Complex64>,
    tokens: usize,
    dim: usize,
}

impl ComplexSignal {
    pub fn new(data: Vec<Complex64>, tokens: usize, dim: usize) -> Self {
        assert_eq!(data.len(), tokens * dim, "signal shape mismatch");
        ComplexSignal { data, tokens, dim }
    }

    pub fn tokens(&self) -> usize {
        self.tokens
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.data
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Row `i`: the `d` symbols of token `i`.
    pub fn token_row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Mean `|x|^2` per complex sample.
    pub fn average_power(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.data.len() as f64
    }
}

/// AWGN channel setting: signal-to-noise ratio in dB for a unit-power input.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub snr_db: f64,
}

impl ChannelConfig {
    pub fn new(snr_db: f64) -> Self {
        ChannelConfig { snr_db }
    }

    /// Per-complex-sample noise variance `sigma^2 = 10^(-snr_db / 10)`.
    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }
}

/// Adds circularly symmetric complex Gaussian noise: per-sample variance
/// `sigma^2`, split evenly between the real and imaginary parts. Gaussians
/// come from the stream's Box-Muller transform, so the output is
/// reproducible for a given stream state.
pub fn awgn_apply(x: &ComplexSignal, cfg: &ChannelConfig, rng: &mut RngStream) -> ComplexSignal {
    let sigma_component = (cfg.noise_variance() / 2.0).sqrt();
    let data = x
        .samples()
        .iter()
        .map(|&z| {
            let nr = rng.standard_normal() * sigma_component;
            let ni = rng.standard_normal() * sigma_component;
            z + Complex64::new(nr, ni)
        })
        .collect();
    ComplexSignal::new(data, x.tokens(), x.dim())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_signal(n: usize) -> ComplexSignal {
        // Unit-power QPSK-like samples.
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let data = (0..n)
            .map(|i| match i % 4 {
                0 => Complex64::new(c, c),
                1 => Complex64::new(-c, c),
                2 => Complex64::new(-c, -c),
                _ => Complex64::new(c, -c),
            })
            .collect();
        ComplexSignal::new(data, n, 1)
    }

    #[test]
    fn vanishing_noise_at_200_db() {
        let x = unit_signal(4096);
        let mut rng = RngStream::from_seed(1);
        let y = awgn_apply(&x, &ChannelConfig::new(200.0), &mut rng);
        let max_dev = x
            .samples()
            .iter()
            .zip(y.samples())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(max_dev < 1e-9, "max deviation {max_dev}");
    }

    #[test]
    fn noise_power_calibrated_at_0_db() {
        let x = unit_signal(100_000);
        let mut rng = RngStream::from_seed(2);
        let y = awgn_apply(&x, &ChannelConfig::new(0.0), &mut rng);
        let noise_power: f64 = x
            .samples()
            .iter()
            .zip(y.samples())
            .map(|(a, b)| (b - a).norm_sqr())
            .sum::<f64>()
            / x.samples().len() as f64;
        assert!((0.99..=1.01).contains(&noise_power), "noise power {noise_power}");
    }

    #[test]
    fn empirical_snr_within_tenth_db() {
        for snr_db in [-10.0, 0.0, 10.0] {
            let x = unit_signal(100_000);
            let mut rng = RngStream::from_seed(3);
            let y = awgn_apply(&x, &ChannelConfig::new(snr_db), &mut rng);
            let noise_power: f64 = x
                .samples()
                .iter()
                .zip(y.samples())
                .map(|(a, b)| (b - a).norm_sqr())
                .sum::<f64>()
                / x.samples().len() as f64;
            let emp_snr_db = 10.0 * (x.average_power() / noise_power).log10();
            assert!(
                (emp_snr_db - snr_db).abs() < 0.1,
                "empirical {emp_snr_db} dB at configured {snr_db} dB"
            );
        }
    }

    #[test]
    fn awgn_reproducible_per_seed() {
        let x = unit_signal(64);
        let a = awgn_apply(&x, &ChannelConfig::new(5.0), &mut RngStream::from_seed(9));
        let b = awgn_apply(&x, &ChannelConfig::new(5.0), &mut RngStream::from_seed(9));
        assert_eq!(a, b);
    }
}
