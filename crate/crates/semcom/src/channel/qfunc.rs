//! Gaussian tail probability.

/// `Q(x)`: probability a standard normal exceeds `x`, via the erfc relation
/// `Q(x) = erfc(x / sqrt(2)) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}
