//! Standard normal density and distribution function, with log-domain
//! variants that stay finite far into the tails.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::{erfc, exp, log, log1p, sqrt};

/// `ln(sqrt(2π))`
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Below this argument `ln Φ` switches to its asymptotic expansion.
const LOG_CDF_TAIL: f64 = -30.0;

pub fn normal_pdf(z: f64) -> f64 {
    exp(-0.5 * z * z) / sqrt(2.0 * PI)
}

pub fn log_normal_pdf(z: f64) -> f64 {
    -0.5 * z * z - LN_SQRT_2PI
}

/// Φ(z), evaluated through `erfc` on the lower half-line so both tails keep
/// full relative accuracy where they are small.
pub fn normal_cdf(z: f64) -> f64 {
    if z <= 0.0 {
        0.5 * erfc(-z * FRAC_1_SQRT_2)
    } else {
        1.0 - 0.5 * erfc(z * FRAC_1_SQRT_2)
    }
}

/// ln Φ(z).
pub fn log_normal_cdf(z: f64) -> f64 {
    if z > 0.0 {
        log1p(-0.5 * erfc(z * FRAC_1_SQRT_2))
    } else if z >= LOG_CDF_TAIL {
        log(0.5 * erfc(-z * FRAC_1_SQRT_2))
    } else {
        // Φ(z) = φ(z)/|z| · (1 - 1/z² + 3/z⁴ - 15/z⁶ + 105/z⁸ - ...)
        let r = 1.0 / (z * z);
        let series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r))));
        log_normal_pdf(z) - log(-z) + log(series)
    }
}

/// φ(z)/Φ(z), the inverse Mills ratio of the lower tail.
pub fn mills_ratio(z: f64) -> f64 {
    exp(log_normal_pdf(z) - log_normal_cdf(z))
}

/// Two-sided tail probability `2·Φ(-|z|)`.
pub fn normal_two_sided_p(z: f64) -> f64 {
    (2.0 * normal_cdf(-z.abs())).min(1.0)
}
