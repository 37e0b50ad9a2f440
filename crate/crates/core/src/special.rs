//! Normal-distribution tails in linear and log space.
//!
//! `erf`/`erfc` come from `libm`. Beyond the point where `erfc` underflows,
//! the log tail is evaluated from the Laplace continued fraction for the
//! scaled complementary error function.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Above this argument `erfc` loses range (erfc(20) ~ 5e-176), so the log
/// tail switches to the continued fraction.
const ERFC_LOG_SWITCH: f64 = 20.0;

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `ln erfc(z)`, finite for every finite `z`.
pub fn ln_erfc(z: f64) -> f64 {
    if z < ERFC_LOG_SWITCH {
        return erfc(z).ln();
    }
    // erfc(z) = exp(-z^2)/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
    let mut tail = z;
    for k in (1..=60).rev() {
        tail = z + (k as f64 / 2.0) / tail;
    }
    -z * z - 0.5 * PI.ln() - tail.ln()
}

/// Upper tail `Q(u) = P(N(0,1) > u)`.
pub fn normal_sf(u: f64) -> f64 {
    0.5 * erfc(u * FRAC_1_SQRT_2)
}

/// `ln Q(u)`; accurate deep into the upper tail.
pub fn ln_normal_sf(u: f64) -> f64 {
    ln_erfc(u * FRAC_1_SQRT_2) - std::f64::consts::LN_2
}

/// Standard normal CDF.
pub fn normal_cdf(u: f64) -> f64 {
    0.5 * erfc(-u * FRAC_1_SQRT_2)
}

/// `ln(e^a - e^b)` for `a >= b`.
fn ln_sub_exp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp()).ln_1p()
}

/// `ln(Φ(hi) − Φ(lo))` for `lo < hi`, the mass a standard normal assigns to
/// `[lo, hi]`. Keeps full relative precision both when the interval sits in
/// a far tail and when the mass is within rounding of 1.
pub fn ln_normal_interval(lo: f64, hi: f64) -> f64 {
    debug_assert!(lo <= hi);
    if lo >= 0.0 {
        ln_sub_exp(ln_normal_sf(lo), ln_normal_sf(hi))
    } else if hi <= 0.0 {
        ln_sub_exp(ln_normal_sf(-hi), ln_normal_sf(-lo))
    } else {
        let outside = normal_sf(-lo) + normal_sf(hi);
        if outside < 0.5 {
            (-outside).ln_1p()
        } else {
            (0.5 * (erf(hi * FRAC_1_SQRT_2) + erf(-lo * FRAC_1_SQRT_2))).ln()
        }
    }
}

/// Numerically stable `ln Σ exp(x_i)`; `-inf` for an empty or all-`-inf` input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    if max == f64::INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from 40-digit mpmath.
    const LN_ERFC_TABLE: &[(f64, f64)] = &[
        (0.0, 0.0),
        (0.5, -0.735_011_129_837_084_4),
        (1.0, -1.849_605_509_933_248_2),
        (3.0, -10.720_363_041_981_113),
        (5.0, -27.200_889_545_537_434),
        (10.0, -102.879_889_024_844_89),
        (20.0, -403.569_343_334_104_2),
        (26.0, -679.831_199_763_194_2),
        (27.0, -732.868_886_507_897_4),
        (30.0, -903.974_117_110_643_9),
        (40.0, -1_604.261_556_653_273_6),
    ];

    #[test]
    fn ln_erfc_matches_high_precision() {
        for &(z, expected) in LN_ERFC_TABLE {
            let got = ln_erfc(z);
            assert!(
                (got - expected).abs() <= 1e-13 * expected.abs().max(1.0),
                "z={z}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn continued_fraction_is_continuous_at_switch() {
        for z in [19.0, 19.5, 19.999] {
            let direct = erfc(z).ln();
            let mut tail = z;
            for k in (1..=60).rev() {
                tail = z + (k as f64 / 2.0) / tail;
            }
            let cf = -z * z - 0.5 * PI.ln() - tail.ln();
            assert!((direct - cf).abs() < 1e-12 * direct.abs());
        }
    }

    #[test]
    fn erfc_absolute_error_contract() {
        // erfc(0.5), erfc(1), erfc(3) from mpmath; absolute error <= 1e-12.
        assert!((erfc(0.5) - 0.479_500_122_186_953_5).abs() < 1e-12);
        assert!((erfc(1.0) - 0.157_299_207_050_285_13).abs() < 1e-12);
        assert!((erfc(3.0) - 2.209_049_699_858_544e-5).abs() < 1e-12);
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        for i in -400..=400 {
            let u = i as f64 * 0.05;
            assert!((normal_cdf(u) + normal_sf(u) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn interval_mass_regimes() {
        // ln(Φ(5) − Φ(−5)) and tail intervals from mpmath.
        let centre = ln_normal_interval(-5.0, 5.0);
        assert!((centre - -5.733_033_080_966_98e-7).abs() < 1e-20);
        let far = ln_normal_interval(25.0, 125.0);
        assert!((far - -316.639_408_008_020_26).abs() < 1e-10);
        let mirrored = ln_normal_interval(-125.0, -25.0);
        assert_eq!(far, mirrored);
        let wide = ln_normal_interval(-0.005, 0.005);
        assert!((wide.exp() - 0.003_989_406_181_481_645).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        let v = log_sum_exp(&[-1000.0, -1000.0]);
        assert!((v - (-1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[3.0]), 3.0);
    }
}
