//! Error function to near machine precision.
//!
//! The closed-form macro response needs erf well below Monte Carlo noise, so
//! this evaluates to better than 1e-14 absolute: a Maclaurin series on
//! |x| <= 2 and the Laplace continued fraction for erfc beyond, evaluated by
//! the modified Lentz algorithm.

use std::f64::consts::FRAC_2_SQRT_PI;

/// erf(x), absolute error below 1e-14 on the whole real line.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        -erf(-x)
    } else if x <= 2.0 {
        erf_series(x)
    } else {
        1.0 - erfc_fraction(x)
    }
}

/// erfc(x) = 1 - erf(x), accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x <= 2.0 {
        1.0 - erf_series(x)
    } else {
        erfc_fraction(x)
    }
}

/// Standard normal cumulative distribution.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// erf(x) = 2/sqrt(pi) * sum_n (-1)^n x^(2n+1) / (n! (2n+1)); alternating,
/// loses ~exp(x^2) in cancellation, which keeps ~1e-15 up to x = 2.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 1.0;
    while n < 200.0 {
        term *= -x2 / n;
        let inc = term / (2.0 * n + 1.0);
        sum += inc;
        if inc.abs() < 1e-17 * sum.abs() {
            break;
        }
        n += 1.0;
    }
    sum * FRAC_2_SQRT_PI
}

/// erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
/// for x > 0; converges fast for x >= 2.
fn erfc_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = TINY;
    let mut c = f;
    let mut d = 0.0;
    let mut n = 1usize;
    loop {
        let (a, b) = if n == 1 {
            (1.0, x)
        } else {
            ((n as f64 - 1.0) / 2.0, x)
        };
        d = b + a * d;
        if d == 0.0 {
            d = TINY;
        }
        c = b + a / c;
        if c == 0.0 {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 || n > 300 {
            break;
        }
        n += 1;
    }
    (-x * x).exp() * FRAC_1_SQRT_PI * f
}

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;
