//! Floating point abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar the channel, analytics and allocation code is written against.
///
/// Implemented for `f32` and `f64`. Quadrature tolerances are tuned for `f64`;
/// `f32` works everywhere but at single precision accuracy.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Conversion from a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance a quadrature at this precision can reasonably hit.
    fn quad_tolerance() -> Self;
}

impl Real for f32 {
    fn quad_tolerance() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn quad_tolerance() -> Self {
        1e-11
    }
}

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7, n = 9).
pub fn ln_gamma<T: Real>(x: T) -> T {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let one = T::one();
    let half = T::lit(0.5);
    if x < half {
        // reflection
        let pi = T::PI();
        return (pi / (pi * x).sin()).abs().ln() - ln_gamma(one - x);
    }
    let x = x - one;
    let mut acc = T::lit(COEF[0]);
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += T::lit(c) / (x + T::from_count(i));
    }
    let t = x + T::lit(7.5);
    half * (T::TAU()).ln() + (x + half) * t.ln() - t + acc.ln()
}

/// dBm to watts.
pub fn dbm_to_watts<T: Real>(dbm: T) -> T {
    T::lit(10.0).powf((dbm - T::lit(30.0)) / T::lit(10.0))
}

/// Angle reduced into `[0, 2π)`.
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let tau = T::TAU();
    let mut r = theta % tau;
    if r < T::zero() {
        r += tau;
    }
    // -tiny + tau rounds to tau
    if r >= tau {
        r = T::zero();
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_integers_and_half() {
        let facts = [1.0f64, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];
        for (k, f) in facts.iter().enumerate() {
            let x = (k + 1) as f64;
            assert!((ln_gamma(x) - f.ln()).abs() < 1e-12, "x={x}");
        }
        let half = ln_gamma(0.5f64);
        assert!((half - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5f32) - std::f32::consts::PI.sqrt().ln()).abs() < 1e-5);
    }

    #[test]
    fn dbm_conversion() {
        assert!((dbm_to_watts(10.0f64) - 0.01).abs() < 1e-15);
        assert!((dbm_to_watts(-53.0f64) - 5.011_872_336_272_715e-9).abs() < 1e-20);
        assert!((dbm_to_watts(30.0f64) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wrap_angle_domain() {
        let tau = std::f64::consts::TAU;
        assert_eq!(wrap_angle(0.0f64), 0.0);
        assert!(
            (wrap_angle(-std::f64::consts::FRAC_PI_6) - 11.0 * std::f64::consts::PI / 6.0).abs()
                < 1e-15
        );
        assert!((wrap_angle(3.0 * tau + 1.0) - 1.0).abs() < 1e-12);
        assert!(wrap_angle(-1e-18f64) < tau);
        assert_eq!(wrap_angle(tau), 0.0);
    }
}
