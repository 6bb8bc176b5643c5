//! Closed-form ergodic secrecy rate under optimal IRS phases.
//!
//! The composite gains are approximated by moment-matched Gamma variables:
//! the aligned legitimate amplitude `|l| + Σ|a_n||h_n|` and the eavesdropper
//! power `|g + zᴴΦh|²`. Ergodic capacities are then one-dimensional
//! expectations against the Gamma density, evaluated by adaptive quadrature.

mod montecarlo;
mod quadrature;

pub use montecarlo::{
    mc_beamforming_secrecy_rate, mc_ergodic_secrecy_rate, mc_gain_moments, trial_rng, GainMoments,
    McSecrecy, SecrecyClamp,
};
pub use quadrature::Quadrature;

use crate::channel::LinkBudget;
use crate::error::{invalid, require_positive, Result};
use crate::scalar::{ln_gamma, Real};

/// Gamma distribution by shape (`μ`) and scale (`ν`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaApprox<T> {
    shape: T,
    scale: T,
}

impl<T: Real> GammaApprox<T> {
    pub fn new(shape: T, scale: T) -> Result<Self> {
        require_positive("shape", shape)?;
        require_positive("scale", scale)?;
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> T {
        self.shape
    }

    pub fn scale(&self) -> T {
        self.scale
    }

    pub fn mean(&self) -> T {
        self.shape * self.scale
    }

    pub fn variance(&self) -> T {
        self.shape * self.scale * self.scale
    }

    /// `E[φ(X)]` by quadrature in the standardized variable `t = x/ν`.
    pub fn expect<F>(&self, quad: &Quadrature<T>, phi: F) -> T
    where
        F: Fn(T) -> T,
    {
        let shape = self.shape;
        let scale = self.scale;
        let log_norm = ln_gamma(shape);
        let density = move |t: T| {
            if t <= T::zero() {
                T::zero()
            } else {
                ((shape - T::one()) * t.ln() - t - log_norm).exp()
            }
        };
        // Beyond `upper` the density is below e^-60 relative to its peak.
        let spread = shape.sqrt();
        let upper = shape + T::lit(40.0) * spread + T::lit(60.0);
        let mut knots = vec![T::zero()];
        for k in [-4.0, 0.0, 4.0, 12.0] {
            let x = shape + T::lit(k) * spread;
            if x > *knots.last().unwrap() && x < upper {
                knots.push(x);
            }
        }
        knots.push(upper);
        quad.integrate(|t| phi(scale * t) * density(t), &knots).0
    }
}

/// Which constants to use for the legitimate-link Gamma fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaVariant {
    /// `κ = (4 − π²/4)/π` and `ν₁` numerator carrying `N`; matches the first
    /// two moments of the aligned amplitude exactly.
    #[default]
    MomentMatched,
    /// Moment-matched `κ` but `ν₁` numerator without the factor `N`; matches
    /// the mean only at `N = 1`.
    ScaleWithoutN,
    /// `κ = (4 − π²/4)π` and `ν₁` without `N`; matches no moment.
    KappaTimesPi,
}

/// Mean of the aligned amplitude: `√π/2 + Nπ/4`.
pub fn aligned_amplitude_mean<T: Real>(elements: usize) -> T {
    T::PI().sqrt() / T::lit(2.0) + T::from_count(elements) * T::FRAC_PI_4()
}

/// Variance of the aligned amplitude: `(1 − π/4) + N(1 − π²/16)`.
pub fn aligned_amplitude_variance<T: Real>(elements: usize) -> T {
    let pi = T::PI();
    (T::one() - pi / T::lit(4.0)) + T::from_count(elements) * (T::one() - pi * pi / T::lit(16.0))
}

/// Shape/scale of the aligned legitimate amplitude `|l| + Σ|a_n||h_n|`.
pub fn legit_gamma_params<T: Real>(
    elements: usize,
    variant: GammaVariant,
) -> Result<GammaApprox<T>> {
    if elements == 0 {
        return Err(invalid("elements", "IRS needs at least one element"));
    }
    let pi = T::PI();
    let n = T::from_count(elements);
    let four = T::lit(4.0);
    let eta = pi * pi / (T::lit(16.0) - pi * pi);
    let kappa = match variant {
        GammaVariant::MomentMatched | GammaVariant::ScaleWithoutN => (four - pi * pi / four) / pi,
        GammaVariant::KappaTimesPi => (four - pi * pi / four) * pi,
    };
    let mean_term = pi.sqrt() + T::lit(2.0) * eta * kappa * n;
    let shape = mean_term * mean_term / (four + four * eta * kappa * kappa * n - pi);
    let scale_n = match variant {
        GammaVariant::MomentMatched => n,
        GammaVariant::ScaleWithoutN | GammaVariant::KappaTimesPi => T::one(),
    };
    let scale = (four + four * eta * kappa * kappa * scale_n - pi) / (T::lit(2.0) * mean_term);
    GammaApprox::new(shape, scale)
}

/// Shape/scale of the eavesdropper power `|g + zᴴΦ*h|²`:
/// `μ₂ = (1+N)²/((1+N)²+2N)`, `ν₂ = 1+N+2N/(1+N)`.
pub fn eve_gamma_params<T: Real>(elements: usize) -> Result<GammaApprox<T>> {
    if elements == 0 {
        return Err(invalid("elements", "IRS needs at least one element"));
    }
    let n = T::from_count(elements);
    let one_n = T::one() + n;
    let two_n = T::lit(2.0) * n;
    GammaApprox::new(
        one_n * one_n / (one_n * one_n + two_n),
        one_n + two_n / one_n,
    )
}

fn check_snr<T: Real>(rho: T) -> Result<()> {
    if rho >= T::zero() && rho.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            "rho",
            format!("SNR scale must be non-negative, got {rho}"),
        ))
    }
}

/// `E[log2(1 + ρX)]`, `X ~ Gamma(μ, ν)`.
pub fn ergodic_capacity_power<T: Real>(rho: T, gamma: &GammaApprox<T>) -> Result<T> {
    ergodic_capacity_power_with(rho, gamma, &Quadrature::default())
}

pub fn ergodic_capacity_power_with<T: Real>(
    rho: T,
    gamma: &GammaApprox<T>,
    quad: &Quadrature<T>,
) -> Result<T> {
    check_snr(rho)?;
    if rho == T::zero() {
        return Ok(T::zero());
    }
    Ok(gamma.expect(quad, |x| (rho * x).ln_1p()) / T::LN_2())
}

/// `E[log2(1 + ρY²)]`, `Y ~ Gamma(μ, ν)`.
pub fn ergodic_capacity_amplitude<T: Real>(rho: T, gamma: &GammaApprox<T>) -> Result<T> {
    ergodic_capacity_amplitude_with(rho, gamma, &Quadrature::default())
}

pub fn ergodic_capacity_amplitude_with<T: Real>(
    rho: T,
    gamma: &GammaApprox<T>,
    quad: &Quadrature<T>,
) -> Result<T> {
    check_snr(rho)?;
    if rho == T::zero() {
        return Ok(T::zero());
    }
    Ok(gamma.expect(quad, |y| (rho * y * y).ln_1p()) / T::LN_2())
}

/// Closed-form ergodic capacities of both links and the clamped difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyBreakdown<T> {
    pub legit: T,
    pub eve: T,
    pub rate: T,
}

pub fn ergodic_secrecy_breakdown<T: Real>(
    elements: usize,
    budget: &LinkBudget<T>,
    variant: GammaVariant,
) -> Result<SecrecyBreakdown<T>> {
    budget.validate()?;
    let legit =
        ergodic_capacity_amplitude(budget.legit_snr(), &legit_gamma_params(elements, variant)?)?;
    let eve = ergodic_capacity_power(budget.eve_snr(), &eve_gamma_params(elements)?)?;
    Ok(SecrecyBreakdown {
        legit,
        eve,
        rate: (legit - eve).max(T::zero()),
    })
}

/// `[E(C_m | Φ*) − E(C_w | Φ*)]⁺` in bits/s/Hz, moment-matched constants.
pub fn ergodic_secrecy_rate<T: Real>(elements: usize, budget: &LinkBudget<T>) -> Result<T> {
    Ok(ergodic_secrecy_breakdown(elements, budget, GammaVariant::MomentMatched)?.rate)
}

/// Rate in bits/s/Hz, with spread and trial count for Monte Carlo results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate<T> {
    pub value: T,
    pub std_error: T,
    pub trials: usize,
}

impl<T: Real> RateEstimate<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            std_error: T::zero(),
            trials: 0,
        }
    }
}
