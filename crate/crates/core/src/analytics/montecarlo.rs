//! Monte Carlo ergodic secrecy rates.
//!
//! Each trial draws from its own ChaCha stream keyed by `(seed, trial index)`
//! and the reduction runs in trial order, so results do not depend on the
//! rayon pool size.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::RateEstimate;
use crate::channel::{capacity_at_snr, instantaneous_secrecy_rate, sample_channel, LinkBudget};
use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Where the positive-part clamp is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SecrecyClamp {
    /// `[E(C_m) − E(C_w)]⁺`, the lower bound used throughout.
    #[default]
    ErgodicMean,
    /// `E[(C_m − C_w)⁺]`, the upper bound.
    PerRealization,
}

/// Per-link Monte Carlo capacities and the resulting secrecy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSecrecy<T> {
    pub legit: RateEstimate<T>,
    pub eve: RateEstimate<T>,
    pub secrecy: RateEstimate<T>,
}

/// Random stream for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn estimate<T: Real>(samples: impl Iterator<Item = T> + Clone, trials: usize) -> RateEstimate<T> {
    let n = T::from_count(trials);
    let mean = samples.clone().fold(T::zero(), |a, x| a + x) / n;
    let std_error = if trials > 1 {
        let ss = samples.fold(T::zero(), |a, x| a + (x - mean) * (x - mean));
        (ss / (n - T::one()) / n).sqrt()
    } else {
        T::zero()
    };
    RateEstimate {
        value: mean,
        std_error,
        trials,
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(invalid("trials", "at least one trial required"));
    }
    Ok(())
}

/// Samples channels, applies the optimal phase per realization and averages.
///
/// The reported `std_error` of `secrecy` is that of the unclamped mean of the
/// summand being averaged.
pub fn mc_ergodic_secrecy_rate<T>(
    seed: u64,
    trials: usize,
    elements: usize,
    budget: &LinkBudget<T>,
    clamp: SecrecyClamp,
) -> Result<McSecrecy<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    check_trials(trials)?;
    budget.validate()?;
    if elements == 0 {
        return Err(invalid("elements", "IRS needs at least one element"));
    }
    let legit_snr = budget.legit_snr();
    let eve_snr = budget.eve_snr();
    let draws: Vec<(T, T)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let ch = sample_channel::<T, _>(&mut trial_rng(seed, i), elements)?;
            let phase = ch.optimal_phase()?;
            let cm = capacity_at_snr(legit_snr, ch.legit_gain(&phase)?.norm_sqr());
            let cw = capacity_at_snr(eve_snr, ch.eve_gain(&phase)?.norm_sqr());
            Ok((cm, cw))
        })
        .collect::<Result<_>>()?;

    let legit = estimate(draws.iter().map(|d| d.0), trials);
    let eve = estimate(draws.iter().map(|d| d.1), trials);
    let secrecy = match clamp {
        SecrecyClamp::ErgodicMean => {
            let mut s = estimate(
                draws.iter().map(|&(m, w)| instantaneous_secrecy_rate(m, w)),
                trials,
            );
            s.value = s.value.max(T::zero());
            s
        }
        SecrecyClamp::PerRealization => estimate(
            draws
                .iter()
                .map(|&(m, w)| instantaneous_secrecy_rate(m, w).max(T::zero())),
            trials,
        ),
    };
    Ok(McSecrecy {
        legit,
        eve,
        secrecy,
    })
}

/// Sample moments of the aligned legitimate amplitude `|l| + Σ|a_n||h_n|` and
/// the eavesdropper power `|g + zᴴΦ*h|²` under the legitimate-optimal phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainMoments<T> {
    pub amplitude_mean: T,
    pub amplitude_variance: T,
    pub eve_power_mean: T,
    pub eve_power_variance: T,
}

pub fn mc_gain_moments<T>(seed: u64, trials: usize, elements: usize) -> Result<GainMoments<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    if trials < 2 {
        return Err(invalid("trials", "at least two trials required"));
    }
    let draws: Vec<(T, T)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let ch = sample_channel::<T, _>(&mut trial_rng(seed, i), elements)?;
            let phase = ch.optimal_phase()?;
            Ok((
                ch.legit_gain(&phase)?.norm(),
                ch.eve_gain(&phase)?.norm_sqr(),
            ))
        })
        .collect::<Result<_>>()?;
    let n = T::from_count(trials);
    let moments = |pick: fn(&(T, T)) -> T| {
        let mean = draws.iter().fold(T::zero(), |a, d| a + pick(d)) / n;
        let ss = draws
            .iter()
            .fold(T::zero(), |a, d| a + (pick(d) - mean) * (pick(d) - mean));
        (mean, ss / (n - T::one()))
    };
    let (amplitude_mean, amplitude_variance) = moments(|d| d.0);
    let (eve_power_mean, eve_power_variance) = moments(|d| d.1);
    Ok(GainMoments {
        amplitude_mean,
        amplitude_variance,
        eve_power_mean,
        eve_power_variance,
    })
}

fn cn<T, R>(rng: &mut R) -> Complex<T>
where
    T: Real,
    R: rand::Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let s = T::FRAC_1_SQRT_2();
    Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)) * s
}

/// Simplified maximum-ratio beamforming baseline with `antennas` transmit
/// antennas and no IRS.
///
/// The legitimate receiver collects `‖w‖²`; the eavesdropper sees the
/// projection of its own channel onto the beam direction, `|eᴴw|²/‖w‖²`.
pub fn mc_beamforming_secrecy_rate<T>(
    seed: u64,
    trials: usize,
    antennas: usize,
    budget: &LinkBudget<T>,
) -> Result<RateEstimate<T>>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    check_trials(trials)?;
    budget.validate()?;
    if antennas == 0 {
        return Err(invalid("antennas", "at least one antenna required"));
    }
    let legit_snr = budget.legit_snr();
    let eve_snr = budget.eve_snr();
    let draws: Vec<T> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let beam: Vec<Complex<T>> = (0..antennas).map(|_| cn(&mut rng)).collect();
            let eve: Vec<Complex<T>> = (0..antennas).map(|_| cn(&mut rng)).collect();
            let beam_gain = beam.iter().fold(T::zero(), |a, w| a + w.norm_sqr());
            let projection = eve
                .iter()
                .zip(&beam)
                .fold(Complex::new(T::zero(), T::zero()), |a, (e, w)| {
                    a + e.conj() * w
                });
            let cm = capacity_at_snr(legit_snr, beam_gain);
            let cw = capacity_at_snr(eve_snr, projection.norm_sqr() / beam_gain);
            instantaneous_secrecy_rate(cm, cw)
        })
        .collect();
    let mut s = estimate(draws.iter().copied(), trials);
    s.value = s.value.max(T::zero());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(alpha_e: f64) -> LinkBudget<f64> {
        LinkBudget {
            alpha: 4.97e-4,
            alpha_e,
            power: 0.01,
            noise: 5.0e-9,
            eve_noise: 5.0e-9,
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let b = budget(4.97e-4);
        let x = mc_ergodic_secrecy_rate(9, 2000, 8, &b, SecrecyClamp::ErgodicMean).unwrap();
        let y = mc_ergodic_secrecy_rate(9, 2000, 8, &b, SecrecyClamp::ErgodicMean).unwrap();
        assert_eq!(x, y);
        let z = mc_ergodic_secrecy_rate(10, 2000, 8, &b, SecrecyClamp::ErgodicMean).unwrap();
        assert_ne!(x, z);
    }

    #[test]
    fn distant_eavesdropper_leaves_legit_capacity() {
        let m =
            mc_ergodic_secrecy_rate(1, 5000, 8, &budget(0.0), SecrecyClamp::ErgodicMean).unwrap();
        assert_eq!(m.eve.value, 0.0);
        assert_eq!(m.secrecy.value, m.legit.value);
    }

    #[test]
    fn per_realization_clamp_is_upper_bound() {
        let b = budget(2e-3);
        let lo = mc_ergodic_secrecy_rate(4, 5000, 2, &b, SecrecyClamp::ErgodicMean).unwrap();
        let hi = mc_ergodic_secrecy_rate(4, 5000, 2, &b, SecrecyClamp::PerRealization).unwrap();
        assert!(hi.secrecy.value >= lo.secrecy.value);
        assert!(hi.secrecy.value > 0.0);
    }

    #[test]
    fn strong_eavesdropper_clamps_to_zero() {
        let m =
            mc_ergodic_secrecy_rate(2, 4000, 1, &budget(5e-2), SecrecyClamp::ErgodicMean).unwrap();
        assert_eq!(m.secrecy.value, 0.0);
        assert!(m.secrecy.std_error > 0.0);
    }

    #[test]
    fn single_antenna_beamforming_is_direct_link() {
        // one antenna: legit |w|², eve |e|², both exponential
        let b = budget(4.97e-4);
        let bf = mc_beamforming_secrecy_rate(3, 20_000, 1, &b).unwrap();
        let snr = b.legit_snr();
        // E[log2(1+ρX)] for exponential X minus itself → 0 when both SNRs match
        assert!(bf.value.abs() < 4.0 * bf.std_error + 1e-12, "{bf:?} {snr}");
        assert!(mc_beamforming_secrecy_rate(3, 10, 0, &b).is_err());
        assert!(mc_beamforming_secrecy_rate(3, 0, 1, &b).is_err());
    }

    #[test]
    fn rejects_empty_configuration() {
        let b = budget(1e-4);
        assert!(mc_ergodic_secrecy_rate(1, 0, 4, &b, SecrecyClamp::ErgodicMean).is_err());
        assert!(mc_ergodic_secrecy_rate(1, 10, 0, &b, SecrecyClamp::ErgodicMean).is_err());
        let one = mc_ergodic_secrecy_rate(1, 1, 4, &b, SecrecyClamp::ErgodicMean).unwrap();
        assert_eq!(one.secrecy.std_error, 0.0);
        assert_eq!(one.secrecy.trials, 1);
    }
}
