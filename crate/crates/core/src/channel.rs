//! Rayleigh channels for one IRS-assisted uplink slot, optimal phase
//! alignment, and instantaneous capacities.
//!
//! Capacities here are spectral efficiencies in bits/s/Hz. The bandwidth only
//! enters where a throughput in bits/s is needed (the energy model).

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, require_positive, Error, Result};
use crate::scalar::{wrap_angle, Real};

/// Propagation speed used by the free-space amplitude path loss.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// One draw of every fading coefficient involved in a sensor's slot.
///
/// `irs_sbs` and `irs_eve` hold the entries of the row vectors `aᴴ` and `zᴴ`
/// as they multiply the phase matrix, i.e. already conjugated.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization<T> {
    /// Sensor to SBS direct link `l`.
    pub direct: Complex<T>,
    /// Sensor to IRS `h`.
    pub sensor_irs: Vec<Complex<T>>,
    /// IRS to SBS `aᴴ`.
    pub irs_sbs: Vec<Complex<T>>,
    /// Sensor to eavesdropper direct link `g`.
    pub eve_direct: Complex<T>,
    /// IRS to eavesdropper `zᴴ`.
    pub irs_eve: Vec<Complex<T>>,
}

impl<T: Real> ChannelRealization<T> {
    pub fn elements(&self) -> usize {
        self.sensor_irs.len()
    }

    /// Phase configuration maximizing the legitimate gain.
    pub fn optimal_phase(&self) -> Result<PhaseShift<T>> {
        optimal_phase(self.direct, &self.irs_sbs, &self.sensor_irs)
    }

    /// `l + aᴴ Φ h`
    pub fn legit_gain(&self, phase: &PhaseShift<T>) -> Result<Complex<T>> {
        effective_gain(self.direct, &self.irs_sbs, &self.sensor_irs, phase)
    }

    /// `g + zᴴ Φ h`
    pub fn eve_gain(&self, phase: &PhaseShift<T>) -> Result<Complex<T>> {
        effective_gain(self.eve_direct, &self.irs_eve, &self.sensor_irs, phase)
    }

    /// `|l| + Σ |a_n||h_n|`, the gain magnitude reached by the optimal phase.
    pub fn aligned_amplitude(&self) -> T {
        self.sensor_irs
            .iter()
            .zip(&self.irs_sbs)
            .fold(self.direct.norm(), |acc, (h, a)| acc + h.norm() * a.norm())
    }
}

/// Per-element IRS phases, each in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShift<T>(Vec<T>);

impl<T: Real> PhaseShift<T> {
    pub fn new(theta: Vec<T>) -> Result<Self> {
        let tau = T::TAU();
        if let Some(bad) = theta.iter().find(|t| !(**t >= T::zero() && **t < tau)) {
            return Err(invalid("theta", format!("angle {bad} outside [0, 2π)")));
        }
        Ok(Self(theta))
    }

    /// Builds a phase vector from arbitrary angles, wrapping into `[0, 2π)`.
    pub fn wrapped(theta: impl IntoIterator<Item = T>) -> Self {
        Self(theta.into_iter().map(wrap_angle).collect())
    }

    pub fn angles(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Distances, carrier, noise floors and transmit power for one sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry<T> {
    /// Sensor to SBS distance in meters.
    pub distance: T,
    /// Sensor to eavesdropper distance in meters.
    pub eve_distance: T,
    pub carrier_hz: T,
    /// SBS noise power in watts.
    pub noise: T,
    /// Eavesdropper noise power in watts.
    pub eve_noise: T,
    /// Transmit power in watts.
    pub power: T,
}

impl<T: Real> LinkGeometry<T> {
    pub fn validate(&self) -> Result<()> {
        require_positive("distance", self.distance)?;
        require_positive("eve_distance", self.eve_distance)?;
        require_positive("carrier_hz", self.carrier_hz)?;
        require_positive("noise", self.noise)?;
        require_positive("eve_noise", self.eve_noise)?;
        require_positive("power", self.power)
    }

    pub fn budget(&self) -> Result<LinkBudget<T>> {
        self.validate()?;
        Ok(LinkBudget {
            alpha: path_loss(self.distance, self.carrier_hz)?,
            alpha_e: path_loss(self.eve_distance, self.carrier_hz)?,
            power: self.power,
            noise: self.noise,
            eve_noise: self.eve_noise,
        })
    }
}

/// Path losses, power and noise: everything the rate formulas consume.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget<T> {
    pub alpha: T,
    pub alpha_e: T,
    pub power: T,
    pub noise: T,
    pub eve_noise: T,
}

impl<T: Real> LinkBudget<T> {
    pub fn validate(&self) -> Result<()> {
        require_positive("alpha", self.alpha)?;
        if !(self.alpha_e >= T::zero() && self.alpha_e.is_finite()) {
            return Err(invalid("alpha_e", "must be non-negative and finite"));
        }
        require_positive("power", self.power)?;
        require_positive("noise", self.noise)?;
        require_positive("eve_noise", self.eve_noise)
    }

    /// `α²P/σ²`
    pub fn legit_snr(&self) -> T {
        self.alpha * self.alpha * self.power / self.noise
    }

    /// `α_e²P/σ_e²`
    pub fn eve_snr(&self) -> T {
        self.alpha_e * self.alpha_e * self.power / self.eve_noise
    }
}

fn complex_normal<T, R>(rng: &mut R) -> Complex<T>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let s = T::FRAC_1_SQRT_2();
    let re: T = StandardNormal.sample(rng);
    let im: T = StandardNormal.sample(rng);
    Complex::new(re * s, im * s)
}

fn complex_normals<T, R>(rng: &mut R, n: usize) -> Vec<Complex<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    (0..n).map(|_| complex_normal(rng)).collect()
}

/// Draws an independent unit-variance circularly-symmetric realization.
///
/// Draw order is `l, h, aᴴ, g, zᴴ`; it is part of the reproducibility contract.
pub fn sample_channel<T, R>(rng: &mut R, elements: usize) -> Result<ChannelRealization<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if elements == 0 {
        return Err(invalid("elements", "IRS needs at least one element"));
    }
    let direct = complex_normal(rng);
    let sensor_irs = complex_normals(rng, elements);
    let irs_sbs = complex_normals(rng, elements);
    let eve_direct = complex_normal(rng);
    let irs_eve = complex_normals(rng, elements);
    Ok(ChannelRealization {
        direct,
        sensor_irs,
        irs_sbs,
        eve_direct,
        irs_eve,
    })
}

/// Free-space amplitude path loss `c / (2π f_c d)`.
pub fn path_loss<T: Real>(distance: T, carrier_hz: T) -> Result<T> {
    require_positive("distance", distance)?;
    require_positive("carrier_hz", carrier_hz)?;
    Ok(T::lit(SPEED_OF_LIGHT) / (T::TAU() * carrier_hz * distance))
}

fn check_lengths<A, B>(a: &[A], b: &[B]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(invalid("elements", "IRS needs at least one element"));
    }
    Ok(())
}

/// Phase alignment `θ_n = arg(l) − arg(aᴴ_n) − arg(h_n)`, wrapped into `[0, 2π)`.
///
/// A zero direct link has its argument taken as zero.
pub fn optimal_phase<T: Real>(
    direct: Complex<T>,
    irs_sbs: &[Complex<T>],
    sensor_irs: &[Complex<T>],
) -> Result<PhaseShift<T>> {
    check_lengths(irs_sbs, sensor_irs)?;
    let reference = if direct == Complex::new(T::zero(), T::zero()) {
        T::zero()
    } else {
        direct.arg()
    };
    Ok(PhaseShift::wrapped(
        irs_sbs
            .iter()
            .zip(sensor_irs)
            .map(|(a, h)| reference - a.arg() - h.arg()),
    ))
}

/// `l + Σ_n aᴴ_n e^{jθ_n} h_n`
pub fn effective_gain<T: Real>(
    direct: Complex<T>,
    irs: &[Complex<T>],
    sensor_irs: &[Complex<T>],
    phase: &PhaseShift<T>,
) -> Result<Complex<T>> {
    check_lengths(irs, sensor_irs)?;
    if phase.len() != irs.len() {
        return Err(Error::LengthMismatch {
            left: phase.len(),
            right: irs.len(),
        });
    }
    Ok(irs
        .iter()
        .zip(sensor_irs)
        .zip(phase.angles())
        .fold(direct, |acc, ((a, h), &t)| {
            acc + *a * Complex::from_polar(T::one(), t) * *h
        }))
}

/// `log2(1 + α²P|gain|²/σ²)` in bits/s/Hz.
pub fn instantaneous_capacity<T: Real>(
    gain: Complex<T>,
    alpha: T,
    power: T,
    noise: T,
) -> Result<T> {
    require_positive("alpha", alpha)?;
    require_positive("power", power)?;
    require_positive("noise", noise)?;
    Ok(capacity_at_snr(
        alpha * alpha * power / noise,
        gain.norm_sqr(),
    ))
}

/// `log2(1 + snr·gain_sq)` without validation, for inner loops.
#[inline]
pub(crate) fn capacity_at_snr<T: Real>(snr: T, gain_sq: T) -> T {
    (snr * gain_sq).ln_1p() / T::LN_2()
}

/// Signed per-realization secrecy summand `C_m − C_w`.
///
/// The positive-part clamp belongs to the ergodic mean, not to this value.
#[inline]
pub fn instantaneous_secrecy_rate<T: Real>(legit: T, eve: T) -> T {
    legit - eve
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn path_loss_examples() {
        let a30: f64 = path_loss(30.0, 2.4e9).unwrap();
        assert!((a30 - 6.631e-4).abs() < 5e-7);
        let a60: f64 = path_loss(60.0, 2.4e9).unwrap();
        assert!((a60 * 2.0 - a30).abs() < 1e-18);
        let a50: f64 = path_loss(50.0, 2.4e9).unwrap();
        assert!((a50 - 3.979e-4).abs() < 5e-7);
        assert!(path_loss(0.0, 2.4e9).is_err());
        assert!(path_loss(30.0, -1.0).is_err());
        assert!(path_loss(31.0, 2.4e9).unwrap() < a30);
        assert!(path_loss(30.0, 2.5e9).unwrap() < a30);
    }

    #[test]
    fn optimal_phase_cancels() {
        let a = [Complex::from_polar(1.0, PI / 3.0)];
        let h = [Complex::from_polar(3.0, -PI / 6.0)];
        let phase = optimal_phase(c(2.0, 0.0), &a, &h).unwrap();
        assert!((phase.angles()[0] - 11.0 * PI / 6.0).abs() < 1e-12);
        let g = effective_gain(c(2.0, 0.0), &a, &h, &phase).unwrap();
        assert!((g - c(5.0, 0.0)).norm() < 1e-12);

        let phase = optimal_phase(c(1.0, 0.0), &[c(1.0, 0.0)], &[c(1.0, 0.0)]).unwrap();
        assert_eq!(phase.angles(), &[0.0]);
    }

    #[test]
    fn optimal_phase_zero_direct_link() {
        let a = [c(0.0, 1.0), c(-1.0, 0.0)];
        let h = [c(2.0, 0.0), c(0.0, -1.0)];
        let phase = optimal_phase(c(0.0, 0.0), &a, &h).unwrap();
        let g = effective_gain(c(0.0, 0.0), &a, &h, &phase).unwrap();
        assert!((g.norm() - 3.0).abs() < 1e-12);
        assert!(g.im.abs() < 1e-12 && g.re > 0.0);
    }

    #[test]
    fn gain_rejects_bad_shapes() {
        let p = PhaseShift::wrapped([PI]);
        let g = effective_gain(c(0.0, 0.0), &[c(1.0, 0.0)], &[c(1.0, 0.0)], &p).unwrap();
        assert!((g - c(-1.0, 0.0)).norm() < 1e-12);

        let empty = PhaseShift::wrapped(Vec::<f64>::new());
        assert!(effective_gain(c(1.0, 1.0), &[], &[], &empty).is_err());
        assert!(matches!(
            optimal_phase(c(1.0, 0.0), &[c(1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(effective_gain(c(1.0, 0.0), &[c(1.0, 0.0); 2], &[c(1.0, 0.0); 2], &p).is_err());
    }

    #[test]
    fn phase_domain_enforced() {
        assert!(PhaseShift::new(vec![0.0, 1.0]).is_ok());
        assert!(PhaseShift::new(vec![std::f64::consts::TAU]).is_err());
        assert!(PhaseShift::new(vec![-0.1]).is_err());
    }

    #[test]
    fn capacity_examples() {
        // α²P/σ² = 1
        let cap = instantaneous_capacity(c(1.0, 0.0), 1.0, 2.0, 2.0).unwrap();
        assert!((cap - 1.0).abs() < 1e-15);
        assert_eq!(
            instantaneous_capacity(c(0.0, 0.0), 1.0, 1.0, 1.0).unwrap(),
            0.0
        );
        // 10 dBm: α²P/σ² = 0.8773
        let cap = instantaneous_capacity(c(1.0, 0.0), 6.631e-4, 0.01, 5.012e-9).unwrap();
        assert!((cap - 0.9087).abs() < 1e-3, "{cap}");
        // 20 dBm: α²P/σ² = 8.773
        let cap = instantaneous_capacity(c(1.0, 0.0), 6.631e-4, 0.1, 5.012e-9).unwrap();
        assert!((cap - 3.289).abs() < 1e-3, "{cap}");
        assert!(instantaneous_capacity(c(1.0, 0.0), 1.0, 0.0, 1.0).is_err());
        assert!(instantaneous_capacity(c(1.0, 0.0), 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn secrecy_summand_is_signed() {
        assert_eq!(instantaneous_secrecy_rate(3.0, 1.0), 2.0);
        assert_eq!(instantaneous_secrecy_rate(1.0, 3.0), -2.0);
        assert_eq!(instantaneous_secrecy_rate(0.0, 0.0), 0.0);
    }

    #[test]
    fn sampling_rejects_zero_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_channel::<f64, _>(&mut rng, 0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let a: ChannelRealization<f64> =
            sample_channel(&mut ChaCha8Rng::seed_from_u64(42), 16).unwrap();
        let b: ChannelRealization<f64> =
            sample_channel(&mut ChaCha8Rng::seed_from_u64(42), 16).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.elements(), 16);
        assert_eq!(a.irs_eve.len(), 16);
    }

    #[test]
    fn random_alignment_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ch: ChannelRealization<f64> = sample_channel(&mut rng, 8).unwrap();
        let phase = ch.optimal_phase().unwrap();
        let g = ch.legit_gain(&phase).unwrap();
        assert!((g.norm() - ch.aligned_amplitude()).abs() < 1e-9);
    }

    #[test]
    fn works_in_single_precision() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch: ChannelRealization<f32> = sample_channel(&mut rng, 4).unwrap();
        let g = ch.legit_gain(&ch.optimal_phase().unwrap()).unwrap();
        assert!((g.norm() - ch.aligned_amplitude()).abs() < 1e-4);
    }
}
