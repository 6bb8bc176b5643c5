//! Scenario files: TOML with one table per concern. Every key is optional;
//! missing keys take the defaults below.
//!
//! ```toml
//! [network]
//! sensors = 40          # N_I
//! servers = 40          # N_K, at least N_I
//! epsilon = 9           # 0 ..= N_I - 1
//! irs_elements = 32     # N used for per-sensor rates
//!
//! [radio]
//! carrier_hz = 2.4e9
//! noise_dbm = -53.0
//! eve_noise_dbm = -53.0
//! power_dbm = 10.0
//! bandwidth_hz = 1.0e6          # single-point runs (satisfaction, demo)
//! distance_m = [30.0, 50.0]     # sensor to SBS, uniform
//! eve_distance_m = [30.0, 50.0] # sensor to eavesdropper, uniform
//!
//! [compute]
//! cpu_hz = [4.0e10, 8.0e10]
//! task_bits = [4.88e6, 1.44e7]  # 610 KB .. 1.8 MB
//! gas = [1.5e6, 2.0e6]
//! cycles_per_bit = 10.0
//! energy_coeff = 1.0e-27
//! gas_price = 20
//!
//! [secrecy]
//! irs_elements = [4, 8, 16, 32, 64, 128]
//! distance_m = 40.0
//! eve_distance_m = 40.0
//!
//! [energy]
//! bandwidth_hz = [1.0e5, ...]   # 10 log-spaced points over 0.1..10 MHz
//!
//! [simulation]
//! trials = 100000               # Monte Carlo runs per point
//! draws = 200                   # random populations per sweep point
//! seed = 2022
//! tracked_sensors = [1, 20, 40]
//! rate_mode = "closed-form"     # or "monte-carlo"
//! ```

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::experiments::derive_seed;
use crate::analytics::{ergodic_secrecy_rate, mc_ergodic_secrecy_rate, trial_rng, SecrecyClamp};
use crate::channel::LinkGeometry;
use crate::error::{Error, Result};
use crate::offload::{MecProfile, SensorProfile};
use crate::scalar::dbm_to_watts;

// Keeps population streams apart from Monte Carlo trial streams.
const POPULATION_STREAM_KEY: u64 = 0x5EED_0F0F_1A2B_3C4D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Network {
    pub sensors: usize,
    pub servers: usize,
    pub epsilon: usize,
    pub irs_elements: usize,
}

impl Default for Network {
    fn default() -> Self {
        Self {
            sensors: 40,
            servers: 40,
            epsilon: 9,
            irs_elements: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Radio {
    pub carrier_hz: f64,
    pub noise_dbm: f64,
    pub eve_noise_dbm: f64,
    pub power_dbm: f64,
    pub bandwidth_hz: f64,
    pub distance_m: [f64; 2],
    pub eve_distance_m: [f64; 2],
}

impl Default for Radio {
    fn default() -> Self {
        Self {
            carrier_hz: 2.4e9,
            noise_dbm: -53.0,
            eve_noise_dbm: -53.0,
            power_dbm: 10.0,
            bandwidth_hz: 1.0e6,
            distance_m: [30.0, 50.0],
            eve_distance_m: [30.0, 50.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Compute {
    pub cpu_hz: [f64; 2],
    pub task_bits: [f64; 2],
    pub gas: [f64; 2],
    pub cycles_per_bit: f64,
    pub energy_coeff: f64,
    pub gas_price: u64,
}

impl Default for Compute {
    fn default() -> Self {
        Self {
            cpu_hz: [40e9, 80e9],
            task_bits: [610e3 * 8.0, 1.8e6 * 8.0],
            gas: [1.5e6, 2.0e6],
            cycles_per_bit: 10.0,
            energy_coeff: 1e-27,
            gas_price: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SecrecySweep {
    pub irs_elements: Vec<usize>,
    pub distance_m: f64,
    pub eve_distance_m: f64,
}

impl Default for SecrecySweep {
    fn default() -> Self {
        Self {
            irs_elements: vec![4, 8, 16, 32, 64, 128],
            distance_m: 40.0,
            eve_distance_m: 40.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySweep {
    pub bandwidth_hz: Vec<f64>,
}

impl Default for EnergySweep {
    fn default() -> Self {
        // 10 points log-spaced over [0.1, 10] MHz
        let bandwidth_hz = (0..10)
            .map(|i| 1.0e5 * 100f64.powf(i as f64 / 9.0))
            .collect();
        Self { bandwidth_hz }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateMode {
    /// Closed form; fast and deterministic.
    #[default]
    ClosedForm,
    /// Per-sensor Monte Carlo with `trials` runs; for cross-checking only.
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Simulation {
    pub trials: usize,
    pub draws: usize,
    pub seed: u64,
    pub tracked_sensors: Vec<usize>,
    pub rate_mode: RateMode,
}

impl Default for Simulation {
    fn default() -> Self {
        Self {
            trials: 100_000,
            draws: 200,
            seed: 2022,
            tracked_sensors: vec![1, 20, 40],
            rate_mode: RateMode::ClosedForm,
        }
    }
}

/// Complete experiment configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub network: Network,
    pub radio: Radio,
    pub compute: Compute,
    pub secrecy: SecrecySweep,
    pub energy: EnergySweep,
    pub simulation: Simulation,
}

/// One random draw of sensors and servers.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub sensors: Vec<SensorProfile<f64>>,
    pub servers: Vec<MecProfile<f64>>,
    pub eve_distances: Vec<f64>,
}

fn bad(field: &str, reason: impl std::fmt::Display) -> Error {
    Error::Scenario(format!("{field}: {reason}"))
}

fn check_range(field: &str, r: [f64; 2], positive: bool) -> Result<()> {
    if !(r[0].is_finite() && r[1].is_finite()) || r[0] > r[1] {
        return Err(bad(
            field,
            format!("range [{}, {}] must satisfy min <= max", r[0], r[1]),
        ));
    }
    if positive && r[0] <= 0.0 {
        return Err(bad(field, "values must be positive"));
    }
    if !positive && r[0] < 0.0 {
        return Err(bad(field, "values must be non-negative"));
    }
    Ok(())
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive, got {v}")))
    }
}

fn uniform<R: Rng>(rng: &mut R, r: [f64; 2]) -> f64 {
    if r[0] == r[1] {
        r[0]
    } else {
        rng.random_range(r[0]..r[1])
    }
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let n = &self.network;
        if n.sensors == 0 {
            return Err(bad("network.sensors", "at least one sensor required"));
        }
        if n.servers < n.sensors {
            return Err(bad(
                "network.servers",
                format!("{} servers cannot serve {} sensors", n.servers, n.sensors),
            ));
        }
        if n.epsilon >= n.sensors {
            return Err(bad(
                "network.epsilon",
                format!("{} outside 0..={}", n.epsilon, n.sensors - 1),
            ));
        }
        if n.irs_elements == 0 {
            return Err(bad("network.irs_elements", "at least one element required"));
        }
        let r = &self.radio;
        check_positive("radio.carrier_hz", r.carrier_hz)?;
        check_positive("radio.bandwidth_hz", r.bandwidth_hz)?;
        for (f, v) in [
            ("radio.noise_dbm", r.noise_dbm),
            ("radio.eve_noise_dbm", r.eve_noise_dbm),
            ("radio.power_dbm", r.power_dbm),
        ] {
            if !v.is_finite() {
                return Err(bad(f, "must be finite"));
            }
        }
        check_range("radio.distance_m", r.distance_m, true)?;
        check_range("radio.eve_distance_m", r.eve_distance_m, true)?;
        let c = &self.compute;
        check_range("compute.cpu_hz", c.cpu_hz, true)?;
        check_range("compute.task_bits", c.task_bits, true)?;
        check_range("compute.gas", c.gas, false)?;
        check_positive("compute.cycles_per_bit", c.cycles_per_bit)?;
        check_positive("compute.energy_coeff", c.energy_coeff)?;
        if self.secrecy.irs_elements.contains(&0) {
            return Err(bad(
                "secrecy.irs_elements",
                "element counts must be positive",
            ));
        }
        check_positive("secrecy.distance_m", self.secrecy.distance_m)?;
        check_positive("secrecy.eve_distance_m", self.secrecy.eve_distance_m)?;
        if let Some(b) = self
            .energy
            .bandwidth_hz
            .iter()
            .find(|b| !(**b > 0.0 && b.is_finite()))
        {
            return Err(bad(
                "energy.bandwidth_hz",
                format!("must be positive, got {b}"),
            ));
        }
        let s = &self.simulation;
        if s.trials == 0 {
            return Err(bad("simulation.trials", "at least one trial required"));
        }
        if s.draws == 0 {
            return Err(bad("simulation.draws", "at least one draw required"));
        }
        if let Some(t) = s.tracked_sensors.iter().find(|&&t| t == 0 || t > n.sensors) {
            return Err(bad(
                "simulation.tracked_sensors",
                format!("sensor {t} outside 1..={}", n.sensors),
            ));
        }
        Ok(())
    }

    pub fn power_watts(&self) -> f64 {
        dbm_to_watts(self.radio.power_dbm)
    }

    pub fn geometry(&self, distance: f64, eve_distance: f64) -> LinkGeometry<f64> {
        LinkGeometry {
            distance,
            eve_distance,
            carrier_hz: self.radio.carrier_hz,
            noise: dbm_to_watts(self.radio.noise_dbm),
            eve_noise: dbm_to_watts(self.radio.eve_noise_dbm),
            power: self.power_watts(),
        }
    }

    /// Sensors and servers for draw `index`; identical for identical
    /// `(seed, index)`.
    pub fn draw_population(&self, index: u64) -> Population {
        let mut rng = trial_rng(self.simulation.seed ^ POPULATION_STREAM_KEY, index);
        let c = &self.compute;
        let r = &self.radio;
        let power = self.power_watts();
        let mut sensors = Vec::with_capacity(self.network.sensors);
        let mut eve_distances = Vec::with_capacity(self.network.sensors);
        for id in 0..self.network.sensors {
            let distance = uniform(&mut rng, r.distance_m);
            eve_distances.push(uniform(&mut rng, r.eve_distance_m));
            sensors.push(SensorProfile {
                id,
                task_bits: uniform(&mut rng, c.task_bits),
                power,
                gas: uniform(&mut rng, c.gas),
                distance,
            });
        }
        let servers = (0..self.network.servers)
            .map(|id| MecProfile {
                id,
                cpu_hz: uniform(&mut rng, c.cpu_hz),
                cycles_per_bit: c.cycles_per_bit,
                energy_coeff: c.energy_coeff,
            })
            .collect();
        Population {
            sensors,
            servers,
            eve_distances,
        }
    }

    /// Ergodic secrecy rate of every sensor in `pop`, bits/s/Hz.
    pub fn sensor_rates(&self, pop: &Population, draw: u64) -> Result<Vec<f64>> {
        let n = self.network.irs_elements;
        pop.sensors
            .iter()
            .zip(&pop.eve_distances)
            .map(|(s, &d_e)| {
                let budget = self.geometry(s.distance, d_e).budget()?;
                match self.simulation.rate_mode {
                    RateMode::ClosedForm => ergodic_secrecy_rate(n, &budget),
                    RateMode::MonteCarlo => {
                        let seed = derive_seed(self.simulation.seed, (draw << 20) | s.id as u64);
                        Ok(mc_ergodic_secrecy_rate(
                            seed,
                            self.simulation.trials,
                            n,
                            &budget,
                            SecrecyClamp::ErgodicMean,
                        )?
                        .secrecy
                        .value)
                    }
                }
            })
            .collect()
    }
}
