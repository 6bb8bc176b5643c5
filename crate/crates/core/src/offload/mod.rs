//! Offloading energy model, Gas-priority satisfaction metric and the
//! allocators built on minimum-cost matching.

mod allocate;
mod matching;

pub use allocate::{
    allocate_bidding, allocate_ecm, allocate_ecm_among, allocate_gas_oriented, group,
    order_descending, strongest_servers, GroupPlan,
};
pub use matching::km_assign;

use crate::error::{invalid, require_positive, Result};
use crate::scalar::Real;

/// A sensor's offloaded task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorProfile<T> {
    pub id: usize,
    /// Task size `D_i` in bits.
    pub task_bits: T,
    /// Uplink transmit power `P_i` in watts.
    pub power: T,
    /// Offered Gas `V_i`.
    pub gas: T,
    /// Distance to the SBS in meters.
    pub distance: T,
}

impl<T: Real> SensorProfile<T> {
    pub fn validate(&self) -> Result<()> {
        require_positive("task_bits", self.task_bits)?;
        require_positive("power", self.power)?;
        require_positive("distance", self.distance)?;
        if !(self.gas >= T::zero() && self.gas.is_finite()) {
            return Err(invalid("gas", "must be non-negative"));
        }
        Ok(())
    }
}

/// An MEC server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MecProfile<T> {
    pub id: usize,
    /// `f_k`, CPU cycles per second.
    pub cpu_hz: T,
    /// `c_k`, CPU cycles per bit.
    pub cycles_per_bit: T,
    /// `η_k`, energy coefficient of the chip.
    pub energy_coeff: T,
}

impl<T: Real> MecProfile<T> {
    pub fn validate(&self) -> Result<()> {
        require_positive("cpu_hz", self.cpu_hz)?;
        require_positive("cycles_per_bit", self.cycles_per_bit)?;
        require_positive("energy_coeff", self.energy_coeff)
    }

    /// Bits processed per second, `f_k / c_k`; the ranking key.
    pub fn compute_power(&self) -> T {
        self.cpu_hz / self.cycles_per_bit
    }
}

/// One-to-one sensor → server matching, by position in the input slices.
///
/// Pairs are kept sorted by sensor position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pairs: Vec<(usize, usize)>,
}

impl Assignment {
    /// Builds an assignment, panicking if a sensor or server repeats.
    pub(crate) fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        let a = Self { pairs };
        assert!(a.is_one_to_one(), "assignment repeats a sensor or server");
        a
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn server_of(&self, sensor: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&sensor, |p| p.0)
            .ok()
            .map(|i| self.pairs[i].1)
    }

    pub fn is_one_to_one(&self) -> bool {
        let mut sensors: Vec<_> = self.pairs.iter().map(|p| p.0).collect();
        let mut servers: Vec<_> = self.pairs.iter().map(|p| p.1).collect();
        sensors.sort_unstable();
        servers.sort_unstable();
        sensors.windows(2).all(|w| w[0] != w[1]) && servers.windows(2).all(|w| w[0] != w[1])
    }

    /// Sum of `cost[row][col]` over the pairs.
    pub fn cost<T: Real>(&self, cost: &[Vec<T>]) -> T {
        self.pairs
            .iter()
            .fold(T::zero(), |acc, &(i, k)| acc + cost[i][k])
    }
}

/// `Q = η_k D_i c_k f_k² + D_i P_i / (R_i B)` in joules.
///
/// `rate` is the ergodic secrecy rate in bits/s/Hz. A zero rate makes the link
/// unusable and yields `+∞`.
pub fn energy<T: Real>(
    sensor: &SensorProfile<T>,
    server: &MecProfile<T>,
    rate: T,
    bandwidth: T,
) -> Result<T> {
    require_positive("bandwidth", bandwidth)?;
    if rate.is_nan() || rate < T::zero() {
        return Err(invalid("rate", format!("must be non-negative, got {rate}")));
    }
    let f = server.cpu_hz;
    let compute = server.energy_coeff * sensor.task_bits * server.cycles_per_bit * f * f;
    if rate == T::zero() {
        return Ok(T::infinity());
    }
    Ok(compute + sensor.task_bits * sensor.power / (rate * bandwidth))
}

/// 1-based descending ranks; equal values rank by lower position first.
pub fn rank_descending<T: Real>(values: &[T]) -> Vec<usize> {
    let mut ranks = vec![0; values.len()];
    for (r, i) in order_descending(values).into_iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

/// `O_i = W_{i,k}[r(v_i) − r(f_k/c_k)]`
pub fn unsatisfaction(gas_rank: usize, power_rank: usize, assigned: bool) -> i64 {
    if assigned {
        gas_rank as i64 - power_rank as i64
    } else {
        0
    }
}

/// Per-sensor outcome of an assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SensorOutcome {
    pub sensor: usize,
    pub server: usize,
    pub unsatisfaction: i64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation<T> {
    pub total_energy: T,
    /// One entry per assigned sensor, ordered by sensor position.
    pub outcomes: Vec<SensorOutcome>,
}

impl<T> Evaluation<T> {
    pub fn all_satisfied(&self) -> bool {
        self.outcomes.iter().all(|o| o.satisfied)
    }
}

/// Total energy and satisfaction flags `O_i ≤ ε` of an assignment.
///
/// Gas ranks are taken over all sensors and power ranks over all servers.
pub fn evaluate<T: Real>(
    assignment: &Assignment,
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
    rates: &[T],
    bandwidth: T,
    epsilon: usize,
) -> Result<Evaluation<T>> {
    if rates.len() != sensors.len() {
        return Err(crate::Error::LengthMismatch {
            left: rates.len(),
            right: sensors.len(),
        });
    }
    let gas: Vec<T> = sensors.iter().map(|s| s.gas).collect();
    let power: Vec<T> = servers.iter().map(MecProfile::compute_power).collect();
    let gas_rank = rank_descending(&gas);
    let power_rank = rank_descending(&power);
    let mut total = T::zero();
    let mut outcomes = Vec::with_capacity(assignment.len());
    for &(i, k) in assignment.pairs() {
        let (sensor, server) = match (sensors.get(i), servers.get(k)) {
            (Some(s), Some(m)) => (s, m),
            _ => {
                return Err(invalid(
                    "assignment",
                    format!("pair ({i}, {k}) out of range"),
                ))
            }
        };
        total += energy(sensor, server, rates[i], bandwidth)?;
        let o = unsatisfaction(gas_rank[i], power_rank[k], true);
        outcomes.push(SensorOutcome {
            sensor: i,
            server: k,
            unsatisfaction: o,
            satisfied: o <= epsilon as i64,
        });
    }
    Ok(Evaluation {
        total_energy: total,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sensor(d: f64, p: f64) -> SensorProfile<f64> {
        SensorProfile {
            id: 0,
            task_bits: d,
            power: p,
            gas: 1.0,
            distance: 40.0,
        }
    }

    fn server(f: f64) -> MecProfile<f64> {
        MecProfile {
            id: 0,
            cpu_hz: f,
            cycles_per_bit: 10.0,
            energy_coeff: 1e-27,
        }
    }

    #[test]
    fn energy_example() {
        let q = energy(&sensor(8e6, 0.01), &server(6e10), 4.0, 1e6).unwrap();
        assert!((q - 288.02).abs() < 1e-9, "{q}");
        let q2 = energy(&sensor(8e6, 0.01), &server(6e10), 4.0, 2e6).unwrap();
        assert!((q2 - 288.01).abs() < 1e-9);
        let q3 = energy(&sensor(8e6, 0.01), &server(1.2e11), 4.0, 1e6).unwrap();
        assert!((q3 - (4.0 * 288.0 + 0.02)).abs() < 1e-9);
    }

    #[test]
    fn energy_edges() {
        assert_eq!(
            energy(&sensor(8e6, 0.01), &server(6e10), 0.0, 1e6).unwrap(),
            f64::INFINITY
        );
        assert!(energy(&sensor(8e6, 0.01), &server(6e10), 1.0, 0.0).is_err());
        assert!(energy(&sensor(8e6, 0.01), &server(6e10), -1.0, 1.0).is_err());
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_descending(&[5.0, 9.0, 1.0]), vec![2, 1, 3]);
        assert_eq!(rank_descending(&[7.0, 7.0]), vec![1, 2]);
        assert_eq!(rank_descending(&[3.0]), vec![1]);
    }

    #[test]
    fn unsatisfaction_examples() {
        assert_eq!(unsatisfaction(1, 1, true), 0);
        assert_eq!(unsatisfaction(1, 3, true), -2);
        assert_eq!(unsatisfaction(4, 1, true), 3);
        assert_eq!(unsatisfaction(4, 1, false), 0);
    }

    #[test]
    fn evaluate_empty() {
        let e = evaluate(
            &Assignment::default(),
            &[sensor(1.0, 1.0)],
            &[server(1.0)],
            &[1.0],
            1.0,
            0,
        )
        .unwrap();
        assert_eq!(e.total_energy, 0.0);
        assert!(e.outcomes.is_empty());
    }

    #[test]
    #[should_panic]
    fn duplicate_server_panics() {
        Assignment::from_pairs([(0, 1), (1, 1)]);
    }
}
