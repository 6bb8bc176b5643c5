//! Gas-oriented grouping and matching plus the ECM and bidding baselines.

use rayon::prelude::*;

use super::{energy, km_assign, Assignment, MecProfile, SensorProfile};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Positions sorted by descending value; equal values keep position order.
pub fn order_descending<T: Real>(values: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order
}

/// Positions of the `count` servers with the largest `f/c`, strongest first.
pub fn strongest_servers<T: Real>(servers: &[MecProfile<T>], count: usize) -> Vec<usize> {
    let power: Vec<T> = servers.iter().map(MecProfile::compute_power).collect();
    let mut order = order_descending(&power);
    order.truncate(count);
    order
}

/// Sensor and server groups of size `ε+1`; group `t` of sensors may only use
/// group `t` of servers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPlan {
    /// Sensor positions, each group in descending Gas order.
    pub sensor_groups: Vec<Vec<usize>>,
    /// Server positions, each group in descending `f/c` order.
    pub mec_groups: Vec<Vec<usize>>,
    /// The `N_K − N_I` weakest servers, never used.
    pub excluded: Vec<usize>,
    pub epsilon: usize,
}

impl GroupPlan {
    /// Number of groups `T = ⌈N_I/(ε+1)⌉`.
    pub fn group_count(&self) -> usize {
        self.sensor_groups.len()
    }
}

fn check_population<T: Real>(
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
) -> Result<()> {
    if sensors.is_empty() {
        return Err(invalid("sensors", "at least one sensor required"));
    }
    if servers.len() < sensors.len() {
        return Err(invalid(
            "servers",
            format!(
                "{} servers cannot serve {} sensors",
                servers.len(),
                sensors.len()
            ),
        ));
    }
    sensors.iter().try_for_each(SensorProfile::validate)?;
    servers.iter().try_for_each(MecProfile::validate)
}

fn check_rates<T: Real>(sensors: &[SensorProfile<T>], rates: &[T]) -> Result<()> {
    if rates.len() != sensors.len() {
        return Err(Error::LengthMismatch {
            left: rates.len(),
            right: sensors.len(),
        });
    }
    Ok(())
}

pub fn group<T: Real>(
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
    epsilon: usize,
) -> Result<GroupPlan> {
    check_population(sensors, servers)?;
    let gas: Vec<T> = sensors.iter().map(|s| s.gas).collect();
    let sensor_order = order_descending(&gas);
    let mut server_order = strongest_servers(servers, servers.len());
    let excluded = server_order.split_off(sensors.len());
    let size = epsilon.saturating_add(1);
    Ok(GroupPlan {
        sensor_groups: sensor_order.chunks(size).map(<[usize]>::to_vec).collect(),
        mec_groups: server_order.chunks(size).map(<[usize]>::to_vec).collect(),
        excluded,
        epsilon,
    })
}

fn energy_matrix<T: Real>(
    rows: &[usize],
    cols: &[usize],
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
    rates: &[T],
    bandwidth: T,
) -> Result<Vec<Vec<T>>> {
    rows.iter()
        .map(|&i| {
            cols.iter()
                .map(|&k| energy(&sensors[i], &servers[k], rates[i], bandwidth))
                .collect()
        })
        .collect()
}

fn match_block<T: Real>(
    rows: &[usize],
    cols: &[usize],
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
    rates: &[T],
    bandwidth: T,
) -> Result<Vec<(usize, usize)>> {
    let cost = energy_matrix(rows, cols, sensors, servers, rates, bandwidth)?;
    let local = km_assign(&cost)?;
    Ok(local
        .pairs()
        .iter()
        .map(|&(r, c)| (rows[r], cols[c]))
        .collect())
}

/// Minimum-energy matching inside each Gas group.
///
/// Every pair satisfies `O_i ≤ ε` by construction.
pub fn allocate_gas_oriented<T: Real>(
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
    epsilon: usize,
    rates: &[T],
    bandwidth: T,
) -> Result<Assignment> {
    check_rates(sensors, rates)?;
    let plan = group(sensors, servers, epsilon)?;
    let blocks: Vec<Vec<(usize, usize)>> = plan
        .sensor_groups
        .par_iter()
        .zip(plan.mec_groups.par_iter())
        .map(|(rows, cols)| match_block(rows, cols, sensors, servers, rates, bandwidth))
        .collect::<Result<_>>()?;
    Ok(Assignment::from_pairs(blocks.into_iter().flatten()))
}

/// Globally minimal energy over all servers, ignoring Gas.
pub fn allocate_ecm<T: Real>(
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
    rates: &[T],
    bandwidth: T,
) -> Result<Assignment> {
    let all: Vec<usize> = (0..servers.len()).collect();
    allocate_ecm_among(sensors, servers, &all, rates, bandwidth)
}

/// Globally minimal energy restricted to the server positions in `candidates`.
pub fn allocate_ecm_among<T: Real>(
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
    candidates: &[usize],
    rates: &[T],
    bandwidth: T,
) -> Result<Assignment> {
    check_population(sensors, servers)?;
    check_rates(sensors, rates)?;
    if let Some(&bad) = candidates.iter().find(|&&k| k >= servers.len()) {
        return Err(invalid(
            "candidates",
            format!("server position {bad} out of range"),
        ));
    }
    let rows: Vec<usize> = (0..sensors.len()).collect();
    Ok(Assignment::from_pairs(match_block(
        &rows, candidates, sensors, servers, rates, bandwidth,
    )?))
}

/// Rank matching: the `r`-th highest bidder gets the `r`-th strongest server.
pub fn allocate_bidding<T: Real>(
    sensors: &[SensorProfile<T>],
    servers: &[MecProfile<T>],
) -> Result<Assignment> {
    check_population(sensors, servers)?;
    let gas: Vec<T> = sensors.iter().map(|s| s.gas).collect();
    let strongest = strongest_servers(servers, sensors.len());
    Ok(Assignment::from_pairs(
        order_descending(&gas).into_iter().zip(strongest),
    ))
}
