//! End-to-end offloading round on the ledger: publish, seal, allocate,
//! record results, seal, verify.

use std::fmt::Write as _;

use super::experiments::derive_seed;
use super::scenario::{Population, Scenario};
use crate::analytics::trial_rng;
use crate::error::{Error, Result};
use crate::ledger::{Ledger, NodeIdentity, ResourceDescriptor, Role};
use crate::offload::{allocate_gas_oriented, evaluate, Assignment, Evaluation};

const DEMO_STREAM: u64 = 0xDE30;
/// Validators registered alongside sensors and servers.
pub const DEMO_VALIDATORS: usize = 3;

#[derive(Debug, Clone)]
pub struct DemoOutcome {
    pub ledger: Ledger,
    pub population: Population,
    pub rates: Vec<f64>,
    pub assignment: Assignment,
    pub evaluation: Evaluation<f64>,
}

impl DemoOutcome {
    /// Chain and energy summary; per-sensor detail goes through
    /// [`write_demo_csv`](super::write_demo_csv).
    pub fn report(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "blocks: {}", self.ledger.blocks().len());
        let _ = writeln!(s, "head: {}", hex::encode(self.ledger.head_digest().0));
        let _ = writeln!(s, "total_energy_joules: {}", self.evaluation.total_energy);
        let _ = writeln!(s, "all_satisfied: {}", self.evaluation.all_satisfied());
        s
    }
}

/// Runs one round on population draw 0 of `scenario`.
pub fn run_offload_demo(scenario: &Scenario) -> Result<DemoOutcome> {
    let mut rng = trial_rng(derive_seed(scenario.simulation.seed, DEMO_STREAM), 0);
    let population = scenario.draw_population(0);
    let rates = scenario.sensor_rates(&population, 0)?;
    let gas_price = scenario.compute.gas_price;
    let bandwidth = scenario.radio.bandwidth_hz;

    let sensors: Vec<NodeIdentity> = population
        .sensors
        .iter()
        .map(|_| NodeIdentity::generate(&mut rng, Role::Sensor))
        .collect();
    let servers: Vec<NodeIdentity> = population
        .servers
        .iter()
        .map(|_| NodeIdentity::generate(&mut rng, Role::Mec))
        .collect();
    let validators: Vec<NodeIdentity> = (0..DEMO_VALIDATORS)
        .map(|_| NodeIdentity::generate(&mut rng, Role::Validator))
        .collect();

    let mut ledger = Ledger::new();
    for node in sensors.iter().chain(&servers).chain(&validators) {
        ledger.register(node)?;
    }

    for (i, (node, profile)) in sensors.iter().zip(&population.sensors).enumerate() {
        let payload = format!("task {i} bits {}", profile.task_bits);
        ledger.publish_task(
            node,
            i as u64,
            payload.as_bytes(),
            profile.gas.round() as u64,
            gas_price,
        )?;
    }
    ledger.mine_block(&mut rng)?;

    let assignment = allocate_gas_oriented(
        &population.sensors,
        &population.servers,
        scenario.network.epsilon,
        &rates,
        bandwidth,
    )?;
    let evaluation = evaluate(
        &assignment,
        &population.sensors,
        &population.servers,
        &rates,
        bandwidth,
        scenario.network.epsilon,
    )?;

    for &(i, k) in assignment.pairs() {
        let server = &population.servers[k];
        let result = format!("result {i} on {k}");
        ledger.record_result(
            &servers[k],
            i as u64,
            result.as_bytes(),
            ResourceDescriptor {
                cpu_hz: server.cpu_hz,
                cycles_per_bit: server.cycles_per_bit,
            },
            population.sensors[i].gas.round() as u64,
            gas_price,
        )?;
    }
    ledger.mine_block(&mut rng)?;
    ledger
        .verify_chain()
        .map_err(|v| Error::Ledger(format!("demo chain failed verification: {v}")))?;

    Ok(DemoOutcome {
        ledger,
        population,
        rates,
        assignment,
        evaluation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::TraceKind;

    #[test]
    fn demo_round_is_consistent() {
        let mut s = Scenario::default();
        s.network.sensors = 6;
        s.network.servers = 8;
        s.network.epsilon = 2;
        let out = run_offload_demo(&s).unwrap();
        assert_eq!(out.ledger.blocks().len(), 2);
        assert_eq!(out.assignment.len(), 6);
        assert!(out.evaluation.all_satisfied());
        let trace = out.ledger.trace_task(3);
        assert_eq!(trace.len(), 2);
        assert_eq!(trace[0].kind, TraceKind::Published);
        assert_eq!(trace[1].kind, TraceKind::ResultRecorded);
        assert_eq!(out.report().lines().count(), 4);

        let again = run_offload_demo(&s).unwrap();
        assert_eq!(again.ledger.head_digest(), out.ledger.head_digest());
    }
}
