//! Scenario loading, experiment runners and CSV output.

mod demo;
mod experiments;
mod output;
mod scenario;

pub use demo::{run_offload_demo, DemoOutcome, DEMO_VALIDATORS};
pub use experiments::{
    energy_gaps, run_energy_sweep, run_satisfaction, run_secrecy_sweep, validate_theory,
    Allocations, Check, SatisfactionReport, SatisfactionRow, SweepResult, SweepRow,
    ValidationReport, BEAMFORMING, BIDDING, CAPACITY_TOLERANCE, ECM, GAS_ORIENTED, MONTE_CARLO,
    SCHEMES, THEORY, VALIDATION_ELEMENTS,
};
pub use output::{
    write_demo_csv, write_energy_csv, write_satisfaction_csv, write_secrecy_csv,
    write_validation_csv, DEMO_HEADER, ENERGY_HEADER, SATISFACTION_HEADER, SECRECY_HEADER,
    VALIDATION_HEADER,
};
pub use scenario::{
    Compute, EnergySweep, Network, Population, Radio, RateMode, Scenario, SecrecySweep, Simulation,
};
