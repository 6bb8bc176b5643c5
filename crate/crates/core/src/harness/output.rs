//! CSV emission. Column sets are fixed per subcommand:
//!
//! | subcommand      | columns                                         |
//! |-----------------|-------------------------------------------------|
//! | `secrecy-sweep` | `N,scheme,rate_bits_per_s_per_hz,std_err`       |
//! | `energy-sweep`  | `bandwidth_hz,scheme,total_energy_joules`       |
//! | `satisfaction`  | `scheme,sensor_label,probability`               |
//! | `offload-demo`  | `sensor,server,rate_bits_per_s_per_hz,unsatisfaction,satisfied` |
//! | `validate`      | `check,N,value,reference,rel_err,tolerance,pass,expected` |
//!
//! Floats use Rust's shortest round-trip formatting.

use std::io::Write;

use super::demo::DemoOutcome;
use super::experiments::{SatisfactionReport, SweepResult, ValidationReport};
use crate::error::Result;

pub const SECRECY_HEADER: [&str; 4] = ["N", "scheme", "rate_bits_per_s_per_hz", "std_err"];
pub const ENERGY_HEADER: [&str; 3] = ["bandwidth_hz", "scheme", "total_energy_joules"];
pub const SATISFACTION_HEADER: [&str; 3] = ["scheme", "sensor_label", "probability"];
pub const DEMO_HEADER: [&str; 5] = [
    "sensor",
    "server",
    "rate_bits_per_s_per_hz",
    "unsatisfaction",
    "satisfied",
];
pub const VALIDATION_HEADER: [&str; 8] = [
    "check",
    "N",
    "value",
    "reference",
    "rel_err",
    "tolerance",
    "pass",
    "expected",
];

pub fn write_secrecy_csv<W: Write>(out: W, sweep: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SECRECY_HEADER)?;
    for r in &sweep.rows {
        w.write_record([
            (r.x as usize).to_string(),
            r.scheme.to_string(),
            r.value.to_string(),
            r.std_err.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_energy_csv<W: Write>(out: W, sweep: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ENERGY_HEADER)?;
    for r in &sweep.rows {
        w.write_record([r.x.to_string(), r.scheme.to_string(), r.value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_satisfaction_csv<W: Write>(out: W, report: &SatisfactionReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SATISFACTION_HEADER)?;
    for r in &report.rows {
        w.write_record([
            r.scheme,
            r.sensor_label.as_str(),
            r.probability.to_string().as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_demo_csv<W: Write>(out: W, demo: &DemoOutcome) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DEMO_HEADER)?;
    for o in &demo.evaluation.outcomes {
        w.write_record([
            o.sensor.to_string(),
            o.server.to_string(),
            demo.rates[o.sensor].to_string(),
            o.unsatisfaction.to_string(),
            o.satisfied.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_validation_csv<W: Write>(out: W, report: &ValidationReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VALIDATION_HEADER)?;
    for c in &report.checks {
        w.write_record([
            c.name.clone(),
            c.elements.to_string(),
            c.value.to_string(),
            c.reference.to_string(),
            c.rel_err.to_string(),
            c.tolerance.to_string(),
            c.pass.to_string(),
            c.expected.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
