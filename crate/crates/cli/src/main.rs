use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use secure_offload::harness::{
    energy_gaps, run_energy_sweep, run_offload_demo, run_satisfaction, run_secrecy_sweep,
    validate_theory, write_demo_csv, write_energy_csv, write_satisfaction_csv, write_secrecy_csv,
    write_validation_csv, Scenario,
};

/// Secure IRS-assisted offloading experiments.
#[derive(Parser, Debug)]
#[command(name = "secure-offload", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ergodic secrecy rate against IRS size: closed form, Monte Carlo, beamforming.
    SecrecySweep(Common),
    /// Total allocation energy against bandwidth for every allocator.
    EnergySweep(Common),
    /// Satisfaction probability per allocator and tracked sensor.
    Satisfaction(Common),
    /// One offloading round recorded on the ledger.
    OffloadDemo(Common),
    /// Closed form against Monte Carlo; non-zero exit if any check misbehaves.
    Validate(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Scenario file (TOML); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `simulation.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `simulation.trials` (Monte Carlo runs per point).
    #[arg(long)]
    trials: Option<usize>,
    /// Overrides `simulation.draws` (random populations per point).
    #[arg(long)]
    draws: Option<usize>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        let mut s = match &self.config {
            Some(p) => Scenario::load(p).with_context(|| format!("loading {}", p.display()))?,
            None => Scenario::default(),
        };
        if let Some(seed) = self.seed {
            s.simulation.seed = seed;
        }
        if let Some(t) = self.trials {
            s.simulation.trials = t;
        }
        if let Some(d) = self.draws {
            s.simulation.draws = d;
        }
        s.validate()?;
        Ok(s)
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))?;
        let path = self.out.join(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(f))
    }
}

fn announce(dir: &Path, name: &str) {
    println!("wrote {}", dir.join(name).display());
}

fn run(command: &Command, common: &Common) -> Result<bool> {
    let scenario = common.scenario()?;
    let dir = &common.out;
    match command {
        Command::SecrecySweep(_) => {
            let r = run_secrecy_sweep(&scenario)?;
            write_secrecy_csv(common.create("secrecy_sweep.csv")?, &r)?;
            announce(dir, "secrecy_sweep.csv");
        }
        Command::EnergySweep(_) => {
            let r = run_energy_sweep(&scenario)?;
            write_energy_csv(common.create("energy_sweep.csv")?, &r)?;
            for (b, gap) in energy_gaps(&r) {
                println!("bandwidth_hz={b} gas_vs_ecm_gap={:.4}%", gap * 100.0);
            }
            announce(dir, "energy_sweep.csv");
        }
        Command::Satisfaction(_) => {
            let r = run_satisfaction(&scenario)?;
            write_satisfaction_csv(common.create("satisfaction.csv")?, &r)?;
            for row in r.rows.iter().filter(|r| r.sensor_label == "all") {
                println!("{} P(satisfied)={}", row.scheme, row.probability);
            }
            announce(dir, "satisfaction.csv");
        }
        Command::OffloadDemo(_) => {
            let demo = run_offload_demo(&scenario)?;
            write_demo_csv(common.create("offload_demo.csv")?, &demo)?;
            let mut ledger = common.create("ledger.jsonl")?;
            demo.ledger.export_jsonl(&mut ledger)?;
            ledger.flush()?;
            print!("{}", demo.report());
            announce(dir, "offload_demo.csv");
            announce(dir, "ledger.jsonl");
        }
        Command::Validate(_) => {
            let r = validate_theory(&scenario)?;
            write_validation_csv(common.create("validation.csv")?, &r)?;
            for c in &r.checks {
                let status = if c.as_expected() { "ok" } else { "UNEXPECTED" };
                println!(
                    "{status:>10} N={:<3} {:<36} rel_err={:.3e} tol={:.0e} pass={}",
                    c.elements, c.name, c.rel_err, c.tolerance, c.pass
                );
            }
            announce(dir, "validation.csv");
            return Ok(r.all_as_expected());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::SecrecySweep(c)
        | Command::EnergySweep(c)
        | Command::Satisfaction(c)
        | Command::OffloadDemo(c)
        | Command::Validate(c) => c.clone(),
    };
    let result = match common.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .context("building thread pool")
            .and_then(|pool| pool.install(|| run(&cli.command, &common))),
        None => run(&cli.command, &common),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
