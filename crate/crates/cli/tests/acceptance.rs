//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use std::fs;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use secure_offload::analytics::{
    aligned_amplitude_mean, ergodic_secrecy_breakdown, legit_gamma_params, mc_ergodic_secrecy_rate,
    trial_rng, GammaVariant, SecrecyClamp,
};
use secure_offload::channel::{sample_channel, PhaseShift};
use secure_offload::harness::{
    energy_gaps, run_energy_sweep, run_offload_demo, run_satisfaction, run_secrecy_sweep,
    Allocations, Scenario, BEAMFORMING, BIDDING, ECM, GAS_ORIENTED, SCHEMES, THEORY,
};
use secure_offload::ledger::{Ledger, TraceKind};
use secure_offload::offload::{allocate_ecm_among, km_assign, strongest_servers};

// Pinned tolerances.
const CAPACITY_REL_TOL: f64 = 0.03;
const MC_TRIALS: usize = 100_000;
const C1_BUDGET: Duration = Duration::from_secs(30);
const C2_MEAN_VIOLATION: f64 = 0.01;
const PHASE_REL_TOL: f64 = 1e-9;
const PHASE_REALIZATIONS: u64 = 1000;
const PHASE_PERTURBATIONS: usize = 100;
const PHASE_ELEMENTS: usize = 16;
const KM_INSTANCES: u64 = 100;
const KM_REL_TOL: f64 = 1e-12;
const C5_BUDGET: Duration = Duration::from_secs(5);
const SATISFACTION_DRAWS: usize = 1000;
const ENERGY_REL_SLACK: f64 = 1e-12;
const DEGENERATE_SCENARIOS: u64 = 100;
const SEED: u64 = 2022;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn default_budget(s: &Scenario) -> secure_offload::LinkBudget64 {
    s.geometry(s.secrecy.distance_m, s.secrecy.eve_distance_m)
        .budget()
        .unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Outcome {
    let s = Scenario::default();
    let budget = default_budget(&s);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in [8usize, 32, 64] {
        let theory = ergodic_secrecy_breakdown(n, &budget, GammaVariant::MomentMatched).unwrap();
        let mc = mc_ergodic_secrecy_rate(
            SEED + n as u64,
            MC_TRIALS,
            n,
            &budget,
            SecrecyClamp::ErgodicMean,
        )
        .unwrap();
        let e = rel(theory.eve, mc.eve.value);
        worst = worst.max(e);
        ensure(e <= CAPACITY_REL_TOL, || {
            format!(
                "N={n}: E[C_w] theory {} vs MC {} ({e:.4})",
                theory.eve, mc.eve.value
            )
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < C1_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("worst rel err {worst:.4}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let s = Scenario::default();
    let budget = default_budget(&s);
    let mut worst: f64 = 0.0;
    for n in [16usize, 32, 64] {
        let theory = ergodic_secrecy_breakdown(n, &budget, GammaVariant::MomentMatched).unwrap();
        let mc = mc_ergodic_secrecy_rate(
            SEED + 1000 + n as u64,
            MC_TRIALS,
            n,
            &budget,
            SecrecyClamp::ErgodicMean,
        )
        .unwrap();
        let e = rel(theory.legit, mc.legit.value);
        worst = worst.max(e);
        ensure(e <= CAPACITY_REL_TOL, || {
            format!(
                "N={n}: E[C_m] theory {} vs MC {} ({e:.4})",
                theory.legit, mc.legit.value
            )
        })?;
    }
    let mut least_violation = f64::INFINITY;
    for n in 2..=128usize {
        let target = aligned_amplitude_mean::<f64>(n);
        let matched = legit_gamma_params::<f64>(n, GammaVariant::MomentMatched).unwrap();
        ensure(rel(matched.mean(), target) < 1e-12, || {
            format!("moment-matched mean identity broken at N={n}")
        })?;
        let unscaled = legit_gamma_params::<f64>(n, GammaVariant::ScaleWithoutN).unwrap();
        let v = rel(unscaled.mean(), target);
        least_violation = least_violation.min(v);
        ensure(v > C2_MEAN_VIOLATION, || {
            format!("scale-without-N fit satisfies mean identity at N={n}")
        })?;
    }
    Ok(format!(
        "worst rel err {worst:.4}; scale-without-N fit off by >= {:.1}% for N in 2..=128",
        least_violation * 100.0
    ))
}

fn criterion_3() -> Outcome {
    let mut s = Scenario::default();
    s.simulation.trials = MC_TRIALS;
    let sweep = run_secrecy_sweep(&s).unwrap();
    let irs = sweep.series(THEORY);
    let bf = sweep.series(BEAMFORMING);
    ensure(irs.len() == 6 && bf.len() == 6, || {
        "missing sweep points".into()
    })?;
    for w in irs.windows(2) {
        ensure(w[1].1 > w[0].1, || {
            format!("R* not increasing: {:?} -> {:?}", w[0], w[1])
        })?;
    }
    for ((n, r), (_, b)) in irs.iter().zip(&bf) {
        ensure(b < r, || {
            format!("beamforming {b} not below IRS {r} at N={n}")
        })?;
    }
    let fmt = |v: &[(f64, f64)]| {
        v.iter()
            .map(|(_, r)| format!("{r:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok(format!("IRS [{}] beamforming [{}]", fmt(&irs), fmt(&bf)))
}

fn criterion_4() -> Outcome {
    let mut worst_gap: f64 = 0.0;
    let mut worst_excess = f64::NEG_INFINITY;
    for r in 0..PHASE_REALIZATIONS {
        let mut rng = trial_rng(SEED, r);
        let ch = sample_channel::<f64, _>(&mut rng, PHASE_ELEMENTS).unwrap();
        let opt = ch.optimal_phase().unwrap();
        let best = ch.legit_gain(&opt).unwrap().norm();
        let gap = rel(best, ch.aligned_amplitude());
        worst_gap = worst_gap.max(gap);
        ensure(gap <= PHASE_REL_TOL, || {
            format!("realization {r}: |gain| off aligned amplitude by {gap:e}")
        })?;
        for p in 0..PHASE_PERTURBATIONS {
            // magnitudes from 1e-6 rad to π
            let scale =
                std::f64::consts::PI * 10f64.powf(-6.0 * p as f64 / PHASE_PERTURBATIONS as f64);
            let moved = PhaseShift::wrapped(
                opt.angles()
                    .iter()
                    .map(|t| t + scale * rng.random_range(-1.0..1.0)),
            );
            let g = ch.legit_gain(&moved).unwrap().norm();
            worst_excess = worst_excess.max((g - best) / best);
            ensure(g <= best * (1.0 + 1e-12), || {
                format!("realization {r}: perturbation beat optimum ({g} > {best})")
            })?;
        }
    }
    Ok(format!(
        "max rel gap {worst_gap:.1e}; max perturbed excess {worst_excess:.1e}"
    ))
}

fn brute_force(cost: &[Vec<f64>]) -> f64 {
    fn go(row: usize, used: &mut [bool], cost: &[Vec<f64>]) -> f64 {
        if row == cost.len() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                best = best.min(cost[row][k] + go(row + 1, used, cost));
                used[k] = false;
            }
        }
        best
    }
    go(0, &mut vec![false; cost.len()], cost)
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    for n in 3..=7usize {
        for i in 0..KM_INSTANCES {
            let mut rng = trial_rng(SEED + n as u64, i);
            let cost: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..n).map(|_| rng.random_range(0.0..100.0)).collect())
                .collect();
            let a = km_assign(&cost).unwrap();
            let (got, want) = (a.cost(&cost), brute_force(&cost));
            ensure(a.is_one_to_one() && a.len() == n, || {
                format!("size {n} instance {i}: not a perfect matching")
            })?;
            ensure(rel(got, want) <= KM_REL_TOL, || {
                format!("size {n} instance {i}: KM {got} vs brute force {want}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < C5_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("500 instances, {elapsed:.2?}"))
}

fn criterion_6() -> Outcome {
    let mut s = Scenario::default();
    s.simulation.draws = SATISFACTION_DRAWS;
    ensure(
        s.network.sensors == 40 && s.network.servers == 40 && s.network.epsilon == 9,
        || "defaults changed".into(),
    )?;
    let r = run_satisfaction(&s).unwrap();
    for scheme in [GAS_ORIENTED, BIDDING] {
        for row in r.rows.iter().filter(|x| x.scheme == scheme) {
            ensure(row.probability == 1.0, || {
                format!("{scheme} {}: {}", row.sensor_label, row.probability)
            })?;
        }
    }
    let ecm = r.probability(ECM, "all").unwrap();
    ensure(ecm < 1.0, || format!("ECM reached {ecm}"))?;
    let tracked: Vec<String> = r
        .rows
        .iter()
        .filter(|x| x.scheme == ECM && x.sensor_label != "all")
        .map(|x| format!("{}={}", x.sensor_label, x.probability))
        .collect();
    Ok(format!(
        "gas-oriented 1, bidding 1, ECM {ecm:.4} ({})",
        tracked.join(" ")
    ))
}

fn criterion_7() -> Outcome {
    let s = Scenario::default();
    let sweep = run_energy_sweep(&s).unwrap();
    for &b in &s.energy.bandwidth_hz {
        let [g, e, bid] = [GAS_ORIENTED, ECM, BIDDING].map(|k| sweep.value(b, k).unwrap());
        ensure(e <= g && g <= bid, || {
            format!("B={b}: ECM {e}, gas {g}, bidding {bid}")
        })?;
    }
    for scheme in SCHEMES {
        for w in sweep.series(scheme).windows(2) {
            ensure(w[1].1 <= w[0].1 * (1.0 + ENERGY_REL_SLACK), || {
                format!("{scheme} energy rises from B={} to B={}", w[0].0, w[1].0)
            })?;
        }
    }
    let gaps = energy_gaps(&sweep);
    ensure(gaps.iter().all(|(_, g)| *g >= 0.0), || {
        "negative gap".into()
    })?;
    let (lo, hi) = gaps.iter().fold((f64::INFINITY, 0.0f64), |(l, h), (_, g)| {
        (l.min(*g), h.max(*g))
    });
    Ok(format!(
        "gas-vs-ECM gap {:.2}%..{:.2}%",
        lo * 100.0,
        hi * 100.0
    ))
}

fn criterion_8() -> Outcome {
    let b = 1e6;
    for servers in [40usize, 46] {
        let mut s = Scenario::default();
        s.network.servers = servers;
        for d in 0..DEGENERATE_SCENARIOS {
            let pop = s.draw_population(d);
            let rates = s.sensor_rates(&pop, d).unwrap();
            let n_i = pop.sensors.len();
            s.network.epsilon = 0;
            let zero = Allocations::compute(&s, &pop, &rates, b).unwrap();
            ensure(zero.gas_oriented == zero.bidding, || {
                format!("draw {d}: eps=0 differs from bidding")
            })?;
            s.network.epsilon = n_i - 1;
            let full = Allocations::compute(&s, &pop, &rates, b).unwrap();
            let strongest = strongest_servers(&pop.servers, n_i);
            let ecm =
                allocate_ecm_among(&pop.sensors, &pop.servers, &strongest, &rates, b).unwrap();
            ensure(full.gas_oriented == ecm, || {
                format!("draw {d}: eps=N_I-1 differs from restricted ECM")
            })?;
        }
    }
    Ok(format!(
        "{} scenarios at N_K=40 and N_K=46",
        DEGENERATE_SCENARIOS
    ))
}

/// Applies `f` to every hex string and number leaf, one at a time.
fn for_each_mutation(v: &serde_json::Value, f: &mut dyn FnMut(serde_json::Value)) {
    fn walk(
        root: &serde_json::Value,
        path: &mut Vec<PathStep>,
        node: &serde_json::Value,
        f: &mut dyn FnMut(serde_json::Value),
    ) {
        match node {
            serde_json::Value::Object(m) => {
                for (k, child) in m {
                    path.push(PathStep::Key(k.clone()));
                    walk(root, path, child, f);
                    path.pop();
                }
            }
            serde_json::Value::Array(a) => {
                for (i, child) in a.iter().enumerate() {
                    path.push(PathStep::Index(i));
                    walk(root, path, child, f);
                    path.pop();
                }
            }
            serde_json::Value::String(s)
                if !s.is_empty() && s.bytes().all(|c| c.is_ascii_hexdigit()) =>
            {
                for pos in 0..s.len() {
                    let mut bytes = s.clone().into_bytes();
                    bytes[pos] = if bytes[pos] == b'0' { b'1' } else { b'0' };
                    let mut copy = root.clone();
                    *locate(&mut copy, path) =
                        serde_json::Value::String(String::from_utf8(bytes).unwrap());
                    f(copy);
                }
            }
            serde_json::Value::Number(n) => {
                let mut copy = root.clone();
                let bumped = if let Some(u) = n.as_u64() {
                    serde_json::json!(u + 1)
                } else {
                    serde_json::json!(n.as_f64().unwrap() * (1.0 + 1e-9))
                };
                *locate(&mut copy, path) = bumped;
                f(copy);
            }
            _ => {}
        }
    }
    enum PathStep {
        Key(String),
        Index(usize),
    }
    fn locate<'a>(v: &'a mut serde_json::Value, path: &[PathStep]) -> &'a mut serde_json::Value {
        path.iter().fold(v, |node, step| match step {
            PathStep::Key(k) => node.get_mut(k).unwrap(),
            PathStep::Index(i) => node.get_mut(*i).unwrap(),
        })
    }
    walk(v, &mut Vec::new(), v, f);
}

fn criterion_9() -> Outcome {
    let full = run_offload_demo(&Scenario::default()).map_err(|e| e.to_string())?;
    full.ledger.verify_chain().map_err(|v| v.to_string())?;
    let mut exported = Vec::new();
    full.ledger.export_jsonl(&mut exported).unwrap();
    Ledger::import_jsonl(BufReader::new(exported.as_slice()))
        .map_err(|e| e.to_string())?
        .verify_chain()
        .map_err(|v| format!("re-imported chain: {v}"))?;
    for task in 0..40u64 {
        let trace = full.ledger.trace_task(task);
        let published = trace
            .iter()
            .find(|e| e.kind == TraceKind::Published)
            .map(|e| e.height);
        let recorded = trace
            .iter()
            .find(|e| e.kind == TraceKind::ResultRecorded)
            .map(|e| e.height);
        match (published, recorded) {
            (Some(p), Some(r)) => {
                ensure(r > p, || format!("task {task}: result at {r}, task at {p}"))?
            }
            _ => return Err(format!("task {task}: incomplete trace")),
        }
    }

    let mut small = Scenario::default();
    small.network.sensors = 3;
    small.network.servers = 4;
    small.network.epsilon = 1;
    let demo = run_offload_demo(&small).map_err(|e| e.to_string())?;
    let mut export = Vec::new();
    demo.ledger.export_jsonl(&mut export).unwrap();
    let lines: Vec<serde_json::Value> = String::from_utf8(export)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let (mut tried, mut missed) = (0usize, Vec::new());
    for (i, line) in lines.iter().enumerate() {
        for_each_mutation(line, &mut |mutated| {
            tried += 1;
            let text: String = lines
                .iter()
                .enumerate()
                .map(|(j, l)| if j == i { mutated.to_string() } else { l.to_string() } + "\n")
                .collect();
            let detected = match Ledger::import_jsonl(BufReader::new(text.as_bytes())) {
                Err(_) => true,
                Ok(l) => l.verify_chain().is_err(),
            };
            if !detected {
                missed.push(format!("block {i}: {mutated}"));
            }
        });
    }
    ensure(missed.is_empty(), || {
        format!("{} undetected tampers, first {}", missed.len(), missed[0])
    })?;
    Ok(format!(
        "40-task chain verified; {tried}/{tried} single-field tampers detected"
    ))
}

fn run_cli(dir: &Path, config: &Path, sub: &str, threads: usize) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_secure-offload"))
        .args([sub, "--config"])
        .arg(config)
        .args(["--seed", "7", "--threads", &threads.to_string(), "--out"])
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    // validate exits 2 when a check misbehaves; output is still written
    match status.status.code() {
        Some(0) | Some(2) => Ok(()),
        _ => Err(format!(
            "{sub} failed: {}",
            String::from_utf8_lossy(&status.stderr)
        )),
    }
}

fn criterion_10() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("scenario.toml");
    fs::write(
        &config,
        "[network]\nsensors = 12\nservers = 14\nepsilon = 3\n\n[secrecy]\nirs_elements = [4, 16]\n\n\
         [energy]\nbandwidth_hz = [1.0e5, 1.0e6]\n\n[simulation]\ntrials = 4000\ndraws = 20\ntracked_sensors = [1, 12]\n",
    )
    .unwrap();
    let outputs = [
        ("secrecy-sweep", vec!["secrecy_sweep.csv"]),
        ("energy-sweep", vec!["energy_sweep.csv"]),
        ("satisfaction", vec!["satisfaction.csv"]),
        ("offload-demo", vec!["offload_demo.csv", "ledger.jsonl"]),
        ("validate", vec!["validation.csv"]),
    ];
    let mut compared = 0;
    for (sub, files) in outputs {
        let runs: Vec<_> = [1usize, 4, 1]
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let dir = tmp.path().join(format!("{sub}-{i}"));
                run_cli(&dir, &config, sub, t).map(|_| dir)
            })
            .collect::<Result<_, _>>()?;
        for f in files {
            let first = fs::read(runs[0].join(f)).map_err(|e| format!("{sub}/{f}: {e}"))?;
            for other in &runs[1..] {
                ensure(fs::read(other.join(f)).unwrap() == first, || {
                    format!("{sub}/{f} differs across runs")
                })?;
            }
            compared += 1;
        }
    }
    Ok(format!(
        "{compared} outputs bit-identical at 1 and 4 threads"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            1,
            "eavesdropper capacity closed form vs Monte Carlo",
            criterion_1,
        ),
        (
            2,
            "legitimate capacity closed form vs Monte Carlo",
            criterion_2,
        ),
        (
            3,
            "secrecy rate trend and beamforming baseline",
            criterion_3,
        ),
        (4, "phase optimality", criterion_4),
        (5, "KM against brute force", criterion_5),
        (6, "satisfaction guarantee", criterion_6),
        (7, "energy ordering and gap", criterion_7),
        (8, "degenerate thresholds", criterion_8),
        (9, "ledger integrity", criterion_9),
        (10, "CLI determinism across thread counts", criterion_10),
    ];
    let mut failures = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                failures += 1;
                println!("criterion {id:>2} FAIL  {name} ({secs:.1}s): {why}");
            }
        }
    }
    println!("acceptance: {}/10 passed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
