//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use stvflow_core::experiments::random_dirichlet;
use stvflow_core::noise::UniformStream;
use stvflow_core::stepper::step_functional_value;
use stvflow_core::*;

const BIN: &str = env!("CARGO_BIN_EXE_stvflow");

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn stvflow(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn random_mesh_size(stream: &UniformStream, k: u64, max_pow: u32) -> usize {
    1 << (1 + (stream.at(k) * max_pow as f64) as u32).min(max_pow)
}

fn lemma_sweep() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lemma.json");
    let start = Instant::now();
    let run = stvflow(&[
        "check-lemma",
        "--J-list", "2,4,8,16,32,64,128,256,512",
        "--epsilon-list", "1,0.1,0.01,0.0001",
        "--trials", "10000",
        "--seed", "2024",
        "--workers", "1",
        "--out", out.to_str().unwrap(),
    ]);
    let elapsed = start.elapsed();
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let cells = doc["report"]["cells"].as_array().unwrap();
    let min = cells
        .iter()
        .map(|c| c["min_pairing"].as_f64().unwrap())
        .fold(f64::INFINITY, f64::min);
    let enough = cells.len() == 36 && cells.iter().all(|c| c["trials"].as_u64().unwrap() >= 10_000);
    let canaries = cells.iter().all(|c| c["canary_pairing"].as_f64().unwrap() == 0.0);
    let pass = run.status.success()
        && enough
        && canaries
        && min >= -1e-12
        && elapsed <= Duration::from_secs(120);
    outcome(pass, format!("36 cells x 1e4 trials, min pairing {min:e}, {:.1}s", elapsed.as_secs_f64()))
}

fn pairing_equivalence() -> Outcome {
    let stream = UniformStream::new(11);
    let mut worst = 0.0f64;
    for k in 0..1000u64 {
        let mesh = make_mesh(random_mesh_size(&stream, 1_000_000 * k, 9)).unwrap();
        let eps = [1.0, 0.1, 0.01, 1e-4][k as usize % 4];
        let v = random_dirichlet(&mesh, &stream, 1_000_000 * k + 1, 10.0);
        let a = assembled_pairing(&v, eps).unwrap();
        let t = lemma_pairing(&v, eps);
        let rel = if t == 0.0 { a.abs() } else { ((a - t) / t).abs() };
        worst = worst.max(rel);
    }
    outcome(worst <= 1e-10, format!("1e3 instances, worst relative difference {worst:e}"))
}

fn norm_sandwich_and_lumping() -> Outcome {
    let stream = UniformStream::new(12);
    let (mut sandwich, mut identity) = (0.0f64, 0.0f64);
    for k in 0..1000u64 {
        let mesh = make_mesh(random_mesh_size(&stream, 1_000_000 * k, 9)).unwrap();
        let h = mesh.h();
        let u = random_dirichlet(&mesh, &stream, 1_000_000 * k + 1, 1.0);
        let v = random_dirichlet(&mesh, &stream, 1_000_000 * k + 600_000, 1.0);
        let l2 = l2_inner(&v, &v).unwrap().sqrt();
        let lumped = lumped_norm_sq(&v).sqrt();
        sandwich = sandwich.max(l2 - lumped).max(lumped - 3f64.sqrt() * l2);
        let du = gradient_cellwise(&u);
        let dv = gradient_cellwise(&v);
        let grad: f64 = du.values().iter().zip(dv.values()).map(|(a, b)| h * a * b).sum();
        let lhs = lumped_inner(&u, &v).unwrap() - l2_inner(&u, &v).unwrap();
        identity = identity.max((lhs - h * h / 6.0 * grad).abs());
    }
    outcome(
        sandwich <= 1e-12 && identity <= 1e-12,
        format!("1e3 pairs, sandwich excess {sandwich:e}, identity defect {identity:e}"),
    )
}

struct StepInstance {
    params: SchemeParams,
    prev: FEFunction,
    dw: f64,
}

/// J ≤ 64, ε ∈ [0.01, 1], λ ∈ {0, 1, 10}, τ ∈ [1e-4, 0.1].
fn step_instance(stream: &UniformStream, k: u64, steps: usize) -> StepInstance {
    let at = |i: u64| stream.at(10_000 * k + i);
    let cells = 2 + (at(0) * 63.0) as usize;
    let epsilon = 0.01 * 100f64.powf(at(1));
    let lambda = [0.0, 1.0, 10.0][(at(2) * 3.0) as usize % 3];
    let tau = 1e-4 * 1000f64.powf(at(3));
    let dw = tau.sqrt() * stream.normal_at(10_000 * k + 4);
    let mesh = make_mesh(cells).unwrap();
    let prev = random_dirichlet(&mesh, stream, 10_000 * k + 10, 5.0);
    let g = random_dirichlet(&mesh, stream, 10_000 * k + 5_000, 2.0);
    let energy = EnergyParams::new(epsilon, lambda, g).unwrap();
    let params = SchemeParams::new(energy, tau, steps, prev.clone(), SolverOptions::default()).unwrap();
    StepInstance { params, prev, dw }
}

fn step_oracle_equivalence() -> Outcome {
    let stream = UniformStream::new(13);
    let start = Instant::now();
    let (mut worst, mut optimality) = (0.0f64, f64::NEG_INFINITY);
    for k in 0..200 {
        let StepInstance { params, prev, dw } = step_instance(&stream, k, 1);
        let b = prev.scaled(1.0 + dw);
        let x = step(&prev, dw, &params).unwrap();
        let y = prox_oracle(&b, &params).unwrap();
        worst = worst.max(lumped_norm_sq(&x.axpby(1.0, &y, -1.0).unwrap()).sqrt());
        let fx = step_functional_value(&x, &b, &params).unwrap();
        let fy = step_functional_value(&y, &b, &params).unwrap();
        optimality = optimality.max(fx - fy).max(fy - fx);
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-8 && optimality <= 1e-10 && elapsed <= Duration::from_secs(300),
        format!(
            "200 instances, max |step - oracle|_h {worst:e}, max |F difference| {optimality:e}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn energy_decay() -> Outcome {
    let stream = UniformStream::new(14);
    let mut worst = f64::NEG_INFINITY;
    let mut checked = 0;
    for k in 0..50 {
        let StepInstance { params, .. } = step_instance(&stream, k, 30);
        let path = solve_path(&params, &degenerate_increments(params.steps)).unwrap();
        for i in 1..path.states.len() {
            let moved = lumped_norm_sq(&path.states[i].axpby(1.0, &path.states[i - 1], -1.0).unwrap());
            let excess = path.discrete_energies[i] + moved / (2.0 * params.tau) - path.discrete_energies[i - 1];
            worst = worst.max(excess);
            checked += 1;
        }
    }
    outcome(worst <= 1e-10, format!("50 runs, {checked} steps, max excess {worst:e}"))
}

fn epsilon_sandwich() -> Outcome {
    let stream = UniformStream::new(15);
    let grid = [1.0, 0.5, 0.1, 0.01, 1e-4];
    let mut worst = f64::NEG_INFINITY;
    for k in 0..1000u64 {
        let mesh = make_mesh(random_mesh_size(&stream, 1_000_000 * k, 9)).unwrap();
        let v = random_dirichlet(&mesh, &stream, 1_000_000 * k + 1, 1.0);
        let zero = FEFunction::zeros(mesh, true);
        for eps in grid {
            let p = EnergyParams::new(eps, 0.0, zero.clone()).unwrap();
            let tv = energy_tv(&v, &p).unwrap();
            let reg = energy_reg(&v, &p).unwrap();
            worst = worst.max(tv - reg).max(reg - tv - eps);
        }
    }
    outcome(worst <= 1e-12, format!("1e3 functions x 5 epsilons, max violation {worst:e}"))
}

fn svi_grid() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut cases = 0;
    for cells in [16, 32] {
        for steps in [32, 64] {
            for eps in [0.25, 0.1] {
                for lambda in [0.0, 1.0] {
                    let mesh = make_mesh(cells).unwrap();
                    let x0 = Profile::Step.build(mesh.clone(), Projection::Lumped, 0.0, 0);
                    let g = Profile::Hat.build(mesh.clone(), Projection::Lumped, 0.0, 0);
                    let energy = EnergyParams::new(eps, lambda, g).unwrap();
                    let p = SchemeParams::new(energy, 1.0 / steps as f64, steps, x0, SolverOptions::default())
                        .unwrap();
                    let sin = Profile::Sin.build(mesh.clone(), Projection::Lumped, 0.0, 0);
                    let specs = [
                        TestProcessSpec::new(FEFunction::zeros(mesh, true), Drift::Zero).unwrap(),
                        TestProcessSpec::new(sin.clone(), Drift::Zero).unwrap(),
                        TestProcessSpec::new(sin.clone(), Drift::Constant(sin)).unwrap(),
                    ];
                    let opts = McOptions {
                        samples: 10_000,
                        master_seed: 1,
                        step_index: steps,
                        workers: 8,
                        ..Default::default()
                    };
                    let reports = mc_svi_many(&p, &specs, &opts).unwrap();
                    for (z, r) in reports.iter().enumerate() {
                        cases += 1;
                        min_margin = min_margin.min(r.terms.gap.mean - r.threshold);
                        if !r.pass {
                            failures.push(format!("J={cells} N={steps} eps={eps} lambda={lambda} Z#{z}"));
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let pass = failures.is_empty() && elapsed <= Duration::from_secs(1200);
    outcome(
        pass,
        format!(
            "{cases} cases with M = 1e4, min gap - threshold {min_margin:.4}, {:.1}s{}",
            elapsed.as_secs_f64(),
            if failures.is_empty() { String::new() } else { format!(", failed: {}", failures.join("; ")) }
        ),
    )
}

/// `(error, rate)` columns of a converge CSV.
fn converge_table(args: &[&str], dir: &Path, name: &str) -> Option<Vec<(f64, Option<f64>)>> {
    let out = dir.join(name);
    let mut full = vec!["converge", "--out", out.to_str().unwrap()];
    full.extend_from_slice(args);
    if !stvflow(&full).status.success() {
        return None;
    }
    let text = std::fs::read_to_string(out).ok()?;
    let rows = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[4].parse().unwrap(), f[5].parse().ok())
        })
        .collect();
    Some(rows)
}

fn self_convergence() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let tau = converge_table(
        &[
            "--mode", "tau", "--levels", "6", "--deterministic", "--J", "32", "--N", "8", "--tau", "0.0125",
            "--x0", "sin", "--g", "zero", "--epsilon", "1", "--lambda", "1",
        ],
        dir.path(),
        "tau.csv",
    );
    let eps = converge_table(
        &[
            "--mode", "epsilon", "--levels", "6", "--J", "32", "--N", "32", "--tau", "0.003125", "--seed", "3",
            "--x0", "sin", "--g", "zero", "--epsilon", "0.5", "--lambda", "1",
        ],
        dir.path(),
        "eps.csv",
    );
    let (Some(tau), Some(eps)) = (tau, eps) else {
        return outcome(false, "converge command failed");
    };
    let rates: Vec<f64> = tau.iter().filter_map(|r| r.1).collect();
    let min_rate = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let errors: Vec<f64> = eps.iter().map(|r| r.0).collect();
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    outcome(
        rates.len() >= 4 && min_rate >= 0.9 && errors.len() >= 4 && monotone,
        format!(
            "tau: {} rates, min {min_rate:.3}; epsilon: {} errors, monotone {monotone}",
            rates.len(),
            errors.len()
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, workers: &str| -> Vec<u8> {
        let out = dir.path().join(name);
        let status = stvflow(&[
            "simulate", "--J", "32", "--N", "64", "--tau", "0.015625", "--epsilon", "0.1", "--lambda", "1",
            "--x0", "step", "--g", "hat", "--seed", "42", "--workers", workers, "--out", out.to_str().unwrap(),
        ])
        .status;
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("a.csv", "1");
    let b = run("b.csv", "1");
    let c = run("c.csv", "8");
    outcome(a == b && a == c && !a.is_empty(), format!("{} bytes, runs identical: {}", a.len(), a == b && a == c))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("lemma-sweep", lemma_sweep),
        ("pairing-equivalence", pairing_equivalence),
        ("norm-sandwich-and-lumping-identity", norm_sandwich_and_lumping),
        ("step-oracle-equivalence", step_oracle_equivalence),
        ("deterministic-energy-decay", energy_decay),
        ("epsilon-sandwich", epsilon_sandwich),
        ("svi-audit", svi_grid),
        ("self-convergence", self_convergence),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
