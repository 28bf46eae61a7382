use std::path::Path;

use stvflow_core::experiments::{convergence_study, denoise, lemma_sweep, ConvergenceSetup};
use stvflow_core::{
    degenerate_increments, lumped_norm_sq, make_mesh, mc_svi, sample_increments, solve_path, Drift,
    EnergyParams, FEFunction, McOptions, NoisePlan, SchemeParams, SolverOptions, TestProcessSpec,
};

use crate::config::{DriftChoice, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{self, num, Csv};

fn scheme_params(cfg: &RunConfig) -> CliResult<SchemeParams> {
    let mesh = make_mesh(cfg.cells)?;
    let x0 = cfg.x0.build(mesh.clone(), cfg.projection, cfg.noise_amp, cfg.seed);
    let g = cfg.g.build(mesh, cfg.projection, cfg.noise_amp, cfg.seed);
    let energy = EnergyParams::new(cfg.epsilon, cfg.lambda, g)?;
    let solver = SolverOptions {
        tol: cfg.solver_tol,
        max_iter: cfg.max_newton,
    };
    Ok(SchemeParams::new(energy, cfg.tau, cfg.steps, x0, solver)?)
}

pub fn simulate(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate()?;
    let p = scheme_params(cfg)?;
    let increments = if cfg.deterministic {
        degenerate_increments(cfg.steps)
    } else {
        sample_increments(&NoisePlan::new(cfg.steps, cfg.tau, cfg.seed, 0)?)
    };
    let path = solve_path(&p, &increments)?;

    let mut csv = Csv::new(output::SIMULATE_SCHEMA, cfg);
    csv.row(["step", "time", "energy_reg", "lumped_norm_sq", "dW", "discrete_energy"]);
    for (i, state) in path.states.iter().enumerate() {
        let dw = if i == 0 { 0.0 } else { increments[i - 1] };
        csv.row([
            i.to_string(),
            num(i as f64 * cfg.tau),
            num(path.energies[i]),
            num(lumped_norm_sq(state)),
            num(dw),
            num(path.discrete_energies[i]),
        ]);
    }
    output::emit(cfg.out.as_deref(), &csv.into_string())?;

    if let Some(nodes) = &cfg.nodes_out {
        let mut csv = Csv::new(output::NODES_SCHEMA, cfg);
        let header = ["step".to_string(), "time".to_string()]
            .into_iter()
            .chain((0..=cfg.cells).map(|j| format!("x{j}")));
        csv.row(header);
        for (i, state) in path.states.iter().enumerate() {
            let fields = [i.to_string(), num(i as f64 * cfg.tau)]
                .into_iter()
                .chain(state.values().iter().map(|&v| num(v)));
            csv.row(fields);
        }
        output::emit(Some(nodes), &csv.into_string())?;
    }
    Ok(())
}

pub fn check_lemma(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate_lemma()?;
    let report = lemma_sweep(&cfg.lemma_cells, &cfg.lemma_epsilons, cfg.trials, cfg.seed)?;
    output::emit(cfg.out.as_deref(), &output::json_report(output::LEMMA_SCHEMA, cfg, &report))?;
    if report.pass {
        Ok(())
    } else {
        let worst = report
            .cells
            .iter()
            .map(|c| c.min_pairing)
            .fold(f64::INFINITY, f64::min);
        Err(CliError::Check(format!("pairing minimum {worst:e} below {:e}", report.threshold)))
    }
}

/// Drift rows: one line of `J + 1` comma separated nodal values per time
/// interval; blank lines and `#` comments are skipped.
pub fn read_drift_file(path: &Path, mesh: &std::sync::Arc<stvflow_core::Mesh1D>) -> CliResult<Vec<FEFunction>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), lineno + 1)))?;
        rows.push(FEFunction::new(mesh.clone(), values, true)?);
    }
    Ok(rows)
}

pub fn check_svi(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate_svi()?;
    let p = scheme_params(cfg)?;
    let z0 = cfg.z0.build(p.mesh.clone(), cfg.projection, cfg.noise_amp, cfg.seed);
    let drift = match cfg.drift {
        DriftChoice::Zero => Drift::Zero,
        DriftChoice::Z0 => Drift::Constant(z0.clone()),
        DriftChoice::File => {
            let path = cfg.g_file.as_deref().expect("validated");
            Drift::Sequence(read_drift_file(path, &p.mesh)?)
        }
    };
    let spec = TestProcessSpec::new(z0, drift)?;
    let opts = McOptions {
        samples: cfg.samples,
        master_seed: cfg.seed,
        step_index: cfg.step_index.unwrap_or(cfg.steps),
        slack_c: cfg.slack_c,
        confidence: cfg.confidence,
        deterministic: cfg.deterministic,
        workers: cfg.workers,
    };
    let report = mc_svi(&p, &spec, &opts)?;
    output::emit(cfg.out.as_deref(), &output::json_report(output::SVI_SCHEMA, cfg, &report))?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "gap {:e} below threshold {:e}",
            report.terms.gap.mean, report.threshold
        )))
    }
}

pub fn converge(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate_converge()?;
    let setup = ConvergenceSetup {
        cells: cfg.cells,
        steps: cfg.steps,
        tau: cfg.tau,
        epsilon: cfg.epsilon,
        lambda: cfg.lambda,
        x0: cfg.x0,
        g: cfg.g,
        projection: cfg.projection,
        noise_amplitude: cfg.noise_amp,
        seed: cfg.seed,
        deterministic: cfg.deterministic,
        mode: cfg.mode,
        levels: cfg.levels,
        metric: cfg.metric,
    };
    let table = convergence_study(&setup)?;
    let mut csv = Csv::new(output::CONVERGE_SCHEMA, cfg);
    csv.row(["level", "h", "tau", "epsilon", "error", "rate"]);
    for r in &table.rows {
        csv.row([
            r.level.to_string(),
            num(r.h),
            num(r.tau),
            num(r.epsilon),
            num(r.error),
            r.rate.map(num).unwrap_or_default(),
        ]);
    }
    output::emit(cfg.out.as_deref(), &csv.into_string())?;
    if let Some(min) = cfg.min_rate {
        if let Some(bad) = table.rates().into_iter().find(|r| r.is_nan() || *r < min) {
            return Err(CliError::Check(format!("observed rate {bad:.3} below {min}")));
        }
    }
    Ok(())
}

pub fn run_denoise(cfg: &RunConfig) -> CliResult<()> {
    cfg.validate_denoise()?;
    let p = scheme_params(cfg)?;
    let outcome = denoise(&p, cfg.stationary_tol, cfg.max_steps)?;
    let summary = outcome.summary();
    let mut csv = Csv::new(output::DENOISE_SCHEMA, cfg);
    csv.comment("summary", serde_json::to_string(&summary).expect("summary serializes"));
    csv.row(["node", "x", "g", "final", "oracle"]);
    let columns = p
        .mesh
        .nodes()
        .iter()
        .zip(p.g_h().values())
        .zip(outcome.final_state.values())
        .zip(outcome.oracle_state.values());
    for (j, (((x, g), fin), oracle)) in columns.enumerate() {
        csv.row([j.to_string(), num(*x), num(*g), num(*fin), num(*oracle)]);
    }
    output::emit(cfg.out.as_deref(), &csv.into_string())?;
    if summary.pass {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "terminal energy differs from the minimum by {:e}",
            summary.energy_difference
        )))
    }
}
