//! `sphere-gas minimize`: multi-start minimization for one n, committing the
//! result to the ledger.

use crate::config::{self, MinimizeConfig};
use crate::output::{config_echo, ensure_dir, out_file, write_json};
use crate::CliError;
use rayon::prelude::*;
use serde::Serialize;
use sphere_gas::energy::Configuration;
use sphere_gas::minimize::{
    estimate_min, Ledger, LedgerSource, MinimizeParams, MinimumLedgerEntry,
};
use sphere_gas::samplers::{chain_seed, mcmc_coulomb, GibbsParams};
use sphere_gas::SCHEMA_VERSION;
use std::io::Write;
use std::path::Path;

#[derive(Serialize)]
struct MinimizeSummary {
    schema_version: u32,
    command: &'static str,
    config: MinimizeConfig,
    energy: f64,
    grad_inf_norm: f64,
    iterations: usize,
    converged: bool,
    stalled: bool,
    separation: SeparationSummary,
    ledger_path: String,
    ledger_improved: bool,
    entry: MinimumLedgerEntry,
}

#[derive(Serialize)]
struct SeparationSummary {
    min_separation: f64,
    bound: f64,
    pass: bool,
}

fn build_params(config: &MinimizeConfig) -> Result<MinimizeParams, CliError> {
    let mut params = MinimizeParams::default_for(config.n);
    if let Some(v) = config.restarts {
        params.restarts = v;
    }
    if let Some(v) = config.max_iters {
        params.max_iters = v;
    }
    if let Some(v) = config.grad_tol {
        params.grad_tol = v;
    }
    if let Some(v) = config.initial_step {
        params.initial_step = v;
    }
    if let Some(v) = config.backtrack_factor {
        params.backtrack_factor = v;
    }
    if let Some(v) = config.armijo_c {
        params.armijo_c = v;
    }
    params.seed = config.seed;
    params.validate()?;
    Ok(params)
}

fn warm_starts(config: &MinimizeConfig) -> Result<Vec<Configuration>, CliError> {
    if config.warm_chains == 0 {
        return Ok(Vec::new());
    }
    let steps = config.warm_chain_steps.unwrap_or(100_000);
    let params = GibbsParams::annealed(config.n, config.n as f64, steps, config.seed ^ 0x5eed);
    let runs: Vec<(Configuration, _)> = (0..config.warm_chains)
        .into_par_iter()
        .map(|i| {
            let mut p = params.clone();
            p.seed = chain_seed(params.seed, i as u64);
            mcmc_coulomb(&p)
        })
        .collect::<Result<_, _>>()?;
    Ok(runs.into_iter().map(|(c, _)| c).collect())
}

pub fn run(
    config_path: &Path,
    out: &Path,
    seed_override: Option<u64>,
    ledger_path: &Path,
) -> Result<i32, CliError> {
    let mut config: MinimizeConfig = config::load(config_path)?;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    ensure_dir(out)?;

    let params = build_params(&config)?;
    let warm = warm_starts(&config)?;
    let mut ledger = Ledger::open(ledger_path)?;
    let outcome = estimate_min(
        config.n,
        &params,
        &warm,
        LedgerSource::McmcRefined,
        &mut ledger,
    )?;

    // Point coordinates of this run's best configuration.
    let mut csv = Vec::new();
    writeln!(csv, "# schema_version={SCHEMA_VERSION}").unwrap();
    writeln!(csv, "# config={}", config_echo(&config)).unwrap();
    writeln!(csv, "point_id,x,y,z").unwrap();
    for (i, p) in outcome.best.config.points().iter().enumerate() {
        writeln!(csv, "{i},{},{},{}", p.x(), p.y(), p.z()).unwrap();
    }
    std::fs::write(out_file(out, &format!("minimizer_n{}.csv", config.n)), csv)?;

    let summary = MinimizeSummary {
        schema_version: SCHEMA_VERSION,
        command: "minimize",
        config: config.clone(),
        energy: outcome.best.energy,
        grad_inf_norm: outcome.best.grad_inf_norm,
        iterations: outcome.best.iterations,
        converged: outcome.best.converged,
        stalled: outcome.best.stalled,
        separation: SeparationSummary {
            min_separation: outcome.separation.min_separation,
            bound: outcome.separation.bound,
            pass: outcome.separation.pass,
        },
        ledger_path: ledger_path.display().to_string(),
        ledger_improved: outcome.improved,
        entry: outcome.entry.clone(),
    };
    write_json(&out_file(out, "minimize_summary.json"), &summary)?;

    println!("n = {}", config.n);
    println!("energy = {:.9}", outcome.best.energy);
    println!("gradient inf-norm = {:.3e}", outcome.best.grad_inf_norm);
    println!(
        "separation = {:.6} (bound {:.6}): {}",
        outcome.separation.min_separation,
        outcome.separation.bound,
        if outcome.separation.pass {
            "pass"
        } else {
            "WARN"
        }
    );
    println!(
        "ledger {} = {:.9}{}",
        ledger_path.display(),
        outcome.entry.energy,
        if outcome.improved { " (improved)" } else { "" }
    );
    Ok(0)
}
