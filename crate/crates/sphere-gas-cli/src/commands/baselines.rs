//! `sphere-gas baselines`: run all four samplers at one n and tabulate mean
//! energies against the three closed forms.

use crate::config::{self, BaselinesConfig};
use crate::output::{config_echo, ensure_dir, mean_and_se, out_file, write_json};
use crate::CliError;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sphere_gas::energy::{
    log_energy, mean_energy_dpp, mean_energy_gaf, mean_energy_uniform, Configuration,
};
use sphere_gas::samplers::{
    chain_seed, mcmc_coulomb, sample_gaf_zeros, sample_spherical_ensemble, sample_uniform,
    GibbsParams,
};
use sphere_gas::SCHEMA_VERSION;
use std::io::Write;
use std::path::Path;

#[derive(Serialize)]
struct BaselineRow {
    sampler: String,
    n: usize,
    samples: usize,
    mean_energy: f64,
    std_err: f64,
    /// Closed-form mean; absent for the Coulomb gas.
    closed_form: Option<f64>,
    deviation: Option<f64>,
}

#[derive(Serialize)]
struct BaselinesSummary {
    schema_version: u32,
    command: &'static str,
    config: BaselinesConfig,
    rows: Vec<BaselineRow>,
}

pub fn run(config_path: &Path, out: &Path, seed_override: Option<u64>) -> Result<i32, CliError> {
    let mut config: BaselinesConfig = config::load(config_path)?;
    if let Some(seed) = seed_override {
        config.seed = seed;
    }
    ensure_dir(out)?;
    let n = config.n;

    fn make_row(name: &str, n: usize, energies: &[f64], formula: Option<f64>) -> BaselineRow {
        let (mean_energy, std_err) = mean_and_se(energies);
        BaselineRow {
            sampler: name.into(),
            n,
            samples: energies.len(),
            mean_energy,
            std_err,
            closed_form: formula,
            deviation: formula.map(|f| mean_energy - f),
        }
    }
    let mut rows = Vec::new();

    let uniform: Vec<f64> = (0..config.samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(chain_seed(config.seed ^ 0xB0, i as u64));
            Ok(log_energy(&sample_uniform(n, &mut rng)?)?)
        })
        .collect::<Result<_, CliError>>()?;
    rows.push(make_row(
        "uniform",
        n,
        &uniform,
        Some(mean_energy_uniform(n)),
    ));

    let gaf: Vec<f64> = (0..config.samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(chain_seed(config.seed ^ 0xB1, i as u64));
            Ok(log_energy(&sample_gaf_zeros(n, &mut rng)?)?)
        })
        .collect::<Result<_, CliError>>()?;
    rows.push(make_row("gaf", n, &gaf, Some(mean_energy_gaf(n))));

    let dpp: Vec<f64> = (0..config.samples)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(chain_seed(config.seed ^ 0xB2, i as u64));
            Ok(log_energy(&sample_spherical_ensemble(n, &mut rng)?)?)
        })
        .collect::<Result<_, CliError>>()?;
    rows.push(make_row(
        "spherical-ensemble",
        n,
        &dpp,
        Some(mean_energy_dpp(n)),
    ));

    if config.chains > 0 {
        let params = GibbsParams::annealed(n, n as f64, config.chain_steps, config.seed ^ 0xB3);
        let gas: Vec<f64> = (0..config.chains)
            .into_par_iter()
            .map(|i| {
                let mut p = params.clone();
                p.seed = chain_seed(params.seed, i as u64);
                let (c, _): (Configuration, _) = mcmc_coulomb(&p)?;
                log_energy(&c)
            })
            .collect::<Result<_, _>>()?;
        rows.push(make_row("coulomb", n, &gas, None));
    }

    let mut csv = Vec::new();
    writeln!(csv, "# schema_version={SCHEMA_VERSION}").unwrap();
    writeln!(csv, "# config={}", config_echo(&config)).unwrap();
    writeln!(
        csv,
        "sampler,n,samples,mean_energy,std_err,closed_form,deviation"
    )
    .unwrap();
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.sampler,
            r.n,
            r.samples,
            r.mean_energy,
            r.std_err,
            r.closed_form.map_or(String::new(), |v| v.to_string()),
            r.deviation.map_or(String::new(), |v| v.to_string()),
        )
        .unwrap();
    }
    std::fs::write(out_file(out, "baselines.csv"), csv)?;
    println!(
        "{:<20} {:>12} {:>12} {:>12}",
        "sampler", "mean", "closed form", "deviation"
    );
    for r in &rows {
        println!(
            "{:<20} {:>12.4} {:>12} {:>12}",
            r.sampler,
            r.mean_energy,
            r.closed_form.map_or("—".into(), |v| format!("{v:.4}")),
            r.deviation.map_or("—".into(), |v| format!("{v:+.4}")),
        );
    }
    write_json(
        &out_file(out, "baselines.json"),
        &BaselinesSummary {
            schema_version: SCHEMA_VERSION,
            command: "baselines",
            config,
            rows,
        },
    )?;
    Ok(0)
}
