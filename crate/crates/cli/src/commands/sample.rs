use serde::Deserialize;
use toy_cascade::dynamics::fmt_float;
use toy_cascade::gibbs::{
    concentration_report_with, mcmc_run, tempering_run, ChainResult, GibbsError, ReportOptions, SamplerConfig,
    TemperingConfig,
};

use super::table::{report_table, samples_csv, validate_options, Archive, ArchiveLevel};
use super::{check_budget_field, parse, Ctx};
use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleConfig {
    sampler: SamplerConfig,
    /// Replica exchange over these inverse temperatures; `sampler.beta` is
    /// used for a single chain when absent.
    #[serde(default)]
    betas: Option<Vec<f64>>,
    #[serde(default = "default_swap_interval")]
    swap_interval: usize,
    #[serde(default)]
    report: ReportOptions,
    #[serde(default)]
    max_seconds: Option<f64>,
}

fn default_swap_interval() -> usize {
    10
}

fn gibbs_error(e: GibbsError) -> CliError {
    match e {
        GibbsError::InvalidConfig(_) | GibbsError::ValidityGuard { .. } | GibbsError::ZeroMass => CliError::invalid(e),
        other => CliError::numerical(other),
    }
}

pub fn run(config: &serde_json::Value, ctx: &mut Ctx) -> Result<(), CliError> {
    let mut cfg: SampleConfig = parse(config)?;
    check_budget_field(cfg.max_seconds)?;
    validate_options(&cfg.report)?;
    cfg.sampler.seed = ctx.pick_seed(Some(cfg.sampler.seed));
    let (levels, swap_rates): (Vec<ChainResult>, Vec<f64>) = match &cfg.betas {
        Some(betas) => {
            let t =
                TemperingConfig { base: cfg.sampler.clone(), betas: betas.clone(), swap_interval: cfg.swap_interval };
            let r = tempering_run(&t).map_err(gibbs_error)?;
            let rates = r.swap_rates();
            (r.levels, rates)
        }
        None => (vec![mcmc_run(&cfg.sampler).map_err(gibbs_error)?], Vec::new()),
    };
    let default_opts = cfg.report == ReportOptions::default();
    let mut archive = Archive { n: cfg.sampler.n, m: cfg.sampler.m, levels: Vec::new(), swap_rates };
    let mut reports = Vec::new();
    for (i, l) in levels.iter().enumerate() {
        let name = format!("samples_{i}.csv");
        ctx.out.write_bytes(&name, samples_csv(&l.steps, &l.h_values, &l.samples).as_bytes())?;
        let rep = if default_opts {
            l.diagnostics.clone()
        } else {
            concentration_report_with(&l.samples, cfg.sampler.m, l.beta, &cfg.report)
        };
        ctx.out.write_json(&format!("report_{i}.json"), &rep)?;
        println!(
            "beta={} n_samples={} accept={:.3} cap(0.3)={}",
            fmt_float(l.beta),
            l.samples.len(),
            l.accept_rate,
            rep.cap_fraction(0.3).map(fmt_float).unwrap_or_else(|| "-".into())
        );
        archive.levels.push(ArchiveLevel {
            beta: l.beta,
            samples: name,
            n_samples: l.samples.len(),
            accept_rate: l.accept_rate,
            sigma: l.sigma,
        });
        reports.push(rep);
    }
    ctx.out.write_json("archive.json", &archive)?;
    ctx.out.write_bytes("report.csv", report_table(&reports).as_bytes())?;
    ctx.check_budget(cfg.max_seconds)
}
