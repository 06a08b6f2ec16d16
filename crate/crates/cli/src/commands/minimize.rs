use serde::{Deserialize, Serialize};
use toy_cascade::dynamics::fmt_float;
use toy_cascade::gibbs::nearest_minimizer;
use toy_cascade::minimization::{optimize_on_sphere, Sense, SphereOptions};

use super::{check_budget_field, parse, Ctx};
use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MinimizeConfig {
    #[serde(rename = "N")]
    n: usize,
    m: f64,
    #[serde(default = "default_starts")]
    n_starts: usize,
    #[serde(default)]
    maximize: bool,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    max_iter: Option<usize>,
    #[serde(default)]
    max_seconds: Option<f64>,
}

fn default_starts() -> usize {
    32
}

#[derive(Serialize)]
struct MinimizeOutput<'a> {
    energy: f64,
    energy_over_m2: f64,
    converged: bool,
    converged_starts: usize,
    iterations: usize,
    grad_norm: f64,
    start_index: u64,
    /// Distance to the nearest exact minimizer; only for minimization.
    distance_to_minimizers: Option<f64>,
    state: &'a toy_cascade::LatticeState,
}

pub fn run(config: &serde_json::Value, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: MinimizeConfig = parse(config)?;
    check_budget_field(cfg.max_seconds)?;
    if cfg.n == 0 || !(cfg.m > 0.0 && cfg.m.is_finite()) || cfg.n_starts == 0 {
        return Err(CliError::Invalid("need N >= 1, m > 0 and n_starts >= 1".into()));
    }
    let seed = ctx.pick_seed(cfg.seed);
    let mut opts = SphereOptions::default();
    if let Some(it) = cfg.max_iter {
        opts.max_iter = it;
    }
    let sense = if cfg.maximize { Sense::Maximize } else { Sense::Minimize };
    let r = optimize_on_sphere(cfg.n, cfg.m, cfg.n_starts, seed, sense, &opts);
    let distance =
        if cfg.maximize { None } else { Some(nearest_minimizer(&r.state).map_err(CliError::numerical)?.distance) };
    let out = MinimizeOutput {
        energy: r.energy,
        energy_over_m2: r.energy / (cfg.m * cfg.m),
        converged: r.converged,
        converged_starts: r.converged_starts,
        iterations: r.iterations,
        grad_norm: r.grad_norm,
        start_index: r.start_index,
        distance_to_minimizers: distance,
        state: &r.state,
    };
    ctx.out.write_json("minimize.json", &out)?;
    println!("energy={} converged_starts={}/{}", fmt_float(r.energy), r.converged_starts, cfg.n_starts);
    if !r.converged {
        return Err(CliError::Numerical(format!("no start converged (gradient norm {:e})", r.grad_norm)));
    }
    ctx.check_budget(cfg.max_seconds)
}
