use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toy_cascade::dynamics::{fmt_float, integrate, DynamicsError, IntegratorConfig};
use toy_cascade::lattice::{minimizer_state, LatticeState, MinimizerId};
use toy_cascade::minimization::random_sphere_state;
use toy_cascade::rng::stream_rng;

use super::{check_budget_field, parse, Ctx};
use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateConfig {
    initial: Initial,
    integrator: IntegratorConfig,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    max_seconds: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Initial {
    Preset(Preset),
    Inline { state: LatticeState },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
enum Preset {
    Minimizer {
        #[serde(rename = "N")]
        n: usize,
        m: f64,
        #[serde(default)]
        k: i64,
        #[serde(default)]
        theta: f64,
    },
    SingleMode {
        #[serde(rename = "N")]
        n: usize,
        m: f64,
        #[serde(default)]
        site: i64,
    },
    UniformRandom {
        #[serde(rename = "N")]
        n: usize,
        m: f64,
    },
}

#[derive(Serialize)]
struct Summary {
    n_records: usize,
    t_final: f64,
    h0: f64,
    m0: f64,
    max_h_drift: f64,
    max_m_drift: f64,
}

fn initial_state(init: &Initial, seed: u64) -> Result<LatticeState, CliError> {
    match init {
        Initial::Inline { state } => Ok(state.clone()),
        Initial::Preset(Preset::Minimizer { n, m, k, theta }) => {
            minimizer_state(&MinimizerId::new(*m, *k, *theta), *n).map_err(CliError::invalid)
        }
        Initial::Preset(Preset::SingleMode { n, m, site }) => {
            if !(*m > 0.0 && m.is_finite()) {
                return Err(CliError::Invalid(format!("mass must be positive, got {m}")));
            }
            LatticeState::from_sites(*n, &[(*site, Complex64::new(m.sqrt(), 0.0))]).map_err(CliError::invalid)
        }
        Initial::Preset(Preset::UniformRandom { n, m }) => {
            if *n == 0 || !(*m > 0.0 && m.is_finite()) {
                return Err(CliError::Invalid("uniform_random needs N >= 1 and m > 0".into()));
            }
            Ok(random_sphere_state(*n, *m, &mut stream_rng(seed, 0)))
        }
    }
}

pub fn run(config: &serde_json::Value, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: SimulateConfig = parse(config)?;
    check_budget_field(cfg.max_seconds)?;
    cfg.integrator.validate().map_err(CliError::invalid)?;
    let seed = ctx.pick_seed(cfg.seed);
    let b0 = initial_state(&cfg.initial, seed)?;
    let traj = integrate(&b0, &cfg.integrator).map_err(|e| match e {
        DynamicsError::InvalidConfig(_) => CliError::invalid(e),
        other => CliError::numerical(other),
    })?;
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).map_err(|e| CliError::Other(e.to_string()))?;
    ctx.out.write_bytes("trajectory.csv", &csv)?;
    let summary = Summary {
        n_records: traj.len(),
        t_final: cfg.integrator.t_final,
        h0: traj.h_series[0],
        m0: traj.m_series[0],
        max_h_drift: traj.max_h_drift(),
        max_m_drift: traj.max_m_drift(),
    };
    ctx.out.write_json("summary.json", &summary)?;
    println!("H_drift={} M_drift={}", fmt_float(summary.max_h_drift), fmt_float(summary.max_m_drift));
    ctx.check_budget(cfg.max_seconds)
}
