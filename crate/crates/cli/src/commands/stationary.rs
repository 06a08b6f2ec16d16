use serde::{Deserialize, Serialize};
use toy_cascade::dynamics::fmt_float;
use toy_cascade::stationary::{profile_to_state, scan_positivity, solve_phase_locked, StationaryError};

use super::{check_budget_field, parse, Ctx};
use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StationaryConfig {
    n_nodes: usize,
    #[serde(default = "one")]
    omega: f64,
    /// Also report positivity for `n = 1..=scan_max` at `ω = 1`.
    #[serde(default)]
    scan_max: Option<usize>,
    /// Embed the profile into a lattice of half width `N` centred at `center`.
    #[serde(default)]
    embed: Option<Embed>,
    #[serde(default)]
    max_seconds: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Embed {
    #[serde(rename = "N")]
    n: usize,
    #[serde(default)]
    center: i64,
    #[serde(default)]
    theta: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Serialize)]
struct ScanRow {
    n_nodes: usize,
    positive: bool,
}

pub fn run(config: &serde_json::Value, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: StationaryConfig = parse(config)?;
    check_budget_field(cfg.max_seconds)?;
    if !cfg.omega.is_finite() {
        return Err(CliError::Invalid("omega must be finite".into()));
    }
    let profile = solve_phase_locked(cfg.n_nodes, cfg.omega).map_err(|e| match e {
        StationaryError::NoNodes => CliError::invalid(e),
        other => CliError::numerical(other),
    })?;
    ctx.out.write_json("profile.json", &profile)?;
    let mut csv = String::from("node,rho\n");
    for (i, r) in profile.rho.iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", fmt_float(*r)));
    }
    ctx.out.write_bytes("profile.csv", csv.as_bytes())?;
    println!(
        "n_nodes={} omega={} positive={} mass={}",
        profile.n_nodes,
        fmt_float(profile.omega),
        profile.positive,
        fmt_float(profile.mass())
    );

    if let Some(max) = cfg.scan_max {
        let rows: Vec<ScanRow> =
            scan_positivity(max).into_iter().map(|(n_nodes, positive)| ScanRow { n_nodes, positive }).collect();
        let mut csv = String::from("n_nodes,positive\n");
        for r in &rows {
            csv.push_str(&format!("{},{}\n", r.n_nodes, r.positive));
        }
        ctx.out.write_bytes("scan.csv", csv.as_bytes())?;
    }
    if let Some(e) = &cfg.embed {
        let state = profile_to_state(&profile, e.n, e.center, e.theta).map_err(CliError::invalid)?;
        ctx.out.write_json("state.json", &state)?;
    }
    ctx.check_budget(cfg.max_seconds)
}
