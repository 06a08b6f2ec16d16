use serde::{Deserialize, Serialize};
use toy_cascade::dynamics::fmt_float;
use toy_cascade::spectral::{catalogue, spectral_report, EigenLabel, SpectralError};
use toy_cascade::LatticeError;

use super::{check_budget_field, parse, Ctx};
use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HessianConfig {
    #[serde(rename = "N")]
    n: usize,
    m: f64,
    #[serde(default)]
    k: i64,
    #[serde(default)]
    theta: f64,
    #[serde(default)]
    max_seconds: Option<f64>,
}

#[derive(Serialize)]
struct HessianOutput {
    shift: f64,
    eigenvalues: Vec<f64>,
    /// Expected spectrum in units of `m`, as `"p/q"` strings.
    catalogue: Vec<String>,
    catalogue_match: bool,
    residual_max: f64,
    classification: Vec<EigenLabel>,
}

pub fn run(config: &serde_json::Value, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: HessianConfig = parse(config)?;
    check_budget_field(cfg.max_seconds)?;
    let rep = spectral_report(cfg.n, cfg.m, cfg.k, cfg.theta).map_err(|e| match e {
        SpectralError::Lattice(LatticeError::ZeroHalfWidth)
        | SpectralError::Lattice(LatticeError::CenterOutOfRange { .. })
        | SpectralError::Lattice(LatticeError::InvalidMass(_)) => CliError::invalid(e),
        other => CliError::numerical(other),
    })?;
    let out = HessianOutput {
        shift: rep.shift,
        eigenvalues: rep.eigenvalues.clone(),
        catalogue: catalogue(cfg.n, cfg.k).iter().map(|q| q.to_string()).collect(),
        catalogue_match: rep.catalogue_match.unwrap_or(false),
        residual_max: rep.residual_max(),
        classification: rep.classification.clone(),
    };
    ctx.out.write_json("hessian.json", &out)?;
    let mut csv = String::from("index,eigenvalue,residual\n");
    for (i, (v, r)) in rep.eigenvalues.iter().zip(&rep.residuals).enumerate() {
        csv.push_str(&format!("{i},{},{}\n", fmt_float(*v), fmt_float(*r)));
    }
    ctx.out.write_bytes("eigenvalues.csv", csv.as_bytes())?;
    println!("catalogue_match={} residual_max={}", out.catalogue_match, fmt_float(out.residual_max));
    ctx.check_budget(cfg.max_seconds)
}
