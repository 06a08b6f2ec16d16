use std::fs;
use std::path::PathBuf;

use serde::Deserialize;
use toy_cascade::gibbs::{concentration_report_with, ReportOptions};

use super::table::{caps_monotone, read_samples, report_table, validate_options, Archive};
use super::{check_budget_field, parse, Ctx};
use crate::error::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportConfig {
    /// `archive.json` files written by `sample`; relative paths resolve
    /// against the config file's directory.
    archives: Vec<PathBuf>,
    #[serde(default)]
    options: ReportOptions,
    #[serde(default)]
    max_seconds: Option<f64>,
}

pub fn run(config: &serde_json::Value, base_dir: &std::path::Path, ctx: &mut Ctx) -> Result<(), CliError> {
    let cfg: ReportConfig = parse(config)?;
    check_budget_field(cfg.max_seconds)?;
    validate_options(&cfg.options)?;
    if cfg.archives.is_empty() {
        return Err(CliError::Invalid("archives must not be empty".into()));
    }
    let mut reports = Vec::new();
    for a in &cfg.archives {
        let path = if a.is_absolute() { a.clone() } else { base_dir.join(a) };
        let text = fs::read_to_string(&path).map_err(|source| CliError::ReadConfig { path: path.clone(), source })?;
        let archive: Archive =
            serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(PathBuf::from).unwrap_or_default();
        for level in &archive.levels {
            let samples = read_samples(&dir.join(&level.samples), archive.n)?;
            if samples.is_empty() {
                return Err(CliError::Invalid(format!("{} has no samples", level.samples)));
            }
            reports.push(concentration_report_with(&samples, archive.m, level.beta, &cfg.options));
            ctx.check_budget(cfg.max_seconds)?;
        }
    }
    reports.sort_by(|a, b| a.beta.total_cmp(&b.beta));
    ctx.out.write_bytes("report.csv", report_table(&reports).as_bytes())?;
    ctx.out.write_json("report.json", &reports)?;
    let monotone = caps_monotone(&reports);
    println!("levels={} cap_monotone={monotone}", reports.len());
    Ok(())
}
