//! Shared sample-archive format and the per-β report table.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toy_cascade::dynamics::fmt_float;
use toy_cascade::gibbs::{ConcentrationReport, ReportOptions};
use toy_cascade::LatticeState;

use crate::error::CliError;

/// Index written next to the per-level sample CSVs.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Archive {
    #[serde(rename = "N")]
    pub n: usize,
    pub m: f64,
    pub levels: Vec<ArchiveLevel>,
    #[serde(default)]
    pub swap_rates: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchiveLevel {
    pub beta: f64,
    /// Path relative to the archive file.
    pub samples: String,
    pub n_samples: usize,
    pub accept_rate: f64,
    pub sigma: f64,
}

/// `step,H,re_{-N},im_{-N},…,re_N,im_N`.
pub fn samples_csv(steps: &[usize], h: &[f64], samples: &[LatticeState]) -> String {
    let mut out = String::from("step,H");
    if let Some(first) = samples.first() {
        for j in first.sites() {
            out.push_str(&format!(",re_{j},im_{j}"));
        }
    }
    out.push('\n');
    for ((s, e), b) in steps.iter().zip(h).zip(samples) {
        out.push_str(&format!("{s},{}", fmt_float(*e)));
        for z in b.amps() {
            out.push(',');
            out.push_str(&fmt_float(z.re));
            out.push(',');
            out.push_str(&fmt_float(z.im));
        }
        out.push('\n');
    }
    out
}

pub fn read_samples(path: &Path, n: usize) -> Result<Vec<LatticeState>, CliError> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    let width = 2 + 2 * (2 * n + 1);
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let bad = |msg: String| CliError::Invalid(format!("{} row {}: {msg}", path.display(), row + 1));
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != width {
            return Err(bad(format!("expected {width} columns, got {}", rec.len())));
        }
        let vals: Vec<f64> =
            rec.iter().skip(2).map(|f| f.parse::<f64>()).collect::<Result<_, _>>().map_err(|e| bad(e.to_string()))?;
        let amps = vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        out.push(LatticeState::new(n, amps).map_err(|e| bad(e.to_string()))?);
    }
    Ok(out)
}

pub fn validate_options(o: &ReportOptions) -> Result<(), CliError> {
    if o.cap_eps.is_empty() || o.cap_eps.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(CliError::Invalid("cap_eps must be a non-empty list of positive radii".into()));
    }
    if o.phase_bins == 0 {
        return Err(CliError::Invalid("phase_bins must be at least 1".into()));
    }
    if !(o.g_window > 0.0 && o.g_window.is_finite()) || o.far_offset < 1 {
        return Err(CliError::Invalid("g_window must be positive and far_offset at least 1".into()));
    }
    Ok(())
}

/// One row per report, sorted by the caller.
pub fn report_table(reports: &[ConcentrationReport]) -> String {
    let eps: Vec<f64> = reports.first().map(|r| r.cap.iter().map(|c| c.eps).collect()).unwrap_or_default();
    let mut out = String::from("beta,n_samples");
    for e in &eps {
        out.push_str(&format!(",cap_{}", fmt_float(*e)));
    }
    out.push_str(
        ",distance_tau,site_p_value,site_weighted_p_value,phase_p_value,far_site_variance,far_site_se,g_vs_h_mean,non_unique\n",
    );
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    for r in reports {
        out.push_str(&format!("{},{}", fmt_float(r.beta), r.n_samples));
        for c in &r.cap {
            out.push_str(&format!(",{}", fmt_float(c.fraction)));
        }
        out.push_str(&format!(
            ",{},{},{},{},{},{},{},{}\n",
            fmt_float(r.distance_tau),
            fmt_float(r.site_p_value),
            fmt_float(r.site_weighted_p_value),
            fmt_float(r.phase_p_value),
            opt(r.far_site_variance),
            opt(r.far_site_se),
            fmt_float(r.g_vs_h.mean),
            r.non_unique
        ));
    }
    out
}

/// Whether every cap column is nondecreasing down the (β-sorted) table.
pub fn caps_monotone(reports: &[ConcentrationReport]) -> bool {
    reports.windows(2).all(|w| w[0].cap.iter().zip(&w[1].cap).all(|(a, b)| b.fraction >= a.fraction))
}
