//! Batch experiment drivers shared by the command-line binary and the
//! acceptance suite: family construction, parallel per-mode counting, and
//! the JSON diagnostics sidecar. Mode evaluations are independent, so
//! families run as a parallel map; records are collected in submission
//! order for deterministic output.

use crate::continuation::growth_profile;
use crate::counting::{count_mode, CountOptions, CountRecord};
use crate::geometry::AnalyticCurve;
use crate::modes::{disc_mode, ellipse_mode, BoundaryCondition, EigenMode, Parity};
use crate::Result;
use rayon::prelude::*;

/// Per-mode diagnostics for the JSON sidecar.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ModeDiagnostics {
    pub mode_id: String,
    pub lambda: f64,
    pub status: String,
    pub runtime_ms: u128,
    pub max_log_mod: Option<f64>,
    pub fitted_rate: Option<f64>,
}

/// Disc mode family over index ranges; construction failures abort (the
/// disc is the oracle and must be constructible).
pub fn disc_family(
    m_range: (u32, u32),
    n_range: (u32, u32),
    bc: BoundaryCondition,
    parity: Parity,
) -> Result<Vec<(EigenMode, AnalyticCurve)>> {
    let circle = AnalyticCurve::circle(1.0);
    let mut out = Vec::new();
    for m in m_range.0..=m_range.1 {
        for n in n_range.0..=n_range.1 {
            let par = if m == 0 { Parity::Cos } else { parity };
            let mode = disc_mode(m, n, bc, par)?;
            out.push((mode, circle.clone()));
        }
    }
    Ok(out)
}

/// Ellipse mode family at eccentricity parameter a.
pub fn ellipse_family(
    a: f64,
    m_range: (u32, u32),
    n_range: (u32, u32),
    bc: BoundaryCondition,
    parity: Parity,
) -> Result<Vec<(EigenMode, AnalyticCurve)>> {
    let boundary = AnalyticCurve::ellipse((1.0 - a * a).sqrt())?;
    let mut out = Vec::new();
    for m in m_range.0..=m_range.1 {
        for n in n_range.0..=n_range.1 {
            let par = if m == 0 { Parity::Cos } else { parity };
            let mode = ellipse_mode(a, m, n, bc, par)?;
            out.push((mode, boundary.clone()));
        }
    }
    Ok(out)
}

/// Parallel counting pass over a family; returns records in family order
/// together with the per-mode diagnostics.
pub fn run_counting(
    family: &[(EigenMode, AnalyticCurve)],
    opts: &CountOptions,
) -> (Vec<CountRecord>, Vec<ModeDiagnostics>) {
    let results: Vec<(CountRecord, ModeDiagnostics)> = family
        .par_iter()
        .map(|(mode, curve)| {
            let started = std::time::Instant::now();
            let record = count_mode(mode, curve, opts);
            let mut diag = ModeDiagnostics {
                mode_id: record.mode_id.clone(),
                lambda: record.lambda,
                status: record.status.clone(),
                runtime_ms: started.elapsed().as_millis(),
                max_log_mod: record.max_log_mod,
                fitted_rate: None,
            };
            if opts.with_complex {
                if let Ok(profile) = growth_profile(
                    curve,
                    mode,
                    opts.epsilon,
                    16,
                    4,
                    opts.epsilon * 0.4,
                    &opts.params,
                ) {
                    diag.fitted_rate = Some(profile.fitted_rate);
                }
            }
            (record, diag)
        })
        .collect();
    results.into_iter().unzip()
}

/// JSON sidecar serialization (pretty, stable field order).
pub fn diagnostics_json(diags: &[ModeDiagnostics]) -> String {
    serde_json::to_string_pretty(diags).expect("diagnostics serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_family_sizes() {
        let fam = disc_family((1, 3), (1, 2), BoundaryCondition::Neumann, Parity::Sin).unwrap();
        assert_eq!(fam.len(), 6);
        // m = 0 entries silently use cos parity
        let fam0 = disc_family((0, 1), (1, 1), BoundaryCondition::Neumann, Parity::Sin).unwrap();
        assert_eq!(fam0.len(), 2);
    }

    #[test]
    fn run_counting_produces_ordered_records() {
        let fam = disc_family((1, 4), (1, 1), BoundaryCondition::Neumann, Parity::Sin).unwrap();
        let (records, diags) = run_counting(&fam, &CountOptions::default());
        assert_eq!(records.len(), 4);
        assert_eq!(diags.len(), 4);
        for (i, rec) in records.iter().enumerate() {
            assert_eq!(rec.m, i as u32 + 1);
            assert_eq!(rec.n_real, Some(2 * (i + 1)));
        }
        let json = diagnostics_json(&diags);
        assert!(json.contains("mode_id"));
    }
}
