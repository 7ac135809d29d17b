//! Human-readable tables and plot-ready CSV for the audit reports.

use std::fmt::Write;

use hyperelastic_core::data::stiffness::TABLE_LABELS;
use hyperelastic_core::validate::{AnisotropyEntry, EllipticityReport, GrowthReport, SweepReport, TangentTable};

use crate::error::{Error, Result};

pub fn tangent_table_text(t: &TangentTable) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# {}: pressure {:.6} GPa (target {}), stretch {:.6}, J {:.6}",
        t.label, t.state.pressure, t.state.target, t.state.stretch, t.state.jacobian
    );
    let _ = writeln!(s, "{:<6}{:>12}{:>12}{:>12}", "coef", "S-E", "P-F", "sigma-eps");
    for (k, l) in TABLE_LABELS.iter().enumerate() {
        let _ = writeln!(s, "{:<6}{:>12.4}{:>12.4}{:>12.4}", l, t.se[k], t.pf[k], t.sigma_eps[k]);
    }
    s
}

pub fn tangent_table_csv(t: &TangentTable) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(["coef", "S-E", "P-F", "sigma-eps"]).map_err(err)?;
    for (k, l) in TABLE_LABELS.iter().enumerate() {
        w.write_record([l.to_string(), t.se[k].to_string(), t.pf[k].to_string(), t.sigma_eps[k].to_string()]).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

pub fn ellipticity_text(r: &EllipticityReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<4}{:>16}{:>16}{:>10}{:>8}  arg(phi, theta)", "crit", "minimum", "grid minimum", "restarts", "pass");
    for c in &r.criteria {
        let _ = writeln!(
            s,
            "{:<4}{:>16.6e}{:>16.6e}{:>10}{:>8}  ({:.4}, {:.4})",
            c.name, c.minimum, c.grid_minimum, c.candidates, c.pass, c.arg_angles[0], c.arg_angles[1]
        );
    }
    let _ = writeln!(s, "excluded states: {}", r.excluded_states.len());
    let _ = writeln!(s, "strong ellipticity: {}", if r.pass { "pass" } else { "fail" });
    s
}

pub fn sweep_csv(r: &SweepReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(["level", "f", "g", "d", "pass"]).map_err(err)?;
    for p in &r.points {
        w.write_record([
            p.parameter.to_string(),
            p.minima[0].to_string(),
            p.minima[1].to_string(),
            p.minima[2].to_string(),
            p.pass.to_string(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

pub fn growth_csv(r: &GrowthReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(["J", "energy"]).map_err(err)?;
    for p in &r.points {
        w.write_record([p.jacobian.to_string(), p.energy.to_string()]).map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

pub fn growth_text(r: &GrowthReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", r.verdict());
    let _ = writeln!(s, "monotone: {}", r.monotone);
    let _ = writeln!(s, "first-decade slope: {:.6e}", r.first_decade_slope);
    let _ = writeln!(s, "last-decade slope: {:.6e} (threshold {}x)", r.last_decade_slope, r.threshold);
    match r.min_training_jacobian {
        Some(j) => {
            let _ = writeln!(s, "minimum training det F: {j:.6}");
        }
        None => {
            let _ = writeln!(s, "minimum training det F: unknown");
        }
    }
    if let Some(j) = r.failed_at {
        let _ = writeln!(s, "evaluation failed at J = {j:e}");
    }
    s
}

pub fn anisotropy_csv(levels: &[f64], entries: &[AnisotropyEntry]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(["level", "v1_sq", "v2_sq", "index", "divergent"]).map_err(err)?;
    for (l, e) in levels.iter().zip(entries) {
        w.write_record([
            l.to_string(),
            e.v1_sq.to_string(),
            e.v2_sq.to_string(),
            e.index.map(|x| x.to_string()).unwrap_or_default(),
            e.divergent.to_string(),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}
