//! Loss trace CSV, one row per epoch; missing constraint metrics are empty fields.

use hyperelastic_core::train::LossTrace;

use crate::error::{Error, Result};

const HEADER: [&str; 13] = [
    "epoch",
    "loss",
    "energy_ref",
    "stress_ref",
    "stress",
    "val_stress",
    "penalty",
    "frame_energy",
    "frame_stress",
    "frame_tangent",
    "sym_energy",
    "sym_stress",
    "sym_tangent",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn trace_to_csv(trace: &LossTrace) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(HEADER).map_err(err)?;
    for r in &trace.epochs {
        w.write_record([
            r.epoch.to_string(),
            r.loss.to_string(),
            r.energy_ref.to_string(),
            r.stress_ref.to_string(),
            r.stress.to_string(),
            r.val_stress.to_string(),
            r.penalty.to_string(),
            opt(r.frame_energy),
            opt(r.frame_stress),
            opt(r.frame_tangent),
            opt(r.sym_energy),
            opt(r.sym_stress),
            opt(r.sym_tangent),
        ])
        .map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}
