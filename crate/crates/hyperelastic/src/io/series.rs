//! Stress series CSV: `# key=value` metadata, then `t`, nine `F` and six `σ` columns.

use std::path::Path;

use hyperelastic_core::data::{Record, SeriesMeta, StressSeries};
use hyperelastic_core::tensor::{DeformationGradient, Tensor2, VOIGT_PAIRS};

use super::fs::{read_string, write_atomic};
use crate::error::{Error, Result};

pub const SERIES_VERSION: u64 = 1;

const SIGMA_LABELS: [&str; 6] = ["S11", "S22", "S33", "S12", "S23", "S13"];

pub fn header() -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 1..=3 {
        for j in 1..=3 {
            h.push(format!("F{i}{j}"));
        }
    }
    h.extend(SIGMA_LABELS.iter().map(|s| s.to_string()));
    h
}

pub fn to_csv(series: &StressSeries) -> Result<Vec<u8>> {
    let m = &series.meta;
    let mut out = format!(
        "# format=stress-series\n# version={SERIES_VERSION}\n# path={}\n# noise_seed={}\n# truth={}\n",
        m.path, m.noise_seed, m.truth
    );
    if let Some(w) = m.filter_window {
        out.push_str(&format!("# filter_window={w}\n"));
    }
    let mut w = csv::Writer::from_writer(out.into_bytes());
    let csv_err = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(header()).map_err(csv_err)?;
    for r in &series.records {
        let mut row = vec![r.t.to_string()];
        row.extend(r.f.tensor().to_array().iter().map(f64::to_string));
        row.extend(VOIGT_PAIRS.iter().map(|&(i, j)| r.sigma.0[i][j].to_string()));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Data(e.to_string()))
}

pub fn write_series(path: &Path, series: &StressSeries) -> Result<()> {
    write_atomic(path, &to_csv(series)?)
}

pub fn parse_series(text: &str, path: &Path) -> Result<StressSeries> {
    let mut meta = SeriesMeta::default();
    let mut version = None;
    let mut body_start = 0;
    let mut body_line = 1;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.strip_prefix('#') else { break };
        body_start += line.len();
        body_line += 1;
        let Some((k, v)) = rest.trim().split_once('=') else { continue };
        let v = v.trim();
        let bad = |what: &str| Error::Parse {
            path: path.to_path_buf(),
            line: body_line - 1,
            column: 1,
            message: format!("invalid {what} '{v}'"),
        };
        match k.trim() {
            "version" => version = Some(v.parse::<u64>().map_err(|_| bad("version"))?),
            "path" => meta.path = v.to_string(),
            "noise_seed" => meta.noise_seed = v.parse().map_err(|_| bad("noise seed"))?,
            "truth" => meta.truth = v.to_string(),
            "filter_window" => meta.filter_window = Some(v.parse().map_err(|_| bad("filter window"))?),
            _ => {}
        }
    }
    if let Some(found) = version {
        if found != SERIES_VERSION {
            return Err(Error::UnsupportedVersion { path: path.to_path_buf(), what: "series", found, expected: SERIES_VERSION });
        }
    }
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text[body_start..].as_bytes());
    let hdr = rdr.headers().map_err(|e| Error::Data(format!("{}: {e}", path.display())))?.clone();
    if hdr.iter().collect::<Vec<_>>() != header() {
        return Err(Error::Parse { path: path.to_path_buf(), line: body_line, column: 1, message: "unexpected header".into() });
    }
    let mut records = Vec::new();
    for (k, row) in rdr.records().enumerate() {
        let line = body_line + 1 + k;
        let row = row.map_err(|e| Error::Parse { path: path.to_path_buf(), line, column: 1, message: e.to_string() })?;
        let mut v = [0.0; 16];
        if row.len() != 16 {
            return Err(Error::Parse { path: path.to_path_buf(), line, column: 1, message: format!("expected 16 fields, got {}", row.len()) });
        }
        for (c, field) in row.iter().enumerate() {
            v[c] = field.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                column: c + 1,
                message: format!("invalid number '{field}'"),
            })?;
        }
        let f = DeformationGradient::new(Tensor2::from_slice(&v[1..10]))
            .map_err(|e| Error::Parse { path: path.to_path_buf(), line, column: 2, message: e.to_string() })?;
        let mut sigma = Tensor2::ZERO;
        for (a, &(i, j)) in VOIGT_PAIRS.iter().enumerate() {
            sigma.0[i][j] = v[10 + a];
            sigma.0[j][i] = v[10 + a];
        }
        records.push(Record { t: v[0], f, sigma });
    }
    Ok(StressSeries::new(meta, records)?)
}

pub fn read_series(path: &Path) -> Result<StressSeries> {
    parse_series(&read_string(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperelastic_core::data::{synthesize_stress, GroundTruthModel, LoadingPath, NoiseModel, PathKind};

    fn sample() -> StressSeries {
        let path = LoadingPath { duration: 2.0, ..LoadingPath::new(PathKind::Shear { i: 0, j: 2, positive: false }) };
        synthesize_stress(&path, &GroundTruthModel::literature(), &NoiseModel::new(3)).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample();
        let text = String::from_utf8(to_csv(&s).unwrap()).unwrap();
        let back = parse_series(&text, Path::new("x.csv")).unwrap();
        assert_eq!(back.meta, s.meta);
        assert_eq!(back.records.len(), s.records.len());
        for (a, b) in s.records.iter().zip(&back.records) {
            assert_eq!(a.t, b.t);
            assert_eq!(a.f.tensor().to_array(), b.f.tensor().to_array());
            assert_eq!(a.sigma, b.sigma);
        }
        assert_eq!(to_csv(&back).unwrap(), text.as_bytes());
    }

    #[test]
    fn bad_number_reports_line_and_column() {
        let text = String::from_utf8(to_csv(&sample()).unwrap()).unwrap();
        let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
        let row = lines.iter().position(|l| l.starts_with("0,")).unwrap();
        let mut fields: Vec<&str> = lines[row].split(',').collect();
        fields[4] = "oops";
        lines[row] = fields.join(",");
        match parse_series(&lines.join("\n"), Path::new("x.csv")) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (row + 1, 5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn future_version_is_rejected() {
        let text = String::from_utf8(to_csv(&sample()).unwrap()).unwrap().replace("version=1", "version=9");
        assert!(matches!(parse_series(&text, Path::new("x.csv")), Err(Error::UnsupportedVersion { found: 9, .. })));
    }
}
