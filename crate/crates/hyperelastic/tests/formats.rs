use std::path::Path;

use hyperelastic::io::*;
use hyperelastic::Error;
use hyperelastic_core::data::*;
use hyperelastic_core::energy::{ConjugatePair, MultiplyKind, NetConfig};
use hyperelastic_core::exec::Serial;
use hyperelastic_core::tensor::Tensor2;
use hyperelastic_core::train::{init_for_dataset, TrainConfig, Trainer};

fn dataset() -> Dataset {
    let truth = GroundTruthModel::literature();
    let series: Vec<_> = [PathKind::UniaxialTension { axis: 2 }, PathKind::BiaxialCompression { a: 0, b: 1 }]
        .iter()
        .enumerate()
        .map(|(k, &kind)| {
            let p = LoadingPath { duration: 20.0, ..LoadingPath::new(kind) };
            synthesize_stress(&p, &truth, &NoiseModel::new(k as u64)).unwrap()
        })
        .collect();
    build_dataset(&series, ConjugatePair::PF, 0.6, 9).unwrap()
}

#[test]
fn model_round_trip_preserves_every_bit() {
    let ds = dataset();
    for multiply in [MultiplyKind::Square, MultiplyKind::Product] {
        let m = init_for_dataset(5, &ds, NetConfig { width: 7, multiply, ..NetConfig::default() });
        let text = String::from_utf8(model_to_json(&m).unwrap()).unwrap();
        let back = parse_model(&text, Path::new("m.json")).unwrap();
        assert_eq!(back, m);
        assert_eq!(model_to_json(&back).unwrap(), text.as_bytes());
        let f = Tensor2([[1.01, 0.02, 0.0], [0.0, 0.98, 0.01], [0.0, 0.0, 1.0]]).to_array();
        assert_eq!(back.energy(&f).unwrap().to_bits(), m.energy(&f).unwrap().to_bits());
    }
}

#[test]
fn dataset_and_checkpoint_round_trip() {
    let ds = dataset();
    let back = parse_dataset(std::str::from_utf8(&dataset_to_json(&ds).unwrap()).unwrap(), Path::new("d.json")).unwrap();
    assert_eq!(back, ds);

    let m = init_for_dataset(1, &ds, NetConfig { width: 5, ..NetConfig::default() });
    let cfg = TrainConfig { epochs: 2, batch_size: 16, ..TrainConfig::default() };
    let mut t = Trainer::new(m, &ds, cfg).unwrap();
    t.step_epoch(&Serial).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    write_atomic(&p, &checkpoint_to_json(&t.checkpoint()).unwrap()).unwrap();
    let ck = read_checkpoint(&p).unwrap();
    assert_eq!(ck, t.checkpoint());
}

#[test]
fn wrong_format_and_version_are_rejected() {
    let ds = dataset();
    let text = String::from_utf8(dataset_to_json(&ds).unwrap()).unwrap();
    assert!(matches!(parse_model(&text, Path::new("d.json")), Err(Error::Parse { .. })));
    let newer = text.replacen("\"version\": 1", "\"version\": 2", 1);
    assert!(matches!(parse_dataset(&newer, Path::new("d.json")), Err(Error::UnsupportedVersion { found: 2, .. })));
    match parse_dataset("{\n  \"format\": \"hyperelastic-dataset\",\n  \"version\": 1,\n  \"pair\": 7\n}", Path::new("d.json")) {
        Err(Error::Parse { line, .. }) => assert!(line >= 1),
        other => panic!("{other:?}"),
    }
}

#[test]
fn trace_csv_has_one_row_per_epoch() {
    let ds = dataset();
    let m = init_for_dataset(1, &ds, NetConfig { width: 4, ..NetConfig::default() });
    let cfg = TrainConfig { epochs: 3, batch_size: 16, ..TrainConfig::default() };
    let (_, trace) = hyperelastic_core::train::train(m, &ds, &cfg, &hyperelastic::exec::Rayon).unwrap();
    let csv = String::from_utf8(trace_to_csv(&trace).unwrap()).unwrap();
    let rows: Vec<_> = csv.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("epoch,"));
    assert_eq!(rows[1].split(',').count(), rows[0].split(',').count());
}
