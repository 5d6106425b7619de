use std::time::Duration;

use ltlgnn_bench::{
    build_engine, read_report, spearman, speedup_report, time_classical, time_dataset, time_neural, write_report,
    BenchError, CheckInput, EngineError, EngineOptions, TimingRecord,
};
use ltlgnn_core::automata::translate;
use ltlgnn_core::ltl::{parse_ltl, to_nnf};
use ltlgnn_datagen::{generate_dataset, Case, DatasetConfig, Sample, Scenario, Split};
use ltlgnn_neural::{build_model, ModelKind};

fn trivial_sample() -> Sample {
    let a = parse_ltl("a").unwrap();
    Sample {
        phi: a.clone(),
        phi_src: a.clone(),
        system: translate(&a),
        label: true,
        case: Case::Equivalent,
        split: Split::Train,
    }
}

#[test]
fn classical_timing_on_trivial_sample() {
    let s = trivial_sample();
    let (t, verdict) = time_classical(0, &s, Scenario::General).unwrap();
    assert!(verdict);
    assert!(t > Duration::ZERO);
    let wrong = Sample { label: false, ..s };
    assert_eq!(
        time_classical(3, &wrong, Scenario::Special),
        Err(BenchError::LabelMismatch { id: 3, verdict: true, label: false })
    );
}

#[test]
fn neural_timing_is_repeatable() {
    let model = build_model(ModelKind::Gin, 0);
    let s = trivial_sample();
    let (o1, i1, z1) = time_neural(0, model.as_ref(), &s).unwrap();
    let (_, _, z2) = time_neural(0, model.as_ref(), &s).unwrap();
    assert_eq!(z1, z2);
    assert!(o1 > Duration::ZERO && i1 > Duration::ZERO);
}

fn record(classical: u64, overhead: u64, inference: u64) -> TimingRecord {
    TimingRecord {
        id: 0,
        classical: Duration::from_millis(classical),
        overhead: Duration::from_millis(overhead),
        inference: Duration::from_millis(inference),
        formula_length: 1,
        states: 1,
        transitions: 1,
        verdict: true,
        logit: 1.0,
    }
}

#[test]
fn report_ratios_and_csv() {
    let equal = speedup_report("eq", &[record(5, 0, 5), record(5, 0, 5)]);
    assert_eq!(equal.row.speedup_i, 1.0);
    assert_eq!(equal.row.speedup_o, 1.0);
    assert_eq!(equal.accuracy, 1.0);
    let r = speedup_report("x", &[record(100, 3, 1), record(50, 1, 1)]);
    assert!(r.row.speedup_o <= r.row.speedup_i);
    assert!((r.row.speedup_i - 75.0).abs() < 1e-9);

    let mut buf = Vec::new();
    write_report(&[equal.row.clone(), r.row.clone()], &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "dataset,n,classical_total,overhead_total,inference_total,speedup_I,speedup_O"
    );
    assert_eq!(read_report(buf.as_slice()).unwrap(), vec![equal.row, r.row]);
}

#[test]
fn classical_agrees_with_labels_and_tracks_length() {
    let cfg =
        DatasetConfig { scenario: Scenario::General, specs: 25, seed: 5, min_size: 2, ..DatasetConfig::default() };
    let (samples, _) = generate_dataset(&cfg).unwrap();
    let model = build_model(ModelKind::Gin, 0);
    let records = time_dataset(model.as_ref(), &samples, Scenario::General).unwrap();
    assert_eq!(records.len(), samples.len());
    assert!(records.iter().zip(&samples).all(|(r, s)| r.verdict == s.label));
    let report = speedup_report("synth", &records);
    assert!(report.row.speedup_o <= report.row.speedup_i);
    let len: Vec<f64> = records.iter().map(|r| (r.formula_length + r.states) as f64).collect();
    let time: Vec<f64> = records.iter().map(|r| r.classical.as_secs_f64()).collect();
    assert!(spearman(&len, &time).unwrap() > 0.0);
}

#[test]
fn engine_registry() {
    let input = CheckInput {
        spec: parse_ltl("a U !b").unwrap(),
        system: translate(&to_nnf(&parse_ltl("a U !b").unwrap())),
        system_formula: Some(parse_ltl("a U !b").unwrap()),
    };
    let classical = build_engine("classical", EngineOptions { scenario: Scenario::General, model: None }).unwrap();
    assert_eq!(classical.name(), "classical");
    assert!(classical.check(&input).unwrap().holds);
    let special = build_engine("classical", EngineOptions { scenario: Scenario::Special, model: None }).unwrap();
    assert!(special.check(&input).unwrap().holds);
    let no_src = CheckInput { system_formula: None, ..input.clone() };
    assert_eq!(special.check(&no_src).err(), Some(EngineError::MissingSystemFormula));

    let neural = build_engine(
        "neural",
        EngineOptions { scenario: Scenario::General, model: Some(build_model(ModelKind::Gin, 1)) },
    )
    .unwrap();
    let v = neural.check(&input).unwrap();
    assert_eq!(v.holds, v.logit.unwrap() > 0.0);
    assert!(matches!(
        build_engine("neural", EngineOptions { scenario: Scenario::General, model: None }),
        Err(EngineError::MissingModel(_))
    ));
    assert!(matches!(
        build_engine("oracle", EngineOptions { scenario: Scenario::General, model: None }),
        Err(EngineError::Unknown(_))
    ));
}
