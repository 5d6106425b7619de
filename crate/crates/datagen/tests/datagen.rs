use std::io::Cursor;

use ltlgnn_core::automata::{equivalent, holds, is_empty, product, satisfiable, translate, Buchi};
use ltlgnn_core::ltl::{parse_ltl, to_nnf, Formula};
use ltlgnn_datagen::{
    generate_dataset, make_disjoint, make_equivalent, make_overlap, make_reverse_implicant, make_strict_implicant,
    read_jsonl, write_jsonl, Case, DatasetConfig, JsonlError, MakerConfig, MakerError, Scenario, Split,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f(s: &str) -> Formula {
    parse_ltl(s).unwrap()
}

#[test]
fn equivalent_maker() {
    let mc = MakerConfig::default();
    let (src, b) = make_equivalent(&f("a U !b"), &mc).unwrap();
    assert_eq!(src, f("a U !b"));
    assert_eq!(b, translate(&f("a U !b")));
    let (_, b) = make_equivalent(&f("1"), &mc).unwrap();
    assert_eq!(b, Buchi::universal([]));
    assert_eq!(make_equivalent(&f("a & !a"), &mc), Err(MakerError::Unsatisfiable));
    let double = Formula::not(Formula::not(f("a U !b")));
    assert!(equivalent(&to_nnf(&double), &f("a U !b")));
}

#[test]
fn strict_implicant_maker() {
    let mc = MakerConfig::default();
    for (phi, seed) in [(f("F a"), 1), (f("a | !a"), 2), (f("G (a | X b)"), 3)] {
        let (src, b) = make_strict_implicant(&phi, &mc, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert!(holds(&src, &phi) && !holds(&phi, &src), "{phi} / {src}");
        assert!(satisfiable(&src));
        assert_eq!(b, translate(&to_nnf(&src)));
        let again = make_strict_implicant(&phi, &mc, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        assert_eq!(again.0, src);
    }
    assert!(holds(&f("F a & G b"), &f("F a")) && !holds(&f("F a"), &f("F a & G b")));
}

#[test]
fn overlap_maker() {
    let mc = MakerConfig::default();
    let phi = f("G a");
    let (src, _) = make_overlap(&phi, &mc, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert!(satisfiable(&to_nnf(&Formula::and(src.clone(), phi.clone()))));
    assert!(satisfiable(&to_nnf(&Formula::and(src.clone(), Formula::not(phi.clone())))));
    assert!(!holds(&src, &phi));
    // independent variable overlaps
    assert!(satisfiable(&f("F b & G a")) && satisfiable(&f("F b & F !a")));
}

#[test]
fn disjoint_maker() {
    let mc = MakerConfig::default();
    let (src, b) = make_disjoint(&f("G a"), &mc).unwrap();
    assert_eq!(src, f("F !a"));
    assert!(is_empty(&product(&b, &translate(&f("G a")))));
    assert_eq!(make_disjoint(&f("a | !a"), &mc), Err(MakerError::Valid));
}

#[test]
fn reverse_implicant_maker() {
    let mc = MakerConfig::default();
    let phi = f("G a");
    let (src, _) = make_reverse_implicant(&phi, &mc, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    assert!(holds(&phi, &src) && !holds(&src, &phi));
    assert!(!holds(&f("G a | F b"), &phi));
}

fn config(scenario: Scenario, specs: usize, seed: u64) -> DatasetConfig {
    DatasetConfig { scenario, specs, seed, ..DatasetConfig::default() }
}

#[test]
fn general_dataset_shape() {
    let (samples, stats) = generate_dataset(&config(Scenario::General, 40, 7)).unwrap();
    assert_eq!(samples.len(), 160);
    assert_eq!(stats.accepted, 40);
    assert_eq!(samples.iter().filter(|s| s.label).count(), 80);
    for group in samples.chunks(4) {
        let cases: Vec<Case> = group.iter().map(|s| s.case).collect();
        assert_eq!(cases, [Case::Equivalent, Case::StrictImplication, Case::Overlap, Case::Disjoint]);
        assert!(group.iter().all(|s| s.phi == group[0].phi && s.split == group[0].split));
        assert_eq!(group.iter().map(|s| s.label).collect::<Vec<_>>(), [true, true, false, false]);
    }
    for s in &samples {
        assert!(s.phi.is_nnf());
        assert!(s.phi.len() <= 80 && s.system.num_states() <= 95);
        assert_eq!(s.system, translate(&to_nnf(&s.phi_src)));
        assert_eq!(s.label, holds(&s.phi_src, &s.phi));
    }
    let test_specs = samples.iter().filter(|s| s.split == Split::Test).count() / 4;
    assert_eq!(test_specs, 4);
    assert_eq!(Scenario::infer(&samples), Scenario::General);
}

#[test]
fn special_dataset_shape_and_truthful_tags() {
    let (samples, _) = generate_dataset(&config(Scenario::Special, 30, 8)).unwrap();
    assert_eq!(samples.len(), 60);
    assert_eq!(samples.iter().filter(|s| s.label).count(), 30);
    let strict = samples.iter().filter(|s| s.case == Case::StrictImplication).count();
    assert_eq!(strict, 15);
    for s in &samples {
        assert_eq!(s.label, equivalent(&s.phi_src, &s.phi));
        let forward = holds(&s.phi_src, &s.phi);
        let backward = holds(&s.phi, &s.phi_src);
        let meet = satisfiable(&to_nnf(&Formula::and(s.phi_src.clone(), s.phi.clone())));
        match s.case {
            Case::Equivalent => assert!(forward && backward),
            Case::StrictImplication => assert!(forward && !backward),
            Case::ReverseImplication => assert!(!forward && backward),
            Case::Overlap => assert!(meet && !forward),
            Case::Disjoint => assert!(!meet),
        }
    }
    assert_eq!(Scenario::infer(&samples), Scenario::Special);
}

#[test]
fn generation_is_deterministic() {
    let cfg = config(Scenario::Special, 20, 3);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_jsonl(&generate_dataset(&cfg).unwrap().0, &mut a).unwrap();
    write_jsonl(&generate_dataset(&cfg).unwrap().0, &mut b).unwrap();
    assert_eq!(a, b);
    let mut c = Vec::new();
    write_jsonl(&generate_dataset(&config(Scenario::Special, 20, 4)).unwrap().0, &mut c).unwrap();
    assert_ne!(a, c);
}

#[test]
fn jsonl_round_trip() {
    let (samples, _) = generate_dataset(&config(Scenario::General, 10, 1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.jsonl");
    write_jsonl(&samples, std::fs::File::create(&path).unwrap()).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 40);
    let back = read_jsonl(Cursor::new(text)).unwrap();
    assert_eq!(back, samples);
    assert!(read_jsonl(Cursor::new("")).unwrap().is_empty());
}

#[test]
fn jsonl_errors_name_the_line() {
    let good = r#"{"phi":"a","phi_src":"a","hoa":"HOA: v1\nStates: 1\nStart: 0\nAP: 1 \"a\"\nacc-name: Buchi\nAcceptance: 1 Inf(0)\n--BODY--\nState: 0 {0}\n[0] 0\n--END--\n","label":1,"scenario":"equivalent","split":"train"}"#;
    assert_eq!(read_jsonl(Cursor::new(good)).unwrap().len(), 1);
    let bad = good.replace("equivalent", "sideways");
    let text = format!("{good}\n{bad}\n");
    match read_jsonl(Cursor::new(text)) {
        Err(JsonlError::Malformed { line, message }) => {
            assert_eq!(line, 2);
            assert!(message.contains("sideways"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn config_validation() {
    let mut cfg = DatasetConfig { max_states: 200, ..DatasetConfig::default() };
    assert!(generate_dataset(&cfg).is_err());
    cfg.max_states = 95;
    cfg.min_size = 20;
    assert!(generate_dataset(&cfg).is_err());
}
