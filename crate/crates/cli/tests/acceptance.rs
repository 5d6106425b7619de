//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion over all of them. Criteria 5–7 train real models and dominate
//! the runtime (tens of minutes on one core).

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use ltlgnn_bench::{speedup_report, time_dataset};
use ltlgnn_core::automata::{accepts, eval_lasso, is_empty, product, translate, Buchi, Label, LassoWord, Transition};
use ltlgnn_core::encoding::{encode_nodes, layout, EdgeKind, NodeRole, UnionGraph, FEATURE_WIDTH};
use ltlgnn_core::ltl::{parse_ltl, print_formula, random_formula, to_nnf, Formula, GenConfig, Var};
use ltlgnn_datagen::{generate_dataset, Case, DatasetConfig, Sample, Scenario, Split};
use ltlgnn_neural::loss::bce_batch;
use ltlgnn_neural::{
    bce_loss, build_model, evaluate, predict_logits, train, EncodedGraph, GraphClassifier, IndexEncoding, LabeledGraph,
    Metrics, ModelKind, Tensor, TrainConfig,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn nnf(text: &str) -> Formula {
    to_nnf(&parse_ltl(text).unwrap())
}

fn var(c: char) -> Var {
    Var::from_char(c).unwrap()
}

// ---------------------------------------------------------------- 1

fn translator_differential() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let gen = GenConfig { num_vars: 3, ..GenConfig::default() };
    let (mut formulas, mut words, mut disagreements) = (0, 0, Vec::new());
    while formulas < 500 {
        let f = to_nnf(&random_formula(&gen.with_size(rng.random_range(1..=8)), &mut rng));
        if f.len() > 8 {
            continue;
        }
        formulas += 1;
        let b = translate(&f);
        let pool = f.vars() | var('a').bit();
        for _ in 0..50 {
            let w = LassoWord::random(pool, 4, 4, &mut rng);
            words += 1;
            if accepts(&b, &w) != eval_lasso(&f, &w).unwrap() {
                disagreements.push(print_formula(&f));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        disagreements.is_empty() && secs < 300.0,
        format!("{formulas} formulas, {words} lassos, {} disagreements, {secs:.1}s", disagreements.len()),
    )
}

// ---------------------------------------------------------------- 2

fn contradiction_law() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let gen = GenConfig::default();
    let mut formulas = vec![parse_ltl("a U !b").unwrap()];
    formulas.extend((0..199).map(|_| random_formula(&gen.with_size(rng.random_range(1..=12)), &mut rng)));
    let empty = formulas
        .iter()
        .filter(|f| is_empty(&product(&translate(&to_nnf(f)), &translate(&to_nnf(&Formula::not((*f).clone()))))))
        .count();
    verdict(empty == formulas.len(), format!("{empty}/{} products empty, including a U !b", formulas.len()))
}

// ---------------------------------------------------------------- 3

/// Which slots a node of this role may set.
fn allowed(role: &NodeRole, slot: usize) -> bool {
    match role {
        NodeRole::State { .. } => slot == layout::INITIAL || slot == layout::FINAL,
        NodeRole::Transition { .. } => slot < layout::OPERATOR || slot == layout::SOURCE || slot == layout::DESTINATION,
        NodeRole::Operator(_) => (layout::OPERATOR..layout::INITIAL).contains(&slot),
        NodeRole::Leaf(_) => slot < layout::OPERATOR,
    }
}

fn row_ok(role: &NodeRole, row: &[f64]) -> bool {
    let set: Vec<usize> = (0..row.len()).filter(|&j| row[j] != 0.0).collect();
    if !set.iter().all(|&j| allowed(role, j)) {
        return false;
    }
    match role {
        NodeRole::Operator(_) | NodeRole::Leaf(_) => set.len() == 1 && row[set[0]] == 1.0,
        NodeRole::Transition { label, .. } => {
            let literal = |j: usize| j >= layout::POSITIVE && j < layout::OPERATOR;
            let clash = (0..Var::COUNT).any(|v| row[layout::POSITIVE + v] != 0.0 && row[layout::NEGATIVE + v] != 0.0);
            let constant = row[layout::CONSTANT] == 1.0;
            !clash && constant == label.is_true() && !(constant && set.iter().any(|&j| literal(j)))
        }
        NodeRole::State { .. } => true,
    }
}

fn worked_example() -> Buchi {
    let e1 = Label::from_literals([(var('a'), true), (var('b'), true)]).unwrap();
    let e3 = Label::from_literals([(var('b'), false)]).unwrap();
    let edges = vec![
        Transition { src: 0, dst: 0, label: e1 },
        Transition { src: 1, dst: 1, label: Label::TRUE },
        Transition { src: 0, dst: 1, label: e3 },
    ];
    Buchi::new(2, 0, [1], [var('a'), var('b')], edges).unwrap()
}

fn encoding_invariants() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gen = GenConfig { num_vars: 10, ..GenConfig::default() };
    let mut bad_rows = 0;
    let mut bad_edges = 0;
    for _ in 0..1000 {
        let spec = to_nnf(&random_formula(&gen.with_size(rng.random_range(1..=15)), &mut rng));
        let system = translate(&to_nnf(&random_formula(&gen.with_size(rng.random_range(1..=10)), &mut rng)));
        let c = UnionGraph::build(&system, &spec).unwrap();
        let rows = encode_nodes(&c);
        assert_eq!(rows.len(), c.num_nodes());
        bad_rows += c
            .nodes
            .iter()
            .zip(&rows)
            .filter(|(role, row)| row.len() != FEATURE_WIDTH || !row_ok(role, &row[..]))
            .count();
        bad_edges += c
            .edges_of(EdgeKind::Union)
            .filter(|e| {
                let (t, l) = (&c.nodes[e.u.min(e.v)], &c.nodes[e.u.max(e.v)]);
                !(matches!(t, NodeRole::Transition { .. }) && matches!(l, NodeRole::Leaf(_)))
            })
            .count();
    }

    // E1, E2, E3 are nodes 2..=4; the tree of a U !b is a (5), !b (6), U (7)
    let c = UnionGraph::build(&worked_example(), &nnf("a U !b")).unwrap();
    let mut unions: Vec<(usize, usize)> = c.edges_of(EdgeKind::Union).map(|e| (e.u.min(e.v), e.u.max(e.v))).collect();
    unions.sort();
    let worked = unions == [(2, 5), (2, 6), (4, 6)];
    verdict(
        bad_rows == 0 && bad_edges == 0 && worked,
        format!("1000 graphs: {bad_rows} rows violate role/slot exclusivity, {bad_edges} bad union edges; worked-example union edges {unions:?}"),
    )
}

// ---------------------------------------------------------------- 4

fn encoded(system: &str, spec: &str) -> EncodedGraph {
    EncodedGraph::new(&UnionGraph::build(&translate(&nnf(system)), &nnf(spec)).unwrap())
}

fn loss_of(model: &mut dyn GraphClassifier, graphs: &[&EncodedGraph], labels: &[f64]) -> f64 {
    let batch = model.prepare(graphs);
    bce_batch(&model.forward_train(&batch, &mut ChaCha8Rng::seed_from_u64(4)), labels).0
}

/// Largest per-tensor ‖analytic − numeric‖ / (‖analytic‖ + ‖numeric‖) over
/// sampled entries of every GIN parameter.
fn gin_gradient_error(graphs: &[&EncodedGraph], labels: &[f64]) -> f64 {
    let mut model = build_model(ModelKind::Gin, 4);
    model.zero_grad();
    let batch = model.prepare(graphs);
    let logits = model.forward_train(&batch, &mut ChaCha8Rng::seed_from_u64(4));
    model.backward(&batch, &bce_batch(&logits, labels).1);
    let analytic: Vec<Tensor> = model.params_mut().iter().map(|p| p.grad.clone()).collect();
    let mut pick = ChaCha8Rng::seed_from_u64(40);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for (k, grad) in analytic.iter().enumerate() {
        let (mut diff, mut a2, mut n2) = (0.0, 0.0, 0.0);
        for _ in 0..16 {
            let (i, j) = (pick.random_range(0..grad.nrows()), pick.random_range(0..grad.ncols()));
            let original = model.params_mut()[k].value[[i, j]];
            model.params_mut()[k].value[[i, j]] = original + h;
            let up = loss_of(model.as_mut(), graphs, labels);
            model.params_mut()[k].value[[i, j]] = original - h;
            let down = loss_of(model.as_mut(), graphs, labels);
            model.params_mut()[k].value[[i, j]] = original;
            let numeric = (up - down) / (2.0 * h);
            diff += (grad[[i, j]] - numeric).powi(2);
            a2 += grad[[i, j]].powi(2);
            n2 += numeric.powi(2);
        }
        let scale = a2.sqrt() + n2.sqrt();
        if scale > 1e-7 {
            worst = worst.max(diff.sqrt() / scale);
        }
    }
    worst
}

fn numerical_checks() -> Verdict {
    let graphs = [encoded("a U !b", "a U !b"), encoded("G a", "F (a & b)"), encoded("X c | b", "c R b")];
    let refs: Vec<&EncodedGraph> = graphs.iter().collect();
    let largest = graphs.iter().map(EncodedGraph::num_nodes).max().unwrap();
    let grad_err = gin_gradient_error(&refs, &[1.0, 0.0, 1.0]);

    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let model = build_model(ModelKind::Gin, 5);
    let mut perm_err: f64 = 0.0;
    for g in &graphs {
        let base = model.predict(&model.prepare(&[g]))[0];
        for _ in 0..10 {
            let mut perm: Vec<usize> = (0..g.num_nodes()).collect();
            perm.shuffle(&mut rng);
            let shuffled = g.permuted(&perm);
            perm_err = perm_err.max((model.predict(&model.prepare(&[&shuffled]))[0] - base).abs());
        }
    }
    let bce_err = (bce_loss(0.0, 1.0).0 - std::f64::consts::LN_2).abs();
    verdict(
        largest <= 20 && grad_err < 1e-4 && perm_err < 1e-6 && bce_err <= 1e-12,
        format!(
            "GIN gradient rel. error {grad_err:.2e} (graphs ≤ {largest} nodes), permutation drift {perm_err:.2e}, |bce(0,1) − ln 2| = {bce_err:.1e}"
        ),
    )
}

// ---------------------------------------------------------------- 5, 6

const LR: f64 = 2e-3;
const RUNS: u64 = 3;

struct Corpus {
    samples: Vec<Sample>,
    data: Vec<LabeledGraph>,
}

fn corpus(scenario: Scenario, specs: usize, seed: u64) -> Corpus {
    let cfg = DatasetConfig { scenario, specs, seed, ..DatasetConfig::default() };
    let (all, _) = generate_dataset(&cfg).unwrap();
    let samples: Vec<Sample> = all.into_iter().filter(|s| s.split == Split::Train).collect();
    let data = samples
        .iter()
        .map(|s| LabeledGraph { graph: EncodedGraph::new(&s.union_graph().unwrap()), label: s.label })
        .collect();
    Corpus { samples, data }
}

struct Trained {
    metrics: Metrics,
    /// False negatives per case, summed over runs.
    missed: BTreeMap<Case, usize>,
    false_positives: usize,
    first: Box<dyn GraphClassifier>,
}

fn train_runs(kind: ModelKind, c: &Corpus) -> Trained {
    let mut confusions = Vec::new();
    let mut missed = BTreeMap::new();
    let mut false_positives = 0;
    let mut first = None;
    for run in 0..RUNS {
        let cfg = TrainConfig { lr: LR, seed: run, indices: IndexEncoding::Scaled, ..TrainConfig::default() };
        let out = train(kind, &cfg, &c.data).unwrap();
        let val: Vec<&LabeledGraph> = out.val_indices.iter().map(|&i| &c.data[i]).collect();
        confusions.push(evaluate(out.model.as_ref(), &val));
        let graphs: Vec<&EncodedGraph> = val.iter().map(|d| &d.graph).collect();
        for (&i, z) in out.val_indices.iter().zip(predict_logits(out.model.as_ref(), &graphs)) {
            match (c.data[i].label, z > 0.0) {
                (true, false) => *missed.entry(c.samples[i].case).or_insert(0) += 1,
                (false, true) => false_positives += 1,
                _ => {}
            }
        }
        first.get_or_insert(out.model);
    }
    Trained { metrics: Metrics::over_runs(&confusions), missed, false_positives, first: first.unwrap() }
}

fn acc(t: &Trained) -> String {
    format!("{:.3} ± {:.3}", t.metrics.accuracy.mean, t.metrics.accuracy.std)
}

fn special_learning(c: &Corpus) -> (Verdict, Box<dyn GraphClassifier>) {
    let start = Instant::now();
    let gin = train_runs(ModelKind::Gin, c);
    let mlp = train_runs(ModelKind::Mlp, c);
    let link = train_runs(ModelKind::Link, c);
    let (g, m, l) = (gin.metrics.accuracy.mean, mlp.metrics.accuracy.mean, link.metrics.accuracy.mean);
    let v = verdict(
        c.data.len() >= 2000 && g >= 0.85 && m <= 0.65 && g >= l,
        format!(
            "{} training samples; val accuracy over {RUNS} runs: GIN {}, MLP {}, Link {} ({:.0}s)",
            c.data.len(),
            acc(&gin),
            acc(&mlp),
            acc(&link),
            start.elapsed().as_secs_f64()
        ),
    );
    (v, gin.first)
}

fn general_learning(c: &Corpus) -> (Verdict, Box<dyn GraphClassifier>) {
    let start = Instant::now();
    let gin = train_runs(ModelKind::Gin, c);
    let m = &gin.metrics;
    let fn_total: usize = gin.missed.values().sum();
    let strict = gin.missed.get(&Case::StrictImplication).copied().unwrap_or(0);
    let v = verdict(
        m.accuracy.mean >= 0.70 && m.precision.mean > m.recall.mean && 2 * strict > fn_total,
        format!(
            "GIN val accuracy {}, precision {:.3}, recall {:.3}; false negatives {fn_total} ({strict} strict-implication, by case {:?}), false positives {} ({:.0}s)",
            acc(&gin),
            m.precision.mean,
            m.recall.mean,
            gin.missed.iter().map(|(k, v)| (k.name(), *v)).collect::<Vec<_>>(),
            gin.false_positives,
            start.elapsed().as_secs_f64()
        ),
    );
    (v, gin.first)
}

// ---------------------------------------------------------------- 7

fn benchmark_integrity(sets: [(&str, &Corpus, Scenario, &dyn GraphClassifier); 2]) -> Verdict {
    let mut pass = true;
    let mut details = Vec::new();
    for (name, c, scenario, model) in sets {
        let samples = &c.samples[..500.min(c.samples.len())];
        match time_dataset(model, samples, scenario) {
            Ok(records) => {
                let r = speedup_report(name, &records).row;
                let ok = records.len() == 500 && r.speedup_o <= r.speedup_i;
                pass &= ok;
                details.push(format!(
                    "{name}: 500/500 verdicts match labels, (I) {:.1}x, (O) {:.1}x",
                    r.speedup_i, r.speedup_o
                ));
            }
            Err(e) => {
                pass = false;
                details.push(format!("{name}: {e}"));
            }
        }
    }
    verdict(pass, details.join("; "))
}

// ---------------------------------------------------------------- 8

fn ltlgnn(dir: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_ltlgnn"))
        .args(args)
        .current_dir(dir)
        .env("OCTAL_SEED", "11")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "ltlgnn {args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn pipeline(dir: &Path) -> Vec<(String, Vec<u8>)> {
    std::fs::create_dir(dir.join("runs")).unwrap();
    ltlgnn(dir, &["gen", "--scenario", "special", "--specs", "40", "--out", "data.jsonl"]);
    ltlgnn(dir, &["train", "--data", "data.jsonl", "--runs", "2", "--epochs", "3", "--lr", "1e-3", "--out", "runs"]);
    ltlgnn(
        dir,
        &[
            "eval",
            "--data",
            "data.jsonl",
            "--checkpoint",
            "runs/run-0.ckpt",
            "runs/run-1.ckpt",
            "--split",
            "all",
            "--out",
            "report.txt",
        ],
    );
    [
        "data.jsonl",
        "runs/run-0.ckpt",
        "runs/run-1.ckpt",
        "runs/run-0.history.csv",
        "runs/run-1.history.csv",
        "report.txt",
    ]
    .into_iter()
    .map(|f| (f.to_string(), std::fs::read(dir.join(f)).unwrap()))
    .collect()
}

fn determinism() -> Verdict {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (first, second) = (pipeline(a.path()), pipeline(b.path()));
    let differing: Vec<&str> =
        first.iter().zip(&second).filter(|(x, y)| x.1 != y.1).map(|(x, _)| x.0.as_str()).collect();
    verdict(
        differing.is_empty(),
        format!("gen/train/eval twice with OCTAL_SEED=11: {} files compared, differing {differing:?}", first.len()),
    )
}

// ----------------------------------------------------------------

#[test]
fn acceptance() {
    let mut results = Vec::new();
    let mut report = |n: usize, v: Verdict| {
        println!("criterion {n}: {} — {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        results.push((n, v.pass));
    };
    report(1, translator_differential());
    report(2, contradiction_law());
    report(3, encoding_invariants());
    report(4, numerical_checks());

    let special = corpus(Scenario::Special, 2000, 5);
    let (v5, special_model) = special_learning(&special);
    report(5, v5);
    let general = corpus(Scenario::General, 1000, 6);
    let (v6, general_model) = general_learning(&general);
    report(6, v6);
    report(
        7,
        benchmark_integrity([
            ("special", &special, Scenario::Special, special_model.as_ref()),
            ("general", &general, Scenario::General, general_model.as_ref()),
        ]),
    );
    report(8, determinism());

    let failed: Vec<usize> = results.iter().filter(|r| !r.1).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
