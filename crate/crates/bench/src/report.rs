use std::io;

use serde::{Deserialize, Serialize};

use crate::timing::TimingRecord;

/// One CSV row per benchmarked dataset. Speedup (I) counts inference only;
/// speedup (O) adds the graph-construction overhead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedupRow {
    pub dataset: String,
    pub n: usize,
    pub classical_total: f64,
    pub overhead_total: f64,
    pub inference_total: f64,
    #[serde(rename = "speedup_I")]
    pub speedup_i: f64,
    #[serde(rename = "speedup_O")]
    pub speedup_o: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedupReport {
    pub row: SpeedupRow,
    /// Share of records whose neural verdict (logit > 0) matches the classical one.
    pub accuracy: f64,
}

pub fn speedup_report(dataset: &str, records: &[TimingRecord]) -> SpeedupReport {
    let total = |f: fn(&TimingRecord) -> f64| records.iter().map(f).sum::<f64>();
    let classical = total(|r| r.classical.as_secs_f64());
    let overhead = total(|r| r.overhead.as_secs_f64());
    let inference = total(|r| r.inference.as_secs_f64());
    let correct = records.iter().filter(|r| (r.logit > 0.0) == r.verdict).count();
    SpeedupReport {
        row: SpeedupRow {
            dataset: dataset.to_string(),
            n: records.len(),
            classical_total: classical,
            overhead_total: overhead,
            inference_total: inference,
            speedup_i: classical / inference,
            speedup_o: classical / (inference + overhead),
        },
        accuracy: if records.is_empty() { 0.0 } else { correct as f64 / records.len() as f64 },
    }
}

pub fn write_report<W: io::Write>(rows: &[SpeedupRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_report<R: io::Read>(input: R) -> csv::Result<Vec<SpeedupRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

/// Spearman rank correlation, ties given their average rank. `None` when
/// either side is constant or the inputs are shorter than two.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let (mut cov, mut vx, mut vy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mean) * (b - mean);
        vx += (a - mean).powi(2);
        vy += (b - mean).powi(2);
    }
    (vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}

fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}
