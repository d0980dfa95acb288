//! Aggregation, histograms and file output for experiment records.
//!
//! CSV output has a header row, one record per line, LF endings and reals
//! written with 17 significant digits. Partition sequences are written as
//! `r1+r2+...`.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::{ExperimentRecord, Method};

const RECORD_HEADER: [&str; 13] = [
    "method",
    "R",
    "delta",
    "instance",
    "status",
    "E_g",
    "eps_rel",
    "retained_dim",
    "best_a",
    "sequence",
    "order",
    "terminated_early",
    "fidelity",
];

/// 17 significant digits, exactly reversible.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn format_sequence(seq: &[usize]) -> String {
    seq.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("+")
}

pub fn parse_sequence(s: &str) -> Result<Vec<usize>> {
    s.split('+')
        .map(|t| t.parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad sequence {s:?}"))))
        .collect()
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes records as CSV. The `wall_time` column appears only if at least
/// one record carries a timing.
pub fn write_records_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let timed = records.iter().any(|r| r.wall_time.is_some());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header: Vec<&str> = RECORD_HEADER.to_vec();
    if timed {
        header.push("wall_time");
    }
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row = vec![
            r.method.name().to_string(),
            r.r.to_string(),
            format_real(r.delta),
            r.instance.to_string(),
            match &r.error {
                None => "ok".to_string(),
                Some(e) => format!("failed: {e}"),
            },
            opt(r.energy, format_real),
            opt(r.eps_rel, format_real),
            opt(r.retained_dim, |d| d.to_string()),
            opt(r.best_a, format_real),
            opt(r.sequence.as_deref(), format_sequence),
            opt(r.order, |o| o.to_string()),
            opt(r.terminated_early, |b| b.to_string()),
            opt(r.fidelity, format_real),
        ];
        if timed {
            row.push(opt(r.wall_time, format_real));
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records written by [`write_records_csv`].
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::InvalidInput(format!("missing column {name}")))
    };
    let idx: Vec<usize> = RECORD_HEADER.iter().map(|h| col(h)).collect::<Result<_>>()?;
    let wall = headers.iter().position(|h| h == "wall_time");

    fn field<T: std::str::FromStr>(s: &str) -> Result<Option<T>> {
        if s.is_empty() {
            return Ok(None);
        }
        s.parse::<T>().map(Some).map_err(|_| Error::InvalidInput(format!("bad field {s:?}")))
    }
    fn required<T: std::str::FromStr>(s: &str) -> Result<T> {
        field(s)?.ok_or_else(|| Error::InvalidInput("missing required field".into()))
    }

    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(csv_err)?;
        let get = |k: usize| row.get(idx[k]).unwrap_or("");
        let status = get(4);
        out.push(ExperimentRecord {
            method: Method::parse(get(0))?,
            r: required(get(1))?,
            delta: required(get(2))?,
            instance: required(get(3))?,
            error: if status == "ok" {
                None
            } else {
                Some(status.strip_prefix("failed: ").unwrap_or(status).to_string())
            },
            energy: field(get(5))?,
            eps_rel: field(get(6))?,
            retained_dim: field(get(7))?,
            best_a: field(get(8))?,
            sequence: if get(9).is_empty() { None } else { Some(parse_sequence(get(9))?) },
            order: field(get(10))?,
            terminated_early: field(get(11))?,
            fidelity: field(get(12))?,
            wall_time: match wall {
                Some(k) => field(row.get(k).unwrap_or(""))?,
                None => None,
            },
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    method: &'static str,
    #[serde(rename = "R")]
    r: usize,
    delta: f64,
    instance: usize,
    status: &'static str,
    error: Option<&'a str>,
    #[serde(rename = "E_g")]
    energy: Option<f64>,
    eps_rel: Option<f64>,
    retained_dim: Option<usize>,
    best_a: Option<f64>,
    sequence: Option<String>,
    order: Option<usize>,
    terminated_early: Option<bool>,
    fidelity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time: Option<f64>,
}

pub fn write_records_json<W: Write>(records: &[ExperimentRecord], mut out: W) -> Result<()> {
    let rows: Vec<JsonRecord<'_>> = records
        .iter()
        .map(|r| JsonRecord {
            method: r.method.name(),
            r: r.r,
            delta: r.delta,
            instance: r.instance,
            status: if r.is_ok() { "ok" } else { "failed" },
            error: r.error.as_deref(),
            energy: r.energy,
            eps_rel: r.eps_rel,
            retained_dim: r.retained_dim,
            best_a: r.best_a,
            sequence: r.sequence.as_deref().map(format_sequence),
            order: r.order,
            terminated_early: r.terminated_early,
            fidelity: r.fidelity,
            wall_time: r.wall_time,
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &rows).map_err(|e| Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Mean relative error over the successful instances of one cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupStats {
    pub method: Method,
    #[serde(rename = "R")]
    pub r: usize,
    pub delta: f64,
    pub count: usize,
    pub failed: usize,
    pub mean: Option<f64>,
    /// Sample standard deviation over `sqrt(count)`; 0 for a single value.
    pub stderr: Option<f64>,
}

/// Minimum over R of the mean error, per method and noise strength.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XiStats {
    pub method: Method,
    pub delta: f64,
    pub xi: f64,
    pub arg_r: usize,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub groups: Vec<GroupStats>,
    pub xi: Vec<XiStats>,
}

impl Aggregate {
    pub fn group(&self, method: Method, r: usize, delta: f64) -> Option<&GroupStats> {
        self.groups.iter().find(|g| g.method == method && g.r == r && g.delta == delta)
    }

    pub fn xi_of(&self, method: Method, delta: f64) -> Option<&XiStats> {
        self.xi.iter().find(|x| x.method == method && x.delta == delta)
    }
}

/// Groups records by `(method, R, delta)` in first-seen order.
pub fn aggregate(records: &[ExperimentRecord]) -> Result<Aggregate> {
    if records.is_empty() {
        return Err(Error::InvalidInput("no records to aggregate".into()));
    }
    let mut order: Vec<(Method, usize, u64)> = Vec::new();
    let mut cells: HashMap<(Method, usize, u64), (Vec<f64>, usize)> = HashMap::new();
    for rec in records {
        let key = (rec.method, rec.r, rec.delta.to_bits());
        let cell = cells.entry(key).or_insert_with(|| {
            order.push(key);
            (Vec::new(), 0)
        });
        match (rec.is_ok(), rec.eps_rel) {
            (true, Some(e)) => cell.0.push(e),
            _ => cell.1 += 1,
        }
    }

    let groups: Vec<GroupStats> = order
        .iter()
        .map(|key| {
            let (values, failed) = &cells[key];
            let count = values.len();
            let (mean, stderr) = if count == 0 {
                (None, None)
            } else {
                let mean = values.iter().sum::<f64>() / count as f64;
                let stderr = if count < 2 {
                    0.0
                } else {
                    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                    (var / count as f64).sqrt()
                };
                (Some(mean), Some(stderr))
            };
            GroupStats { method: key.0, r: key.1, delta: f64::from_bits(key.2), count, failed: *failed, mean, stderr }
        })
        .collect();

    let mut xi_order: Vec<(Method, u64)> = Vec::new();
    let mut best: HashMap<(Method, u64), (f64, usize, f64)> = HashMap::new();
    for g in &groups {
        let (Some(mean), Some(stderr)) = (g.mean, g.stderr) else {
            continue;
        };
        let key = (g.method, g.delta.to_bits());
        match best.get_mut(&key) {
            None => {
                xi_order.push(key);
                best.insert(key, (mean, g.r, stderr));
            }
            Some(cur) => {
                if mean < cur.0 || (mean == cur.0 && g.r < cur.1) {
                    *cur = (mean, g.r, stderr);
                }
            }
        }
    }
    let xi = xi_order
        .iter()
        .map(|key| {
            let (xi, arg_r, stderr) = best[key];
            XiStats { method: key.0, delta: f64::from_bits(key.1), xi, arg_r, stderr }
        })
        .collect();
    Ok(Aggregate { groups, xi })
}

pub fn write_aggregate_csv<W: Write>(agg: &Aggregate, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["kind", "method", "R", "delta", "count", "failed", "mean_eps_rel", "stderr"]).map_err(csv_err)?;
    for g in &agg.groups {
        w.write_record([
            "mean".to_string(),
            g.method.name().to_string(),
            g.r.to_string(),
            format_real(g.delta),
            g.count.to_string(),
            g.failed.to_string(),
            opt(g.mean, format_real),
            opt(g.stderr, format_real),
        ])
        .map_err(csv_err)?;
    }
    for x in &agg.xi {
        w.write_record([
            "xi".to_string(),
            x.method.name().to_string(),
            x.arg_r.to_string(),
            format_real(x.delta),
            String::new(),
            String::new(),
            format_real(x.xi),
            format_real(x.stderr),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Partition statistics for one `(method, R, delta)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionHistogram {
    pub method: Method,
    #[serde(rename = "R")]
    pub r: usize,
    pub delta: f64,
    /// `order_counts[k]` counts runs with `O = k + 1`; the last bin is `O = R`.
    pub order_counts: Vec<usize>,
    /// Number of partitions `P` to count.
    pub partition_counts: BTreeMap<usize, usize>,
    /// Up to five most frequent sequences, most frequent first.
    pub top_sequences: Vec<(String, usize)>,
}

/// Retained overlap dimensions of thresholded runs in one `(R, delta)` cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetainedHistogram {
    #[serde(rename = "R")]
    pub r: usize,
    pub delta: f64,
    pub retained_counts: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Histograms {
    pub partitions: Vec<PartitionHistogram>,
    pub retained: Vec<RetainedHistogram>,
}

/// Partition-order, partition-count, top-sequence and retained-dimension
/// histograms. Failed rows are skipped.
pub fn emit_histograms(records: &[ExperimentRecord]) -> Histograms {
    let mut hist = Histograms::default();
    let mut p_index: HashMap<(Method, usize, u64), usize> = HashMap::new();
    let mut seq_counts: Vec<HashMap<String, usize>> = Vec::new();
    let mut t_index: HashMap<(usize, u64), usize> = HashMap::new();

    for rec in records.iter().filter(|r| r.is_ok()) {
        match rec.method {
            Method::Pqse | Method::PqseAlt => {
                let Some(seq) = &rec.sequence else { continue };
                let key = (rec.method, rec.r, rec.delta.to_bits());
                let k = *p_index.entry(key).or_insert_with(|| {
                    hist.partitions.push(PartitionHistogram {
                        method: rec.method,
                        r: rec.r,
                        delta: rec.delta,
                        order_counts: vec![0; rec.r],
                        partition_counts: BTreeMap::new(),
                        top_sequences: Vec::new(),
                    });
                    seq_counts.push(HashMap::new());
                    hist.partitions.len() - 1
                });
                let order = rec.order.unwrap_or(1).clamp(1, rec.r);
                let h = &mut hist.partitions[k];
                h.order_counts[order - 1] += 1;
                *h.partition_counts.entry(seq.len()).or_default() += 1;
                *seq_counts[k].entry(format_sequence(seq)).or_default() += 1;
            }
            Method::Tqse => {
                let Some(dim) = rec.retained_dim else { continue };
                let key = (rec.r, rec.delta.to_bits());
                let k = *t_index.entry(key).or_insert_with(|| {
                    hist.retained.push(RetainedHistogram { r: rec.r, delta: rec.delta, retained_counts: BTreeMap::new() });
                    hist.retained.len() - 1
                });
                *hist.retained[k].retained_counts.entry(dim).or_default() += 1;
            }
            Method::Qse => {}
        }
    }

    for (h, counts) in hist.partitions.iter_mut().zip(seq_counts) {
        let mut ranked: Vec<(String, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(5);
        h.top_sequences = ranked;
    }
    hist
}

/// Long-form CSV: `kind,method,R,delta,key,count`.
pub fn write_histograms_csv<W: Write>(hist: &Histograms, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["kind", "method", "R", "delta", "key", "count"]).map_err(csv_err)?;
    for h in &hist.partitions {
        let base = |kind: &str, key: String, count: usize| {
            [kind.to_string(), h.method.name().to_string(), h.r.to_string(), format_real(h.delta), key, count.to_string()]
        };
        for (k, &c) in h.order_counts.iter().enumerate() {
            w.write_record(base("order", (k + 1).to_string(), c)).map_err(csv_err)?;
        }
        for (p, &c) in &h.partition_counts {
            w.write_record(base("partitions", p.to_string(), c)).map_err(csv_err)?;
        }
        for (s, c) in &h.top_sequences {
            w.write_record(base("top_sequence", s.clone(), *c)).map_err(csv_err)?;
        }
    }
    for h in &hist.retained {
        for (d, &c) in &h.retained_counts {
            w.write_record([
                "retained_dim".to_string(),
                Method::Tqse.name().to_string(),
                h.r.to_string(),
                format_real(h.delta),
                d.to_string(),
                c.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(method: Method, r: usize, eps: f64) -> ExperimentRecord {
        ExperimentRecord {
            method,
            r,
            delta: 1e-6,
            instance: 0,
            error: None,
            energy: Some(-1.0 - eps),
            eps_rel: Some(eps),
            retained_dim: None,
            best_a: None,
            sequence: None,
            order: None,
            terminated_early: None,
            fidelity: None,
            wall_time: None,
        }
    }

    #[test]
    fn single_record_statistics() {
        let agg = aggregate(&[rec(Method::Qse, 3, 0.25)]).unwrap();
        assert_eq!(agg.groups[0].mean, Some(0.25));
        assert_eq!(agg.groups[0].stderr, Some(0.0));
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn mean_of_two() {
        let agg = aggregate(&[rec(Method::Qse, 3, 0.01), rec(Method::Qse, 3, 0.03)]).unwrap();
        assert!((agg.groups[0].mean.unwrap() - 0.02).abs() < 1e-17);
        let sd = (2.0f64 * 0.01f64.powi(2)).sqrt();
        assert!((agg.groups[0].stderr.unwrap() - sd / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn xi_takes_minimum_over_orders() {
        let recs = [rec(Method::Pqse, 1, 0.1), rec(Method::Pqse, 2, 0.01), rec(Method::Pqse, 3, 0.05)];
        let agg = aggregate(&recs).unwrap();
        let xi = agg.xi_of(Method::Pqse, 1e-6).unwrap();
        assert_eq!((xi.xi, xi.arg_r), (0.01, 2));
    }

    #[test]
    fn failed_rows_are_counted_not_averaged() {
        let mut bad = rec(Method::Qse, 2, 0.0);
        bad.error = Some("boom".into());
        bad.eps_rel = None;
        let agg = aggregate(&[bad, rec(Method::Qse, 2, 0.5)]).unwrap();
        assert_eq!((agg.groups[0].count, agg.groups[0].failed), (1, 1));
        assert_eq!(agg.groups[0].mean, Some(0.5));
    }

    #[test]
    fn histogram_bins() {
        let mut a = rec(Method::Pqse, 7, 0.0);
        a.sequence = Some(vec![3, 4]);
        a.order = Some(6);
        let mut b = rec(Method::Pqse, 7, 0.0);
        b.sequence = Some(vec![7]);
        b.order = Some(7);
        let hist = emit_histograms(&[a.clone(), a, b]);
        let h = &hist.partitions[0];
        assert_eq!(h.order_counts.len(), 7);
        assert_eq!(h.order_counts[5], 2);
        assert_eq!(h.order_counts[6], 1);
        assert_eq!(h.partition_counts.get(&2), Some(&2));
        assert_eq!(h.top_sequences[0], ("3+4".to_string(), 2));
    }

    #[test]
    fn csv_round_trip() {
        let mut a = rec(Method::Pqse, 4, 1.0 / 3.0);
        a.sequence = Some(vec![2, 3]);
        a.order = Some(4);
        a.terminated_early = Some(false);
        let mut b = rec(Method::Tqse, 4, 0.0);
        b.error = Some("no overlap eigenvalue above threshold".into());
        b.energy = None;
        b.eps_rel = None;
        let mut buf = Vec::new();
        write_records_csv(&[a.clone(), b.clone()], &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("method,R,delta,instance,status,"));
        assert!(!text.contains('\r'));
        assert_eq!(read_records_csv(buf.as_slice()).unwrap(), vec![a, b]);
    }

    #[test]
    fn reals_keep_seventeen_digits() {
        assert_eq!(format_real(0.1), "1.0000000000000001e-1");
        assert_eq!(format_real(0.1).parse::<f64>().unwrap(), 0.1);
    }
}
