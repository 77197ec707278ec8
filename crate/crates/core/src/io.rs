//! File formats.
//!
//! * Graph: JSON `{"n": 9, "edges": [[0, 1], [1, 2, 0.5], ...]}`; a third
//!   entry is the edge weight (number or string such as `"1/3"`), default 1.
//! * Partition: CSV `vertex_id,label`, optional header, one row per vertex.
//! * Vertex weights: CSV `vertex_id,weight`, optional header.
//! * Ensemble: JSON lines `{"labels": [...]}`.
//! * Distance matrix: headerless CSV, or JSON `{"n": .., "d": [row-major]}`.
//!
//! Writers go through [`write_atomic`], so a failed run never leaves a
//! truncated output file behind.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ensemble::DistanceMatrix;
use crate::graph::{Edge, Graph};
use crate::numeric::{parse_decimal, Rational};
use crate::partition::Partition;
use crate::{Error, Result};

/// Write `contents` to `path` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(n) => parse_decimal(&n.to_string()),
        Value::String(s) => parse_decimal(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

fn rational_to_json(r: &Rational) -> Value {
    if r.is_integer() {
        json!(r.to_integer() as i64)
    } else {
        json!(format!("{}/{}", r.numer(), r.denom()))
    }
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("graph JSON: {e}")))?;
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("graph JSON needs an integer \"n\"".into()))?
        as usize;
    let raw = v
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("graph JSON needs an \"edges\" array".into()))?;
    let mut edges = Vec::with_capacity(raw.len());
    for e in raw {
        let items = e
            .as_array()
            .filter(|a| a.len() == 2 || a.len() == 3)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "edge must be [tail, head] or [tail, head, weight], got {e}"
                ))
            })?;
        let end = |i: usize| {
            items[i]
                .as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse(format!("bad vertex id in edge {e}")))
        };
        let weight = match items.get(2) {
            Some(w) => rational_from_json(w)?,
            None => Rational::from_integer(1),
        };
        edges.push(Edge {
            tail: end(0)?,
            head: end(1)?,
            weight,
        });
    }
    Graph::new(n, edges)
}

pub fn graph_to_json(g: &Graph) -> Value {
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|e| {
            if e.weight == Rational::from_integer(1) {
                json!([e.tail, e.head])
            } else {
                json!([e.tail, e.head, rational_to_json(&e.weight)])
            }
        })
        .collect();
    json!({ "n": g.vertex_count(), "edges": edges })
}

/// Rows of a two-column `vertex_id,value` CSV, skipping a header row whose
/// first cell is not an integer.
fn two_column_rows(text: &str) -> Result<Vec<(usize, String)>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("line {}: expected two columns", lineno + 1)))?;
        match a.trim().parse::<usize>() {
            Ok(id) => rows.push((id, b.trim().to_string())),
            Err(_) if lineno == 0 => continue,
            Err(_) => {
                return Err(Error::Parse(format!(
                    "line {}: bad vertex id {a:?}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(rows)
}

fn dense<T: Clone>(rows: Vec<(usize, T)>, n: usize, what: &str) -> Result<Vec<T>> {
    let mut out: Vec<Option<T>> = vec![None; n];
    for (id, value) in rows {
        let slot = out
            .get_mut(id)
            .ok_or_else(|| Error::Parse(format!("{what}: vertex {id} out of range for n = {n}")))?;
        if slot.replace(value).is_some() {
            return Err(Error::Parse(format!("{what}: vertex {id} listed twice")));
        }
    }
    out.into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| Error::Parse(format!("{what}: vertex {v} missing"))))
        .collect()
}

/// Labels from a `vertex_id,label` CSV; `k` is one more than the largest label.
pub fn parse_labels_csv(text: &str, n: usize) -> Result<Vec<usize>> {
    let rows = two_column_rows(text)?
        .into_iter()
        .map(|(id, s)| {
            s.parse::<usize>()
                .map(|l| (id, l))
                .map_err(|_| Error::Parse(format!("bad label {s:?} for vertex {id}")))
        })
        .collect::<Result<Vec<_>>>()?;
    dense(rows, n, "partition")
}

pub fn parse_partition_csv(g: &Graph, text: &str) -> Result<Partition> {
    let labels = parse_labels_csv(text, g.vertex_count())?;
    let k = labels.iter().max().map_or(0, |m| m + 1);
    Partition::from_labels(g, &labels, k)
}

pub fn partition_to_csv(p: &Partition) -> String {
    let mut s = String::from("vertex_id,label\n");
    for (v, l) in p.labels().iter().enumerate() {
        s.push_str(&format!("{v},{l}\n"));
    }
    s
}

pub fn parse_weights_csv(text: &str, n: usize) -> Result<Vec<Rational>> {
    let rows = two_column_rows(text)?
        .into_iter()
        .map(|(id, s)| parse_decimal(&s).map(|w| (id, w)))
        .collect::<Result<Vec<_>>>()?;
    dense(rows, n, "weights")
}

#[derive(Serialize, Deserialize)]
struct EnsembleRecord {
    labels: Vec<usize>,
}

/// Label vectors from JSON lines. Blank lines are ignored.
pub fn parse_ensemble_jsonl(text: &str) -> Result<Vec<Vec<usize>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str::<EnsembleRecord>(l)
                .map(|r| r.labels)
                .map_err(|e| Error::Parse(format!("ensemble line {}: {e}", i + 1)))
        })
        .collect()
}

/// Partitions from JSON lines, all with `k` equal to the largest `k` found.
pub fn read_ensemble(g: &Graph, text: &str) -> Result<Vec<Partition>> {
    let all = parse_ensemble_jsonl(text)?;
    let k = all
        .iter()
        .flat_map(|l| l.iter().copied())
        .max()
        .map_or(0, |m| m + 1);
    all.iter()
        .map(|labels| Partition::from_labels(g, labels, k))
        .collect()
}

pub fn ensemble_to_jsonl(ensemble: &[Partition]) -> String {
    let mut s = String::new();
    for p in ensemble {
        let record = EnsembleRecord {
            labels: p.labels().to_vec(),
        };
        s.push_str(&serde_json::to_string(&record).expect("label vectors always serialize"));
        s.push('\n');
    }
    s
}

pub fn parse_matrix_json(text: &str) -> Result<DistanceMatrix> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("matrix JSON needs an integer \"n\"".into()))?
        as usize;
    let d = v
        .get("d")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("matrix JSON needs a \"d\" array".into()))?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::Parse(format!("bad matrix entry {x}")))
        })
        .collect::<Result<Vec<_>>>()?;
    DistanceMatrix::from_f64(n, d)
}

/// Matrix from either format, chosen by the first non-blank character.
pub fn parse_matrix(text: &str) -> Result<DistanceMatrix> {
    if text.trim_start().starts_with('{') {
        parse_matrix_json(text)
    } else {
        DistanceMatrix::from_csv(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::grid_graph;

    #[test]
    fn graph_json_round_trip() {
        let text = r#"{"n": 3, "edges": [[0, 1], [1, 2, 0.25], [0, 2, "1/3"]]}"#;
        let g = parse_graph_json(text).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.edges()[1].weight, Rational::new(1, 4));
        assert_eq!(g.edges()[2].weight, Rational::new(1, 3));
        let back = parse_graph_json(&graph_to_json(&g).to_string()).unwrap();
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn graph_json_errors() {
        assert!(parse_graph_json("{").is_err());
        assert!(parse_graph_json(r#"{"edges": []}"#).is_err());
        assert!(parse_graph_json(r#"{"n": 2, "edges": [[0]]}"#).is_err());
        assert!(parse_graph_json(r#"{"n": 2, "edges": [[0, 1, -1]]}"#).is_err());
        assert!(parse_graph_json(r#"{"n": 3, "edges": [[0, 1]]}"#).is_err());
    }

    #[test]
    fn partition_csv() {
        let g = grid_graph(2, 2).unwrap();
        let p = parse_partition_csv(&g, "vertex_id,label\n0,0\n1,1\n2,0\n3,1\n").unwrap();
        assert_eq!(p.labels(), &[0, 1, 0, 1]);
        assert_eq!(
            parse_partition_csv(&g, &partition_to_csv(&p))
                .unwrap()
                .labels(),
            p.labels()
        );
        // unordered rows, no header
        let q = parse_partition_csv(&g, "3,1\n0,0\n2,1\n1,0\n").unwrap();
        assert_eq!(q.labels(), &[0, 0, 1, 1]);
        assert!(parse_partition_csv(&g, "0,0\n1,1\n2,0\n").is_err());
        assert!(parse_partition_csv(&g, "0,0\n1,1\n2,0\n3,1\n3,0\n").is_err());
        assert!(parse_partition_csv(&g, "0,0\n1,x\n2,0\n3,1\n").is_err());
    }

    #[test]
    fn weights_csv() {
        let w = parse_weights_csv("vertex_id,weight\n1,0.5\n0,2\n", 2).unwrap();
        assert_eq!(w, vec![Rational::from_integer(2), Rational::new(1, 2)]);
    }

    #[test]
    fn ensemble_jsonl() {
        let g = grid_graph(2, 2).unwrap();
        let ens =
            read_ensemble(&g, "{\"labels\": [0, 0, 1, 1]}\n\n{\"labels\":[0,1,0,1]}\n").unwrap();
        assert_eq!(ens.len(), 2);
        assert_eq!(
            ensemble_to_jsonl(&ens),
            "{\"labels\":[0,0,1,1]}\n{\"labels\":[0,1,0,1]}\n"
        );
        assert!(parse_ensemble_jsonl("{\"lab\": []}").is_err());
    }

    #[test]
    fn matrix_formats_and_atomic_write() {
        let d = DistanceMatrix::from_f64(2, vec![0.0, 1.5, 1.5, 0.0]).unwrap();
        assert_eq!(parse_matrix(&d.to_json().to_string()).unwrap(), d);
        assert_eq!(parse_matrix(&d.to_csv()).unwrap(), d);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        write_atomic(&path, d.to_csv().as_bytes()).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "0,1.5\n1.5,0\n");
        assert!(write_atomic(&dir.path().join("missing/m.csv"), b"x").is_err());
    }
}
