//! Text encoding of [`ScoreMatrix`].
//!
//! ```text
//! score-matrix/1
//! landmarks 2
//! "stop sign"
//! "white building"
//! nodes 3
//! 0 1 2
//! logits
//! <row 0: 3 reals>
//! <row 1: 3 reals>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{ScoreError, ScoreMatrix};
use crate::graph::NodeId;
use crate::scalar::{fmt_real, Scalar};

pub const SCORES_VERSION: &str = "score-matrix/1";

pub fn render_scores<S: Scalar>(m: &ScoreMatrix<S>) -> String {
    let mut s = String::new();
    writeln!(s, "{SCORES_VERSION}").unwrap();
    writeln!(s, "landmarks {}", m.labels().len()).unwrap();
    for l in m.labels() {
        writeln!(s, "{}", serde_json::to_string(l).expect("string encodes")).unwrap();
    }
    writeln!(s, "nodes {}", m.node_ids().len()).unwrap();
    let ids: Vec<String> = m.node_ids().iter().map(|id| id.to_string()).collect();
    writeln!(s, "{}", ids.join(" ")).unwrap();
    writeln!(s, "logits").unwrap();
    for row in m.rows() {
        let vals: Vec<String> = row.iter().map(|x| fmt_real(x.to_f64_lossless())).collect();
        writeln!(s, "{}", vals.join(" ")).unwrap();
    }
    s
}

pub fn save_scores<S: Scalar>(m: &ScoreMatrix<S>, path: impl AsRef<Path>) -> Result<(), ScoreError> {
    std::fs::write(path, render_scores(m))?;
    Ok(())
}

pub fn load_scores<S: Scalar>(path: impl AsRef<Path>) -> Result<ScoreMatrix<S>, ScoreError> {
    parse_scores(&std::fs::read_to_string(path)?)
}

pub fn parse_scores<S: Scalar>(text: &str) -> Result<ScoreMatrix<S>, ScoreError> {
    let mut it = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let mut line = 0;
    let mut next = |what: &str| -> Result<(usize, &str), ScoreError> {
        match it.next() {
            Some((i, l)) => {
                line = i + 1;
                Ok((i + 1, l.trim()))
            }
            None => Err(ScoreError::Format { line: line + 1, msg: format!("expected {what}") }),
        }
    };
    let err = |line: usize, msg: String| ScoreError::Format { line, msg };
    let count = |line: usize, l: &str, key: &str| -> Result<usize, ScoreError> {
        l.strip_prefix(key)
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| err(line, format!("expected `{key} <count>`, found `{l}`")))
    };

    let (ln, v) = next("version")?;
    if v != SCORES_VERSION {
        return Err(err(ln, format!("unsupported version `{v}`, expected `{SCORES_VERSION}`")));
    }
    let (ln, l) = next("landmark count")?;
    let n_labels = count(ln, l, "landmarks")?;
    let mut labels = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        let (ln, l) = next("landmark label")?;
        labels.push(serde_json::from_str::<String>(l).map_err(|e| err(ln, format!("landmark label: {e}")))?);
    }
    let (ln, l) = next("node count")?;
    let n_nodes = count(ln, l, "nodes")?;
    let (ln, l) = if n_nodes == 0 { (ln, "") } else { next("node ids")? };
    let ids: Vec<NodeId> = l
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| err(ln, format!("node id `{t}` is not an integer"))))
        .collect::<Result<_, _>>()?;
    if ids.len() != n_nodes {
        return Err(err(ln, format!("expected {n_nodes} node ids, found {}", ids.len())));
    }
    let (ln, l) = next("`logits`")?;
    if l != "logits" {
        return Err(err(ln, format!("expected `logits`, found `{l}`")));
    }
    let mut values = Vec::with_capacity(n_labels * n_nodes);
    for r in 0..n_labels {
        let (ln, l) = next("logit row")?;
        let row: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(ln, format!("logit `{t}` is not a real"))))
            .collect::<Result<_, _>>()?;
        if row.len() != n_nodes {
            return Err(err(ln, format!("row {r} has {} logits, expected {n_nodes}", row.len())));
        }
        values.extend(row.into_iter().map(S::of));
    }
    if let Ok((ln, l)) = next("end") {
        return Err(err(ln, format!("unexpected trailing line `{l}`")));
    }
    ScoreMatrix::new(labels, ids, values)
}
