//! Dense vertex embeddings and their text format.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// `n × k` real matrix stored row-major; row `i` is the vector of vertex `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    n: usize,
    k: usize,
    values: Vec<f64>,
}

impl Embedding {
    pub fn zeros(n: usize, k: usize) -> Self {
        Embedding { n, k, values: vec![0.0; n * k] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(n * k);
        for row in rows {
            if row.len() != k {
                return Err(Error::DimensionMismatch { expected: k, got: row.len() });
            }
            values.extend(row);
        }
        Ok(Embedding { n, k, values })
    }

    pub fn from_flat(n: usize, k: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * k {
            return Err(Error::DimensionMismatch { expected: n * k, got: values.len() });
        }
        Ok(Embedding { n, k, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.k..(i + 1) * self.k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Rows reordered so that output row `i` is input row `order[i]`.
    pub fn select_rows(&self, order: &[usize]) -> Embedding {
        let mut values = Vec::with_capacity(order.len() * self.k);
        for &i in order {
            values.extend_from_slice(self.row(i));
        }
        Embedding { n: order.len(), k: self.k, values }
    }
}

/// Writes `n k` followed by one `label v1 … vk` line per vertex; values use
/// 17 significant digits so that reading back is exact.
pub fn write_embedding<W: Write>(emb: &Embedding, labels: &[u64], mut out: W) -> Result<()> {
    if labels.len() != emb.n() {
        return Err(Error::DimensionMismatch { expected: emb.n(), got: labels.len() });
    }
    writeln!(out, "{} {}", emb.n(), emb.k())?;
    for (i, label) in labels.iter().enumerate() {
        write!(out, "{label}")?;
        for v in emb.row(i) {
            write!(out, " {v:.16e}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads the format produced by [`write_embedding`], returning the labels in
/// file order alongside the matrix.
pub fn read_embedding<R: BufRead>(reader: R) -> Result<(Vec<u64>, Embedding)> {
    let mut lines = reader.lines().enumerate();
    let (n, k) = loop {
        let Some((no, line)) = lines.next() else {
            return Err(Error::Parse { line: 1, msg: "missing header".into() });
        };
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let nums: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse { line: no + 1, msg: format!("bad header token {t:?}") }))
            .collect::<Result<_>>()?;
        if nums.len() != 2 {
            return Err(Error::Parse { line: no + 1, msg: "header must be \"n k\"".into() });
        }
        break (nums[0], nums[1]);
    };
    let mut labels = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n * k);
    for (no, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label = tokens.next().unwrap_or_default();
        let label: u64 = label
            .parse()
            .map_err(|_| Error::Parse { line: no + 1, msg: format!("bad vertex label {label:?}") })?;
        let before = values.len();
        for t in tokens {
            let v: f64 = t.parse().map_err(|_| Error::Parse { line: no + 1, msg: format!("bad value {t:?}") })?;
            values.push(v);
        }
        if values.len() - before != k {
            return Err(Error::Parse { line: no + 1, msg: format!("expected {k} values, got {}", values.len() - before) });
        }
        labels.push(label);
    }
    if labels.len() != n {
        return Err(Error::Parse { line: 1, msg: format!("header declares {n} rows, found {}", labels.len()) });
    }
    Ok((labels, Embedding { n, k, values }))
}
