//! ε-NN network reconstruction and degree-preservation scoring.
//!
//! An edge `(i, j)` is created when `p_ij = 1 / (1 + e^{‖u_i − u_j‖}) ≥ ε`.
//! Since `p ≤ 1/2`, thresholds above one half create no edges at all.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::stats::{correlations, Correlations};

const BLOCK: usize = 64;

/// Squared Euclidean distance with independent accumulators.
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        for l in 0..4 {
            let d = a[4 * c + l] - b[4 * c + l];
            acc[l] += d * d;
        }
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        let d = a[i] - b[i];
        tail += d * d;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn probability_from_distance(d: f64) -> f64 {
    1.0 / (1.0 + d.exp())
}

/// `1 / (1 + exp(‖a − b‖))`.
pub fn edge_probability(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(probability_from_distance(squared_distance(a, b).sqrt()))
}

/// Largest distance that still yields an edge at `epsilon`, or `None` when
/// no pair can reach it.
pub fn distance_threshold(epsilon: f64) -> Option<f64> {
    if epsilon > 0.5 {
        None
    } else {
        Some((1.0 / epsilon - 1.0).ln().max(0.0))
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("epsilon must lie in (0, 1], got {epsilon}")))
    }
}

/// Visits every unordered pair `i < j` in cache-friendly blocks.
fn for_each_pair<F: FnMut(usize, usize, f64)>(emb: &Embedding, mut f: F) {
    let n = emb.n();
    for bi in (0..n).step_by(BLOCK) {
        for bj in (bi..n).step_by(BLOCK) {
            for i in bi..(bi + BLOCK).min(n) {
                let ri = emb.row(i);
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + BLOCK).min(n) {
                    f(i, j, squared_distance(ri, emb.row(j)));
                }
            }
        }
    }
}

/// Whether a pair at squared distance `sq` is linked at `epsilon`; decided
/// on the distance threshold, falling back to the probability itself in a
/// thin band around the boundary.
fn linked(sq: f64, epsilon: f64, threshold: f64) -> bool {
    let t2 = threshold * threshold;
    if sq < t2 * (1.0 - 1e-9) {
        true
    } else if sq > t2 * (1.0 + 1e-9) && sq > 0.0 {
        false
    } else {
        probability_from_distance(sq.sqrt()) >= epsilon
    }
}

/// Reconstructed degree of every vertex at threshold `epsilon`.
pub fn reconstruct(emb: &Embedding, epsilon: f64) -> Result<Vec<usize>> {
    check_epsilon(epsilon)?;
    let mut degrees = vec![0usize; emb.n()];
    let Some(threshold) = distance_threshold(epsilon) else {
        return Ok(degrees);
    };
    for_each_pair(emb, |i, j, sq| {
        if linked(sq, epsilon, threshold) {
            degrees[i] += 1;
            degrees[j] += 1;
        }
    });
    Ok(degrees)
}

/// Reconstructed edge list `(i, j)` with `i < j`; quadratic in memory for
/// dense reconstructions, meant for small graphs.
pub fn reconstruct_edges(emb: &Embedding, epsilon: f64) -> Result<Vec<(usize, usize)>> {
    check_epsilon(epsilon)?;
    let mut edges = Vec::new();
    let Some(threshold) = distance_threshold(epsilon) else {
        return Ok(edges);
    };
    for_each_pair(emb, |i, j, sq| {
        if linked(sq, epsilon, threshold) {
            edges.push((i, j));
        }
    });
    edges.sort_unstable();
    Ok(edges)
}

/// Correlations between original and reconstructed degrees. Errors when
/// either side is constant, since the statistics are then undefined.
pub fn degree_correlations(original: &[usize], reconstructed: &[usize]) -> Result<Correlations> {
    if original.len() != reconstructed.len() {
        return Err(Error::DimensionMismatch { expected: original.len(), got: reconstructed.len() });
    }
    if original.len() < 2 {
        return Err(Error::InsufficientData("need at least two vertices".into()));
    }
    let x: Vec<f64> = original.iter().map(|&d| d as f64).collect();
    let y: Vec<f64> = reconstructed.iter().map(|&d| d as f64).collect();
    correlations(&x, &y).ok_or_else(|| Error::InsufficientData("degree sequence has zero variance".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub epsilon: f64,
    pub reconstructed_degrees: Vec<usize>,
    /// `None` when the reconstructed (or original) degrees are constant.
    pub correlations: Option<Correlations>,
    pub edge_count: usize,
}

impl ReconstructionReport {
    pub fn pearson(&self) -> Option<f64> {
        self.correlations.map(|c| c.pearson)
    }

    pub fn is_degenerate(&self) -> bool {
        self.correlations.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonGrid {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Default for EpsilonGrid {
    fn default() -> Self {
        EpsilonGrid { start: 0.01, end: 1.0, step: 0.01 }
    }
}

impl EpsilonGrid {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.start > 0.0) || self.end > 1.0 || self.start > self.end {
            return Err(Error::InvalidConfig(format!(
                "invalid epsilon grid {}..{} step {}",
                self.start, self.end, self.step
            )));
        }
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| ((self.start + i as f64 * self.step) * 1e12).round() / 1e12)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub table: Vec<ReconstructionReport>,
    /// Index into `table` of the row with maximal Pearson (smallest ε on ties);
    /// the first row when every row is degenerate.
    pub best: usize,
}

impl Sweep {
    pub fn best(&self) -> &ReconstructionReport {
        &self.table[self.best]
    }

    /// Writes the `epsilon,pearson,spearman,kendall,edge_count` table;
    /// undefined correlations are written as `NA`.
    pub fn write_table<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "epsilon,pearson,spearman,kendall,edge_count")?;
        for row in &self.table {
            match row.correlations {
                Some(c) => writeln!(
                    out,
                    "{},{:.17e},{:.17e},{:.17e},{}",
                    row.epsilon, c.pearson, c.spearman, c.kendall, row.edge_count
                )?,
                None => writeln!(out, "{},NA,NA,NA,{}", row.epsilon, row.edge_count)?,
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// One parsed row of a sweep table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub correlations: Option<Correlations>,
    pub edge_count: usize,
}

pub fn read_sweep_table<R: BufRead>(reader: R) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        if no == 0 || line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::Parse { line: no + 1, msg: msg.to_string() };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad("expected 5 columns"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        let correlations = if fields[1] == "NA" {
            None
        } else {
            Some(Correlations { pearson: num(fields[1])?, spearman: num(fields[2])?, kendall: num(fields[3])? })
        };
        rows.push(SweepRow {
            epsilon: num(fields[0])?,
            correlations,
            edge_count: fields[4].parse().map_err(|_| bad("bad edge count"))?,
        });
    }
    Ok(rows)
}

/// Reconstructs at every grid threshold and keeps the Pearson-maximizing one.
///
/// Each pair's probability is bucketed once against the sorted grid, so the
/// whole sweep costs a single pass over all pairs.
pub fn sweep_epsilon(emb: &Embedding, original: &[usize], grid: &EpsilonGrid) -> Result<Sweep> {
    if original.len() != emb.n() {
        return Err(Error::DimensionMismatch { expected: emb.n(), got: original.len() });
    }
    let eps = grid.values()?;
    let buckets = eps.len() + 1;
    let n = emb.n();
    // counts[v * buckets + c]: pairs at v whose probability reaches exactly the first c grid values
    let mut counts = vec![0u32; n * buckets];
    for_each_pair(emb, |i, j, sq| {
        let p = probability_from_distance(sq.sqrt());
        let c = eps.partition_point(|&e| e <= p);
        counts[i * buckets + c] += 1;
        counts[j * buckets + c] += 1;
    });

    let mut degrees = vec![vec![0usize; n]; eps.len()];
    for v in 0..n {
        let row = &counts[v * buckets..(v + 1) * buckets];
        let mut acc = 0usize;
        for g in (0..eps.len()).rev() {
            acc += row[g + 1] as usize;
            degrees[g][v] = acc;
        }
    }

    let table: Vec<ReconstructionReport> = eps
        .iter()
        .zip(degrees)
        .map(|(&epsilon, reconstructed_degrees)| {
            let edge_count = reconstructed_degrees.iter().sum::<usize>() / 2;
            let correlations = degree_correlations(original, &reconstructed_degrees).ok();
            ReconstructionReport { epsilon, reconstructed_degrees, correlations, edge_count }
        })
        .collect();

    let mut best = 0;
    let mut best_pearson = f64::NEG_INFINITY;
    for (i, row) in table.iter().enumerate() {
        if let Some(p) = row.pearson() {
            if p > best_pearson {
                best_pearson = p;
                best = i;
            }
        }
    }
    Ok(Sweep { table, best })
}
