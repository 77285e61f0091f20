//! Undirected simple graphs in compressed sparse adjacency form.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, Write};

use log::warn;

use crate::error::{Error, Result};

/// Immutable undirected simple graph.
///
/// Vertices carry dense 0-based ids; the original integer labels from the
/// edge list are kept in ascending order so that `labels()[i]` is the label
/// of dense vertex `i`. Every vertex has degree at least one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    labels: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl Graph {
    /// Builds a graph from labelled edges. Self-loops are discarded,
    /// duplicates and reversed copies collapse to one undirected edge, and
    /// labels that end up without any edge are dropped.
    pub fn from_labeled_edges<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut pairs: Vec<(u64, u64)> = edges
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
            .collect();
        if pairs.is_empty() {
            return Err(Error::EmptyGraph);
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut labels: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        labels.sort_unstable();
        labels.dedup();
        let index: HashMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();

        let dense = pairs.iter().map(|(a, b)| (index[a], index[b]));
        let (offsets, neighbors) = build_csr(labels.len(), dense);
        Ok(Graph { offsets, neighbors, labels, index })
    }

    /// Builds a graph over dense ids `0..n` whose labels equal the ids.
    /// Vertices left isolated are dropped, which relabels nothing because
    /// labels are kept.
    pub fn from_edges<I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_labeled_edges(edges.into_iter().map(|(a, b)| (a as u64, b as u64)))
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    /// Sorted neighbor list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        self.index.get(&label).copied()
    }

    /// Each undirected edge once, as `(a, b)` with `a < b` in dense ids.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    /// Number of connected components.
    pub fn connected_components(&self) -> usize {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        let mut components = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            components += 1;
            seen[s] = true;
            queue.push_back(s);
            while let Some(v) = queue.pop_front() {
                for &w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }
}

fn build_csr<I>(n: usize, pairs: I) -> (Vec<usize>, Vec<usize>)
where
    I: Iterator<Item = (usize, usize)> + Clone,
{
    let mut counts = vec![0usize; n + 1];
    for (a, b) in pairs.clone() {
        counts[a + 1] += 1;
        counts[b + 1] += 1;
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    let offsets = counts.clone();
    let mut cursor = counts;
    let mut neighbors = vec![0usize; offsets[n]];
    for (a, b) in pairs {
        neighbors[cursor[a]] = b;
        cursor[a] += 1;
        neighbors[cursor[b]] = a;
        cursor[b] += 1;
    }
    for v in 0..n {
        neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
    }
    (offsets, neighbors)
}

/// Parses a whitespace-separated edge list. Lines starting with `#` and
/// blank lines are skipped.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut raw_labels = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let a = parse_label(tokens.next(), lineno + 1)?;
        let b = parse_label(tokens.next(), lineno + 1)?;
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: "expected exactly two vertex labels".into(),
            });
        }
        edges.push((a, b));
        raw_labels += 1;
    }
    let mut all: Vec<u64> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    all.sort_unstable();
    all.dedup();
    let graph = Graph::from_labeled_edges(edges)?;
    let dropped = all.len() - graph.n();
    if dropped > 0 {
        warn!("dropped {dropped} isolated vertices out of {} labels ({raw_labels} edge lines)", all.len());
    }
    Ok(graph)
}

fn parse_label(token: Option<&str>, line: usize) -> Result<u64> {
    let token = token.ok_or_else(|| Error::Parse { line, msg: "expected two vertex labels".into() })?;
    token.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid vertex label {token:?}"),
    })
}

/// Writes every undirected edge once as `label_a label_b`, in ascending
/// label order.
pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    for (a, b) in graph.edges() {
        writeln!(out, "{} {}", graph.label(a), graph.label(b))?;
    }
    out.flush()?;
    Ok(())
}
