//! End-to-end runs: embed a graph, reconstruct it across an ε grid, and fit
//! power laws to the original and reconstructed degree sequences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedding::Embedding;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::powerlaw::{fit_power_law, PowerLawFit};
use crate::reconstruct::{sweep_epsilon, EpsilonGrid, ReconstructionReport, Sweep};
use crate::spectral::{embed_spectral, SpectralConfig, SpectralMode};
use crate::walker::{embed_walker, SkipGramConfig, WalkConfig, WalkMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    DpSpectral,
    DpWalker,
    Le,
    Deepwalk,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::DpSpectral, Method::DpWalker, Method::Le, Method::Deepwalk];

    pub fn name(self) -> &'static str {
        match self {
            Method::DpSpectral => "dp-spectral",
            Method::DpWalker => "dp-walker",
            Method::Le => "le",
            Method::Deepwalk => "deepwalk",
        }
    }

    pub fn is_spectral(self) -> bool {
        matches!(self, Method::DpSpectral | Method::Le)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

/// Independent random streams derived from one user seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Generate = 1,
    Spectral = 2,
    Walks = 3,
    SkipGram = 4,
    Tasks = 5,
}

pub fn derive_seed(seed: u64, stream: Stream) -> u64 {
    let mut x = seed ^ (stream as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbedConfig {
    pub method: Method,
    pub k: usize,
    pub beta: f64,
    pub seed: u64,
    pub tol: f64,
    pub walks_per_vertex: usize,
    pub walk_length: usize,
    pub window: usize,
    pub epochs: usize,
    pub deterministic: bool,
    pub workers: usize,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            method: Method::DpSpectral,
            k: 200,
            beta: 1.0,
            seed: 0,
            tol: 1e-8,
            walks_per_vertex: 10,
            walk_length: 40,
            window: 5,
            epochs: 1,
            deterministic: true,
            workers: 1,
        }
    }
}

impl EmbedConfig {
    pub fn spectral(&self) -> SpectralConfig {
        SpectralConfig {
            k: self.k,
            beta: self.beta,
            tol: self.tol,
            max_iter: None,
            mode: if self.method == Method::Le { SpectralMode::LeBaseline } else { SpectralMode::DpSpectral },
            seed: derive_seed(self.seed, Stream::Spectral),
        }
    }

    pub fn walks(&self) -> WalkConfig {
        WalkConfig {
            walks_per_vertex: self.walks_per_vertex,
            walk_length: self.walk_length,
            beta: self.beta,
            seed: derive_seed(self.seed, Stream::Walks),
            mode: if self.method == Method::Deepwalk { WalkMode::DeepwalkBaseline } else { WalkMode::DpWalker },
            workers: self.workers,
        }
    }

    pub fn skipgram(&self) -> SkipGramConfig {
        SkipGramConfig {
            k: self.k,
            window: self.window,
            epochs: self.epochs,
            seed: derive_seed(self.seed, Stream::SkipGram),
            deterministic: self.deterministic,
            workers: self.workers,
            ..SkipGramConfig::default()
        }
    }
}

/// Method-specific facts about how an embedding was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EmbedDiagnostics {
    Spectral { eigenvalues: Vec<f64>, trivial_eigenvalue: f64, max_residual: f64, matvecs: usize },
    Walker { epoch_losses: Vec<f64>, absent_vertices: usize },
}

#[derive(Debug, Clone)]
pub struct EmbedOutcome {
    pub embedding: Embedding,
    pub diagnostics: EmbedDiagnostics,
}

pub fn embed(g: &Graph, cfg: &EmbedConfig) -> Result<EmbedOutcome> {
    if cfg.method.is_spectral() {
        let out = embed_spectral(g, &cfg.spectral())?;
        let max_residual = out.residuals.iter().fold(0.0f64, |a, &b| a.max(b));
        Ok(EmbedOutcome {
            embedding: out.embedding,
            diagnostics: EmbedDiagnostics::Spectral {
                eigenvalues: out.eigenvalues,
                trivial_eigenvalue: out.trivial_eigenvalue,
                max_residual,
                matvecs: out.matvecs,
            },
        })
    } else {
        let out = embed_walker(g, &cfg.walks(), &cfg.skipgram())?;
        Ok(EmbedOutcome {
            embedding: out.embedding,
            diagnostics: EmbedDiagnostics::Walker {
                epoch_losses: out.epoch_losses,
                absent_vertices: out.absent_vertices.len(),
            },
        })
    }
}

/// A power-law fit, or why none was possible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitOutcome {
    Fit(PowerLawFit),
    Unfittable(String),
}

impl FitOutcome {
    /// Fits the positive entries of `degrees`; vertices left without edges
    /// carry no power-law information.
    pub fn of_degrees(degrees: &[usize]) -> Self {
        let positive: Vec<usize> = degrees.iter().copied().filter(|&d| d > 0).collect();
        match fit_power_law(&positive) {
            Ok(f) => FitOutcome::Fit(f),
            Err(e) => FitOutcome::Unfittable(e.to_string()),
        }
    }

    pub fn fit(&self) -> Option<&PowerLawFit> {
        match self {
            FitOutcome::Fit(f) => Some(f),
            FitOutcome::Unfittable(_) => None,
        }
    }

    /// K-S distance, with an unfittable sequence scored as the worst value 1.
    pub fn ks_or_worst(&self) -> f64 {
        self.fit().map_or(1.0, |f| f.ks)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub edges: usize,
    pub max_degree: usize,
}

impl GraphSummary {
    pub fn of(g: &Graph) -> Self {
        GraphSummary { n: g.n(), edges: g.num_edges(), max_degree: g.degrees().into_iter().max().unwrap_or(0) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PipelineReport {
    pub graph: GraphSummary,
    pub embed: EmbedConfig,
    pub diagnostics: EmbedDiagnostics,
    pub best: ReconstructionReportSummary,
    pub original_fit: FitOutcome,
    pub reconstructed_fit: FitOutcome,
}

/// The best sweep row without the per-vertex degree list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReportSummary {
    pub epsilon: f64,
    pub pearson: Option<f64>,
    pub spearman: Option<f64>,
    pub kendall: Option<f64>,
    pub edge_count: usize,
}

impl From<&ReconstructionReport> for ReconstructionReportSummary {
    fn from(r: &ReconstructionReport) -> Self {
        ReconstructionReportSummary {
            epsilon: r.epsilon,
            pearson: r.correlations.map(|c| c.pearson),
            spearman: r.correlations.map(|c| c.spearman),
            kendall: r.correlations.map(|c| c.kendall),
            edge_count: r.edge_count,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub embedding: Embedding,
    pub sweep: Sweep,
    pub report: PipelineReport,
}

/// Reorders embedding rows, given with their vertex labels, to the dense
/// vertex order of `g`.
pub fn align_embedding(g: &Graph, labels: &[u64], emb: &Embedding) -> Result<Embedding> {
    if labels.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), got: labels.len() });
    }
    let mut order = vec![usize::MAX; g.n()];
    for (row, &label) in labels.iter().enumerate() {
        let v = g.index_of(label).ok_or(Error::UnknownLabel(label))?;
        if order[v] != usize::MAX {
            return Err(Error::InvalidConfig(format!("vertex label {label} appears twice in the embedding")));
        }
        order[v] = row;
    }
    Ok(emb.select_rows(&order))
}

/// Embeds `g`, sweeps ε, and fits power laws at the best ε.
pub fn run_pipeline(g: &Graph, cfg: &EmbedConfig, grid: &EpsilonGrid) -> Result<PipelineOutput> {
    let outcome = embed(g, cfg)?;
    let degrees = g.degrees();
    let sweep = sweep_epsilon(&outcome.embedding, &degrees, grid)?;
    let best = sweep.best();
    let report = PipelineReport {
        graph: GraphSummary::of(g),
        embed: cfg.clone(),
        diagnostics: outcome.diagnostics,
        best: best.into(),
        original_fit: FitOutcome::of_degrees(&degrees),
        reconstructed_fit: FitOutcome::of_degrees(&best.reconstructed_degrees),
    };
    Ok(PipelineOutput { embedding: outcome.embedding, sweep, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{generate_pa, PaConfig};

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{}\"", m.name()));
        }
        assert!("spectral".parse::<Method>().is_err());
    }

    #[test]
    fn streams_differ() {
        let s = [Stream::Generate, Stream::Spectral, Stream::Walks, Stream::SkipGram, Stream::Tasks];
        let seeds: std::collections::HashSet<u64> = s.iter().map(|&x| derive_seed(7, x)).collect();
        assert_eq!(seeds.len(), s.len());
    }

    #[test]
    fn small_pipeline_runs_each_method() {
        let g = generate_pa(&PaConfig { n: 150, m: 4, seed: 1 }).unwrap();
        for method in Method::ALL {
            let cfg = EmbedConfig { method, k: 8, walks_per_vertex: 2, walk_length: 10, ..Default::default() };
            let out = run_pipeline(&g, &cfg, &EpsilonGrid::default()).unwrap();
            assert_eq!(out.embedding.n(), 150);
            assert_eq!(out.embedding.k(), 8);
            assert_eq!(out.sweep.table.len(), 100);
            assert!(out.report.original_fit.fit().is_some());
            let json = serde_json::to_string(&out.report).unwrap();
            assert!(json.contains("\"pearson\""));
        }
    }

    #[test]
    fn alignment_follows_labels() {
        let g = Graph::from_labeled_edges([(10, 20), (20, 30)]).unwrap();
        let emb = Embedding::from_rows(vec![vec![3.0], vec![1.0], vec![2.0]]).unwrap();
        let aligned = align_embedding(&g, &[30, 10, 20], &emb).unwrap();
        assert_eq!(aligned.as_slice(), &[1.0, 2.0, 3.0]);
        assert!(matches!(align_embedding(&g, &[30, 10, 40], &emb), Err(Error::UnknownLabel(40))));
        assert!(align_embedding(&g, &[30, 10, 10], &emb).is_err());
        assert!(align_embedding(&g, &[30, 10], &emb).is_err());
    }

    #[test]
    fn unfittable_scores_worst() {
        let f = FitOutcome::of_degrees(&[0, 0, 3]);
        assert!(f.fit().is_none());
        assert_eq!(f.ks_or_worst(), 1.0);
    }
}
