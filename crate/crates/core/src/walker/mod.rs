//! Degree-penalized random walks fed to skip-gram.

pub mod huffman;
pub mod sampler;
pub mod skipgram;
pub mod walks;

pub use huffman::HuffmanTree;
pub use sampler::{transition_distribution, AliasTables, PenalizedSampler};
pub use skipgram::{pair_loss_gradient, train_skipgram, SkipGramConfig, SkipGramOutput};
pub use walks::{generate_walks, WalkConfig, WalkCorpus, WalkMode};

use crate::error::Result;
use crate::graph::Graph;

pub fn embed_walker(g: &Graph, wcfg: &WalkConfig, scfg: &SkipGramConfig) -> Result<SkipGramOutput> {
    let corpus = generate_walks(g, wcfg)?;
    log::info!("generated {} walks ({} tokens)", corpus.walks.len(), corpus.tokens());
    train_skipgram(&corpus, scfg)
}
