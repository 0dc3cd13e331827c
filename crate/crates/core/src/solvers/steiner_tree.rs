//! Steiner Tree via the forest embedding and one local search.

use crate::engine::run_legacy;
use crate::error::Result;
use crate::graph::{steiner_tree_embed, Forest, Instance, TreeEmbedding, Vertex};
use crate::local_search::{check_unit_interval, local_search, LocalSearchResult};
use crate::rational::Q;

/// `99/70 - 1`, a rational stand-in for `sqrt(2) - 1`.
pub fn default_tree_beta() -> Q {
    Q::new(29.into(), 70.into())
}

#[derive(Clone, Debug)]
pub struct SteinerTreeOutcome {
    /// edges of the original graph only
    pub forest: Forest,
    pub embedding: TreeEmbedding,
    pub ls: LocalSearchResult,
}

/// Roots the embedding at the smallest terminal.
pub fn solve_steiner_tree(graph: &Instance, terminals: &[Vertex], beta: &Q) -> Result<SteinerTreeOutcome> {
    check_unit_interval("beta", beta)?;
    let root = terminals.iter().copied().min().unwrap_or(0);
    let embedding = steiner_tree_embed(graph, terminals, root)?;
    let legacy = run_legacy(&embedding.instance)?;
    let ls = local_search(&embedding.instance, &legacy.fingerprint, beta)?;
    Ok(SteinerTreeOutcome {
        forest: embedding.project(&ls.forest),
        embedding,
        ls,
    })
}
