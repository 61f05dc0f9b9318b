//! Instance generators built from hardness reductions. Each one maps a
//! source instance to a hypergraph (or dual-admission) instance in which a
//! designated property holds exactly when the source is a yes-instance.

mod clique;
mod cnf;
mod smti;
mod star;

use crate::error::Result;
use crate::hypergraph::{EdgeId, HypergraphInstance};
use crate::io::InstanceFile;
use crate::stability::find_stable_containing;

pub use clique::{gen_subpath_from_multicolored_clique, has_multicolored_clique, ColoredGraph};
pub use cnf::{gen_laminar_from_cnf, parse_dimacs, Cnf};
pub use smti::{gen_uda_from_com_smti, has_complete_stable_matching, Smti, WomanList};
pub use star::gen_subtree_star_from_shbm;

/// Generated instance plus the edge whose presence in some stable
/// b-matching encodes the answer.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub file: InstanceFile,
    pub target: EdgeId,
}

/// Does some stable b-matching contain `target`? Exhaustive search, giving
/// up after `node_budget` nodes.
pub fn stable_with_edge(inst: &HypergraphInstance, target: EdgeId, node_budget: u64) -> Result<bool> {
    Ok(find_stable_containing(inst, &[target], node_budget)?.is_some())
}
