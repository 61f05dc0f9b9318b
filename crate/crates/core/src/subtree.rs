//! Stable matchings (unit capacities) in subtree hypergraphs.
//!
//! Repeatedly take the edge whose top vertex is deepest in the rooted tree,
//! discard the edges its top vertex likes less, and recurse on the rest.
//! On the way back an edge joins the matching iff its top vertex is still
//! free. The recursion is unrolled into two loops over an explicit stack.

use std::collections::VecDeque;

use crate::classes::{verify_certificate, ClassCertificate};
use crate::error::{Error, Result};
use crate::hypergraph::{BMatching, EdgeId, HypergraphInstance, VertexId};

#[derive(Debug, Clone, Copy, Default)]
pub struct SubtreeOptions {
    /// Root the tree here instead of at the witness root.
    pub root: Option<VertexId>,
    pub debug_invariants: bool,
}

pub fn solve_subtree(inst: &HypergraphInstance, tree_parent: &[Option<VertexId>]) -> Result<BMatching> {
    solve_subtree_with(inst, tree_parent, SubtreeOptions::default())
}

pub fn solve_subtree_with(
    inst: &HypergraphInstance,
    tree_parent: &[Option<VertexId>],
    opts: SubtreeOptions,
) -> Result<BMatching> {
    verify_certificate(inst, &ClassCertificate::TreeWitness(tree_parent.to_vec()))?;
    if let Some(v) = (0..inst.n_vertices()).find(|&v| inst.capacity(v) != 1) {
        return Err(Error::CapacityNotUnit { vertex: v, capacity: inst.capacity(v) });
    }
    let n = inst.n_vertices();
    let root = match opts.root {
        Some(r) if r >= n => return Err(Error::UnknownVertex(r)),
        Some(r) => r,
        None => (0..n).find(|&v| tree_parent[v].is_none()).expect("verified tree has a root"),
    };
    let depth = depths_from(tree_parent, root);

    let top: Vec<VertexId> = inst
        .edges()
        .iter()
        .map(|verts| *verts.iter().min_by_key(|&&v| depth[v]).unwrap())
        .collect();
    let mut order: Vec<EdgeId> = (0..inst.n_edges()).collect();
    order.sort_by_key(|&e| (std::cmp::Reverse(depth[top[e]]), e));

    let mut active = vec![true; inst.n_edges()];
    let mut stack: Vec<EdgeId> = Vec::new();
    for &f in &order {
        if !active[f] {
            continue;
        }
        let r = top[f];
        if opts.debug_invariants {
            for e in (0..inst.n_edges()).filter(|&e| active[e] && e != f) {
                let meets = inst.edge(e).iter().any(|v| inst.edge(f).binary_search(v).is_ok());
                if meets && !inst.contains(e, r) {
                    return Err(Error::InvariantViolation(format!(
                        "edge {e} meets {f} but avoids its top vertex {r}"
                    )));
                }
            }
        }
        active[f] = false;
        for &e in inst.incident(r) {
            if active[e] && inst.prefers(r, f, e) {
                active[e] = false;
            }
        }
        stack.push(f);
    }

    let mut matching = BMatching::empty(inst);
    while let Some(f) = stack.pop() {
        if matching.load(top[f]) == 0 {
            if opts.debug_invariants && inst.edge(f).iter().any(|&v| matching.load(v) > 0) {
                return Err(Error::InvariantViolation(format!("edge {f} would overlap the matching")));
            }
            matching.insert(inst, f);
        }
    }
    Ok(matching)
}

fn depths_from(tree_parent: &[Option<VertexId>], root: VertexId) -> Vec<usize> {
    let n = tree_parent.len();
    let mut adj = vec![Vec::new(); n];
    for (v, p) in tree_parent.iter().enumerate() {
        if let Some(p) = *p {
            adj[v].push(p);
            adj[p].push(v);
        }
    }
    let mut depth = vec![usize::MAX; n];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    depth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::is_stable;

    // star with center 0 and leaves 1..3, plus the path edge {1}
    fn star() -> (HypergraphInstance, Vec<Option<VertexId>>) {
        let inst = HypergraphInstance::from_parts(
            4,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1]],
            vec![1; 4],
            vec![vec![2, 0, 1], vec![3, 0], vec![1], vec![2]],
            None,
        )
        .unwrap();
        (inst, vec![None, Some(0), Some(0), Some(0)])
    }

    #[test]
    fn star_solution_is_stable() {
        let (inst, tree) = star();
        let opts = SubtreeOptions { root: None, debug_invariants: true };
        let m = solve_subtree_with(&inst, &tree, opts).unwrap();
        assert!(is_stable(&inst, &m).unwrap());
        assert_eq!(m.edges(), vec![2, 3]);
    }

    #[test]
    fn rerooting_keeps_stability() {
        let (inst, tree) = star();
        for r in 0..4 {
            let opts = SubtreeOptions { root: Some(r), debug_invariants: true };
            let m = solve_subtree_with(&inst, &tree, opts).unwrap();
            assert!(is_stable(&inst, &m).unwrap(), "root {r}");
        }
    }

    #[test]
    fn non_unit_capacity_is_rejected() {
        let (inst, tree) = star();
        let mut raw = inst.into_raw();
        raw.capacities[2] = 2;
        let inst = HypergraphInstance::new(raw).unwrap();
        assert!(matches!(
            solve_subtree(&inst, &tree),
            Err(Error::CapacityNotUnit { vertex: 2, capacity: 2 })
        ));
    }
}
