//! Reference stability oracle: domination, blocking edges, exhaustive
//! enumeration of stable b-matchings and the brute-force weight optimum.
//!
//! Every solver is checked against this module, so it stays literal and
//! makes no use of any solver.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypergraph::{better, BMatching, EdgeId, HypergraphInstance, VertexId};

/// Enumeration refuses instances with more edges than this unless told otherwise.
pub const DEFAULT_EDGE_CAP: usize = 25;

/// `e` is dominated at `v`: `v` is saturated and prefers every member at `v` to `e`.
///
/// A vertex of capacity zero dominates every incident edge.
/// Panics if `v` is not in `e`.
pub fn is_dominated_at(inst: &HypergraphInstance, m: &BMatching, e: EdgeId, v: VertexId) -> bool {
    assert!(inst.contains(e, v), "vertex {v} is not in edge {e}");
    m.load(v) >= inst.capacity(v) && m.at(inst, v).all(|f| inst.prefers(v, f, e))
}

/// First vertex of `e` (ascending id) dominating it.
pub fn dominating_vertex(inst: &HypergraphInstance, m: &BMatching, e: EdgeId) -> Option<VertexId> {
    inst.edge(e).iter().copied().find(|&v| is_dominated_at(inst, m, e, v))
}

/// `e` is outside `m` and dominated at none of its vertices.
pub fn blocks(inst: &HypergraphInstance, m: &BMatching, e: EdgeId) -> bool {
    !m.contains(e) && dominating_vertex(inst, m, e).is_none()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockingReport {
    /// Blocking edges, ascending.
    pub blocking: Vec<EdgeId>,
    /// For each non-member edge that does not block: the first dominating vertex.
    pub witnesses: Vec<(EdgeId, VertexId)>,
}

impl BlockingReport {
    pub fn is_stable(&self) -> bool {
        self.blocking.is_empty()
    }
}

pub fn find_blocking_edges(inst: &HypergraphInstance, m: &BMatching) -> Result<BlockingReport> {
    m.check_feasible(inst)?;
    let mut report = BlockingReport { blocking: Vec::new(), witnesses: Vec::new() };
    for e in 0..inst.n_edges() {
        if m.contains(e) {
            continue;
        }
        match dominating_vertex(inst, m, e) {
            Some(v) => report.witnesses.push((e, v)),
            None => report.blocking.push(e),
        }
    }
    Ok(report)
}

pub fn is_stable(inst: &HypergraphInstance, m: &BMatching) -> Result<bool> {
    m.check_feasible(inst)?;
    Ok((0..inst.n_edges()).all(|e| !blocks(inst, m, e)))
}

/// All stable b-matchings by increasing size, then lexicographically,
/// stopping after `limit` results. Refuses more than `DEFAULT_EDGE_CAP` edges.
pub fn enumerate_stable(inst: &HypergraphInstance, limit: Option<usize>) -> Result<Vec<BMatching>> {
    enumerate_stable_capped(inst, limit, DEFAULT_EDGE_CAP)
}

pub fn enumerate_stable_capped(
    inst: &HypergraphInstance,
    limit: Option<usize>,
    edge_cap: usize,
) -> Result<Vec<BMatching>> {
    let mut out = Vec::new();
    if limit == Some(0) {
        return Ok(out);
    }
    for_each_stable(inst, edge_cap, |m| {
        out.push(m.clone());
        limit.is_none_or(|l| out.len() < l)
    })?;
    Ok(out)
}

/// Visits stable b-matchings in enumeration order until `visit` returns false.
pub fn for_each_stable(
    inst: &HypergraphInstance,
    edge_cap: usize,
    mut visit: impl FnMut(&BMatching) -> bool,
) -> Result<()> {
    let m = inst.n_edges();
    if m > edge_cap {
        return Err(Error::BudgetExceeded { edges: m, cap: edge_cap });
    }
    let mut current = BMatching::empty(inst);
    for k in 0..=m {
        if !subsets_of_size(inst, &mut current, 0, k, &mut visit) {
            break;
        }
    }
    Ok(())
}

// Feasible supersets of `current` with `k` more edges drawn from `start..`, in lex order.
// Returns false once the visitor asks to stop.
fn subsets_of_size(
    inst: &HypergraphInstance,
    current: &mut BMatching,
    start: EdgeId,
    k: usize,
    visit: &mut impl FnMut(&BMatching) -> bool,
) -> bool {
    if k == 0 {
        if (0..inst.n_edges()).all(|e| !blocks(inst, current, e)) {
            return visit(current);
        }
        return true;
    }
    let m = inst.n_edges();
    for e in start..m {
        if m - e < k {
            break;
        }
        if inst.edge(e).iter().any(|&v| current.load(v) >= inst.capacity(v)) {
            continue;
        }
        current.insert(inst, e);
        let go_on = subsets_of_size(inst, current, e + 1, k - 1, visit);
        current.remove(inst, e);
        if !go_on {
            return false;
        }
    }
    true
}

/// Maximum-weight stable b-matching by exhaustive enumeration; ties go to
/// the lexicographically smallest edge set. `None` when no stable one exists.
pub fn maxw_stable_bruteforce(inst: &HypergraphInstance) -> Result<Option<(BMatching, i64)>> {
    maxw_stable_bruteforce_capped(inst, DEFAULT_EDGE_CAP)
}

pub fn maxw_stable_bruteforce_capped(
    inst: &HypergraphInstance,
    edge_cap: usize,
) -> Result<Option<(BMatching, i64)>> {
    let mut best: Option<(BMatching, i64, Vec<EdgeId>)> = None;
    for_each_stable(inst, edge_cap, |m| {
        let ids = m.edges();
        let w = inst.total_weight(ids.iter().copied());
        if best.as_ref().is_none_or(|(_, bw, bids)| better(w, &ids, *bw, bids)) {
            best = Some((m.clone(), w, ids));
        }
        true
    })?;
    Ok(best.map(|(m, w, _)| (m, w)))
}

/// Some stable b-matching containing every edge of `required`, found by
/// branching on edges with pruning: an excluded edge must keep at least one
/// vertex that can still end up saturated with better edges only.
///
/// No edge cap; gives up after `node_budget` search nodes.
pub fn find_stable_containing(
    inst: &HypergraphInstance,
    required: &[EdgeId],
    node_budget: u64,
) -> Result<Option<BMatching>> {
    let m = inst.n_edges();
    if let Some(&e) = required.iter().find(|&&e| e >= m) {
        return Err(Error::UnknownEdge(e));
    }
    let mut order: Vec<EdgeId> = required.to_vec();
    order.sort_unstable();
    order.dedup();
    let n_required = order.len();
    order.extend((0..m).filter(|e| !required.contains(e)));
    let mut s = Search { inst, state: vec![Decision::Open; m], current: BMatching::empty(inst), nodes: 0, node_budget };
    let found = s.run(&order, n_required, 0)?;
    Ok(found.then_some(s.current))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Decision {
    Open,
    In,
    Out,
}

struct Search<'a> {
    inst: &'a HypergraphInstance,
    state: Vec<Decision>,
    current: BMatching,
    nodes: u64,
    node_budget: u64,
}

impl Search<'_> {
    fn fits(&self, e: EdgeId) -> bool {
        self.inst.edge(e).iter().all(|&v| self.current.load(v) < self.inst.capacity(v))
    }

    // Can `e` still be dominated at `v` in some completion?
    fn may_dominate(&self, e: EdgeId, v: VertexId) -> bool {
        let inst = self.inst;
        if self.current.at(inst, v).any(|f| !inst.prefers(v, f, e)) {
            return false;
        }
        let open_better = inst
            .incident(v)
            .iter()
            .filter(|&&f| self.state[f] == Decision::Open && inst.prefers(v, f, e) && self.fits(f))
            .count() as u32;
        self.current.load(v) + open_better >= inst.capacity(v)
    }

    fn alive(&self) -> bool {
        (0..self.inst.n_edges())
            .filter(|&e| self.state[e] == Decision::Out)
            .all(|e| self.inst.edge(e).iter().any(|&v| self.may_dominate(e, v)))
    }

    fn run(&mut self, order: &[EdgeId], n_required: usize, idx: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(Error::SearchBudgetExceeded { nodes: self.node_budget });
        }
        if !self.alive() {
            return Ok(false);
        }
        let Some(&e) = order.get(idx) else {
            return Ok((0..self.inst.n_edges()).all(|f| !blocks(self.inst, &self.current, f)));
        };
        if self.fits(e) {
            self.state[e] = Decision::In;
            self.current.insert(self.inst, e);
            if self.run(order, n_required, idx + 1)? {
                return Ok(true);
            }
            self.current.remove(self.inst, e);
        }
        if idx >= n_required {
            self.state[e] = Decision::Out;
            if self.run(order, n_required, idx + 1)? {
                return Ok(true);
            }
        }
        self.state[e] = Decision::Open;
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Three unit vertices, the cyclic triangle has no stable matching.
    fn cyclic_triangle() -> HypergraphInstance {
        HypergraphInstance::from_parts(
            3,
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            vec![1, 1, 1],
            vec![vec![0, 2], vec![1, 0], vec![2, 1]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn cyclic_triangle_has_no_stable_matching() {
        let inst = cyclic_triangle();
        assert!(enumerate_stable(&inst, None).unwrap().is_empty());
        assert!(maxw_stable_bruteforce(&inst).unwrap().is_none());
        let m = BMatching::from_edges(&inst, &[0]).unwrap();
        let report = find_blocking_edges(&inst, &m).unwrap();
        assert_eq!(report.blocking, vec![1]);
        assert_eq!(report.witnesses, vec![(2, 0)]);
    }

    #[test]
    fn zero_capacity_vertex_dominates() {
        let inst =
            HypergraphInstance::from_parts(2, vec![vec![0, 1]], vec![1, 0], vec![vec![0], vec![0]], None)
                .unwrap();
        let empty = BMatching::empty(&inst);
        assert!(is_dominated_at(&inst, &empty, 0, 1));
        assert!(!is_dominated_at(&inst, &empty, 0, 0));
        assert!(is_stable(&inst, &empty).unwrap());
    }

    #[test]
    #[should_panic(expected = "not in edge")]
    fn domination_outside_edge_panics() {
        let inst = cyclic_triangle();
        is_dominated_at(&inst, &BMatching::empty(&inst), 0, 2);
    }

    #[test]
    fn enumeration_order_and_limit() {
        // the singleton at vertex 0 belongs to every stable set
        let inst = HypergraphInstance::from_parts(
            3,
            vec![vec![0], vec![1, 2], vec![2]],
            vec![1, 1, 1],
            vec![vec![0], vec![1], vec![1, 2]],
            Some(vec![0, 1, 5]),
        )
        .unwrap();
        let all = enumerate_stable(&inst, None).unwrap();
        let ids: Vec<Vec<usize>> = all.iter().map(|m| m.edges()).collect();
        assert_eq!(ids, vec![vec![0, 1]]);
        assert_eq!(maxw_stable_bruteforce(&inst).unwrap().unwrap().1, 1);
        assert!(enumerate_stable(&inst, Some(0)).unwrap().is_empty());
        assert_eq!(enumerate_stable(&inst, Some(1)).unwrap().len(), 1);
    }

    #[test]
    fn budget_is_enforced() {
        let n = 26;
        let edges: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
        let prefs: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
        let inst = HypergraphInstance::from_parts(n, edges, vec![1; n], prefs, None).unwrap();
        assert!(matches!(
            enumerate_stable(&inst, None),
            Err(Error::BudgetExceeded { edges: 26, cap: 25 })
        ));
    }

    #[test]
    fn infeasible_input_is_rejected() {
        let inst = cyclic_triangle();
        let mut m = BMatching::empty(&inst);
        m.insert(&inst, 0);
        m.insert(&inst, 1);
        assert!(matches!(find_blocking_edges(&inst, &m), Err(Error::InfeasibleMatching { .. })));
    }
}
