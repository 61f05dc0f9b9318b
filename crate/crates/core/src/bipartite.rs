//! Bipartite stable b-matchings: deferred acceptance, the rural-hospitals
//! property, and maximum-weight stable matchings via rotations.
//!
//! A bipartite instance is a hypergraph whose edges are pairs with one end
//! on each side, so stability is the hypergraph notion restricted to pairs.
//!
//! For the weight optimum, the side with capacities above one is split into
//! unit clones ranked consecutively by the other side. This is exact when
//! the other side has unit capacities (many-to-one). On the one-to-one clone
//! instance the stable matchings correspond to closed sets of the rotation
//! poset, and a maximum-weight closed set is a minimum s-t cut.

use std::collections::VecDeque;

use petgraph::algo::dinics;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::error::{Error, Result};
use crate::hypergraph::{BMatching, EdgeId, HypergraphInstance, RawInstance, VertexId};
use crate::stability::maxw_stable_bruteforce_capped;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteInstance {
    graph: HypergraphInstance,
    side: Vec<Side>,
}

impl BipartiteInstance {
    pub fn new(graph: HypergraphInstance, side: Vec<Side>) -> Result<Self> {
        if side.len() != graph.n_vertices() {
            return Err(Error::Unsupported("side labels do not cover every vertex".into()));
        }
        for (e, verts) in graph.edges().iter().enumerate() {
            if verts.len() != 2 || side[verts[0]] == side[verts[1]] {
                return Err(Error::Unsupported(format!("edge {e} is not a left-right pair")));
            }
        }
        Ok(BipartiteInstance { graph, side })
    }

    /// Two-colours the graph; isolated vertices go left.
    pub fn from_two_coloring(graph: HypergraphInstance) -> Result<Self> {
        let n = graph.n_vertices();
        if let Some(e) = graph.edges().iter().position(|vs| vs.len() != 2) {
            return Err(Error::Unsupported(format!("edge {e} is not a pair")));
        }
        let mut side: Vec<Option<Side>> = vec![None; n];
        for start in 0..n {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(Side::Left);
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &e in graph.incident(v) {
                    let w = other_end(&graph, e, v);
                    let want = if side[v] == Some(Side::Left) { Side::Right } else { Side::Left };
                    match side[w] {
                        None => {
                            side[w] = Some(want);
                            queue.push_back(w);
                        }
                        Some(s) if s != want => {
                            return Err(Error::Unsupported("graph is not bipartite".into()))
                        }
                        _ => {}
                    }
                }
            }
        }
        Self::new(graph, side.into_iter().map(Option::unwrap).collect())
    }

    pub fn graph(&self) -> &HypergraphInstance {
        &self.graph
    }

    pub fn side(&self, v: VertexId) -> Side {
        self.side[v]
    }

    pub fn vertices_on(&self, s: Side) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.side.len()).filter(move |&v| self.side[v] == s)
    }
}

fn other_end(g: &HypergraphInstance, e: EdgeId, v: VertexId) -> VertexId {
    let vs = g.edge(e);
    if vs[0] == v { vs[1] } else { vs[0] }
}

/// Deferred acceptance with `proposers` proposing along their lists and
/// receivers keeping their best offers up to capacity. Works for any
/// capacities and yields the proposer-optimal stable b-matching.
pub fn deferred_acceptance(inst: &BipartiteInstance, proposers: Side) -> BMatching {
    let g = &inst.graph;
    let mut held = BMatching::empty(g);
    let mut next = vec![0usize; g.n_vertices()];
    let mut queue: VecDeque<VertexId> = inst.vertices_on(proposers).collect();
    let mut queued = vec![false; g.n_vertices()];
    for &v in &queue {
        queued[v] = true;
    }
    while let Some(p) = queue.pop_front() {
        queued[p] = false;
        while held.load(p) < g.capacity(p) && next[p] < g.preference(p).len() {
            let e = g.preference(p)[next[p]];
            next[p] += 1;
            let r = other_end(g, e, p);
            if g.capacity(r) == 0 {
                continue;
            }
            held.insert(g, e);
            if held.load(r) > g.capacity(r) {
                let worst = held.at(g, r).max_by_key(|&f| g.rank(r, f)).unwrap();
                held.remove(g, worst);
                let loser = other_end(g, worst, r);
                if loser != p && !queued[loser] {
                    queued[loser] = true;
                    queue.push_back(loser);
                }
            }
        }
    }
    held
}

/// Both inputs must be stable; reports whether every vertex has the same load in both.
pub fn rural_hospitals_check(inst: &BipartiteInstance, m1: &BMatching, m2: &BMatching) -> Result<bool> {
    for m in [m1, m2] {
        if !crate::stability::is_stable(&inst.graph, m)? {
            return Err(Error::Unsupported("rural-hospitals check needs stable inputs".into()));
        }
    }
    Ok(m1.loads() == m2.loads())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MaxWeightMethod {
    /// Brute force when the clone instance has at most `BRUTE_FORCE_CLONE_EDGES` edges.
    #[default]
    Auto,
    Rotations,
    BruteForce,
}

pub const BRUTE_FORCE_CLONE_EDGES: usize = 14;

/// Maximum-weight stable b-matching. Rotations need one side with unit
/// capacities; genuine many-to-many instances fall back to enumeration.
pub fn maxw_stable(inst: &BipartiteInstance, method: MaxWeightMethod) -> Result<(BMatching, i64)> {
    let g = &inst.graph;
    let unit_side = [Side::Left, Side::Right]
        .into_iter()
        .find(|&s| inst.vertices_on(s).all(|v| g.capacity(v) <= 1));
    let clone_edges: usize = (0..g.n_edges())
        .map(|e| g.edge(e).iter().map(|&v| g.capacity(v) as usize).max().unwrap_or(0))
        .sum();
    let brute = match (method, unit_side) {
        (MaxWeightMethod::BruteForce, _) => true,
        (_, None) => true,
        (MaxWeightMethod::Auto, Some(_)) => clone_edges <= BRUTE_FORCE_CLONE_EDGES,
        (MaxWeightMethod::Rotations, Some(_)) => false,
    };
    if brute {
        if unit_side.is_none() && method == MaxWeightMethod::Rotations {
            return Err(Error::Unsupported("rotations need a unit-capacity side".into()));
        }
        let found = maxw_stable_bruteforce_capped(g, crate::stability::DEFAULT_EDGE_CAP)?;
        return found.ok_or_else(|| Error::InternalConsistency("bipartite instance without stable matching".into()));
    }
    let clones = CloneInstance::build(inst, unit_side.unwrap())?;
    let chosen = clones.max_weight_matching()?;
    let mut m = BMatching::empty(g);
    for ce in chosen {
        m.insert(g, clones.origin[ce]);
    }
    m.check_feasible(g)?;
    let w = m.weight(g);
    Ok((m, w))
}

/// One-to-one instance with the multi-capacity side split into clones.
struct CloneInstance {
    graph: HypergraphInstance,
    is_man: Vec<bool>,
    /// Original edge of every clone edge.
    origin: Vec<EdgeId>,
}

impl CloneInstance {
    fn build(inst: &BipartiteInstance, men_side: Side) -> Result<Self> {
        let g = &inst.graph;
        let n = g.n_vertices();
        // vertex ids: men keep one slot each, women get one per unit of capacity
        let mut first_clone = vec![0usize; n];
        let mut count = 0;
        let mut is_man = Vec::new();
        for v in 0..n {
            first_clone[v] = count;
            let copies = if inst.side[v] == men_side { 1 } else { g.capacity(v) as usize };
            count += copies;
            is_man.extend(std::iter::repeat_n(inst.side[v] == men_side, copies));
        }
        let copies = |v: VertexId| if inst.side[v] == men_side { 1 } else { g.capacity(v) as usize };
        let mut edges = Vec::new();
        let mut origin = Vec::new();
        let mut clone_of = vec![Vec::new(); g.n_edges()];
        for e in 0..g.n_edges() {
            let (a, b) = (g.edge(e)[0], g.edge(e)[1]);
            let (man, woman) = if inst.side[a] == men_side { (a, b) } else { (b, a) };
            if g.capacity(man) == 0 {
                continue;
            }
            for k in 0..copies(woman) {
                let mut pair = vec![first_clone[man], first_clone[woman] + k];
                pair.sort_unstable();
                clone_of[e].push(edges.len());
                edges.push(pair);
                origin.push(e);
            }
        }
        let mut prefs = vec![Vec::new(); count];
        for v in 0..n {
            for &e in g.preference(v) {
                if inst.side[v] == men_side {
                    prefs[first_clone[v]].extend(clone_of[e].iter().copied());
                } else {
                    for (k, &ce) in clone_of[e].iter().enumerate() {
                        prefs[first_clone[v] + k].push(ce);
                    }
                }
            }
        }
        let weights = Some(origin.iter().map(|&e| g.weight(e)).collect());
        let graph = HypergraphInstance::new(RawInstance {
            n_vertices: count,
            edges,
            capacities: vec![1; count],
            preferences: prefs,
            weights,
        })?;
        Ok(CloneInstance { graph, is_man, origin })
    }

    fn side_labels(&self) -> Vec<Side> {
        self.is_man.iter().map(|&m| if m { Side::Left } else { Side::Right }).collect()
    }

    fn max_weight_matching(&self) -> Result<Vec<EdgeId>> {
        let g = &self.graph;
        let bip = BipartiteInstance { graph: g.clone(), side: self.side_labels() };
        let partner = |m: &BMatching| -> Vec<Option<EdgeId>> {
            (0..g.n_vertices()).map(|v| m.at(g, v).next()).collect()
        };
        let m0 = partner(&deferred_acceptance(&bip, Side::Left));
        let mz = partner(&deferred_acceptance(&bip, Side::Right));
        let rotations = enumerate_rotations(g, &self.is_man, &m0, &mz)?;
        let chosen = max_weight_closure(g, &self.is_man, &rotations)?;
        let mut current = m0;
        for (i, rot) in rotations.iter().enumerate() {
            if chosen[i] {
                for &(man, _, new) in &rot.moves {
                    current[man] = Some(new);
                }
            }
        }
        let mut edges: Vec<EdgeId> =
            (0..g.n_vertices()).filter(|&v| self.is_man[v]).filter_map(|v| current[v]).collect();
        edges.sort_unstable();
        Ok(edges)
    }
}

#[derive(Debug, Clone)]
struct Rotation {
    /// (man, edge he leaves, edge he takes)
    moves: Vec<(VertexId, EdgeId, EdgeId)>,
}

// Walks from the man-optimal to the woman-optimal matching, eliminating one
// exposed rotation at a time. Every rotation appears exactly once.
fn enumerate_rotations(
    g: &HypergraphInstance,
    is_man: &[bool],
    m0: &[Option<EdgeId>],
    mz: &[Option<EdgeId>],
) -> Result<Vec<Rotation>> {
    let mut cur = m0.to_vec();
    let mut rotations = Vec::new();
    let men: Vec<VertexId> = (0..g.n_vertices()).filter(|&v| is_man[v] && m0[v].is_some()).collect();
    loop {
        let movable: Vec<VertexId> = men.iter().copied().filter(|&m| cur[m] != mz[m]).collect();
        let Some(&start) = movable.first() else { break };
        let next = |m: VertexId| -> Result<(EdgeId, VertexId)> {
            let list = g.preference(m);
            let from = g.rank(m, cur[m].unwrap()) + 1;
            let to = g.rank(m, mz[m].unwrap());
            for &e in &list[from..=to] {
                let w = other_end(g, e, m);
                if let Some(we) = cur[w] {
                    if g.prefers(w, e, we) {
                        return Ok((e, other_end(g, we, w)));
                    }
                }
            }
            Err(Error::InternalConsistency(format!("man {m} has no successor")))
        };
        let mut seen = vec![usize::MAX; g.n_vertices()];
        let mut path = Vec::new();
        let mut m = start;
        while seen[m] == usize::MAX {
            seen[m] = path.len();
            let (e, nm) = next(m)?;
            path.push((m, e));
            m = nm;
        }
        let cycle = &path[seen[m]..];
        let moves: Vec<(VertexId, EdgeId, EdgeId)> = cycle.iter().map(|&(man, e)| (man, cur[man].unwrap(), e)).collect();
        for &(man, _, e) in &moves {
            cur[man] = Some(e);
            cur[other_end(g, e, man)] = Some(e);
        }
        rotations.push(Rotation { moves });
    }
    if cur != mz {
        return Err(Error::InternalConsistency("rotation walk missed the woman-optimal matching".into()));
    }
    Ok(rotations)
}

// Closed set of rotations of maximum total weight change.
fn max_weight_closure(g: &HypergraphInstance, is_man: &[bool], rotations: &[Rotation]) -> Result<Vec<bool>> {
    let k = rotations.len();
    let weight: Vec<i64> = rotations
        .iter()
        .map(|r| r.moves.iter().map(|&(_, old, new)| g.weight(new) - g.weight(old)).sum())
        .collect();

    // for each man: rotations moving him, in order; for each woman: (rotation, old, new)
    let n = g.n_vertices();
    let mut man_moves: Vec<Vec<(usize, EdgeId, EdgeId)>> = vec![Vec::new(); n];
    let mut woman_moves: Vec<Vec<(usize, EdgeId, EdgeId)>> = vec![Vec::new(); n];
    for (i, r) in rotations.iter().enumerate() {
        let cycle_len = r.moves.len();
        for (j, &(man, old, new)) in r.moves.iter().enumerate() {
            man_moves[man].push((i, old, new));
            // the woman of `new` previously held the next man's old edge
            let w = other_end(g, new, man);
            let prev = r.moves[(j + 1) % cycle_len].1;
            woman_moves[w].push((i, prev, new));
        }
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); k];
    for m in (0..n).filter(|&v| is_man[v]) {
        for pair in man_moves[m].windows(2) {
            preds[pair[1].0].push(pair[0].0);
        }
        for &(i, old, new) in &man_moves[m] {
            let (lo, hi) = (g.rank(m, old) + 1, g.rank(m, new));
            for &e in &g.preference(m)[lo..hi] {
                let w = other_end(g, e, m);
                let crossing = woman_moves[w]
                    .iter()
                    .find(|&&(_, was, now)| g.prefers(w, e, was) && g.prefers(w, now, e));
                if let Some(&(j, _, _)) = crossing {
                    preds[i].push(j);
                }
            }
        }
    }

    let positive: u64 = weight.iter().filter(|&&w| w > 0).map(|&w| w as u64).sum();
    let infinite = positive + 1;
    let mut net: DiGraph<(), u64> = DiGraph::new();
    let source = net.add_node(());
    let sink = net.add_node(());
    let nodes: Vec<NodeIndex> = (0..k).map(|_| net.add_node(())).collect();
    for i in 0..k {
        if weight[i] > 0 {
            net.add_edge(source, nodes[i], weight[i] as u64);
        } else if weight[i] < 0 {
            net.add_edge(nodes[i], sink, weight[i].unsigned_abs());
        }
        for &j in &preds[i] {
            net.add_edge(nodes[i], nodes[j], infinite);
        }
    }
    let (_, flows) = dinics(&net, source, sink);
    // source side of the minimum cut: reachable through residual capacity
    let mut reach = vec![false; net.node_count()];
    reach[source.index()] = true;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for edge in net.raw_edges().iter().enumerate() {
            let (idx, ed) = edge;
            let (a, b) = (ed.source(), ed.target());
            let residual_fwd = a == u && ed.weight - flows[idx] > 0;
            let residual_back = b == u && flows[idx] > 0;
            let next = if residual_fwd { b } else if residual_back { a } else { continue };
            if !reach[next.index()] {
                reach[next.index()] = true;
                queue.push_back(next);
            }
        }
    }
    Ok(nodes.iter().map(|n| reach[n.index()]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::{enumerate_stable, is_stable};

    // two residents, one hospital of capacity 2 and one of capacity 1
    fn small() -> BipartiteInstance {
        let g = HypergraphInstance::from_parts(
            4,
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
            vec![1, 1, 2, 1],
            vec![vec![1, 0], vec![3, 2], vec![2, 0], vec![1, 3]],
            Some(vec![5, 1, 2, 7]),
        )
        .unwrap();
        BipartiteInstance::new(g, vec![Side::Left, Side::Left, Side::Right, Side::Right]).unwrap()
    }

    #[test]
    fn both_orientations_are_stable() {
        let b = small();
        let l = deferred_acceptance(&b, Side::Left);
        let r = deferred_acceptance(&b, Side::Right);
        assert!(is_stable(b.graph(), &l).unwrap());
        assert!(is_stable(b.graph(), &r).unwrap());
        assert!(rural_hospitals_check(&b, &l, &r).unwrap());
    }

    #[test]
    fn rotations_agree_with_enumeration() {
        let b = small();
        let (m, w) = maxw_stable(&b, MaxWeightMethod::Rotations).unwrap();
        let (_, bw) = maxw_stable(&b, MaxWeightMethod::BruteForce).unwrap();
        assert_eq!(w, bw);
        assert!(is_stable(b.graph(), &m).unwrap());
    }

    #[test]
    fn two_coloring_detects_odd_cycle() {
        let g = HypergraphInstance::from_parts(
            3,
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            vec![1; 3],
            vec![vec![0, 2], vec![0, 1], vec![1, 2]],
            None,
        )
        .unwrap();
        assert!(BipartiteInstance::from_two_coloring(g).is_err());
    }

    #[test]
    fn crossed_preferences_have_two_stable_matchings() {
        // classic 2x2 with opposite preferences
        let g = HypergraphInstance::from_parts(
            4,
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]],
            vec![1; 4],
            vec![vec![0, 1], vec![3, 2], vec![2, 0], vec![1, 3]],
            Some(vec![1, 10, 10, 1]),
        )
        .unwrap();
        let b = BipartiteInstance::from_two_coloring(g).unwrap();
        assert_eq!(enumerate_stable(b.graph(), None).unwrap().len(), 2);
        let (m, w) = maxw_stable(&b, MaxWeightMethod::Rotations).unwrap();
        assert_eq!((m.edges(), w), (vec![1, 2], 20));
    }
}
