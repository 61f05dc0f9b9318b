//! Maximum-weight stable b-matchings in subpath hypergraphs.
//!
//! Edges are processed by right endpoint along the path ordering. A table
//! entry is a *strategy* (per window vertex: the worst edge it will end up
//! with, or "stays unsaturated") together with a partial b-matching on the
//! processed edges. An edge is skipped only when the strategy promises to
//! dominate it, and added only when that agrees with every strategy value.
//! Among entries with equal strategy and window loads only the best one is
//! kept, which bounds the table by the window size.
//!
//! Side constraints reduce to weights: forced edges gain and forbidden edges
//! lose `1 + sum |w|`; a vertex is kept saturated (or unsaturated) through a
//! private singleton edge ranked last, which is then forbidden (or forced).

use std::collections::HashMap;

use serde::Serialize;

use crate::classes::path_positions;
use crate::error::{Error, Result};
use crate::hypergraph::{better, BMatching, EdgeId, HypergraphInstance, RawInstance, VertexId};

/// Planned worst edge at a window vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Threshold {
    Edge(EdgeId),
    /// The vertex will stay below capacity.
    Unsaturated,
}

const UNSAT: u32 = u32::MAX;

impl Threshold {
    fn decode(x: u32) -> Self {
        if x == UNSAT { Threshold::Unsaturated } else { Threshold::Edge(x as usize) }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SideConstraints {
    pub force: Vec<EdgeId>,
    pub forbid: Vec<EdgeId>,
    pub saturate: Vec<VertexId>,
    pub leave_unsaturated: Vec<VertexId>,
}

impl SideConstraints {
    pub fn is_empty(&self) -> bool {
        *self == SideConstraints::default()
    }
}

#[derive(Debug, Clone)]
pub struct SubpathOptions {
    /// Check the table invariants after every step.
    pub debug_invariants: bool,
    /// Abort once a table grows beyond this many entries.
    pub state_cap: usize,
    pub constraints: SideConstraints,
}

impl Default for SubpathOptions {
    fn default() -> Self {
        SubpathOptions { debug_invariants: false, state_cap: 4_000_000, constraints: SideConstraints::default() }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SubpathStats {
    pub steps: usize,
    /// Largest table after a step.
    pub max_states: usize,
    /// Largest table after extending the window, before the edge is decided.
    pub max_extended_states: usize,
    /// `(delta * (b_max + 1)) ^ l_max`, saturating.
    pub state_bound: u128,
}

impl SubpathStats {
    pub fn within_bound(&self) -> bool {
        (self.max_states as u128) <= self.state_bound
    }
}

#[derive(Debug, Clone)]
pub struct SubpathOutcome {
    /// Best stable b-matching and its weight, or `None` if none satisfies the constraints.
    pub best: Option<(BMatching, i64)>,
    pub stats: SubpathStats,
}

/// Maximum-weight stable b-matching without side constraints.
pub fn solve_subpath(inst: &HypergraphInstance, ordering: &[VertexId]) -> Result<Option<(BMatching, i64)>> {
    Ok(solve_subpath_with(inst, ordering, &SubpathOptions::default())?.best)
}

pub fn solve_subpath_with(
    inst: &HypergraphInstance,
    ordering: &[VertexId],
    opts: &SubpathOptions,
) -> Result<SubpathOutcome> {
    path_positions(inst, ordering)?;
    if opts.constraints.is_empty() {
        return run_table(inst, ordering, opts);
    }
    let c = &opts.constraints;
    for &e in c.force.iter().chain(&c.forbid) {
        if e >= inst.n_edges() {
            return Err(Error::UnknownEdge(e));
        }
    }
    for &v in c.saturate.iter().chain(&c.leave_unsaturated) {
        if v >= inst.n_vertices() {
            return Err(Error::UnknownVertex(v));
        }
    }
    let m = inst.n_edges();
    let mut raw: RawInstance = inst.raw().clone();
    let mut bonus = vec![0i8; m];
    for &e in &c.force {
        bonus[e] = 1;
    }
    for &e in &c.forbid {
        if bonus[e] == 1 {
            return Ok(SubpathOutcome { best: None, stats: SubpathStats::default() });
        }
        bonus[e] = -1;
    }
    let mut wanted: Vec<Option<i8>> = vec![None; inst.n_vertices()];
    for (&v, sign) in c
        .saturate
        .iter()
        .map(|v| (v, -1i8))
        .chain(c.leave_unsaturated.iter().map(|v| (v, 1i8)))
    {
        match wanted[v] {
            Some(s) if s != sign => {
                return Ok(SubpathOutcome { best: None, stats: SubpathStats::default() })
            }
            Some(_) => {}
            None => wanted[v] = Some(sign),
        }
    }
    for (v, sign) in wanted.iter().enumerate().filter_map(|(v, s)| s.map(|s| (v, s))) {
        let id = raw.edges.len();
        raw.edges.push(vec![v]);
        raw.preferences[v].push(id);
        bonus.push(sign);
    }
    let big = inst
        .abs_weight_sum()
        .checked_add(1)
        .ok_or_else(|| Error::Overflow("weight shift".into()))?;
    let mut weights = Vec::with_capacity(raw.edges.len());
    for (e, &s) in bonus.iter().enumerate() {
        let base = if e < m { inst.weight(e) } else { 0 };
        let w = base
            .checked_add(big * s as i64)
            .ok_or_else(|| Error::Overflow("shifted weight".into()))?;
        weights.push(w);
    }
    let shifted_total = weights.iter().try_fold(0i64, |acc, w| acc.checked_add(w.checked_abs()?));
    if shifted_total.is_none() {
        return Err(Error::Overflow("sum of shifted weights".into()));
    }
    raw.weights = Some(weights);
    let extended = HypergraphInstance::new(raw)?;

    let inner = SubpathOptions { constraints: SideConstraints::default(), ..opts.clone() };
    let outcome = run_table(&extended, ordering, &inner)?;
    let best = outcome.best.and_then(|(mat, _)| {
        let satisfied = (0..extended.n_edges()).all(|e| match bonus[e] {
            1 => mat.contains(e),
            -1 => !mat.contains(e),
            _ => true,
        });
        satisfied.then(|| {
            let kept: Vec<EdgeId> = mat.edges().into_iter().filter(|&e| e < m).collect();
            let back = BMatching::from_edges(inst, &kept).expect("restriction stays feasible");
            let w = back.weight(inst);
            (back, w)
        })
    });
    Ok(SubpathOutcome { best, stats: outcome.stats })
}

struct Entry {
    weight: i64,
    members: Vec<EdgeId>,
}

fn offer(table: &mut HashMap<Vec<u32>, Entry>, key: Vec<u32>, weight: i64, members: Vec<EdgeId>) {
    match table.get_mut(&key) {
        Some(cur) => {
            if better(weight, &members, cur.weight, &cur.members) {
                *cur = Entry { weight, members };
            }
        }
        None => {
            table.insert(key, Entry { weight, members });
        }
    }
}

fn run_table(inst: &HypergraphInstance, ordering: &[VertexId], opts: &SubpathOptions) -> Result<SubpathOutcome> {
    let pos = path_positions(inst, ordering)?;
    let params = inst.derived_params();
    let mut stats = SubpathStats {
        state_bound: (params.delta as u128 * (params.b_max as u128 + 1)).saturating_pow(params.l_max as u32),
        ..SubpathStats::default()
    };

    // edges through a capacity-zero vertex can never be used and never block
    let live: Vec<bool> = (0..inst.n_edges())
        .map(|e| inst.edge(e).iter().all(|&v| inst.capacity(v) > 0))
        .collect();
    let right = |e: EdgeId| inst.edge(e).iter().map(|&v| pos[v]).max().unwrap();
    let left = |e: EdgeId| inst.edge(e).iter().map(|&v| pos[v]).min().unwrap();
    let mut order: Vec<EdgeId> = (0..inst.n_edges()).filter(|&e| live[e]).collect();
    order.sort_by_key(|&e| (right(e), left(e), e));
    let l_max = order.iter().map(|&e| inst.edge(e).len()).max().unwrap_or(0);

    // candidate strategy values per vertex
    let values: Vec<Vec<u32>> = (0..inst.n_vertices())
        .map(|v| {
            let mut vals = vec![UNSAT];
            vals.extend(inst.incident(v).iter().filter(|&&e| live[e]).map(|&e| e as u32));
            vals
        })
        .collect();

    let mut table: HashMap<Vec<u32>, Entry> = HashMap::new();
    table.insert(Vec::new(), Entry { weight: 0, members: Vec::new() });
    let mut window: Option<(usize, usize)> = None;
    let mut processed = vec![false; inst.n_edges()];

    for &e in &order {
        stats.steps += 1;
        let hi = right(e);
        let lo = (hi + 1).saturating_sub(l_max);
        let width = hi - lo + 1;

        // carry entries into the new window
        let mut extended: HashMap<Vec<u32>, Entry> = HashMap::new();
        let new_from = match window {
            None => lo,
            Some((_, phi)) => (phi + 1).max(lo),
        };
        let new_vertices: Vec<VertexId> = (new_from..=hi).map(|p| ordering[p]).collect();
        for (key, entry) in table.drain() {
            let mut thr: Vec<u32> = Vec::with_capacity(width);
            let mut load: Vec<u32> = Vec::with_capacity(width);
            if let Some((plo, phi)) = window {
                let k = phi - plo + 1;
                let mut complete = true;
                for p in plo..=phi {
                    let (t, l) = (key[p - plo], key[k + p - plo]);
                    if p < lo {
                        if t != UNSAT && l < inst.capacity(ordering[p]) {
                            complete = false;
                            break;
                        }
                    } else {
                        thr.push(t);
                        load.push(l);
                    }
                }
                if !complete {
                    continue;
                }
            }
            extend_product(&new_vertices, &values, &mut thr, &mut |t: &[u32]| {
                let mut key = t.to_vec();
                key.extend(load.iter().copied());
                key.extend(std::iter::repeat_n(0, new_vertices.len()));
                offer(&mut extended, key, entry.weight, entry.members.clone());
            });
        }
        stats.max_extended_states = stats.max_extended_states.max(extended.len());
        window = Some((lo, hi));

        // decide the edge
        let slots: Vec<(usize, VertexId)> = inst.edge(e).iter().map(|&v| (pos[v] - lo, v)).collect();
        let w_e = inst.weight(e);
        for (key, entry) in extended {
            let thr = |i: usize| Threshold::decode(key[i]);
            let plans = slots.iter().any(|&(i, v)| match thr(i) {
                Threshold::Edge(f) => f != e && inst.prefers(v, f, e),
                Threshold::Unsaturated => false,
            });
            let untouched = slots.iter().all(|&(i, _)| thr(i) != Threshold::Edge(e));
            let can_add = slots.iter().all(|&(i, v)| {
                let l = key[width + i];
                let cap = inst.capacity(v);
                match thr(i) {
                    Threshold::Unsaturated => l + 1 < cap,
                    Threshold::Edge(f) => l < cap && (f == e || inst.prefers(v, e, f)),
                }
            });
            if can_add {
                let mut k2 = key.clone();
                for &(i, _) in &slots {
                    k2[width + i] += 1;
                }
                let mut members = entry.members.clone();
                let at = members.partition_point(|&x| x < e);
                members.insert(at, e);
                offer(&mut table, k2, entry.weight + w_e, members);
            }
            if plans && untouched {
                offer(&mut table, key, entry.weight, entry.members);
            }
        }
        processed[e] = true;
        stats.max_states = stats.max_states.max(table.len());
        if table.len() > opts.state_cap {
            return Err(Error::StateCapExceeded { cap: opts.state_cap });
        }
        if opts.debug_invariants {
            if !stats.within_bound() {
                return Err(Error::InvariantViolation(format!(
                    "table holds {} entries, bound is {}",
                    table.len(),
                    stats.state_bound
                )));
            }
            for (key, entry) in &table {
                check_realizes(inst, ordering, lo, key, &entry.members, &processed)?;
            }
        }
    }

    let mut best: Option<(i64, Vec<EdgeId>)> = None;
    for (key, entry) in table {
        if let Some((lo, hi)) = window {
            let k = hi - lo + 1;
            let complete = (0..k).all(|i| key[i] == UNSAT || key[k + i] >= inst.capacity(ordering[lo + i]));
            if !complete {
                continue;
            }
        }
        if best.as_ref().is_none_or(|(bw, bm)| better(entry.weight, &entry.members, *bw, bm)) {
            best = Some((entry.weight, entry.members));
        }
    }
    let best = best.map(|(w, members)| {
        (BMatching::from_edges(inst, &members).expect("table entries are feasible"), w)
    });
    Ok(SubpathOutcome { best, stats })
}

// Calls `f` with `prefix` followed by every combination of values for `vertices`.
fn extend_product(vertices: &[VertexId], values: &[Vec<u32>], prefix: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    match vertices.split_first() {
        None => f(prefix),
        Some((&v, rest)) => {
            for &x in &values[v] {
                prefix.push(x);
                extend_product(rest, values, prefix, f);
                prefix.pop();
            }
        }
    }
}

// The entry's strategy must be compatible with its matching, contain only
// matched processed edges, and promise to dominate every blocking processed edge.
fn check_realizes(
    inst: &HypergraphInstance,
    ordering: &[VertexId],
    lo: usize,
    key: &[u32],
    members: &[EdgeId],
    processed: &[bool],
) -> Result<()> {
    let k = key.len() / 2;
    let fail = |msg: String| Err(Error::InvariantViolation(msg));
    let mut matching = BMatching::empty(inst);
    for &e in members {
        matching.insert(inst, e);
    }
    for i in 0..k {
        let v = ordering[lo + i];
        if matching.load(v) != key[k + i] {
            return fail(format!("stored load of vertex {v} is stale"));
        }
        match Threshold::decode(key[i]) {
            // capacity-zero vertices only ever carry this value
            Threshold::Unsaturated if inst.capacity(v) == 0 => {}
            Threshold::Unsaturated => {
                if matching.load(v) >= inst.capacity(v) {
                    return fail(format!("vertex {v} planned unsaturated but is full"));
                }
            }
            Threshold::Edge(f) => {
                if matching.at(inst, v).any(|g| inst.prefers(v, f, g)) {
                    return fail(format!("vertex {v} holds an edge worse than its threshold {f}"));
                }
                if processed[f] && !matching.contains(f) {
                    return fail(format!("threshold {f} of vertex {v} was processed but not taken"));
                }
            }
        }
    }
    for e in (0..inst.n_edges()).filter(|&e| processed[e] && !matching.contains(e)) {
        let dominated = inst.edge(e).iter().any(|&v| {
            matching.load(v) >= inst.capacity(v) && matching.at(inst, v).all(|g| inst.prefers(v, g, e))
        });
        if dominated {
            continue;
        }
        let planned = inst.edge(e).iter().any(|&v| {
            let p = ordering.iter().position(|&x| x == v).unwrap();
            p >= lo
                && p < lo + k
                && matches!(Threshold::decode(key[p - lo]), Threshold::Edge(f) if inst.prefers(v, f, e))
        });
        if !planned {
            return fail(format!("blocking edge {e} is not planned to be dominated"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::maxw_stable_bruteforce;

    fn path3() -> HypergraphInstance {
        // path 0-1-2, edges {0,1}, {1,2}, {1}; vertex 1 has capacity 2
        HypergraphInstance::from_parts(
            3,
            vec![vec![0, 1], vec![1, 2], vec![1]],
            vec![1, 2, 1],
            vec![vec![0], vec![2, 1, 0], vec![1]],
            Some(vec![3, 4, -1]),
        )
        .unwrap()
    }

    fn debug() -> SubpathOptions {
        SubpathOptions { debug_invariants: true, ..SubpathOptions::default() }
    }

    #[test]
    fn matches_brute_force_on_small_path() {
        let inst = path3();
        let out = solve_subpath_with(&inst, &[0, 1, 2], &debug()).unwrap();
        let (m, w) = out.best.unwrap();
        let (bm, bw) = maxw_stable_bruteforce(&inst).unwrap().unwrap();
        assert_eq!(w, bw);
        assert_eq!(m, bm);
        assert!(out.stats.within_bound());
    }

    #[test]
    fn forcing_and_forbidding() {
        let inst = path3();
        let mut opts = debug();
        // {1, 2} is the only stable b-matching
        opts.constraints.forbid = vec![0];
        let (m, w) = solve_subpath_with(&inst, &[0, 1, 2], &opts).unwrap().best.unwrap();
        assert_eq!((m.edges(), w), (vec![1, 2], 3));
        opts.constraints.forbid = vec![2];
        assert!(solve_subpath_with(&inst, &[0, 1, 2], &opts).unwrap().best.is_none());
        opts.constraints = SideConstraints { force: vec![0], forbid: vec![0], ..Default::default() };
        assert!(solve_subpath_with(&inst, &[0, 1, 2], &opts).unwrap().best.is_none());
    }

    #[test]
    fn saturation_constraints() {
        let inst = path3();
        let mut opts = debug();
        opts.constraints.leave_unsaturated = vec![1];
        assert!(solve_subpath_with(&inst, &[0, 1, 2], &opts).unwrap().best.is_none());
        opts.constraints = SideConstraints { saturate: vec![1], ..Default::default() };
        let (m, _) = solve_subpath_with(&inst, &[0, 1, 2], &opts).unwrap().best.unwrap();
        assert_eq!(m.load(1), 2);
    }

    #[test]
    fn bad_ordering_is_rejected() {
        let inst = path3();
        assert!(matches!(solve_subpath(&inst, &[1, 0, 2]), Err(Error::Certificate(_))));
    }

    #[test]
    fn overlapping_intervals_agree_with_brute_force() {
        let inst = HypergraphInstance::from_parts(
            3,
            vec![vec![0, 1], vec![1, 2], vec![0, 1, 2]],
            vec![1, 1, 1],
            vec![vec![2, 0], vec![0, 1, 2], vec![2, 1]],
            None,
        )
        .unwrap();
        let brute = maxw_stable_bruteforce(&inst).unwrap();
        let dp = solve_subpath_with(&inst, &[0, 1, 2], &debug()).unwrap().best;
        assert_eq!(brute.map(|x| x.1), dp.map(|x| x.1));
    }
}
