//! Hypergraph instances with capacities, strict preferences and weights,
//! plus the `BMatching` edge-set type shared by every solver.
//!
//! An instance is validated once and is immutable afterwards. Vertices and
//! edges are dense ids `0..n` and `0..m`; every vertex ranks exactly its
//! incident edges, best first.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// Unvalidated instance data, as it appears on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInstance {
    pub n_vertices: usize,
    pub edges: Vec<Vec<VertexId>>,
    pub capacities: Vec<u32>,
    pub preferences: Vec<Vec<EdgeId>>,
    pub weights: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    EmptyEdge(EdgeId),
    UnsortedEdge(EdgeId),
    DuplicateVertex { edge: EdgeId, vertex: VertexId },
    VertexOutOfRange { edge: EdgeId, vertex: VertexId },
    CapacityCount { expected: usize, found: usize },
    PreferenceCount { expected: usize, found: usize },
    PreferenceMismatch { vertex: VertexId, detail: String },
    WeightCount { expected: usize, found: usize },
    WeightOverflow,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::EmptyEdge(e) => write!(f, "edge {e} is empty"),
            Issue::UnsortedEdge(e) => write!(f, "edge {e} lists its vertices out of order"),
            Issue::DuplicateVertex { edge, vertex } => {
                write!(f, "edge {edge} lists vertex {vertex} twice")
            }
            Issue::VertexOutOfRange { edge, vertex } => {
                write!(f, "edge {edge} references vertex {vertex} which does not exist")
            }
            Issue::CapacityCount { expected, found } => {
                write!(f, "expected {expected} capacities, found {found}")
            }
            Issue::PreferenceCount { expected, found } => {
                write!(f, "expected {expected} preference lists, found {found}")
            }
            Issue::PreferenceMismatch { vertex, detail } => {
                write!(f, "preference list of vertex {vertex}: {detail}")
            }
            Issue::WeightCount { expected, found } => {
                write!(f, "expected {expected} weights, found {found}")
            }
            Issue::WeightOverflow => write!(f, "sum of absolute weights overflows i64"),
        }
    }
}

/// Everything wrong with a raw instance. Empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.issues.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks every structural invariant and collects all violations.
pub fn validate(raw: &RawInstance) -> ValidationReport {
    let mut issues = Vec::new();
    let n = raw.n_vertices;
    let m = raw.edges.len();
    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for (e, verts) in raw.edges.iter().enumerate() {
        if verts.is_empty() {
            issues.push(Issue::EmptyEdge(e));
            continue;
        }
        for w in verts.windows(2) {
            match w[0].cmp(&w[1]) {
                Ordering::Equal => issues.push(Issue::DuplicateVertex { edge: e, vertex: w[0] }),
                Ordering::Greater => {
                    issues.push(Issue::UnsortedEdge(e));
                    break;
                }
                Ordering::Less => {}
            }
        }
        let mut seen = Vec::with_capacity(verts.len());
        for &v in verts {
            if v >= n {
                issues.push(Issue::VertexOutOfRange { edge: e, vertex: v });
            } else if !seen.contains(&v) {
                seen.push(v);
                incident[v].push(e);
            }
        }
    }
    if raw.capacities.len() != n {
        issues.push(Issue::CapacityCount { expected: n, found: raw.capacities.len() });
    }
    if raw.preferences.len() != n {
        issues.push(Issue::PreferenceCount { expected: n, found: raw.preferences.len() });
    } else {
        for (v, list) in raw.preferences.iter().enumerate() {
            let mut sorted = list.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                issues.push(Issue::PreferenceMismatch {
                    vertex: v,
                    detail: "an edge is ranked twice".into(),
                });
            } else if sorted != incident[v] {
                issues.push(Issue::PreferenceMismatch {
                    vertex: v,
                    detail: format!("ranks {:?} but is incident to {:?}", sorted, incident[v]),
                });
            }
        }
    }
    if let Some(w) = &raw.weights {
        if w.len() != m {
            issues.push(Issue::WeightCount { expected: m, found: w.len() });
        }
        let total = w.iter().try_fold(0i64, |acc, x| acc.checked_add(x.checked_abs()?));
        if total.is_none() {
            issues.push(Issue::WeightOverflow);
        }
    }
    ValidationReport { issues }
}

/// Structural parameters used in complexity bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DerivedParams {
    /// Maximum edge size.
    pub l_max: usize,
    /// Maximum vertex degree.
    pub delta: usize,
    /// Maximum capacity.
    pub b_max: u32,
}

/// A validated, immutable instance.
#[derive(Debug, Clone)]
pub struct HypergraphInstance {
    raw: RawInstance,
    incident: Vec<Vec<EdgeId>>,
    rank: Vec<HashMap<EdgeId, usize>>,
}

impl PartialEq for HypergraphInstance {
    fn eq(&self, other: &Self) -> bool {
        self.raw == other.raw
    }
}

impl Eq for HypergraphInstance {}

impl HypergraphInstance {
    pub fn new(raw: RawInstance) -> Result<Self> {
        let report = validate(&raw);
        if !report.is_valid() {
            return Err(Error::InvalidInstance(report));
        }
        let mut incident = vec![Vec::new(); raw.n_vertices];
        for (e, verts) in raw.edges.iter().enumerate() {
            for &v in verts {
                incident[v].push(e);
            }
        }
        let rank = raw
            .preferences
            .iter()
            .map(|list| list.iter().enumerate().map(|(r, &e)| (e, r)).collect())
            .collect();
        Ok(HypergraphInstance { raw, incident, rank })
    }

    /// Convenience constructor; `weights` of `None` means all zero.
    pub fn from_parts(
        n_vertices: usize,
        edges: Vec<Vec<VertexId>>,
        capacities: Vec<u32>,
        preferences: Vec<Vec<EdgeId>>,
        weights: Option<Vec<i64>>,
    ) -> Result<Self> {
        Self::new(RawInstance { n_vertices, edges, capacities, preferences, weights })
    }

    pub fn raw(&self) -> &RawInstance {
        &self.raw
    }

    pub fn into_raw(self) -> RawInstance {
        self.raw
    }

    pub fn n_vertices(&self) -> usize {
        self.raw.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.raw.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> &[VertexId] {
        &self.raw.edges[e]
    }

    pub fn edges(&self) -> &[Vec<VertexId>] {
        &self.raw.edges
    }

    pub fn capacity(&self, v: VertexId) -> u32 {
        self.raw.capacities[v]
    }

    pub fn capacities(&self) -> &[u32] {
        &self.raw.capacities
    }

    /// Incident edges of `v` in ascending id order.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v]
    }

    /// Incident edges of `v`, best first.
    pub fn preference(&self, v: VertexId) -> &[EdgeId] {
        &self.raw.preferences[v]
    }

    /// Position of `e` in the list of `v` (0 is best). Panics if `e` is not incident to `v`.
    pub fn rank(&self, v: VertexId, e: EdgeId) -> usize {
        self.rank[v][&e]
    }

    /// `a` is strictly preferred to `b` by `v`.
    pub fn prefers(&self, v: VertexId, a: EdgeId, b: EdgeId) -> bool {
        self.rank(v, a) < self.rank(v, b)
    }

    pub fn contains(&self, e: EdgeId, v: VertexId) -> bool {
        self.raw.edges[e].binary_search(&v).is_ok()
    }

    pub fn weight(&self, e: EdgeId) -> i64 {
        self.raw.weights.as_ref().map_or(0, |w| w[e])
    }

    pub fn has_weights(&self) -> bool {
        self.raw.weights.is_some()
    }

    pub fn total_weight(&self, edges: impl IntoIterator<Item = EdgeId>) -> i64 {
        edges.into_iter().map(|e| self.weight(e)).sum()
    }

    /// Sum of absolute weights; fits by validation.
    pub fn abs_weight_sum(&self) -> i64 {
        self.raw.weights.as_ref().map_or(0, |w| w.iter().map(|x| x.abs()).sum())
    }

    pub fn derived_params(&self) -> DerivedParams {
        DerivedParams {
            l_max: self.raw.edges.iter().map(Vec::len).max().unwrap_or(0),
            delta: self.incident.iter().map(Vec::len).max().unwrap_or(0),
            b_max: self.raw.capacities.iter().copied().max().unwrap_or(0),
        }
    }

    /// Same structure with replaced weights.
    pub fn with_weights(&self, weights: Option<Vec<i64>>) -> Result<Self> {
        let mut raw = self.raw.clone();
        raw.weights = weights;
        Self::new(raw)
    }
}

/// A set of edges with per-vertex loads. Feasibility is checked on demand.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BMatching {
    member: Vec<bool>,
    load: Vec<u32>,
}

impl BMatching {
    pub fn empty(inst: &HypergraphInstance) -> Self {
        BMatching { member: vec![false; inst.n_edges()], load: vec![0; inst.n_vertices()] }
    }

    /// Builds the set, rejecting unknown ids and capacity violations.
    pub fn from_edges(inst: &HypergraphInstance, edges: &[EdgeId]) -> Result<Self> {
        let mut m = Self::empty(inst);
        for &e in edges {
            if e >= inst.n_edges() {
                return Err(Error::UnknownEdge(e));
            }
            if !m.member[e] {
                m.insert(inst, e);
            }
        }
        m.check_feasible(inst)?;
        Ok(m)
    }

    /// Adds `e` without a capacity check.
    pub fn insert(&mut self, inst: &HypergraphInstance, e: EdgeId) {
        if !self.member[e] {
            self.member[e] = true;
            for &v in inst.edge(e) {
                self.load[v] += 1;
            }
        }
    }

    pub fn remove(&mut self, inst: &HypergraphInstance, e: EdgeId) {
        if self.member[e] {
            self.member[e] = false;
            for &v in inst.edge(e) {
                self.load[v] -= 1;
            }
        }
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.member[e]
    }

    pub fn load(&self, v: VertexId) -> u32 {
        self.load[v]
    }

    pub fn loads(&self) -> &[u32] {
        &self.load
    }

    pub fn len(&self) -> usize {
        self.member.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.member.iter().any(|&b| b)
    }

    /// Member ids, ascending.
    pub fn edges(&self) -> Vec<EdgeId> {
        self.member.iter().enumerate().filter(|(_, &b)| b).map(|(e, _)| e).collect()
    }

    /// Members incident to `v`, ascending.
    pub fn at<'a>(&'a self, inst: &'a HypergraphInstance, v: VertexId) -> impl Iterator<Item = EdgeId> + 'a {
        inst.incident(v).iter().copied().filter(move |&e| self.member[e])
    }

    pub fn is_saturated(&self, inst: &HypergraphInstance, v: VertexId) -> bool {
        self.load[v] >= inst.capacity(v)
    }

    pub fn check_feasible(&self, inst: &HypergraphInstance) -> Result<()> {
        for v in 0..inst.n_vertices() {
            if self.load[v] > inst.capacity(v) {
                return Err(Error::InfeasibleMatching {
                    vertex: v,
                    load: self.load[v] as usize,
                    capacity: inst.capacity(v),
                });
            }
        }
        Ok(())
    }

    pub fn weight(&self, inst: &HypergraphInstance) -> i64 {
        inst.total_weight(self.edges())
    }
}

/// Canonical tie-break order on edge sets given as ascending id lists.
///
/// Sequences are compared position by position, a missing position counting
/// as larger than any id. Equivalently the set containing the smallest id of
/// the symmetric difference comes first. Adding the same disjoint edges to
/// both sides never flips the order, which the dynamic program relies on.
pub fn lex_cmp(a: &[EdgeId], b: &[EdgeId]) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.cmp(y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    // the longer one has an extra id where the shorter has "infinity"
    b.len().cmp(&a.len())
}

/// Ordering used to pick an optimum: higher weight first, then `lex_cmp`.
pub fn better(wa: i64, a: &[EdgeId], wb: i64, b: &[EdgeId]) -> bool {
    match wa.cmp(&wb) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => lex_cmp(a, b) == Ordering::Less,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> RawInstance {
        RawInstance {
            n_vertices: 3,
            edges: vec![vec![0, 1], vec![1, 2], vec![0, 2]],
            capacities: vec![1, 1, 1],
            preferences: vec![vec![0, 2], vec![1, 0], vec![2, 1]],
            weights: None,
        }
    }

    #[test]
    fn valid_instance_builds() {
        let inst = HypergraphInstance::new(triangle()).unwrap();
        assert_eq!(inst.incident(1), &[0, 1]);
        assert!(inst.prefers(1, 1, 0));
        assert_eq!(inst.derived_params(), DerivedParams { l_max: 2, delta: 2, b_max: 1 });
    }

    #[test]
    fn report_lists_every_problem() {
        let mut raw = triangle();
        raw.edges[0] = vec![1, 0];
        raw.edges.push(vec![]);
        raw.edges.push(vec![7]);
        raw.capacities.pop();
        let report = validate(&raw);
        assert!(report.issues.contains(&Issue::UnsortedEdge(0)));
        assert!(report.issues.contains(&Issue::EmptyEdge(3)));
        assert!(report.issues.contains(&Issue::VertexOutOfRange { edge: 4, vertex: 7 }));
        assert!(report.issues.contains(&Issue::CapacityCount { expected: 3, found: 2 }));
    }

    #[test]
    fn preference_must_cover_incident_edges() {
        let mut raw = triangle();
        raw.preferences[0] = vec![0];
        assert!(matches!(
            validate(&raw).issues[0],
            Issue::PreferenceMismatch { vertex: 0, .. }
        ));
        raw.preferences[0] = vec![0, 0];
        assert!(!validate(&raw).is_valid());
    }

    #[test]
    fn weight_overflow_is_reported() {
        let mut raw = triangle();
        raw.weights = Some(vec![i64::MAX, 1, 0]);
        assert!(validate(&raw).issues.contains(&Issue::WeightOverflow));
        raw.weights = Some(vec![i64::MIN, 0, 0]);
        assert!(validate(&raw).issues.contains(&Issue::WeightOverflow));
    }

    #[test]
    fn infeasible_matching_is_rejected() {
        let inst = HypergraphInstance::new(triangle()).unwrap();
        assert!(matches!(
            BMatching::from_edges(&inst, &[0, 1]),
            Err(Error::InfeasibleMatching { vertex: 1, .. })
        ));
        assert!(matches!(BMatching::from_edges(&inst, &[9]), Err(Error::UnknownEdge(9))));
    }

    #[test]
    fn lex_order_prefers_smallest_differing_id() {
        assert_eq!(lex_cmp(&[1, 2], &[1, 3]), Ordering::Less);
        assert_eq!(lex_cmp(&[1, 2], &[1]), Ordering::Less);
        assert_eq!(lex_cmp(&[], &[]), Ordering::Equal);
        assert_eq!(lex_cmp(&[2], &[1, 5]), Ordering::Greater);
        assert!(better(3, &[5], 2, &[0]));
        assert!(better(3, &[0, 9], 3, &[1]));
    }
}
