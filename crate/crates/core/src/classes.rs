//! Structural classes: laminar families, subpath and subtree hypergraphs,
//! dual-admission tripartite instances. Certificates make membership
//! checkable in linear-ish time.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, HypergraphInstance, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassHint {
    Laminar,
    Subpath,
    Subtree,
    Uda,
    Bipartite,
    General,
}

impl std::str::FromStr for ClassHint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "laminar" => ClassHint::Laminar,
            "subpath" => ClassHint::Subpath,
            "subtree" => ClassHint::Subtree,
            "uda" => ClassHint::Uda,
            "bipartite" => ClassHint::Bipartite,
            "general" => ClassHint::General,
            other => return Err(Error::Certificate(format!("unknown class {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Student,
    University,
    Program,
}

/// Vertex roles of a tripartite dual-admission hypergraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UdaPartition {
    pub roles: Vec<Role>,
    /// For each program vertex, the university vertex offering it.
    pub program_university: Vec<Option<VertexId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassCertificate {
    /// Vertex ids listed in path order.
    PathOrdering(Vec<VertexId>),
    /// Parent pointer per vertex; exactly one root.
    TreeWitness(Vec<Option<VertexId>>),
    UdaPartition(UdaPartition),
    /// Parent edge per edge in the containment forest.
    LaminarForest(Vec<Option<EdgeId>>),
}

impl ClassCertificate {
    pub fn class(&self) -> ClassHint {
        match self {
            ClassCertificate::PathOrdering(_) => ClassHint::Subpath,
            ClassCertificate::TreeWitness(_) => ClassHint::Subtree,
            ClassCertificate::UdaPartition(_) => ClassHint::Uda,
            ClassCertificate::LaminarForest(_) => ClassHint::Laminar,
        }
    }
}

/// The `certificate` object of the instance file; any subset of keys.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateBundle {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_ordering: Option<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_parent: Option<Vec<Option<VertexId>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uda_partition: Option<UdaPartition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub laminar_parent: Option<Vec<Option<EdgeId>>>,
}

impl CertificateBundle {
    pub fn is_empty(&self) -> bool {
        *self == CertificateBundle::default()
    }

    pub fn insert(&mut self, cert: ClassCertificate) {
        match cert {
            ClassCertificate::PathOrdering(p) => self.path_ordering = Some(p),
            ClassCertificate::TreeWitness(t) => self.tree_parent = Some(t),
            ClassCertificate::UdaPartition(u) => self.uda_partition = Some(u),
            ClassCertificate::LaminarForest(l) => self.laminar_parent = Some(l),
        }
    }

    /// The certificate matching `hint`, if the bundle carries one.
    pub fn for_class(&self, hint: ClassHint) -> Option<ClassCertificate> {
        match hint {
            ClassHint::Subpath => self.path_ordering.clone().map(ClassCertificate::PathOrdering),
            ClassHint::Subtree => self.tree_parent.clone().map(ClassCertificate::TreeWitness),
            ClassHint::Uda => self.uda_partition.clone().map(ClassCertificate::UdaPartition),
            ClassHint::Laminar => self.laminar_parent.clone().map(ClassCertificate::LaminarForest),
            ClassHint::Bipartite | ClassHint::General => None,
        }
    }
}

fn is_subset(a: &[VertexId], b: &[VertexId]) -> bool {
    // both sorted
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}

fn intersects(a: &[VertexId], b: &[VertexId]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => return true,
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    false
}

/// First pair of crossing edges (intersecting, neither containing the other).
pub fn find_crossing_pair(inst: &HypergraphInstance) -> Option<(EdgeId, EdgeId)> {
    let m = inst.n_edges();
    for e in 0..m {
        for f in e + 1..m {
            let (a, b) = (inst.edge(e), inst.edge(f));
            if intersects(a, b) && !is_subset(a, b) && !is_subset(b, a) {
                return Some((e, f));
            }
        }
    }
    None
}

pub fn is_laminar(inst: &HypergraphInstance) -> Result<()> {
    match find_crossing_pair(inst) {
        Some((e, f)) => Err(Error::NotLaminar(e, f)),
        None => Ok(()),
    }
}

/// Orders the vertices of a laminar instance so that every edge is an
/// interval (recursive List procedure; ties go to the lowest edge id).
pub fn laminar_to_path_ordering(inst: &HypergraphInstance) -> Result<Vec<VertexId>> {
    is_laminar(inst)?;
    let vertices: Vec<VertexId> = (0..inst.n_vertices()).collect();
    let edges: Vec<EdgeId> = (0..inst.n_edges()).collect();
    let mut out = Vec::with_capacity(inst.n_vertices());
    list_vertices(inst, vertices, edges, &mut out);
    Ok(out)
}

fn list_vertices(
    inst: &HypergraphInstance,
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    out: &mut Vec<VertexId>,
) {
    if edges.is_empty() {
        out.extend(vertices);
        return;
    }
    let proper_subset = |a: EdgeId, b: EdgeId| {
        inst.edge(a).len() < inst.edge(b).len() && is_subset(inst.edge(a), inst.edge(b))
    };
    let e_max = *edges
        .iter()
        .find(|&&e| !edges.iter().any(|&f| proper_subset(e, f)))
        .expect("a finite family has a maximal member");
    let top = inst.edge(e_max);
    let inner: Vec<EdgeId> = edges.iter().copied().filter(|&f| proper_subset(f, e_max)).collect();
    let outer: Vec<EdgeId> =
        edges.iter().copied().filter(|&f| !intersects(inst.edge(f), top)).collect();
    let mut covered = vec![false; inst.n_vertices()];
    for &f in &inner {
        for &v in inst.edge(f) {
            covered[v] = true;
        }
    }
    let inner_vertices: Vec<VertexId> = top.iter().copied().filter(|&v| covered[v]).collect();
    let own: Vec<VertexId> = top.iter().copied().filter(|&v| !covered[v]).collect();
    let rest: Vec<VertexId> =
        vertices.into_iter().filter(|v| top.binary_search(v).is_err()).collect();
    list_vertices(inst, inner_vertices, inner, out);
    out.extend(own);
    list_vertices(inst, rest, outer, out);
}

/// Canonical containment forest of a laminar instance. Among parallel
/// copies the lower id is the ancestor.
pub fn laminar_forest(inst: &HypergraphInstance) -> Result<Vec<Option<EdgeId>>> {
    is_laminar(inst)?;
    let m = inst.n_edges();
    let mut parent = vec![None; m];
    for e in 0..m {
        let mut best: Option<EdgeId> = None;
        for f in 0..m {
            if f == e || !is_subset(inst.edge(e), inst.edge(f)) {
                continue;
            }
            let parallel = inst.edge(e).len() == inst.edge(f).len();
            if parallel && f > e {
                continue;
            }
            best = match best {
                None => Some(f),
                Some(g) => {
                    let (lf, lg) = (inst.edge(f).len(), inst.edge(g).len());
                    if lf < lg || (lf == lg && f > g) { Some(f) } else { Some(g) }
                }
            };
        }
        parent[e] = best;
    }
    Ok(parent)
}

/// Checks a certificate against the instance.
pub fn verify_certificate(inst: &HypergraphInstance, cert: &ClassCertificate) -> Result<()> {
    match cert {
        ClassCertificate::PathOrdering(order) => verify_path_ordering(inst, order),
        ClassCertificate::TreeWitness(parent) => verify_tree_witness(inst, parent),
        ClassCertificate::UdaPartition(p) => verify_uda_partition(inst, p),
        ClassCertificate::LaminarForest(parent) => verify_laminar_forest(inst, parent),
    }
}

/// Rejects a certificate whose variant does not match the declared class.
pub fn check_hint(hint: ClassHint, cert: &ClassCertificate) -> Result<()> {
    if cert.class() != hint {
        return Err(Error::Certificate(format!(
            "class hint {hint:?} does not match a {:?} certificate",
            cert.class()
        )));
    }
    Ok(())
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Certificate(msg.into())
}

fn positions_of(n: usize, order: &[VertexId]) -> Result<Vec<usize>> {
    if order.len() != n {
        return Err(bad(format!("ordering lists {} vertices, instance has {n}", order.len())));
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n {
            return Err(bad(format!("ordering mentions unknown vertex {v}")));
        }
        if pos[v] != usize::MAX {
            return Err(bad(format!("ordering lists vertex {v} twice")));
        }
        pos[v] = i;
    }
    Ok(pos)
}

/// Positions of each vertex in a validated path ordering.
pub fn path_positions(inst: &HypergraphInstance, order: &[VertexId]) -> Result<Vec<usize>> {
    verify_path_ordering(inst, order)?;
    positions_of(inst.n_vertices(), order)
}

fn verify_path_ordering(inst: &HypergraphInstance, order: &[VertexId]) -> Result<()> {
    let pos = positions_of(inst.n_vertices(), order)?;
    for (e, verts) in inst.edges().iter().enumerate() {
        let lo = verts.iter().map(|&v| pos[v]).min().unwrap();
        let hi = verts.iter().map(|&v| pos[v]).max().unwrap();
        if hi - lo + 1 != verts.len() {
            return Err(bad(format!("edge {e} is not contiguous in the ordering")));
        }
    }
    Ok(())
}

/// Depth of every vertex below the unique root; fails on cycles or forests.
pub fn tree_depths(parent: &[Option<VertexId>]) -> Result<(VertexId, Vec<usize>)> {
    let n = parent.len();
    let roots: Vec<VertexId> = (0..n).filter(|&v| parent[v].is_none()).collect();
    if roots.len() != 1 {
        return Err(bad(format!("tree witness has {} roots, expected one", roots.len())));
    }
    let root = roots[0];
    let mut children = vec![Vec::new(); n];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            if p >= n {
                return Err(bad(format!("parent of {v} is unknown vertex {p}")));
            }
            children[p].push(v);
        }
    }
    let mut depth = vec![usize::MAX; n];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &c in &children[v] {
            depth[c] = depth[v] + 1;
            queue.push_back(c);
        }
    }
    if depth.contains(&usize::MAX) {
        return Err(bad("tree witness contains a cycle"));
    }
    Ok((root, depth))
}

fn verify_tree_witness(inst: &HypergraphInstance, parent: &[Option<VertexId>]) -> Result<()> {
    if parent.len() != inst.n_vertices() {
        return Err(bad("tree witness length differs from vertex count"));
    }
    tree_depths(parent)?;
    for (e, verts) in inst.edges().iter().enumerate() {
        // a vertex subset of a tree is connected iff it spans |S|-1 tree edges
        let inner = verts
            .iter()
            .filter(|&&v| parent[v].is_some_and(|p| verts.binary_search(&p).is_ok()))
            .count();
        if inner + 1 != verts.len() {
            return Err(bad(format!("edge {e} does not induce a subtree")));
        }
    }
    Ok(())
}

fn verify_uda_partition(inst: &HypergraphInstance, part: &UdaPartition) -> Result<()> {
    let n = inst.n_vertices();
    if part.roles.len() != n || part.program_university.len() != n {
        return Err(bad("partition length differs from vertex count"));
    }
    for v in 0..n {
        match (part.roles[v], part.program_university[v]) {
            (Role::Program, Some(u)) if u < n && part.roles[u] == Role::University => {}
            (Role::Program, _) => return Err(bad(format!("program {v} lacks a university"))),
            (_, Some(_)) => return Err(bad(format!("non-program {v} names a university"))),
            (Role::Student, None) if inst.capacity(v) != 1 => {
                return Err(bad(format!("student {v} has capacity {}", inst.capacity(v))))
            }
            _ => {}
        }
    }
    for (e, verts) in inst.edges().iter().enumerate() {
        if verts.len() != 3 {
            return Err(bad(format!("edge {e} is not a triple")));
        }
        let pick = |r: Role| verts.iter().copied().filter(|&v| part.roles[v] == r).collect::<Vec<_>>();
        let (s, u, p) = (pick(Role::Student), pick(Role::University), pick(Role::Program));
        if s.len() != 1 || u.len() != 1 || p.len() != 1 {
            return Err(bad(format!("edge {e} does not have one agent of each role")));
        }
        if part.program_university[p[0]] != Some(u[0]) {
            return Err(bad(format!("edge {e} pairs program {} with a foreign university", p[0])));
        }
    }
    Ok(())
}

fn verify_laminar_forest(inst: &HypergraphInstance, parent: &[Option<EdgeId>]) -> Result<()> {
    let m = inst.n_edges();
    if parent.len() != m {
        return Err(bad("forest length differs from edge count"));
    }
    is_laminar(inst).map_err(|e| bad(e.to_string()))?;
    for (e, p) in parent.iter().enumerate() {
        if let Some(p) = *p {
            if p >= m || p == e || !is_subset(inst.edge(e), inst.edge(p)) {
                return Err(bad(format!("parent of edge {e} does not contain it")));
            }
        }
    }
    let is_ancestor = |a: EdgeId, mut d: EdgeId| {
        let mut steps = 0;
        while let Some(p) = parent[d] {
            if p == a {
                return true;
            }
            d = p;
            steps += 1;
            if steps > m {
                return false;
            }
        }
        false
    };
    for e in 0..m {
        let mut d = e;
        for _ in 0..=m {
            match parent[d] {
                Some(p) => d = p,
                None => break,
            }
        }
        if parent[d].is_some() {
            return Err(bad("containment forest has a cycle"));
        }
    }
    for e in 0..m {
        for f in 0..m {
            if e == f || !is_subset(inst.edge(e), inst.edge(f)) {
                continue;
            }
            let parallel = inst.edge(e).len() == inst.edge(f).len();
            let ok = is_ancestor(f, e) || (parallel && is_ancestor(e, f));
            if !ok {
                return Err(bad(format!("edge {f} contains {e} but is not its ancestor")));
            }
        }
    }
    Ok(())
}

/// Directed tree plus one non-tree arc per hyperedge; the fundamental-cycle
/// matrix of this network is the vertex-edge incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkRepresentation {
    /// Node `v` for every agent `v`, plus the hub node `n`.
    pub n_nodes: usize,
    /// Tree arc of every agent, indexed by agent.
    pub tree_arcs: Vec<(usize, usize)>,
    /// Non-tree arc (student, program) of every hyperedge.
    pub edge_arcs: Vec<(usize, usize)>,
    /// Rows: agents (tree arcs). Columns: hyperedges.
    pub matrix: Vec<Vec<i8>>,
}

pub fn build_network_representation(
    inst: &HypergraphInstance,
    part: &UdaPartition,
) -> Result<NetworkRepresentation> {
    verify_uda_partition(inst, part)?;
    let n = inst.n_vertices();
    let hub = n;
    let tree_arcs: Vec<(usize, usize)> = (0..n)
        .map(|v| match part.roles[v] {
            Role::Program => (v, part.program_university[v].unwrap()),
            Role::University => (v, hub),
            Role::Student => (hub, v),
        })
        .collect();
    // undirected tree rooted at the hub
    let mut up = vec![None; n + 1];
    for (agent, &(a, b)) in tree_arcs.iter().enumerate() {
        let child = agent;
        let other = if a == child { b } else { a };
        up[child] = Some(other);
    }
    let depth = |mut v: usize| {
        let mut d = 0;
        while let Some(p) = up[v] {
            v = p;
            d += 1;
        }
        d
    };
    let mut edge_arcs = Vec::with_capacity(inst.n_edges());
    let mut matrix = vec![vec![0i8; inst.n_edges()]; n];
    for (e, verts) in inst.edges().iter().enumerate() {
        let s = *verts.iter().find(|&&v| part.roles[v] == Role::Student).unwrap();
        let p = *verts.iter().find(|&&v| part.roles[v] == Role::Program).unwrap();
        edge_arcs.push((s, p));
        // walk the tree from the head p back to the tail s
        let (mut a, mut b) = (p, s);
        let (mut da, mut db) = (depth(a), depth(b));
        let mut from_head = Vec::new();
        let mut to_tail = Vec::new();
        while a != b {
            if da >= db {
                let pa = up[a].unwrap();
                from_head.push((a, pa));
                a = pa;
                da -= 1;
            } else {
                let pb = up[b].unwrap();
                to_tail.push((pb, b));
                b = pb;
                db -= 1;
            }
        }
        to_tail.reverse();
        for (x, y) in from_head.into_iter().chain(to_tail) {
            // the tree arc between x and y belongs to whichever is the child
            let agent = if up[x] == Some(y) { x } else { y };
            let arc = tree_arcs[agent];
            matrix[agent][e] = if arc == (x, y) { 1 } else { -1 };
        }
    }
    Ok(NetworkRepresentation { n_nodes: n + 1, tree_arcs, edge_arcs, matrix })
}

/// Vertex-edge incidence matrix.
pub fn incidence_matrix(inst: &HypergraphInstance) -> Vec<Vec<i8>> {
    let mut mat = vec![vec![0i8; inst.n_edges()]; inst.n_vertices()];
    for (e, verts) in inst.edges().iter().enumerate() {
        for &v in verts {
            mat[v][e] = 1;
        }
    }
    mat
}

/// Brute-force check that every square submatrix of order at most
/// `max_order` has determinant in {-1, 0, 1}. Exponential; meant for tests.
pub fn spot_check_unimodular(matrix: &[Vec<i8>], max_order: usize) -> bool {
    let rows = matrix.len();
    let cols = matrix.first().map_or(0, Vec::len);
    for k in 1..=max_order.min(rows).min(cols) {
        for rs in combinations(rows, k) {
            for cs in combinations(cols, k) {
                let sub: Vec<Vec<i64>> = rs
                    .iter()
                    .map(|&r| cs.iter().map(|&c| matrix[r][c] as i64).collect())
                    .collect();
                if determinant(&sub).abs() > 1 {
                    return false;
                }
            }
        }
    }
    true
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn determinant(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        k => (0..k)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * determinant(&minor)
            })
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, edges: Vec<Vec<usize>>) -> HypergraphInstance {
        let mut prefs = vec![Vec::new(); n];
        for (e, vs) in edges.iter().enumerate() {
            for &v in vs {
                prefs[v].push(e);
            }
        }
        HypergraphInstance::from_parts(n, edges, vec![1; n], prefs, None).unwrap()
    }

    #[test]
    fn crossing_pair_is_reported() {
        let h = inst(3, vec![vec![0, 1], vec![1, 2]]);
        assert!(matches!(is_laminar(&h), Err(Error::NotLaminar(0, 1))));
        assert!(laminar_to_path_ordering(&h).is_err());
    }

    #[test]
    fn list_orders_nested_family() {
        let h = inst(6, vec![vec![0, 2, 4], vec![2, 4], vec![1, 5], vec![4], vec![0, 1, 2, 4, 5]]);
        let order = laminar_to_path_ordering(&h).unwrap();
        verify_certificate(&h, &ClassCertificate::PathOrdering(order.clone())).unwrap();
        assert_eq!(order, vec![4, 2, 0, 1, 5, 3]);
    }

    #[test]
    fn forest_handles_parallel_edges() {
        let h = inst(3, vec![vec![0, 1], vec![0], vec![0, 1], vec![2]]);
        let forest = laminar_forest(&h).unwrap();
        assert_eq!(forest, vec![None, Some(2), Some(0), None]);
        verify_certificate(&h, &ClassCertificate::LaminarForest(forest)).unwrap();
        let wrong = vec![None, Some(0), Some(0), None];
        assert!(verify_certificate(&h, &ClassCertificate::LaminarForest(wrong)).is_err());
    }

    #[test]
    fn tree_witness_checks_connectivity() {
        // path 0-1-2 rooted at 0, plus 3 hanging off 1
        let h = inst(4, vec![vec![0, 1, 3], vec![2, 3]]);
        let parent = vec![None, Some(0), Some(1), Some(1)];
        let err = verify_certificate(&h, &ClassCertificate::TreeWitness(parent)).unwrap_err();
        assert!(err.to_string().contains("edge 1"));
        let cyclic = vec![None, Some(2), Some(1), Some(0)];
        assert!(verify_certificate(&h, &ClassCertificate::TreeWitness(cyclic)).is_err());
    }

    #[test]
    fn path_ordering_must_be_permutation() {
        let h = inst(3, vec![vec![0, 2]]);
        assert!(verify_certificate(&h, &ClassCertificate::PathOrdering(vec![0, 1, 2])).is_err());
        assert!(verify_certificate(&h, &ClassCertificate::PathOrdering(vec![0, 2, 2])).is_err());
        verify_certificate(&h, &ClassCertificate::PathOrdering(vec![1, 0, 2])).unwrap();
    }

    #[test]
    fn single_triple_network_is_all_forward() {
        let h = inst(3, vec![vec![0, 1, 2]]);
        let part = UdaPartition {
            roles: vec![Role::Student, Role::University, Role::Program],
            program_university: vec![None, None, Some(1)],
        };
        let net = build_network_representation(&h, &part).unwrap();
        assert_eq!(net.matrix, vec![vec![1], vec![1], vec![1]]);
        assert_eq!(net.n_nodes, 4);
    }

    #[test]
    fn hint_mismatch_is_rejected() {
        let cert = ClassCertificate::PathOrdering(vec![]);
        assert!(check_hint(ClassHint::Subtree, &cert).is_err());
        check_hint(ClassHint::Subpath, &cert).unwrap();
    }

    #[test]
    fn unimodularity_spot_check_catches_odd_cycle() {
        let odd = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        assert!(!spot_check_unimodular(&odd, 3));
        assert!(spot_check_unimodular(&odd, 2));
    }
}
