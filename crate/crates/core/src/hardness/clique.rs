//! Multicolored clique to subpath instances.
//!
//! Vertex ids follow the path: `w, z, s_1..s_k`, then one segment per
//! non-edge `e_j` between different colour classes, laid out as
//! `r(1,e_j)^1..r(1,e_j)^4, .., r(k,e_j)^1..r(k,e_j)^4, a_e, a'_e`.
//! A selection edge `e^j(v)` runs from the block of `v` in segment `j` to
//! the block of `v` in segment `j+1`, so the selected vertex of every
//! colour class is carried through all segments, and the non-edge
//! gadgets `a_e`, `a'_e` forbid selecting both ends of a non-edge.
//!
//! At every repeater vertex the edges passing through from other blocks
//! come first (ascending id), followed by the interleaved list of its own block.

use serde::{Deserialize, Serialize};

use crate::classes::{CertificateBundle, ClassCertificate, ClassHint};
use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, HypergraphInstance, VertexId};
use crate::io::InstanceFile;

use super::Gadget;

/// Graph whose vertices carry colours `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoredGraph {
    pub n_vertices: usize,
    pub edges: Vec<[usize; 2]>,
    /// Colour of every vertex.
    pub colors: Vec<usize>,
}

impl ColoredGraph {
    pub fn adjacent(&self, x: usize, y: usize) -> bool {
        self.edges.iter().any(|&[a, b]| (a, b) == (x, y) || (a, b) == (y, x))
    }

    fn check(&self, k: usize) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGraph(m));
        if k == 0 {
            return bad("k must be positive".into());
        }
        if self.colors.len() != self.n_vertices {
            return bad(format!("{} colours for {} vertices", self.colors.len(), self.n_vertices));
        }
        if let Some(v) = self.colors.iter().position(|&c| c >= k) {
            return bad(format!("vertex {v} has colour {} outside 0..{k}", self.colors[v]));
        }
        for &[a, b] in &self.edges {
            if a >= self.n_vertices || b >= self.n_vertices {
                return bad(format!("edge {{{a},{b}}} leaves the vertex range"));
            }
            if self.colors[a] == self.colors[b] {
                return bad(format!("edge {{{a},{b}}} lies inside colour class {}", self.colors[a]));
            }
        }
        Ok(())
    }
}

/// Exhaustive search for one vertex per colour, pairwise adjacent.
pub fn has_multicolored_clique(g: &ColoredGraph, k: usize) -> bool {
    fn rec(g: &ColoredGraph, k: usize, chosen: &mut Vec<usize>) -> bool {
        let c = chosen.len();
        if c == k {
            return true;
        }
        for v in (0..g.n_vertices).filter(|&v| g.colors[v] == c) {
            if chosen.iter().all(|&u| g.adjacent(u, v)) {
                chosen.push(v);
                if rec(g, k, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    rec(g, k, &mut Vec::new())
}

fn interleave(a: &[EdgeId], b: &[EdgeId]) -> Vec<EdgeId> {
    a.iter().zip(b).flat_map(|(&x, &y)| [x, y]).collect()
}

/// Subpath instance in which the weight-1 edge `e_w` lies in some stable
/// b-matching iff `g` has a clique with one vertex of each of the `k` colours.
pub fn gen_subpath_from_multicolored_clique(g: &ColoredGraph, k: usize) -> Result<Gadget> {
    g.check(k)?;
    // vertices of every colour class, ascending
    let classes: Vec<Vec<usize>> = (0..k).map(|c| (0..g.n_vertices).filter(|&v| g.colors[v] == c).collect()).collect();
    let order: Vec<usize> = classes.iter().flatten().copied().collect();
    // non-edges between classes, lower colour first
    let mut non_edges: Vec<(usize, usize)> = Vec::new();
    for x in 0..g.n_vertices {
        for y in 0..g.n_vertices {
            if g.colors[x] < g.colors[y] && !g.adjacent(x, y) {
                non_edges.push((x, y));
            }
        }
    }
    let mbar = non_edges.len();
    let nv = order.len();

    // vertex ids; colour classes and segments are 1-based as in the layout
    let (w, z) = (0usize, 1usize);
    let s = |i: usize| 1 + i;
    let seg = 4 * k + 2;
    let r = |i: usize, j: usize, h: usize| k + 2 + (j - 1) * seg + (i - 1) * 4 + (h - 1);
    let a = |j: usize| k + 2 + (j - 1) * seg + 4 * k;
    let n_vertices = k + 2 + mbar * seg;

    // edge ids
    let e_w: EdgeId = 0;
    let d = |i: usize| i;
    let pos: Vec<usize> = {
        let mut p = vec![0; g.n_vertices];
        for (idx, &v) in order.iter().enumerate() {
            p[v] = idx;
        }
        p
    };
    // segment j holds e^j(v), ê^j(v), ě^j(v) for every v, then f_{e_j}
    let base = |j: usize| 1 + k + nv + (j - 1) * (3 * nv + 1);
    let sel = |j: usize, v: usize| if j == 0 { 1 + k + pos[v] } else { base(j) + pos[v] };
    let hat = |j: usize, v: usize| sel(j, v) + nv;
    let check = |j: usize, v: usize| sel(j, v) + 2 * nv;
    let f = |j: usize| base(j) + 3 * nv;
    let n_edges = 1 + k + nv + mbar * (3 * nv + 1);
    let color = |v: usize| g.colors[v] + 1;

    let mut edges: Vec<Vec<VertexId>> = vec![Vec::new(); n_edges];
    edges[e_w] = vec![w, z];
    for i in 1..=k {
        edges[d(i)] = std::iter::once(z).chain((1..=i).map(s)).collect();
    }
    let block = |i: usize, j: usize, hs: std::ops::RangeInclusive<usize>| hs.map(move |h| r(i, j, h));
    let full_blocks = move |range: std::ops::Range<usize>, j: usize| range.flat_map(move |i2| block(i2, j, 1..=4));
    for &v in &order {
        let i = color(v);
        let mut e0: Vec<VertexId> = (i..=k).map(s).collect();
        if mbar >= 1 {
            e0.extend(full_blocks(1..i, 1));
            e0.extend(block(i, 1, 1..=3));
        }
        edges[sel(0, v)] = e0;
        for j in 1..=mbar {
            let mut ej: Vec<VertexId> = block(i, j, 2..=4).collect();
            ej.extend(full_blocks(i + 1..k + 1, j));
            ej.extend([a(j), a(j) + 1]);
            if j < mbar {
                ej.extend(full_blocks(1..i, j + 1));
                ej.extend(block(i, j + 1, 1..=3));
            }
            edges[sel(j, v)] = ej;
            edges[hat(j, v)] = vec![r(i, j, 1), r(i, j, 2)];
            edges[check(j, v)] = vec![r(i, j, 3), r(i, j, 4)];
        }
    }
    for j in 1..=mbar {
        edges[f(j)] = vec![a(j), a(j) + 1];
    }
    for e in &mut edges {
        e.sort_unstable();
    }

    let mut incident: Vec<Vec<EdgeId>> = vec![Vec::new(); n_vertices];
    for (e, verts) in edges.iter().enumerate() {
        for &v in verts {
            incident[v].push(e);
        }
    }
    let class_edges = |j: usize, i: usize, pick: &dyn Fn(usize, usize) -> EdgeId| -> Vec<EdgeId> {
        classes[i - 1].iter().map(|&v| pick(j, v)).collect()
    };
    let rev = |mut x: Vec<EdgeId>| {
        x.reverse();
        x
    };
    // every other incident edge in ascending order, then the given tail
    let with_tail = |v: VertexId, tail: Vec<EdgeId>| -> Vec<EdgeId> {
        let mut list: Vec<EdgeId> = incident[v].iter().copied().filter(|e| !tail.contains(e)).collect();
        list.extend(tail);
        list
    };

    let mut prefs: Vec<Vec<EdgeId>> = vec![Vec::new(); n_vertices];
    prefs[w] = vec![e_w];
    prefs[z] = (1..=k).map(d).chain([e_w]).collect();
    for i in 1..=k {
        let mut list: Vec<EdgeId> = (i + 1..=k).map(d).collect();
        for i2 in 1..i {
            list.extend(class_edges(0, i2, &sel));
        }
        list.extend(class_edges(0, i, &sel));
        list.push(d(i));
        prefs[s(i)] = list;
    }
    for j in 1..=mbar {
        for i in 1..=k {
            let prev = class_edges(j - 1, i, &sel);
            let cur = class_edges(j, i, &sel);
            let hats = class_edges(j, i, &hat);
            let checks = class_edges(j, i, &check);
            prefs[r(i, j, 1)] = with_tail(r(i, j, 1), interleave(&hats, &prev));
            prefs[r(i, j, 2)] = with_tail(r(i, j, 2), interleave(&rev(cur.clone()), &rev(hats.clone())));
            prefs[r(i, j, 3)] = with_tail(r(i, j, 3), interleave(&rev(checks.clone()), &rev(prev.clone())));
            prefs[r(i, j, 4)] = with_tail(r(i, j, 4), interleave(&cur, &checks));
        }
        let (x, y) = non_edges[j - 1];
        prefs[a(j)] = with_tail(a(j), vec![f(j), sel(j, x)]);
        prefs[a(j) + 1] = with_tail(a(j) + 1, vec![f(j), sel(j, y)]);
    }

    let mut caps = vec![0u32; n_vertices];
    caps[w] = 1;
    caps[z] = 1;
    for i in 1..=k {
        caps[s(i)] = i as u32;
    }
    for j in 1..=mbar {
        for i in 1..=k {
            caps[r(i, j, 1)] = k as u32;
            caps[r(i, j, 2)] = k as u32 + 1;
            caps[r(i, j, 3)] = k as u32 + 1;
            caps[r(i, j, 4)] = k as u32;
        }
        caps[a(j)] = k as u32;
        caps[a(j) + 1] = k as u32;
    }
    let mut weights = vec![0i64; n_edges];
    weights[e_w] = 1;
    let instance = HypergraphInstance::from_parts(n_vertices, edges, caps, prefs, Some(weights))?;
    let mut certificate = CertificateBundle::default();
    certificate.insert(ClassCertificate::PathOrdering((0..n_vertices).collect()));
    Ok(Gadget { file: InstanceFile { instance, class_hint: Some(ClassHint::Subpath), certificate }, target: e_w })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::verify_certificate;
    use crate::hardness::stable_with_edge;

    fn pair(adjacent: bool) -> ColoredGraph {
        ColoredGraph { n_vertices: 2, edges: if adjacent { vec![[0, 1]] } else { vec![] }, colors: vec![0, 1] }
    }

    #[test]
    fn adjacent_pair_admits_target() {
        let g = gen_subpath_from_multicolored_clique(&pair(true), 2).unwrap();
        assert_eq!(g.file.instance.n_edges(), 5);
        verify_certificate(&g.file.instance, &g.file.certificate.for_class(ClassHint::Subpath).unwrap()).unwrap();
        assert!(stable_with_edge(&g.file.instance, g.target, 1_000_000).unwrap());
    }

    #[test]
    fn non_adjacent_pair_excludes_target() {
        let g = gen_subpath_from_multicolored_clique(&pair(false), 2).unwrap();
        assert_eq!(g.file.instance.n_edges(), 12);
        verify_certificate(&g.file.instance, &g.file.certificate.for_class(ClassHint::Subpath).unwrap()).unwrap();
        assert!(!stable_with_edge(&g.file.instance, g.target, 1_000_000).unwrap());
    }

    #[test]
    fn edge_inside_a_class_is_rejected() {
        let g = ColoredGraph { n_vertices: 2, edges: vec![[0, 1]], colors: vec![0, 0] };
        assert!(matches!(gen_subpath_from_multicolored_clique(&g, 2), Err(Error::InvalidGraph(_))));
    }
}
