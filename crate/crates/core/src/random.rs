//! Seeded random instances for every structural class, each shipped with a
//! certificate. Identical seeds and sizes give identical instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::{laminar_forest, CertificateBundle, ClassCertificate, ClassHint};
use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, HypergraphInstance, RawInstance, VertexId};
use crate::io::InstanceFile;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenSizes {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub max_edge_size: usize,
    pub min_capacity: u32,
    pub max_capacity: u32,
    /// Weights are drawn from `-max_weight..=max_weight`; zero means unweighted.
    pub max_weight: i64,
}

impl Default for GenSizes {
    fn default() -> Self {
        GenSizes { n_vertices: 8, n_edges: 10, max_edge_size: 3, min_capacity: 1, max_capacity: 2, max_weight: 0 }
    }
}

pub fn rng_from(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance of `class`. UDA instances are generated through the
/// dual-admission model and reduced, see `uda::random_uda`.
pub fn gen_random(class: ClassHint, seed: u64, sizes: &GenSizes) -> Result<InstanceFile> {
    check_sizes(class, sizes)?;
    let mut rng = rng_from(seed);
    let (edges, cert, unit) = match class {
        ClassHint::Laminar => {
            let (edges, order) = nested_intervals(&mut rng, sizes);
            (edges, Some(ClassCertificate::PathOrdering(order)), false)
        }
        ClassHint::Subpath => {
            let (edges, order) = intervals(&mut rng, sizes);
            (edges, Some(ClassCertificate::PathOrdering(order)), false)
        }
        ClassHint::Subtree => {
            let (edges, parent) = subtrees(&mut rng, sizes);
            (edges, Some(ClassCertificate::TreeWitness(parent)), true)
        }
        ClassHint::Bipartite => (bipartite_edges(&mut rng, sizes), None, false),
        ClassHint::General => (arbitrary_edges(&mut rng, sizes), None, false),
        ClassHint::Uda => {
            let uda = crate::uda::random_uda(&mut rng, &crate::uda::UdaSizes::from_gen_sizes(sizes));
            let reduced = crate::uda::reduce_to_shbm(&uda);
            let mut certificate = CertificateBundle::default();
            certificate.insert(ClassCertificate::UdaPartition(reduced.partition.clone()));
            let instance = match sizes.max_weight {
                0 => reduced.instance,
                w => {
                    let weights = (0..reduced.instance.n_edges()).map(|_| rng.gen_range(-w..=w)).collect();
                    reduced.instance.with_weights(Some(weights))?
                }
            };
            return Ok(InstanceFile { instance, class_hint: Some(ClassHint::Uda), certificate });
        }
    };
    let instance = finish(&mut rng, sizes, edges, unit)?;
    let mut certificate = CertificateBundle::default();
    if let Some(c) = cert {
        certificate.insert(c);
    }
    if class == ClassHint::Laminar {
        certificate.insert(ClassCertificate::LaminarForest(laminar_forest(&instance)?));
    }
    Ok(InstanceFile { instance, class_hint: Some(class), certificate })
}

fn check_sizes(class: ClassHint, s: &GenSizes) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidParameters(m.to_string()));
    if class == ClassHint::Uda {
        return Ok(());
    }
    if s.n_edges > 0 && (s.n_vertices == 0 || s.max_edge_size == 0) {
        return bad("edges need at least one vertex and a positive edge size");
    }
    if s.max_edge_size > s.n_vertices {
        return bad("max_edge_size exceeds n_vertices");
    }
    if s.min_capacity > s.max_capacity {
        return bad("min_capacity exceeds max_capacity");
    }
    if s.max_weight < 0 {
        return bad("max_weight must be non-negative");
    }
    if class == ClassHint::Bipartite && s.n_edges > 0 && s.n_vertices < 2 {
        return bad("a bipartite instance with edges needs two vertices");
    }
    Ok(())
}

/// Random labels for path positions; `order[p]` is the vertex at position `p`.
fn shuffled_labels(rng: &mut ChaCha8Rng, n: usize) -> Vec<VertexId> {
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    order
}

fn label_interval(order: &[VertexId], a: usize, b: usize) -> Vec<VertexId> {
    let mut e: Vec<VertexId> = order[a..=b].to_vec();
    e.sort_unstable();
    e
}

fn intervals(rng: &mut ChaCha8Rng, s: &GenSizes) -> (Vec<Vec<VertexId>>, Vec<VertexId>) {
    let order = shuffled_labels(rng, s.n_vertices);
    let edges = (0..s.n_edges)
        .map(|_| {
            let len = rng.gen_range(1..=s.max_edge_size);
            let a = rng.gen_range(0..=s.n_vertices - len);
            label_interval(&order, a, a + len - 1)
        })
        .collect();
    (edges, order)
}

fn nested_intervals(rng: &mut ChaCha8Rng, s: &GenSizes) -> (Vec<Vec<VertexId>>, Vec<VertexId>) {
    let order = shuffled_labels(rng, s.n_vertices);
    let mut spans: Vec<(usize, usize)> = Vec::new();
    while spans.len() < s.n_edges {
        let mut placed = false;
        for _ in 0..50 {
            let len = rng.gen_range(1..=s.max_edge_size);
            let a = rng.gen_range(0..=s.n_vertices - len);
            let b = a + len - 1;
            let fits = spans.iter().all(|&(c, d)| b < c || d < a || (c <= a && b <= d) || (a <= c && d <= b));
            if fits {
                spans.push((a, b));
                placed = true;
                break;
            }
        }
        if !placed {
            // a parallel copy never breaks laminarity
            let copy = spans.get(rng.gen_range(0..spans.len().max(1))).copied().unwrap_or((0, 0));
            spans.push(copy);
        }
    }
    (spans.into_iter().map(|(a, b)| label_interval(&order, a, b)).collect(), order)
}

fn subtrees(rng: &mut ChaCha8Rng, s: &GenSizes) -> (Vec<Vec<VertexId>>, Vec<Option<VertexId>>) {
    let n = s.n_vertices;
    let labels = shuffled_labels(rng, n);
    let mut parent = vec![None; n];
    let mut adj = vec![Vec::new(); n];
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let (c, p) = (labels[i], labels[j]);
        parent[c] = Some(p);
        adj[c].push(p);
        adj[p].push(c);
    }
    let edges = (0..s.n_edges)
        .map(|_| {
            let size = rng.gen_range(1..=s.max_edge_size);
            let mut set = vec![rng.gen_range(0..n)];
            let mut frontier: Vec<VertexId> = adj[set[0]].clone();
            while set.len() < size && !frontier.is_empty() {
                let v = frontier.swap_remove(rng.gen_range(0..frontier.len()));
                if set.contains(&v) {
                    continue;
                }
                set.push(v);
                frontier.extend(adj[v].iter().copied().filter(|w| !set.contains(w)));
            }
            set.sort_unstable();
            set
        })
        .collect();
    (edges, parent)
}

fn bipartite_edges(rng: &mut ChaCha8Rng, s: &GenSizes) -> Vec<Vec<VertexId>> {
    let left = s.n_vertices.div_ceil(2);
    let right = s.n_vertices - left;
    let mut edges: Vec<Vec<VertexId>> = Vec::new();
    let distinct = left * right;
    while edges.len() < s.n_edges.min(distinct) {
        let e = vec![rng.gen_range(0..left), left + rng.gen_range(0..right)];
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    edges
}

fn arbitrary_edges(rng: &mut ChaCha8Rng, s: &GenSizes) -> Vec<Vec<VertexId>> {
    (0..s.n_edges)
        .map(|_| {
            let size = rng.gen_range(1..=s.max_edge_size);
            let mut verts: Vec<VertexId> = (0..s.n_vertices).collect();
            verts.shuffle(rng);
            verts.truncate(size);
            verts.sort_unstable();
            verts
        })
        .collect()
}

fn finish(rng: &mut ChaCha8Rng, s: &GenSizes, edges: Vec<Vec<VertexId>>, unit: bool) -> Result<HypergraphInstance> {
    let n = s.n_vertices;
    let capacities: Vec<u32> =
        (0..n).map(|_| if unit { 1 } else { rng.gen_range(s.min_capacity..=s.max_capacity) }).collect();
    let mut prefs: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for (e, verts) in edges.iter().enumerate() {
        for &v in verts {
            prefs[v].push(e);
        }
    }
    for list in &mut prefs {
        list.shuffle(rng);
    }
    let weights =
        (s.max_weight > 0).then(|| (0..edges.len()).map(|_| rng.gen_range(-s.max_weight..=s.max_weight)).collect());
    HypergraphInstance::new(RawInstance { n_vertices: n, edges, capacities, preferences: prefs, weights })
}
