//! Any instance to a subtree instance: a new centre vertex `x` joins every
//! edge. Its capacity exceeds the number of edges, so it never dominates,
//! and stable b-matchings correspond one to one by dropping `x`.

use crate::classes::{CertificateBundle, ClassCertificate, ClassHint};
use crate::error::Result;
use crate::hypergraph::{HypergraphInstance, RawInstance};
use crate::io::InstanceFile;

/// Star instance with centre `n` (the old vertex count), ranking edges by id.
pub fn gen_subtree_star_from_shbm(inst: &HypergraphInstance) -> Result<InstanceFile> {
    let n = inst.n_vertices();
    let m = inst.n_edges();
    let raw = inst.raw();
    let edges = raw
        .edges
        .iter()
        .map(|e| e.iter().copied().chain(std::iter::once(n)).collect())
        .collect();
    let mut capacities = raw.capacities.clone();
    capacities.push(u32::try_from(m + 1).map_err(|_| crate::error::Error::Overflow("centre capacity".into()))?);
    let mut preferences = raw.preferences.clone();
    preferences.push((0..m).collect());
    let instance = HypergraphInstance::new(RawInstance {
        n_vertices: n + 1,
        edges,
        capacities,
        preferences,
        weights: raw.weights.clone(),
    })?;
    let mut certificate = CertificateBundle::default();
    let parent = (0..=n).map(|v| (v != n).then_some(n)).collect();
    certificate.insert(ClassCertificate::TreeWitness(parent));
    Ok(InstanceFile { instance, class_hint: Some(ClassHint::Subtree), certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::verify_certificate;

    #[test]
    fn single_edge() {
        let inst = HypergraphInstance::from_parts(2, vec![vec![0, 1]], vec![1, 1], vec![vec![0], vec![0]], None).unwrap();
        let f = gen_subtree_star_from_shbm(&inst).unwrap();
        assert_eq!(f.instance.edge(0), &[0, 1, 2]);
        assert_eq!(f.instance.capacity(2), 2);
        verify_certificate(&f.instance, &f.certificate.for_class(ClassHint::Subtree).unwrap()).unwrap();
    }
}
