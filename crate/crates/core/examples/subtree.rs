//! Stable b-matching on a subtree hypergraph with unit capacities.

use shbm::classes::{ClassCertificate, ClassHint};
use shbm::random::{gen_random, GenSizes};
use shbm::stability::is_stable;
use shbm::subtree::{solve_subtree_with, SubtreeOptions};

fn main() -> shbm::error::Result<()> {
    let sizes = GenSizes { n_vertices: 10, n_edges: 12, max_capacity: 1, ..GenSizes::default() };
    let file = gen_random(ClassHint::Subtree, 3, &sizes)?;
    let inst = &file.instance;
    let Some(ClassCertificate::TreeWitness(parent)) = file.certificate.for_class(ClassHint::Subtree) else {
        unreachable!("generator always ships a tree witness")
    };
    println!("tree parents {parent:?}");
    for root in [None, Some(inst.n_vertices() - 1)] {
        let m = solve_subtree_with(inst, &parent, SubtreeOptions { root, debug_invariants: true })?;
        println!("root {root:?}: matching {:?}, stable {}", m.edges(), is_stable(inst, &m)?);
    }
    Ok(())
}
