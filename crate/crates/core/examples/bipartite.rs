//! Many-to-many bipartite stable matching: deferred acceptance from both
//! sides, the rural hospitals check, and a maximum-weight stable matching.

use shbm::bipartite::{
    deferred_acceptance, maxw_stable, rural_hospitals_check, BipartiteInstance, MaxWeightMethod, Side,
};
use shbm::classes::ClassHint;
use shbm::random::{gen_random, GenSizes};

fn main() -> shbm::error::Result<()> {
    let sizes = GenSizes { n_vertices: 8, n_edges: 12, max_capacity: 1, max_weight: 5, ..GenSizes::default() };
    let file = gen_random(ClassHint::Bipartite, 4, &sizes)?;
    let inst = BipartiteInstance::from_two_coloring(file.instance)?;

    let left = deferred_acceptance(&inst, Side::Left);
    let right = deferred_acceptance(&inst, Side::Right);
    println!("left-optimal  {:?}", left.edges());
    println!("right-optimal {:?}", right.edges());
    println!("same loads: {}", rural_hospitals_check(&inst, &left, &right)?);

    for method in [MaxWeightMethod::Rotations, MaxWeightMethod::BruteForce] {
        let (m, w) = maxw_stable(&inst, method)?;
        println!("{method:?}: {:?} weight {w}", m.edges());
    }
    Ok(())
}
