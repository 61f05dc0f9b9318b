//! Stability oracle on a hand-written instance: blocking edges, witnesses
//! and full enumeration. The odd triangle has no stable matching.

use shbm::hypergraph::BMatching;
use shbm::io::{matching_to_json, parse_instance};
use shbm::stability::{enumerate_stable, find_blocking_edges};

fn main() -> shbm::error::Result<()> {
    let triangle = parse_instance(
        r#"{"n_vertices":3,"edges":[[0,1],[1,2],[0,2]],"preferences":[[0,2],[1,0],[2,1]]}"#,
    )?;
    let inst = &triangle.instance;
    for e in 0..inst.n_edges() {
        let m = BMatching::from_edges(inst, &[e])?;
        let r = find_blocking_edges(inst, &m)?;
        println!("{} blocked by {:?}, witnesses {:?}", matching_to_json(&m), r.blocking, r.witnesses);
    }
    println!("stable matchings: {}", enumerate_stable(inst, None)?.len());

    let star = parse_instance(r#"{"n_vertices":4,"edges":[[0,1],[0,2],[0,3]],"capacities":[2,1,1,1],"preference_seed":5}"#)?;
    for m in enumerate_stable(&star.instance, None)? {
        println!("star: {}", matching_to_json(&m));
    }
    Ok(())
}
