//! Stable b-matching on a laminar hypergraph.
//!
//! `cargo run --example laminar -- [seed]`

use shbm::classes::{is_laminar, ClassHint};
use shbm::laminar::{solve_laminar_with, LaminarOptions};
use shbm::random::{gen_random, GenSizes};
use shbm::stability::find_blocking_edges;

fn main() -> shbm::error::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let sizes = GenSizes { n_vertices: 12, n_edges: 16, max_edge_size: 5, ..GenSizes::default() };
    let file = gen_random(ClassHint::Laminar, seed, &sizes)?;
    let inst = &file.instance;
    is_laminar(inst)?;

    let run = solve_laminar_with(inst, LaminarOptions { debug_invariants: true })?;
    println!("{} vertices, {} edges, {} iterations", inst.n_vertices(), inst.n_edges(), run.iterations);
    for e in run.matching.edges() {
        println!("  edge {e}: {:?}", inst.edge(e));
    }
    let report = find_blocking_edges(inst, &run.matching)?;
    println!("blocking edges: {:?}", report.blocking);
    Ok(())
}
