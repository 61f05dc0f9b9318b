//! Hardness gadgets: a CNF formula becomes a laminar instance and a
//! coloured graph becomes a subpath instance. In both, the target edge is
//! in some stable b-matching exactly when the source is a yes-instance.

use shbm::classes::is_laminar;
use shbm::hardness::{
    gen_laminar_from_cnf, gen_subpath_from_multicolored_clique, has_multicolored_clique, parse_dimacs,
    stable_with_edge, ColoredGraph,
};

const BUDGET: u64 = 1_000_000;

fn main() -> shbm::error::Result<()> {
    for text in ["p cnf 2 2\n1 2 0\n-1 0\n", "p cnf 1 2\n1 0\n-1 0\n"] {
        let cnf = parse_dimacs(text)?;
        let g = gen_laminar_from_cnf(&cnf)?;
        is_laminar(&g.file.instance)?;
        println!(
            "cnf {:?}: satisfiable {}, target {} stable {}",
            cnf.clauses,
            cnf.is_satisfiable(),
            g.target,
            stable_with_edge(&g.file.instance, g.target, BUDGET)?
        );
    }

    for edges in [vec![[0, 1]], vec![]] {
        let graph = ColoredGraph { n_vertices: 2, edges, colors: vec![0, 1] };
        let g = gen_subpath_from_multicolored_clique(&graph, 2)?;
        println!(
            "graph {:?}: clique {}, gadget {} edges, target stable {}",
            graph.edges,
            has_multicolored_clique(&graph, 2),
            g.file.instance.n_edges(),
            stable_with_edge(&g.file.instance, g.target, BUDGET)?
        );
    }
    Ok(())
}
