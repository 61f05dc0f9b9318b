//! Dual admission: a small instance, its hypergraph form, the exact
//! strategy search, the half-stable proposal algorithm and the cycling
//! behaviour of naive proposal rounds.

use shbm::uda::{
    cycling_instance, find_blocking_triples, is_half_stable, reduce_to_shbm, run_proposal_rounds,
    solve_uda_half_stable, solve_uda_maxw, uda_is_stable, UdaXpOptions,
};

fn main() -> shbm::error::Result<()> {
    let inst = cycling_instance();
    let reduced = reduce_to_shbm(&inst);
    println!(
        "{} students, {} universities, {} programs -> {} vertices, {} edges",
        inst.n_students(),
        inst.n_universities(),
        inst.n_programs(),
        reduced.instance.n_vertices(),
        reduced.instance.n_edges()
    );

    // Queue order s3, s4, s1, s2 makes the second round repeat the first.
    let order = ["s3", "s4", "s1", "s2"].map(|n| inst.student_named(n).expect("named student"));
    let report = run_proposal_rounds(&inst, &order, 4);
    println!("proposal rounds: {}, cycled {}, stable {}", report.rounds.len(), report.cycled, report.stable);

    let half = solve_uda_half_stable(&inst);
    println!("half-stable assignment {:?}, half-stable {}", half.0, is_half_stable(&inst, &half)?);
    println!("blocking triples: {:?}", find_blocking_triples(&inst, &half)?);

    let opts = UdaXpOptions { threads: 2, ..UdaXpOptions::default() };
    match solve_uda_maxw(&inst, opts) {
        Ok((mu, w, out)) => {
            println!("stable assignment {:?} weight {w} ({} of {} strategies valid)", mu.0, out.valid, out.strategies);
            println!("checked: {:?}", uda_is_stable(&inst, &mu)?);
        }
        Err(e) => println!("exact search: {e}"),
    }
    Ok(())
}
