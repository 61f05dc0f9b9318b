//! Maximum-weight stable b-matching on a subpath hypergraph, with and
//! without side constraints.

use shbm::classes::{ClassCertificate, ClassHint};
use shbm::random::{gen_random, GenSizes};
use shbm::stability::maxw_stable_bruteforce;
use shbm::subpath::{solve_subpath_with, SideConstraints, SubpathOptions};

fn main() -> shbm::error::Result<()> {
    let sizes = GenSizes { n_vertices: 9, n_edges: 12, max_weight: 9, ..GenSizes::default() };
    let file = gen_random(ClassHint::Subpath, 11, &sizes)?;
    let inst = &file.instance;
    let Some(ClassCertificate::PathOrdering(order)) = file.certificate.for_class(ClassHint::Subpath) else {
        unreachable!("generator always ships a path ordering")
    };
    println!("path order {order:?}");

    let out = solve_subpath_with(inst, &order, &SubpathOptions::default())?;
    match &out.best {
        Some((m, w)) => println!("optimum {:?} weight {w}", m.edges()),
        None => println!("no stable b-matching"),
    }
    println!(
        "states: max {} (bound {}), steps {}",
        out.stats.max_states, out.stats.state_bound, out.stats.steps
    );
    let brute = maxw_stable_bruteforce(inst)?;
    println!("enumeration agrees: {}", brute.map(|(_, w)| w) == out.best.as_ref().map(|(_, w)| *w));

    // Force the heaviest edge in, if any stable b-matching allows it.
    let heaviest = (0..inst.n_edges()).max_by_key(|&e| inst.weight(e)).unwrap_or(0);
    let opts = SubpathOptions {
        constraints: SideConstraints { force: vec![heaviest], ..SideConstraints::default() },
        ..SubpathOptions::default()
    };
    let forced = solve_subpath_with(inst, &order, &opts)?;
    println!("with edge {heaviest} forced: {:?}", forced.best.map(|(m, w)| (m.edges(), w)));
    Ok(())
}
