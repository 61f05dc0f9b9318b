//! Stable b-matchings in laminar hypergraphs.
//!
//! Edges are examined once each, innermost first. A blocking edge enters
//! the matching; at every vertex it oversaturates, the worst member is
//! marked, and the inclusion-maximal marked edges leave. One pass over the
//! edges always ends in a stable b-matching.

use crate::classes::is_laminar;
use crate::error::{Error, Result};
use crate::hypergraph::{BMatching, EdgeId, HypergraphInstance};

#[derive(Debug, Clone, Copy, Default)]
pub struct LaminarOptions {
    /// Check the per-iteration invariants and fail loudly when one breaks.
    pub debug_invariants: bool,
}

#[derive(Debug, Clone)]
pub struct LaminarRun {
    pub matching: BMatching,
    pub iterations: usize,
}

pub fn solve_laminar(inst: &HypergraphInstance) -> Result<BMatching> {
    Ok(solve_laminar_with(inst, LaminarOptions::default())?.matching)
}

fn subset(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && a.iter().all(|v| b.binary_search(v).is_ok())
}

fn proper_subset(a: &[usize], b: &[usize]) -> bool {
    a.len() < b.len() && subset(a, b)
}

pub fn solve_laminar_with(inst: &HypergraphInstance, opts: LaminarOptions) -> Result<LaminarRun> {
    is_laminar(inst)?;
    let m = inst.n_edges();
    let mut checked = vec![false; m];
    let mut matching = BMatching::empty(inst);
    let mut iterations = 0;

    for _ in 0..m {
        let f = (0..m)
            .filter(|&e| !checked[e])
            .find(|&e| !(0..m).any(|g| !checked[g] && proper_subset(inst.edge(g), inst.edge(e))))
            .expect("an unchecked edge remains");
        checked[f] = true;
        iterations += 1;

        let blocking = !matching.contains(f)
            && inst.edge(f).iter().all(|&v| {
                let saturated = matching.load(v) >= inst.capacity(v);
                !(saturated && matching.at(inst, v).all(|g| inst.prefers(v, g, f)))
            });
        if !blocking {
            continue;
        }

        let saturated_before: Vec<bool> = if opts.debug_invariants {
            (0..inst.n_vertices()).map(|v| matching.load(v) >= inst.capacity(v)).collect()
        } else {
            Vec::new()
        };

        matching.insert(inst, f);
        let mut marked: Vec<EdgeId> = Vec::new();
        for &v in inst.edge(f) {
            if matching.load(v) > inst.capacity(v) {
                let worst = matching
                    .at(inst, v)
                    .max_by_key(|&g| inst.rank(v, g))
                    .expect("an oversaturated vertex has members");
                if !marked.contains(&worst) {
                    marked.push(worst);
                }
            }
        }
        // inclusion-maximal marked edges; of parallel copies only the lowest id goes
        marked.sort_unstable();
        let mut removed: Vec<EdgeId> = Vec::new();
        for &g in &marked {
            let covered = marked.iter().any(|&h| proper_subset(inst.edge(g), inst.edge(h)))
                || removed.iter().any(|&h| inst.edge(h) == inst.edge(g));
            if !covered {
                removed.push(g);
            }
        }
        for &g in &removed {
            matching.remove(inst, g);
        }

        if opts.debug_invariants {
            check_iteration(inst, &matching, f, &removed, &saturated_before)?;
        }
    }

    if opts.debug_invariants && iterations != m {
        return Err(Error::InvariantViolation(format!("{iterations} iterations for {m} edges")));
    }
    Ok(LaminarRun { matching, iterations })
}

fn check_iteration(
    inst: &HypergraphInstance,
    matching: &BMatching,
    f: EdgeId,
    removed: &[EdgeId],
    saturated_before: &[bool],
) -> Result<()> {
    let fail = |msg: String| Err(Error::InvariantViolation(msg));
    if removed.contains(&f) {
        return fail(format!("edge {f} removed itself"));
    }
    for (i, &g) in removed.iter().enumerate() {
        if !subset(inst.edge(g), inst.edge(f)) {
            return fail(format!("removed edge {g} is not inside {f}"));
        }
        for &h in &removed[i + 1..] {
            if inst.edge(g).iter().any(|v| inst.edge(h).binary_search(v).is_ok()) {
                return fail(format!("removed edges {g} and {h} overlap"));
            }
        }
    }
    for v in 0..inst.n_vertices() {
        if matching.load(v) > inst.capacity(v) {
            return fail(format!("vertex {v} oversaturated after adding {f}"));
        }
        if saturated_before[v] && matching.load(v) < inst.capacity(v) {
            return fail(format!("vertex {v} lost saturation after adding {f}"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::is_stable;

    #[test]
    fn nested_chain_with_capacities() {
        // vertex 0 ranks the big edge first, vertex 1 the small one
        let inst = HypergraphInstance::from_parts(
            3,
            vec![vec![0, 1, 2], vec![0, 1], vec![1]],
            vec![1, 2, 1],
            vec![vec![0, 1], vec![2, 1, 0], vec![0]],
            None,
        )
        .unwrap();
        let run = solve_laminar_with(&inst, LaminarOptions { debug_invariants: true }).unwrap();
        assert_eq!(run.iterations, 3);
        assert!(is_stable(&inst, &run.matching).unwrap());
        assert_eq!(run.matching.edges(), vec![1, 2]);
    }

    #[test]
    fn crossing_instance_is_rejected() {
        let inst = HypergraphInstance::from_parts(
            3,
            vec![vec![0, 1], vec![1, 2]],
            vec![1, 1, 1],
            vec![vec![0], vec![0, 1], vec![1]],
            None,
        )
        .unwrap();
        assert!(matches!(solve_laminar(&inst), Err(Error::NotLaminar(0, 1))));
    }

    #[test]
    fn empty_instance() {
        let inst = HypergraphInstance::from_parts(2, vec![], vec![1, 1], vec![vec![], vec![]], None).unwrap();
        assert!(solve_laminar(&inst).unwrap().is_empty());
    }

    #[test]
    fn parallel_copies_worst_at_different_vertices() {
        // edges 0 and 3 are both {1,2}; adding edge 2 makes 0 worst at 1 and 3 worst at 2
        let inst = HypergraphInstance::from_parts(
            6,
            vec![vec![1, 2], vec![1, 2, 3, 4], vec![1, 2, 4], vec![1, 2], vec![1, 2, 3, 4, 5], vec![2], vec![1, 2, 3, 4, 5], vec![3]],
            vec![1, 2, 2, 2, 1, 2],
            vec![vec![], vec![3, 2, 4, 0, 6, 1], vec![1, 6, 2, 0, 3, 5, 4], vec![1, 4, 6, 7], vec![4, 1, 2, 6], vec![6, 4]],
            None,
        )
        .unwrap();
        let run = solve_laminar_with(&inst, LaminarOptions { debug_invariants: true }).unwrap();
        assert!(is_stable(&inst, &run.matching).unwrap());
    }
}
