//! Maximum-weight stable b-matchings on dual-admission hypergraphs.
//!
//! Guess, for every university, either that it stays unsaturated or which
//! incident edge is its worst one. Keep only the edges a university ranks at
//! least as high as its guess, drop the universities, and solve the
//! remaining bipartite student-program instance. A bipartite solution is
//! kept when every university ends up saturated exactly when guessed.

use rayon::prelude::*;

use crate::bipartite::{maxw_stable, BipartiteInstance, MaxWeightMethod, Side};
use crate::classes::{verify_certificate, ClassCertificate, Role, UdaPartition};
use crate::error::{Error, Result};
use crate::hypergraph::{better, BMatching, EdgeId, HypergraphInstance, VertexId};

use super::{reduce_to_shbm, Assignment, UdaInstance};

/// Guessed worst edge per university, in ascending university-vertex order.
pub type Strategy = Vec<Option<EdgeId>>;

#[derive(Debug, Clone, Copy)]
pub struct UdaXpOptions {
    pub threads: usize,
    /// Refuse to start when more strategies than this would be tried.
    pub strategy_cap: Option<u64>,
    pub method: MaxWeightMethod,
}

impl Default for UdaXpOptions {
    fn default() -> Self {
        UdaXpOptions { threads: 1, strategy_cap: None, method: MaxWeightMethod::Auto }
    }
}

#[derive(Debug, Clone)]
pub struct UdaXpOutcome {
    pub matching: BMatching,
    pub weight: i64,
    /// Strategies tried.
    pub strategies: u64,
    /// Strategies whose bipartite solution passed the saturation test.
    pub valid: u64,
}

struct Prepared<'a> {
    inst: &'a HypergraphInstance,
    universities: Vec<VertexId>,
    /// Per university: usable incident edges, best first.
    choices: Vec<Vec<EdgeId>>,
    usable: Vec<bool>,
    university_of_edge: Vec<usize>,
    side: Vec<Side>,
}

impl<'a> Prepared<'a> {
    fn new(inst: &'a HypergraphInstance, part: &UdaPartition) -> Result<Self> {
        verify_certificate(inst, &ClassCertificate::UdaPartition(part.clone()))?;
        let universities: Vec<VertexId> =
            (0..inst.n_vertices()).filter(|&v| part.roles[v] == Role::University).collect();
        // an edge through a zero-capacity agent is never part of a b-matching
        let usable: Vec<bool> =
            inst.edges().iter().map(|verts| verts.iter().all(|&v| inst.capacity(v) > 0)).collect();
        let mut university_of_edge = vec![usize::MAX; inst.n_edges()];
        let choices = universities
            .iter()
            .enumerate()
            .map(|(i, &u)| {
                for &e in inst.incident(u) {
                    university_of_edge[e] = i;
                }
                inst.preference(u).iter().copied().filter(|&e| usable[e]).collect()
            })
            .collect();
        let side = part.roles.iter().map(|r| if *r == Role::Program { Side::Right } else { Side::Left }).collect();
        Ok(Prepared { inst, universities, choices, usable, university_of_edge, side })
    }

    fn count(&self) -> Option<u64> {
        self.choices.iter().try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64 + 1))
    }

    /// Mixed-radix decoding; digit 0 is the unsaturated guess.
    fn decode(&self, mut index: u64) -> Strategy {
        self.choices
            .iter()
            .map(|c| {
                let radix = c.len() as u64 + 1;
                let digit = (index % radix) as usize;
                index /= radix;
                digit.checked_sub(1).map(|d| c[d])
            })
            .collect()
    }

    fn solve(&self, sigma: &Strategy, method: MaxWeightMethod) -> Result<Option<BMatching>> {
        let g = self.inst;
        let keep: Vec<bool> = (0..g.n_edges())
            .map(|e| {
                if !self.usable[e] {
                    return false;
                }
                let i = self.university_of_edge[e];
                match sigma[i] {
                    None => true,
                    Some(worst) => g.rank(self.universities[i], e) <= g.rank(self.universities[i], worst),
                }
            })
            .collect();
        let kept: Vec<EdgeId> = (0..g.n_edges()).filter(|&e| keep[e]).collect();
        let mut new_id = vec![usize::MAX; g.n_edges()];
        for (i, &e) in kept.iter().enumerate() {
            new_id[e] = i;
        }
        let mut caps = g.capacities().to_vec();
        for &u in &self.universities {
            caps[u] = 0;
        }
        let edges: Vec<Vec<VertexId>> = kept
            .iter()
            .map(|&e| g.edge(e).iter().copied().filter(|&v| self.side_of_agent(v).is_some()).collect())
            .collect();
        let prefs: Vec<Vec<EdgeId>> = (0..g.n_vertices())
            .map(|v| {
                if self.side_of_agent(v).is_none() {
                    return Vec::new();
                }
                g.preference(v).iter().filter(|&&e| keep[e]).map(|&e| new_id[e]).collect()
            })
            .collect();
        let weights = g.has_weights().then(|| kept.iter().map(|&e| g.weight(e)).collect());
        let projected = HypergraphInstance::from_parts(g.n_vertices(), edges, caps, prefs, weights)?;
        let bip = BipartiteInstance::new(projected, self.side.clone())?;
        let (m_prime, _) = maxw_stable(&bip, method)?;

        let mut m = BMatching::empty(g);
        for e in m_prime.edges() {
            m.insert(g, kept[e]);
        }
        let valid = self.universities.iter().zip(sigma).all(|(&u, guess)| {
            let (load, cap) = (m.load(u), g.capacity(u));
            match guess {
                Some(_) => load == cap,
                // nothing can be below a capacity of zero
                None if cap == 0 => load == 0,
                None => load < cap,
            }
        });
        Ok(valid.then_some(m))
    }

    /// Students and programs keep their vertices; universities are dropped.
    fn side_of_agent(&self, v: VertexId) -> Option<Side> {
        (!self.universities.contains(&v)).then(|| self.side[v])
    }
}

/// Number of strategies the solver tries: the product over universities of
/// one plus the number of usable incident edges.
pub fn strategy_count(inst: &HypergraphInstance, part: &UdaPartition) -> Result<u64> {
    Prepared::new(inst, part)?.count().ok_or_else(|| Error::Overflow("number of strategies".into()))
}

/// Strategy read off a b-matching: the worst edge at every saturated university.
pub fn strategy_of(inst: &HypergraphInstance, part: &UdaPartition, m: &BMatching) -> Strategy {
    (0..inst.n_vertices())
        .filter(|&v| part.roles[v] == Role::University)
        .map(|u| {
            if m.load(u) >= inst.capacity(u) && inst.capacity(u) > 0 {
                m.at(inst, u).max_by_key(|&e| inst.rank(u, e))
            } else {
                None
            }
        })
        .collect()
}

/// Bipartite step for one strategy; `None` when its solution is not valid.
pub fn solve_for_strategy(
    inst: &HypergraphInstance,
    part: &UdaPartition,
    sigma: &Strategy,
    method: MaxWeightMethod,
) -> Result<Option<BMatching>> {
    let prep = Prepared::new(inst, part)?;
    if sigma.len() != prep.universities.len() {
        return Err(Error::InvalidParameters(format!(
            "strategy has {} entries for {} universities",
            sigma.len(),
            prep.universities.len()
        )));
    }
    prep.solve(sigma, method)
}

type Candidate = Option<(i64, Vec<EdgeId>)>;

fn pick(a: Candidate, b: Candidate) -> Candidate {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((wa, ea)), Some((wb, eb))) => {
            if better(wb, &eb, wa, &ea) {
                Some((wb, eb))
            } else {
                Some((wa, ea))
            }
        }
    }
}

pub fn maxw_uda_hypergraph(
    inst: &HypergraphInstance,
    part: &UdaPartition,
    opts: UdaXpOptions,
) -> Result<UdaXpOutcome> {
    let prep = Prepared::new(inst, part)?;
    let total = prep.count().ok_or_else(|| Error::Overflow("number of strategies".into()))?;
    if let Some(cap) = opts.strategy_cap {
        if total > cap {
            return Err(Error::BudgetExceeded { edges: inst.n_edges(), cap: cap as usize });
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| Error::InternalConsistency(format!("thread pool: {e}")))?;
    let (best, valid) = pool.install(|| {
        (0..total)
            .into_par_iter()
            .map(|i| {
                let found = prep.solve(&prep.decode(i), opts.method)?;
                Ok::<_, Error>(match found {
                    Some(m) => (Some((m.weight(inst), m.edges())), 1u64),
                    None => (None, 0),
                })
            })
            .try_reduce(|| (None, 0), |(a, na), (b, nb)| Ok((pick(a, b), na + nb)))
    })?;
    let (weight, edges) =
        best.ok_or_else(|| Error::InternalConsistency("no strategy produced a valid stable matching".into()))?;
    let matching = BMatching::from_edges(inst, &edges)?;
    Ok(UdaXpOutcome { matching, weight, strategies: total, valid })
}

/// Maximum-weight stable assignment with the instance's triple weights
/// (zero when absent).
pub fn solve_uda_maxw(inst: &UdaInstance, opts: UdaXpOptions) -> Result<(Assignment, i64, UdaXpOutcome)> {
    let reduced = reduce_to_shbm(inst);
    let out = maxw_uda_hypergraph(&reduced.instance, &reduced.partition, opts)?;
    Ok((reduced.to_assignment(&out.matching), out.weight, out))
}
