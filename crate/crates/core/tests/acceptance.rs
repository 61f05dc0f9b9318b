//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the test fails if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use shbm::bipartite::{maxw_stable, BipartiteInstance, MaxWeightMethod, Side};
use shbm::classes::{build_network_representation, incidence_matrix, ClassHint, Role};
use shbm::hardness::{
    gen_laminar_from_cnf, gen_subpath_from_multicolored_clique, gen_subtree_star_from_shbm, gen_uda_from_com_smti,
    has_complete_stable_matching, has_multicolored_clique, stable_with_edge, Cnf, ColoredGraph, Smti, WomanList,
};
use shbm::hypergraph::{HypergraphInstance, RawInstance};
use shbm::io::seeded_preferences;
use shbm::laminar::solve_laminar;
use shbm::random::{gen_random, rng_from, GenSizes};
use shbm::stability::{enumerate_stable, find_stable_containing, is_stable, maxw_stable_bruteforce};
use shbm::subpath::{solve_subpath_with, SubpathOptions};
use shbm::subtree::{solve_subtree_with, SubtreeOptions};
use shbm::uda::{
    cycling_instance, emit_ilp, enumerate_stable_assignments, find_doubly_blocking, maxw_stable_assignment_bruteforce,
    random_uda, reduce_to_shbm, run_proposal_rounds, solve_uda_half_stable, solve_uda_maxw, solve_uda_unit_capacity,
    uda_is_stable, Assignment, Proposal, Rejecter, Triple, UdaInstance, UdaSizes, UdaXpOptions,
};

const LAMINAR_INSTANCES: u64 = 500;
const LAMINAR_TIME_LIMIT: Duration = Duration::from_secs(1);
const SUBPATH_INSTANCES: u64 = 300;
const SUBPATH_TIME_LIMIT: Duration = Duration::from_secs(30);
const SUBTREE_INSTANCES: u64 = 500;
const UDA_BIJECTION_INSTANCES: usize = 100;
const UDA_MAX_TRIPLES: usize = 8;
const ALG1_INSTANCES: usize = 100;
const HALF_STABLE_INSTANCES: u64 = 300;
const STAR_SOURCES: usize = 50;
const RURAL_INSTANCES: u64 = 300;
const ILP_INSTANCES: usize = 50;
const ILP_MAX_VARIABLES: usize = 16;
const SEARCH_NODES: u64 = 10_000_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("laminar existence and correctness", laminar),
        ("subpath optimality and state bound", subpath),
        ("subtree correctness", subtree),
        ("dual admission bijection", uda_bijection),
        ("network representation", network),
        ("strategy enumeration exactness", strategy_enumeration),
        ("half-stability", half_stability),
        ("reduction fidelity", reductions),
        ("rural hospitals and bipartite optimum", rural_hospitals),
        ("cycling example regression", cycling_example),
        ("integer program equivalence", integer_program),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("{} criterion {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

fn laminar() -> Outcome {
    let mut spent = Duration::ZERO;
    let mut bad = Vec::new();
    for seed in 0..LAMINAR_INSTANCES {
        let n = 3 + (seed % 8) as usize;
        let sizes = GenSizes {
            n_vertices: n,
            n_edges: 1 + (seed % 12) as usize,
            max_edge_size: n.min(5),
            min_capacity: if seed % 4 == 0 { 0 } else { 1 },
            max_capacity: 1 + (seed % 3) as u32,
            max_weight: 0,
        };
        let file = gen_random(ClassHint::Laminar, seed, &sizes).unwrap();
        let t = Instant::now();
        let m = solve_laminar(&file.instance).unwrap();
        spent += t.elapsed();
        if !is_stable(&file.instance, &m).unwrap() {
            bad.push(seed);
        }
    }
    outcome(
        bad.is_empty() && spent < LAMINAR_TIME_LIMIT,
        format!("{LAMINAR_INSTANCES} instances, {} unstable {bad:?}, solver time {spent:?}", bad.len()),
    )
}

fn subpath() -> Outcome {
    let mut spent = Duration::ZERO;
    let (mut mismatches, mut over_bound) = (Vec::new(), Vec::new());
    for seed in 0..SUBPATH_INSTANCES {
        let n = 3 + (seed % 7) as usize;
        let sizes = GenSizes {
            n_vertices: n,
            n_edges: 1 + (seed % 12) as usize,
            max_edge_size: n.min(4),
            min_capacity: if seed % 5 == 0 { 0 } else { 1 },
            max_capacity: 1 + (seed % 3) as u32,
            max_weight: 10,
        };
        let file = gen_random(ClassHint::Subpath, seed, &sizes).unwrap();
        let order = file.certificate.path_ordering.clone().unwrap();
        let t = Instant::now();
        let out = solve_subpath_with(&file.instance, &order, &SubpathOptions::default()).unwrap();
        spent += t.elapsed();
        let brute = maxw_stable_bruteforce(&file.instance).unwrap();
        if out.best.map(|b| b.1) != brute.map(|b| b.1) {
            mismatches.push(seed);
        }
        if !out.stats.within_bound() {
            over_bound.push(seed);
        }
    }
    outcome(
        mismatches.is_empty() && over_bound.is_empty() && spent < SUBPATH_TIME_LIMIT,
        format!(
            "{SUBPATH_INSTANCES} instances, weight mismatches {mismatches:?}, bound exceeded {over_bound:?}, dp time {spent:?}"
        ),
    )
}

fn subtree() -> Outcome {
    let mut bad = Vec::new();
    for seed in 0..SUBTREE_INSTANCES {
        let n = 2 + (seed % 10) as usize;
        let sizes = GenSizes {
            n_vertices: n,
            n_edges: 1 + (seed % 12) as usize,
            max_edge_size: n.min(4),
            min_capacity: 1,
            max_capacity: 1,
            max_weight: 0,
        };
        let file = gen_random(ClassHint::Subtree, seed, &sizes).unwrap();
        let parent = file.certificate.tree_parent.clone().unwrap();
        let opts = SubtreeOptions { root: Some(seed as usize % n), debug_invariants: true };
        let m = solve_subtree_with(&file.instance, &parent, opts).unwrap();
        if !is_stable(&file.instance, &m).unwrap() {
            bad.push(seed);
        }
    }
    outcome(bad.is_empty(), format!("{SUBTREE_INSTANCES} instances, {} unstable {bad:?}", bad.len()))
}

fn small_uda(seed: u64, unit: bool, max_weight: i64) -> UdaInstance {
    let sizes = UdaSizes {
        students: 2 + (seed % 3) as usize,
        universities: 1 + (seed % 2) as usize,
        max_programs_per_university: 2,
        max_list_len: 2,
        min_capacity: if seed.is_multiple_of(7) { 0 } else { 1 },
        max_capacity: if unit { 1 } else { 2 },
        max_quota: 2,
        max_weight,
    };
    random_uda(&mut rng_from(seed), &sizes)
}

/// Small instances with at most `UDA_MAX_TRIPLES` triples, from consecutive seeds.
fn small_udas(count: usize, max_weight: i64) -> Vec<UdaInstance> {
    (0..)
        .map(|seed| small_uda(seed, seed % 3 == 0, max_weight))
        .filter(|inst| inst.triples().len() <= UDA_MAX_TRIPLES)
        .take(count)
        .collect()
}

fn uda_bijection() -> Outcome {
    let mut bad = 0;
    let mut total_stable = 0;
    for inst in small_udas(UDA_BIJECTION_INSTANCES, 0) {
        let reduced = reduce_to_shbm(&inst);
        let assignments: BTreeSet<Assignment> = enumerate_stable_assignments(&inst, 20).unwrap().into_iter().collect();
        let matchings = enumerate_stable(&reduced.instance, None).unwrap();
        let projected: BTreeSet<Assignment> = matchings.iter().map(|m| reduced.to_assignment(m)).collect();
        let lifted_ok = assignments.iter().all(|mu| {
            let m = reduced.to_matching(mu).unwrap();
            is_stable(&reduced.instance, &m).unwrap() && matchings.contains(&m)
        });
        total_stable += assignments.len();
        if assignments != projected || projected.len() != matchings.len() || !lifted_ok {
            bad += 1;
        }
    }
    outcome(
        bad == 0,
        format!("{UDA_BIJECTION_INSTANCES} instances, {total_stable} stable assignments, {bad} mismatching"),
    )
}

fn network() -> Outcome {
    let mut bad = 0;
    let mut checked = 0;
    for seed in 0..300u64 {
        let inst = small_uda(seed, seed % 3 == 0, 0);
        let reduced = reduce_to_shbm(&inst);
        let net = build_network_representation(&reduced.instance, &reduced.partition).unwrap();
        let binary = net.matrix.iter().flatten().all(|&x| x == 0 || x == 1);
        if net.matrix != incidence_matrix(&reduced.instance) || !binary {
            bad += 1;
        }
        checked += 1;
    }
    outcome(bad == 0, format!("{checked} generated instances, {bad} mismatching"))
}

fn strategy_enumeration() -> Outcome {
    let (mut wrong, mut over) = (0, 0);
    for inst in small_udas(ALG1_INSTANCES, 5) {
        let (_, w, out) = solve_uda_maxw(&inst, UdaXpOptions::default()).unwrap();
        let (_, brute) = maxw_stable_assignment_bruteforce(&inst, 20).unwrap().unwrap();
        if w != brute {
            wrong += 1;
        }
        let reduced = reduce_to_shbm(&inst);
        let bound: u64 = (0..reduced.instance.n_vertices())
            .filter(|&v| reduced.partition.roles[v] == Role::University)
            .map(|u| reduced.instance.incident(u).len() as u64 + 1)
            .product();
        if out.strategies > bound {
            over += 1;
        }
    }
    outcome(
        wrong == 0 && over == 0,
        format!("{ALG1_INSTANCES} weighted instances, {wrong} weight mismatches, {over} over the strategy bound"),
    )
}

fn half_stability() -> Outcome {
    let (mut doubly, mut unit_unstable, mut units) = (0, 0, 0);
    for seed in 0..HALF_STABLE_INSTANCES {
        let unit = seed % 2 == 0;
        let sizes = UdaSizes {
            students: 2 + (seed % 6) as usize,
            universities: 1 + (seed % 3) as usize,
            max_programs_per_university: 3,
            max_list_len: 3,
            min_capacity: 1,
            max_capacity: if unit { 1 } else { 3 },
            max_quota: 2,
            max_weight: 0,
        };
        let inst = random_uda(&mut rng_from(seed), &sizes);
        let mu = solve_uda_half_stable(&inst);
        mu.check_feasible(&inst).unwrap();
        if !find_doubly_blocking(&inst, &mu).unwrap().is_empty() {
            doubly += 1;
        }
        if unit {
            units += 1;
            let da = solve_uda_unit_capacity(&inst).unwrap();
            if uda_is_stable(&inst, &mu).unwrap().is_some() || uda_is_stable(&inst, &da).unwrap().is_some() {
                unit_unstable += 1;
            }
        }
    }
    outcome(
        doubly == 0 && unit_unstable == 0,
        format!(
            "{HALF_STABLE_INSTANCES} instances, {doubly} with a doubly blocking triple, {unit_unstable} of {units} unit-capacity outputs unstable"
        ),
    )
}

/// Non-empty clauses over `n` variables with no repeated or complementary literals.
fn clause_types(n: usize) -> Vec<Vec<i32>> {
    let mut out = Vec::new();
    // each variable absent, positive or negative
    for code in 1..3usize.pow(n as u32) {
        let mut c = Vec::new();
        let mut x = code;
        for v in 1..=n as i32 {
            match x % 3 {
                1 => c.push(v),
                2 => c.push(-v),
                _ => {}
            }
            x /= 3;
        }
        out.push(c);
    }
    out
}

fn cnf_family() -> (usize, usize) {
    let (mut checked, mut bad) = (0, 0);
    for n in 1..=3 {
        let types = clause_types(n);
        let t = types.len();
        // multisets of one to three clause types
        for a in 0..t {
            for b in a..=t {
                for c in b..=t {
                    // index t marks an absent clause; c is absent whenever b is
                    let clauses: Vec<Vec<i32>> = [a, b, c].iter().filter(|&&i| i < t).map(|&i| types[i].clone()).collect();
                    let cnf = Cnf::new(n, clauses).unwrap();
                    let g = gen_laminar_from_cnf(&cnf).unwrap();
                    if stable_with_edge(&g.file.instance, g.target, SEARCH_NODES).unwrap() != cnf.is_satisfiable() {
                        bad += 1;
                    }
                    checked += 1;
                }
            }
        }
    }
    (checked, bad)
}

fn three_uniform(seed: u64) -> HypergraphInstance {
    let mut rng = rng_from(seed);
    let n = rng.gen_range(4..=6);
    let m = rng.gen_range(2..=7);
    let vertices: Vec<usize> = (0..n).collect();
    let edges: Vec<Vec<usize>> = (0..m)
        .map(|_| {
            let mut e: Vec<usize> = vertices.choose_multiple(&mut rng, 3).copied().collect();
            e.sort_unstable();
            e
        })
        .collect();
    let capacities = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let preferences = seeded_preferences(n, &edges, seed);
    HypergraphInstance::new(RawInstance { n_vertices: n, edges, capacities, preferences, weights: None }).unwrap()
}

fn star_family() -> (usize, usize, usize) {
    let (mut checked, mut bad, mut without) = (0, 0, 0);
    let mut seed = 0;
    while checked < STAR_SOURCES || without == 0 {
        let src = three_uniform(seed);
        seed += 1;
        let star = gen_subtree_star_from_shbm(&src).unwrap();
        let a: BTreeSet<Vec<usize>> = enumerate_stable(&src, None).unwrap().iter().map(|m| m.edges()).collect();
        let b: BTreeSet<Vec<usize>> =
            enumerate_stable(&star.instance, None).unwrap().iter().map(|m| m.edges()).collect();
        let exists = find_stable_containing(&star.instance, &[], SEARCH_NODES).unwrap().is_some();
        if a != b || exists == a.is_empty() {
            bad += 1;
        }
        if a.is_empty() {
            without += 1;
        }
        checked += 1;
        if seed > 100_000 {
            break;
        }
    }
    (checked, bad, without)
}

/// Every two-man, two-woman instance with mutual acceptability.
fn smti_family() -> (usize, usize) {
    let lists: Vec<Vec<usize>> = vec![vec![], vec![0], vec![1], vec![0, 1], vec![1, 0]];
    let (mut checked, mut bad) = (0, 0);
    for m0 in &lists {
        for m1 in &lists {
            let men = vec![m0.clone(), m1.clone()];
            let suitors: Vec<Vec<usize>> = (0..2).map(|w| (0..2).filter(|&m| men[m].contains(&w)).collect()).collect();
            let options = |s: &Vec<usize>| -> Vec<WomanList> {
                let mut o = vec![WomanList::Strict(s.clone())];
                if s.len() == 2 {
                    o.push(WomanList::Strict(vec![s[1], s[0]]));
                    o.push(WomanList::Tie([s[0], s[1]]));
                }
                o
            };
            for w0 in options(&suitors[0]) {
                for w1 in options(&suitors[1]) {
                    let smti = Smti { men: men.clone(), women: vec![w0.clone(), w1] };
                    let uda = gen_uda_from_com_smti(&smti).unwrap();
                    let caps_one = (0..uda.n_universities()).all(|u| uda.capacity(u) == 1)
                        && (0..uda.n_programs()).all(|p| uda.quota(p) == 1);
                    let full = enumerate_stable_assignments(&uda, 20)
                        .unwrap()
                        .iter()
                        .any(|mu| mu.size() == uda.n_students());
                    if !caps_one || full != has_complete_stable_matching(&smti) {
                        bad += 1;
                    }
                    checked += 1;
                }
            }
        }
    }
    (checked, bad)
}

/// Both tiny pairs plus every graph on a few small colour layouts with k <= 3.
fn clique_family() -> (usize, usize) {
    let layouts: [Vec<usize>; 5] = [vec![0, 1], vec![0, 1, 1], vec![0, 0, 1, 1], vec![0, 1, 2], vec![0, 1, 1, 2]];
    let (mut checked, mut bad) = (0, 0);
    for colors in layouts {
        let n = colors.len();
        let k = colors.iter().max().unwrap() + 1;
        let pairs: Vec<[usize; 2]> =
            (0..n).flat_map(|x| (x + 1..n).map(move |y| [x, y])).filter(|&[x, y]| colors[x] != colors[y]).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            let g = ColoredGraph { n_vertices: n, edges, colors: colors.clone() };
            let gadget = gen_subpath_from_multicolored_clique(&g, k).unwrap();
            let found = stable_with_edge(&gadget.file.instance, gadget.target, SEARCH_NODES).unwrap();
            if found != has_multicolored_clique(&g, k) {
                bad += 1;
            }
            checked += 1;
        }
    }
    (checked, bad)
}

fn reductions() -> Outcome {
    let (cnf_n, cnf_bad) = cnf_family();
    let (star_n, star_bad, star_none) = star_family();
    let (smti_n, smti_bad) = smti_family();
    let (clique_n, clique_bad) = clique_family();
    outcome(
        cnf_bad + star_bad + smti_bad + clique_bad == 0 && star_none > 0,
        format!(
            "cnf {cnf_n} formulas ({cnf_bad} wrong), star {star_n} sources with {star_none} lacking a stable b-matching ({star_bad} wrong), smti {smti_n} ({smti_bad} wrong), clique {clique_n} graphs ({clique_bad} wrong)"
        ),
    )
}

fn rural_hospitals() -> Outcome {
    let (mut load_bad, mut weight_bad, mut rotation_checked) = (0, 0, 0);
    for seed in 0..RURAL_INSTANCES {
        let sizes = GenSizes {
            n_vertices: 4 + (seed % 5) as usize,
            n_edges: 1 + (seed % 10) as usize,
            max_edge_size: 2,
            min_capacity: 1,
            max_capacity: 1 + (seed % 3) as u32,
            max_weight: 10,
        };
        let file = gen_random(ClassHint::Bipartite, seed, &sizes).unwrap();
        let mut raw = file.instance.raw().clone();
        let bip = BipartiteInstance::from_two_coloring(file.instance.clone()).unwrap();
        // every other instance is many-to-one, so rotations apply
        if seed % 2 == 0 {
            for v in bip.vertices_on(Side::Left) {
                raw.capacities[v] = 1;
            }
        }
        let g = HypergraphInstance::new(raw).unwrap();
        let sides = (0..g.n_vertices()).map(|v| bip.side(v)).collect();
        let bip = BipartiteInstance::new(g, sides).unwrap();
        let all = enumerate_stable(bip.graph(), None).unwrap();
        if all.windows(2).any(|w| w[0].loads() != w[1].loads()) {
            load_bad += 1;
        }
        let (_, brute) = maxw_stable_bruteforce(bip.graph()).unwrap().unwrap();
        let (m, w) = maxw_stable(&bip, MaxWeightMethod::Auto).unwrap();
        if w != brute || !is_stable(bip.graph(), &m).unwrap() {
            weight_bad += 1;
        }
        if seed % 2 == 0 {
            rotation_checked += 1;
            let (m, w) = maxw_stable(&bip, MaxWeightMethod::Rotations).unwrap();
            if w != brute || !is_stable(bip.graph(), &m).unwrap() {
                weight_bad += 1;
            }
        }
    }
    outcome(
        load_bad == 0 && weight_bad == 0,
        format!(
            "{RURAL_INSTANCES} instances ({rotation_checked} also via rotations), {load_bad} with differing loads, {weight_bad} weight mismatches"
        ),
    )
}

fn cycling_example() -> Outcome {
    let inst = cycling_instance();
    let (s1, s2, s3, s4) = (0, 1, 2, 3);
    let (p11, p12, p13, p2) = (0, 1, 2, 3);
    let mu = Assignment(vec![None, Some(p12), Some(p2), Some(p13)]);
    let blocking = uda_is_stable(&inst, &mu).unwrap();
    let report = run_proposal_rounds(&inst, &[s3, s4, s1, s2], 10);
    let prop = |student, program, rejected: &[(usize, Rejecter)]| Proposal { student, program, rejected: rejected.to_vec() };
    let first = vec![
        prop(s3, p11, &[]),
        prop(s4, p2, &[]),
        prop(s1, p11, &[(s3, Rejecter::Program)]),
        prop(s2, p12, &[]),
        prop(s3, p2, &[(s4, Rejecter::Program)]),
        prop(s4, p13, &[(s1, Rejecter::University)]),
    ];
    let second = vec![
        prop(s3, p11, &[(s2, Rejecter::University)]),
        prop(s4, p2, &[]),
        prop(s1, p11, &[(s3, Rejecter::Program)]),
        prop(s2, p12, &[]),
        prop(s3, p2, &[(s4, Rejecter::Program)]),
        prop(s4, p13, &[(s1, Rejecter::University)]),
    ];
    let ok = blocking == Some(Triple { student: s3, university: 0, program: p11 })
        && report.cycled
        && report.rounds.len() == 2
        && report.rounds[0].proposals == first
        && report.rounds[1].proposals == second
        && report.rounds.iter().all(|r| r.result == mu);
    outcome(ok, format!("blocking triple {blocking:?}, {} rounds, cycled {}", report.rounds.len(), report.cycled))
}

fn integer_program() -> Outcome {
    let (mut checked, mut bad) = (0, 0);
    let mut seed = 0;
    while checked < ILP_INSTANCES {
        let inst = small_uda(seed, seed % 3 == 0, 3);
        seed += 1;
        let lp = emit_ilp(&inst);
        let nv = lp.variables.len();
        if nv > ILP_MAX_VARIABLES || inst.triples().len() > UDA_MAX_TRIPLES {
            continue;
        }
        let stable: BTreeSet<Assignment> = enumerate_stable_assignments(&inst, 20).unwrap().into_iter().collect();
        let mut feasible = 0;
        let mut images = BTreeSet::new();
        for bits in 0u32..1 << nv {
            let x: Vec<bool> = (0..nv).map(|i| bits >> i & 1 == 1).collect();
            if lp.is_feasible(&x) {
                feasible += 1;
                images.insert(lp.assignment(&inst, &x).unwrap());
            }
        }
        if images != stable || feasible != stable.len() {
            bad += 1;
        }
        checked += 1;
    }
    outcome(bad == 0, format!("{checked} instances, {bad} where feasible 0/1 points differ from stable assignments"))
}
