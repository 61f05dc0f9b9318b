//! CNF satisfiability to laminar instances (unit capacities).
//!
//! Vertices: `z`, then `v_i`, `v̄_i` per variable. Edges: `e_z = {z}`, the
//! parallel pair `e_i`, `ē_i` on `{v_i, v̄_i}`, and one edge per clause
//! spanning every vertex. A stable matching containing `e_z` picks one edge
//! per variable, and every clause edge must be dominated by a literal edge.

use serde::{Deserialize, Serialize};

use crate::classes::{laminar_forest, laminar_to_path_ordering, CertificateBundle, ClassCertificate, ClassHint};
use crate::error::{Error, Result};
use crate::hypergraph::{EdgeId, HypergraphInstance};
use crate::io::InstanceFile;

use super::Gadget;

/// Clauses as DIMACS literals: `+i` for `x_i`, `-i` for its negation, `i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cnf {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for c in &clauses {
            for &lit in c {
                if lit == 0 || lit.unsigned_abs() as usize > n_vars {
                    return Err(Error::InvalidFormula(format!("literal {lit} outside 1..={n_vars}")));
                }
            }
        }
        Ok(Cnf { n_vars, clauses })
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&lit| assignment[lit.unsigned_abs() as usize - 1] == (lit > 0)))
    }

    /// Tries all assignments; fine for a handful of variables.
    pub fn is_satisfiable(&self) -> bool {
        assert!(self.n_vars < 32, "exhaustive check limited to 31 variables");
        (0u32..1 << self.n_vars).any(|bits| {
            let a: Vec<bool> = (0..self.n_vars).map(|i| bits >> i & 1 == 1).collect();
            self.satisfied_by(&a)
        })
    }
}

/// Reads DIMACS CNF: `c` comment lines, a `p cnf <vars> <clauses>` header,
/// then zero-terminated clauses.
pub fn parse_dimacs(text: &str) -> Result<Cnf> {
    let mut n_vars = None;
    let mut expected = 0usize;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        let err = |msg: String| Error::Parse { line: lineno + 1, column: 1, message: msg };
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(err(format!("bad header {line:?}")));
            }
            n_vars = Some(parts[2].parse::<usize>().map_err(|e| err(e.to_string()))?);
            expected = parts[3].parse::<usize>().map_err(|e| err(e.to_string()))?;
            continue;
        }
        if n_vars.is_none() {
            return Err(err("clause before the `p cnf` header".into()));
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok.parse().map_err(|_| err(format!("bad literal {tok:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    let n_vars = n_vars.ok_or_else(|| Error::InvalidFormula("missing `p cnf` header".into()))?;
    if clauses.len() != expected {
        return Err(Error::InvalidFormula(format!("header announces {expected} clauses, found {}", clauses.len())));
    }
    Cnf::new(n_vars, clauses)
}

/// Laminar instance with `2n+1` vertices and `2n+m+1` edges; `e_z` (edge 0)
/// has weight 1 and lies in some stable matching iff the formula is satisfiable.
pub fn gen_laminar_from_cnf(cnf: &Cnf) -> Result<Gadget> {
    if cnf.clauses.is_empty() {
        return Err(Error::InvalidFormula("empty formula".into()));
    }
    let n = cnf.n_vars;
    let m = cnf.clauses.len();
    let vertex = |i: usize, neg: bool| 1 + 2 * i + neg as usize;
    let lit_edge = |i: usize, neg: bool| 1 + 2 * i + neg as usize;
    let clause_edge = |j: usize| 1 + 2 * n + j;
    let all: Vec<usize> = (0..=2 * n).collect();

    let mut edges = vec![vec![0]];
    for i in 0..n {
        edges.push(vec![vertex(i, false), vertex(i, true)]);
        edges.push(vec![vertex(i, false), vertex(i, true)]);
    }
    edges.extend((0..m).map(|_| all.clone()));

    let mut prefs = vec![Vec::new(); 2 * n + 1];
    prefs[0] = (0..m).map(clause_edge).chain([0]).collect();
    for i in 0..n {
        for neg in [false, true] {
            let var = i as i32 + 1;
            let lit = if neg { -var } else { var };
            let (with, without): (Vec<EdgeId>, Vec<EdgeId>) =
                (0..m).map(clause_edge).partition(|&e| cnf.clauses[e - 1 - 2 * n].contains(&lit));
            let mut list = without;
            list.push(lit_edge(i, neg));
            list.extend(with);
            list.push(lit_edge(i, !neg));
            prefs[vertex(i, neg)] = list;
        }
    }
    let mut weights = vec![0i64; edges.len()];
    weights[0] = 1;
    let instance = HypergraphInstance::from_parts(2 * n + 1, edges, vec![1; 2 * n + 1], prefs, Some(weights))?;
    let mut certificate = CertificateBundle::default();
    certificate.insert(ClassCertificate::LaminarForest(laminar_forest(&instance)?));
    certificate.insert(ClassCertificate::PathOrdering(laminar_to_path_ordering(&instance)?));
    Ok(Gadget { file: InstanceFile { instance, class_hint: Some(ClassHint::Laminar), certificate }, target: 0 })
}
