//! University dual admission: students apply to programs, each program
//! belongs to one university, and universities have capacities on top of
//! program quotas. Stability involves the student, the university and the
//! program of a triple at once.

mod gen;
mod ilp;
mod proposals;
mod reduce;
mod xp;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gen::{random_uda, UdaSizes};
pub use ilp::{emit_ilp, LpProgram, LpRow};
pub use proposals::{
    cycling_instance, proposal_round, run_proposal_rounds, solve_uda_half_stable, solve_uda_unit_capacity,
    Proposal, ProposalRound, Rejecter, RoundsReport,
};
pub use reduce::{reduce_to_shbm, ReducedUda};
pub use xp::{
    maxw_uda_hypergraph, solve_for_strategy, solve_uda_maxw, strategy_count, strategy_of, Strategy, UdaXpOptions,
    UdaXpOutcome,
};

pub type StudentId = usize;
pub type UniversityId = usize;
pub type ProgramId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct University {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Program {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub university: UniversityId,
    pub quota: u32,
}

/// Plain data as read from JSON; see [`UdaInstance::new`] for the checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawUda {
    pub students: Vec<String>,
    pub universities: Vec<University>,
    pub programs: Vec<Program>,
    /// Acceptable programs per student, best first.
    pub student_prefs: Vec<Vec<ProgramId>>,
    pub university_prefs: Vec<Vec<StudentId>>,
    pub program_prefs: Vec<Vec<StudentId>>,
    /// One weight per acceptable triple, in [`UdaInstance::triples`] order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<i64>>,
}

/// Student `student` admitted to `program` of `university`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub student: StudentId,
    pub university: UniversityId,
    pub program: ProgramId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UdaInstance {
    raw: RawUda,
    rank_s: Vec<Vec<Option<usize>>>,
    rank_u: Vec<Vec<Option<usize>>>,
    rank_p: Vec<Vec<Option<usize>>>,
    triples: Vec<Triple>,
}

fn rank_table(lists: &[Vec<usize>], universe: usize, what: &str) -> Result<Vec<Vec<Option<usize>>>> {
    lists
        .iter()
        .enumerate()
        .map(|(a, list)| {
            let mut rank = vec![None; universe];
            for (i, &x) in list.iter().enumerate() {
                if x >= universe {
                    return Err(Error::InvalidUda(format!("{what} {a} lists unknown id {x}")));
                }
                if rank[x].replace(i).is_some() {
                    return Err(Error::InvalidUda(format!("{what} {a} lists {x} twice")));
                }
            }
            Ok(rank)
        })
        .collect()
}

impl UdaInstance {
    pub fn new(raw: RawUda) -> Result<Self> {
        let (ns, nu, np) = (raw.students.len(), raw.universities.len(), raw.programs.len());
        let bad = |m: String| Err(Error::InvalidUda(m));
        if raw.student_prefs.len() != ns {
            return bad(format!("{} student lists for {ns} students", raw.student_prefs.len()));
        }
        if raw.university_prefs.len() != nu {
            return bad(format!("{} university lists for {nu} universities", raw.university_prefs.len()));
        }
        if raw.program_prefs.len() != np {
            return bad(format!("{} program lists for {np} programs", raw.program_prefs.len()));
        }
        if let Some(p) = raw.programs.iter().position(|p| p.university >= nu) {
            return bad(format!("program {p} belongs to unknown university {}", raw.programs[p].university));
        }
        let rank_s = rank_table(&raw.student_prefs, np, "student")?;
        let rank_u = rank_table(&raw.university_prefs, ns, "university")?;
        let rank_p = rank_table(&raw.program_prefs, ns, "program")?;
        let mut triples = Vec::new();
        for (s, list) in raw.student_prefs.iter().enumerate() {
            for &p in list {
                let u = raw.programs[p].university;
                if rank_u[u][s].is_none() {
                    return bad(format!("university {u} does not rank student {s} who applies to program {p}"));
                }
                if rank_p[p][s].is_none() {
                    return bad(format!("program {p} does not rank student {s} who applies to it"));
                }
                triples.push(Triple { student: s, university: u, program: p });
            }
        }
        if let Some(w) = &raw.weights {
            if w.len() != triples.len() {
                return bad(format!("{} weights for {} acceptable triples", w.len(), triples.len()));
            }
            let mut total: i64 = 0;
            for x in w {
                total = x
                    .checked_abs()
                    .and_then(|a| total.checked_add(a))
                    .ok_or_else(|| Error::Overflow("sum of absolute triple weights".into()))?;
            }
        }
        Ok(UdaInstance { raw, rank_s, rank_u, rank_p, triples })
    }

    pub fn raw(&self) -> &RawUda {
        &self.raw
    }

    pub fn n_students(&self) -> usize {
        self.raw.students.len()
    }

    pub fn n_universities(&self) -> usize {
        self.raw.universities.len()
    }

    pub fn n_programs(&self) -> usize {
        self.raw.programs.len()
    }

    pub fn capacity(&self, u: UniversityId) -> u32 {
        self.raw.universities[u].capacity
    }

    pub fn quota(&self, p: ProgramId) -> u32 {
        self.raw.programs[p].quota
    }

    pub fn university_of(&self, p: ProgramId) -> UniversityId {
        self.raw.programs[p].university
    }

    pub fn student_prefs(&self, s: StudentId) -> &[ProgramId] {
        &self.raw.student_prefs[s]
    }

    pub fn university_prefs(&self, u: UniversityId) -> &[StudentId] {
        &self.raw.university_prefs[u]
    }

    pub fn program_prefs(&self, p: ProgramId) -> &[StudentId] {
        &self.raw.program_prefs[p]
    }

    pub fn student_rank(&self, s: StudentId, p: ProgramId) -> Option<usize> {
        self.rank_s[s][p]
    }

    pub fn university_rank(&self, u: UniversityId, s: StudentId) -> Option<usize> {
        self.rank_u[u][s]
    }

    pub fn program_rank(&self, p: ProgramId, s: StudentId) -> Option<usize> {
        self.rank_p[p][s]
    }

    /// Acceptable triples, student by student, each in preference order.
    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn weights(&self) -> Option<&[i64]> {
        self.raw.weights.as_deref()
    }

    pub fn triple_weight(&self, t: usize) -> i64 {
        self.raw.weights.as_ref().map_or(0, |w| w[t])
    }

    pub fn with_weights(&self, weights: Option<Vec<i64>>) -> Result<Self> {
        let mut raw = self.raw.clone();
        raw.weights = weights;
        UdaInstance::new(raw)
    }

    /// Index of the triple for an acceptable (student, program) pair.
    pub fn triple_index(&self, s: StudentId, p: ProgramId) -> Option<usize> {
        let first = self.raw.student_prefs[..s].iter().map(Vec::len).sum::<usize>();
        self.rank_s[s][p].map(|r| first + r)
    }

    pub fn student_name(&self, s: StudentId) -> &str {
        &self.raw.students[s]
    }

    pub fn university_name(&self, u: UniversityId) -> String {
        self.raw.universities[u].name.clone().unwrap_or_else(|| format!("u{u}"))
    }

    pub fn program_name(&self, p: ProgramId) -> String {
        self.raw.programs[p].name.clone().unwrap_or_else(|| format!("p{p}"))
    }

    /// Looks up a program by name.
    pub fn program_named(&self, name: &str) -> Option<ProgramId> {
        (0..self.n_programs()).find(|&p| self.program_name(p) == name)
    }

    pub fn student_named(&self, name: &str) -> Option<StudentId> {
        self.raw.students.iter().position(|s| s == name)
    }

    pub fn university_named(&self, name: &str) -> Option<UniversityId> {
        (0..self.n_universities()).find(|&u| self.university_name(u) == name)
    }
}

/// Program of every student, `None` for unassigned.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<Option<ProgramId>>);

impl Assignment {
    pub fn empty(inst: &UdaInstance) -> Self {
        Assignment(vec![None; inst.n_students()])
    }

    pub fn program(&self, s: StudentId) -> Option<ProgramId> {
        self.0[s]
    }

    pub fn students_at_program(&self, p: ProgramId) -> impl Iterator<Item = StudentId> + '_ {
        (0..self.0.len()).filter(move |&s| self.0[s] == Some(p))
    }

    pub fn students_at_university<'a>(
        &'a self,
        inst: &'a UdaInstance,
        u: UniversityId,
    ) -> impl Iterator<Item = StudentId> + 'a {
        (0..self.0.len()).filter(move |&s| self.0[s].is_some_and(|p| inst.university_of(p) == u))
    }

    pub fn size(&self) -> usize {
        self.0.iter().flatten().count()
    }

    pub fn program_load(&self, p: ProgramId) -> usize {
        self.students_at_program(p).count()
    }

    pub fn university_load(&self, inst: &UdaInstance, u: UniversityId) -> usize {
        self.students_at_university(inst, u).count()
    }

    /// Indices of the assigned triples, ascending.
    pub fn triple_indices(&self, inst: &UdaInstance) -> Vec<usize> {
        let mut t: Vec<usize> =
            (0..self.0.len()).filter_map(|s| self.0[s].and_then(|p| inst.triple_index(s, p))).collect();
        t.sort_unstable();
        t
    }

    pub fn weight(&self, inst: &UdaInstance) -> i64 {
        self.triple_indices(inst).into_iter().map(|t| inst.triple_weight(t)).sum()
    }

    /// Acceptability, then program quotas, then university capacities.
    pub fn check_feasible(&self, inst: &UdaInstance) -> Result<()> {
        if self.0.len() != inst.n_students() {
            return Err(Error::InfeasibleAssignment(format!(
                "{} entries for {} students",
                self.0.len(),
                inst.n_students()
            )));
        }
        for (s, p) in self.0.iter().enumerate() {
            if let Some(p) = *p {
                if p >= inst.n_programs() || inst.student_rank(s, p).is_none() {
                    return Err(Error::InfeasibleAssignment(format!(
                        "student {s} is assigned to program {p}, which it does not find acceptable"
                    )));
                }
            }
        }
        for p in 0..inst.n_programs() {
            let load = self.program_load(p);
            if load > inst.quota(p) as usize {
                return Err(Error::InfeasibleAssignment(format!(
                    "program {p} holds {load} students but has quota {}",
                    inst.quota(p)
                )));
            }
        }
        for u in 0..inst.n_universities() {
            let load = self.university_load(inst, u);
            if load > inst.capacity(u) as usize {
                return Err(Error::InfeasibleAssignment(format!(
                    "university {u} holds {load} students but has capacity {}",
                    inst.capacity(u)
                )));
            }
        }
        Ok(())
    }
}

fn prefers_program(inst: &UdaInstance, s: StudentId, p: ProgramId, current: Option<ProgramId>) -> bool {
    match current {
        None => true,
        Some(q) => inst.student_rank(s, p) < inst.student_rank(s, q),
    }
}

/// `a` ranked above `b` by a list with ranks `rank`; unranked students lose.
fn ranks_above(rank: Option<usize>, other: Option<usize>) -> bool {
    match (rank, other) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    }
}

fn blocks_unchecked(inst: &UdaInstance, mu: &Assignment, t: &Triple) -> bool {
    let Triple { student: s, university: u, program: p } = *t;
    if !prefers_program(inst, s, p, mu.program(s)) {
        return false;
    }
    let at_u: Vec<StudentId> = mu.students_at_university(inst, u).collect();
    let university_ok = at_u.len() < inst.capacity(u) as usize
        || at_u.contains(&s)
        || at_u.iter().any(|&x| ranks_above(inst.university_rank(u, s), inst.university_rank(u, x)));
    if !university_ok {
        return false;
    }
    mu.program_load(p) < inst.quota(p) as usize
        || mu.students_at_program(p).any(|x| ranks_above(inst.program_rank(p, s), inst.program_rank(p, x)))
}

/// Does `t` block the feasible assignment `mu`?
pub fn triple_blocks(inst: &UdaInstance, mu: &Assignment, t: &Triple) -> Result<bool> {
    mu.check_feasible(inst)?;
    Ok(blocks_unchecked(inst, mu, t))
}

/// Every blocking triple, in [`UdaInstance::triples`] order.
pub fn find_blocking_triples(inst: &UdaInstance, mu: &Assignment) -> Result<Vec<Triple>> {
    mu.check_feasible(inst)?;
    Ok(inst.triples().iter().filter(|t| blocks_unchecked(inst, mu, t)).copied().collect())
}

/// `Ok(None)` when stable, otherwise the first blocking triple.
pub fn uda_is_stable(inst: &UdaInstance, mu: &Assignment) -> Result<Option<Triple>> {
    mu.check_feasible(inst)?;
    Ok(inst.triples().iter().find(|t| blocks_unchecked(inst, mu, t)).copied())
}

/// Blocking triples whose program is unsaturated or holds a student that
/// both the university and the program rank below the applicant.
pub fn find_doubly_blocking(inst: &UdaInstance, mu: &Assignment) -> Result<Vec<Triple>> {
    mu.check_feasible(inst)?;
    Ok(inst
        .triples()
        .iter()
        .filter(|t| blocks_unchecked(inst, mu, t))
        .filter(|t| {
            let Triple { student: s, university: u, program: p } = **t;
            mu.program_load(p) < inst.quota(p) as usize
                || mu.students_at_program(p).any(|x| {
                    ranks_above(inst.university_rank(u, s), inst.university_rank(u, x))
                        && ranks_above(inst.program_rank(p, s), inst.program_rank(p, x))
                })
        })
        .copied()
        .collect())
}

pub fn is_half_stable(inst: &UdaInstance, mu: &Assignment) -> Result<bool> {
    Ok(find_doubly_blocking(inst, mu)?.is_empty())
}

/// Calls `visit` on every feasible assignment; stops early when it returns false.
pub fn for_each_feasible_assignment(inst: &UdaInstance, mut visit: impl FnMut(&Assignment) -> bool) {
    let mut mu = Assignment::empty(inst);
    let mut load_u = vec![0u32; inst.n_universities()];
    let mut load_p = vec![0u32; inst.n_programs()];
    fn rec(
        inst: &UdaInstance,
        s: usize,
        mu: &mut Assignment,
        load_u: &mut [u32],
        load_p: &mut [u32],
        visit: &mut dyn FnMut(&Assignment) -> bool,
    ) -> bool {
        if s == inst.n_students() {
            return visit(mu);
        }
        if !rec(inst, s + 1, mu, load_u, load_p, visit) {
            return false;
        }
        for &p in inst.student_prefs(s) {
            let u = inst.university_of(p);
            if load_p[p] < inst.quota(p) && load_u[u] < inst.capacity(u) {
                load_p[p] += 1;
                load_u[u] += 1;
                mu.0[s] = Some(p);
                let go_on = rec(inst, s + 1, mu, load_u, load_p, visit);
                mu.0[s] = None;
                load_p[p] -= 1;
                load_u[u] -= 1;
                if !go_on {
                    return false;
                }
            }
        }
        true
    }
    rec(inst, 0, &mut mu, &mut load_u, &mut load_p, &mut visit);
}

/// Enumerates all stable assignments. Exponential; refuses instances with
/// more than `cap` acceptable triples.
pub fn enumerate_stable_assignments(inst: &UdaInstance, cap: usize) -> Result<Vec<Assignment>> {
    if inst.triples().len() > cap {
        return Err(Error::BudgetExceeded { edges: inst.triples().len(), cap });
    }
    let mut out = Vec::new();
    for_each_feasible_assignment(inst, |mu| {
        if !inst.triples().iter().any(|t| blocks_unchecked(inst, mu, t)) {
            out.push(mu.clone());
        }
        true
    });
    Ok(out)
}

/// Maximum-weight stable assignment by enumeration, ties broken towards the
/// lexicographically smaller set of triple indices.
pub fn maxw_stable_assignment_bruteforce(inst: &UdaInstance, cap: usize) -> Result<Option<(Assignment, i64)>> {
    let mut best: Option<(Assignment, i64, Vec<usize>)> = None;
    for mu in enumerate_stable_assignments(inst, cap)? {
        let w = mu.weight(inst);
        let t = mu.triple_indices(inst);
        if best.as_ref().is_none_or(|(_, bw, bt)| crate::hypergraph::better(w, &t, *bw, bt)) {
            best = Some((mu, w, t));
        }
    }
    Ok(best.map(|(mu, w, _)| (mu, w)))
}

pub fn parse_uda(text: &str) -> Result<UdaInstance> {
    let raw: RawUda = serde_json::from_str(text)?;
    UdaInstance::new(raw)
}

pub fn uda_to_json(inst: &UdaInstance) -> String {
    serde_json::to_string_pretty(inst.raw()).expect("plain data serializes")
}

pub fn load_uda(path: &Path) -> Result<UdaInstance> {
    parse_uda(&std::fs::read_to_string(path)?)
}

pub fn save_uda(path: &Path, inst: &UdaInstance) -> Result<()> {
    std::fs::write(path, uda_to_json(inst) + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_triple() -> UdaInstance {
        UdaInstance::new(RawUda {
            students: vec!["a".into()],
            universities: vec![University { name: None, capacity: 1 }],
            programs: vec![Program { name: None, university: 0, quota: 1 }],
            student_prefs: vec![vec![0]],
            university_prefs: vec![vec![0]],
            program_prefs: vec![vec![0]],
            weights: Some(vec![5]),
        })
        .unwrap()
    }

    #[test]
    fn empty_assignment_is_blocked() {
        let inst = one_triple();
        let t = uda_is_stable(&inst, &Assignment::empty(&inst)).unwrap();
        assert_eq!(t, Some(Triple { student: 0, university: 0, program: 0 }));
        assert_eq!(uda_is_stable(&inst, &Assignment(vec![Some(0)])).unwrap(), None);
    }

    #[test]
    fn over_quota_is_reported() {
        let mut raw = one_triple().raw().clone();
        raw.programs[0].quota = 0;
        let inst = UdaInstance::new(raw).unwrap();
        let err = uda_is_stable(&inst, &Assignment(vec![Some(0)])).unwrap_err();
        assert!(err.to_string().contains("quota 0"), "{err}");
    }

    #[test]
    fn unranked_applicant_is_rejected() {
        let mut raw = one_triple().raw().clone();
        raw.program_prefs[0].clear();
        assert!(matches!(UdaInstance::new(raw), Err(Error::InvalidUda(_))));
    }

    #[test]
    fn json_round_trip() {
        let inst = cycling_instance();
        assert_eq!(parse_uda(&uda_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn single_triple_bruteforce() {
        let (mu, w) = maxw_stable_assignment_bruteforce(&one_triple(), 20).unwrap().unwrap();
        assert_eq!((mu, w), (Assignment(vec![Some(0)]), 5));
    }
}
