//! Integer program whose 0/1 solutions are the stable assignments, written
//! in CPLEX LP format. Programs are first split into unit-quota clones that
//! students rank consecutively, so every program row has right-hand side 1.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{ProgramId, StudentId, UdaInstance, UniversityId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LpVariable {
    pub student: StudentId,
    pub university: UniversityId,
    pub program: ProgramId,
    /// Clone index, starting at 1.
    pub clone: u32,
    /// Index into [`UdaInstance::triples`].
    pub triple: usize,
}

impl LpVariable {
    pub fn name(&self) -> String {
        format!("x_s{}_u{}_p{}_c{}", self.student, self.university, self.program, self.clone)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpRow {
    pub name: String,
    /// (variable index, coefficient), variables ascending.
    pub terms: Vec<(usize, i64)>,
    /// `true` for `<=`, `false` for `>=`.
    pub at_most: bool,
    pub rhs: i64,
}

impl LpRow {
    pub fn satisfied_by(&self, x: &[bool]) -> bool {
        let lhs: i64 = self.terms.iter().filter(|(v, _)| x[*v]).map(|(_, c)| c).sum();
        if self.at_most { lhs <= self.rhs } else { lhs >= self.rhs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProgram {
    pub variables: Vec<LpVariable>,
    pub objective: Vec<i64>,
    pub rows: Vec<LpRow>,
}

impl LpProgram {
    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.rows.iter().all(|r| r.satisfied_by(x))
    }

    /// Program of every student under the 0/1 vector `x`, or `None` when
    /// some student holds two variables.
    pub fn assignment(&self, inst: &UdaInstance, x: &[bool]) -> Option<super::Assignment> {
        let mut mu = vec![None; inst.n_students()];
        for v in self.variables.iter().zip(x).filter(|(_, &on)| on).map(|(v, _)| v) {
            if mu[v.student].replace(v.program).is_some() {
                return None;
            }
        }
        Some(super::Assignment(mu))
    }

    pub fn to_lp_string(&self) -> String {
        let term = |c: i64, name: &str, first: bool| -> String {
            let sign = match (c < 0, first) {
                (true, true) => "-",
                (true, false) => " - ",
                (false, true) => "",
                (false, false) => " + ",
            };
            match c.unsigned_abs() {
                1 => format!("{sign}{name}"),
                a => format!("{sign}{a} {name}"),
            }
        };
        let mut out = String::from("\\ stable dual-admission assignments\nMaximize\n obj:");
        if self.variables.is_empty() {
            out.push_str(" 0");
        }
        for (i, v) in self.variables.iter().enumerate() {
            let body = term(self.objective[i], &v.name(), i == 0);
            write!(out, " {}", body.trim_start()).unwrap();
        }
        out.push_str("\nSubject To\n");
        for row in &self.rows {
            write!(out, " {}:", row.name).unwrap();
            for (k, &(v, c)) in row.terms.iter().enumerate() {
                write!(out, " {}", term(c, &self.variables[v].name(), k == 0).trim_start()).unwrap();
            }
            writeln!(out, " {} {}", if row.at_most { "<=" } else { ">=" }, row.rhs).unwrap();
        }
        out.push_str("Binary\n");
        for v in &self.variables {
            writeln!(out, " {}", v.name()).unwrap();
        }
        out.push_str("End\n");
        out
    }
}

/// Builds the integer program. The objective uses the triple weights, or 1
/// per triple when the instance carries none.
pub fn emit_ilp(inst: &UdaInstance) -> LpProgram {
    let mut variables = Vec::new();
    for (t, tr) in inst.triples().iter().enumerate() {
        for k in 1..=inst.quota(tr.program) {
            variables.push(LpVariable {
                student: tr.student,
                university: tr.university,
                program: tr.program,
                clone: k,
                triple: t,
            });
        }
    }
    let objective: Vec<i64> =
        variables.iter().map(|v| inst.weights().map_or(1, |w| w[v.triple])).collect();

    // ranks in the cloned instance
    let student_key = |v: &LpVariable| (inst.student_rank(v.student, v.program), v.clone);
    let university_key = |v: &LpVariable| (inst.university_rank(v.university, v.student), student_key(v));
    let program_key = |v: &LpVariable| inst.program_rank(v.program, v.student);

    let mut at_student: BTreeMap<StudentId, Vec<usize>> = BTreeMap::new();
    let mut at_university: BTreeMap<UniversityId, Vec<usize>> = BTreeMap::new();
    let mut at_clone: BTreeMap<(ProgramId, u32), Vec<usize>> = BTreeMap::new();
    for (i, v) in variables.iter().enumerate() {
        at_student.entry(v.student).or_default().push(i);
        at_university.entry(v.university).or_default().push(i);
        at_clone.entry((v.program, v.clone)).or_default().push(i);
    }
    let unit_row = |name: String, vs: &[usize], rhs: i64| LpRow {
        name,
        terms: vs.iter().map(|&i| (i, 1)).collect(),
        at_most: true,
        rhs,
    };

    let mut rows = Vec::new();
    for (s, vs) in &at_student {
        rows.push(unit_row(format!("student_s{s}"), vs, 1));
    }
    for (u, vs) in &at_university {
        rows.push(unit_row(format!("university_u{u}"), vs, inst.capacity(*u) as i64));
    }
    for ((p, k), vs) in &at_clone {
        rows.push(unit_row(format!("program_p{p}_c{k}"), vs, 1));
    }
    for (i, v) in variables.iter().enumerate() {
        let c = inst.capacity(v.university) as i64;
        let mut coef: BTreeMap<usize, i64> = BTreeMap::new();
        *coef.entry(i).or_default() += c;
        for &j in &at_student[&v.student] {
            if student_key(&variables[j]) < student_key(v) {
                *coef.entry(j).or_default() += c;
            }
        }
        for &j in &at_clone[&(v.program, v.clone)] {
            if program_key(&variables[j]) < program_key(v) {
                *coef.entry(j).or_default() += c;
            }
        }
        for &j in &at_university[&v.university] {
            if university_key(&variables[j]) < university_key(v) {
                *coef.entry(j).or_default() += 1;
            }
        }
        rows.push(LpRow {
            name: format!("stable_{}", v.name()),
            terms: coef.into_iter().filter(|&(_, c)| c != 0).collect(),
            at_most: false,
            rhs: c,
        });
    }
    LpProgram { variables, objective, rows }
}
