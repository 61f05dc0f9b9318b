//! Proposal-based procedures: the half-stable student-proposing algorithm,
//! deferred acceptance for unit university capacities, and the naive
//! repeated proposal rounds that can cycle.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

use super::{prefers_program, Assignment, Program, ProgramId, RawUda, StudentId, UdaInstance, University, UniversityId};

fn worst_by(rank: impl Fn(StudentId) -> Option<usize>, students: impl Iterator<Item = StudentId>) -> Option<StudentId> {
    students.max_by_key(|&s| rank(s).unwrap_or(usize::MAX))
}

/// Student-proposing allocation in which every program ranks students as
/// its university does. The result admits no doubly blocking triple.
pub fn solve_uda_half_stable(inst: &UdaInstance) -> Assignment {
    let ns = inst.n_students();
    let u_rank = |u: UniversityId, s: StudentId| inst.university_rank(u, s);
    let mut deleted: Vec<Vec<bool>> = (0..ns).map(|s| vec![false; inst.student_prefs(s).len()]).collect();
    let mut mu = Assignment::empty(inst);
    let mut free: VecDeque<StudentId> = (0..ns).collect();

    let delete = |deleted: &mut Vec<Vec<bool>>, s: StudentId, p: ProgramId| {
        if let Some(r) = inst.student_rank(s, p) {
            deleted[s][r] = true;
        }
    };

    while let Some(s) = free.pop_front() {
        let Some(r) = (0..deleted[s].len()).find(|&r| !deleted[s][r]) else { continue };
        let p = inst.student_prefs(s)[r];
        let u = inst.university_of(p);
        mu.0[s] = Some(p);

        if mu.program_load(p) > inst.quota(p) as usize {
            let loser = worst_by(|x| u_rank(u, x), mu.students_at_program(p)).unwrap();
            mu.0[loser] = None;
            delete(&mut deleted, loser, p);
            free.push_back(loser);
        } else if mu.university_load(inst, u) > inst.capacity(u) as usize {
            let loser = worst_by(|x| u_rank(u, x), mu.students_at_university(inst, u)).unwrap();
            let lost = mu.0[loser].take().unwrap();
            delete(&mut deleted, loser, lost);
            free.push_back(loser);
        }

        let quota = inst.quota(p) as usize;
        if quota > 0 && mu.program_load(p) == quota {
            let worst = worst_by(|x| u_rank(u, x), mu.students_at_program(p)).unwrap();
            for &t in inst.university_prefs(u) {
                if u_rank(u, t) > u_rank(u, worst) {
                    delete(&mut deleted, t, p);
                }
            }
        }
        let cap = inst.capacity(u) as usize;
        let worst_at_u = worst_by(|x| u_rank(u, x), mu.students_at_university(inst, u));
        if cap == 0 || mu.university_load(inst, u) == cap {
            let threshold = worst_at_u.and_then(|w| u_rank(u, w));
            for &t in inst.university_prefs(u) {
                if threshold.is_none_or(|th| u_rank(u, t).is_some_and(|rt| rt > th)) {
                    for &q in inst.student_prefs(t) {
                        if inst.university_of(q) == u {
                            delete(&mut deleted, t, q);
                        }
                    }
                }
            }
        }
        if mu.0[s].is_none() && !free.contains(&s) {
            free.push_back(s);
        }
    }
    mu
}

/// Deferred acceptance when every university admits at most one student.
/// The university alone accepts or rejects.
pub fn solve_uda_unit_capacity(inst: &UdaInstance) -> Result<Assignment> {
    if let Some(u) = (0..inst.n_universities()).find(|&u| inst.capacity(u) > 1) {
        return Err(Error::CapacityNotUnit { vertex: u, capacity: inst.capacity(u) });
    }
    let ns = inst.n_students();
    let mut next = vec![0usize; ns];
    let mut holder: Vec<Option<StudentId>> = vec![None; inst.n_universities()];
    let mut mu = Assignment::empty(inst);
    let mut free: VecDeque<StudentId> = (0..ns).collect();
    while let Some(s) = free.pop_front() {
        let Some(&p) = inst.student_prefs(s).get(next[s]) else { continue };
        next[s] += 1;
        let u = inst.university_of(p);
        let accept = inst.capacity(u) == 1
            && inst.quota(p) > 0
            && holder[u].is_none_or(|h| inst.university_rank(u, s) < inst.university_rank(u, h));
        if accept {
            if let Some(h) = holder[u].replace(s) {
                mu.0[h] = None;
                free.push_back(h);
            }
            mu.0[s] = Some(p);
        } else {
            free.push_back(s);
        }
    }
    Ok(mu)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rejecter {
    Program,
    University,
}

/// One proposal and the rejections it triggered.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Proposal {
    pub student: StudentId,
    pub program: ProgramId,
    pub rejected: Vec<(StudentId, Rejecter)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProposalRound {
    pub proposals: Vec<Proposal>,
    pub result: Assignment,
}

/// One round of proposals starting from `start`. Students queue in `order`;
/// a student at the front proposes to its next program, provided it beats
/// the current one. An over-full program drops its worst student, then an
/// over-full university drops its worst. Rejected students rejoin the back
/// of the queue. Proposal pointers start at the top of every list.
pub fn proposal_round(inst: &UdaInstance, order: &[StudentId], start: &Assignment) -> ProposalRound {
    let mut mu = start.clone();
    let mut next = vec![0usize; inst.n_students()];
    let mut queue: VecDeque<StudentId> = order.iter().copied().collect();
    let mut proposals = Vec::new();
    while let Some(s) = queue.pop_front() {
        let Some(&p) = inst.student_prefs(s).get(next[s]) else { continue };
        if !prefers_program(inst, s, p, mu.program(s)) {
            continue;
        }
        next[s] += 1;
        mu.0[s] = Some(p);
        let u = inst.university_of(p);
        let mut rejected = Vec::new();
        if mu.program_load(p) > inst.quota(p) as usize {
            let loser = worst_by(|x| inst.program_rank(p, x), mu.students_at_program(p)).unwrap();
            mu.0[loser] = None;
            rejected.push((loser, Rejecter::Program));
        }
        if mu.university_load(inst, u) > inst.capacity(u) as usize {
            let loser = worst_by(|x| inst.university_rank(u, x), mu.students_at_university(inst, u)).unwrap();
            mu.0[loser] = None;
            rejected.push((loser, Rejecter::University));
        }
        for &(loser, _) in &rejected {
            if !queue.contains(&loser) {
                queue.push_back(loser);
            }
        }
        proposals.push(Proposal { student: s, program: p, rejected });
    }
    ProposalRound { proposals, result: mu }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundsReport {
    pub rounds: Vec<ProposalRound>,
    /// A round reproduced its own starting assignment while a blocking triple remained.
    pub cycled: bool,
    pub stable: bool,
}

/// Repeats proposal rounds from the empty assignment until the result is
/// stable, a round changes nothing, or `max_rounds` is reached.
pub fn run_proposal_rounds(inst: &UdaInstance, order: &[StudentId], max_rounds: usize) -> RoundsReport {
    let mut rounds: Vec<ProposalRound> = Vec::new();
    let mut current = Assignment::empty(inst);
    for _ in 0..max_rounds {
        let round = proposal_round(inst, order, &current);
        let next = round.result.clone();
        rounds.push(round);
        let stable = super::uda_is_stable(inst, &next).expect("proposal rounds stay feasible").is_none();
        if stable {
            return RoundsReport { rounds, cycled: false, stable: true };
        }
        if next == current {
            return RoundsReport { rounds, cycled: true, stable: false };
        }
        current = next;
    }
    RoundsReport { rounds, cycled: false, stable: false }
}

/// Four students, two universities (capacities 2 and 1) and four unit-quota
/// programs on which repeated proposal rounds return to the same unstable
/// assignment.
pub fn cycling_instance() -> UdaInstance {
    let uni = |name: &str, capacity| University { name: Some(name.into()), capacity };
    let prog = |name: &str, university| Program { name: Some(name.into()), university, quota: 1 };
    // students s1..s4 = 0..3; programs p11, p12, p13, p2 = 0..3
    UdaInstance::new(RawUda {
        students: ["s1", "s2", "s3", "s4"].map(String::from).to_vec(),
        universities: vec![uni("u1", 2), uni("u2", 1)],
        programs: vec![prog("p11", 0), prog("p12", 0), prog("p13", 0), prog("p2", 1)],
        student_prefs: vec![vec![0], vec![1], vec![0, 3], vec![3, 2]],
        university_prefs: vec![vec![3, 2, 1, 0], vec![2, 3]],
        program_prefs: vec![vec![0, 2], vec![1], vec![3], vec![2, 3]],
        weights: None,
    })
    .expect("fixed instance is valid")
}
