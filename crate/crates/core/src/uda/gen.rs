use rand::seq::SliceRandom;
use rand::Rng;

use crate::random::GenSizes;

use super::{Program, RawUda, UdaInstance, University};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UdaSizes {
    pub students: usize,
    pub universities: usize,
    /// Each university offers between one and this many programs.
    pub max_programs_per_university: usize,
    /// Each student lists between one and this many programs.
    pub max_list_len: usize,
    pub min_capacity: u32,
    pub max_capacity: u32,
    pub max_quota: u32,
    /// Triple weights from `-max_weight..=max_weight`; zero means unweighted.
    pub max_weight: i64,
}

impl Default for UdaSizes {
    fn default() -> Self {
        UdaSizes {
            students: 4,
            universities: 2,
            max_programs_per_university: 2,
            max_list_len: 2,
            min_capacity: 1,
            max_capacity: 2,
            max_quota: 2,
            max_weight: 0,
        }
    }
}

impl UdaSizes {
    /// Students take about half of the vertex budget, universities a sixth.
    pub fn from_gen_sizes(s: &GenSizes) -> Self {
        UdaSizes {
            students: (s.n_vertices / 2).max(1),
            universities: (s.n_vertices / 6).max(1),
            max_programs_per_university: 2,
            max_list_len: s.max_edge_size.max(1),
            min_capacity: s.min_capacity,
            max_capacity: s.max_capacity.max(s.min_capacity),
            max_quota: s.max_capacity.max(1),
            max_weight: 0,
        }
    }
}

/// Random instance; universities and programs rank exactly their applicants.
pub fn random_uda<R: Rng + ?Sized>(rng: &mut R, s: &UdaSizes) -> UdaInstance {
    let universities: Vec<University> = (0..s.universities)
        .map(|u| University {
            name: Some(format!("u{u}")),
            capacity: rng.gen_range(s.min_capacity..=s.max_capacity.max(s.min_capacity)),
        })
        .collect();
    let mut programs = Vec::new();
    for u in 0..s.universities {
        for _ in 0..rng.gen_range(1..=s.max_programs_per_university.max(1)) {
            programs.push(Program {
                name: Some(format!("p{}", programs.len())),
                university: u,
                quota: rng.gen_range(1..=s.max_quota.max(1)),
            });
        }
    }
    let mut student_prefs = Vec::new();
    for _ in 0..s.students {
        let mut all: Vec<usize> = (0..programs.len()).collect();
        all.shuffle(rng);
        let len = if programs.is_empty() { 0 } else { rng.gen_range(1..=s.max_list_len.clamp(1, programs.len())) };
        all.truncate(len);
        student_prefs.push(all);
    }
    let mut university_prefs = vec![Vec::new(); s.universities];
    let mut program_prefs = vec![Vec::new(); programs.len()];
    for (st, list) in student_prefs.iter().enumerate() {
        for &p in list {
            program_prefs[p].push(st);
            let u: &mut Vec<usize> = &mut university_prefs[programs[p].university];
            if !u.contains(&st) {
                u.push(st);
            }
        }
    }
    for list in university_prefs.iter_mut().chain(program_prefs.iter_mut()) {
        list.shuffle(rng);
    }
    let n_triples: usize = student_prefs.iter().map(Vec::len).sum();
    let weights = (s.max_weight > 0).then(|| (0..n_triples).map(|_| rng.gen_range(-s.max_weight..=s.max_weight)).collect());
    UdaInstance::new(RawUda {
        students: (0..s.students).map(|i| format!("s{i}")).collect(),
        universities,
        programs,
        student_prefs,
        university_prefs,
        program_prefs,
        weights,
    })
    .expect("generated instance is valid")
}
