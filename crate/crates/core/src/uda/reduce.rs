//! Hypergraph form of a dual-admission instance: one vertex per agent, one
//! edge per acceptable triple. Universities rank edges by student first and
//! by the student's own ranking of the programs second.

use crate::classes::{Role, UdaPartition};
use crate::error::{Error, Result};
use crate::hypergraph::{BMatching, EdgeId, HypergraphInstance, VertexId};

use super::{Assignment, ProgramId, StudentId, Triple, UdaInstance, UniversityId};

#[derive(Debug, Clone)]
pub struct ReducedUda {
    pub instance: HypergraphInstance,
    pub partition: UdaPartition,
    /// Triple behind every edge; edge ids follow [`UdaInstance::triples`].
    pub triples: Vec<Triple>,
    n_students: usize,
    n_universities: usize,
}

impl ReducedUda {
    pub fn student_vertex(&self, s: StudentId) -> VertexId {
        s
    }

    pub fn university_vertex(&self, u: UniversityId) -> VertexId {
        self.n_students + u
    }

    pub fn program_vertex(&self, p: ProgramId) -> VertexId {
        self.n_students + self.n_universities + p
    }

    pub fn to_matching(&self, mu: &Assignment) -> Result<BMatching> {
        let edges: Vec<EdgeId> = mu
            .0
            .iter()
            .enumerate()
            .filter_map(|(s, p)| p.map(|p| (s, p)))
            .map(|(s, p)| {
                self.triples
                    .iter()
                    .position(|t| t.student == s && t.program == p)
                    .ok_or_else(|| Error::InfeasibleAssignment(format!("student {s} does not apply to program {p}")))
            })
            .collect::<Result<_>>()?;
        BMatching::from_edges(&self.instance, &edges)
    }

    pub fn to_assignment(&self, m: &BMatching) -> Assignment {
        let mut mu = vec![None; self.n_students];
        for e in m.edges() {
            let t = self.triples[e];
            mu[t.student] = Some(t.program);
        }
        Assignment(mu)
    }
}

pub fn reduce_to_shbm(inst: &UdaInstance) -> ReducedUda {
    let (ns, nu, np) = (inst.n_students(), inst.n_universities(), inst.n_programs());
    let n = ns + nu + np;
    let triples = inst.triples().to_vec();
    let edges: Vec<Vec<VertexId>> =
        triples.iter().map(|t| vec![t.student, ns + t.university, ns + nu + t.program]).collect();

    let mut capacities = vec![1u32; ns];
    capacities.extend((0..nu).map(|u| inst.capacity(u)));
    capacities.extend((0..np).map(|p| inst.quota(p)));

    let mut prefs: Vec<Vec<EdgeId>> = vec![Vec::new(); n];
    for (e, t) in triples.iter().enumerate() {
        prefs[t.student].push(e);
        prefs[ns + t.university].push(e);
        prefs[ns + nu + t.program].push(e);
    }
    // student blocks are already in preference order
    for u in 0..nu {
        prefs[ns + u].sort_by_key(|&e| {
            let t = triples[e];
            (inst.university_rank(u, t.student), inst.student_rank(t.student, t.program))
        });
    }
    for p in 0..np {
        prefs[ns + nu + p].sort_by_key(|&e| inst.program_rank(p, triples[e].student));
    }

    let instance = HypergraphInstance::from_parts(n, edges, capacities, prefs, inst.weights().map(<[i64]>::to_vec))
        .expect("a valid dual-admission instance reduces to a valid hypergraph");
    let mut roles = vec![Role::Student; ns];
    roles.extend(std::iter::repeat_n(Role::University, nu));
    roles.extend(std::iter::repeat_n(Role::Program, np));
    let mut program_university = vec![None; n];
    for p in 0..np {
        program_university[ns + nu + p] = Some(ns + inst.university_of(p));
    }
    ReducedUda {
        instance,
        partition: UdaPartition { roles, program_university },
        triples,
        n_students: ns,
        n_universities: nu,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uda::cycling_instance;

    #[test]
    fn cycling_instance_shape() {
        let inst = cycling_instance();
        let r = reduce_to_shbm(&inst);
        assert_eq!(r.instance.n_vertices(), 10);
        assert_eq!(r.instance.n_edges(), 6);
        assert!(r.instance.edges().iter().all(|e| e.len() == 3));
        // the university with two students at two programs of its own
        let s3 = inst.student_named("s3").unwrap();
        let p11 = inst.program_named("p11").unwrap();
        let u1 = r.university_vertex(inst.university_named("u1").unwrap());
        let s3_edges: Vec<EdgeId> = r.instance.preference(s3).to_vec();
        assert_eq!(r.triples[s3_edges[0]].program, p11);
        let ranked: Vec<&str> =
            r.instance.preference(u1).iter().map(|&e| inst.student_name(r.triples[e].student)).collect();
        assert_eq!(ranked, ["s4", "s3", "s2", "s1"]);
    }

    #[test]
    fn assignment_round_trip() {
        let inst = cycling_instance();
        let r = reduce_to_shbm(&inst);
        let mu = Assignment(vec![None, Some(1), Some(3), Some(2)]);
        assert_eq!(r.to_assignment(&r.to_matching(&mu).unwrap()), mu);
    }
}
