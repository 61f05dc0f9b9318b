//! JSON instance and matching files.
//!
//! Instance file fields: `n_vertices`, `edges`, optional `capacities`
//! (default 1), optional `preferences` (derived from `preference_seed` by a
//! deterministic shuffle when absent), optional `weights` (default 0),
//! optional `class_hint` and `certificate`.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classes::{CertificateBundle, ClassHint};
use crate::error::Result;
use crate::hypergraph::{BMatching, EdgeId, HypergraphInstance, RawInstance, VertexId};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    n_vertices: usize,
    edges: Vec<Vec<VertexId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    capacities: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preferences: Option<Vec<Vec<EdgeId>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preference_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    class_hint: Option<ClassHint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateBundle>,
}

/// An instance together with its optional class annotations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub instance: HypergraphInstance,
    pub class_hint: Option<ClassHint>,
    pub certificate: CertificateBundle,
}

impl InstanceFile {
    pub fn plain(instance: HypergraphInstance) -> Self {
        InstanceFile { instance, class_hint: None, certificate: CertificateBundle::default() }
    }
}

/// Shuffles each vertex's incident edges with a seeded generator, vertex by vertex.
pub fn seeded_preferences(n_vertices: usize, edges: &[Vec<VertexId>], seed: u64) -> Vec<Vec<EdgeId>> {
    let mut prefs = vec![Vec::new(); n_vertices];
    for (e, verts) in edges.iter().enumerate() {
        for &v in verts {
            if v < n_vertices && prefs[v].last() != Some(&e) {
                prefs[v].push(e);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for list in &mut prefs {
        list.shuffle(&mut rng);
    }
    prefs
}

pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let json: InstanceJson = serde_json::from_str(text)?;
    let capacities = json.capacities.unwrap_or_else(|| vec![1; json.n_vertices]);
    let preferences = match json.preferences {
        Some(p) => p,
        None => seeded_preferences(json.n_vertices, &json.edges, json.preference_seed.unwrap_or(0)),
    };
    let instance = HypergraphInstance::new(RawInstance {
        n_vertices: json.n_vertices,
        edges: json.edges,
        capacities,
        preferences,
        weights: json.weights,
    })?;
    Ok(InstanceFile {
        instance,
        class_hint: json.class_hint,
        certificate: json.certificate.unwrap_or_default(),
    })
}

/// Serializes with every field explicit, so loading reproduces the instance.
pub fn instance_to_json(file: &InstanceFile) -> String {
    let raw = file.instance.raw().clone();
    let json = InstanceJson {
        n_vertices: raw.n_vertices,
        edges: raw.edges,
        capacities: Some(raw.capacities),
        preferences: Some(raw.preferences),
        preference_seed: None,
        weights: raw.weights,
        class_hint: file.class_hint,
        certificate: (!file.certificate.is_empty()).then(|| file.certificate.clone()),
    };
    serde_json::to_string_pretty(&json).expect("instance serializes")
}

pub fn load_instance(path: &Path) -> Result<InstanceFile> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn save_instance(path: &Path, file: &InstanceFile) -> Result<()> {
    std::fs::write(path, instance_to_json(file) + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchingJson {
    pub edges: Vec<EdgeId>,
}

pub fn parse_matching(inst: &HypergraphInstance, text: &str) -> Result<BMatching> {
    let json: MatchingJson = serde_json::from_str(text)?;
    BMatching::from_edges(inst, &json.edges)
}

pub fn matching_to_json(m: &BMatching) -> String {
    serde_json::to_string(&MatchingJson { edges: m.edges() }).expect("matching serializes")
}

pub fn load_matching(inst: &HypergraphInstance, path: &Path) -> Result<BMatching> {
    parse_matching(inst, &std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn defaults_fill_missing_fields() {
        let f = parse_instance(r#"{"n_vertices":2,"edges":[[0,1],[1]],"preference_seed":7}"#).unwrap();
        assert_eq!(f.instance.capacities(), &[1, 1]);
        assert_eq!(f.instance.weight(0), 0);
        let again = parse_instance(r#"{"n_vertices":2,"edges":[[0,1],[1]],"preference_seed":7}"#).unwrap();
        assert_eq!(f.instance, again.instance);
    }

    #[test]
    fn parse_error_carries_location() {
        let err = parse_instance("{\n  \"n_vertices\": 2,\n  \"edges\": [[0,1]\n}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(parse_instance(r#"{"n_vertices":1,"edges":[],"colour":1}"#).is_err());
    }

    #[test]
    fn invalid_instance_surfaces_report() {
        let err = parse_instance(r#"{"n_vertices":1,"edges":[[3]]}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidInstance(_)));
    }

    #[test]
    fn matching_round_trip() {
        let f = parse_instance(r#"{"n_vertices":3,"edges":[[0,1],[2]]}"#).unwrap();
        let m = parse_matching(&f.instance, r#"{"edges":[1,0]}"#).unwrap();
        assert_eq!(matching_to_json(&m), r#"{"edges":[0,1]}"#);
    }
}
