//! Stable marriage with ties to dual admission with unit capacities.
//!
//! Women become universities offering one program each, men become
//! students. A woman indifferent between two men becomes a university and
//! program that rank those two students in opposite orders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::uda::{Program, RawUda, UdaInstance, University};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WomanList {
    Strict(Vec<usize>),
    /// Indifferent between exactly these two men.
    Tie([usize; 2]),
}

impl WomanList {
    fn men(&self) -> Vec<usize> {
        match self {
            WomanList::Strict(l) => l.clone(),
            WomanList::Tie(t) => t.to_vec(),
        }
    }
}

/// Men have strict lists over women; women have strict lists or a single tie of two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Smti {
    pub men: Vec<Vec<usize>>,
    pub women: Vec<WomanList>,
}

impl Smti {
    pub fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSmti(m));
        let (nm, nw) = (self.men.len(), self.women.len());
        for (m, list) in self.men.iter().enumerate() {
            for (i, &w) in list.iter().enumerate() {
                if w >= nw || list[..i].contains(&w) {
                    return bad(format!("man {m} lists woman {w} twice or out of range"));
                }
                if !self.women[w].men().contains(&m) {
                    return bad(format!("man {m} lists woman {w}, who does not list him"));
                }
            }
        }
        for (w, list) in self.women.iter().enumerate() {
            if let WomanList::Tie([a, b]) = list {
                if a == b {
                    return bad(format!("woman {w} ties man {a} with himself"));
                }
            }
            let men = list.men();
            for (i, &m) in men.iter().enumerate() {
                if m >= nm || men[..i].contains(&m) {
                    return bad(format!("woman {w} lists man {m} twice or out of range"));
                }
                if !self.men[m].contains(&w) {
                    return bad(format!("woman {w} lists man {m}, who does not list her"));
                }
            }
        }
        Ok(())
    }

    /// Strictly prefers `a` to `b` (`None` = single).
    fn woman_prefers(&self, w: usize, a: usize, b: Option<usize>) -> bool {
        let Some(b) = b else { return true };
        match &self.women[w] {
            WomanList::Tie(_) => false,
            WomanList::Strict(l) => {
                let pos = |x| l.iter().position(|&y| y == x);
                pos(a) < pos(b)
            }
        }
    }

    fn man_prefers(&self, m: usize, a: usize, b: Option<usize>) -> bool {
        let Some(b) = b else { return true };
        let pos = |x| self.men[m].iter().position(|&y| y == x);
        pos(a) < pos(b)
    }
}

/// Is there a weakly stable matching covering everyone? Exhaustive.
pub fn has_complete_stable_matching(smti: &Smti) -> bool {
    let nm = smti.men.len();
    if nm != smti.women.len() {
        return false;
    }
    fn rec(smti: &Smti, m: usize, wife: &mut Vec<Option<usize>>, husband: &mut Vec<Option<usize>>) -> bool {
        if m == smti.men.len() {
            let blocked = (0..smti.men.len()).any(|x| {
                smti.men[x].iter().any(|&w| {
                    wife[x] != Some(w) && smti.man_prefers(x, w, wife[x]) && smti.woman_prefers(w, x, husband[w])
                })
            });
            return !blocked;
        }
        for &w in &smti.men[m] {
            if husband[w].is_none() {
                wife[m] = Some(w);
                husband[w] = Some(m);
                let ok = rec(smti, m + 1, wife, husband);
                wife[m] = None;
                husband[w] = None;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    rec(smti, 0, &mut vec![None; nm], &mut vec![None; nm])
}

/// All capacities one; a complete weakly stable matching exists iff a stable
/// assignment of size equal to the number of men exists.
pub fn gen_uda_from_com_smti(smti: &Smti) -> Result<UdaInstance> {
    smti.check()?;
    let (nm, nw) = (smti.men.len(), smti.women.len());
    let (university_prefs, program_prefs): (Vec<Vec<usize>>, Vec<Vec<usize>>) = smti
        .women
        .iter()
        .map(|list| match list {
            WomanList::Strict(l) => (l.clone(), l.clone()),
            WomanList::Tie([a, b]) => {
                let (k, l) = if a < b { (*a, *b) } else { (*b, *a) };
                (vec![k, l], vec![l, k])
            }
        })
        .unzip();
    UdaInstance::new(RawUda {
        students: (0..nm).map(|m| format!("m{m}")).collect(),
        universities: (0..nw).map(|w| University { name: Some(format!("w{w}")), capacity: 1 }).collect(),
        programs: (0..nw).map(|w| Program { name: Some(format!("p{w}")), university: w, quota: 1 }).collect(),
        student_prefs: smti.men.clone(),
        university_prefs,
        program_prefs,
        weights: None,
    })
}
