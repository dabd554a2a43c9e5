//! Measurement frames and rigid selections.
//!
//! A frame records only which vectors form which orthonormal bases. A rigid
//! selection marks one vector in every basis such that a vector marked in
//! one basis is marked in all bases containing it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Bases of vector ids; purely combinatorial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementFrame {
    pub bases: Vec<Vec<String>>,
}

/// The 18 vectors of ℂ⁴ and 9 bases of Cabello, Estebaranz and
/// García-Alcaine, with each vector written by its coordinates.
pub const CABELLO_BASES: [[&str; 4]; 9] = [
    ["0001", "0010", "1100", "1-100"],
    ["0001", "0100", "1010", "10-10"],
    ["1-11-1", "1-1-11", "1100", "0011"],
    ["1-11-1", "1111", "10-10", "010-1"],
    ["0010", "0100", "1001", "100-1"],
    ["1-1-11", "1111", "100-1", "01-10"],
    ["11-11", "111-1", "1-100", "0011"],
    ["11-11", "-1111", "1010", "010-1"],
    ["111-1", "-1111", "1001", "01-10"],
];

pub fn cabello_frame() -> MeasurementFrame {
    MeasurementFrame::new(CABELLO_BASES.iter().map(|b| b.iter().map(|s| s.to_string()).collect()).collect())
        .expect("embedded frame is valid")
}

impl MeasurementFrame {
    pub fn new(bases: Vec<Vec<String>>) -> Result<Self, Error> {
        if bases.is_empty() {
            return Err(Error::Frame("a frame needs at least one basis".into()));
        }
        let dim = bases[0].len();
        for (k, b) in bases.iter().enumerate() {
            if b.is_empty() {
                return Err(Error::Frame(format!("basis {k} is empty")));
            }
            if b.len() != dim {
                return Err(Error::Frame(format!("basis {k} has {} vectors, basis 0 has {dim}", b.len())));
            }
            for (i, v) in b.iter().enumerate() {
                if b[..i].contains(v) {
                    return Err(Error::Frame(format!("basis {k} lists {v:?} twice")));
                }
            }
        }
        Ok(Self { bases })
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let raw: MeasurementFrame = serde_json::from_str(text).map_err(|e| Error::Frame(e.to_string()))?;
        Self::new(raw.bases)
    }

    /// Distinct ids in order of first appearance.
    pub fn vector_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for b in &self.bases {
            for v in b {
                if !ids.contains(&v.as_str()) {
                    ids.push(v);
                }
            }
        }
        ids
    }

    /// Number of bases containing each id.
    pub fn degrees(&self) -> BTreeMap<&str, usize> {
        let mut deg = BTreeMap::new();
        for b in &self.bases {
            for v in b {
                *deg.entry(v.as_str()).or_insert(0) += 1;
            }
        }
        deg
    }

    /// Whether `chosen[k]` (an index into basis `k`) is a rigid selection.
    pub fn is_rigid(&self, chosen: &[usize]) -> bool {
        if chosen.len() != self.bases.len() || chosen.iter().zip(&self.bases).any(|(&c, b)| c >= b.len()) {
            return false;
        }
        let marked: Vec<&str> = chosen.iter().zip(&self.bases).map(|(&c, b)| b[c].as_str()).collect();
        self.bases.iter().all(|b| b.iter().filter(|v| marked.contains(&v.as_str())).count() == 1)
    }
}

/// One marked vector per basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// `chosen[k]` is the marked vector of basis `k`.
    pub chosen: Vec<String>,
}

/// Depth-first search for a rigid selection.
///
/// Each vector is either marked or unmarked. Bases are visited in order of
/// descending total degree of their vectors; after each decision, any basis
/// left with a single undecided vector and no marked one forces that vector
/// (unit propagation), and a basis with two marks or none left fails.
pub fn rigid_selection_search(frame: &MeasurementFrame) -> Option<Selection> {
    let ids = frame.vector_ids();
    let index = |v: &str| ids.iter().position(|w| *w == v).expect("id listed");
    let bases: Vec<Vec<usize>> = frame.bases.iter().map(|b| b.iter().map(|v| index(v)).collect()).collect();
    let deg = frame.degrees();
    let mut order: Vec<usize> = (0..bases.len()).collect();
    let weight = |k: usize| -> usize { frame.bases[k].iter().map(|v| deg[v.as_str()]).sum() };
    order.sort_by_key(|&k| std::cmp::Reverse(weight(k)));
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
    for (k, b) in bases.iter().enumerate() {
        for &v in b {
            containing[v].push(k);
        }
    }
    let mut state: Vec<Option<bool>> = vec![None; ids.len()];
    if !search(&bases, &containing, &order, &mut state) {
        return None;
    }
    let chosen = bases
        .iter()
        .map(|b| {
            let v = b.iter().copied().find(|&v| state[v] == Some(true)).expect("complete selection");
            ids[v].to_string()
        })
        .collect();
    Some(Selection { chosen })
}

fn assign(v: usize, val: bool, state: &mut [Option<bool>], trail: &mut Vec<usize>) {
    state[v] = Some(val);
    trail.push(v);
}

/// Applies forced assignments until a fixed point; false on contradiction.
fn propagate(bases: &[Vec<usize>], containing: &[Vec<usize>], state: &mut [Option<bool>], trail: &mut Vec<usize>) -> bool {
    let mut queue: Vec<usize> = trail.clone();
    while let Some(v) = queue.pop() {
        for &k in &containing[v] {
            let b = &bases[k];
            let marked = b.iter().filter(|&&u| state[u] == Some(true)).count();
            let open: Vec<usize> = b.iter().copied().filter(|&u| state[u].is_none()).collect();
            if marked > 1 || (marked == 0 && open.is_empty()) {
                return false;
            }
            if marked == 1 {
                for u in open {
                    assign(u, false, state, trail);
                    queue.push(u);
                }
            } else if open.len() == 1 {
                assign(open[0], true, state, trail);
                queue.push(open[0]);
            }
        }
    }
    true
}

fn search(bases: &[Vec<usize>], containing: &[Vec<usize>], order: &[usize], state: &mut Vec<Option<bool>>) -> bool {
    let Some(&k) = order.iter().find(|&&k| !bases[k].iter().any(|&u| state[u] == Some(true))) else {
        return true;
    };
    let candidates: Vec<usize> = bases[k].iter().copied().filter(|&u| state[u].is_none()).collect();
    for v in candidates {
        let mut trail = Vec::new();
        assign(v, true, state, &mut trail);
        if propagate(bases, containing, state, &mut trail) && search(bases, containing, order, state) {
            return true;
        }
        for u in trail {
            state[u] = None;
        }
    }
    false
}

/// Double counting: if every vector lies in exactly two bases, a rigid
/// selection marks each chosen vector in two bases, so the number of bases
/// is twice the number of marked vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityWitness {
    pub bases: usize,
    pub vectors: usize,
}

pub fn parity_obstruction(frame: &MeasurementFrame) -> Option<ParityWitness> {
    let deg = frame.degrees();
    if deg.values().all(|&d| d == 2) && frame.bases.len() % 2 == 1 {
        Some(ParityWitness { bases: frame.bases.len(), vectors: deg.len() })
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(bases: &[&[&str]]) -> MeasurementFrame {
        MeasurementFrame::new(bases.iter().map(|b| b.iter().map(|s| s.to_string()).collect()).collect()).unwrap()
    }

    /// Oracle: try every subset of vectors as the marked set.
    fn naive_exists(f: &MeasurementFrame) -> bool {
        let ids = f.vector_ids();
        assert!(ids.len() <= 24);
        let masks: Vec<u32> = f
            .bases
            .iter()
            .map(|b| b.iter().map(|v| 1u32 << ids.iter().position(|w| w == v).unwrap()).fold(0, |a, m| a | m))
            .collect();
        (0u32..1 << ids.len()).any(|chosen| masks.iter().all(|m| (m & chosen).count_ones() == 1))
    }

    #[test]
    fn cabello_structure() {
        let f = cabello_frame();
        assert_eq!(f.bases.len(), 9);
        assert_eq!(f.vector_ids().len(), 18);
        assert!(f.degrees().values().all(|&d| d == 2));
    }

    /// The ids encode coordinates; each basis must be orthogonal.
    #[test]
    fn cabello_bases_are_orthogonal() {
        let parse = |s: &str| -> Vec<i32> {
            let mut out = Vec::new();
            let mut neg = false;
            for c in s.chars() {
                if c == '-' {
                    neg = true;
                } else {
                    let d = c.to_digit(10).unwrap() as i32;
                    out.push(if neg { -d } else { d });
                    neg = false;
                }
            }
            out
        };
        for b in CABELLO_BASES {
            for i in 0..4 {
                for j in i + 1..4 {
                    let (u, v) = (parse(b[i]), parse(b[j]));
                    assert_eq!(u.len(), 4);
                    assert_eq!(u.iter().zip(&v).map(|(a, c)| a * c).sum::<i32>(), 0, "{} vs {}", b[i], b[j]);
                }
            }
        }
    }

    #[test]
    fn cabello_has_no_rigid_selection() {
        let f = cabello_frame();
        assert!(rigid_selection_search(&f).is_none());
        assert_eq!(parity_obstruction(&f), Some(ParityWitness { bases: 9, vectors: 18 }));
        assert!(!naive_exists(&f));
    }

    #[test]
    fn single_basis_picks_first() {
        let f = frame(&[&["a", "b", "c", "d"]]);
        assert_eq!(rigid_selection_search(&f).unwrap().chosen, vec!["a"]);
        assert!(parity_obstruction(&f).is_none());
    }

    #[test]
    fn disjoint_bases_select_independently() {
        let f = frame(&[&["a", "b"], &["c", "d"]]);
        let s = rigid_selection_search(&f).unwrap();
        assert_eq!(s.chosen, vec!["a", "c"]);
    }

    #[test]
    fn shared_vector_frames() {
        let f = frame(&[&["a", "b", "c"], &["a", "d", "e"]]);
        assert!(parity_obstruction(&f).is_none());
        let s = rigid_selection_search(&f).unwrap();
        let idx: Vec<usize> = s.chosen.iter().zip(&f.bases).map(|(c, b)| b.iter().position(|v| v == c).unwrap()).collect();
        assert!(f.is_rigid(&idx));
    }

    #[test]
    fn even_double_cover_is_silent() {
        // Two bases sharing both vectors: each vector in exactly two bases.
        let f = frame(&[&["a", "b"], &["b", "a"]]);
        assert!(parity_obstruction(&f).is_none());
        assert!(rigid_selection_search(&f).is_some());
    }

    #[test]
    fn odd_triangle_is_obstructed() {
        let f = frame(&[&["a", "b"], &["b", "c"], &["c", "a"]]);
        assert!(parity_obstruction(&f).is_some());
        assert!(rigid_selection_search(&f).is_none());
        assert!(!naive_exists(&f));
    }

    #[test]
    fn json_frames() {
        let f = MeasurementFrame::from_json(r#"{"bases": [["v1","v2"],["v2","v3"]]}"#).unwrap();
        assert_eq!(f.bases.len(), 2);
        assert!(MeasurementFrame::from_json(r#"{"bases": [["v1","v1"]]}"#).is_err());
        assert!(MeasurementFrame::from_json(r#"{"bases": [["v1"],["v2","v3"]]}"#).is_err());
        assert!(MeasurementFrame::from_json("[]").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_frame() -> impl Strategy<Value = MeasurementFrame> {
            (1usize..=4, 1usize..=10).prop_flat_map(|(dim, nb)| {
                let pool = (dim + 1).max(dim * 2);
                prop::collection::vec(prop::sample::subsequence((0..pool).collect::<Vec<_>>(), dim).prop_shuffle(), nb).prop_map(|bases| {
                    MeasurementFrame::new(bases.into_iter().map(|b| b.into_iter().map(|v| format!("v{v}")).collect()).collect()).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn search_matches_naive_enumeration(f in arb_frame()) {
                let found = rigid_selection_search(&f);
                prop_assert_eq!(found.is_some(), naive_exists(&f));
                if let Some(s) = found {
                    let idx: Vec<usize> = s.chosen.iter().zip(&f.bases).map(|(c, b)| b.iter().position(|v| v == c).unwrap()).collect();
                    prop_assert!(f.is_rigid(&idx));
                }
                if parity_obstruction(&f).is_some() {
                    prop_assert!(rigid_selection_search(&f).is_none());
                }
            }
        }
    }
}
