//! Structural obstruction to quantum embeddability.
//!
//! `T` is not quantum-embeddable when it permutes a set `I0` among itself,
//! collapses a set `I1 ⊂ I0ᶜ` onto a single `i0 ∈ I0`, and sends some
//! `i ∉ I0 ∪ I1` entirely into `I1`.

use std::collections::BTreeMap;

use serde::Serialize;

use super::StochasticMatrix;
use crate::error::{Error, Result};

/// Search guard for the detector.
pub const MAX_DETECT_DIM: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Theorem2Certificate {
    /// States permuted among themselves.
    #[serde(rename = "I0")]
    pub invariant_set: Vec<usize>,
    #[serde(rename = "permutation_on_I0")]
    pub permutation: BTreeMap<usize, usize>,
    /// Common image of the collapsing set.
    #[serde(rename = "i0")]
    pub anchor: usize,
    #[serde(rename = "I1")]
    pub collapsing_set: Vec<usize>,
    /// State sent entirely into the collapsing set.
    #[serde(rename = "witness_i")]
    pub witness: usize,
}

impl Theorem2Certificate {
    /// Re-checks every defining condition against `t`.
    pub fn verify(&self, t: &StochasticMatrix) -> bool {
        let d = t.dim();
        let in_range = |i: &usize| *i < d;
        if !(self.invariant_set.iter().all(in_range)
            && self.collapsing_set.iter().all(in_range)
            && in_range(&self.anchor)
            && in_range(&self.witness))
        {
            return false;
        }
        let in_i0 = |i: usize| self.invariant_set.contains(&i);
        let in_i1 = |i: usize| self.collapsing_set.contains(&i);
        // T restricted to I0 is a permutation of I0
        let mut images: Vec<usize> = Vec::new();
        for &j in &self.invariant_set {
            match self.permutation.get(&j) {
                Some(&i) if in_i0(i) && t.is_one(i, j) => images.push(i),
                _ => return false,
            }
        }
        images.sort_unstable();
        images.dedup();
        if images.len() != self.invariant_set.len() {
            return false;
        }
        if !in_i0(self.anchor) || self.collapsing_set.is_empty() {
            return false;
        }
        if self
            .collapsing_set
            .iter()
            .any(|&i1| in_i0(i1) || !t.is_one(self.anchor, i1))
        {
            return false;
        }
        if in_i0(self.witness) || in_i1(self.witness) {
            return false;
        }
        let mass: f64 = self
            .collapsing_set
            .iter()
            .map(|&i1| t.get(i1, self.witness))
            .sum();
        (mass - 1.0).abs() <= t.tolerance()
    }
}

/// Searches for a certificate. Invariant sets are the cycles of the partial
/// map defined by deterministic columns; a union of cycles never admits a
/// witness that a single member cycle does not, so single cycles suffice.
pub fn theorem2_detect(t: &StochasticMatrix) -> Result<Option<Theorem2Certificate>> {
    let d = t.dim();
    if d > MAX_DETECT_DIM {
        return Err(Error::Resource(format!(
            "detector limited to d ≤ {MAX_DETECT_DIM}, got {d}"
        )));
    }
    let image: Vec<Option<usize>> = (0..d).map(|j| t.deterministic_image(j)).collect();

    for cycle in deterministic_cycles(&image) {
        let permutation: BTreeMap<usize, usize> =
            cycle.iter().map(|&j| (j, image[j].unwrap())).collect();
        let mut invariant_set = cycle.clone();
        invariant_set.sort_unstable();
        for &anchor in &invariant_set {
            let collapsing_set: Vec<usize> = (0..d)
                .filter(|&j| !invariant_set.contains(&j) && t.is_one(anchor, j))
                .collect();
            if collapsing_set.is_empty() {
                continue;
            }
            let witness = (0..d)
                .filter(|i| !invariant_set.contains(i) && !collapsing_set.contains(i))
                .find(|&i| {
                    let mass: f64 = collapsing_set.iter().map(|&i1| t.get(i1, i)).sum();
                    (mass - 1.0).abs() <= t.tolerance()
                });
            if let Some(witness) = witness {
                return Ok(Some(Theorem2Certificate {
                    invariant_set,
                    permutation,
                    anchor,
                    collapsing_set,
                    witness,
                }));
            }
        }
    }
    Ok(None)
}

/// Cycles of the partial functional graph, ordered by smallest member.
fn deterministic_cycles(image: &[Option<usize>]) -> Vec<Vec<usize>> {
    let d = image.len();
    let mut assigned = vec![false; d];
    let mut cycles = Vec::new();
    for start in 0..d {
        if assigned[start] {
            continue;
        }
        let mut cycle = vec![start];
        let mut x = start;
        let closed = loop {
            match image[x] {
                Some(next) if next == start => break true,
                Some(next) if cycle.len() < d && !cycle.contains(&next) => {
                    cycle.push(next);
                    x = next;
                }
                _ => break false,
            }
        };
        if closed {
            for &c in &cycle {
                assigned[c] = true;
            }
            cycles.push(cycle);
        }
    }
    cycles
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eq8_first_matrix() {
        let t = StochasticMatrix::new(vec![1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], 3)
            .unwrap();
        let c = theorem2_detect(&t).unwrap().unwrap();
        assert_eq!(c.invariant_set, vec![0]);
        assert_eq!(c.anchor, 0);
        assert_eq!(c.collapsing_set, vec![1]);
        assert_eq!(c.witness, 2);
        assert!(c.verify(&t));
    }

    #[test]
    fn d4_family_member() {
        let (p, q) = (0.5, 0.5);
        #[rustfmt::skip]
        let t = StochasticMatrix::new(vec![
            1.0, 1.0, 1.0, 0.0,
            0.0, 0.0, 0.0, p,
            0.0, 0.0, 0.0, q,
            0.0, 0.0, 0.0, 0.0,
        ], 4).unwrap();
        let c = theorem2_detect(&t).unwrap().unwrap();
        assert_eq!(c.invariant_set, vec![0]);
        assert_eq!(c.collapsing_set, vec![1, 2]);
        assert_eq!(c.witness, 3);
        assert!(c.verify(&t));
    }

    #[test]
    fn identity_has_no_certificate() {
        assert!(theorem2_detect(&StochasticMatrix::identity(4))
            .unwrap()
            .is_none());
    }

    #[test]
    fn verify_rejects_tampering() {
        let t = StochasticMatrix::new(vec![1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0], 3)
            .unwrap();
        let mut c = theorem2_detect(&t).unwrap().unwrap();
        c.witness = 1;
        assert!(!c.verify(&t));
        assert!(!c.verify(&StochasticMatrix::identity(3)));
    }

    #[test]
    fn dimension_guard() {
        let t = StochasticMatrix::identity(13);
        assert!(matches!(theorem2_detect(&t), Err(Error::Resource(_))));
    }
}
