//! Extreme (0/1) stochastic matrices viewed as functions on states.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::StochasticMatrix;
use crate::error::{Error, Result};

/// Enumeration guard: `8^8 = 16,777,216` matrices.
pub const MAX_ENUMERATION_DIM: usize = 8;

/// Iterates all `d^d` extreme matrices. Column images form a base-`d`
/// counter with column 0 as the least significant digit.
pub struct ExtremeIter {
    images: Vec<usize>,
    done: bool,
}

impl Iterator for ExtremeIter {
    type Item = StochasticMatrix;

    fn next(&mut self) -> Option<StochasticMatrix> {
        if self.done {
            return None;
        }
        let out = StochasticMatrix::from_images(&self.images).expect("images in range");
        let d = self.images.len();
        let mut k = 0;
        loop {
            if k == d {
                self.done = true;
                break;
            }
            self.images[k] += 1;
            if self.images[k] < d {
                break;
            }
            self.images[k] = 0;
            k += 1;
        }
        Some(out)
    }
}

pub fn enumerate_extreme(d: usize) -> Result<ExtremeIter> {
    if d == 0 {
        return Err(Error::Validation("dimension must be at least 1".into()));
    }
    if d > MAX_ENUMERATION_DIM {
        return Err(Error::Resource(format!(
            "enumerating {d}^{d} extreme matrices exceeds the d ≤ {MAX_ENUMERATION_DIM} guard"
        )));
    }
    Ok(ExtremeIter {
        images: vec![0; d],
        done: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremeVerdict {
    Embeddable,
    NotEmbeddable,
}

/// A tail of length `k ≥ 2`: `path[0] → path[1] → … → path[k] = core_entry`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub core_entry: usize,
    pub path: Vec<usize>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExtremeClassification {
    pub is_extreme: bool,
    /// `images[j]` is the state column `j` is sent to.
    pub images: Vec<usize>,
    /// States lying on cycles of the functional graph.
    pub core: Vec<usize>,
    /// Non-core state to its image.
    pub tails: BTreeMap<usize, usize>,
    pub verdict: ExtremeVerdict,
    pub obstruction: Option<Obstruction>,
}

/// Functional-graph classification: embeddable iff every off-cycle state is
/// sent straight onto a cycle.
pub fn classify_extreme(t: &StochasticMatrix) -> Result<ExtremeClassification> {
    if !t.is_extreme() {
        return Err(Error::Contract("classify_extreme needs a 0/1 matrix".into()));
    }
    let images = t
        .images()
        .ok_or_else(|| Error::Contract("extreme matrix without unit entry".into()))?;
    let d = images.len();
    let on_cycle: Vec<bool> = (0..d)
        .map(|j| {
            let mut x = images[j];
            for _ in 0..d {
                if x == j {
                    return true;
                }
                x = images[x];
            }
            false
        })
        .collect();
    let core: Vec<usize> = (0..d).filter(|&j| on_cycle[j]).collect();
    let tails: BTreeMap<usize, usize> = (0..d)
        .filter(|&j| !on_cycle[j])
        .map(|j| (j, images[j]))
        .collect();

    let obstruction = tails
        .iter()
        .find(|(_, &img)| !on_cycle[img])
        .map(|(&start, _)| {
            let mut path = vec![start];
            let mut x = start;
            while !on_cycle[x] {
                x = images[x];
                path.push(x);
            }
            Obstruction {
                core_entry: x,
                k: path.len() - 1,
                path,
            }
        });
    let verdict = if obstruction.is_some() {
        ExtremeVerdict::NotEmbeddable
    } else {
        ExtremeVerdict::Embeddable
    };
    Ok(ExtremeClassification {
        is_extreme: true,
        images,
        core,
        tails,
        verdict,
        obstruction,
    })
}

/// `n(d) = Σ_{m=1}^{d} C(d, m) · m! · m^{d−m}`, exactly.
pub fn count_quantum_embeddable_extreme(d: usize) -> BigUint {
    let mut total = BigUint::zero();
    for m in 1..=d {
        // C(d, m) · m! = d! / (d − m)!
        let mut falling = BigUint::one();
        for k in (d - m + 1)..=d {
            falling *= k;
        }
        total += falling * BigUint::from(m).pow((d - m) as u32);
    }
    total
}
