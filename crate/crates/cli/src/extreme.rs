//! Counts and listings of extreme (0/1) stochastic matrices.

use embedlab_core::stochastic::{
    classify_extreme, count_quantum_embeddable_extreme, enumerate_extreme, ExtremeVerdict,
    MAX_ENUMERATION_DIM,
};
use embedlab_core::Error as CoreError;
use serde::Serialize;

use crate::CliError;

/// Largest dimension for which every matrix is enumerated and listed.
pub const MAX_LISTING_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ListedMatrix {
    /// `images[j]` is the 1-based state that column `j + 1` maps to.
    pub images: Vec<usize>,
    pub entries_row_major: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremeSummary {
    pub d: usize,
    /// Decimal strings; the counts outgrow `u64` quickly in general.
    pub embeddable: String,
    pub total: String,
    pub non_embeddable_fraction: f64,
    /// Whether the closed-form count was confirmed by enumeration.
    pub enumerated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub non_embeddable: Option<Vec<ListedMatrix>>,
}

pub fn summarize(d: usize, list: bool) -> Result<ExtremeSummary, CliError> {
    if d == 0 {
        return Err(CoreError::Validation("dimension must be at least 1".into()).into());
    }
    if d > MAX_ENUMERATION_DIM {
        return Err(CoreError::Resource(format!(
            "extreme-matrix counts limited to d ≤ {MAX_ENUMERATION_DIM}, got {d}"
        ))
        .into());
    }
    if list && d > MAX_LISTING_DIM {
        return Err(CoreError::Resource(format!(
            "listing limited to d ≤ {MAX_LISTING_DIM} ({d}^{d} matrices requested)"
        ))
        .into());
    }
    let formula = count_quantum_embeddable_extreme(d).to_string();
    let total = (d as u64).pow(d as u32);
    let mut listing = Vec::new();
    let enumerated = d <= MAX_LISTING_DIM;
    if enumerated {
        let mut embeddable = 0u64;
        for t in enumerate_extreme(d)? {
            let c = classify_extreme(&t)?;
            match c.verdict {
                ExtremeVerdict::Embeddable => embeddable += 1,
                ExtremeVerdict::NotEmbeddable if list => listing.push(ListedMatrix {
                    images: c.images.iter().map(|i| i + 1).collect(),
                    entries_row_major: t.entries().to_vec(),
                }),
                ExtremeVerdict::NotEmbeddable => {}
            }
        }
        if embeddable.to_string() != formula {
            return Err(CoreError::Contract(format!(
                "enumeration found {embeddable} embeddable matrices, closed form gives {formula}"
            ))
            .into());
        }
    }
    let n: f64 = formula.parse().expect("decimal count");
    Ok(ExtremeSummary {
        d,
        embeddable: formula,
        total: total.to_string(),
        non_embeddable_fraction: 1.0 - n / total as f64,
        enumerated,
        non_embeddable: list.then_some(listing),
    })
}

pub fn render(s: &ExtremeSummary) -> String {
    let mut out = format!(
        "d = {}\nquantum-embeddable extreme matrices n(d) = {}\ntotal d^d = {}\nnon-embeddable fraction 1 - n(d)/d^d = {:.6}\n",
        s.d, s.embeddable, s.total, s.non_embeddable_fraction
    );
    if let Some(list) = &s.non_embeddable {
        out.push_str(&format!("non-embeddable matrices: {}\n", list.len()));
        for m in list {
            let images: Vec<String> = m.images.iter().map(|i| i.to_string()).collect();
            out.push_str(&format!("images ({})\n", images.join(" ")));
            for row in m.entries_row_major.chunks(s.d) {
                let cells: Vec<String> = row.iter().map(|x| format!("{x}")).collect();
                out.push_str(&format!("  {}\n", cells.join(" ")));
            }
        }
    }
    out
}
