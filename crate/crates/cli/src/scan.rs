//! Grid scan of the 2×2 stochastic matrices `[[a, 1−b], [1−a, b]]`.

use std::fs::File;
use std::path::Path;

use embedlab_core::certify::theorem1_test;
use embedlab_core::optimizer::{
    embed_search, Parameterization, SearchOptions, SearchVerdict, DEFAULT_DELTA, DEFAULT_RESTARTS,
};
use embedlab_core::stochastic::{classical_embeddable_2x2, StochasticMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

pub const CSV_HEADER: &str = "a,b,best_objective,verdict,classical,theorem1_blocked,seed";

pub const VERDICT_EMBEDDABLE: &str = "embeddable_at_delta";
pub const VERDICT_INCONCLUSIVE: &str = "inconclusive";
/// Blocked by the small-diagonal certificate and not reached by the search.
pub const VERDICT_NOT_EMBEDDABLE: &str = "not_embeddable";

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOptions {
    pub grid: usize,
    pub delta: f64,
    pub restarts: usize,
    pub seed: u64,
    pub parameterization: Parameterization,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid: 21,
            delta: DEFAULT_DELTA,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            parameterization: Parameterization::ReducedQubit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub a: f64,
    pub b: f64,
    pub best_objective: f64,
    pub verdict: String,
    pub classical: bool,
    pub theorem1_blocked: bool,
    pub seed: u64,
}

impl ScanRow {
    pub fn embeddable(&self) -> bool {
        self.verdict == VERDICT_EMBEDDABLE
    }
}

/// Seed for cell `index`, mixed so that neighbouring cells and seeds
/// give unrelated streams.
pub fn cell_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Grid coordinate `i/(n−1)`.
pub fn grid_value(i: usize, n: usize) -> f64 {
    i as f64 / (n - 1) as f64
}

pub fn scan_cell(a: f64, b: f64, seed: u64, opts: &ScanOptions) -> Result<ScanRow, CliError> {
    let t = StochasticMatrix::two_by_two(a, b)?;
    let classical = classical_embeddable_2x2(&t)?.is_some();
    let blocked = theorem1_test(&t)?.in_q2_complement;
    let search = embed_search(
        &t,
        opts.parameterization,
        &SearchOptions::new(opts.restarts, opts.delta, seed),
    )?;
    let verdict = match search.verdict {
        SearchVerdict::EmbeddableAtDelta => VERDICT_EMBEDDABLE,
        SearchVerdict::Inconclusive if blocked => VERDICT_NOT_EMBEDDABLE,
        SearchVerdict::Inconclusive => VERDICT_INCONCLUSIVE,
    };
    Ok(ScanRow {
        a,
        b,
        best_objective: search.best_objective,
        verdict: verdict.into(),
        classical,
        theorem1_blocked: blocked,
        seed,
    })
}

/// Evaluates all `N²` cells concurrently; rows come back with `a` as the
/// outer and `b` as the inner index.
pub fn scan(opts: &ScanOptions) -> Result<Vec<ScanRow>, CliError> {
    let n = opts.grid;
    if n < 2 {
        return Err(CliError::Parse(format!("grid must have at least 2 points, got {n}")));
    }
    if opts.parameterization.dim() != 2 {
        return Err(CliError::Parse(format!(
            "scan needs a qubit parameterization, got {}",
            opts.parameterization.name()
        )));
    }
    (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            scan_cell(grid_value(i, n), grid_value(j, n), cell_seed(opts.seed, k), opts)
        })
        .collect()
}

pub fn write_rows<W: std::io::Write>(rows: &[ScanRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv(rows: &[ScanRow]) -> String {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

pub fn write_csv(rows: &[ScanRow], path: &Path) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    write_rows(rows, file).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => io(source),
        other => CliError::Parse(format!("{other:?}")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_differ_per_cell() {
        let seeds: Vec<u64> = (0..100).map(|k| cell_seed(7, k)).collect();
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), seeds.len());
        assert_ne!(cell_seed(7, 0), cell_seed(8, 0));
    }

    #[test]
    fn header_is_exact() {
        let csv = to_csv(&[]);
        assert_eq!(csv, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn small_grid_order_and_flags() {
        let opts = ScanOptions {
            grid: 2,
            restarts: 4,
            seed: 1,
            ..ScanOptions::default()
        };
        let rows = scan(&opts).unwrap();
        let coords: Vec<(f64, f64)> = rows.iter().map(|r| (r.a, r.b)).collect();
        assert_eq!(coords, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
        assert!(!rows[0].classical && rows[3].classical);
        assert!(rows.iter().all(|r| !r.theorem1_blocked));
        let text = to_csv(&rows);
        assert!(text.lines().nth(4).unwrap().starts_with("1.0,1.0,"));
    }

    #[test]
    fn rejects_degenerate_grid() {
        let opts = ScanOptions {
            grid: 1,
            ..ScanOptions::default()
        };
        assert!(scan(&opts).is_err());
    }
}
