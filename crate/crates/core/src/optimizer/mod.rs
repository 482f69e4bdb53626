//! Numerical embeddability search: minimize the largest entry-wise mismatch
//! between a target and the classical action of `e^{𝓛t}` over
//! parameterized generators, with seeded multistart Nelder–Mead.

mod nelder_mead;
mod search;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{build_generator, channel_from_generator, classical_action_entries, Lindbladian};
use crate::matcore::{pauli, ComplexMatrix, ExpmWorkspace, C64};
use crate::stochastic::StochasticMatrix;

pub use nelder_mead::{nelder_mead, NelderMeadOptions, NelderMeadResult, StopReason};
pub use search::{embed_search, SearchOptions, SearchResult, SearchVerdict, DEFAULT_DELTA, DEFAULT_RESTARTS};

/// Generator families searched over. Positive quantities (`γ`, `t`) are
/// stored as their logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// `H = [[cos h, sin h], [sin h, cos h]]`, dissipator with Choi matrix
    /// `GG†` for a complex 4×4 `G`, and `ln t`. 34 reals.
    GeneralQubit,
    /// `H = σ_x` and one jump `√γ |ψ_o⟩⟨ψ_i|` with
    /// `ψ = (cos θ, i sin θ)`: `(α, β, ln γ, ln t)`.
    ReducedQubit,
    /// Hermitian `H` (`d²` reals), complex `d²×d²` Choi factor `G`, `ln t`.
    GeneralD(usize),
}

impl Parameterization {
    /// General family for dimension `d`, using the qubit layout for `d = 2`.
    pub fn general_for(d: usize) -> Self {
        if d == 2 {
            Self::GeneralQubit
        } else {
            Self::GeneralD(d)
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Self::GeneralQubit | Self::ReducedQubit => 2,
            Self::GeneralD(d) => d,
        }
    }

    pub fn param_count(&self) -> usize {
        match *self {
            Self::GeneralQubit => 34,
            Self::ReducedQubit => 4,
            Self::GeneralD(d) => d * d + 2 * d.pow(4) + 1,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Self::GeneralQubit => "general_qubit".into(),
            Self::ReducedQubit => "reduced_qubit".into(),
            Self::GeneralD(d) => format!("general_d{d}"),
        }
    }

    /// `(α, β, γ, t)` in natural units to a raw parameter vector.
    pub fn reduced_params(alpha: f64, beta: f64, gamma: f64, t: f64) -> Vec<f64> {
        vec![alpha, beta, gamma.ln(), t.ln()]
    }

    /// `(h, G, t)` to a raw general-qubit vector; `G` is 4×4.
    pub fn general_qubit_params(h: f64, g: &ComplexMatrix, t: f64) -> Vec<f64> {
        let mut p = vec![h];
        for z in g.data() {
            p.push(z.re);
            p.push(z.im);
        }
        p.push(t.ln());
        p
    }
}

/// Dissipator from a Choi factor: column `k` of `G`, reshaped row-wise,
/// is a Kraus operator.
fn kraus_from_choi_factor(d: usize, g: &[f64]) -> Vec<ComplexMatrix> {
    let n = d * d;
    (0..n)
        .map(|k| {
            ComplexMatrix::from_fn(d, d, |a, i| {
                let row = a * d + i;
                let at = 2 * (row * n + k);
                C64::new(g[at], g[at + 1])
            })
        })
        .collect()
}

fn hermitian_from_reals(d: usize, p: &[f64]) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(d, d);
    let mut it = p.iter().copied();
    for i in 0..d {
        h[(i, i)] = C64::new(it.next().unwrap_or(0.0), 0.0);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(it.next().unwrap_or(0.0), it.next().unwrap_or(0.0));
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
        }
    }
    h
}

/// Maps a raw parameter vector to a generator and an evolution time.
pub fn decode(params: &[f64], p: Parameterization) -> Result<(Lindbladian, f64)> {
    if params.len() != p.param_count() {
        return Err(Error::Contract(format!(
            "{} expects {} parameters, got {}",
            p.name(),
            p.param_count(),
            params.len()
        )));
    }
    if params.iter().any(|x| x.is_nan()) {
        return Err(Error::Contract("parameters contain NaN".into()));
    }
    let t = params[params.len() - 1].exp();
    let l = match p {
        Parameterization::GeneralQubit => {
            let (c, s) = (params[0].cos(), params[0].sin());
            let h = ComplexMatrix::from_real(2, 2, &[c, s, s, c])?;
            Lindbladian::new(h, kraus_from_choi_factor(2, &params[1..33]))?
        }
        Parameterization::ReducedQubit => {
            let (alpha, beta) = (params[0], params[1]);
            let amp = (0.5 * params[2]).exp();
            let out = [C64::new(alpha.cos(), 0.0), C64::new(0.0, alpha.sin())];
            let inp = [C64::new(beta.cos(), 0.0), C64::new(0.0, beta.sin())];
            let a = ComplexMatrix::outer(&out, &inp).scale_real(amp);
            Lindbladian::new(pauli::x(), vec![a])?
        }
        Parameterization::GeneralD(d) => {
            let h = hermitian_from_reals(d, &params[..d * d]);
            let g = &params[d * d..d * d + 2 * d.pow(4)];
            Lindbladian::new(h, kraus_from_choi_factor(d, g))?
        }
    };
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("decoded time {t} is not positive")));
    }
    Ok((l, t))
}

/// Buffers for evaluating classical actions of decoded parameters without
/// building intermediate operators. Results agree with
/// `decode` → `build_generator` → `channel_from_generator` to rounding.
#[derive(Debug, Clone)]
pub struct ActionEvaluator {
    p: Parameterization,
    hamiltonian: Vec<C64>,
    choi: Vec<C64>,
    weight: Vec<C64>,
    generator: Vec<C64>,
    expm: ExpmWorkspace,
}

impl ActionEvaluator {
    pub fn new(p: Parameterization) -> Self {
        let d = p.dim();
        let n = d * d;
        Self {
            p,
            hamiltonian: vec![C64::new(0.0, 0.0); n],
            choi: vec![C64::new(0.0, 0.0); n * n],
            weight: vec![C64::new(0.0, 0.0); n],
            generator: vec![C64::new(0.0, 0.0); n * n],
            expm: ExpmWorkspace::new(n),
        }
    }

    fn choi_from_factor(&mut self, g: &[f64]) {
        let n = self.p.dim().pow(2);
        let at = |r: usize, k: usize| C64::new(g[2 * (r * n + k)], g[2 * (r * n + k) + 1]);
        for r in 0..n {
            for c in r..n {
                let v: C64 = (0..n).map(|k| at(r, k) * at(c, k).conj()).sum();
                self.choi[r * n + c] = v;
                self.choi[c * n + r] = v.conj();
            }
        }
    }

    /// Writes the row-major classical action into `out`.
    pub fn action_into(&mut self, params: &[f64], out: &mut [f64]) -> Result<()> {
        let p = self.p;
        let d = p.dim();
        let n = d * d;
        if params.len() != p.param_count() || out.len() != n {
            return Err(Error::Contract(format!(
                "{} expects {} parameters, got {}",
                p.name(),
                p.param_count(),
                params.len()
            )));
        }
        let t = params[params.len() - 1].exp();
        if !(t.is_finite() && t > 0.0) || params.iter().any(|x| x.is_nan()) {
            return Err(Error::Domain("parameters do not decode to a finite generator".into()));
        }
        match p {
            Parameterization::GeneralQubit => {
                let (c, s) = (params[0].cos(), params[0].sin());
                for (h, v) in self.hamiltonian.iter_mut().zip([c, s, s, c]) {
                    *h = C64::new(v, 0.0);
                }
                self.choi_from_factor(&params[1..33]);
            }
            Parameterization::ReducedQubit => {
                for (h, v) in self.hamiltonian.iter_mut().zip([0.0, 1.0, 1.0, 0.0]) {
                    *h = C64::new(v, 0.0);
                }
                let (alpha, beta) = (params[0], params[1]);
                let amp = (0.5 * params[2]).exp();
                let out_state = [C64::new(alpha.cos(), 0.0), C64::new(0.0, alpha.sin())];
                let in_state = [C64::new(beta.cos(), 0.0), C64::new(0.0, beta.sin())];
                // Row-wise vec of √γ |ψ_o⟩⟨ψ_i|.
                let mut a = [C64::new(0.0, 0.0); 4];
                for r in 0..2 {
                    for c in 0..2 {
                        a[r * 2 + c] = out_state[r] * in_state[c].conj() * amp;
                    }
                }
                for r in 0..4 {
                    for c in 0..4 {
                        self.choi[r * 4 + c] = a[r] * a[c].conj();
                    }
                }
            }
            Parameterization::GeneralD(_) => {
                let h = hermitian_from_reals(d, &params[..n]);
                self.hamiltonian.copy_from_slice(h.data());
                self.choi_from_factor(&params[n..n + 2 * n * n]);
            }
        }
        // Φ*(𝟙)_ij = Σ_a J_{(a,j),(a,i)}
        for i in 0..d {
            for j in 0..d {
                self.weight[i * d + j] = (0..d).map(|a| self.choi[(a * d + j) * n + a * d + i]).sum();
            }
        }
        let (h, w, jm) = (&self.hamiltonian, &self.weight, &self.choi);
        let minus_i = C64::new(0.0, -1.0);
        for a in 0..d {
            for b in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut v = jm[(a * d + i) * n + b * d + j];
                        if b == j {
                            v += minus_i * h[a * d + i] - w[a * d + i] * 0.5;
                        }
                        if a == i {
                            v += -minus_i * h[j * d + b] - w[j * d + b] * 0.5;
                        }
                        self.generator[(a * d + b) * n + i * d + j] = v * t;
                    }
                }
            }
        }
        self.expm.expm_in_place(&mut self.generator);
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = self.generator[(i * d + i) * n + j * d + j].re;
            }
        }
        Ok(())
    }

    /// `max_ij |T_ij − action_ij|`; `NaN` propagates.
    pub fn objective(&mut self, target: &StochasticMatrix, params: &[f64]) -> Result<f64> {
        let d = self.p.dim();
        if target.dim() != d {
            return Err(Error::Dimension(format!(
                "target of dimension {} for {}",
                target.dim(),
                self.p.name()
            )));
        }
        let mut action = vec![0.0; d * d];
        self.action_into(params, &mut action)?;
        Ok(target
            .entries()
            .iter()
            .zip(&action)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) }))
    }
}

/// Classical action of `e^{𝓛t}` for decoded parameters, row-major.
pub fn decoded_action(params: &[f64], p: Parameterization) -> Result<Vec<f64>> {
    let (l, t) = decode(params, p)?;
    let ch = channel_from_generator(&build_generator(&l), t)?;
    Ok(classical_action_entries(&ch))
}

/// `max_ij |T_ij − ⟨i|e^{𝓛t}(|j⟩⟨j|)|i⟩|`
pub fn objective(target: &StochasticMatrix, params: &[f64], p: Parameterization) -> Result<f64> {
    ActionEvaluator::new(p).objective(target, params)
}
