//! Lindblad generator on the truncated basis and its time evolution.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::closure::OperatorFactor;
use crate::error::OracleError;
use crate::model::{Mode, SystemParams, Tolerances};
use crate::ode::{DormandPrince, IntegrationStats};

use super::fock::{DensityMatrix, FockBasisSpec, SparseOp};

/// Positivity floor enforced on every evolved sample.
pub const EVOLUTION_POSITIVITY_SHIFT: f64 = 1e-6;

type Word = Vec<OperatorFactor>;

/// ρ ↦ −i(H_eff ρ − ρ H_eff†) + Σ_k L_k ρ L_k†, with
/// H_eff = H − (i/2) Σ_k L_k†L_k.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    pub basis: FockBasisSpec,
    h_eff: SparseOp,
    h_eff_dag: SparseOp,
    jumps: Vec<SparseOp>,
}

fn word(factors: &[OperatorFactor]) -> Word {
    factors.to_vec()
}

fn hamiltonian_terms(p: &SystemParams) -> Vec<(Complex64, Word)> {
    use OperatorFactor as F;
    let r = |x: f64| Complex64::new(x, 0.0);
    let mut terms = Vec::new();
    for m in Mode::ALL {
        terms.push((r(p.detuning(m)), word(&[F::cre(m), F::ann(m)])));
    }
    for (g, m) in [(p.g_a, Mode::A), (p.g_b, Mode::B)] {
        terms.push((r(g), word(&[F::ann(Mode::C), F::cre(m)])));
        terms.push((r(g), word(&[F::cre(Mode::C), F::ann(m)])));
    }
    terms.push((r(p.chi), word(&[F::cre(Mode::A)])));
    terms.push((r(p.chi), word(&[F::ann(Mode::A)])));
    terms
}

/// Jump operators as (rate, operator) with nonzero rate only.
fn jump_terms(p: &SystemParams) -> Vec<(f64, OperatorFactor)> {
    let mut jumps = Vec::new();
    for m in Mode::ALL {
        let gamma = p.decay(m);
        let n = p.bath_occupation(m);
        let loss = gamma * (n + 1.0);
        let gain = gamma * n;
        if loss != 0.0 {
            jumps.push((loss, OperatorFactor::ann(m)));
        }
        if gain != 0.0 {
            jumps.push((gain, OperatorFactor::cre(m)));
        }
    }
    jumps
}

pub fn build_generator(
    p: &SystemParams,
    basis: &FockBasisSpec,
) -> Result<Liouvillian, OracleError> {
    basis.validate()?;
    let mut terms = hamiltonian_terms(p);
    let mut terms_dag = terms.clone();
    let mut jumps = Vec::new();
    for (rate, f) in jump_terms(p) {
        let ldl = word(&[f.dagger(), f]);
        terms.push((Complex64::new(0.0, -0.5 * rate), ldl.clone()));
        terms_dag.push((Complex64::new(0.0, 0.5 * rate), ldl));
        jumps.push(SparseOp::from_words(
            basis,
            &[(Complex64::new(rate.sqrt(), 0.0), vec![f])],
        ));
    }
    Ok(Liouvillian {
        basis: *basis,
        h_eff: SparseOp::from_words(basis, &terms),
        h_eff_dag: SparseOp::from_words(basis, &terms_dag),
        jumps,
    })
}

impl Liouvillian {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Writes L(ρ) into `out`; both are row-major dim × dim.
    pub fn apply_into(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        assert_eq!(rho.len(), n * n);
        assert_eq!(out.len(), n * n);
        let minus_i = Complex64::new(0.0, -1.0);
        let plus_i = Complex64::new(0.0, 1.0);
        out.par_chunks_mut(n).enumerate().for_each(|(i, row)| {
            row.iter_mut().for_each(|z| *z = Complex64::default());
            for (k, h) in self.h_eff.row(i) {
                let coeff = minus_i * h;
                let src = &rho[k * n..(k + 1) * n];
                for (o, &r) in row.iter_mut().zip(src) {
                    *o += coeff * r;
                }
            }
            // (ρ H_eff†)[i, :] = Σ_k ρ[i, k] H_eff†[k, :]
            let rho_row = &rho[i * n..(i + 1) * n];
            for (k, &r) in rho_row.iter().enumerate() {
                if r == Complex64::default() {
                    continue;
                }
                let coeff = plus_i * r;
                for (j, h) in self.h_eff_dag.row(k) {
                    row[j] += coeff * h;
                }
            }
            // (L ρ L†)[i, j] = Σ_{k,l} L[i,k] ρ[k,l] conj(L[j,l])
            for l_op in &self.jumps {
                for (k, lik) in l_op.row(i) {
                    let src = &rho[k * n..(k + 1) * n];
                    for (j, o) in row.iter_mut().enumerate() {
                        for (l, ljl) in l_op.row(j) {
                            *o += lik * src[l] * ljl.conj();
                        }
                    }
                }
            }
        });
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let mut out = vec![Complex64::default(); rho.data.len()];
        self.apply_into(&rho.data, &mut out);
        DensityMatrix {
            dim: rho.dim,
            data: out,
        }
    }
}

/// Evolves `rho0` to each time in `times` (starting at `times[0]`), calling
/// `observe(index, t, ρ(t))` at every sample. Each sample is checked for
/// positivity within [`EVOLUTION_POSITIVITY_SHIFT`].
pub fn evolve_observed<O>(
    rho0: &DensityMatrix,
    generator: &Liouvillian,
    times: &[f64],
    tolerances: Tolerances,
    mut observe: O,
) -> Result<IntegrationStats, OracleError>
where
    O: FnMut(usize, f64, &DensityMatrix),
{
    rho0.validate()?;
    if rho0.dim != generator.dim() {
        return Err(OracleError::InvalidDensity(format!(
            "density matrix dimension {} does not match generator dimension {}",
            rho0.dim,
            generator.dim()
        )));
    }
    let mut failure: Option<OracleError> = None;
    let mut scratch = DensityMatrix {
        dim: rho0.dim,
        data: Vec::new(),
    };
    let stats = DormandPrince::new(tolerances).integrate(
        |y, dy| generator.apply_into(y, dy),
        &rho0.data,
        times,
        |idx, t, y| {
            if failure.is_some() {
                return;
            }
            scratch.data.clear();
            scratch.data.extend_from_slice(y);
            if !scratch.is_positive_within(EVOLUTION_POSITIVITY_SHIFT) {
                failure = Some(OracleError::PositivityViolation {
                    shift: EVOLUTION_POSITIVITY_SHIFT,
                });
                return;
            }
            observe(idx, t, &scratch);
        },
    )?;
    match failure {
        Some(e) => Err(e),
        None => Ok(stats),
    }
}

/// ρ(t) for a single target time.
pub fn evolve(
    rho0: &DensityMatrix,
    generator: &Liouvillian,
    t: f64,
    tolerances: Tolerances,
) -> Result<DensityMatrix, OracleError> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(OracleError::Model(
            crate::error::ModelError::InvalidArgument(format!(
                "evolution time must be finite and ≥ 0, got {t}"
            )),
        ));
    }
    if t == 0.0 {
        rho0.validate()?;
        return Ok(rho0.clone());
    }
    let mut last = None;
    evolve_observed(rho0, generator, &[0.0, t], tolerances, |idx, _, rho| {
        if idx == 1 {
            last = Some(rho.clone());
        }
    })?;
    Ok(last.expect("final sample observed"))
}
