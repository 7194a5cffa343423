//! Truncated three-mode Fock space: basis indexing, sparse ladder-operator
//! words, density matrices and exact expectation values.

use num_complex::Complex64;

use crate::closure::{Correlators, OperatorFactor};
use crate::error::OracleError;
use crate::model::{Mode, Moment, MomentState};

pub const DEFAULT_DIMENSION_CAP: usize = 512;

/// Per-mode truncation: each mode keeps levels `0..=n_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockBasisSpec {
    pub n_max: usize,
    pub cap: usize,
}

impl FockBasisSpec {
    pub fn new(n_max: usize) -> Result<Self, OracleError> {
        Self::with_cap(n_max, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(n_max: usize, cap: usize) -> Result<Self, OracleError> {
        let spec = FockBasisSpec { n_max, cap };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n_max < 1 {
            return Err(OracleError::InvalidBasis("n_max must be ≥ 1".into()));
        }
        let dim = (self.n_max + 1).checked_pow(3).unwrap_or(usize::MAX);
        if dim > self.cap {
            return Err(OracleError::DimensionCap { dim, cap: self.cap });
        }
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        self.levels().pow(3)
    }

    pub fn index(&self, n: [usize; 3]) -> usize {
        let d = self.levels();
        (n[0] * d + n[1]) * d + n[2]
    }

    pub fn occupations(&self, idx: usize) -> [usize; 3] {
        let d = self.levels();
        [idx / (d * d), (idx / d) % d, idx % d]
    }

    /// Applies `word` (rightmost factor first) to basis state `idx`.
    /// Returns the image basis index and amplitude, or `None` when the
    /// result vanishes on the truncated space.
    pub fn apply_word(&self, word: &[OperatorFactor], idx: usize) -> Option<(usize, f64)> {
        let mut n = self.occupations(idx);
        // squared amplitude is an exact integer product
        let mut amp_sq = 1.0;
        for f in word.iter().rev() {
            let k = f.mode.index();
            if f.daggered {
                if n[k] >= self.n_max {
                    return None;
                }
                n[k] += 1;
                amp_sq *= n[k] as f64;
            } else {
                if n[k] == 0 {
                    return None;
                }
                amp_sq *= n[k] as f64;
                n[k] -= 1;
            }
        }
        Some((self.index(n), f64::sqrt(amp_sq)))
    }
}

/// Compressed sparse row matrix over the truncated basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOp {
    pub dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOp {
    /// Σ_k coeff_k · word_k, assembled column by column.
    pub fn from_words(basis: &FockBasisSpec, terms: &[(Complex64, Vec<OperatorFactor>)]) -> Self {
        let dim = basis.dim();
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (coeff, word) in terms {
            if *coeff == Complex64::default() {
                continue;
            }
            for j in 0..dim {
                if let Some((i, amp)) = basis.apply_word(word, j) {
                    rows[i].push((j, coeff * amp));
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|&(j, _)| j);
            let mut last: Option<usize> = None;
            for (j, v) in row {
                if last == Some(j) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(j);
                    vals.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(cols.len());
        }
        SparseOp {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.row(i)
            .find(|&(c, _)| c == j)
            .map(|(_, v)| v)
            .unwrap_or_default()
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); self.dim * self.dim];
        for i in 0..self.dim {
            for (j, v) in self.row(i) {
                out[i * self.dim + j] = v;
            }
        }
        out
    }
}

/// Row-major complex density matrix on the truncated basis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_data(dim: usize, data: Vec<Complex64>) -> Result<Self, OracleError> {
        if data.len() != dim * dim {
            return Err(OracleError::InvalidDensity(format!(
                "expected {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(DensityMatrix { dim, data })
    }

    pub fn vacuum(basis: &FockBasisSpec) -> Self {
        Self::fock_product(basis, [0, 0, 0])
    }

    pub fn fock_product(basis: &FockBasisSpec, n: [usize; 3]) -> Self {
        let dim = basis.dim();
        let mut data = vec![Complex64::default(); dim * dim];
        let i = basis.index(n.map(|k| k.min(basis.n_max)));
        data[i * dim + i] = Complex64::new(1.0, 0.0);
        DensityMatrix { dim, data }
    }

    /// |ψ⟩⟨ψ| for a normalized state vector.
    pub fn from_pure(psi: &[Complex64]) -> Self {
        let dim = psi.len();
        let mut data = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                data[i * dim + j] = psi[i] * psi[j].conj();
            }
        }
        DensityMatrix { dim, data }
    }

    /// Product of truncated thermal states with mean occupations `nbar`
    /// (renormalized on the kept levels).
    pub fn thermal_product(basis: &FockBasisSpec, nbar: [f64; 3]) -> Result<Self, OracleError> {
        if nbar.iter().any(|&n| !(n >= 0.0) || !n.is_finite()) {
            return Err(OracleError::InvalidDensity(
                "thermal occupations must be finite and ≥ 0".into(),
            ));
        }
        let d = basis.levels();
        let populations: Vec<Vec<f64>> = nbar
            .iter()
            .map(|&n| {
                let ratio = n / (1.0 + n);
                let raw: Vec<f64> = (0..d).map(|k| ratio.powi(k as i32)).collect();
                let z: f64 = raw.iter().sum();
                raw.into_iter().map(|p| p / z).collect()
            })
            .collect();
        let dim = basis.dim();
        let mut data = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            let [a, b, c] = basis.occupations(i);
            data[i * dim + i] = Complex64::new(
                populations[0][a] * populations[1][b] * populations[2][c],
                0.0,
            );
        }
        Ok(DensityMatrix { dim, data })
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        worst
    }

    /// Whether ρ + shift·𝟙 admits a Cholesky factorization, i.e. the
    /// smallest eigenvalue of the Hermitian part exceeds −shift.
    pub fn is_positive_within(&self, shift: f64) -> bool {
        let n = self.dim;
        let mut l = vec![Complex64::default(); n * n];
        for j in 0..n {
            let mut diag = 0.5 * (self.data[j * n + j].re + self.data[j * n + j].re) + shift;
            for k in 0..j {
                diag -= l[j * n + k].norm_sqr();
            }
            if !(diag > 0.0) {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * n + j] = Complex64::new(ljj, 0.0);
            for i in j + 1..n {
                // Hermitian part of ρ
                let mut s = (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5;
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / ljj;
            }
        }
        true
    }

    /// Checks Hermiticity (1e-10), unit trace (1e-8) and the eigenvalue
    /// floor (−1e-8).
    pub fn validate(&self) -> Result<(), OracleError> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(OracleError::InvalidDensity(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > 1e-8 {
            return Err(OracleError::InvalidDensity(format!("trace {tr} ≠ 1")));
        }
        if !self.is_positive_within(1e-8) {
            return Err(OracleError::InvalidDensity("eigenvalue below −1e-8".into()));
        }
        Ok(())
    }
}

/// Tr[ρ · word] on the truncated space.
pub fn expectation(
    basis: &FockBasisSpec,
    rho: &DensityMatrix,
    word: &[OperatorFactor],
) -> Result<Complex64, OracleError> {
    if word.len() > 6 {
        return Err(OracleError::WordTooLong(word.len()));
    }
    if rho.dim != basis.dim() {
        return Err(OracleError::InvalidDensity(format!(
            "density matrix dimension {} does not match basis dimension {}",
            rho.dim,
            basis.dim()
        )));
    }
    Ok(expectation_unchecked(basis, rho, word))
}

fn expectation_unchecked(
    basis: &FockBasisSpec,
    rho: &DensityMatrix,
    word: &[OperatorFactor],
) -> Complex64 {
    let n = rho.dim;
    // Tr(Wρ) = Σ_j W[i_j, j] ρ[j, i_j]; W has at most one entry per column.
    let mut acc = Complex64::default();
    for j in 0..n {
        if let Some((i, amp)) = basis.apply_word(word, j) {
            acc += rho.data[j * n + i] * amp;
        }
    }
    acc
}

/// Exact correlators of a density matrix, usable wherever decoupled
/// moments are.
#[derive(Clone, Copy, Debug)]
pub struct ExactCorrelators<'a> {
    pub basis: &'a FockBasisSpec,
    pub rho: &'a DensityMatrix,
}

impl<'a> ExactCorrelators<'a> {
    pub fn new(basis: &'a FockBasisSpec, rho: &'a DensityMatrix) -> Result<Self, OracleError> {
        if rho.dim != basis.dim() {
            return Err(OracleError::InvalidDensity(format!(
                "density matrix dimension {} does not match basis dimension {}",
                rho.dim,
                basis.dim()
            )));
        }
        Ok(ExactCorrelators { basis, rho })
    }

    pub fn word(&self, word: &[OperatorFactor]) -> Complex64 {
        expectation_unchecked(self.basis, self.rho, word)
    }

    /// All 27 tracked moments evaluated exactly.
    pub fn moment_state(&self) -> MomentState {
        let mut s = MomentState::zero();
        for m in Moment::ALL {
            s[m] = self.word(&moment_word(m));
        }
        s
    }
}

/// The operator word (normal ordered) stored in a moment slot.
pub fn moment_word(m: Moment) -> Vec<OperatorFactor> {
    let name = m.name().as_bytes();
    let mut word = Vec::with_capacity(2);
    let mut i = 0;
    while i < name.len() {
        let mode = Mode::ALL[(name[i] - b'A') as usize];
        let dag = name.get(i + 1) == Some(&b'd');
        word.push(OperatorFactor {
            mode,
            daggered: dag,
        });
        i += if dag { 2 } else { 1 };
    }
    word
}

impl Correlators for ExactCorrelators<'_> {
    fn mean(&self, x: OperatorFactor) -> Complex64 {
        self.word(&[x])
    }

    fn pair(&self, x: OperatorFactor, y: OperatorFactor) -> Complex64 {
        self.word(&[x, y])
    }

    fn triple(&self, x: OperatorFactor, y: OperatorFactor, z: OperatorFactor) -> Complex64 {
        self.word(&[x, y, z])
    }

    fn quad(
        &self,
        w: OperatorFactor,
        x: OperatorFactor,
        y: OperatorFactor,
        z: OperatorFactor,
    ) -> Complex64 {
        self.word(&[w, x, y, z])
    }

    fn number_triple(&self) -> Complex64 {
        use OperatorFactor as F;
        self.word(&[
            F::cre(Mode::A),
            F::ann(Mode::A),
            F::cre(Mode::B),
            F::ann(Mode::B),
            F::cre(Mode::C),
            F::ann(Mode::C),
        ])
    }
}
