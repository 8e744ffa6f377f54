//! Complex state vectors over qubit registers, reduced density matrices,
//! and spectral entropy.
//!
//! Basis convention: computational basis states are labelled |q₁…q_n⟩ with
//! qubit 1 stored as the *most significant* bit of the basis index. The bit
//! of qubit `i` (1-based) inside index `j` is `(j >> (n - i)) & 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Allowed deviation of Σ|amplitude|² from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;
/// Allowed asymmetry when checking Hermiticity.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
/// Eigenvalues of density matrices may undershoot zero by at most this much.
pub const EIGENVALUE_FLOOR: f64 = -1e-9;
/// Registers larger than this are stored sparsely when the support allows it.
pub const SPARSE_QUBIT_THRESHOLD: usize = 12;
/// Largest support size accepted for the sparse representation.
pub const MAX_SPARSE_SUPPORT: usize = 1 << 16;

/// Amplitude storage of a [`PureState`].
#[derive(Debug, Clone, PartialEq)]
pub enum Storage {
    /// All 2^n amplitudes in basis-index order.
    Dense(Vec<Complex64>),
    /// Only the nonzero amplitudes, indices strictly increasing.
    Sparse {
        indices: Vec<u64>,
        values: Vec<Complex64>,
    },
}

/// Normalized pure state of an `n`-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    storage: Storage,
}

impl PureState {
    /// Builds a dense state, validating length and normalization.
    pub fn from_dense(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let expected = 1usize
            .checked_shl(n_qubits as u32)
            .ok_or(Error::BadQubitCount(n_qubits))?;
        if amplitudes.len() != expected {
            return Err(Error::AmplitudeLength {
                len: amplitudes.len(),
                expected,
                n_qubits,
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        check_norm(norm)?;
        Ok(Self {
            n_qubits,
            storage: Storage::Dense(amplitudes),
        })
    }

    /// Builds a sparse-support state from `(index, amplitude)` pairs.
    ///
    /// Pairs may arrive in any order; they are sorted, exact zeros are
    /// dropped, and duplicate indices are rejected.
    pub fn from_sparse(n_qubits: usize, mut support: Vec<(u64, Complex64)>) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let dim = dim_of(n_qubits);
        support.retain(|(_, a)| a.norm_sqr() != 0.0);
        support.sort_by_key(|(j, _)| *j);
        let mut indices = Vec::with_capacity(support.len());
        let mut values = Vec::with_capacity(support.len());
        let mut norm = 0.0;
        for (j, a) in support {
            if u128::from(j) >= dim {
                return Err(Error::SupportIndexOutOfRange {
                    index: j,
                    n_qubits,
                });
            }
            if indices.last() == Some(&j) {
                return Err(Error::DuplicateSupportIndex { index: j });
            }
            indices.push(j);
            values.push(a);
            norm += a.norm_sqr();
        }
        check_norm(norm)?;
        Ok(Self {
            n_qubits,
            storage: Storage::Sparse { indices, values },
        })
    }

    /// Computational basis state |index⟩.
    pub fn basis_state(n_qubits: usize, index: u64) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        if u128::from(index) >= dim_of(n_qubits) {
            return Err(Error::SupportIndexOutOfRange {
                index,
                n_qubits,
            });
        }
        if n_qubits > SPARSE_QUBIT_THRESHOLD {
            Self::from_sparse(n_qubits, vec![(index, Complex64::new(1.0, 0.0))])
        } else {
            let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
            amps[index as usize] = Complex64::new(1.0, 0.0);
            Self::from_dense(n_qubits, amps)
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension 2^n (up to 2^64, hence `u128`).
    pub fn dim(&self) -> u128 {
        dim_of(self.n_qubits)
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse { .. })
    }

    /// Number of stored amplitudes.
    pub fn support_len(&self) -> usize {
        match &self.storage {
            Storage::Dense(a) => a.len(),
            Storage::Sparse { indices, .. } => indices.len(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        match &self.storage {
            Storage::Dense(a) => a.iter().map(|x| x.norm_sqr()).sum(),
            Storage::Sparse { values, .. } => values.iter().map(|x| x.norm_sqr()).sum(),
        }
    }

    /// Amplitude at a basis index (zero off the sparse support).
    pub fn amplitude(&self, index: u64) -> Complex64 {
        match &self.storage {
            Storage::Dense(a) => a[index as usize],
            Storage::Sparse { indices, values } => match indices.binary_search(&index) {
                Ok(pos) => values[pos],
                Err(_) => Complex64::ZERO,
            },
        }
    }

    /// Visits every stored `(index, amplitude)` pair in index order.
    pub fn for_each_amplitude(&self, mut f: impl FnMut(u64, Complex64)) {
        match &self.storage {
            Storage::Dense(a) => {
                for (j, amp) in a.iter().enumerate() {
                    f(j as u64, *amp);
                }
            }
            Storage::Sparse { indices, values } => {
                for (j, amp) in indices.iter().zip(values) {
                    f(*j, *amp);
                }
            }
        }
    }

    /// Dense amplitude vector; materializes sparse states (n ≤ 26 only).
    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        match &self.storage {
            Storage::Dense(a) => Ok(a.clone()),
            Storage::Sparse { indices, values } => {
                if self.n_qubits > 26 {
                    return Err(Error::SparseUnsupported(format!(
                        "cannot materialize a dense vector for {} qubits",
                        self.n_qubits
                    )));
                }
                let mut amps = vec![Complex64::ZERO; 1 << self.n_qubits];
                for (j, a) in indices.iter().zip(values) {
                    amps[*j as usize] = *a;
                }
                Ok(amps)
            }
        }
    }

    /// Bit position (shift) of 1-based qubit `i`; qubit 1 is the MSB.
    pub fn bit_shift(&self, qubit: usize) -> Result<u32> {
        if qubit == 0 || qubit > self.n_qubits {
            return Err(Error::QubitIndexOutOfRange {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok((self.n_qubits - qubit) as u32)
    }
}

fn check_qubit_count(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > 64 {
        return Err(Error::BadQubitCount(n_qubits));
    }
    Ok(())
}

fn check_norm(norm_sqr: f64) -> Result<()> {
    let deviation = (norm_sqr - 1.0).abs();
    if deviation > NORM_TOLERANCE {
        return Err(Error::NotNormalized { deviation });
    }
    Ok(())
}

fn dim_of(n_qubits: usize) -> u128 {
    1u128 << n_qubits
}

/// Kronecker product of two states, `a` on the high bits.
///
/// The result is stored sparsely when the combined register exceeds
/// [`SPARSE_QUBIT_THRESHOLD`] and the support fits, densely otherwise.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let n = a.n_qubits + b.n_qubits;
    check_qubit_count(n)?;
    let support = a.support_len().saturating_mul(b.support_len());
    let sparse = n > SPARSE_QUBIT_THRESHOLD && support <= MAX_SPARSE_SUPPORT;
    if sparse || a.is_sparse() || b.is_sparse() {
        if support > MAX_SPARSE_SUPPORT && n > 26 {
            return Err(Error::SparseUnsupported(format!(
                "tensor product support {support} is too large for {n} qubits"
            )));
        }
        let mut pairs = Vec::with_capacity(support);
        a.for_each_amplitude(|ja, va| {
            b.for_each_amplitude(|jb, vb| {
                pairs.push(((ja << b.n_qubits) | jb, va * vb));
            });
        });
        if sparse {
            PureState::from_sparse(n, pairs)
        } else {
            let mut amps = vec![Complex64::ZERO; 1 << n];
            for (j, v) in pairs {
                amps[j as usize] = v;
            }
            PureState::from_dense(n, amps)
        }
    } else {
        let (av, bv) = match (&a.storage, &b.storage) {
            (Storage::Dense(av), Storage::Dense(bv)) => (av, bv),
            _ => unreachable!(),
        };
        let mut amps = Vec::with_capacity(av.len() * bv.len());
        for va in av {
            for vb in bv {
                amps.push(va * vb);
            }
        }
        PureState::from_dense(n, amps)
    }
}

/// Hermitian, trace-one density matrix with power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates squareness, power-of-two dimension, Hermiticity and trace.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::NotSquare {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        let dim = data.nrows();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let mut max_asym: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                let d = (data[(i, j)] - data[(j, i)].conj()).norm();
                max_asym = max_asym.max(d);
            }
        }
        if max_asym > HERMITICITY_TOLERANCE {
            return Err(Error::NotHermitian {
                deviation: max_asym,
            });
        }
        let trace: Complex64 = (0..dim).map(|i| data[(i, i)]).sum();
        let trace_dev = (trace - Complex64::new(1.0, 0.0)).norm();
        if trace_dev > HERMITICITY_TOLERANCE {
            return Err(Error::TraceNotOne {
                deviation: trace_dev,
            });
        }
        Ok(Self { data })
    }

    /// |ψ⟩⟨ψ| of a dense-representable state.
    pub fn from_pure(state: &PureState) -> Result<Self> {
        let amps = state.to_dense()?;
        let v = DVector::from_vec(amps);
        let data = &v * v.adjoint();
        Self::new(data)
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.data[(i, i)]).sum()
    }

    /// Full validation including the positive-semidefinite check.
    pub fn validate(&self) -> Result<()> {
        let eigs = hermitian_eigenvalues(self)?;
        let min = eigs.last().copied().unwrap_or(0.0);
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }
}

/// Reduced 2×2 density matrix of one qubit (1-based index, qubit 1 = MSB).
pub fn reduce_to_qubit(state: &PureState, qubit: usize) -> Result<DensityMatrix> {
    let shift = state.bit_shift(qubit)?;
    let mask = 1u64 << shift;
    let mut r00 = 0.0f64;
    let mut r11 = 0.0f64;
    let mut r01 = Complex64::ZERO;
    match state.storage() {
        Storage::Dense(amps) => {
            let m = mask as usize;
            for j in 0..amps.len() {
                if j & m == 0 {
                    let a = amps[j];
                    let b = amps[j | m];
                    r00 += a.norm_sqr();
                    r11 += b.norm_sqr();
                    r01 += a * b.conj();
                }
            }
        }
        Storage::Sparse { indices, values } => {
            for (pos, (&j, &a)) in indices.iter().zip(values).enumerate() {
                if j & mask == 0 {
                    r00 += a.norm_sqr();
                    if let Ok(partner) = indices[pos..].binary_search(&(j | mask)) {
                        r01 += a * values[pos + partner].conj();
                    }
                } else {
                    r11 += a.norm_sqr();
                }
            }
        }
    }
    let data = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(r00, 0.0),
            r01,
            r01.conj(),
            Complex64::new(r11, 0.0),
        ],
    );
    DensityMatrix::new(data)
}

/// Eigenvalues of a Hermitian density matrix, descending.
pub fn hermitian_eigenvalues(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let mut eigs = hermitian_eigenvalues_raw(rho.matrix())?;
    eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(eigs)
}

pub(crate) fn hermitian_eigenvalues_raw(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    let eig = m
        .clone()
        .try_symmetric_eigen(1.0e-13, 10_000)
        .ok_or(Error::EigenNonConvergence)?;
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Von Neumann entropy −Tr ρ log₂ ρ in bits.
///
/// Eigenvalues inside `[EIGENVALUE_FLOOR, 0)` are clamped to zero and
/// `0·log₂0` is taken as 0. Genuinely negative spectra are rejected.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let eigs = hermitian_eigenvalues(rho)?;
    if let Some(&min) = eigs.last() {
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
    }
    Ok(shannon_entropy_bits(eigs.iter().copied()))
}

/// Shannon entropy −Σ p log₂ p in bits, with 0·log₂0 = 0.
///
/// Probabilities within [`EIGENVALUE_FLOOR`] of zero are clamped to zero;
/// values above one are clamped to one.
pub fn shannon_entropy_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0;
    for p in probs {
        let p = p.clamp(0.0, 1.0);
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    s
}
