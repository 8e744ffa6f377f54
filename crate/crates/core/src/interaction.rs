//! Collective coupling operators, their pointer basis, and the pure-dephasing
//! channel they generate.
//!
//! Each qubit couples to the environment through a Hermitian 2×2 operator; the
//! collective coupling is the sum of the per-qubit operators acting on their
//! own factors. Its eigenbasis, the pointer basis, is the tensor product of
//! the single-qubit eigenframes, and its eigenvalues add per qubit. At
//! infinite time every coherence between pointer states with *different*
//! collective eigenvalues is erased; coherences inside a degenerate eigenvalue
//! group survive. [`decoherence_factor`] and [`evolve`] give the finite-time
//! weights of the surviving and decaying entries.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevec::{shannon_entropy_bits, DensityMatrix, PureState, Storage};

/// Default relative tolerance for grouping nearly equal eigenvalues.
pub const DEFAULT_EIGENVALUE_TOLERANCE: f64 = 1e-9;
/// Pointer-index bookkeeping (eigenvalue table, groups) is materialized for
/// registers up to this size; larger registers use the sparse per-support path.
pub const GROUPING_QUBIT_LIMIT: usize = 20;

/// One qubit's coupling operator as real Pauli coefficients:
/// `a0·I + ax·σx + ay·σy + az·σz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitOperator {
    pub a0: f64,
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl QubitOperator {
    pub fn new(a0: f64, ax: f64, ay: f64, az: f64) -> Self {
        Self { a0, ax, ay, az }
    }

    pub fn sigma_x(scale: f64) -> Self {
        Self::new(0.0, scale, 0.0, 0.0)
    }

    pub fn sigma_y(scale: f64) -> Self {
        Self::new(0.0, 0.0, scale, 0.0)
    }

    pub fn sigma_z(scale: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, scale)
    }

    /// Norm of the Pauli vector; zero marks an effectively isolated qubit.
    pub fn pauli_norm(&self) -> f64 {
        (self.ax * self.ax + self.ay * self.ay + self.az * self.az).sqrt()
    }

    /// The 2×2 Hermitian matrix of the operator.
    pub fn matrix(&self) -> Matrix2<Complex64> {
        let c = Complex64::new;
        Matrix2::new(
            c(self.a0 + self.az, 0.0),
            c(self.ax, -self.ay),
            c(self.ax, self.ay),
            c(self.a0 - self.az, 0.0),
        )
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.a0 * factor,
            self.ax * factor,
            self.ay * factor,
            self.az * factor,
        )
    }
}

/// Coupling assignment for one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling {
    /// The qubit does not interact with the environment.
    Isolated,
    Operator(QubitOperator),
}

/// Per-qubit couplings plus the tolerance used to group collective eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSpec {
    couplings: Vec<Coupling>,
    eigenvalue_tolerance: f64,
}

impl InteractionSpec {
    pub fn new(couplings: Vec<Coupling>) -> Self {
        Self {
            couplings,
            eigenvalue_tolerance: DEFAULT_EIGENVALUE_TOLERANCE,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.eigenvalue_tolerance = tolerance;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn eigenvalue_tolerance(&self) -> f64 {
        self.eigenvalue_tolerance
    }

    /// True when at least one qubit actually couples; a spec without any
    /// interacting qubit dephases nothing (callers may want to warn).
    pub fn has_interaction(&self) -> bool {
        self.couplings
            .iter()
            .any(|c| matches!(c, Coupling::Operator(op) if op.pauli_norm() != 0.0))
    }

    /// σ_z on every qubit with magnitudes 1, 2, 4, …, 2^{n-1}.
    ///
    /// Power-of-two magnitudes make every signed subset sum unique, so all
    /// 2^n collective eigenvalues are distinct.
    pub fn distinct_sigma_z(n_qubits: usize) -> Self {
        Self::new(
            (0..n_qubits)
                .map(|i| Coupling::Operator(QubitOperator::sigma_z((1u64 << i) as f64)))
                .collect(),
        )
    }

    /// σ_x analogue of [`Self::distinct_sigma_z`].
    pub fn distinct_sigma_x(n_qubits: usize) -> Self {
        Self::new(
            (0..n_qubits)
                .map(|i| Coupling::Operator(QubitOperator::sigma_x((1u64 << i) as f64)))
                .collect(),
        )
    }

    /// σ_z with magnitudes 1, 2, …, n.
    ///
    /// Signed subset sums may coincide, but eigenvalues stay distinct on any
    /// single-excitation support, and the magnitudes stay small enough for
    /// relative-tolerance grouping at large n (unlike 2^{n-1} at n ≈ 64).
    pub fn linear_sigma_z(n_qubits: usize) -> Self {
        Self::new(
            (0..n_qubits)
                .map(|i| Coupling::Operator(QubitOperator::sigma_z((i + 1) as f64)))
                .collect(),
        )
    }

    /// First `interacting` qubits coupled as in [`Self::distinct_sigma_z`],
    /// the rest isolated.
    pub fn partial_sigma_z(n_qubits: usize, interacting: usize) -> Self {
        Self::new(
            (0..n_qubits)
                .map(|i| {
                    if i < interacting {
                        Coupling::Operator(QubitOperator::sigma_z((1u64 << i) as f64))
                    } else {
                        Coupling::Isolated
                    }
                })
                .collect(),
        )
    }

    /// Parses the comma-separated per-qubit text format.
    ///
    /// Tokens: `i` (isolated), `<a0>:<ax>:<ay>:<az>`, or an axis shorthand
    /// `x`/`y`/`z` with an optional scale prefix (`2z`, `-1.5x`).
    pub fn parse(text: &str) -> Result<Self> {
        let mut couplings = Vec::new();
        for raw in text.split(',') {
            let token = raw.trim();
            if token.is_empty() {
                return Err(Error::Parse(format!(
                    "empty interaction token in {text:?}"
                )));
            }
            if token.eq_ignore_ascii_case("i") {
                couplings.push(Coupling::Isolated);
                continue;
            }
            let last = token.chars().last().unwrap().to_ascii_lowercase();
            if matches!(last, 'x' | 'y' | 'z') && !token.contains(':') {
                let prefix = &token[..token.len() - 1];
                let scale: f64 = if prefix.is_empty() {
                    1.0
                } else {
                    prefix.parse().map_err(|_| {
                        Error::Parse(format!("bad scale prefix {prefix:?} in token {token:?}"))
                    })?
                };
                let op = match last {
                    'x' => QubitOperator::sigma_x(scale),
                    'y' => QubitOperator::sigma_y(scale),
                    _ => QubitOperator::sigma_z(scale),
                };
                couplings.push(Coupling::Operator(op));
                continue;
            }
            let parts: Vec<&str> = token.split(':').collect();
            if parts.len() != 4 {
                return Err(Error::Parse(format!(
                    "interaction token {token:?} is neither `i`, an axis shorthand, nor a0:ax:ay:az"
                )));
            }
            let mut vals = [0.0f64; 4];
            for (slot, part) in vals.iter_mut().zip(&parts) {
                *slot = part.trim().parse().map_err(|_| {
                    Error::Parse(format!("bad coefficient {part:?} in token {token:?}"))
                })?;
            }
            couplings.push(Coupling::Operator(QubitOperator::new(
                vals[0], vals[1], vals[2], vals[3],
            )));
        }
        Ok(Self::new(couplings))
    }

    /// Canonical text form accepted back by [`Self::parse`].
    pub fn to_spec_string(&self) -> String {
        self.couplings
            .iter()
            .map(|c| match c {
                Coupling::Isolated => "i".to_string(),
                Coupling::Operator(op) => format!("{}:{}:{}:{}", op.a0, op.ax, op.ay, op.az),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Eigenvalues and eigenframe of one qubit's coupling operator.
#[derive(Debug, Clone)]
pub struct QubitEigensystem {
    /// Eigenvalue a0 + r attached to the first frame column.
    pub lambda_p: f64,
    /// Eigenvalue a0 - r attached to the second frame column.
    pub lambda_m: f64,
    /// Unitary whose columns are the eigenvectors (u_p, u_m). Identity when
    /// the Pauli vector is zero.
    pub frame: Matrix2<Complex64>,
}

/// Diagonalizes a single-qubit coupling.
///
/// The eigenvectors use the half-angle form of the Bloch vector with each
/// column rephased so its first nonzero component is real positive; a pure
/// south-pole operator (ax = ay = 0, az < 0) therefore yields the plain swap
/// of the computational basis.
pub fn single_qubit_eigensystem(op: &QubitOperator) -> QubitEigensystem {
    let r = op.pauli_norm();
    if r == 0.0 {
        return QubitEigensystem {
            lambda_p: op.a0,
            lambda_m: op.a0,
            frame: Matrix2::identity(),
        };
    }
    let cos_theta = (op.az / r).clamp(-1.0, 1.0);
    let half_cos = ((1.0 + cos_theta) / 2.0).sqrt();
    let half_sin = ((1.0 - cos_theta) / 2.0).sqrt();
    let phi = op.ay.atan2(op.ax);
    let phase = Complex64::from_polar(1.0, phi);
    let mut frame = Matrix2::new(
        Complex64::new(half_cos, 0.0),
        -phase.conj() * half_sin,
        phase * half_sin,
        Complex64::new(half_cos, 0.0),
    );
    for col in 0..2 {
        let lead = (0..2)
            .map(|row| frame[(row, col)])
            .find(|v| v.norm() > 1e-15)
            .unwrap();
        let rot = lead.conj() / lead.norm();
        for row in 0..2 {
            frame[(row, col)] *= rot;
        }
    }
    QubitEigensystem {
        lambda_p: op.a0 + r,
        lambda_m: op.a0 - r,
        frame,
    }
}

/// How a frame acts on computational indices, used by the sparse path.
#[derive(Debug, Clone, Copy, PartialEq)]
enum FrameKind {
    /// Frame is diagonal: pointer indices coincide with basis indices.
    Diagonal,
    /// Frame is antidiagonal: the qubit's bit flips in the pointer index.
    AntiDiagonal,
    /// Anything else; the sparse path cannot use it.
    General,
}

fn classify_frame(frame: &Matrix2<Complex64>) -> FrameKind {
    let off = frame[(0, 1)].norm().max(frame[(1, 0)].norm());
    let diag = frame[(0, 0)].norm().max(frame[(1, 1)].norm());
    if off <= 1e-12 {
        FrameKind::Diagonal
    } else if diag <= 1e-12 {
        FrameKind::AntiDiagonal
    } else {
        FrameKind::General
    }
}

/// Index bookkeeping of the collective eigenbasis for small registers.
#[derive(Debug, Clone)]
pub struct DenseGrouping {
    /// Collective eigenvalue attached to each pointer index.
    pub eigenvalue_per_index: Vec<f64>,
    /// Disjoint classes of pointer indices with equal eigenvalue.
    pub groups: Vec<Vec<usize>>,
    /// Group id of each pointer index.
    pub group_of_index: Vec<u32>,
}

/// Pointer basis of a collective coupling: per-qubit frames, per-qubit
/// eigenvalue pairs, and (for small registers) the index grouping.
#[derive(Debug, Clone)]
pub struct PointerBasis {
    frames: Vec<Matrix2<Complex64>>,
    /// (eigenvalue for bit 0, eigenvalue for bit 1); isolated qubits carry (0, 0).
    qubit_eigenvalues: Vec<(f64, f64)>,
    tolerance: f64,
    dense: Option<DenseGrouping>,
}

impl PointerBasis {
    pub fn n_qubits(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[Matrix2<Complex64>] {
        &self.frames
    }

    pub fn qubit_eigenvalues(&self) -> &[(f64, f64)] {
        &self.qubit_eigenvalues
    }

    /// Collective eigenvalue of a pointer index, any register size.
    pub fn eigenvalue_of_index(&self, index: u64) -> f64 {
        let n = self.n_qubits();
        let mut e = 0.0;
        for (i, (lp, lm)) in self.qubit_eigenvalues.iter().enumerate() {
            let bit = (index >> (n - 1 - i)) & 1;
            e += if bit == 0 { *lp } else { *lm };
        }
        e
    }

    /// Index grouping; present for registers up to [`GROUPING_QUBIT_LIMIT`].
    pub fn grouping(&self) -> Option<&DenseGrouping> {
        self.dense.as_ref()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn frame_kinds(&self) -> Vec<FrameKind> {
        self.frames.iter().map(classify_frame).collect()
    }

    fn is_identity_frame(&self, i: usize) -> bool {
        let f = &self.frames[i];
        (f - Matrix2::identity()).norm() <= 1e-14
    }
}

fn merge_sorted_eigenvalues(
    sorted: &[(f64, usize)],
    tolerance: f64,
) -> (Vec<Vec<usize>>, Vec<u32>) {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of_index = vec![0u32; sorted.len()];
    let mut prev = f64::NEG_INFINITY;
    for &(e, idx) in sorted {
        let scale = tolerance * 1.0_f64.max(e.abs().max(prev.abs()));
        if groups.is_empty() || e - prev > scale {
            groups.push(vec![idx]);
        } else {
            groups.last_mut().unwrap().push(idx);
        }
        group_of_index[idx] = (groups.len() - 1) as u32;
        prev = e;
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    (groups, group_of_index)
}

/// Assembles the pointer basis of a coupling spec.
///
/// Eigenvalues accumulate additively over interacting qubits; isolated qubits
/// contribute zero and the identity frame; a zero Pauli vector contributes the
/// constant a0 to every index (a global shift that never splits groups).
pub fn build_pointer_basis(spec: &InteractionSpec) -> PointerBasis {
    let n = spec.n_qubits();
    let mut frames = Vec::with_capacity(n);
    let mut qubit_eigenvalues = Vec::with_capacity(n);
    for coupling in spec.couplings() {
        match coupling {
            Coupling::Isolated => {
                frames.push(Matrix2::identity());
                qubit_eigenvalues.push((0.0, 0.0));
            }
            Coupling::Operator(op) => {
                let eig = single_qubit_eigensystem(op);
                frames.push(eig.frame);
                qubit_eigenvalues.push((eig.lambda_p, eig.lambda_m));
            }
        }
    }
    let mut basis = PointerBasis {
        frames,
        qubit_eigenvalues,
        tolerance: spec.eigenvalue_tolerance(),
        dense: None,
    };
    if n <= GROUPING_QUBIT_LIMIT {
        let dim = 1usize << n;
        let eigenvalue_per_index: Vec<f64> =
            (0..dim).map(|j| basis.eigenvalue_of_index(j as u64)).collect();
        let mut sorted: Vec<(f64, usize)> = eigenvalue_per_index
            .iter()
            .copied()
            .zip(0..dim)
            .collect();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let (groups, group_of_index) = merge_sorted_eigenvalues(&sorted, basis.tolerance);
        basis.dense = Some(DenseGrouping {
            eigenvalue_per_index,
            groups,
            group_of_index,
        });
    }
    basis
}

fn check_spec_matches(state: &PureState, spec: &InteractionSpec) -> Result<()> {
    if state.n_qubits() != spec.n_qubits() {
        return Err(Error::SpecLengthMismatch {
            spec_qubits: spec.n_qubits(),
            state_qubits: state.n_qubits(),
        });
    }
    Ok(())
}

/// Applies a 2×2 matrix to one qubit of a dense amplitude vector.
fn apply_matrix_to_qubit(
    amps: &mut [Complex64],
    shift: u32,
    m: &Matrix2<Complex64>,
    adjoint: bool,
) {
    let (m00, m01, m10, m11) = if adjoint {
        (
            m[(0, 0)].conj(),
            m[(1, 0)].conj(),
            m[(0, 1)].conj(),
            m[(1, 1)].conj(),
        )
    } else {
        (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
    };
    let mask = 1usize << shift;
    for j in 0..amps.len() {
        if j & mask == 0 {
            let a = amps[j];
            let b = amps[j | mask];
            amps[j] = m00 * a + m01 * b;
            amps[j | mask] = m10 * a + m11 * b;
        }
    }
}

/// Coefficients of a dense-representable state in the pointer basis.
fn pointer_coefficients(state: &PureState, basis: &PointerBasis) -> Result<Vec<Complex64>> {
    let mut amps = state.to_dense()?;
    let n = basis.n_qubits();
    for i in 0..n {
        if !basis.is_identity_frame(i) {
            apply_matrix_to_qubit(&mut amps, (n - 1 - i) as u32, &basis.frames[i], true);
        }
    }
    Ok(amps)
}

/// Rotates pointer-basis amplitudes back to the computational basis.
fn computational_amplitudes(mut amps: Vec<Complex64>, basis: &PointerBasis) -> Vec<Complex64> {
    let n = basis.n_qubits();
    for i in 0..n {
        if !basis.is_identity_frame(i) {
            apply_matrix_to_qubit(&mut amps, (n - 1 - i) as u32, &basis.frames[i], false);
        }
    }
    amps
}

fn left_multiply_frame(m: &mut DMatrix<Complex64>, shift: u32, f: &Matrix2<Complex64>, adjoint: bool) {
    let (f00, f01, f10, f11) = if adjoint {
        (
            f[(0, 0)].conj(),
            f[(1, 0)].conj(),
            f[(0, 1)].conj(),
            f[(1, 1)].conj(),
        )
    } else {
        (f[(0, 0)], f[(0, 1)], f[(1, 0)], f[(1, 1)])
    };
    let dim = m.nrows();
    let mask = 1usize << shift;
    for col in 0..dim {
        for j in 0..dim {
            if j & mask == 0 {
                let a = m[(j, col)];
                let b = m[(j | mask, col)];
                m[(j, col)] = f00 * a + f01 * b;
                m[(j | mask, col)] = f10 * a + f11 * b;
            }
        }
    }
}

fn right_multiply_frame(m: &mut DMatrix<Complex64>, shift: u32, f: &Matrix2<Complex64>, adjoint: bool) {
    // m <- m * F (or m * F^dagger): F[l, k] multiplies column l into column k.
    let (f00, f01, f10, f11) = if adjoint {
        (
            f[(0, 0)].conj(),
            f[(1, 0)].conj(),
            f[(0, 1)].conj(),
            f[(1, 1)].conj(),
        )
    } else {
        (f[(0, 0)], f[(0, 1)], f[(1, 0)], f[(1, 1)])
    };
    let dim = m.nrows();
    let mask = 1usize << shift;
    for row in 0..dim {
        for k in 0..dim {
            if k & mask == 0 {
                let a = m[(row, k)];
                let b = m[(row, k | mask)];
                m[(row, k)] = a * f00 + b * f10;
                m[(row, k | mask)] = a * f01 + b * f11;
            }
        }
    }
}

fn rotate_matrix_from_pointer(mut m: DMatrix<Complex64>, basis: &PointerBasis) -> DMatrix<Complex64> {
    let n = basis.n_qubits();
    for i in 0..n {
        if !basis.is_identity_frame(i) {
            let shift = (n - 1 - i) as u32;
            left_multiply_frame(&mut m, shift, &basis.frames[i], false);
            right_multiply_frame(&mut m, shift, &basis.frames[i], true);
        }
    }
    m
}

fn rotate_matrix_to_pointer(mut m: DMatrix<Complex64>, basis: &PointerBasis) -> DMatrix<Complex64> {
    let n = basis.n_qubits();
    for i in 0..n {
        if !basis.is_identity_frame(i) {
            let shift = (n - 1 - i) as u32;
            left_multiply_frame(&mut m, shift, &basis.frames[i], true);
            right_multiply_frame(&mut m, shift, &basis.frames[i], false);
        }
    }
    m
}

fn grouping_required(basis: &PointerBasis) -> Result<&DenseGrouping> {
    basis.grouping().ok_or_else(|| {
        Error::SparseUnsupported(format!(
            "pointer-index grouping is not materialized for {} qubits (limit {})",
            basis.n_qubits(),
            GROUPING_QUBIT_LIMIT
        ))
    })
}

/// Infinite-time dephased state of a pure input, as a density matrix.
///
/// The state is expanded in the pointer basis and every coherence between
/// different eigenvalue groups is erased; what survives within each group is
/// the (rank-one) projection of the input onto that group.
pub fn dephase_final(state: &PureState, spec: &InteractionSpec) -> Result<DensityMatrix> {
    let basis = build_pointer_basis(spec);
    dephase_final_with(state, &basis)
}

/// [`dephase_final`] against a prebuilt pointer basis.
pub fn dephase_final_with(state: &PureState, basis: &PointerBasis) -> Result<DensityMatrix> {
    if state.n_qubits() != basis.n_qubits() {
        return Err(Error::SpecLengthMismatch {
            spec_qubits: basis.n_qubits(),
            state_qubits: state.n_qubits(),
        });
    }
    let grouping = grouping_required(basis)?;
    let coeffs = pointer_coefficients(state, basis)?;
    let dim = coeffs.len();
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut masked = vec![Complex64::ZERO; dim];
    for group in &grouping.groups {
        let mass: f64 = group.iter().map(|&j| coeffs[j].norm_sqr()).sum();
        if mass == 0.0 {
            continue;
        }
        masked.iter_mut().for_each(|v| *v = Complex64::ZERO);
        for &j in group {
            masked[j] = coeffs[j];
        }
        let vec = computational_amplitudes(masked.clone(), basis);
        for (r, vr) in vec.iter().enumerate() {
            if vr.norm_sqr() == 0.0 {
                continue;
            }
            for (c, vc) in vec.iter().enumerate() {
                rho[(r, c)] += vr * vc.conj();
            }
        }
    }
    DensityMatrix::new(rho)
}

/// The dephasing channel applied to an arbitrary density matrix: coherences
/// between different pointer-eigenvalue groups are zeroed, everything else is
/// kept. Idempotent by construction.
pub fn dephase_matrix(rho: &DensityMatrix, spec: &InteractionSpec) -> Result<DensityMatrix> {
    let basis = build_pointer_basis(spec);
    let grouping = grouping_required(&basis)?;
    if rho.dim() != grouping.eigenvalue_per_index.len() {
        return Err(Error::SpecLengthMismatch {
            spec_qubits: basis.n_qubits(),
            state_qubits: rho.dim().trailing_zeros() as usize,
        });
    }
    let mut m = rotate_matrix_to_pointer(rho.matrix().clone(), &basis);
    let ids = &grouping.group_of_index;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if ids[r] != ids[c] {
                m[(r, c)] = Complex64::ZERO;
            }
        }
    }
    DensityMatrix::new(rotate_matrix_from_pointer(m, &basis))
}

/// Von Neumann entropy (bits) of the infinite-time dephased state.
///
/// For a pure input the block of |c⟩⟨c| inside each eigenvalue group is the
/// outer product of the group-restricted coefficient vector, hence rank one
/// with eigenvalue equal to the group mass Σ|c_j|²; the entropy is the
/// Shannon entropy of the group masses. With all eigenvalues distinct this
/// reduces to −Σ|c_j|² log₂|c_j|².
pub fn final_entropy(state: &PureState, spec: &InteractionSpec) -> Result<f64> {
    let basis = build_pointer_basis(spec);
    final_entropy_with(state, &basis)
}

/// [`final_entropy`] against a prebuilt pointer basis.
pub fn final_entropy_with(state: &PureState, basis: &PointerBasis) -> Result<f64> {
    if state.n_qubits() != basis.n_qubits() {
        return Err(Error::SpecLengthMismatch {
            spec_qubits: basis.n_qubits(),
            state_qubits: state.n_qubits(),
        });
    }
    if let (Storage::Sparse { indices, values }, None) = (state.storage(), basis.grouping()) {
        return sparse_final_entropy(indices, values, basis);
    }
    match state.storage() {
        Storage::Sparse { indices, values }
            if basis
                .frame_kinds()
                .iter()
                .all(|k| *k != FrameKind::General) =>
        {
            sparse_final_entropy(indices, values, basis)
        }
        _ => {
            let grouping = grouping_required(basis)?;
            let coeffs = pointer_coefficients(state, basis)?;
            if grouping.groups.len() == coeffs.len() {
                return Ok(shannon_entropy_bits(coeffs.iter().map(|c| c.norm_sqr())));
            }
            let mut masses = vec![0.0f64; grouping.groups.len()];
            for (j, c) in coeffs.iter().enumerate() {
                masses[grouping.group_of_index[j] as usize] += c.norm_sqr();
            }
            Ok(shannon_entropy_bits(masses))
        }
    }
}

/// Sparse-support entropy path: needs every frame diagonal or antidiagonal,
/// so pointer indices are basis indices up to per-qubit bit flips.
fn sparse_final_entropy(
    indices: &[u64],
    values: &[Complex64],
    basis: &PointerBasis,
) -> Result<f64> {
    let n = basis.n_qubits();
    let kinds = basis.frame_kinds();
    let mut flip_mask = 0u64;
    for (i, kind) in kinds.iter().enumerate() {
        match kind {
            FrameKind::Diagonal => {}
            FrameKind::AntiDiagonal => flip_mask |= 1 << (n - 1 - i),
            FrameKind::General => {
                return Err(Error::SparseUnsupported(format!(
                    "qubit {} has a rotated eigenframe; sparse states support only \
                     computational-basis-aligned couplings",
                    i + 1
                )))
            }
        }
    }
    let mut entries: Vec<(f64, f64)> = indices
        .iter()
        .zip(values)
        .map(|(&j, v)| (basis.eigenvalue_of_index(j ^ flip_mask), v.norm_sqr()))
        .collect();
    entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let tol = basis.tolerance();
    let mut masses: Vec<f64> = Vec::with_capacity(entries.len());
    let mut prev = f64::NEG_INFINITY;
    for (e, mass) in entries {
        let scale = tol * 1.0_f64.max(e.abs().max(prev.abs()));
        if masses.is_empty() || e - prev > scale {
            masses.push(mass);
        } else {
            *masses.last_mut().unwrap() += mass;
        }
        prev = e;
    }
    Ok(shannon_entropy_bits(masses))
}

/// How the environmental mode sum is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionMode {
    /// Closed geometric sum over the infinite thermal ladder; periodic in time.
    ExactSeries,
    /// Integral over a continuum of modes up to a cutoff; coherences decay.
    ContinuumCutoff,
}

/// Thermal-environment parameters for finite-time evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionParams {
    /// Inverse temperature (1/energy), > 0.
    pub beta: f64,
    /// Oscillator frequency (energy, ħ = 1), > 0.
    pub omega: f64,
    pub mode: EvolutionMode,
    /// Mode cutoff; required in continuum mode.
    pub nu_cutoff: Option<u32>,
}

impl Default for EvolutionParams {
    fn default() -> Self {
        Self {
            beta: 1.0,
            omega: 1.0,
            mode: EvolutionMode::ExactSeries,
            nu_cutoff: None,
        }
    }
}

impl EvolutionParams {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) || !(self.omega > 0.0) {
            return Err(Error::BadEvolutionParams(format!(
                "beta and omega must be positive, got beta={}, omega={}",
                self.beta, self.omega
            )));
        }
        if self.mode == EvolutionMode::ContinuumCutoff && self.nu_cutoff.is_none() {
            return Err(Error::MissingCutoff);
        }
        Ok(())
    }
}

/// Thermal average of the phase acquired by a coherence with eigenvalue gap
/// `delta` after time `t`.
///
/// Exact-series mode: Σ_ν (1−q) q^ν e^{itνΔ} = (1−q) / (1 − q e^{itΔ}) with
/// q = e^{−βω}. Continuum mode: the same average over mode density
/// ∝ e^{−βων} on [0, ν_cutoff], evaluated in closed form. Always of modulus
/// ≤ 1, and exactly 1 when t = 0 or Δ = 0.
pub fn decoherence_factor(t: f64, delta: f64, params: &EvolutionParams) -> Result<Complex64> {
    params.validate()?;
    if t == 0.0 || delta == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let a = params.beta * params.omega;
    let factor = match params.mode {
        EvolutionMode::ExactSeries => {
            let q = (-a).exp();
            let denom = Complex64::new(1.0, 0.0) - Complex64::from_polar(q, t * delta);
            Complex64::new(1.0 - q, 0.0) / denom
        }
        EvolutionMode::ContinuumCutoff => {
            let nu_c = f64::from(params.nu_cutoff.unwrap());
            let z = Complex64::new(-a, t * delta);
            let numerator = (z * nu_c).exp() - Complex64::new(1.0, 0.0);
            let norm = a / (1.0 - (-a * nu_c).exp());
            norm * numerator / z
        }
    };
    let modulus = factor.norm();
    Ok(if modulus > 1.0 { factor / modulus } else { factor })
}

/// Reduced state at time `t`: pointer-basis entry (j, k) is
/// c_j c_k* · decoherence_factor(t, a_k − a_j), rotated back to the
/// computational basis.
pub fn evolve(
    state: &PureState,
    spec: &InteractionSpec,
    t: f64,
    params: &EvolutionParams,
) -> Result<DensityMatrix> {
    params.validate()?;
    check_spec_matches(state, spec)?;
    let basis = build_pointer_basis(spec);
    let grouping = grouping_required(&basis)?;
    let coeffs = pointer_coefficients(state, &basis)?;
    let dim = coeffs.len();
    let eigs = &grouping.eigenvalue_per_index;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for j in 0..dim {
        for k in 0..dim {
            let weight = coeffs[j] * coeffs[k].conj();
            if weight.norm_sqr() == 0.0 {
                continue;
            }
            m[(j, k)] = weight * decoherence_factor(t, eigs[k] - eigs[j], params)?;
        }
    }
    DensityMatrix::new(rotate_matrix_from_pointer(m, &basis))
}
