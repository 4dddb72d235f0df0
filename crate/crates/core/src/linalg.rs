//! Dense complex linear algebra for small multi-qubit systems.
//!
//! Everything is dense `nalgebra` storage over `Complex64`; the systems of
//! interest are a handful of qubits, so no sparsity is attempted. Qubit 0 is
//! the leftmost (most significant) tensor factor throughout, which makes
//! `kron(a, b)` apply `a` to the more significant subsystem and gives basis
//! index `i` the bit layout `q0 q1 ... q_{n-1}` from high to low.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol::Tolerances;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Largest operator dimension the dense routines accept (2^14).
pub const DIM_LIMIT: usize = 1 << 14;

/// Complex number from real and imaginary parts.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// 2x2 identity.
pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Pauli X.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

/// Pauli Y.
pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
}

/// Pauli Z.
pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
}

/// Pure state over a power-of-two dimensional register.
///
/// Construction validates the dimension and the norm, so a value of this type
/// is always a normalized state of a definite qubit count.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    amplitudes: CVector,
    n_qubits: usize,
}

impl QuantumState {
    /// Validating constructor with the default tolerances.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerances(amplitudes, &Tolerances::default())
    }

    /// Validating constructor with an explicit tolerance bundle.
    pub fn with_tolerances(amplitudes: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { len });
        }
        if len > DIM_LIMIT {
            return Err(Error::DimensionLimit {
                dim: len,
                limit: DIM_LIMIT,
            });
        }
        let v = CVector::from_vec(amplitudes);
        let deviation = (v.norm_squared() - 1.0).abs();
        if deviation > tol.algebraic {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self::trusted(v))
    }

    /// Validating constructor from an existing vector.
    pub fn from_vector(v: CVector) -> Result<Self> {
        Self::new(v.iter().copied().collect())
    }

    /// Computational basis state |index> over `n_qubits` qubits.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize
            .checked_shl(n_qubits as u32)
            .filter(|&d| d <= DIM_LIMIT)
            .ok_or(Error::DimensionLimit {
                dim: usize::MAX,
                limit: DIM_LIMIT,
            })?;
        if index >= dim {
            return Err(Error::InvalidIndices {
                reason: format!("basis index {index} out of range for {n_qubits} qubits"),
            });
        }
        let mut v = CVector::zeros(dim);
        v[index] = c64(1.0, 0.0);
        Ok(Self::trusted(v))
    }

    /// Internal constructor for vectors already known to be valid states
    /// (e.g. the image of a valid state under a unitary).
    pub(crate) fn trusted(amplitudes: CVector) -> Self {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        Self {
            amplitudes,
            n_qubits,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, basis_index: usize) -> Complex64 {
        self.amplitudes[basis_index]
    }

    /// Bit of `basis_index` belonging to `qubit` under the MSB-first layout.
    #[inline]
    pub fn qubit_bit(&self, basis_index: usize, qubit: usize) -> usize {
        (basis_index >> (self.n_qubits - 1 - qubit)) & 1
    }

    /// Probability that a computational-basis measurement of `qubit` gives 1.
    pub fn probability_of_one(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.n_qubits {
            return Err(Error::InvalidIndices {
                reason: format!("qubit {qubit} out of range for {} qubits", self.n_qubits),
            });
        }
        let mut p = 0.0;
        for i in 0..self.dim() {
            if self.qubit_bit(i, qubit) == 1 {
                p += self.amplitudes[i].norm_sqr();
            }
        }
        Ok(p)
    }

    /// Outer product |psi><psi| as a density matrix.
    pub fn density_matrix(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }
}

/// Square complex matrix validated to be Hermitian at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    /// Validating constructor with the default tolerances.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(matrix, &Tolerances::default())
    }

    /// Validating constructor with an explicit tolerance bundle. Rejects
    /// non-square and non-Hermitian input with the location of the worst
    /// symmetry violation.
    pub fn with_tolerances(matrix: CMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows().max(1),
                actual: matrix.ncols(),
            });
        }
        if matrix.nrows() > DIM_LIMIT {
            return Err(Error::DimensionLimit {
                dim: matrix.nrows(),
                limit: DIM_LIMIT,
            });
        }
        let mut worst = 0.0;
        let mut at = (0, 0);
        for i in 0..matrix.nrows() {
            for j in i..matrix.ncols() {
                let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if dev > worst {
                    worst = dev;
                    at = (i, j);
                }
            }
        }
        if worst > tol.algebraic {
            return Err(Error::NotHermitian {
                deviation: worst,
                row: at.0,
                col: at.1,
            });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Spectrum {
    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, ordered like the eigenvalues.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// The k-th eigenvector as an owned column.
    pub fn eigenvector(&self, k: usize) -> CVector {
        self.eigenvectors.column(k).into_owned()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Gap between the two lowest eigenvalues.
    pub fn ground_gap(&self) -> f64 {
        self.eigenvalues[1] - self.eigenvalues[0]
    }

    /// Number of leading eigenvalues within `window` of the smallest one;
    /// together their eigenvectors span the ground manifold.
    pub fn ground_cluster_size(&self, window: f64) -> usize {
        let e0 = self.eigenvalues[0];
        self.eigenvalues
            .iter()
            .take_while(|&&e| e - e0 <= window)
            .count()
    }

    /// Apply exp(-i H dt) to a vector via the eigenbasis — two matrix-vector
    /// products instead of assembling the full evolution operator.
    pub fn evolve_vector(&self, dt: f64, v: &CVector) -> CVector {
        let mut coeffs = self.eigenvectors.adjoint() * v;
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            coeffs[k] *= Complex64::from_polar(1.0, -lambda * dt);
        }
        &self.eigenvectors * coeffs
    }

    /// exp(-i H dt) assembled from the decomposition (exact for Hermitian H).
    pub fn evolution_operator(&self, dt: f64) -> CMatrix {
        let d = self.eigenvalues.len();
        // V diag(e^{-i lambda dt}) V^dagger without forming the diagonal matrix
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * dt);
            for i in 0..d {
                scaled[(i, k)] *= phase;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Hermitian eigendecomposition, eigenvalues sorted ascending.
///
/// Implemented as cyclic complex Jacobi rotations rather than through the
/// library's tridiagonalize-and-iterate path: the propagator diagonalizes
/// millions of small matrices whose spectra are exactly doubly degenerate,
/// and in that regime the library solver was observed to return orthonormal
/// columns that are not eigenvectors at all (residuals of order one) on a
/// small fraction of inputs. Jacobi conjugates the matrix by explicit 2x2
/// unitaries until it is diagonal, so its accumulated basis is unitary by
/// construction and every column satisfies `H v = lambda v` to roundoff, at
/// any degeneracy.
pub fn eigh(h: &HermitianOperator) -> Spectrum {
    let d = h.dim();
    // Scrub roundoff-level asymmetry so the invariants below are exact.
    let mut m = (h.matrix() + h.matrix().adjoint()) * c64(0.5, 0.0);
    let mut v = identity(d);
    // The Frobenius norm is invariant under the conjugations, so thresholds
    // derived from it stay meaningful throughout.
    let norm = m.norm();
    let off_target = f64::EPSILON * norm;
    let pivot_skip = 1e-18 * norm;
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += m[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() <= off_target {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= pivot_skip {
                    continue;
                }
                // Unitary G that zeroes the (p, q) entry: strip the phase of
                // the pivot, then rotate by the classic symmetric-Jacobi
                // angle t = tan(theta), the smaller root of t^2 + 2 tau t = 1.
                let phase = apq / c64(r, 0.0);
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q);
                // update M <- G^dagger M G and accumulate V <- V G.
                let gc = c64(c, 0.0);
                let gs_conj = phase.conj() * s;
                let gcp = phase.conj() * c;
                for i in 0..d {
                    if i == p || i == q {
                        continue;
                    }
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * gc - miq * gs_conj;
                    m[(i, q)] = mip * s + miq * gcp;
                    m[(p, i)] = m[(i, p)].conj();
                    m[(q, i)] = m[(i, q)].conj();
                }
                m[(p, p)] = c64(app - t * r, 0.0);
                m[(q, q)] = c64(aqq + t * r, 0.0);
                m[(p, q)] = c64(0.0, 0.0);
                m[(q, p)] = c64(0.0, 0.0);
                for i in 0..d {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * gc - viq * gs_conj;
                    v[(i, q)] = vip * s + viq * gcp;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        m[(a, a)]
            .re
            .partial_cmp(&m[(b, b)].re)
            .expect("Hermitian eigenvalues are real")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| m[(k, k)].re).collect();
    let mut eigenvectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &v.column(src));
    }
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// exp(-i h dt) through the spectral decomposition.
pub fn step_unitary(h: &HermitianOperator, dt: f64) -> CMatrix {
    eigh(h).evolution_operator(dt)
}

/// Kronecker product; `a` acts on the more significant subsystem.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let dim = a
        .nrows()
        .checked_mul(b.nrows())
        .ok_or(Error::DimensionLimit {
            dim: usize::MAX,
            limit: DIM_LIMIT,
        })?;
    if dim > DIM_LIMIT {
        return Err(Error::DimensionLimit {
            dim,
            limit: DIM_LIMIT,
        });
    }
    Ok(a.kronecker(b))
}

/// Embed `op` (acting on the ordered qubit list `targets`) into an
/// `n_qubits` register, identity elsewhere.
///
/// `targets[0]` corresponds to the most significant qubit of `op`'s own
/// register, so embeddings respect the ordering of the target list rather
/// than their numeric order.
pub fn embed(op: &CMatrix, targets: &[usize], n_qubits: usize) -> Result<CMatrix> {
    let k = targets.len();
    if op.nrows() != op.ncols() {
        return Err(Error::DimensionMismatch {
            expected: op.nrows(),
            actual: op.ncols(),
        });
    }
    if k > n_qubits || op.nrows() != 1 << k {
        return Err(Error::DimensionMismatch {
            expected: 1 << k,
            actual: op.nrows(),
        });
    }
    let dim = 1usize
        .checked_shl(n_qubits as u32)
        .filter(|&d| d <= DIM_LIMIT)
        .ok_or(Error::DimensionLimit {
            dim: usize::MAX,
            limit: DIM_LIMIT,
        })?;
    for (i, &q) in targets.iter().enumerate() {
        if q >= n_qubits {
            return Err(Error::InvalidIndices {
                reason: format!("target qubit {q} out of range for {n_qubits} qubits"),
            });
        }
        if targets[..i].contains(&q) {
            return Err(Error::InvalidIndices {
                reason: format!("target qubit {q} listed twice"),
            });
        }
    }
    let pos = |q: usize| n_qubits - 1 - q; // bit position under MSB-first layout
    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        let mut i_t = 0usize;
        for (i, &q) in targets.iter().enumerate() {
            i_t |= ((row >> pos(q)) & 1) << (k - 1 - i);
        }
        for j_t in 0..(1 << k) {
            let mut col = row;
            for (i, &q) in targets.iter().enumerate() {
                let bit = (j_t >> (k - 1 - i)) & 1;
                col = (col & !(1 << pos(q))) | (bit << pos(q));
            }
            out[(row, col)] = op[(i_t, j_t)];
        }
    }
    Ok(out)
}

/// |<a|b>|^2 for two states of equal dimension.
pub fn fidelity(a: &QuantumState, b: &QuantumState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    Ok(a.amplitudes().dotc(b.amplitudes()).norm_sqr())
}

/// Max-norm distance between `a` and `b` after the optimal global phase is
/// applied to `b`. Useful for unitary comparisons that should ignore an
/// overall phase.
pub fn global_phase_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let trace = (b.adjoint() * a).trace();
    let phase = if trace.norm() > 1e-9 {
        trace / trace.norm()
    } else {
        // fall back to aligning the largest entry of b
        let mut best = (0, 0);
        let mut mag = 0.0;
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                if b[(i, j)].norm() > mag {
                    mag = b[(i, j)].norm();
                    best = (i, j);
                }
            }
        }
        if mag == 0.0 {
            c64(1.0, 0.0)
        } else {
            let r = a[best] / b[best];
            if r.norm() == 0.0 {
                c64(1.0, 0.0)
            } else {
                r / r.norm()
            }
        }
    };
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)] * phase).norm());
        }
    }
    worst
}
