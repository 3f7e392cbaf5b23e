//! Dense complex kernel for the 2x2 and 4x4 Hermitian matrices used by the
//! channel and the protocols: arithmetic, traces, a cyclic Jacobi
//! eigensolver, positivity checks, and trace normalization.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity tolerance applied to eigensolver and density-matrix inputs.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Off-diagonal magnitude below which the Jacobi iteration stops.
pub const JACOBI_OFF_TOL: f64 = 1e-14;
/// Sweep cap for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Traces at or below this floor cannot be normalized away.
pub const TRACE_FLOOR: f64 = 1e-12;

const MAX_DIM: usize = 4;

/// Square complex matrix of dimension 2 or 4, row-major, fixed storage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: [Complex64; MAX_DIM * MAX_DIM],
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim == 2 || dim == 4, "supported dimensions are 2 and 4");
        Self { dim, data: [Complex64::ZERO; MAX_DIM * MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a 4x4 matrix from rows of real entries; test convenience.
    pub fn from_rows_re(rows: [[f64; 4]; 4]) -> Self {
        Self::from_fn(4, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        assert!(i < self.dim && j < self.dim);
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(i < self.dim && j < self.dim);
        self.data[i * self.dim + j] = v;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.dim, |i, j| self.get(i, j) + other.get(i, j)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.dim, |i, j| self.get(i, j) - other.get(i, j)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) * s)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) * s)
    }

    /// Hermitian part (M + M†)/2; exact on already-Hermitian input.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self.get(i, j) + self.get(j, i).conj()))
    }

    /// max_ij |m_ij - conj(m_ji)|, the deviation from Hermiticity.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                r = r.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        r
    }

    pub fn max_abs(&self) -> f64 {
        self.data[..self.dim * self.dim]
            .iter()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.data[..self.dim * self.dim]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: other.dim });
        }
        Ok(())
    }
}

/// Standard matrix product.
pub fn mat_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), actual: b.dim() });
    }
    let dim = a.dim();
    Ok(ComplexMatrix::from_fn(dim, |i, j| {
        (0..dim).map(|k| a.get(i, k) * b.get(k, j)).sum()
    }))
}

/// Sum of the diagonal entries.
pub fn trace(m: &ComplexMatrix) -> Complex64 {
    (0..m.dim()).map(|i| m.get(i, i)).sum()
}

/// psi† M psi. The vector length must match the matrix dimension.
pub fn expectation(psi: &[Complex64], m: &ComplexMatrix) -> Result<Complex64> {
    if psi.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), actual: psi.len() });
    }
    let mut acc = Complex64::ZERO;
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            acc += psi[i].conj() * m.get(i, j) * psi[j];
        }
    }
    Ok(acc)
}

/// Kronecker product of two 2x2 matrices, in (left ⊗ right) order.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != 2 || b.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: if a.dim() != 2 { a.dim() } else { b.dim() },
        });
    }
    Ok(ComplexMatrix::from_fn(4, |i, j| {
        a.get(i / 2, j / 2) * b.get(i % 2, j % 2)
    }))
}

/// Rank-1 projector |psi><psi|.
pub fn outer(psi: &[Complex64]) -> ComplexMatrix {
    assert!(psi.len() == 2 || psi.len() == 4);
    ComplexMatrix::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
}

/// Divides by the (real) trace; returns the normalized matrix and the raw trace.
pub fn normalize_trace(m: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let t = trace(m);
    if !(t.re > TRACE_FLOOR) {
        return Err(Error::DegenerateTrace { trace: t.re });
    }
    Ok((m.scale_re(1.0 / t.re), t.re))
}

/// True iff the smallest eigenvalue is at least -tol.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    let d = eigh(m)?;
    Ok(d.eigenvalues()[0] >= -tol)
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues,
/// orthonormal phase-fixed eigenvectors as columns.
#[derive(Clone, Copy, Debug)]
pub struct SpectralDecomp {
    dim: usize,
    eigenvalues: [f64; MAX_DIM],
    vectors: ComplexMatrix,
}

impl SpectralDecomp {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues[..self.dim]
    }

    /// Eigenvector for the k-th (ascending) eigenvalue; trailing entries zero.
    pub fn vector(&self, k: usize) -> [Complex64; MAX_DIM] {
        assert!(k < self.dim);
        let mut v = [Complex64::ZERO; MAX_DIM];
        for (i, slot) in v.iter_mut().enumerate().take(self.dim) {
            *slot = self.vectors.get(i, k);
        }
        v
    }

    /// Eigenvector matrix V with eigenvectors as columns.
    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// Σ_k λ_k |ψ_k><ψ_k|.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim);
        for k in 0..self.dim {
            let v = self.vector(k);
            let p = outer(&v[..self.dim]);
            m = m.add(&p.scale_re(self.eigenvalues[k])).expect("same dim");
        }
        m
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Rejects inputs whose Hermiticity residual exceeds `HERMITICITY_TOL`, then
/// iterates on the Hermitian part. Rotations sweep the pivots (p, q) in
/// lexicographic order until the largest off-diagonal magnitude drops below
/// `JACOBI_OFF_TOL`, capped at `JACOBI_MAX_SWEEPS`. Each eigenvector's phase
/// is fixed by making its largest-magnitude component (ties to the lowest
/// index) real and nonnegative.
pub fn eigh(m: &ComplexMatrix) -> Result<SpectralDecomp> {
    let residual = m.hermiticity_residual();
    if residual > HERMITICITY_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let dim = m.dim();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(dim);

    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if max_off_diagonal(&a) < JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..dim - 1 {
            for q in p + 1..dim {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && max_off_diagonal(&a) >= JACOBI_OFF_TOL {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            residual: max_off_diagonal(&a),
        });
    }

    // Ascending eigenvalue order, deterministic for equal values.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));

    let mut eigenvalues = [0.0; MAX_DIM];
    let mut vectors = ComplexMatrix::zeros(dim);
    for (k, &src) in order.iter().enumerate() {
        eigenvalues[k] = a.get(src, src).re;
        for i in 0..dim {
            vectors.set(i, k, v.get(i, src));
        }
    }

    for k in 0..dim {
        fix_phase(&mut vectors, k);
    }

    Ok(SpectralDecomp { dim, eigenvalues, vectors })
}

fn max_off_diagonal(a: &ComplexMatrix) -> f64 {
    let mut r: f64 = 0.0;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            if i != j {
                r = r.max(a.get(i, j).norm());
            }
        }
    }
    r
}

/// One Jacobi rotation zeroing the (p, q) entry: A <- U† A U, V <- V U with
/// U_pp = c, U_pq = s e^{iφ}, U_qp = -s e^{-iφ}, U_qq = c and φ = arg(A_pq).
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let w = a.get(p, q);
    let mag = w.norm();
    if mag == 0.0 {
        return;
    }
    let phase = w / mag;
    let zeta = (a.get(q, q).re - a.get(p, p).re) / (2.0 * mag);
    // Stable root of t^2 + 2 ζ t - 1 = 0 (smallest rotation angle).
    let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
    let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let dim = a.dim();
    for r in 0..dim {
        let arp = a.get(r, p);
        let arq = a.get(r, q);
        a.set(r, p, c * arp - s * phase.conj() * arq);
        a.set(r, q, s * phase * arp + c * arq);
    }
    for r in 0..dim {
        let apr = a.get(p, r);
        let aqr = a.get(q, r);
        a.set(p, r, c * apr - s * phase * aqr);
        a.set(q, r, s * phase.conj() * apr + c * aqr);
    }
    a.set(p, q, Complex64::ZERO);
    a.set(q, p, Complex64::ZERO);
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));

    for r in 0..dim {
        let vrp = v.get(r, p);
        let vrq = v.get(r, q);
        v.set(r, p, c * vrp - s * phase.conj() * vrq);
        v.set(r, q, s * phase * vrp + c * vrq);
    }
}

fn fix_phase(vectors: &mut ComplexMatrix, k: usize) {
    let dim = vectors.dim();
    let mut imax = 0;
    let mut best = 0.0;
    for i in 0..dim {
        let mag = vectors.get(i, k).norm();
        if mag > best {
            best = mag;
            imax = i;
        }
    }
    if best < 1e-12 {
        return; // zero column cannot occur for unitary V; guard anyway
    }
    let u = vectors.get(imax, k).conj() / best;
    for i in 0..dim {
        let z = vectors.get(i, k) * u;
        vectors.set(i, k, z);
    }
    // The pivot entry is now exactly real; clear rounding dust in .im.
    let pivot = vectors.get(imax, k);
    vectors.set(imax, k, Complex64::new(pivot.norm(), 0.0));
}

/// 4x4 Hermitian unit-trace state container.
///
/// Construction checks Hermiticity, unit trace, and finiteness. Positivity is
/// deliberately not enforced here: one of the printed closed-form states is
/// indefinite, so PSD is asserted by callers where it is actually guaranteed.
#[derive(Clone, Copy, Debug)]
pub struct DensityMatrix4(ComplexMatrix);

impl DensityMatrix4 {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, actual: m.dim() });
        }
        if !m.is_finite() {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        let residual = m.hermiticity_residual();
        if residual > HERMITICITY_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let t = trace(&m);
        if (t.re - 1.0).abs() > 1e-9 || t.im.abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "trace {} + {}i is not 1",
                t.re, t.im
            )));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        is_psd(&self.0, tol)
    }
}
