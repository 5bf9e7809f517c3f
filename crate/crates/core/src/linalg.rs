//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn from_rows(rows: &[&[Complex64]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

pub fn vector(entries: &[Complex64]) -> CVector {
    CVector::from_column_slice(entries)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// |v⟩⟨v|
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Column `k` of the returned matrix is the eigenvector for value `k`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitize(m).symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.last().copied().unwrap_or(0.0)
}

/// Reassemble `Σ_k f(λ_k) |v_k⟩⟨v_k|`.
pub fn spectral_map(values: &[f64], vectors: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let n = vectors.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let w = f(lambda);
        if w == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        out += (v * v.adjoint()).scale(w);
    }
    out
}

/// Principal square root of a PSD matrix; tiny negative eigenvalues are clipped.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    spectral_map(&values, &vectors, |x| x.max(0.0).sqrt())
}

/// Clip negative eigenvalues to zero and rescale to unit trace.
pub fn project_psd(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let clipped = spectral_map(&values, &vectors, |x| x.max(0.0));
    let tr = clipped.trace().re;
    clipped.unscale(tr)
}

/// `Tr_B` of an operator on `A ⊗ B` with `A` the slow index.
pub fn partial_trace_second(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |i, ip| (0..db).map(|k| m[(i * db + k, ip * db + k)]).sum())
}

/// `Tr_A` of an operator on `A ⊗ B` with `A` the slow index.
pub fn partial_trace_first(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |j, jp| (0..da).map(|k| m[(k * db + j, k * db + jp)]).sum())
}

pub fn unitarity_error(u: &CMatrix) -> f64 {
    max_abs(&(u.adjoint() * u - identity(u.ncols())))
}

/// Trace norm distance `½‖a − b‖₁` between Hermitian matrices.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let (values, _) = hermitian_eigen(&(a - b));
    0.5 * values.iter().map(|x| x.abs()).sum::<f64>()
}

/// Hilbert–Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Extend `v` to a unitary whose first column is `v / ‖v‖`.
pub fn unitary_with_first_column(v: &CVector) -> CMatrix {
    complete_isometry(&CMatrix::from_columns(&[v.normalize()]))
}

/// Complete a set of orthonormal columns (an isometry) to a square unitary.
pub fn complete_isometry(iso: &CMatrix) -> CMatrix {
    let n = iso.nrows();
    let mut cols: Vec<CVector> = iso.column_iter().map(|c| c.into_owned()).collect();
    for k in 0..n {
        if cols.len() == n {
            break;
        }
        let mut e = CVector::zeros(n);
        e[k] = ONE;
        for q in &cols {
            let proj = q.dotc(&e);
            e -= q * proj;
        }
        let norm = e.norm();
        if norm > 1e-8 {
            cols.push(e.unscale(norm));
        }
    }
    CMatrix::from_columns(&cols)
}

pub fn random_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        c(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase fix).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = random_gaussian_matrix(n, n, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_pure_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let g = random_gaussian_matrix(n, 1, rng);
    let v = CVector::from_iterator(n, g.iter().copied());
    v.normalize()
}

/// Random density matrix of the given rank (Ginibre ensemble).
pub fn random_density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = random_gaussian_matrix(n, rank.max(1), rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    m.unscale(tr)
}

/// Random effect `0 ≤ E ≤ 1` with spectrum drawn uniformly in `[lo, 1]`.
pub fn random_effect<R: Rng + ?Sized>(n: usize, lo: f64, rng: &mut R) -> CMatrix {
    let u = random_unitary(n, rng);
    let mut d = CMatrix::zeros(n, n);
    for k in 0..n {
        d[(k, k)] = c(rng.random_range(lo..=1.0), 0.0);
    }
    &u * d * u.adjoint()
}

/// Random POVM with `k` effects on an `n`-dimensional space.
pub fn random_povm<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<CMatrix> {
    let raw: Vec<CMatrix> = (0..k)
        .map(|_| {
            let g = random_gaussian_matrix(n, n, rng);
            &g * g.adjoint()
        })
        .collect();
    let total = raw.iter().fold(CMatrix::zeros(n, n), |acc, m| acc + m);
    let (values, vectors) = hermitian_eigen(&total);
    let inv_sqrt = spectral_map(&values, &vectors, |x| 1.0 / x.sqrt());
    raw.iter().map(|m| hermitize(&(&inv_sqrt * m * &inv_sqrt))).collect()
}

pub fn pauli_x() -> CMatrix {
    from_rows(&[&[ZERO, ONE], &[ONE, ZERO]])
}

pub fn pauli_y() -> CMatrix {
    from_rows(&[&[ZERO, -I], &[I, ZERO]])
}

pub fn pauli_z() -> CMatrix {
    from_rows(&[&[ONE, ZERO], &[ZERO, -ONE]])
}
