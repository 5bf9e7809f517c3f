//! Dense n-qubit density matrices with local operator application.
//!
//! Qubit 0 is the most significant bit of a basis index.

use crate::error::{Result, TbsfError};
use crate::linalg::{hermiticity_error, min_eigenvalue, CMatrix, ONE, ZERO};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

/// Basis indices with all target bits cleared, and the offset of each local
/// target configuration (`targets[0]` most significant).
fn local_layout(n: usize, targets: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mask: usize = targets.iter().map(|&q| 1 << (n - 1 - q)).sum();
    let bases = (0..1usize << n).filter(|i| i & mask == 0).collect();
    let k = targets.len();
    let offsets = (0..1usize << k)
        .map(|t| {
            (0..k)
                .filter(|&j| t >> (k - 1 - j) & 1 == 1)
                .map(|j| 1 << (n - 1 - targets[j]))
                .sum()
        })
        .collect();
    (bases, offsets)
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        let mut matrix = CMatrix::zeros(dim, dim);
        matrix[(0, 0)] = ONE;
        Self { n_qubits, matrix }
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if !dim.is_power_of_two() || matrix.ncols() != dim {
            return Err(TbsfError::DimensionMismatch(format!(
                "{}x{} is not an n-qubit operator",
                dim,
                matrix.ncols()
            )));
        }
        let dm = Self {
            n_qubits: dim.trailing_zeros() as usize,
            matrix,
        };
        dm.validate()?;
        Ok(dm)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-10 {
            return Err(TbsfError::InvariantViolation(format!("trace {tr} is not 1")));
        }
        if hermiticity_error(&self.matrix) > 1e-10 {
            return Err(TbsfError::InvariantViolation("density matrix is not Hermitian".into()));
        }
        let min = min_eigenvalue(&self.matrix);
        if min < -1e-10 {
            return Err(TbsfError::InvariantViolation(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub(crate) fn scale(&mut self, s: f64) {
        self.matrix.scale_mut(s);
    }

    /// `ρ ↦ A ρ B†` with `A`, `B` acting on `targets`.
    fn sandwich(&self, targets: &[usize], a: &CMatrix, b: &CMatrix) -> CMatrix {
        let (bases, offsets) = local_layout(self.n_qubits, targets);
        let k = offsets.len();
        let dim = self.matrix.nrows();
        let mut left = CMatrix::zeros(dim, dim);
        let mut buf = vec![ZERO; k];
        for col in 0..dim {
            for &base in &bases {
                for t in 0..k {
                    buf[t] = self.matrix[(base + offsets[t], col)];
                }
                for r in 0..k {
                    let mut acc = ZERO;
                    for t in 0..k {
                        acc += a[(r, t)] * buf[t];
                    }
                    left[(base + offsets[r], col)] = acc;
                }
            }
        }
        let mut out = CMatrix::zeros(dim, dim);
        for row in 0..dim {
            for &base in &bases {
                for t in 0..k {
                    buf[t] = left[(row, base + offsets[t])];
                }
                for r in 0..k {
                    let mut acc = ZERO;
                    for t in 0..k {
                        acc += buf[t] * b[(r, t)].conj();
                    }
                    out[(row, base + offsets[r])] = acc;
                }
            }
        }
        out
    }

    pub fn apply_unitary(&mut self, targets: &[usize], u: &CMatrix) {
        self.matrix = self.sandwich(targets, u, u);
    }

    /// Unnormalized `A ρ A†`.
    pub fn kraus_branch(&self, targets: &[usize], a: &CMatrix) -> Self {
        Self {
            n_qubits: self.n_qubits,
            matrix: self.sandwich(targets, a, a),
        }
    }

    /// `1/2^k ⊗ Tr_targets ρ`, placed back on `targets`.
    fn twirl(&self, targets: &[usize]) -> CMatrix {
        let (bases, offsets) = local_layout(self.n_qubits, targets);
        let k = offsets.len();
        let dim = self.matrix.nrows();
        let mut out = CMatrix::zeros(dim, dim);
        let inv = 1.0 / k as f64;
        for &rb in &bases {
            for &cb in &bases {
                let s: Complex64 = offsets.iter().map(|&o| self.matrix[(rb + o, cb + o)]).sum();
                for &o in &offsets {
                    out[(rb + o, cb + o)] = s * inv;
                }
            }
        }
        out
    }

    /// `ρ ↦ (1 − p) ρ + p · 1/2^k ⊗ Tr_targets ρ`.
    pub fn depolarize(&mut self, targets: &[usize], p: f64) {
        if p == 0.0 {
            return;
        }
        let tw = self.twirl(targets);
        self.matrix = self.matrix.scale(1.0 - p) + tw.scale(p);
    }

    /// Unnormalized projection of `qubit` onto `value`.
    pub fn project(&self, qubit: usize, value: u8) -> Self {
        let bit = 1 << (self.n_qubits - 1 - qubit);
        let keep = |i: usize| ((i & bit != 0) as u8) == value;
        let mut m = self.matrix.clone();
        let dim = m.nrows();
        for r in 0..dim {
            for c in 0..dim {
                if !(keep(r) && keep(c)) {
                    m[(r, c)] = ZERO;
                }
            }
        }
        Self {
            n_qubits: self.n_qubits,
            matrix: m,
        }
    }

    /// Trace out `qubit` and re-prepare it in `|0⟩`.
    pub fn reset(&mut self, qubit: usize) {
        let (bases, offsets) = local_layout(self.n_qubits, &[qubit]);
        let dim = self.matrix.nrows();
        let mut out = CMatrix::zeros(dim, dim);
        for &rb in &bases {
            for &cb in &bases {
                out[(rb, cb)] = self.matrix[(rb, cb)] + self.matrix[(rb + offsets[1], cb + offsets[1])];
            }
        }
        self.matrix = out;
    }

    /// Reduced state of `qubits`, in the given order.
    pub fn reduced(&self, qubits: &[usize]) -> CMatrix {
        let rest: Vec<usize> = (0..self.n_qubits).filter(|q| !qubits.contains(q)).collect();
        let (_, keep_off) = local_layout(self.n_qubits, qubits);
        let (_, rest_off) = local_layout(self.n_qubits, &rest);
        let k = keep_off.len();
        CMatrix::from_fn(k, k, |a, b| {
            rest_off
                .iter()
                .map(|&r| self.matrix[(keep_off[a] + r, keep_off[b] + r)])
                .sum()
        })
    }

    pub fn add_assign(&mut self, other: &DensityMatrix) {
        self.matrix += &other.matrix;
    }

    pub fn zeros_like(&self) -> Self {
        let dim = self.matrix.nrows();
        Self {
            n_qubits: self.n_qubits,
            matrix: CMatrix::zeros(dim, dim),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, kron, max_abs, random_density, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn embed(n: usize, targets: &[usize], u: &CMatrix) -> CMatrix {
        // reference: permute to put targets first, kron with identity, permute back
        let dim = 1 << n;
        let (bases, offsets) = local_layout(n, targets);
        let mut full = CMatrix::zeros(dim, dim);
        for &b in &bases {
            for (r, &or) in offsets.iter().enumerate() {
                for (c, &oc) in offsets.iter().enumerate() {
                    full[(b + or, b + oc)] = u[(r, c)];
                }
            }
        }
        full
    }

    #[test]
    fn local_application_matches_embedding() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let rho = DensityMatrix::from_matrix(random_density(8, 8, &mut rng)).unwrap();
        let u = random_unitary(4, &mut rng);
        let mut a = rho.clone();
        a.apply_unitary(&[2, 0], &u);
        let full = embed(3, &[2, 0], &u);
        let expected = &full * rho.matrix() * full.adjoint();
        assert!(max_abs(&(a.matrix() - expected)) < 1e-12);
    }

    #[test]
    fn embedding_on_leading_qubits_is_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let u = random_unitary(2, &mut rng);
        assert!(max_abs(&(embed(2, &[0], &u) - kron(&u, &identity(2)))) < 1e-15);
        assert!(max_abs(&(embed(2, &[1], &u) - kron(&identity(2), &u))) < 1e-15);
    }

    #[test]
    fn depolarizing_fixed_point_and_trace() {
        let mut mixed = DensityMatrix::from_matrix(identity(8).scale(0.125)).unwrap();
        mixed.depolarize(&[0, 2], 0.3);
        assert!(max_abs(&(mixed.matrix() - identity(8).scale(0.125))) < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let mut rho = DensityMatrix::from_matrix(random_density(8, 3, &mut rng)).unwrap();
        let before = rho.reduced(&[1]);
        rho.depolarize(&[0, 2], 1.0);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
        assert!(max_abs(&(rho.reduced(&[1]) - before)) < 1e-12);
        assert!(max_abs(&(rho.reduced(&[0, 2]) - identity(4).scale(0.25))) < 1e-12);
    }

    #[test]
    fn projections_and_reset() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let rho = DensityMatrix::from_matrix(random_density(4, 4, &mut rng)).unwrap();
        let p0 = rho.project(1, 0).trace();
        let p1 = rho.project(1, 1).trace();
        assert!((p0 + p1 - 1.0).abs() < 1e-12);
        assert!((p0 - rho.reduced(&[1])[(0, 0)].re).abs() < 1e-12);
        let mut r = rho.clone();
        r.reset(1);
        assert!((r.trace() - 1.0).abs() < 1e-12);
        assert!((r.reduced(&[1])[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(max_abs(&(r.reduced(&[0]) - rho.reduced(&[0]))) < 1e-12);
    }
}
