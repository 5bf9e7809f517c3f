//! Rank-4 complex tensors over a `d`-dimensional system.
//!
//! Entries are addressed as `(i, i', j, j')`: the lower pair `(i, i')`
//! carries the forward (preselection) indices and the upper pair `(j, j')`
//! the backward (postselection) indices. Both time-bidirectional states and
//! operation outcome tensors share this layout.
//!
//! # Flattening
//!
//! The tensor is stored as a `d² × d²` matrix with
//!
//! ```text
//! row    = i  * d + j
//! column = i' * d + j'
//! ```
//!
//! i.e. the forward index is the slow coordinate ("forward-slow"). With this
//! layout a time-bidirectional state is a bipartite density matrix on
//! `forward ⊗ backward`, and an outcome tensor built from Kraus operators
//! `A` is the Choi-type matrix `Σ vec(Aᵀ) vec(Aᵀ)†`.

use crate::linalg::CMatrix;
use num_complex::Complex64;

/// Tag written into serialized tensors.
pub const INDEX_CONVENTION: &str = "forward-slow";

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor4 {
    dim: usize,
    flat: CMatrix,
}

impl ComplexTensor4 {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            flat: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize, usize) -> Complex64) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for ip in 0..dim {
                for j in 0..dim {
                    for jp in 0..dim {
                        t.flat[(i * dim + j, ip * dim + jp)] = f(i, ip, j, jp);
                    }
                }
            }
        }
        t
    }

    /// Wrap an already flattened `d² × d²` matrix.
    ///
    /// Panics if the matrix is not square with a perfect-square side.
    pub fn from_flat(flat: CMatrix) -> Self {
        let n = flat.nrows();
        assert_eq!(n, flat.ncols(), "flattened tensor must be square");
        let dim = (n as f64).sqrt().round() as usize;
        assert_eq!(dim * dim, n, "flattened tensor side must be d²");
        Self { dim, flat }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, ip: usize, j: usize, jp: usize) -> Complex64 {
        self.flat[(i * self.dim + j, ip * self.dim + jp)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, ip: usize, j: usize, jp: usize, value: Complex64) {
        let d = self.dim;
        self.flat[(i * d + j, ip * d + jp)] = value;
    }

    pub fn flat(&self) -> &CMatrix {
        &self.flat
    }

    pub fn into_flat(self) -> CMatrix {
        self.flat
    }

    /// Entries in lexicographic `(i, i', j, j')` order.
    pub fn entries(&self) -> Vec<Complex64> {
        let d = self.dim;
        let mut out = Vec::with_capacity(d * d * d * d);
        for i in 0..d {
            for ip in 0..d {
                for j in 0..d {
                    for jp in 0..d {
                        out.push(self.get(i, ip, j, jp));
                    }
                }
            }
        }
        out
    }

    pub fn from_entries(dim: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), dim.pow(4));
        let d = dim;
        Self::from_fn(dim, |i, ip, j, jp| entries[((i * d + ip) * d + j) * d + jp])
    }

    /// Full contraction `Σ K^{ii'}_{jj'} η_{ii'}^{jj'}`, written `K • η`.
    pub fn contract(&self, other: &ComplexTensor4) -> Complex64 {
        assert_eq!(self.dim, other.dim, "contraction of tensors with different dims");
        self.flat.iter().zip(other.flat.iter()).map(|(a, b)| a * b).sum()
    }

    /// `Σ_{i,j} T_{ii}^{jj}`.
    pub fn full_trace(&self) -> Complex64 {
        self.flat.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            flat: self.flat.scale(s),
        }
    }

    pub fn add(&self, other: &ComplexTensor4) -> Self {
        Self {
            dim: self.dim,
            flat: &self.flat + &other.flat,
        }
    }

    /// Tensor for a pair of single-system operators,
    /// `T^{ii'}_{jj'} = A_{ji} · conj(B_{j'i'})`.
    ///
    /// For `A = B` a Kraus operator this is the outcome tensor of that
    /// branch; contracting `T(O, 1)` with a state gives the weak-value
    /// numerator.
    pub fn from_operator_pair(a: &CMatrix, b: &CMatrix) -> Self {
        let dim = a.nrows();
        Self::from_fn(dim, |i, ip, j, jp| a[(j, i)] * b[(jp, ip)].conj())
    }

    pub fn max_abs_diff(&self, other: &ComplexTensor4) -> f64 {
        self.flat
            .iter()
            .zip(other.flat.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.flat.iter().all(|z| z.norm() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn flattening_round_trip() {
        let d = 3;
        let t = ComplexTensor4::from_fn(d, |i, ip, j, jp| c((i * 27 + ip * 9 + j * 3 + jp) as f64, -(jp as f64)));
        for i in 0..d {
            for ip in 0..d {
                for j in 0..d {
                    for jp in 0..d {
                        let row = i * d + j;
                        let col = ip * d + jp;
                        assert_eq!(t.flat()[(row, col)], t.get(i, ip, j, jp));
                    }
                }
            }
        }
        let back = ComplexTensor4::from_entries(d, &t.entries());
        assert_eq!(back, t);
        let again = ComplexTensor4::from_flat(t.flat().clone());
        assert_eq!(again, t);
    }

    #[test]
    fn flattening_is_a_bijection() {
        let d = 2;
        let mut seen = std::collections::HashSet::new();
        for i in 0..d {
            for ip in 0..d {
                for j in 0..d {
                    for jp in 0..d {
                        assert!(seen.insert((i * d + j, ip * d + jp)));
                    }
                }
            }
        }
        assert_eq!(seen.len(), 16);
    }
}
