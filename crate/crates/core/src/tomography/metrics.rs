//! Reconstruction quality measures on density matrices and flattened `η`.

use crate::linalg::{hermitian_eigen, spectral_map, CMatrix};

pub use crate::linalg::trace_distance;

/// Eigenvalues below this fraction of the trace are treated as zero before
/// taking square roots, so rank-deficient inputs do not pick up `√ε` noise.
const SQRT_CUTOFF: f64 = 1e-14;

fn clean_sqrt(m: &CMatrix) -> CMatrix {
    let (values, vectors) = hermitian_eigen(m);
    let cut = SQRT_CUTOFF * values.iter().map(|v| v.abs()).sum::<f64>();
    spectral_map(&values, &vectors, |x| if x > cut { x.sqrt() } else { 0.0 })
}

/// Uhlmann fidelity `(Tr √(√a b √a))²`, clamped to `[0, 1]`.
///
/// Evaluated as the squared nuclear norm of `√a √b`.
pub fn fidelity(a: &CMatrix, b: &CMatrix) -> f64 {
    let m = clean_sqrt(a) * clean_sqrt(b);
    let root: f64 = m.singular_values().iter().sum();
    (root * root).clamp(0.0, 1.0)
}

pub fn purity(rho: &CMatrix) -> f64 {
    (rho * rho).trace().re
}

/// `1 − Tr ρ²`, clamped at zero against rounding.
pub fn linear_entropy(rho: &CMatrix) -> f64 {
    (1.0 - purity(rho)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, outer, random_density, random_pure_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let psi = random_pure_state(2, &mut rng);
        let pure = outer(&psi);
        assert!((fidelity(&pure, &pure) - 1.0).abs() < 1e-12);
        assert!(linear_entropy(&pure).abs() < 1e-12);
        assert!((linear_entropy(&identity(2).scale(0.5)) - 0.5).abs() < 1e-15);
        assert!((linear_entropy(&identity(4).scale(0.25)) - 0.75).abs() < 1e-15);
        for f in [0.0, 0.3, 0.72, 1.0] {
            let rho = pure.scale(f) + identity(2).scale((1.0 - f) / 2.0);
            // ⟨ψ|ρ|ψ⟩ evaluated directly
            let overlap = (psi.adjoint() * &rho * &psi)[(0, 0)].re;
            assert!((fidelity(&rho, &pure) - (1.0 + f) / 2.0).abs() < 1e-10);
            assert!((overlap - (1.0 + f) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_fidelity_is_symmetric_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let a = random_density(4, 4, &mut rng);
            let b = random_density(4, 2, &mut rng);
            let fab = fidelity(&a, &b);
            assert!((fab - fidelity(&b, &a)).abs() < 1e-8);
            assert!((0.0..=1.0).contains(&fab));
            let s = linear_entropy(&a);
            assert!((0.0..=0.75 + 1e-12).contains(&s));
        }
    }
}
