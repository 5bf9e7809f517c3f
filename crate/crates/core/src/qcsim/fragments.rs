//! Measurement fragments used by the tomography circuits.

use super::circuit::{Circuit, Op};
use crate::linalg::{c, complete_isometry, CMatrix, CVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliBasis {
    X,
    Y,
    Z,
}

impl PauliBasis {
    pub const ALL: [PauliBasis; 3] = [PauliBasis::X, PauliBasis::Y, PauliBasis::Z];

    pub fn matrix(self) -> CMatrix {
        match self {
            PauliBasis::X => crate::linalg::pauli_x(),
            PauliBasis::Y => crate::linalg::pauli_y(),
            PauliBasis::Z => crate::linalg::pauli_z(),
        }
    }

    pub fn letter(self) -> char {
        match self {
            PauliBasis::X => 'x',
            PauliBasis::Y => 'y',
            PauliBasis::Z => 'z',
        }
    }

    /// `B_r` maps the `+1` eigenvector of `σ_r` to `|0⟩` and the `−1` one to `|1⟩`.
    fn basis_change(self, c: &mut Circuit, q: usize, inverse: bool) {
        let s = if inverse { -1.0 } else { 1.0 };
        match self {
            PauliBasis::X => {
                c.ry(q, -s * FRAC_PI_2);
            }
            PauliBasis::Y => {
                c.rx(q, s * FRAC_PI_2);
            }
            PauliBasis::Z => {}
        }
    }
}

/// Measure `σ_r` on `target` through `ancilla` (which must be in `|0⟩`),
/// leaving `target` in the corresponding eigenstate. Bit 0 ↔ `+1`.
pub fn nondestructive_pauli(c: &mut Circuit, target: usize, basis: PauliBasis, ancilla: usize, bit: impl Into<String>) {
    basis.basis_change(c, target, false);
    c.cnot(target, ancilla);
    basis.basis_change(c, target, true);
    c.measure(ancilla, bit);
}

pub fn sic_theta() -> f64 {
    (1.0 / 3f64.sqrt()).acos()
}

/// Tetrahedron states `ψ(μ₁, μ₂) = X^{μ₂} Z^{μ₁} (cos θ/2 |0⟩ + e^{−iπ/4} sin θ/2 |1⟩)`,
/// indexed by `2μ₁ + μ₂`.
pub fn sic_states() -> [CVector; 4] {
    let t = sic_theta() / 2.0;
    let phase = c(FRAC_PI_4.cos(), -FRAC_PI_4.sin());
    let a = c(t.cos(), 0.0);
    let b = phase * t.sin();
    [
        CVector::from_vec(vec![a, b]),
        CVector::from_vec(vec![b, a]),
        CVector::from_vec(vec![a, -b]),
        CVector::from_vec(vec![-b, a]),
    ]
}

/// `A(μ) = (1/2√2) |ψ(μ₁μ₂)⟩⟨ψ̄(μ₃μ₄)|` with `μ = [μ₁, μ₂, μ₃, μ₄]`.
pub fn sic_kraus_operators() -> Vec<([u8; 4], CMatrix)> {
    let psi = sic_states();
    let norm = 1.0 / (2.0 * 2f64.sqrt());
    (0..16u8)
        .map(|m| {
            let mu = [m >> 3 & 1, m >> 2 & 1, m >> 1 & 1, m & 1];
            let out = &psi[(2 * mu[0] + mu[1]) as usize];
            let inp = &psi[(2 * mu[2] + mu[3]) as usize];
            // ⟨ψ̄| is the plain transpose of ψ
            (mu, (out * inp.transpose()).scale(norm))
        })
        .collect()
}

/// Two-qubit unitary on `(target, ancilla)` with
/// `W|x⟩|0⟩ = Σ_b (ψ_b)_x/√2 |b⟩`, so a computational readout of the pair
/// realizes the effects `½|ψ̄_b⟩⟨ψ̄_b|` on the target.
pub fn sic_naimark_unitary() -> CMatrix {
    let psi = sic_states();
    let s = 0.5f64.sqrt();
    let iso = CMatrix::from_fn(4, 2, |b, x| psi[b][x] * s);
    let full = complete_isometry(&iso);
    // move the isometry columns to the ancilla-0 inputs |x0⟩ = columns 0 and 2
    CMatrix::from_columns(&[full.column(0), full.column(2), full.column(1), full.column(3)])
}

/// Prepare `ψ(0,0)` on a qubit in `|0⟩`: `R_z(−π/4) R_y(θ)` up to global phase.
pub fn prepare_sic_reference(c: &mut Circuit, q: usize) {
    c.ry(q, sic_theta()).rz(q, -FRAC_PI_4);
}

/// Gate-level doubled SIC measurement on `target` with two ancillas in `|0⟩`.
/// Writes `bits = [μ₁, μ₂, μ₃, μ₄]`; the ancillas are reused after a reset.
pub fn doubled_sic_measurement(c: &mut Circuit, target: usize, ancillas: [usize; 2], bits: [String; 4]) {
    let [a0, a1] = ancillas;
    let [m1, m2, m3, m4] = bits;
    c.unitary(vec![target, a0], sic_naimark_unitary());
    c.cnot(target, a1);
    c.measure(a1, m3).measure(a0, m4);
    c.reset(target).reset(a0).reset(a1);
    prepare_sic_reference(c, target);
    c.h(a0).h(a1);
    // CZ(a0, target) followed by CNOT(a1, target) applies X^{μ₂} Z^{μ₁}
    c.h(target).cnot(a0, target).h(target);
    c.cnot(a1, target);
    c.measure(a0, m1).measure(a1, m2);
    c.reset(a0).reset(a1);
}

/// Kraus-level equivalent of [`doubled_sic_measurement`].
pub fn sic_kraus(c: &mut Circuit, target: usize, bits: [String; 4]) {
    c.push(Op::SicKraus { qubit: target, bits });
}

pub fn sic_bit_names(prefix: &str) -> [String; 4] {
    [1, 2, 3, 4].map(|k| format!("{prefix}mu{k}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_rows, identity, kron, max_abs, outer, unitarity_error, ONE, ZERO};
    use crate::measurement::{build_indirect, projective_set, HermitianObservable};
    use crate::qcsim::{exact_branches, exact_outcome_distribution, NoiseModel};
    use std::collections::BTreeMap;

    #[test]
    fn tetrahedron_overlaps() {
        let psi = sic_states();
        for a in 0..4 {
            assert!((psi[a].norm() - 1.0).abs() < 1e-12);
            for b in 0..a {
                assert!((psi[a].dotc(&psi[b]).norm_sqr() - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn naimark_unitary_realizes_effects() {
        let w = sic_naimark_unitary();
        assert!(unitarity_error(&w) < 1e-12);
        let psi = sic_states();
        for (b, p) in psi.iter().enumerate() {
            let effect = CMatrix::from_fn(2, 2, |x, y| w[(b, 2 * x)].conj() * w[(b, 2 * y)]);
            let expected = crate::linalg::conj(&outer(p)).scale(0.5);
            assert!(max_abs(&(effect - expected)) < 1e-12);
        }
    }

    #[test]
    fn kraus_operators_are_complete() {
        let sum = sic_kraus_operators()
            .iter()
            .fold(CMatrix::zeros(2, 2), |acc, (_, a)| acc + a.adjoint() * a);
        assert!(max_abs(&(sum - identity(2))) < 1e-12);
    }

    #[test]
    fn reference_preparation_gives_first_sic_state() {
        let mut c = Circuit::new(1);
        prepare_sic_reference(&mut c, 0);
        let br = &exact_branches(&c, &NoiseModel::ideal()).unwrap()[0];
        let expected = outer(&sic_states()[0]);
        assert!(max_abs(&(br.state.matrix() - expected)) < 1e-12);
    }

    fn ancilla_cnot_unitary(basis: PauliBasis) -> CMatrix {
        // coupling on (ancilla ⊗ target) for build_indirect: probe slow
        let b = match basis {
            PauliBasis::X => crate::qcsim::gates::ry(-FRAC_PI_2),
            PauliBasis::Y => crate::qcsim::gates::rx(FRAC_PI_2),
            PauliBasis::Z => identity(2),
        };
        let mut cx = CMatrix::zeros(4, 4);
        for a in 0..2 {
            for t in 0..2 {
                cx[((a ^ t) * 2 + t, a * 2 + t)] = ONE;
            }
        }
        kron(&identity(2), &b.adjoint()) * cx * kron(&identity(2), &b)
    }

    #[test]
    fn nondestructive_pauli_induces_projective_tensors() {
        let probe = outer(&CVector::from_vec(vec![ONE, ZERO]));
        let povm = vec![
            from_rows(&[&[ONE, ZERO], &[ZERO, ZERO]]),
            from_rows(&[&[ZERO, ZERO], &[ZERO, ONE]]),
        ];
        for basis in PauliBasis::ALL {
            let set = build_indirect(&probe, &ancilla_cnot_unitary(basis), &povm).unwrap();
            let proj = projective_set(&HermitianObservable::new(basis.matrix()).unwrap());
            // labels: bit 0 ↔ "+1"
            for (a, b) in set.tensors().iter().zip(proj.tensors()) {
                assert!(a.max_abs_diff(b) < 1e-10, "basis {basis:?}");
            }
        }
    }

    #[test]
    fn nondestructive_pauli_on_eigenstates() {
        let mut c = Circuit::new(2);
        nondestructive_pauli(&mut c, 0, PauliBasis::Z, 1, "m");
        let d = exact_outcome_distribution(&c, &NoiseModel::ideal()).unwrap();
        assert!((d["0"] - 1.0).abs() < 1e-12);
        let br = &exact_branches(&c, &NoiseModel::ideal()).unwrap()[0];
        assert!((br.state.reduced(&[0])[(0, 0)].re - 1.0).abs() < 1e-12);

        let mut c = Circuit::new(2);
        c.h(0);
        nondestructive_pauli(&mut c, 0, PauliBasis::X, 1, "m");
        let d = exact_outcome_distribution(&c, &NoiseModel::ideal()).unwrap();
        assert!((d["0"] - 1.0).abs() < 1e-12);
    }

    fn by_mu(c: &Circuit, dist: &BTreeMap<String, f64>, bits: &[String; 4]) -> BTreeMap<[u8; 4], f64> {
        let idx: Vec<usize> = bits.iter().map(|b| c.bit_index(b).unwrap()).collect();
        let mut out = BTreeMap::new();
        for (k, p) in dist {
            let v = k.as_bytes();
            let mu = [0, 1, 2, 3].map(|j| v[idx[j]] - b'0');
            *out.entry(mu).or_insert(0.0) += p;
        }
        out
    }

    fn prepare(c: &mut Circuit, state: &CVector) {
        c.unitary(vec![0], crate::linalg::unitary_with_first_column(state));
    }

    #[test]
    fn gate_level_and_kraus_paths_agree() {
        let bits = sic_bit_names("");
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(51);
        for _ in 0..3 {
            let psi = crate::linalg::random_pure_state(2, &mut rng);
            let mut g = Circuit::new(3);
            prepare(&mut g, &psi);
            doubled_sic_measurement(&mut g, 0, [1, 2], bits.clone());
            let mut k = Circuit::new(1);
            prepare(&mut k, &psi);
            sic_kraus(&mut k, 0, bits.clone());
            let dg = by_mu(
                &g,
                &exact_outcome_distribution(&g, &NoiseModel::ideal()).unwrap(),
                &bits,
            );
            let dk = by_mu(
                &k,
                &exact_outcome_distribution(&k, &NoiseModel::ideal()).unwrap(),
                &bits,
            );
            assert_eq!(dg.len(), 16);
            for (mu, p) in &dk {
                assert!((dg[mu] - p).abs() < 1e-10);
            }
            // post-measurement target states agree as well
            for br in exact_branches(&g, &NoiseModel::ideal()).unwrap() {
                let mu = [0, 1, 2, 3].map(|j| br.record[g.bit_index(&bits[j]).unwrap()]);
                let expected = outer(&sic_states()[(2 * mu[0] + mu[1]) as usize]);
                assert!(max_abs(&(br.state.reduced(&[0]) - expected)) < 1e-10);
            }
        }
    }

    #[test]
    fn conjugate_reference_input_marginals() {
        // input ψ̄(0,0): the (μ₃, μ₄) = (0, 0) effect fires with probability ½
        let bits = sic_bit_names("");
        let mut c = Circuit::new(1);
        let psi_bar = sic_states()[0].map(|z| z.conj());
        prepare(&mut c, &psi_bar);
        sic_kraus(&mut c, 0, bits.clone());
        let d = by_mu(
            &c,
            &exact_outcome_distribution(&c, &NoiseModel::ideal()).unwrap(),
            &bits,
        );
        let marginal = |b: [u8; 2]| -> f64 {
            d.iter()
                .filter(|(mu, _)| mu[2] == b[0] && mu[3] == b[1])
                .map(|(_, p)| p)
                .sum()
        };
        assert!((marginal([0, 0]) - 0.5).abs() < 1e-12);
        for b in [[0, 1], [1, 0], [1, 1]] {
            assert!((marginal(b) - 1.0 / 6.0).abs() < 1e-12);
        }
        let first: f64 = d
            .iter()
            .filter(|(mu, _)| mu[0] == 0 && mu[1] == 0)
            .map(|(_, p)| p)
            .sum();
        assert!((first - 0.25).abs() < 1e-12);
    }
}
