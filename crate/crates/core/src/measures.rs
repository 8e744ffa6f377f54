//! Entanglement and occupation functionals of pure states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevec::{reduce_to_qubit, von_neumann_entropy, PureState};

/// Which functional a [`MeasureResult`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    EntanglementEntropyBits,
    GlobalEntanglement,
    Purity,
    MeanExcitation,
}

/// A labelled functional value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureResult {
    pub value: f64,
    pub kind: MeasureKind,
}

/// Evaluates one functional by label. Per-qubit kinds need `qubit`;
/// state-level kinds ignore it.
pub fn evaluate(
    kind: MeasureKind,
    state: &PureState,
    qubit: Option<usize>,
) -> Result<MeasureResult> {
    let need_qubit = || {
        qubit.ok_or(Error::QubitIndexOutOfRange {
            index: 0,
            n_qubits: state.n_qubits(),
        })
    };
    let value = match kind {
        MeasureKind::EntanglementEntropyBits => entanglement_entropy(state)?,
        MeasureKind::GlobalEntanglement => global_entanglement(state)?,
        MeasureKind::Purity => qubit_purity(state, need_qubit()?)?,
        MeasureKind::MeanExcitation => mean_excitation(state, need_qubit()?)?,
    };
    Ok(MeasureResult { value, kind })
}

/// Entanglement entropy (bits) of a two-qubit pure state: the von Neumann
/// entropy of either single-qubit marginal.
pub fn entanglement_entropy(state: &PureState) -> Result<f64> {
    if state.n_qubits() != 2 {
        return Err(Error::QubitIndexOutOfRange {
            index: 2,
            n_qubits: state.n_qubits(),
        });
    }
    let rho = reduce_to_qubit(state, 1)?;
    von_neumann_entropy(&rho)
}

/// Purity Tr ρ_i² of one qubit's reduced state.
pub fn qubit_purity(state: &PureState, qubit: usize) -> Result<f64> {
    let rho = reduce_to_qubit(state, qubit)?;
    let mut p = 0.0;
    for r in 0..2 {
        for c in 0..2 {
            p += rho.entry(r, c).norm_sqr();
        }
    }
    Ok(p)
}

/// Global entanglement Q = n − Σ_i Tr ρ_i².
///
/// Zero exactly on products of single-qubit states, n/2 when every marginal
/// is maximally mixed. Reported unnormalized; see
/// [`global_entanglement_normalized`] for the unit-maximum variant.
pub fn global_entanglement(state: &PureState) -> Result<f64> {
    let n = state.n_qubits();
    let mut q = n as f64;
    for i in 1..=n {
        q -= qubit_purity(state, i)?;
    }
    Ok(q)
}

/// The normalized variant 2·Q/n with maximum 1 for any register size.
pub fn global_entanglement_normalized(state: &PureState) -> Result<f64> {
    Ok(2.0 * global_entanglement(state)? / state.n_qubits() as f64)
}

/// Mean occupation of one qubit's excited level, Tr(ρ_i |1⟩⟨1|).
pub fn mean_excitation(state: &PureState, qubit: usize) -> Result<f64> {
    let rho = reduce_to_qubit(state, qubit)?;
    Ok(rho.entry(1, 1).re)
}

/// Closed-form global entanglement of generalized single- and
/// double-excitation states from their support coefficients.
///
/// `coefficients` are the amplitudes on the excitation support in ascending
/// basis-index order. For one excitation (any n): Q = 2(1 − Σ_j |c_j|⁴).
/// For two excitations (n = 4 only): Q = 2(1 − Σ (|c_S|² − |c_S̄|²)²) over
/// the three complementary pair choices.
pub fn dicke_q_closed_form(coefficients: &[Complex64], n_qubits: usize, excitations: usize) -> Result<f64> {
    let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > crate::statevec::NORM_TOLERANCE {
        return Err(Error::NotNormalized {
            deviation: (norm - 1.0).abs(),
        });
    }
    match excitations {
        1 => {
            if coefficients.len() != n_qubits {
                return Err(Error::InvalidEnsemble(format!(
                    "single-excitation support needs {n_qubits} coefficients, got {}",
                    coefficients.len()
                )));
            }
            let sum4: f64 = coefficients.iter().map(|c| c.norm_sqr().powi(2)).sum();
            Ok(2.0 * (1.0 - sum4))
        }
        2 if n_qubits == 4 => {
            if coefficients.len() != 6 {
                return Err(Error::InvalidEnsemble(format!(
                    "double-excitation support of 4 qubits needs 6 coefficients, got {}",
                    coefficients.len()
                )));
            }
            // In ascending index order the support pairs up as complements:
            // (0,5), (1,4), (2,3).
            let p: Vec<f64> = coefficients.iter().map(|c| c.norm_sqr()).collect();
            let mut q = 1.0;
            for k in 0..3 {
                let d = p[k] - p[5 - k];
                q -= d * d;
            }
            Ok(2.0 * q)
        }
        _ => Err(Error::InvalidEnsemble(format!(
            "no closed form for {excitations} excitations on {n_qubits} qubits"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::statevec::tensor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> PureState {
        let h = 1.0 / 2f64.sqrt();
        PureState::from_dense(2, vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap()
    }

    #[test]
    fn entanglement_entropy_basics() {
        let product = PureState::basis_state(2, 0).unwrap();
        assert!(entanglement_entropy(&product).unwrap().abs() < 1e-12);
        assert!((entanglement_entropy(&bell()).unwrap() - 1.0).abs() < 1e-12);

        // gamma1 = sqrt(0.9): binary entropy of 0.9.
        let g1 = 0.9f64.sqrt();
        let g2 = 0.1f64.sqrt();
        let s = PureState::from_dense(2, vec![c(g1, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(g2, 0.0)])
            .unwrap();
        let expected = -(0.9f64.log2() * 0.9 + 0.1f64.log2() * 0.1);
        let got = entanglement_entropy(&s).unwrap();
        assert!((got - expected).abs() < 1e-10);
        assert!((got - 0.4690).abs() < 5e-5);
        assert!(entanglement_entropy(&PureState::basis_state(3, 0).unwrap()).is_err());
    }

    #[test]
    fn entanglement_entropy_is_symmetric_in_qubit_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let s = sampling::haar_state(2, &mut rng).unwrap();
            let s1 = von_neumann_entropy(&reduce_to_qubit(&s, 1).unwrap()).unwrap();
            let s2 = von_neumann_entropy(&reduce_to_qubit(&s, 2).unwrap()).unwrap();
            assert!((s1 - s2).abs() < 1e-9);
        }
    }

    #[test]
    fn labelled_evaluation_dispatches() {
        let b = bell();
        let q = evaluate(MeasureKind::GlobalEntanglement, &b, None).unwrap();
        assert_eq!(q.kind, MeasureKind::GlobalEntanglement);
        assert!((q.value - 1.0).abs() < 1e-12);
        let p = evaluate(MeasureKind::Purity, &b, Some(2)).unwrap();
        assert!((p.value - 0.5).abs() < 1e-12);
        assert!(evaluate(MeasureKind::Purity, &b, None).is_err());
    }

    #[test]
    fn purity_basics() {
        assert!((qubit_purity(&PureState::basis_state(2, 2).unwrap(), 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((qubit_purity(&bell(), 1).unwrap() - 0.5).abs() < 1e-12);
        assert!((qubit_purity(&bell(), 2).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn purity_matches_elementwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = sampling::haar_state(3, &mut rng).unwrap();
        for q in 1..=3 {
            let rho = reduce_to_qubit(&s, q).unwrap();
            let oracle = rho.entry(0, 0).norm_sqr()
                + rho.entry(0, 1).norm_sqr()
                + rho.entry(1, 0).norm_sqr()
                + rho.entry(1, 1).norm_sqr();
            assert!((qubit_purity(&s, q).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn global_entanglement_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let product = sampling::separable_state(4, &mut rng).unwrap();
        assert!(global_entanglement(&product).unwrap().abs() < 1e-9);
        assert!((global_entanglement(&bell()).unwrap() - 1.0).abs() < 1e-12);
        assert!((global_entanglement_normalized(&bell()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_single_excitation_state_of_four_qubits() {
        let amps = [1u64, 2, 4, 8]
            .iter()
            .map(|&j| (j, c(0.5, 0.0)))
            .collect::<Vec<_>>();
        let mut dense = vec![Complex64::ZERO; 16];
        for (j, a) in &amps {
            dense[*j as usize] = *a;
        }
        let s = PureState::from_dense(4, dense).unwrap();
        assert!((global_entanglement(&s).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn mean_excitation_basics() {
        let s = PureState::basis_state(2, 0b10).unwrap();
        assert!((mean_excitation(&s, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!(mean_excitation(&s, 2).unwrap().abs() < 1e-12);
        assert!((mean_excitation(&bell(), 1).unwrap() - 0.5).abs() < 1e-12);
        assert!((mean_excitation(&bell(), 2).unwrap() - 0.5).abs() < 1e-12);
        assert!(mean_excitation(&s, 5).is_err());
    }

    #[test]
    fn boundary_state_has_exact_mean_excitation() {
        let s = sampling::boundary_state_2q(0.2, 0.1).unwrap();
        assert!((mean_excitation(&s, 1).unwrap() - 0.2).abs() < 1e-12);
        assert!((mean_excitation(&s, 2).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_symmetric_values() {
        let q1 = dicke_q_closed_form(&[c(0.5, 0.0); 4], 4, 1).unwrap();
        assert!((q1 - 1.5).abs() < 1e-12);
        let a = 1.0 / 6f64.sqrt();
        let q2 = dicke_q_closed_form(&[c(a, 0.0); 6], 4, 2).unwrap();
        assert!((q2 - 2.0).abs() < 1e-12);
        assert!(dicke_q_closed_form(&[c(0.5, 0.0); 4], 4, 3).is_err());
    }

    #[test]
    fn closed_form_matches_dense_global_entanglement() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n_exc in [1usize, 2] {
            for _ in 0..50 {
                let s = sampling::dicke_generalized(4, n_exc, &mut rng).unwrap();
                let coeffs: Vec<Complex64> = {
                    let mut v = Vec::new();
                    s.for_each_amplitude(|j, a| {
                        if j.count_ones() as usize == n_exc {
                            v.push(a);
                        }
                    });
                    v
                };
                let closed = dicke_q_closed_form(&coeffs, 4, n_exc).unwrap();
                let dense = global_entanglement(&s).unwrap();
                assert!((closed - dense).abs() < 1e-9, "{closed} vs {dense}");
            }
        }
    }

    #[test]
    fn closed_form_ignores_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let s = sampling::dicke_generalized(4, 1, &mut rng).unwrap();
        let mut coeffs = Vec::new();
        s.for_each_amplitude(|j, a| {
            if j.count_ones() == 1 {
                coeffs.push(a);
            }
        });
        let q = dicke_q_closed_form(&coeffs, 4, 1).unwrap();
        let rephased: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| a * Complex64::from_polar(1.0, 0.7 * k as f64))
            .collect();
        let q2 = dicke_q_closed_form(&rephased, 4, 1).unwrap();
        assert!((q - q2).abs() < 1e-12);
    }

    #[test]
    fn cluster_products_add_their_entanglement() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = sampling::haar_state(2, &mut rng).unwrap();
            let b = sampling::haar_state(3, &mut rng).unwrap();
            let joined = tensor(&a, &b).unwrap();
            let sum = global_entanglement(&a).unwrap() + global_entanglement(&b).unwrap();
            assert!((global_entanglement(&joined).unwrap() - sum).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_dicke_mean_excitation_is_n_over_qubits() {
        for (n, k) in [(4usize, 1usize), (4, 2), (6, 3)] {
            let support: Vec<u64> = (0..1u64 << n)
                .filter(|j| j.count_ones() as usize == k)
                .collect();
            let amp = c((support.len() as f64).sqrt().recip(), 0.0);
            let s = PureState::from_dense(n, {
                let mut v = vec![Complex64::ZERO; 1 << n];
                for j in &support {
                    v[*j as usize] = amp;
                }
                v
            })
            .unwrap();
            for q in 1..=n {
                let e = mean_excitation(&s, q).unwrap();
                assert!((e - k as f64 / n as f64).abs() < 1e-9);
            }
        }
    }
}
