//! Seeded statistical checks of the samplers against independent oracles:
//! closed-form ensemble means, known marginal distributions, and
//! Kolmogorov-Smirnov distribution tests.

use num_complex::Complex64;

use dephase_core::interaction::{final_entropy_with, build_pointer_basis, InteractionSpec};
use dephase_core::measures::{global_entanglement, mean_excitation, qubit_purity};
use dephase_core::sampling::{
    cluster_state, dicke_generalized, energy_constrained, haar_state, random_su2,
    separable_state, stream_rng, with_exact_first_qubit_excitation,
};
use dephase_core::stats::{binned_means, pearson, ScatterSample};

const LN2: f64 = std::f64::consts::LN_2;

/// Mean Shannon entropy (bits) of |amplitudes|² for Haar states of dimension
/// d: (H_d − 1)/ln 2 with H_d the d-th harmonic number.
fn haar_population_entropy(dim: usize) -> f64 {
    let h: f64 = (2..=dim).map(|k| 1.0 / k as f64).sum();
    h / LN2
}

/// Mean global entanglement of Haar states: n(1 − (2 + d/2)/(d + 1)).
fn haar_mean_q(n: usize) -> f64 {
    let d = (1usize << n) as f64;
    n as f64 * (1.0 - (2.0 + d / 2.0) / (d + 1.0))
}

#[test]
fn haar_two_qubit_mean_entanglement() {
    let mut rng = stream_rng(100, 0);
    let mut sum = 0.0;
    let draws = 100_000;
    for _ in 0..draws {
        sum += global_entanglement(&haar_state(2, &mut rng).unwrap()).unwrap();
    }
    let mean = sum / draws as f64;
    assert!((mean - 0.40).abs() < 0.01, "mean Q = {mean}");
    assert!((mean - haar_mean_q(2)).abs() < 0.01);
}

#[test]
fn haar_single_qubit_mean_final_entropy() {
    let mut rng = stream_rng(101, 0);
    let spec = InteractionSpec::distinct_sigma_z(1);
    let basis = build_pointer_basis(&spec);
    let mut sum = 0.0;
    let draws = 100_000;
    for _ in 0..draws {
        sum += final_entropy_with(&haar_state(1, &mut rng).unwrap(), &basis).unwrap();
    }
    let mean = sum / draws as f64;
    assert!((mean - 0.72).abs() < 0.01, "mean S = {mean}");
    // Exact value 1/(2 ln 2).
    assert!((mean - 0.5 / LN2).abs() < 0.01);
}

#[test]
fn separable_mean_final_entropy_scales_linearly() {
    for (n, expected, tol, draws) in [(2usize, 1.44, 0.01, 100_000), (6, 4.33, 0.02, 100_000)] {
        let mut rng = stream_rng(102 + n as u64, 0);
        let spec = InteractionSpec::distinct_sigma_z(n);
        let basis = build_pointer_basis(&spec);
        let mut sum = 0.0;
        for _ in 0..draws {
            sum += final_entropy_with(&separable_state(n, &mut rng).unwrap(), &basis).unwrap();
        }
        let mean = sum / draws as f64;
        assert!((mean - expected).abs() < tol, "n={n}: mean S = {mean}");
        assert!((mean - n as f64 * 0.5 / LN2).abs() < tol);
    }
}

#[test]
fn haar_mean_entropy_matches_harmonic_oracle() {
    for n in 2..=4usize {
        let mut rng = stream_rng(110 + n as u64, 0);
        let spec = InteractionSpec::distinct_sigma_z(n);
        let basis = build_pointer_basis(&spec);
        let mut sum = 0.0;
        let draws = 50_000;
        for _ in 0..draws {
            sum += final_entropy_with(&haar_state(n, &mut rng).unwrap(), &basis).unwrap();
        }
        let mean = sum / draws as f64;
        let oracle = haar_population_entropy(1 << n);
        assert!((mean - oracle).abs() < 0.01, "n={n}: {mean} vs oracle {oracle}");
    }
}

#[test]
fn partial_interaction_mean_matches_harmonic_oracle() {
    // k coupled qubits of n: group masses are Dirichlet sums over 2^{n-k}
    // cells each, so the mean entropy is (H_{2^n} − H_{2^{n-k}})/ln 2.
    for (n, k) in [(3usize, 1usize), (4, 2)] {
        let mut rng = stream_rng(120 + (n * 10 + k) as u64, 0);
        let spec = InteractionSpec::partial_sigma_z(n, k);
        let basis = build_pointer_basis(&spec);
        let mut sum = 0.0;
        let draws = 50_000;
        for _ in 0..draws {
            sum += final_entropy_with(&haar_state(n, &mut rng).unwrap(), &basis).unwrap();
        }
        let mean = sum / draws as f64;
        let oracle = haar_population_entropy(1 << n) - haar_population_entropy(1 << (n - k));
        assert!((mean - oracle).abs() < 0.01, "n={n},k={k}: {mean} vs {oracle}");
    }
}

#[test]
fn cluster_mean_entanglement_adds_over_clusters() {
    let mut rng = stream_rng(130, 0);
    let mut sum = 0.0;
    let draws = 100_000;
    for _ in 0..draws {
        sum += global_entanglement(&cluster_state(&[2, 2, 2], &mut rng).unwrap()).unwrap();
    }
    let mean = sum / draws as f64;
    assert!((mean - 1.20).abs() < 0.02, "mean Q = {mean}");
    assert!((mean - 3.0 * haar_mean_q(2)).abs() < 0.02);
}

fn two_sample_ks(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (na, nb) = (a.len(), b.len());
    let (mut ia, mut ib) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while ia < na && ib < nb {
        if a[ia] <= b[ib] {
            ia += 1;
        } else {
            ib += 1;
        }
        d = d.max((ia as f64 / na as f64 - ib as f64 / nb as f64).abs());
    }
    d
}

fn one_sample_ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in xs.iter().enumerate() {
        d = d.max((x - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - x).abs());
    }
    d
}

#[test]
fn cluster_degenerate_partitions_match_their_native_samplers() {
    // Entropy of the dephased state is a distribution-level fingerprint;
    // compare it across sampler routes with a two-sample KS test.
    let draws = 20_000;
    let spec = InteractionSpec::distinct_sigma_z(4);
    let basis = build_pointer_basis(&spec);
    let collect = |which: u8, seed: u64| -> Vec<f64> {
        let mut rng = stream_rng(seed, 0);
        (0..draws)
            .map(|_| {
                let s = match which {
                    0 => cluster_state(&[1, 1, 1, 1], &mut rng).unwrap(),
                    1 => separable_state(4, &mut rng).unwrap(),
                    2 => cluster_state(&[4], &mut rng).unwrap(),
                    _ => haar_state(4, &mut rng).unwrap(),
                };
                final_entropy_with(&s, &basis).unwrap()
            })
            .collect()
    };
    // 1% critical value for the two-sample statistic.
    let crit = 1.63 * (2.0 / draws as f64).sqrt();
    assert!(two_sample_ks(collect(0, 140), collect(1, 141)) < crit);
    assert!(two_sample_ks(collect(2, 142), collect(3, 143)) < crit);
    // And a control: separable vs full Haar must differ.
    assert!(two_sample_ks(collect(1, 144), collect(3, 145)) > crit);
}

#[test]
fn haar_distribution_is_rotation_invariant() {
    // Fixed unitary V: qubit-1 purity of V·(Haar draw) and of a plain Haar
    // draw must agree in distribution.
    let draws = 100_000;
    let mut rng = stream_rng(150, 0);
    let v = random_su2(&mut rng);
    let plain: Vec<f64> = (0..draws)
        .map(|_| qubit_purity(&haar_state(2, &mut rng).unwrap(), 1).unwrap())
        .collect();
    let rotated: Vec<f64> = (0..draws)
        .map(|_| {
            let s = haar_state(2, &mut rng).unwrap();
            let mut amps = s.to_dense().unwrap();
            for j in 0..amps.len() {
                if j & 2 == 0 {
                    let a = amps[j];
                    let b = amps[j | 2];
                    amps[j] = v[(0, 0)] * a + v[(0, 1)] * b;
                    amps[j | 2] = v[(1, 0)] * a + v[(1, 1)] * b;
                }
            }
            qubit_purity(
                &dephase_core::statevec::PureState::from_dense(2, amps).unwrap(),
                1,
            )
            .unwrap()
        })
        .collect();
    let crit = 1.63 * (2.0 / draws as f64).sqrt();
    let d = two_sample_ks(plain, rotated);
    assert!(d < crit, "KS statistic {d} exceeds {crit}");
}

#[test]
fn su2_orbit_statistics() {
    let mut rng = stream_rng(160, 0);
    let draws = 100_000;
    let mut z_sum = 0.0;
    let mut excitations = Vec::with_capacity(draws);
    for _ in 0..draws {
        let u = random_su2(&mut rng);
        // U|0⟩ = first column; ⟨σ_z⟩ = |u00|² − |u10|².
        let p0 = u[(0, 0)].norm_sqr();
        let p1 = u[(1, 0)].norm_sqr();
        z_sum += p0 - p1;
        excitations.push(p1);
    }
    assert!((z_sum / draws as f64).abs() < 0.01);
    // The excited-state occupation of U|0⟩ is uniform on [0, 1].
    let d = one_sample_ks_uniform(excitations);
    assert!(d < 0.01, "KS statistic {d}");
}

#[test]
fn energy_constrained_mean_values() {
    // (E, expected Q, expected S_z, expected S_x, accepted draws)
    let cases = [
        (0.5, 0.66, 1.72, 1.5, 10_000usize),
        (0.1, 0.18, 0.81, 1.81, 6_000),
    ];
    let spec_z = InteractionSpec::distinct_sigma_z(2);
    let spec_x = InteractionSpec::distinct_sigma_x(2);
    let basis_z = build_pointer_basis(&spec_z);
    let basis_x = build_pointer_basis(&spec_x);
    for (e, q_exp, sz_exp, sx_exp, accepted) in cases {
        let mut rng = stream_rng(170 + (e * 100.0) as u64, 0);
        let mut q_sum = 0.0;
        let mut sz_sum = 0.0;
        let mut sx_sum = 0.0;
        for _ in 0..accepted {
            let (state, _) = energy_constrained(2, e, 0.01, 100_000_000, &mut rng).unwrap();
            q_sum += global_entanglement(&state).unwrap();
            sz_sum += final_entropy_with(&state, &basis_z).unwrap();
            sx_sum += final_entropy_with(&state, &basis_x).unwrap();
        }
        let n = accepted as f64;
        assert!((q_sum / n - q_exp).abs() < 0.03, "E={e}: Q {}", q_sum / n);
        assert!((sz_sum / n - sz_exp).abs() < 0.03, "E={e}: Sz {}", sz_sum / n);
        assert!((sx_sum / n - sx_exp).abs() < 0.03, "E={e}: Sx {}", sx_sum / n);
    }
}

#[test]
fn dicke_ensemble_mean_values() {
    let cases = [
        // (n, N, expected mean Q, expected mean S_z, draws)
        (4usize, 1usize, 1.20, Some(1.56), 10_000usize),
        (6, 2, 2.50, None, 10_000),
    ];
    for (n, k, q_exp, sz_exp, draws) in cases {
        let mut rng = stream_rng(180 + (n * 10 + k) as u64, 0);
        let spec = InteractionSpec::distinct_sigma_z(n);
        let basis = build_pointer_basis(&spec);
        let mut q_sum = 0.0;
        let mut sz_sum = 0.0;
        for _ in 0..draws {
            let s = dicke_generalized(n, k, &mut rng).unwrap();
            q_sum += global_entanglement(&s).unwrap();
            sz_sum += final_entropy_with(&s, &basis).unwrap();
        }
        let q_mean = q_sum / draws as f64;
        assert!((q_mean - q_exp).abs() < 0.02, "n={n},N={k}: Q {q_mean}");
        if let Some(sz) = sz_exp {
            let sz_mean = sz_sum / draws as f64;
            assert!((sz_mean - sz).abs() < 0.02, "n={n},N={k}: Sz {sz_mean}");
        }
    }
}

#[test]
fn three_qubit_haar_pearson() {
    let mut rng = stream_rng(190, 0);
    let spec = InteractionSpec::distinct_sigma_z(3);
    let basis = build_pointer_basis(&spec);
    let draws = 100_000;
    let samples: Vec<ScatterSample> = (0..draws)
        .map(|_| {
            let s = haar_state(3, &mut rng).unwrap();
            ScatterSample::new(
                global_entanglement(&s).unwrap(),
                final_entropy_with(&s, &basis).unwrap(),
            )
        })
        .collect();
    let r = pearson(&samples).unwrap();
    assert!((r - 0.30).abs() < 0.02, "pearson = {r}");
}

#[test]
fn binned_curve_of_two_qubit_haar_is_monotone() {
    let mut rng = stream_rng(191, 0);
    let spec = InteractionSpec::distinct_sigma_z(2);
    let basis = build_pointer_basis(&spec);
    let samples: Vec<ScatterSample> = (0..200_000)
        .map(|_| {
            let s = haar_state(2, &mut rng).unwrap();
            ScatterSample::new(
                global_entanglement(&s).unwrap(),
                final_entropy_with(&s, &basis).unwrap(),
            )
        })
        .collect();
    let curve = binned_means(&samples, 0.05, 1_000);
    assert!(curve.len() >= 5);
    for pair in curve.windows(2) {
        assert!(
            pair[1].mean_s >= pair[0].mean_s - 1e-9,
            "curve must be nondecreasing: {:?}",
            pair
        );
    }
}

#[test]
fn fixed_occupation_single_coupling_entropy_is_constant() {
    // With one coupled qubit and the first qubit's excitation pinned exactly,
    // every final entropy equals the binary entropy of the pinned value.
    let e: f64 = 0.3;
    let expected = -(e * e.log2() + (1.0 - e) * (1.0 - e).log2());
    for n in [2usize, 3, 4] {
        let mut rng = stream_rng(200 + n as u64, 0);
        let spec = InteractionSpec::partial_sigma_z(n, 1);
        let basis = build_pointer_basis(&spec);
        let mut values = Vec::with_capacity(1000);
        for _ in 0..1000 {
            let s = haar_state(n, &mut rng).unwrap();
            let pinned = with_exact_first_qubit_excitation(&s, e).unwrap();
            values.push(final_entropy_with(&pinned, &basis).unwrap());
        }
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        let var: f64 =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
        assert!(var < 1e-18, "n={n}: variance {var}");
        assert!((mean - expected).abs() < 1e-9);
    }
}

#[test]
fn sparse_dicke_entropy_matches_dense_route() {
    // Force a sparse 13-qubit single-excitation state and compare the sparse
    // entropy path against a dense reconstruction on the same amplitudes.
    let mut rng = stream_rng(210, 0);
    let spec = InteractionSpec::linear_sigma_z(13);
    let basis = build_pointer_basis(&spec);
    for _ in 0..20 {
        let s = dicke_generalized(13, 1, &mut rng).unwrap();
        assert!(s.is_sparse());
        let sparse_entropy = final_entropy_with(&s, &basis).unwrap();
        let mut dense = vec![Complex64::new(0.0, 0.0); 1 << 13];
        s.for_each_amplitude(|j, a| dense[j as usize] = a);
        let d = dephase_core::statevec::PureState::from_dense(13, dense).unwrap();
        let dense_entropy = final_entropy_with(&d, &basis).unwrap();
        assert!((sparse_entropy - dense_entropy).abs() < 1e-10);
    }
}

#[test]
fn mean_excitation_of_energy_draws_is_within_window() {
    let mut rng = stream_rng(220, 0);
    for _ in 0..50 {
        let (state, _) = energy_constrained(3, 0.4, 0.02, 10_000_000, &mut rng).unwrap();
        for q in 1..=3 {
            assert!((mean_excitation(&state, q).unwrap() - 0.4).abs() <= 0.02);
        }
    }
}
