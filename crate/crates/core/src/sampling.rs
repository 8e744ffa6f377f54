//! Seeded random generation of every state ensemble used by the experiments.
//!
//! All samplers draw from a caller-supplied RNG. Reproducible parallel runs
//! use one counter-based stream per worker: [`stream_rng`] builds a ChaCha
//! generator from `(seed, worker)` so shards can be generated independently
//! and merged in worker order without any draw-order coupling.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measures;
use crate::statevec::{tensor, PureState, MAX_SPARSE_SUPPORT, SPARSE_QUBIT_THRESHOLD};

/// Default cap on rejection attempts per accepted energy-constrained state.
pub const DEFAULT_MAX_REJECTION_ATTEMPTS: u64 = 10_000_000;

/// RNG for worker `worker` of a run seeded with `seed`.
///
/// Streams are independent: reseeding with the same pair reproduces the
/// worker's draw sequence bit for bit.
pub fn stream_rng(seed: u64, worker: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng
}

/// Uniformly distributed unit vector of `dim` complex amplitudes.
///
/// Uses the angle parametrization θ_k = arcsin(ξ_k^{1/2k}) with ξ_k uniform
/// on [0,1) and phases uniform on [0,2π); component j is a product of sines
/// of the higher angles times the cosine of the next one. The first
/// component comes out real nonnegative, which fixes the (unphysical) global
/// phase.
pub fn haar_amplitudes(dim: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    assert!(dim >= 1);
    if dim == 1 {
        return vec![Complex64::new(1.0, 0.0)];
    }
    let m = dim - 1;
    let mut sin_t = Vec::with_capacity(m);
    let mut cos_t = Vec::with_capacity(m);
    for k in 1..=m {
        let xi: f64 = rng.random();
        let s = xi.powf(1.0 / (2.0 * k as f64));
        sin_t.push(s);
        cos_t.push((1.0 - s * s).sqrt());
    }
    let mut phases = Vec::with_capacity(m);
    for _ in 0..m {
        let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        phases.push(Complex64::from_polar(1.0, phi));
    }
    let mut amps = Vec::with_capacity(dim);
    amps.push(Complex64::new(cos_t[m - 1], 0.0));
    let mut running = 1.0;
    for j in 1..dim {
        running *= sin_t[dim - 1 - j];
        if j < dim - 1 {
            amps.push(phases[dim - 1 - j] * (running * cos_t[dim - 2 - j]));
        } else {
            amps.push(phases[0] * running);
        }
    }
    amps
}

/// Haar-random pure state of `n` qubits (dense; n ≤ 20).
pub fn haar_state(n_qubits: usize, rng: &mut impl Rng) -> Result<PureState> {
    if n_qubits == 0 || n_qubits > 20 {
        return Err(Error::InvalidEnsemble(format!(
            "dense Haar sampling supports 1..=20 qubits, got {n_qubits}"
        )));
    }
    PureState::from_dense(n_qubits, haar_amplitudes(1 << n_qubits, rng))
}

/// Haar-random element of SU(2) via the angle construction at n = 1.
pub fn random_su2(rng: &mut impl Rng) -> nalgebra::Matrix2<Complex64> {
    let xi: f64 = rng.random();
    let sin_t = xi.sqrt();
    let cos_t = (1.0 - xi).sqrt();
    let psi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let chi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let e_psi = Complex64::from_polar(1.0, psi);
    let e_chi = Complex64::from_polar(1.0, chi);
    nalgebra::Matrix2::new(
        e_psi * cos_t,
        e_chi * sin_t,
        -e_chi.conj() * sin_t,
        e_psi.conj() * cos_t,
    )
}

/// Product of `n` independent Haar one-qubit states: U_1|0⟩ ⊗ … ⊗ U_n|0⟩.
pub fn separable_state(n_qubits: usize, rng: &mut impl Rng) -> Result<PureState> {
    if n_qubits == 0 || n_qubits > 20 {
        return Err(Error::InvalidEnsemble(format!(
            "separable sampling supports 1..=20 qubits, got {n_qubits}"
        )));
    }
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n_qubits {
        let u = random_su2(rng);
        let (a, b) = (u[(0, 0)], u[(1, 0)]);
        let mut next = Vec::with_capacity(amps.len() * 2);
        for v in &amps {
            next.push(v * a);
            next.push(v * b);
        }
        amps = next;
    }
    PureState::from_dense(n_qubits, amps)
}

/// Product of independent Haar states over consecutive clusters.
pub fn cluster_state(partition: &[usize], rng: &mut impl Rng) -> Result<PureState> {
    if partition.is_empty() || partition.contains(&0) {
        return Err(Error::InvalidEnsemble(
            "cluster partition must list positive sizes".into(),
        ));
    }
    let mut state: Option<PureState> = None;
    for &size in partition {
        let cluster = haar_state(size, rng)?;
        state = Some(match state {
            None => cluster,
            Some(acc) => tensor(&acc, &cluster)?,
        });
    }
    Ok(state.unwrap())
}

fn qubit_excitations(amps: &[Complex64], n_qubits: usize) -> Vec<f64> {
    let mut exc = vec![0.0f64; n_qubits];
    for (j, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let mut bits = j;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            exc[n_qubits - 1 - b] += p;
            bits &= bits - 1;
        }
    }
    exc
}

/// Rejection-samples Haar states until every qubit's mean excitation lies
/// within `delta` of `excitation`. Returns the accepted state and the number
/// of attempts it took.
pub fn energy_constrained(
    n_qubits: usize,
    excitation: f64,
    delta: f64,
    max_attempts: u64,
    rng: &mut impl Rng,
) -> Result<(PureState, u64)> {
    if !(0.0..=1.0).contains(&excitation) {
        return Err(Error::InvalidEnsemble(format!(
            "target excitation {excitation} is outside [0, 1]"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidEnsemble(format!(
            "acceptance window {delta} must be positive"
        )));
    }
    for attempt in 1..=max_attempts {
        let amps = haar_amplitudes(1 << n_qubits, rng);
        let exc = qubit_excitations(&amps, n_qubits);
        if exc.iter().all(|e| (e - excitation).abs() <= delta) {
            let state = PureState::from_dense(n_qubits, amps)?;
            for q in 1..=n_qubits {
                let e = measures::mean_excitation(&state, q)?;
                assert!(
                    (e - excitation).abs() <= delta + 1e-12,
                    "accepted state violates its own acceptance predicate"
                );
            }
            return Ok((state, attempt));
        }
    }
    Err(Error::RejectionLimit {
        attempts: max_attempts,
        accepted: 0,
        rate: 0.0,
    })
}

/// The real nonnegative two-qubit family (√(1−x−E), √x, √x, √(E−x)) whose
/// qubits both have mean excitation exactly `excitation`.
pub fn boundary_state_2q(excitation: f64, x: f64) -> Result<PureState> {
    let e = excitation;
    if !(0.0..=1.0).contains(&e) {
        return Err(Error::InvalidEnsemble(format!(
            "excitation {e} is outside [0, 1]"
        )));
    }
    if !(0.0..=e.min(1.0 - e)).contains(&x) {
        return Err(Error::InvalidEnsemble(format!(
            "boundary parameter {x} is outside [0, min({e}, {})]",
            1.0 - e
        )));
    }
    let amps = vec![
        Complex64::new((1.0 - x - e).max(0.0).sqrt(), 0.0),
        Complex64::new(x.sqrt(), 0.0),
        Complex64::new(x.sqrt(), 0.0),
        Complex64::new((e - x).max(0.0).sqrt(), 0.0),
    ];
    PureState::from_dense(2, amps)
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Basis indices with exactly `excitations` set bits, ascending (Gosper).
fn excitation_support(n_qubits: usize, excitations: usize) -> Vec<u64> {
    let count = binomial(n_qubits, excitations) as usize;
    let mut out = Vec::with_capacity(count);
    let mut v: u64 = (1u64 << excitations) - 1;
    for _ in 0..count {
        out.push(v);
        if out.len() == count {
            break;
        }
        let u = v & v.wrapping_neg();
        let w = v.wrapping_add(u);
        v = w | (((v ^ w) / u) >> 2);
    }
    out
}

/// Random state supported on all basis states with exactly `excitations`
/// ones, coefficients drawn by the same angle construction restricted to the
/// support. Sparse above [`SPARSE_QUBIT_THRESHOLD`] qubits.
pub fn dicke_generalized(
    n_qubits: usize,
    excitations: usize,
    rng: &mut impl Rng,
) -> Result<PureState> {
    if !(2..=64).contains(&n_qubits) || excitations == 0 || excitations >= n_qubits {
        return Err(Error::InvalidEnsemble(format!(
            "excitation number must satisfy 1 <= N <= n-1, got N={excitations}, n={n_qubits}"
        )));
    }
    let support_size = binomial(n_qubits, excitations);
    if support_size > MAX_SPARSE_SUPPORT as u128 {
        return Err(Error::InvalidEnsemble(format!(
            "excitation support {support_size} exceeds the sparse limit {MAX_SPARSE_SUPPORT}"
        )));
    }
    let support = excitation_support(n_qubits, excitations);
    let coeffs = haar_amplitudes(support.len(), rng);
    if n_qubits > SPARSE_QUBIT_THRESHOLD {
        PureState::from_sparse(n_qubits, support.into_iter().zip(coeffs).collect())
    } else {
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        for (j, a) in support.iter().zip(coeffs) {
            amps[*j as usize] = a;
        }
        PureState::from_dense(n_qubits, amps)
    }
}

/// Rescales the two branches of qubit 1 so its mean excitation is exactly
/// `excitation`; handy for studying fixed-occupation invariants.
pub fn with_exact_first_qubit_excitation(state: &PureState, excitation: f64) -> Result<PureState> {
    let amps = state.to_dense()?;
    let n = state.n_qubits();
    let half = amps.len() / 2;
    let excited_mass: f64 = amps[half..].iter().map(|a| a.norm_sqr()).sum();
    let ground_mass = 1.0 - excited_mass;
    if excited_mass < 1e-12 || ground_mass < 1e-12 {
        return Err(Error::InvalidEnsemble(
            "state has no weight in one qubit-1 branch; cannot rescale".into(),
        ));
    }
    let up = (excitation / excited_mass).sqrt();
    let down = ((1.0 - excitation) / ground_mass).sqrt();
    let rescaled: Vec<Complex64> = amps
        .iter()
        .enumerate()
        .map(|(j, a)| if j < half { a * down } else { a * up })
        .collect();
    PureState::from_dense(n, rescaled)
}

/// Ensemble selector.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleKind {
    Haar,
    Separable,
    Clusters(Vec<usize>),
    EnergyConstrained { excitation: f64, delta: f64 },
    Dicke { excitations: usize },
}

impl EnsembleKind {
    /// Parses `haar`, `separable`, `clusters=2+2+2`, `energy=0.2:0.01`
    /// (window optional, defaulting by register size), or `dicke=1`.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("haar") {
            return Ok(Self::Haar);
        }
        if text.eq_ignore_ascii_case("separable") {
            return Ok(Self::Separable);
        }
        if let Some(rest) = text.strip_prefix("clusters=") {
            let sizes: Result<Vec<usize>> = rest
                .split('+')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad cluster size {p:?}")))
                })
                .collect();
            return Ok(Self::Clusters(sizes?));
        }
        if let Some(rest) = text.strip_prefix("energy=") {
            let mut parts = rest.split(':');
            let e: f64 = parts
                .next()
                .unwrap()
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad excitation in {text:?}")))?;
            let delta = match parts.next() {
                Some(d) => d
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad window in {text:?}")))?,
                None => default_energy_delta(n_qubits),
            };
            if parts.next().is_some() {
                return Err(Error::Parse(format!("too many fields in {text:?}")));
            }
            return Ok(Self::EnergyConstrained {
                excitation: e,
                delta,
            });
        }
        if let Some(rest) = text.strip_prefix("dicke=") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad excitation count in {text:?}")))?;
            return Ok(Self::Dicke { excitations: n });
        }
        Err(Error::Parse(format!(
            "unknown ensemble {text:?}; expected haar | separable | clusters=… | energy=… | dicke=…"
        )))
    }

    /// Canonical text form accepted back by [`Self::parse`].
    pub fn to_spec_string(&self) -> String {
        match self {
            Self::Haar => "haar".into(),
            Self::Separable => "separable".into(),
            Self::Clusters(sizes) => format!(
                "clusters={}",
                sizes
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join("+")
            ),
            Self::EnergyConstrained { excitation, delta } => {
                format!("energy={excitation}:{delta}")
            }
            Self::Dicke { excitations } => format!("dicke={excitations}"),
        }
    }
}

/// Default acceptance window for the energy-constrained sampler.
pub fn default_energy_delta(n_qubits: usize) -> f64 {
    if n_qubits <= 2 {
        0.01
    } else {
        0.02
    }
}

/// A full sampler configuration: what to draw, how many, from which seed.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n_qubits: usize,
    pub count: u64,
    pub seed: u64,
}

/// One accepted draw and the attempts it consumed (1 for direct samplers).
#[derive(Debug, Clone)]
pub struct Draw {
    pub state: PureState,
    pub attempts: u64,
}

impl EnsembleSpec {
    pub fn new(kind: EnsembleKind, n_qubits: usize, count: u64, seed: u64) -> Result<Self> {
        let spec = Self {
            kind,
            n_qubits,
            count,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > 64 {
            return Err(Error::BadQubitCount(self.n_qubits));
        }
        if self.count == 0 {
            return Err(Error::InvalidEnsemble("sample count must be >= 1".into()));
        }
        match &self.kind {
            EnsembleKind::Haar | EnsembleKind::Separable => {
                if self.n_qubits > 20 {
                    return Err(Error::InvalidEnsemble(format!(
                        "{} qubits exceeds the dense sampling limit of 20",
                        self.n_qubits
                    )));
                }
            }
            EnsembleKind::Clusters(sizes) => {
                if sizes.iter().sum::<usize>() != self.n_qubits {
                    return Err(Error::InvalidEnsemble(format!(
                        "cluster partition {:?} does not sum to {}",
                        sizes, self.n_qubits
                    )));
                }
            }
            EnsembleKind::EnergyConstrained { excitation, delta } => {
                if !(0.0..=1.0).contains(excitation) {
                    return Err(Error::InvalidEnsemble(format!(
                        "target excitation {excitation} is outside [0, 1]"
                    )));
                }
                if !(*delta > 0.0) {
                    return Err(Error::InvalidEnsemble(
                        "acceptance window must be positive".into(),
                    ));
                }
            }
            EnsembleKind::Dicke { excitations } => {
                if *excitations == 0 || *excitations >= self.n_qubits {
                    return Err(Error::InvalidEnsemble(format!(
                        "excitation number must satisfy 1 <= N <= n-1, got N={excitations}, n={}",
                        self.n_qubits
                    )));
                }
            }
        }
        Ok(())
    }

    /// RNG for one worker stream of this spec.
    pub fn stream(&self, worker: u64) -> ChaCha8Rng {
        stream_rng(self.seed, worker)
    }

    /// One draw from the configured ensemble.
    pub fn draw(&self, rng: &mut impl Rng) -> Result<Draw> {
        let state = match &self.kind {
            EnsembleKind::Haar => haar_state(self.n_qubits, rng)?,
            EnsembleKind::Separable => separable_state(self.n_qubits, rng)?,
            EnsembleKind::Clusters(sizes) => cluster_state(sizes, rng)?,
            EnsembleKind::EnergyConstrained { excitation, delta } => {
                let (state, attempts) = energy_constrained(
                    self.n_qubits,
                    *excitation,
                    *delta,
                    DEFAULT_MAX_REJECTION_ATTEMPTS,
                    rng,
                )?;
                return Ok(Draw { state, attempts });
            }
            EnsembleKind::Dicke { excitations } => {
                dicke_generalized(self.n_qubits, *excitations, rng)?
            }
        };
        Ok(Draw { state, attempts: 1 })
    }
}
