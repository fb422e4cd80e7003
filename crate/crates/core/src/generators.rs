//! Reproducible operator sources: random Hermitian observables, random
//! quantum Boolean functions (Hermitian unitaries), low-degree operators,
//! Pauli characters, the Bell projector, and diagonal embeddings of
//! classical cube functions.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::algebra::{bell_projector, CMat, Observable, PauliString, MAX_QUBITS};
use crate::classical::BooleanFn;
use crate::error::{Error, Result};

/// The family a generated operator is drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Gaussian Hermitian matrix rescaled to operator norm 1.
    RandomHermitian,
    /// `A = 2P − 1` for a random orthogonal projection `P` of uniform rank.
    RandomQuantumBoolean,
    /// Random real Pauli coefficients supported on levels `≤ degree`.
    LowDegree { degree: usize },
    /// A fixed Pauli string `σ_s` (entries in `{0,1,2,3}` per qubit).
    PauliCharacter { entries: Vec<u8> },
    /// The Bell projector `P_{Φ⁺}` on two qubits.
    Bell,
    /// Diagonal embedding of a classical function given by its truth table.
    ClassicalEmbed { table: Vec<f64> },
}

/// A replayable description of a generated operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, n: usize, seed: u64) -> Self {
        Self { kind, n, seed }
    }

    /// Short stable label of the generator family, used in record params.
    pub fn kind_label(&self) -> &'static str {
        match self.kind {
            GeneratorKind::RandomHermitian => "random_hermitian",
            GeneratorKind::RandomQuantumBoolean => "random_quantum_boolean",
            GeneratorKind::LowDegree { .. } => "low_degree",
            GeneratorKind::PauliCharacter { .. } => "pauli_character",
            GeneratorKind::Bell => "bell",
            GeneratorKind::ClassicalEmbed { .. } => "classical_embed",
        }
    }

    /// Recovers the underlying cube function for `classical_embed` specs.
    pub fn classical_function(&self) -> Result<BooleanFn> {
        match &self.kind {
            GeneratorKind::ClassicalEmbed { table } => BooleanFn::from_table(self.n, table.clone()),
            other => Err(Error::InvalidParameter(format!(
                "generator kind {other:?} does not describe a classical function"
            ))),
        }
    }
}

/// SplitMix64 finalizer, used to derive independent per-trial streams
/// from `(master seed, counter)` pairs.
pub fn mix_seed(master: u64, counter: u64) -> u64 {
    let mut z = master ^ counter.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Materializes the observable described by `spec` (deterministic in it).
pub fn generate(spec: &GeneratorSpec) -> Result<Observable> {
    if spec.n == 0 || spec.n > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "qubit count must lie in 1..={MAX_QUBITS}, got {}",
            spec.n
        )));
    }
    let dim = 1usize << spec.n;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    match &spec.kind {
        GeneratorKind::RandomHermitian => {
            let g = gaussian_matrix(dim, &mut rng);
            let herm = (&g + g.adjoint()).scale(0.5);
            let a = Observable::from_matrix(herm)?;
            let norm = a.operator_norm()?;
            if norm == 0.0 {
                return Err(Error::InvalidParameter(
                    "degenerate zero sample; change the seed".into(),
                ));
            }
            Ok(a.scale(Complex64::new(1.0 / norm, 0.0)))
        }
        GeneratorKind::RandomQuantumBoolean => {
            use rand::Rng;
            let rank = rng.gen_range(1..dim);
            let q = orthonormal_columns(dim, rank, &mut rng);
            let projection = &q * q.adjoint();
            let two_p = projection.scale(2.0);
            let a = two_p - CMat::identity(dim, dim);
            Observable::from_matrix(a)
        }
        GeneratorKind::LowDegree { degree } => {
            use rand::Rng;
            if *degree > spec.n {
                return Err(Error::InvalidParameter(format!(
                    "degree {degree} exceeds qubit count {}",
                    spec.n
                )));
            }
            let coeffs = (0..dim * dim)
                .map(|idx| {
                    let level = crate::algebra::index_level_mask(spec.n, idx).0;
                    if level <= *degree {
                        Complex64::new(rng.gen_range(-1.0..1.0), 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            Observable::from_coeffs(spec.n, coeffs)
        }
        GeneratorKind::PauliCharacter { entries } => {
            if entries.len() != spec.n {
                return Err(Error::InvalidParameter(format!(
                    "character with {} entries for n={}",
                    entries.len(),
                    spec.n
                )));
            }
            let s = PauliString::new(entries.clone())?;
            Ok(crate::algebra::pauli_matrix(&s))
        }
        GeneratorKind::Bell => {
            if spec.n != 2 {
                return Err(Error::InvalidParameter(
                    "the Bell projector lives on two qubits".into(),
                ));
            }
            Ok(bell_projector())
        }
        GeneratorKind::ClassicalEmbed { table } => {
            let f = BooleanFn::from_table(spec.n, table.clone())?;
            classical_embed(&f)
        }
    }
}

/// Diagonal embedding of a cube function: the Walsh character `χ_S` maps to
/// the Pauli string with `σ₃` exactly on `S`, so the operator is the
/// diagonal matrix of the truth table (coordinate 1 = qubit 1 = leading
/// bit on both sides).
pub fn classical_embed(f: &BooleanFn) -> Result<Observable> {
    let dim = 1usize << f.n();
    let m = CMat::from_fn(dim, dim, |r, c| {
        if r == c {
            Complex64::new(f.table()[r], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Observable::from_matrix(m)
}

fn gaussian_matrix(dim: usize, rng: &mut ChaCha12Rng) -> CMat {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    DMatrix::from_vec(dim, dim, entries)
}

/// First `rank` columns of the QR orthonormalization of a Gaussian matrix.
fn orthonormal_columns(dim: usize, rank: usize, rng: &mut ChaCha12Rng) -> CMat {
    let g = gaussian_matrix(dim, rng);
    let qr = g.qr();
    let q = qr.q();
    q.columns(0, rank).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::pauli_matrix;
    use crate::calculus::{self, SubsetMask};

    #[test]
    fn generation_is_deterministic() {
        for kind in [
            GeneratorKind::RandomHermitian,
            GeneratorKind::RandomQuantumBoolean,
            GeneratorKind::LowDegree { degree: 2 },
        ] {
            let spec = GeneratorSpec::new(kind, 3, 7);
            let a = generate(&spec).unwrap();
            let b = generate(&spec).unwrap();
            assert_eq!(a.matrix(), b.matrix(), "{spec:?}");
        }
    }

    #[test]
    fn spec_round_trips_through_json() {
        let spec = GeneratorSpec::new(GeneratorKind::LowDegree { degree: 1 }, 4, 99);
        let text = serde_json::to_string(&spec).unwrap();
        let back: GeneratorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        let bell = GeneratorSpec::new(GeneratorKind::Bell, 2, 0);
        let text = serde_json::to_string(&bell).unwrap();
        assert!(text.contains("\"kind\":\"bell\""));
    }

    #[test]
    fn random_hermitian_has_unit_norm() {
        for seed in [1, 2, 3] {
            let a = generate(&GeneratorSpec::new(GeneratorKind::RandomHermitian, 3, seed)).unwrap();
            assert!(a.is_hermitian());
            assert!((a.operator_norm().unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn quantum_boolean_is_hermitian_unitary() {
        for seed in [7, 8, 9] {
            let a =
                generate(&GeneratorSpec::new(GeneratorKind::RandomQuantumBoolean, 3, seed)).unwrap();
            assert!(a.is_hermitian());
            let sq = a.mul(&a).unwrap();
            let id = Observable::identity(3).unwrap();
            let dev = (sq.matrix() - id.matrix())
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
            assert!(dev < 1e-10, "seed {seed}: {dev}");
        }
    }

    #[test]
    fn unitary_hermitian_variance_identity() {
        // Var(A) = ‖A − τ(A)‖₁ = 4u(1−u) with u = τ(Π₊).
        for seed in 0..10 {
            let a =
                generate(&GeneratorSpec::new(GeneratorKind::RandomQuantumBoolean, 3, seed)).unwrap();
            let var = calculus::variance(&a);
            let l1 = a.centered().schatten_norm(1.0).unwrap();
            assert!((var - l1).abs() < 1e-10, "seed {seed}");
            let u = (1.0 + a.trace().re) / 2.0;
            assert!((var - 4.0 * u * (1.0 - u)).abs() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn low_degree_respects_level_cap() {
        let a = generate(&GeneratorSpec::new(GeneratorKind::LowDegree { degree: 1 }, 3, 5)).unwrap();
        let weights = calculus::fourier_weights(&a);
        assert!(weights[2] < 1e-14 && weights[3] < 1e-14);
        assert!(weights[1] > 0.0);
        assert!(a.is_hermitian());
        assert!(
            generate(&GeneratorSpec::new(GeneratorKind::LowDegree { degree: 4 }, 3, 5)).is_err()
        );
    }

    #[test]
    fn character_and_bell_kinds() {
        let spec = GeneratorSpec::new(GeneratorKind::PauliCharacter { entries: vec![3, 0, 1] }, 3, 0);
        let a = generate(&spec).unwrap();
        let expect = pauli_matrix(&PauliString::new(vec![3, 0, 1]).unwrap());
        assert_eq!(a.matrix(), expect.matrix());
        let bell = generate(&GeneratorSpec::new(GeneratorKind::Bell, 2, 0)).unwrap();
        assert_eq!(bell.matrix(), bell_projector().matrix());
        assert!(generate(&GeneratorSpec::new(GeneratorKind::Bell, 3, 0)).is_err());
    }

    #[test]
    fn embed_dictator_and_constant() {
        let dictator = BooleanFn::character(2, 0b10).unwrap();
        let a = classical_embed(&dictator).unwrap();
        let expect = pauli_matrix(&PauliString::new(vec![3, 0]).unwrap());
        assert_eq!(a.matrix(), expect.matrix());
        let one = BooleanFn::from_table(2, vec![1.0; 4]).unwrap();
        let id = classical_embed(&one).unwrap();
        assert_eq!(id.matrix(), Observable::identity(2).unwrap().matrix());
    }

    #[test]
    fn embed_majority_statistics() {
        let f = BooleanFn::majority3();
        let a = classical_embed(&f).unwrap();
        assert!((calculus::variance(&a) - f.variance()).abs() < 1e-13);
        for i in 0..3 {
            let j = SubsetMask::singleton(3, i).unwrap();
            let q2 = calculus::influence_l2(&a, &j);
            let c2 = f.influence_l2(i).unwrap();
            assert!((q2 - c2).abs() < 1e-13, "i={i}");
            let q1 = calculus::influence(&a, &j, 1.0).unwrap();
            let c1 = f.derivative(i).unwrap().lp_norm(1.0).unwrap();
            assert!((q1 - c1).abs() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn embed_commutes_with_calculus() {
        let f = BooleanFn::random(3, 31, false);
        let a = classical_embed(&f).unwrap();
        let t = 0.6;
        let lhs = calculus::semigroup_apply(&a, t).unwrap();
        let rhs = classical_embed(&f.heat(t).unwrap()).unwrap();
        let dev = (lhs.matrix() - rhs.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
        for i in 0..3 {
            let j = SubsetMask::singleton(3, i).unwrap();
            let lhs = calculus::derivative(&a, &j).unwrap();
            let rhs = classical_embed(&f.derivative(i).unwrap()).unwrap();
            let dev =
                (lhs.matrix() - rhs.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-12, "i={i}");
            let lhs = calculus::cond_expectation(&a, &j).unwrap();
            let g = f
                .derivative(i)
                .map(|d| {
                    let walsh: Vec<f64> = f
                        .walsh()
                        .iter()
                        .zip(d.walsh())
                        .map(|(full, kept)| full - kept)
                        .collect();
                    BooleanFn::from_walsh(3, walsh).unwrap()
                })
                .unwrap();
            let rhs = classical_embed(&g).unwrap();
            let dev =
                (lhs.matrix() - rhs.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(dev < 1e-12, "i={i}");
        }
    }

    #[test]
    fn seed_mixing_separates_streams() {
        let a = mix_seed(42, 0);
        let b = mix_seed(42, 1);
        let c = mix_seed(43, 0);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, mix_seed(42, 0));
    }

    #[test]
    fn rejects_out_of_range_sizes() {
        assert!(generate(&GeneratorSpec::new(GeneratorKind::RandomHermitian, 0, 1)).is_err());
        assert!(
            generate(&GeneratorSpec::new(GeneratorKind::RandomHermitian, MAX_QUBITS + 1, 1))
                .is_err()
        );
    }
}
