//! Dense complex operator algebra on n qubits: the Pauli basis, the
//! Pauli–Fourier transform, normalized Schatten norms, Hermitian spectral
//! calculus, and PSD-margin testing.
//!
//! Conventions: the algebra is `M_2(C)^{⊗n}` with the *normalized* trace
//! `τ = 2^{-n} tr`. Qubit 1 occupies the most significant bit of the matrix
//! row/column index and the most significant base-4 digit of a Pauli-string
//! index, so `σ_s = σ_{s_1} ⊗ … ⊗ σ_{s_n}` matches the Kronecker product.

use nalgebra::DMatrix;
use num_complex::Complex64;
use once_cell::sync::OnceCell;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout.
pub type CMat = DMatrix<Complex64>;

/// Hard cap on the number of qubits (dense 2^n × 2^n matrices).
pub const MAX_QUBITS: usize = 12;
/// Representation round-trip / Hermiticity tolerance.
pub const EPS_RT: f64 = 1e-10;
/// Relative eigendecomposition tolerance.
pub const EPS_EIG: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::InvalidParameter(format!(
            "qubit count must be in 1..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

/// A Pauli multi-index `s ∈ {0,1,2,3}^n` addressing one Fourier coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    entries: Vec<u8>,
}

impl PauliString {
    /// Builds a Pauli string from per-site symbols in `{0,1,2,3}`.
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        check_n(entries.len())?;
        if let Some(&bad) = entries.iter().find(|&&e| e > 3) {
            return Err(Error::InvalidParameter(format!(
                "Pauli symbol must be in 0..=3, got {bad}"
            )));
        }
        Ok(Self { entries })
    }

    /// Decodes the base-4 index `idx` (site 1 = most significant digit).
    pub fn from_index(n: usize, idx: usize) -> Result<Self> {
        check_n(n)?;
        if idx >= 1 << (2 * n) {
            return Err(Error::InvalidParameter(format!(
                "Pauli index {idx} out of range for n={n}"
            )));
        }
        let entries = (0..n)
            .map(|j| ((idx >> (2 * (n - 1 - j))) & 3) as u8)
            .collect();
        Ok(Self { entries })
    }

    /// Number of qubits.
    pub fn n(&self) -> usize {
        self.entries.len()
    }

    /// Per-site symbols.
    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    /// Base-4 index of this string (site 1 = most significant digit).
    pub fn index(&self) -> usize {
        self.entries.iter().fold(0, |acc, &e| acc * 4 + e as usize)
    }

    /// Sites with a non-identity symbol (0-based).
    pub fn support(&self) -> Vec<usize> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(j, _)| j)
            .collect()
    }

    /// Number of non-identity sites.
    pub fn level(&self) -> usize {
        self.entries.iter().filter(|&&e| e != 0).count()
    }
}

/// Decomposes a base-4 Pauli index into (level, support bitmask).
///
/// Bit `j` of the mask (counting from 0) corresponds to site `j+1`.
pub(crate) fn index_level_mask(n: usize, idx: usize) -> (usize, u32) {
    let mut level = 0;
    let mut mask = 0u32;
    for j in 0..n {
        if (idx >> (2 * (n - 1 - j))) & 3 != 0 {
            level += 1;
            mask |= 1 << j;
        }
    }
    (level, mask)
}

/// Matrix slot (row-major) holding the coefficient of Pauli index `idx`
/// after the in-place per-qubit transform.
fn slot(n: usize, dim: usize, idx: usize) -> usize {
    let mut r = 0;
    let mut c = 0;
    for j in 0..n {
        let d = (idx >> (2 * (n - 1 - j))) & 3;
        r |= (d >> 1) << (n - 1 - j);
        c |= (d & 1) << (n - 1 - j);
    }
    r * dim + c
}

/// In-place fast Pauli analysis: matrix entries (row-major) → mixed basis.
///
/// Per qubit, the 2×2 block `[[a, b], [c, d]]` maps to the coefficients
/// `(a+d)/2, (b+c)/2, i(b−c)/2, (a−d)/2` of `σ_0, σ_1, σ_2, σ_3`.
fn transform_forward(n: usize, data: &mut [Complex64]) {
    let dim = 1usize << n;
    for j in 0..n {
        let bit = 1usize << (n - 1 - j);
        for r in 0..dim {
            if r & bit != 0 {
                continue;
            }
            for c in 0..dim {
                if c & bit != 0 {
                    continue;
                }
                let i00 = r * dim + c;
                let i01 = r * dim + (c | bit);
                let i10 = (r | bit) * dim + c;
                let i11 = (r | bit) * dim + (c | bit);
                let (a, b, cc, d) = (data[i00], data[i01], data[i10], data[i11]);
                data[i00] = (a + d) * 0.5;
                data[i01] = (b + cc) * 0.5;
                data[i10] = (b - cc) * Complex64::new(0.0, 0.5);
                data[i11] = (a - d) * 0.5;
            }
        }
    }
}

/// In-place inverse of [`transform_forward`].
fn transform_inverse(n: usize, data: &mut [Complex64]) {
    let dim = 1usize << n;
    for j in 0..n {
        let bit = 1usize << (n - 1 - j);
        for r in 0..dim {
            if r & bit != 0 {
                continue;
            }
            for c in 0..dim {
                if c & bit != 0 {
                    continue;
                }
                let i00 = r * dim + c;
                let i01 = r * dim + (c | bit);
                let i10 = (r | bit) * dim + c;
                let i11 = (r | bit) * dim + (c | bit);
                let (c0, c1, c2, c3) = (data[i00], data[i01], data[i10], data[i11]);
                let ic2 = Complex64::new(0.0, 1.0) * c2;
                data[i00] = c0 + c3;
                data[i01] = c1 - ic2;
                data[i10] = c1 + ic2;
                data[i11] = c0 - c3;
            }
        }
    }
}

fn expand_matrix(n: usize, m: &CMat) -> Vec<Complex64> {
    let dim = 1usize << n;
    let mut scratch: Vec<Complex64> = (0..dim * dim)
        .map(|i| m[(i / dim, i % dim)])
        .collect();
    transform_forward(n, &mut scratch);
    (0..dim * dim).map(|idx| scratch[slot(n, dim, idx)]).collect()
}

fn synthesize_matrix(n: usize, coeffs: &[Complex64]) -> CMat {
    let dim = 1usize << n;
    let mut scratch = vec![ZERO; dim * dim];
    for (idx, &c) in coeffs.iter().enumerate() {
        scratch[slot(n, dim, idx)] = c;
    }
    transform_inverse(n, &mut scratch);
    CMat::from_fn(dim, dim, |r, c| scratch[r * dim + c])
}

/// An n-qubit operator in dual representation: dense matrix ⟷ Pauli–Fourier
/// coefficients, each side synthesized lazily from the other.
#[derive(Debug, Clone)]
pub struct Observable {
    n: usize,
    matrix: OnceCell<CMat>,
    coeffs: OnceCell<Vec<Complex64>>,
}

impl Observable {
    /// Wraps a dense `2^n × 2^n` matrix.
    pub fn from_matrix(matrix: CMat) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim == 0 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "expected a square 2^n × 2^n matrix, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_n(n)?;
        let cell = OnceCell::new();
        let _ = cell.set(matrix);
        Ok(Self {
            n,
            matrix: cell,
            coeffs: OnceCell::new(),
        })
    }

    /// Wraps `4^n` Pauli–Fourier coefficients in base-4 index order.
    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        check_n(n)?;
        if coeffs.len() != 1 << (2 * n) {
            return Err(Error::DimensionMismatch(format!(
                "expected 4^{n} = {} coefficients, got {}",
                1usize << (2 * n),
                coeffs.len()
            )));
        }
        let cell = OnceCell::new();
        let _ = cell.set(coeffs);
        Ok(Self {
            n,
            matrix: OnceCell::new(),
            coeffs: cell,
        })
    }

    /// The zero operator.
    pub fn zero(n: usize) -> Result<Self> {
        Self::from_coeffs(n, vec![ZERO; 1 << (2 * n)])
    }

    /// The identity operator.
    pub fn identity(n: usize) -> Result<Self> {
        let mut coeffs = vec![ZERO; 1 << (2 * n)];
        coeffs[0] = ONE;
        Self::from_coeffs(n, coeffs)
    }

    /// Number of qubits.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Matrix dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// Dense matrix representation (synthesized on first use).
    pub fn matrix(&self) -> &CMat {
        self.matrix
            .get_or_init(|| synthesize_matrix(self.n, self.coeffs.get().expect("representation")))
    }

    /// Pauli–Fourier coefficients in base-4 index order (computed on first use).
    pub fn coeffs(&self) -> &[Complex64] {
        self.coeffs
            .get_or_init(|| expand_matrix(self.n, self.matrix.get().expect("representation")))
    }

    /// The coefficient `Â_s = τ(σ_s A)`.
    pub fn coeff(&self, s: &PauliString) -> Result<Complex64> {
        if s.n() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "Pauli string on {} qubits, operator on {}",
                s.n(),
                self.n
            )));
        }
        Ok(self.coeffs()[s.index()])
    }

    /// Normalized trace `τ(A)`.
    pub fn trace(&self) -> Complex64 {
        if let Some(coeffs) = self.coeffs.get() {
            coeffs[0]
        } else {
            self.matrix().diagonal().sum() / Complex64::new(self.dim() as f64, 0.0)
        }
    }

    /// Frobenius norm of `A − A*` (unnormalized; dominates the operator norm).
    pub fn herm_deviation(&self) -> f64 {
        let m = self.matrix();
        let mut acc = 0.0;
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                acc += (m[(r, c)] - m[(c, r)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Whether `‖A − A*‖ ≤ εᵣₜ` (via the Frobenius upper bound).
    pub fn is_hermitian(&self) -> bool {
        self.herm_deviation() <= EPS_RT
    }

    /// Adjoint `A*`.
    pub fn adjoint(&self) -> Self {
        if let Some(coeffs) = self.coeffs.get() {
            let conj = coeffs.iter().map(|c| c.conj()).collect();
            Self::from_coeffs(self.n, conj).expect("same shape")
        } else {
            Self::from_matrix(self.matrix().adjoint()).expect("same shape")
        }
    }

    /// Sum `A + B`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    /// Difference `A − B`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "operators on {} and {} qubits",
                self.n, other.n
            )));
        }
        if let (Some(a), Some(b)) = (self.coeffs.get(), other.coeffs.get()) {
            let coeffs = a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect();
            Self::from_coeffs(self.n, coeffs)
        } else {
            let (ma, mb) = (self.matrix(), other.matrix());
            Self::from_matrix(CMat::from_fn(ma.nrows(), ma.ncols(), |r, c| {
                f(ma[(r, c)], mb[(r, c)])
            }))
        }
    }

    /// Scalar multiple `c·A`.
    pub fn scale(&self, c: Complex64) -> Self {
        if let Some(coeffs) = self.coeffs.get() {
            let scaled = coeffs.iter().map(|&x| x * c).collect();
            Self::from_coeffs(self.n, scaled).expect("same shape")
        } else {
            Self::from_matrix(self.matrix().map(|x| x * c)).expect("same shape")
        }
    }

    /// Operator product `A·B`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "operators on {} and {} qubits",
                self.n, other.n
            )));
        }
        Self::from_matrix(self.matrix() * other.matrix())
    }

    /// `A − τ(A)·1`.
    pub fn centered(&self) -> Self {
        let mut shifted = self.clone();
        let t = self.trace();
        if let Some(coeffs) = shifted.coeffs.get() {
            let mut coeffs = coeffs.clone();
            coeffs[0] -= t;
            return Self::from_coeffs(self.n, coeffs).expect("same shape");
        }
        let mut m = self.matrix().clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= t;
        }
        shifted = Self::from_matrix(m).expect("same shape");
        shifted
    }

    /// Normalized L2 norm `‖A‖₂ = (Σ_s |Â_s|²)^{1/2}` (Parseval).
    pub fn l2_norm(&self) -> f64 {
        if let Some(coeffs) = self.coeffs.get() {
            coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
        } else {
            let m = self.matrix();
            (m.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.dim() as f64).sqrt()
        }
    }

    /// Singular values of `A` (ascending).
    fn singular_values(&self) -> Result<Vec<f64>> {
        if self.is_hermitian() {
            let mut vals: Vec<f64> = self.spectral()?.eigenvalues.iter().map(|v| v.abs()).collect();
            vals.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            Ok(vals)
        } else {
            let gram = self.adjoint().mul(self)?;
            let eig = gram.spectral()?;
            Ok(eig.eigenvalues.iter().map(|v| v.max(0.0).sqrt()).collect())
        }
    }

    /// Normalized Schatten norm `‖A‖_p = (τ|A|^p)^{1/p}`; `p = ∞` gives the
    /// operator norm.
    pub fn schatten_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Schatten exponent must satisfy p ≥ 1, got {p}"
            )));
        }
        let vals = self.singular_values()?;
        if p.is_infinite() {
            return Ok(vals.last().copied().unwrap_or(0.0));
        }
        let top = vals.last().copied().unwrap_or(0.0);
        if top == 0.0 {
            return Ok(0.0);
        }
        // Factor out the largest singular value to avoid overflow for large p.
        let mean: f64 =
            vals.iter().map(|v| (v / top).powf(p)).sum::<f64>() / vals.len() as f64;
        Ok(top * mean.powf(1.0 / p))
    }

    /// Operator norm `‖A‖_∞`.
    pub fn operator_norm(&self) -> Result<f64> {
        self.schatten_norm(f64::INFINITY)
    }

    /// Hermitian eigendecomposition; rejects non-Hermitian input.
    pub fn spectral(&self) -> Result<SpectralDecomp> {
        let dev = self.herm_deviation();
        let scale = self.matrix().iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        let tol = EPS_RT * scale.max(1.0);
        if dev > tol {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: tol,
            });
        }
        // Symmetrize so the eigensolver sees an exactly Hermitian input.
        let m = self.matrix();
        let herm = CMat::from_fn(m.nrows(), m.ncols(), |r, c| {
            (m[(r, c)] + m[(c, r)].conj()) * 0.5
        });
        let eig = herm.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[a]
                .partial_cmp(&eig.eigenvalues[b])
                .ok_or(())
                .map_err(|_| ())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let dim = m.nrows();
        let eigenvectors = CMat::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(SpectralDecomp {
            eigenvalues,
            eigenvectors,
        })
    }

    /// `|A|^r = (A*A)^{r/2}` via spectral calculus; the result is PSD Hermitian.
    pub fn abs_power(&self, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "absolute-value power must be positive, got {r}"
            )));
        }
        let gram = self.adjoint().mul(self)?;
        let eig = gram.spectral()?;
        let powered: Vec<f64> = eig
            .eigenvalues
            .iter()
            .map(|v| v.max(0.0).powf(r / 2.0))
            .collect();
        Self::from_matrix(eig.recompose(&powered))
    }

    /// Minimum eigenvalue of a Hermitian operator; `A ⪰ 0` iff the margin is
    /// nonnegative up to tolerance.
    pub fn psd_margin(&self) -> Result<f64> {
        let eig = self.spectral()?;
        Ok(eig.eigenvalues.first().copied().unwrap_or(0.0))
    }
}

/// Eigendecomposition of a Hermitian operator (eigenvalues ascending).
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl SpectralDecomp {
    /// Rebuilds `U diag(values) U*` for the given spectrum replacement.
    pub fn recompose(&self, values: &[f64]) -> CMat {
        let dim = self.eigenvectors.nrows();
        let diag = CMat::from_fn(dim, dim, |r, c| {
            if r == c {
                Complex64::new(values[r], 0.0)
            } else {
                ZERO
            }
        });
        &self.eigenvectors * diag * self.eigenvectors.adjoint()
    }
}

/// The basis element `σ_s = σ_{s_1} ⊗ … ⊗ σ_{s_n}`.
pub fn pauli_matrix(s: &PauliString) -> Observable {
    let n = s.n();
    let mut coeffs = vec![ZERO; 1 << (2 * n)];
    coeffs[s.index()] = ONE;
    Observable::from_coeffs(n, coeffs).expect("well-formed string")
}

/// The Bell projector `P_{Φ⁺} = |Φ⁺⟩⟨Φ⁺|` on two qubits,
/// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn bell_projector() -> Observable {
    let half = Complex64::new(0.5, 0.0);
    let mut m = CMat::zeros(4, 4);
    m[(0, 0)] = half;
    m[(0, 3)] = half;
    m[(3, 0)] = half;
    m[(3, 3)] = half;
    Observable::from_matrix(m).expect("4×4")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(k: u8) -> CMat {
        let i = Complex64::new(0.0, 1.0);
        let (a, b, c, d) = match k {
            0 => (ONE, ZERO, ZERO, ONE),
            1 => (ZERO, ONE, ONE, ZERO),
            2 => (ZERO, -i, i, ZERO),
            3 => (ONE, ZERO, ZERO, -ONE),
            _ => unreachable!(),
        };
        CMat::from_row_slice(2, 2, &[a, b, c, d])
    }

    fn kron(a: &CMat, b: &CMat) -> CMat {
        a.kronecker(b)
    }

    #[test]
    fn pauli_matrix_matches_kronecker_oracle() {
        for idx in 0..16 {
            let s = PauliString::from_index(2, idx).unwrap();
            let expect = kron(&sigma(s.entries()[0]), &sigma(s.entries()[1]));
            let got = pauli_matrix(&s);
            let diff = (got.matrix() - &expect).iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-14, "σ_{idx} mismatch: {diff}");
        }
    }

    #[test]
    fn single_site_pauli_x() {
        let s = PauliString::new(vec![1]).unwrap();
        let m = pauli_matrix(&s);
        assert_eq!(m.matrix()[(0, 1)], ONE);
        assert_eq!(m.matrix()[(1, 0)], ONE);
        assert_eq!(m.matrix()[(0, 0)], ZERO);
    }

    #[test]
    fn orthonormality_of_basis() {
        // τ(σ_s* σ_r) = δ_sr, checked exactly for n = 2.
        for a in 0..16 {
            let sa = pauli_matrix(&PauliString::from_index(2, a).unwrap());
            for b in 0..16 {
                let sb = pauli_matrix(&PauliString::from_index(2, b).unwrap());
                let prod = sa.adjoint().mul(&sb).unwrap();
                let t = prod.trace();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((t.re - expect).abs() < 1e-12 && t.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bell_projector_coefficients() {
        let p = bell_projector();
        let q = |e: Vec<u8>| p.coeff(&PauliString::new(e).unwrap()).unwrap().re;
        assert!((q(vec![0, 0]) - 0.25).abs() < 1e-14);
        assert!((q(vec![1, 1]) - 0.25).abs() < 1e-14);
        assert!((q(vec![2, 2]) + 0.25).abs() < 1e-14);
        assert!((q(vec![3, 3]) - 0.25).abs() < 1e-14);
        let others: f64 = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(i, _)| ![0b0000, 0b0101, 0b1010, 0b1111].contains(i))
            .map(|(_, c)| c.norm())
            .sum();
        assert!(others < 1e-13);
    }

    #[test]
    fn bell_projector_is_idempotent_and_norms() {
        let p = bell_projector();
        let p2 = p.mul(&p).unwrap();
        let diff = (p2.matrix() - p.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14);
        assert!((p.schatten_norm(1.0).unwrap() - 0.25).abs() < 1e-12);
        assert!((p.schatten_norm(f64::INFINITY).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_expansion() {
        let id = Observable::identity(2).unwrap();
        assert_eq!(id.coeffs()[0], ONE);
        assert!(id.coeffs()[1..].iter().all(|c| c.norm() < 1e-15));
        let m = id.matrix();
        assert_eq!(m[(0, 0)], ONE);
        assert_eq!(m[(1, 2)], ZERO);
    }

    #[test]
    fn schatten_norm_of_characters_is_one() {
        let s = PauliString::new(vec![2, 3, 1]).unwrap();
        let m = pauli_matrix(&s);
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            assert!((m.schatten_norm(p).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn schatten_rejects_p_below_one() {
        let m = Observable::identity(1).unwrap();
        assert!(m.schatten_norm(0.5).is_err());
    }

    #[test]
    fn abs_power_of_scalar() {
        let c = Observable::identity(1).unwrap().scale(Complex64::new(-2.0, 0.0));
        let a = c.abs_power(3.0).unwrap();
        assert!((a.matrix()[(0, 0)].re - 8.0).abs() < 1e-10);
        assert!(a.matrix()[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn psd_margin_examples() {
        assert!((Observable::identity(2).unwrap().psd_margin().unwrap() - 1.0).abs() < 1e-12);
        let neg = pauli_matrix(&PauliString::new(vec![3]).unwrap()).scale(Complex64::new(-1.0, 0.0));
        assert!((neg.psd_margin().unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn psd_margin_rejects_non_hermitian() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = ONE;
        let a = Observable::from_matrix(m).unwrap();
        assert!(matches!(a.psd_margin(), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn round_trip_random_matrix() {
        // Deterministic pseudo-random entries; checks expand ∘ synthesize = id.
        let n = 3;
        let dim = 1 << n;
        let m = CMat::from_fn(dim, dim, |r, c| {
            let x = ((r * 31 + c * 17 + 5) % 101) as f64 / 101.0 - 0.5;
            let y = ((r * 13 + c * 41 + 3) % 97) as f64 / 97.0 - 0.5;
            Complex64::new(x, y)
        });
        let a = Observable::from_matrix(m.clone()).unwrap();
        let back = Observable::from_coeffs(n, a.coeffs().to_vec()).unwrap();
        let diff = (back.matrix() - &m).iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-13, "round trip error {diff}");
        // Parseval.
        let parseval: f64 = a.coeffs().iter().map(|c| c.norm_sqr()).sum();
        let l2 = a.l2_norm().powi(2);
        assert!((parseval - l2).abs() <= 1e-10 * l2.max(1.0));
    }

    #[test]
    fn expansion_against_inner_product_oracle() {
        // Â_s = τ(σ_s A) computed densely must match the fast transform.
        let n = 2;
        let dim = 1 << n;
        let m = CMat::from_fn(dim, dim, |r, c| {
            Complex64::new((r as f64 - 1.3) * (c as f64 + 0.7), (r * c) as f64 * 0.11)
        });
        let a = Observable::from_matrix(m.clone()).unwrap();
        for idx in 0..16 {
            let s = PauliString::from_index(n, idx).unwrap();
            let sm = pauli_matrix(&s);
            let prod = sm.matrix() * &m;
            let oracle = prod.diagonal().sum() / Complex64::new(dim as f64, 0.0);
            let got = a.coeffs()[idx];
            assert!((oracle - got).norm() < 1e-12, "idx {idx}");
        }
    }
}
