//! Walsh–Fourier analysis on the classical cube `{±1}ⁿ` under the uniform
//! measure: heat semigroup, discrete derivatives, influences, local
//! energies `V_i`, entropy, and the integral lemma machinery.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Quadrature tolerance for `V_i` cross-checks.
pub const EPS_QUAD_CLASSICAL: f64 = 1e-6;

/// A real-valued function on `{±1}ⁿ` held in both point and Walsh form.
///
/// Index bit conventions: coordinate `i` (0-based) reads bit `n−1−i` of the
/// table index, so coordinate 0 is the most significant bit, matching the
/// qubit order of the operator algebra; a set bit means `x_i = −1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanFn {
    n: usize,
    table: Vec<f64>,
    walsh: Vec<f64>,
}

/// In-place Walsh–Hadamard butterfly (unnormalized).
fn fwht(data: &mut [f64]) {
    let len = data.len();
    let mut h = 1;
    while h < len {
        for block in (0..len).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (data[i], data[i + h]);
                data[i] = a + b;
                data[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

impl BooleanFn {
    /// Builds from a truth table of length `2ⁿ`.
    pub fn from_table(n: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "table of length {} for n={n}",
                table.len()
            )));
        }
        let mut walsh = table.clone();
        fwht(&mut walsh);
        let scale = 1.0 / (1 << n) as f64;
        walsh.iter_mut().for_each(|w| *w *= scale);
        Ok(Self { n, table, walsh })
    }

    /// Builds from Walsh coefficients indexed by subset bitmask.
    pub fn from_walsh(n: usize, walsh: Vec<f64>) -> Result<Self> {
        if walsh.len() != 1 << n {
            return Err(Error::DimensionMismatch(format!(
                "coefficient vector of length {} for n={n}",
                walsh.len()
            )));
        }
        let mut table = walsh.clone();
        fwht(&mut table);
        Ok(Self { n, table, walsh })
    }

    /// The Walsh character `χ_S` for the subset bitmask `s`
    /// (bit `n−1−i` = coordinate `i`).
    pub fn character(n: usize, s: usize) -> Result<Self> {
        if s >= 1 << n {
            return Err(Error::InvalidParameter(format!(
                "subset mask {s} out of range for n={n}"
            )));
        }
        let mut walsh = vec![0.0; 1 << n];
        walsh[s] = 1.0;
        Self::from_walsh(n, walsh)
    }

    /// The 3-variable majority function (±1-valued).
    pub fn majority3() -> Self {
        let table = (0..8u32)
            .map(|b| if b.count_ones() >= 2 { -1.0 } else { 1.0 })
            .collect();
        Self::from_table(3, table).expect("fixed arity")
    }

    /// A seeded random function; `pm_one` selects ±1-valued output by
    /// sign-thresholding, otherwise the table is uniform in `[−1, 1]`.
    pub fn random(n: usize, seed: u64, pm_one: bool) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let table = (0..1usize << n)
            .map(|_| {
                let v: f64 = rng.gen_range(-1.0..1.0);
                if pm_one {
                    if v >= 0.0 {
                        1.0
                    } else {
                        -1.0
                    }
                } else {
                    v
                }
            })
            .collect();
        Self::from_table(n, table).expect("matching length")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn walsh(&self) -> &[f64] {
        &self.walsh
    }

    /// Subset mask bit for coordinate `i` (0-based).
    fn coord_bit(&self, i: usize) -> usize {
        1 << (self.n - 1 - i)
    }

    /// `E[f]`.
    pub fn mean(&self) -> f64 {
        self.walsh[0]
    }

    /// `Var(f) = Σ_{S≠∅} f̂(S)²`.
    pub fn variance(&self) -> f64 {
        self.walsh[1..].iter().map(|w| w * w).sum()
    }

    /// `f − E[f]`.
    pub fn centered(&self) -> Self {
        let mut walsh = self.walsh.clone();
        walsh[0] = 0.0;
        Self::from_walsh(self.n, walsh).expect("same shape")
    }

    /// `(E|f|^p)^{1/p}` under the uniform measure; `p = ∞` gives the max.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_infinite() {
            return Ok(self.table.iter().fold(0.0, |m, v| m.max(v.abs())));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "norm exponent must satisfy p ≥ 1, got {p}"
            )));
        }
        let mean: f64 =
            self.table.iter().map(|v| v.abs().powf(p)).sum::<f64>() / self.table.len() as f64;
        Ok(mean.powf(1.0 / p))
    }

    /// Applies a Walsh multiplier `f̂(S) ↦ m(|S|, S)·f̂(S)`.
    fn multiplier(&self, m: impl Fn(usize, usize) -> f64) -> Self {
        let walsh = self
            .walsh
            .iter()
            .enumerate()
            .map(|(s, w)| w * m(s.count_ones() as usize, s))
            .collect();
        Self::from_walsh(self.n, walsh).expect("same shape")
    }

    /// Heat semigroup `P_t f` (multiplier `e^{−t|S|}`).
    pub fn heat(&self, t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "heat semigroup time must be nonnegative, got {t}"
            )));
        }
        Ok(self.multiplier(|level, _| (-t * level as f64).exp()))
    }

    /// Discrete derivative `D_i f` (keeps `S ∋ i`).
    pub fn derivative(&self, i: usize) -> Result<Self> {
        self.check_coord(i)?;
        let bit = self.coord_bit(i);
        Ok(self.multiplier(|_, s| if s & bit != 0 { 1.0 } else { 0.0 }))
    }

    /// `D_i f(x) = (f(x) − f(x^{(i)}))/2` straight from the truth table,
    /// independent of the Walsh route.
    pub fn derivative_via_flips(&self, i: usize) -> Result<Self> {
        self.check_coord(i)?;
        let bit = self.coord_bit(i);
        let table = (0..self.table.len())
            .map(|x| 0.5 * (self.table[x] - self.table[x ^ bit]))
            .collect();
        Self::from_table(self.n, table)
    }

    fn check_coord(&self, i: usize) -> Result<()> {
        if i >= self.n {
            return Err(Error::InvalidParameter(format!(
                "coordinate {i} out of range for n={}",
                self.n
            )));
        }
        Ok(())
    }

    /// `‖D_i f‖₂²` (exact Parseval sum).
    pub fn influence_l2(&self, i: usize) -> Result<f64> {
        self.check_coord(i)?;
        let bit = self.coord_bit(i);
        Ok(self
            .walsh
            .iter()
            .enumerate()
            .filter(|(s, _)| s & bit != 0)
            .map(|(_, w)| w * w)
            .sum())
    }

    /// Local energy `V_i(f) = Σ_{S∋i} f̂(S)²/|S| = ∫₀^∞ 2‖D_i P_t f‖₂² dt`.
    pub fn v_i(&self, i: usize, method: VIMethod) -> Result<f64> {
        self.check_coord(i)?;
        match method {
            VIMethod::Fourier => {
                let bit = self.coord_bit(i);
                Ok(self
                    .walsh
                    .iter()
                    .enumerate()
                    .filter(|(s, _)| s & bit != 0)
                    .map(|(s, w)| w * w / s.count_ones() as f64)
                    .sum())
            }
            VIMethod::Quadrature => {
                let inf2 = self.influence_l2(i)?;
                if inf2 == 0.0 {
                    return Ok(0.0);
                }
                // Tail ≤ e^{−2T}·Inf_i ≤ ε/2.
                let horizon = ((2.0 * inf2 / EPS_QUAD_CLASSICAL).ln() / 2.0).max(1.0);
                // Route independence: evolve the table, then differentiate
                // by coordinate flips and average the squares pointwise.
                let integrand = |t: f64| {
                    let g = self
                        .heat(t)
                        .and_then(|h| h.derivative_via_flips(i))
                        .expect("valid inputs");
                    2.0 * g.table.iter().map(|v| v * v).sum::<f64>() / g.table.len() as f64
                };
                Ok(adaptive_simpson(
                    integrand,
                    0.0,
                    horizon,
                    EPS_QUAD_CLASSICAL * 0.25,
                ))
            }
        }
    }

    /// `u(t) = ‖P_t f‖₂² = Σ_S e^{−2t|S|} f̂(S)²` (exact sum).
    pub fn u_decay(&self, t: f64) -> f64 {
        self.walsh
            .iter()
            .enumerate()
            .map(|(s, w)| (-2.0 * t * s.count_ones() as f64).exp() * w * w)
            .sum()
    }

    /// `u′(t) = −2 Σ_S |S| e^{−2t|S|} f̂(S)²` (exact sum).
    pub fn u_decay_derivative(&self, t: f64) -> f64 {
        -2.0 * self
            .walsh
            .iter()
            .enumerate()
            .map(|(s, w)| {
                let level = s.count_ones() as f64;
                level * (-2.0 * t * level).exp() * w * w
            })
            .sum::<f64>()
    }

    /// Entropy of the square: `Ent(f²) = E[f² ln f²] − E[f²] ln E[f²]`
    /// (with `0·ln 0 = 0`).
    pub fn entropy_of_square(&self) -> f64 {
        let xlnx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
        let len = self.table.len() as f64;
        let mean_sq: f64 = self.table.iter().map(|v| v * v).sum::<f64>() / len;
        let mean_xlnx: f64 = self.table.iter().map(|v| xlnx(v * v)).sum::<f64>() / len;
        mean_xlnx - xlnx(mean_sq)
    }
}

/// Evaluation strategy for the local energy `V_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VIMethod {
    Fourier,
    Quadrature,
}

/// `G(x) = ∫₀ˣ 2/(1 + c·ln⁺(√s/b)) ds`: closed form `2x` on `[0, b²]`
/// (where the logarithm vanishes) plus adaptive quadrature beyond.
pub fn g_integral(x: f64, b: f64, c: f64) -> Result<f64> {
    if !(x >= 0.0) || !(c >= 0.0) || !(b >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "G requires nonnegative arguments, got x={x}, b={b}, c={c}"
        )));
    }
    if b == 0.0 {
        // √s/b = ∞: the integrand collapses to 0 for every s > 0.
        return Ok(0.0);
    }
    let b_sq = b * b;
    if x <= b_sq {
        return Ok(2.0 * x);
    }
    let tail = adaptive_simpson(
        |s| 2.0 / (1.0 + c * (s.sqrt() / b).ln()),
        b_sq,
        x,
        1e-8,
    );
    Ok(2.0 * b_sq + tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn walsh_round_trip_and_parseval() {
        let f = BooleanFn::random(4, 11, false);
        let back = BooleanFn::from_walsh(4, f.walsh().to_vec()).unwrap();
        assert!(dist(f.table(), back.table()) < 1e-12);
        let e_sq: f64 = f.table().iter().map(|v| v * v).sum::<f64>() / 16.0;
        let coeff_sq: f64 = f.walsh().iter().map(|w| w * w).sum();
        assert!((e_sq - coeff_sq).abs() < 1e-12);
    }

    #[test]
    fn character_tables_are_signs() {
        // χ_{{1,2}} on n=3: product of the two leading coordinates.
        let f = BooleanFn::character(3, 0b110).unwrap();
        for x in 0..8usize {
            let expect = if ((x >> 2) ^ (x >> 1)) & 1 == 0 { 1.0 } else { -1.0 };
            assert_eq!(f.table()[x], expect);
        }
        assert!((f.variance() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_multiplier_matches_flips() {
        let f = BooleanFn::random(4, 3, false);
        for i in 0..4 {
            let a = f.derivative(i).unwrap();
            let b = f.derivative_via_flips(i).unwrap();
            assert!(dist(a.table(), b.table()) < 1e-12, "i={i}");
        }
    }

    #[test]
    fn derivative_of_characters() {
        let f = BooleanFn::character(3, 0b110).unwrap();
        let d0 = f.derivative(0).unwrap();
        assert!(dist(d0.table(), f.table()) < 1e-14);
        let d2 = f.derivative(2).unwrap();
        assert!(d2.lp_norm(2.0).unwrap() < 1e-14);
    }

    #[test]
    fn heat_fixes_time_zero_and_decays() {
        let f = BooleanFn::random(3, 9, true);
        let p0 = f.heat(0.0).unwrap();
        assert!(dist(f.table(), p0.table()) < 1e-13);
        let s = BooleanFn::character(3, 0b101).unwrap();
        let pt = s.heat(0.4).unwrap();
        assert!((pt.walsh()[0b101] - (-0.8f64).exp()).abs() < 1e-14);
        assert!(f.heat(-1.0).is_err());
    }

    #[test]
    fn majority3_frozen_values() {
        let f = BooleanFn::majority3();
        // Maj₃ = ½(x₁ + x₂ + x₃ − x₁x₂x₃).
        for s in [0b100, 0b010, 0b001] {
            assert!((f.walsh()[s] - 0.5).abs() < 1e-14);
        }
        assert!((f.walsh()[0b111] + 0.5).abs() < 1e-14);
        assert!((f.variance() - 1.0).abs() < 1e-14);
        assert!((f.influence_l2(0).unwrap() - 0.5).abs() < 1e-14);
        assert!((f.v_i(0, VIMethod::Fourier).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn v_i_of_characters() {
        let f = BooleanFn::character(3, 0b110).unwrap();
        assert!((f.v_i(0, VIMethod::Fourier).unwrap() - 0.5).abs() < 1e-14);
        assert!(f.v_i(2, VIMethod::Fourier).unwrap() < 1e-14);
    }

    #[test]
    fn v_i_quadrature_agrees_with_fourier() {
        let f = BooleanFn::random(3, 21, false);
        for i in 0..3 {
            let a = f.v_i(i, VIMethod::Fourier).unwrap();
            let b = f.v_i(i, VIMethod::Quadrature).unwrap();
            assert!((a - b).abs() < EPS_QUAD_CLASSICAL, "i={i}: {a} vs {b}");
        }
    }

    #[test]
    fn v_i_sums_to_variance() {
        let f = BooleanFn::random(4, 5, true);
        let total: f64 = (0..4).map(|i| f.v_i(i, VIMethod::Fourier).unwrap()).sum();
        assert!((total - f.variance()).abs() < 1e-12);
    }

    #[test]
    fn u_decay_closed_form_for_character() {
        // g = χ_{{1,2}}: u(t) = e^{−4t}, u'(t) = −4e^{−4t}.
        let g = BooleanFn::character(2, 0b11).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert!((g.u_decay(t) - (-4.0 * t).exp()).abs() < 1e-14);
            assert!((g.u_decay_derivative(t) + 4.0 * (-4.0 * t).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn u_derivative_matches_finite_difference() {
        let f = BooleanFn::random(4, 77, false);
        let h = 1e-6;
        for t in [0.1, 0.7, 2.0] {
            let fd = (f.u_decay(t + h) - f.u_decay(t - h)) / (2.0 * h);
            assert!((fd - f.u_decay_derivative(t)).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn entropy_zero_for_constants_and_signs() {
        let c = BooleanFn::from_table(2, vec![0.7; 4]).unwrap();
        assert!(c.entropy_of_square().abs() < 1e-14);
        // ±1-valued f has f² ≡ 1, hence zero entropy.
        let f = BooleanFn::random(3, 4, true);
        assert!(f.entropy_of_square().abs() < 1e-13);
    }

    #[test]
    fn log_sobolev_on_random_functions() {
        // Ent(f²) ≤ 2 Σ_i ‖D_i f‖₂².
        for seed in 0..20 {
            let f = BooleanFn::random(4, seed, false);
            let rhs: f64 = (0..4).map(|i| f.influence_l2(i).unwrap()).sum::<f64>() * 2.0;
            assert!(f.entropy_of_square() <= rhs + 1e-12, "seed={seed}");
        }
    }

    #[test]
    fn g_integral_linear_then_sublinear() {
        let (b, c) = (0.5, 3.0);
        assert!((g_integral(0.1, b, c).unwrap() - 0.2).abs() < 1e-12);
        assert!((g_integral(b * b, b, c).unwrap() - 2.0 * b * b).abs() < 1e-12);
        let g1 = g_integral(1.0, b, c).unwrap();
        assert!(g1 > 2.0 * b * b && g1 < 2.0);
        // Nondecreasing on a grid.
        let mut prev = 0.0;
        for k in 1..=20 {
            let v = g_integral(k as f64 * 0.1, b, c).unwrap();
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        assert_eq!(g_integral(1.0, 0.0, c).unwrap(), 0.0);
        assert!(g_integral(-1.0, b, c).is_err());
    }

    #[test]
    fn random_generation_is_deterministic() {
        let a = BooleanFn::random(4, 123, false);
        let b = BooleanFn::random(4, 123, false);
        assert_eq!(a.table(), b.table());
        let c = BooleanFn::random(4, 124, false);
        assert_ne!(a.table(), c.table());
        let pm = BooleanFn::random(4, 9, true);
        assert!(pm.table().iter().all(|v| v.abs() == 1.0));
    }
}
