//! Differential calculus of the depolarizing semigroup: conditional
//! expectations, discrete derivatives, semigroup action, conditional
//! variances and carré du champ, α-interpolated gradients, influences,
//! the local variance functional `V_J`, Riesz transforms, Fourier weights,
//! and the logarithmic ratio `R(A, q)`.

use num_complex::Complex64;

use crate::algebra::{index_level_mask, CMat, Observable};
use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Default quadrature tolerance for `V_J` cross-checks.
pub const EPS_QUAD: f64 = 1e-6;

/// A subset `J ⊆ [n]` of qubit sites (0-based internally).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SubsetMask {
    n: usize,
    bits: u32,
}

impl SubsetMask {
    /// Builds a subset of `[n]` from 0-based site indices.
    pub fn new(n: usize, sites: &[usize]) -> Result<Self> {
        let mut bits = 0u32;
        for &j in sites {
            if j >= n {
                return Err(Error::InvalidParameter(format!(
                    "site {j} out of range for n={n}"
                )));
            }
            bits |= 1 << j;
        }
        Ok(Self { n, bits })
    }

    /// The singleton `{j}` (0-based).
    pub fn singleton(n: usize, j: usize) -> Result<Self> {
        Self::new(n, &[j])
    }

    /// The full set `[n]`.
    pub fn full(n: usize) -> Self {
        Self {
            n,
            bits: if n == 32 { u32::MAX } else { (1 << n) - 1 },
        }
    }

    /// All subsets of `[n]` of size `k`, in increasing bitmask order.
    pub fn subsets_of_size(n: usize, k: usize) -> Vec<Self> {
        (0u32..1 << n)
            .filter(|b| b.count_ones() as usize == k)
            .map(|bits| Self { n, bits })
            .collect()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cardinality `k = |J|`.
    pub fn k(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    /// Raw bitmask (bit `j` = site `j`).
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Member sites, 0-based ascending.
    pub fn members(&self) -> Vec<usize> {
        (0..self.n).filter(|j| self.bits >> j & 1 == 1).collect()
    }
}

impl std::fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sites: Vec<String> = self.members().iter().map(|j| (j + 1).to_string()).collect();
        write!(f, "{{{}}}", sites.join(","))
    }
}

/// Applies a Fourier multiplier `Â_s ↦ m(level, support)·Â_s`.
fn multiplier(a: &Observable, m: impl Fn(usize, u32) -> f64) -> Observable {
    let n = a.n();
    let coeffs: Vec<Complex64> = a
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, &c)| {
            let (level, mask) = index_level_mask(n, idx);
            c * m(level, mask)
        })
        .collect();
    Observable::from_coeffs(n, coeffs).expect("same shape")
}

/// Conditional expectation `τ_J A` (traces out the sites of `J`).
pub fn cond_expectation(a: &Observable, j: &SubsetMask) -> Result<Observable> {
    check_sites(a, j)?;
    Ok(multiplier(a, |_, mask| {
        if mask & j.bits() == 0 {
            1.0
        } else {
            0.0
        }
    }))
}

/// High-order derivative `d_J A = Π_{j∈J}(id − τ_j) A` (keeps coefficients
/// whose support contains `J`).
pub fn derivative(a: &Observable, j: &SubsetMask) -> Result<Observable> {
    check_sites(a, j)?;
    Ok(multiplier(a, |_, mask| {
        if mask & j.bits() == j.bits() {
            1.0
        } else {
            0.0
        }
    }))
}

/// Depolarizing semigroup `P_t A` (multiplier `e^{−t·level}`).
pub fn semigroup_apply(a: &Observable, t: f64) -> Result<Observable> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "semigroup time must be nonnegative, got {t}"
        )));
    }
    Ok(multiplier(a, |level, _| (-t * level as f64).exp()))
}

fn check_sites(a: &Observable, j: &SubsetMask) -> Result<()> {
    if j.n() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "subset of [{}] applied to operator on {} qubits",
            j.n(),
            a.n()
        )));
    }
    Ok(())
}

/// Dense partial trace over the single site `j` (0-based), followed by
/// re-embedding `τ_j(M) ⊗ I/…` back into the full algebra. The trace is
/// normalized, so the identity on the traced factor is preserved.
pub(crate) fn partial_trace_site(m: &CMat, n: usize, j: usize) -> CMat {
    let dim = 1usize << n;
    let bit = 1usize << (n - 1 - j);
    let mut out = CMat::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & bit != c & bit {
                continue;
            }
            // Average the two diagonal blocks of the j-th factor.
            let avg = (m[(r & !bit, c & !bit)] + m[(r | bit, c | bit)]) * 0.5;
            out[(r, c)] = avg;
        }
    }
    out
}

/// Scalar variance, operator-valued conditional variance, and carré du champ.
pub struct VarianceStats {
    /// `Var(A) = Σ_{s≠0} |Â_s|²`.
    pub variance: f64,
    /// `Var_j(A) = τ_j(|d_j A|²)` (PSD operator).
    pub var_j: Observable,
    /// `Γ_j(A) = ½(Var_j(A) + |d_j A|²)`.
    pub gamma_j: Observable,
}

/// Scalar variance `Var(A) = Σ_{s≠0}|Â_s|²`.
pub fn variance(a: &Observable) -> f64 {
    a.coeffs()[1..].iter().map(|c| c.norm_sqr()).sum()
}

/// Computes `(Var(A), Var_j(A), Γ_j(A))` for the site `j` (0-based).
///
/// `Var_j` is evaluated with the dense partial-trace kernel applied to
/// `|d_j A|²`, independent of the Fourier-multiplier route.
pub fn variance_stats(a: &Observable, j: usize) -> Result<VarianceStats> {
    let mask = SubsetMask::singleton(a.n(), j)?;
    let dj = derivative(a, &mask)?;
    let abs_sq = dj.adjoint().mul(&dj)?;
    let var_j = Observable::from_matrix(partial_trace_site(abs_sq.matrix(), a.n(), j))?;
    let gamma_j = var_j.add(&abs_sq)?.scale(Complex64::new(0.5, 0.0));
    Ok(VarianceStats {
        variance: variance(a),
        var_j,
        gamma_j,
    })
}

/// The α-interpolated gradient data of an observable.
pub struct GradientBundle {
    pub alpha: f64,
    /// `|∇ⱼ^α A|² = (1−α)Var_j(A) + α|d_j A|²` per site (PSD Hermitian).
    pub per_site: Vec<Observable>,
    /// `|∇^α A|² = Σ_j |∇ⱼ^α A|²`.
    pub total_sq: Observable,
    /// `|∇^α A| = (|∇^α A|²)^{1/2}`.
    pub total_abs: Observable,
}

/// Builds the α-gradient bundle; requires `0 ≤ α ≤ 1`.
pub fn alpha_gradient(a: &Observable, alpha: f64) -> Result<GradientBundle> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "gradient parameter must satisfy 0 ≤ α ≤ 1, got {alpha}"
        )));
    }
    let n = a.n();
    let mut per_site = Vec::with_capacity(n);
    let mut total_sq = Observable::zero(n)?;
    for j in 0..n {
        let stats = variance_stats(a, j)?;
        let mask = SubsetMask::singleton(n, j)?;
        let dj = derivative(a, &mask)?;
        let abs_sq = dj.adjoint().mul(&dj)?;
        let site = stats
            .var_j
            .scale(Complex64::new(1.0 - alpha, 0.0))
            .add(&abs_sq.scale(Complex64::new(alpha, 0.0)))?;
        total_sq = total_sq.add(&site)?;
        per_site.push(site);
    }
    let total_abs = total_sq.abs_power(0.5)?;
    Ok(GradientBundle {
        alpha,
        per_site,
        total_sq,
        total_abs,
    })
}

/// `Inf_J^p[A] = ‖d_J A‖_p^p`; for `p = 2` evaluated exactly via Parseval.
pub fn influence(a: &Observable, j: &SubsetMask, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "influence exponent must satisfy p ≥ 1, got {p}"
        )));
    }
    if p == 2.0 {
        return Ok(influence_l2(a, j));
    }
    let dj = derivative(a, j)?;
    Ok(dj.schatten_norm(p)?.powf(p))
}

/// `Inf_J²[A] = Σ_{s: J ⊆ supp(s)} |Â_s|²` (exact Fourier sum).
pub fn influence_l2(a: &Observable, j: &SubsetMask) -> f64 {
    let n = a.n();
    a.coeffs()
        .iter()
        .enumerate()
        .filter(|(idx, _)| {
            let (_, mask) = index_level_mask(n, *idx);
            mask & j.bits() == j.bits()
        })
        .map(|(_, c)| c.norm_sqr())
        .sum()
}

/// Evaluation strategy for the local variance functional.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VMethod {
    /// Exact Fourier sum `Σ_{J⊆supp(s)} |Â_s|²/|supp(s)|`.
    Fourier,
    /// Quadrature of `∫₀^∞ 2‖d_J P_t A‖₂² dt` with analytic tail bound.
    Quadrature,
}

/// Local variance functional `V_J(A)`; `J` must be nonempty.
pub fn v_functional(a: &Observable, j: &SubsetMask, method: VMethod) -> Result<f64> {
    check_sites(a, j)?;
    if j.is_empty() {
        return Err(Error::InvalidParameter(
            "V_J requires a nonempty subset J".into(),
        ));
    }
    match method {
        VMethod::Fourier => {
            let n = a.n();
            Ok(a.coeffs()
                .iter()
                .enumerate()
                .filter_map(|(idx, c)| {
                    let (level, mask) = index_level_mask(n, idx);
                    (mask & j.bits() == j.bits()).then(|| c.norm_sqr() / level as f64)
                })
                .sum())
        }
        VMethod::Quadrature => {
            let k = j.k() as f64;
            let inf2 = influence_l2(a, j);
            if inf2 == 0.0 {
                return Ok(0.0);
            }
            // Tail: ∫_T^∞ 2‖d_J P_t A‖₂² dt ≤ e^{−2kT}·Inf_J²[A]/k ≤ ε/2.
            let horizon = ((2.0 * inf2 / (k * EPS_QUAD)).ln() / (2.0 * k)).max(1.0);
            // Integrand evaluated through the dense matrix so the route is
            // independent of the Fourier closed form being cross-checked.
            let dj = derivative(a, j)?;
            let integrand = |t: f64| {
                let evolved = semigroup_apply(&dj, t).expect("t ≥ 0");
                let m = evolved.matrix();
                2.0 * m.iter().map(|c| c.norm_sqr()).sum::<f64>() / a.dim() as f64
            };
            Ok(adaptive_simpson(integrand, 0.0, horizon, EPS_QUAD * 0.25))
        }
    }
}

/// `J`-Riesz transform `R_J(A) = d_J L^{−1/2}(A − τ(A))`, i.e. the multiplier
/// `|supp(s)|^{−1/2}·1{J ⊆ supp(s)}` on the nonconstant part.
pub fn riesz_transform(a: &Observable, j: &SubsetMask) -> Result<Observable> {
    check_sites(a, j)?;
    if j.is_empty() {
        return Err(Error::InvalidParameter(
            "the Riesz transform requires a nonempty subset J".into(),
        ));
    }
    Ok(multiplier(a, |level, mask| {
        if level == 0 || mask & j.bits() != j.bits() {
            0.0
        } else {
            1.0 / (level as f64).sqrt()
        }
    }))
}

/// Fourier weights `W^{=d}[A]` for `d = 0..=n`.
pub fn fourier_weights(a: &Observable) -> Vec<f64> {
    let n = a.n();
    let mut weights = vec![0.0; n + 1];
    for (idx, c) in a.coeffs().iter().enumerate() {
        let (level, _) = index_level_mask(n, idx);
        weights[level] += c.norm_sqr();
    }
    weights
}

/// Tail weight `W^{≥k}[A]`.
pub fn weight_tail(weights: &[f64], k: usize) -> f64 {
    weights.iter().skip(k).sum()
}

/// The logarithmic ratio
/// `R(A,q) = (q/(2−q))·max{ln(Var/‖A−τ(A)‖_q²), ln(Var/Σ_j‖d_jA‖_q²)}`,
/// reported unclamped (it may be negative).
pub fn log_ratio(a: &Observable, q: f64) -> Result<f64> {
    if !(1.0..2.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "log ratio requires 1 ≤ q < 2, got {q}"
        )));
    }
    let var = variance(a);
    if var <= 0.0 {
        return Err(Error::InvalidParameter(
            "log ratio requires Var(A) > 0".into(),
        ));
    }
    let centered_q = a.centered().schatten_norm(q)?;
    let mut grad_q_sq = 0.0;
    for j in 0..a.n() {
        let mask = SubsetMask::singleton(a.n(), j)?;
        let dq = derivative(a, &mask)?.schatten_norm(q)?;
        grad_q_sq += dq * dq;
    }
    // Var > 0 forces both denominators positive, but guard anyway.
    let r1 = if centered_q > 0.0 {
        (var / (centered_q * centered_q)).ln()
    } else {
        f64::INFINITY
    };
    let r2 = if grad_q_sq > 0.0 {
        (var / grad_q_sq).ln()
    } else {
        f64::INFINITY
    };
    Ok(q / (2.0 - q) * r1.max(r2))
}

/// The clamped ratio `max(R(A,q), 0)` used by the inequality checkers.
pub fn log_ratio_clamped(a: &Observable, q: f64) -> Result<f64> {
    Ok(log_ratio(a, q)?.max(0.0))
}

/// `ln⁺(x) = max(ln x, 0)`; zero and negative arguments map to 0.
pub fn ln_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{bell_projector, pauli_matrix, PauliString};

    fn op_dist(a: &Observable, b: &Observable) -> f64 {
        (a.matrix() - b.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn cond_expectation_bell_is_quarter_identity() {
        let p = bell_projector();
        let t1 = cond_expectation(&p, &SubsetMask::singleton(2, 0).unwrap()).unwrap();
        let expect = Observable::identity(2).unwrap().scale(Complex64::new(0.25, 0.0));
        assert!(op_dist(&t1, &expect) < 1e-13);
    }

    #[test]
    fn full_conditional_expectation_is_scalar() {
        let p = bell_projector();
        let t = cond_expectation(&p, &SubsetMask::full(2)).unwrap();
        let expect = Observable::identity(2).unwrap().scale(p.trace());
        assert!(op_dist(&t, &expect) < 1e-13);
    }

    #[test]
    fn derivative_on_basis_elements() {
        let s1 = pauli_matrix(&PauliString::new(vec![1]).unwrap());
        let j = SubsetMask::singleton(1, 0).unwrap();
        assert!(op_dist(&derivative(&s1, &j).unwrap(), &s1) < 1e-14);
        let id = Observable::identity(1).unwrap();
        assert!(derivative(&id, &j).unwrap().l2_norm() < 1e-14);
    }

    #[test]
    fn derivative_of_bell_is_centered() {
        let p = bell_projector();
        let j = SubsetMask::singleton(2, 0).unwrap();
        let d = derivative(&p, &j).unwrap();
        let expect = p
            .sub(&Observable::identity(2).unwrap().scale(Complex64::new(0.25, 0.0)))
            .unwrap();
        assert!(op_dist(&d, &expect) < 1e-13);
    }

    #[test]
    fn semigroup_scales_level_two_character() {
        let s = pauli_matrix(&PauliString::new(vec![1, 1]).unwrap());
        let t = 0.37;
        let evolved = semigroup_apply(&s, t).unwrap();
        let expect = s.scale(Complex64::new((-2.0 * t).exp(), 0.0));
        assert!(op_dist(&evolved, &expect) < 1e-14);
    }

    #[test]
    fn semigroup_long_time_limit() {
        let p = bell_projector();
        let far = semigroup_apply(&p, 50.0).unwrap();
        let expect = Observable::identity(2).unwrap().scale(p.trace());
        assert!(op_dist(&far, &expect) < 1e-10);
    }

    #[test]
    fn semigroup_rejects_negative_time() {
        let p = bell_projector();
        assert!(semigroup_apply(&p, -0.1).is_err());
    }

    #[test]
    fn partial_trace_matches_fourier_route() {
        // Dense kernel vs coefficient zeroing on a non-Hermitian operator.
        let n = 2;
        let m = CMat::from_fn(4, 4, |r, c| {
            Complex64::new((r + 2 * c) as f64 * 0.3 - 1.0, (r * c) as f64 * 0.2)
        });
        let a = Observable::from_matrix(m.clone()).unwrap();
        for j in 0..n {
            let dense = partial_trace_site(&m, n, j);
            let fourier = cond_expectation(&a, &SubsetMask::singleton(n, j).unwrap()).unwrap();
            let diff = (&dense - fourier.matrix()).iter().map(|c| c.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-12, "site {j}: {diff}");
        }
    }

    #[test]
    fn bell_variance_stats() {
        let p = bell_projector();
        let stats = variance_stats(&p, 0).unwrap();
        assert!((stats.variance - 3.0 / 16.0).abs() < 1e-13);
        let expect = Observable::identity(2).unwrap().scale(Complex64::new(3.0 / 16.0, 0.0));
        assert!(op_dist(&stats.var_j, &expect) < 1e-13);
        // τ(Var_j(A)) = ‖d_j A‖₂².
        let inf = influence_l2(&p, &SubsetMask::singleton(2, 0).unwrap());
        assert!((stats.var_j.trace().re - inf).abs() < 1e-13);
    }

    #[test]
    fn character_variance_is_one() {
        let s = pauli_matrix(&PauliString::new(vec![0, 2]).unwrap());
        assert!((variance(&s) - 1.0).abs() < 1e-14);
        assert!(variance(&Observable::identity(2).unwrap()) < 1e-14);
    }

    #[test]
    fn gradient_midpoint_is_carre_du_champ() {
        let p = bell_projector();
        let bundle = alpha_gradient(&p, 0.5).unwrap();
        for j in 0..2 {
            let stats = variance_stats(&p, j).unwrap();
            assert!(op_dist(&bundle.per_site[j], &stats.gamma_j) < 1e-13);
        }
    }

    #[test]
    fn gradient_l2_mass_is_alpha_independent() {
        let p = bell_projector();
        let inf_total: f64 =
            (0..2).map(|j| influence_l2(&p, &SubsetMask::singleton(2, j).unwrap())).sum();
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            let bundle = alpha_gradient(&p, alpha).unwrap();
            let mass = bundle.total_abs.l2_norm().powi(2);
            assert!((mass - inf_total).abs() < 1e-10, "alpha={alpha}");
        }
    }

    #[test]
    fn constant_operator_has_zero_gradient() {
        let id = Observable::identity(2).unwrap().scale(Complex64::new(2.5, 0.0));
        let bundle = alpha_gradient(&id, 0.7).unwrap();
        assert!(bundle.total_sq.l2_norm() < 1e-13);
    }

    #[test]
    fn geometric_influence_of_bell() {
        // |d₁P|: eigenvalues (3/4, 1/4, 1/4, 1/4) ⇒ Inf₁¹ = 3/8.
        let p = bell_projector();
        let j = SubsetMask::singleton(2, 0).unwrap();
        let inf1 = influence(&p, &j, 1.0).unwrap();
        assert!((inf1 - 3.0 / 8.0).abs() < 1e-12);
        let inf2 = influence(&p, &j, 2.0).unwrap();
        assert!((inf2 - 3.0 / 16.0).abs() < 1e-13);
    }

    #[test]
    fn influence_of_characters() {
        let s = pauli_matrix(&PauliString::new(vec![3, 0]).unwrap());
        assert!((influence_l2(&s, &SubsetMask::singleton(2, 0).unwrap()) - 1.0).abs() < 1e-14);
        assert!(influence_l2(&s, &SubsetMask::singleton(2, 1).unwrap()) < 1e-14);
    }

    #[test]
    fn v_functional_on_level_two_character() {
        let s = pauli_matrix(&PauliString::new(vec![1, 2]).unwrap());
        let j = SubsetMask::singleton(2, 0).unwrap();
        let fourier = v_functional(&s, &j, VMethod::Fourier).unwrap();
        assert!((fourier - 0.5).abs() < 1e-14);
        let quad = v_functional(&s, &j, VMethod::Quadrature).unwrap();
        assert!((fourier - quad).abs() < EPS_QUAD);
    }

    #[test]
    fn v_functional_rejects_empty_subset() {
        let s = bell_projector();
        let empty = SubsetMask::new(2, &[]).unwrap();
        assert!(v_functional(&s, &empty, VMethod::Fourier).is_err());
    }

    #[test]
    fn v_functionals_sum_to_variance() {
        let p = bell_projector();
        let total: f64 = (0..2)
            .map(|j| {
                v_functional(&p, &SubsetMask::singleton(2, j).unwrap(), VMethod::Fourier).unwrap()
            })
            .sum();
        assert!((total - variance(&p)).abs() < 1e-13);
    }

    #[test]
    fn riesz_transform_on_character() {
        let s = pauli_matrix(&PauliString::new(vec![1, 1]).unwrap());
        let j = SubsetMask::singleton(2, 0).unwrap();
        let r = riesz_transform(&s, &j).unwrap();
        let expect = s.scale(Complex64::new(1.0 / 2.0f64.sqrt(), 0.0));
        assert!(op_dist(&r, &expect) < 1e-14);
        let v = v_functional(&s, &j, VMethod::Fourier).unwrap();
        assert!((r.l2_norm().powi(2) - v).abs() < 1e-12);
    }

    #[test]
    fn fourier_weights_of_bell() {
        let p = bell_projector();
        let w = fourier_weights(&p);
        assert!((w[0] - 1.0 / 16.0).abs() < 1e-13);
        assert!(w[1].abs() < 1e-13);
        assert!((w[2] - 3.0 / 16.0).abs() < 1e-13);
        assert!((weight_tail(&w, 1) - variance(&p)).abs() < 1e-13);
    }

    #[test]
    fn log_ratio_of_character_is_zero() {
        let s = pauli_matrix(&PauliString::new(vec![2]).unwrap());
        for q in [1.0, 1.5, 1.9] {
            assert!(log_ratio(&s, q).unwrap().abs() < 1e-10, "q={q}");
        }
    }

    #[test]
    fn log_ratio_scale_invariance() {
        let p = bell_projector();
        let r1 = log_ratio(&p, 1.5).unwrap();
        let r2 = log_ratio(&p.scale(Complex64::new(-3.0, 0.0)), 1.5).unwrap();
        assert!((r1 - r2).abs() < 1e-9);
    }

    #[test]
    fn log_ratio_rejects_degenerate_input() {
        let id = Observable::identity(1).unwrap();
        assert!(log_ratio(&id, 1.5).is_err());
        let s = pauli_matrix(&PauliString::new(vec![1]).unwrap());
        assert!(log_ratio(&s, 2.0).is_err());
    }
}
