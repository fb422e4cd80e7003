//! Closed-form constants and special functions appearing in the
//! inequalities: the incomplete Beta function, the Poincaré-type constants
//! `C1(p)` and `C2(p)`, semigroup comparison profiles `C_α`, `G_α`, `I_β`,
//! the gradient comparison constant `B(α,β)`, and the derived isoperimetric
//! and Talagrand constants.

use std::f64::consts::{E, PI};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;

/// Quadrature tolerance for the special-function integrals.
const BETA_TOL: f64 = 1e-10;

/// Guard band below the critical exponent 2 for formulas with `1/(2−p)`.
const EXPONENT_GUARD: f64 = 1e-6;

/// Incomplete Beta function `B(x; a, b) = ∫₀ˣ t^{a−1}(1−t)^{b−1} dt`
/// for `0 ≤ x ≤ 1`, `a, b > 0`.
///
/// The endpoint singularities are removed by the substitution `t = u²`
/// (near 0) together with the reflection
/// `B(x; a, b) = B(1; a, b) − B(1−x; b, a)` for `x > 1/2`.
pub fn incomplete_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!(
            "incomplete Beta requires 0 ≤ x ≤ 1, got x={x}"
        )));
    }
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "incomplete Beta requires positive parameters, got a={a}, b={b}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= 0.5 {
        Ok(beta_lower_half(x, a, b))
    } else {
        // B(1; a, b) split at 1/2 keeps both pieces on the regular half.
        let complete = beta_lower_half(0.5, a, b) + beta_lower_half(0.5, b, a);
        Ok(complete - beta_lower_half(1.0 - x, b, a))
    }
}

/// `∫₀ˣ t^{a−1}(1−t)^{b−1} dt` for `x ≤ 1/2`; substitution `t = u²` turns
/// the integrand into `2u^{2a−1}(1−u²)^{b−1}`, regular at 0 for `a ≥ 1/2`.
fn beta_lower_half(x: f64, a: f64, b: f64) -> f64 {
    adaptive_simpson(
        |u| 2.0 * u.powf(2.0 * a - 1.0) * (1.0 - u * u).powf(b - 1.0),
        0.0,
        x.sqrt(),
        BETA_TOL,
    )
}

/// `C1(p) = (3/4)^{p−1} / B(3/4; p/2, p/2)` for `1 ≤ p ≤ 2`.
///
/// Satisfies `C1(1) = 3/(2π)` and `C1(2) = 1`.
pub fn c1(p: f64) -> Result<f64> {
    check_p_range(p, "C1")?;
    Ok((0.75f64).powf(p - 1.0) / incomplete_beta(0.75, p / 2.0, p / 2.0)?)
}

/// `C2(p) = (3/4)^{p−1} (2/3)^{p/2} (p/2) · sup_{r≥0} (1−e^{−r})/r^{p/2}`
/// for `1 ≤ p ≤ 2`; `C2(2) = 1/2`.
pub fn c2(p: f64) -> Result<f64> {
    check_p_range(p, "C2")?;
    let half_p = p / 2.0;
    let sup = if half_p >= 1.0 {
        // (1−e^{−r})/r is decreasing; the sup is the r→0 limit, 1.
        1.0
    } else {
        let r = sup_ratio_argmax(half_p);
        (1.0 - (-r).exp()) / r.powf(half_p)
    };
    Ok((0.75f64).powf(p - 1.0) * (2.0 / 3.0f64).powf(half_p) * half_p * sup)
}

/// Solves the stationarity condition `e^r = 1 + r/s` of
/// `r ↦ (1−e^{−r})/r^s` for `s = p/2 ∈ (0, 1)` by Newton iteration.
fn sup_ratio_argmax(s: f64) -> f64 {
    // g(r) = e^r − 1 − r/s; g(0) = 0 with g'(0) = 1 − 1/s < 0, and the
    // positive root lies below 2(1−s)/s by convexity.
    let mut r = (1.0 - s) / s;
    for _ in 0..64 {
        let g = r.exp() - 1.0 - r / s;
        let dg = r.exp() - 1.0 / s;
        let step = g / dg;
        r -= step;
        if step.abs() < 1e-14 {
            break;
        }
    }
    r
}

/// Gradient comparison constant
/// `B(α, β) = min{(1+2α)/(1+2β), (1−α)/(1−β)}` for `0 ≤ β < α ≤ 1`
/// (second ratio read as its `β → 1` limit `+∞` when `β = 1`).
pub fn b_compare(alpha: f64, beta: f64) -> Result<f64> {
    for (name, v) in [("α", alpha), ("β", beta)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [0, 1], got {v}"
            )));
        }
    }
    let first = (1.0 + 2.0 * alpha) / (1.0 + 2.0 * beta);
    let second = if beta == 1.0 {
        f64::INFINITY
    } else {
        (1.0 - alpha) / (1.0 - beta)
    };
    Ok(first.min(second))
}

/// Intertwining decay profile `C_α(t) = (1+2α)/(e^{2t} + 2α e^t)`.
pub fn c_alpha(alpha: f64, t: f64) -> f64 {
    (1.0 + 2.0 * alpha) / ((2.0 * t).exp() + 2.0 * alpha * t.exp())
}

/// Exponential upper bound `e^{−(2+2α)/(1+2α)·t} ≥ C_α(t)`.
pub fn c_alpha_exponential_bound(alpha: f64, t: f64) -> f64 {
    (-(2.0 + 2.0 * alpha) / (1.0 + 2.0 * alpha) * t).exp()
}

/// Reverse gradient bound profile `G_α(t)`:
/// `(e^t−1)(e^t+1+4α) / (2(1−α)(1+2α))` for `α ≤ 1/2` and
/// `(e^t−1)(e^t+3) / (1+2α)` for `α ≥ 1/2` (both branches agree at `α = 1/2`).
pub fn g_alpha(alpha: f64, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "G_α requires 0 ≤ α ≤ 1, got α={alpha}"
        )));
    }
    let et = t.exp();
    Ok(if alpha <= 0.5 {
        (et - 1.0) * (et + 1.0 + 4.0 * alpha) / (2.0 * (1.0 - alpha) * (1.0 + 2.0 * alpha))
    } else {
        (et - 1.0) * (et + 3.0) / (1.0 + 2.0 * alpha)
    })
}

/// Auxiliary profile `I_β(t) = (e^t + 1 + 4β)(e^t − 1) / (1 + 2β)`.
pub fn i_beta(beta: f64, t: f64) -> f64 {
    let et = t.exp();
    (et + 1.0 + 4.0 * beta) * (et - 1.0) / (1.0 + 2.0 * beta)
}

/// `∫₀^∞ G₁(s)^{−1/2} ds = 2π/3` where `G₁(s) = (e^s−1)(e^s+3)/3`.
///
/// The `s = w²` substitution removes the inverse square-root singularity
/// at the origin; the tail beyond `T` decays like `√3·e^{−T}`.
pub fn g1_inverse_sqrt_integral() -> f64 {
    let horizon = 21.0f64; // √3·e^{−21} < 1e−9
    let integrand = |w: f64| {
        if w == 0.0 {
            // limit of 2w/√G₁(w²) = 2w·√3/√(w²·4) → √3 as w → 0.
            3.0f64.sqrt()
        } else {
            let s = w * w;
            2.0 * w * (3.0 / (s.exp_m1() * (s.exp() + 3.0))).sqrt()
        }
    };
    adaptive_simpson(integrand, 0.0, horizon.sqrt(), 1e-9)
}

/// Left side of the heat-kernel Beta identity:
/// `∫₀ᵗ 2 e^{−2(p−1)s} G₁(2s)^{−(1−p/2)} ds`, which equals
/// `(4/3)^{p−1} B(3/4·(1−e^{−2t}); p/2, p/2)`.
pub fn beta_identity_lhs(p: f64, t: f64) -> Result<f64> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "Beta identity requires 1 ≤ p ≤ 2, got p={p}"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "Beta identity requires t ≥ 0, got t={t}"
        )));
    }
    let exponent = 1.0 - p / 2.0;
    // Near s = 0, G₁(2s) ~ 8s/3, so the integrand behaves like s^{p/2−1};
    // the w = √s substitution regularizes it for every p ≥ 1.
    let integrand = |w: f64| {
        if w == 0.0 {
            return if p == 1.0 {
                2.0 * (3.0f64 / 8.0).sqrt() * 2.0
            } else {
                0.0
            };
        }
        let s = w * w;
        let g = (2.0 * s).exp_m1() * ((2.0 * s).exp() + 3.0) / 3.0;
        2.0 * w * 2.0 * (-2.0 * (p - 1.0) * s).exp() * g.powf(-exponent)
    };
    Ok(adaptive_simpson(integrand, 0.0, t.sqrt(), 1e-9))
}

/// Lᵖ Poincaré constant `(3/(2π)) ((1+2α)/3)^{1/2}`.
pub fn lp_poincare(alpha: f64) -> f64 {
    3.0 / (2.0 * PI) * ((1.0 + 2.0 * alpha) / 3.0).sqrt()
}

/// Degree-`k` Talagrand constant
/// `C_k(p, q) = (2^{1+k(2−p)} + (1/(2e))·q/(2−q))^{−1}`.
pub fn cor16_ck(k: usize, p: f64, q: f64) -> Result<f64> {
    check_p_range(p, "C_k")?;
    check_q_range(q)?;
    let denom = 2.0f64.powf(1.0 + k as f64 * (2.0 - p)) + q / (2.0 - q) / (2.0 * E);
    Ok(1.0 / denom)
}

/// Negative exponent offset `B(p) = (2p/(2−p)) ln(3/(2π))` in the
/// isoperimetric chain (strictly negative).
pub fn isoper_b(p: f64) -> Result<f64> {
    check_p_strict(p)?;
    Ok(2.0 * p / (2.0 - p) * (3.0 / (2.0 * PI)).ln())
}

/// `K(p) = C2(p)^{−2/p} + p/(e(2−p)) + (1 − B(p))/C1(p)^{2/p}`.
pub fn isoper_k(p: f64) -> Result<f64> {
    check_p_strict(p)?;
    Ok(c2(p)?.powf(-2.0 / p)
        + p / (E * (2.0 - p))
        + (1.0 - isoper_b(p)?) / c1(p)?.powf(2.0 / p))
}

/// Isoperimetric constant `C1(p) = K(p)^{−p/2}` (tends to 0 as `p → 2`).
pub fn isoper_c1(p: f64) -> Result<f64> {
    Ok(isoper_k(p)?.powf(-p / 2.0))
}

/// Isoperimetric constant for unitary Hermitian operators,
/// `C2(p) = 2^{−p/2} min{C1(p), C2(p)}` over the Poincaré constants.
pub fn isoper_c2(p: f64) -> Result<f64> {
    check_p_range(p, "isoperimetric C2")?;
    Ok(2.0f64.powf(-p / 2.0) * c1(p)?.min(c2(p)?))
}

/// Eldan–Gross-type constant `2^{−p/2} min{C2(p), C1_iso(p)}`.
pub fn eldan_gross(p: f64) -> Result<f64> {
    check_p_strict(p)?;
    Ok(2.0f64.powf(-p / 2.0) * c2(p)?.min(isoper_c1(p)?))
}

/// The Talagrand constant `c(α, p, q)`:
/// `[ (3/(1+2α)) C2^{−2/p} + (p/(2e))(q/(2−q))
///    + (3/(1+2α)) C1^{−2/p} (1 − (q/(2−q)) ln(3(1+2α)/(2π)²)) ]^{−p/2}`.
pub fn cee(alpha: f64, p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "c(α,p,q) requires 0 ≤ α ≤ 1, got α={alpha}"
        )));
    }
    check_p_range(p, "c(α,p,q)")?;
    check_q_range(q)?;
    let ratio = q / (2.0 - q);
    let pref = 3.0 / (1.0 + 2.0 * alpha);
    let inner = pref * c2(p)?.powf(-2.0 / p)
        + p / (2.0 * E) * ratio
        + pref
            * c1(p)?.powf(-2.0 / p)
            * (1.0 - ratio * (3.0 * (1.0 + 2.0 * alpha) / (2.0 * PI).powi(2)).ln());
    Ok(inner.powf(-p / 2.0))
}

/// Partial isoperimetric constant
/// `C_k(p) = (2^{1+(2−p)k} + 1/(e·k·(2−p)))^{−1}`.
pub fn partial_isoper_ck(k: usize, p: f64) -> Result<f64> {
    check_p_strict(p)?;
    if k == 0 {
        return Err(Error::InvalidParameter("degree k must be ≥ 1".into()));
    }
    Ok(1.0 / (2.0f64.powf(1.0 + (2.0 - p) * k as f64) + 1.0 / (E * k as f64 * (2.0 - p))))
}

/// Hypercontractive decay rate on the classical cube:
/// `c_q = 2(1 − 1/q)` for `1 ≤ q ≤ 2` and `2/q` for `q ≥ 2`.
pub fn classical_cq(q: f64) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "decay rate requires q ≥ 1, got {q}"
        )));
    }
    Ok(if q <= 2.0 { 2.0 * (1.0 - 1.0 / q) } else { 2.0 / q })
}

/// Crude comparison constant `C = 4 + 2(1+e²)(1 + c/2)` for `c ≥ 1`.
pub fn classical_crude(c: f64) -> Result<f64> {
    if !(c >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "crude constant requires c ≥ 1, got {c}"
        )));
    }
    Ok(4.0 + 2.0 * (1.0 + E * E) * (1.0 + c / 2.0))
}

fn check_p_range(p: f64, name: &str) -> Result<()> {
    if !(1.0..=2.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "{name} requires 1 ≤ p ≤ 2, got p={p}"
        )));
    }
    Ok(())
}

/// As [`check_p_range`] but additionally excludes a guard band at `p = 2`
/// where the formula divides by `2 − p`.
fn check_p_strict(p: f64) -> Result<()> {
    if !(1.0..2.0 - EXPONENT_GUARD).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "exponent must satisfy 1 ≤ p < 2 − {EXPONENT_GUARD}, got p={p}"
        )));
    }
    Ok(())
}

fn check_q_range(q: f64) -> Result<()> {
    if !(1.0..2.0 - EXPONENT_GUARD).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "exponent must satisfy 1 ≤ q < 2 − {EXPONENT_GUARD}, got q={q}"
        )));
    }
    Ok(())
}

/// Named constants addressable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantName {
    C1,
    C2,
    LpPoincare,
    IsoperC1,
    IsoperC2,
    EldanGross,
    G1Integral,
}

impl FromStr for ConstantName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(Self::C1),
            "c2" => Ok(Self::C2),
            "lp-poincare" | "lp_poincare" => Ok(Self::LpPoincare),
            "isoper-c1" | "isoper_c1" => Ok(Self::IsoperC1),
            "isoper-c2" | "isoper_c2" => Ok(Self::IsoperC2),
            "eldan-gross" | "eldan_gross" => Ok(Self::EldanGross),
            "g1-integral" | "g1_integral" => Ok(Self::G1Integral),
            other => Err(Error::UnknownConstant(other.to_string())),
        }
    }
}

impl ConstantName {
    pub const ALL: [ConstantName; 7] = [
        Self::C1,
        Self::C2,
        Self::LpPoincare,
        Self::IsoperC1,
        Self::IsoperC2,
        Self::EldanGross,
        Self::G1Integral,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Self::C1 => "C1(p)",
            Self::C2 => "C2(p)",
            Self::LpPoincare => "lp-poincare(alpha)",
            Self::IsoperC1 => "isoper-c1(p)",
            Self::IsoperC2 => "isoper-c2(p)",
            Self::EldanGross => "eldan-gross(p)",
            Self::G1Integral => "g1-integral",
        }
    }

    /// Evaluates the constant; `arg` is `p` (or `α` for the Poincaré
    /// constant) and ignored for the parameterless integral.
    pub fn evaluate(&self, arg: f64) -> Result<f64> {
        match self {
            Self::C1 => c1(arg),
            Self::C2 => c2(arg),
            Self::LpPoincare => {
                if !(0.0..=1.0).contains(&arg) {
                    return Err(Error::InvalidParameter(format!(
                        "lp-poincare takes 0 ≤ α ≤ 1, got {arg}"
                    )));
                }
                Ok(lp_poincare(arg))
            }
            Self::IsoperC1 => isoper_c1(arg),
            Self::IsoperC2 => isoper_c2(arg),
            Self::EldanGross => eldan_gross(arg),
            Self::G1Integral => Ok(g1_inverse_sqrt_integral()),
        }
    }
}
