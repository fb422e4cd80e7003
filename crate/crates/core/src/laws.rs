//! Executable catalog of the functional inequalities: one checker per
//! result, each producing [`CheckRecord`]s with explicit left side, right
//! side, and margin. Quantum laws are `Q1`–`Q20`; classical cube laws are
//! `A1`–`A6` (with the combined differential inequality as `A3'`).

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::algebra::Observable;
use crate::calculus::{
    self, alpha_gradient, cond_expectation, derivative, influence, influence_l2, ln_plus,
    log_ratio, semigroup_apply, v_functional, variance, variance_stats, SubsetMask, VMethod,
};
use crate::classical::{g_integral, BooleanFn, VIMethod};
use crate::constants;
use crate::error::{Error, Result};
use crate::report::{CheckRecord, Tolerances};

/// Identifier of a checkable inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Law {
    Q1,
    Q2,
    Q3,
    Q4,
    Q5,
    Q6,
    Q7,
    Q8,
    Q9,
    Q10,
    Q11,
    Q12,
    Q13,
    Q14,
    Q15,
    Q16,
    Q17,
    Q18,
    Q19,
    Q20,
    A1,
    A2,
    A3,
    A3Prime,
    A4,
    A5,
    A6,
}

impl Law {
    pub const QUANTUM: [Law; 20] = [
        Law::Q1,
        Law::Q2,
        Law::Q3,
        Law::Q4,
        Law::Q5,
        Law::Q6,
        Law::Q7,
        Law::Q8,
        Law::Q9,
        Law::Q10,
        Law::Q11,
        Law::Q12,
        Law::Q13,
        Law::Q14,
        Law::Q15,
        Law::Q16,
        Law::Q17,
        Law::Q18,
        Law::Q19,
        Law::Q20,
    ];

    pub const CLASSICAL: [Law; 7] =
        [Law::A1, Law::A2, Law::A3, Law::A3Prime, Law::A4, Law::A5, Law::A6];

    pub fn id(&self) -> &'static str {
        match self {
            Law::Q1 => "Q1",
            Law::Q2 => "Q2",
            Law::Q3 => "Q3",
            Law::Q4 => "Q4",
            Law::Q5 => "Q5",
            Law::Q6 => "Q6",
            Law::Q7 => "Q7",
            Law::Q8 => "Q8",
            Law::Q9 => "Q9",
            Law::Q10 => "Q10",
            Law::Q11 => "Q11",
            Law::Q12 => "Q12",
            Law::Q13 => "Q13",
            Law::Q14 => "Q14",
            Law::Q15 => "Q15",
            Law::Q16 => "Q16",
            Law::Q17 => "Q17",
            Law::Q18 => "Q18",
            Law::Q19 => "Q19",
            Law::Q20 => "Q20",
            Law::A1 => "A1",
            Law::A2 => "A2",
            Law::A3 => "A3",
            Law::A3Prime => "A3'",
            Law::A4 => "A4",
            Law::A5 => "A5",
            Law::A6 => "A6",
        }
    }

    /// Human-readable one-line description of the inequality.
    pub fn description(&self) -> &'static str {
        match self {
            Law::Q1 => "Poincare: Var(P_t A) <= e^{-2t} Var(A)",
            Law::Q2 => "hypercontractivity: ||P_t A||_2 <= ||A||_{1+e^{-2t}}",
            Law::Q3 => "derivative decay: ||d_J P_t A||_p <= e^{-kt} ||d_J A||_p",
            Law::Q4 => "Khintchine: |d_j A|^2 <= 3 Var_j(A)",
            Law::Q5 => "gradient comparison: |grad_j^a A|^2 >= B(a,b) |grad_j^b A|^2",
            Law::Q6 => "gradient estimate: |grad_j^a P_t A|^2 <= C_a(t) P_t |grad_j^a A|^2",
            Law::Q7 => "Lipschitz smoothing: |||grad^a P_t A|||_q <= G_a(t)^{-1/2} ||A||_q",
            Law::Q8 => "Lp Poincare: |||grad^a A|||_p >= (3/2pi)((1+2a)/3)^{1/2} ||A - tau(A)||_p",
            Law::Q9 => "Talagrand variance bound with logarithmic gain",
            Law::Q10 => "Eldan-Gross: gradient mass vs summed squared L1-influences",
            Law::Q11 => "Cordero-Erausquin-Eskenazis Lp-Lq inequality",
            Law::Q12 => "isoperimetry: gradient mass >= C Var ln(e/Var)^{p/2}",
            Law::Q13 => "local Talagrand bound for high-order influences",
            Law::Q14 => "summed Talagrand Lp-Lq inequality over k-subsets",
            Law::Q15 => "partial isoperimetry for coalition influences",
            Law::Q16 => "restricted Poincare: Inf_J^2 >= k V_J; sum V_J >= W^{>=k}/k",
            Law::Q17 => "hypercontractive variance decay and log-convexity",
            Law::Q18 => "derivative operator norm: ||d_J A||_inf <= 2^k ||A||_inf",
            Law::Q19 => "improved L2 decay: ||d_J P_s A||_2^2 <= e^{-2ks} Inf_J^2",
            Law::Q20 => "Kadison-Schwarz for conditional expectations",
            Law::A1 => "classical Lq spectral gap for the heat semigroup",
            Law::A2 => "entropy vs norm-ratio lower bound",
            Law::A3 => "differential inequality for u(t) = ||P_t D_i f||_2^2",
            Law::A3Prime => "combined differential inequality with spectral-gap term",
            Law::A4 => "integral lemma: V_i <= G(u(0))",
            Law::A5 => "crude closed-form bound on G",
            Law::A6 => "improved classical Talagrand bound per coordinate",
        }
    }

    pub fn is_classical(&self) -> bool {
        matches!(
            self,
            Law::A1 | Law::A2 | Law::A3 | Law::A3Prime | Law::A4 | Law::A5 | Law::A6
        )
    }

    /// Laws whose hypotheses include `‖A‖_∞ ≤ 1` (inputs are rescaled by
    /// the suite before checking).
    pub fn needs_contraction(&self) -> bool {
        matches!(
            self,
            Law::Q9
                | Law::Q10
                | Law::Q11
                | Law::Q12
                | Law::Q13
                | Law::Q14
                | Law::Q15
                | Law::A6
        )
    }
}

impl FromStr for Law {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase();
        let all = Law::QUANTUM.iter().chain(Law::CLASSICAL.iter());
        for law in all {
            if law.id() == norm {
                return Ok(*law);
            }
        }
        Err(Error::UnknownLaw(s.to_string()))
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Grid-point parameters consumed by the checkers; each law reads only the
/// fields it needs.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct LawParams {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t: f64,
    pub k: usize,
}

impl Default for LawParams {
    fn default() -> Self {
        Self { p: 1.5, q: 1.5, alpha: 1.0, beta: 0.0, t: 0.5, k: 1 }
    }
}

/// Guard band under the critical exponent 2 for constants dividing by
/// `2 − p` or `2 − q`.
const EXP_GUARD: f64 = 1e-6;

/// Slack allowed on the `‖A‖_∞ ≤ 1` hypothesis.
const NORM_SLACK: f64 = 1e-8;

struct Ctx<'a> {
    law: Law,
    tol: &'a Tolerances,
    base: Vec<(&'static str, String)>,
}

impl Ctx<'_> {
    fn params(&self, extra: &[(&str, String)]) -> std::collections::BTreeMap<String, String> {
        self.base
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .chain(extra.iter().map(|(k, v)| (k.to_string(), v.clone())))
            .collect()
    }

    fn scalar(&self, extra: &[(&str, String)], lhs: f64, rhs: f64, notes: &str) -> CheckRecord {
        CheckRecord::scalar(self.law.id(), self.params(extra), lhs, rhs, self.tol, notes)
    }

    fn operator(&self, extra: &[(&str, String)], diff: &Observable, notes: &str) -> CheckRecord {
        let margin = diff.psd_margin().unwrap_or(f64::NEG_INFINITY);
        let scale = diff.operator_norm().unwrap_or(1.0);
        CheckRecord::operator(self.law.id(), self.params(extra), margin, scale, self.tol, notes)
    }

    fn skipped(&self, extra: &[(&str, String)], notes: &str) -> CheckRecord {
        CheckRecord::skipped(self.law.id(), self.params(extra), notes)
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v}")
}

/// Checks one quantum law against one operator at one grid point; per-site
/// and per-subset laws return one record per site or coalition.
pub fn check_quantum(
    law: Law,
    a: &Observable,
    params: &LawParams,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    if law.is_classical() {
        return Err(Error::UnknownLaw(format!(
            "{law} is a classical cube law; use check_classical"
        )));
    }
    let n = a.n();
    let LawParams { p, q, alpha, beta, t, k } = *params;
    let ctx = Ctx { law, tol, base: vec![("n", n.to_string())] };

    let subsets = |k: usize| SubsetMask::subsets_of_size(n, k);
    let var = variance(a);

    let records = match law {
        Law::Q1 => {
            let lhs = (-2.0 * t).exp() * var;
            let rhs = variance(&semigroup_apply(a, t)?);
            vec![ctx.scalar(&[("t", fmt_f(t))], lhs, rhs, "")]
        }
        Law::Q2 => {
            let lhs = a.schatten_norm(1.0 + (-2.0 * t).exp())?;
            let rhs = semigroup_apply(a, t)?.schatten_norm(2.0)?;
            vec![ctx.scalar(&[("t", fmt_f(t))], lhs, rhs, "")]
        }
        Law::Q3 => {
            if k > n {
                return Ok(vec![ctx.skipped(&[("k", k.to_string())], "k exceeds qubit count")]);
            }
            let evolved = semigroup_apply(a, t)?;
            subsets(k)
                .iter()
                .map(|j| {
                    let lhs = (-(k as f64) * t).exp() * derivative(a, j)?.schatten_norm(p)?;
                    let rhs = derivative(&evolved, j)?.schatten_norm(p)?;
                    Ok(ctx.scalar(
                        &[("p", fmt_f(p)), ("t", fmt_f(t)), ("J", j.to_string())],
                        lhs,
                        rhs,
                        "",
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Law::Q4 => (0..n)
            .map(|j| {
                let stats = variance_stats(a, j)?;
                let dj = derivative(a, &SubsetMask::singleton(n, j)?)?;
                let abs_sq = dj.adjoint().mul(&dj)?;
                let diff = stats.var_j.scale(Complex64::new(3.0, 0.0)).sub(&abs_sq)?;
                Ok(ctx.operator(&[("j", (j + 1).to_string())], &diff, ""))
            })
            .collect::<Result<Vec<_>>>()?,
        Law::Q5 => {
            let b = constants::b_compare(alpha, beta)?;
            if !b.is_finite() {
                return Ok(vec![ctx.skipped(
                    &[("alpha", fmt_f(alpha)), ("beta", fmt_f(beta))],
                    "comparison constant is infinite at beta = 1",
                )]);
            }
            let ga = alpha_gradient(a, alpha)?;
            let gb = alpha_gradient(a, beta)?;
            (0..n)
                .map(|j| {
                    let diff = ga.per_site[j]
                        .sub(&gb.per_site[j].scale(Complex64::new(b, 0.0)))?;
                    Ok(ctx.operator(
                        &[
                            ("alpha", fmt_f(alpha)),
                            ("beta", fmt_f(beta)),
                            ("j", (j + 1).to_string()),
                        ],
                        &diff,
                        "",
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Law::Q6 => {
            let c = constants::c_alpha(alpha, t);
            let evolved = semigroup_apply(a, t)?;
            let grad_evolved = alpha_gradient(&evolved, alpha)?;
            let grad = alpha_gradient(a, alpha)?;
            (0..n)
                .map(|j| {
                    let smoothed = semigroup_apply(&grad.per_site[j], t)?
                        .scale(Complex64::new(c, 0.0));
                    let diff = smoothed.sub(&grad_evolved.per_site[j])?;
                    Ok(ctx.operator(
                        &[("alpha", fmt_f(alpha)), ("t", fmt_f(t)), ("j", (j + 1).to_string())],
                        &diff,
                        "",
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Law::Q7 => {
            if t <= 0.0 {
                return Ok(vec![ctx.skipped(&[("t", fmt_f(t))], "requires t > 0")]);
            }
            let g = constants::g_alpha(alpha, t)?;
            let evolved = semigroup_apply(a, t)?;
            let grad = alpha_gradient(&evolved, alpha)?;
            [2.0, 4.0, f64::INFINITY]
                .iter()
                .map(|&r| {
                    let lhs = g.powf(-0.5) * a.schatten_norm(r)?;
                    let rhs = grad.total_abs.schatten_norm(r)?;
                    Ok(ctx.scalar(
                        &[("alpha", fmt_f(alpha)), ("t", fmt_f(t)), ("r", fmt_f(r))],
                        lhs,
                        rhs,
                        "",
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Law::Q8 => {
            let grad = alpha_gradient(a, alpha)?;
            let lhs = grad.total_abs.schatten_norm(p)?;
            let rhs = constants::lp_poincare(alpha) * a.centered().schatten_norm(p)?;
            vec![ctx.scalar(&[("alpha", fmt_f(alpha)), ("p", fmt_f(p))], lhs, rhs, "")]
        }
        Law::Q9 => check_q9(&ctx, a, params, var)?,
        Law::Q10 => {
            let extra = [("p", fmt_f(p))];
            if p >= 2.0 - EXP_GUARD {
                return Ok(vec![ctx.skipped(&extra, "explicit constant requires p < 2")]);
            }
            if let Some(rec) = hypothesis_guard(&ctx, a, var, &extra)? {
                return Ok(vec![rec]);
            }
            let grad = alpha_gradient(a, 1.0)?;
            let lhs = grad.total_abs.schatten_norm(p)?.powf(p);
            let inf_sq_sum: f64 = (0..n)
                .map(|j| {
                    influence(a, &SubsetMask::singleton(n, j)?, 1.0).map(|v| v * v)
                })
                .sum::<Result<f64>>()?;
            let log_term = if inf_sq_sum > 0.0 { ln_plus(1.0 / inf_sq_sum) } else { 0.0 };
            let rhs = constants::eldan_gross(p)? * var * (1.0 + log_term).powf(p / 2.0);
            vec![ctx.scalar(&extra, lhs, rhs, "")]
        }
        Law::Q11 => {
            let extra =
                [("alpha", fmt_f(alpha)), ("p", fmt_f(p)), ("q", fmt_f(q))];
            if q >= 2.0 - EXP_GUARD {
                return Ok(vec![ctx.skipped(&extra, "requires q < 2")]);
            }
            if q > p {
                return Ok(vec![ctx.skipped(&extra, "requires q <= p")]);
            }
            if let Some(rec) = hypothesis_guard(&ctx, a, var, &extra)? {
                return Ok(vec![rec]);
            }
            let grad = alpha_gradient(a, alpha)?;
            let grad_p = grad.total_abs.schatten_norm(p)?.powf(p);
            let grad_q = grad.total_abs.schatten_norm(q)?;
            let log_term = if grad_q > 0.0 {
                ln_plus(grad_p / (grad_q * grad_q))
            } else {
                0.0
            };
            let denom = (1.0 + q / (2.0 - q) * log_term).powf(p / 2.0);
            let lhs = grad_p / denom;
            let rhs = constants::cee(alpha, p, q)? * var;
            vec![ctx.scalar(&extra, lhs, rhs, "")]
        }
        Law::Q12 => check_q12(&ctx, a, params, var)?,
        Law::Q13 => check_q13(&ctx, a, params)?,
        Law::Q14 => check_q14(&ctx, a, params)?,
        Law::Q15 => check_q15(&ctx, a, params)?,
        Law::Q16 => {
            if k > n {
                return Ok(vec![ctx.skipped(&[("k", k.to_string())], "k exceeds qubit count")]);
            }
            let mut out: Vec<CheckRecord> = subsets(k)
                .iter()
                .map(|j| {
                    let lhs = influence_l2(a, j);
                    let rhs = k as f64 * v_functional(a, j, VMethod::Fourier)?;
                    Ok(ctx.scalar(&[("k", k.to_string()), ("J", j.to_string())], lhs, rhs, ""))
                })
                .collect::<Result<Vec<_>>>()?;
            let sum_v: f64 = subsets(k)
                .iter()
                .map(|j| v_functional(a, j, VMethod::Fourier))
                .sum::<Result<f64>>()?;
            let tail = calculus::weight_tail(&calculus::fourier_weights(a), k);
            out.push(ctx.scalar(
                &[("k", k.to_string())],
                sum_v,
                tail / k as f64,
                "summed form",
            ));
            out
        }
        Law::Q17 => check_q17(&ctx, a, params, var)?,
        Law::Q18 => {
            if k > n {
                return Ok(vec![ctx.skipped(&[("k", k.to_string())], "k exceeds qubit count")]);
            }
            let norm = a.operator_norm()?;
            subsets(k)
                .iter()
                .map(|j| {
                    let lhs = 2.0f64.powi(k as i32) * norm;
                    let rhs = derivative(a, j)?.operator_norm()?;
                    Ok(ctx.scalar(&[("k", k.to_string()), ("J", j.to_string())], lhs, rhs, ""))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Law::Q19 => {
            if k > n {
                return Ok(vec![ctx.skipped(&[("k", k.to_string())], "k exceeds qubit count")]);
            }
            let evolved = semigroup_apply(a, t)?;
            subsets(k)
                .iter()
                .map(|j| {
                    let lhs = (-2.0 * k as f64 * t).exp() * influence_l2(a, j);
                    let rhs = derivative(&evolved, j)?.l2_norm().powi(2);
                    Ok(ctx.scalar(
                        &[("k", k.to_string()), ("t", fmt_f(t)), ("J", j.to_string())],
                        lhs,
                        rhs,
                        "",
                    ))
                })
                .collect::<Result<Vec<_>>>()?
        }
        Law::Q20 => {
            if k > n {
                return Ok(vec![ctx.skipped(&[("k", k.to_string())], "k exceeds qubit count")]);
            }
            subsets(k)
                .iter()
                .map(|j| {
                    let abs_sq = a.adjoint().mul(a)?;
                    let cond = cond_expectation(a, j)?;
                    let diff = cond_expectation(&abs_sq, j)?
                        .sub(&cond.adjoint().mul(&cond)?)?;
                    Ok(ctx.operator(&[("J", j.to_string())], &diff, ""))
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => unreachable!("classical laws rejected above"),
    };
    Ok(records)
}

/// Returns a skipped record when a `‖A‖_∞ ≤ 1` law cannot run on `a`
/// (degenerate variance or norm out of range).
fn hypothesis_guard(
    ctx: &Ctx<'_>,
    a: &Observable,
    var: f64,
    extra: &[(&str, String)],
) -> Result<Option<CheckRecord>> {
    if var <= 0.0 {
        return Ok(Some(ctx.skipped(extra, "Var(A) = 0: inequality is trivial")));
    }
    if a.operator_norm()? > 1.0 + NORM_SLACK {
        return Ok(Some(ctx.skipped(extra, "hypothesis ||A||_inf <= 1 violated")));
    }
    Ok(None)
}

fn check_q9(
    ctx: &Ctx<'_>,
    a: &Observable,
    params: &LawParams,
    var: f64,
) -> Result<Vec<CheckRecord>> {
    let LawParams { p, q, alpha, .. } = *params;
    let extra = [("alpha", fmt_f(alpha)), ("p", fmt_f(p)), ("q", fmt_f(q))];
    if q >= 2.0 - EXP_GUARD {
        return Ok(vec![ctx.skipped(&extra, "requires q < 2")]);
    }
    if q > p {
        return Ok(vec![ctx.skipped(&extra, "requires q <= p")]);
    }
    if var <= 0.0 {
        return Ok(vec![ctx.skipped(&extra, "Var(A) = 0: inequality is trivial")]);
    }
    let grad = alpha_gradient(a, alpha)?;
    let lhs = a.operator_norm()?.powf(2.0 - p) * grad.total_abs.schatten_norm(p)?.powf(p);
    let prefactor = var * ((1.0 + 2.0 * alpha) / 3.0).powf(p / 2.0);
    let c1 = constants::c1(p)?;
    let c2 = constants::c2(p)?;
    let ratio = log_ratio(a, q)?;
    // Statement form: the logarithmic ratio enters clamped at zero.
    let rhs_statement = prefactor * c1.max(c2 * ratio.max(0.0).powf(p / 2.0));
    // Proof form: the hypercontractive branch is derived for ratio >= 2.
    let rhs_proof = prefactor * c1.max(c2 * ratio.max(2.0).powf(p / 2.0));
    Ok(vec![
        ctx.scalar(&extra, lhs, rhs_statement, "statement form"),
        ctx.scalar(&extra, lhs, rhs_proof, "proof form"),
    ])
}

fn check_q12(
    ctx: &Ctx<'_>,
    a: &Observable,
    params: &LawParams,
    var: f64,
) -> Result<Vec<CheckRecord>> {
    let p = params.p;
    let extra = [("p", fmt_f(p))];
    if let Some(rec) = hypothesis_guard(ctx, a, var, &extra)? {
        return Ok(vec![rec]);
    }
    let grad = alpha_gradient(a, 1.0)?;
    let lhs = grad.total_abs.schatten_norm(p)?.powf(p);
    let log_factor = (std::f64::consts::E / var).ln().powf(p / 2.0);
    let mut out = Vec::new();
    if p < 2.0 - EXP_GUARD {
        let rhs = constants::isoper_c1(p)? * var * log_factor;
        out.push(ctx.scalar(&extra, lhs, rhs, "general branch"));
    } else {
        out.push(ctx.skipped(&extra, "general branch requires p < 2"));
    }
    if is_unitary_hermitian(a)? {
        let rhs = constants::isoper_c2(p)? * var * log_factor;
        out.push(ctx.scalar(&extra, lhs, rhs, "unitary-Hermitian branch"));
    }
    Ok(out)
}

fn is_unitary_hermitian(a: &Observable) -> Result<bool> {
    if !a.is_hermitian() {
        return Ok(false);
    }
    let sq = a.mul(a)?;
    let id = Observable::identity(a.n())?;
    let dev = sq.sub(&id)?.operator_norm()?;
    Ok(dev < 1e-10)
}

fn check_q13(ctx: &Ctx<'_>, a: &Observable, params: &LawParams) -> Result<Vec<CheckRecord>> {
    let LawParams { p, q, k, .. } = *params;
    let n = a.n();
    let base = [("p", fmt_f(p)), ("q", fmt_f(q)), ("k", k.to_string())];
    if q >= 2.0 - EXP_GUARD {
        return Ok(vec![ctx.skipped(&base, "requires q < 2")]);
    }
    if k > n {
        return Ok(vec![ctx.skipped(&base, "k exceeds qubit count")]);
    }
    if a.operator_norm()? > 1.0 + NORM_SLACK {
        return Ok(vec![ctx.skipped(&base, "hypothesis ||A||_inf <= 1 violated")]);
    }
    let norm_factor = a.operator_norm()?.powf(2.0 - p);
    let kf = k as f64;
    SubsetMask::subsets_of_size(n, k)
        .iter()
        .map(|j| {
            let extra =
                [("p", fmt_f(p)), ("q", fmt_f(q)), ("k", k.to_string()), ("J", j.to_string())];
            let vj = v_functional(a, j, VMethod::Fourier)?;
            let inf_p = influence(a, j, p)?;
            let inf_q_norm = derivative(a, j)?.schatten_norm(q)?;
            let lhs = norm_factor * inf_p;
            // Zero L^q influence forces d_J A = 0; the logarithmic branch
            // degenerates, leaving the spectral-gap term (then V_J = 0).
            let log_branch = if inf_q_norm > 0.0 && vj > 0.0 {
                q / (2.0 - q) * ln_plus(kf.sqrt() * vj.sqrt() / inf_q_norm)
            } else {
                0.0
            };
            let rhs = 2.0f64.powf((p - 2.0) * kf) * vj * kf.max(log_branch);
            let note = if vj == 0.0 { "trivial: V_J = 0" } else { "" };
            Ok(ctx.scalar(&extra, lhs, rhs, note))
        })
        .collect()
}

fn check_q14(ctx: &Ctx<'_>, a: &Observable, params: &LawParams) -> Result<Vec<CheckRecord>> {
    let LawParams { p, q, k, .. } = *params;
    let n = a.n();
    let extra = [("p", fmt_f(p)), ("q", fmt_f(q)), ("k", k.to_string())];
    if q >= 2.0 - EXP_GUARD {
        return Ok(vec![ctx.skipped(&extra, "requires q < 2")]);
    }
    if k > n {
        return Ok(vec![ctx.skipped(&extra, "k exceeds qubit count")]);
    }
    if a.operator_norm()? > 1.0 + NORM_SLACK {
        return Ok(vec![ctx.skipped(&extra, "hypothesis ||A||_inf <= 1 violated")]);
    }
    let kf = k as f64;
    let mut lhs = 0.0;
    let mut sum_v = 0.0;
    for j in SubsetMask::subsets_of_size(n, k) {
        let inf_p = influence(a, &j, p)?;
        let inf_q_norm = derivative(a, &j)?.schatten_norm(q)?;
        sum_v += v_functional(a, &j, VMethod::Fourier)?;
        if inf_q_norm == 0.0 {
            continue; // d_J A = 0 contributes nothing to either side
        }
        let denom = kf + q / (2.0 - q) * ln_plus(kf.sqrt() * inf_p.sqrt() / inf_q_norm);
        lhs += inf_p / denom;
    }
    let rhs = constants::cor16_ck(k, p, q)? * sum_v;
    Ok(vec![ctx.scalar(&extra, lhs, rhs, "")])
}

fn check_q15(ctx: &Ctx<'_>, a: &Observable, params: &LawParams) -> Result<Vec<CheckRecord>> {
    let LawParams { p, k, .. } = *params;
    let n = a.n();
    let base = [("p", fmt_f(p)), ("k", k.to_string())];
    if p >= 2.0 - EXP_GUARD {
        return Ok(vec![ctx.skipped(&base, "requires p < 2")]);
    }
    if k > n {
        return Ok(vec![ctx.skipped(&base, "k exceeds qubit count")]);
    }
    if a.operator_norm()? > 1.0 + NORM_SLACK {
        return Ok(vec![ctx.skipped(&base, "hypothesis ||A||_inf <= 1 violated")]);
    }
    let kf = k as f64;
    let ck = constants::partial_isoper_ck(k, p)?;
    let mut out = Vec::new();
    let mut max_inf: f64 = 0.0;
    for j in SubsetMask::subsets_of_size(n, k) {
        let extra = [("p", fmt_f(p)), ("k", k.to_string()), ("J", j.to_string())];
        let vj = v_functional(a, &j, VMethod::Fourier)?;
        let inf_p = influence(a, &j, p)?;
        max_inf = max_inf.max(inf_p);
        let (rhs, note) = if vj > 0.0 {
            (ck * vj * (std::f64::consts::E.powf(kf) / (kf * vj).sqrt()).ln(), "")
        } else {
            (0.0, "trivial: V_J = 0")
        };
        out.push(ctx.scalar(&extra, inf_p, rhs, note));
    }
    // Weight form: max over k-subsets against the Fourier tail.
    let tail = calculus::weight_tail(&calculus::fourier_weights(a), k);
    let binom = binomial(n, k) as f64;
    if tail > 0.0 {
        let rhs = ck / (2.0 * kf * binom)
            * tail
            * ((2.0 * kf).exp() * binom / tail).ln();
        out.push(ctx.scalar(&base, max_inf, rhs, "weight form"));
    } else {
        out.push(ctx.skipped(&base, "weight form trivial: W^{>=k} = 0"));
    }
    Ok(out)
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (1..=k as u64).fold(1u64, |acc, i| acc * (n as u64 - k as u64 + i) / i)
}

fn check_q17(
    ctx: &Ctx<'_>,
    a: &Observable,
    params: &LawParams,
    var: f64,
) -> Result<Vec<CheckRecord>> {
    let LawParams { q, t, .. } = *params;
    let n = a.n();
    let extra = [("q", fmt_f(q)), ("t", fmt_f(t))];
    if q >= 2.0 - EXP_GUARD {
        return Ok(vec![ctx.skipped(&extra, "requires q < 2")]);
    }
    let mut out = Vec::new();
    if var <= 0.0 {
        out.push(ctx.skipped(&extra, "Var(A) = 0: decay is trivial"));
    } else {
        let centered_q = a.centered().schatten_norm(q)?;
        let grad_q_sq: f64 = (0..n)
            .map(|j| {
                derivative(a, &SubsetMask::singleton(n, j)?)?
                    .schatten_norm(q)
                    .map(|v| v * v)
            })
            .sum::<Result<f64>>()?;
        let m = (centered_q * centered_q).min(grad_q_sq);
        let theta = (t.tanh() * q / (2.0 - q)).min(1.0);
        let lhs = var.powf(1.0 - theta) * m.powf(theta);
        let rhs = variance(&semigroup_apply(a, t)?);
        out.push(ctx.scalar(&extra, lhs, rhs, "interpolated decay"));
    }
    // Log-convexity of s -> Var(P_s A) at the midpoint of [t, 2t].
    let v1 = variance(&semigroup_apply(a, t)?);
    let v2 = variance(&semigroup_apply(a, 2.0 * t)?);
    let vm = variance(&semigroup_apply(a, 1.5 * t)?);
    out.push(ctx.scalar(&extra, v1 * v2, vm * vm, "log-convexity"));
    Ok(out)
}

/// Checks one classical cube law against one function at one grid point.
pub fn check_classical(
    law: Law,
    f: &BooleanFn,
    params: &LawParams,
    tol: &Tolerances,
) -> Result<Vec<CheckRecord>> {
    if !law.is_classical() {
        return Err(Error::UnknownLaw(format!(
            "{law} is a quantum law; use check_quantum"
        )));
    }
    let n = f.n();
    let LawParams { p, q, t, .. } = *params;
    let ctx = Ctx { law, tol, base: vec![("n", n.to_string())] };

    let needs_q_below_2 = !matches!(law, Law::A1);
    if needs_q_below_2 && q >= 2.0 - EXP_GUARD {
        return Ok(vec![ctx.skipped(&[("q", fmt_f(q))], "requires q < 2")]);
    }
    let c = q / (2.0 - q);

    let records = match law {
        Law::A1 => {
            let g = f.centered();
            let norm_q = g.lp_norm(q)?;
            if norm_q == 0.0 {
                return Ok(vec![ctx.skipped(&[("q", fmt_f(q))], "centered input is zero")]);
            }
            let cq = constants::classical_cq(q)?;
            let lhs = (-cq * t).exp() * norm_q;
            let rhs = g.heat(t)?.lp_norm(q)?;
            vec![ctx.scalar(
                &[("q", fmt_f(q)), ("t", fmt_f(t))],
                lhs,
                rhs,
                "externally sourced statement",
            )]
        }
        Law::A2 => {
            let norm_q = f.lp_norm(q)?;
            if norm_q == 0.0 {
                return Ok(vec![ctx.skipped(&[("q", fmt_f(q))], "input is identically zero")]);
            }
            let norm_2 = f.lp_norm(2.0)?;
            let lhs = f.entropy_of_square();
            let rhs = 2.0 * c * norm_2 * norm_2 * ln_plus(norm_2 / norm_q);
            vec![ctx.scalar(&[("q", fmt_f(q))], lhs, rhs, "")]
        }
        Law::A3 | Law::A3Prime => (0..n)
            .map(|i| {
                let extra =
                    [("q", fmt_f(q)), ("t", fmt_f(t)), ("i", (i + 1).to_string())];
                let g = f.derivative(i)?;
                let b = g.lp_norm(q)?;
                if b == 0.0 {
                    return Ok(ctx.skipped(&extra, "zero derivative"));
                }
                let u = g.u_decay(t);
                let lhs = -g.u_decay_derivative(t);
                let log_term = ln_plus(u.sqrt() / b);
                let rhs = if law == Law::A3 {
                    2.0 * c * u * log_term
                } else {
                    u * (1.0 + c * log_term)
                };
                Ok(ctx.scalar(&extra, lhs, rhs, ""))
            })
            .collect::<Result<Vec<_>>>()?,
        Law::A4 => (0..n)
            .map(|i| {
                let extra = [("q", fmt_f(q)), ("i", (i + 1).to_string())];
                let g = f.derivative(i)?;
                let b = g.lp_norm(q)?;
                let rhs = f.v_i(i, VIMethod::Fourier)?;
                if b == 0.0 {
                    return Ok(ctx.scalar(&extra, 0.0, rhs, "trivial: zero derivative"));
                }
                let u0 = g.lp_norm(2.0)?.powi(2);
                let lhs = g_integral(u0, b, c)?;
                Ok(ctx.scalar(&extra, lhs, rhs, ""))
            })
            .collect::<Result<Vec<_>>>()?,
        Law::A5 => (0..n)
            .map(|i| {
                let extra = [("q", fmt_f(q)), ("i", (i + 1).to_string())];
                let g = f.derivative(i)?;
                let b = g.lp_norm(q)?;
                if b == 0.0 {
                    return Ok(ctx.skipped(&extra, "zero derivative"));
                }
                let x = g.lp_norm(2.0)?.powi(2);
                let big_c = constants::classical_crude(c.max(1.0))?;
                let lhs = big_c * x / (1.0 + c * ln_plus(x.sqrt() / b));
                let rhs = g_integral(x, b, c)?;
                Ok(ctx.scalar(&extra, lhs, rhs, ""))
            })
            .collect::<Result<Vec<_>>>()?,
        Law::A6 => {
            if f.lp_norm(f64::INFINITY)? > 1.0 + NORM_SLACK {
                return Ok(vec![ctx.skipped(
                    &[("p", fmt_f(p)), ("q", fmt_f(q))],
                    "hypothesis |f| <= 1 violated",
                )]);
            }
            let big_c = constants::classical_crude(c.max(1.0))?;
            (0..n)
                .map(|i| {
                    let extra =
                        [("p", fmt_f(p)), ("q", fmt_f(q)), ("i", (i + 1).to_string())];
                    let g = f.derivative(i)?;
                    let dq = g.lp_norm(q)?;
                    let rhs = f.v_i(i, VIMethod::Fourier)?;
                    if dq == 0.0 {
                        return Ok(ctx.scalar(&extra, 0.0, rhs, "trivial: zero derivative"));
                    }
                    let dp_p = g.lp_norm(p)?.powf(p);
                    let lhs = big_c * dp_p / (1.0 + c * ln_plus(dp_p.powf(0.5) / dq));
                    Ok(ctx.scalar(&extra, lhs, rhs, ""))
                })
                .collect::<Result<Vec<_>>>()?
        }
        _ => unreachable!("quantum laws rejected above"),
    };
    Ok(records)
}
