//! Closed-form outage through partial fractions of the serving and
//! interference MGFs.
//!
//! With the serving SNR `X` normalized to unit mean, outage is
//! `1 - E[S_X(tau + kappa I)]` where `S_X` is the survival function of `X`.
//! Inverting the serving MGF term by term gives `S_X` as a sum of regularized
//! upper incomplete gammas; inverting the interference MGF gives the density
//! of `I` as a sum of gamma kernels. Each cross term is a one-dimensional
//! integral over `[0, inf)` evaluated with Gauss-Laguerre after absorbing the
//! exponential decay into the change of variable, so the integrand left for
//! the rule is a polynomial.

use crate::error::Result;
use crate::outage::link::Normalized;
use crate::outage::partial_fractions::{partial_fractions, PoleExpansion};
use crate::outage::quadrature::QuadratureRule;
use crate::outage::special::{factorial, regularized_upper_gamma_int};

/// Result of an analytic evaluation with the sum of absolute term values,
/// which bounds the floating-point cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub magnitude: f64,
}

fn sign(j: u32) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Rayleigh serving link (unit mean after normalization):
/// `1 - e^-tau * sum alpha (-1)^j / (kappa + q)^j` over the interference poles.
pub(crate) fn rayleigh_serving(norm: &Normalized) -> Result<Evaluation> {
    debug_assert!(norm.serving.len() == 1 && norm.serving[0].shape == 1);
    let head = (-norm.tau).exp();
    if norm.interferers.is_empty() {
        return Ok(Evaluation { value: 1.0 - head, magnitude: head });
    }
    let exp = partial_fractions(&norm.interferers)?;
    let mut sum = 0.0;
    let mut magnitude = 0.0;
    for (q, j, alpha) in exp.terms() {
        let t = alpha * sign(j) / (norm.kappa + q).powi(j as i32);
        sum += t;
        magnitude += t.abs();
    }
    Ok(Evaluation { value: 1.0 - head * sum, magnitude: head * magnitude })
}

/// `integral_0^inf y^(jp-1) e^(-q y) Gamma(j, a0 + a1 y) dy / (j-1)!`.
///
/// The substitution `y = theta / (q + a1)` leaves
/// `e^-theta * theta^(jp-1) * poly(theta)` for the Laguerre rule, which is
/// exact once the rule order reaches `(j + jp) / 2`.
pub fn gamma_kernel(j: u32, jp: u32, q: f64, a0: f64, a1: f64, rule: &QuadratureRule) -> f64 {
    let r = q + a1;
    let ratio = a1 / r;
    let mut acc = 0.0;
    for (&theta, &w) in rule.nodes.iter().zip(&rule.weights) {
        let z = a0 + ratio * theta;
        let mut term = 1.0;
        let mut poly = 1.0;
        for k in 1..j {
            term *= z / k as f64;
            poly += term;
        }
        acc += w * theta.powi(jp as i32 - 1) * poly;
    }
    (-a0).exp() * acc / r.powi(jp as i32)
}

/// Same kernel with the plain scaling `y = theta / q`, i.e. the f-function
/// form in which the incomplete gamma stays inside the rule. Accurate only
/// when `a1 / q` is small; kept for cross-checking.
pub fn gamma_kernel_unscaled(j: u32, jp: u32, q: f64, a0: f64, a1: f64, rule: &QuadratureRule) -> f64 {
    let s = 1.0 / q;
    let acc: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&theta, &w)| w * theta.powi(jp as i32 - 1) * regularized_upper_gamma_int(j, a0 + a1 * s * theta))
        .sum();
    s.powi(jp as i32) * acc
}

/// Partial-fraction expansions of the normalized serving and interference MGFs.
pub(crate) struct Expansions {
    pub serving: PoleExpansion,
    pub interference: Option<PoleExpansion>,
}

impl Expansions {
    pub(crate) fn new(norm: &Normalized) -> Result<Expansions> {
        let serving = partial_fractions(&norm.serving)?;
        let interference = if norm.interferers.is_empty() { None } else { Some(partial_fractions(&norm.interferers)?) };
        Ok(Expansions { serving, interference })
    }

    /// Polynomial degree of the tilted kernel integrand.
    pub(crate) fn kernel_degree(&self) -> usize {
        let max_order = |e: &PoleExpansion| e.poles.iter().map(|p| p.multiplicity).max().unwrap_or(1) as usize;
        max_order(&self.serving) + self.interference.as_ref().map_or(1, max_order) - 2
    }
}

/// General mixture serving link.
pub(crate) fn mixture_serving(norm: &Normalized, exp: &Expansions, rule: &QuadratureRule) -> Evaluation {
    let Some(interference) = &exp.interference else {
        let mut survival = 0.0;
        let mut magnitude = 0.0;
        for (p, j, beta) in exp.serving.terms() {
            let t = beta * sign(j) * p.powi(-(j as i32)) * regularized_upper_gamma_int(j, p * norm.tau);
            survival += t;
            magnitude += t.abs();
        }
        return Evaluation { value: 1.0 - survival, magnitude };
    };
    let mut survival = 0.0;
    let mut magnitude = 0.0;
    for (p, j, beta) in exp.serving.terms() {
        let serving_coef = beta * sign(j) * p.powi(-(j as i32));
        let a0 = p * norm.tau;
        let a1 = p * norm.kappa;
        for (q, jp, alpha) in interference.terms() {
            let coef = serving_coef * alpha * sign(jp) / factorial(jp - 1);
            let t = coef * gamma_kernel(j, jp, q, a0, a1, rule);
            survival += t;
            magnitude += t.abs();
        }
    }
    Evaluation { value: 1.0 - survival, magnitude }
}
