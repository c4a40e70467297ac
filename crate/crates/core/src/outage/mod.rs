//! Outage probability of a downlink under Rayleigh / Nakagami-plus-Rayleigh
//! fading with co-channel interference.
//!
//! Two analytic routes are available. The partial-fraction route expands the
//! serving and interference MGFs into poles and integrates the cross terms.
//! The moment route differentiates the interference Laplace transform
//! instead and never cancels large residues. [`outage`] uses the first and
//! falls back to the second when the residue sum is ill-conditioned.

pub mod analytic;
mod laplace;
pub mod link;
pub mod monte_carlo;
pub mod partial_fractions;
pub mod quadrature;
pub mod special;
pub mod special_cases;

pub use link::{LinkKind, LinkSpec, MeanSnr};
pub use monte_carlo::{outage_mc, McEstimate};
pub use partial_fractions::{partial_fractions, product_form, partial_fractions_of_poles, Factor, Pole, PoleExpansion};
pub use quadrature::{cached_rule, laguerre_rule, QuadratureRule};
pub use special::upper_incomplete_gamma_int;
pub use special_cases::outage_special_case;

use crate::error::{Error, Result};
use analytic::Evaluation;

pub const DEFAULT_LAGUERRE_ORDER: usize = 32;
/// Largest tolerated ratio between the sum of absolute residue terms and 1.
pub const CANCELLATION_LIMIT: f64 = 1e5;
pub const CLAMP_TOL: f64 = 1e-9;
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    PartialFractions,
    Moments,
}

fn clamp(value: f64) -> Result<f64> {
    if !value.is_finite() || !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&value) {
        return Err(Error::OutOfRange { value });
    }
    Ok(value.clamp(0.0, 1.0))
}

fn checked(ev: Evaluation) -> Result<f64> {
    if !ev.magnitude.is_finite() || ev.magnitude > CANCELLATION_LIMIT {
        return Err(Error::IllConditioned { magnitude: ev.magnitude });
    }
    clamp(ev.value)
}

fn is_rayleigh_serving(norm: &link::Normalized) -> bool {
    norm.serving.len() == 1 && norm.serving[0].shape == 1
}

/// Evaluates the mixture route. The kernel integrand is a polynomial of
/// known degree, so the smallest exact rule not above `order` is used; when
/// `order` is too small for exactness the result is checked against the
/// doubled rule.
fn partial_fraction_route(link: &LinkSpec, order: usize) -> Result<f64> {
    let norm = link.normalized();
    if is_rayleigh_serving(&norm) {
        return checked(analytic::rayleigh_serving(&norm)?);
    }
    let exp = analytic::Expansions::new(&norm)?;
    let exact = exp.kernel_degree() / 2 + 1;
    let n = order.min(exact);
    let value = checked(analytic::mixture_serving(&norm, &exp, cached_rule(n)?))?;
    if exact > order {
        let doubled = (2 * order).min(quadrature::MAX_ORDER);
        let other = checked(analytic::mixture_serving(&norm, &exp, cached_rule(doubled)?))?;
        if (other - value).abs() > QUADRATURE_TOL {
            return Err(Error::Quadrature { order, doubled, delta: (other - value).abs() });
        }
    }
    Ok(value)
}

/// Same as [`outage`] at exactly `order` nodes, without the exactness shortcut.
pub fn outage_with_full_rule(link: &LinkSpec, order: usize) -> Result<f64> {
    link.validate()?;
    let norm = link.normalized();
    let pf = if is_rayleigh_serving(&norm) {
        analytic::rayleigh_serving(&norm).and_then(checked)
    } else {
        analytic::Expansions::new(&norm)
            .and_then(|exp| checked(analytic::mixture_serving(&norm, &exp, cached_rule(order)?)))
    };
    match pf {
        Err(Error::IllConditioned { .. }) | Err(Error::OutOfRange { .. }) => checked(laplace::evaluate(&norm)?),
        other => other,
    }
}

/// Outage through one specific route, without fallback.
pub fn outage_via(link: &LinkSpec, route: Route, laguerre_order: usize) -> Result<f64> {
    link.validate()?;
    match route {
        Route::PartialFractions => partial_fraction_route(link, laguerre_order),
        Route::Moments => checked(laplace::evaluate(&link.normalized())?),
    }
}

/// Outage with the partial-fraction route first and the moment route as
/// fallback on cancellation.
pub fn outage(link: &LinkSpec, laguerre_order: usize) -> Result<f64> {
    match outage_via(link, Route::PartialFractions, laguerre_order) {
        Err(Error::IllConditioned { .. }) | Err(Error::OutOfRange { .. }) => {
            outage_via(link, Route::Moments, laguerre_order)
        }
        other => other,
    }
}

fn require_kind(link: &LinkSpec, kind: LinkKind) -> Result<()> {
    if link.kind != kind {
        return Err(Error::Link(format!("expected a {kind:?} link, got {:?}", link.kind)));
    }
    Ok(())
}

/// Outage of a ground UE link (Rayleigh serving and interferers).
pub fn outage_ue(link: &LinkSpec) -> Result<f64> {
    require_kind(link, LinkKind::Ue)?;
    outage(link, DEFAULT_LAGUERRE_ORDER)
}

/// Outage of a UAV link at the default Laguerre order.
pub fn outage_uav(link: &LinkSpec) -> Result<f64> {
    outage_uav_with_order(link, DEFAULT_LAGUERRE_ORDER)
}

pub fn outage_uav_with_order(link: &LinkSpec, laguerre_order: usize) -> Result<f64> {
    require_kind(link, LinkKind::Uav)?;
    outage(link, laguerre_order)
}

/// `|P(2n) - P(n)|` on the partial-fraction route with full-size rules.
pub fn quadrature_doubling_delta(link: &LinkSpec, laguerre_order: usize) -> Result<f64> {
    let doubled = (2 * laguerre_order).min(quadrature::MAX_ORDER);
    let a = outage_with_full_rule(link, laguerre_order)?;
    let b = outage_with_full_rule(link, doubled)?;
    Ok((a - b).abs())
}

#[cfg(test)]
mod tests;
