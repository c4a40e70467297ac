//! Degenerate links with short closed forms, evaluated in raw SNR units.
//!
//! 1. no LoS component anywhere: every link is Rayleigh on its NLoS mean.
//! 2. no NLoS component anywhere: pure Nakagami-m links, closed-form moments.
//! 3. no NLoS component and `m = 1`: Rayleigh on the LoS means.
//! 4. serving link without LoS component, arbitrary interferers.

use crate::error::{Error, Result};
use crate::outage::link::{LinkKind, LinkSpec, MeanSnr};
use crate::outage::partial_fractions::{partial_fractions, product_form, Factor};
use crate::outage::special::{binomial, factorial};

fn parts(s: &MeanSnr) -> (f64, f64) {
    match *s {
        MeanSnr::Rayleigh { mean } => (0.0, mean),
        MeanSnr::Mixture { los, nlos } => (los, nlos),
    }
}

fn reject(case: u8, reason: &str) -> Error {
    Error::SpecialCase { case, reason: reason.to_string() }
}

fn sign(j: u32) -> f64 {
    if j % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `1 - e^(-c) * M_I(-c)` for an exponential serving link, with the
/// interference MGF kept in product form.
fn exponential_serving(serving_mean: f64, interferers: &[Factor], gamma_th: f64) -> Result<f64> {
    let c = gamma_th / serving_mean;
    Ok(1.0 - (-c).exp() * product_form(interferers, -c))
}

pub fn outage_special_case(case: u8, link: &LinkSpec) -> Result<f64> {
    link.validate()?;
    if link.kind != LinkKind::Uav {
        return Err(reject(case, "special cases apply to UAV links"));
    }
    let serving = parts(&link.serving);
    let inter: Vec<(f64, f64)> = link.interferers.iter().map(parts).collect();
    let m = link.m;
    match case {
        1 => {
            if serving.0 != 0.0 || inter.iter().any(|i| i.0 != 0.0) {
                return Err(reject(1, "LoS means must all be zero"));
            }
            let f: Vec<Factor> = inter.iter().filter(|i| i.1 > 0.0).map(|i| Factor::new(i.1, 1)).collect();
            exponential_serving(serving.1, &f, link.gamma_th)
        }
        2 | 3 => {
            if serving.1 != 0.0 || inter.iter().any(|i| i.1 != 0.0) {
                return Err(reject(case, "NLoS means must all be zero"));
            }
            if case == 3 && m != 1 {
                return Err(reject(3, "requires m = 1"));
            }
            let f: Vec<Factor> =
                inter.iter().filter(|i| i.0 > 0.0).map(|i| Factor::new(i.0 / m as f64, m)).collect();
            if case == 3 {
                return exponential_serving(serving.0, &f, link.gamma_th);
            }
            nakagami_only(serving.0 / m as f64, m, &f, link.gamma_th)
        }
        4 => {
            if serving.0 != 0.0 {
                return Err(reject(4, "serving LoS mean must be zero"));
            }
            let mut f = Vec::new();
            for i in &inter {
                if i.0 > 0.0 {
                    f.push(Factor::new(i.0 / m as f64, m));
                }
                if i.1 > 0.0 {
                    f.push(Factor::new(i.1, 1));
                }
            }
            exponential_serving(serving.1, &f, link.gamma_th)
        }
        _ => Err(reject(case, "unknown special case")),
    }
}

/// Serving `Gamma(m, theta)` against gamma-distributed interference:
/// `1 - sum_{k<m} E[(X/theta)^k e^(-X/theta)] / k!` with `X = g(1 + I)` and
/// every moment of the interference density integrated in closed form.
fn nakagami_only(theta: f64, m: u32, interferers: &[Factor], gamma_th: f64) -> Result<f64> {
    let c = gamma_th / theta;
    let expansion = if interferers.is_empty() { None } else { Some(partial_fractions(interferers)?) };
    // E[I^i e^(-c I)]
    let tilted = |i: u32| -> f64 {
        match &expansion {
            None => {
                if i == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Some(e) => e
                .terms()
                .map(|(q, jp, alpha)| {
                    alpha * sign(jp) * factorial(i + jp - 1) / (factorial(jp - 1) * (q + c).powi((i + jp) as i32))
                })
                .sum(),
        }
    };
    let mut survival = 0.0;
    for k in 0..m {
        let mut moment = 0.0;
        for i in 0..=k {
            moment += binomial(k, i) * tilted(i);
        }
        survival += c.powi(k as i32) / factorial(k) * moment;
    }
    Ok(1.0 - (-c).exp() * survival)
}
