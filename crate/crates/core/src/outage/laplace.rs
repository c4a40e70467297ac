//! Outage without partial fractions of the interference MGF.
//!
//! Every interference moment `E[I^i e^(-b I)]` is a derivative of the
//! interference Laplace transform, obtained from a product of positive
//! power series. The serving survival function is expanded either through
//! its own partial fractions (well separated poles) or through a series in
//! the pole gap, so near-coincident means never cause cancellation.

use crate::error::Result;
use crate::outage::analytic::Evaluation;
use crate::outage::link::Normalized;
use crate::outage::partial_fractions::{partial_fractions, Factor};
use crate::outage::special::ln_factorial;

/// Serving poles closer than this (relative to the NLoS rate) use the gap series.
const GAP_SERIES_LIMIT: f64 = 0.5;
const MAX_SERIES_TERMS: usize = 160;

/// Moments of the interference with the tilt `e^(-b I)`:
/// `E[(kappa I)^i e^(-b I)] = i! * exp(log_laplace) * coef[i]`.
struct Moments {
    log_laplace: f64,
    coef: Vec<f64>,
}

impl Moments {
    fn new(factors: &[Factor], b: f64, kappa: f64, order: usize) -> Moments {
        let mut coef = vec![0.0; order + 1];
        coef[0] = 1.0;
        let mut log_laplace = 0.0;
        let mut series = vec![0.0; order + 1];
        for f in factors {
            let r = f.shape as f64;
            log_laplace -= r * (b * f.mean).ln_1p();
            let e = kappa * f.mean / (1.0 + b * f.mean);
            series[0] = 1.0;
            for n in 1..=order {
                series[n] = series[n - 1] * (r + n as f64 - 1.0) / n as f64 * e;
            }
            for n in (1..=order).rev() {
                let mut acc = 0.0;
                for k in 0..=n {
                    acc += coef[n - k] * series[k];
                }
                coef[n] = acc;
            }
        }
        Moments { log_laplace, coef }
    }

    /// `ln E[X^k e^(-c X)]` for `X = tau + kappa I`, where the tilt on `I`
    /// was fixed to `b = c * kappa` at construction.
    fn ln_shifted(&self, k: usize, c: f64, tau: f64) -> f64 {
        let ln_tau = tau.ln();
        let ln_k = ln_factorial(k as u32);
        let logs: Vec<f64> = (0..=k)
            .filter(|&i| self.coef[i] > 0.0)
            .map(|i| (k - i) as f64 * ln_tau + ln_k - ln_factorial((k - i) as u32) + self.coef[i].ln())
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        top + sum.ln() - c * tau + self.log_laplace
    }
}

/// Outage of a normalized link by the stable moment route.
pub(crate) fn evaluate(norm: &Normalized) -> Result<Evaluation> {
    let (tau, kappa) = (norm.tau, norm.kappa);
    let gap_series = match norm.serving.as_slice() {
        [g, e] if e.shape == 1 => {
            let delta = 1.0 / g.mean - 1.0 / e.mean;
            (delta.abs() * e.mean <= GAP_SERIES_LIMIT).then_some((*g, *e, delta))
        }
        _ => None,
    };

    if let Some((g, e, delta)) = gap_series {
        let m = g.shape as usize;
        let theta = g.mean;
        let mut magnitude = 0.0;

        // E[F_G(X)] = 1 - sum_{k<m} theta^-k / k! E[X^k e^(-X/theta)]
        let mg = Moments::new(&norm.interferers, kappa / theta, kappa, m);
        let mut survival_g = 0.0;
        for k in 0..m {
            let ln_t = -(k as f64) * theta.ln() - ln_factorial(k as u32) + mg.ln_shifted(k, 1.0 / theta, tau);
            let t = ln_t.exp();
            survival_g += t;
            magnitude += t.abs();
        }

        let c = 1.0 / e.mean;
        let n_max = MAX_SERIES_TERMS;
        let me = Moments::new(&norm.interferers, kappa * c, kappa, m + n_max);
        let ln_lead = -ln_factorial(m as u32 - 1) - m as f64 * theta.ln();
        let ln_gap = delta.abs().ln();
        let mut tail = 0.0;
        for n in 0..=n_max {
            let sgn = if delta > 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
            let ln_gap_n = if n == 0 { 0.0 } else { n as f64 * ln_gap };
            let ln_t = ln_lead + ln_gap_n - ln_factorial(n as u32) - ((m + n) as f64).ln()
                + me.ln_shifted(m + n, c, tau);
            let t = sgn * ln_t.exp();
            tail += t;
            magnitude += t.abs();
            if n > 2 && t.abs() <= 1e-18 * tail.abs().max(1e-300) {
                break;
            }
        }
        return Ok(Evaluation { value: 1.0 - survival_g - tail, magnitude });
    }

    let serving = partial_fractions(&norm.serving)?;
    let max_j = serving.poles.iter().map(|p| p.multiplicity).max().unwrap_or(1) as usize;
    let mut survival = 0.0;
    let mut magnitude = 0.0;
    for (k, pole) in serving.poles.iter().enumerate() {
        let p = pole.location;
        let mom = Moments::new(&norm.interferers, p * kappa, kappa, max_j);
        // E[e^(-pX) (pX)^i / i!] for i < j
        let inner: Vec<f64> = (0..max_j)
            .map(|i| (i as f64 * p.ln() - ln_factorial(i as u32) + mom.ln_shifted(i, p, tau)).exp())
            .collect();
        for (jm1, &beta) in serving.residues[k].iter().enumerate() {
            let j = jm1 + 1;
            let sgn = if j % 2 == 0 { 1.0 } else { -1.0 };
            let partial: f64 = inner[..j].iter().sum();
            let t = beta * sgn * p.powi(-(j as i32)) * partial;
            survival += t;
            magnitude += t.abs();
        }
    }
    Ok(Evaluation { value: 1.0 - survival, magnitude })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::special::factorial;

    #[test]
    fn moments_match_single_exponential() {
        // I ~ Exp(mu): E[I^i e^(-bI)] = i! mu^i / (1 + b mu)^(i+1)
        let (mu, b, kappa) = (0.7, 0.3, 0.2);
        let m = Moments::new(&[Factor::new(mu, 1)], b, kappa, 6);
        for i in 0..=6usize {
            let got = factorial(i as u32) * m.log_laplace.exp() * m.coef[i];
            let want = factorial(i as u32) * (kappa * mu).powi(i as i32) / (1.0 + b * mu).powi(i as i32 + 1);
            assert!((got - want).abs() < 1e-14 * want, "{i}: {got} vs {want}");
        }
    }

    #[test]
    fn shifted_moment_without_interference() {
        let m = Moments::new(&[], 0.0, 0.1, 4);
        let (tau, c) = (0.4, 1.3);
        for k in 0..4 {
            let got = m.ln_shifted(k, c, tau).exp();
            let want = tau.powi(k as i32) * (-c * tau).exp();
            assert!((got - want).abs() < 1e-15);
        }
    }
}
