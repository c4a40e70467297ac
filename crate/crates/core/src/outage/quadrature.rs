//! Gauss-Laguerre quadrature for `integral_0^inf e^(-x) f(x) dx`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 128;

/// Nodes (zeros of the n-th Laguerre polynomial) and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Computes the n-point rule by Newton iteration on the three-term
/// recurrence, seeded with the usual asymptotic root estimates.
pub fn laguerre_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::LaguerreOrder(n));
    }
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut z = 0.0f64;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2])
            }
        };
        let mut converged = false;
        let mut polish = 0;
        let (mut p2, mut pp) = (0.0, 0.0);
        for _ in 0..100 {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = (nf * p1 - nf * p2) / z;
            if converged {
                // p2 and pp now belong to the final node
                polish += 1;
                if polish == 2 {
                    break;
                }
            }
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 3e-14 * z.abs().max(1.0) {
                converged = true;
            }
        }
        if !converged {
            return Err(Error::Quadrature { order: n, doubled: n, delta: f64::NAN });
        }
        nodes.push(z);
        weights.push(-1.0 / (pp * nf * p2));
    }
    // rounding in the recurrence leaves ~1e-11 relative error on the largest
    // weights at high order; the zeroth moment is known exactly
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    Ok(QuadratureRule { order: n, nodes, weights })
}

static RULES: [OnceLock<QuadratureRule>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];

/// Process-wide cached rule of order `n`.
pub fn cached_rule(n: usize) -> Result<&'static QuadratureRule> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::LaguerreOrder(n));
    }
    if let Some(r) = RULES[n].get() {
        return Ok(r);
    }
    let rule = laguerre_rule(n)?;
    Ok(RULES[n].get_or_init(|| rule))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outage::special::ln_factorial;

    #[test]
    fn first_orders_closed_form() {
        let r1 = laguerre_rule(1).unwrap();
        assert!((r1.nodes[0] - 1.0).abs() < 1e-14 && (r1.weights[0] - 1.0).abs() < 1e-14);
        let r2 = laguerre_rule(2).unwrap();
        let s = 2f64.sqrt();
        assert!((r2.nodes[0] - (2.0 - s)).abs() < 1e-14);
        assert!((r2.nodes[1] - (2.0 + s)).abs() < 1e-14);
        assert!((r2.weights[0] - (2.0 + s) / 4.0).abs() < 1e-14);
        assert!((r2.weights[1] - (2.0 - s) / 4.0).abs() < 1e-14);
        assert!((r2.integrate(|x| x.powi(3)) - 6.0).abs() < 1e-13);
    }

    #[test]
    fn weights_sum_to_one_and_nodes_increase() {
        for n in 1..=MAX_ORDER {
            let r = laguerre_rule(n).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "n={n} sum={s}");
            assert!(r.nodes[0] > 0.0);
            assert!(r.nodes.windows(2).all(|w| w[1] > w[0]), "n={n}");
        }
    }

    #[test]
    fn polynomial_exactness() {
        // integral of e^-x x^k / k! is 1 for every k
        for n in [1usize, 2, 3, 5, 8, 16, 32, 64, 128] {
            let r = laguerre_rule(n).unwrap();
            for k in 0..(2 * n as u32) {
                let q = r.integrate(|x| {
                    if x == 0.0 {
                        return if k == 0 { 1.0 } else { 0.0 };
                    }
                    (k as f64 * x.ln() - ln_factorial(k)).exp()
                });
                assert!((q - 1.0).abs() < 1e-10, "n={n} k={k} q={q}");
            }
        }
    }

    #[test]
    fn order_out_of_range() {
        assert!(laguerre_rule(0).is_err());
        assert!(laguerre_rule(129).is_err());
        assert!(cached_rule(32).is_ok());
    }
}
