//! Partial-fraction expansion of products of gamma-type MGF factors.
//!
//! A factor with mean `mu` and integer shape `r` contributes `(1 - x mu)^-r`,
//! a pole of order `r` at `x = 1/mu`. The product is rewritten as
//! `sum_k sum_{j=1..r_k} c_kj / (x - p_k)^j`.

use crate::error::{Error, Result};

/// Relative separation under which two poles are treated as one.
pub const MERGE_REL_TOL: f64 = 1e-6;

/// `(1 - x * mean)^-shape`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub mean: f64,
    pub shape: u32,
}

impl Factor {
    pub fn new(mean: f64, shape: u32) -> Factor {
        Factor { mean, shape }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: f64,
    pub multiplicity: u32,
}

/// Residues `residues[k][j - 1]` multiply `1 / (x - poles[k].location)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleExpansion {
    pub poles: Vec<Pole>,
    pub residues: Vec<Vec<f64>>,
}

impl PoleExpansion {
    /// `(location, order, residue)` for every term.
    pub fn terms(&self) -> impl Iterator<Item = (f64, u32, f64)> + '_ {
        self.poles.iter().zip(&self.residues).flat_map(|(p, rs)| {
            rs.iter().enumerate().map(move |(j, &c)| (p.location, j as u32 + 1, c))
        })
    }

    /// Residue-sum form evaluated at `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.terms().map(|(p, j, c)| c / (x - p).powi(j as i32)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }
}

/// Product form evaluated at `x`.
pub fn product_form(factors: &[Factor], x: f64) -> f64 {
    factors.iter().map(|f| (1.0 - x * f.mean).powi(-(f.shape as i32))).product()
}

/// Groups factors into distinct poles, merging near-coincident locations
/// into one pole of summed order at the order-weighted mean location.
pub fn group_poles(factors: &[Factor]) -> Result<Vec<Pole>> {
    let mut raw: Vec<Pole> = Vec::with_capacity(factors.len());
    for f in factors {
        if !(f.mean.is_finite() && f.mean > 0.0) || f.shape == 0 {
            return Err(Error::Link(format!("factor mean {} / shape {} not usable", f.mean, f.shape)));
        }
        raw.push(Pole { location: 1.0 / f.mean, multiplicity: f.shape });
    }
    raw.sort_by(|a, b| a.location.total_cmp(&b.location));
    let mut out: Vec<Pole> = Vec::with_capacity(raw.len());
    for p in raw {
        if let Some(last) = out.last_mut() {
            if (p.location - last.location).abs() <= MERGE_REL_TOL * last.location.abs().max(p.location.abs()) {
                let m = last.multiplicity + p.multiplicity;
                last.location = (last.location * last.multiplicity as f64 + p.location * p.multiplicity as f64) / m as f64;
                last.multiplicity = m;
                continue;
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Expands `prod_i (1 - x mean_i)^-shape_i` into partial fractions.
pub fn partial_fractions(factors: &[Factor]) -> Result<PoleExpansion> {
    let poles = group_poles(factors)?;
    partial_fractions_of_poles(&poles)
}

/// Expansion of `prod_k (1 - x / p_k)^-r_k` for already distinct poles.
pub fn partial_fractions_of_poles(poles: &[Pole]) -> Result<PoleExpansion> {
    for (i, a) in poles.iter().enumerate() {
        for b in &poles[i + 1..] {
            if a.location == b.location {
                return Err(Error::PoleCollision { first: a.location, second: b.location });
            }
        }
    }
    let mut residues = Vec::with_capacity(poles.len());
    let max_order = poles.iter().map(|p| p.multiplicity as usize).max().unwrap_or(0);
    let mut series = vec![0.0; max_order];
    let mut next = vec![0.0; max_order];
    let mut coeffs = vec![0.0; max_order];
    for (k, pk) in poles.iter().enumerate() {
        let order = pk.multiplicity as usize;
        // Taylor series in h = x - p_k of (x - p_k)^r_k * F(x)
        let series = &mut series[..order];
        series.fill(0.0);
        series[0] = if pk.multiplicity % 2 == 0 { 1.0 } else { -1.0 } * pk.location.powi(pk.multiplicity as i32);
        for (l, pl) in poles.iter().enumerate() {
            if l == k {
                continue;
            }
            let d = pl.location - pk.location;
            let scale = (pl.location / d).powi(pl.multiplicity as i32);
            if order == 1 {
                series[0] *= scale;
                continue;
            }
            // (1 - h/d)^-r = sum_n C(r+n-1, n) (h/d)^n
            let r = pl.multiplicity as f64;
            coeffs[0] = scale;
            for n in 1..order {
                coeffs[n] = coeffs[n - 1] * (r + n as f64 - 1.0) / (n as f64 * d);
            }
            let next = &mut next[..order];
            next.fill(0.0);
            for (i, &s) in series.iter().enumerate() {
                for (n, &c) in coeffs[..order - i].iter().enumerate() {
                    next[i + n] += s * c;
                }
            }
            series.copy_from_slice(next);
        }
        // c_kj is the coefficient of h^(r_k - j)
        let res: Vec<f64> = (1..=order).map(|j| series[order - j]).collect();
        if res.iter().any(|c| !c.is_finite()) {
            let other = poles.get(if k == 0 { 1 } else { k - 1 }).map_or(f64::NAN, |p| p.location);
            return Err(Error::PoleCollision { first: pk.location, second: other });
        }
        residues.push(res);
    }
    Ok(PoleExpansion { poles: poles.to_vec(), residues })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn single_simple_pole() {
        let e = partial_fractions(&[Factor::new(4.0, 1)]).unwrap();
        assert_eq!(e.poles.len(), 1);
        assert!((e.residues[0][0] + 0.25).abs() < 1e-15);
        assert!((e.poles[0].location - 0.25).abs() < 1e-15);
    }

    #[test]
    fn two_simple_poles() {
        let e = partial_fractions(&[Factor::new(1.0, 1), Factor::new(2.0, 1)]).unwrap();
        // pole at 1/2 (mean 2) sorts first
        assert!((e.poles[0].location - 0.5).abs() < 1e-15);
        assert!((e.residues[0][0] + 1.0).abs() < 1e-14);
        assert!((e.residues[1][0] - 1.0).abs() < 1e-14);
        assert!((e.eval(0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_at_random_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.random_range(1..6);
            let factors: Vec<Factor> = (0..n)
                .map(|_| Factor::new(10f64.powf(rng.random_range(-1.5..1.5)), rng.random_range(1..4)))
                .collect();
            let e = partial_fractions(&factors).unwrap();
            for _ in 0..8 {
                let x = -10f64.powf(rng.random_range(-2.0..1.0));
                let want = product_form(&factors, x);
                let got = e.eval(x);
                let scale: f64 = e.terms().map(|(p, j, c)| (c / (x - p).powi(j as i32)).abs()).sum();
                assert!((got - want).abs() <= 1e-9 * want.abs().max(1e-12) + 1e-14 * scale, "{factors:?} x={x}");
            }
        }
    }

    #[test]
    fn repeated_pole_matches_binomial_identity() {
        // (1 - x)^-2 = 1 / (x - 1)^2
        let e = partial_fractions(&[Factor::new(1.0, 2)]).unwrap();
        assert!(e.residues[0][0].abs() < 1e-15);
        assert!((e.residues[0][1] - 1.0).abs() < 1e-15);
        // (1-x)^-1 (1-x)^-1 merges into the same pole
        let m = partial_fractions(&[Factor::new(1.0, 1), Factor::new(1.0, 1)]).unwrap();
        assert_eq!(m.poles.len(), 1);
        assert_eq!(m.residues, e.residues);
    }

    #[test]
    fn near_coincident_poles_merge() {
        let f = [Factor::new(2.0, 1), Factor::new(2.0 * (1.0 + 1e-8), 1), Factor::new(0.3, 2)];
        let e = partial_fractions(&f).unwrap();
        assert_eq!(e.poles.len(), 2);
        for x in [-0.1, -1.0, -7.0] {
            assert!(rel(e.eval(x), product_form(&f, x)) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_means() {
        assert!(partial_fractions(&[Factor::new(0.0, 1)]).is_err());
        assert!(partial_fractions(&[Factor::new(f64::INFINITY, 1)]).is_err());
        assert!(partial_fractions_of_poles(&[
            Pole { location: 1.0, multiplicity: 1 },
            Pole { location: 1.0, multiplicity: 1 }
        ])
        .is_err());
    }
}
