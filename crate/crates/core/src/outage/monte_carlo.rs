//! Sampling estimate of outage, used as an independent check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::outage::link::{LinkSpec, MeanSnr};

const CHUNK: u64 = 65_536;

/// Empirical outage and its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub outage: f64,
    pub std_err: f64,
    pub draws: u64,
}

struct Sampler {
    gamma: Option<Gamma<f64>>,
}

impl Sampler {
    fn new(m: u32) -> Result<Sampler> {
        let gamma = if m > 1 {
            Some(Gamma::new(m as f64, 1.0 / m as f64).map_err(|e| Error::Link(e.to_string()))?)
        } else {
            None
        };
        Ok(Sampler { gamma })
    }

    fn unit_los<R: Rng>(&self, rng: &mut R) -> f64 {
        match &self.gamma {
            Some(g) => g.sample(rng),
            None => Exp1.sample(rng),
        }
    }

    fn draw<R: Rng>(&self, s: &MeanSnr, rng: &mut R) -> f64 {
        match *s {
            MeanSnr::Rayleigh { mean } => {
                let e: f64 = Exp1.sample(rng);
                mean * e
            }
            MeanSnr::Mixture { los, nlos } => {
                let mut v = 0.0;
                if los > 0.0 {
                    v += los * self.unit_los(rng);
                }
                if nlos > 0.0 {
                    let e: f64 = Exp1.sample(rng);
                    v += nlos * e;
                }
                v
            }
        }
    }
}

/// Draws `draws` fading realizations and counts `SINR <= gamma_th`. Chunk
/// `k` uses ChaCha stream `k` of `seed`, so results do not depend on the
/// thread count.
pub fn outage_mc(link: &LinkSpec, draws: u64, seed: u64) -> Result<McEstimate> {
    link.validate()?;
    if draws == 0 {
        return Err(Error::Precondition("Monte-Carlo needs at least one draw".into()));
    }
    let sampler = Sampler::new(link.m)?;
    let chunks = draws.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let n = CHUNK.min(draws - k * CHUNK);
            let mut hits = 0u64;
            for _ in 0..n {
                let signal = sampler.draw(&link.serving, &mut rng);
                let interference: f64 = link.interferers.iter().map(|i| sampler.draw(i, &mut rng)).sum();
                if signal <= link.gamma_th * (1.0 + interference) {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let p = hits as f64 / draws as f64;
    Ok(McEstimate { outage: p, std_err: (p * (1.0 - p) / draws as f64).sqrt(), draws })
}
