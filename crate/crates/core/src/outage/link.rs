//! Link descriptions fed to the outage engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outage::partial_fractions::Factor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LinkKind {
    Ue,
    Uav,
}

/// Mean SNR of one link at the current transmit power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeanSnr {
    /// Rayleigh fading with mean `mean`.
    Rayleigh { mean: f64 },
    /// Nakagami-m LoS component with mean `los` plus Rayleigh NLoS with mean `nlos`.
    Mixture { los: f64, nlos: f64 },
}

impl MeanSnr {
    pub fn total(&self) -> f64 {
        match *self {
            MeanSnr::Rayleigh { mean } => mean,
            MeanSnr::Mixture { los, nlos } => los + nlos,
        }
    }

    pub fn scaled(&self, k: f64) -> MeanSnr {
        match *self {
            MeanSnr::Rayleigh { mean } => MeanSnr::Rayleigh { mean: mean * k },
            MeanSnr::Mixture { los, nlos } => MeanSnr::Mixture { los: los * k, nlos: nlos * k },
        }
    }

    fn values(&self) -> [f64; 2] {
        match *self {
            MeanSnr::Rayleigh { mean } => [mean, 0.0],
            MeanSnr::Mixture { los, nlos } => [los, nlos],
        }
    }

    /// MGF factors of this SNR with all means divided by `scale`. Zero-mean
    /// components are dropped.
    pub(crate) fn factors(&self, m: u32, scale: f64, out: &mut Vec<Factor>) {
        match *self {
            MeanSnr::Rayleigh { mean } => {
                if mean > 0.0 {
                    out.push(Factor::new(mean / scale, 1));
                }
            }
            MeanSnr::Mixture { los, nlos } => {
                if los > 0.0 {
                    out.push(Factor::new(los / scale / m as f64, m));
                }
                if nlos > 0.0 {
                    out.push(Factor::new(nlos / scale, 1));
                }
            }
        }
    }
}

/// A served link together with the co-channel interferers it sees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkSpec {
    pub kind: LinkKind,
    pub serving: MeanSnr,
    pub interferers: Vec<MeanSnr>,
    /// Nakagami shape of LoS components.
    pub m: u32,
    pub gamma_th: f64,
}

impl LinkSpec {
    pub fn ue(serving: f64, interferers: &[f64], gamma_th: f64) -> LinkSpec {
        LinkSpec {
            kind: LinkKind::Ue,
            serving: MeanSnr::Rayleigh { mean: serving },
            interferers: interferers.iter().map(|&mean| MeanSnr::Rayleigh { mean }).collect(),
            m: 1,
            gamma_th,
        }
    }

    pub fn uav(serving: (f64, f64), interferers: &[(f64, f64)], m: u32, gamma_th: f64) -> LinkSpec {
        LinkSpec {
            kind: LinkKind::Uav,
            serving: MeanSnr::Mixture { los: serving.0, nlos: serving.1 },
            interferers: interferers.iter().map(|&(los, nlos)| MeanSnr::Mixture { los, nlos }).collect(),
            m,
            gamma_th,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma_th.is_finite() && self.gamma_th > 0.0) {
            return Err(Error::Link(format!("gamma_th must be > 0, got {}", self.gamma_th)));
        }
        if self.m == 0 {
            return Err(Error::Link("Nakagami m must be >= 1".into()));
        }
        for s in std::iter::once(&self.serving).chain(&self.interferers) {
            let kind_ok = matches!(
                (self.kind, s),
                (LinkKind::Ue, MeanSnr::Rayleigh { .. }) | (LinkKind::Uav, MeanSnr::Mixture { .. })
            );
            if !kind_ok {
                return Err(Error::Link(format!("{s:?} does not match link kind {:?}", self.kind)));
            }
            if s.values().iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Link(format!("negative or non-finite mean in {s:?}")));
            }
        }
        if self.serving.total() <= 0.0 {
            return Err(Error::Link("serving means are both zero".into()));
        }
        Ok(())
    }

    /// Normalizes by the serving mean so every analytic route works with
    /// O(1) quantities: outage = P(X <= tau + kappa * I) with E[X] = 1.
    pub(crate) fn normalized(&self) -> Normalized {
        let scale = self.serving.total();
        let mut serving = Vec::with_capacity(2);
        self.serving.factors(self.m, scale, &mut serving);
        let mut interferers = Vec::with_capacity(2 * self.interferers.len());
        for i in &self.interferers {
            i.factors(self.m, scale, &mut interferers);
        }
        Normalized { tau: self.gamma_th / scale, kappa: self.gamma_th, serving, interferers }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Normalized {
    pub tau: f64,
    pub kappa: f64,
    pub serving: Vec<Factor>,
    pub interferers: Vec<Factor>,
}
