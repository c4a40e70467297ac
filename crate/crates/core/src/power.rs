//! Per-carrier transmit power reduction.
//!
//! Every BS starts at `p_max`. Sweeping BSs in ascending id, the BS serving a
//! user on the carrier lowers its power one `p_stp` at a time while the
//! served user stays within the outage threshold and above its power floor.
//! Sweeps repeat until one changes nothing.

use serde::Serialize;

use crate::channel::SnrParams;
use crate::error::{Error, Result};
use crate::outage::{self, LinkSpec, MeanSnr};
use crate::scenario::Scenario;

/// Served user of each BS on one carrier, indexed by BS.
pub type CarrierUsers = [Option<usize>];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerVector {
    pub carrier: usize,
    pub p_w: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CarrierPower {
    pub powers: PowerVector,
    /// Sweeps run, including the final one that changed nothing.
    pub sweeps: usize,
}

fn mean_snr(p: SnrParams, power_w: f64) -> MeanSnr {
    match p.scaled(power_w) {
        SnrParams::Ue { gamma_bar } => MeanSnr::Rayleigh { mean: gamma_bar },
        SnrParams::Uav { a_gain, b_gain } => MeanSnr::Mixture { los: a_gain, nlos: b_gain },
    }
}

/// Link seen by `user` when its BS transmits `serving_w` and every other BS
/// serving someone on the carrier transmits at `powers[bs]`.
pub fn link_spec(scenario: &Scenario, served: &CarrierUsers, powers: &[f64], user: usize, serving_w: f64) -> LinkSpec {
    let cfg = &scenario.config;
    let own = scenario.serving(user);
    let links = scenario.links();
    let serving = mean_snr(links.get(user, own).snr, serving_w);
    let interferers = served
        .iter()
        .enumerate()
        .filter(|&(bs, s)| bs != own && s.is_some())
        .map(|(bs, _)| mean_snr(links.get(user, bs).snr, powers[bs]))
        .collect();
    let kind = match serving {
        MeanSnr::Rayleigh { .. } => outage::LinkKind::Ue,
        MeanSnr::Mixture { .. } => outage::LinkKind::Uav,
    };
    LinkSpec { kind, serving, interferers, m: cfg.nakagami_m, gamma_th: cfg.gamma_th }
}

fn outage_at(scenario: &Scenario, served: &CarrierUsers, powers: &[f64], user: usize, serving_w: f64) -> Result<f64> {
    let link = link_spec(scenario, served, powers, user, serving_w);
    outage::outage(&link, scenario.config.laguerre_order)
}

/// Outage of every served user at the given powers, as `(user, outage)` in BS order.
pub fn carrier_outages(scenario: &Scenario, served: &CarrierUsers, powers: &[f64]) -> Result<Vec<(usize, f64)>> {
    served
        .iter()
        .enumerate()
        .filter_map(|(bs, s)| s.map(|u| (bs, u)))
        .map(|(bs, u)| Ok((u, outage_at(scenario, served, powers, u, powers[bs])?)))
        .collect()
}

fn check_served(scenario: &Scenario, served: &CarrierUsers) -> Result<()> {
    if served.len() != scenario.n_bs() {
        return Err(Error::Precondition(format!(
            "carrier has {} BS slots, scenario has {} BSs",
            served.len(),
            scenario.n_bs()
        )));
    }
    for (bs, s) in served.iter().enumerate() {
        if let Some(u) = *s {
            if u >= scenario.users.len() || scenario.serving(u) != bs {
                return Err(Error::Precondition(format!("user {u} is not served by BS {bs}")));
            }
            if scenario.power_floor(u) > scenario.config.p_max_w {
                return Err(Error::Precondition(format!("user {u} has a power floor above p_max")));
            }
        }
    }
    Ok(())
}

/// Runs the power reduction on one carrier.
///
/// Outage is monotone in the serving power, so the longest admissible run of
/// single-step decrements is found by galloping over the step count instead
/// of testing each step; the result equals the step-by-step descent.
pub fn optimize_carrier_power(carrier: usize, served: &CarrierUsers, scenario: &Scenario) -> Result<CarrierPower> {
    check_served(scenario, served)?;
    let cfg = &scenario.config;
    let level_w = |k: usize| cfg.p_max_w - k as f64 * cfg.p_stp_w;
    let max_level = cfg.power_levels();
    let mut level = vec![0usize; served.len()];
    let mut powers = vec![cfg.p_max_w; served.len()];
    let guard = served.len() * (max_level + 1) + 1;
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        if sweeps > guard {
            return Err(Error::NonTermination { what: "power sweeps", limit: guard });
        }
        let mut changed = false;
        for bs in 0..served.len() {
            let Some(user) = served[bs] else { continue };
            let floor = scenario.power_floor(user);
            let admissible = |k: usize, powers: &[f64]| -> Result<bool> {
                if k > max_level || level_w(k) <= floor {
                    return Ok(false);
                }
                Ok(outage_at(scenario, served, powers, user, level_w(k))? <= cfg.p_out_th)
            };
            let start = level[bs];
            if !admissible(start + 1, &powers)? {
                continue;
            }
            // gallop to an inadmissible bound, then bisect
            let mut good = start + 1;
            let mut step = 1;
            let mut bad = loop {
                let probe = good + step;
                if probe > max_level {
                    break max_level + 1;
                }
                if admissible(probe, &powers)? {
                    good = probe;
                    step *= 2;
                } else {
                    break probe;
                }
            };
            while bad - good > 1 {
                let mid = good + (bad - good) / 2;
                if admissible(mid, &powers)? {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            level[bs] = good;
            powers[bs] = level_w(good);
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Ok(CarrierPower { powers: PowerVector { carrier, p_w: powers }, sweeps })
}
