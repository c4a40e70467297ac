//! Sub-carrier assignments and their evaluation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::power::{carrier_outages, optimize_carrier_power, PowerVector};
use crate::scenario::Scenario;

/// Carrier of every real user, indexed by user id.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Assignment {
    pub carrier_of: Vec<usize>,
}

impl Assignment {
    pub fn new(carrier_of: Vec<usize>) -> Assignment {
        Assignment { carrier_of }
    }

    /// `W(c)` as a BS-indexed slot vector.
    pub fn carrier_users(&self, scenario: &Scenario, carrier: usize) -> Vec<Option<usize>> {
        let mut slots = vec![None; scenario.n_bs()];
        for (u, &c) in self.carrier_of.iter().enumerate() {
            if c == carrier {
                slots[scenario.serving(u)] = Some(u);
            }
        }
        slots
    }

    pub fn all_carrier_users(&self, scenario: &Scenario) -> Vec<Vec<Option<usize>>> {
        let mut out = vec![vec![None; scenario.n_bs()]; scenario.n_carriers()];
        for (u, &c) in self.carrier_of.iter().enumerate() {
            out[c][scenario.serving(u)] = Some(u);
        }
        out
    }

    /// Every user holds one carrier in range and no BS uses a carrier twice.
    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if self.carrier_of.len() != scenario.users.len() {
            return Err(Error::Precondition(format!(
                "assignment covers {} users, scenario has {}",
                self.carrier_of.len(),
                scenario.users.len()
            )));
        }
        let mut used = vec![vec![None; scenario.n_carriers()]; scenario.n_bs()];
        for (u, &c) in self.carrier_of.iter().enumerate() {
            if c >= scenario.n_carriers() {
                return Err(Error::Precondition(format!("user {u} holds carrier {c} out of range")));
            }
            let bs = scenario.serving(u);
            if let Some(other) = used[bs][c] {
                return Err(Error::Precondition(format!("BS {bs} serves users {other} and {u} on carrier {c}")));
            }
            used[bs][c] = Some(u);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveReport {
    pub max_outage: f64,
    pub mean_outage: f64,
    pub per_user: Vec<(usize, f64)>,
}

impl ObjectiveReport {
    pub fn from_outages(mut per_user: Vec<(usize, f64)>) -> ObjectiveReport {
        per_user.sort_by_key(|&(u, _)| u);
        let n = per_user.len();
        let max_outage = per_user.iter().map(|p| p.1).fold(0.0, f64::max);
        let mean_outage = if n == 0 { 0.0 } else { per_user.iter().map(|p| p.1).sum::<f64>() / n as f64 };
        ObjectiveReport { max_outage, mean_outage, per_user }
    }

    pub fn outage_of(&self, user: usize) -> Option<f64> {
        self.per_user.binary_search_by_key(&user, |p| p.0).ok().map(|i| self.per_user[i].1)
    }
}

/// Powers, outages and power-sweep counts of an assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub powers: Vec<PowerVector>,
    pub sweeps: Vec<usize>,
    pub report: ObjectiveReport,
}

impl Evaluated {
    /// Mean power-sweep count over carriers that serve at least one user.
    pub fn mean_sweeps(&self, assignment: &Assignment) -> f64 {
        let busy: Vec<usize> = (0..self.sweeps.len())
            .filter(|c| assignment.carrier_of.contains(c))
            .map(|c| self.sweeps[c])
            .collect();
        if busy.is_empty() {
            0.0
        } else {
            busy.iter().sum::<usize>() as f64 / busy.len() as f64
        }
    }
}

/// Evaluates an assignment with every BS at `p_max`.
pub fn evaluate_at_max_power(scenario: &Scenario, assignment: &Assignment) -> Result<Evaluated> {
    assignment.validate(scenario)?;
    let p = vec![scenario.config.p_max_w; scenario.n_bs()];
    let mut outages = Vec::with_capacity(assignment.carrier_of.len());
    let mut powers = Vec::with_capacity(scenario.n_carriers());
    for (c, slots) in assignment.all_carrier_users(scenario).iter().enumerate() {
        outages.extend(carrier_outages(scenario, slots, &p)?);
        powers.push(PowerVector { carrier: c, p_w: p.clone() });
    }
    Ok(Evaluated { powers, sweeps: vec![0; scenario.n_carriers()], report: ObjectiveReport::from_outages(outages) })
}

/// Runs the power reduction on every carrier and evaluates the result.
pub fn evaluate_with_power_control(scenario: &Scenario, assignment: &Assignment) -> Result<Evaluated> {
    assignment.validate(scenario)?;
    let mut outages = Vec::with_capacity(assignment.carrier_of.len());
    let mut powers = Vec::with_capacity(scenario.n_carriers());
    let mut sweeps = Vec::with_capacity(scenario.n_carriers());
    for (c, slots) in assignment.all_carrier_users(scenario).iter().enumerate() {
        let r = optimize_carrier_power(c, slots, scenario)?;
        outages.extend(carrier_outages(scenario, slots, &r.powers.p_w)?);
        powers.push(r.powers);
        sweeps.push(r.sweeps);
    }
    Ok(Evaluated { powers, sweeps, report: ObjectiveReport::from_outages(outages) })
}
