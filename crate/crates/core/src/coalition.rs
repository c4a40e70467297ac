//! Coalition refinement of a sub-carrier partition.
//!
//! Each carrier's users form a coalition whose benefit is the sum of member
//! payoffs `1 - outage`. Pairs of coalitions are swept together with every
//! BS: a BS with a user in both tries an exchange of the two users, a BS with
//! a user in one tries a transfer. Power reduction is rerun on the two
//! touched carriers for every candidate. Sweeps repeat until one applies
//! nothing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::assignment::{Assignment, ObjectiveReport};
use crate::error::{Error, Result};
use crate::power::{carrier_outages, optimize_carrier_power, PowerVector};
use crate::scenario::Scenario;

/// Strict-improvement margin for accepting an operation.
pub const EPS_ACCEPT: f64 = 1e-9;
/// Slack for "payoff did not decrease" comparisons.
pub const EPS_NUM: f64 = 1e-12;
pub const SWEEP_GUARD: usize = 10_000;

/// Power-reduced state of one carrier's user set.
#[derive(Debug, Clone, PartialEq)]
pub struct CarrierOutcome {
    pub p_w: Vec<f64>,
    /// `(user, payoff)` in BS order.
    pub payoffs: Vec<(usize, f64)>,
    pub power_sweeps: usize,
}

impl CarrierOutcome {
    pub fn benefit(&self) -> f64 {
        self.payoffs.iter().map(|p| p.1).sum()
    }

    pub fn payoff(&self, user: usize) -> Option<f64> {
        self.payoffs.iter().find(|p| p.0 == user).map(|p| p.1)
    }
}

/// Runs (and memoizes) power reduction per user set. Carriers are
/// physically identical, so the result depends only on who is on the carrier.
pub struct Evaluator<'a> {
    scenario: &'a Scenario,
    cache: HashMap<Vec<Option<usize>>, Arc<CarrierOutcome>>,
    pub hits: usize,
    pub misses: usize,
    /// Largest power-reduction sweep count seen.
    pub max_power_sweeps: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(scenario: &'a Scenario) -> Evaluator<'a> {
        Evaluator { scenario, cache: HashMap::new(), hits: 0, misses: 0, max_power_sweeps: 0 }
    }

    pub fn scenario(&self) -> &'a Scenario {
        self.scenario
    }

    pub fn outcome(&mut self, slots: &[Option<usize>]) -> Result<Arc<CarrierOutcome>> {
        if let Some(hit) = self.cache.get(slots) {
            self.hits += 1;
            return Ok(Arc::clone(hit));
        }
        self.misses += 1;
        let r = optimize_carrier_power(0, slots, self.scenario)?;
        self.max_power_sweeps = self.max_power_sweeps.max(r.sweeps);
        let payoffs = carrier_outages(self.scenario, slots, &r.powers.p_w)?
            .into_iter()
            .map(|(u, p)| (u, 1.0 - p))
            .collect();
        let out = Arc::new(CarrierOutcome { p_w: r.powers.p_w, payoffs, power_sweeps: r.sweeps });
        self.cache.insert(slots.to_vec(), Arc::clone(&out));
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Coalition {
    /// Member of each BS, indexed by BS.
    pub slots: Vec<Option<usize>>,
    pub outcome: Arc<CarrierOutcome>,
}

impl Coalition {
    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.slots.iter().flatten().copied()
    }
}

/// One coalition per carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub coalitions: Vec<Coalition>,
}

impl Partition {
    pub fn from_assignment(eval: &mut Evaluator, assignment: &Assignment) -> Result<Partition> {
        let scenario = eval.scenario();
        assignment.validate(scenario)?;
        let coalitions = assignment
            .all_carrier_users(scenario)
            .into_iter()
            .map(|slots| Ok(Coalition { outcome: eval.outcome(&slots)?, slots }))
            .collect::<Result<_>>()?;
        Ok(Partition { coalitions })
    }

    pub fn total_benefit(&self) -> f64 {
        self.coalitions.iter().map(|c| c.outcome.benefit()).sum()
    }

    pub fn assignment(&self, n_users: usize) -> Assignment {
        let mut carrier_of = vec![usize::MAX; n_users];
        for (c, co) in self.coalitions.iter().enumerate() {
            for u in co.members() {
                carrier_of[u] = c;
            }
        }
        Assignment::new(carrier_of)
    }

    pub fn powers(&self) -> Vec<PowerVector> {
        self.coalitions
            .iter()
            .enumerate()
            .map(|(c, co)| PowerVector { carrier: c, p_w: co.outcome.p_w.clone() })
            .collect()
    }

    pub fn power_sweeps(&self) -> Vec<usize> {
        self.coalitions.iter().map(|c| c.outcome.power_sweeps).collect()
    }

    pub fn report(&self) -> ObjectiveReport {
        let per_user = self.coalitions.iter().flat_map(|c| c.outcome.payoffs.iter().map(|&(u, p)| (u, 1.0 - p))).collect();
        ObjectiveReport::from_outages(per_user)
    }

    /// Disjointness, coverage, slot consistency and payoff cache coverage.
    pub fn check(&self, scenario: &Scenario) -> Result<()> {
        if self.coalitions.len() != scenario.n_carriers() {
            return Err(Error::Precondition("one coalition per carrier expected".into()));
        }
        let mut seen = vec![false; scenario.users.len()];
        for (c, co) in self.coalitions.iter().enumerate() {
            for (bs, slot) in co.slots.iter().enumerate() {
                let Some(u) = *slot else { continue };
                if scenario.serving(u) != bs {
                    return Err(Error::Precondition(format!("user {u} sits in BS {bs}'s slot on carrier {c}")));
                }
                if std::mem::replace(&mut seen[u], true) {
                    return Err(Error::Precondition(format!("user {u} is in two coalitions")));
                }
                if co.outcome.payoff(u).is_none() {
                    return Err(Error::Precondition(format!("no payoff cached for user {u}")));
                }
            }
        }
        if let Some(u) = seen.iter().position(|s| !s) {
            return Err(Error::Precondition(format!("user {u} is in no coalition")));
        }
        Ok(())
    }
}

/// `w(S_c)`.
pub fn coalition_benefit(partition: &Partition, c: usize) -> f64 {
    partition.coalitions[c].outcome.benefit()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Operation {
    Transfer { user: usize, from: usize, to: usize },
    Exchange { v1: usize, c1: usize, v2: usize, c2: usize },
}

/// An accepted operation with the two resulting coalitions.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub op: Operation,
    pub first: Coalition,
    pub second: Coalition,
    /// Change of the two-coalition benefit.
    pub delta: f64,
}

fn slot_of(partition: &Partition, scenario: &Scenario, user: usize, c: usize) -> Result<usize> {
    let bs = scenario.serving(user);
    if partition.coalitions.get(c).and_then(|co| co.slots[bs]) != Some(user) {
        return Err(Error::Precondition(format!("user {user} is not in coalition {c}")));
    }
    Ok(bs)
}

/// Moves `v1` from `c1` to `c2` if the two coalitions together gain more
/// than [`EPS_ACCEPT`]. Errors when `v1` is not in `c1` or its BS already has
/// a user in `c2`.
pub fn evaluate_transfer(eval: &mut Evaluator, partition: &Partition, v1: usize, c1: usize, c2: usize) -> Result<Option<Candidate>> {
    let scenario = eval.scenario();
    let bs = slot_of(partition, scenario, v1, c1)?;
    if c1 == c2 || c2 >= partition.coalitions.len() {
        return Err(Error::Precondition(format!("bad target coalition {c2}")));
    }
    if let Some(other) = partition.coalitions[c2].slots[bs] {
        return Err(Error::Precondition(format!("BS {bs} already serves user {other} in coalition {c2}")));
    }
    let mut s1 = partition.coalitions[c1].slots.clone();
    let mut s2 = partition.coalitions[c2].slots.clone();
    s1[bs] = None;
    s2[bs] = Some(v1);
    let o1 = eval.outcome(&s1)?;
    let o2 = eval.outcome(&s2)?;
    let before = coalition_benefit(partition, c1) + coalition_benefit(partition, c2);
    let delta = o1.benefit() + o2.benefit() - before;
    if delta > EPS_ACCEPT {
        Ok(Some(Candidate {
            op: Operation::Transfer { user: v1, from: c1, to: c2 },
            first: Coalition { slots: s1, outcome: o1 },
            second: Coalition { slots: s2, outcome: o2 },
            delta,
        }))
    } else {
        Ok(None)
    }
}

/// Swaps `v1` (in `c1`) with `v2` (in `c2`), both of the same BS, if nobody
/// in either coalition loses more than [`EPS_NUM`] and somebody gains more
/// than [`EPS_ACCEPT`].
pub fn evaluate_exchange(
    eval: &mut Evaluator,
    partition: &Partition,
    v1: usize,
    c1: usize,
    v2: usize,
    c2: usize,
) -> Result<Option<Candidate>> {
    let scenario = eval.scenario();
    let bs = slot_of(partition, scenario, v1, c1)?;
    if slot_of(partition, scenario, v2, c2)? != bs || c1 == c2 {
        return Err(Error::Precondition(format!("users {v1} and {v2} are not served by one BS on two carriers")));
    }
    let mut s1 = partition.coalitions[c1].slots.clone();
    let mut s2 = partition.coalitions[c2].slots.clone();
    s1[bs] = Some(v2);
    s2[bs] = Some(v1);
    let o1 = eval.outcome(&s1)?;
    let o2 = eval.outcome(&s2)?;
    let old1 = &partition.coalitions[c1].outcome;
    let old2 = &partition.coalitions[c2].outcome;
    let before = |u: usize| old1.payoff(u).or_else(|| old2.payoff(u)).expect("member payoff");
    let mut gain = false;
    for &(u, after) in o1.payoffs.iter().chain(&o2.payoffs) {
        let diff = after - before(u);
        if diff < -EPS_NUM {
            return Ok(None);
        }
        gain |= diff > EPS_ACCEPT;
    }
    if !gain {
        return Ok(None);
    }
    let delta = o1.benefit() + o2.benefit() - old1.benefit() - old2.benefit();
    Ok(Some(Candidate {
        op: Operation::Exchange { v1, c1, v2, c2 },
        first: Coalition { slots: s1, outcome: o1 },
        second: Coalition { slots: s2, outcome: o2 },
        delta,
    }))
}

fn apply(partition: &mut Partition, cand: Candidate) {
    let (c1, c2) = match cand.op {
        Operation::Transfer { from, to, .. } => (from, to),
        Operation::Exchange { c1, c2, .. } => (c1, c2),
    };
    partition.coalitions[c1] = cand.first;
    partition.coalitions[c2] = cand.second;
}

/// The candidate for one (c1, c2, BS) triple, if the BS has a user in either.
fn candidate_at(eval: &mut Evaluator, partition: &Partition, c1: usize, c2: usize, bs: usize) -> Result<Option<Candidate>> {
    match (partition.coalitions[c1].slots[bs], partition.coalitions[c2].slots[bs]) {
        (Some(v1), Some(v2)) => evaluate_exchange(eval, partition, v1, c1, v2, c2),
        (Some(v1), None) => evaluate_transfer(eval, partition, v1, c1, c2),
        (None, Some(v2)) => evaluate_transfer(eval, partition, v2, c2, c1),
        (None, None) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OpRecord {
    pub step: usize,
    pub sweep: usize,
    pub op: Operation,
    pub sum_w_before: f64,
    pub sum_w_after: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OperationLog {
    pub records: Vec<OpRecord>,
    /// Sweeps run, including the final one that applied nothing.
    pub sweeps: usize,
}

impl OperationLog {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,type,user_ids,from,to,sum_w_before,sum_w_after\n");
        for r in &self.records {
            let (kind, users, from, to) = match r.op {
                Operation::Transfer { user, from, to } => ("transfer", user.to_string(), from, to),
                Operation::Exchange { v1, c1, v2, c2 } => ("exchange", format!("{v1};{v2}"), c1, c2),
            };
            let _ = writeln!(s, "{},{},{},{},{},{:.12},{:.12}", r.step, kind, users, from, to, r.sum_w_before, r.sum_w_after);
        }
        s
    }
}

/// Sweeps coalition pairs in ascending `(c1, c2, bs)` order, applying every
/// accepted operation at once, until a sweep applies nothing.
pub fn run_coalition(eval: &mut Evaluator, initial: Partition) -> Result<(Partition, OperationLog)> {
    let mut partition = initial;
    let mut log = OperationLog::default();
    let n_c = partition.coalitions.len();
    let n_bs = eval.scenario().n_bs();
    loop {
        log.sweeps += 1;
        if log.sweeps > SWEEP_GUARD {
            return Err(Error::NonTermination { what: "coalition sweeps", limit: SWEEP_GUARD });
        }
        let mut applied = false;
        for c1 in 0..n_c {
            for c2 in c1 + 1..n_c {
                for bs in 0..n_bs {
                    if let Some(cand) = candidate_at(eval, &partition, c1, c2, bs)? {
                        let before = partition.total_benefit();
                        let op = cand.op;
                        apply(&mut partition, cand);
                        log.records.push(OpRecord {
                            step: log.records.len(),
                            sweep: log.sweeps,
                            op,
                            sum_w_before: before,
                            sum_w_after: partition.total_benefit(),
                        });
                        applied = true;
                    }
                }
            }
        }
        if !applied {
            return Ok((partition, log));
        }
    }
}

/// Every transfer or exchange that would still be accepted.
pub fn audit_coalition_stability(eval: &mut Evaluator, partition: &Partition) -> Result<Vec<Operation>> {
    let n_c = partition.coalitions.len();
    let mut out = Vec::new();
    for c1 in 0..n_c {
        for c2 in c1 + 1..n_c {
            for bs in 0..eval.scenario().n_bs() {
                if let Some(c) = candidate_at(eval, partition, c1, c2, bs)? {
                    out.push(c.op);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimConfig;
    use crate::scenario::{BaseStation, User, UserKind};

    fn scenario(carriers: usize, bss: &[(f64, f64)], users: &[(UserKind, f64, f64, f64)]) -> Scenario {
        let cfg = SimConfig { n_bs: bss.len(), n_carriers: carriers, ..SimConfig::default() };
        let b = bss.iter().enumerate().map(|(i, &(x, y))| BaseStation::new(i, x, y)).collect();
        let u = users.iter().enumerate().map(|(i, &(k, x, y, h))| User::new(i, k, x, y, h)).collect();
        Scenario::new(cfg, b, u).unwrap()
    }

    #[test]
    fn benefit_arithmetic() {
        let o = CarrierOutcome { p_w: vec![], payoffs: vec![], power_sweeps: 1 };
        assert_eq!(o.benefit(), 0.0);
        let o = CarrierOutcome { p_w: vec![], payoffs: vec![(3, 1.0 - 0.1)], power_sweeps: 1 };
        assert!((o.benefit() - 0.9).abs() < 1e-15);
        let a = CarrierOutcome { p_w: vec![], payoffs: vec![(1, 0.25), (2, 0.5), (3, 0.125)], power_sweeps: 1 };
        let b = CarrierOutcome { p_w: vec![], payoffs: vec![(3, 0.125), (1, 0.25), (2, 0.5)], power_sweeps: 1 };
        assert_eq!(a.benefit(), b.benefit());
    }

    /// Two BSs 300 m apart, both cell-edge users start on carrier 0.
    fn crowded() -> (Scenario, Assignment) {
        let s = scenario(
            2,
            &[(0.0, 0.0), (300.0, 0.0)],
            &[(UserKind::Ue, 140.0, 0.0, 0.0), (UserKind::Ue, 160.0, 0.0, 0.0)],
        );
        (s, Assignment::new(vec![0, 0]))
    }

    #[test]
    fn transfer_away_from_interferer_accepted() {
        let (s, a) = crowded();
        let mut eval = Evaluator::new(&s);
        let p = Partition::from_assignment(&mut eval, &a).unwrap();
        let before = p.total_benefit();
        let cand = evaluate_transfer(&mut eval, &p, 1, 0, 1).unwrap().expect("accepted");
        assert!(cand.delta > 0.0);
        let mut q = p.clone();
        apply(&mut q, cand.clone());
        assert!((q.total_benefit() - before - cand.delta).abs() < 1e-12);
        q.check(&s).unwrap();
    }

    #[test]
    fn transfer_precondition() {
        let s = scenario(2, &[(0.0, 0.0)], &[(UserKind::Ue, 10.0, 0.0, 0.0), (UserKind::Ue, 20.0, 0.0, 0.0)]);
        let mut eval = Evaluator::new(&s);
        let p = Partition::from_assignment(&mut eval, &Assignment::new(vec![0, 1])).unwrap();
        assert!(matches!(evaluate_transfer(&mut eval, &p, 0, 0, 1), Err(Error::Precondition(_))));
        assert!(matches!(evaluate_transfer(&mut eval, &p, 0, 1, 0), Err(Error::Precondition(_))));
        // identical twins: swapping changes nothing
        assert!(evaluate_exchange(&mut eval, &p, 0, 0, 1, 1).unwrap().is_none());
    }

    #[test]
    fn run_reaches_stable_partition() {
        let (s, a) = crowded();
        let mut eval = Evaluator::new(&s);
        let p = Partition::from_assignment(&mut eval, &a).unwrap();
        let start = p.report().mean_outage;
        let (q, log) = run_coalition(&mut eval, p).unwrap();
        assert_eq!(log.records.len(), 1);
        assert!(log.records.iter().all(|r| r.sum_w_after > r.sum_w_before + EPS_ACCEPT));
        assert!(audit_coalition_stability(&mut eval, &q).unwrap().is_empty());
        assert!(q.report().mean_outage <= start);
        assert!(log.to_csv().lines().nth(1).unwrap().starts_with("0,transfer,"));
        // stable input: nothing happens
        let (r, log2) = run_coalition(&mut eval, q.clone()).unwrap();
        assert_eq!(r, q);
        assert!(log2.records.is_empty());
        assert_eq!(log2.sweeps, 1);
    }

    #[test]
    fn beneficial_transfer_is_audited() {
        let (s, a) = crowded();
        let mut eval = Evaluator::new(&s);
        let p = Partition::from_assignment(&mut eval, &a).unwrap();
        let ops = audit_coalition_stability(&mut eval, &p).unwrap();
        assert!(ops.contains(&Operation::Transfer { user: 0, from: 0, to: 1 }));
    }

    #[test]
    fn single_coalition_is_stable() {
        let s = scenario(1, &[(0.0, 0.0), (300.0, 0.0)], &[(UserKind::Ue, 10.0, 0.0, 0.0)]);
        let mut eval = Evaluator::new(&s);
        let p = Partition::from_assignment(&mut eval, &Assignment::new(vec![0])).unwrap();
        assert!(audit_coalition_stability(&mut eval, &p).unwrap().is_empty());
    }

    #[test]
    fn memo_reuses_user_sets() {
        let (s, a) = crowded();
        let mut eval = Evaluator::new(&s);
        let p = Partition::from_assignment(&mut eval, &a).unwrap();
        let misses = eval.misses;
        let _ = audit_coalition_stability(&mut eval, &p).unwrap();
        let _ = audit_coalition_stability(&mut eval, &p).unwrap();
        assert!(eval.hits > 0);
        assert!(eval.misses <= misses + 4);
    }
}
