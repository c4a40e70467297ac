//! Random assignment and exhaustive search.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assignment::{Assignment, ObjectiveReport};
use crate::coalition::Evaluator;
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Largest number of candidates [`brute_force_optimum`] will enumerate.
pub const SIZE_GATE: u128 = 100_000_000;

/// Each BS gives its users (ascending id) the first carriers of a uniform
/// shuffle.
pub fn random_assignment(scenario: &Scenario, seed: u64) -> Assignment {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let mut carrier_of = vec![0; scenario.users.len()];
    let mut carriers: Vec<usize> = (0..scenario.n_carriers()).collect();
    for users in scenario.users_by_bs() {
        carriers.shuffle(&mut rng);
        for (&u, &c) in users.iter().zip(&carriers) {
            carrier_of[u] = c;
        }
    }
    Assignment::new(carrier_of)
}

/// `prod_b C! / (C - n_b)!`, saturating.
pub fn candidate_count(scenario: &Scenario) -> u128 {
    let c = scenario.n_carriers() as u128;
    let mut total: u128 = 1;
    for users in scenario.users_by_bs() {
        for k in 0..users.len() as u128 {
            if k >= c {
                return 0;
            }
            total = total.saturating_mul(c - k);
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Objective {
    Mean,
    Max,
}

impl Objective {
    pub fn of(self, r: &ObjectiveReport) -> f64 {
        match self {
            Objective::Mean => r.mean_outage,
            Objective::Max => r.max_outage,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub assignment: Assignment,
    pub report: ObjectiveReport,
    pub candidates: u128,
}

/// Evaluates every per-BS injection of users into carriers, each with power
/// reduction on every carrier, and keeps the best. Ties go to the
/// lexicographically smallest assignment.
pub fn brute_force_optimum(scenario: &Scenario, objective: Objective) -> Result<Optimum> {
    let candidates = candidate_count(scenario);
    if candidates > SIZE_GATE {
        return Err(Error::SizeGate { candidates, limit: SIZE_GATE });
    }
    let by_bs = scenario.users_by_bs();
    let n_c = scenario.n_carriers();
    let per_bs: Vec<Vec<Vec<usize>>> =
        by_bs.iter().map(|users| (0..n_c).permutations(users.len()).collect()).collect();
    let mut eval = Evaluator::new(scenario);
    let mut best: Option<(f64, Assignment, ObjectiveReport)> = None;
    let mut seen: u128 = 0;
    for choice in per_bs.iter().map(|v| v.iter()).multi_cartesian_product_or_unit() {
        let mut carrier_of = vec![0; scenario.users.len()];
        for (users, carriers) in by_bs.iter().zip(&choice) {
            for (&u, &c) in users.iter().zip(carriers.iter()) {
                carrier_of[u] = c;
            }
        }
        let a = Assignment::new(carrier_of);
        let mut outages = Vec::with_capacity(scenario.users.len());
        for slots in a.all_carrier_users(scenario) {
            let o = eval.outcome(&slots)?;
            outages.extend(o.payoffs.iter().map(|&(u, p)| (u, 1.0 - p)));
        }
        let report = ObjectiveReport::from_outages(outages);
        let v = objective.of(&report);
        seen += 1;
        let better = match &best {
            None => true,
            Some((bv, ba, _)) => v < *bv || (v == *bv && a < *ba),
        };
        if better {
            best = Some((v, a, report));
        }
    }
    debug_assert_eq!(seen, candidates);
    let (_, assignment, report) = best.expect("at least one candidate");
    Ok(Optimum { assignment, report, candidates })
}

trait CartesianOrUnit: Iterator + Sized {
    /// Like `multi_cartesian_product`, but yields one empty choice for an
    /// empty product.
    fn multi_cartesian_product_or_unit<'a, T: 'a>(self) -> Box<dyn Iterator<Item = Vec<&'a T>> + 'a>
    where
        Self: Iterator<Item = std::slice::Iter<'a, T>> + 'a,
    {
        let mut parts = self.peekable();
        if parts.peek().is_none() {
            Box::new(std::iter::once(Vec::new()))
        } else {
            Box::new(parts.multi_cartesian_product())
        }
    }
}

impl<I: Iterator> CartesianOrUnit for I {}
