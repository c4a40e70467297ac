//! Many-to-one matching of users to sub-carriers.
//!
//! UEs rank carriers from the lowest index up, UAVs from the highest down.
//! A carrier holds at most one user per BS and prefers the user with the
//! smaller power floor. BSs with fewer users than carriers are padded with
//! virtual users so the two ends of the spectrum do not leave holes in the
//! middle; virtual users are dropped from the result.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::assignment::Assignment;
use crate::error::{Error, Result};
use crate::scenario::{Scenario, UserKind};

/// 99th percentile of the standard half-normal law.
const HALF_NORMAL_Q99: f64 = 2.575_829_303_548_901;

/// End of the carrier range a user prefers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Low,
    High,
}

/// Real users followed by virtual padding users. Ids are positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Population {
    pub n_real: usize,
    pub kind: Vec<UserKind>,
    pub side: Vec<Side>,
    pub bs: Vec<usize>,
    pub floor_w: Vec<f64>,
}

impl Population {
    pub fn real(scenario: &Scenario) -> Population {
        let mut p = Population { n_real: 0, kind: vec![], side: vec![], bs: vec![], floor_w: vec![] };
        for u in &scenario.users {
            p.push(u.kind, if u.kind == UserKind::Uav { Side::High } else { Side::Low }, u.serving_bs, scenario.power_floor(u.id));
        }
        p.n_real = p.len();
        p
    }

    fn push(&mut self, kind: UserKind, side: Side, bs: usize, floor_w: f64) {
        self.kind.push(kind);
        self.side.push(side);
        self.bs.push(bs);
        self.floor_w.push(floor_w);
    }

    pub fn len(&self) -> usize {
        self.kind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kind.is_empty()
    }

    pub fn n_virtual(&self) -> usize {
        self.len() - self.n_real
    }
}

/// Pads every BS to exactly `n_carriers` users. The `k`-th virtual user of a
/// BS prefers the low end when `k` is even. Floors are drawn from a
/// half-normal law starting at the smallest real floor, scaled so that its
/// 99th percentile is `p_max`, and clamped to `p_max`.
pub fn inject_virtual_users(scenario: &Scenario, seed: u64) -> Result<Population> {
    let mut pop = Population::real(scenario);
    let c = scenario.n_carriers();
    let p_max = scenario.config.p_max_w;
    let anchor = pop.floor_w.iter().cloned().fold(f64::INFINITY, f64::min);
    let anchor = if anchor.is_finite() { anchor.min(p_max) } else { 0.0 };
    let sigma = (p_max - anchor) / HALF_NORMAL_Q99;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    for (bs, users) in scenario.users_by_bs().iter().enumerate() {
        if users.len() > c {
            return Err(Error::Oversubscribed { bs, users: users.len(), carriers: c });
        }
        for k in 0..c - users.len() {
            let z: f64 = StandardNormal.sample(&mut rng);
            let floor = (anchor + sigma * z.abs()).min(p_max);
            let side = if k % 2 == 0 { Side::Low } else { Side::High };
            pop.push(UserKind::Virtual, side, bs, floor);
        }
    }
    Ok(pop)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreferenceProfile {
    /// Carriers from most to least preferred, per user.
    pub user_order: Vec<Vec<usize>>,
    pub floor_w: Vec<f64>,
    pub bs: Vec<usize>,
}

impl PreferenceProfile {
    /// Whether any carrier strictly prefers `a` to `b` (same BS assumed).
    pub fn carrier_prefers(&self, a: usize, b: usize) -> bool {
        (self.floor_w[a], a) < (self.floor_w[b], b)
    }

    /// Rank of carrier `c` in `user`'s list, lower is better.
    pub fn rank(&self, user: usize, c: usize) -> usize {
        self.user_order[user].iter().position(|&x| x == c).expect("carrier in preference list")
    }
}

pub fn build_preferences(pop: &Population, n_carriers: usize) -> PreferenceProfile {
    let user_order = pop
        .side
        .iter()
        .map(|s| match s {
            Side::Low => (0..n_carriers).collect(),
            Side::High => (0..n_carriers).rev().collect(),
        })
        .collect();
    PreferenceProfile { user_order, floor_w: pop.floor_w.clone(), bs: pop.bs.clone() }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Matching {
    /// `W(c)`: users on each carrier, ascending id.
    pub w_of: Vec<Vec<usize>>,
    /// Carrier of each user id covered by the matching.
    pub carrier_of: Vec<usize>,
    pub includes_virtual: bool,
    pub rounds: usize,
}

impl Matching {
    fn from_carrier_of(carrier_of: Vec<usize>, n_carriers: usize, includes_virtual: bool, rounds: usize) -> Matching {
        let mut w_of = vec![Vec::new(); n_carriers];
        for (u, &c) in carrier_of.iter().enumerate() {
            w_of[c].push(u);
        }
        Matching { w_of, carrier_of, includes_virtual, rounds }
    }

    /// Drops virtual users, keeping ids `0..n_real`.
    pub fn without_virtual(&self, n_real: usize) -> Matching {
        let c = self.w_of.len();
        Matching::from_carrier_of(self.carrier_of[..n_real].to_vec(), c, false, self.rounds)
    }

    pub fn to_assignment(&self) -> Assignment {
        Assignment::new(self.carrier_of.clone())
    }
}

/// Deferred acceptance with all free users proposing in the same round.
pub fn match_population(prefs: &PreferenceProfile, n_bs: usize, n_carriers: usize) -> Result<Matching> {
    let n = prefs.user_order.len();
    let mut next = vec![0usize; n];
    let mut holder: Vec<Vec<Option<usize>>> = vec![vec![None; n_bs]; n_carriers];
    let mut free: Vec<usize> = (0..n).collect();
    let guard = n * n_carriers + 1;
    let mut rounds = 0;
    while !free.is_empty() {
        rounds += 1;
        if rounds > guard {
            return Err(Error::NonTermination { what: "matching rounds", limit: guard });
        }
        let mut rejected = Vec::new();
        for &v in &free {
            if next[v] >= n_carriers {
                return Err(Error::Precondition(format!("user {v} was rejected by every carrier")));
            }
            let c = prefs.user_order[v][next[v]];
            next[v] += 1;
            let slot = &mut holder[c][prefs.bs[v]];
            match *slot {
                Some(h) if prefs.carrier_prefers(h, v) => rejected.push(v),
                Some(h) => {
                    rejected.push(h);
                    *slot = Some(v);
                }
                None => *slot = Some(v),
            }
        }
        rejected.sort_unstable();
        free = rejected;
    }
    let mut carrier_of = vec![usize::MAX; n];
    for (c, row) in holder.iter().enumerate() {
        for v in row.iter().flatten() {
            carrier_of[*v] = c;
        }
    }
    Ok(Matching::from_carrier_of(carrier_of, n_carriers, false, rounds))
}

/// Pads, matches and strips the virtual users.
pub fn run_matching(scenario: &Scenario, seed: u64) -> Result<Matching> {
    let pop = inject_virtual_users(scenario, seed)?;
    let prefs = build_preferences(&pop, scenario.n_carriers());
    let mut full = match_population(&prefs, scenario.n_bs(), scenario.n_carriers())?;
    full.includes_virtual = pop.n_virtual() > 0;
    Ok(full.without_virtual(pop.n_real))
}

/// `(bs, v1, v2, c1, c2)`: `v1` holds `c1`, `v2` holds `c2`, both on `bs`,
/// `v1` prefers `c2` and `c2` prefers `v1` over `v2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockingPair {
    pub bs: usize,
    pub v1: usize,
    pub v2: usize,
    pub c1: usize,
    pub c2: usize,
}

pub fn audit_matching_stability(matching: &Matching, prefs: &PreferenceProfile) -> Vec<BlockingPair> {
    let mut out = Vec::new();
    let n = matching.carrier_of.len();
    for v1 in 0..n {
        let c1 = matching.carrier_of[v1];
        for v2 in 0..n {
            if v1 == v2 || prefs.bs[v1] != prefs.bs[v2] {
                continue;
            }
            let c2 = matching.carrier_of[v2];
            if prefs.rank(v1, c2) < prefs.rank(v1, c1) && prefs.carrier_prefers(v1, v2) {
                out.push(BlockingPair { bs: prefs.bs[v1], v1, v2, c1, c2 });
            }
        }
    }
    out
}

/// Structural checks: every user holds a carrier in range, at most one user
/// per BS per carrier, at most `n_bs` users per carrier.
pub fn check_matching(matching: &Matching, prefs: &PreferenceProfile, n_bs: usize) -> Result<()> {
    let n_carriers = matching.w_of.len();
    for (v, &c) in matching.carrier_of.iter().enumerate() {
        if c >= n_carriers {
            return Err(Error::Precondition(format!("user {v} has no carrier")));
        }
    }
    for (c, users) in matching.w_of.iter().enumerate() {
        if users.len() > n_bs {
            return Err(Error::Precondition(format!("carrier {c} holds {} users for {n_bs} BSs", users.len())));
        }
        let mut seen = vec![false; n_bs];
        for &v in users {
            if matching.carrier_of[v] != c {
                return Err(Error::Precondition(format!("user {v} listed on carrier {c} inconsistently")));
            }
            let bs = prefs.bs[v];
            if std::mem::replace(&mut seen[bs], true) {
                return Err(Error::Precondition(format!("BS {bs} has two users on carrier {c}")));
            }
        }
    }
    Ok(())
}

pub fn matching_csv(matching: &Matching, scenario: &Scenario) -> String {
    let mut s = String::from("user,kind,bs,carrier\n");
    for (v, &c) in matching.carrier_of.iter().enumerate().take(scenario.users.len()) {
        let u = &scenario.users[v];
        s.push_str(&format!("{},{},{},{}\n", v, u.kind.as_str(), u.serving_bs, c));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SimConfig;
    use crate::scenario::{generate_feasible, BaseStation, User};

    fn one_bs(users: &[(UserKind, f64)], carriers: usize) -> Scenario {
        let cfg = SimConfig { n_bs: 1, n_carriers: carriers, ..SimConfig::default() };
        let u = users
            .iter()
            .enumerate()
            .map(|(i, &(k, d))| User::new(i, k, d, 0.0, if k == UserKind::Uav { 100.0 } else { 0.0 }))
            .collect();
        Scenario::new(cfg, vec![BaseStation::new(0, 0.0, 0.0)], u).unwrap()
    }

    #[test]
    fn preference_directions() {
        let s = one_bs(&[(UserKind::Ue, 50.0), (UserKind::Uav, 60.0)], 4);
        let p = build_preferences(&Population::real(&s), 4);
        assert_eq!(p.user_order[0][0], 0);
        assert_eq!(p.user_order[1][0], 3);
    }

    #[test]
    fn carrier_prefers_smaller_floor() {
        let s = one_bs(&[(UserKind::Ue, 300.0), (UserKind::Ue, 50.0)], 2);
        let p = build_preferences(&Population::real(&s), 2);
        assert!(s.power_floor(1) < s.power_floor(0));
        assert!(p.carrier_prefers(1, 0));
        assert!(!p.carrier_prefers(0, 1));
    }

    #[test]
    fn padding_counts() {
        let s = one_bs(&[(UserKind::Ue, 50.0)], 4);
        let pop = inject_virtual_users(&s, 1).unwrap();
        assert_eq!(pop.n_virtual(), 3);
        let full = one_bs(&[(UserKind::Ue, 50.0), (UserKind::Ue, 60.0)], 2);
        assert_eq!(inject_virtual_users(&full, 1).unwrap().n_virtual(), 0);
        let empty = one_bs(&[], 4);
        let pop = inject_virtual_users(&empty, 1).unwrap();
        assert_eq!(pop.n_virtual(), 4);
        assert_eq!(pop.side, vec![Side::Low, Side::High, Side::Low, Side::High]);
    }

    #[test]
    fn virtual_floors_within_bounds() {
        let s = one_bs(&[(UserKind::Ue, 50.0)], 10_001);
        let pop = inject_virtual_users(&s, 5).unwrap();
        let lo = s.power_floor(0);
        let v = &pop.floor_w[1..];
        assert_eq!(v.len(), 10_000);
        assert!(v.iter().all(|&f| f >= lo && f <= 20.0));
        // about 1% of draws reach the clamp
        let clamped = v.iter().filter(|&&f| f == 20.0).count();
        assert!((50..=150).contains(&clamped), "{clamped}");
    }

    #[test]
    fn single_bs_ues_fill_low_carriers_by_floor() {
        let s = one_bs(&[(UserKind::Ue, 300.0), (UserKind::Ue, 50.0), (UserKind::Ue, 150.0)], 5);
        let m = run_matching(&s, 0).unwrap();
        let mut by_floor: Vec<usize> = (0..3).collect();
        by_floor.sort_by(|&a, &b| s.power_floor(a).total_cmp(&s.power_floor(b)));
        for (rank, &u) in by_floor.iter().enumerate() {
            assert_eq!(m.carrier_of[u], rank);
        }
    }

    #[test]
    fn ue_and_uav_take_opposite_ends() {
        let s = one_bs(&[(UserKind::Ue, 80.0), (UserKind::Uav, 80.0)], 2);
        let m = run_matching(&s, 0).unwrap();
        assert_eq!(m.carrier_of, vec![0, 1]);
    }

    #[test]
    fn random_scenarios_are_stable() {
        let cfg = SimConfig { n_bs: 4, n_carriers: 6, n_ues: 8, n_uavs: 8, ..SimConfig::default() };
        for seed in 0..20 {
            let (s, _) = generate_feasible(&cfg, seed, 100_000).unwrap();
            let pop = inject_virtual_users(&s, seed).unwrap();
            let prefs = build_preferences(&pop, s.n_carriers());
            let full = match_population(&prefs, s.n_bs(), s.n_carriers()).unwrap();
            assert!(audit_matching_stability(&full, &prefs).is_empty());
            check_matching(&full, &prefs, s.n_bs()).unwrap();
            let real = full.without_virtual(pop.n_real);
            let real_prefs = build_preferences(&Population::real(&s), s.n_carriers());
            assert!(audit_matching_stability(&real, &real_prefs).is_empty());
            real.to_assignment().validate(&s).unwrap();
            assert_eq!(run_matching(&s, seed).unwrap(), real);
        }
    }

    #[test]
    fn injected_swap_is_reported() {
        let s = one_bs(&[(UserKind::Ue, 50.0), (UserKind::Ue, 300.0)], 2);
        let prefs = build_preferences(&Population::real(&s), 2);
        // the low-floor user is pushed to carrier 1
        let bad = Matching::from_carrier_of(vec![1, 0], 2, false, 0);
        let blocking = audit_matching_stability(&bad, &prefs);
        assert_eq!(blocking, vec![BlockingPair { bs: 0, v1: 0, v2: 1, c1: 1, c2: 0 }]);
    }

    #[test]
    fn single_user_is_stable() {
        let s = one_bs(&[(UserKind::Uav, 50.0)], 3);
        let prefs = build_preferences(&Population::real(&s), 3);
        let m = run_matching(&s, 2).unwrap();
        assert!(audit_matching_stability(&m, &prefs).is_empty());
        assert_eq!(m.carrier_of, vec![2]);
    }
}
