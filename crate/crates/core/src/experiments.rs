//! Global game driver and seeded batch experiments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::assignment::{evaluate_at_max_power, evaluate_with_power_control, Assignment, Evaluated, ObjectiveReport};
use crate::baselines::{brute_force_optimum, random_assignment, Objective};
use crate::coalition::{audit_coalition_stability, run_coalition, Evaluator, Operation, OperationLog, Partition};
use crate::config::SimConfig;
use crate::error::Result;
use crate::matching::{
    audit_matching_stability, build_preferences, check_matching, inject_virtual_users, match_population, BlockingPair,
    Matching,
};
use crate::scenario::{fully_occupied, generate_feasible, generate_feasible_with, Scenario, UserKind};

/// Redraw budget for feasible scenarios. Full Table II load rejects around
/// 10^6 draws in the worst cases seen.
pub const MAX_ATTEMPTS: u64 = 50_000_000;

pub const GAMMA_GRID: [f64; 5] = [0.001, 0.01, 0.1, 1.0, 10.0];

pub fn device_grid() -> Vec<usize> {
    (20..=100).step_by(10).collect()
}

#[derive(Debug, Clone)]
pub struct GameOutcome {
    /// Matching of the real users.
    pub matching: Matching,
    pub blocking_pairs: Vec<BlockingPair>,
    /// Matching output after power reduction.
    pub initial: Partition,
    pub partition: Partition,
    pub log: OperationLog,
    pub unstable_ops: Vec<Operation>,
    pub report: ObjectiveReport,
    pub max_power_sweeps: usize,
}

impl GameOutcome {
    pub fn assignment(&self) -> Assignment {
        self.partition.assignment(self.matching.carrier_of.len())
    }

    pub fn audits_pass(&self) -> bool {
        self.blocking_pairs.is_empty() && self.unstable_ops.is_empty()
    }
}

/// Matching, power reduction, coalition refinement, then both stability audits.
pub fn run_global_game(scenario: &Scenario, seed: u64) -> Result<GameOutcome> {
    let pop = inject_virtual_users(scenario, seed)?;
    let prefs = build_preferences(&pop, scenario.n_carriers());
    let mut full = match_population(&prefs, scenario.n_bs(), scenario.n_carriers())?;
    full.includes_virtual = pop.n_virtual() > 0;
    check_matching(&full, &prefs, scenario.n_bs())?;
    let blocking_pairs = audit_matching_stability(&full, &prefs);
    let matching = full.without_virtual(pop.n_real);

    let mut eval = Evaluator::new(scenario);
    let initial = Partition::from_assignment(&mut eval, &matching.to_assignment())?;
    let (partition, log) = run_coalition(&mut eval, initial.clone())?;
    partition.check(scenario)?;
    let unstable_ops = audit_coalition_stability(&mut eval, &partition)?;
    let report = partition.report();
    Ok(GameOutcome {
        matching,
        blocking_pairs,
        initial,
        partition,
        log,
        unstable_ops,
        report,
        max_power_sweeps: eval.max_power_sweeps,
    })
}

/// Mean outage of UEs and of UAVs; NaN for a kind with no users.
pub fn kind_means(scenario: &Scenario, report: &ObjectiveReport) -> (f64, f64) {
    let mut acc = [(0.0, 0usize); 2];
    for &(u, p) in &report.per_user {
        let k = (scenario.users[u].kind == UserKind::Uav) as usize;
        acc[k].0 += p;
        acc[k].1 += 1;
    }
    let mean = |(s, n): (f64, usize)| if n == 0 { f64::NAN } else { s / n as f64 };
    (mean(acc[0]), mean(acc[1]))
}

/// Mean carrier index of UEs and of UAVs; NaN for a kind with no users.
pub fn mean_carrier_index(scenario: &Scenario, assignment: &Assignment) -> (f64, f64) {
    let report = ObjectiveReport::from_outages(assignment.carrier_of.iter().enumerate().map(|(u, &c)| (u, c as f64)).collect());
    kind_means(scenario, &report)
}

/// Where scenarios come from.
#[derive(Debug, Clone)]
pub enum Source {
    Generate(SimConfig),
    Fixed(Scenario),
}

impl Source {
    pub fn config(&self) -> &SimConfig {
        match self {
            Source::Generate(c) => c,
            Source::Fixed(s) => &s.config,
        }
    }

    /// Scenario for `seed` with `n_users` split evenly (UEs take the odd one).
    /// A fixed scenario is returned as is.
    pub fn scenario(&self, seed: u64, n_users: Option<usize>) -> Result<Scenario> {
        match self {
            Source::Fixed(s) => Ok(s.clone()),
            Source::Generate(c) => {
                let mut cfg = c.clone();
                if let Some(n) = n_users {
                    cfg.n_uavs = n / 2;
                    cfg.n_ues = n - n / 2;
                }
                Ok(generate_feasible(&cfg, seed, MAX_ATTEMPTS)?.0)
            }
        }
    }

    fn sizes(&self, sizes: &[usize]) -> Vec<Option<usize>> {
        match self {
            Source::Fixed(_) => vec![None],
            Source::Generate(_) => sizes.iter().map(|&n| Some(n)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub seed: u64,
    pub stage: String,
    pub message: String,
}

/// Rows of one experiment plus the seeds that failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Run<T> {
    pub rows: Vec<T>,
    pub failures: Vec<Failure>,
}

impl<T> Run<T> {
    fn collect(results: Vec<(u64, std::result::Result<Vec<T>, (String, String)>)>) -> Run<T> {
        let mut run = Run { rows: Vec::new(), failures: Vec::new() };
        for (seed, r) in results {
            match r {
                Ok(rows) => run.rows.extend(rows),
                Err((stage, message)) => run.failures.push(Failure { seed, stage, message }),
            }
        }
        run
    }
}

pub fn failures_csv(failures: &[Failure]) -> String {
    let mut s = String::from("seed,stage,message\n");
    for f in failures {
        let _ = writeln!(s, "{},{},\"{}\"", f.seed, f.stage, f.message.replace('"', "'"));
    }
    s
}

fn stage<T>(name: &str, r: Result<T>) -> std::result::Result<T, (String, String)> {
    r.map_err(|e| (name.to_string(), e.to_string()))
}

/// Runs the game and turns audit failures into a run failure.
fn audited_game(scenario: &Scenario, seed: u64) -> std::result::Result<GameOutcome, (String, String)> {
    let g = stage("game", run_global_game(scenario, seed))?;
    if !g.blocking_pairs.is_empty() {
        return Err(("matching audit".into(), format!("{} blocking pairs", g.blocking_pairs.len())));
    }
    if !g.unstable_ops.is_empty() {
        return Err(("coalition audit".into(), format!("{} applicable operations", g.unstable_ops.len())));
    }
    Ok(g)
}

fn per_seed<T: Send, F>(seeds: &[u64], f: F) -> Run<T>
where
    F: Fn(u64) -> std::result::Result<Vec<T>, (String, String)> + Sync,
{
    Run::collect(seeds.par_iter().map(|&s| (s, f(s))).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KindRow {
    /// `gamma_th` for the threshold sweep, `n_users` for the device sweep.
    pub x: f64,
    pub seed: u64,
    pub mean_outage_ue: f64,
    pub mean_outage_uav: f64,
}

pub fn kind_rows_csv(x_name: &str, rows: &[KindRow]) -> String {
    let mut s = format!("{x_name},seed,mean_outage_ue,mean_outage_uav\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{:.9},{:.9}", r.x, r.seed, r.mean_outage_ue, r.mean_outage_uav);
    }
    s
}

/// Full game at every threshold of `grid` on the same geometry.
pub fn run_gamma_sweep(source: &Source, seeds: &[u64], grid: &[f64]) -> Run<KindRow> {
    per_seed(seeds, |seed| {
        let base = stage("scenario", source.scenario(seed, None))?;
        grid.iter()
            .map(|&g| {
                let cfg = SimConfig { gamma_th: g, ..base.config.clone() };
                let s = stage("scenario", base.with_config(cfg))?;
                let out = audited_game(&s, seed)?;
                let (ue, uav) = kind_means(&s, &out.report);
                Ok(KindRow { x: g, seed, mean_outage_ue: ue, mean_outage_uav: uav })
            })
            .collect()
    })
}

pub fn run_device_sweep(source: &Source, seeds: &[u64], sizes: &[usize]) -> Run<KindRow> {
    per_seed(seeds, |seed| {
        source
            .sizes(sizes)
            .into_iter()
            .map(|n| {
                let s = stage("scenario", source.scenario(seed, n))?;
                let out = audited_game(&s, seed)?;
                let (ue, uav) = kind_means(&s, &out.report);
                Ok(KindRow { x: s.users.len() as f64, seed, mean_outage_ue: ue, mean_outage_uav: uav })
            })
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Method {
    Random,
    PowerOnly,
    Matching,
    Global,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Random, Method::PowerOnly, Method::Matching, Method::Global];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::PowerOnly => "power_only",
            Method::Matching => "matching",
            Method::Global => "global",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareRow {
    pub n_users: usize,
    pub seed: u64,
    pub method: Method,
    pub mean_outage: f64,
    pub max_outage: f64,
    pub alg1_mean_s: f64,
    pub coalition_sweeps: usize,
}

pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut s = String::from("n_users,seed,method,mean_outage,max_outage,alg1_mean_S,coalition_sweeps\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.9},{:.9},{:.4},{}",
            r.n_users,
            r.seed,
            r.method.as_str(),
            r.mean_outage,
            r.max_outage,
            r.alg1_mean_s,
            r.coalition_sweeps
        );
    }
    s
}

fn mean_busy(sweeps: &[usize], assignment: &Assignment) -> f64 {
    let e = Evaluated {
        powers: vec![],
        sweeps: sweeps.to_vec(),
        report: ObjectiveReport::from_outages(vec![]),
    };
    e.mean_sweeps(assignment)
}

/// Random assignment at full power, the same with power reduction, matching
/// with power reduction and the full game, on matched scenarios.
pub fn compare_methods(scenario: &Scenario, seed: u64) -> std::result::Result<Vec<CompareRow>, (String, String)> {
    let n = scenario.users.len();
    let random = random_assignment(scenario, seed);
    let r0 = stage("random", evaluate_at_max_power(scenario, &random))?;
    let r1 = stage("power_only", evaluate_with_power_control(scenario, &random))?;
    let g = audited_game(scenario, seed)?;
    let m_assign = g.initial.assignment(n);
    let row = |method, rep: &ObjectiveReport, s: f64, cs| CompareRow {
        n_users: n,
        seed,
        method,
        mean_outage: rep.mean_outage,
        max_outage: rep.max_outage,
        alg1_mean_s: s,
        coalition_sweeps: cs,
    };
    Ok(vec![
        row(Method::Random, &r0.report, 0.0, 0),
        row(Method::PowerOnly, &r1.report, r1.mean_sweeps(&random), 0),
        row(Method::Matching, &g.initial.report(), mean_busy(&g.initial.power_sweeps(), &m_assign), 0),
        row(Method::Global, &g.report, mean_busy(&g.partition.power_sweeps(), &g.assignment()), g.log.sweeps),
    ])
}

pub fn run_compare(source: &Source, seeds: &[u64], sizes: &[usize]) -> Run<CompareRow> {
    per_seed(seeds, |seed| {
        let mut rows = Vec::new();
        for n in source.sizes(sizes) {
            let s = stage("scenario", source.scenario(seed, n))?;
            rows.extend(compare_methods(&s, seed)?);
        }
        Ok(rows)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionRow {
    pub carrier_index: usize,
    pub n_ue: usize,
    pub n_uav: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarrierIndexRow {
    pub seed: u64,
    pub mean_index_ue: f64,
    pub mean_index_uav: f64,
}

/// Users per carrier index after the game, summed over seeds, plus the
/// per-seed mean carrier index of each kind.
pub fn run_distribution(source: &Source, seeds: &[u64]) -> (Vec<DistributionRow>, Run<CarrierIndexRow>) {
    let per = per_seed(seeds, |seed| {
        let s = stage("scenario", source.scenario(seed, None))?;
        let g = audited_game(&s, seed)?;
        let a = g.assignment();
        let mut counts = vec![(0usize, 0usize); s.n_carriers()];
        for (u, &c) in a.carrier_of.iter().enumerate() {
            match s.users[u].kind {
                UserKind::Uav => counts[c].1 += 1,
                _ => counts[c].0 += 1,
            }
        }
        let (ue, uav) = mean_carrier_index(&s, &a);
        Ok(vec![(counts, CarrierIndexRow { seed, mean_index_ue: ue, mean_index_uav: uav })])
    });
    let n_c = source.config().n_carriers;
    let mut total = vec![(0usize, 0usize); n_c];
    let mut rows = Vec::new();
    for (counts, row) in per.rows {
        for (t, c) in total.iter_mut().zip(counts) {
            t.0 += c.0;
            t.1 += c.1;
        }
        rows.push(row);
    }
    let dist = total.into_iter().enumerate().map(|(i, (a, b))| DistributionRow { carrier_index: i, n_ue: a, n_uav: b }).collect();
    (dist, Run { rows, failures: per.failures })
}

pub fn distribution_csv(rows: &[DistributionRow]) -> String {
    let mut s = String::from("carrier_index,n_ue,n_uav\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{}", r.carrier_index, r.n_ue, r.n_uav);
    }
    s
}

pub fn carrier_index_csv(rows: &[CarrierIndexRow]) -> String {
    let mut s = String::from("seed,mean_index_ue,mean_index_uav\n");
    for r in rows {
        let _ = writeln!(s, "{},{:.6},{:.6}", r.seed, r.mean_index_ue, r.mean_index_uav);
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityRow {
    pub seed: u64,
    pub game_mean: f64,
    pub optimum_mean: f64,
    pub ratio: f64,
}

pub fn optimality_csv(rows: &[OptimalityRow]) -> String {
    let mut s = String::from("seed,game_mean,optimum_mean,ratio\n");
    for r in rows {
        let _ = writeln!(s, "{},{:.12},{:.12},{:.6}", r.seed, r.game_mean, r.optimum_mean, r.ratio);
    }
    s
}

/// Small instances where every BS serves one user per carrier.
pub fn optimality_config() -> SimConfig {
    SimConfig { n_bs: 3, n_carriers: 3, n_ues: 5, n_uavs: 4, ..SimConfig::default() }
}

/// Game against exhaustive search on fully occupied instances.
pub fn run_optimality(source: &Source, seeds: &[u64]) -> Run<OptimalityRow> {
    per_seed(seeds, |seed| {
        let s = match source {
            Source::Fixed(s) => s.clone(),
            Source::Generate(cfg) => stage("scenario", generate_feasible_with(cfg, seed, MAX_ATTEMPTS, fully_occupied))?.0,
        };
        let g = audited_game(&s, seed)?;
        let opt = stage("brute force", brute_force_optimum(&s, Objective::Mean))?;
        let (a, b) = (g.report.mean_outage, opt.report.mean_outage);
        Ok(vec![OptimalityRow { seed, game_mean: a, optimum_mean: b, ratio: a / b }])
    })
}

/// One measured value of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub group: String,
    pub metric: String,
    pub seed: u64,
    pub value: f64,
}

/// A pass/fail criterion and the seeds that broke it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub failing_seeds: Vec<u64>,
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failing_seeds.is_empty() && !self.detail.starts_with("FAIL")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub aggregate_csv: String,
    pub digest: String,
}

/// Mean and sample standard deviation per `(group, metric)`, and a digest of
/// the checks.
pub fn emit_summary(samples: &[Sample], checks: &[Check]) -> Summary {
    let mut groups: BTreeMap<(&str, &str), Vec<(u64, f64)>> = BTreeMap::new();
    for s in samples {
        groups.entry((&s.group, &s.metric)).or_default().push((s.seed, s.value));
    }
    let mut csv = String::from("group,metric,n,mean,std\n");
    for ((g, m), mut v) in groups {
        // fixed summation order regardless of seed order
        v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let n = v.len() as f64;
        let mean = v.iter().map(|x| x.1).sum::<f64>() / n;
        let std = if v.len() < 2 { 0.0 } else { (v.iter().map(|x| (x.1 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() };
        let _ = writeln!(csv, "{g},{m},{},{mean:.9},{std:.9}", v.len());
    }
    let mut digest = String::new();
    for c in checks {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        let _ = write!(digest, "{verdict} {}", c.name);
        if !c.failing_seeds.is_empty() {
            let seeds: Vec<String> = c.failing_seeds.iter().map(|s| s.to_string()).collect();
            let _ = write!(digest, " (seeds {})", seeds.join(","));
        }
        if !c.detail.is_empty() {
            let _ = write!(digest, ": {}", c.detail);
        }
        digest.push('\n');
    }
    Summary { aggregate_csv: csv, digest }
}

pub fn kind_samples(group_prefix: &str, rows: &[KindRow]) -> Vec<Sample> {
    rows.iter()
        .flat_map(|r| {
            let g = format!("{group_prefix}={}", r.x);
            [("mean_outage_ue", r.mean_outage_ue), ("mean_outage_uav", r.mean_outage_uav)]
                .into_iter()
                .map(move |(m, v)| Sample { group: g.clone(), metric: m.into(), seed: r.seed, value: v })
        })
        .collect()
}

pub fn compare_samples(rows: &[CompareRow]) -> Vec<Sample> {
    rows.iter()
        .flat_map(|r| {
            let g = format!("n_users={}/{}", r.n_users, r.method.as_str());
            [
                ("mean_outage", r.mean_outage),
                ("max_outage", r.max_outage),
                ("alg1_mean_S", r.alg1_mean_s),
                ("coalition_sweeps", r.coalition_sweeps as f64),
            ]
            .into_iter()
            .map(move |(m, v)| Sample { group: g.clone(), metric: m.into(), seed: r.seed, value: v })
        })
        .collect()
}

fn means_by<K: Ord + Copy>(rows: &[KindRow], key: impl Fn(&KindRow) -> K) -> BTreeMap<K, (f64, f64)> {
    let mut acc: BTreeMap<K, (f64, f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry(key(r)).or_insert((0.0, 0.0, 0));
        e.0 += r.mean_outage_ue;
        e.1 += r.mean_outage_uav;
        e.2 += 1;
    }
    acc.into_iter().map(|(k, (a, b, n))| (k, (a / n as f64, b / n as f64))).collect()
}

/// Seed-averaged curves must not decrease along the threshold grid; UAVs
/// should be worse than UEs at 0.1 in at least 80% of seeds.
pub fn gamma_checks(rows: &[KindRow]) -> Vec<Check> {
    let curve = means_by(rows, |r| r.x.to_bits());
    let mut pts: Vec<(f64, (f64, f64))> = curve.into_iter().map(|(k, v)| (f64::from_bits(k), v)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mono = |f: fn(&(f64, f64)) -> f64| pts.windows(2).all(|w| f(&w[1].1) >= f(&w[0].1));
    let ok = mono(|p| p.0) && mono(|p| p.1);
    let at = |g: f64| rows.iter().filter(move |r| (r.x - g).abs() < 1e-12);
    let n = at(0.1).count();
    let worse: Vec<u64> = at(0.1).filter(|r| !(r.mean_outage_uav >= r.mean_outage_ue)).map(|r| r.seed).collect();
    let frac_ok = n > 0 && (n - worse.len()) * 10 >= 8 * n;
    vec![
        Check {
            name: "outage nondecreasing in gamma_th".into(),
            failing_seeds: vec![],
            detail: if ok { String::new() } else { format!("FAIL curve {pts:?}") },
        },
        Check {
            name: "UAV outage >= UE outage at gamma_th = 0.1 in >= 80% of seeds".into(),
            failing_seeds: if frac_ok { vec![] } else { worse.clone() },
            detail: format!("{}/{n} seeds", n - worse.len()),
        },
    ]
}

/// UAV outage grows faster than UE outage between the smallest and largest
/// network size.
pub fn device_checks(rows: &[KindRow]) -> Vec<Check> {
    let curve = means_by(rows, |r| r.x as usize);
    let (first, last) = match (curve.iter().next(), curve.iter().next_back()) {
        (Some(a), Some(b)) if a.0 != b.0 => (a, b),
        _ => return vec![],
    };
    let dx = (*last.0 - *first.0) as f64;
    let ue = (last.1 .0 - first.1 .0) / dx;
    let uav = (last.1 .1 - first.1 .1) / dx;
    vec![Check {
        name: "UAV outage slope exceeds UE slope".into(),
        failing_seeds: vec![],
        detail: format!("{}slope ue {ue:.3e} uav {uav:.3e}", if uav > ue { "" } else { "FAIL " }),
    }]
}

/// `global < matching < random` per seed and size in >= 80% of seeds, and the
/// seed-averaged improvement of the game over random at each size.
pub fn compare_checks(rows: &[CompareRow], min_gain_at: Option<(usize, f64)>) -> Vec<Check> {
    let mut by: BTreeMap<(usize, u64), [f64; 4]> = BTreeMap::new();
    for r in rows {
        by.entry((r.n_users, r.seed)).or_insert([f64::NAN; 4])[r.method as usize] = r.mean_outage;
    }
    let mut sizes: BTreeMap<usize, (Vec<u64>, usize, f64, f64)> = BTreeMap::new();
    for (&(n, seed), v) in &by {
        let e = sizes.entry(n).or_insert((vec![], 0, 0.0, 0.0));
        e.1 += 1;
        e.2 += v[Method::Random as usize];
        e.3 += v[Method::Global as usize];
        if !(v[Method::Global as usize] < v[Method::Matching as usize] && v[Method::Matching as usize] < v[Method::Random as usize]) {
            e.0.push(seed);
        }
    }
    let mut checks = Vec::new();
    for (n, (bad, count, random, global)) in sizes {
        let ok = (count - bad.len()) * 10 >= 8 * count;
        let gain = (random - global) / random;
        checks.push(Check {
            name: format!("global < matching < random at {n} users in >= 80% of seeds"),
            failing_seeds: if ok { vec![] } else { bad.clone() },
            detail: format!("{}/{count} seeds, improvement over random {:.1}%", count - bad.len(), 100.0 * gain),
        });
        if let Some((at, min)) = min_gain_at {
            if at == n {
                checks.push(Check {
                    name: format!("improvement over random >= {:.0}% at {n} users", 100.0 * min),
                    failing_seeds: vec![],
                    detail: format!("{}{:.1}%", if gain >= min { "" } else { "FAIL " }, 100.0 * gain),
                });
            }
        }
    }
    checks
}

pub fn distribution_checks(rows: &[CarrierIndexRow]) -> Vec<Check> {
    vec![Check {
        name: "mean UE carrier index below mean UAV carrier index".into(),
        failing_seeds: rows.iter().filter(|r| !(r.mean_index_ue < r.mean_index_uav)).map(|r| r.seed).collect(),
        detail: format!("{} seeds", rows.len()),
    }]
}

pub fn optimality_checks(rows: &[OptimalityRow], max_gap: f64) -> Vec<Check> {
    let bad: Vec<u64> = rows.iter().filter(|r| !(r.ratio >= 1.0 && r.ratio - 1.0 <= max_gap)).map(|r| r.seed).collect();
    let worst = rows.iter().map(|r| r.ratio).fold(f64::NAN, f64::max);
    vec![Check {
        name: format!("game within {:.0}% of the optimum and never below it", 100.0 * max_gap),
        failing_seeds: bad,
        detail: format!("worst ratio {worst:.4}"),
    }]
}

pub fn failure_check(failures: &[Failure]) -> Check {
    Check {
        name: "all seeds completed with clean audits".into(),
        failing_seeds: failures.iter().map(|f| f.seed).collect(),
        detail: failures.iter().map(|f| format!("{}: {}", f.stage, f.message)).collect::<Vec<_>>().join("; "),
    }
}
