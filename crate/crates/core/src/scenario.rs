//! Network scenarios: BS and user placement, association and file I/O.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{check_altitude, power_floor, LinkTable, BS_HEIGHT_M};
use crate::config::SimConfig;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseStation {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub height_m: f64,
}

impl BaseStation {
    pub fn new(id: usize, x: f64, y: f64) -> BaseStation {
        BaseStation { id, x, y, height_m: BS_HEIGHT_M }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum UserKind {
    Ue,
    Uav,
    Virtual,
}

impl UserKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            UserKind::Ue => "UE",
            UserKind::Uav => "UAV",
            UserKind::Virtual => "VIRTUAL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct User {
    pub id: usize,
    pub kind: UserKind,
    pub x: f64,
    pub y: f64,
    pub altitude_m: f64,
    pub serving_bs: usize,
    /// Only set for virtual users, which carry nothing but a floor and a BS.
    pub virtual_power_floor_w: Option<f64>,
}

impl User {
    pub fn new(id: usize, kind: UserKind, x: f64, y: f64, altitude_m: f64) -> User {
        User { id, kind, x, y, altitude_m, serving_bs: 0, virtual_power_floor_w: None }
    }
}

/// Immutable world state. `links` is derived from the geometry and config.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SimConfig,
    pub bss: Vec<BaseStation>,
    pub users: Vec<User>,
    links: LinkTable,
}

impl Scenario {
    /// Builds a scenario from placed BSs and users, associating every user
    /// and checking the per-BS quota.
    pub fn new(config: SimConfig, bss: Vec<BaseStation>, mut users: Vec<User>) -> Result<Scenario> {
        config.validate()?;
        for (i, b) in bss.iter().enumerate() {
            if b.id != i {
                return Err(Error::Parse(format!("BS ids must be dense; position {i} has id {}", b.id)));
            }
        }
        for (i, u) in users.iter().enumerate() {
            if u.id != i {
                return Err(Error::Parse(format!("user ids must be dense; position {i} has id {}", u.id)));
            }
            match u.kind {
                UserKind::Ue if u.altitude_m != 0.0 => {
                    return Err(Error::Parse(format!("UE {} must have altitude_m = 0", u.id)))
                }
                UserKind::Virtual => {
                    return Err(Error::Parse(format!("user {} is VIRTUAL; only UE/UAV allowed", u.id)))
                }
                _ => {}
            }
        }
        let links = LinkTable::build(&bss, &users, &config)?;
        let serving = associate_with(&links, bss.len());
        for (u, s) in users.iter_mut().zip(&serving) {
            u.serving_bs = *s;
        }
        let scenario = Scenario { config, bss, users, links };
        scenario.check_quota()?;
        Ok(scenario)
    }

    fn check_quota(&self) -> Result<()> {
        for (bs, users) in self.users_by_bs().iter().enumerate() {
            if users.len() > self.config.n_carriers {
                return Err(Error::Oversubscribed {
                    bs,
                    users: users.len(),
                    carriers: self.config.n_carriers,
                });
            }
        }
        Ok(())
    }

    pub fn links(&self) -> &LinkTable {
        &self.links
    }

    pub fn n_bs(&self) -> usize {
        self.bss.len()
    }

    pub fn n_carriers(&self) -> usize {
        self.config.n_carriers
    }

    pub fn serving(&self, user: usize) -> usize {
        self.users[user].serving_bs
    }

    /// Lemma-style power floor of a user towards its serving BS.
    pub fn power_floor(&self, user: usize) -> f64 {
        self.links.get(user, self.serving(user)).power_floor_w
    }

    /// `V(u)`: users served by each BS, in ascending id order.
    pub fn users_by_bs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.bss.len()];
        for u in &self.users {
            out[u.serving_bs].push(u.id);
        }
        out
    }

    /// Returns a copy with a different configuration (e.g. another threshold).
    /// Geometry is kept; links and association are recomputed.
    pub fn with_config(&self, config: SimConfig) -> Result<Scenario> {
        Scenario::new(config, self.bss.clone(), self.users.clone())
    }

    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile {
            config: self.config.clone(),
            bss: self.bss.clone(),
            users: self
                .users
                .iter()
                .map(|u| UserRecord { id: u.id, kind: u.kind, x: u.x, y: u.y, altitude_m: u.altitude_m })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes")
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.into_scenario()
    }
}

/// On-disk scenario document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub config: SimConfig,
    pub bss: Vec<BaseStation>,
    pub users: Vec<UserRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserRecord {
    pub id: usize,
    pub kind: UserKind,
    pub x: f64,
    pub y: f64,
    pub altitude_m: f64,
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let users = self
            .users
            .into_iter()
            .map(|r| User::new(r.id, r.kind, r.x, r.y, r.altitude_m))
            .collect();
        Scenario::new(self.config, self.bss, users)
    }
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<()> {
    std::fs::write(path, scenario.to_json())?;
    Ok(())
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_json(&text)
}

/// Serves each user from the BS with the smallest power floor; ties go to the
/// lowest BS id.
pub fn associate_users(bss: &[BaseStation], users: &[User], config: &SimConfig) -> Result<Vec<usize>> {
    let links = LinkTable::build(bss, users, config)?;
    Ok(associate_with(&links, bss.len()))
}

fn associate_with(links: &LinkTable, n_bs: usize) -> Vec<usize> {
    (0..links.n_users())
        .map(|u| {
            let mut best = 0;
            for b in 1..n_bs {
                if links.get(u, b).power_floor_w < links.get(u, best).power_floor_w {
                    best = b;
                }
            }
            best
        })
        .collect()
}

/// Places BSs and users uniformly at random. UEs come first, then UAVs.
pub fn generate_scenario(config: &SimConfig, seed: u64) -> Result<Scenario> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (config.area_width_m, config.area_height_m);
    let bss: Vec<BaseStation> = (0..config.n_bs)
        .map(|id| BaseStation {
            id,
            x: rng.random_range(0.0..w),
            y: rng.random_range(0.0..h),
            height_m: BS_HEIGHT_M,
        })
        .collect();
    let mut users = Vec::with_capacity(config.n_ues + config.n_uavs);
    for id in 0..config.n_ues {
        users.push(User::new(id, UserKind::Ue, rng.random_range(0.0..w), rng.random_range(0.0..h), 0.0));
    }
    for k in 0..config.n_uavs {
        let x = rng.random_range(0.0..w);
        let y = rng.random_range(0.0..h);
        let alt = rng.random_range(config.uav_alt_min_m..=config.uav_alt_max_m);
        check_altitude(alt)?;
        users.push(User::new(config.n_ues + k, UserKind::Uav, x, y, alt));
    }
    check_load(&bss, &users, config)?;
    Scenario::new(config.clone(), bss, users)
}

/// Association load check without building link tables; most random draws
/// at full load fail here, so it keeps redraw loops cheap.
///
/// The power floor grows with ground distance for both user kinds (NLoS loss
/// exceeds LoS loss wherever the LoS probability drops below one), so the
/// serving BS is the nearest one. Near ties and the 1 m clamp zone fall back
/// to comparing floors.
fn check_load(bss: &[BaseStation], users: &[User], config: &SimConfig) -> Result<()> {
    let mut load = vec![0usize; bss.len()];
    for u in users {
        let mut d = [(f64::INFINITY, 0usize); 2];
        for b in bss {
            let r2 = (b.x - u.x).powi(2) + (b.y - u.y).powi(2);
            if r2 < d[0].0 {
                d[1] = d[0];
                d[0] = (r2, b.id);
            } else if r2 < d[1].0 {
                d[1] = (r2, b.id);
            }
        }
        let best = if d[0].0 < 1.0 || d[1].0 - d[0].0 <= 1e-6 * d[0].0 {
            let mut best = (f64::INFINITY, 0);
            for b in bss {
                let f = power_floor(b, u, config)?;
                if f < best.0 {
                    best = (f, b.id);
                }
            }
            best.1
        } else {
            d[0].1
        };
        load[best] += 1;
    }
    match load.iter().enumerate().find(|(_, &n)| n > config.n_carriers) {
        Some((bs, &users)) => Err(Error::Oversubscribed { bs, users, carriers: config.n_carriers }),
        None => Ok(()),
    }
}

/// Seed of the `attempt`-th redraw. Attempt 0 is the caller's seed.
pub fn attempt_seed(seed: u64, attempt: u64) -> u64 {
    if attempt == 0 {
        return seed;
    }
    // splitmix64 finalizer over (seed, attempt)
    let mut z = seed ^ attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Redraws until a scenario is feasible and satisfies `accept`. Returns the
/// scenario and the number of rejected draws.
pub fn generate_feasible_with<F>(
    config: &SimConfig,
    seed: u64,
    max_attempts: u64,
    accept: F,
) -> Result<(Scenario, u64)>
where
    F: Fn(&Scenario) -> bool,
{
    let mut last_err = None;
    for attempt in 0..max_attempts {
        match generate_scenario(config, attempt_seed(seed, attempt)) {
            Ok(s) if accept(&s) => return Ok((s, attempt)),
            Ok(_) => {}
            Err(e @ Error::Oversubscribed { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap_or(Error::NonTermination { what: "feasible scenario search", limit: max_attempts as usize }))
}

pub fn generate_feasible(config: &SimConfig, seed: u64, max_attempts: u64) -> Result<(Scenario, u64)> {
    generate_feasible_with(config, seed, max_attempts, |_| true)
}

/// Every BS serves exactly `n_carriers` users.
pub fn fully_occupied(s: &Scenario) -> bool {
    s.users_by_bs().iter().all(|v| v.len() == s.n_carriers())
}
