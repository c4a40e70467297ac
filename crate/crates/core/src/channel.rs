//! Path loss, LoS probability, mean SNRs and minimum serving powers.
//!
//! Ground UEs use the 3GPP macro path loss with Rayleigh fading. Aerial UEs
//! follow the TR 36.777 UMa-AV LoS/NLoS model: the LoS component is
//! Nakagami-m faded, the NLoS component Rayleigh faded, and the two are
//! weighted by the LoS probability.

use serde::Serialize;

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::scenario::{BaseStation, User, UserKind};

/// Validity band of the aerial path-loss model, in meters.
pub const UAV_ALT_BAND_M: (f64, f64) = (22.5, 300.0);

/// Antenna height used for every BS.
pub const BS_HEIGHT_M: f64 = 25.0;

const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LosCondition {
    Los,
    Nlos,
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Ground UE path loss in dB for a ground-plane distance in meters.
pub fn pathloss_ue(d2d_m: f64) -> f64 {
    15.3 + 37.6 * d2d_m.max(MIN_DISTANCE_M).log10()
}

/// Aerial path loss in dB.
pub fn pathloss_uav(d3d_m: f64, h_uav_m: f64, f_c_ghz: f64, condition: LosCondition) -> Result<f64> {
    check_altitude(h_uav_m)?;
    let d = d3d_m.max(MIN_DISTANCE_M).log10();
    Ok(match condition {
        LosCondition::Los => 28.0 + 22.0 * d + 20.0 * f_c_ghz.log10(),
        LosCondition::Nlos => {
            -17.5
                + (46.0 - 7.0 * h_uav_m.log10()) * d
                + 20.0 * (40.0 * std::f64::consts::PI * f_c_ghz / 3.0).log10()
        }
    })
}

pub(crate) fn check_altitude(h: f64) -> Result<()> {
    // small slack so values produced by uniform sampling at the band edges pass
    if !(h >= UAV_ALT_BAND_M.0 - 1e-9 && h <= UAV_ALT_BAND_M.1 + 1e-9) {
        return Err(Error::AltitudeOutOfBand { altitude_m: h });
    }
    Ok(())
}

/// Probability that the aerial link is in line of sight.
pub fn los_probability(d2d_m: f64, h_uav_m: f64) -> f64 {
    if h_uav_m > 100.0 {
        return 1.0;
    }
    let lh = h_uav_m.log10();
    let p1 = 4300.0 * lh - 3800.0;
    let d1 = (460.0 * lh - 700.0).max(18.0);
    let d = d2d_m.max(MIN_DISTANCE_M);
    if d <= d1 {
        1.0
    } else {
        d1 / d + (-d / p1).exp() * (1.0 - d1 / d)
    }
}

/// Mean received SNR of a Rayleigh ground link.
pub fn mean_snr_ue(p_w: f64, pl_db: f64, n0_w: f64) -> f64 {
    p_w * db_to_linear(-pl_db) / n0_w
}

/// Mean SNRs `(A, B)` of the LoS and NLoS components of an aerial link.
pub fn mean_snr_uav(p_w: f64, pl_los_db: f64, pl_nlos_db: f64, p_los: f64, n0_w: f64) -> (f64, f64) {
    let a = p_los * p_w * db_to_linear(-pl_los_db) / n0_w;
    let b = (1.0 - p_los) * p_w * db_to_linear(-pl_nlos_db) / n0_w;
    (a, b)
}

/// Per-watt mean SNR of a link. Multiplying by the transmit power gives the
/// mean SNR; for aerial links the two factors give `A` and `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SnrParams {
    Ue { gamma_bar: f64 },
    Uav { a_gain: f64, b_gain: f64 },
}

impl SnrParams {
    pub fn total_gain(&self) -> f64 {
        match *self {
            SnrParams::Ue { gamma_bar } => gamma_bar,
            SnrParams::Uav { a_gain, b_gain } => a_gain + b_gain,
        }
    }

    pub fn scaled(&self, p_w: f64) -> SnrParams {
        match *self {
            SnrParams::Ue { gamma_bar } => SnrParams::Ue { gamma_bar: gamma_bar * p_w },
            SnrParams::Uav { a_gain, b_gain } => SnrParams::Uav {
                a_gain: a_gain * p_w,
                b_gain: b_gain * p_w,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PathLoss {
    Ue { pl_db: f64 },
    Uav { pl_los_db: f64, pl_nlos_db: f64 },
}

/// Geometry and propagation terms for one BS/user pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkBudget {
    pub bs: usize,
    pub user: usize,
    pub d2d_m: f64,
    pub d3d_m: f64,
    pub path_loss: PathLoss,
    pub p_los: f64,
    pub snr: SnrParams,
    pub power_floor_w: f64,
}

fn floor_from(path_loss: &PathLoss, p_los: f64, snr_th: f64, n0_w: f64) -> f64 {
    let gain = match *path_loss {
        PathLoss::Ue { pl_db } => db_to_linear(-pl_db),
        PathLoss::Uav { pl_los_db, pl_nlos_db } => {
            p_los * db_to_linear(-pl_los_db) + (1.0 - p_los) * db_to_linear(-pl_nlos_db)
        }
    };
    snr_th * n0_w / gain
}

/// Minimum serving power below which the user cannot decode even without
/// interference.
pub fn min_power(link: &LinkBudget, snr_th: f64, n0_w: f64) -> f64 {
    floor_from(&link.path_loss, link.p_los, snr_th, n0_w)
}

/// `(d2d, d3d, path loss, p_los)` of a BS/user pair.
fn propagation(bs: &BaseStation, user: &User, config: &SimConfig) -> Result<(f64, f64, PathLoss, f64)> {
    let d2d = ((bs.x - user.x).powi(2) + (bs.y - user.y).powi(2)).sqrt();
    match user.kind {
        UserKind::Ue => Ok((d2d, d2d, PathLoss::Ue { pl_db: pathloss_ue(d2d) }, 0.0)),
        UserKind::Uav => {
            let h = user.altitude_m;
            let d3d = (d2d * d2d + (h - bs.height_m).powi(2)).sqrt();
            let pl_los_db = pathloss_uav(d3d, h, config.f_c_ghz, LosCondition::Los)?;
            let pl_nlos_db = pathloss_uav(d3d, h, config.f_c_ghz, LosCondition::Nlos)?;
            Ok((d2d, d3d, PathLoss::Uav { pl_los_db, pl_nlos_db }, los_probability(d2d, h)))
        }
        UserKind::Virtual => Err(Error::Precondition(format!("virtual user {} has no geometry", user.id))),
    }
}

/// Power floor of a pair without building the full budget; bit-identical to
/// `link_budget(..).power_floor_w`.
pub fn power_floor(bs: &BaseStation, user: &User, config: &SimConfig) -> Result<f64> {
    let (_, _, path_loss, p_los) = propagation(bs, user, config)?;
    Ok(floor_from(&path_loss, p_los, config.snr_th, config.n0_w))
}

/// Builds the link budget between a BS and a (non-virtual) user.
pub fn link_budget(bs: &BaseStation, user: &User, config: &SimConfig) -> Result<LinkBudget> {
    let (d2d, d3d, path_loss, p_los) = propagation(bs, user, config)?;
    let snr = match path_loss {
        PathLoss::Ue { pl_db } => SnrParams::Ue { gamma_bar: mean_snr_ue(1.0, pl_db, config.n0_w) },
        PathLoss::Uav { pl_los_db, pl_nlos_db } => {
            let (a, b) = mean_snr_uav(1.0, pl_los_db, pl_nlos_db, p_los, config.n0_w);
            SnrParams::Uav { a_gain: a, b_gain: b }
        }
    };
    let power_floor_w = floor_from(&path_loss, p_los, config.snr_th, config.n0_w);
    Ok(LinkBudget { bs: bs.id, user: user.id, d2d_m: d2d, d3d_m: d3d, path_loss, p_los, snr, power_floor_w })
}

/// Link budgets for every (user, BS) pair, indexed `[user][bs]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTable {
    links: Vec<Vec<LinkBudget>>,
}

impl LinkTable {
    pub fn build(bss: &[BaseStation], users: &[User], config: &SimConfig) -> Result<LinkTable> {
        let links = users
            .iter()
            .map(|u| bss.iter().map(|b| link_budget(b, u, config)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        Ok(LinkTable { links })
    }

    pub fn get(&self, user: usize, bs: usize) -> &LinkBudget {
        &self.links[user][bs]
    }

    pub fn user_links(&self, user: usize) -> &[LinkBudget] {
        &self.links[user]
    }

    pub fn n_users(&self) -> usize {
        self.links.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LinkBudget> {
        self.links.iter().flatten()
    }

    /// CSV dump: `bs,user,d2d,d3d,pl_terms,p_los,power_floor_w`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bs,user,d2d,d3d,pl_terms,p_los,power_floor_w\n");
        for l in self.iter() {
            let pl = match l.path_loss {
                PathLoss::Ue { pl_db } => format!("{pl_db:.6}"),
                PathLoss::Uav { pl_los_db, pl_nlos_db } => format!("{pl_los_db:.6};{pl_nlos_db:.6}"),
            };
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{},{:.9},{:e}\n",
                l.bs, l.user, l.d2d_m, l.d3d_m, pl, l.p_los, l.power_floor_w
            ));
        }
        out
    }
}
