//! Simulation constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simulation parameters. Defaults follow the reference deployment: 10 BSs with
/// 11 sub-carriers each over a 1 km x 1 km area, 20 W / 0.1 W power grid, 2 GHz,
/// -130 dBm noise, Nakagami m = 2 and a 0.1 outage threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSimConfig")]
pub struct SimConfig {
    pub area_width_m: f64,
    pub area_height_m: f64,
    pub n_bs: usize,
    pub n_carriers: usize,
    pub n_ues: usize,
    pub n_uavs: usize,
    pub uav_alt_min_m: f64,
    pub uav_alt_max_m: f64,
    pub p_max_w: f64,
    pub p_stp_w: f64,
    pub f_c_ghz: f64,
    pub n0_w: f64,
    pub nakagami_m: u32,
    pub gamma_th: f64,
    pub p_out_th: f64,
    /// Receiver sensitivity. Falls back to `gamma_th` when absent from a file.
    pub snr_th: f64,
    pub laguerre_order: usize,
    pub mc_draws: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            area_width_m: 1000.0,
            area_height_m: 1000.0,
            n_bs: 10,
            n_carriers: 11,
            n_ues: 50,
            n_uavs: 50,
            uav_alt_min_m: 22.5,
            uav_alt_max_m: 300.0,
            p_max_w: 20.0,
            p_stp_w: 0.1,
            f_c_ghz: 2.0,
            n0_w: dbm_to_watts(-130.0),
            nakagami_m: 2,
            gamma_th: 0.1,
            p_out_th: 0.1,
            snr_th: 0.1,
            laguerre_order: 32,
            mc_draws: 100_000,
            seed: 0,
        }
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("area_width_m", self.area_width_m),
            ("area_height_m", self.area_height_m),
            ("uav_alt_min_m", self.uav_alt_min_m),
            ("uav_alt_max_m", self.uav_alt_max_m),
            ("p_max_w", self.p_max_w),
            ("p_stp_w", self.p_stp_w),
            ("f_c_ghz", self.f_c_ghz),
            ("n0_w", self.n0_w),
            ("gamma_th", self.gamma_th),
            ("p_out_th", self.p_out_th),
            ("snr_th", self.snr_th),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        if self.p_stp_w >= self.p_max_w {
            return Err(Error::Config("p_stp_w must be smaller than p_max_w".into()));
        }
        if self.p_out_th >= 1.0 {
            return Err(Error::Config("p_out_th must lie in (0, 1)".into()));
        }
        if self.uav_alt_min_m > self.uav_alt_max_m {
            return Err(Error::Config("uav_alt_min_m exceeds uav_alt_max_m".into()));
        }
        if self.n_carriers == 0 {
            return Err(Error::Config("n_carriers must be >= 1".into()));
        }
        if self.n_bs == 0 {
            return Err(Error::Config("n_bs must be >= 1".into()));
        }
        if self.nakagami_m == 0 {
            return Err(Error::Config("nakagami_m must be >= 1".into()));
        }
        if self.laguerre_order == 0 || self.laguerre_order > 128 {
            return Err(Error::Config("laguerre_order must lie in [1, 128]".into()));
        }
        Ok(())
    }

    /// Number of discrete power levels above zero on the `p_stp_w` grid.
    pub fn power_levels(&self) -> usize {
        (self.p_max_w / self.p_stp_w + 1e-9).floor() as usize
    }

    /// Merges a JSON object of overrides into this configuration. Keys must
    /// name existing fields and values must have the right type.
    pub fn with_overrides(&self, overrides: &serde_json::Value) -> Result<SimConfig> {
        let mut base = serde_json::to_value(self)?;
        let (Some(obj), Some(ovr)) = (base.as_object_mut(), overrides.as_object()) else {
            return Err(Error::Config("overrides must be a JSON object".into()));
        };
        for (k, v) in ovr {
            if !obj.contains_key(k) {
                return Err(Error::Config(format!("unknown field `{k}`")));
            }
            obj.insert(k.clone(), v.clone());
        }
        serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimConfig {
    area_width_m: f64,
    area_height_m: f64,
    n_bs: usize,
    n_carriers: usize,
    n_ues: usize,
    n_uavs: usize,
    uav_alt_min_m: f64,
    uav_alt_max_m: f64,
    p_max_w: f64,
    p_stp_w: f64,
    f_c_ghz: f64,
    n0_w: f64,
    nakagami_m: u32,
    gamma_th: f64,
    p_out_th: f64,
    #[serde(default)]
    snr_th: Option<f64>,
    laguerre_order: usize,
    mc_draws: usize,
    seed: u64,
}

impl TryFrom<RawSimConfig> for SimConfig {
    type Error = Error;

    fn try_from(r: RawSimConfig) -> Result<Self> {
        let cfg = SimConfig {
            area_width_m: r.area_width_m,
            area_height_m: r.area_height_m,
            n_bs: r.n_bs,
            n_carriers: r.n_carriers,
            n_ues: r.n_ues,
            n_uavs: r.n_uavs,
            uav_alt_min_m: r.uav_alt_min_m,
            uav_alt_max_m: r.uav_alt_max_m,
            p_max_w: r.p_max_w,
            p_stp_w: r.p_stp_w,
            f_c_ghz: r.f_c_ghz,
            n0_w: r.n0_w,
            nakagami_m: r.nakagami_m,
            gamma_th: r.gamma_th,
            p_out_th: r.p_out_th,
            snr_th: r.snr_th.unwrap_or(r.gamma_th),
            laguerre_order: r.laguerre_order,
            mc_draws: r.mc_draws,
            seed: r.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
