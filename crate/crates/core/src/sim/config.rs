use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consensus::{DelayModel, NodeConfig};
use crate::geometry::{build_footprint, EarthModel, FootprintSpec};
use crate::ids::{AccountId, OperatorId};
use crate::ledger::{ChainParams, SYSTEM_ACCOUNT};
use crate::market::{MarketParams, PriceRange};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub n_cells: u32,
    pub reuse_factor: u32,
    pub cell_spacing_km: f64,
    pub altitude_km: f64,
    pub earth_radius_km: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            n_cells: 7,
            reuse_factor: 3,
            cell_spacing_km: 50.0,
            altitude_km: 1200.0,
            earth_radius_km: 6371.0,
        }
    }
}

impl GeometryConfig {
    pub fn footprint_spec(&self) -> Result<FootprintSpec, ConfigError> {
        let earth = EarthModel::new(self.earth_radius_km).map_err(|e| invalid(e.to_string()))?;
        Ok(FootprintSpec {
            n_cells: self.n_cells,
            reuse_factor: self.reuse_factor,
            cell_spacing_km: self.cell_spacing_km,
            altitude_km: self.altitude_km,
            earth,
        })
    }
}

/// Physical uplink parameters used for the per-buyer link survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioConfig {
    pub wavelength_m: f64,
    pub p_tx_w: f64,
    pub g_user: f64,
    pub g_sat_peak: f64,
    pub g_sat_floor: f64,
    pub beam_3db_deg: f64,
    /// Loss factor >= 1.
    pub fading: f64,
    pub activity: f64,
    pub polarization_isolation: f64,
    pub n0_w_per_hz: f64,
    pub bandwidth_hz: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            wavelength_m: 0.0107,
            p_tx_w: 1.0,
            g_user: 100.0,
            g_sat_peak: 1000.0,
            g_sat_floor: 1.0,
            beam_3db_deg: 2.0,
            fading: 1.0,
            activity: 1.0,
            polarization_isolation: 1.0,
            n0_w_per_hz: 4.0e-21,
            bandwidth_hz: 1.0e7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedLog {
    pub positive: u64,
    pub negative: u64,
    pub suc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReputationConfig {
    pub phi: f64,
    /// Defaults to half the maximum attainable score.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub operators: Vec<OperatorId>,
    /// Prior applied to every operator/node pair without an explicit entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_seed: Option<SeedLog>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LedgerConfig {
    pub difficulty: u32,
    /// Milli-coins minted per block.
    pub mining_reward: u64,
    pub satellite_account: AccountId,
    pub max_retries: u32,
}

impl Default for LedgerConfig {
    fn default() -> Self {
        let p = ChainParams::default();
        Self {
            difficulty: p.difficulty,
            mining_reward: p.mining_reward,
            satellite_account: AccountId::from("satellite"),
            max_retries: 2,
        }
    }
}

impl LedgerConfig {
    pub fn chain_params(&self) -> ChainParams {
        ChainParams {
            difficulty: self.difficulty,
            mining_reward: self.mining_reward,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuyerConfig {
    pub id: AccountId,
    pub cell: u32,
    /// Offset from the cell centre, km.
    #[serde(default)]
    pub east_km: f64,
    #[serde(default)]
    pub north_km: f64,
    /// Opening balance, milli-coins.
    pub balance: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PricingConfig {
    pub lo: f64,
    pub hi: f64,
    pub grid: usize,
}

impl Default for PricingConfig {
    fn default() -> Self {
        let r = PriceRange::default();
        Self {
            lo: r.lo,
            hi: r.hi,
            grid: 200,
        }
    }
}

impl PricingConfig {
    pub fn range(&self) -> PriceRange {
        PriceRange {
            lo: self.lo,
            hi: self.hi,
        }
    }
}

fn steps(start: f64, step: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| start + step * i as f64).collect()
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub gamma_grid: Vec<f64>,
    pub bandwidth_grid: Vec<f64>,
    pub pi_grid: Vec<f64>,
    pub omega_grid: Vec<f64>,
    /// Directory for emitted files when `--out` is not given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            gamma_grid: steps(0.10, 0.04, 10),
            bandwidth_grid: steps(1.0, 1.5, 10),
            pi_grid: linspace(0.1, 20.0, 60),
            omega_grid: vec![0.5, 1.0, 1.5, 2.0],
            output: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    #[serde(default)]
    pub epochs: u64,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub radio: RadioConfig,
    pub reputation: ReputationConfig,
    #[serde(default)]
    pub ledger: LedgerConfig,
    #[serde(default)]
    pub market: MarketParams,
    #[serde(default)]
    pub pricing: PricingConfig,
    #[serde(default)]
    pub network: DelayModel,
    #[serde(default)]
    pub experiment: ExperimentConfig,
    pub nodes: Vec<NodeConfig>,
    #[serde(default)]
    pub buyers: Vec<BuyerConfig>,
}

impl ScenarioConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let c: Self = toml::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        let c: Self = serde_json::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    /// Reads `.json` files as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises to TOML")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises to JSON")
    }

    pub fn threshold(&self) -> f64 {
        self.reputation.threshold.unwrap_or_else(|| {
            crate::reputation::ReputationTable::default_threshold(
                self.reputation.operators.len(),
                self.reputation.phi,
            )
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let spec = self.geometry.footprint_spec()?;
        build_footprint(&spec, 0).map_err(|e| invalid(format!("geometry: {e}")))?;

        let r = &self.radio;
        for (name, v) in [
            ("radio.wavelength_m", r.wavelength_m),
            ("radio.p_tx_w", r.p_tx_w),
            ("radio.g_user", r.g_user),
            ("radio.g_sat_floor", r.g_sat_floor),
            ("radio.beam_3db_deg", r.beam_3db_deg),
            ("radio.n0_w_per_hz", r.n0_w_per_hz),
            ("radio.bandwidth_hz", r.bandwidth_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(r.g_sat_peak >= r.g_sat_floor) || !(r.fading >= 1.0) {
            return Err(invalid(
                "radio: need g_sat_peak >= g_sat_floor and fading >= 1",
            ));
        }
        if !(0.0..=1.0).contains(&r.activity) || !(0.0..=1.0).contains(&r.polarization_isolation) {
            return Err(invalid(
                "radio: activity and polarization_isolation must lie in [0, 1]",
            ));
        }

        let rep = &self.reputation;
        if !(0.0..=1.0).contains(&rep.phi) {
            return Err(invalid(format!(
                "reputation.phi must lie in [0, 1], got {}",
                rep.phi
            )));
        }
        if rep.operators.is_empty() {
            return Err(invalid("reputation.operators is empty"));
        }
        let ops: BTreeSet<_> = rep.operators.iter().collect();
        if ops.len() != rep.operators.len() {
            return Err(invalid("reputation.operators has duplicates"));
        }
        if let Some(t) = rep.threshold {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(invalid(format!(
                    "reputation.threshold must be >= 0, got {t}"
                )));
            }
        }
        if let Some(s) = rep.default_seed {
            check_suc(s.suc, "reputation.default_seed")?;
        }

        if self.nodes.is_empty() {
            return Err(invalid("no nodes"));
        }
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.node_id.as_str()) {
                return Err(invalid(format!("duplicate node id {}", n.node_id)));
            }
            for s in &n.initial_reputation_log {
                if !ops.contains(&s.operator) {
                    return Err(invalid(format!(
                        "node {} seeds unknown operator {}",
                        n.node_id, s.operator
                    )));
                }
                check_suc(s.suc, &format!("node {}", n.node_id))?;
            }
        }

        let sat = &self.ledger.satellite_account;
        if sat.as_str() == SYSTEM_ACCOUNT {
            return Err(invalid("satellite_account cannot be the system account"));
        }
        let mut accounts = BTreeSet::new();
        for b in &self.buyers {
            if b.cell >= self.geometry.n_cells {
                return Err(invalid(format!(
                    "buyer {} sits in unknown cell {}",
                    b.id, b.cell
                )));
            }
            if b.id == *sat || b.id.as_str() == SYSTEM_ACCOUNT || ids.contains(b.id.as_str()) {
                return Err(invalid(format!(
                    "buyer id {} clashes with another identity",
                    b.id
                )));
            }
            if !accounts.insert(b.id.as_str()) {
                return Err(invalid(format!("duplicate buyer {}", b.id)));
            }
            if !(b.east_km.is_finite() && b.north_km.is_finite()) {
                return Err(invalid(format!("buyer {} offset must be finite", b.id)));
            }
        }

        self.market.validate().map_err(|e| invalid(e.to_string()))?;
        let p = &self.pricing;
        if !(p.lo > 0.0 && p.hi > p.lo) || p.grid < 3 {
            return Err(invalid("pricing needs 0 < lo < hi and grid >= 3"));
        }

        let e = &self.experiment;
        for (name, grid) in [
            ("gamma_grid", &e.gamma_grid),
            ("bandwidth_grid", &e.bandwidth_grid),
            ("pi_grid", &e.pi_grid),
            ("omega_grid", &e.omega_grid),
        ] {
            if grid.is_empty() {
                return Err(invalid(format!("experiment.{name} is empty")));
            }
            if grid.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(invalid(format!(
                    "experiment.{name} values must be positive"
                )));
            }
        }
        Ok(())
    }
}

fn check_suc(suc: f64, what: &str) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&suc) {
        Ok(())
    } else {
        Err(invalid(format!(
            "{what}: suc must lie in [0, 1], got {suc}"
        )))
    }
}
