//! TOML run configuration.

use std::collections::BTreeMap;
use std::path::Path;

use floquet_tls::verify::{DEFAULT_CASES, DEFAULT_SEED};
use floquet_tls::{BathSpec, Channel, SpectralDensity, SystemParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub omega0: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelConfig {
    Sigma1,
    Sigma3,
}

impl From<ChannelConfig> for Channel {
    fn from(c: ChannelConfig) -> Self {
        match c {
            ChannelConfig::Sigma1 => Channel::Sigma1,
            ChannelConfig::Sigma3 => Channel::Sigma3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DensityConfig {
    Cubic { a: f64 },
    Flat { value: f64 },
    Tabulated { points: Vec<[f64; 2]> },
}

impl From<&DensityConfig> for SpectralDensity {
    fn from(d: &DensityConfig) -> Self {
        match d {
            DensityConfig::Cubic { a } => SpectralDensity::Cubic { a: *a },
            DensityConfig::Flat { value } => SpectralDensity::Flat { value: *value },
            DensityConfig::Tabulated { points } => SpectralDensity::Tabulated {
                points: points.iter().map(|p| (p[0], p[1])).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathConfig {
    pub label: String,
    pub channel: ChannelConfig,
    pub temperature: f64,
    pub density: DensityConfig,
}

impl BathConfig {
    pub fn to_spec(&self) -> floquet_tls::Result<BathSpec> {
        BathSpec::new(self.label.clone(), self.channel.into(), self.temperature, (&self.density).into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Defaults to `Ω − 4Ω_R`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    /// Defaults to `Ω + 4Ω_R`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default)]
    pub normalize: bool,
}

fn default_points() -> usize {
    2000
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { omega_min: None, omega_max: None, points: default_points(), normalize: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub delta_min: f64,
    pub delta_max: f64,
    pub points: usize,
}

impl SweepConfig {
    pub fn detunings(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.delta_min],
            n => {
                let last = (n - 1) as f64;
                (0..n)
                    .map(|i| {
                        let f = i as f64 / last;
                        self.delta_min * (1.0 - f) + self.delta_max * f
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatPumpConfig {
    /// Ratio that operationalizes "≫" in the small-detuning conditions.
    #[serde(default = "default_margin")]
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn default_margin() -> f64 {
    10.0
}

impl Default for HeatPumpConfig {
    fn default() -> Self {
        Self { margin: default_margin(), sweep: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisConfig {
    Lab,
    Dressed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveConfig {
    /// Bloch vector `(x, y, z)` of the initial state, `ρ = ½(I + r·σ)`.
    pub rho0: [f64; 3],
    #[serde(default = "default_basis")]
    pub basis: BasisConfig,
    pub t_max: f64,
    pub samples: usize,
}

fn default_basis() -> BasisConfig {
    BasisConfig::Lab
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self { rho0: [0.0, 0.0, -1.0], basis: BasisConfig::Lab, t_max: 50.0, samples: 501 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_cases")]
    pub cases: usize,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_cases() -> usize {
    DEFAULT_CASES
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, cases: DEFAULT_CASES, tolerances: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    #[serde(default)]
    pub baths: Vec<BathConfig>,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub heatpump: HeatPumpConfig,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

impl RunConfig {
    /// Resonance fluorescence in the vacuum: `Ω = 0.85`, `Δ = 0.01`,
    /// `g = 0.075`, `G(ω) = ω³`.
    pub fn fluorescence_default() -> Self {
        Self {
            system: SystemConfig { omega0: 0.86, omega: 0.85, g: 0.075 },
            baths: vec![BathConfig {
                label: "em".into(),
                channel: ChannelConfig::Sigma1,
                temperature: 0.0,
                density: DensityConfig::Cubic { a: 1.0 },
            }],
            spectrum: SpectrumConfig::default(),
            heatpump: HeatPumpConfig::default(),
            evolve: EvolveConfig::default(),
            verify: VerifyConfig::default(),
        }
    }

    /// Heat pump deep inside the small-detuning regime with a detuning sweep
    /// across resonance.
    pub fn heatpump_default() -> Self {
        Self {
            system: SystemConfig { omega0: 10.02, omega: 10.0, g: 0.005 },
            baths: vec![
                BathConfig {
                    label: "em".into(),
                    channel: ChannelConfig::Sigma1,
                    temperature: 0.5,
                    density: DensityConfig::Cubic { a: 1.0 },
                },
                BathConfig {
                    label: "deph".into(),
                    channel: ChannelConfig::Sigma3,
                    temperature: 1.0,
                    density: DensityConfig::Flat { value: 0.5 },
                },
            ],
            heatpump: HeatPumpConfig {
                margin: default_margin(),
                sweep: Some(SweepConfig { delta_min: -0.05, delta_max: 0.05, points: 21 }),
            },
            ..Self::fluorescence_default()
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn params(&self) -> floquet_tls::Result<SystemParams> {
        SystemParams::new(self.system.omega0, self.system.omega, self.system.g)
    }

    pub fn bath_specs(&self) -> floquet_tls::Result<Vec<BathSpec>> {
        self.baths.iter().map(BathConfig::to_spec).collect()
    }

    /// Re-checks every physical constraint.
    pub fn validate(&self) -> Result<(), CliError> {
        self.params().map_err(CliError::from_core)?;
        self.bath_specs().map_err(CliError::from_core)?;
        let mut labels: Vec<&str> = self.baths.iter().map(|b| b.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Config("bath labels must be unique".into()));
        }
        if let (Some(lo), Some(hi)) = (self.spectrum.omega_min, self.spectrum.omega_max) {
            if !(hi > lo) {
                return Err(CliError::Config(format!("spectrum range [{lo}, {hi}] is empty")));
            }
        }
        if !(self.heatpump.margin >= 1.0) {
            return Err(CliError::Config(format!("heatpump margin must be at least 1, got {}", self.heatpump.margin)));
        }
        if let Some(s) = &self.heatpump.sweep {
            if !(s.delta_max >= s.delta_min) {
                return Err(CliError::Config("sweep needs delta_min <= delta_max".into()));
            }
        }
        let r: f64 = self.evolve.rho0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(r <= 1.0) {
            return Err(CliError::Config(format!("initial Bloch vector has length {r} > 1")));
        }
        if !(self.evolve.t_max >= 0.0) {
            return Err(CliError::Config("evolve t_max must be non-negative".into()));
        }
        if self.verify.cases == 0 {
            return Err(CliError::Config("verify cases must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        for cfg in [RunConfig::fluorescence_default(), RunConfig::heatpump_default()] {
            let text = cfg.to_toml();
            let back = RunConfig::parse(&text).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.to_toml(), text);
        }
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = RunConfig::parse(
            r#"
            [system]
            omega0 = 1.0
            Omega = 1.0
            g = 0.1

            [[baths]]
            label = "e"
            channel = "sigma1"
            temperature = 0.0
            density = { kind = "tabulated", points = [[0.0, 0.0], [2.0, 1.0]] }
            "#,
        )
        .unwrap();
        assert_eq!(cfg.spectrum.points, 2000);
        assert_eq!(cfg.verify.seed, DEFAULT_SEED);
        assert!(matches!(cfg.baths[0].density, DensityConfig::Tabulated { .. }));
    }

    #[test]
    fn rejects_invalid_physics() {
        let over = "[system]\nomega0 = 2.0\nOmega = 1.0\ng = 0.1\n";
        match RunConfig::parse(over) {
            Err(CliError::Config(msg)) => assert!(msg.contains("Omega_R <= Omega"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let bad_bath = "[system]\nomega0 = 1.0\nOmega = 1.0\ng = 0.1\n[[baths]]\nlabel = \"e\"\nchannel = \"sigma1\"\ntemperature = -1.0\ndensity = { kind = \"flat\", value = 1.0 }\n";
        assert!(matches!(RunConfig::parse(bad_bath), Err(CliError::Config(_))));
        assert!(matches!(RunConfig::parse("[system]\nomega0 = 1.0\n"), Err(CliError::Config(_))));
        let unknown = "[system]\nomega0 = 1.0\nOmega = 1.0\ng = 0.1\nextra = 1\n";
        assert!(matches!(RunConfig::parse(unknown), Err(CliError::Config(_))));
    }

    #[test]
    fn sweep_grid() {
        let s = SweepConfig { delta_min: -0.05, delta_max: 0.05, points: 21 };
        let d = s.detunings();
        assert_eq!(d.len(), 21);
        assert_eq!(d[10], 0.0);
        assert_eq!(d[20], 0.05);
    }
}
