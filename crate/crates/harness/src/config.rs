use std::path::{Path, PathBuf};

use psychess_core::chain::StageMask;
use psychess_core::engine::{AgentConfig, ConfidenceMode, PolicySpec};
use psychess_core::psyche::{psyche_zone, PsycheZone};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::HarnessError;

/// One agent configuration in a sweep, expressed as overrides of the
/// experiment's agent template.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    pub label: String,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default = "full_mask")]
    pub mask: StageMask,
    #[serde(default)]
    pub confidence: Option<ConfidenceMode>,
}

fn full_mask() -> StageMask {
    StageMask::FULL
}

impl Variant {
    pub fn new(label: &str, mask: StageMask) -> Variant {
        Variant {
            label: label.into(),
            preset: None,
            mask,
            confidence: None,
        }
    }

    pub fn apply(&self, template: &AgentConfig) -> AgentConfig {
        let mut cfg = template.clone();
        if let Some(p) = &self.preset {
            cfg.preset = p.clone();
        }
        cfg.mask = self.mask;
        if let Some(c) = self.confidence {
            cfg.confidence = c;
        }
        cfg
    }
}

/// The stage-wise ablation set plus the two no-shaping controls.
pub fn ablation_variants() -> Vec<Variant> {
    let full = StageMask::FULL;
    let flat = |label: &str, mask| Variant {
        preset: Some("flat".into()),
        ..Variant::new(label, mask)
    };
    vec![
        Variant::new("full", full),
        Variant::new("no-gate", full.without_gate()),
        Variant::new("no-dynamics", full.without_dynamics()),
        Variant::new("no-eq", full.without_eq()),
        Variant::new("no-saturation", full.without_saturation()),
        Variant::new("no-gate-no-dynamics", full.without_gate().without_dynamics()),
        flat("flat", full),
        flat("temp-only", StageMask::DYNAMICS_ONLY),
    ]
}

pub fn confidence_variants() -> Vec<Variant> {
    [
        ("entropy-only", ConfidenceMode::EntropyOnly),
        ("fixed", ConfidenceMode::Fixed),
    ]
    .into_iter()
    .map(|(label, mode)| Variant {
        confidence: Some(mode),
        ..Variant::new(label, StageMask::FULL)
    })
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub label: String,
    pub games_per_condition: usize,
    /// Initial psyche of the modulated side, one condition each.
    pub conditions: Vec<f64>,
    /// Half the games of each condition with the agent as white.
    pub color_balanced: bool,
    pub base_seed: u64,
    pub bootstrap_resamples: usize,
    /// Worker threads; all cores when unset.
    pub threads: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub agent: AgentConfig,
    pub opponent: AgentConfig,
    /// Empty means the agent template as given.
    pub variants: Vec<Variant>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            label: "experiment".into(),
            games_per_condition: 300,
            conditions: vec![-80.0, 0.0, 80.0],
            color_balanced: true,
            base_seed: 0,
            bootstrap_resamples: 1000,
            threads: None,
            output_dir: None,
            agent: AgentConfig::default(),
            opponent: AgentConfig::vanilla(PolicySpec::default()),
            variants: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<ExperimentConfig, HarnessError> {
        let cfg: ExperimentConfig = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        ExperimentConfig::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if self.games_per_condition == 0 {
            return bad("games_per_condition must be positive");
        }
        if self.color_balanced && !self.games_per_condition.is_multiple_of(2) {
            return bad("games_per_condition must be even when colors are balanced");
        }
        if self.conditions.is_empty() {
            return bad("at least one condition is required");
        }
        if self.conditions.iter().any(|c| !(-100.0..=100.0).contains(c)) {
            return bad("conditions must lie in [-100, 100]");
        }
        if self.threads == Some(0) {
            return bad("threads must be positive");
        }
        let mut labels: Vec<&str> = self.variants.iter().map(|v| v.label.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return bad("variant labels must be unique");
        }
        for v in self.effective_variants() {
            let mut a = v.apply(&self.agent);
            a.initial_psyche = 0.0;
            a.validate()?;
        }
        self.opponent.validate()?;
        Ok(())
    }

    pub fn effective_variants(&self) -> Vec<Variant> {
        if self.variants.is_empty() {
            vec![Variant {
                label: "base".into(),
                preset: None,
                mask: self.agent.mask,
                confidence: None,
            }]
        } else {
            self.variants.clone()
        }
    }

    /// Zone names, suffixed with the value when two conditions share a zone.
    pub fn condition_labels(&self) -> Vec<String> {
        let zones: Vec<PsycheZone> = self.conditions.iter().map(|&c| psyche_zone(c)).collect();
        zones
            .iter()
            .zip(&self.conditions)
            .map(|(z, c)| {
                let name = zone_name(*z);
                if zones.iter().filter(|o| *o == z).count() > 1 {
                    format!("{name}{c:+}")
                } else {
                    name.to_string()
                }
            })
            .collect()
    }

    /// SHA-256 of the canonical TOML form, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn zone_name(z: PsycheZone) -> &'static str {
    match z {
        PsycheZone::Stress => "stress",
        PsycheZone::Neutral => "neutral",
        PsycheZone::Overconfident => "overconfident",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.condition_labels(), ["stress", "neutral", "overconfident"]);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn odd_balanced_count_rejected() {
        let cfg = ExperimentConfig {
            games_per_condition: 3,
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn duplicate_zone_labels_carry_values() {
        let cfg = ExperimentConfig {
            conditions: vec![-80.0, -50.0, 0.0],
            ..ExperimentConfig::default()
        };
        assert_eq!(cfg.condition_labels(), ["stress-80", "stress-50", "neutral"]);
    }

    #[test]
    fn ablation_set_is_config_only() {
        let template = AgentConfig::default();
        let v = ablation_variants();
        assert_eq!(v.len(), 8);
        let flat = v.iter().find(|v| v.label == "flat").unwrap().apply(&template);
        assert_eq!(flat.preset, "flat");
        let nd = v
            .iter()
            .find(|v| v.label == "no-gate-no-dynamics")
            .unwrap()
            .apply(&template);
        assert!(!nd.mask.enable_gate && !nd.mask.enable_dynamics);
        assert!(nd.mask.enable_eq && nd.mask.enable_saturation);
    }

    #[test]
    fn parses_minimal_toml() {
        let cfg = ExperimentConfig::from_toml_str(
            "label = \"tiny\"\ngames_per_condition = 4\nconditions = [-80.0, 80.0]\n\n\
             [agent]\npreset = \"human\"\n\n[agent.policy]\nkind = \"heuristic\"\ntemperature = 0.5\n\n\
             [[variants]]\nlabel = \"full\"\n",
        )
        .unwrap();
        assert_eq!(cfg.games_per_condition, 4);
        assert_eq!(cfg.variants[0].mask, StageMask::FULL);
        assert_eq!(cfg.agent.policy, PolicySpec::Heuristic { temperature: 0.5 });
    }
}
