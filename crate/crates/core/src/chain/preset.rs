//! Personality presets: anchor triples for every chain parameter.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::interp_anchor;

pub const BAND_COUNT: usize = 5;

pub const BAND_NAMES: [&str; BAND_COUNT] = ["best", "good", "mild", "bad", "worst"];

pub const BUILTIN_NAMES: [&str; 6] = ["flat", "classical", "rock", "jazz", "metal", "human"];

const BUILTIN_FILES: [(&str, &str); 6] = [
    ("flat", include_str!("../../presets/flat.toml")),
    ("classical", include_str!("../../presets/classical.toml")),
    ("rock", include_str!("../../presets/rock.toml")),
    ("jazz", include_str!("../../presets/jazz.toml")),
    ("metal", include_str!("../../presets/metal.toml")),
    ("human", include_str!("../../presets/human.toml")),
];

#[derive(Debug, Error)]
pub enum PresetError {
    #[error("unknown preset `{0}`")]
    Unknown(String),
    #[error("invalid preset `{name}`: {reason}")]
    Invalid { name: String, reason: String },
    #[error("preset parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("preset io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Parameter values at ψ = −100, 0 and +100.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorTriple {
    pub stress: f64,
    pub neutral: f64,
    pub overconfident: f64,
}

impl AnchorTriple {
    pub const fn new(stress: f64, neutral: f64, overconfident: f64) -> AnchorTriple {
        AnchorTriple {
            stress,
            neutral,
            overconfident,
        }
    }

    pub const fn constant(v: f64) -> AnchorTriple {
        AnchorTriple::new(v, v, v)
    }

    pub fn at(&self, psyche: f64) -> f64 {
        interp_anchor(self, psyche)
    }

    fn values(&self) -> [f64; 3] {
        [self.stress, self.neutral, self.overconfident]
    }
}

/// Per-band gains at the three psyche anchors, bands ordered best..worst.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqGains {
    pub stress: [f64; BAND_COUNT],
    pub neutral: [f64; BAND_COUNT],
    pub overconfident: [f64; BAND_COUNT],
}

impl EqGains {
    pub const UNITY: EqGains = EqGains {
        stress: [1.0; BAND_COUNT],
        neutral: [1.0; BAND_COUNT],
        overconfident: [1.0; BAND_COUNT],
    };

    pub fn band(&self, k: usize) -> AnchorTriple {
        AnchorTriple::new(self.stress[k], self.neutral[k], self.overconfident[k])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonalityPreset {
    pub name: String,
    pub character: String,
    /// Set when the EQ matrix was copied from another preset rather than
    /// tuned for this one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eq_borrowed_from: Option<String>,
    pub gate: AnchorTriple,
    pub dynamics: AnchorTriple,
    pub saturation: AnchorTriple,
    pub eq: EqGains,
}

impl PersonalityPreset {
    pub fn validate(&self) -> Result<(), PresetError> {
        let fail = |reason: &str| PresetError::Invalid {
            name: self.name.clone(),
            reason: reason.to_string(),
        };
        let all = |t: &AnchorTriple, ok: &dyn Fn(f64) -> bool| t.values().iter().all(|&v| ok(v));
        if !all(&self.gate, &|v| (0.0..=1.0).contains(&v)) {
            return Err(fail("gate thresholds must lie in [0, 1]"));
        }
        if !all(&self.dynamics, &|v| v.is_finite() && v > 0.0) {
            return Err(fail("dynamics exponents must be positive"));
        }
        if !all(&self.saturation, &|v| v > 0.0 && v <= 1.0) {
            return Err(fail("saturation ceilings must lie in (0, 1]"));
        }
        let rows = [self.eq.stress, self.eq.neutral, self.eq.overconfident];
        if rows.iter().flatten().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(fail("EQ gains must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn from_toml_str(s: &str) -> Result<PersonalityPreset, PresetError> {
        let preset: PersonalityPreset = toml::from_str(s)?;
        preset.validate()?;
        Ok(preset)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("preset serializes")
    }

    pub fn load_file(path: &Path) -> Result<PersonalityPreset, PresetError> {
        PersonalityPreset::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn flat() -> PersonalityPreset {
        builtin("flat").expect("flat preset ships with the crate")
    }

    pub fn human() -> PersonalityPreset {
        builtin("human").expect("human preset ships with the crate")
    }

    /// Effective gains per band at ψ before the wet/dry mix.
    pub fn band_gains(&self, psyche: f64) -> [f64; BAND_COUNT] {
        std::array::from_fn(|k| self.eq.band(k).at(psyche))
    }
}

/// Raw text of a built-in preset file.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUILTIN_FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| *src)
}

pub fn builtin(name: &str) -> Result<PersonalityPreset, PresetError> {
    let src = builtin_source(name).ok_or_else(|| PresetError::Unknown(name.to_string()))?;
    PersonalityPreset::from_toml_str(src)
}

/// Resolves a built-in name, or failing that a path to a preset file.
pub fn load_preset(name_or_path: &str) -> Result<PersonalityPreset, PresetError> {
    if builtin_source(name_or_path).is_some() {
        return builtin(name_or_path);
    }
    let path = Path::new(name_or_path);
    if path.is_file() {
        return PersonalityPreset::load_file(path);
    }
    Err(PresetError::Unknown(name_or_path.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_round_trip_bit_exact() {
        for name in BUILTIN_NAMES {
            let src = builtin_source(name).unwrap();
            let p = builtin(name).unwrap();
            assert_eq!(p.name, name);
            assert_eq!(p.to_toml_string(), src, "{name} file is not in canonical form");
            assert_eq!(PersonalityPreset::from_toml_str(&p.to_toml_string()).unwrap(), p);
        }
    }

    #[test]
    fn human_anchors() {
        let p = load_preset("human").unwrap();
        assert_eq!(p.gate, AnchorTriple::new(0.005, 0.02, 0.06));
        assert_eq!(p.dynamics, AnchorTriple::new(0.5, 1.0, 2.0));
        assert_eq!(p.saturation, AnchorTriple::new(0.30, 0.50, 0.85));
        assert_eq!(p.eq.neutral, [1.30, 1.20, 1.00, 0.70, 0.50]);
        assert_eq!(p.eq_borrowed_from, None);
    }

    #[test]
    fn metal_anchors() {
        let p = load_preset("metal").unwrap();
        assert_eq!(p.gate, AnchorTriple::new(0.0, 0.001, 0.005));
        assert_eq!(p.saturation, AnchorTriple::new(0.20, 0.30, 0.50));
        assert_eq!(p.eq, PersonalityPreset::human().eq);
        assert_eq!(p.eq_borrowed_from.as_deref(), Some("human"));
    }

    #[test]
    fn flat_is_bypass() {
        let p = load_preset("flat").unwrap();
        assert_eq!(p.gate, AnchorTriple::constant(0.0));
        assert_eq!(p.dynamics, AnchorTriple::constant(1.0));
        assert_eq!(p.saturation, AnchorTriple::constant(1.0));
        assert_eq!(p.eq, EqGains::UNITY);
    }

    #[test]
    fn unknown_and_invalid() {
        assert!(matches!(load_preset("polka"), Err(PresetError::Unknown(_))));
        let mut p = PersonalityPreset::human();
        p.saturation.stress = 0.0;
        assert!(PersonalityPreset::from_toml_str(&p.to_toml_string()).is_err());
    }

    #[test]
    fn loads_user_file() {
        let dir = std::env::temp_dir().join(format!("psychess-preset-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut p = PersonalityPreset::human();
        p.name = "mine".into();
        p.dynamics.overconfident = 3.0;
        let path = dir.join("mine.toml");
        std::fs::write(&path, p.to_toml_string()).unwrap();
        let back = load_preset(path.to_str().unwrap()).unwrap();
        assert_eq!(back, p);
        std::fs::remove_dir_all(&dir).ok();
    }
}
