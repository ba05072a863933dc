//! Optional TOML run configuration. Every key is optional and overrides the default.
//!
//! ```toml
//! mouth_flags = ["cheeks_puffed", "tongue_out"]
//!
//! [transition]
//! t_min = 0.3
//! t_max = 1.1
//! composite_duration = 0.2
//! overlap = 0.2
//!
//! [mouthing]
//! anticipation = 0.1
//! max_viseme_duration = 0.35
//! ```

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use signsched::{MouthFlags, MouthingConfig, TransitionConfig};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionOverrides {
    t_min: Option<f64>,
    t_max: Option<f64>,
    composite_duration: Option<f64>,
    overlap: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct MouthingOverrides {
    anticipation: Option<f64>,
    max_viseme_duration: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    transition: TransitionOverrides,
    #[serde(default)]
    mouthing: MouthingOverrides,
    mouth_flags: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub transition: TransitionConfig,
    pub mouthing: MouthingConfig,
    pub mouth_flags: MouthFlags,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut cfg = Self::default();
        let Some(path) = path else {
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: ConfigFile = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let t = &mut cfg.transition;
        let o = file.transition;
        t.t_min = o.t_min.unwrap_or(t.t_min);
        t.t_max = o.t_max.unwrap_or(t.t_max);
        t.composite_duration = o.composite_duration.unwrap_or(t.composite_duration);
        t.overlap = o.overlap.unwrap_or(t.overlap);
        let m = &mut cfg.mouthing;
        m.anticipation = file.mouthing.anticipation.unwrap_or(m.anticipation);
        m.max_viseme_duration = file.mouthing.max_viseme_duration.unwrap_or(m.max_viseme_duration);
        if let Some(flags) = file.mouth_flags {
            cfg.mouth_flags = MouthFlags::new(flags);
        }
        cfg.transition.validate()?;
        cfg.mouthing.validate()?;
        Ok(cfg)
    }
}
