//! Timing compiler for signing avatars.
//!
//! Takes a translated gloss sequence together with the source Portuguese sentence and
//! produces an engine-agnostic [`Timeline`]: when each sign clip plays, how long each
//! inter-sign transition lasts, and a mouthing (viseme) track per sign.
//!
//! The stages are usable on their own:
//!
//! * [`sign_store`] loads the clip database.
//! * [`transition`] computes displacement-driven transition durations and offsets.
//! * [`mouthing`] turns the sentence into pruned viseme sequences.
//! * [`scheduler`] times visemes against each sign's playback window.
//! * [`timeline`] fuses everything into the serialized output.
//! * [`metrics`] scores evaluation responses.
//!
//! [`pipeline::compile`] wires them together.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

mod json;
pub mod metrics;
pub mod mouthing;
pub mod pipeline;
pub mod scheduler;
pub mod sequence;
pub mod sign_store;
pub mod timeline;
pub mod transition;

pub use metrics::{ResponseRecord, SynonymTable};
pub use mouthing::{Lexicon, Viseme, VisemeMap};
pub use pipeline::{compile, CompileError, CompileOptions, MouthingResources};
pub use scheduler::{MouthingConfig, VisemeEvent, VisemeTrack};
pub use sequence::GlossSequence;
pub use sign_store::{Keyframe, MouthFlags, SignClip, SignDatabase};
pub use timeline::Timeline;
pub use transition::{ScaleCalibration, TransitionConfig, TransitionPlan};

/// Hex-encoded SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Checksum(String);

impl Checksum {
    pub fn of(bytes: &[u8]) -> Self {
        Self(hex::encode(Sha256::digest(bytes)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Checksum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}
