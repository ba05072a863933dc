//! Sign-animation database: clip metadata, hand positions and facial-expression flags.
//!
//! The on-disk format is a JSON document:
//!
//! ```json
//! {
//!   "version": 1,
//!   "clips": [
//!     {
//!       "gloss": "EU",
//!       "keyframes": [
//!         { "t": 1.0, "right_hand": [0.1, 1.2, 0.3], "left_hand": [-0.2, 0.9, 0.1], "face": [] }
//!       ]
//!     }
//!   ]
//! }
//! ```
//!
//! Times are seconds in clip-local time. Hand positions are opaque skeleton-space
//! coordinates and are never rescaled here.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::Checksum;

/// Local time of the first keyframe of every clip.
pub const LEAD_IN: f64 = 1.0;

/// Squared-distance threshold above which a hand counts as moving.
pub const LEFT_HAND_EPSILON: f64 = 1e-4;

const LEAD_IN_TOLERANCE: f64 = 1e-9;

const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("sign database parse error at line {line}, column {column}: {message}")]
    Format {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("sign database read error: {0}")]
    Io(#[from] std::io::Error),
    #[error("unsupported sign database version {0}")]
    Version(u32),
    #[error("empty database")]
    Empty,
    #[error("duplicate gloss id {0:?}")]
    Duplicate(String),
    #[error("gloss {gloss:?}: {reason}")]
    InvalidClip { gloss: String, reason: String },
}

pub type Vec3 = [f64; 3];

pub(crate) fn squared_distance(a: &Vec3, b: &Vec3) -> f64 {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let dz = b[2] - a[2];
    dx * dx + dy * dy + dz * dz
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub t: f64,
    pub right_hand: Vec3,
    pub left_hand: Vec3,
    #[serde(default)]
    pub face: BTreeSet<String>,
}

/// Flags that mean the mouth is already busy with a phonological facial expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MouthFlags(BTreeSet<String>);

impl MouthFlags {
    pub fn new<I, S>(flags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self(flags.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, flag: &str) -> bool {
        self.0.contains(flag)
    }
}

impl Default for MouthFlags {
    fn default() -> Self {
        Self::new([
            "cheeks_puffed",
            "tongue_chin",
            "tongue_out",
            "lips_pursed",
            "lips_stretched",
            "mouth_open",
            "mouth_morpheme",
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignClip {
    gloss: String,
    keyframes: Vec<Keyframe>,
    left_moves: bool,
    mouth_occupied: bool,
}

impl SignClip {
    /// Validates keyframes and derives the left-hand activity and mouth flags.
    pub fn new(
        gloss: impl Into<String>,
        keyframes: Vec<Keyframe>,
        mouth_flags: &MouthFlags,
    ) -> Result<Self, StoreError> {
        let gloss = gloss.into();
        let invalid = |reason: String| StoreError::InvalidClip {
            gloss: gloss.clone(),
            reason,
        };
        let first = keyframes
            .first()
            .ok_or_else(|| invalid("clip has no keyframes".into()))?;
        for (i, kf) in keyframes.iter().enumerate() {
            if !kf.t.is_finite() || kf.t < 0.0 {
                return Err(invalid(format!("keyframe {i} has invalid time {}", kf.t)));
            }
            if kf.right_hand.iter().chain(kf.left_hand.iter()).any(|c| !c.is_finite()) {
                return Err(invalid(format!("keyframe {i} has a non-finite position")));
            }
        }
        if (first.t - LEAD_IN).abs() > LEAD_IN_TOLERANCE {
            return Err(invalid(format!(
                "lead_in must be 1.0, first keyframe is at {}",
                first.t
            )));
        }
        if let Some(i) = keyframes.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(invalid(format!(
                "keyframe times must be strictly increasing (keyframe {})",
                i + 1
            )));
        }
        if keyframes.len() < 2 {
            return Err(invalid("active_duration must be positive".into()));
        }

        let left_moves = keyframes.iter().enumerate().any(|(i, a)| {
            keyframes[i + 1..]
                .iter()
                .any(|b| squared_distance(&a.left_hand, &b.left_hand) > LEFT_HAND_EPSILON)
        });
        let mouth_occupied = keyframes
            .iter()
            .flat_map(|kf| kf.face.iter())
            .any(|f| mouth_flags.contains(f));

        Ok(Self {
            gloss,
            keyframes,
            left_moves,
            mouth_occupied,
        })
    }

    pub fn gloss(&self) -> &str {
        &self.gloss
    }

    pub fn keyframes(&self) -> &[Keyframe] {
        &self.keyframes
    }

    pub fn first_keyframe(&self) -> &Keyframe {
        &self.keyframes[0]
    }

    pub fn last_keyframe(&self) -> &Keyframe {
        self.keyframes.last().expect("validated non-empty")
    }

    pub fn lead_in(&self) -> f64 {
        self.first_keyframe().t
    }

    /// Time from the first to the last keyframe.
    pub fn active_duration(&self) -> f64 {
        self.last_keyframe().t - self.first_keyframe().t
    }

    pub fn left_moves(&self) -> bool {
        self.left_moves
    }

    pub fn mouth_occupied(&self) -> bool {
        self.mouth_occupied
    }
}

/// Final keyframe of `prev` and initial keyframe of `next`.
pub fn boundary_poses<'a>(prev: &'a SignClip, next: &'a SignClip) -> (&'a Keyframe, &'a Keyframe) {
    (prev.last_keyframe(), next.first_keyframe())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignDatabase {
    clips: BTreeMap<String, SignClip>,
    checksum: Checksum,
}

#[derive(Serialize, Deserialize)]
struct RawDatabase {
    version: u32,
    clips: Vec<RawClip>,
}

#[derive(Serialize, Deserialize)]
struct RawClip {
    gloss: String,
    keyframes: Vec<Keyframe>,
}

impl SignDatabase {
    pub fn from_reader<R: Read>(mut source: R, mouth_flags: &MouthFlags) -> Result<Self, StoreError> {
        let mut bytes = Vec::new();
        source.read_to_end(&mut bytes)?;
        Self::from_slice(&bytes, mouth_flags)
    }

    pub fn from_slice(bytes: &[u8], mouth_flags: &MouthFlags) -> Result<Self, StoreError> {
        let raw: RawDatabase = serde_json::from_slice(bytes).map_err(|e| StoreError::Format {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if raw.version != FORMAT_VERSION {
            return Err(StoreError::Version(raw.version));
        }
        let clips = raw
            .clips
            .into_iter()
            .map(|c| SignClip::new(c.gloss, c.keyframes, mouth_flags));
        Self::build(clips, Checksum::of(bytes))
    }

    /// Builds a database from already-validated clips.
    pub fn from_clips<I>(clips: I) -> Result<Self, StoreError>
    where
        I: IntoIterator<Item = SignClip>,
    {
        let clips: Vec<SignClip> = clips.into_iter().collect();
        let mut db = Self::build(clips.into_iter().map(Ok), Checksum::of(b""))?;
        db.checksum = Checksum::of(&db.to_json());
        Ok(db)
    }

    fn build<I>(clips: I, checksum: Checksum) -> Result<Self, StoreError>
    where
        I: IntoIterator<Item = Result<SignClip, StoreError>>,
    {
        let mut map = BTreeMap::new();
        for clip in clips {
            let clip = clip?;
            if map.contains_key(clip.gloss()) {
                return Err(StoreError::Duplicate(clip.gloss));
            }
            map.insert(clip.gloss.clone(), clip);
        }
        if map.is_empty() {
            return Err(StoreError::Empty);
        }
        Ok(Self { clips: map, checksum })
    }

    /// Serializes back to the database file format, clips ordered by gloss id.
    pub fn to_json(&self) -> Vec<u8> {
        let raw = RawDatabase {
            version: FORMAT_VERSION,
            clips: self
                .clips
                .values()
                .map(|c| RawClip {
                    gloss: c.gloss.clone(),
                    keyframes: c.keyframes.clone(),
                })
                .collect(),
        };
        let mut out = serde_json::to_vec_pretty(&raw).expect("database serializes");
        out.push(b'\n');
        out
    }

    pub fn get(&self, gloss: &str) -> Option<&SignClip> {
        self.clips.get(gloss)
    }

    pub fn len(&self) -> usize {
        self.clips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clips.is_empty()
    }

    /// Clips in gloss-id order.
    pub fn clips(&self) -> impl ExactSizeIterator<Item = &SignClip> {
        self.clips.values()
    }

    /// SHA-256 of the bytes the database was loaded from.
    pub fn checksum(&self) -> &Checksum {
        &self.checksum
    }
}
