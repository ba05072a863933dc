//! Dynamic inter-sign transitions.
//!
//! The hand displacement across a boundary (last keyframe of the previous sign to the
//! first keyframe of the next) is normalized against a database-wide scale and mapped
//! linearly onto `[t_min, t_max]`. Boundaries inside a composite utterance use a fixed
//! short duration instead. Every boundary also carries an offset so that
//! `duration + offset = 1.0 + overlap`.

use serde::{Deserialize, Serialize};

use crate::sequence::GlossSequence;
use crate::sign_store::{boundary_poses, squared_distance, SignClip, SignDatabase, LEAD_IN};
use crate::Checksum;

const CALIBRATION_FORMAT: &str = "signsched-calibration";
const CALIBRATION_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlanError {
    #[error("unknown gloss {0:?}")]
    UnknownGloss(String),
    #[error("transition duration {duration} outside (0, {max}]")]
    Range { duration: f64, max: f64 },
    #[error("invalid transition config: {0}")]
    Config(String),
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CalibrationError {
    #[error("calibration needs at least 2 clips, database has {0}")]
    TooFewClips(usize),
    #[error("degenerate scale: {0} displacements are all equal")]
    Degenerate(&'static str),
    #[error("invalid calibration: {0}")]
    Invalid(String),
    #[error("calibration file parse error at {path}: {message}")]
    Format { path: String, message: String },
    #[error("no calibration given; run calibrate first or use a constant transition")]
    Missing,
    #[error("calibration was computed for database {expected}, but the loaded database is {found}")]
    ChecksumMismatch { expected: String, found: String },
}

/// Squared hand displacement across one boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HandDisplacement {
    pub d_right: f64,
    pub d_left: f64,
    pub left_active: bool,
}

impl HandDisplacement {
    /// The displacement measured on the scale this boundary uses.
    pub fn scaled_total(&self) -> f64 {
        if self.left_active {
            self.d_right + self.d_left
        } else {
            self.d_right
        }
    }
}

pub fn hand_displacement(prev: &SignClip, next: &SignClip) -> HandDisplacement {
    let (last, first) = boundary_poses(prev, next);
    HandDisplacement {
        d_right: squared_distance(&last.right_hand, &first.right_hand),
        d_left: squared_distance(&last.left_hand, &first.left_hand),
        left_active: prev.left_moves() || next.left_moves(),
    }
}

/// Ordered (previous, next) gloss pair.
pub type GlossPair = (String, String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalPairs {
    pub min_both: GlossPair,
    pub max_both: GlossPair,
    pub min_right: GlossPair,
    pub max_right: GlossPair,
}

/// Extremes of the two displacement scales, in squared skeleton units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleCalibration {
    format: String,
    version: u32,
    pub database_checksum: Checksum,
    pub min_both: f64,
    pub max_both: f64,
    pub min_right: f64,
    pub max_right: f64,
    pub pairs: ExtremalPairs,
}

impl ScaleCalibration {
    pub fn new(
        min_both: f64,
        max_both: f64,
        min_right: f64,
        max_right: f64,
        pairs: ExtremalPairs,
        database_checksum: Checksum,
    ) -> Result<Self, CalibrationError> {
        let calib = Self {
            format: CALIBRATION_FORMAT.into(),
            version: CALIBRATION_VERSION,
            database_checksum,
            min_both,
            max_both,
            min_right,
            max_right,
            pairs,
        };
        calib.validate()?;
        Ok(calib)
    }

    fn validate(&self) -> Result<(), CalibrationError> {
        if self.format != CALIBRATION_FORMAT || self.version != CALIBRATION_VERSION {
            return Err(CalibrationError::Invalid(format!(
                "unsupported format {:?} version {}",
                self.format, self.version
            )));
        }
        let all = [self.min_both, self.max_both, self.min_right, self.max_right];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CalibrationError::Invalid(
                "extremes must be finite and non-negative".into(),
            ));
        }
        if self.min_both >= self.max_both {
            return Err(CalibrationError::Invalid("min_both must be below max_both".into()));
        }
        if self.min_right >= self.max_right {
            return Err(CalibrationError::Invalid("min_right must be below max_right".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("calibration serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, CalibrationError> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let calib: Self = serde_path_to_error::deserialize(de).map_err(|e| CalibrationError::Format {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        calib.validate()?;
        Ok(calib)
    }

    /// Refuses a calibration computed from a different database unless `force` is set.
    pub fn check_database(&self, db: &SignDatabase, force: bool) -> Result<(), CalibrationError> {
        if force || &self.database_checksum == db.checksum() {
            return Ok(());
        }
        Err(CalibrationError::ChecksumMismatch {
            expected: self.database_checksum.to_string(),
            found: db.checksum().to_string(),
        })
    }
}

#[derive(Default)]
struct Extremes {
    min: Option<(f64, usize, usize)>,
    max: Option<(f64, usize, usize)>,
}

impl Extremes {
    fn observe(&mut self, v: f64, i: usize, j: usize) {
        // Strict comparisons keep the first pair found in scan order on ties.
        if self.min.is_none_or(|(m, ..)| v < m) {
            self.min = Some((v, i, j));
        }
        if self.max.is_none_or(|(m, ..)| v > m) {
            self.max = Some((v, i, j));
        }
    }
}

/// Exhaustive scan over all ordered pairs of distinct clips.
pub fn calibrate(db: &SignDatabase) -> Result<ScaleCalibration, CalibrationError> {
    if db.len() < 2 {
        return Err(CalibrationError::TooFewClips(db.len()));
    }
    let clips: Vec<&SignClip> = db.clips().collect();
    let mut both = Extremes::default();
    let mut right = Extremes::default();
    for (i, prev) in clips.iter().enumerate() {
        for (j, next) in clips.iter().enumerate() {
            if i == j {
                continue;
            }
            let disp = hand_displacement(prev, next);
            if disp.left_active {
                both.observe(disp.d_right + disp.d_left, i, j);
            } else {
                right.observe(disp.d_right, i, j);
            }
        }
    }
    for (name, ext) in [("both-hands", &both), ("right-hand", &right)] {
        if let (Some((lo, ..)), Some((hi, ..))) = (ext.min, ext.max) {
            if lo >= hi {
                return Err(CalibrationError::Degenerate(name));
            }
        }
    }
    let (both_min, both_max, right_min, right_max) = match (both.min, both.max, right.min, right.max) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        (Some(a), Some(b), None, None) => (a, b, a, b),
        (None, None, Some(c), Some(d)) => (c, d, c, d),
        _ => unreachable!("at least one ordered pair exists"),
    };
    let pair = |(_, i, j): (f64, usize, usize)| (clips[i].gloss().to_string(), clips[j].gloss().to_string());
    ScaleCalibration::new(
        both_min.0,
        both_max.0,
        right_min.0,
        right_max.0,
        ExtremalPairs {
            min_both: pair(both_min),
            max_both: pair(both_max),
            min_right: pair(right_min),
            max_right: pair(right_max),
        },
        db.checksum().clone(),
    )
}

/// Position of a displacement on its scale, clamped to `[0, 1]`.
pub fn displacement_to_fraction(disp: &HandDisplacement, calib: &ScaleCalibration) -> f64 {
    let (lo, hi) = if disp.left_active {
        (calib.min_both, calib.max_both)
    } else {
        (calib.min_right, calib.max_right)
    };
    ((disp.scaled_total() - lo) / (hi - lo)).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub composite_duration: f64,
    pub overlap: f64,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        Self {
            t_min: 0.3,
            t_max: 1.1,
            composite_duration: 0.2,
            overlap: 0.2,
        }
    }
}

impl TransitionConfig {
    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: &str| Err(PlanError::Config(m.into()));
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max.is_finite()) {
            return bad("require 0 < t_min < t_max");
        }
        if !(self.composite_duration > 0.0 && self.composite_duration <= self.t_min) {
            return bad("require 0 < composite_duration <= t_min");
        }
        if !(self.overlap >= 0.0 && self.overlap < LEAD_IN) {
            return bad("require 0 <= overlap < 1.0");
        }
        if self.t_max > self.cycle() {
            return bad("t_max may not exceed 1.0 + overlap");
        }
        Ok(())
    }

    /// `duration + offset` for every boundary.
    pub fn cycle(&self) -> f64 {
        LEAD_IN + self.overlap
    }
}

pub fn fraction_to_duration(fraction: f64, cfg: &TransitionConfig) -> f64 {
    cfg.t_min + fraction * (cfg.t_max - cfg.t_min)
}

/// Clip start offset paired with a transition duration.
pub fn offset_for(duration: f64, cfg: &TransitionConfig) -> Result<f64, PlanError> {
    let cycle = cfg.cycle();
    if !(duration > 0.0 && duration <= cycle) {
        return Err(PlanError::Range { duration, max: cycle });
    }
    Ok(cycle - duration)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundarySource {
    Dynamic,
    Composite,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub duration: f64,
    pub offset: f64,
    pub source: BoundarySource,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransitionPlan {
    pub boundaries: Vec<Boundary>,
}

impl TransitionPlan {
    pub fn len(&self) -> usize {
        self.boundaries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundaries.is_empty()
    }
}

fn lookup<'a>(seq: &GlossSequence, db: &'a SignDatabase) -> Result<Vec<&'a SignClip>, PlanError> {
    seq.glosses()
        .iter()
        .map(|g| db.get(g).ok_or_else(|| PlanError::UnknownGloss(g.clone())))
        .collect()
}

fn boundary(duration: f64, source: BoundarySource, cfg: &TransitionConfig) -> Result<Boundary, PlanError> {
    Ok(Boundary {
        duration,
        offset: offset_for(duration, cfg)?,
        source,
    })
}

pub fn plan_transitions(
    seq: &GlossSequence,
    db: &SignDatabase,
    calib: &ScaleCalibration,
    cfg: &TransitionConfig,
) -> Result<TransitionPlan, PlanError> {
    cfg.validate()?;
    let clips = lookup(seq, db)?;
    let boundaries = clips
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            if seq.boundary_in_composite(i) {
                boundary(cfg.composite_duration, BoundarySource::Composite, cfg)
            } else {
                let disp = hand_displacement(pair[0], pair[1]);
                let duration = fraction_to_duration(displacement_to_fraction(&disp, calib), cfg);
                boundary(duration, BoundarySource::Dynamic, cfg)
            }
        })
        .collect::<Result<_, _>>()?;
    Ok(TransitionPlan { boundaries })
}

/// Same fixed duration at every boundary, composites included.
pub fn plan_constant(
    seq: &GlossSequence,
    db: &SignDatabase,
    duration: f64,
    cfg: &TransitionConfig,
) -> Result<TransitionPlan, PlanError> {
    cfg.validate()?;
    let clips = lookup(seq, db)?;
    let b = boundary(duration, BoundarySource::Constant, cfg)?;
    Ok(TransitionPlan {
        boundaries: vec![b; clips.len().saturating_sub(1)],
    })
}
