//! The assembled animation schedule and its file format.
//!
//! Global time starts at 0. The first sign's first keyframe is placed at `t_min`; each
//! following sign's first keyframe lands `duration - overlap` after the previous
//! sign's last keyframe. Both views of a boundary are recorded: the gap for engines
//! that schedule clips back to back, and the `(duration, offset)` pair for engines that
//! cross-fade into the next clip starting `offset` seconds into it.
//!
//! # File format
//!
//! Pretty-printed JSON, two-space indent, fields in the order below, every time value
//! in seconds with exactly six decimals:
//!
//! ```text
//! format        "signsched-timeline"
//! version       1
//! meta          database_checksum, calibration_checksum (null when unused),
//!               transition {t_min, t_max, composite_duration, overlap},
//!               constant_transition (null or seconds),
//!               mouthing {anticipation, max_viseme_duration} or null when disabled
//! signs[]       gloss, clip_start, clip_offset, first_keyframe_at, last_keyframe_at
//! transitions[] duration, offset, gap, source ("dynamic" | "composite" | "constant")
//! mouthing[]    sign (index into signs), events[] {viseme, start, duration}
//! ```
//!
//! `clip_start` is the global time at which the clip begins playing and `clip_offset`
//! the clip-local time it begins playing from.

use serde::{Deserialize, Serialize};

use crate::json;
use crate::scheduler::{MouthingConfig, VisemeTrack};
use crate::sequence::GlossSequence;
use crate::sign_store::SignDatabase;
use crate::transition::{BoundarySource, TransitionConfig, TransitionPlan};
use crate::Checksum;

const FORMAT: &str = "signsched-timeline";
const VERSION: u32 = 1;
const TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AssemblyError {
    #[error("plan has {plan} boundaries for {signs} signs")]
    PlanLength { plan: usize, signs: usize },
    #[error("unknown gloss {0:?}")]
    UnknownGloss(String),
    #[error("boundary {index}: duration {duration} is shorter than the overlap {overlap}")]
    NegativeGap { index: usize, duration: f64, overlap: f64 },
    #[error("boundary {index}: duration + offset = {sum}, expected {expected}")]
    OffsetMismatch { index: usize, sum: f64, expected: f64 },
    #[error("mouthing track references sign {sign}, but there are {signs} signs")]
    TrackSign { sign: usize, signs: usize },
    #[error("mouthing track for sign {0} leaves its window")]
    TrackWindow(usize),
}

#[derive(Debug, thiserror::Error)]
pub enum TimelineFormatError {
    #[error("timeline parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("unsupported timeline format {format:?} version {version}")]
    Version { format: String, version: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineMeta {
    pub database_checksum: Checksum,
    pub calibration_checksum: Option<Checksum>,
    pub transition: TransitionConfig,
    pub constant_transition: Option<f64>,
    pub mouthing: Option<MouthingConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignEntry {
    pub gloss: String,
    pub clip_start: f64,
    pub clip_offset: f64,
    pub first_keyframe_at: f64,
    pub last_keyframe_at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEntry {
    pub duration: f64,
    pub offset: f64,
    pub gap: f64,
    pub source: BoundarySource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    format: String,
    version: u32,
    pub meta: TimelineMeta,
    pub signs: Vec<SignEntry>,
    pub transitions: Vec<TransitionEntry>,
    pub mouthing: Vec<VisemeTrack>,
}

/// Places every sign on the global clock.
pub fn layout_signs(
    seq: &GlossSequence,
    db: &SignDatabase,
    plan: &TransitionPlan,
    cfg: &TransitionConfig,
) -> Result<(Vec<SignEntry>, Vec<TransitionEntry>), AssemblyError> {
    let expected = seq.len().saturating_sub(1);
    if plan.len() != expected {
        return Err(AssemblyError::PlanLength {
            plan: plan.len(),
            signs: seq.len(),
        });
    }
    let cycle = cfg.cycle();
    let transitions = plan
        .boundaries
        .iter()
        .enumerate()
        .map(|(index, b)| {
            let sum = b.duration + b.offset;
            if (sum - cycle).abs() > TOLERANCE {
                return Err(AssemblyError::OffsetMismatch {
                    index,
                    sum,
                    expected: cycle,
                });
            }
            let gap = b.duration - cfg.overlap;
            if gap < 0.0 {
                return Err(AssemblyError::NegativeGap {
                    index,
                    duration: b.duration,
                    overlap: cfg.overlap,
                });
            }
            Ok(TransitionEntry {
                duration: b.duration,
                offset: b.offset,
                gap,
                source: b.source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut signs: Vec<SignEntry> = Vec::with_capacity(seq.len());
    for (i, gloss) in seq.glosses().iter().enumerate() {
        let clip = db
            .get(gloss)
            .ok_or_else(|| AssemblyError::UnknownGloss(gloss.clone()))?;
        let entry = match signs.last() {
            None => SignEntry {
                gloss: gloss.clone(),
                clip_start: 0.0,
                clip_offset: clip.lead_in() - cfg.t_min,
                first_keyframe_at: cfg.t_min,
                last_keyframe_at: cfg.t_min + clip.active_duration(),
            },
            Some(prev) => {
                let t = &transitions[i - 1];
                let first = prev.last_keyframe_at + t.gap;
                SignEntry {
                    gloss: gloss.clone(),
                    clip_start: prev.last_keyframe_at,
                    clip_offset: t.offset,
                    first_keyframe_at: first,
                    last_keyframe_at: first + clip.active_duration(),
                }
            }
        };
        signs.push(entry);
    }
    Ok((signs, transitions))
}

pub fn assemble(
    seq: &GlossSequence,
    db: &SignDatabase,
    plan: &TransitionPlan,
    mut tracks: Vec<VisemeTrack>,
    meta: TimelineMeta,
) -> Result<Timeline, AssemblyError> {
    let (signs, transitions) = layout_signs(seq, db, plan, &meta.transition)?;
    let anticipation = meta.mouthing.map_or(0.0, |m| m.anticipation);
    tracks.retain(|t| !t.is_empty());
    tracks.sort_by_key(|t| t.sign);
    for track in &tracks {
        let sign = signs.get(track.sign).ok_or(AssemblyError::TrackSign {
            sign: track.sign,
            signs: signs.len(),
        })?;
        let lo = sign.first_keyframe_at - anticipation - TOLERANCE;
        let hi = sign.last_keyframe_at + TOLERANCE;
        if track.events.iter().any(|e| e.start < lo || e.end() > hi) {
            return Err(AssemblyError::TrackWindow(track.sign));
        }
    }
    Ok(Timeline {
        format: FORMAT.into(),
        version: VERSION,
        meta,
        signs,
        transitions,
        mouthing: tracks,
    })
}

impl Timeline {
    /// Time of the last keyframe of the last sign, or 0 for an empty timeline.
    pub fn end(&self) -> f64 {
        self.signs.last().map_or(0.0, |s| s.last_keyframe_at)
    }

    pub fn to_json(&self) -> Vec<u8> {
        json::to_fixed_pretty(self)
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, TimelineFormatError> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let t: Self = serde_path_to_error::deserialize(de).map_err(|e| TimelineFormatError::Parse {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        if t.format != FORMAT || t.version != VERSION {
            return Err(TimelineFormatError::Version {
                format: t.format,
                version: t.version,
            });
        }
        Ok(t)
    }

    /// Checks the scheduling invariants; returns a description of the first violation.
    pub fn check_invariants(&self) -> Result<(), String> {
        let cfg = &self.meta.transition;
        if self.transitions.len() != self.signs.len().saturating_sub(1) {
            return Err("transition count does not match sign count".into());
        }
        if let Some(first) = self.signs.first() {
            if (first.first_keyframe_at - cfg.t_min).abs() > TOLERANCE {
                return Err("first sign does not start at t_min".into());
            }
        }
        for (i, t) in self.transitions.iter().enumerate() {
            let gap = self.signs[i + 1].first_keyframe_at - self.signs[i].last_keyframe_at;
            if (gap - (t.duration - cfg.overlap)).abs() > TOLERANCE || (gap - t.gap).abs() > TOLERANCE {
                return Err(format!(
                    "boundary {i}: gap {gap} does not match duration {}",
                    t.duration
                ));
            }
            if (t.duration + t.offset - cfg.cycle()).abs() > TOLERANCE {
                return Err(format!("boundary {i}: duration + offset != {}", cfg.cycle()));
            }
        }
        let anticipation = self.meta.mouthing.map_or(0.0, |m| m.anticipation);
        let mut prev_end = f64::NEG_INFINITY;
        for track in &self.mouthing {
            let sign = self
                .signs
                .get(track.sign)
                .ok_or_else(|| format!("track references missing sign {}", track.sign))?;
            for e in &track.events {
                if e.start < sign.first_keyframe_at - anticipation - TOLERANCE
                    || e.end() > sign.last_keyframe_at + TOLERANCE
                {
                    return Err(format!("sign {}: viseme event outside its window", track.sign));
                }
                if e.start < prev_end - TOLERANCE {
                    return Err(format!("sign {}: viseme events overlap", track.sign));
                }
                prev_end = e.end();
            }
        }
        Ok(())
    }
}
