//! Timing of viseme sequences against sign playback windows.
//!
//! Visemes of one sign share a duration of `min(window / n, max_viseme_duration)` and
//! start `anticipation` seconds before the sign's first keyframe, never before time
//! zero or the end of the previous track. The last viseme never runs past the sign's
//! last keyframe.

use serde::{Deserialize, Serialize};

use crate::mouthing::{Viseme, VisemeSequence};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ScheduleError {
    #[error("sign window start {start} is not before its end {end}")]
    Window { start: f64, end: f64 },
    #[error("invalid mouthing config: {0}")]
    Config(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MouthingConfig {
    pub anticipation: f64,
    pub max_viseme_duration: f64,
}

impl Default for MouthingConfig {
    fn default() -> Self {
        Self {
            anticipation: 0.1,
            max_viseme_duration: 0.35,
        }
    }
}

impl MouthingConfig {
    pub fn validate(&self) -> Result<(), ScheduleError> {
        if !(self.anticipation >= 0.0 && self.anticipation.is_finite()) {
            return Err(ScheduleError::Config("anticipation must be >= 0"));
        }
        if !(self.max_viseme_duration > 0.0 && self.max_viseme_duration.is_finite()) {
            return Err(ScheduleError::Config("max_viseme_duration must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisemeEvent {
    pub viseme: Viseme,
    pub start: f64,
    pub duration: f64,
}

impl VisemeEvent {
    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisemeTrack {
    /// Index of the sign in the gloss sequence.
    pub sign: usize,
    pub events: Vec<VisemeEvent>,
}

impl VisemeTrack {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn start(&self) -> Option<f64> {
        self.events.first().map(|e| e.start)
    }

    pub fn end(&self) -> Option<f64> {
        self.events.last().map(VisemeEvent::end)
    }
}

/// Schedules one sign's visemes inside `window = (first keyframe, last keyframe)`.
///
/// `not_before` is the earliest allowed start, normally the end of the previous track.
pub fn schedule_mouthing(
    sign: usize,
    window: (f64, f64),
    visemes: &VisemeSequence,
    mouth_occupied: bool,
    cfg: &MouthingConfig,
    not_before: f64,
) -> Result<VisemeTrack, ScheduleError> {
    let (start, end) = window;
    if start.partial_cmp(&end) != Some(std::cmp::Ordering::Less) {
        return Err(ScheduleError::Window { start, end });
    }
    cfg.validate()?;
    let mut track = VisemeTrack {
        sign,
        events: Vec::new(),
    };
    if mouth_occupied || visemes.is_empty() {
        return Ok(track);
    }
    let n = visemes.len() as f64;
    let track_start = (start - cfg.anticipation).max(0.0).max(not_before);
    let mut duration = ((end - start) / n).min(cfg.max_viseme_duration);
    if track_start + n * duration > end {
        duration = (end - track_start) / n;
    }
    track.events = visemes
        .0
        .iter()
        .enumerate()
        .map(|(k, t)| VisemeEvent {
            viseme: t.viseme,
            start: track_start + k as f64 * duration,
            duration,
        })
        .collect();
    Ok(track)
}
