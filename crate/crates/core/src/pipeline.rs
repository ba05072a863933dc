//! End-to-end compilation of a gloss sequence into a timeline.

use crate::mouthing::{sign_visemes, Fallback, Lexicon, MouthingError, RuleG2p, VisemeMap};
use crate::scheduler::{schedule_mouthing, MouthingConfig, ScheduleError};
use crate::sequence::GlossSequence;
use crate::sign_store::SignDatabase;
use crate::timeline::{assemble, layout_signs, AssemblyError, Timeline, TimelineMeta};
use crate::transition::{
    plan_constant, plan_transitions, CalibrationError, PlanError, ScaleCalibration, TransitionConfig,
};
use crate::Checksum;

/// Failure of one compilation stage; the variant names the stage.
#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CompileError {
    #[error("calibration: {0}")]
    Calibration(#[from] CalibrationError),
    #[error("transition planning: {0}")]
    Transition(#[from] PlanError),
    #[error("mouthing: {0}")]
    Mouthing(#[from] MouthingError),
    #[error("mouthing scheduling: {0}")]
    Scheduling(#[from] ScheduleError),
    #[error("timeline assembly: {0}")]
    Assembly(#[from] AssemblyError),
}

impl CompileError {
    pub fn stage(&self) -> &'static str {
        match self {
            Self::Calibration(_) => "calibration",
            Self::Transition(_) => "transition",
            Self::Mouthing(_) => "mouthing",
            Self::Scheduling(_) => "scheduling",
            Self::Assembly(_) => "assembly",
        }
    }
}

/// Pronunciation lexicon (with rule fallback) and phoneme-to-viseme table.
#[derive(Debug, Clone)]
pub struct MouthingResources {
    pub g2p: Fallback<Lexicon, RuleG2p>,
    pub visemes: VisemeMap,
}

impl MouthingResources {
    pub fn new(lexicon: Lexicon, visemes: VisemeMap) -> Self {
        Self {
            g2p: lexicon.or_rules(),
            visemes,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CompileOptions<'a> {
    pub transition: TransitionConfig,
    /// `None` disables mouthing.
    pub mouthing: Option<MouthingConfig>,
    /// Fixed transition duration used at every boundary instead of the dynamic plan.
    pub constant_transition: Option<f64>,
    /// Required unless `constant_transition` is set.
    pub calibration: Option<&'a ScaleCalibration>,
    /// Accept a calibration made for a different database.
    pub force: bool,
}

pub fn compile(
    seq: &GlossSequence,
    db: &SignDatabase,
    resources: Option<&MouthingResources>,
    opts: &CompileOptions<'_>,
) -> Result<Timeline, CompileError> {
    let (plan, calibration_checksum) = match opts.constant_transition {
        Some(duration) => (plan_constant(seq, db, duration, &opts.transition)?, None),
        None => {
            let calib = opts.calibration.ok_or(CalibrationError::Missing)?;
            calib.check_database(db, opts.force)?;
            (
                plan_transitions(seq, db, calib, &opts.transition)?,
                Some(Checksum::of(&calib.to_json())),
            )
        }
    };

    let mut tracks = Vec::new();
    let mouthing = match (opts.mouthing, resources) {
        (Some(cfg), Some(res)) => Some((cfg, res)),
        _ => None,
    };
    if let Some((cfg, res)) = mouthing {
        cfg.validate()?;
        let units = sign_visemes(seq, &res.g2p, &res.visemes)?;
        let (signs, _) = layout_signs(seq, db, &plan, &opts.transition)?;
        let mut not_before = 0.0_f64;
        for (i, (sign, unit)) in signs.iter().zip(&units).enumerate() {
            let clip = db
                .get(&sign.gloss)
                .ok_or_else(|| AssemblyError::UnknownGloss(sign.gloss.clone()))?;
            let track = schedule_mouthing(
                i,
                (sign.first_keyframe_at, sign.last_keyframe_at),
                unit,
                clip.mouth_occupied(),
                &cfg,
                not_before,
            )?;
            if let Some(end) = track.end() {
                not_before = end;
            }
            tracks.push(track);
        }
    }

    let meta = TimelineMeta {
        database_checksum: db.checksum().clone(),
        calibration_checksum,
        transition: opts.transition,
        constant_transition: opts.constant_transition,
        mouthing: mouthing.map(|(cfg, _)| cfg),
    };
    Ok(assemble(seq, db, &plan, tracks, meta)?)
}
