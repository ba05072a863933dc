use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use signsched::metrics::{comprehension_score, naturalness_score, speed_score};
use signsched::mouthing::phoneme::INVENTORY;
use signsched::mouthing::{prune, syllabify, Viseme, VisemeSequence, VisemeToken};
use signsched::scheduler::schedule_mouthing;
use signsched::transition::{
    calibrate, displacement_to_fraction, fraction_to_duration, hand_displacement, offset_for, ExtremalPairs,
    HandDisplacement,
};
use signsched::{
    Checksum, Keyframe, MouthFlags, MouthingConfig, ResponseRecord, ScaleCalibration, SignClip, SignDatabase,
    SynonymTable, TransitionConfig,
};

fn pairs() -> ExtremalPairs {
    let p = || ("A".to_string(), "B".to_string());
    ExtremalPairs {
        min_both: p(),
        max_both: p(),
        min_right: p(),
        max_right: p(),
    }
}

fn fixed_scale() -> ScaleCalibration {
    ScaleCalibration::new(0.02, 0.9, 0.01, 0.5, pairs(), Checksum::of(b"")).unwrap()
}

fn arb_point() -> impl Strategy<Value = [f64; 3]> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
}

fn arb_clip(gloss: String) -> impl Strategy<Value = SignClip> {
    (
        prop::collection::vec((arb_point(), arb_point()), 2..5),
        0.1..1.5f64,
        any::<bool>(),
    )
        .prop_map(move |(poses, active, still_left)| {
            let n = poses.len();
            let keyframes = poses
                .into_iter()
                .enumerate()
                .map(|(k, (r, l))| Keyframe {
                    t: 1.0 + active * k as f64 / (n - 1) as f64,
                    right_hand: r,
                    left_hand: if still_left { [0.0, -0.3, 0.0] } else { l },
                    face: BTreeSet::new(),
                })
                .collect();
            SignClip::new(&gloss, keyframes, &MouthFlags::default()).unwrap()
        })
}

fn sq(a: [f64; 3], b: [f64; 3]) -> f64 {
    (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2])
}

fn arb_token() -> impl Strategy<Value = VisemeToken> {
    (0..Viseme::ALL.len(), 0usize..6, any::<bool>(), any::<bool>()).prop_map(|(v, s, fin, cons)| VisemeToken {
        viseme: Viseme::ALL[v],
        syllable_index: s,
        syllable_final: fin,
        consonant: cons,
    })
}

/// Two separate passes, written without reference to the library implementation.
fn naive_prune(tokens: &[VisemeToken]) -> Vec<Viseme> {
    let kept: Vec<Viseme> = tokens
        .iter()
        .filter(|t| !(t.viseme == Viseme::C && t.consonant && t.syllable_final))
        .map(|t| t.viseme)
        .collect();
    let mut out: Vec<Viseme> = Vec::new();
    for (i, v) in kept.iter().enumerate() {
        if i == 0 || kept[i - 1] != *v {
            out.push(*v);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn duration_monotone_in_displacement(a in 0.0..1.5f64, b in 0.0..1.5f64, left in 0.0..0.5f64, both in any::<bool>()) {
        let calib = fixed_scale();
        let cfg = TransitionConfig::default();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let d = |r: f64| {
            let disp = HandDisplacement { d_right: r, d_left: left, left_active: both };
            fraction_to_duration(displacement_to_fraction(&disp, &calib), &cfg)
        };
        prop_assert!(d(lo) <= d(hi));
        prop_assert!(d(lo) >= cfg.t_min && d(hi) <= cfg.t_max);
    }

    #[test]
    fn offset_identity_exact(f in 0.0..=1.0f64) {
        let cfg = TransitionConfig::default();
        let d = fraction_to_duration(f, &cfg);
        let off = offset_for(d, &cfg).unwrap();
        prop_assert_eq!(d + off, 1.2);
    }

    #[test]
    fn hand_displacement_matches_oracle(prev in arb_clip("P".into()), next in arb_clip("N".into())) {
        let disp = hand_displacement(&prev, &next);
        let last = prev.keyframes().last().unwrap();
        let first = &next.keyframes()[0];
        prop_assert_eq!(disp.d_right, sq(last.right_hand, first.right_hand));
        prop_assert_eq!(disp.d_left, sq(last.left_hand, first.left_hand));
        prop_assert_eq!(disp.left_active, prev.left_moves() || next.left_moves());
    }

    #[test]
    fn calibration_extremes_match_scan(clips in prop::collection::vec(any::<u8>(), 2..6)
        .prop_flat_map(|v| (0..v.len()).map(|i| arb_clip(format!("G{i}"))).collect::<Vec<_>>()))
    {
        let db = SignDatabase::from_clips(clips.clone()).unwrap();
        let Ok(calib) = calibrate(&db) else { return Ok(()); };
        let mut both = Vec::new();
        let mut right = Vec::new();
        for (i, p) in clips.iter().enumerate() {
            for (j, n) in clips.iter().enumerate() {
                if i == j { continue; }
                let (l, f) = (p.keyframes().last().unwrap(), &n.keyframes()[0]);
                let r = sq(l.right_hand, f.right_hand);
                if p.left_moves() || n.left_moves() {
                    both.push(r + sq(l.left_hand, f.left_hand));
                } else {
                    right.push(r);
                }
            }
        }
        let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if both.is_empty() { both = right.clone(); }
        if right.is_empty() { right = both.clone(); }
        prop_assert_eq!(calib.min_both, min(&both));
        prop_assert_eq!(calib.max_both, max(&both));
        prop_assert_eq!(calib.min_right, min(&right));
        prop_assert_eq!(calib.max_right, max(&right));
    }

    #[test]
    fn prune_matches_naive_and_is_idempotent(tokens in prop::collection::vec(arb_token(), 0..24)) {
        let seq = VisemeSequence(tokens.clone());
        let once = prune(&seq);
        prop_assert_eq!(once.visemes(), naive_prune(&tokens));
        prop_assert_eq!(prune(&once), once.clone());
        prop_assert!(once.visemes().windows(2).all(|w| w[0] != w[1]));
    }

    #[test]
    fn syllables_concatenate_to_input(idx in prop::collection::vec(0..INVENTORY.len(), 1..12)) {
        let codes: Vec<String> = idx.iter().map(|&i| INVENTORY[i].code.to_string()).collect();
        let w = syllabify("w", &codes).unwrap();
        prop_assert_eq!(w.phonemes().cloned().collect::<Vec<_>>(), codes.clone());
        let has_vowel = codes.iter().any(|c| signsched::mouthing::phoneme::is_vowel_code(c));
        if has_vowel && !w.irregular {
            for s in &w.syllables {
                prop_assert_eq!(s.iter().filter(|c| signsched::mouthing::phoneme::is_vowel_code(c)).count(), 1);
            }
        }
    }

    #[test]
    fn comprehension_order_invariant(
        reference in prop::collection::vec(0u8..6, 1..6),
        response in prop::collection::vec(0u8..8, 0..7),
        seed in any::<u64>(),
    ) {
        let mut syn = SynonymTable::default();
        syn.add("G1", "G6");
        syn.add("G2", "G7");
        syn.add("G6", "G3");
        let glosses = |v: &[u8]| v.iter().map(|g| format!("G{g}")).collect::<Vec<_>>();
        let mut shuffled = glosses(&response);
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let a = ResponseRecord::new(glosses(&reference), glosses(&response), 3, 3).unwrap();
        let b = ResponseRecord::new(glosses(&reference), shuffled, 3, 3).unwrap();
        let score = comprehension_score(&a, &syn);
        prop_assert!((0.0..=100.0).contains(&score));
        prop_assert_eq!(score, comprehension_score(&b, &syn));
    }

    #[test]
    fn mouthing_stays_in_window(
        start in 0.0..5.0f64,
        len in 0.05..2.0f64,
        n in 1usize..12,
        not_before in 0.0..6.0f64,
    ) {
        let tokens = (0..n).map(|i| VisemeToken {
            viseme: Viseme::ALL[i % 7],
            syllable_index: i,
            syllable_final: false,
            consonant: false,
        }).collect();
        let cfg = MouthingConfig::default();
        let end = start + len;
        let nb = not_before.min(end - 1e-3);
        let track = schedule_mouthing(0, (start, end), &VisemeSequence(tokens), false, &cfg, nb).unwrap();
        prop_assert_eq!(track.events.len(), n);
        prop_assert!(track.end().unwrap() <= end + 1e-9);
        prop_assert!(track.start().unwrap() >= (start - cfg.anticipation).max(0.0).max(nb) - 1e-12);
        for e in &track.events {
            prop_assert!(e.duration > 0.0 && e.duration <= cfg.max_viseme_duration + 1e-12);
        }
    }
}

#[test]
fn likert_tables() {
    for k in 0..=2u8 {
        assert_eq!(speed_score(3 - k).unwrap(), speed_score(3 + k).unwrap());
    }
    for l in 1..5u8 {
        assert!(naturalness_score(l).unwrap() < naturalness_score(l + 1).unwrap());
    }
}
