//! Acceptance suite. One line per criterion; exits nonzero if any fails.
//!
//! Run with `cargo test -p signsched-cli --test acceptance`.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use signsched::metrics::{aggregate, parse_responses, score_records, speed_score};
use signsched::mouthing::phoneme::INVENTORY;
use signsched::mouthing::{map_visemes, prune, SyllabifiedWord, VisemeSequence, VisemeToken, DEFAULT_LEXICON};
use signsched::scheduler::schedule_mouthing;
use signsched::sequence::CompositeSpan;
use signsched::transition::{
    calibrate, displacement_to_fraction, fraction_to_duration, BoundarySource, HandDisplacement,
};
use signsched::{
    compile, CompileOptions, GlossSequence, Lexicon, MouthFlags, MouthingConfig, MouthingResources, ScaleCalibration,
    SignDatabase, SynonymTable, Timeline, TransitionConfig, Viseme, VisemeMap,
};

const ENDPOINT_TOL: f64 = 1e-9;
const TIME_TOL: f64 = 1e-9;
const METRIC_TOL: f64 = 0.01;
const SEED: u64 = 0x5167_4e5c;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn load_db(name: &str) -> SignDatabase {
    SignDatabase::from_slice(&fs::read(fixtures().join(name)).unwrap(), &MouthFlags::default()).unwrap()
}

fn corpus() -> Vec<(String, GlossSequence)> {
    let mut files: Vec<PathBuf> = fs::read_dir(fixtures().join("corpus"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, GlossSequence::from_json(&fs::read(&p).unwrap()).unwrap())
        })
        .collect()
}

fn resources() -> MouthingResources {
    MouthingResources::new(Lexicon::parse(DEFAULT_LEXICON).unwrap(), VisemeMap::default())
}

fn dynamic_opts(calib: &ScaleCalibration) -> CompileOptions<'_> {
    CompileOptions {
        mouthing: Some(MouthingConfig::default()),
        calibration: Some(calib),
        ..Default::default()
    }
}

/// Random sequence over the database glosses with random non-overlapping composite spans.
fn random_sequence(rng: &mut ChaCha8Rng, glosses: &[String]) -> GlossSequence {
    let n = rng.gen_range(2..=12);
    let picked: Vec<String> = (0..n)
        .map(|_| glosses[rng.gen_range(0..glosses.len())].clone())
        .collect();
    let mut composites = Vec::new();
    let mut i = 0;
    while i + 1 < n {
        if rng.gen_bool(0.2) {
            let last = (i + rng.gen_range(1..=2)).min(n - 1);
            composites.push(CompositeSpan { first: i, last });
            i = last + 1;
        } else {
            i += 1;
        }
    }
    GlossSequence::new("", picked, vec![Vec::new(); n], composites, Vec::new()).unwrap()
}

fn c1_duration_endpoints() -> Outcome {
    let db = load_db("signs.json");
    let calib = calibrate(&db).map_err(|e| e.to_string())?;
    let p = &calib.pairs;
    let cases = [
        (&p.min_both, 0.3),
        (&p.max_both, 1.1),
        (&p.min_right, 0.3),
        (&p.max_right, 1.1),
    ];
    for ((a, b), expected) in cases {
        let seq = GlossSequence::from_glosses([a.as_str(), b.as_str()]);
        let t = compile(&seq, &db, None, &dynamic_opts(&calib)).map_err(|e| e.to_string())?;
        let got = t.transitions[0].duration;
        if (got - expected).abs() > ENDPOINT_TOL {
            return Err(format!("{a}->{b}: {got:.12} != {expected}"));
        }
    }

    let db50 = load_db("signs50.json");
    let glosses: Vec<&str> = db50.clips().map(|c| c.gloss()).collect();
    let start = Instant::now();
    let calib50 = calibrate(&db50).map_err(|e| e.to_string())?;
    let t = compile(
        &GlossSequence::from_glosses(glosses),
        &db50,
        None,
        &dynamic_opts(&calib50),
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    if t.signs.len() != 50 || elapsed >= Duration::from_secs(1) {
        return Err(format!("50-sign calibrate+compile took {elapsed:?}"));
    }
    Ok(format!(
        "4 extremal pairs hit 0.3/1.1 s within {ENDPOINT_TOL:e}; 50-sign calibrate+compile {:.1} ms (< 1 s)",
        elapsed.as_secs_f64() * 1e3
    ))
}

fn c2_offset_identity() -> Outcome {
    let db = load_db("signs50.json");
    let calib = calibrate(&db).map_err(|e| e.to_string())?;
    let glosses: Vec<String> = db.clips().map(|c| c.gloss().to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    while checked < 1000 {
        let seq = random_sequence(&mut rng, &glosses);
        let t = compile(&seq, &db, None, &dynamic_opts(&calib)).map_err(|e| e.to_string())?;
        for b in &t.transitions {
            if b.duration + b.offset != 1.2 {
                return Err(format!("duration {} + offset {} != 1.2", b.duration, b.offset));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} randomized boundaries, duration + offset == 1.2 exactly"
    ))
}

fn c3_composite_override() -> Outcome {
    let db = load_db("signs50.json");
    let calib = calibrate(&db).map_err(|e| e.to_string())?;
    let glosses: Vec<String> = db.clips().map(|c| c.gloss().to_string()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut checked = 0;

    let fixture_db = load_db("signs.json");
    let fixture_calib = calibrate(&fixture_db).map_err(|e| e.to_string())?;
    let mut cases: Vec<(GlossSequence, Timeline)> = Vec::new();
    for (_, seq) in corpus() {
        let t =
            compile(&seq, &fixture_db, Some(&resources()), &dynamic_opts(&fixture_calib)).map_err(|e| e.to_string())?;
        cases.push((seq, t));
    }
    for _ in 0..200 {
        let seq = random_sequence(&mut rng, &glosses);
        let t = compile(&seq, &db, None, &dynamic_opts(&calib)).map_err(|e| e.to_string())?;
        cases.push((seq, t));
    }
    for (seq, t) in &cases {
        for (i, b) in t.transitions.iter().enumerate() {
            if !seq.boundary_in_composite(i) {
                continue;
            }
            let touching = t.signs[i + 1].first_keyframe_at - t.signs[i].last_keyframe_at;
            if b.duration != 0.2 || b.gap != 0.0 || touching != 0.0 || b.source != BoundarySource::Composite {
                return Err(format!(
                    "boundary {i}: duration {} gap {} ({touching})",
                    b.duration, b.gap
                ));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} composite boundaries: duration 0.2 s, gap 0"))
}

fn c4_monotonicity() -> Outcome {
    let db = load_db("signs.json");
    let calib = calibrate(&db).map_err(|e| e.to_string())?;
    let cfg = TransitionConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let mut violations = 0;
    for k in 0..10_000 {
        let left_active = k % 2 == 0;
        let hi = if left_active { calib.max_both } else { calib.max_right } * 1.2;
        let d_left = rng.gen_range(0.0..hi / 2.0);
        let a = rng.gen_range(0.0..hi);
        let b = rng.gen_range(0.0..hi);
        let duration = |r: f64| {
            let disp = HandDisplacement {
                d_right: r,
                d_left,
                left_active,
            };
            fraction_to_duration(displacement_to_fraction(&disp, &calib), &cfg)
        };
        let (lo, up) = if a <= b { (a, b) } else { (b, a) };
        if duration(lo) > duration(up) {
            violations += 1;
        }
    }
    if violations > 0 {
        return Err(format!("{violations} violations"));
    }
    Ok("10000 sampled displacement pairs, 0 violations".into())
}

fn c5_pruning() -> Outcome {
    let map = VisemeMap::default();
    let per = SyllabifiedWord {
        word: "per".into(),
        syllables: vec![vec!["p".into(), "E".into(), "4".into()]],
        irregular: false,
    };
    let pruned = prune(&map_visemes(&per, &map).map_err(|e| e.to_string())?);
    let track =
        schedule_mouthing(0, (1.0, 2.0), &pruned, false, &MouthingConfig::default(), 0.0).map_err(|e| e.to_string())?;
    let got: Vec<Viseme> = track.events.iter().map(|e| e.viseme).collect();
    if got != [Viseme::B, Viseme::E] {
        return Err(format!("'per' gave {got:?}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..20);
        let seq = VisemeSequence(
            (0..len)
                .map(|i| VisemeToken {
                    viseme: Viseme::ALL[rng.gen_range(0..Viseme::ALL.len())],
                    syllable_index: i / 2,
                    syllable_final: rng.gen_bool(0.5),
                    consonant: rng.gen_bool(0.5),
                })
                .collect(),
        );
        let once = prune(&seq);
        if prune(&once) != once {
            return Err(format!("not idempotent on {:?}", seq.visemes()));
        }
    }
    Ok("'per' -> [B, E] (2 events); idempotent on 10000 random sequences".into())
}

fn c6_viseme_coverage() -> Outcome {
    let map = VisemeMap::default();
    if INVENTORY.len() != 33 {
        return Err(format!("inventory has {} phonemes", INVENTORY.len()));
    }
    let mut classes = BTreeSet::new();
    for p in &INVENTORY {
        let class = map.get(p.code).ok_or_else(|| format!("{} unmapped", p.code))?;
        classes.insert(class.viseme);
    }
    let bilabial: BTreeSet<Viseme> = ["p", "b", "m"].iter().map(|c| map.get(c).unwrap().viseme).collect();
    if bilabial.len() != 1 {
        return Err("p, b, m split across visemes".into());
    }
    if !classes.iter().all(|v| Viseme::ALL.contains(v)) {
        return Err("viseme outside the seven classes".into());
    }
    // The same checks run in the core build script against the bundled table.
    let split = signsched::mouthing::viseme::DEFAULT_MAP.replace("m\tB", "m\tC");
    if VisemeMap::parse(&split).is_ok() {
        return Err("a map splitting p/b/m was accepted".into());
    }
    let missing: String = signsched::mouthing::viseme::DEFAULT_MAP
        .lines()
        .filter(|l| !l.starts_with("u~"))
        .map(|l| format!("{l}\n"))
        .collect();
    if VisemeMap::parse(&missing).is_ok() {
        return Err("a map missing a phoneme was accepted".into());
    }
    Ok(format!(
        "33/33 phonemes map into {} classes; p/b/m share one; bad maps rejected",
        classes.len()
    ))
}

fn c7_mouthing_containment() -> Outcome {
    let db = load_db("signs.json");
    let calib = calibrate(&db).map_err(|e| e.to_string())?;
    let res = resources();
    let (mut events, mut anticipated, mut tracks) = (0, 0, 0);
    let sentences = corpus();
    for (name, seq) in &sentences {
        let t = compile(seq, &db, Some(&res), &dynamic_opts(&calib)).map_err(|e| format!("{name}: {e}"))?;
        let mut prev_end = 0.0_f64;
        for track in &t.mouthing {
            let sign = &t.signs[track.sign];
            for e in &track.events {
                if e.end() > sign.last_keyframe_at + TIME_TOL {
                    return Err(format!(
                        "{name}: sign {} event ends at {} after {}",
                        track.sign,
                        e.end(),
                        sign.last_keyframe_at
                    ));
                }
                events += 1;
            }
            let wanted = sign.first_keyframe_at - 0.1;
            let start = track.start().unwrap();
            if wanted >= 0.0 && wanted >= prev_end {
                if (start - wanted).abs() > TIME_TOL {
                    return Err(format!(
                        "{name}: sign {} starts at {start}, expected {wanted}",
                        track.sign
                    ));
                }
                anticipated += 1;
            }
            tracks += 1;
            prev_end = track.end().unwrap();
        }
    }
    if anticipated == 0 {
        return Err("no track had room for anticipation".into());
    }
    Ok(format!(
        "{} sentences, {tracks} tracks, {events} events: none past the last keyframe; {anticipated} tracks with room start 0.1 s early (tol {TIME_TOL:e})",
        sentences.len()
    ))
}

fn c8_metrics() -> Outcome {
    let two = |v: f64| (v * 100.0).round() / 100.0;
    for (l, expected) in [(3, 100.0), (2, 66.67), (4, 66.67), (1, 33.33), (5, 33.33)] {
        let got = two(speed_score(l).map_err(|e| e.to_string())?);
        if got != expected {
            return Err(format!("speed_score({l}) = {got}"));
        }
    }
    let records =
        parse_responses(&fs::read_to_string(fixtures().join("responses.csv")).unwrap()).map_err(|e| e.to_string())?;
    let syn = SynonymTable::from_csv(&fs::read_to_string(fixtures().join("synonyms.csv")).unwrap())
        .map_err(|e| e.to_string())?;
    let report = score_records(&records, &syn).map_err(|e| e.to_string())?;
    // Recomputed offline with an independent spreadsheet-style calculation.
    let oracle = [
        ("comprehension", report.comprehension, 71.666667, 30.686588),
        ("speed", report.speed, 75.757576, 26.208180),
        ("naturalness", report.naturalness, 65.454545, 25.441555),
    ];
    for (name, agg, mean, sd) in oracle {
        let got_sd = agg.sd.ok_or("missing SD")?;
        if agg.n != 11 || (agg.mean - mean).abs() > METRIC_TOL || (got_sd - sd).abs() > METRIC_TOL {
            return Err(format!("{name}: mean {} sd {got_sd}, expected {mean} / {sd}", agg.mean));
        }
    }
    let pair = aggregate(&[0.0, 100.0]).map_err(|e| e.to_string())?;
    if (pair.sd.unwrap() - 70.71).abs() > METRIC_TOL {
        return Err("two-point SD".into());
    }
    Ok(format!(
        "speed table exact to 2 dp; 11-record mean/SD within {METRIC_TOL}"
    ))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_signsched"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn c9_control_conditions(dir: &Path) -> Outcome {
    let db = fixtures().join("signs.json");
    let calib = dir.join("calibration.json");
    run_cli(&["calibrate", "--db", path(&db), "-o", path(&calib)])?;
    let mut checked = 0;
    for (name, _) in corpus() {
        let input = fixtures().join("corpus").join(&name);
        let base = [
            "compile",
            "--db",
            path(&db),
            "--input",
            path(&input),
            "--calibration",
            path(&calib),
        ];
        let constant: Vec<&str> = base.iter().copied().chain(["--constant-transition", "0.5"]).collect();
        let silent: Vec<&str> = base.iter().copied().chain(["--no-mouthing"]).collect();

        let a = run_cli(&constant)?;
        if a != run_cli(&constant)? {
            return Err(format!("{name}: constant-transition output not byte-stable"));
        }
        let t = Timeline::from_json(&a).map_err(|e| e.to_string())?;
        if t.transitions
            .iter()
            .any(|b| b.duration != 0.5 || (b.offset - 0.7).abs() > TIME_TOL)
        {
            return Err(format!("{name}: non-0.5 s boundary under --constant-transition"));
        }

        let b = run_cli(&silent)?;
        if b != run_cli(&silent)? {
            return Err(format!("{name}: no-mouthing output not byte-stable"));
        }
        let t = Timeline::from_json(&b).map_err(|e| e.to_string())?;
        if !t.mouthing.is_empty() || t.meta.mouthing.is_some() {
            return Err(format!("{name}: mouthing present under --no-mouthing"));
        }
        checked += 1;
    }
    Ok(format!(
        "{checked} sentences: --constant-transition 0.5 gives 0.5/0.7 s boundaries, --no-mouthing gives no tracks, both byte-stable"
    ))
}

fn c10_golden(dir: &Path) -> Outcome {
    let db = fixtures().join("signs.json");
    let calib = dir.join("calibration-golden.json");
    run_cli(&["calibrate", "--db", path(&db), "-o", path(&calib)])?;
    let out = run_cli(&[
        "compile",
        "--db",
        path(&db),
        "--input",
        path(&fixtures().join("corpus/s01.json")),
        "--calibration",
        path(&calib),
    ])?;
    let golden = fs::read(fixtures().join("golden/s01.timeline.json")).unwrap();
    if out != golden {
        return Err("timeline differs from golden/s01.timeline.json".into());
    }
    Ok(format!(
        "5-sign composite sentence matches the oracle golden file ({} bytes)",
        golden.len()
    ))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("duration endpoints", Box::new(c1_duration_endpoints)),
        ("offset identity", Box::new(c2_offset_identity)),
        ("composite override", Box::new(c3_composite_override)),
        ("monotonicity", Box::new(c4_monotonicity)),
        ("pruning", Box::new(c5_pruning)),
        ("viseme coverage", Box::new(c6_viseme_coverage)),
        ("mouthing containment", Box::new(c7_mouthing_containment)),
        ("metrics exactness", Box::new(c8_metrics)),
        ("control conditions", Box::new(|| c9_control_conditions(dir.path()))),
        ("end-to-end golden", Box::new(|| c10_golden(dir.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS  {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
