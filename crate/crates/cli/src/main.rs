use std::error::Error as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use signsched::metrics::{parse_responses, score_records};
use signsched::mouthing::DEFAULT_LEXICON;
use signsched::transition::calibrate;
use signsched::{
    compile, CompileOptions, GlossSequence, Lexicon, MouthingResources, ScaleCalibration, SignDatabase, SynonymTable,
    VisemeMap,
};

mod config;

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "signsched",
    version,
    about = "Timing compiler for sign language avatar animation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan all sign pairs of a database for the displacement extremes.
    Calibrate {
        #[arg(long)]
        db: PathBuf,
        /// Calibration file to write; stdout if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compile a gloss sequence into an animation timeline.
    Compile {
        #[arg(long)]
        db: PathBuf,
        /// Gloss sequence file (JSON).
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        calibration: Option<PathBuf>,
        /// Phoneme-to-viseme table; the bundled one if omitted.
        #[arg(long)]
        visemes: Option<PathBuf>,
        /// Pronunciation lexicon; the bundled one if omitted.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Replaces the sentence stored in the input file.
        #[arg(long)]
        sentence: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        no_mouthing: bool,
        /// Use this transition duration (seconds) at every boundary.
        #[arg(long, value_name = "SECONDS")]
        constant_transition: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Accept a calibration computed for a different database.
        #[arg(long)]
        force: bool,
    },
    /// Score evaluation responses.
    Score {
        #[arg(long)]
        responses: PathBuf,
        #[arg(long)]
        synonyms: Option<PathBuf>,
        /// Also write the report here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// An error tagged with the pipeline stage it came from.
struct StageError {
    stage: &'static str,
    error: anyhow::Error,
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, StageError>;
}

impl<T, E: Into<anyhow::Error>> Stage<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, StageError> {
        self.map_err(|e| StageError { stage, error: e.into() })
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(output: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match output {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => std::io::stdout().write_all(bytes).context("writing stdout"),
    }
}

fn load_db(path: &Path, cfg: &RunConfig) -> Result<SignDatabase> {
    let bytes = read(path)?;
    SignDatabase::from_slice(&bytes, &cfg.mouth_flags).with_context(|| format!("loading {}", path.display()))
}

fn run(cli: Cli) -> Result<(), StageError> {
    match cli.command {
        Command::Calibrate { db, output, config } => {
            let cfg = RunConfig::load(config.as_deref()).stage("config")?;
            let db = load_db(&db, &cfg).stage("sign database")?;
            let calib = calibrate(&db).stage("calibration")?;
            emit(output.as_deref(), &calib.to_json()).stage("output")?;
            let p = &calib.pairs;
            let summary = format!(
                "both hands: min {} -> {} ({}), max {} -> {} ({})\nright hand: min {} -> {} ({}), max {} -> {} ({})\n",
                p.min_both.0,
                p.min_both.1,
                calib.min_both,
                p.max_both.0,
                p.max_both.1,
                calib.max_both,
                p.min_right.0,
                p.min_right.1,
                calib.min_right,
                p.max_right.0,
                p.max_right.1,
                calib.max_right,
            );
            // With the calibration on stdout the summary must not corrupt it.
            if output.is_some() {
                print!("{summary}");
            } else {
                eprint!("{summary}");
            }
        }
        Command::Compile {
            db,
            input,
            calibration,
            visemes,
            lexicon,
            sentence,
            output,
            no_mouthing,
            constant_transition,
            config,
            force,
        } => {
            let cfg = RunConfig::load(config.as_deref()).stage("config")?;
            let db = load_db(&db, &cfg).stage("sign database")?;
            let mut seq = read(&input)
                .and_then(|b| GlossSequence::from_json(&b).map_err(Into::into))
                .with_context(|| format!("loading {}", input.display()))
                .stage("input")?;
            if let Some(s) = sentence {
                seq = seq.with_sentence(s);
            }
            let calib = match (&calibration, constant_transition) {
                (Some(path), None) => Some(
                    read(path)
                        .and_then(|b| ScaleCalibration::from_json(&b).map_err(Into::into))
                        .with_context(|| format!("loading {}", path.display()))
                        .stage("calibration")?,
                ),
                _ => None,
            };
            let resources = if no_mouthing {
                None
            } else {
                let lex_text = match &lexicon {
                    Some(p) => read_text(p).stage("lexicon")?,
                    None => DEFAULT_LEXICON.to_string(),
                };
                let lex = Lexicon::parse(&lex_text).stage("lexicon")?;
                let map = match &visemes {
                    Some(p) => VisemeMap::parse(&read_text(p).stage("viseme map")?).stage("viseme map")?,
                    None => VisemeMap::default(),
                };
                Some(MouthingResources::new(lex, map))
            };
            let opts = CompileOptions {
                transition: cfg.transition,
                mouthing: resources.as_ref().map(|_| cfg.mouthing),
                constant_transition,
                calibration: calib.as_ref(),
                force,
            };
            let timeline = compile(&seq, &db, resources.as_ref(), &opts).map_err(|e| StageError {
                stage: e.stage(),
                // the stage is already in the tag; report the underlying cause only
                error: anyhow::anyhow!(e.source().map_or_else(|| e.to_string(), ToString::to_string)),
            })?;
            emit(output.as_deref(), &timeline.to_json()).stage("output")?;
        }
        Command::Score {
            responses,
            synonyms,
            output,
        } => {
            let records = read_text(&responses)
                .and_then(|t| parse_responses(&t).map_err(Into::into))
                .with_context(|| format!("loading {}", responses.display()))
                .stage("responses")?;
            let syn = match &synonyms {
                Some(p) => read_text(p)
                    .and_then(|t| SynonymTable::from_csv(&t).map_err(Into::into))
                    .with_context(|| format!("loading {}", p.display()))
                    .stage("synonyms")?,
                None => SynonymTable::default(),
            };
            let report = score_records(&records, &syn).stage("scoring")?.to_csv();
            print!("{report}");
            if let Some(path) = output {
                emit(Some(&path), report.as_bytes()).stage("output")?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(StageError { stage, error }) => {
            eprintln!("error [{stage}]: {error:#}");
            ExitCode::FAILURE
        }
    }
}
