//! Scoring of evaluation responses: comprehension, transition speed and naturalness.
//!
//! Response file: CSV with header `reference,response,speed,naturalness`; gloss lists
//! are space-separated inside their cell, Likert values are integers 1 to 5.
//!
//! Synonym file: CSV without header, one gloss per row followed by its accepted
//! equivalents in the remaining columns. Synonymy is made symmetric on load.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MetricsError {
    #[error("Likert value {0} outside 1..=5")]
    Likert(u8),
    #[error("reference gloss list is empty")]
    EmptyReference,
    #[error("no scores to aggregate")]
    EmptyScores,
    #[error("no records")]
    NoRecords,
    #[error("row {row}: {message}")]
    Row { row: u64, message: String },
}

fn normalize_gloss(g: &str) -> String {
    g.trim().to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseRecord {
    reference: Vec<String>,
    response: Vec<String>,
    likert_speed: u8,
    likert_naturalness: u8,
}

fn check_likert(v: u8) -> Result<u8, MetricsError> {
    if (1..=5).contains(&v) {
        Ok(v)
    } else {
        Err(MetricsError::Likert(v))
    }
}

impl ResponseRecord {
    pub fn new(
        reference: Vec<String>,
        response: Vec<String>,
        likert_speed: u8,
        likert_naturalness: u8,
    ) -> Result<Self, MetricsError> {
        if reference.is_empty() {
            return Err(MetricsError::EmptyReference);
        }
        Ok(Self {
            reference,
            response,
            likert_speed: check_likert(likert_speed)?,
            likert_naturalness: check_likert(likert_naturalness)?,
        })
    }

    pub fn reference(&self) -> &[String] {
        &self.reference
    }

    pub fn response(&self) -> &[String] {
        &self.response
    }

    pub fn likert_speed(&self) -> u8 {
        self.likert_speed
    }

    pub fn likert_naturalness(&self) -> u8 {
        self.likert_naturalness
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymTable {
    equivalents: BTreeMap<String, BTreeSet<String>>,
}

impl SynonymTable {
    pub fn add(&mut self, a: &str, b: &str) {
        let (a, b) = (normalize_gloss(a), normalize_gloss(b));
        if a == b {
            return;
        }
        self.equivalents.entry(a.clone()).or_default().insert(b.clone());
        self.equivalents.entry(b).or_default().insert(a);
    }

    pub fn are_synonyms(&self, a: &str, b: &str) -> bool {
        self.equivalents
            .get(&normalize_gloss(a))
            .is_some_and(|s| s.contains(&normalize_gloss(b)))
    }

    pub fn from_csv(text: &str) -> Result<Self, MetricsError> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut table = Self::default();
        for record in reader.records() {
            let record = record.map_err(|e| row_error(&e))?;
            let mut fields = record.iter().filter(|f| !f.is_empty());
            if let Some(gloss) = fields.next() {
                for eq in fields {
                    table.add(gloss, eq);
                }
            }
        }
        Ok(table)
    }
}

fn row_error(e: &csv::Error) -> MetricsError {
    MetricsError::Row {
        row: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

fn gloss_matches(reference: &str, response: &str, syn: &SynonymTable) -> bool {
    normalize_gloss(reference) == normalize_gloss(response) || syn.are_synonyms(reference, response)
}

/// Percentage of reference glosses matched by distinct response glosses.
///
/// Uses a maximum bipartite matching so the score does not depend on response order.
pub fn comprehension_score(r: &ResponseRecord, syn: &SynonymTable) -> f64 {
    let edges: Vec<Vec<usize>> = r
        .reference
        .iter()
        .map(|g| {
            r.response
                .iter()
                .enumerate()
                .filter(|(_, h)| gloss_matches(g, h, syn))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; r.response.len()];

    fn augment(i: usize, edges: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &j in &edges[i] {
            if seen[j] {
                continue;
            }
            seen[j] = true;
            if owner[j].is_none_or(|k| augment(k, edges, owner, seen)) {
                owner[j] = Some(i);
                return true;
            }
        }
        false
    }

    let matched = (0..r.reference.len())
        .filter(|&i| {
            let mut seen = vec![false; r.response.len()];
            augment(i, &edges, &mut owner, &mut seen)
        })
        .count();
    100.0 * matched as f64 / r.reference.len() as f64
}

/// 3 is optimal (100%); each step towards either end of the scale costs a third.
pub fn speed_score(likert: u8) -> Result<f64, MetricsError> {
    let l = check_likert(likert)?;
    let distance = (i32::from(l) - 3).abs();
    Ok(100.0 * f64::from(3 - distance) / 3.0)
}

/// Linear, 5 being 100%.
pub fn naturalness_score(likert: u8) -> Result<f64, MetricsError> {
    Ok(f64::from(check_likert(likert)?) * 20.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); `None` for a single score.
    pub sd: Option<f64>,
}

pub fn aggregate(scores: &[f64]) -> Result<Aggregate, MetricsError> {
    if scores.is_empty() {
        return Err(MetricsError::EmptyScores);
    }
    let n = scores.len();
    let mean = scores.iter().sum::<f64>() / n as f64;
    let sd = (n > 1).then(|| {
        let ss: f64 = scores.iter().map(|s| (s - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    });
    Ok(Aggregate { n, mean, sd })
}

pub fn parse_responses(text: &str) -> Result<Vec<ResponseRecord>, MetricsError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| row_error(&e))?;
        let row = record.position().map_or(0, |p| p.line());
        let bad = |message: String| MetricsError::Row { row, message };
        if record.len() != 4 {
            return Err(bad(format!("expected 4 columns, found {}", record.len())));
        }
        let glosses = |s: &str| s.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        let likert = |s: &str, name: &str| {
            s.parse::<u8>()
                .map_err(|_| bad(format!("{name} must be an integer 1-5, got {s:?}")))
        };
        let rec = ResponseRecord::new(
            glosses(&record[0]),
            glosses(&record[1]),
            likert(&record[2], "speed")?,
            likert(&record[3], "naturalness")?,
        )
        .map_err(|e| bad(e.to_string()))?;
        records.push(rec);
    }
    if records.is_empty() {
        return Err(MetricsError::NoRecords);
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordScores {
    pub comprehension: f64,
    pub speed: f64,
    pub naturalness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub records: Vec<RecordScores>,
    pub comprehension: Aggregate,
    pub speed: Aggregate,
    pub naturalness: Aggregate,
}

pub fn score_records(records: &[ResponseRecord], syn: &SynonymTable) -> Result<ScoreReport, MetricsError> {
    let scores = records
        .iter()
        .map(|r| {
            Ok(RecordScores {
                comprehension: comprehension_score(r, syn),
                speed: speed_score(r.likert_speed)?,
                naturalness: naturalness_score(r.likert_naturalness)?,
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()?;
    let column = |f: fn(&RecordScores) -> f64| aggregate(&scores.iter().map(f).collect::<Vec<_>>());
    Ok(ScoreReport {
        comprehension: column(|s| s.comprehension)?,
        speed: column(|s| s.speed)?,
        naturalness: column(|s| s.naturalness)?,
        records: scores,
    })
}

impl ScoreReport {
    /// CSV report: one row per record, then `mean` and `sd` rows. An undefined SD is blank.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("record,comprehension,speed,naturalness\n");
        for (i, r) in self.records.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{:.2},{:.2},{:.2}",
                i + 1,
                r.comprehension,
                r.speed,
                r.naturalness
            );
        }
        let _ = writeln!(
            out,
            "mean,{:.2},{:.2},{:.2}",
            self.comprehension.mean, self.speed.mean, self.naturalness.mean
        );
        let sd = |a: &Aggregate| a.sd.map(|v| format!("{v:.2}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "sd,{},{},{}",
            sd(&self.comprehension),
            sd(&self.speed),
            sd(&self.naturalness)
        );
        out
    }
}
