//! Phoneme to viseme mapping and co-articulation pruning.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::phoneme::INVENTORY;
use super::syllable::SyllabifiedWord;
use super::MouthingError;

/// Mouth shapes available on the avatar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Viseme {
    A,
    B,
    /// Slight open mouth.
    C,
    E,
    F,
    O,
    U,
}

impl Viseme {
    pub const ALL: [Viseme; 7] = [
        Viseme::A,
        Viseme::B,
        Viseme::C,
        Viseme::E,
        Viseme::F,
        Viseme::O,
        Viseme::U,
    ];
}

impl fmt::Display for Viseme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Viseme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.to_string() == s)
            .ok_or_else(|| format!("unknown viseme class {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VisemeClass {
    pub viseme: Viseme,
    pub consonant: bool,
}

/// Total map from the 33 phoneme codes to viseme classes.
///
/// File format: tab-separated `code<TAB>viseme<TAB>consonant` records, consonant being
/// `0` or `1`. `#` starts a comment line. Every inventory code must appear exactly
/// once, and /p/, /b/, /m/ must share a class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisemeMap {
    entries: BTreeMap<String, VisemeClass>,
}

pub const DEFAULT_MAP: &str = include_str!("../../data/visemes.tsv");

impl Default for VisemeMap {
    fn default() -> Self {
        Self::parse(DEFAULT_MAP).expect("bundled viseme map is valid")
    }
}

impl VisemeMap {
    pub fn parse(text: &str) -> Result<Self, MouthingError> {
        let err = |line: u64, message: String| MouthingError::VisemeMap { line, message };
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(b'\t')
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                err(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            let [code, viseme, consonant] = [0, 1, 2].map(|i| record.get(i).unwrap_or(""));
            if record.len() != 3 {
                return Err(err(line, format!("expected 3 fields, found {}", record.len())));
            }
            if !INVENTORY.iter().any(|p| p.code == code) {
                return Err(err(line, format!("unknown phoneme code {code:?}")));
            }
            let viseme = viseme.parse::<Viseme>().map_err(|m| err(line, m))?;
            let consonant = match consonant {
                "1" => true,
                "0" => false,
                other => return Err(err(line, format!("consonant flag must be 0 or 1, got {other:?}"))),
            };
            if entries
                .insert(code.to_string(), VisemeClass { viseme, consonant })
                .is_some()
            {
                return Err(err(line, format!("duplicate phoneme code {code:?}")));
            }
        }
        let missing: Vec<&str> = INVENTORY
            .iter()
            .map(|p| p.code)
            .filter(|c| !entries.contains_key(*c))
            .collect();
        if !missing.is_empty() {
            return Err(err(0, format!("missing phoneme codes {missing:?}")));
        }
        let bilabial: Vec<Viseme> = ["p", "b", "m"].iter().map(|c| entries[*c].viseme).collect();
        if bilabial.iter().any(|v| *v != bilabial[0]) {
            return Err(err(0, format!("/p/, /b/, /m/ must share a viseme, got {bilabial:?}")));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, code: &str) -> Option<VisemeClass> {
        self.entries.get(code).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, VisemeClass)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// One untimed viseme with its syllable context.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VisemeToken {
    pub viseme: Viseme,
    pub syllable_index: usize,
    pub syllable_final: bool,
    pub consonant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VisemeSequence(pub Vec<VisemeToken>);

impl VisemeSequence {
    pub fn visemes(&self) -> Vec<Viseme> {
        self.0.iter().map(|t| t.viseme).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat<I: IntoIterator<Item = VisemeSequence>>(parts: I) -> Self {
        Self(parts.into_iter().flat_map(|p| p.0).collect())
    }
}

pub fn map_visemes(word: &SyllabifiedWord, map: &VisemeMap) -> Result<VisemeSequence, MouthingError> {
    let mut out = Vec::new();
    for (syllable_index, syllable) in word.syllables.iter().enumerate() {
        for (i, code) in syllable.iter().enumerate() {
            let class = map.get(code).ok_or_else(|| MouthingError::Unmapped(code.clone()))?;
            out.push(VisemeToken {
                viseme: class.viseme,
                syllable_index,
                syllable_final: i + 1 == syllable.len(),
                consonant: class.consonant,
            });
        }
    }
    Ok(VisemeSequence(out))
}

/// Drops syllable-final class-C consonants, then collapses runs of equal visemes.
pub fn prune(seq: &VisemeSequence) -> VisemeSequence {
    let mut out: Vec<VisemeToken> = Vec::with_capacity(seq.len());
    for t in &seq.0 {
        if t.viseme == Viseme::C && t.consonant && t.syllable_final {
            continue;
        }
        if out.last().is_some_and(|last| last.viseme == t.viseme) {
            continue;
        }
        out.push(*t);
    }
    VisemeSequence(out)
}
