//! Sentence to viseme sequences: transcription, normalization, syllabification,
//! viseme mapping and pruning.

pub mod g2p;
pub mod phoneme;
pub mod syllable;
pub mod viseme;

pub use g2p::{transcribe, transcribe_words, Fallback, G2p, Lexicon, RuleG2p, DEFAULT_LEXICON};
pub use phoneme::{normalize, AsciiPhonemeString, PhonemeString};
pub use syllable::{syllabify, SyllabifiedWord};
pub use viseme::{map_visemes, prune, Viseme, VisemeMap, VisemeSequence, VisemeToken};

use crate::sequence::{assign_words, GlossSequence, SequenceError};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MouthingError {
    #[error("cannot transcribe word {0:?}")]
    Untranscribable(String),
    #[error("phoneme symbols missing from the normalization table: {0:?}")]
    UnknownSymbols(Vec<String>),
    #[error("word {0:?} has no phonemes")]
    EmptyWord(String),
    #[error("phoneme code {0:?} has no viseme")]
    Unmapped(String),
    #[error("lexicon line {line}: {message}")]
    Lexicon { line: usize, message: String },
    #[error("viseme map line {line}: {message}")]
    VisemeMap { line: u64, message: String },
    #[error(transparent)]
    Alignment(#[from] SequenceError),
}

/// Syllabified and viseme-mapped form of every word of a sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentenceVisemes {
    pub syllabified: Vec<SyllabifiedWord>,
    pub words: Vec<VisemeSequence>,
}

/// Runs transcription through viseme mapping for the whole sentence.
pub fn sentence_visemes<G: G2p + ?Sized>(
    words: &[String],
    g2p: &G,
    map: &VisemeMap,
) -> Result<SentenceVisemes, MouthingError> {
    let ascii = normalize(&transcribe_words(words, g2p)?)?;
    let syllabified = ascii
        .words
        .iter()
        .map(|w| syllabify(&w.word, &w.phonemes))
        .collect::<Result<Vec<_>, _>>()?;
    let words = syllabified
        .iter()
        .map(|w| map_visemes(w, map))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SentenceVisemes { syllabified, words })
}

/// Pruned viseme sequence for each sign: its aligned words concatenated in order,
/// then pruned as one mouthing unit.
pub fn sign_visemes<G: G2p + ?Sized>(
    seq: &GlossSequence,
    g2p: &G,
    map: &VisemeMap,
) -> Result<Vec<VisemeSequence>, MouthingError> {
    assign_words(seq)?;
    let sentence = sentence_visemes(&seq.words(), g2p, map)?;
    Ok(seq
        .alignment()
        .iter()
        .map(|indices| {
            prune(&VisemeSequence::concat(
                indices.iter().map(|&i| sentence.words[i].clone()),
            ))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Viseme::*;

    #[test]
    fn seam_between_words_is_collapsed() {
        // "casa" ends in A, "azul" starts with A
        let seq = GlossSequence::new("casa azul", vec!["CASA".into()], vec![vec![0, 1]], vec![], vec![]).unwrap();
        let units = sign_visemes(&seq, &RuleG2p, &VisemeMap::default()).unwrap();
        let alone = |w: &str| {
            let s = sentence_visemes(&[w.to_string()], &RuleG2p, &VisemeMap::default()).unwrap();
            prune(&s.words[0]).visemes()
        };
        let mut expected = alone("casa");
        for v in alone("azul") {
            if expected.last() != Some(&v) {
                expected.push(v);
            }
        }
        assert_eq!(units[0].visemes(), expected);
        assert_eq!(units[0].visemes(), vec![C, A, C, A, C, U]);
    }

    #[test]
    fn unaligned_sign_has_no_visemes() {
        let seq = GlossSequence::new(
            "eu",
            vec!["EU".into(), "CL".into()],
            vec![vec![0], vec![]],
            vec![],
            vec![],
        )
        .unwrap();
        let units = sign_visemes(&seq, &RuleG2p, &VisemeMap::default()).unwrap();
        assert!(!units[0].is_empty());
        assert!(units[1].is_empty());
    }
}
