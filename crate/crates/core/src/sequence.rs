//! Translated gloss sequences and their alignment to the source sentence.
//!
//! Input file format (JSON):
//!
//! ```json
//! {
//!   "sentence": "Eu comi melancia em casa.",
//!   "glosses": ["EU", "CASA", "VERMELHO", "MELÃO", "COMER"],
//!   "alignment": [[0], [3, 4], [2], [], [1]],
//!   "composites": [{ "first": 2, "last": 3 }],
//!   "negation": [false, false, false, false, false]
//! }
//! ```
//!
//! `alignment[i]` lists indices into the tokenized sentence for gloss `i`.
//! Composite spans are inclusive gloss-index ranges. `negation` is optional.

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SequenceError {
    #[error("gloss sequence parse error at {path}: {message}")]
    Format { path: String, message: String },
    #[error("alignment has {alignment} entries for {glosses} glosses")]
    AlignmentLength { alignment: usize, glosses: usize },
    #[error("negation marks have {marks} entries for {glosses} glosses")]
    NegationLength { marks: usize, glosses: usize },
    #[error("composite span {first}..={last} is out of bounds for {len} glosses")]
    SpanOutOfBounds { first: usize, last: usize, len: usize },
    #[error("composite span {first}..={last} must cover at least two glosses")]
    SpanTooShort { first: usize, last: usize },
    #[error("composite spans {0:?} and {1:?} overlap")]
    SpansOverlap((usize, usize), (usize, usize)),
    #[error("gloss {gloss} is aligned to word index {index}, but the sentence has {words} words")]
    AlignmentOutOfRange { gloss: usize, index: usize, words: usize },
}

/// Inclusive range of gloss indices forming one composite utterance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeSpan {
    pub first: usize,
    pub last: usize,
}

impl CompositeSpan {
    /// True when the boundary between glosses `i` and `i + 1` lies inside this span.
    pub fn contains_boundary(&self, i: usize) -> bool {
        self.first <= i && i < self.last
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlossSequence {
    #[serde(default)]
    sentence: String,
    glosses: Vec<String>,
    alignment: Vec<Vec<usize>>,
    #[serde(default)]
    composites: Vec<CompositeSpan>,
    #[serde(default)]
    negation: Vec<bool>,
}

impl GlossSequence {
    pub fn new(
        sentence: impl Into<String>,
        glosses: Vec<String>,
        alignment: Vec<Vec<usize>>,
        composites: Vec<CompositeSpan>,
        negation: Vec<bool>,
    ) -> Result<Self, SequenceError> {
        let seq = Self {
            sentence: sentence.into(),
            glosses,
            alignment,
            composites,
            negation,
        };
        seq.validate()?;
        Ok(seq)
    }

    /// A sequence with no sentence, no composites and no aligned words.
    pub fn from_glosses<I, S>(glosses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let glosses: Vec<String> = glosses.into_iter().map(Into::into).collect();
        let alignment = vec![Vec::new(); glosses.len()];
        Self {
            sentence: String::new(),
            glosses,
            alignment,
            composites: Vec::new(),
            negation: Vec::new(),
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self, SequenceError> {
        let de = &mut serde_json::Deserializer::from_slice(bytes);
        let seq: Self = serde_path_to_error::deserialize(de).map_err(|e| SequenceError::Format {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        seq.validate()?;
        Ok(seq)
    }

    fn validate(&self) -> Result<(), SequenceError> {
        let len = self.glosses.len();
        if self.alignment.len() != len {
            return Err(SequenceError::AlignmentLength {
                alignment: self.alignment.len(),
                glosses: len,
            });
        }
        if !self.negation.is_empty() && self.negation.len() != len {
            return Err(SequenceError::NegationLength {
                marks: self.negation.len(),
                glosses: len,
            });
        }
        for span in &self.composites {
            if span.last >= len {
                return Err(SequenceError::SpanOutOfBounds {
                    first: span.first,
                    last: span.last,
                    len,
                });
            }
            if span.last <= span.first {
                return Err(SequenceError::SpanTooShort {
                    first: span.first,
                    last: span.last,
                });
            }
        }
        let mut spans = self.composites.clone();
        spans.sort_by_key(|s| s.first);
        for w in spans.windows(2) {
            if w[1].first <= w[0].last {
                return Err(SequenceError::SpansOverlap(
                    (w[0].first, w[0].last),
                    (w[1].first, w[1].last),
                ));
            }
        }
        Ok(())
    }

    /// Replaces the source sentence, keeping the alignment indices.
    pub fn with_sentence(mut self, sentence: impl Into<String>) -> Self {
        self.sentence = sentence.into();
        self
    }

    pub fn sentence(&self) -> &str {
        &self.sentence
    }

    pub fn glosses(&self) -> &[String] {
        &self.glosses
    }

    pub fn len(&self) -> usize {
        self.glosses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.glosses.is_empty()
    }

    pub fn alignment(&self) -> &[Vec<usize>] {
        &self.alignment
    }

    pub fn composites(&self) -> &[CompositeSpan] {
        &self.composites
    }

    pub fn is_negated(&self, i: usize) -> bool {
        self.negation.get(i).copied().unwrap_or(false)
    }

    /// True when the boundary after gloss `i` is internal to a composite utterance.
    pub fn boundary_in_composite(&self, i: usize) -> bool {
        self.composites.iter().any(|s| s.contains_boundary(i))
    }

    /// Tokenized sentence words.
    pub fn words(&self) -> Vec<String> {
        tokenize(&self.sentence)
    }
}

/// Splits a sentence into lowercase words, dropping punctuation.
pub fn tokenize(sentence: &str) -> Vec<String> {
    sentence
        .split(|c: char| c.is_whitespace() || c == '-')
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Inflected sentence words aligned to each sign, in sentence order per sign.
pub fn assign_words(seq: &GlossSequence) -> Result<Vec<Vec<String>>, SequenceError> {
    let words = seq.words();
    seq.alignment
        .iter()
        .enumerate()
        .map(|(gloss, indices)| {
            indices
                .iter()
                .map(|&index| {
                    words.get(index).cloned().ok_or(SequenceError::AlignmentOutOfRange {
                        gloss,
                        index,
                        words: words.len(),
                    })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizes_and_lowercases() {
        assert_eq!(
            tokenize("Eu comi, melancia em casa!"),
            vec!["eu", "comi", "melancia", "em", "casa"]
        );
        assert_eq!(tokenize("Dá-me «água»."), vec!["dá", "me", "água"]);
        assert!(tokenize("  ... ").is_empty());
    }

    #[test]
    fn conjugated_form_is_used() {
        let seq = GlossSequence::new(
            "Nós comemos",
            vec!["NÓS".into(), "COMER".into()],
            vec![vec![0], vec![1]],
            vec![],
            vec![],
        )
        .unwrap();
        let words = assign_words(&seq).unwrap();
        assert_eq!(words[1], vec!["comemos"]);
    }

    #[test]
    fn unaligned_gloss_gets_no_words() {
        let seq = GlossSequence::new(
            "eu",
            vec!["EU".into(), "CL".into()],
            vec![vec![0], vec![]],
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(assign_words(&seq).unwrap()[1], Vec::<String>::new());
    }

    #[test]
    fn alignment_out_of_range() {
        let seq = GlossSequence::new("eu", vec!["EU".into()], vec![vec![3]], vec![], vec![]).unwrap();
        assert_eq!(
            assign_words(&seq),
            Err(SequenceError::AlignmentOutOfRange {
                gloss: 0,
                index: 3,
                words: 1
            })
        );
    }

    #[test]
    fn span_validation() {
        let g = |n: usize| (0..n).map(|i| format!("G{i}")).collect::<Vec<_>>();
        let a = |n: usize| vec![Vec::new(); n];
        let overlap = GlossSequence::new(
            "",
            g(5),
            a(5),
            vec![CompositeSpan { first: 0, last: 2 }, CompositeSpan { first: 2, last: 3 }],
            vec![],
        );
        assert!(matches!(overlap, Err(SequenceError::SpansOverlap(..))));
        let oob = GlossSequence::new("", g(2), a(2), vec![CompositeSpan { first: 0, last: 2 }], vec![]);
        assert!(matches!(oob, Err(SequenceError::SpanOutOfBounds { .. })));
        let short = GlossSequence::new("", g(2), a(2), vec![CompositeSpan { first: 1, last: 1 }], vec![]);
        assert!(matches!(short, Err(SequenceError::SpanTooShort { .. })));
        let adjacent = GlossSequence::new(
            "",
            g(4),
            a(4),
            vec![CompositeSpan { first: 0, last: 1 }, CompositeSpan { first: 2, last: 3 }],
            vec![],
        )
        .unwrap();
        assert!(adjacent.boundary_in_composite(0));
        assert!(!adjacent.boundary_in_composite(1));
        assert!(adjacent.boundary_in_composite(2));
    }

    #[test]
    fn json_error_names_path() {
        let err = GlossSequence::from_json(br#"{"glosses": ["A"], "alignment": [["x"]]}"#).unwrap_err();
        match err {
            SequenceError::Format { path, .. } => assert_eq!(path, "alignment[0][0]"),
            other => panic!("{other:?}"),
        }
    }
}
