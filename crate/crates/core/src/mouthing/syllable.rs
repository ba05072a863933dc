//! Onset-maximizing syllabification over ASCII phoneme codes.
//!
//! Every vowel is its own nucleus. Consonants between two nuclei go to the onset of the
//! second one, as many as form a legal onset (any single consonant, or obstruent +
//! liquid); the remainder closes the preceding syllable. So `perto` is `pE4.tu` and
//! `pera` is `pE.46`.
//!
//! Words that break these phonotactics (an illegal word-initial cluster, a coda longer
//! than two consonants) are split with one syllable per nucleus, all consonants leaning
//! right, and flagged as irregular.

use super::phoneme::is_vowel_code;
use super::MouthingError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyllabifiedWord {
    pub word: String,
    pub syllables: Vec<Vec<String>>,
    /// Set when the phonotactic fallback was used.
    pub irregular: bool,
}

impl SyllabifiedWord {
    pub fn phonemes(&self) -> impl Iterator<Item = &String> {
        self.syllables.iter().flatten()
    }
}

fn is_legal_onset(cluster: &[String]) -> bool {
    match cluster {
        [] | [_] => true,
        [a, b] => {
            let obstruent = matches!(a.as_str(), "p" | "b" | "t" | "d" | "k" | "g" | "f" | "v");
            let liquid = matches!(b.as_str(), "4" | "l");
            obstruent && liquid && !matches!((a.as_str(), b.as_str()), ("t" | "d" | "v", "l"))
        }
        _ => false,
    }
}

fn is_legal_coda(cluster: &[String]) -> bool {
    cluster.len() <= 2
}

pub fn syllabify(word: &str, phonemes: &[String]) -> Result<SyllabifiedWord, MouthingError> {
    if phonemes.is_empty() {
        return Err(MouthingError::EmptyWord(word.to_string()));
    }
    let nuclei: Vec<usize> = phonemes
        .iter()
        .enumerate()
        .filter(|(_, p)| is_vowel_code(p))
        .map(|(i, _)| i)
        .collect();
    if nuclei.is_empty() {
        return Ok(SyllabifiedWord {
            word: word.to_string(),
            syllables: vec![phonemes.to_vec()],
            irregular: true,
        });
    }

    let mut irregular = !is_legal_onset(&phonemes[..nuclei[0]]);
    // Start index of each syllable after the first.
    let mut starts = Vec::with_capacity(nuclei.len() - 1);
    for w in nuclei.windows(2) {
        let cluster = &phonemes[w[0] + 1..w[1]];
        let onset = if cluster.len() >= 2 && is_legal_onset(&cluster[cluster.len() - 2..]) {
            2
        } else {
            cluster.len().min(1)
        };
        if !is_legal_coda(&cluster[..cluster.len() - onset]) {
            irregular = true;
        }
        starts.push(w[1] - onset);
    }
    let last = *nuclei.last().expect("non-empty");
    if !is_legal_coda(&phonemes[last + 1..]) {
        irregular = true;
    }
    if irregular {
        starts = nuclei.windows(2).map(|w| w[0] + 1).collect();
    }

    let mut syllables = Vec::with_capacity(nuclei.len());
    let mut from = 0;
    for &s in &starts {
        syllables.push(phonemes[from..s].to_vec());
        from = s;
    }
    syllables.push(phonemes[from..].to_vec());
    Ok(SyllabifiedWord {
        word: word.to_string(),
        syllables,
        irregular,
    })
}
