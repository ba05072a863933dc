//! Grapheme-to-phoneme transcription.
//!
//! Two backends are provided: a versioned [`Lexicon`] file and [`RuleG2p`], a small
//! European Portuguese letter-to-sound rule set used for words the lexicon lacks.
//! Transcription runs over the whole sentence so that word-final sibilants can
//! assimilate to the following word.

use std::collections::HashMap;

use super::phoneme::{split_ipa, PhonemeString, WordPhonemes};
use super::MouthingError;
use crate::sequence::tokenize;

pub trait G2p {
    /// IPA symbols for one lowercase word, or `None` when the backend cannot handle it.
    fn pronounce(&self, word: &str) -> Option<Vec<String>>;
}

impl<T: G2p + ?Sized> G2p for &T {
    fn pronounce(&self, word: &str) -> Option<Vec<String>> {
        (**self).pronounce(word)
    }
}

/// Tries `primary`, then `fallback`.
#[derive(Debug, Clone)]
pub struct Fallback<A, B> {
    pub primary: A,
    pub fallback: B,
}

impl<A: G2p, B: G2p> G2p for Fallback<A, B> {
    fn pronounce(&self, word: &str) -> Option<Vec<String>> {
        self.primary.pronounce(word).or_else(|| self.fallback.pronounce(word))
    }
}

const VERSION_KEY: &str = "lexicon-version";

/// Bundled pronunciations for the demo vocabulary.
pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.tsv");

/// Word to IPA lexicon.
///
/// File format: UTF-8 text, one tab-separated `word<TAB>ipa` entry per line. The first
/// non-comment line must be `lexicon-version<TAB><version>`. Lines starting with `#`
/// and blank lines are ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    version: String,
    entries: HashMap<String, String>,
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Self, MouthingError> {
        let err = |line: usize, message: &str| MouthingError::Lexicon {
            line,
            message: message.to_string(),
        };
        let mut version = None;
        let mut entries = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('\t')
                .ok_or_else(|| err(line_no, "expected <word>\\t<ipa>"))?;
            let (key, value) = (key.trim(), value.trim());
            if version.is_none() {
                if key != VERSION_KEY || value.is_empty() {
                    return Err(err(line_no, "missing lexicon-version header"));
                }
                version = Some(value.to_string());
                continue;
            }
            if key.is_empty() || value.is_empty() {
                return Err(err(line_no, "empty word or transcription"));
            }
            if entries.insert(key.to_lowercase(), value.to_string()).is_some() {
                return Err(err(line_no, &format!("duplicate entry {key:?}")));
            }
        }
        let version = version.ok_or_else(|| err(0, "missing lexicon-version header"))?;
        Ok(Self { version, entries })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    /// Falls back to letter-to-sound rules for words not in the lexicon.
    pub fn or_rules(self) -> Fallback<Lexicon, RuleG2p> {
        Fallback {
            primary: self,
            fallback: RuleG2p,
        }
    }
}

impl G2p for Lexicon {
    fn pronounce(&self, word: &str) -> Option<Vec<String>> {
        self.entries.get(word).map(|ipa| split_ipa(ipa))
    }
}

/// Minimal European Portuguese letter-to-sound rules.
///
/// Handles digraphs, context-dependent `c`/`g`/`r`/`s`/`z`, nasal vowels before a
/// coda nasal, orthographic stress, and unstressed vowel reduction
/// (`a`→ɐ, `e`→ɨ, `o`→u). Open/closed mid vowels without a written accent are
/// resolved to the closed variant.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleG2p;

impl G2p for RuleG2p {
    fn pronounce(&self, word: &str) -> Option<Vec<String>> {
        letter_to_sound(word).map(|v| v.into_iter().map(str::to_string).collect())
    }
}

fn is_vowel_letter(c: char) -> bool {
    "aeiouáàâãéêíóôõúü".contains(c)
}

fn is_front(c: char) -> bool {
    matches!(c, 'e' | 'i' | 'é' | 'ê' | 'í')
}

fn is_voiced_letter(c: char) -> bool {
    matches!(c, 'b' | 'd' | 'g' | 'v' | 'z' | 'j' | 'm' | 'n' | 'l' | 'r')
}

fn letter_to_sound(word: &str) -> Option<Vec<&'static str>> {
    let w: Vec<char> = word.to_lowercase().chars().collect();
    let n = w.len();
    if n == 0
        || !w
            .iter()
            .all(|&c| c.is_ascii_lowercase() && !matches!(c, 'w' | 'y' | 'k') || is_vowel_letter(c) || c == 'ç')
    {
        return None;
    }

    let silent_u =
        |i: usize| w[i] == 'u' && i > 0 && matches!(w[i - 1], 'q' | 'g') && w.get(i + 1).copied().is_some_and(is_front);

    // Group vowel letters into nuclei; only falling diphthongs share a nucleus.
    let mut nuclei: Vec<Vec<usize>> = Vec::new();
    let mut nucleus_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        if !is_vowel_letter(w[i]) || silent_u(i) {
            continue;
        }
        let joins = i > 0
            && nucleus_of[i - 1].is_some_and(|k| {
                let nu = &nuclei[k];
                nu.len() == 1
                    && (matches!(w[i], 'i' | 'u') || (matches!(w[nu[0]], 'ã' | 'õ') && matches!(w[i], 'o' | 'e')))
            });
        if joins {
            let k = nucleus_of[i - 1].expect("checked");
            nuclei[k].push(i);
            nucleus_of[i] = Some(k);
        } else {
            nuclei.push(vec![i]);
            nucleus_of[i] = Some(nuclei.len() - 1);
        }
    }
    if nuclei.is_empty() {
        return None;
    }

    // A nucleus followed by m/n and then a consonant or the word end is nasal.
    let nasal_coda = |k: usize| {
        let next = *nuclei[k].last().expect("non-empty") + 1;
        next < n
            && matches!(w[next], 'm' | 'n')
            && (next + 1 == n || (!is_vowel_letter(w[next + 1]) && w[next + 1] != 'h'))
    };

    let stressed = nuclei
        .iter()
        .position(|nu| nu.iter().any(|&i| "áâéêíóôú".contains(w[i])))
        .or_else(|| {
            nuclei
                .iter()
                .position(|nu| nu.iter().any(|&i| matches!(w[i], 'ã' | 'õ')))
        })
        .unwrap_or_else(|| {
            let stem: String = w.iter().collect();
            let stem = stem.strip_suffix('s').unwrap_or(&stem);
            let paroxytone =
                stem.ends_with(['a', 'e', 'o']) || stem.ends_with("am") || stem.ends_with("em") || stem.ends_with("en");
            if paroxytone && nuclei.len() >= 2 {
                nuclei.len() - 2
            } else {
                nuclei.len() - 1
            }
        });

    let mut out: Vec<&'static str> = Vec::new();
    let mut i = 0;
    while i < n {
        let c = w[i];
        if let Some(k) = nucleus_of[i] {
            let nu = &nuclei[k];
            let nasal = nasal_coda(k);
            let stress = k == stressed;
            let end = *nu.last().expect("non-empty");
            let word_final_nasal = nasal && (end + 2 == n || (end + 3 == n && w[n - 1] == 's'));
            let head = w[nu[0]];
            let glide = nu.get(1).map(|&g| w[g]);
            match (head, glide) {
                ('e', None) | ('é', None) | ('ê', None) if word_final_nasal && k + 1 == nuclei.len() => {
                    out.extend(["ɐ\u{303}", "i\u{303}"]);
                }
                ('a', None) if word_final_nasal && k + 1 == nuclei.len() && w[end + 1] == 'm' => {
                    out.extend(["ɐ\u{303}", "u\u{303}"]);
                }
                _ => {
                    out.push(head_vowel(head, stress, nasal, glide));
                    if let Some(g) = glide {
                        match (head, g) {
                            ('o', 'u') => {}
                            ('ã', 'o') => out.push("u\u{303}"),
                            (_, 'o') => out.push("u"),
                            ('ã' | 'õ', 'e') => out.push("i\u{303}"),
                            (_, 'e') => out.push("i"),
                            (_, 'u') => out.push("u"),
                            _ => out.push("i"),
                        }
                    }
                }
            }
            i = end + 1;
            if nasal {
                i += 1;
            }
            continue;
        }

        let next = w.get(i + 1).copied();
        let prev = i.checked_sub(1).map(|p| w[p]);
        let mut skip = 1;
        match c {
            'b' => out.push("b"),
            'd' => out.push("d"),
            'f' => out.push("f"),
            'p' => out.push("p"),
            't' => out.push("t"),
            'v' => out.push("v"),
            'j' => out.push("ʒ"),
            'x' => out.push("ʃ"),
            'ç' => out.push("s"),
            'q' => out.push("k"),
            'h' => {}
            'u' => {} // silent u in gue/gui/que/qui
            'c' if next == Some('h') => {
                out.push("ʃ");
                skip = 2;
            }
            'c' => out.push(if next.is_some_and(is_front) { "s" } else { "k" }),
            'g' => out.push(if next.is_some_and(is_front) { "ʒ" } else { "g" }),
            'l' if next == Some('h') => {
                out.push("ʎ");
                skip = 2;
            }
            'l' => out.push("l"),
            'n' if next == Some('h') => {
                out.push("ɲ");
                skip = 2;
            }
            'n' => out.push("n"),
            'm' => out.push("m"),
            'r' if next == Some('r') => {
                out.push("ʁ");
                skip = 2;
            }
            'r' => out.push(if i == 0 || matches!(prev, Some('n' | 'l' | 's')) {
                "ʁ"
            } else {
                "ɾ"
            }),
            's' if next == Some('s') => {
                out.push("s");
                skip = 2;
            }
            's' => {
                let between_vowels = prev.is_some_and(is_vowel_letter) && next.is_some_and(is_vowel_letter);
                out.push(match next {
                    _ if i == 0 => "s",
                    _ if between_vowels => "z",
                    None => "ʃ",
                    Some(nc) if !is_vowel_letter(nc) => {
                        if is_voiced_letter(nc) {
                            "ʒ"
                        } else {
                            "ʃ"
                        }
                    }
                    _ => "s",
                });
            }
            'z' => out.push(if next.is_none() { "ʃ" } else { "z" }),
            _ => return None,
        }
        i += skip;
    }
    Some(out)
}

fn head_vowel(c: char, stressed: bool, nasal: bool, glide: Option<char>) -> &'static str {
    match c {
        'ã' => "ɐ\u{303}",
        'õ' => "o\u{303}",
        'a' | 'â' if nasal => "ɐ\u{303}",
        'e' | 'ê' if nasal => "e\u{303}",
        'i' | 'í' if nasal => "i\u{303}",
        'o' | 'ô' if nasal => "o\u{303}",
        'u' | 'ú' if nasal => "u\u{303}",
        'á' | 'à' => "a",
        'â' => "ɐ",
        'a' if stressed => "a",
        'a' => "ɐ",
        'é' => "ɛ",
        'ê' => "e",
        'e' if stressed && glide == Some('i') => "ɐ",
        'e' if stressed => "e",
        'e' if glide.is_some() => "e",
        'e' => "ɨ",
        'i' | 'í' => "i",
        'ó' => "ɔ",
        'ô' => "o",
        'o' if stressed || glide.is_some() => "o",
        'o' => "u",
        _ => "u", // u, ú, ü
    }
}

fn is_voiced_ipa(s: &str) -> bool {
    matches!(
        s,
        "b" | "d" | "g" | "v" | "z" | "ʒ" | "m" | "n" | "ɲ" | "l" | "ʎ" | "ɾ" | "ʁ"
    )
}

fn starts_with_vowel(p: &[String]) -> bool {
    p.first()
        .and_then(|s| super::phoneme::by_ipa(s))
        .is_some_and(|ph| ph.kind == super::phoneme::PhonemeKind::Vowel)
}

/// Word-final /ʃ/ becomes /z/ before a vowel and /ʒ/ before a voiced consonant.
fn apply_sandhi(words: &mut [WordPhonemes]) {
    for i in 1..words.len() {
        let (head, tail) = words.split_at_mut(i);
        let prev = &mut head[i - 1].phonemes;
        let next = &tail[0].phonemes;
        if prev.last().map(String::as_str) != Some("ʃ") || next.is_empty() {
            continue;
        }
        if starts_with_vowel(next) {
            *prev.last_mut().expect("checked") = "z".into();
        } else if is_voiced_ipa(&next[0]) {
            *prev.last_mut().expect("checked") = "ʒ".into();
        }
    }
}

/// Transcribes already-tokenized words as one sentence.
pub fn transcribe_words<G: G2p + ?Sized>(words: &[String], g2p: &G) -> Result<PhonemeString, MouthingError> {
    let mut out = words
        .iter()
        .map(|word| {
            g2p.pronounce(word)
                .map(|phonemes| WordPhonemes {
                    word: word.clone(),
                    phonemes,
                })
                .ok_or_else(|| MouthingError::Untranscribable(word.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    apply_sandhi(&mut out);
    Ok(PhonemeString { words: out })
}

/// Transcribes a full sentence; tokenization matches [`tokenize`].
pub fn transcribe<G: G2p + ?Sized>(sentence: &str, g2p: &G) -> Result<PhonemeString, MouthingError> {
    transcribe_words(&tokenize(sentence), g2p)
}
