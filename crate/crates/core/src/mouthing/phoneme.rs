//! European Portuguese phoneme inventory and IPA to ASCII normalization.

use super::MouthingError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhonemeKind {
    Vowel,
    Consonant,
}

/// One inventory entry: IPA symbol, its SAMPA-style ASCII code, and its kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phoneme {
    pub ipa: &'static str,
    pub code: &'static str,
    pub kind: PhonemeKind,
}

const fn c(ipa: &'static str, code: &'static str) -> Phoneme {
    Phoneme {
        ipa,
        code,
        kind: PhonemeKind::Consonant,
    }
}

const fn v(ipa: &'static str, code: &'static str) -> Phoneme {
    Phoneme {
        ipa,
        code,
        kind: PhonemeKind::Vowel,
    }
}

/// The 33 phonemes: 19 consonants, 9 oral vowels, 5 nasal vowels.
/// Glides are folded into /i/ and /u/.
pub const INVENTORY: [Phoneme; 33] = [
    c("p", "p"),
    c("b", "b"),
    c("t", "t"),
    c("d", "d"),
    c("k", "k"),
    c("g", "g"),
    c("f", "f"),
    c("v", "v"),
    c("s", "s"),
    c("z", "z"),
    c("ʃ", "S"),
    c("ʒ", "Z"),
    c("m", "m"),
    c("n", "n"),
    c("ɲ", "J"),
    c("l", "l"),
    c("ʎ", "L"),
    c("ɾ", "4"),
    c("ʁ", "R"),
    v("i", "i"),
    v("e", "e"),
    v("ɛ", "E"),
    v("a", "a"),
    v("ɐ", "6"),
    v("ɔ", "O"),
    v("o", "o"),
    v("u", "u"),
    v("ɨ", "@"),
    v("ɐ\u{303}", "6~"),
    v("e\u{303}", "e~"),
    v("i\u{303}", "i~"),
    v("o\u{303}", "o~"),
    v("u\u{303}", "u~"),
];

pub fn by_ipa(symbol: &str) -> Option<&'static Phoneme> {
    INVENTORY.iter().find(|p| p.ipa == symbol)
}

pub fn by_code(code: &str) -> Option<&'static Phoneme> {
    INVENTORY.iter().find(|p| p.code == code)
}

pub fn is_vowel_code(code: &str) -> bool {
    by_code(code).is_some_and(|p| p.kind == PhonemeKind::Vowel)
}

/// Phoneme symbols of one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordPhonemes {
    pub word: String,
    pub phonemes: Vec<String>,
}

/// Per-word IPA symbols, in sentence order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhonemeString {
    pub words: Vec<WordPhonemes>,
}

/// Per-word ASCII phoneme codes, in sentence order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AsciiPhonemeString {
    pub words: Vec<WordPhonemes>,
}

fn is_combining(c: char) -> bool {
    ('\u{0300}'..='\u{036F}').contains(&c)
}

/// Rewrites precomposed nasal vowels as base letter plus combining tilde.
fn decompose_nasals(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            'ẽ' => out.push_str("e\u{303}"),
            'ĩ' => out.push_str("i\u{303}"),
            'õ' => out.push_str("o\u{303}"),
            'ũ' => out.push_str("u\u{303}"),
            'ã' => out.push_str("a\u{303}"),
            _ => out.push(ch),
        }
    }
    out
}

/// Splits an IPA string into symbols, longest inventory match first.
///
/// Stress marks, syllable dots, length marks and whitespace are dropped. Characters
/// outside the inventory become their own symbol (with any combining marks) so that
/// normalization can report them.
pub fn split_ipa(ipa: &str) -> Vec<String> {
    let decomposed = decompose_nasals(ipa);
    let mut out = Vec::new();
    let mut rest = decomposed.as_str();
    'outer: while let Some(ch) = rest.chars().next() {
        if matches!(ch, 'ˈ' | 'ˌ' | '.' | 'ː') || ch.is_whitespace() {
            rest = &rest[ch.len_utf8()..];
            continue;
        }
        let mut best: Option<&str> = None;
        for p in &INVENTORY {
            if rest.starts_with(p.ipa) && best.is_none_or(|b| p.ipa.len() > b.len()) {
                // a bare vowel followed by a combining mark is not that vowel
                let after = rest[p.ipa.len()..].chars().next();
                if after.is_some_and(is_combining) {
                    continue;
                }
                best = Some(p.ipa);
            }
        }
        if let Some(sym) = best {
            out.push(sym.to_string());
            rest = &rest[sym.len()..];
            continue 'outer;
        }
        let mut end = ch.len_utf8();
        for c in rest[end..].chars() {
            if !is_combining(c) {
                break;
            }
            end += c.len_utf8();
        }
        out.push(rest[..end].to_string());
        rest = &rest[end..];
    }
    out
}

/// Table-driven recoding of IPA symbols to ASCII codes; length-preserving per word.
pub fn normalize(p: &PhonemeString) -> Result<AsciiPhonemeString, MouthingError> {
    let mut unknown = Vec::new();
    let words = p
        .words
        .iter()
        .map(|w| WordPhonemes {
            word: w.word.clone(),
            phonemes: w
                .phonemes
                .iter()
                .map(|s| match by_ipa(s) {
                    Some(ph) => ph.code.to_string(),
                    None => {
                        if !unknown.contains(s) {
                            unknown.push(s.clone());
                        }
                        String::new()
                    }
                })
                .collect(),
        })
        .collect();
    if !unknown.is_empty() {
        return Err(MouthingError::UnknownSymbols(unknown));
    }
    Ok(AsciiPhonemeString { words })
}
