//! Text normalization: tokenizing, stopword removal and Porter stemming.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const MODULE: &str = "textproc";

/// Built-in English stopword list, in the same format as a stopword file.
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct TokenizerConfig {
    pub min_len: usize,
    pub max_len: usize,
    pub stopwords: HashSet<String>,
    pub stem: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            min_len: 2,
            max_len: 40,
            stopwords: parse_stopwords(DEFAULT_STOPWORDS),
            stem: true,
        }
    }
}

impl TokenizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.min_len == 0 || self.min_len > self.max_len {
            return Err(Error::config(MODULE, "token lengths must satisfy 1 <= min_len <= max_len"));
        }
        Ok(())
    }
}

/// Parses stopword file content: one word per line, `#` lines ignored.
pub fn parse_stopwords(content: &str) -> HashSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let raw = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::input(
            MODULE,
            format!("stopword file {} does not exist", path.display()),
        ),
        _ => Error::io(path, e),
    })?;
    Ok(parse_stopwords(&String::from_utf8_lossy(&raw)))
}

/// Lowercases `text` and splits it into maximal runs of alphanumeric
/// characters, keeping those whose length (in chars) is within
/// `[min_len, max_len]`.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let lower = text.to_lowercase();
    lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|tok| {
            let n = tok.chars().count();
            n >= cfg.min_len && n <= cfg.max_len
        })
        .map(str::to_string)
        .collect()
}

pub fn remove_stopwords(tokens: Vec<String>, cfg: &TokenizerConfig) -> Vec<String> {
    if cfg.stopwords.is_empty() {
        return tokens;
    }
    tokens
        .into_iter()
        .filter(|t| !cfg.stopwords.contains(t))
        .collect()
}

/// Full normalization chain: tokenize, drop stopwords, stem if enabled.
pub fn normalize(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let tokens = remove_stopwords(tokenize(text, cfg), cfg);
    if cfg.stem {
        tokens.into_iter().map(|t| stem(&t)).collect()
    } else {
        tokens
    }
}

/// Porter's suffix-stripping algorithm as originally published (steps 1a
/// through 5b, no short-word guard, `abli -> able` in step 2).
///
/// Only pure ASCII alphabetic lowercase tokens are stemmed; anything with a
/// digit, uppercase or non-ASCII character is returned unchanged.
pub fn stem(token: &str) -> String {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_lowercase()) {
        return token.to_string();
    }
    let mut w = token.as_bytes().to_vec();
    step1a(&mut w);
    step1b(&mut w);
    step1c(&mut w);
    step2(&mut w);
    step3(&mut w);
    step4(&mut w);
    step5a(&mut w);
    step5b(&mut w);
    // Every step only emits ASCII lowercase letters.
    String::from_utf8(w).expect("ascii")
}

fn is_consonant(w: &[u8], i: usize) -> bool {
    match w[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => false,
        b'y' => i == 0 || !is_consonant(w, i - 1),
        _ => true,
    }
}

/// Number of VC sequences in `[C](VC)^m[V]`.
fn measure(w: &[u8]) -> usize {
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..w.len() {
        let cons = is_consonant(w, i);
        if cons && prev_vowel {
            m += 1;
        }
        prev_vowel = !cons;
    }
    m
}

fn has_vowel(w: &[u8]) -> bool {
    (0..w.len()).any(|i| !is_consonant(w, i))
}

fn ends_double_consonant(w: &[u8]) -> bool {
    let n = w.len();
    n >= 2 && w[n - 1] == w[n - 2] && is_consonant(w, n - 1)
}

/// `*o`: stem ends consonant-vowel-consonant, last not w, x or y.
fn ends_cvc(w: &[u8]) -> bool {
    let n = w.len();
    n >= 3
        && is_consonant(w, n - 3)
        && !is_consonant(w, n - 2)
        && is_consonant(w, n - 1)
        && !matches!(w[n - 1], b'w' | b'x' | b'y')
}

type Condition = fn(&[u8]) -> bool;

fn m_gt0(stem: &[u8]) -> bool {
    measure(stem) > 0
}

fn m_gt1(stem: &[u8]) -> bool {
    measure(stem) > 1
}

fn always(_: &[u8]) -> bool {
    true
}

/// Applies the first rule whose suffix matches; if its condition fails no
/// further rule of the step is tried. Returns whether a rule fired.
fn apply_rules(w: &mut Vec<u8>, rules: &[(&str, &str, Condition)]) -> bool {
    for &(suffix, replacement, cond) in rules {
        if w.ends_with(suffix.as_bytes()) {
            let stem_len = w.len() - suffix.len();
            if cond(&w[..stem_len]) {
                w.truncate(stem_len);
                w.extend_from_slice(replacement.as_bytes());
                return true;
            }
            return false;
        }
    }
    false
}

fn step1a(w: &mut Vec<u8>) {
    apply_rules(
        w,
        &[
            ("sses", "ss", always),
            ("ies", "i", always),
            ("ss", "ss", always),
            ("s", "", always),
        ],
    );
}

fn step1b(w: &mut Vec<u8>) {
    if w.ends_with(b"eed") {
        if measure(&w[..w.len() - 3]) > 0 {
            w.truncate(w.len() - 1);
        }
        return;
    }
    let removed = [&b"ed"[..], b"ing"].into_iter().find_map(|suffix| {
        if w.ends_with(suffix) && has_vowel(&w[..w.len() - suffix.len()]) {
            Some(suffix.len())
        } else {
            None
        }
    });
    let Some(len) = removed else { return };
    w.truncate(w.len() - len);

    if w.ends_with(b"at") || w.ends_with(b"bl") || w.ends_with(b"iz") {
        w.push(b'e');
    } else if ends_double_consonant(w) {
        if !matches!(w[w.len() - 1], b'l' | b's' | b'z') {
            w.pop();
        }
    } else if measure(w) == 1 && ends_cvc(w) {
        w.push(b'e');
    }
}

fn step1c(w: &mut Vec<u8>) {
    apply_rules(w, &[("y", "i", has_vowel)]);
}

fn step2(w: &mut Vec<u8>) {
    apply_rules(
        w,
        &[
            ("ational", "ate", m_gt0),
            ("tional", "tion", m_gt0),
            ("enci", "ence", m_gt0),
            ("anci", "ance", m_gt0),
            ("izer", "ize", m_gt0),
            ("abli", "able", m_gt0),
            ("alli", "al", m_gt0),
            ("entli", "ent", m_gt0),
            ("eli", "e", m_gt0),
            ("ousli", "ous", m_gt0),
            ("ization", "ize", m_gt0),
            ("ation", "ate", m_gt0),
            ("ator", "ate", m_gt0),
            ("alism", "al", m_gt0),
            ("iveness", "ive", m_gt0),
            ("fulness", "ful", m_gt0),
            ("ousness", "ous", m_gt0),
            ("aliti", "al", m_gt0),
            ("iviti", "ive", m_gt0),
            ("biliti", "ble", m_gt0),
        ],
    );
}

fn step3(w: &mut Vec<u8>) {
    apply_rules(
        w,
        &[
            ("icate", "ic", m_gt0),
            ("ative", "", m_gt0),
            ("alize", "al", m_gt0),
            ("iciti", "ic", m_gt0),
            ("ical", "ic", m_gt0),
            ("ful", "", m_gt0),
            ("ness", "", m_gt0),
        ],
    );
}

fn step4(w: &mut Vec<u8>) {
    fn ion_cond(stem: &[u8]) -> bool {
        measure(stem) > 1 && matches!(stem.last(), Some(b's' | b't'))
    }
    apply_rules(
        w,
        &[
            ("al", "", m_gt1),
            ("ance", "", m_gt1),
            ("ence", "", m_gt1),
            ("er", "", m_gt1),
            ("ic", "", m_gt1),
            ("able", "", m_gt1),
            ("ible", "", m_gt1),
            ("ant", "", m_gt1),
            ("ement", "", m_gt1),
            ("ment", "", m_gt1),
            ("ent", "", m_gt1),
            ("ion", "", ion_cond),
            ("ou", "", m_gt1),
            ("ism", "", m_gt1),
            ("ate", "", m_gt1),
            ("iti", "", m_gt1),
            ("ous", "", m_gt1),
            ("ive", "", m_gt1),
            ("ize", "", m_gt1),
        ],
    );
}

fn step5a(w: &mut Vec<u8>) {
    if w.last() == Some(&b'e') {
        let stem = &w[..w.len() - 1];
        let m = measure(stem);
        if m > 1 || (m == 1 && !ends_cvc(stem)) {
            w.pop();
        }
    }
}

fn step5b(w: &mut Vec<u8>) {
    if w.ends_with(b"ll") && measure(w) > 1 {
        w.pop();
    }
}
