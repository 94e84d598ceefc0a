//! Freely reduced words over a generator alphabet.
//!
//! Lowercase letters are generators, uppercase letters their inverses
//! (A means a^-1). Parsing accepts power suffixes `a^3` and parenthesized
//! powers `(ab)^-2`, which expand before reduction.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::herm::{same_form, GroupElement, HermError};
use crate::linalg::Mat3;

#[derive(Debug, Error)]
pub enum WordError {
    #[error("unknown letter '{0}'")]
    UnknownLetter(char),
    #[error("malformed word syntax near '{0}'")]
    Syntax(String),
    #[error("letter '{0}' has no assigned matrix")]
    Unassigned(char),
    #[error(transparent)]
    Form(#[from] HermError),
}

/// Inverse letter: case swap.
pub fn inverse_letter(c: char) -> char {
    if c.is_ascii_lowercase() {
        c.to_ascii_uppercase()
    } else {
        c.to_ascii_lowercase()
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(String);

impl Word {
    pub fn empty() -> Self {
        Word(String::new())
    }

    /// Parse with power expansion, then freely reduce.
    pub fn parse(s: &str) -> Result<Self, WordError> {
        let expanded = expand(s)?;
        Ok(reduce(expanded.chars()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = char> + '_ {
        self.0.chars()
    }

    /// Reversed, case-swapped word.
    pub fn inverse(&self) -> Word {
        Word(self.0.chars().rev().map(inverse_letter).collect())
    }

    /// Free product followed by reduction.
    pub fn concat(&self, other: &Word) -> Word {
        reduce(self.0.chars().chain(other.0.chars()))
    }

    pub fn pow(&self, k: i32) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    /// Errors on the first letter outside the alphabet.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<(), WordError> {
        for c in self.0.chars() {
            if !alphabet.contains(c) {
                return Err(WordError::UnknownLetter(c));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "e")
        } else {
            f.write_str(&self.0)
        }
    }
}

/// Free reduction by stack cancellation; confluent, so the result does not
/// depend on cancellation order.
pub fn reduce(letters: impl Iterator<Item = char>) -> Word {
    let mut stack = String::new();
    for c in letters {
        if stack.ends_with(inverse_letter(c)) {
            stack.pop();
        } else {
            stack.push(c);
        }
    }
    Word(stack)
}

/// Expand `x^3`, `(ab)^-2` and bare parentheses into plain letters.
fn expand(s: &str) -> Result<String, WordError> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = String::new();
    let mut i = 0;
    while i < chars.len() {
        let unit: String = match chars[i] {
            '(' => {
                let mut depth = 1;
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && depth > 0 {
                    match chars[j] {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        _ => {}
                    }
                    j += 1;
                }
                if depth != 0 {
                    return Err(WordError::Syntax(s.to_string()));
                }
                let inner: String = chars[start..j - 1].iter().collect();
                i = j;
                expand(&inner)?
            }
            c if c.is_ascii_alphabetic() => {
                i += 1;
                c.to_string()
            }
            c => return Err(WordError::Syntax(c.to_string())),
        };
        // optional ^k or ^-k
        let mut k: i64 = 1;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let mut neg = false;
            if i < chars.len() && chars[i] == '-' {
                neg = true;
                i += 1;
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(WordError::Syntax(s.to_string()));
            }
            k = chars[start..i].iter().collect::<String>().parse().unwrap();
            if neg {
                k = -k;
            }
        }
        if k < 0 {
            let inv: String = unit.chars().rev().map(inverse_letter).collect();
            for _ in 0..(-k) {
                out.push_str(&inv);
            }
        } else {
            for _ in 0..k {
                out.push_str(&unit);
            }
        }
    }
    Ok(out)
}

/// Generator alphabet: the lowercase letters; uppercase partners are implied.
#[derive(Clone, Debug)]
pub struct Alphabet {
    generators: Vec<char>,
}

impl Alphabet {
    pub fn new(generators: &[char]) -> Self {
        Alphabet {
            generators: generators.to_vec(),
        }
    }

    pub fn generators(&self) -> &[char] {
        &self.generators
    }

    pub fn contains(&self, c: char) -> bool {
        self.generators.contains(&c.to_ascii_lowercase())
    }

    /// Signed letters in enumeration order: a, A, b, B, ...
    pub fn signed_letters(&self) -> Vec<char> {
        let mut out = Vec::with_capacity(self.generators.len() * 2);
        for &g in &self.generators {
            out.push(g);
            out.push(inverse_letter(g));
        }
        out
    }
}

/// All freely reduced words of length 1..=max_len, in depth-first order.
/// For k generators there are 2k (2k-1)^(n-1) words of length exactly n.
pub fn enumerate_reduced(alphabet: &Alphabet, max_len: usize) -> ReducedWords {
    ReducedWords {
        letters: alphabet.signed_letters(),
        stack: vec![0],
        word: Vec::new(),
        max_len,
    }
}

pub struct ReducedWords {
    letters: Vec<char>,
    stack: Vec<usize>,
    word: Vec<char>,
    max_len: usize,
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        loop {
            let depth = self.word.len();
            let next_idx = self.stack.last_mut()?;
            if *next_idx >= self.letters.len() || depth >= self.max_len {
                self.stack.pop();
                self.word.pop();
                continue;
            }
            let c = self.letters[*next_idx];
            *next_idx += 1;
            if let Some(&last) = self.word.last() {
                if last == inverse_letter(c) {
                    continue;
                }
            }
            self.word.push(c);
            self.stack.push(0);
            return Some(Word(self.word.iter().collect()));
        }
    }
}

/// Depth-first walk over reduced words carrying the running matrix product,
/// so a whole enumeration costs one multiply per emitted letter.
/// `visit` gets the letters and the product; returning false prunes the branch.
pub fn walk_reduced_products(
    letters: &[(char, Mat3)],
    max_len: usize,
    visit: &mut impl FnMut(&[char], &Mat3) -> bool,
) {
    let mut word: Vec<char> = Vec::with_capacity(max_len);
    let mut prods: Vec<Mat3> = Vec::with_capacity(max_len + 1);
    prods.push(Mat3::identity());
    walk_rec(letters, max_len, &mut word, &mut prods, visit);
}

fn walk_rec(
    letters: &[(char, Mat3)],
    max_len: usize,
    word: &mut Vec<char>,
    prods: &mut Vec<Mat3>,
    visit: &mut impl FnMut(&[char], &Mat3) -> bool,
) {
    if word.len() >= max_len {
        return;
    }
    for (c, m) in letters {
        if let Some(&last) = word.last() {
            if last == inverse_letter(*c) {
                continue;
            }
        }
        let next = prods.last().unwrap().mul(m);
        word.push(*c);
        prods.push(next);
        if visit(word, prods.last().unwrap()) {
            walk_rec(letters, max_len, word, prods, visit);
        }
        word.pop();
        prods.pop();
    }
}

/// Word evaluation against a generator -> matrix assignment, with a bounded
/// prefix cache so batches of related words cost one multiply per new letter.
pub struct WordEvaluator {
    assign: BTreeMap<char, Mat3>,
    form: std::sync::Arc<crate::herm::HermitianForm>,
    cache: HashMap<String, Mat3>,
    capacity: usize,
}

impl WordEvaluator {
    pub fn new(assignments: &[(char, GroupElement)]) -> Result<Self, WordError> {
        Self::with_capacity(assignments, 1 << 20)
    }

    pub fn with_capacity(
        assignments: &[(char, GroupElement)],
        capacity: usize,
    ) -> Result<Self, WordError> {
        let first = assignments
            .first()
            .ok_or(WordError::Syntax("empty assignment".into()))?;
        let form = std::sync::Arc::clone(first.1.form());
        let mut assign = BTreeMap::new();
        for (c, g) in assignments {
            if !same_form(g, &first.1) {
                return Err(WordError::Form(HermError::FormMismatch));
            }
            assign.insert(*c, *g.matrix());
            assign.insert(inverse_letter(*c), *g.inverse().matrix());
        }
        Ok(WordEvaluator {
            assign,
            form,
            cache: HashMap::new(),
            capacity,
        })
    }

    pub fn form(&self) -> &std::sync::Arc<crate::herm::HermitianForm> {
        &self.form
    }

    pub fn letter_matrix(&self, c: char) -> Result<&Mat3, WordError> {
        self.assign.get(&c).ok_or(WordError::Unassigned(c))
    }

    /// Left-to-right product of letter matrices; uppercase letters multiply
    /// by the inverse of their generator's matrix.
    pub fn evaluate(&mut self, w: &Word) -> Result<GroupElement, WordError> {
        let m = self.evaluate_matrix(w)?;
        Ok(GroupElement::with_tol(m, &self.form, 1e-6)?)
    }

    pub fn evaluate_matrix(&mut self, w: &Word) -> Result<Mat3, WordError> {
        let s = w.as_str();
        if s.is_empty() {
            return Ok(Mat3::identity());
        }
        // longest cached prefix
        let mut start = 0;
        let mut acc = Mat3::identity();
        for i in (1..=s.len()).rev() {
            if let Some(m) = self.cache.get(&s[..i]) {
                acc = *m;
                start = i;
                break;
            }
        }
        for (i, c) in s.char_indices().skip(start) {
            let m = self.assign.get(&c).ok_or(WordError::Unassigned(c))?;
            acc = acc.mul(m);
            if self.cache.len() >= self.capacity {
                self.cache.clear();
            }
            self.cache.insert(s[..=i].to_string(), acc);
        }
        Ok(acc)
    }

    /// Evaluate a word given as any string (parsed first).
    pub fn evaluate_str(&mut self, s: &str) -> Result<GroupElement, WordError> {
        self.evaluate(&Word::parse(s)?)
    }
}
