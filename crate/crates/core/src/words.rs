//! Freely reduced words in a finitely generated free group.

use alloc::collections::BTreeMap;
use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// Index of a generator inside its [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

/// A generator or its inverse, packed as `2 * letter + (inverse as u32)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedLetter(u32);

impl SignedLetter {
    pub const fn new(letter: Letter, positive: bool) -> Self {
        SignedLetter(letter.0 * 2 + if positive { 0 } else { 1 })
    }

    pub const fn pos(index: u32) -> Self {
        SignedLetter(index * 2)
    }

    pub const fn neg(index: u32) -> Self {
        SignedLetter(index * 2 + 1)
    }

    pub const fn from_code(code: u32) -> Self {
        SignedLetter(code)
    }

    pub const fn code(self) -> u32 {
        self.0
    }

    pub const fn letter(self) -> Letter {
        Letter(self.0 >> 1)
    }

    pub const fn index(self) -> u32 {
        self.0 >> 1
    }

    pub const fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    pub const fn exponent(self) -> i32 {
        if self.is_positive() {
            1
        } else {
            -1
        }
    }

    pub const fn inverse(self) -> Self {
        SignedLetter(self.0 ^ 1)
    }

    /// Same letter with the exponent multiplied by `sign`.
    pub const fn pow_sign(self, sign: i32) -> Self {
        if sign < 0 {
            self.inverse()
        } else {
            self
        }
    }
}

impl fmt::Debug for SignedLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "g{}", self.index())
        } else {
            write!(f, "g{}^-1", self.index())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordError {
    UnknownLetter(String),
    DuplicateLetter(String),
    BadName(String),
    BadToken(String),
    OutsideDomain(Letter),
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::UnknownLetter(n) => write!(f, "unknown generator `{n}`"),
            WordError::DuplicateLetter(n) => write!(f, "generator `{n}` declared twice"),
            WordError::BadName(n) => write!(f, "`{n}` is not a valid generator name"),
            WordError::BadToken(t) => write!(f, "cannot parse word token `{t}`"),
            WordError::OutsideDomain(l) => write!(f, "letter {} is outside the map's domain", l.0),
        }
    }
}

/// Ordered list of generator names. Declaration order is the canonical letter order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Alphabet {
    names: Vec<String>,
    lookup: BTreeMap<String, u32>,
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self, WordError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut alphabet = Alphabet::default();
        for name in names {
            alphabet.push(name.as_ref())?;
        }
        Ok(alphabet)
    }

    /// Appends a generator and returns its letter.
    pub fn push(&mut self, name: &str) -> Result<Letter, WordError> {
        if !valid_name(name) {
            return Err(WordError::BadName(name.to_string()));
        }
        if self.lookup.contains_key(name) {
            return Err(WordError::DuplicateLetter(name.to_string()));
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.lookup.insert(name.to_string(), id);
        Ok(Letter(id))
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.names[letter.0 as usize]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.lookup.get(name).map(|&i| Letter(i))
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.names.len() as u32).map(Letter)
    }

    /// Parses `a1 b2^-1 a1`; `1` (or blank) is the empty word. Integer exponents
    /// like `a^3` are expanded.
    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        let mut raw = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (name, exp) = match token.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| WordError::BadToken(token.to_string()))?;
                    (n, e)
                }
                None => (token, 1),
            };
            let letter = self
                .letter(name)
                .ok_or_else(|| WordError::UnknownLetter(name.to_string()))?;
            let s = SignedLetter::new(letter, exp > 0);
            for _ in 0..exp.unsigned_abs() {
                raw.push(s);
            }
        }
        Ok(Word::reduce(raw))
    }

    /// Inverse of [`Alphabet::parse_word`]; consecutive letters are not collapsed.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut out = String::new();
        for (i, s) in w.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.name(s.letter()));
            if !s.is_positive() {
                out.push_str("^-1");
            }
        }
        out
    }
}

/// A freely reduced word.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<SignedLetter>);

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Free reduction of an arbitrary letter sequence.
pub fn reduce<I: IntoIterator<Item = SignedLetter>>(raw: I) -> Word {
    Word::reduce(raw)
}

impl Word {
    pub const fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn reduce<I: IntoIterator<Item = SignedLetter>>(raw: I) -> Self {
        let mut out: Vec<SignedLetter> = Vec::new();
        for s in raw {
            if out.last() == Some(&s.inverse()) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        Word(out)
    }

    /// Wraps a sequence that is already reduced; `None` otherwise.
    pub fn from_reduced(letters: Vec<SignedLetter>) -> Option<Self> {
        if letters.windows(2).any(|p| p[0] == p[1].inverse()) {
            None
        } else {
            Some(Word(letters))
        }
    }

    pub fn letter(s: SignedLetter) -> Self {
        Word(alloc::vec![s])
    }

    /// `s^k` for any integer `k`.
    pub fn power_of(s: SignedLetter, k: i64) -> Self {
        let s = if k < 0 { s.inverse() } else { s };
        Word(alloc::vec![s; k.unsigned_abs() as usize])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[SignedLetter] {
        &self.0
    }

    pub fn iter(&self) -> core::slice::Iter<'_, SignedLetter> {
        self.0.iter()
    }

    pub fn first(&self) -> Option<SignedLetter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<SignedLetter> {
        self.0.last().copied()
    }

    pub fn into_vec(self) -> Vec<SignedLetter> {
        self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|s| s.inverse()).collect())
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let k = cancel_len(&self.0, &other.0);
        let mut v = Vec::with_capacity(self.len() + other.len() - 2 * k);
        v.extend_from_slice(&self.0[..self.len() - k]);
        v.extend_from_slice(&other.0[k..]);
        Word(v)
    }

    pub fn mul_letter(&self, s: SignedLetter) -> Word {
        let mut v = self.0.clone();
        if v.last() == Some(&s.inverse()) {
            v.pop();
        } else {
            v.push(s);
        }
        Word(v)
    }

    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Word::empty();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Subword on the index range; a subword of a reduced word is reduced.
    pub fn slice(&self, range: core::ops::Range<usize>) -> Word {
        Word(self.0[range].to_vec())
    }

    pub fn prefix(&self, n: usize) -> Word {
        self.slice(0..n)
    }

    pub fn suffix(&self, n: usize) -> Word {
        self.slice(self.len() - n..self.len())
    }

    /// Sum of the exponents of `letter`.
    pub fn exponent_sum(&self, letter: Letter) -> i64 {
        self.0
            .iter()
            .filter(|s| s.letter() == letter)
            .map(|s| s.exponent() as i64)
            .sum()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) => self.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    pub fn starts_with(&self, p: &Word) -> bool {
        self.0.starts_with(&p.0)
    }

    pub fn ends_with(&self, p: &Word) -> bool {
        self.0.ends_with(&p.0)
    }

    pub fn max_letter(&self) -> Option<u32> {
        self.0.iter().map(|s| s.index()).max()
    }
}

impl From<Word> for Vec<SignedLetter> {
    fn from(w: Word) -> Self {
        w.0
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a SignedLetter;
    type IntoIter = core::slice::Iter<'a, SignedLetter>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl core::ops::Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        Word::mul(self, rhs)
    }
}

/// Length of the cancellation between the end of `a` and the start of `b`.
fn cancel_len(a: &[SignedLetter], b: &[SignedLetter]) -> usize {
    let mut k = 0;
    while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inverse() {
        k += 1;
    }
    k
}

pub fn invert(g: &Word) -> Word {
    g.inverse()
}

pub fn concat(g: &Word, h: &Word) -> Word {
    g.mul(h)
}

/// Reduced product of a sequence of words.
pub fn product<'a, I: IntoIterator<Item = &'a Word>>(words: I) -> Word {
    let mut acc = Word::empty();
    for w in words {
        acc = acc.mul(w);
    }
    acc
}

/// A cyclically reduced word, read up to rotation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn new(w: Word) -> Option<Self> {
        if w.is_cyclically_reduced() {
            Some(CyclicWord(w))
        } else {
            None
        }
    }

    pub fn word(&self) -> &Word {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord(self.0.inverse())
    }

    /// Rotation starting at offset `k`.
    pub fn rotation(&self, k: usize) -> Word {
        let s = self.0.as_slice();
        let mut v = Vec::with_capacity(s.len());
        v.extend_from_slice(&s[k..]);
        v.extend_from_slice(&s[..k]);
        Word(v)
    }

    /// Distinct rotations of the word and of its inverse, in sorted order.
    pub fn conjugates(&self) -> Vec<Word> {
        let inv = self.inverse();
        let mut set = BTreeSet::new();
        for k in 0..self.len().max(1) {
            if self.is_empty() {
                set.insert(Word::empty());
                break;
            }
            set.insert(self.rotation(k));
            set.insert(inv.rotation(k));
        }
        set.into_iter().collect()
    }
}

pub fn cyclic_conjugates(w: &CyclicWord) -> Vec<Word> {
    w.conjugates()
}

/// Splits `g = c · core · c⁻¹` with `core` cyclically reduced and `c` shortest.
pub fn cyclic_reduce(g: &Word) -> (Word, CyclicWord) {
    let s = g.as_slice();
    let mut k = 0;
    while 2 * k + 1 < s.len() && s[k] == s[s.len() - 1 - k].inverse() {
        k += 1;
    }
    (
        Word(s[..k].to_vec()),
        CyclicWord(Word(s[k..s.len() - k].to_vec())),
    )
}

/// Length of the longest common prefix.
pub fn common_prefix_len(g: &[SignedLetter], h: &[SignedLetter]) -> usize {
    g.iter().zip(h).take_while(|(a, b)| a == b).count()
}

/// Twice the Gromov product, `|g| + |h| − |g⁻¹h|`, computed from the definition.
pub fn gromov_product_doubled(g: &Word, h: &Word) -> usize {
    g.len() + h.len() - g.inverse().mul(h).len()
}

/// The Gromov product `(g, h)`; an integer for reduced words.
pub fn gromov_product(g: &Word, h: &Word) -> usize {
    common_prefix_len(g.as_slice(), h.as_slice())
}

/// Occurrences of the two-letter subword `p`.
pub fn count_pattern(g: &Word, p: (SignedLetter, SignedLetter)) -> usize {
    g.as_slice()
        .windows(2)
        .filter(|w| w[0] == p.0 && w[1] == p.1)
        .count()
}

/// A bijection of letters given as a table `letter -> image`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterMap(Vec<Letter>);

impl LetterMap {
    pub fn identity(rank: usize) -> Self {
        LetterMap((0..rank as u32).map(Letter).collect())
    }

    /// `None` unless `images` is a permutation of `0..images.len()`.
    pub fn new(images: Vec<Letter>) -> Option<Self> {
        let mut seen = alloc::vec![false; images.len()];
        for l in &images {
            let i = l.0 as usize;
            if i >= images.len() || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(LetterMap(images))
    }

    pub fn image(&self, l: Letter) -> Option<Letter> {
        self.0.get(l.0 as usize).copied()
    }

    pub fn swap(mut self, a: Letter, b: Letter) -> Self {
        self.0.swap(a.0 as usize, b.0 as usize);
        self
    }

    pub fn inverse(&self) -> Self {
        let mut inv = alloc::vec![Letter(0); self.0.len()];
        for (i, l) in self.0.iter().enumerate() {
            inv[l.0 as usize] = Letter(i as u32);
        }
        LetterMap(inv)
    }
}

pub fn apply_letter_map(sigma: &LetterMap, g: &Word) -> Result<Word, WordError> {
    g.iter()
        .map(|s| {
            sigma
                .image(s.letter())
                .map(|l| SignedLetter::new(l, s.is_positive()))
                .ok_or(WordError::OutsideDomain(s.letter()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Word)
}

/// Homomorphic image of `g` with generator `i` sent to `images[i]`.
pub fn substitute(g: &Word, images: &[Word]) -> Word {
    let mut acc = Word::empty();
    for s in g {
        let img = &images[s.index() as usize];
        acc = if s.is_positive() {
            acc.mul(img)
        } else {
            acc.mul(&img.inverse())
        };
    }
    acc
}

/// Reduced words of length at most `radius`, in length-lexicographic order.
pub struct Ball {
    rank: u32,
    radius: usize,
    level: Vec<Word>,
    pos: usize,
}

pub fn enumerate_ball(rank: usize, radius: usize) -> Ball {
    Ball {
        rank: rank as u32,
        radius,
        level: alloc::vec![Word::empty()],
        pos: 0,
    }
}

impl Iterator for Ball {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.pos == self.level.len() {
            let len = self.level.first().map_or(0, Word::len);
            if len >= self.radius || self.rank == 0 {
                return None;
            }
            let mut next = Vec::with_capacity(self.level.len() * (2 * self.rank as usize));
            for w in &self.level {
                for code in 0..2 * self.rank {
                    let s = SignedLetter(code);
                    if w.last() != Some(s.inverse()) {
                        let mut v = w.0.clone();
                        v.push(s);
                        next.push(Word(v));
                    }
                }
            }
            self.level = next;
            self.pos = 0;
        }
        let w = self.level[self.pos].clone();
        self.pos += 1;
        Some(w)
    }
}

/// `1 + Σ_{j=1..r} 2k(2k−1)^{j−1}`.
pub fn ball_size(rank: usize, radius: usize) -> usize {
    if rank == 0 {
        return 1;
    }
    let mut total = 1;
    let mut sphere = 2 * rank;
    for _ in 0..radius {
        total += sphere;
        sphere *= 2 * rank - 1;
    }
    total
}
