//! Presentations emitted from the construction schemas: padding search,
//! the Bowditch family, the perfect group `P` and its family `P_I`, the
//! Rips construction, its `F * P` variant and the `B_I * ℤ` extension.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cancellation::{check_c16, C16Verdict, CancellationError, Presentation};
use crate::order::OrderSpec;
use crate::words::{cyclic_reduce, substitute, Alphabet, CyclicWord, Letter, LetterMap, SignedLetter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructionError {
    IndexTooSmall(i64),
    NameClash(String),
    Padding(PaddingError),
    Presentation(CancellationError),
}

impl fmt::Display for ConstructionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionError::IndexTooSmall(i) => write!(f, "index {i} must exceed 20"),
            ConstructionError::NameClash(n) => write!(f, "generator name `{n}` clashes with a reserved letter"),
            ConstructionError::Padding(e) => write!(f, "{e}"),
            ConstructionError::Presentation(e) => write!(f, "{e}"),
        }
    }
}

impl From<PaddingError> for ConstructionError {
    fn from(e: PaddingError) -> Self {
        ConstructionError::Padding(e)
    }
}

impl From<CancellationError> for ConstructionError {
    fn from(e: CancellationError) -> Self {
        ConstructionError::Presentation(e)
    }
}

/// Constraints on one template word over the letters `x = 0`, `y = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordTarget {
    pub min_len: usize,
    pub x_sum: Option<i64>,
    pub y_sum: Option<i64>,
    /// Template letter (0 or 1) the word has to start with.
    pub first: Option<u32>,
    /// Template letter (0 or 1) the word has to end with.
    pub last: Option<u32>,
}

impl WordTarget {
    pub fn free(min_len: usize) -> Self {
        WordTarget { min_len, x_sum: None, y_sum: None, first: None, last: None }
    }
}

/// A padding request: one `(w, v)` pair per entry, `v` absent when `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddingSpec {
    pub seed: u64,
    pub pairs: Vec<(WordTarget, Option<WordTarget>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PaddingError {
    pub pair: usize,
    pub scale: usize,
    pub violation: String,
}

impl fmt::Display for PaddingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "padding search exhausted at pair {} (length scale {}%): {}",
            self.pair, self.scale, self.violation
        )
    }
}

const RETRIES: usize = 64;
const MAX_SCALE: usize = 400;
const FINAL_CAP: i64 = 4;

/// Alternating blocks `x^{±k} y^{±k}`; the last block of each letter absorbs
/// the exponent-sum target. `None` when the target cannot be met this draw.
fn sample_template(rng: &mut ChaCha8Rng, t: &WordTarget, min_len: usize) -> Option<Word> {
    let mut blocks: Vec<(u32, i64)> = Vec::new();
    let mut letter = t.first.unwrap_or_else(|| rng.gen_range(0..2));
    let mut len = 0usize;
    loop {
        let mag = match rng.gen_range(0..8) {
            0..=3 => 1,
            4..=6 => 2,
            _ => 3,
        };
        let e = if rng.gen_bool(0.5) { mag } else { -mag };
        blocks.push((letter, e));
        len += mag as usize;
        letter ^= 1;
        let closing = t.last.is_none_or(|l| l == blocks.last().unwrap().0);
        if len >= min_len && closing && blocks.len() >= 4 {
            break;
        }
    }
    for (which, target) in [(0u32, t.x_sum), (1u32, t.y_sum)] {
        let Some(target) = target else { continue };
        let last = blocks.iter().rposition(|b| b.0 == which)?;
        let others: i64 = blocks
            .iter()
            .enumerate()
            .filter(|&(i, b)| b.0 == which && i != last)
            .map(|(_, b)| b.1)
            .sum();
        let need = target - others;
        if need == 0 || need.abs() > FINAL_CAP {
            return None;
        }
        blocks[last].1 = need;
    }
    let mut raw = Vec::with_capacity(len + 8);
    for (l, e) in blocks {
        let s = SignedLetter::new(Letter(l), e > 0);
        for _ in 0..e.unsigned_abs() {
            raw.push(s);
        }
    }
    // Alternating letters never cancel.
    Word::from_reduced(raw)
}

fn sample_target(rng: &mut ChaCha8Rng, t: &WordTarget, scale: usize) -> Word {
    let min_len = (t.min_len * scale).div_ceil(100);
    loop {
        if let Some(w) = sample_template(rng, t, min_len) {
            return w;
        }
    }
}

fn first_failure(families: &[Vec<CyclicWord>]) -> Option<C16Verdict> {
    families.iter().map(|f| check_c16(f)).find(|v| !v.passed())
}

/// Seeded greedy search. Words are templates over letters `0` and `1`;
/// `assemble` maps the accepted pairs to the families that must stay C'(1/6),
/// returning `None` when a pair is structurally unusable (e.g. not cyclically reduced).
pub fn gen_padding<F>(spec: &PaddingSpec, assemble: F) -> Result<Vec<(Word, Word)>, PaddingError>
where
    F: Fn(&[(Word, Word)]) -> Option<Vec<Vec<CyclicWord>>>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut scale = 100;
    let mut last_violation = String::new();
    'outer: while scale <= MAX_SCALE {
        let mut chosen: Vec<(Word, Word)> = Vec::new();
        for (p, (wt, vt)) in spec.pairs.iter().enumerate() {
            let mut accepted = false;
            for _ in 0..RETRIES {
                let w = sample_target(&mut rng, wt, scale);
                let v = vt.as_ref().map_or(Word::empty(), |t| sample_target(&mut rng, t, scale));
                chosen.push((w, v));
                match assemble(&chosen) {
                    Some(fams) => match first_failure(&fams) {
                        None => {
                            accepted = true;
                            break;
                        }
                        Some(v) => last_violation = v.to_string(),
                    },
                    None => last_violation = "assembled word is not cyclically reduced".to_string(),
                }
                chosen.pop();
            }
            if !accepted {
                if scale + 25 > MAX_SCALE {
                    return Err(PaddingError { pair: p, scale, violation: last_violation });
                }
                scale += 25;
                continue 'outer;
            }
        }
        return Ok(chosen);
    }
    Err(PaddingError { pair: 0, scale, violation: last_violation })
}

/// Finite generating sets `h_i ↦ k_i` of isomorphic free subgroups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupMap {
    pub domain: Vec<Word>,
    pub codomain: Vec<Word>,
}

impl SubgroupMap {
    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn inverse(&self) -> SubgroupMap {
        SubgroupMap { domain: self.codomain.clone(), codomain: self.domain.clone() }
    }

    /// Image pair of a formal product `(generator, inverted)`.
    pub fn evaluate(&self, formal: &[(usize, bool)]) -> (Word, Word) {
        let mut h = Word::empty();
        let mut k = Word::empty();
        for &(i, inv) in formal {
            if inv {
                h = h.mul(&self.domain[i].inverse());
                k = k.mul(&self.codomain[i].inverse());
            } else {
                h = h.mul(&self.domain[i]);
                k = k.mul(&self.codomain[i]);
            }
        }
        (h, k)
    }

    /// The corrupted map with the images of `i` and `j` exchanged.
    pub fn swap_images(&self, i: usize, j: usize) -> SubgroupMap {
        let mut m = self.clone();
        m.codomain.swap(i, j);
        m
    }
}

/// `β_i(x, y) = x^i y x^i y² ⋯ x^i y²⁰`.
pub fn beta(i: u32, x: SignedLetter, y: SignedLetter) -> Word {
    let mut raw = Vec::with_capacity(20 * i as usize + 210);
    for k in 1..=20 {
        raw.extend(core::iter::repeat_n(x, i as usize));
        raw.extend(core::iter::repeat_n(y, k));
    }
    Word::reduce(raw)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bowditch {
    pub presentation: Presentation,
    pub map: SubgroupMap,
}

pub fn gen_bowditch(indices: &[i64]) -> Result<Bowditch, ConstructionError> {
    let alphabet = Alphabet::new(["a1", "a2", "b1", "b2"]).unwrap();
    let set: BTreeSet<i64> = indices.iter().copied().collect();
    let mut map = SubgroupMap { domain: Vec::new(), codomain: Vec::new() };
    let mut relators = Vec::new();
    for &i in &set {
        if i <= 20 {
            return Err(ConstructionError::IndexTooSmall(i));
        }
        let h = beta(i as u32, SignedLetter::pos(0), SignedLetter::pos(1));
        let k = beta(i as u32, SignedLetter::pos(2), SignedLetter::pos(3));
        relators.push(CyclicWord::new(h.mul(&k.inverse())).expect("distinct letters at the seams"));
        map.domain.push(h);
        map.codomain.push(k);
    }
    Ok(Bowditch { presentation: Presentation::new(alphabet, relators)?, map })
}

/// Adds a fresh free generator; the relators are untouched.
pub fn gen_cantor(base: &Presentation, name: &str) -> Result<Presentation, ConstructionError> {
    let mut alphabet = base.alphabet.clone();
    alphabet
        .push(name)
        .map_err(|_| ConstructionError::NameClash(name.to_string()))?;
    Ok(Presentation::new(alphabet, base.relators().to_vec())?)
}

/// A generator written `h = w · x^n · v` on the domain side and
/// `k = σ(w) · y^m · σ(v)` on the codomain side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub w: Word,
    pub x: Option<SignedLetter>,
    pub n: u32,
    pub v: Word,
    pub y: Option<SignedLetter>,
    pub m: u32,
}

impl Split {
    /// The split of the inverse generator: `w ↦ v⁻¹`, `v ↦ w⁻¹`, `x ↦ x⁻¹`.
    pub fn inverse(&self) -> Split {
        Split {
            w: self.v.inverse(),
            x: self.x.map(SignedLetter::inverse),
            n: self.n,
            v: self.w.inverse(),
            y: self.y.map(SignedLetter::inverse),
            m: self.m,
        }
    }

    pub fn h(&self) -> Word {
        let mid = self.x.map_or(Word::empty(), |x| Word::power_of(x, self.n as i64));
        self.w.mul(&mid).mul(&self.v)
    }
}

/// The amalgam `P = ⟨a, b⟩ *_H ⟨c, d⟩` with `h_i ↦ k_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectGroup {
    pub presentation: Presentation,
    pub map: SubgroupMap,
    /// One split per generator `h_i`, written in `a, b`; inverse-indexed
    /// generators come from [`PerfectGroup::oriented_splits`].
    pub splits: Vec<Split>,
    pub seed: u64,
    pub family: Vec<i64>,
}

pub const PERFECT_CORE: usize = 4;

impl PerfectGroup {
    /// `σ : a ↦ c, b ↦ d` (and back).
    pub fn sigma(&self) -> LetterMap {
        LetterMap::new(alloc::vec![Letter(2), Letter(3), Letter(0), Letter(1)]).unwrap()
    }

    /// `o₁ = ab` on `G₁` and `o₂ = cd` on `G₂`, both as restrictions of `a < b < c < d`.
    pub fn order(&self) -> OrderSpec {
        OrderSpec::natural(4)
    }

    /// `h_1 … h_N, h_1⁻¹ … h_N⁻¹` with their splits.
    pub fn oriented_splits(&self) -> Vec<Split> {
        let mut out = self.splits.clone();
        out.extend(self.splits.iter().map(Split::inverse));
        out
    }
}

const X_OF: [u32; 4] = [0, 0, 1, 1];
const N_OF: [u32; 4] = [3, 2, 3, 2];
const M_OF: [u32; 4] = [2, 3, 2, 3];

fn perfect_targets(min_len: usize) -> Vec<(WordTarget, Option<WordTarget>)> {
    (0..4)
        .map(|i| {
            let x = X_OF[i];
            // x-sum −1 for w₁, w₂, v₁, v₂; y-sum −1 for w₃, w₄, v₃, v₄.
            let (xs, ys) = if i < 2 { (-1, 0) } else { (0, -1) };
            let boundary = x ^ 1;
            let w = WordTarget { min_len, x_sum: Some(xs), y_sum: Some(ys), first: None, last: Some(boundary) };
            let v = WordTarget { min_len, x_sum: Some(xs), y_sum: Some(ys), first: Some(boundary), last: None };
            (w, Some(v))
        })
        .collect()
}

fn perfect_split(i: usize, w: &Word, v: &Word) -> Split {
    Split {
        w: w.clone(),
        x: Some(SignedLetter::pos(X_OF[i])),
        n: N_OF[i],
        v: v.clone(),
        y: Some(SignedLetter::pos(X_OF[i] + 2)),
        m: M_OF[i],
    }
}

fn to_g2(w: &Word) -> Word {
    substitute(w, &[Word::letter(SignedLetter::pos(2)), Word::letter(SignedLetter::pos(3))])
}

/// Families that have to be C'(1/6): `{h_i}`, `{k_i}` and `{h_i k_i⁻¹}`.
fn perfect_families(splits: &[Split], extra: &[(Word, Word)]) -> Option<Vec<Vec<CyclicWord>>> {
    let mut hs = Vec::new();
    let mut ks = Vec::new();
    let mut rs = Vec::new();
    let pairs = splits
        .iter()
        .map(|s| {
            let k = to_g2(&s.w)
                .mul(&Word::power_of(s.y.unwrap(), s.m as i64))
                .mul(&to_g2(&s.v));
            (s.h(), k)
        })
        .chain(extra.iter().cloned());
    for (h, k) in pairs {
        hs.push(CyclicWord::new(h.clone())?);
        ks.push(CyclicWord::new(k.clone())?);
        rs.push(CyclicWord::new(h.mul(&k.inverse()))?);
    }
    Some(alloc::vec![hs, ks, rs])
}

fn beta_pairs(family: &[i64]) -> Result<Vec<(Word, Word)>, ConstructionError> {
    family
        .iter()
        .map(|&i| {
            if i <= 20 {
                return Err(ConstructionError::IndexTooSmall(i));
            }
            Ok((
                beta(i as u32, SignedLetter::pos(0), SignedLetter::pos(1)),
                beta(i as u32, SignedLetter::pos(2), SignedLetter::pos(3)),
            ))
        })
        .collect()
}

const PERFECT_MIN_LEN: usize = 40;

fn build_perfect(seed: u64, family: &[i64], context: &[(Word, Word)]) -> Result<PerfectGroup, ConstructionError> {
    let spec = PaddingSpec { seed, pairs: perfect_targets(PERFECT_MIN_LEN) };
    let pads = gen_padding(&spec, |chosen| {
        let splits: Vec<Split> =
            chosen.iter().enumerate().map(|(i, (w, v))| perfect_split(i, w, v)).collect();
        perfect_families(&splits, context)
    })?;
    let mut splits: Vec<Split> =
        pads.iter().enumerate().map(|(i, (w, v))| perfect_split(i, w, v)).collect();
    let betas = beta_pairs(family)?;
    if perfect_families(&splits, &betas).and_then(|f| first_failure(&f)).is_some() {
        // Retry with the β words as context so the padding avoids them.
        if context.is_empty() && !betas.is_empty() {
            return build_perfect(seed, family, &betas);
        }
    }
    let alphabet = Alphabet::new(["a", "b", "c", "d"]).unwrap();
    let mut map = SubgroupMap { domain: Vec::new(), codomain: Vec::new() };
    let mut relators = Vec::new();
    for s in &splits {
        let h = s.h();
        let k = to_g2(&s.w).mul(&Word::power_of(s.y.unwrap(), s.m as i64)).mul(&to_g2(&s.v));
        relators.push(CyclicWord::new(h.mul(&k.inverse())).expect("checked during search"));
        map.domain.push(h);
        map.codomain.push(k);
    }
    for (h, k) in &betas {
        // Balanced split with an empty middle letter.
        let half = h.len() / 2;
        splits.push(Split { w: h.prefix(half), x: None, n: 1, v: h.suffix(h.len() - half), y: None, m: 1 });
        relators.push(CyclicWord::new(h.mul(&k.inverse())).expect("distinct letters at the seams"));
        map.domain.push(h.clone());
        map.codomain.push(k.clone());
    }
    Ok(PerfectGroup {
        presentation: Presentation::new(alphabet, relators)?,
        map,
        splits,
        seed,
        family: family.to_vec(),
    })
}

pub fn gen_perfect(seed: u64) -> Result<PerfectGroup, ConstructionError> {
    build_perfect(seed, &[], &[])
}

pub fn gen_perfect_family(seed: u64, indices: &[i64]) -> Result<PerfectGroup, ConstructionError> {
    let set: BTreeSet<i64> = indices.iter().copied().collect();
    let family: Vec<i64> = set.into_iter().collect();
    build_perfect(seed, &family, &[])
}

/// Relator families (5)–(11) of the Rips construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RipsFamily {
    /// `w(a) x_i ↦ w(b) x_i`
    XPlus,
    /// `w(a) x_i⁻¹ ↦ w(b) x_i⁻¹`
    XMinus,
    /// `w x_i y_l x_i⁻¹ v ↦ w(b) y_i d₂ y_i⁻¹ v(b)`
    YConjPlus,
    /// `w x_i⁻¹ y_l x_i v ↦ w(b) y_i⁻¹ d₂ y_i v(b)`
    YConjMinus,
    /// `w x_i z_l x_i⁻¹ v ↦ w(b) y_i z_l' y_i⁻¹ v(b)`
    ZConjPlus,
    /// `w x_i⁻¹ z_l x_i v ↦ w(b) y_i⁻¹ z_l' y_i v(b)`
    ZConjMinus,
    /// `w r(x) v ↦ w(b) r(y) v(b)` for a relator `r` of `Q`
    Relator,
}

impl RipsFamily {
    pub fn label(self) -> &'static str {
        match self {
            RipsFamily::XPlus => "x+",
            RipsFamily::XMinus => "x-",
            RipsFamily::YConjPlus => "y-conj+",
            RipsFamily::YConjMinus => "y-conj-",
            RipsFamily::ZConjPlus => "z-conj+",
            RipsFamily::ZConjMinus => "z-conj-",
            RipsFamily::Relator => "relator",
        }
    }
}

/// One generating pair `(h_j, k_j)` with its decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RipsPair {
    pub index: usize,
    pub family: RipsFamily,
    /// `i` (the x-letter, or the Q-relator number for [`RipsFamily::Relator`]).
    pub i: usize,
    /// `l` (the conjugated letter), 0 when unused.
    pub l: usize,
    /// Padding in `a₁, a₂`.
    pub w: Word,
    pub v: Word,
    pub h_mid: Word,
    pub k_mid: Word,
    pub h: Word,
    pub k: Word,
}

/// Letter layout of `F = ⟨a₁ a₂ b₁ b₂ c x₁…x_n d₁ d₂ d₃ y₁…y_n e⟩`, optionally
/// followed by `e₁ … e₄` (a copy of `P`), then the stable letter `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RipsLayout {
    pub n: usize,
    pub with_p: bool,
}

impl RipsLayout {
    pub fn a(&self, k: u32) -> Letter {
        Letter(k - 1)
    }
    pub fn b(&self, k: u32) -> Letter {
        Letter(k + 1)
    }
    pub fn c(&self) -> Letter {
        Letter(4)
    }
    pub fn x(&self, i: usize) -> Letter {
        Letter(4 + i as u32)
    }
    pub fn d(&self, k: u32) -> Letter {
        Letter(4 + self.n as u32 + k)
    }
    pub fn y(&self, i: usize) -> Letter {
        Letter(7 + self.n as u32 + i as u32)
    }
    pub fn e(&self) -> Letter {
        Letter(8 + 2 * self.n as u32)
    }
    /// Generators `e₁…e₄` of the embedded `P`.
    pub fn p(&self, k: u32) -> Letter {
        assert!(self.with_p);
        Letter(8 + 2 * self.n as u32 + k)
    }
    pub fn q(&self) -> Letter {
        Letter(self.free_rank() as u32)
    }
    /// Letters of `F`: `2n + 9`.
    pub fn f_rank(&self) -> usize {
        2 * self.n + 9
    }

    /// Generators of `G`: the letters of `F` and `q` (`2n + 10`), plus `e₁…e₄` with `P`.
    pub fn g_rank(&self) -> usize {
        self.free_rank() + 1
    }
    /// Letters of the base group (`F`, or `F * P`).
    pub fn free_rank(&self) -> usize {
        self.f_rank() + if self.with_p { 4 } else { 0 }
    }

    pub fn is_a(&self, l: Letter) -> bool {
        l.0 < 4
    }
    pub fn is_x(&self, l: Letter) -> bool {
        l.0 >= 5 && l.0 < 5 + self.n as u32
    }
    pub fn is_y(&self, l: Letter) -> bool {
        l.0 >= self.y(1).0 && l.0 <= self.y(self.n).0
    }
    pub fn is_d(&self, l: Letter) -> bool {
        l.0 >= self.d(1).0 && l.0 <= self.d(3).0
    }
    pub fn is_p(&self, l: Letter) -> bool {
        self.with_p && l.0 >= self.p(1).0 && l.0 <= self.p(4).0
    }
    pub fn x_index(&self, l: Letter) -> usize {
        (l.0 - 4) as usize
    }
    pub fn y_index(&self, l: Letter) -> usize {
        (l.0 - 7 - self.n as u32) as usize
    }

    /// `z₁ … z₉` (and `z₁₀ … z₁₃ = e₁ … e₄` with `P`).
    pub fn z(&self, l: usize) -> Letter {
        match l {
            1 => self.a(1),
            2 => self.a(2),
            3 => self.b(1),
            4 => self.b(2),
            5 => self.c(),
            6 => self.d(1),
            7 => self.d(2),
            8 => self.d(3),
            9 => self.e(),
            10..=13 => self.p(l as u32 - 9),
            _ => panic!("no z_{l}"),
        }
    }

    pub fn z_count(&self) -> usize {
        if self.with_p {
            13
        } else {
            9
        }
    }

    pub fn names(&self) -> Vec<String> {
        let n = self.n;
        let mut v: Vec<String> = ["a1", "a2", "b1", "b2", "c"].iter().map(|s| s.to_string()).collect();
        v.extend((1..=n).map(|i| format!("x{i}")));
        v.extend(["d1", "d2", "d3"].iter().map(|s| s.to_string()));
        v.extend((1..=n).map(|i| format!("y{i}")));
        v.push("e".to_string());
        if self.with_p {
            v.extend((1..=4).map(|i| format!("e{i}")));
        }
        v.push("q".to_string());
        v
    }

    /// `φ`: `a_k ↔ b_k`, `x_i ↔ y_i`, everything else fixed. An involution with `φ(o₁) = o₂`.
    pub fn prime(&self) -> LetterMap {
        let mut m = LetterMap::identity(self.free_rank() + 1);
        m = m.swap(self.a(1), self.b(1)).swap(self.a(2), self.b(2));
        for i in 1..=self.n {
            m = m.swap(self.x(i), self.y(i));
        }
        m
    }

    /// `o₁ = a₁a₂ b₁b₂ c X d₁d₂d₃ Y e` (the declaration order) with
    /// `e₁ … e₄` and `q` appended.
    pub fn order1(&self) -> OrderSpec {
        OrderSpec::natural(self.free_rank() + 1)
    }

    /// `o₂ = b₁b₂ a₁a₂ c Y d₁d₂d₃ X e`.
    pub fn order2(&self) -> OrderSpec {
        let mut t: Vec<Letter> = alloc::vec![self.b(1), self.b(2), self.a(1), self.a(2), self.c()];
        t.extend((1..=self.n).map(|i| self.y(i)));
        t.extend([self.d(1), self.d(2), self.d(3)]);
        t.extend((1..=self.n).map(|i| self.x(i)));
        t.push(self.e());
        t.extend((self.f_rank()..=self.free_rank()).map(|i| Letter(i as u32)));
        OrderSpec::new(t).unwrap()
    }

    pub fn order(&self, which: u8) -> OrderSpec {
        if which == 1 {
            self.order1()
        } else {
            self.order2()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RipsOutput {
    /// `G = ⟨F, q ∣ h_j q k_j⁻¹ q⁻¹, …⟩` (plus the relators of `P` for the variant).
    pub presentation: Presentation,
    pub layout: RipsLayout,
    pub pairs: Vec<RipsPair>,
    pub phi: SubgroupMap,
    /// Names of `N`'s generators.
    pub n_generators: Vec<String>,
    /// Generator of `G` ↦ generator of `Q` (`None` for the identity).
    pub projection: Vec<Option<usize>>,
    /// `Q`'s generator names, in the order of `x₁ … x_n`.
    pub q_names: Vec<String>,
    /// The cyclically reduced relators of `Q`, over `x₁ … x_n` (letters `0..n`).
    pub q_relators: Vec<Word>,
    /// The embedded `P` for the `F * P` variant.
    pub p: Option<PerfectGroup>,
    pub seed: u64,
}

impl RipsOutput {
    /// Count of pairs from the families other than the Q-relator family.
    pub fn pre_q_pairs(&self) -> usize {
        self.pairs.iter().filter(|p| p.family != RipsFamily::Relator).count()
    }

    /// `Q` as a presentation on `x₁ … x_n`.
    pub fn q_presentation(&self) -> Presentation {
        let alphabet = Alphabet::new(&self.q_names).unwrap();
        Presentation::from_words(alphabet, self.q_relators.clone()).expect("validated on input")
    }

    /// `P`'s relators rewritten in `e₁ … e₄`.
    pub fn p_relators(&self) -> Vec<Word> {
        let Some(p) = &self.p else { return Vec::new() };
        let images: Vec<Word> = (1..=4).map(|k| Word::letter(SignedLetter::new(self.layout.p(k), true))).collect();
        p.presentation.relators().iter().map(|r| substitute(r.word(), &images)).collect()
    }

    /// The embedded `P` as a presentation over `e₁ … e₄`.
    pub fn p_presentation(&self) -> Option<Presentation> {
        let p = self.p.as_ref()?;
        let alphabet = Alphabet::new(["e1", "e2", "e3", "e4"]).unwrap();
        Some(Presentation::new(alphabet, p.presentation.relators().to_vec()).unwrap())
    }
}

const RESERVED: [&str; 11] = ["a1", "a2", "b1", "b2", "c", "d1", "d2", "d3", "e", "q", "e1"];

fn rips_min_len(n: usize) -> usize {
    60 + 20 * n
}

fn check_q_names(q: &Presentation) -> Result<(), ConstructionError> {
    for name in q.alphabet.names() {
        let reserved = RESERVED.contains(&name.as_str())
            || ["e2", "e3", "e4"].contains(&name.as_str())
            || (name.starts_with('y') && name[1..].parse::<usize>().is_ok());
        if reserved {
            return Err(ConstructionError::NameClash(name.clone()));
        }
    }
    Ok(())
}

struct PairShape {
    family: RipsFamily,
    i: usize,
    l: usize,
    h_mid: Word,
    k_mid: Word,
    has_v: bool,
}

fn rips_shapes(layout: &RipsLayout, q_relators: &[Word]) -> Vec<PairShape> {
    let n = layout.n;
    let sl = |l: Letter, e: i64| Word::power_of(SignedLetter::new(l, true), e);
    let conj = |outer: Letter, eps: i64, mid: Word| sl(outer, eps).mul(&mid).mul(&sl(outer, -eps));
    let mut out = Vec::new();
    for (family, eps) in [(RipsFamily::XPlus, 1), (RipsFamily::XMinus, -1)] {
        for i in 1..=n {
            out.push(PairShape { family, i, l: 0, h_mid: sl(layout.x(i), eps), k_mid: sl(layout.x(i), eps), has_v: false });
        }
    }
    for (family, eps) in [(RipsFamily::YConjPlus, 1), (RipsFamily::YConjMinus, -1)] {
        for l in 1..=n {
            for i in 1..=n {
                out.push(PairShape {
                    family,
                    i,
                    l,
                    h_mid: conj(layout.x(i), eps, sl(layout.y(l), 1)),
                    k_mid: conj(layout.y(i), eps, sl(layout.d(2), 1)),
                    has_v: true,
                });
            }
        }
    }
    let prime = layout.prime();
    for (family, eps) in [(RipsFamily::ZConjPlus, 1), (RipsFamily::ZConjMinus, -1)] {
        for l in 1..=layout.z_count() {
            for i in 1..=n {
                let z = layout.z(l);
                out.push(PairShape {
                    family,
                    i,
                    l,
                    h_mid: conj(layout.x(i), eps, sl(z, 1)),
                    k_mid: conj(layout.y(i), eps, sl(prime.image(z).unwrap(), 1)),
                    has_v: true,
                });
            }
        }
    }
    let xs: Vec<Word> = (1..=n).map(|i| sl(layout.x(i), 1)).collect();
    let ys: Vec<Word> = (1..=n).map(|i| sl(layout.y(i), 1)).collect();
    for (r, rel) in q_relators.iter().enumerate() {
        out.push(PairShape {
            family: RipsFamily::Relator,
            i: r + 1,
            l: 0,
            h_mid: substitute(rel, &xs),
            k_mid: substitute(rel, &ys),
            has_v: true,
        });
    }
    out
}

fn rips_pair_words(layout: &RipsLayout, shape: &PairShape, w: &Word, v: &Word) -> (Word, Word, Word, Word) {
    let to_a = [Word::letter(SignedLetter::new(layout.a(1), true)), Word::letter(SignedLetter::new(layout.a(2), true))];
    let to_b = [Word::letter(SignedLetter::new(layout.b(1), true)), Word::letter(SignedLetter::new(layout.b(2), true))];
    let wa = substitute(w, &to_a);
    let va = substitute(v, &to_a);
    let h = wa.mul(&shape.h_mid).mul(&va);
    let k = substitute(w, &to_b).mul(&shape.k_mid).mul(&substitute(v, &to_b));
    (wa, va, h, k)
}

fn build_rips(q: &Presentation, seed: u64, with_p: bool) -> Result<RipsOutput, ConstructionError> {
    check_q_names(q)?;
    let n = q.rank();
    let layout = RipsLayout { n, with_p };
    let q_relators: Vec<Word> = q.relators().iter().map(|r| cyclic_reduce(r.word()).1.word().clone()).collect();
    let shapes = rips_shapes(&layout, &q_relators);
    let p = if with_p { Some(gen_perfect(seed)?) } else { None };
    let p_context: Vec<CyclicWord> = match &p {
        Some(p) => {
            let images: Vec<Word> =
                (1..=4).map(|k| Word::letter(SignedLetter::new(layout.p(k), true))).collect();
            p.presentation
                .relators()
                .iter()
                .map(|r| CyclicWord::new(substitute(r.word(), &images)).unwrap())
                .collect()
        }
        None => Vec::new(),
    };
    let min_len = rips_min_len(n);
    let spec = PaddingSpec {
        seed,
        pairs: shapes
            .iter()
            .map(|s| {
                if s.has_v {
                    (WordTarget::free(min_len / 2), Some(WordTarget::free(min_len / 2)))
                } else {
                    (WordTarget::free(min_len), None)
                }
            })
            .collect(),
    };
    let pads = gen_padding(&spec, |chosen| {
        let mut fam = p_context.clone();
        for (shape, (w, v)) in shapes.iter().zip(chosen) {
            let (_, _, h, k) = rips_pair_words(&layout, shape, w, v);
            fam.push(CyclicWord::new(h)?);
            fam.push(CyclicWord::new(k)?);
        }
        Some(alloc::vec![fam])
    })?;

    let q_letter = SignedLetter::new(layout.q(), true);
    let mut pairs = Vec::new();
    let mut relators = Vec::new();
    let mut phi = SubgroupMap { domain: Vec::new(), codomain: Vec::new() };
    for (idx, (shape, (w, v))) in shapes.iter().zip(&pads).enumerate() {
        let (wa, va, h, k) = rips_pair_words(&layout, shape, w, v);
        let rel = h.mul(&Word::letter(q_letter)).mul(&k.inverse()).mul(&Word::letter(q_letter.inverse()));
        relators.push(CyclicWord::new(rel).expect("q separates the halves"));
        phi.domain.push(h.clone());
        phi.codomain.push(k.clone());
        pairs.push(RipsPair {
            index: 2 * (idx + 1),
            family: shape.family,
            i: shape.i,
            l: shape.l,
            w: wa,
            v: va,
            h_mid: shape.h_mid.clone(),
            k_mid: shape.k_mid.clone(),
            h,
            k,
        });
    }
    relators.extend(p_context.iter().cloned());

    let names = layout.names();
    let alphabet = Alphabet::new(&names).unwrap();
    let mut n_generators = alloc::vec!["q".to_string()];
    n_generators.extend(["a1", "a2", "b1", "b2", "c", "d1", "d2", "d3"].iter().map(|s| s.to_string()));
    n_generators.extend((1..=n).map(|i| format!("y{i}")));
    n_generators.push("e".to_string());
    if with_p {
        n_generators.extend((1..=4).map(|i| format!("e{i}")));
    }
    let mut projection = alloc::vec![None; alphabet.rank()];
    for i in 1..=n {
        projection[layout.x(i).0 as usize] = Some(i - 1);
    }
    Ok(RipsOutput {
        presentation: Presentation::new(alphabet, relators)?,
        layout,
        pairs,
        phi,
        n_generators,
        projection,
        q_names: q.alphabet.names().to_vec(),
        q_relators,
        p,
        seed,
    })
}

pub fn gen_rips(q: &Presentation, seed: u64) -> Result<RipsOutput, ConstructionError> {
    build_rips(q, seed, false)
}

/// The variant over `F * P`, with `z₁₀ … z₁₃ = e₁ … e₄`.
pub fn gen_rips_nli(q: &Presentation, seed: u64) -> Result<RipsOutput, ConstructionError> {
    build_rips(q, seed, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cancellation::check_c16;
    use crate::zlattice::is_perfect;

    #[test]
    fn beta_shape() {
        let b = beta(21, SignedLetter::pos(0), SignedLetter::pos(1));
        assert_eq!(b.len(), 20 * 21 + 210);
        assert_eq!(b.exponent_sum(Letter(0)), 420);
        assert_eq!(b.exponent_sum(Letter(1)), 210);
    }

    #[test]
    fn bowditch_examples() {
        assert_eq!(gen_bowditch(&[]).unwrap().presentation.relators().len(), 0);
        let b = gen_bowditch(&[21]).unwrap();
        assert_eq!(b.presentation.relators()[0].len(), 1260);
        assert!(gen_bowditch(&[20]).is_err());
    }

    #[test]
    fn cantor_adds_generator() {
        let b = gen_bowditch(&[21]).unwrap();
        let c = gen_cantor(&b.presentation, "t").unwrap();
        assert_eq!(c.rank(), 5);
        assert_eq!(c.relators(), b.presentation.relators());
        assert!(gen_cantor(&b.presentation, "a1").is_err());
    }

    #[test]
    fn padding_is_deterministic_and_meets_targets() {
        let spec = PaddingSpec { seed: 11, pairs: perfect_targets(30) };
        let run = || {
            gen_padding(&spec, |chosen| {
                let splits: Vec<Split> =
                    chosen.iter().enumerate().map(|(i, (w, v))| perfect_split(i, w, v)).collect();
                perfect_families(&splits, &[])
            })
            .unwrap()
        };
        let a = run();
        assert_eq!(a, run());
        assert_eq!(a[0].0.exponent_sum(Letter(0)), -1);
        assert_eq!(a[0].1.exponent_sum(Letter(0)), -1);
        assert_eq!(a[2].0.exponent_sum(Letter(1)), -1);
        assert_eq!(a[2].0.exponent_sum(Letter(0)), 0);
    }

    #[test]
    fn perfect_group_is_perfect_and_c16() {
        let p = gen_perfect(1).unwrap();
        assert!(is_perfect(&p.presentation));
        assert!(check_c16(p.presentation.relators()).passed());
        let t = p.order();
        for (h, k) in p.map.domain.iter().zip(&p.map.codomain) {
            assert_eq!(t.tau(h), t.tau(k));
        }
    }

    #[test]
    fn rips_small_counts() {
        let q = Presentation::free(Alphabet::new(["x1"]).unwrap());
        let r = gen_rips(&q, 0).unwrap();
        assert_eq!(r.layout.f_rank(), 11);
        assert_eq!(r.presentation.rank(), 12);
        assert_eq!(r.n_generators.len(), 11);
        assert_eq!(r.pre_q_pairs(), 22);
    }
}
