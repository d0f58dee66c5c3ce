//! Witness maps `g ↦ f` for the amalgam and HNN constructions, and the
//! harness checking `sign(g h g⁻¹) = sign(f φ(h) f⁻¹)` over sampled `g`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use rand::Rng;

use crate::cancellation::{build_piece_table, overlap, DehnReducer, Position};
use crate::constructions::{PerfectGroup, RipsFamily, RipsLayout, RipsOutput, SubgroupMap};
use crate::order::{omega, OrderSpec, Sign};
use crate::product::{Factor, FreeFactor, FreeProduct, ProductElement, Syllable};
use crate::words::{apply_letter_map, CyclicWord, Letter, LetterMap, SignedLetter, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        }
    }
}

/// Which comparison picked the inserted letter `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SBranch {
    BelowC,
    /// `t` against the conjugating letter, then against the middle letter.
    Cmp(Ordering, Ordering),
    EmptyPrefix,
}

impl fmt::Display for SBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |o: &Ordering| match o {
            Ordering::Less => "<",
            Ordering::Equal => "=",
            Ordering::Greater => ">",
        };
        match self {
            SBranch::BelowC => f.write_str("t<c"),
            SBranch::Cmp(a, b) => write!(f, "t{}outer,t{}mid", sym(a), sym(b)),
            SBranch::EmptyPrefix => f.write_str("empty"),
        }
    }
}

/// The junction rule used when `g` is p-reduced with every generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Junction {
    /// Ends in `A`, `c`, `e` (or is empty).
    Plain,
    /// Ends in `x_i`; the letter before it is below `c`, equal, between or above.
    XBelowC,
    XEqual,
    XBetween,
    XAbove,
    /// Ends in a `Y` or `D` letter, below or above `X`.
    LowYD,
    HighYD,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CaseTag {
    Trivial,
    /// Letter swap for a p-reduced `g`.
    Swap,
    Perfect(u8),
    /// Failure on a Bowditch-family generator: letter swap.
    PerfectBeta,
    Junction(Junction),
    Rips(u8, Option<SBranch>),
    /// `F * P`: `g` ends in a `P`-syllable.
    PSyllable,
    Unmatched,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::Trivial => f.write_str("trivial"),
            CaseTag::Swap => f.write_str("swap"),
            CaseTag::Perfect(k) => write!(f, "case{k}"),
            CaseTag::PerfectBeta => f.write_str("beta"),
            CaseTag::Junction(j) => write!(f, "junction:{j:?}"),
            CaseTag::Rips(k, None) => write!(f, "case{k}"),
            CaseTag::Rips(k, Some(b)) => write!(f, "case{k}[{b}]"),
            CaseTag::PSyllable => f.write_str("p-syllable"),
            CaseTag::Unmatched => f.write_str("unmatched"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateWitness {
    pub g: Word,
    pub f: Word,
    pub case: CaseTag,
    /// Oriented generators `h_j` peeled off, in order (`g = g₀ h_{j_r}⁻¹ ⋯ h_{j_1}⁻¹`).
    pub peel: Vec<usize>,
}

/// A generator `w · mid · v` in one orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Oriented {
    pub w: Word,
    pub mid: Word,
    pub v: Word,
    pub word: Word,
    pub pair: usize,
    pub inverted: bool,
    pub family: Option<RipsFamily>,
}

impl Oriented {
    fn new(w: Word, mid: Word, v: Word, pair: usize, family: Option<RipsFamily>) -> Self {
        let word = w.mul(&mid).mul(&v);
        Oriented { w, mid, v, word, pair, inverted: false, family }
    }

    fn inverse(&self) -> Self {
        Oriented {
            w: self.v.inverse(),
            mid: self.mid.inverse(),
            v: self.w.inverse(),
            word: self.word.inverse(),
            pair: self.pair,
            inverted: !self.inverted,
            family: self.family,
        }
    }
}

/// Domain and codomain generators in both orientations, with piece data.
#[derive(Clone, Debug)]
pub struct Sides {
    pub dom: Vec<Oriented>,
    pub cod: Vec<Oriented>,
    pub prefix_piece: Vec<usize>,
    pub suffix_piece: Vec<usize>,
}

impl Sides {
    fn new(dom: Vec<Oriented>, cod: Vec<Oriented>) -> Self {
        let family: Vec<CyclicWord> =
            dom.iter().map(|o| CyclicWord::new(o.word.clone()).expect("cyclically reduced generators")).collect();
        let table = build_piece_table(&family);
        let n = dom.len();
        let mut prefix_piece = Vec::with_capacity(2 * n);
        let mut suffix_piece = Vec::with_capacity(2 * n);
        for inverted in [false, true] {
            for i in 0..n {
                prefix_piece.push(table.longest_at(Position { relator: i, inverted, offset: 0 }).0);
                suffix_piece.push(table.longest_at(Position { relator: i, inverted: !inverted, offset: 0 }).0);
            }
        }
        let dom_all: Vec<Oriented> = dom.iter().cloned().chain(dom.iter().map(Oriented::inverse)).collect();
        let cod_all: Vec<Oriented> = cod.iter().cloned().chain(cod.iter().map(Oriented::inverse)).collect();
        Sides { dom: dom_all, cod: cod_all, prefix_piece, suffix_piece }
    }

    pub fn map(&self) -> SubgroupMap {
        let n = self.dom.len() / 2;
        SubgroupMap {
            domain: self.dom[..n].iter().map(|o| o.word.clone()).collect(),
            codomain: self.cod[..n].iter().map(|o| o.word.clone()).collect(),
        }
    }

    /// Repeatedly multiplies by `h_j` while `(g⁻¹, h_j) ≥ |h_j| − |p_j|`.
    fn peel(&self, g: &Word) -> (Word, Vec<usize>) {
        let mut g = g.clone();
        let mut trace = Vec::new();
        loop {
            let hit = self.dom.iter().enumerate().find(|(j, o)| {
                let l = overlap(&g, &o.word);
                l > 0 && l + self.suffix_piece[*j] >= o.word.len()
            });
            match hit {
                Some((j, o)) => {
                    g = g.mul(&o.word);
                    trace.push(j);
                }
                None => return (g, trace),
            }
        }
    }

    /// `φ(h_{j_r}⁻¹ ⋯ h_{j_1}⁻¹)`, the codomain side of the peeled tail.
    fn tail(&self, trace: &[usize]) -> Word {
        let mut t = Word::empty();
        for &j in trace.iter().rev() {
            t = t.mul(&self.cod[j].word.inverse());
        }
        t
    }

    /// The generator `g` is not p-reduced with, and the overlap length.
    fn failing(&self, g: &Word) -> Option<(usize, usize)> {
        self.dom.iter().enumerate().find_map(|(j, o)| {
            let l = overlap(g, &o.word);
            (l > self.prefix_piece[j]).then_some((j, l))
        })
    }
}

fn map_word(m: &LetterMap, w: &Word) -> Word {
    apply_letter_map(m, w).expect("letters in range")
}

/// The amalgam `P`: domain `⟨a, b⟩` (or `⟨c, d⟩` for the inverse direction).
#[derive(Clone, Debug)]
pub struct PerfectCompat {
    pub direction: Direction,
    pub order: OrderSpec,
    pub swap: LetterMap,
    pub sides: Sides,
    pub core_pairs: usize,
}

impl PerfectCompat {
    pub fn new(p: &PerfectGroup, direction: Direction) -> Self {
        let sigma = p.sigma();
        let mut a_side = Vec::new();
        let mut c_side = Vec::new();
        for (i, s) in p.splits.iter().enumerate() {
            let mid_h = s.x.map_or(Word::empty(), |x| Word::power_of(x, s.n as i64));
            let mid_k = s.y.map_or(Word::empty(), |y| Word::power_of(y, s.m as i64));
            a_side.push(Oriented::new(s.w.clone(), mid_h, s.v.clone(), i, None));
            c_side.push(Oriented::new(map_word(&sigma, &s.w), mid_k, map_word(&sigma, &s.v), i, None));
        }
        let sides = match direction {
            Direction::Forward => Sides::new(a_side, c_side),
            Direction::Inverse => Sides::new(c_side, a_side),
        };
        PerfectCompat { direction, order: p.order(), swap: sigma, sides, core_pairs: crate::constructions::PERFECT_CORE }
    }

    pub fn witness(&self, g: &Word) -> ConjugateWitness {
        if g.is_empty() {
            return ConjugateWitness { g: g.clone(), f: Word::empty(), case: CaseTag::Trivial, peel: Vec::new() };
        }
        let (g0, peel) = self.sides.peel(g);
        let (f0, case) = self.reduced_witness(&g0);
        let f = f0.mul(&self.sides.tail(&peel));
        ConjugateWitness { g: g.clone(), f, case, peel }
    }

    fn reduced_witness(&self, g: &Word) -> (Word, CaseTag) {
        let Some((j, l)) = self.sides.failing(g) else {
            let case = if g.is_empty() { CaseTag::Trivial } else { CaseTag::Swap };
            return (map_word(&self.swap, g), case);
        };
        let d = &self.sides.dom[j];
        let c = &self.sides.cod[j];
        if d.mid.is_empty() {
            return (map_word(&self.swap, g), CaseTag::PerfectBeta);
        }
        let (w, n) = (d.w.len(), d.mid.len());
        let m = c.mid.len() as i64;
        let y = c.mid.first().unwrap();
        let (case, k_prefix) = if l <= w {
            (1, map_word(&self.swap, &d.word.prefix(l)))
        } else if l == w + 1 {
            (2, c.w.mul_letter(y))
        } else if l + 1 == w + n {
            (3, c.w.mul(&Word::power_of(y, m - 1)))
        } else if l >= w + n {
            (4, c.w.mul(&c.mid).mul(&map_word(&self.swap, &d.v.prefix(l - w - n))))
        } else {
            return (map_word(&self.swap, g), CaseTag::Unmatched);
        };
        let g0 = g.mul(&d.word.prefix(l));
        (map_word(&self.swap, &g0).mul(&k_prefix.inverse()), CaseTag::Perfect(case))
    }
}

/// The HNN construction over `F` (or `F * P`), with domain order `o_j`.
#[derive(Clone, Debug)]
pub struct RipsCompat {
    pub direction: Direction,
    pub layout: RipsLayout,
    pub domain_order: u8,
    pub dom_order: OrderSpec,
    pub cod_order: OrderSpec,
    pub prime: LetterMap,
    pub sides: Sides,
    /// Sign data for `F * P`.
    pub product: Option<ProductModel>,
}

impl RipsCompat {
    pub fn new(r: &RipsOutput, direction: Direction, domain_order: u8) -> Self {
        let layout = r.layout;
        let prime = layout.prime();
        let mut h_side = Vec::new();
        let mut k_side = Vec::new();
        for (idx, p) in r.pairs.iter().enumerate() {
            h_side.push(Oriented::new(p.w.clone(), p.h_mid.clone(), p.v.clone(), idx, Some(p.family)));
            k_side.push(Oriented::new(
                map_word(&prime, &p.w),
                p.k_mid.clone(),
                map_word(&prime, &p.v),
                idx,
                Some(p.family),
            ));
        }
        let sides = match direction {
            Direction::Forward => Sides::new(h_side, k_side),
            Direction::Inverse => Sides::new(k_side, h_side),
        };
        let dom_order = layout.order(domain_order);
        let cod_order = layout.order(3 - domain_order);
        let product = r.p_presentation().map(|pp| ProductModel::new(&layout, pp, &dom_order, &cod_order));
        RipsCompat {
            direction,
            layout,
            domain_order,
            dom_order,
            cod_order,
            prime,
            sides,
            product,
        }
    }

    fn prime_word(&self, w: &Word) -> Word {
        map_word(&self.prime, w)
    }

    fn less(&self, a: Letter, b: Letter) -> bool {
        self.dom_order.less(a, b)
    }

    fn cmp(&self, a: Letter, b: Letter) -> Ordering {
        self.dom_order.position(a).cmp(&self.dom_order.position(b))
    }

    pub fn witness(&self, g: &Word) -> ConjugateWitness {
        if g.is_empty() {
            return ConjugateWitness { g: g.clone(), f: Word::empty(), case: CaseTag::Trivial, peel: Vec::new() };
        }
        if self.product.is_some() {
            let last_p = g.iter().rposition(|s| self.layout.is_p(s.letter()));
            if let Some(k) = last_p {
                if k + 1 == g.len() {
                    return ConjugateWitness {
                        g: g.clone(),
                        f: self.prime_word(g),
                        case: CaseTag::PSyllable,
                        peel: Vec::new(),
                    };
                }
                let g1 = g.prefix(k + 1);
                let inner = self.free_witness(&g.suffix(g.len() - k - 1));
                return ConjugateWitness {
                    g: g.clone(),
                    f: self.prime_word(&g1).mul(&inner.f),
                    case: inner.case,
                    peel: inner.peel,
                };
            }
        }
        self.free_witness(g)
    }

    fn free_witness(&self, g: &Word) -> ConjugateWitness {
        let (g0, peel) = self.sides.peel(g);
        let (f0, case) = self.reduced_witness(&g0);
        let f = f0.mul(&self.sides.tail(&peel));
        ConjugateWitness { g: g.clone(), f, case, peel }
    }

    fn reduced_witness(&self, g: &Word) -> (Word, CaseTag) {
        let Some((j, l)) = self.sides.failing(g) else {
            let (f, jn) = self.junction(g);
            return (f, if g.is_empty() { CaseTag::Trivial } else { CaseTag::Junction(jn) });
        };
        let d = &self.sides.dom[j];
        let c = &self.sides.cod[j];
        let w = d.w.len();
        match d.family.unwrap() {
            RipsFamily::XPlus | RipsFamily::XMinus if !d.inverted => (self.prime_word(g), CaseTag::Rips(1, None)),
            RipsFamily::YConjPlus | RipsFamily::YConjMinus if l > w => {
                let g0 = g.mul(&d.word.prefix(l));
                if l >= w + 3 {
                    let u0 = d.v.prefix(l - w - 3);
                    let tail = c.w.mul(&c.mid).mul(&self.prime_word(&u0));
                    return (self.prime_word(&g0).mul(&tail.inverse()), CaseTag::Rips(4, None));
                }
                let outer = d.mid.as_slice()[0].letter();
                let middle = d.mid.as_slice()[1].letter();
                let (f0, branch) = self.f0(&g0, outer, middle);
                let tail = c.w.mul(&c.mid.prefix(l - w));
                let case = if l == w + 1 { 2 } else { 3 };
                (f0.mul(&tail.inverse()), CaseTag::Rips(case, Some(branch)))
            }
            _ => (self.junction(g).0, CaseTag::Rips(5, None)),
        }
    }

    /// `f₀ = g₀' s^γ`, `t^γ` the last letter of `g₀`.
    fn f0(&self, g0: &Word, outer: Letter, middle: Letter) -> (Word, SBranch) {
        let Some(t) = g0.last() else {
            return (Word::empty(), SBranch::EmptyPrefix);
        };
        let base = self.prime_word(g0);
        let tl = t.letter();
        let ly = &self.layout;
        if self.less(tl, ly.c()) {
            let s = self.prime.image(tl).unwrap();
            return (base.mul_letter(SignedLetter::new(s, t.is_positive())), SBranch::BelowC);
        }
        let key = (self.cmp(tl, outer), self.cmp(tl, middle));
        use Ordering::*;
        let s = match (self.direction, key) {
            (_, (Less, Less)) => ly.c(),
            (Direction::Forward, (Less, Equal)) => ly.d(2),
            (Direction::Inverse, (Less, Equal)) => ly.c(),
            (_, (Less, Greater)) => ly.d(3),
            (Direction::Forward, (Equal, Less)) => ly.d(1),
            (Direction::Inverse, (Equal, Less)) => ly.d(2),
            (_, (Equal, _)) => self.prime.image(tl).unwrap(),
            (Direction::Forward, (Greater, Less)) => ly.d(1),
            (Direction::Inverse, (Greater, Less)) => ly.d(2),
            (_, (Greater, _)) => ly.e(),
        };
        (base.mul_letter(SignedLetter::new(s, t.is_positive())), SBranch::Cmp(key.0, key.1))
    }

    /// The witness for `g` p-reduced with every generator.
    fn junction(&self, g: &Word) -> (Word, Junction) {
        let ly = &self.layout;
        let Some(last) = g.last() else { return (Word::empty(), Junction::Plain) };
        let l = last.letter();
        if ly.is_x(l) {
            let g0 = g.prefix(g.len() - 1);
            let Some(t) = g0.last() else {
                return (Word::letter(last), Junction::XBelowC);
            };
            let tl = t.letter();
            let keep = |j| (self.prime_word(&g0).mul_letter(last), j);
            if self.less(tl, ly.c()) {
                return keep(Junction::XBelowC);
            }
            if tl == l {
                return keep(Junction::XEqual);
            }
            let (ins, j) = if self.less(tl, l) { (ly.c(), Junction::XBetween) } else { (ly.e(), Junction::XAbove) };
            let f = self
                .prime_word(&g0)
                .mul_letter(SignedLetter::new(ins, t.is_positive()))
                .mul_letter(last);
            return (f, j);
        }
        if ly.is_y(l) || ly.is_d(l) {
            let low = self.less(l, ly.x(1));
            let ins = if low { ly.c() } else { ly.e() };
            let f = self.prime_word(g).mul_letter(SignedLetter::new(ins, last.is_positive()));
            return (f, if low { Junction::LowYD } else { Junction::HighYD });
        }
        (self.prime_word(g), Junction::Plain)
    }
}

/// `P` as the second free factor: Dehn-reduced words with the stand-in order
/// `e₁ < e₂ < e₃ < e₄`.
#[derive(Clone, Debug)]
pub struct PFactor {
    pub dehn: DehnReducer,
    pub order: OrderSpec,
}

impl Factor for PFactor {
    type Elem = Word;

    fn multiply(&self, a: &Word, b: &Word) -> Word {
        self.dehn.reduce(&a.mul(b))
    }

    fn invert(&self, a: &Word) -> Word {
        a.inverse()
    }

    fn is_identity(&self, a: &Word) -> bool {
        self.dehn.is_identity(a)
    }

    fn sign(&self, a: &Word) -> Sign {
        self.order.sign(&self.dehn.reduce(a))
    }
}

/// Sign evaluation on `F̄ = F * P` for a fixed pair of orders on `F`.
#[derive(Clone, Debug)]
pub struct ProductModel {
    pub dom: FreeProduct<FreeFactor, PFactor>,
    pub cod: FreeProduct<FreeFactor, PFactor>,
    pub first_letter: u32,
}

type PElem = ProductElement<Word, Word>;

impl ProductModel {
    fn new(layout: &RipsLayout, p: crate::cancellation::Presentation, dom: &OrderSpec, cod: &OrderSpec) -> Self {
        let dehn = DehnReducer::new(&p).expect("P is C'(1/6)");
        let pf = PFactor { dehn, order: OrderSpec::natural(4) };
        ProductModel {
            dom: FreeProduct::new(FreeFactor { order: dom.clone() }, pf.clone()),
            cod: FreeProduct::new(FreeFactor { order: cod.clone() }, pf),
            first_letter: layout.p(1).0,
        }
    }

    fn dehn(&self) -> &DehnReducer {
        &self.dom.second.dehn
    }

    fn split(&self, w: &Word) -> Vec<Syllable<Word, Word>> {
        let lo = self.first_letter;
        let is_p = |s: &SignedLetter| s.index() >= lo && s.index() < lo + 4;
        let mut out: Vec<Syllable<Word, Word>> = Vec::new();
        let mut run: Vec<SignedLetter> = Vec::new();
        let mut run_p = false;
        let flush = |run: &mut Vec<SignedLetter>, run_p: bool, out: &mut Vec<Syllable<Word, Word>>| {
            if run.is_empty() {
                return;
            }
            let w = Word::reduce(core::mem::take(run));
            out.push(if run_p { Syllable::Second(self.dehn().reduce(&w)) } else { Syllable::First(w) });
        };
        for s in w.iter() {
            let p = is_p(s);
            if p != run_p {
                flush(&mut run, run_p, &mut out);
                run_p = p;
            }
            run.push(if p { SignedLetter::new(Letter(s.index() - lo), s.is_positive()) } else { *s });
        }
        flush(&mut run, run_p, &mut out);
        out
    }

    /// Normal form of a word over `F̄` under the domain order.
    pub fn normal_form(&self, w: &Word) -> PElem {
        self.dom.normal_form(self.split(w))
    }

    /// Sign and `τ̄` of both sides when their `P`-syllables agree pairwise; `None` otherwise.
    pub fn paired(&self, lhs: &Word, rhs: &Word) -> Option<((Sign, i64), (Sign, i64))> {
        let a = self.dom.normal_form(self.split(lhs));
        let b = self.cod.normal_form(self.split(rhs));
        if a.syllables().len() != b.syllables().len() {
            return None;
        }
        let mut patched = Vec::with_capacity(b.syllables().len());
        for (x, y) in a.syllables().iter().zip(b.syllables()) {
            match (x, y) {
                (Syllable::First(_), Syllable::First(v)) => patched.push(Syllable::First(v.clone())),
                (Syllable::Second(p), Syllable::Second(q)) => {
                    if !self.dehn().is_identity(&p.mul(&q.inverse())) {
                        return None;
                    }
                    // Equal elements of `P` get the same sign on both sides.
                    patched.push(Syllable::Second(p.clone()));
                }
                _ => return None,
            }
        }
        let b = self.cod.normal_form(patched);
        Some(((self.dom.sign(&a), self.dom.tau_bar(&a)), (self.cod.sign(&b), self.cod.tau_bar(&b))))
    }
}

/// Outcome of one `(g, h)` comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree,
    Disagree(Sign, Sign),
    OracleLimited,
}

/// One comparison: the sign verdict, plus whether `ω` and the full score
/// (`τ + ω`, or `τ̄` on `F * P`) agree exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub verdict: Verdict,
    pub omega_equal: bool,
    pub score_equal: bool,
}

/// The pieces the harness needs from a construction in one direction.
pub trait Compat {
    fn witness(&self, g: &Word) -> ConjugateWitness;
    fn map(&self) -> SubgroupMap;
    /// Compares `g h g⁻¹` under the domain order with `f k f⁻¹` under the codomain order.
    fn compare(&self, g: &Word, f: &Word, h: &Word, k: &Word) -> Comparison;
}

fn conj(g: &Word, h: &Word) -> Word {
    g.mul(h).mul(&g.inverse())
}

fn free_compare(dom: &OrderSpec, cod: &OrderSpec, g: &Word, f: &Word, h: &Word, k: &Word) -> Comparison {
    let lhs = conj(g, h);
    let rhs = conj(f, k);
    let (a, b) = (dom.sign(&lhs), cod.sign(&rhs));
    let verdict = if a == b { Verdict::Agree } else { Verdict::Disagree(a, b) };
    Comparison {
        verdict,
        omega_equal: omega(&lhs) == omega(&rhs),
        score_equal: dom.score(&lhs) == cod.score(&rhs),
    }
}

impl Compat for PerfectCompat {
    fn witness(&self, g: &Word) -> ConjugateWitness {
        PerfectCompat::witness(self, g)
    }

    fn map(&self) -> SubgroupMap {
        self.sides.map()
    }

    fn compare(&self, g: &Word, f: &Word, h: &Word, k: &Word) -> Comparison {
        free_compare(&self.order, &self.order, g, f, h, k)
    }
}

impl Compat for RipsCompat {
    fn witness(&self, g: &Word) -> ConjugateWitness {
        RipsCompat::witness(self, g)
    }

    fn map(&self) -> SubgroupMap {
        self.sides.map()
    }

    fn compare(&self, g: &Word, f: &Word, h: &Word, k: &Word) -> Comparison {
        match &self.product {
            None => free_compare(&self.dom_order, &self.cod_order, g, f, h, k),
            Some(pm) => match pm.paired(&conj(g, h), &conj(f, k)) {
                None => Comparison { verdict: Verdict::OracleLimited, omega_equal: true, score_equal: true },
                Some(((a, ta), (b, tb))) => Comparison {
                    verdict: if a == b { Verdict::Agree } else { Verdict::Disagree(a, b) },
                    omega_equal: true,
                    score_equal: ta == tb,
                },
            },
        }
    }
}

/// A formal product of generators with its images on both sides.
pub type HElement = (Vec<(usize, bool)>, Word, Word);

/// Reduced formal products of at most `depth` generators, as `(h, φ(h))`.
pub fn h_ball(map: &SubgroupMap, depth: usize) -> Vec<HElement> {
    let n = map.len();
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<(usize, bool)>> = alloc::vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for f in &frontier {
            for i in 0..n {
                for inv in [false, true] {
                    if f.last() == Some(&(i, !inv)) {
                        continue;
                    }
                    let mut g = f.clone();
                    g.push((i, inv));
                    next.push(g);
                }
            }
        }
        for f in &next {
            let (h, k) = map.evaluate(f);
            out.push((f.clone(), h, k));
        }
        frontier = next;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub g: Word,
    pub f: Word,
    pub case: CaseTag,
    pub h: Vec<(usize, bool)>,
    pub lhs: Sign,
    pub rhs: Sign,
}

/// Result for one conjugator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GRecord {
    pub witness: ConjugateWitness,
    pub tested: usize,
    pub agreed: usize,
    pub oracle_limited: usize,
    pub omega_mismatches: usize,
    pub score_mismatches: usize,
    pub failures: Vec<Failure>,
}

impl GRecord {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_conjugator<C: Compat + ?Sized>(ctx: &C, g: &Word, hs: &[HElement]) -> GRecord {
    let witness = ctx.witness(g);
    let mut rec = GRecord {
        witness,
        tested: 0,
        agreed: 0,
        oracle_limited: 0,
        omega_mismatches: 0,
        score_mismatches: 0,
        failures: Vec::new(),
    };
    for (formal, h, k) in hs {
        let c = ctx.compare(g, &rec.witness.f, h, k);
        rec.tested += 1;
        rec.omega_mismatches += usize::from(!c.omega_equal);
        rec.score_mismatches += usize::from(!c.score_equal);
        match c.verdict {
            Verdict::Agree => rec.agreed += 1,
            Verdict::OracleLimited => rec.oracle_limited += 1,
            Verdict::Disagree(lhs, rhs) => rec.failures.push(Failure {
                g: g.clone(),
                f: rec.witness.f.clone(),
                case: rec.witness.case,
                h: formal.clone(),
                lhs,
                rhs,
            }),
        }
    }
    rec
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompatReport {
    pub conjugators: usize,
    pub failed_conjugators: usize,
    pub comparisons: usize,
    pub agreed: usize,
    pub oracle_limited: usize,
    pub omega_mismatches: usize,
    pub score_mismatches: usize,
    pub case_hits: BTreeMap<String, usize>,
    /// Up to [`CompatReport::KEEP`] failure witnesses.
    pub failures: Vec<Failure>,
    pub records: Vec<GRecord>,
}

impl CompatReport {
    pub const KEEP: usize = 32;

    pub fn failure_count(&self) -> usize {
        self.comparisons - self.agreed - self.oracle_limited
    }

    pub fn passed(&self) -> bool {
        self.failure_count() == 0
    }

    /// Adds one conjugator; `keep_record` retains the full record.
    pub fn absorb(&mut self, prefix: &str, rec: GRecord, keep_record: bool) {
        self.conjugators += 1;
        self.comparisons += rec.tested;
        self.agreed += rec.agreed;
        self.oracle_limited += rec.oracle_limited;
        self.omega_mismatches += rec.omega_mismatches;
        self.score_mismatches += rec.score_mismatches;
        if !rec.passed() {
            self.failed_conjugators += 1;
        }
        *self.case_hits.entry(format!("{prefix}{}", rec.witness.case)).or_insert(0) += 1;
        if !rec.witness.peel.is_empty() {
            let key = format!("{prefix}peel{}", rec.witness.peel.len().min(3));
            *self.case_hits.entry(key).or_insert(0) += 1;
        }
        for f in &rec.failures {
            if self.failures.len() < Self::KEEP {
                self.failures.push(f.clone());
            }
        }
        if keep_record {
            self.records.push(rec);
        }
    }

    pub fn merge(&mut self, other: CompatReport) {
        self.conjugators += other.conjugators;
        self.failed_conjugators += other.failed_conjugators;
        self.comparisons += other.comparisons;
        self.agreed += other.agreed;
        self.oracle_limited += other.oracle_limited;
        self.omega_mismatches += other.omega_mismatches;
        self.score_mismatches += other.score_mismatches;
        for (k, v) in other.case_hits {
            *self.case_hits.entry(k).or_insert(0) += v;
        }
        for f in other.failures {
            if self.failures.len() < Self::KEEP {
                self.failures.push(f);
            }
        }
        self.records.extend(other.records);
    }
}

/// Sequential harness; the CLI runs [`check_conjugator`] in parallel instead.
pub fn verify_compatibility<C: Compat + ?Sized>(ctx: &C, conjugators: &[Word], h_depth: usize) -> CompatReport {
    let hs = h_ball(&ctx.map(), h_depth);
    let mut report = CompatReport::default();
    for g in conjugators {
        report.absorb("", check_conjugator(ctx, g, &hs), false);
    }
    report
}

fn random_letter<R: Rng>(rng: &mut R, letters: &[Letter]) -> SignedLetter {
    SignedLetter::new(letters[rng.gen_range(0..letters.len())], rng.gen_bool(0.5))
}

/// A uniformly random reduced word of length `len` over `letters`.
pub fn random_reduced<R: Rng>(rng: &mut R, letters: &[Letter], len: usize) -> Word {
    let mut raw: Vec<SignedLetter> = Vec::with_capacity(len);
    while raw.len() < len {
        let s = random_letter(rng, letters);
        if raw.last() == Some(&s.inverse()) {
            continue;
        }
        raw.push(s);
    }
    Word::from_reduced(raw).unwrap()
}

/// Conjugators of length `≤ max_len`: half uniform, a quarter ending in an
/// inverted generator prefix, a quarter ending in whole inverted generators.
pub fn sample_conjugators<R: Rng>(
    rng: &mut R,
    letters: &[Letter],
    generators: &[Word],
    count: usize,
    max_len: usize,
) -> Vec<Word> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let kind = rng.gen_range(0..4);
        let g = if kind < 2 || generators.is_empty() {
            let len = rng.gen_range(0..=max_len);
            random_reduced(rng, letters, len)
        } else {
            let head_len = rng.gen_range(0..=8);
            let mut g = random_reduced(rng, letters, head_len);
            let steps = if kind == 2 { 0 } else { rng.gen_range(1..=3) };
            for _ in 0..steps {
                let h = &generators[rng.gen_range(0..generators.len())];
                let h = if rng.gen_bool(0.5) { h.clone() } else { h.inverse() };
                g = g.mul(&h.inverse());
            }
            let h = &generators[rng.gen_range(0..generators.len())];
            let h = if rng.gen_bool(0.5) { h.clone() } else { h.inverse() };
            let l = rng.gen_range(1..=h.len());
            g = g.mul(&h.prefix(l).inverse());
            if g.len() > max_len && kind == 2 {
                continue;
            }
            g
        };
        out.push(g);
    }
    out
}

/// Structured conjugators: `g₀ · (prefix of h_j)⁻¹` for chosen overlap
/// lengths, plus multi-step peeling instances.
pub fn overlap_instances<R: Rng>(
    rng: &mut R,
    sides: &Sides,
    letters: &[Letter],
    lengths: impl Fn(&Oriented, usize, usize) -> Vec<usize>,
) -> Vec<Word> {
    let mut out = Vec::new();
    for (j, o) in sides.dom.iter().enumerate() {
        for l in lengths(o, sides.prefix_piece[j], sides.suffix_piece[j]) {
            if l == 0 || l > o.word.len() {
                continue;
            }
            let tail = o.word.prefix(l).inverse();
            for _ in 0..2 {
                if let Some(g) = join_exact(rng, letters, &tail, &o.word, l) {
                    out.push(g);
                }
            }
        }
    }
    // Multi-step peeling.
    let n = sides.dom.len();
    for j in 0..n {
        let a = &sides.dom[j].word;
        let b = &sides.dom[(j * 7 + 3) % n].word;
        let head = random_reduced(rng, letters, 4);
        out.push(head.mul(&a.inverse()).mul(&b.inverse()));
        let part = b.prefix(b.len() / 3);
        out.push(head.mul(&a.inverse()).mul(&part.inverse()));
    }
    out
}

/// `g₀ · tail` with a random `g₀` that neither cancels into `tail` nor
/// extends its overlap with `h`.
fn join_exact<R: Rng>(rng: &mut R, letters: &[Letter], tail: &Word, h: &Word, l: usize) -> Option<Word> {
    for _ in 0..64 {
        let len = rng.gen_range(0..=6);
        let g0 = random_reduced(rng, letters, len);
        let g = g0.mul(tail);
        if g.len() == g0.len() + tail.len() && overlap(&g, h) == l {
            return Some(g);
        }
    }
    None
}

/// Conjugators `g₀ t^γ · tail` with every choice of trailing letter `t^γ`.
pub fn letter_instances(letters: &[Letter], head: &Word, tail: &Word, h: &Word, l: usize) -> Vec<Word> {
    let mut out = Vec::new();
    for &t in letters {
        for pos in [true, false] {
            let s = SignedLetter::new(t, pos);
            let g0 = head.mul_letter(s);
            if g0.len() != head.len() + 1 {
                continue;
            }
            let g = g0.mul(tail);
            if g.len() == g0.len() + tail.len() && overlap(&g, h) == l {
                out.push(g);
            }
        }
    }
    out
}

impl PerfectCompat {
    /// Letters of the domain factor.
    pub fn letters(&self) -> Vec<Letter> {
        match self.direction {
            Direction::Forward => alloc::vec![Letter(0), Letter(1)],
            Direction::Inverse => alloc::vec![Letter(2), Letter(3)],
        }
    }

    /// Conjugators hitting every case of the witness construction.
    pub fn structured<R: Rng>(&self, rng: &mut R) -> Vec<Word> {
        let letters = self.letters();
        let mut out = alloc::vec![Word::empty()];
        out.extend(overlap_instances(rng, &self.sides, &letters, |o, pp, sp| {
            let (w, n, h) = (o.w.len(), o.mid.len(), o.word.len());
            let ls = [pp + 1, w, w + 1, (w + n).saturating_sub(1), w + n, w + n + o.v.len() / 2, h.saturating_sub(sp + 1)];
            ls.into_iter().filter(|&l| l > pp && l + sp < h).collect()
        }));
        out
    }
}

impl RipsCompat {
    /// Letters of the base group.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.layout.free_rank() as u32).map(Letter).collect()
    }

    /// Conjugators hitting every case, every `s` branch and every junction rule.
    pub fn structured<R: Rng>(&self, rng: &mut R) -> Vec<Word> {
        let letters = self.letters();
        let a_letters: Vec<Letter> = (0..4).map(Letter).collect();
        let mut out = alloc::vec![Word::empty()];
        out.extend(overlap_instances(rng, &self.sides, &letters, |o, pp, sp| {
            let (w, h) = (o.w.len(), o.word.len());
            let ls = [pp + 1, 2, w, w + 1, w + 2, w + 3, w + 3 + o.v.len() / 2, h.saturating_sub(sp + 1)];
            ls.into_iter().filter(|&l| l > pp && l + sp < h).collect()
        }));
        for o in &self.sides.dom {
            let conj = matches!(o.family, Some(RipsFamily::YConjPlus | RipsFamily::YConjMinus));
            if !conj {
                continue;
            }
            let head = random_reduced(rng, &a_letters, 3);
            for l in [o.w.len() + 1, o.w.len() + 2] {
                let tail = o.word.prefix(l).inverse();
                out.extend(letter_instances(&letters, &head, &tail, &o.word, l));
                out.extend(letter_instances(&letters, &Word::empty(), &tail, &o.word, l));
            }
        }
        // Junction rules: every letter pair in front of a trailing `x_i`, and
        // every final letter.
        let ly = &self.layout;
        for i in 1..=ly.n {
            for eta in [true, false] {
                let x = Word::letter(SignedLetter::new(ly.x(i), eta));
                let head = random_reduced(rng, &a_letters, 2);
                for &t in &letters {
                    for pos in [true, false] {
                        let g = head.mul_letter(SignedLetter::new(t, pos)).mul(&x);
                        if g.len() == head.len() + 2 {
                            out.push(g);
                        }
                    }
                }
            }
        }
        for &t in &letters {
            for pos in [true, false] {
                out.push(random_reduced(rng, &letters, 4).mul_letter(SignedLetter::new(t, pos)));
            }
        }
        out
    }
}
