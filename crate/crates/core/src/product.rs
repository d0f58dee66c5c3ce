//! The left-order on a free product `G₁ * G₂` of two left-ordered groups.
//!
//! `τ̄(g)` is the number of positive syllables minus negative syllables, plus
//! the number of `G₁ → G₂` index jumps minus `G₂ → G₁` drops; `g ≤̄ h` iff
//! `τ̄(g⁻¹h) ≥ 0`.

use alloc::vec::Vec;

use crate::order::{OrderSpec, Sign};
use crate::words::Word;

/// A left-ordered group seen through the operations the product order needs.
pub trait Factor {
    type Elem: Clone + PartialEq + core::fmt::Debug;

    fn multiply(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;
    fn is_identity(&self, a: &Self::Elem) -> bool;
    fn sign(&self, a: &Self::Elem) -> Sign;
}

/// A free group under a Šunić order.
#[derive(Clone, Debug)]
pub struct FreeFactor {
    pub order: OrderSpec,
}

impl Factor for FreeFactor {
    type Elem = Word;

    fn multiply(&self, a: &Word, b: &Word) -> Word {
        a.mul(b)
    }

    fn invert(&self, a: &Word) -> Word {
        a.inverse()
    }

    fn is_identity(&self, a: &Word) -> bool {
        a.is_empty()
    }

    fn sign(&self, a: &Word) -> Sign {
        self.order.sign(a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Syllable<A, B> {
    First(A),
    Second(B),
}

impl<A, B> Syllable<A, B> {
    pub fn factor(&self) -> u8 {
        match self {
            Syllable::First(_) => 1,
            Syllable::Second(_) => 2,
        }
    }
}

/// Normal form: alternating nonidentity syllables.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductElement<A, B> {
    syllables: Vec<Syllable<A, B>>,
}

impl<A, B> ProductElement<A, B> {
    pub fn identity() -> Self {
        ProductElement { syllables: Vec::new() }
    }

    pub fn syllables(&self) -> &[Syllable<A, B>] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct FreeProduct<F1, F2> {
    pub first: F1,
    pub second: F2,
}

type Elem<F1, F2> = ProductElement<<F1 as Factor>::Elem, <F2 as Factor>::Elem>;
type Syl<F1, F2> = Syllable<<F1 as Factor>::Elem, <F2 as Factor>::Elem>;

impl<F1: Factor, F2: Factor> FreeProduct<F1, F2> {
    pub fn new(first: F1, second: F2) -> Self {
        FreeProduct { first, second }
    }

    /// Merges equal-factor neighbours and drops identity syllables.
    pub fn normal_form<I: IntoIterator<Item = Syl<F1, F2>>>(&self, raw: I) -> Elem<F1, F2> {
        let mut stack: Vec<Syl<F1, F2>> = Vec::new();
        for s in raw {
            if self.syllable_is_identity(&s) {
                continue;
            }
            let merged = match (stack.last(), &s) {
                (Some(Syllable::First(a)), Syllable::First(b)) => {
                    Some(Syllable::First(self.first.multiply(a, b)))
                }
                (Some(Syllable::Second(a)), Syllable::Second(b)) => {
                    Some(Syllable::Second(self.second.multiply(a, b)))
                }
                _ => None,
            };
            match merged {
                Some(m) => {
                    stack.pop();
                    if !self.syllable_is_identity(&m) {
                        stack.push(m);
                    }
                }
                None => stack.push(s),
            }
        }
        ProductElement { syllables: stack }
    }

    fn syllable_is_identity(&self, s: &Syl<F1, F2>) -> bool {
        match s {
            Syllable::First(a) => self.first.is_identity(a),
            Syllable::Second(b) => self.second.is_identity(b),
        }
    }

    pub fn multiply(&self, g: &Elem<F1, F2>, h: &Elem<F1, F2>) -> Elem<F1, F2> {
        self.normal_form(g.syllables.iter().chain(h.syllables.iter()).cloned())
    }

    pub fn invert(&self, g: &Elem<F1, F2>) -> Elem<F1, F2> {
        let syllables = g
            .syllables
            .iter()
            .rev()
            .map(|s| match s {
                Syllable::First(a) => Syllable::First(self.first.invert(a)),
                Syllable::Second(b) => Syllable::Second(self.second.invert(b)),
            })
            .collect();
        ProductElement { syllables }
    }

    pub fn tau_bar(&self, g: &Elem<F1, F2>) -> i64 {
        let mut total = 0i64;
        for s in &g.syllables {
            let sign = match s {
                Syllable::First(a) => self.first.sign(a),
                Syllable::Second(b) => self.second.sign(b),
            };
            total += match sign {
                Sign::Positive => 1,
                Sign::Negative => -1,
                Sign::Zero => 0,
            };
        }
        for w in g.syllables.windows(2) {
            match (w[0].factor(), w[1].factor()) {
                (1, 2) => total += 1,
                (2, 1) => total -= 1,
                _ => {}
            }
        }
        total
    }

    pub fn sign(&self, g: &Elem<F1, F2>) -> Sign {
        if g.is_identity() {
            Sign::Zero
        } else {
            Sign::of(self.tau_bar(g))
        }
    }

    pub fn leq_bar(&self, g: &Elem<F1, F2>, h: &Elem<F1, F2>) -> bool {
        self.tau_bar(&self.multiply(&self.invert(g), h)) >= 0
    }
}

pub fn product_normal_form<F1: Factor, F2: Factor>(
    product: &FreeProduct<F1, F2>,
    raw: Vec<Syl<F1, F2>>,
) -> Elem<F1, F2> {
    product.normal_form(raw)
}

pub fn tau_bar<F1: Factor, F2: Factor>(product: &FreeProduct<F1, F2>, g: &Elem<F1, F2>) -> i64 {
    product.tau_bar(g)
}

pub fn leq_bar<F1: Factor, F2: Factor>(
    product: &FreeProduct<F1, F2>,
    g: &Elem<F1, F2>,
    h: &Elem<F1, F2>,
) -> bool {
    product.leq_bar(g, h)
}
