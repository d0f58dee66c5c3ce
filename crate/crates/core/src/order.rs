//! Šunić left-orders on free groups.
//!
//! For a permutation word `t` of the alphabet, `τ_t(g)` adds `+2` for every
//! subword `y x⁻¹` and `−2` for every subword `y⁻¹ x` with `x <_t y`. Then
//! `1 ≤_t g` iff `τ_t(g) + ω(g) ≥ 0`, where `ω` is the sign of the last exponent.

use alloc::vec::Vec;
use core::fmt;

use crate::words::{Letter, SignedLetter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderError {
    NotPermutation,
    LetterOutside(Letter),
}

impl fmt::Display for OrderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderError::NotPermutation => {
                write!(f, "order word must list every generator exactly once")
            }
            OrderError::LetterOutside(l) => write!(f, "letter {} is not covered by the order", l.0),
        }
    }
}

/// A permutation word `t`; `pos[l]` is the place of letter `l` in `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderSpec {
    t: Vec<Letter>,
    pos: Vec<u32>,
}

impl OrderSpec {
    pub fn new(t: Vec<Letter>) -> Result<Self, OrderError> {
        let mut pos = alloc::vec![u32::MAX; t.len()];
        for (i, l) in t.iter().enumerate() {
            let slot = pos
                .get_mut(l.0 as usize)
                .ok_or(OrderError::NotPermutation)?;
            if *slot != u32::MAX {
                return Err(OrderError::NotPermutation);
            }
            *slot = i as u32;
        }
        Ok(OrderSpec { t, pos })
    }

    /// The order `a_0 < a_1 < …` given by declaration order.
    pub fn natural(rank: usize) -> Self {
        OrderSpec::new((0..rank as u32).map(Letter).collect()).unwrap()
    }

    pub fn word(&self) -> &[Letter] {
        &self.t
    }

    pub fn rank(&self) -> usize {
        self.t.len()
    }

    pub fn position(&self, l: Letter) -> u32 {
        self.pos[l.0 as usize]
    }

    pub fn less(&self, x: Letter, y: Letter) -> bool {
        self.position(x) < self.position(y)
    }

    /// Contribution of one adjacent pair `(p, q)` to `τ`.
    #[inline]
    pub fn pair_tau(&self, p: SignedLetter, q: SignedLetter) -> i64 {
        if p.is_positive() == q.is_positive() {
            return 0;
        }
        let (pp, pq) = (self.pos[p.index() as usize], self.pos[q.index() as usize]);
        if pp <= pq {
            0
        } else if p.is_positive() {
            2
        } else {
            -2
        }
    }

    /// `τ_t` of a letter sequence. Panics on letters outside the alphabet.
    pub fn tau_letters(&self, g: &[SignedLetter]) -> i64 {
        g.windows(2).map(|w| self.pair_tau(w[0], w[1])).sum()
    }

    pub fn tau(&self, g: &Word) -> i64 {
        self.tau_letters(g.as_slice())
    }

    /// `τ + ω`; odd for every nonidentity element.
    pub fn score(&self, g: &Word) -> i64 {
        self.tau(g) + omega(g) as i64
    }

    pub fn sign(&self, g: &Word) -> Sign {
        if g.is_empty() {
            Sign::Zero
        } else if self.score(g) >= 0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    pub fn leq(&self, g: &Word, h: &Word) -> bool {
        let u = g.inverse().mul(h);
        self.score(&u) >= 0
    }

    fn check(&self, g: &Word) -> Result<(), OrderError> {
        match g.iter().find(|s| s.index() as usize >= self.rank()) {
            Some(s) => Err(OrderError::LetterOutside(s.letter())),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn of(v: i64) -> Sign {
        match v {
            0 => Sign::Zero,
            v if v > 0 => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        })
    }
}

pub fn tau(spec: &OrderSpec, g: &Word) -> Result<i64, OrderError> {
    spec.check(g)?;
    Ok(spec.tau(g))
}

pub fn omega(g: &Word) -> i32 {
    g.last().map_or(0, SignedLetter::exponent)
}

pub fn leq(spec: &OrderSpec, g: &Word, h: &Word) -> Result<bool, OrderError> {
    spec.check(g)?;
    spec.check(h)?;
    Ok(spec.leq(g, h))
}

/// The order `h ↦ sign(g h g⁻¹)` for a fixed conjugator `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugatedOrder {
    pub base: OrderSpec,
    pub conjugator: Word,
}

impl ConjugatedOrder {
    pub fn sign(&self, h: &Word) -> Sign {
        let c = self.conjugator.mul(h).mul(&self.conjugator.inverse());
        self.base.sign(&c)
    }
}

pub fn sign_conj(order: &ConjugatedOrder, h: &Word) -> Sign {
    order.sign(h)
}
