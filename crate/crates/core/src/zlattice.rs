//! Exponent-sum matrices and Smith normal form over the integers.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cancellation::Presentation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: alloc::vec![BigInt::zero(); rows * cols] }
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, v) in r.iter().enumerate() {
                m[(i, j)] = v.clone().into();
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// `row[dst] += k · row[src]`.
    pub fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// `col[dst] += k · col[src]`.
    pub fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    /// Stacks the rows of `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix { rows: self.rows + other.rows, cols: self.cols, data }
    }
}

impl core::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Invariant factors `d₁ | d₂ | …` of the cokernel plus its free rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantFactors {
    pub factors: Vec<BigUint>,
    pub free_rank: usize,
}

impl InvariantFactors {
    /// Factors different from 1.
    pub fn torsion(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().filter(|d| !d.is_one())
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.factors.iter().all(One::is_one)
    }
}

impl fmt::Display for InvariantFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut torsion = self.torsion().peekable();
        f.write_str("factors: ")?;
        if torsion.peek().is_none() {
            f.write_str("none")?;
        }
        for (i, d) in torsion.enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ", free rank {}", self.free_rank)
    }
}

/// One row per relator, one column per generator.
pub fn exponent_matrix(pres: &Presentation) -> IntMatrix {
    let mut m = IntMatrix::zeros(pres.relators().len(), pres.rank());
    for (i, r) in pres.relators().iter().enumerate() {
        for s in r.word() {
            m[(i, s.index() as usize)] += s.exponent();
        }
    }
    m
}

/// Smallest nonzero entry in the lower-right block from `t`; ties go to the
/// lowest row, then the lowest column.
fn pivot(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..m.rows {
        for j in t..m.cols {
            let v = &m[(i, j)];
            if v.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| v.abs() < m[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

pub fn smith_normal_form(m: &IntMatrix) -> InvariantFactors {
    let mut a = m.clone();
    let mut diag: Vec<BigInt> = Vec::new();
    let mut t = 0;
    while t < a.rows.min(a.cols) {
        let Some((pi, pj)) = pivot(&a, t) else { break };
        a.swap_rows(t, pi);
        a.swap_cols(t, pj);
        loop {
            let p = a[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..a.rows {
                let q = &a[(i, t)] / &p;
                if !q.is_zero() {
                    a.add_row(i, t, &-q);
                }
                clean &= a[(i, t)].is_zero();
            }
            for j in t + 1..a.cols {
                let q = &a[(t, j)] / &p;
                if !q.is_zero() {
                    a.add_col(j, t, &-q);
                }
                clean &= a[(t, j)].is_zero();
            }
            if !clean {
                // A remainder smaller than the pivot is left; move it in.
                let (pi, pj) = pivot_cross(&a, t);
                a.swap_rows(t, pi);
                a.swap_cols(t, pj);
                continue;
            }
            let bad = (t + 1..a.rows)
                .find(|&i| (t + 1..a.cols).any(|j| !(&a[(i, j)] % &p).is_zero()));
            match bad {
                Some(i) => a.add_row(t, i, &BigInt::one()),
                None => break,
            }
        }
        diag.push(a[(t, t)].abs());
        t += 1;
    }
    InvariantFactors {
        factors: diag.iter().map(|d| d.magnitude().clone()).collect(),
        free_rank: m.cols - diag.len(),
    }
}

/// Smallest nonzero entry of row `t` and column `t`.
fn pivot_cross(a: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    for i in t..a.rows {
        let v = &a[(i, t)];
        if !v.is_zero() && v.abs() < a[best].abs() {
            best = (i, t);
        }
    }
    for j in t..a.cols {
        let v = &a[(t, j)];
        if !v.is_zero() && v.abs() < a[best].abs() {
            best = (t, j);
        }
    }
    best
}

pub fn abelianization(pres: &Presentation) -> InvariantFactors {
    smith_normal_form(&exponent_matrix(pres))
}

pub fn is_perfect(pres: &Presentation) -> bool {
    abelianization(pres).is_trivial()
}

/// Independent invariant factors from determinantal divisors: `d_k` is the
/// gcd of all `k × k` minors and the `k`-th factor is `d_k / d_{k−1}`.
pub mod oracle {
    use super::*;

    fn det(m: &[Vec<BigInt>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return m[0][0].clone();
        }
        let mut total = BigInt::zero();
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = &m[0][j] * det(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                go(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        go(0, n, k, &mut cur, &mut out);
        out
    }

    pub fn invariant_factors(m: &IntMatrix) -> InvariantFactors {
        let mut factors = Vec::new();
        let mut prev = BigInt::one();
        for k in 1..=m.rows().min(m.cols()) {
            let mut g = BigInt::zero();
            for rs in subsets(m.rows(), k) {
                for cs in subsets(m.cols(), k) {
                    let sub: Vec<Vec<BigInt>> =
                        rs.iter().map(|&i| cs.iter().map(|&j| m[(i, j)].clone()).collect()).collect();
                    g = g.gcd(&det(&sub));
                }
            }
            if g.is_zero() {
                break;
            }
            factors.push((&g / &prev).magnitude().clone());
            prev = g;
        }
        let free_rank = m.cols() - factors.len();
        InvariantFactors { factors, free_rank }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use crate::words::{Alphabet, CyclicWord};

    fn factors(v: &[u32]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn snf_examples() {
        let id = smith_normal_form(&IntMatrix::identity(2));
        assert_eq!(id, InvariantFactors { factors: factors(&[1, 1]), free_rank: 0 });
        let d = smith_normal_form(&IntMatrix::from_rows(2, &[alloc::vec![2, 0], alloc::vec![0, 3]]));
        assert_eq!(d, InvariantFactors { factors: factors(&[1, 6]), free_rank: 0 });
        let z = smith_normal_form(&IntMatrix::zeros(1, 2));
        assert_eq!(z, InvariantFactors { factors: Vec::new(), free_rank: 2 });
    }

    #[test]
    fn snf_matches_determinantal_divisors() {
        let rows = alloc::vec![
            alloc::vec![2, 4, 4],
            alloc::vec![-6, 6, 12],
            alloc::vec![10, -4, -16],
        ];
        let m = IntMatrix::from_rows(3, &rows);
        assert_eq!(smith_normal_form(&m), oracle::invariant_factors(&m));
        assert_eq!(smith_normal_form(&m).factors, factors(&[2, 6, 12]));
    }

    #[test]
    fn perfectness_examples() {
        let a = Alphabet::new(["a", "b"]).unwrap();
        let comm = CyclicWord::new(a.parse_word("a b a^-1 b^-1").unwrap()).unwrap();
        let p = Presentation::new(a.clone(), alloc::vec![comm]).unwrap();
        assert_eq!(exponent_matrix(&p).row(0), &[BigInt::zero(), BigInt::zero()]);
        assert!(!is_perfect(&Presentation::free(a)));
        let one = Alphabet::new(["a"]).unwrap();
        let triv = CyclicWord::new(one.parse_word("a").unwrap()).unwrap();
        assert!(is_perfect(&Presentation::new(one, alloc::vec![triv]).unwrap()));
        let display = abelianization(&p).to_string();
        assert_eq!(display, "factors: none, free rank 2");
    }
}
