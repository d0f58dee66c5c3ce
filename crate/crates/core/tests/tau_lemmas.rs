use losc_core::constructions::RipsLayout;
use losc_core::order::OrderSpec;
use losc_core::words::{enumerate_ball, Letter, SignedLetter, Word};

fn w(parts: &[(u32, i64)]) -> Word {
    let mut raw = Vec::new();
    for &(l, e) in parts {
        let s = SignedLetter::new(Letter(l), e > 0);
        for _ in 0..e.unsigned_abs() {
            raw.push(s);
        }
    }
    Word::reduce(raw)
}

fn orders3() -> Vec<OrderSpec> {
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    perms.iter().map(|p| OrderSpec::new(p.iter().map(|&i| Letter(i)).collect()).unwrap()).collect()
}

/// Triples of distinct-neighbour letters so every word below is reduced.
fn triples() -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for x in 0..3 {
        for z in 0..3 {
            for y in 0..3 {
                if x != z && z != y {
                    out.push((x, z, y));
                }
            }
        }
    }
    out
}

#[test]
fn tau_insertion_and_doubling_identities() {
    for t in orders3() {
        for (x, z, y) in triples() {
            for e in [1i64, -1] {
                if x != y {
                    assert_eq!(t.tau(&w(&[(x, e), (y, e)])), t.tau(&w(&[(x, e), (z, e), (y, e)])));
                }
                let lt = |a: u32, b: u32| t.less(Letter(a), Letter(b));
                if x != y && ((lt(x, y) && lt(z, y)) || (lt(y, x) && lt(y, z))) {
                    assert_eq!(t.tau(&w(&[(x, e), (y, -e)])), t.tau(&w(&[(x, e), (z, e), (y, -e)])));
                }
                if x != y && ((lt(x, z) && lt(x, y)) || (lt(z, x) && lt(y, x))) {
                    assert_eq!(t.tau(&w(&[(x, e), (y, -e)])), t.tau(&w(&[(x, e), (z, -e), (y, -e)])));
                }
            }
            for e1 in [1i64, -1] {
                for e2 in [1i64, -1] {
                    for e3 in [1i64, -1] {
                        let base = t.tau(&w(&[(x, e1), (z, e2), (y, e3)]));
                        assert_eq!(base, t.tau(&w(&[(x, 2 * e1), (z, e2), (y, e3)])));
                        assert_eq!(base, t.tau(&w(&[(x, e1), (z, 2 * e2), (y, e3)])));
                        assert_eq!(base, t.tau(&w(&[(x, e1), (z, e2), (y, 2 * e3)])));
                    }
                }
            }
        }
    }
}

#[test]
fn tau_splits_at_a_reduced_junction() {
    let t = OrderSpec::natural(3);
    let ball: Vec<Word> = enumerate_ball(3, 3).skip(1).collect();
    for w1 in &ball {
        for w2 in &ball {
            let joined = w1.mul(w2);
            if joined.len() != w1.len() + w2.len() {
                continue;
            }
            let t1 = Word::letter(w1.last().unwrap());
            let s2 = Word::letter(w2.first().unwrap());
            let whole = t.tau(&joined);
            assert_eq!(whole, t.tau(w1) + t.tau(w2) + t.tau(&t1.mul(&s2)));
            assert_eq!(whole, t.tau(&w1.mul(&s2)) + t.tau(w2));
            assert_eq!(whole, t.tau(w1) + t.tau(&t1.mul(w2)));
        }
    }
}

fn signed(l: Letter, e: i64) -> Word {
    Word::letter(SignedLetter::new(l, e > 0))
}

fn cat(parts: &[Word]) -> Word {
    parts.iter().fold(Word::empty(), |acc, p| acc.mul(p))
}

#[test]
fn rips_remark_equalities_exhaustive() {
    let signs = [1i64, -1];
    for n in 1..=3 {
        let ly = RipsLayout { n, with_p: false };
        let a_letters: Vec<Letter> = (1..=2).flat_map(|k| [ly.a(k), ly.b(k)]).collect();
        for j in [1u8, 2] {
            let (t, tp) = (ly.order(j), ly.order(3 - j));
            for &a1 in &a_letters {
                for &a2 in &a_letters {
                    for i1 in 1..=n {
                        for i2 in 1..=n {
                            for e1 in signs {
                                for e2 in signs {
                                    for e3 in signs {
                                        let axa = cat(&[signed(a1, e1), signed(ly.x(i1), e2), signed(a2, e3)]);
                                        assert_eq!(t.tau(&axa), tp.tau(&axa));
                                        for e4 in signs {
                                            let axxa = cat(&[
                                                signed(a1, e1),
                                                signed(ly.x(i1), e2),
                                                signed(ly.x(i2), e3),
                                                signed(a2, e4),
                                            ]);
                                            if axxa.len() == 4 {
                                                assert_eq!(t.tau(&axxa), tp.tau(&axxa));
                                            }
                                            // x_{i1} y_{i2} x_{i1}⁻¹ against y_{i1} d₂ y_{i1}⁻¹.
                                            let lhs = cat(&[
                                                signed(a1, e1),
                                                signed(ly.x(i1), e2),
                                                signed(ly.y(i2), e3),
                                                signed(ly.x(i1), -e2),
                                                signed(a2, e4),
                                            ]);
                                            let rhs = cat(&[
                                                signed(a1, e1),
                                                signed(ly.y(i1), e2),
                                                signed(ly.d(2), e3),
                                                signed(ly.y(i1), -e2),
                                                signed(a2, e4),
                                            ]);
                                            assert_eq!(t.tau(&lhs), tp.tau(&rhs));
                                        }
                                    }
                                    let yx = cat(&[signed(ly.y(i2), e1), signed(ly.x(i1), e2)]);
                                    let dy = cat(&[signed(ly.d(2), e1), signed(ly.y(i1), e2)]);
                                    assert_eq!(t.tau(&yx), tp.tau(&dy));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn prime_transports_the_orders() {
    for n in 1..=3 {
        let ly = RipsLayout { n, with_p: false };
        let prime = ly.prime();
        let o1 = ly.order1();
        let o2 = ly.order2();
        for (k, &l) in o1.word().iter().enumerate() {
            assert_eq!(prime.image(l).unwrap(), o2.word()[k]);
        }
    }
}
