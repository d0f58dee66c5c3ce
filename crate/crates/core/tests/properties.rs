use losc_core::cancellation::{check_c16, oracle, DehnReducer};
use losc_core::constructions::gen_perfect;
use losc_core::order::OrderSpec;
use losc_core::product::{FreeFactor, FreeProduct, Syllable};
use losc_core::words::{cyclic_reduce, CyclicWord, Letter, SignedLetter, Word};
use losc_core::zlattice::{oracle as snf_oracle, smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use proptest::prelude::*;

fn word(rank: u32, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|v| Word::reduce(v.into_iter().map(|(l, p)| SignedLetter::new(Letter(l), p))))
}

fn order(rank: u32) -> impl Strategy<Value = OrderSpec> {
    Just((0..rank).map(Letter).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|t| OrderSpec::new(t).unwrap())
}

proptest! {
    #[test]
    fn group_laws(a in word(3, 12), b in word(3, 12), c in word(3, 12)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inverse()).is_empty());
        prop_assert_eq!(a.mul(&b).inverse(), b.inverse().mul(&a.inverse()));
    }

    #[test]
    fn sign_flips_under_inversion(t in order(3), g in word(3, 16)) {
        prop_assert_eq!(t.sign(&g.inverse()), t.sign(&g).flip());
    }

    #[test]
    fn order_is_left_invariant(t in order(3), f in word(3, 8), g in word(3, 10), h in word(3, 10)) {
        prop_assert_eq!(t.leq(&g, &h), t.leq(&f.mul(&g), &f.mul(&h)));
    }

    #[test]
    fn positive_cone_is_a_semigroup(t in order(3), g in word(3, 10), h in word(3, 10)) {
        use losc_core::order::Sign::Positive;
        if t.sign(&g) == Positive && t.sign(&h) == Positive {
            prop_assert_eq!(t.sign(&g.mul(&h)), Positive);
        }
    }

    #[test]
    fn product_multiplication_is_associative(
        parts in prop::collection::vec((any::<bool>(), word(2, 4)), 0..9),
        split1 in 0usize..9,
        split2 in 0usize..9,
    ) {
        let p = FreeProduct::new(FreeFactor { order: OrderSpec::natural(2) }, FreeFactor { order: OrderSpec::natural(2) });
        let syl: Vec<Syllable<Word, Word>> = parts
            .into_iter()
            .map(|(first, w)| if first { Syllable::First(w) } else { Syllable::Second(w) })
            .collect();
        let (i, j) = (split1.min(syl.len()), split2.min(syl.len()));
        let (i, j) = (i.min(j), i.max(j));
        let a = p.normal_form(syl[..i].to_vec());
        let b = p.normal_form(syl[i..j].to_vec());
        let c = p.normal_form(syl[j..].to_vec());
        let whole = p.normal_form(syl.clone());
        prop_assert_eq!(&p.multiply(&p.multiply(&a, &b), &c), &whole);
        prop_assert_eq!(&p.multiply(&a, &p.multiply(&b, &c)), &whole);
        prop_assert!(p.multiply(&whole, &p.invert(&whole)).is_identity());
    }

    #[test]
    fn c16_checker_matches_scan(ws in prop::collection::vec(word(3, 30), 1..5)) {
        let family: Vec<CyclicWord> = ws.iter().filter_map(|w| CyclicWord::new(cyclic_reduce(w).1.word().clone())).collect();
        prop_assume!(!family.is_empty());
        prop_assert_eq!(check_c16(&family).passed(), oracle::check_c16(&family));
    }

    #[test]
    fn snf_is_invariant_under_unimodular_moves(
        entries in prop::collection::vec(-50i64..=50, 25),
        moves in prop::collection::vec((0usize..5, 0usize..5, -3i64..=3, any::<bool>()), 0..12),
    ) {
        let rows: Vec<Vec<i64>> = entries.chunks(5).map(<[i64]>::to_vec).collect();
        let m = IntMatrix::from_rows(5, &rows);
        let mut moved = m.clone();
        for (a, b, k, row) in moves {
            if a == b {
                if row { moved.swap_rows(a, (a + 1) % 5) } else { moved.swap_cols(a, (a + 1) % 5) }
            } else if row {
                moved.add_row(a, b, &BigInt::from(k));
            } else {
                moved.add_col(a, b, &BigInt::from(k));
            }
        }
        let (x, y) = (smith_normal_form(&m), smith_normal_form(&moved));
        prop_assert_eq!(&x, &y);
        let z = snf_oracle::invariant_factors(&moved);
        prop_assert!(y.free_rank == z.free_rank && y.torsion().eq(z.torsion()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dehn_kills_conjugated_relators(
        picks in prop::collection::vec((0usize..4, any::<bool>(), word(4, 6)), 1..=4),
        junk in word(4, 8),
    ) {
        let p = gen_perfect(0).unwrap();
        let dehn = DehnReducer::new(&p.presentation).unwrap();
        let mut g = Word::empty();
        for (i, inv, u) in picks {
            let r = p.presentation.relators()[i].word();
            let r = if inv { r.inverse() } else { r.clone() };
            g = g.mul(&u.mul(&r).mul(&u.inverse()));
        }
        prop_assert!(dehn.reduce(&g).is_empty());
        // Short words cannot contain half of a relator.
        prop_assert_eq!(dehn.reduce(&junk), junk);
    }
}
