use losc_core::order::{ConjugatedOrder, OrderSpec, Sign};
use losc_core::words::{enumerate_ball, Letter, SignedLetter, Word};

fn specs() -> Vec<OrderSpec> {
    vec![
        OrderSpec::natural(2),
        OrderSpec::new(vec![Letter(1), Letter(0)]).unwrap(),
    ]
}

#[test]
fn total_antisymmetric_transitive_radius_4() {
    let ball: Vec<Word> = enumerate_ball(2, 4).collect();
    for t in specs() {
        for g in &ball {
            for h in &ball {
                let gh = t.leq(g, h);
                let hg = t.leq(h, g);
                assert!(gh || hg);
                assert_eq!(gh && hg, g == h);
            }
        }
        // Transitivity through a sorted list: sorting by the order must be consistent.
        let mut sorted = ball.clone();
        sorted.sort_by(|g, h| {
            if g == h {
                core::cmp::Ordering::Equal
            } else if t.leq(g, h) {
                core::cmp::Ordering::Less
            } else {
                core::cmp::Ordering::Greater
            }
        });
        for i in 0..sorted.len() {
            for j in i..sorted.len() {
                assert!(t.leq(&sorted[i], &sorted[j]));
            }
        }
    }
}

#[test]
fn left_invariant() {
    let ball: Vec<Word> = enumerate_ball(2, 3).collect();
    let t = OrderSpec::natural(2);
    for f in &ball {
        for g in &ball {
            for h in &ball {
                assert_eq!(t.leq(g, h), t.leq(&f.mul(g), &f.mul(h)));
            }
        }
    }
}

#[test]
fn tau_plus_omega_is_odd_off_identity() {
    let t = OrderSpec::natural(3);
    for g in enumerate_ball(3, 4).skip(1) {
        assert_eq!(t.score(&g).rem_euclid(2), 1);
    }
}

#[test]
fn conjugated_order_matches_direct_sign() {
    let t = OrderSpec::natural(2);
    let ball: Vec<Word> = enumerate_ball(2, 3).collect();
    for g in &ball {
        let c = ConjugatedOrder { base: t.clone(), conjugator: g.clone() };
        for h in &ball {
            let direct = g.mul(h).mul(&g.inverse());
            let expected = if direct.is_empty() {
                Sign::Zero
            } else if t.leq(&Word::empty(), &direct) {
                Sign::Positive
            } else {
                Sign::Negative
            };
            assert_eq!(c.sign(h), expected);
        }
    }
}

#[test]
fn positive_generators_exceed_identity() {
    let t = OrderSpec::natural(3);
    for i in 0..3 {
        let x = Word::letter(SignedLetter::pos(i));
        assert_eq!(t.sign(&x), Sign::Positive);
        assert_eq!(t.sign(&x.inverse()), Sign::Negative);
    }
}
