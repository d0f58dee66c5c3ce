use std::collections::BTreeSet;

use losc_core::cancellation::Presentation;
use losc_core::compat::{
    h_ball, sample_conjugators, verify_compatibility, CaseTag, Compat, Comparison, ConjugateWitness, Direction,
    PerfectCompat, RipsCompat, SBranch,
};
use losc_core::constructions::{gen_perfect, gen_rips, gen_rips_nli, RipsFamily, SubgroupMap};
use losc_core::words::{apply_letter_map, Alphabet, Letter, SignedLetter, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn q1() -> Presentation {
    Presentation::free(Alphabet::new(["x1"]).unwrap())
}

#[test]
fn perfect_structured_instances_cover_every_case() {
    let p = gen_perfect(0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for dir in [Direction::Forward, Direction::Inverse] {
        let ctx = PerfectCompat::new(&p, dir);
        let gs = ctx.structured(&mut rng);
        let r = verify_compatibility(&ctx, &gs, 2);
        assert!(r.passed(), "{dir:?}: {:?}", r.failures.first());
        assert_eq!(r.omega_mismatches, 0);
        assert_eq!(r.score_mismatches, 0);
        for key in ["case1", "case2", "case3", "case4", "swap", "trivial", "peel2"] {
            assert!(r.case_hits.contains_key(key), "{dir:?} missing {key}: {:?}", r.case_hits);
        }
    }
}

#[test]
fn perfect_spec_examples() {
    let p = gen_perfect(0).unwrap();
    let ctx = PerfectCompat::new(&p, Direction::Forward);
    assert!(ctx.witness(&Word::empty()).f.is_empty());
    for i in 0..4 {
        let w = ctx.witness(&p.map.domain[i]);
        assert_eq!(w.f, p.map.codomain[i]);
    }
    let a = Word::letter(SignedLetter::new(Letter(0), true));
    let w = ctx.witness(&a);
    assert_eq!(w.f, Word::letter(SignedLetter::new(Letter(2), true)));
    assert_eq!(w.case, CaseTag::Swap);
    let r = verify_compatibility(&ctx, &[a], 2);
    assert!(r.passed());
    assert_eq!(r.comparisons, h_ball(&p.map, 2).len());
}

#[test]
fn empty_sample_is_vacuous() {
    let p = gen_perfect(0).unwrap();
    let r = verify_compatibility(&PerfectCompat::new(&p, Direction::Forward), &[], 2);
    assert!(r.passed());
    assert_eq!(r.comparisons, 0);
}

struct Corrupted<'a>(&'a PerfectCompat);

impl Compat for Corrupted<'_> {
    fn witness(&self, g: &Word) -> ConjugateWitness {
        self.0.witness(g)
    }
    fn map(&self) -> SubgroupMap {
        self.0.sides.map().swap_images(0, 1)
    }
    fn compare(&self, g: &Word, f: &Word, h: &Word, k: &Word) -> Comparison {
        self.0.compare(g, f, h, k)
    }
}

#[test]
fn corrupted_map_is_caught() {
    let p = gen_perfect(0).unwrap();
    let ctx = PerfectCompat::new(&p, Direction::Forward);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let gs = sample_conjugators(&mut rng, &ctx.letters(), &[], 50, 20);
    let r = verify_compatibility(&Corrupted(&ctx), &gs, 2);
    assert!(!r.passed());
    assert!(!r.failures.is_empty());
}

fn rips_hits(r: &losc_core::constructions::RipsOutput, dir: Direction, seed: u64) -> BTreeSet<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = BTreeSet::new();
    for j in [1u8, 2] {
        let ctx = RipsCompat::new(r, dir, j);
        let gs = ctx.structured(&mut rng);
        let rep = verify_compatibility(&ctx, &gs, 1);
        assert!(rep.passed(), "{dir:?} o{j}: {:?}", rep.failures.first());
        assert_eq!(rep.omega_mismatches, 0);
        assert_eq!(rep.score_mismatches, 0);
        hits.extend(rep.case_hits.into_keys());
    }
    hits
}

#[test]
fn rips_structured_instances_cover_every_case_and_branch() {
    let r = gen_rips(&q1(), 0).unwrap();
    for dir in [Direction::Forward, Direction::Inverse] {
        let hits = rips_hits(&r, dir, 3);
        let cases: BTreeSet<char> =
            hits.iter().filter_map(|h| h.strip_prefix("case")).filter_map(|h| h.chars().next()).collect();
        assert_eq!(cases, "12345".chars().collect(), "{dir:?}");
        let mut branches: BTreeSet<String> = BTreeSet::new();
        for h in &hits {
            if let Some(b) = h.split_once('[').map(|(_, b)| b.trim_end_matches(']')) {
                branches.insert(b.to_string());
            }
        }
        let mut expected: BTreeSet<String> = BTreeSet::new();
        expected.insert(SBranch::BelowC.to_string());
        for a in [std::cmp::Ordering::Less, std::cmp::Ordering::Equal, std::cmp::Ordering::Greater] {
            for b in [std::cmp::Ordering::Less, std::cmp::Ordering::Equal, std::cmp::Ordering::Greater] {
                if a == std::cmp::Ordering::Equal && b == std::cmp::Ordering::Equal {
                    continue;
                }
                expected.insert(SBranch::Cmp(a, b).to_string());
            }
        }
        // t = outer and t = middle cannot both hold, so eight comparison branches are reachable.
        for b in &expected {
            assert!(branches.contains(b), "{dir:?} missing branch {b}: {branches:?}");
        }
        for j in ["XBelowC", "XEqual", "XBetween", "XAbove", "LowYD", "HighYD", "Plain"] {
            assert!(hits.iter().any(|h| h.ends_with(j)), "{dir:?} missing junction {j}");
        }
    }
}

#[test]
fn rips_trailing_x_selects_y() {
    let r = gen_rips(&q1(), 0).unwrap();
    let ctx = RipsCompat::new(&r, Direction::Forward, 1);
    let mut found = 0;
    for o in &ctx.sides.dom {
        if !matches!(o.family, Some(RipsFamily::YConjPlus | RipsFamily::YConjMinus)) {
            continue;
        }
        let l = o.w.len() + 1;
        let outer = o.mid.first().unwrap();
        if outer.letter() != r.layout.x(1) {
            continue;
        }
        // g = x^{-ε} · (w x^ε)⁻¹, so t = x₁ matches the outer letter.
        let tail = o.word.prefix(l).inverse();
        let g = Word::letter(outer.inverse()).mul(&tail);
        assert_eq!(g.len(), l + 1);
        let w = ctx.witness(&g);
        assert!(matches!(w.case, CaseTag::Rips(2, Some(SBranch::Cmp(std::cmp::Ordering::Equal, _)))), "{}", w.case);
        let y = r.layout.y(1);
        assert!(w.f.iter().any(|s| s.letter() == y));
        let rep = verify_compatibility(&ctx, &[g], 1);
        assert!(rep.passed());
        found += 1;
    }
    assert!(found > 0);
}

#[test]
fn rips_generators_map_to_their_images() {
    let r = gen_rips(&q1(), 0).unwrap();
    for dir in [Direction::Forward, Direction::Inverse] {
        let ctx = RipsCompat::new(&r, dir, 1);
        let map = ctx.sides.map();
        let rep = verify_compatibility(&ctx, &map.domain, 1);
        assert!(rep.passed());
        assert!(ctx.witness(&Word::empty()).f.is_empty());
    }
}

/// The literal letter swap everywhere: signs mostly survive, scores do not.
struct LetterSwap<'a>(&'a RipsCompat);

impl Compat for LetterSwap<'_> {
    fn witness(&self, g: &Word) -> ConjugateWitness {
        let mut w = self.0.witness(g);
        w.f = apply_letter_map(&self.0.prime, g).unwrap();
        w
    }
    fn map(&self) -> SubgroupMap {
        self.0.sides.map()
    }
    fn compare(&self, g: &Word, f: &Word, h: &Word, k: &Word) -> Comparison {
        self.0.compare(g, f, h, k)
    }
}

#[test]
fn letter_swap_witness_breaks_score_equality() {
    let r = gen_rips(&q1(), 0).unwrap();
    let ctx = RipsCompat::new(&r, Direction::Forward, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let gs = ctx.structured(&mut rng);
    let good = verify_compatibility(&ctx, &gs, 1);
    let naive = verify_compatibility(&LetterSwap(&ctx), &gs, 1);
    assert_eq!(good.score_mismatches, 0);
    assert!(naive.score_mismatches > 0);
}

#[test]
fn peeling_strictly_shortens() {
    let r = gen_rips(&q1(), 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for dir in [Direction::Forward, Direction::Inverse] {
        let ctx = RipsCompat::new(&r, dir, 2);
        let mut deepest = 0;
        for g in ctx.structured(&mut rng) {
            let w = ctx.witness(&g);
            let mut cur = g.clone();
            for &j in &w.peel {
                let next = cur.mul(&ctx.sides.dom[j].word);
                assert!(next.len() < cur.len());
                cur = next;
            }
            deepest = deepest.max(w.peel.len());
        }
        assert!(deepest >= 2);
    }
}

#[test]
fn product_variant_agrees_where_the_oracle_decides() {
    let r = gen_rips_nli(&q1(), 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for dir in [Direction::Forward, Direction::Inverse] {
        let ctx = RipsCompat::new(&r, dir, 1);
        let gens: Vec<Word> = ctx.sides.dom.iter().map(|o| o.word.clone()).collect();
        let mut gs = ctx.structured(&mut rng);
        gs.extend(sample_conjugators(&mut rng, &ctx.letters(), &gens, 100, 80));
        let rep = verify_compatibility(&ctx, &gs, 1);
        assert!(rep.passed(), "{dir:?}: {:?}", rep.failures.first());
        assert!(rep.comparisons > rep.oracle_limited);
        assert!(rep.case_hits.contains_key("p-syllable"));
    }
}
