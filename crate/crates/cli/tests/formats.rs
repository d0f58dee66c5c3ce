use losc::text;
use losc_core::cancellation::Presentation;
use losc_core::words::{cyclic_reduce, Alphabet, Letter, SignedLetter, Word};
use proptest::prelude::*;

fn relator(rank: u32) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..rank, any::<bool>()), 1..=20)
        .prop_map(|v| Word::reduce(v.into_iter().map(|(l, p)| SignedLetter::new(Letter(l), p))))
        .prop_filter("nontrivial", |w| !w.is_empty())
        .prop_map(|w| cyclic_reduce(&w).1.word().clone())
}

proptest! {
    #[test]
    fn presentation_text_round_trips(rels in prop::collection::vec(relator(3), 0..6), seed in any::<u64>()) {
        let a = Alphabet::new(["a", "b2", "x_3"]).unwrap();
        let p = Presentation::from_words(a, rels).unwrap();
        let meta = serde_json::json!({ "construction": { "kind": "perfect", "seed": seed, "family": [] } });
        let parsed = text::parse(&text::format(&p, Some(&meta))).unwrap();
        prop_assert_eq!(parsed.presentation, p);
        prop_assert_eq!(parsed.meta, Some(meta));
    }
}
