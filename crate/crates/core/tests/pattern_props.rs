use debunk_core::pattern::expand_alternations;
use debunk_core::{CompiledPattern, Lang, PatternSpec};
use debunk_testkit::gen;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Every located span is itself a full match, and spans never overlap.
    #[test]
    fn spans_are_full_matches_in_order(seed in any::<u64>(), noise in "[abc ]{0,12}") {
        let mut rng = gen::rng(seed);
        let source = gen::random_pattern_source(&mut rng);
        let spec = PatternSpec::new(Lang::new("en"), source);
        let Ok(expansions) = expand_alternations(&spec) else { return Ok(()); };
        let compiled = CompiledPattern::with_options(&spec, true, true).unwrap();
        let text = format!("{noise} {} {noise}", expansions[0]);
        let spans = compiled.find_all(&text);
        prop_assert!(!spans.is_empty(), "{:?} in {:?}", spec.source, text);
        let mut prev_end = 0;
        for s in &spans {
            prop_assert!(s.start >= prev_end && s.end > s.start);
            prop_assert!(compiled.is_full_match(&s.matched_text));
            prev_end = s.end;
        }
    }
}
