use std::time::Instant;

use cvekw_core::{normalize, Keyword, KeywordSet, MatchMode};
use cvekw_testkit::{checks, oracle};
use proptest::prelude::*;

#[test]
fn generated_descriptions_agree_with_naive_scanner() {
    let start = Instant::now();
    let summary = checks::matching_semantics(10_000, 7).unwrap();
    assert!(start.elapsed().as_secs_f64() < 10.0, "{:?}", start.elapsed());
    println!("{summary}");
}

#[test]
fn traversal_and_acronym_near_misses() {
    let set = KeywordSet::default_crypto();
    for text in checks::NON_MATCHES {
        assert!(set.match_description(text).is_empty(), "{text:?}");
    }
    assert_eq!(set.match_description("uses (RSA) keys").into_iter().collect::<Vec<_>>(), ["RSA"]);
    assert_eq!(set.match_description("AES-256-GCM").into_iter().collect::<Vec<_>>(), ["AES"]);
    assert_eq!(set.match_description("tls/ssl").into_iter().collect::<Vec<_>>(), ["TLS"]);
}

#[test]
fn repeated_keyword_counts_once() {
    let set = KeywordSet::default_crypto();
    let password = set.position("password").unwrap();
    assert_eq!(set.match_indices("password password PASSWORD pass-word passwords"), vec![password]);
}

fn text_strategy() -> impl Strategy<Value = String> {
    let atoms = prop::sample::select(vec![
        "rsa",
        "aes",
        "tls",
        "hmac",
        "ecdh",
        "ecdsa",
        "public",
        "key",
        "man",
        "in",
        "the",
        "middle",
        "brute",
        "force",
        "side",
        "channel",
        "password",
        "crypt",
        "encrypt",
        "decrypt",
        "salt",
        "hash",
        "traversal",
        "x",
        "7",
        "_",
        "caf\u{e9}",
        "\u{fc}ber",
        "\u{2013}",
    ]);
    let seps = prop::sample::select(vec!["", " ", "-", "\u{2010}", "\u{2011}", ".", "/", "\n"]);
    prop::collection::vec((atoms, seps), 0..12)
        .prop_map(|parts| parts.into_iter().flat_map(|(a, s)| [a, s]).collect::<String>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn matches_equal_oracle(text in text_strategy()) {
        let set = KeywordSet::default_crypto();
        let refs = oracle::ref_keywords(&set);
        let got: std::collections::BTreeSet<String> =
            set.match_description(&text).into_iter().map(str::to_string).collect();
        prop_assert_eq!(got, oracle::ref_match(&text, &refs));
    }

    #[test]
    fn case_folding_does_not_change_matches(text in text_strategy()) {
        let set = KeywordSet::default_crypto();
        prop_assert_eq!(set.match_indices(&text.to_uppercase()), set.match_indices(&text));
    }

    #[test]
    fn normalization_is_idempotent(text in "\\PC{0,40}") {
        let once = normalize(&text);
        prop_assert_eq!(normalize(&once), once.clone());
        let hyphenated = once.contains(cvekw_core::keywords::HYPHENS);
        prop_assert!(!hyphenated);
    }

    #[test]
    fn substring_keyword_matches_inside_words(prefix in "[a-z]{0,4}", suffix in "[a-z]{0,4}") {
        let set = KeywordSet::new(vec![Keyword::with_mode("crypt", MatchMode::Substring).unwrap()]).unwrap();
        prop_assert_eq!(set.match_indices(&format!("{prefix}crypt{suffix}")), vec![0]);
    }

    #[test]
    fn bounded_keyword_needs_non_alphanumeric_neighbours(prefix in "[a-z0-9]{0,3}", suffix in "[a-z0-9]{0,3}") {
        let set = KeywordSet::new(vec![Keyword::new("RSA").unwrap()]).unwrap();
        let hit = !set.match_indices(&format!("{prefix}RSA{suffix}")).is_empty();
        prop_assert_eq!(hit, prefix.is_empty() && suffix.is_empty());
    }
}
