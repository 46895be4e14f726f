//! Shared generators for the unit-test suites.

use alloc::string::String;
use alloc::vec::Vec;

use proptest::prelude::*;

use crate::corpus::Polarity;

/// Random labeled mini-corpora over a small vocabulary, with both
/// classes guaranteed non-empty.
pub(crate) fn arb_corpus() -> impl Strategy<Value = Vec<(Vec<String>, Polarity)>> {
    let word = prop::sample::select(
        ["visa", "doha", "cost", "spam", "lol", "bank", "road", "w1", "w2", "w3"]
            .iter()
            .map(|s| String::from(*s))
            .collect::<Vec<_>>(),
    );
    let comment = prop::collection::vec(word, 1..8);
    prop::collection::vec((comment, prop::bool::ANY), 2..50).prop_map(|items| {
        let mut out: Vec<(Vec<String>, Polarity)> = items
            .into_iter()
            .map(|(tokens, good)| (tokens, if good { Polarity::Good } else { Polarity::Bad }))
            .collect();
        // Force both classes to exist.
        out[0].1 = Polarity::Good;
        let last = out.len() - 1;
        out[last].1 = Polarity::Bad;
        out
    })
}
