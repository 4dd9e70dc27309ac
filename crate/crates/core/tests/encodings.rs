use dimsig_core::encodings::{decode, encode, EncodingScheme};
use dimsig_core::{fixtures, BitSignal, Error};
use proptest::prelude::*;

#[test]
fn examples() {
    assert_eq!(encode("A", &EncodingScheme::Utf8).unwrap().to_01_string(), "01000001");
    assert_eq!(
        encode("A", &EncodingScheme::Balanced).unwrap().to_01_string(),
        "0100000110111110"
    );
    assert_eq!(encode("aB c", &EncodingScheme::vowel()).unwrap().to_01_string(), "1000");
    assert!(matches!(
        encode("naïve", &EncodingScheme::Utf8),
        Err(Error::MultiByte { index: 2, .. })
    ));
}

#[test]
fn decode_errors() {
    let bad: BitSignal = "0100000101000001".parse().unwrap();
    assert!(matches!(
        decode(&bad, &EncodingScheme::Balanced),
        Err(Error::BalancedIntegrity(0))
    ));
    let x = encode("Origin", &EncodingScheme::Utf8).unwrap();
    assert_eq!(decode(&x, &EncodingScheme::Utf8).unwrap(), "Origin");
    assert!(matches!(decode(&x, &EncodingScheme::vowel()), Err(Error::NonInvertible)));
    assert!(decode(&x.prefix(12), &EncodingScheme::Utf8).is_err());
}

#[test]
fn corpus_lengths() {
    assert_eq!(encode(fixtures::DARWIN, &EncodingScheme::Utf8).unwrap().len(), 3216);
    let balanced = encode(fixtures::DARWIN, &EncodingScheme::Balanced).unwrap();
    assert_eq!(balanced.len(), 6432);
    assert_eq!(2 * balanced.ones(), balanced.len());
}

fn ascii() -> impl Strategy<Value = String> {
    prop::collection::vec(0u8..128, 0..200).prop_map(|v| v.into_iter().map(char::from).collect())
}

proptest! {
    #[test]
    fn utf8_and_balanced_round_trip(t in ascii()) {
        for scheme in [EncodingScheme::Utf8, EncodingScheme::Balanced] {
            let x = encode(&t, &scheme).unwrap();
            prop_assert_eq!(decode(&x, &scheme).unwrap(), t.clone());
        }
    }

    #[test]
    fn balanced_is_exactly_half_ones(t in ascii()) {
        let x = encode(&t, &EncodingScheme::Balanced).unwrap();
        prop_assert_eq!(x.len(), 16 * t.len());
        prop_assert_eq!(2 * x.ones(), x.len());
    }

    #[test]
    fn indicator_fraction_matches_text(t in "[a-zA-Z ,.]{1,200}") {
        let x = encode(&t, &EncodingScheme::vowel()).unwrap();
        let vowels = t.chars().filter(|c| "AaEeIiOoUu".contains(*c)).count();
        prop_assert_eq!(x.len(), t.chars().count());
        prop_assert_eq!(x.ones(), vowels);
    }
}
