#![allow(dead_code)]

use beurling::BeurlingSpec;

/// `((p, q), b)`: a = p/q, theta = 1/b.
pub type UnitTerm = ((i64, i64), u64);

/// Admissible unit-fraction specs with |a_k| <= 1 and distinct b_k.
pub const LEMMA_SPECS: [(&str, &[UnitTerm]); 4] = [
    ("A", &[((1, 1), 2), ((-1, 2), 1)]),
    ("B", &[((1, 1), 2), ((-1, 1), 3), ((-1, 1), 6)]),
    ("C", &[((-1, 2), 1), ((1, 2), 2), ((3, 4), 3)]),
    ("D", &[((3, 5), 2), ((-3, 5), 3), ((-1, 2), 5)]),
];

pub fn lemma_specs() -> Vec<(&'static str, BeurlingSpec)> {
    LEMMA_SPECS
        .iter()
        .map(|(name, terms)| (*name, BeurlingSpec::from_unit_rationals(terms).unwrap()))
        .collect()
}

/// `{(1, 1), (-2, 1/2)}`: admissible, but |a| = 2.
pub fn two_term() -> BeurlingSpec {
    BeurlingSpec::from_unit_rationals(&[((1, 1), 1), ((-2, 1), 2)]).unwrap()
}

/// Every admissible test spec.
pub fn admissible_specs() -> Vec<(&'static str, BeurlingSpec)> {
    let mut v = lemma_specs();
    v.push(("two-term", two_term()));
    v
}
