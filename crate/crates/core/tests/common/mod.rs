#![allow(dead_code)]

use oddcox::diagrams::{CoxeterMatrix, INF};
use oddcox::words::Word;
use proptest::prelude::*;

/// Five fixed systems of rank at most 4 with finite orders at most 15.
pub fn systems() -> Vec<CoxeterMatrix> {
    vec![
        CoxeterMatrix::triangle(3, 5, 5).unwrap(),
        CoxeterMatrix::triangle(5, 5, 5).unwrap(),
        CoxeterMatrix::from_upper(3, [3.into(), INF, 7.into()]).unwrap(),
        CoxeterMatrix::from_upper(3, [15.into(), INF, 3.into()]).unwrap(),
        CoxeterMatrix::from_upper(4, [3.into(), 5.into(), INF, 5.into(), 7.into(), 15.into()]).unwrap(),
    ]
}

pub fn system(k: usize) -> CoxeterMatrix {
    systems().swap_remove(k)
}

pub fn word_in(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..rank as u8, 0..=max_len).prop_map(Word::new)
}

/// A system index from [`systems`] together with a random word in it.
pub fn system_and_word(max_len: usize) -> impl Strategy<Value = (usize, Word)> {
    (0..5usize).prop_flat_map(move |k| (Just(k), word_in(system(k).rank(), max_len)))
}
