//! Reference word solver that never builds a Cayley graph.
//!
//! A word is non-reduced iff some sequence of braid replacements exposes two
//! equal adjacent letters. We explore the braid class exhaustively, delete
//! the first such pair, and repeat; the ShortLex minimum of the final class
//! is the normal form. Exponential, so only suitable for short words.

use std::collections::{HashSet, VecDeque};

use super::Word;
use crate::diagrams::CoxeterMatrix;
use crate::error::{Error, Result};

/// Largest braid class explored before giving up.
pub const CLASS_BUDGET: usize = 500_000;

fn braid_neighbours(matrix: &CoxeterMatrix, w: &[u8], out: &mut Vec<Vec<u8>>) {
    for p in 0..w.len().saturating_sub(1) {
        let (a, b) = (w[p], w[p + 1]);
        if a == b {
            continue;
        }
        let Some(m) = matrix.order(a as usize, b as usize).finite() else {
            continue;
        };
        let m = m as usize;
        if p + m > w.len() {
            continue;
        }
        let alternating = (0..m).all(|k| w[p + k] == if k % 2 == 0 { a } else { b });
        if alternating {
            let mut v = w.to_vec();
            for k in 0..m {
                v[p + k] = if k % 2 == 0 { b } else { a };
            }
            out.push(v);
        }
    }
}

fn braid_class(matrix: &CoxeterMatrix, w: &[u8]) -> Result<HashSet<Vec<u8>>> {
    let mut seen = HashSet::from([w.to_vec()]);
    let mut queue = VecDeque::from([w.to_vec()]);
    let mut buf = Vec::new();
    while let Some(cur) = queue.pop_front() {
        buf.clear();
        braid_neighbours(matrix, &cur, &mut buf);
        for v in buf.drain(..) {
            if seen.insert(v.clone()) {
                if seen.len() > CLASS_BUDGET {
                    return Err(Error::BudgetExceeded {
                        what: "braid class",
                        budget: CLASS_BUDGET,
                    });
                }
                queue.push_back(v);
            }
        }
    }
    Ok(seen)
}

/// ShortLex normal form of `w`.
pub fn normal_form(matrix: &CoxeterMatrix, w: &Word) -> Result<Word> {
    if let Some(s) = w.max_letter().filter(|&s| s >= matrix.rank()) {
        return Err(Error::GeneratorOutOfRange {
            generator: s,
            rank: matrix.rank(),
        });
    }
    let mut cur = w.letters().to_vec();
    'outer: loop {
        let class = braid_class(matrix, &cur)?;
        for v in &class {
            if let Some(p) = v.windows(2).position(|x| x[0] == x[1]) {
                let mut shorter = v.clone();
                shorter.drain(p..p + 2);
                cur = shorter;
                continue 'outer;
            }
        }
        let min = class.into_iter().min().expect("class contains the word itself");
        return Ok(Word::new(min));
    }
}

pub fn is_reduced(matrix: &CoxeterMatrix, w: &Word) -> Result<bool> {
    Ok(normal_form(matrix, w)?.len() == w.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::INF;
    use crate::words::CoxeterGroup;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn small_cases() {
        let m = CoxeterMatrix::triangle(3, 3, 3).unwrap();
        assert_eq!(normal_form(&m, &w("2 1 2")).unwrap(), w("1 2 1"));
        assert_eq!(normal_form(&m, &w("1 2 1 2")).unwrap(), w("2 1"));
        assert_eq!(normal_form(&m, &w("3 1 3 1")).unwrap(), w("1 3"));
        assert!(!is_reduced(&m, &w("3 1 2 1 2 3")).unwrap());
        assert!(is_reduced(&m, &w("1 2 3 1 2 3")).unwrap());
    }

    /// Every word up to length 7 over three generators, against the Cayley graph.
    #[test]
    fn agrees_with_cayley_graph() {
        for matrix in [
            CoxeterMatrix::triangle(3, 5, 5).unwrap(),
            CoxeterMatrix::triangle(5, 5, 5).unwrap(),
            CoxeterMatrix::triangle(3, INF, 7).unwrap(),
        ] {
            let g = CoxeterGroup::new(matrix.clone());
            let mut words = vec![Word::empty()];
            for _ in 0..7 {
                let mut next = Vec::new();
                for x in &words {
                    for s in 0..3 {
                        let mut y = x.clone();
                        y.push(s);
                        next.push(y);
                    }
                }
                for y in &next {
                    assert_eq!(
                        normal_form(&matrix, y).unwrap(),
                        g.normal_form(y).unwrap(),
                        "{y} in {matrix}"
                    );
                }
                words = next;
            }
        }
    }
}
