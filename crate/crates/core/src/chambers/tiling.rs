use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use super::{finite_pairs, ChamberSet};
use crate::error::{Error, Result};
use crate::words::{CoxeterGroup, Elem, Session, Word};

/// Default bound on the number of ball chambers a tiling check may visit.
pub const DEFAULT_BALL_BUDGET: usize = 2_000_000;

/// Where the translates are developed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TilingRegion {
    /// All chambers of length at most the radius.
    Ball(usize),
    /// The rank-2 residues through chambers of the set, plus the chambers
    /// adjacent to it. These contain the full cycle of chambers around every
    /// codimension-2 face of the set.
    FaceCycles,
}

impl fmt::Display for TilingRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TilingRegion::Ball(r) => write!(f, "ball of radius {r}"),
            TilingRegion::FaceCycles => f.write_str("residues around the set"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingReport {
    /// `|I|` when the translates cover the region exactly once.
    pub index: Option<usize>,
    pub covered: bool,
    pub overlap: bool,
    pub region: TilingRegion,
    pub region_size: usize,
    /// Translates meeting the region.
    pub translates: usize,
    /// ShortLex-least region chamber missed by every translate.
    pub uncovered: Option<Word>,
    /// ShortLex-least region chamber hit by two translates.
    pub doubly_covered: Option<Word>,
}

impl TilingReport {
    pub fn is_tiling(&self) -> bool {
        self.index.is_some()
    }
}

/// Smallest radius accepted by [`verify_tiling`]: the ball must contain the
/// set and every chamber adjacent to it, so that each wall is seen from both
/// sides.
pub fn minimum_tiling_radius(set: &ChamberSet) -> usize {
    set.max_length() + 1
}

/// Develops the translates `g·I` of `I` across the ball of the given radius.
///
/// Every chamber `x` of the region gets an address `(g, w)` with `x = g·w`,
/// `w ∈ I`. Starting from the addresses of `I` itself, a step `x -> x·s`
/// keeps the translate when `w·s ∈ I` and otherwise crosses the wall
/// `w s w⁻¹` into the translate `g·(w s w⁻¹)`, where `x·s` is the copy of
/// `w`. Two different addresses for one chamber mean two translates overlap.
/// Since `g = x·w⁻¹`, addresses are compared through `w` alone.
pub fn verify_tiling(group: &CoxeterGroup, set: &ChamberSet, radius: usize) -> Result<TilingReport> {
    verify_tiling_with_budget(group, set, radius, DEFAULT_BALL_BUDGET)
}

pub fn verify_tiling_with_budget(
    group: &CoxeterGroup,
    set: &ChamberSet,
    radius: usize,
    budget: usize,
) -> Result<TilingReport> {
    let required = minimum_tiling_radius(set);
    if radius < required {
        return Err(Error::RadiusTooSmall { required, given: radius });
    }
    let mut s = group.session();
    let elems = set.elems(&mut s)?;
    let ball = s.ball_bounded(radius, budget)?;
    develop(&mut s, &elems, &ball, TilingRegion::Ball(radius))
}

/// [`verify_tiling`] over the residues around the set instead of a ball.
/// Its size grows with `|I|` rather than exponentially in the longest
/// member, so it stays cheap for large domains in rank 4 and above.
pub fn verify_tiling_around(group: &CoxeterGroup, set: &ChamberSet) -> Result<TilingReport> {
    let mut s = group.session();
    let n = s.rank();
    let elems = set.elems(&mut s)?;
    let pairs = finite_pairs(group);
    let mut seen: HashSet<Elem> = elems.iter().copied().collect();
    for &w in &elems {
        for g in 0..n {
            seen.insert(s.mul_gen(w, g)?);
        }
        for &(i, j, m) in &pairs {
            let mut x = w;
            for k in 0..2 * m as usize {
                x = s.mul_gen(x, if k % 2 == 0 { i } else { j })?;
                seen.insert(x);
            }
        }
    }
    let mut region: Vec<Elem> = seen.into_iter().collect();
    region.sort_by(|&a, &b| s.shortlex_cmp(a, b));
    develop(&mut s, &elems, &region, TilingRegion::FaceCycles)
}

fn develop(s: &mut Session<'_>, elems: &[Elem], region: &[Elem], kind: TilingRegion) -> Result<TilingReport> {
    let n = s.rank();
    let member: HashMap<Elem, u32> = elems.iter().enumerate().map(|(k, &w)| (w, k as u32)).collect();
    let mut step = vec![NONE; elems.len() * n];
    for (k, &w) in elems.iter().enumerate() {
        for g in 0..n {
            if let Some(&j) = member.get(&s.mul_gen(w, g)?) {
                step[k * n + g] = j;
            }
        }
    }
    let inverses: Vec<Word> = elems.iter().map(|&w| s.word(w).reversed()).collect();

    let inside: HashSet<Elem> = region.iter().copied().collect();
    let mut address: HashMap<Elem, u32> = HashMap::with_capacity(region.len());
    address.insert(Elem::IDENTITY, member[&Elem::IDENTITY]);
    let mut translates = HashSet::from([Elem::IDENTITY]);
    let mut queue = VecDeque::from([Elem::IDENTITY]);
    let mut conflict: Option<Elem> = None;
    while let Some(x) = queue.pop_front() {
        let w = address[&x] as usize;
        for g in 0..n {
            let y = s.mul_gen(x, g)?;
            if !inside.contains(&y) {
                continue;
            }
            let next = step[w * n + g];
            let expected = if next == NONE { w as u32 } else { next };
            match address.get(&y) {
                None => {
                    address.insert(y, expected);
                    if next == NONE {
                        translates.insert(s.mul_word(y, &inverses[w])?);
                    }
                    queue.push_back(y);
                }
                Some(&a) if a != expected => {
                    if conflict.is_none_or(|c| s.shortlex_cmp(y, c).is_lt()) {
                        conflict = Some(y);
                    }
                }
                Some(_) => {}
            }
        }
    }

    let uncovered = region.iter().find(|x| !address.contains_key(x)).map(|&x| s.word(x));
    let doubly_covered = conflict.map(|x| s.word(x));
    let covered = uncovered.is_none();
    let overlap = doubly_covered.is_some();
    Ok(TilingReport {
        index: (covered && !overlap).then_some(elems.len()),
        covered,
        overlap,
        region: kind,
        region_size: region.len(),
        translates: translates.len(),
        uncovered,
        doubly_covered,
    })
}

const NONE: u32 = u32::MAX;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::CoxeterMatrix;

    fn set(g: &CoxeterGroup, words: &[&str]) -> ChamberSet {
        ChamberSet::new(g, words.iter().map(|x| x.parse().unwrap())).unwrap()
    }

    #[test]
    fn single_chamber_tiles_with_index_one() {
        let g = CoxeterGroup::new(CoxeterMatrix::triangle(3, 5, 5).unwrap());
        let r = verify_tiling(&g, &set(&g, &["e"]), 4).unwrap();
        assert_eq!(r.index, Some(1));
        assert!(r.covered && !r.overlap);
    }

    #[test]
    fn infinite_dihedral_halves() {
        let g = CoxeterGroup::new(CoxeterMatrix::free(2).unwrap());
        let r = verify_tiling(&g, &set(&g, &["e", "1"]), 6).unwrap();
        assert_eq!(r.index, Some(2));
        assert_eq!(r.region_size, 13);
    }

    #[test]
    fn non_domains_are_caught() {
        let g = CoxeterGroup::new(CoxeterMatrix::from_upper(2, [5.into()]).unwrap());
        // two adjacent chambers in a 10-cycle: the walls generate the whole group
        let r = verify_tiling(&g, &set(&g, &["e", "1"]), 6).unwrap();
        assert!(r.overlap);
        assert_eq!(r.index, None);
        assert!(verify_tiling_around(&g, &set(&g, &["e", "1"])).unwrap().overlap);
    }

    #[test]
    fn residue_region() {
        let g = CoxeterGroup::new(CoxeterMatrix::free(2).unwrap());
        let r = verify_tiling_around(&g, &set(&g, &["e", "1"])).unwrap();
        assert_eq!(r.index, Some(2));
        assert_eq!(r.region, TilingRegion::FaceCycles);
        // {e, 1} and its neighbours 2 and 1 2
        assert_eq!(r.region_size, 4);
        // the identity, 2 and 1 2 1
        assert_eq!(r.translates, 3);

        let g = CoxeterGroup::new(CoxeterMatrix::triangle(3, 5, 5).unwrap());
        let r = verify_tiling_around(&g, &set(&g, &["e"])).unwrap();
        assert_eq!(r.index, Some(1));
        // three hexagons and decagons through e: 6 + 10 + 10 - 3 - 2
        assert_eq!(r.region_size, 21);
    }

    #[test]
    fn rank_one() {
        let g = CoxeterGroup::new(CoxeterMatrix::free(1).unwrap());
        let r = verify_tiling(&g, &set(&g, &["e", "1"]), 2).unwrap();
        assert_eq!(r.index, Some(2));
        assert_eq!(r.translates, 1);
    }
}
