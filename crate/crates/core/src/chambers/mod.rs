//! Chambers of the Davis complex, handled purely through the Cayley graph.
//!
//! A chamber is a group element; two chambers are adjacent when they differ
//! by a generator on the right, and the wall between `w` and `ws` is the
//! reflection `w s w⁻¹`. A rank-2 residue `w⟨s_i, s_j⟩` is the cycle of
//! chambers around a codimension-2 face.

mod search;
mod tiling;

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::words::{CoxeterGroup, Elem, Session, Word};

pub use search::{search_coxeter_polytopes, SearchReport, SearchStatus, DEFAULT_NODE_BUDGET};
pub use tiling::{
    minimum_tiling_radius, verify_tiling, verify_tiling_around, verify_tiling_with_budget, TilingRegion, TilingReport,
    DEFAULT_BALL_BUDGET,
};

/// A reflection `w s w⁻¹`, identified by its normal form.
#[derive(Clone, Debug)]
pub struct Reflection {
    pub word: Word,
    pub generator: usize,
    pub conjugator: Word,
}

impl PartialEq for Reflection {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word
    }
}

impl Eq for Reflection {}

/// A finite set of chambers containing the identity, stored as ShortLex
/// sorted normal forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChamberSet {
    members: Vec<Word>,
}

impl ChamberSet {
    /// Normalises and deduplicates `words`; the identity must be among them.
    pub fn new(group: &CoxeterGroup, words: impl IntoIterator<Item = Word>) -> Result<Self> {
        let mut s = group.session();
        let mut elems = Vec::new();
        for w in words {
            elems.push(s.eval(&w)?);
        }
        Self::from_elems(&s, &elems)
    }

    pub(crate) fn from_elems(s: &Session<'_>, elems: &[Elem]) -> Result<Self> {
        let mut members: Vec<Word> = elems.iter().map(|&e| s.word(e)).collect();
        members.sort();
        members.dedup();
        if members.first().is_none_or(|w| !w.is_empty()) {
            return Err(Error::Invalid("chamber set must contain the identity".into()));
        }
        Ok(ChamberSet { members })
    }

    pub fn members(&self) -> &[Word] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.members.binary_search(w).is_ok()
    }

    /// The largest member length.
    pub fn max_length(&self) -> usize {
        self.members.last().map_or(0, Word::len)
    }

    /// A member of maximal length (the ShortLex-last one).
    pub fn longest(&self) -> &Word {
        self.members.last().expect("chamber sets are never empty")
    }

    pub(crate) fn elems(&self, s: &mut Session<'_>) -> Result<Vec<Elem>> {
        self.members.iter().map(|w| s.eval(w)).collect()
    }

    /// Connectivity in the Cayley graph.
    pub fn is_connected(&self, group: &CoxeterGroup) -> Result<bool> {
        let mut s = group.session();
        let elems = self.elems(&mut s)?;
        let set: HashSet<Elem> = elems.iter().copied().collect();
        let mut seen = HashSet::from([elems[0]]);
        let mut stack = vec![elems[0]];
        while let Some(v) = stack.pop() {
            for g in 0..s.rank() {
                let u = s.mul_gen(v, g)?;
                if set.contains(&u) && seen.insert(u) {
                    stack.push(u);
                }
            }
        }
        Ok(seen.len() == set.len())
    }

    /// One word per line.
    pub fn to_text(&self) -> String {
        self.members.iter().map(|w| format!("{w}\n")).collect()
    }
}

impl fmt::Display for ChamberSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, w) in self.members.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
        }
        f.write_str("}")
    }
}

/// Parses the chamber-set file format: one word literal per line, blank
/// lines and `#` comments ignored.
pub fn parse_chamber_words(text: &str) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let w = line.parse::<Word>().map_err(|e| Error::Syntax {
            line: k + 1,
            column: 1,
            message: e.to_string(),
        })?;
        out.push(w);
    }
    Ok(out)
}

/// The chambers of a finite rank-2 residue that lie in a chamber set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueArc {
    /// 0-based generator pair, `i < j`.
    pub pair: (usize, usize),
    pub order: u32,
    /// Minimal element of the residue.
    pub base: Word,
    /// Positions on the `2m`-cycle, walking `base, base·s_i, base·s_i s_j, ...`.
    pub positions: Vec<usize>,
    /// Members in the order of `positions`.
    pub members: Vec<Word>,
    pub contiguous: bool,
}

impl ResidueArc {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == 2 * self.order as usize
    }

    /// A full residue, or a contiguous arc whose size divides the order.
    pub fn is_admissible(&self) -> bool {
        self.is_full() || (self.contiguous && (self.order as usize).is_multiple_of(self.size()))
    }
}

pub(crate) fn finite_pairs(group: &CoxeterGroup) -> Vec<(usize, usize, u32)> {
    let n = group.rank();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if let Some(m) = group.matrix().order(i, j).finite() {
                out.push((i, j, m));
            }
        }
    }
    out
}

/// Where `w` sits on the cycle of its `<s_i, s_j>` residue (`i < j`).
pub(crate) fn cycle_position(s: &Session<'_>, w: Elem, i: usize, j: usize, m: u32) -> (Elem, usize) {
    let (base, d, first) = s.residue_position(w, i, j);
    let m = m as usize;
    let pos = if d == 0 || d == m || first == Some(i) {
        d
    } else {
        2 * m - d
    };
    (base, pos)
}

fn is_contiguous(positions: &[usize], cycle: usize) -> bool {
    if positions.len() == cycle {
        return true;
    }
    let set: HashSet<usize> = positions.iter().copied().collect();
    positions.iter().filter(|&&p| !set.contains(&((p + 1) % cycle))).count() == 1
}

fn arcs_of(s: &Session<'_>, elems: &[Elem], pairs: &[(usize, usize, u32)]) -> Vec<ResidueArc> {
    let mut groups: HashMap<(usize, Elem), Vec<(usize, Elem)>> = HashMap::new();
    for &w in elems {
        for (k, &(i, j, m)) in pairs.iter().enumerate() {
            let (base, pos) = cycle_position(s, w, i, j, m);
            groups.entry((k, base)).or_default().push((pos, w));
        }
    }
    let mut arcs: Vec<ResidueArc> = groups
        .into_iter()
        .map(|((k, base), mut list)| {
            let (i, j, m) = pairs[k];
            list.sort();
            let positions: Vec<usize> = list.iter().map(|p| p.0).collect();
            ResidueArc {
                pair: (i, j),
                order: m,
                base: s.word(base),
                contiguous: is_contiguous(&positions, 2 * m as usize),
                positions,
                members: list.iter().map(|p| s.word(p.1)).collect(),
            }
        })
        .collect();
    arcs.sort_by(|a, b| a.base.cmp(&b.base).then(a.pair.cmp(&b.pair)));
    arcs
}

/// Every residue arc of a finite pair that meets `set`, sorted by base and pair.
pub fn residue_arcs(group: &CoxeterGroup, set: &ChamberSet) -> Result<Vec<ResidueArc>> {
    let pairs = finite_pairs(group);
    let mut s = group.session();
    let elems = set.elems(&mut s)?;
    Ok(arcs_of(&s, &elems, &pairs))
}

/// The non-full residue arcs: in rank 3 these are the polygon's vertices.
pub fn boundary_arcs(group: &CoxeterGroup, set: &ChamberSet) -> Result<Vec<ResidueArc>> {
    Ok(residue_arcs(group, set)?.into_iter().filter(|a| !a.is_full()).collect())
}

/// The residue arc of `set` through member `w` for generators `i`, `j`.
pub fn residue_arc(
    group: &CoxeterGroup,
    set: &ChamberSet,
    w: &Word,
    (i, j): (usize, usize),
) -> Result<ResidueArc> {
    let n = group.rank();
    for g in [i, j] {
        if g >= n {
            return Err(Error::GeneratorOutOfRange { generator: g, rank: n });
        }
    }
    if i == j {
        return Err(Error::Invalid("a residue needs two distinct generators".into()));
    }
    let (i, j) = (i.min(j), i.max(j));
    let m = group
        .matrix()
        .order(i, j)
        .finite()
        .ok_or(Error::InfiniteResidue { i, j })?;
    let mut s = group.session();
    let w = s.eval(w)?;
    let elems = set.elems(&mut s)?;
    let (base, _) = cycle_position(&s, w, i, j, m);
    let same: Vec<Elem> = elems
        .into_iter()
        .filter(|&x| cycle_position(&s, x, i, j, m).0 == base)
        .collect();
    let arcs = arcs_of(&s, &same, &[(i, j, m)]);
    arcs.into_iter()
        .next()
        .ok_or_else(|| Error::Invalid(format!("{} is not a member of the chamber set", s.word(w))))
}

pub fn ball(group: &CoxeterGroup, radius: usize) -> Result<Vec<Word>> {
    let mut s = group.session();
    let elems = s.ball(radius)?;
    Ok(elems.into_iter().map(|e| s.word(e)).collect())
}

/// The chambers `w·s` for each generator `s`.
pub fn neighbors(group: &CoxeterGroup, w: &Word) -> Result<Vec<(usize, Word)>> {
    let mut s = group.session();
    let e = s.eval(w)?;
    (0..s.rank())
        .map(|g| {
            let u = s.mul_gen(e, g)?;
            Ok((g, s.word(u)))
        })
        .collect()
}

fn reflection_at(s: &mut Session<'_>, w: Elem, g: usize) -> Result<(Elem, Reflection)> {
    let r = s.conjugate_gen(w, g)?;
    let ws = s.mul_gen(w, g)?;
    let near = if s.len(w) < s.len(ws) { w } else { ws };
    Ok((
        r,
        Reflection {
            word: s.word(r),
            generator: g,
            conjugator: s.word(near),
        },
    ))
}

/// The wall separating `w` from `w·s`.
pub fn wall_between(group: &CoxeterGroup, w: &Word, g: usize) -> Result<Reflection> {
    let mut s = group.session();
    let e = s.eval(w)?;
    Ok(reflection_at(&mut s, e, g)?.1)
}

/// Pairs `(w, s)` with `w` in the set and `w·s` outside it.
pub(crate) fn exits(s: &mut Session<'_>, elems: &[Elem], set: &HashSet<Elem>) -> Result<Vec<(Elem, usize)>> {
    let mut out = Vec::new();
    for &w in elems {
        for g in 0..s.rank() {
            if !set.contains(&s.mul_gen(w, g)?) {
                out.push((w, g));
            }
        }
    }
    Ok(out)
}

/// The distinct walls of the set, ShortLex sorted by reflection word.
pub fn bounding_reflections(group: &CoxeterGroup, set: &ChamberSet) -> Result<Vec<Reflection>> {
    let mut s = group.session();
    let elems = set.elems(&mut s)?;
    let members: HashSet<Elem> = elems.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (w, g) in exits(&mut s, &elems, &members)? {
        let (r, refl) = reflection_at(&mut s, w, g)?;
        if seen.insert(r) {
            out.push(refl);
        }
    }
    out.sort_by(|a, b| a.word.cmp(&b.word));
    Ok(out)
}

/// Largest gallery distance between two members.
pub fn diameter(group: &CoxeterGroup, set: &ChamberSet) -> Result<usize> {
    let mut s = group.session();
    let elems = set.elems(&mut s)?;
    let mut best = 0;
    for (k, &u) in elems.iter().enumerate() {
        for &v in &elems[k + 1..] {
            best = best.max(s.distance(u, v)?);
        }
    }
    Ok(best)
}

/// A geodesic gallery from `from` to `to` whose first step `missing` leaves the set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityViolation {
    pub from: Word,
    pub to: Word,
    pub missing: Word,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexityReport {
    pub counterexample: Option<ConvexityViolation>,
}

impl ConvexityReport {
    pub fn is_convex(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn check_radius(set: &ChamberSet, radius: usize) -> Result<()> {
    let required = 2 * set.max_length();
    if radius < required {
        return Err(Error::RadiusTooSmall { required, given: radius });
    }
    Ok(())
}

pub(crate) fn convexity_violation(s: &mut Session<'_>, elems: &[Elem]) -> Result<Option<(Elem, Elem, Elem)>> {
    let set: HashSet<Elem> = elems.iter().copied().collect();
    // Geodesics from u to v start with u·g for the left descents g of u⁻¹v,
    // i.e. the right descents of v⁻¹u; closure under first steps for every
    // pair is closure under whole geodesics.
    let inverses = elems.iter().map(|&v| s.inverse(v)).collect::<Result<Vec<_>>>()?;
    for &u in elems {
        for (&v, &v_inv) in elems.iter().zip(&inverses) {
            if u == v {
                continue;
            }
            let h = s.mul(v_inv, u)?;
            let d = s.descents(h);
            for g in 0..s.rank() {
                if d & (1 << g) != 0 {
                    let step = s.mul_gen(u, g)?;
                    if !set.contains(&step) {
                        return Ok(Some((u, v, step)));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Betweenness convexity: every chamber on a geodesic gallery between two
/// members is a member.
///
/// Geodesics between members never leave the ball of radius `2·max_length`,
/// so smaller radii are rejected.
pub fn is_convex(group: &CoxeterGroup, set: &ChamberSet, radius: usize) -> Result<ConvexityReport> {
    check_radius(set, radius)?;
    let mut s = group.session();
    let elems = set.elems(&mut s)?;
    let counterexample = convexity_violation(&mut s, &elems)?.map(|(u, v, x)| ConvexityViolation {
        from: s.word(u),
        to: s.word(v),
        missing: s.word(x),
    });
    Ok(ConvexityReport { counterexample })
}

/// Half-space form of convexity: the set is connected and equals the part of
/// the ball lying on the identity side of every bounding wall.
pub fn is_convex_halfspace(group: &CoxeterGroup, set: &ChamberSet, radius: usize) -> Result<bool> {
    check_radius(set, radius)?;
    if !set.is_connected(group)? {
        return Ok(false);
    }
    let walls: Vec<Word> = bounding_reflections(group, set)?.into_iter().map(|r| r.word).collect();
    let mut s = group.session();
    let walls: Vec<Elem> = walls.iter().map(|w| s.eval(w)).collect::<Result<_>>()?;
    let members: HashSet<Elem> = set.elems(&mut s)?.into_iter().collect();
    for x in s.ball(radius)? {
        let mut inside = true;
        for &t in &walls {
            let tx = s.mul(t, x)?;
            if s.len(tx) < s.len(x) {
                inside = false;
                break;
            }
        }
        if inside != members.contains(&x) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcViolation {
    /// ShortLex-least member on the offending residue.
    pub chamber: Word,
    pub pair: (usize, usize),
    pub size: usize,
    pub order: u32,
    pub contiguous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeReport {
    pub convexity: ConvexityReport,
    pub violations: Vec<ArcViolation>,
}

impl PolytopeReport {
    pub fn is_polytope(&self) -> bool {
        self.convexity.is_convex() && self.violations.is_empty()
    }
}

pub(crate) fn arc_violations(s: &Session<'_>, elems: &[Elem], pairs: &[(usize, usize, u32)]) -> Vec<ArcViolation> {
    arcs_of(s, elems, pairs)
        .into_iter()
        .filter(|a| !a.is_admissible())
        .map(|a| ArcViolation {
            chamber: a.members.iter().min().cloned().expect("arcs are non-empty"),
            pair: a.pair,
            size: a.size(),
            order: a.order,
            contiguous: a.contiguous,
        })
        .collect()
}

/// Convexity, then the angle condition: at every finite residue the set
/// either fills the whole cycle or occupies a contiguous arc of `d`
/// chambers with `d | m`.
pub fn is_coxeter_polytope(group: &CoxeterGroup, set: &ChamberSet) -> Result<PolytopeReport> {
    let convexity = is_convex(group, set, 2 * set.max_length())?;
    let pairs = finite_pairs(group);
    let mut s = group.session();
    let elems = set.elems(&mut s)?;
    Ok(PolytopeReport {
        convexity,
        violations: arc_violations(&s, &elems, &pairs),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::{CoxeterMatrix, INF};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn set(g: &CoxeterGroup, words: &[&str]) -> ChamberSet {
        ChamberSet::new(g, words.iter().map(|x| w(x))).unwrap()
    }

    fn dihedral(m: impl Into<crate::diagrams::Order>) -> CoxeterGroup {
        CoxeterGroup::new(CoxeterMatrix::from_upper(2, [m.into()]).unwrap())
    }

    #[test]
    fn balls() {
        let g = dihedral(3);
        assert_eq!(ball(&g, 0).unwrap(), vec![Word::empty()]);
        assert_eq!(ball(&g, 3).unwrap().len(), 6);
        assert_eq!(ball(&dihedral(INF), 3).unwrap().len(), 7);
    }

    #[test]
    fn neighbour_lists() {
        let g = dihedral(3);
        let n = neighbors(&g, &Word::empty()).unwrap();
        assert_eq!(n, vec![(0, w("1")), (1, w("2"))]);
        assert!(neighbors(&g, &w("1")).unwrap().contains(&(0, Word::empty())));
        let n = neighbors(&g, &w("1 2")).unwrap();
        assert_eq!(n, vec![(0, w("1 2 1")), (1, w("1"))]);
    }

    #[test]
    fn walls() {
        let g = dihedral(3);
        assert_eq!(wall_between(&g, &Word::empty(), 0).unwrap().word, w("1"));
        assert_eq!(wall_between(&g, &w("1"), 1).unwrap().word, w("1 2 1"));
        let g = CoxeterGroup::new(CoxeterMatrix::triangle(3, 5, INF).unwrap());
        for x in ball(&g, 4).unwrap() {
            for s in 0..3 {
                let xs = g.multiply(&x, &Word::generator(s)).unwrap();
                assert_eq!(wall_between(&g, &x, s).unwrap(), wall_between(&g, &xs, s).unwrap());
            }
        }
    }

    #[test]
    fn arcs() {
        let g = dihedral(5);
        let one = set(&g, &["e"]);
        let a = residue_arc(&g, &one, &Word::empty(), (0, 1)).unwrap();
        assert_eq!((a.size(), a.contiguous), (1, true));
        let two = set(&g, &["e", "1"]);
        let a = residue_arc(&g, &two, &w("1"), (0, 1)).unwrap();
        assert_eq!((a.size(), a.contiguous, a.positions.clone()), (2, true, vec![0, 1]));
        let full = ChamberSet::new(&g, ball(&g, 5).unwrap()).unwrap();
        let a = residue_arc(&g, &full, &w("2 1"), (0, 1)).unwrap();
        assert!(a.is_full() && a.is_admissible());
        let split = set(&g, &["e", "1 2", "1"]);
        assert!(residue_arc(&g, &split, &Word::empty(), (0, 1)).unwrap().contiguous);
        let gap = set(&g, &["e", "1 2"]);
        assert!(!residue_arc(&g, &gap, &Word::empty(), (0, 1)).unwrap().contiguous);
        // wrap-around arc through position 0
        let wrap = set(&g, &["e", "1", "2"]);
        let a = residue_arc(&g, &wrap, &Word::empty(), (0, 1)).unwrap();
        assert_eq!(a.positions, vec![0, 1, 9]);
        assert!(a.contiguous);
        assert!(matches!(
            residue_arc(&dihedral(INF), &one, &Word::empty(), (0, 1)),
            Err(Error::InfiniteResidue { .. })
        ));
    }

    #[test]
    fn convexity() {
        let g = dihedral(3);
        assert!(is_convex(&g, &set(&g, &["e"]), 0).unwrap().is_convex());
        assert!(is_convex(&g, &set(&g, &["e", "1"]), 2).unwrap().is_convex());
        let r = is_convex(&g, &set(&g, &["e", "1 2 1"]), 6).unwrap();
        assert_eq!(r.counterexample.unwrap().missing, w("1"));
        assert_eq!(
            is_convex(&g, &set(&g, &["e", "1 2 1"]), 5),
            Err(Error::RadiusTooSmall { required: 6, given: 5 })
        );
    }

    #[test]
    fn polytopes() {
        assert!(is_coxeter_polytope(&dihedral(3), &set(&dihedral(3), &["e"])).unwrap().is_polytope());
        let free = CoxeterGroup::new(CoxeterMatrix::free(2).unwrap());
        assert!(is_coxeter_polytope(&free, &set(&free, &["e", "1"])).unwrap().is_polytope());
        let g = CoxeterGroup::new(CoxeterMatrix::triangle(5, INF, INF).unwrap());
        let r = is_coxeter_polytope(&g, &set(&g, &["e", "1"])).unwrap();
        assert!(r.convexity.is_convex());
        assert_eq!(
            r.violations,
            vec![ArcViolation {
                chamber: Word::empty(),
                pair: (0, 1),
                size: 2,
                order: 5,
                contiguous: true
            }]
        );
        let d5 = dihedral(5);
        let half = set(&d5, &["e", "1", "1 2", "1 2 1", "1 2 1 2"]);
        assert!(is_coxeter_polytope(&d5, &half).unwrap().is_polytope());
    }

    #[test]
    fn bounding_walls() {
        let g = dihedral(3);
        let all: Vec<Word> = bounding_reflections(&g, &set(&g, &["e"])).unwrap().into_iter().map(|r| r.word).collect();
        assert_eq!(all, vec![w("1"), w("2")]);
        let free = CoxeterGroup::new(CoxeterMatrix::free(2).unwrap());
        let walls: Vec<Word> = bounding_reflections(&free, &set(&free, &["e", "1"]))
            .unwrap()
            .into_iter()
            .map(|r| r.word)
            .collect();
        assert_eq!(walls, vec![w("2"), w("1 2 1")]);
    }

    #[test]
    fn chamber_file_format() {
        let words = parse_chamber_words("e\n# comment\n1 2\n\n3 1 # trailing\n").unwrap();
        assert_eq!(words, vec![Word::empty(), w("1 2"), w("3 1")]);
        assert!(matches!(parse_chamber_words("e\n1 0\n"), Err(Error::Syntax { line: 2, .. })));
        let g = dihedral(3);
        let s = set(&g, &["2 1", "e", "1"]);
        assert_eq!(s.to_text(), "e\n1\n2 1\n");
        assert!(ChamberSet::new(&g, [w("1")]).is_err());
    }

    #[test]
    fn connectivity() {
        let g = dihedral(INF);
        assert!(set(&g, &["e", "1", "1 2"]).is_connected(&g).unwrap());
        assert!(!set(&g, &["e", "1 2"]).is_connected(&g).unwrap());
    }

    #[test]
    fn diameters() {
        let g = dihedral(INF);
        assert_eq!(diameter(&g, &set(&g, &["e", "1", "2", "1 2"])).unwrap(), 3);
    }
}
