//! Explicit fundamental domains of finite-index reflection subgroups.
//!
//! Every construction is checked (convexity, angle condition, and a
//! development of translates over the residues around the domain) before it
//! is returned; a failed check is an internal error.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::chambers::{
    bounding_reflections, is_coxeter_polytope, parse_chamber_words, verify_tiling, verify_tiling_around, ChamberSet, PolytopeReport,
    Reflection, TilingReport,
};
use crate::criterion::{classify, five_five_three, ComponentType, Verdict};
use crate::diagrams::{divisibility_diagram, least_prime_divisor, CoxeterMatrix};
use crate::error::{Error, Result};
use crate::words::{CoxeterGroup, Word};

/// Which construction produced a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Provenance {
    /// Rotations of a six-chamber block around the vertex of a (5,5,3) triangle.
    #[serde(rename = "553-rotation")]
    Rotation553,
    /// A rank-2 residue with every neighbour of its even elements.
    #[serde(rename = "dihedral-star")]
    DihedralStar,
    /// The (5,5,3) rotation domain inside a larger component, thickened.
    #[serde(rename = "553-extended")]
    Extended553,
    /// A domain of one free factor, read in the whole group.
    #[serde(rename = "free-factor-lift")]
    FreeFactorLift,
}

impl Provenance {
    pub fn tag(self) -> &'static str {
        match self {
            Provenance::Rotation553 => "553-rotation",
            Provenance::DihedralStar => "dihedral-star",
            Provenance::Extended553 => "553-extended",
            Provenance::FreeFactorLift => "free-factor-lift",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Provenance::Rotation553,
            Provenance::DihedralStar,
            Provenance::Extended553,
            Provenance::FreeFactorLift,
        ]
        .into_iter()
        .find(|p| p.tag() == s)
        .ok_or_else(|| Error::Invalid(format!("unknown provenance `{s}`")))
    }
}

/// Outcome of the three checks on a candidate domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub polytope: PolytopeReport,
    /// Skipped when the set is not a Coxeter polytope.
    pub tiling: Option<TilingReport>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.polytope.is_polytope() && self.tiling.as_ref().is_some_and(TilingReport::is_tiling)
    }

    /// Human-readable first failure, if any.
    pub fn first_failure(&self) -> Option<String> {
        if let Some(c) = &self.polytope.convexity.counterexample {
            return Some(format!(
                "not convex: a geodesic gallery from {} to {} passes through {}, which is missing",
                c.from, c.to, c.missing
            ));
        }
        if let Some(v) = self.polytope.violations.first() {
            return Some(format!(
                "angle condition fails at chamber {} for pair ({}, {}): {} of the {} chambers of the residue{}",
                v.chamber,
                v.pair.0 + 1,
                v.pair.1 + 1,
                v.size,
                2 * v.order,
                if v.contiguous {
                    format!(", and {} does not divide {}", v.size, v.order)
                } else {
                    ", not contiguous".to_string()
                }
            ));
        }
        let t = self.tiling.as_ref()?;
        if let Some(x) = &t.uncovered {
            return Some(format!("translates miss chamber {x} in the {}", t.region));
        }
        t.doubly_covered
            .as_ref()
            .map(|x| format!("translates overlap at chamber {x} in the {}", t.region))
    }
}

/// Runs the polytope checks and, if they pass, the tiling check: over the
/// ball of the given radius, or over the residues around the set when no
/// radius is given.
pub fn verify_domain(group: &CoxeterGroup, set: &ChamberSet, radius: Option<usize>) -> Result<Verification> {
    let polytope = is_coxeter_polytope(group, set)?;
    let tiling = match (polytope.is_polytope(), radius) {
        (false, _) => None,
        (true, Some(r)) => Some(verify_tiling(group, set, r)?),
        (true, None) => Some(verify_tiling_around(group, set)?),
    };
    Ok(Verification { polytope, tiling })
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub system: CoxeterMatrix,
    pub chambers: ChamberSet,
    pub index: usize,
    pub generators: Vec<Reflection>,
    pub provenance: Provenance,
    pub verified: bool,
    pub tiling: TilingReport,
}

impl Certificate {
    /// The certificate file text.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "index {}\nprovenance {}\ngenerators {}\n",
            self.index,
            self.provenance,
            self.generators.len()
        );
        for r in &self.generators {
            out.push_str(&format!("{}\n", r.word));
        }
        out.push_str(&format!("chambers {}\n", self.chambers.len()));
        out.push_str(&self.chambers.to_text());
        out
    }
}

fn certify(group: &CoxeterGroup, chambers: ChamberSet, provenance: Provenance) -> Result<Certificate> {
    let check = verify_domain(group, &chambers, None)?;
    if !check.passed() {
        return Err(Error::Verification(format!(
            "{provenance} domain for {}: {}",
            group.matrix(),
            check.first_failure().unwrap_or_default()
        )));
    }
    Ok(Certificate {
        system: group.matrix().clone(),
        index: chambers.len(),
        generators: bounding_reflections(group, &chambers)?,
        chambers,
        provenance,
        verified: true,
        tiling: check.tiling.expect("checked above"),
    })
}

fn words(list: &[&[usize]], map: &[usize]) -> Vec<Word> {
    list.iter().map(|w| Word::new(w.iter().map(|&l| map[l] as u8).collect())).collect()
}

/// Roles `[s1, s2, s3]` in a (5,5,3) triangle: `s3` carries both 5-edges.
fn five_five_three_roles(system: &CoxeterMatrix) -> Result<[usize; 3]> {
    let d = divisibility_diagram(system);
    let t = five_five_three(&d).ok_or_else(|| Error::Hypothesis("labels must be (5,5,3)".into()))?;
    Ok([t[1], t[2], t[0]])
}

/// The union of the rotations `(s2 s1)^k P'`, `0 ≤ k < m12`, of the block
/// `P' = {e, s3, s1, s1 s3, s1 s3 s1, s1 s3 s2}` in a rank-3 system with
/// `m12 = 3k12` and `m13`, `m23` of least prime divisor 5.
///
/// Generator roles are read off the diagram: `s3` is the common vertex of
/// the two 5-edges, `s1` the lower-numbered of the other two.
pub fn construct_553(system: &CoxeterMatrix) -> Result<Certificate> {
    if system.rank() != 3 {
        return Err(Error::RankMismatch {
            expected: 3,
            actual: system.rank(),
        });
    }
    let group = CoxeterGroup::new(system.clone());
    let chambers = rotation_domain(&group, &[0, 1, 2])?;
    certify(&group, chambers, Provenance::Rotation553)
}

/// The rotation domain for the (5,5,3) triangle on generators `vertices` of `group`.
fn rotation_domain(group: &CoxeterGroup, vertices: &[usize; 3]) -> Result<ChamberSet> {
    let sub = group.matrix().restrict(vertices)?;
    let [a, b, c] = five_five_three_roles(&sub)?;
    let roles = [vertices[a], vertices[b], vertices[c]];
    let m12 = group
        .matrix()
        .order(roles[0], roles[1])
        .finite()
        .expect("simple edges are finite");
    debug_assert_eq!(least_prime_divisor(m12), 3);
    let block = words(&[&[], &[2], &[0], &[0, 2], &[0, 2, 0], &[0, 2, 1]], &roles);
    let rotation = words(&[&[1, 0]], &roles).remove(0);
    let mut s = group.session();
    let block: Vec<_> = block.iter().map(|w| s.eval(w)).collect::<Result<_>>()?;
    let rotation = s.eval(&rotation)?;
    let mut all = Vec::new();
    let mut r = crate::words::Elem::IDENTITY;
    for _ in 0..m12 {
        for &p in &block {
            all.push(s.mul(r, p)?);
        }
        r = s.mul(r, rotation)?;
    }
    let distinct: HashSet<_> = all.iter().copied().collect();
    if distinct.len() != 6 * m12 as usize {
        return Err(Error::Verification(format!(
            "rotations of the block overlap: {} distinct chambers, expected {}",
            distinct.len(),
            6 * m12
        )));
    }
    ChamberSet::from_elems(&s, &all)
}

/// For systems with at most one multiple edge. Takes the rank-2 residue of
/// the multiple edge (or of a simple edge, preferring small orders) and
/// adds every neighbour of its even-length elements. Degenerate cases: rank
/// 1 and systems without finite edges give `{e, s}`; a finite rank-2 system
/// gives the half-cycle `{e, s1, s1 s2, ...}` of `m` chambers.
pub fn construct_single_multiple_edge(system: &CoxeterMatrix) -> Result<Certificate> {
    let d = divisibility_diagram(system);
    if d.multiple_edges().count() > 1 {
        return Err(Error::Hypothesis("more than one multiple edge".into()));
    }
    let group = CoxeterGroup::new(system.clone());
    let n = system.rank();
    let edge = d.multiple_edges().next().or_else(|| {
        d.edges()
            .min_by_key(|&(i, j, _)| (system.order(i, j).finite(), i, j))
    });
    let mut s = group.session();
    let chambers = match edge {
        None => {
            drop(s);
            ChamberSet::new(&group, [Word::empty(), Word::generator(0)])?
        }
        Some((i, j, _)) => {
            let m = system.order(i, j).finite().expect("edges are finite") as usize;
            if n == 2 {
                let mut w = Word::empty();
                let mut list = vec![w.clone()];
                for k in 0..m - 1 {
                    w.push(if k % 2 == 0 { i } else { j });
                    list.push(w.clone());
                }
                drop(s);
                ChamberSet::new(&group, list)?
            } else {
                let residue = dihedral_elements(&mut s, i, j, m)?;
                let mut all = residue.clone();
                for &w in &residue {
                    if s.len(w).is_multiple_of(2) {
                        for g in 0..n {
                            all.push(s.mul_gen(w, g)?);
                        }
                    }
                }
                let set = ChamberSet::from_elems(&s, &all)?;
                drop(s);
                set
            }
        }
    };
    certify(&group, chambers, Provenance::DihedralStar)
}

fn dihedral_elements(
    s: &mut crate::words::Session<'_>,
    i: usize,
    j: usize,
    m: usize,
) -> Result<Vec<crate::words::Elem>> {
    let mut out = vec![crate::words::Elem::IDENTITY];
    for first in [i, j] {
        let mut w = crate::words::Elem::IDENTITY;
        let mut g = first;
        for _ in 0..m {
            w = s.mul_gen(w, g)?;
            out.push(w);
            g = if g == i { j } else { i };
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// For a component containing a (5,5,3) triangle with every other edge
/// simple. Builds the rotation domain of the triangle, arranged so that its
/// chambers with walls inside the triangle's subgroup have odd length, and
/// adds every neighbour of its even-length chambers.
pub fn construct_553_extended(system: &CoxeterMatrix) -> Result<Certificate> {
    let d = divisibility_diagram(system);
    let triangle = five_five_three(&d)
        .ok_or_else(|| Error::Hypothesis("no (5,5,3) triangle with all remaining edges simple".into()))?;
    if system.rank() == 3 {
        return construct_553(system);
    }
    let group = CoxeterGroup::new(system.clone());
    let base = rotation_domain(&group, &triangle)?;
    let mut s = group.session();
    let mut elems = base.elems(&mut s)?;
    let members: HashSet<_> = elems.iter().copied().collect();
    let mut boundary_parity = HashSet::new();
    for &w in &elems {
        for &g in &triangle {
            if !members.contains(&s.mul_gen(w, g)?) {
                boundary_parity.insert(s.len(w) % 2);
            }
        }
    }
    match boundary_parity.len() {
        1 if boundary_parity.contains(&1) => {}
        1 => {
            // a generator inside the domain: its translate still contains e
            let flip = triangle
                .iter()
                .copied()
                .find(|&g| base.contains(&Word::generator(g)))
                .expect("the rotation block contains two generators");
            elems = elems
                .into_iter()
                .map(|w| s.left_mul_gen(flip, w))
                .collect::<Result<_>>()?;
        }
        _ => {
            return Err(Error::Verification(
                "boundary chambers of the rotation domain have mixed parity".into(),
            ))
        }
    }
    let mut all = elems.clone();
    for &w in &elems {
        if s.len(w).is_multiple_of(2) {
            for g in 0..system.rank() {
                all.push(s.mul_gen(w, g)?);
            }
        }
    }
    let chambers = ChamberSet::from_elems(&s, &all)?;
    drop(s);
    certify(&group, chambers, Provenance::Extended553)
}

/// Reads a domain of the special subgroup on `vertices` (words in the
/// subgroup's own letters) as a chamber set of the whole group and checks it
/// again there.
pub fn construct_free_product_lift(
    system: &CoxeterMatrix,
    component: &Certificate,
    vertices: &[usize],
) -> Result<Certificate> {
    if !component.verified {
        return Err(Error::Hypothesis("component certificate is not verified".into()));
    }
    if component.system.rank() != vertices.len() {
        return Err(Error::RankMismatch {
            expected: vertices.len(),
            actual: component.system.rank(),
        });
    }
    let group = CoxeterGroup::new(system.clone());
    let lifted = component.chambers.members().iter().map(|w| w.relabel(vertices));
    let chambers = ChamberSet::new(&group, lifted)?;
    let cert = certify(&group, chambers, Provenance::FreeFactorLift)?;
    if cert.index != component.index {
        return Err(Error::Verification("lift changed the index".into()));
    }
    Ok(cert)
}

#[derive(Clone, Debug)]
pub enum Construction {
    Certificate(Box<Certificate>),
    NoSubgroup(Verdict),
}

fn construct_connected(system: &CoxeterMatrix, kind: ComponentType) -> Result<Certificate> {
    match kind {
        ComponentType::SmallComponent | ComponentType::SingleMultipleEdge => construct_single_multiple_edge(system),
        ComponentType::FiveFiveThreePattern => construct_553_extended(system),
    }
}

/// Classifies, then builds a domain on the first component that admits one,
/// lifting it to the whole group when that component is proper.
pub fn construct(system: &CoxeterMatrix) -> Result<Construction> {
    let verdict = classify(system);
    let Verdict::HasSubgroup { vertices, kind, .. } = &verdict else {
        return Ok(Construction::NoSubgroup(verdict));
    };
    let cert = if vertices.len() == system.rank() {
        construct_connected(system, *kind)?
    } else {
        let sub = system.restrict(vertices)?;
        let local = construct_connected(&sub, *kind)?;
        construct_free_product_lift(system, &local, vertices)?
    };
    Ok(Construction::Certificate(Box::new(cert)))
}

/// A certificate as read from a file, before any checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateFile {
    pub index: usize,
    pub provenance: Provenance,
    pub generators: Vec<Word>,
    pub chambers: Vec<Word>,
}

fn header(lines: &mut impl Iterator<Item = (usize, String)>, key: &str) -> Result<(usize, String)> {
    let (line, text) = lines.next().ok_or_else(|| Error::Syntax {
        line: 0,
        column: 1,
        message: format!("missing `{key}` line"),
    })?;
    let mut parts = text.splitn(2, char::is_whitespace);
    if parts.next() != Some(key) {
        return Err(Error::Syntax {
            line,
            column: 1,
            message: format!("expected `{key} <value>`"),
        });
    }
    Ok((line, parts.next().unwrap_or("").trim().to_string()))
}

fn count(line: usize, value: &str) -> Result<usize> {
    value.parse().map_err(|_| Error::Syntax {
        line,
        column: 1,
        message: format!("expected a count, found `{value}`"),
    })
}

fn word_block(lines: &mut impl Iterator<Item = (usize, String)>, n: usize, what: &str) -> Result<Vec<Word>> {
    let mut text = String::new();
    for _ in 0..n {
        let (_, l) = lines.next().ok_or_else(|| Error::Syntax {
            line: 0,
            column: 1,
            message: format!("too few {what} words"),
        })?;
        text.push_str(&l);
        text.push('\n');
    }
    parse_chamber_words(&text)
}

impl CertificateFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim().to_string()))
            .filter(|(_, l)| !l.is_empty());
        let (line, v) = header(&mut lines, "index")?;
        let index = count(line, &v)?;
        let (line, v) = header(&mut lines, "provenance")?;
        let provenance = v.parse().map_err(|e: Error| Error::Syntax {
            line,
            column: 12,
            message: e.to_string(),
        })?;
        let (line, v) = header(&mut lines, "generators")?;
        let generators = word_block(&mut lines, count(line, &v)?, "generator")?;
        let (line, v) = header(&mut lines, "chambers")?;
        let chambers = word_block(&mut lines, count(line, &v)?, "chamber")?;
        if let Some((line, _)) = lines.next() {
            return Err(Error::Syntax {
                line,
                column: 1,
                message: "unexpected trailing content".into(),
            });
        }
        Ok(CertificateFile {
            index,
            provenance,
            generators,
            chambers,
        })
    }
}

/// Result of checking an untrusted certificate.
#[derive(Clone, Debug)]
pub struct CertificateCheck {
    pub problems: Vec<String>,
    pub verification: Option<Verification>,
}

impl CertificateCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Re-derives everything a certificate claims: its words fit the system,
/// the chambers are distinct and contain `e`, the index and generator list
/// match, and the chambers form a Coxeter polytope whose translates tile the
/// ball of the given radius (or the residues around it, without a radius).
pub fn check_certificate(
    system: &CoxeterMatrix,
    cert: &CertificateFile,
    radius: Option<usize>,
) -> Result<CertificateCheck> {
    let mut problems = Vec::new();
    let rank = system.rank();
    for w in cert.generators.iter().chain(&cert.chambers) {
        if let Some(l) = w.max_letter().filter(|&l| l >= rank) {
            problems.push(format!("word {w} uses generator {} but the system has rank {rank}", l + 1));
        }
    }
    if !problems.is_empty() {
        return Ok(CertificateCheck {
            problems,
            verification: None,
        });
    }
    let group = CoxeterGroup::new(system.clone());
    let mut seen = HashSet::new();
    for w in &cert.chambers {
        let nf = group.normal_form(w)?;
        if !seen.insert(nf.clone()) {
            problems.push(format!("chamber {w} listed twice (normal form {nf})"));
        }
    }
    let chambers = match ChamberSet::new(&group, cert.chambers.iter().cloned()) {
        Ok(c) => c,
        Err(e) => {
            problems.push(e.to_string());
            return Ok(CertificateCheck {
                problems,
                verification: None,
            });
        }
    };
    if cert.index != chambers.len() {
        problems.push(format!(
            "declared index {} but {} distinct chambers",
            cert.index,
            chambers.len()
        ));
    }
    let walls: HashSet<Word> = bounding_reflections(&group, &chambers)?.into_iter().map(|r| r.word).collect();
    let mut claimed = HashSet::new();
    for g in &cert.generators {
        claimed.insert(group.normal_form(g)?);
    }
    if walls != claimed {
        let missing = walls.difference(&claimed).count();
        let extra = claimed.difference(&walls).count();
        problems.push(format!(
            "generator list does not match the walls of the chambers ({missing} missing, {extra} extra)"
        ));
    }
    let minimum = crate::chambers::minimum_tiling_radius(&chambers);
    let verification = if let Some(r) = radius.filter(|&r| r < minimum) {
        problems.push(format!("radius {r} too small: at least {minimum} is required"));
        None
    } else {
        let v = verify_domain(&group, &chambers, radius)?;
        if let Some(f) = v.first_failure() {
            problems.push(f);
        }
        Some(v)
    };
    Ok(CertificateCheck { problems, verification })
}
