//! Which odd-angled Coxeter systems have a proper finite-index reflection
//! subgroup, read off the divisibility diagram.
//!
//! A system has one iff some connected component `C` of its diagram is of
//! one of three types: `|C| ≤ 2`; `C` has at most one multiple edge; or `C`
//! contains a triangle labelled (5,5,3) and every other edge of `C` is simple.
//!
//! A second, independent classifier ([`known_obstruction`]) searches for the
//! explicit obstruction shapes directly; [`cross_check_classifiers`] compares
//! the two exhaustively.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagrams::{
    connected_components, divisibility_diagram, enumerate_connected_subdiagrams, CoxeterMatrix,
    DivisibilityDiagram,
};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentType {
    /// One or two vertices.
    SmallComponent,
    /// At most one multiple edge.
    SingleMultipleEdge,
    /// A (5,5,3) triangle, everything else simple.
    FiveFiveThreePattern,
}

impl ComponentType {
    pub fn number(self) -> u8 {
        match self {
            ComponentType::SmallComponent => 1,
            ComponentType::SingleMultipleEdge => 2,
            ComponentType::FiveFiveThreePattern => 3,
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ComponentType::SmallComponent => "component of order at most 2",
            ComponentType::SingleMultipleEdge => "at most one multiple edge",
            ComponentType::FiveFiveThreePattern => "(5,5,3) pattern",
        }
    }
}

/// An induced subdiagram: sorted vertices and the labels of their pairs in
/// row-major order (`None` for absent edges).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Subdiagram {
    pub vertices: Vec<usize>,
    pub labels: Vec<Option<u32>>,
}

impl Subdiagram {
    fn of(d: &DivisibilityDiagram, local: &[usize], global: &[usize]) -> Self {
        let mut labels = Vec::new();
        for a in 0..local.len() {
            for b in a + 1..local.len() {
                labels.push(d.label(local[a], local[b]));
            }
        }
        Subdiagram {
            vertices: local.iter().map(|&v| global[v]).collect(),
            labels,
        }
    }

    /// Labels as text, e.g. `(5,5,inf)`.
    pub fn labels_text(&self) -> String {
        let parts: Vec<String> = self
            .labels
            .iter()
            .map(|l| l.map_or_else(|| "inf".to_string(), |p| p.to_string()))
            .collect();
        format!("({})", parts.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "answer", rename_all = "kebab-case")]
pub enum Verdict {
    HasSubgroup {
        /// Index of the witnessing component, components ordered by least vertex.
        component: usize,
        vertices: Vec<usize>,
        kind: ComponentType,
        /// The (5,5,3) triangle, apex of the two 5-edges first.
        triangle: Option<[usize; 3]>,
    },
    NoSubgroup {
        /// One minimal obstruction per component.
        forbidden: Vec<Subdiagram>,
    },
}

impl Verdict {
    pub fn has_subgroup(&self) -> bool {
        matches!(self, Verdict::HasSubgroup { .. })
    }
}

/// A (5,5,3) triangle `[apex, a, b]`, apex carrying both 5-edges, such that
/// every other edge of `c` is simple.
pub fn five_five_three(c: &DivisibilityDiagram) -> Option<[usize; 3]> {
    let n = c.order();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                let Some(apex) = five_five_three_apex(c, x, y, z) else {
                    continue;
                };
                let rest_simple = c.edges().all(|(i, j, l)| {
                    let inside = [x, y, z].contains(&i) && [x, y, z].contains(&j);
                    inside || l == 3
                });
                if rest_simple {
                    let mut others = [x, y, z].into_iter().filter(|&v| v != apex);
                    return Some([apex, others.next().unwrap(), others.next().unwrap()]);
                }
            }
        }
    }
    None
}

fn five_five_three_apex(c: &DivisibilityDiagram, x: usize, y: usize, z: usize) -> Option<usize> {
    let (xy, xz, yz) = (c.label(x, y), c.label(x, z), c.label(y, z));
    match (xy, xz, yz) {
        (Some(5), Some(5), Some(3)) => Some(x),
        (Some(5), Some(3), Some(5)) => Some(y),
        (Some(3), Some(5), Some(5)) => Some(z),
        _ => None,
    }
}

fn component_type(c: &DivisibilityDiagram) -> Option<(ComponentType, Option<[usize; 3]>)> {
    if c.order() <= 2 {
        return Some((ComponentType::SmallComponent, None));
    }
    if c.multiple_edges().count() <= 1 {
        return Some((ComponentType::SingleMultipleEdge, None));
    }
    five_five_three(c).map(|t| (ComponentType::FiveFiveThreePattern, Some(t)))
}

fn has_subgroup(c: &DivisibilityDiagram) -> bool {
    component_type(c).is_some()
}

/// Classifies a connected diagram.
pub fn classify_component(c: &DivisibilityDiagram) -> Verdict {
    let all: Vec<usize> = (0..c.order()).collect();
    match component_type(c) {
        Some((kind, triangle)) => Verdict::HasSubgroup {
            component: 0,
            vertices: all,
            kind,
            triangle,
        },
        None => {
            let f = find_minimal_forbidden(c).expect("a failing component has a minimal failing subdiagram");
            Verdict::NoSubgroup {
                forbidden: vec![Subdiagram::of(c, &f, &all)],
            }
        }
    }
}

/// A system has a subgroup iff one of its components does; the first such
/// component is reported.
pub fn classify(system: &CoxeterMatrix) -> Verdict {
    let d = divisibility_diagram(system);
    let mut forbidden = Vec::new();
    for (k, (vertices, c)) in connected_components(&d).into_iter().enumerate() {
        if let Some((kind, triangle)) = component_type(&c) {
            return Verdict::HasSubgroup {
                component: k,
                triangle: triangle.map(|t| t.map(|v| vertices[v])),
                vertices,
                kind,
            };
        }
        let f = find_minimal_forbidden(&c).expect("a failing component has a minimal failing subdiagram");
        forbidden.push(Subdiagram::of(&c, &f, &vertices));
    }
    Verdict::NoSubgroup { forbidden }
}

/// The first connected induced subdiagram (smallest order, then
/// lexicographic) without a subgroup, all of whose proper connected induced
/// subdiagrams have one.
pub fn find_minimal_forbidden(c: &DivisibilityDiagram) -> Option<Vec<usize>> {
    // Scanning by increasing order, the first failure is automatically minimal.
    enumerate_connected_subdiagrams(c, c.order()).find(|s| !has_subgroup(&c.induced(s)))
}

/// Obstruction shapes, each known to have no finite-index reflection subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Obstruction {
    /// Finite triangle with two or more multiple edges, other than (5,5,3).
    Triangle,
    /// Two multiple edges at a vertex, the opposite pair absent.
    OpenMultiplePath,
    /// Three 5-edges at a vertex, leaves pairwise simple.
    FiveStar,
    /// Path of three finite edges whose end edges are multiple.
    FourPath,
    /// Chain of length at least 5: multiple end edges, simple inner edges,
    /// optional simple chords skipping the first or last inner vertex.
    LongChain,
}

/// Whether the whole of `d` is one of the obstruction shapes.
pub fn obstruction_shape(d: &DivisibilityDiagram) -> Option<Obstruction> {
    match d.order() {
        3 => {
            let labels = [d.label(0, 1), d.label(0, 2), d.label(1, 2)];
            let multiple = labels.iter().filter(|l| matches!(l, Some(p) if *p >= 5)).count();
            let absent = labels.iter().filter(|l| l.is_none()).count();
            if absent == 0 && multiple >= 2 && five_five_three_apex(d, 0, 1, 2).is_none() {
                Some(Obstruction::Triangle)
            } else if absent == 1 && multiple == 2 {
                Some(Obstruction::OpenMultiplePath)
            } else {
                None
            }
        }
        4 => {
            let star = (0..4).any(|x| {
                let leaves: Vec<usize> = (0..4).filter(|&y| y != x).collect();
                leaves.iter().all(|&y| d.label(x, y) == Some(5))
                    && (0..3).all(|a| (a + 1..3).all(|b| d.is_simple(leaves[a], leaves[b])))
            });
            if star {
                return Some(Obstruction::FiveStar);
            }
            let path = permutations4().into_iter().any(|[a, b, c, e]| {
                d.is_multiple(a, b) && d.label(b, c).is_some() && d.is_multiple(c, e)
            });
            path.then_some(Obstruction::FourPath)
        }
        n if n >= 5 => long_chain(d).then_some(Obstruction::LongChain),
        _ => None,
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for e in 0..4 {
                    if a != b && a != c && a != e && b != c && b != e && c != e {
                        out.push([a, b, c, e]);
                    }
                }
            }
        }
    }
    out
}

fn long_chain(d: &DivisibilityDiagram) -> bool {
    let n = d.order();
    // the pair (v_q, v_p), 0-based positions q < p, is allowed to carry `label`
    let allowed = |q: usize, p: usize, label: Option<u32>| -> bool {
        let simple = label == Some(3);
        let multiple = matches!(label, Some(l) if l >= 5);
        if p == q + 1 {
            if q == 0 || p == n - 1 {
                multiple
            } else {
                simple
            }
        } else if p == q + 2 && (q == 0 || p == n - 1) {
            simple || label.is_none()
        } else {
            label.is_none()
        }
    };
    fn grow(
        d: &DivisibilityDiagram,
        order: &mut Vec<usize>,
        used: &mut [bool],
        allowed: &dyn Fn(usize, usize, Option<u32>) -> bool,
    ) -> bool {
        let p = order.len();
        if p == d.order() {
            return true;
        }
        for v in 0..d.order() {
            if used[v] {
                continue;
            }
            if order.iter().enumerate().all(|(q, &u)| allowed(q, p, d.label(u, v))) {
                used[v] = true;
                order.push(v);
                if grow(d, order, used, allowed) {
                    return true;
                }
                order.pop();
                used[v] = false;
            }
        }
        false
    }
    grow(d, &mut Vec::new(), &mut vec![false; n], &allowed)
}

/// The first connected induced subdiagram (by order, then lexicographic)
/// that is an obstruction shape.
pub fn known_obstruction(c: &DivisibilityDiagram) -> Option<(Vec<usize>, Obstruction)> {
    enumerate_connected_subdiagrams(c, c.order())
        .filter(|s| s.len() >= 3)
        .find_map(|s| obstruction_shape(&c.induced(&s)).map(|o| (s, o)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub diagram: String,
    pub classifier: bool,
    pub minimal_forbidden: Option<Vec<usize>>,
    pub obstruction: Option<(Vec<usize>, Obstruction)>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CrossCheckReport {
    pub max_rank: usize,
    pub labels: Vec<u32>,
    /// Connected diagrams examined.
    pub checked: u64,
    pub has_subgroup: u64,
    pub no_subgroup: u64,
    pub disagreement_count: u64,
    /// The first few disagreements.
    pub disagreements: Vec<Disagreement>,
}

/// Default cap on the number of labelled diagrams a cross-check may visit.
pub const CROSS_CHECK_BUDGET: u64 = 50_000_000;

const KEPT_DISAGREEMENTS: usize = 20;

/// Exhaustively compares, on every connected labelled diagram of order at
/// most `max_rank` with edge labels from `labels` or absent:
/// the three-type classifier, the existence of a minimal failing
/// subdiagram, and the direct obstruction search. Also checks that every
/// minimal failing subdiagram is itself an obstruction shape and that no
/// diagram with a subgroup contains a connected subdiagram without one.
pub fn cross_check_classifiers(max_rank: usize, labels: &[u32]) -> Result<CrossCheckReport> {
    let mut labels = labels.to_vec();
    labels.sort_unstable();
    labels.dedup();
    for &l in &labels {
        if l < 3 || crate::diagrams::least_prime_divisor(l) != l {
            return Err(Error::Invalid(format!("label {l} is not an odd prime")));
        }
    }
    let alphabet: Vec<Option<u32>> = labels.iter().map(|&l| Some(l)).chain([None]).collect();
    let mut total_budget = 0u64;
    for n in 1..=max_rank {
        let pairs = (n * (n - 1) / 2) as u32;
        let count = (alphabet.len() as u64)
            .checked_pow(pairs)
            .filter(|&c| c <= CROSS_CHECK_BUDGET)
            .ok_or(Error::BudgetExceeded {
                what: "classifier cross-check",
                budget: CROSS_CHECK_BUDGET as usize,
            })?;
        total_budget += count;
    }
    if total_budget > CROSS_CHECK_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "classifier cross-check",
            budget: CROSS_CHECK_BUDGET as usize,
        });
    }

    let mut report = CrossCheckReport {
        max_rank,
        labels: labels.clone(),
        checked: 0,
        has_subgroup: 0,
        no_subgroup: 0,
        disagreement_count: 0,
        disagreements: Vec::new(),
    };
    for n in 1..=max_rank {
        let pairs = n * (n - 1) / 2;
        let count = (alphabet.len() as u64).pow(pairs as u32);
        let partial = (0..count)
            .into_par_iter()
            .filter_map(|code| {
                let mut code = code;
                let labels = (0..pairs).map(|_| {
                    let l = alphabet[(code % alphabet.len() as u64) as usize];
                    code /= alphabet.len() as u64;
                    l
                });
                let d = DivisibilityDiagram::from_labels(n, labels).expect("alphabet labels are valid");
                d.is_connected().then(|| check_one(&d))
            })
            .fold(Tally::default, Tally::add)
            .reduce(Tally::default, Tally::merge);
        report.checked += partial.checked;
        report.has_subgroup += partial.has;
        report.no_subgroup += partial.checked - partial.has;
        report.disagreement_count += partial.disagreement_count;
        report.disagreements.extend(partial.disagreements);
    }
    report.disagreements.truncate(KEPT_DISAGREEMENTS);
    Ok(report)
}

#[derive(Default)]
struct Tally {
    checked: u64,
    has: u64,
    disagreement_count: u64,
    disagreements: Vec<Disagreement>,
}

impl Tally {
    fn add(mut self, (has, problem): (bool, Option<Disagreement>)) -> Self {
        self.checked += 1;
        self.has += has as u64;
        if let Some(p) = problem {
            self.disagreement_count += 1;
            if self.disagreements.len() < KEPT_DISAGREEMENTS {
                self.disagreements.push(p);
            }
        }
        self
    }

    fn merge(mut self, other: Self) -> Self {
        self.checked += other.checked;
        self.has += other.has;
        self.disagreement_count += other.disagreement_count;
        self.disagreements.extend(other.disagreements);
        self.disagreements.truncate(KEPT_DISAGREEMENTS);
        self
    }
}

fn check_one(d: &DivisibilityDiagram) -> (bool, Option<Disagreement>) {
    let has = has_subgroup(d);
    let minimal = find_minimal_forbidden(d);
    let obstruction = known_obstruction(d);
    let mut notes = Vec::new();
    if has == minimal.is_some() {
        notes.push("classifier and minimal-subdiagram search disagree");
    }
    if has == obstruction.is_some() {
        notes.push("classifier and obstruction search disagree");
    }
    if let Some(m) = &minimal {
        if obstruction_shape(&d.induced(m)).is_none() {
            notes.push("minimal failing subdiagram is not an obstruction shape");
        }
    }
    if has {
        let broken = enumerate_connected_subdiagrams(d, d.order()).any(|s| !has_subgroup(&d.induced(&s)));
        if broken {
            notes.push("a connected subdiagram fails while the whole diagram passes");
        }
    }
    let problem = (!notes.is_empty()).then(|| Disagreement {
        diagram: d.to_string(),
        classifier: has,
        minimal_forbidden: minimal,
        obstruction,
        note: notes.join("; "),
    });
    (has, problem)
}
