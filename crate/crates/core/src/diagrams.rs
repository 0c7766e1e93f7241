//! Odd-angled Coxeter matrices and their divisibility diagrams.
//!
//! Generators are 0-based inside the library. Every textual form (the matrix
//! file format, `Display` impls, word literals) is 1-based.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest finite order accepted anywhere.
pub const MAX_ORDER: u32 = 1_000_000;
/// Largest supported rank (descent sets are `u64` bitmasks).
pub const MAX_RANK: usize = 64;

/// Order of a product `s_i s_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Order {
    Finite(u32),
    Infinite,
}

pub const INF: Order = Order::Infinite;

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(m) => Some(m),
            Order::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Order::Infinite
    }
}

impl From<u32> for Order {
    fn from(m: u32) -> Self {
        Order::Finite(m)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(m) => write!(f, "{m}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// Index of the unordered pair `{i, j}` (i != j) in row-major upper-triangular storage.
pub(crate) fn pair_index(rank: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < rank && i != j);
    i * (2 * rank - i - 1) / 2 + (j - i - 1)
}

fn check_rank(rank: usize) -> Result<()> {
    if rank == 0 || rank > MAX_RANK {
        return Err(Error::UnsupportedRank(rank));
    }
    Ok(())
}

fn is_valid_odd_order(m: u32) -> bool {
    m >= 3 && m % 2 == 1 && m <= MAX_ORDER
}

/// Symmetric Coxeter matrix of an odd-angled system. Only the strict upper
/// triangle is stored; the diagonal is implicitly 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoxeterMatrix {
    rank: usize,
    upper: Vec<Order>,
}

impl CoxeterMatrix {
    /// The free product of `rank` copies of Z/2: every pair has infinite order.
    pub fn free(rank: usize) -> Result<Self> {
        check_rank(rank)?;
        Ok(Self {
            rank,
            upper: vec![Order::Infinite; rank * (rank - 1) / 2],
        })
    }

    /// Builds a matrix from its strict upper triangle in row-major order,
    /// i.e. `m12, m13, ..., m1n, m23, ...`.
    pub fn from_upper(rank: usize, orders: impl IntoIterator<Item = Order>) -> Result<Self> {
        let mut matrix = Self::free(rank)?;
        let orders: Vec<Order> = orders.into_iter().collect();
        if orders.len() != matrix.upper.len() {
            return Err(Error::Invalid(format!(
                "rank {rank} needs {} pair orders, got {}",
                matrix.upper.len(),
                orders.len()
            )));
        }
        for (i, j) in (0..rank).tuple_combinations() {
            matrix.set(i, j, orders[pair_index(rank, i, j)])?;
        }
        Ok(matrix)
    }

    /// Rank-3 system from `(m12, m13, m23)`.
    pub fn triangle(m12: impl Into<Order>, m13: impl Into<Order>, m23: impl Into<Order>) -> Result<Self> {
        Self::from_upper(3, [m12.into(), m13.into(), m23.into()])
    }

    pub fn set(&mut self, i: usize, j: usize, order: Order) -> Result<()> {
        for g in [i, j] {
            if g >= self.rank {
                return Err(Error::GeneratorOutOfRange {
                    generator: g,
                    rank: self.rank,
                });
            }
        }
        if i == j {
            return Err(Error::Invalid("diagonal entries are fixed to 1".into()));
        }
        if let Order::Finite(m) = order {
            if !is_valid_odd_order(m) {
                return Err(Error::NotOddAngled {
                    line: 0,
                    i: i.min(j) + 1,
                    j: i.max(j) + 1,
                    value: m as u64,
                });
            }
        }
        let idx = pair_index(self.rank, i, j);
        self.upper[idx] = order;
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self, i: usize, j: usize) -> Order {
        if i == j {
            Order::Finite(1)
        } else {
            self.upper[pair_index(self.rank, i, j)]
        }
    }

    /// The Coxeter matrix of the special subgroup generated by `vertices`,
    /// re-indexed in the order given.
    pub fn restrict(&self, vertices: &[usize]) -> Result<Self> {
        let mut sub = Self::free(vertices.len())?;
        for (a, b) in (0..vertices.len()).tuple_combinations() {
            sub.set(a, b, self.order(vertices[a], vertices[b]))?;
        }
        Ok(sub)
    }

    /// Serializes in the line-oriented input format, declaring only finite pairs.
    pub fn to_text(&self) -> String {
        let mut out = format!("rank {}\n", self.rank);
        for (i, j) in (0..self.rank).tuple_combinations() {
            if let Order::Finite(m) = self.order(i, j) {
                out.push_str(&format!("m {} {} {}\n", i + 1, j + 1, m));
            }
        }
        out
    }
}

impl fmt::Display for CoxeterMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {} (", self.rank)?;
        let mut first = true;
        for (i, j) in (0..self.rank).tuple_combinations() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "m{}{}={}", i + 1, j + 1, self.order(i, j))?;
        }
        f.write_str(")")
    }
}

/// Tokens of one line with their 1-based starting columns; comments stripped.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let content = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut out = Vec::new();
    let mut start = None;
    for (idx, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &content[s..idx]));
            }
        } else if start.is_none() {
            start = Some(idx);
        }
    }
    if let Some(s) = start {
        out.push((s, &content[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (content[..byte].chars().count() + 1, tok))
        .collect()
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn parse_index(line: usize, (column, tok): (usize, &str), rank: usize) -> Result<usize> {
    let value: usize = tok
        .parse()
        .map_err(|_| syntax(line, column, format!("expected a vertex index, found `{tok}`")))?;
    if value == 0 || value > rank {
        return Err(Error::IndexOutOfRange {
            line,
            index: value,
            rank,
        });
    }
    Ok(value - 1)
}

/// Parses the line-oriented matrix format:
///
/// ```text
/// # comment
/// rank 3
/// m 1 2 3
/// m 1 3 inf
/// ```
///
/// Undeclared pairs default to `inf`.
pub fn parse_coxeter_matrix(text: &str) -> Result<CoxeterMatrix> {
    let mut matrix: Option<CoxeterMatrix> = None;
    let mut declared = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let Some(m) = matrix.as_mut() else {
            let (col, head) = toks[0];
            if head != "rank" {
                return Err(syntax(line, col, format!("expected `rank`, found `{head}`")));
            }
            if toks.len() != 2 {
                let col = toks.get(2).map_or(col + head.len(), |t| t.0);
                return Err(syntax(line, col, "expected `rank <n>`"));
            }
            let (col, tok) = toks[1];
            let rank: usize = tok
                .parse()
                .map_err(|_| syntax(line, col, format!("expected a positive rank, found `{tok}`")))?;
            if rank == 0 || rank > MAX_RANK {
                return Err(syntax(
                    line,
                    col,
                    format!("rank must be between 1 and {MAX_RANK}, found {rank}"),
                ));
            }
            declared = vec![false; rank * (rank - 1) / 2];
            matrix = Some(CoxeterMatrix::free(rank)?);
            continue;
        };
        let (col, head) = toks[0];
        if head != "m" {
            return Err(syntax(line, col, format!("expected `m`, found `{head}`")));
        }
        if toks.len() != 4 {
            let col = toks.get(4).map_or(col, |t| t.0);
            return Err(syntax(line, col, "expected `m <i> <j> <order>`"));
        }
        let rank = m.rank();
        let i = parse_index(line, toks[1], rank)?;
        let j = parse_index(line, toks[2], rank)?;
        if i == j {
            return Err(syntax(line, toks[2].0, "a pair needs two distinct vertices"));
        }
        let (vcol, vtok) = toks[3];
        let order = if vtok == "inf" {
            Order::Infinite
        } else {
            let value: u64 = vtok
                .parse()
                .map_err(|_| syntax(line, vcol, format!("expected an odd order or `inf`, found `{vtok}`")))?;
            if value < 3 || value.is_multiple_of(2) {
                return Err(Error::NotOddAngled {
                    line,
                    i: i.min(j) + 1,
                    j: i.max(j) + 1,
                    value,
                });
            }
            if value > MAX_ORDER as u64 {
                return Err(Error::OrderTooLarge {
                    line,
                    value,
                    max: MAX_ORDER,
                });
            }
            Order::Finite(value as u32)
        };
        let idx = pair_index(rank, i, j);
        if declared[idx] {
            return Err(Error::DuplicatePair {
                line,
                i: i.min(j) + 1,
                j: i.max(j) + 1,
            });
        }
        declared[idx] = true;
        m.set(i, j, order)?;
    }
    matrix.ok_or_else(|| syntax(text.lines().count().max(1), 1, "missing `rank` line"))
}

impl FromStr for CoxeterMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_coxeter_matrix(s)
    }
}

/// Smallest prime dividing `n` (for `n >= 2`).
pub fn least_prime_divisor(n: u32) -> u32 {
    assert!(n >= 2, "least_prime_divisor needs n >= 2");
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n.is_multiple_of(p) {
            return p;
        }
        p += 2;
    }
    n
}

fn is_prime(n: u32) -> bool {
    n >= 2 && least_prime_divisor(n) == n
}

/// Graph on the generators; finite pairs are joined by an edge labelled with
/// the least prime divisor of their order. Label 3 is a simple edge, larger
/// labels are multiple edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisibilityDiagram {
    order: usize,
    labels: Vec<Option<u32>>,
}

impl DivisibilityDiagram {
    /// Builds a diagram from its strict upper triangle of labels (`None` = absent).
    pub fn from_labels(order: usize, labels: impl IntoIterator<Item = Option<u32>>) -> Result<Self> {
        check_rank(order)?;
        let labels: Vec<Option<u32>> = labels.into_iter().collect();
        if labels.len() != order * (order - 1) / 2 {
            return Err(Error::Invalid(format!(
                "order {order} needs {} labels, got {}",
                order * (order - 1) / 2,
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().flatten().find(|&&l| l < 3 || !is_prime(l)) {
            return Err(Error::Invalid(format!("edge label {bad} is not an odd prime")));
        }
        Ok(Self { order, labels })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn label(&self, i: usize, j: usize) -> Option<u32> {
        if i == j {
            None
        } else {
            self.labels[pair_index(self.order, i, j)]
        }
    }

    pub fn is_simple(&self, i: usize, j: usize) -> bool {
        self.label(i, j) == Some(3)
    }

    pub fn is_multiple(&self, i: usize, j: usize) -> bool {
        matches!(self.label(i, j), Some(l) if l > 3)
    }

    /// All present edges `(i, j, label)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.order)
            .tuple_combinations()
            .filter_map(move |(i, j)| self.label(i, j).map(|l| (i, j, l)))
    }

    pub fn multiple_edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        self.edges().filter(|&(_, _, l)| l > 3)
    }

    /// Full subdiagram on `vertices`, re-indexed in the order given.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let k = vertices.len();
        let labels = (0..k)
            .tuple_combinations()
            .map(|(a, b)| self.label(vertices[a], vertices[b]))
            .collect();
        Self { order: k, labels }
    }

    fn neighbour_mask(&self, v: usize) -> u64 {
        (0..self.order)
            .filter(|&u| self.label(u, v).is_some())
            .fold(0u64, |acc, u| acc | 1 << u)
    }

    /// Whether the full subdiagram on `vertices` is connected (the empty set is not).
    pub fn is_connected_subset(&self, vertices: &[usize]) -> bool {
        let Some(&start) = vertices.first() else {
            return false;
        };
        let wanted = vertices.iter().fold(0u64, |acc, &v| acc | 1 << v);
        let mut seen = 1u64 << start;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let mut fresh = self.neighbour_mask(v) & wanted & !seen;
            seen |= fresh;
            while fresh != 0 {
                let u = fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                stack.push(u);
            }
        }
        seen == wanted
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_subset(&(0..self.order).collect::<Vec<_>>())
    }
}

impl fmt::Display for DivisibilityDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order {} [", self.order)?;
        let mut first = true;
        for (i, j, l) in self.edges() {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "{}-{}:{}", i + 1, j + 1, l)?;
        }
        f.write_str("]")
    }
}

pub fn divisibility_diagram(m: &CoxeterMatrix) -> DivisibilityDiagram {
    let n = m.rank();
    let labels = (0..n)
        .tuple_combinations()
        .map(|(i, j)| m.order(i, j).finite().map(least_prime_divisor))
        .collect();
    DivisibilityDiagram { order: n, labels }
}

/// Maximal connected pieces, ordered by their smallest vertex, with the
/// induced subdiagram of each.
pub fn connected_components(d: &DivisibilityDiagram) -> Vec<(Vec<usize>, DivisibilityDiagram)> {
    let mut assigned = 0u64;
    let mut out = Vec::new();
    for start in 0..d.order() {
        if assigned & (1 << start) != 0 {
            continue;
        }
        let mut comp = 1u64 << start;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            let mut fresh = d.neighbour_mask(v) & !comp;
            comp |= fresh;
            while fresh != 0 {
                let u = fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                stack.push(u);
            }
        }
        assigned |= comp;
        let vertices: Vec<usize> = (0..d.order()).filter(|&v| comp & (1 << v) != 0).collect();
        let sub = d.induced(&vertices);
        out.push((vertices, sub));
    }
    out
}

/// Every vertex subset of size at most `max_order` whose full subdiagram is
/// connected, smallest size first and lexicographic within a size.
pub fn enumerate_connected_subdiagrams(
    d: &DivisibilityDiagram,
    max_order: usize,
) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = d.order();
    (1..=max_order.min(n)).flat_map(move |k| {
        (0..n)
            .combinations(k)
            .filter(move |subset| d.is_connected_subset(subset))
    })
}
