use std::cmp::Ordering;
use std::collections::VecDeque;

use parking_lot::{Mutex, MutexGuard};

use super::Word;
use crate::diagrams::CoxeterMatrix;
use crate::error::{Error, Result};

pub const DEFAULT_LENGTH_CAP: usize = 64;

const NONE: u32 = u32::MAX;

/// Handle to a group element. Only meaningful for the [`CoxeterGroup`] that
/// produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(u32);

impl Elem {
    pub const IDENTITY: Elem = Elem(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Cayley graph grown on demand. Vertex `v` stores its ShortLex normal form,
/// its right descent set, and a neighbour slot per generator.
#[derive(Debug)]
struct Graph {
    rank: usize,
    /// `orders[s * rank + t]`, 0 for infinity.
    orders: Vec<u32>,
    links: Vec<u32>,
    descents: Vec<u64>,
    normal_forms: Vec<Box<[u8]>>,
}

impl Graph {
    fn new(matrix: &CoxeterMatrix) -> Self {
        let n = matrix.rank();
        let mut orders = vec![0; n * n];
        for s in 0..n {
            for t in 0..n {
                orders[s * n + t] = matrix.order(s, t).finite().unwrap_or(0);
            }
        }
        Graph {
            rank: n,
            orders,
            links: vec![NONE; n],
            descents: vec![0],
            normal_forms: vec![Box::from([])],
        }
    }

    fn link(&self, v: u32, s: usize) -> u32 {
        self.links[v as usize * self.rank + s]
    }

    fn has_descent(&self, v: u32, s: usize) -> bool {
        self.descents[v as usize] & (1 << s) != 0
    }

    /// Length of the alternating descent chain `... s t` read off the end of
    /// `v`, starting with `first`, stopping at `limit`.
    fn chain_depth(&self, v: u32, first: usize, second: usize, limit: usize) -> usize {
        let (mut cur, mut a, mut b) = (v, first, second);
        let mut d = 0;
        while d < limit && self.has_descent(cur, a) {
            cur = self.link(cur, a);
            std::mem::swap(&mut a, &mut b);
            d += 1;
        }
        d
    }

    fn mul_gen(&mut self, cap: usize, w: u32, s: usize) -> Result<u32> {
        let linked = self.link(w, s);
        if linked != NONE {
            return Ok(linked);
        }
        // `s` is not a descent of `w`, so `ws` is one longer.
        let len = self.normal_forms[w as usize].len() + 1;
        if len > cap {
            return Err(Error::LengthCap { cap });
        }
        let n = self.rank;
        let mut lower: Vec<(usize, u32)> = Vec::new();
        for t in 0..n {
            let m = self.orders[s * n + t] as usize;
            if t == s || m == 0 || len < m {
                continue;
            }
            // `ws` has `t` as a descent iff `w` ends with the alternating word
            // of length m-1 finishing in `t`, i.e. `ws` tops its <s,t> residue.
            if self.chain_depth(w, t, s, m - 1) != m - 1 {
                continue;
            }
            let mut bottom = w;
            let (mut a, mut b) = (t, s);
            for _ in 0..m - 1 {
                bottom = self.link(bottom, a);
                std::mem::swap(&mut a, &mut b);
            }
            // climb the other side of the residue: bottom · t s t ... (m-1 letters)
            let mut other = bottom;
            let (mut a, mut b) = (t, s);
            for _ in 0..m - 1 {
                other = self.mul_gen(cap, other, a)?;
                std::mem::swap(&mut a, &mut b);
            }
            debug_assert_eq!(self.link(other, t), NONE);
            lower.push((t, other));
        }
        debug_assert_eq!(self.link(w, s), NONE);

        let mut best: Vec<u8> = self.normal_forms[w as usize].to_vec();
        best.push(s as u8);
        for &(t, v) in &lower {
            let nf = &self.normal_forms[v as usize];
            let cmp = nf.iter().copied().chain([t as u8]).cmp(best.iter().copied());
            if cmp == Ordering::Less {
                best = nf.to_vec();
                best.push(t as u8);
            }
        }

        let id = self.descents.len() as u32;
        if id == NONE {
            return Err(Error::BudgetExceeded {
                what: "Cayley graph vertices",
                budget: NONE as usize,
            });
        }
        self.links.extend(std::iter::repeat_n(NONE, n));
        let mut descents = 1u64 << s;
        self.links[id as usize * n + s] = w;
        self.links[w as usize * n + s] = id;
        for &(t, v) in &lower {
            descents |= 1 << t;
            self.links[id as usize * n + t] = v;
            self.links[v as usize * n + t] = id;
        }
        self.descents.push(descents);
        self.normal_forms.push(best.into_boxed_slice());
        Ok(id)
    }
}

/// An odd-angled Coxeter group with a shared, lazily grown Cayley graph.
///
/// The graph is behind a mutex and only ever grows; concurrent callers see
/// consistent handles and normal forms.
#[derive(Debug)]
pub struct CoxeterGroup {
    matrix: CoxeterMatrix,
    cap: usize,
    graph: Mutex<Graph>,
}

impl CoxeterGroup {
    pub fn new(matrix: CoxeterMatrix) -> Self {
        Self::with_cap(matrix, DEFAULT_LENGTH_CAP)
    }

    /// Group whose element lengths may not exceed `cap`.
    pub fn with_cap(matrix: CoxeterMatrix, cap: usize) -> Self {
        let graph = Mutex::new(Graph::new(&matrix));
        CoxeterGroup { matrix, cap, graph }
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn length_cap(&self) -> usize {
        self.cap
    }

    /// Number of vertices materialised so far.
    pub fn cached_elements(&self) -> usize {
        self.graph.lock().descents.len()
    }

    /// Exclusive access for a batch of operations.
    pub fn session(&self) -> Session<'_> {
        Session {
            group: self,
            graph: self.graph.lock(),
        }
    }
}

/// A locked view of a [`CoxeterGroup`]. Hot loops should hold one of these
/// instead of re-locking per operation.
pub struct Session<'a> {
    group: &'a CoxeterGroup,
    graph: MutexGuard<'a, Graph>,
}

impl Session<'_> {
    pub fn group(&self) -> &CoxeterGroup {
        self.group
    }

    pub fn rank(&self) -> usize {
        self.graph.rank
    }

    fn check_generator(&self, s: usize) -> Result<()> {
        if s >= self.graph.rank {
            return Err(Error::GeneratorOutOfRange {
                generator: s,
                rank: self.graph.rank,
            });
        }
        Ok(())
    }

    pub fn mul_gen(&mut self, w: Elem, s: usize) -> Result<Elem> {
        self.check_generator(s)?;
        let cap = self.group.cap;
        self.graph.mul_gen(cap, w.0, s).map(Elem)
    }

    /// `w · word`.
    pub fn mul_word(&mut self, w: Elem, word: &Word) -> Result<Elem> {
        let mut cur = w;
        for &l in word.letters() {
            cur = self.mul_gen(cur, l as usize)?;
        }
        Ok(cur)
    }

    pub fn eval(&mut self, word: &Word) -> Result<Elem> {
        self.mul_word(Elem::IDENTITY, word)
    }

    pub fn mul(&mut self, a: Elem, b: Elem) -> Result<Elem> {
        let word = self.word(b);
        self.mul_word(a, &word)
    }

    /// `s · w`.
    pub fn left_mul_gen(&mut self, s: usize, w: Elem) -> Result<Elem> {
        let word = self.word(w);
        let start = self.mul_gen(Elem::IDENTITY, s)?;
        self.mul_word(start, &word)
    }

    pub fn inverse(&mut self, w: Elem) -> Result<Elem> {
        let word = self.word(w).reversed();
        self.eval(&word)
    }

    /// `a⁻¹ · b`, the element carrying chamber `a` to chamber `b`.
    pub fn quotient(&mut self, a: Elem, b: Elem) -> Result<Elem> {
        let inv = self.inverse(a)?;
        self.mul(inv, b)
    }

    /// Gallery distance `l(a⁻¹ b)`.
    pub fn distance(&mut self, a: Elem, b: Elem) -> Result<usize> {
        let q = self.quotient(a, b)?;
        Ok(self.len(q))
    }

    /// `w s w⁻¹`.
    pub fn conjugate_gen(&mut self, w: Elem, s: usize) -> Result<Elem> {
        let ws = self.mul_gen(w, s)?;
        let inv = self.inverse(w)?;
        self.mul(ws, inv)
    }

    pub fn word(&self, w: Elem) -> Word {
        Word::new(self.graph.normal_forms[w.index()].to_vec())
    }

    pub fn letters(&self, w: Elem) -> &[u8] {
        &self.graph.normal_forms[w.index()]
    }

    pub fn len(&self, w: Elem) -> usize {
        self.graph.normal_forms[w.index()].len()
    }

    pub fn descents(&self, w: Elem) -> u64 {
        self.graph.descents[w.index()]
    }

    pub fn has_descent(&self, w: Elem, s: usize) -> bool {
        self.graph.has_descent(w.0, s)
    }

    pub fn descent_list(&self, w: Elem) -> Vec<usize> {
        let d = self.descents(w);
        (0..self.graph.rank).filter(|&s| d & (1 << s) != 0).collect()
    }

    /// `w s` for a descent `s`, without touching the graph.
    pub fn down(&self, w: Elem, s: usize) -> Option<Elem> {
        self.has_descent(w, s).then(|| Elem(self.graph.link(w.0, s)))
    }

    pub fn shortlex_cmp(&self, a: Elem, b: Elem) -> Ordering {
        let (x, y) = (self.letters(a), self.letters(b));
        x.len().cmp(&y.len()).then_with(|| x.cmp(y))
    }

    /// Position of `w` inside its `<i, j>` residue: the minimal coset
    /// representative `u` and the alternating word `x` with `w = u x`,
    /// returned as (`u`, `len(x)`, first letter of `x`).
    pub fn residue_position(&self, w: Elem, i: usize, j: usize) -> (Elem, usize, Option<usize>) {
        let g = &self.graph;
        let (a, b) = if g.has_descent(w.0, i) { (i, j) } else { (j, i) };
        let (mut cur, mut a, mut b) = (w.0, a, b);
        let mut d = 0;
        let mut first = None;
        while g.has_descent(cur, a) {
            cur = g.link(cur, a);
            first = Some(a);
            std::mem::swap(&mut a, &mut b);
            d += 1;
        }
        (Elem(cur), d, first)
    }

    /// All elements of length at most `radius`, in ShortLex order.
    pub fn ball(&mut self, radius: usize) -> Result<Vec<Elem>> {
        self.ball_bounded(radius, usize::MAX)
    }

    /// As [`Session::ball`], failing once more than `budget` elements are found.
    pub fn ball_bounded(&mut self, radius: usize, budget: usize) -> Result<Vec<Elem>> {
        let n = self.rank();
        let mut seen = std::collections::HashSet::new();
        let mut out = vec![Elem::IDENTITY];
        seen.insert(Elem::IDENTITY);
        let mut queue = VecDeque::from([Elem::IDENTITY]);
        while let Some(v) = queue.pop_front() {
            if self.len(v) == radius {
                continue;
            }
            for s in 0..n {
                if self.has_descent(v, s) {
                    continue;
                }
                let u = self.mul_gen(v, s)?;
                if seen.insert(u) {
                    if out.len() >= budget {
                        return Err(Error::BudgetExceeded {
                            what: "ball enumeration",
                            budget,
                        });
                    }
                    out.push(u);
                    queue.push_back(u);
                }
            }
        }
        out.sort_by(|&a, &b| self.shortlex_cmp(a, b));
        Ok(out)
    }
}
