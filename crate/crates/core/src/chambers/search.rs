use std::collections::HashMap;

use super::{arc_violations, convexity_violation, cycle_position, finite_pairs, ChamberSet};
use crate::error::Result;
use crate::words::{CoxeterGroup, Elem, Session};

/// Default limit on candidate-set expansions.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStatus {
    Complete,
    /// The node budget ran out; the list holds only what was found so far.
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub polytopes: Vec<ChamberSet>,
    pub status: SearchStatus,
    pub expanded: u64,
}

struct Search<'a, 's> {
    session: &'a mut Session<'s>,
    elems: Vec<Elem>,
    adjacent: Vec<Vec<usize>>,
    /// Per chamber: (residue id, order) for each finite pair.
    residues: Vec<Vec<(usize, u32)>>,
    counts: Vec<u32>,
    marked: Vec<bool>,
    max_size: usize,
    budget: u64,
    expanded: u64,
    truncated: bool,
    pairs: Vec<(usize, usize, u32)>,
    found: Vec<Vec<Elem>>,
}

impl Search<'_, '_> {
    fn add(&mut self, v: usize) {
        for &(r, _) in &self.residues[v] {
            self.counts[r] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        for &(r, _) in &self.residues[v] {
            self.counts[r] -= 1;
        }
    }

    fn plausible(&self, cur: &[usize]) -> bool {
        cur.iter().all(|&v| {
            self.residues[v].iter().all(|&(r, m)| {
                let c = self.counts[r];
                c == 2 * m || m % c == 0
            })
        })
    }

    fn record(&mut self, cur: &[usize]) -> Result<()> {
        if !self.plausible(cur) {
            return Ok(());
        }
        let set: Vec<Elem> = cur.iter().map(|&v| self.elems[v]).collect();
        if !arc_violations(self.session, &set, &self.pairs).is_empty() {
            return Ok(());
        }
        if convexity_violation(self.session, &set)?.is_none() {
            self.found.push(set);
        }
        Ok(())
    }

    fn extend(&mut self, cur: &mut Vec<usize>, mut untried: Vec<usize>) -> Result<()> {
        while let Some(v) = untried.pop() {
            if self.expanded >= self.budget {
                self.truncated = true;
                return Ok(());
            }
            self.expanded += 1;
            cur.push(v);
            let doomed = self.add_checked(v, cur.len());
            if !doomed {
                self.record(cur)?;
                if cur.len() < self.max_size {
                    let mut next = untried.clone();
                    let mut fresh = Vec::new();
                    for k in 0..self.adjacent[v].len() {
                        let u = self.adjacent[v][k];
                        if !self.marked[u] {
                            self.marked[u] = true;
                            fresh.push(u);
                            next.push(u);
                        }
                    }
                    self.extend(cur, next)?;
                    for u in fresh {
                        self.marked[u] = false;
                    }
                }
            }
            self.remove(v);
            cur.pop();
            if self.truncated {
                return Ok(());
            }
        }
        Ok(())
    }

    /// Adds `v` and reports whether the grown set can no longer be completed:
    /// more than `m` chambers on a residue only works if it fills up.
    fn add_checked(&mut self, v: usize, len: usize) -> bool {
        self.add(v);
        self.residues[v].iter().any(|&(r, m)| {
            let (c, m) = (self.counts[r] as usize, m as usize);
            c > m && c < 2 * m && len + (2 * m - c) > self.max_size
        })
    }
}

/// Exhaustive search for Coxeter polytopes `I ∋ e` with `2 ≤ |I| ≤ max_size`
/// inside the ball of the given radius.
///
/// Connected chamber sets are grown without repetition (Redelmeier's method
/// on the ball's Cayley graph). A branch is cut when some residue holds more
/// than `m` but fewer than `2m` chambers and cannot be filled within the size
/// limit. Results are ShortLex ordered by size, then members.
pub fn search_coxeter_polytopes(
    group: &CoxeterGroup,
    max_size: usize,
    radius: usize,
    budget: u64,
) -> Result<SearchReport> {
    let pairs = finite_pairs(group);
    let mut session = group.session();
    let elems = session.ball(radius)?;
    let index: HashMap<Elem, usize> = elems.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let mut adjacent = Vec::with_capacity(elems.len());
    for &e in &elems {
        let mut list = Vec::new();
        for g in 0..session.rank() {
            let u = session.mul_gen(e, g)?;
            if let Some(&k) = index.get(&u) {
                list.push(k);
            }
        }
        adjacent.push(list);
    }
    let mut residue_ids: HashMap<(usize, Elem), usize> = HashMap::new();
    let mut residues = Vec::with_capacity(elems.len());
    for &e in &elems {
        let mut list = Vec::new();
        for (k, &(i, j, m)) in pairs.iter().enumerate() {
            let (base, _) = cycle_position(&session, e, i, j, m);
            let next = residue_ids.len();
            let id = *residue_ids.entry((k, base)).or_insert(next);
            list.push((id, m));
        }
        residues.push(list);
    }

    let root = index[&Elem::IDENTITY];
    let mut search = Search {
        session: &mut session,
        adjacent,
        residues,
        counts: vec![0; residue_ids.len()],
        marked: vec![false; elems.len()],
        elems,
        max_size,
        budget,
        expanded: 0,
        truncated: false,
        pairs,
        found: Vec::new(),
    };
    if max_size >= 2 {
        search.marked[root] = true;
        search.add(root);
        let mut untried = Vec::new();
        for k in 0..search.adjacent[root].len() {
            let u = search.adjacent[root][k];
            search.marked[u] = true;
            untried.push(u);
        }
        let mut cur = vec![root];
        search.extend(&mut cur, untried)?;
    }
    let (found, expanded, truncated) = (std::mem::take(&mut search.found), search.expanded, search.truncated);
    let mut polytopes = found
        .iter()
        .map(|set| ChamberSet::from_elems(&session, set))
        .collect::<Result<Vec<_>>>()?;
    polytopes.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.members().cmp(b.members())));
    Ok(SearchReport {
        polytopes,
        status: if truncated {
            SearchStatus::Truncated
        } else {
            SearchStatus::Complete
        },
        expanded,
    })
}
