//! A bounded archive of mutually non-dominated partitions.
//!
//! Entries carry their full Louvain state, so the solver can expand any of
//! them independently; inserting always deep-copies. The list is kept sorted
//! by score F (descending, earlier insertions first at ties) and cut back to
//! its capacity after every insertion.

use crate::error::{Error, Result};
use crate::graph::MultiplexGraph;
use crate::quality::{LouvainState, ModularityVector, QualityConfig};

/// Componentwise Pareto dominance: `a` dominates `b` iff `a >= b` everywhere
/// and `a > b` somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(dominates_unchecked(a, b))
}

fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// What `try_insert` did with a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted,
    /// Dominated by (or equal to) an existing entry; the list is unchanged.
    Dominated,
    /// Survived dominance but fell below the capacity cut; list unchanged.
    Cut,
}

/// One archived partition with its state, keyed by a stable id.
#[derive(Debug, Clone)]
pub struct ListEntry {
    id: u64,
    state: LouvainState,
}

impl ListEntry {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn state(&self) -> &LouvainState {
        &self.state
    }

    pub fn q(&self) -> &ModularityVector {
        self.state.q()
    }

    pub fn f(&self) -> f64 {
        self.state.f()
    }
}

#[derive(Debug, Clone)]
pub struct ParetoList {
    entries: Vec<ListEntry>,
    capacity: usize,
    next_id: u64,
}

impl ParetoList {
    pub fn new(capacity: usize) -> Result<ParetoList> {
        if capacity == 0 {
            return Err(Error::InvalidConfig("list capacity must be >= 1".into()));
        }
        Ok(ParetoList {
            entries: Vec::new(),
            capacity,
            next_id: 0,
        })
    }

    /// A fresh list holding only the singleton partition of `graph`;
    /// capacity comes from the config.
    pub fn with_singletons(graph: &MultiplexGraph, cfg: &QualityConfig) -> ParetoList {
        let mut list = ParetoList {
            entries: Vec::new(),
            capacity: cfg.list_capacity(),
            next_id: 0,
        };
        let outcome = list.try_insert(LouvainState::singletons(graph, cfg));
        debug_assert_eq!(outcome, InsertOutcome::Inserted);
        list
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn entries(&self) -> &[ListEntry] {
        &self.entries
    }

    /// Entry ids in list order; stable across later insertions/removals.
    pub fn ids(&self) -> Vec<u64> {
        self.entries.iter().map(|e| e.id).collect()
    }

    pub fn get(&self, id: u64) -> Option<&ListEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    /// Highest score; at ties the earliest-inserted entry wins (the list
    /// order already encodes that).
    pub fn best(&self) -> Result<&ListEntry> {
        self.entries.first().ok_or(Error::EmptyList)
    }

    /// Inserts a candidate unless an existing entry dominates it or carries
    /// exactly the same modularity vector. On insertion, entries the
    /// candidate dominates are removed, and if the list then exceeds its
    /// capacity the lowest-F entry is dropped (possibly the candidate, which
    /// reports `Cut` and leaves the list unchanged).
    pub fn try_insert(&mut self, state: LouvainState) -> InsertOutcome {
        let cand_q = state.q().values().to_vec();
        for e in &self.entries {
            let eq = e.q().values();
            if eq == cand_q.as_slice() || dominates_unchecked(eq, &cand_q) {
                return InsertOutcome::Dominated;
            }
        }
        self.entries.retain(|e| !dominates_unchecked(&cand_q, e.q().values()));

        let id = self.next_id;
        self.next_id += 1;
        let f = state.f();
        // stable position: after all entries with f >= cand's f
        let pos = self.entries.partition_point(|e| e.f() >= f);
        self.entries.insert(pos, ListEntry { id, state });

        let mut outcome = InsertOutcome::Inserted;
        while self.entries.len() > self.capacity {
            let dropped = self.entries.pop().expect("list is non-empty");
            if dropped.id == id {
                outcome = InsertOutcome::Cut;
            }
        }
        outcome
    }

    /// Mutual non-dominance and the capacity bound; cheap enough to assert
    /// after every sweep.
    pub fn check_invariants(&self) -> Result<()> {
        if self.entries.len() > self.capacity {
            return Err(Error::InvalidConfig(format!(
                "list holds {} entries, capacity is {}",
                self.entries.len(),
                self.capacity
            )));
        }
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                let qa = a.q().values();
                let qb = b.q().values();
                if dominates_unchecked(qa, qb) || dominates_unchecked(qb, qa) || qa == qb {
                    return Err(Error::InvalidConfig(format!(
                        "entries {} and {} violate mutual non-dominance",
                        a.id, b.id
                    )));
                }
            }
        }
        for w in self.entries.windows(2) {
            if w[0].f() < w[1].f() {
                return Err(Error::InvalidConfig("list is not sorted by score".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Layer, MultiplexGraph};
    use crate::quality::QualityConfig;

    #[test]
    fn dominance_cases() {
        assert!(dominates(&[0.4, 0.5], &[0.4, 0.3]).unwrap());
        assert!(!dominates(&[0.4, 0.3], &[0.3, 0.4]).unwrap());
        assert!(!dominates(&[0.4, 0.4], &[0.4, 0.4]).unwrap());
        assert!(dominates(&[0.1, 0.1, 0.2], &[0.1, 0.1, 0.1]).unwrap());
        assert!(matches!(
            dominates(&[0.1], &[0.1, 0.2]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    /// Four nodes, two deliberately lopsided layers. The single-move states
    /// below have the vectors (layer 0, layer 1):
    ///
    /// ```text
    /// s = singletons      (-0.3125,  -0.27778)
    /// a = group {0,1}     ( 0.15625, -0.38889)
    /// b = group {1,2}     (-0.40625,  0.0)
    /// c = group {0,3}     (-0.40625,  0.16667)
    /// ```
    ///
    /// s, a, c are mutually incomparable; c dominates b. Under VarMinus(0.5)
    /// the scores order as a > c > b > s.
    fn playground() -> MultiplexGraph {
        let l0 = Layer::from_edges(4, [(0, 1, 3.0), (2, 3, 1.0)]).unwrap();
        let l1 = Layer::from_edges(4, [(1, 2, 1.0), (0, 3, 2.0)]).unwrap();
        MultiplexGraph::new(vec![l0, l1], None).unwrap()
    }

    fn state_after(g: &MultiplexGraph, cfg: &QualityConfig, node: usize, target: usize) -> LouvainState {
        let mut st = LouvainState::singletons(g, cfg);
        st.apply_move(g, node, target).unwrap();
        st
    }

    #[test]
    fn insert_removes_dominated_entries() {
        let g = playground();
        let cfg = QualityConfig::var_minus(0.5, 2).unwrap();
        let mut list = ParetoList::with_singletons(&g, &cfg);
        assert_eq!(list.len(), 1);

        let b = state_after(&g, &cfg, 2, 1);
        assert_eq!(list.try_insert(b), InsertOutcome::Inserted);
        assert_eq!(list.len(), 2);

        // c dominates b: b (id 1) goes, c (id 2) stays above the singleton
        // entry (id 0), which survives
        let c = state_after(&g, &cfg, 3, 0);
        let cq = c.q().clone();
        assert_eq!(list.try_insert(c), InsertOutcome::Inserted);
        assert_eq!(list.len(), 2);
        assert_eq!(list.ids(), vec![2, 0]);
        assert_eq!(list.best().unwrap().q(), &cq);

        // resubmitting an identical vector is rejected
        let c2 = state_after(&g, &cfg, 3, 0);
        assert_eq!(list.try_insert(c2), InsertOutcome::Dominated);
        list.check_invariants().unwrap();
    }

    #[test]
    fn capacity_cut_drops_lowest_f() {
        let g = playground();
        let cfg = QualityConfig::var_minus(0.5, 2).unwrap();
        let mut list = ParetoList::with_singletons(&g, &cfg);

        let a = state_after(&g, &cfg, 1, 0);
        let c = state_after(&g, &cfg, 3, 0);
        assert_eq!(list.try_insert(a), InsertOutcome::Inserted);
        // list is full: {a, singletons}; c is incomparable with both and
        // scores above the singleton entry, which gets cut
        assert_eq!(list.try_insert(c), InsertOutcome::Inserted);
        assert_eq!(list.len(), 2);
        list.check_invariants().unwrap();

        // a fresh singleton state now scores below everything: rejected-cut
        let ids_before = list.ids();
        let s = LouvainState::singletons(&g, &cfg);
        assert_eq!(list.try_insert(s), InsertOutcome::Cut);
        assert_eq!(list.ids(), ids_before, "cut leaves the list unchanged");
        list.check_invariants().unwrap();
    }

    #[test]
    fn best_prefers_earlier_at_ties() {
        // symmetric version: mirrored vectors tie exactly under Mean
        let l0 = Layer::from_edges(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let l1 = Layer::from_edges(4, [(1, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let g = MultiplexGraph::new(vec![l0, l1], None).unwrap();
        let cfg = QualityConfig::mean(3).unwrap();
        let mut list = ParetoList::with_singletons(&g, &cfg);
        let a = state_after(&g, &cfg, 1, 0);
        let b = state_after(&g, &cfg, 2, 1);
        assert_eq!(a.f(), b.f());
        let qa = a.q().clone();
        assert_eq!(list.try_insert(a), InsertOutcome::Inserted);
        assert_eq!(list.try_insert(b), InsertOutcome::Inserted);
        assert_eq!(list.best().unwrap().q(), &qa, "earlier insertion wins the tie");
    }

    #[test]
    fn capacity_one_acts_as_incumbent() {
        let g = playground();
        let cfg = QualityConfig::mean(1).unwrap();
        let mut list = ParetoList::with_singletons(&g, &cfg);
        let f0 = list.best().unwrap().f();

        let a = state_after(&g, &cfg, 1, 0);
        assert!(a.f() > f0);
        assert_eq!(list.try_insert(a), InsertOutcome::Inserted);
        assert_eq!(list.len(), 1, "incumbent replaced");

        // c is incomparable but scores below a: the incumbent stays
        let c = state_after(&g, &cfg, 3, 0);
        assert!(c.f() < list.best().unwrap().f());
        let before = list.ids();
        assert_eq!(list.try_insert(c), InsertOutcome::Cut);
        assert_eq!(list.ids(), before);
        list.check_invariants().unwrap();
    }
}
