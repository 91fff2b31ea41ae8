//! The synchronization relation on action sequences.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use crate::term::{Action, Sequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SyncMode {
    General,
    /// Two sequences combine only if one of them has length 1.
    FiniteNet,
}

/// All `σ` with `Sync(s1, s2, σ)`, sorted.
pub fn sync_outcomes(s1: &Sequence, s2: &Sequence, mode: SyncMode) -> BTreeSet<Sequence> {
    let mut memo = HashMap::new();
    gated(s1, s2, mode, &mut memo)
}

pub fn is_sync(s1: &Sequence, s2: &Sequence, s: &Sequence, mode: SyncMode) -> bool {
    sync_outcomes(s1, s2, mode).contains(s)
}

fn gated(
    s1: &Sequence,
    s2: &Sequence,
    mode: SyncMode,
    memo: &mut HashMap<(Vec<Action>, Vec<Action>), Arc<BTreeSet<Vec<Action>>>>,
) -> BTreeSet<Sequence> {
    if mode == SyncMode::FiniteNet && s1.len() != 1 && s2.len() != 1 {
        return BTreeSet::new();
    }
    outcomes(s1.actions(), s2.actions(), memo)
        .iter()
        .map(|v| Sequence::new(v.clone()).expect("sync outcomes are nonempty"))
        .collect()
}

type Memo = HashMap<(Vec<Action>, Vec<Action>), Arc<BTreeSet<Vec<Action>>>>;

/// Top-down enumeration of the eight rules. Every recursive call works on
/// a strictly shorter pair, so the memo is filled bottom-up implicitly.
fn outcomes(s1: &[Action], s2: &[Action], memo: &mut Memo) -> Arc<BTreeSet<Vec<Action>>> {
    let key = (s1.to_vec(), s2.to_vec());
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }
    let mut out = BTreeSet::new();
    let (a, b) = (&s1[0], &s2[0]);
    let (r1, r2) = (&s1[1..], &s2[1..]);
    if a.is_complement_of(b) {
        match (r1.is_empty(), r2.is_empty()) {
            (true, true) => {
                out.insert(vec![Action::Tau]);
            }
            (false, true) => {
                out.insert(r1.to_vec());
            }
            (true, false) => {
                out.insert(r2.to_vec());
            }
            (false, false) => out.extend(outcomes(r1, r2, memo).iter().cloned()),
        }
    }
    if !r1.is_empty() {
        let sub = outcomes(r1, s2, memo);
        if *a == Action::Tau {
            out.extend(sub.iter().cloned());
        } else {
            out.extend(sub.iter().map(|s| prepend(a, s)));
        }
    }
    if !r2.is_empty() {
        let sub = outcomes(s1, r2, memo);
        if *b == Action::Tau {
            out.extend(sub.iter().cloned());
        } else {
            out.extend(sub.iter().map(|s| prepend(b, s)));
        }
    }
    let out = Arc::new(out);
    memo.insert(key, out.clone());
    out
}

fn prepend(a: &Action, s: &[Action]) -> Vec<Action> {
    let mut v = Vec::with_capacity(s.len() + 1);
    v.push(a.clone());
    v.extend_from_slice(s);
    v
}

/// A reusable cache of whole-pair outcomes, shared by one semantic
/// construction.
#[derive(Debug)]
pub struct SyncTable {
    mode: SyncMode,
    memo: Memo,
    pairs: HashMap<(Sequence, Sequence), Arc<Vec<Sequence>>>,
}

impl SyncTable {
    pub fn new(mode: SyncMode) -> SyncTable {
        SyncTable {
            mode,
            memo: HashMap::new(),
            pairs: HashMap::new(),
        }
    }

    pub fn mode(&self) -> SyncMode {
        self.mode
    }

    pub fn outcomes(&mut self, s1: &Sequence, s2: &Sequence) -> Arc<Vec<Sequence>> {
        let key = (s1.clone(), s2.clone());
        if let Some(hit) = self.pairs.get(&key) {
            return hit.clone();
        }
        let set = gated(s1, s2, self.mode, &mut self.memo);
        let v = Arc::new(set.into_iter().collect::<Vec<_>>());
        self.pairs.insert(key, v.clone());
        v
    }
}
