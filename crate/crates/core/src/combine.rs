//! Closure of pairwise (Com) combinations over a bag of resources.
//!
//! A resource is a component (or place) with a capacity and a list of
//! moves. An item records how many copies of each resource it consumes,
//! its label and its produced multiset. Items are combined pairwise
//! through the sync relation until no new item appears.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::Hash;

use crate::multiset::Multiset;
use crate::sync::SyncTable;
use crate::term::{Action, Sequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Cap {
    Finite(u32),
    Omega,
}

impl Cap {
    fn allows(self, n: u32) -> bool {
        match self {
            Cap::Finite(k) => n <= k,
            Cap::Omega => true,
        }
    }
}

pub(crate) struct Resource<T: Ord> {
    pub cap: Cap,
    pub moves: Vec<(Sequence, Multiset<T>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Item<T: Ord> {
    /// Resource index to number of copies consumed.
    pub usage: Multiset<usize>,
    pub label: Sequence,
    pub post: Multiset<T>,
}

pub(crate) struct Limits {
    pub max_seq_len: usize,
    pub max_items: usize,
}

pub(crate) struct Closure<T: Ord> {
    pub items: Vec<Item<T>>,
    pub truncated: bool,
}

/// Every sync outcome needs some action of one label to meet its
/// complement in the other, so done items are indexed by their actions
/// and only items holding a complement of the popped label are tried.
pub(crate) fn close<T: Ord + Clone + Hash>(
    resources: &[Resource<T>],
    sync: &mut SyncTable,
    limits: &Limits,
) -> Closure<T> {
    let mut truncated = false;
    // Moves of one resource are distinct, so singleton items need no
    // deduplication; combined items use at least two copies.
    let mut items: Vec<Item<T>> = Vec::new();
    for (i, r) in resources.iter().enumerate() {
        if !r.cap.allows(1) {
            continue;
        }
        for (label, post) in &r.moves {
            if label.len() > limits.max_seq_len {
                truncated = true;
                continue;
            }
            items.push(Item {
                usage: Multiset::singleton(i),
                label: label.clone(),
                post: post.clone(),
            });
        }
    }
    let mut seen: HashSet<Item<T>> = HashSet::new();
    let mut by_action: HashMap<Action, Vec<usize>> = HashMap::new();
    let mut head = 0;
    while head < items.len() {
        let me = head;
        head += 1;
        let own: BTreeSet<Action> = items[me]
            .label
            .actions()
            .iter()
            .filter(|a| **a != Action::Tau)
            .cloned()
            .collect();
        let mut partners: BTreeSet<usize> = BTreeSet::new();
        for a in &own {
            by_action.entry(a.clone()).or_default().push(me);
        }
        for a in &own {
            if let Some(ks) = a.complement().and_then(|c| by_action.get(&c)) {
                partners.extend(ks.iter().copied());
            }
        }
        let mut fresh = Vec::new();
        for k in partners {
            let (x, y) = (&items[me], &items[k]);
            let usage = x.usage.union(&y.usage);
            if !usage.iter().all(|(i, u)| resources[*i].cap.allows(u)) {
                continue;
            }
            let outs = sync.outcomes(&x.label, &y.label);
            if outs.is_empty() {
                continue;
            }
            let post = x.post.union(&y.post);
            for label in outs.iter() {
                if label.len() > limits.max_seq_len {
                    truncated = true;
                    continue;
                }
                let item = Item {
                    usage: usage.clone(),
                    label: label.clone(),
                    post: post.clone(),
                };
                if seen.contains(&item) {
                    continue;
                }
                if items.len() + fresh.len() >= limits.max_items {
                    // Every later item would be refused as well.
                    items.extend(fresh);
                    return Closure { items, truncated: true };
                }
                seen.insert(item.clone());
                fresh.push(item);
            }
        }
        items.extend(fresh);
    }
    Closure { items, truncated }
}
