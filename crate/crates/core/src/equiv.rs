//! Strong bisimulation on finite LTSs and isomorphism of P/T nets.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::lts::{Budget, Lts};
use crate::net::{marking_graph, Marking, PTNet, PlaceId};
use crate::term::Sequence;

/// Hennessy–Milner formula over sequence labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    True,
    /// `<σ>(φ1 ∧ … ∧ φn)`; the empty conjunction is `tt`.
    Diamond(Sequence, Vec<Formula>),
    Not(Box<Formula>),
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "tt"),
            Formula::Not(g) => write!(f, "!{g}"),
            Formula::Diamond(s, conj) => match &conj[..] {
                [] => write!(f, "<{s}>tt"),
                [g] => write!(f, "<{s}>{g}"),
                _ => {
                    write!(f, "<{s}>(")?;
                    for (i, g) in conj.iter().enumerate() {
                        if i > 0 {
                            write!(f, " & ")?;
                        }
                        write!(f, "{g}")?;
                    }
                    write!(f, ")")
                }
            },
        }
    }
}

/// Satisfaction of `phi` at `state`.
pub fn holds(lts: &Lts, state: usize, phi: &Formula) -> bool {
    match phi {
        Formula::True => true,
        Formula::Not(g) => !holds(lts, state, g),
        Formula::Diamond(s, conj) => lts
            .successors(state)
            .any(|(l, t)| l == s && conj.iter().all(|g| holds(lts, t, g))),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BisimResult {
    pub related: bool,
    /// Block of every state of the disjoint union: the states of the first
    /// LTS, then those of the second, offset by its size.
    pub blocks: Vec<usize>,
    pub offset: usize,
    /// True at the first initial state and false at the second.
    pub counterexample: Option<Formula>,
}

impl BisimResult {
    pub fn report(&self) -> String {
        let blocks = self.blocks.iter().collect::<BTreeSet<_>>().len();
        match &self.counterexample {
            None => format!("bisimilar: yes ({blocks} classes)\n"),
            Some(phi) => format!("bisimilar: no\ndistinguishing formula: {phi}\n"),
        }
    }

    pub fn structured(&self) -> String {
        let mut s = format!("begin bisim\nrelated {}\n", self.related);
        if let Some(phi) = &self.counterexample {
            s.push_str(&format!("formula {phi}\n"));
        }
        s.push_str("end bisim\n");
        s
    }
}

struct Union {
    succ: Vec<Vec<(usize, usize)>>,
    labels: Vec<Sequence>,
}

fn union(l1: &Lts, l2: &Lts) -> Union {
    let mut ids: BTreeMap<Sequence, usize> = BTreeMap::new();
    let n1 = l1.num_states();
    let mut succ = vec![Vec::new(); n1 + l2.num_states()];
    for (off, l) in [(0, l1), (n1, l2)] {
        for (s, lab, t) in &l.transitions {
            let next = ids.len();
            let id = *ids.entry(lab.clone()).or_insert(next);
            succ[off + s].push((id, off + t));
        }
    }
    let mut labels = vec![Sequence::tau(); ids.len()];
    for (l, i) in ids {
        labels[i] = l;
    }
    Union { succ, labels }
}

/// Round-based signature refinement; keeps every round's partition.
fn refine(u: &Union) -> Vec<Vec<usize>> {
    let n = u.succ.len();
    let mut history = vec![vec![0usize; n]];
    loop {
        let prev = history.last().unwrap();
        let mut ids: BTreeMap<(usize, Vec<(usize, usize)>), usize> = BTreeMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let mut sig: Vec<(usize, usize)> = u.succ[s].iter().map(|(l, t)| (*l, prev[*t])).collect();
            sig.sort();
            sig.dedup();
            let k = ids.len();
            next[s] = *ids.entry((prev[s], sig)).or_insert(k);
        }
        let before = prev.iter().collect::<BTreeSet<_>>().len();
        let stable = ids.len() == before;
        history.push(next);
        if stable {
            return history;
        }
    }
}

fn signature(u: &Union, part: &[usize], s: usize) -> BTreeSet<(usize, usize)> {
    u.succ[s].iter().map(|(l, t)| (*l, part[*t])).collect()
}

/// A formula true at `s` and false at `t`, given they differ in the last
/// partition of `history`.
fn distinguish(u: &Union, history: &[Vec<usize>], s: usize, t: usize) -> Formula {
    let k = (1..history.len())
        .find(|&k| history[k][s] != history[k][t])
        .expect("states are separated");
    let prev = &history[k - 1];
    let (ss, st) = (signature(u, prev, s), signature(u, prev, t));
    if let Some(&(l, b)) = ss.difference(&st).next() {
        let s2 = u.succ[s]
            .iter()
            .find(|(l2, x)| *l2 == l && prev[*x] == b)
            .unwrap()
            .1;
        let mut targets: Vec<usize> = u.succ[t].iter().filter(|(l2, _)| *l2 == l).map(|(_, x)| *x).collect();
        targets.sort();
        targets.dedup();
        let mut conj: Vec<Formula> = Vec::new();
        for t2 in targets {
            let g = distinguish(u, &history[..k], s2, t2);
            if !conj.contains(&g) {
                conj.push(g);
            }
        }
        Formula::Diamond(u.labels[l].clone(), conj)
    } else {
        Formula::Not(Box::new(distinguish(u, history, t, s)))
    }
}

pub fn bisimilar(l1: &Lts, l2: &Lts) -> Result<BisimResult> {
    for (which, l) in [("first", l1), ("second", l2)] {
        if !l.complete {
            return Err(Error::Incomplete(format!(
                "the {which} transition system was truncated by the budget"
            )));
        }
    }
    let u = union(l1, l2);
    let history = refine(&u);
    let last = history.last().unwrap().clone();
    let (a, b) = (l1.initial, l1.num_states() + l2.initial);
    let related = last[a] == last[b];
    let counterexample = (!related).then(|| distinguish(&u, &history, a, b));
    Ok(BisimResult {
        related,
        blocks: last,
        offset: l1.num_states(),
        counterexample,
    })
}

/// Bisimilarity of the interleaving marking graphs.
pub fn net_bisimilar(n1: &PTNet, n2: &PTNet, budget: &Budget) -> Result<BisimResult> {
    bisimilar(&marking_graph(n1, budget), &marking_graph(n2, budget))
}

/// Checks that `blocks` (over the disjoint union) is a bisimulation:
/// related states match each other's moves into related states.
pub fn verify_bisimulation(l1: &Lts, l2: &Lts, blocks: &[usize]) -> bool {
    let u = union(l1, l2);
    let n = u.succ.len();
    for s in 0..n {
        for t in 0..n {
            if blocks[s] != blocks[t] {
                continue;
            }
            for &(l, s2) in &u.succ[s] {
                if !u.succ[t].iter().any(|&(l2, t2)| l2 == l && blocks[t2] == blocks[s2]) {
                    return false;
                }
            }
        }
    }
    true
}

/// A place bijection `map[i]` = image of place `i` of the first net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub map: Vec<PlaceId>,
}

impl IsoWitness {
    pub fn report(&self, n1: &PTNet, n2: &PTNet) -> String {
        let mut s = String::from("isomorphic: yes\n");
        for (i, p) in self.map.iter().enumerate() {
            s.push_str(&format!("  {} -> {}\n", n1.places[i].name, n2.place_name(*p)));
        }
        s
    }

    pub fn structured(&self, n1: &PTNet, n2: &PTNet) -> String {
        let mut s = String::from("begin iso\nrelated true\n");
        for (i, p) in self.map.iter().enumerate() {
            s.push_str(&format!("map {} {}\n", n1.places[i].name, n2.place_name(*p)));
        }
        s.push_str("end iso\n");
        s
    }
}

type Key = (Vec<(u32, u32)>, Sequence, Vec<(u32, u32)>);

fn key(t: &crate::net::Transition, f: &dyn Fn(PlaceId) -> PlaceId) -> Key {
    let flat = |m: &Marking| {
        let mut v: Vec<(u32, u32)> = m.iter().map(|(p, k)| (f(*p).0, k)).collect();
        v.sort();
        v
    };
    (flat(&t.pre), t.label.clone(), flat(&t.post))
}

fn place_signature(net: &PTNet, p: PlaceId) -> (u32, Vec<(Sequence, u32, u32)>) {
    let mut inc: Vec<(Sequence, u32, u32)> = net
        .transitions
        .iter()
        .filter(|t| t.pre.count(&p) > 0 || t.post.count(&p) > 0)
        .map(|t| (t.label.clone(), t.pre.count(&p), t.post.count(&p)))
        .collect();
    inc.sort();
    (net.initial.count(&p), inc)
}

/// Exhaustive search for a place bijection preserving the initial marking
/// and the transition set.
pub fn isomorphic(n1: &PTNet, n2: &PTNet) -> Option<IsoWitness> {
    let ident = |p: PlaceId| p;
    let set1: BTreeSet<Key> = n1.transitions.iter().map(|t| key(t, &ident)).collect();
    let set2: HashSet<Key> = n2.transitions.iter().map(|t| key(t, &ident)).collect();
    if n1.num_places() != n2.num_places() || set1.len() != set2.len() {
        return None;
    }
    let n = n1.num_places();
    let sig2: Vec<_> = (0..n).map(|j| place_signature(n2, PlaceId(j as u32))).collect();
    let mut cands: Vec<Vec<u32>> = Vec::with_capacity(n);
    for i in 0..n {
        let s = place_signature(n1, PlaceId(i as u32));
        cands.push((0..n as u32).filter(|j| sig2[*j as usize] == s).collect());
        if cands[i].is_empty() {
            return None;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (cands[i].len(), i));
    let mut pos = vec![0usize; n];
    for (k, &i) in order.iter().enumerate() {
        pos[i] = k;
    }
    // Transitions are checked once their last place (in search order) is mapped.
    let mut due: Vec<Vec<&crate::net::Transition>> = vec![Vec::new(); n + 1];
    for t in &n1.transitions {
        let last = t.pre.support().chain(t.post.support()).map(|p| pos[p.index()] + 1).max().unwrap_or(0);
        due[last].push(t);
    }
    for t in &due[0] {
        if !set2.contains(&key(t, &ident)) {
            return None;
        }
    }
    let mut map: Vec<Option<u32>> = vec![None; n];
    let mut used = vec![false; n];
    fn search(
        k: usize,
        order: &[usize],
        cands: &[Vec<u32>],
        due: &[Vec<&crate::net::Transition>],
        set2: &HashSet<Key>,
        map: &mut Vec<Option<u32>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let i = order[k];
        for &j in &cands[i] {
            if used[j as usize] {
                continue;
            }
            map[i] = Some(j);
            used[j as usize] = true;
            let f = |p: PlaceId| PlaceId(map[p.index()].expect("mapped"));
            let ok = due[k + 1].iter().all(|t| set2.contains(&key(t, &f)));
            if ok && search(k + 1, order, cands, due, set2, map, used) {
                return true;
            }
            map[i] = None;
            used[j as usize] = false;
        }
        false
    }
    if !search(0, &order, &cands, &due, &set2, &mut map, &mut used) {
        return None;
    }
    Some(IsoWitness {
        map: map.into_iter().map(|j| PlaceId(j.unwrap())).collect(),
    })
}

/// Direct check of a witness: bijective, initial marking and transition set preserved.
pub fn verify_isomorphism(n1: &PTNet, n2: &PTNet, w: &IsoWitness) -> bool {
    let n = n1.num_places();
    if w.map.len() != n || n2.num_places() != n {
        return false;
    }
    let image: BTreeSet<PlaceId> = w.map.iter().copied().collect();
    if image.len() != n || image.iter().any(|p| p.index() >= n) {
        return false;
    }
    let f = |p: PlaceId| w.map[p.index()];
    let ident = |p: PlaceId| p;
    if n1.initial.map(|p| f(*p)) != n2.initial {
        return false;
    }
    let a: BTreeSet<Key> = n1.transitions.iter().map(|t| key(t, &f)).collect();
    let b: BTreeSet<Key> = n2.transitions.iter().map(|t| key(t, &ident)).collect();
    a == b
}
