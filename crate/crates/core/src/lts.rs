//! Labelled transition systems and the structural operational semantics.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::combine::{close, Cap, Item, Limits, Resource};
use crate::env::{max_tmp, Env};
use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::normal::{extend, flatten, normalize, NormalForm};
use crate::sync::{SyncMode, SyncTable};
use crate::term::{Name, Sequence, Term};

/// Exploration limits. All fields must be positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_states: usize,
    pub max_seq_len: usize,
    pub max_places: usize,
    pub max_transitions: usize,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_states: 10_000,
            max_seq_len: 16,
            max_places: 5_000,
            max_transitions: 20_000,
        }
    }
}

/// A state of an LTS: a process normal form or a rendered net marking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum State {
    Process(NormalForm),
    Marking(String),
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Process(nf) => write!(f, "{nf}"),
            State::Marking(m) => write!(f, "{m}"),
        }
    }
}

/// A rooted LTS over indexed states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lts {
    pub states: Vec<State>,
    pub transitions: Vec<(usize, Sequence, usize)>,
    pub initial: usize,
    pub complete: bool,
}

impl Lts {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn labels(&self) -> BTreeSet<Sequence> {
        self.transitions.iter().map(|(_, l, _)| l.clone()).collect()
    }

    pub fn successors(&self, s: usize) -> impl Iterator<Item = (&Sequence, usize)> {
        self.transitions
            .iter()
            .filter(move |(from, _, _)| *from == s)
            .map(|(_, l, to)| (l, *to))
    }
}

type Moves = Arc<Vec<(Sequence, Term)>>;

/// Transition derivation for one semantic session (shared caches for
/// component moves and sync outcomes).
pub struct Semantics<'a> {
    env: &'a Env,
    budget: Budget,
    sync: SyncTable,
    moves: HashMap<Term, Moves>,
    in_progress: HashSet<Term>,
    truncated: bool,
}

impl<'a> Semantics<'a> {
    pub fn new(env: &'a Env, mode: SyncMode, budget: Budget) -> Semantics<'a> {
        Semantics {
            env,
            budget,
            sync: SyncTable::new(mode),
            moves: HashMap::new(),
            in_progress: HashSet::new(),
            truncated: false,
        }
    }

    /// True once any derivation was cut by the sequence-length or item
    /// limits.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    fn limits(&self) -> Limits {
        Limits {
            max_seq_len: self.budget.max_seq_len,
            max_items: self.budget.max_transitions,
        }
    }

    /// Moves of a single component, as `(label, continuation)`.
    fn component_moves(&mut self, t: &Term) -> Result<Moves> {
        if let Some(m) = self.moves.get(t) {
            return Ok(m.clone());
        }
        if !self.in_progress.insert(t.clone()) {
            return Err(Error::Unguarded(t.to_string()));
        }
        let result = self.derive_component(t);
        self.in_progress.remove(t);
        let moves = Arc::new(result?);
        self.moves.insert(t.clone(), moves.clone());
        Ok(moves)
    }

    fn derive_component(&mut self, t: &Term) -> Result<Vec<(Sequence, Term)>> {
        Ok(match t {
            Term::Nil => Vec::new(),
            Term::Prefix(a, q) => vec![(Sequence::single(a.clone()), (**q).clone())],
            Term::Strong(a, q) => {
                let mut out = Vec::new();
                for (s, q2) in self.process_moves(q)? {
                    if s.len() + 1 > self.budget.max_seq_len {
                        self.truncated = true;
                        continue;
                    }
                    out.push((s.prepend(a.clone()), q2));
                }
                out
            }
            Term::Sum(l, r) => {
                let mut out: Vec<(Sequence, Term)> = self.component_moves(l)?.to_vec();
                for m in self.component_moves(r)?.iter() {
                    if !out.contains(m) {
                        out.push(m.clone());
                    }
                }
                out
            }
            Term::Par(..) | Term::Restrict(..) | Term::Const(_) => self.process_moves(t)?,
        })
    }

    /// All moves of an arbitrary process term; restricted names of the
    /// term are filtered and re-bound around each continuation.
    fn process_moves(&mut self, q: &Term) -> Result<Vec<(Sequence, Term)>> {
        let mut next = max_tmp(q).map_or(0, |k| k + 1);
        let flat = flatten(q, self.env, false, &mut next)?;
        let groups = group(&flat.components);
        let hidden: BTreeSet<Name> = flat.restricted.iter().cloned().collect();
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for item in self.combine(&groups)? {
            if mentions_any(&item.label, &hidden) {
                continue;
            }
            let mut rest = Vec::new();
            for (i, (t, n)) in groups.iter().enumerate() {
                let left = n - item.usage.count(&i);
                rest.extend(std::iter::repeat(t.clone()).take(left as usize));
            }
            rest.extend(item.post.elements().cloned());
            let cont = Term::restrict_all(flat.restricted.iter().cloned(), Term::par_all(rest));
            if seen.insert((item.label.clone(), cont.clone())) {
                out.push((item.label, cont));
            }
        }
        Ok(out)
    }

    /// Runs the (Com) closure over grouped components.
    fn combine(&mut self, groups: &[(Term, u32)]) -> Result<Vec<Item<Term>>> {
        let mut resources = Vec::with_capacity(groups.len());
        for (t, n) in groups {
            let moves = self.component_moves(t)?;
            resources.push(Resource {
                cap: Cap::Finite(*n),
                moves: moves
                    .iter()
                    .map(|(l, c)| (l.clone(), Multiset::singleton(c.clone())))
                    .collect(),
            });
        }
        let limits = self.limits();
        let closure = close(&resources, &mut self.sync, &limits);
        self.truncated |= closure.truncated;
        Ok(closure.items)
    }

    /// All transitions of a normalized state, sorted.
    pub fn step(&mut self, nf: &NormalForm) -> Result<Vec<(Sequence, NormalForm)>> {
        let groups: Vec<(Term, u32)> = nf.components.iter().map(|(t, n)| (t.clone(), n)).collect();
        let hidden: BTreeSet<Name> = nf.restricted.iter().cloned().collect();
        let mut out = BTreeSet::new();
        for item in self.combine(&groups)? {
            if mentions_any(&item.label, &hidden) {
                continue;
            }
            let mut base = nf.components.clone();
            for (i, u) in item.usage.iter() {
                base.remove(&groups[*i].0, u);
            }
            let extra: Vec<Term> = item.post.elements().cloned().collect();
            let next = extend(nf.restricted.clone(), base, &extra, self.env, false)?;
            out.insert((item.label, next));
        }
        Ok(out.into_iter().collect())
    }
}

fn group(comps: &[Term]) -> Vec<(Term, u32)> {
    let mut m: BTreeMap<&Term, u32> = BTreeMap::new();
    for c in comps {
        *m.entry(c).or_insert(0) += 1;
    }
    m.into_iter().map(|(t, n)| (t.clone(), n)).collect()
}

fn mentions_any(s: &Sequence, names: &BTreeSet<Name>) -> bool {
    !names.is_empty() && s.actions().iter().any(|a| a.name().is_some_and(|n| names.contains(n)))
}

/// Transitions of a normalized state under the default budget.
pub fn step(nf: &NormalForm, env: &Env, mode: SyncMode) -> Result<Vec<(Sequence, NormalForm)>> {
    Semantics::new(env, mode, Budget::default()).step(nf)
}

/// Breadth-first exploration from `normalize(main)`; also returns the
/// normal form of every state.
pub fn explore(
    main: &Term,
    env: &Env,
    mode: SyncMode,
    budget: Budget,
) -> Result<(Lts, Vec<NormalForm>)> {
    let mut sem = Semantics::new(env, mode, budget);
    let root = normalize(main, env)?;
    let mut index: HashMap<NormalForm, usize> = HashMap::new();
    let mut forms = vec![root.clone()];
    index.insert(root, 0);
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    while let Some(s) = queue.pop_front() {
        let succ = sem.step(&forms[s].clone())?;
        for (label, nf) in succ {
            let t = match index.get(&nf) {
                Some(&t) => t,
                None => {
                    if forms.len() >= budget.max_states {
                        complete = false;
                        continue;
                    }
                    let t = forms.len();
                    index.insert(nf.clone(), t);
                    forms.push(nf);
                    queue.push_back(t);
                    t
                }
            };
            transitions.push((s, label, t));
        }
    }
    let lts = Lts {
        states: forms.iter().cloned().map(State::Process).collect(),
        transitions,
        initial: 0,
        complete: complete && !sem.truncated(),
    };
    Ok((lts, forms))
}

pub fn build_lts(main: &Term, env: &Env, mode: SyncMode, budget: Budget) -> Result<Lts> {
    explore(main, env, mode, budget).map(|(l, _)| l)
}
