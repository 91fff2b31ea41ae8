//! P/T nets, decomposition of processes into markings, net-transition
//! derivation and the fixpoint construction of the net of a process.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::combine::{close, Cap, Limits, Resource};
use crate::env::Env;
use crate::error::{Error, Result};
use crate::lts::{Budget, Lts, State};
use crate::multiset::Multiset;
use crate::normal::canonical_binders;
use crate::sync::{SyncMode, SyncTable};
use crate::term::{Name, Sequence, Term};

const MAX_UNFOLD_DEPTH: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceId(pub u32);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

pub type Marking = Multiset<PlaceId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Place {
    pub name: String,
    /// The sequential process this place stands for, if the net was built
    /// from a term.
    pub term: Option<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub pre: Marking,
    pub label: Sequence,
    pub post: Marking,
}

/// A labelled P/T system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PTNet {
    pub name: String,
    pub places: Vec<Place>,
    pub transitions: Vec<Transition>,
    pub initial: Marking,
    /// False when a construction stopped on a budget.
    pub complete: bool,
}

impl PTNet {
    pub fn new(name: &str) -> PTNet {
        PTNet {
            name: name.to_string(),
            places: Vec::new(),
            transitions: Vec::new(),
            initial: Marking::new(),
            complete: true,
        }
    }

    pub fn add_place(&mut self, name: &str, term: Option<Term>) -> PlaceId {
        self.places.push(Place {
            name: name.to_string(),
            term,
        });
        PlaceId(self.places.len() as u32 - 1)
    }

    pub fn add_transition(&mut self, name: &str, pre: Marking, label: Sequence, post: Marking) {
        self.transitions.push(Transition {
            name: name.to_string(),
            pre,
            label,
            post,
        });
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.places
            .iter()
            .position(|p| p.name == name)
            .map(|i| PlaceId(i as u32))
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.index()].name
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn labels(&self) -> BTreeSet<Sequence> {
        self.transitions.iter().map(|t| t.label.clone()).collect()
    }

    pub fn is_enabled(&self, m: &Marking, t: usize) -> bool {
        self.transitions[t].pre.is_subset(m)
    }

    pub fn enabled(&self, m: &Marking) -> Vec<usize> {
        (0..self.transitions.len())
            .filter(|&t| self.is_enabled(m, t))
            .collect()
    }

    /// `m ⊖ pre(t) ⊕ post(t)`; the caller checks enabledness.
    pub fn fire(&self, m: &Marking, t: usize) -> Marking {
        let tr = &self.transitions[t];
        m.difference(&tr.pre).union(&tr.post)
    }

    pub fn marking_string(&self, m: &Marking) -> String {
        if m.is_empty() {
            return "0".to_string();
        }
        m.iter()
            .map(|(p, n)| {
                if n == 1 {
                    self.place_name(*p).to_string()
                } else {
                    format!("{n} {}", self.place_name(*p))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Karp–Miller coverability set (`None` entries are ω).
    pub fn coverability(&self, max_nodes: usize) -> Coverability {
        let trans: Vec<(Sparse, Sparse)> =
            self.transitions.iter().map(|t| (sparse(&t.pre), sparse(&t.post))).collect();
        let mut km = KarpMiller::new(sparse(&self.initial));
        km.saturate(&trans, max_nodes);
        Coverability {
            nodes: km.nodes,
            truncated: km.truncated,
        }
    }
}

pub const OMEGA: u32 = u32::MAX;

/// A marking over place indices, sorted by index, zero entries omitted;
/// `OMEGA` marks an unbounded place.
pub type Sparse = Vec<(u32, u32)>;

fn sparse(m: &Marking) -> Sparse {
    m.iter().map(|(p, k)| (p.0, k)).collect()
}

fn count_at(m: &[(u32, u32)], p: u32) -> u32 {
    m.binary_search_by_key(&p, |e| e.0).map_or(0, |i| m[i].1)
}

/// Componentwise `a <= b`; checks the newest places first.
fn leq(a: &[(u32, u32)], b: &[(u32, u32)]) -> bool {
    a.iter().rev().all(|&(p, x)| {
        let y = count_at(b, p);
        y == OMEGA || (x != OMEGA && x <= y)
    })
}

fn fire_sparse(m: &[(u32, u32)], pre: &[(u32, u32)], post: &[(u32, u32)]) -> Sparse {
    let mut out: BTreeMap<u32, u32> = m.iter().copied().collect();
    for &(p, k) in pre {
        let e = out.get_mut(&p).expect("enabled");
        if *e != OMEGA {
            *e -= k;
        }
    }
    for &(p, k) in post {
        let e = out.entry(p).or_insert(0);
        if *e != OMEGA {
            *e += k;
        }
    }
    out.into_iter().filter(|&(_, k)| k > 0).collect()
}

/// Nodes of a Karp–Miller construction.
#[derive(Clone, Debug)]
pub struct Coverability {
    pub nodes: Vec<Sparse>,
    pub truncated: bool,
}

impl Coverability {
    /// Whether some node covers `m`.
    pub fn covers(&self, m: &Marking) -> bool {
        let m = sparse(m);
        self.nodes.iter().any(|x| leq(&m, x))
    }

    /// Whether some node puts more than one token on a place.
    pub fn exceeds_one(&self) -> bool {
        self.nodes.iter().flatten().any(|&(_, k)| k > 1)
    }
}

/// Karp–Miller tree that can be extended when transitions are appended:
/// each node remembers how many transitions it has already tried.
struct KarpMiller {
    nodes: Vec<Sparse>,
    parent: Vec<Option<usize>>,
    tried: Vec<usize>,
    seen: HashSet<Sparse>,
    truncated: bool,
}

impl KarpMiller {
    fn new(init: Sparse) -> KarpMiller {
        KarpMiller {
            seen: HashSet::from([init.clone()]),
            nodes: vec![init],
            parent: vec![None],
            tried: vec![0],
            truncated: false,
        }
    }

    fn saturate(&mut self, trans: &[(Sparse, Sparse)], max_nodes: usize) {
        let mut x = 0;
        while x < self.nodes.len() {
            for t in self.tried[x]..trans.len() {
                let (pre, post) = &trans[t];
                if !leq(pre, &self.nodes[x]) {
                    continue;
                }
                let next = self.accelerate(x, fire_sparse(&self.nodes[x], pre, post));
                if self.seen.contains(&next) {
                    continue;
                }
                if self.nodes.len() >= max_nodes {
                    self.truncated = true;
                    continue;
                }
                self.seen.insert(next.clone());
                self.nodes.push(next);
                self.parent.push(Some(x));
                self.tried.push(0);
            }
            self.tried[x] = trans.len();
            x += 1;
        }
    }

    /// Sets to `OMEGA` every place that strictly grew over an ancestor
    /// covered by `next`.
    fn accelerate(&self, x: usize, mut next: Sparse) -> Sparse {
        loop {
            let mut changed = false;
            let mut anc = Some(x);
            while let Some(a) = anc {
                let am = &self.nodes[a];
                if *am != next && leq(am, &next) {
                    for (p, v) in next.iter_mut() {
                        let w = count_at(am, *p);
                        if *v != OMEGA && w != OMEGA && *v > w {
                            *v = OMEGA;
                            changed = true;
                        }
                    }
                }
                anc = self.parent[a];
            }
            if !changed {
                return next;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Every place markable, every transition has a nonempty preset and
/// fires at some reachable marking.
pub fn is_reduced(net: &PTNet, budget: &Budget) -> Verdict {
    if net.transitions.iter().any(|t| t.pre.is_empty()) {
        return Verdict::No;
    }
    let cov = net.coverability(budget.max_states);
    if cov.truncated {
        return Verdict::Unknown;
    }
    let markable = (0..net.num_places() as u32).all(|i| cov.covers(&Marking::singleton(PlaceId(i))));
    if markable && net.transitions.iter().all(|t| cov.covers(&t.pre)) {
        Verdict::Yes
    } else {
        Verdict::No
    }
}

/// No reachable marking puts two tokens on one place.
pub fn is_safe(net: &PTNet, budget: &Budget) -> Verdict {
    if net.initial.iter().any(|(_, k)| k > 1) {
        return Verdict::No;
    }
    let cov = net.coverability(budget.max_states);
    if cov.exceeds_one() {
        return Verdict::No;
    }
    if cov.truncated {
        Verdict::Unknown
    } else {
        Verdict::Yes
    }
}

/// Interleaving marking graph by breadth-first token game.
pub fn marking_graph(net: &PTNet, budget: &Budget) -> Lts {
    let mut index: HashMap<Marking, usize> = HashMap::new();
    let mut states = vec![net.initial.clone()];
    index.insert(net.initial.clone(), 0);
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    while let Some(s) = queue.pop_front() {
        let m = states[s].clone();
        for t in net.enabled(&m) {
            let m2 = net.fire(&m, t);
            let target = match index.get(&m2) {
                Some(&k) => k,
                None => {
                    if states.len() >= budget.max_states {
                        complete = false;
                        continue;
                    }
                    states.push(m2.clone());
                    index.insert(m2, states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            transitions.push((s, net.transitions[t].label.clone(), target));
        }
    }
    Lts {
        states: states.iter().map(|m| State::Marking(net.marking_string(m))).collect(),
        transitions,
        initial: 0,
        complete,
    }
}

/// Source of fresh restricted names `Res(0)`, `Res(1)`, …
#[derive(Clone, Debug, Default)]
pub struct FreshAllocator {
    next: u32,
    log: Vec<Name>,
}

impl FreshAllocator {
    pub fn new() -> FreshAllocator {
        FreshAllocator::default()
    }

    pub fn fresh(&mut self) -> Name {
        let n = Name::Res(self.next);
        self.next += 1;
        self.log.push(n.clone());
        n
    }

    pub fn allocated(&self) -> &[Name] {
        &self.log
    }
}

/// A marking over places given as canonical sequential terms.
pub type TermMarking = Multiset<Term>;

/// A net transition over term places.
pub type TermTransition = (TermMarking, Sequence, TermMarking);

type PlaceMoves = Arc<Vec<(Sequence, TermMarking)>>;

/// One net-construction session: fresh names, sync cache and the moves
/// of every place seen so far. Each place's moves are derived once, so
/// each rule instance allocates its fresh names exactly once.
pub struct NetSession<'a> {
    env: &'a Env,
    budget: Budget,
    pub fresh: FreshAllocator,
    sync: SyncTable,
    moves: HashMap<Term, PlaceMoves>,
    in_progress: HashSet<Term>,
    truncated: bool,
}

impl<'a> NetSession<'a> {
    pub fn new(env: &'a Env, mode: SyncMode, budget: Budget) -> NetSession<'a> {
        NetSession {
            env,
            budget,
            fresh: FreshAllocator::new(),
            sync: SyncTable::new(mode),
            moves: HashMap::new(),
            in_progress: HashSet::new(),
            truncated: false,
        }
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Decomposition into a marking of sequential places.
    pub fn dec(&mut self, t: &Term) -> Result<TermMarking> {
        let mut out = TermMarking::new();
        self.dec_into(t, &mut out, 0)?;
        Ok(out)
    }

    fn dec_into(&mut self, t: &Term, out: &mut TermMarking, depth: usize) -> Result<()> {
        match t {
            Term::Nil => {}
            Term::Prefix(..) | Term::Strong(..) | Term::Sum(..) => {
                out.insert(canonical_binders(t, self.env), 1);
            }
            Term::Par(l, r) => {
                self.dec_into(l, out, depth)?;
                self.dec_into(r, out, depth)?;
            }
            Term::Restrict(a, q) => {
                let fresh = self.fresh.fresh();
                let body = self.env.substitute(q, a, &fresh);
                self.dec_into(&body, out, depth)?;
            }
            Term::Const(c) => {
                if depth >= MAX_UNFOLD_DEPTH {
                    return Err(Error::Unguarded(c.name.to_string()));
                }
                let body = self.env.unfold(c)?;
                self.dec_into(&body, out, depth + 1)?;
            }
        }
        Ok(())
    }

    /// Single-place transitions `{p} →σ K`, including restricted labels.
    pub fn place_moves(&mut self, p: &Term) -> Result<PlaceMoves> {
        if let Some(m) = self.moves.get(p) {
            return Ok(m.clone());
        }
        if !self.in_progress.insert(p.clone()) {
            return Err(Error::Unguarded(p.to_string()));
        }
        let result = self.derive_place(p);
        self.in_progress.remove(p);
        let moves = Arc::new(result?);
        self.moves.insert(p.clone(), moves.clone());
        Ok(moves)
    }

    fn derive_place(&mut self, p: &Term) -> Result<Vec<(Sequence, TermMarking)>> {
        Ok(match p {
            Term::Nil => Vec::new(),
            Term::Prefix(a, q) => vec![(Sequence::single(a.clone()), self.dec(q)?)],
            Term::Sum(l, r) => {
                let mut out = self.place_moves(l)?.to_vec();
                for m in self.place_moves(r)?.iter() {
                    if !out.contains(m) {
                        out.push(m.clone());
                    }
                }
                out
            }
            Term::Strong(a, q) => {
                let m = self.dec(q)?;
                let seed: Vec<(Term, Cap)> =
                    m.iter().map(|(t, k)| (t.clone(), Cap::Finite(k))).collect();
                let mut out = Vec::new();
                for (pre, s, post) in self.closure(&seed)? {
                    if s.len() + 1 > self.budget.max_seq_len {
                        self.truncated = true;
                        continue;
                    }
                    let label = s.prepend(a.clone());
                    let target = post.union(&m.difference(&pre));
                    if !out.iter().any(|(l, k)| *l == label && *k == target) {
                        out.push((label, target));
                    }
                }
                out
            }
            _ => return Err(Error::IllFormed(format!("`{p}` is not a sequential place"))),
        })
    }

    fn closure(&mut self, seed: &[(Term, Cap)]) -> Result<Vec<TermTransition>> {
        let mut resources = Vec::with_capacity(seed.len());
        for (t, cap) in seed {
            let moves = self.place_moves(t)?;
            resources.push(Resource {
                cap: *cap,
                moves: moves.to_vec(),
            });
        }
        let limits = Limits {
            max_seq_len: self.budget.max_seq_len,
            max_items: self.budget.max_transitions,
        };
        let closure = close(&resources, &mut self.sync, &limits);
        self.truncated |= closure.truncated;
        Ok(closure
            .items
            .into_iter()
            .map(|item| {
                let pre: TermMarking = item
                    .usage
                    .iter()
                    .map(|(i, u)| (seed[*i].0.clone(), u))
                    .collect();
                (pre, item.label, item.post)
            })
            .collect())
    }

    /// Observable transitions `H →σ K` with `H` within the seed; `None`
    /// capacities are unbounded.
    pub fn derive_transitions(&mut self, seed: &[(Term, Option<u32>)]) -> Result<Vec<TermTransition>> {
        let seed: Vec<(Term, Cap)> = seed
            .iter()
            .map(|(t, k)| (t.clone(), k.map_or(Cap::Omega, Cap::Finite)))
            .collect();
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for tr in self.closure(&seed)? {
            if tr.1.is_observable() && seen.insert(tr.clone()) {
                out.push(tr);
            }
        }
        Ok(out)
    }
}

/// Decomposition with a fresh session.
pub fn dec(t: &Term, env: &Env, fresh: &mut FreshAllocator) -> Result<TermMarking> {
    let mut s = NetSession::new(env, SyncMode::General, Budget::default());
    s.fresh = std::mem::take(fresh);
    let m = s.dec(t);
    *fresh = std::mem::take(&mut s.fresh);
    m
}

/// Net transitions enabled within `seed` (finite capacities).
pub fn derive_transitions(
    seed: &TermMarking,
    env: &Env,
    fresh: &mut FreshAllocator,
    mode: SyncMode,
    budget: Budget,
) -> Result<Vec<TermTransition>> {
    let mut s = NetSession::new(env, mode, budget);
    s.fresh = std::mem::take(fresh);
    let caps: Vec<(Term, Option<u32>)> = seed.iter().map(|(t, k)| (t.clone(), Some(k))).collect();
    let r = s.derive_transitions(&caps);
    *fresh = std::mem::take(&mut s.fresh);
    r
}

/// The net of a process: places and transitions reachable from
/// `dec(main)`, discovered round by round. A Karp–Miller tree of the
/// current net is extended with the transitions found so far, and
/// transitions are derived at each of its new nodes (`OMEGA` places
/// unbounded) until no node is added.
pub fn build_net(main: &Term, env: &Env, mode: SyncMode, budget: Budget) -> Result<PTNet> {
    let mut session = NetSession::new(env, mode, budget);
    let init = session.dec(main)?;
    let mut net = PTNet::new("main");
    let mut ids: HashMap<Term, PlaceId> = HashMap::new();
    let mut intern = |net: &mut PTNet, t: &Term| -> PlaceId {
        if let Some(&id) = ids.get(t) {
            return id;
        }
        let id = net.add_place(&format!("s{}", net.num_places() + 1), Some(t.clone()));
        ids.insert(t.clone(), id);
        id
    };
    net.initial = init.iter().map(|(t, k)| (intern(&mut net, t), k)).collect();
    let mut known: HashSet<(Marking, Sequence, Marking)> = HashSet::new();
    let mut trans: Vec<(Sparse, Sparse)> = Vec::new();
    let mut km = KarpMiller::new(sparse(&net.initial));
    let mut derived = 0;
    let mut complete = true;
    'rounds: loop {
        km.saturate(&trans, budget.max_states);
        if derived == km.nodes.len() {
            break;
        }
        while derived < km.nodes.len() {
            let seed: Vec<(Term, Option<u32>)> = km.nodes[derived]
                .iter()
                .map(|&(p, k)| {
                    let t = net.places[p as usize].term.clone().expect("term place");
                    (t, (k != OMEGA).then_some(k))
                })
                .collect();
            derived += 1;
            for (pre, label, post) in session.derive_transitions(&seed)? {
                let pre: Marking = pre.iter().map(|(t, k)| (intern(&mut net, t), k)).collect();
                let post: Marking = post.iter().map(|(t, k)| (intern(&mut net, t), k)).collect();
                if known.insert((pre.clone(), label.clone(), post.clone())) {
                    trans.push((sparse(&pre), sparse(&post)));
                    let name = format!("t{}", net.num_transitions() + 1);
                    net.add_transition(&name, pre, label, post);
                }
                if net.num_places() > budget.max_places || net.num_transitions() > budget.max_transitions {
                    complete = false;
                    break 'rounds;
                }
            }
        }
    }
    complete &= !km.truncated;
    net.complete = complete && !session.truncated();
    Ok(net)
}

/// Human-readable listing: places with their terms, then transitions.
pub fn describe(net: &PTNet) -> String {
    let mut out = String::new();
    for p in &net.places {
        match &p.term {
            Some(t) => out.push_str(&format!("place {} = {}\n", p.name, t)),
            None => out.push_str(&format!("place {}\n", p.name)),
        }
    }
    out.push_str(&format!("initial {}\n", net.marking_string(&net.initial)));
    for t in &net.transitions {
        out.push_str(&format!(
            "{}: {} --{}--> {}\n",
            t.name,
            net.marking_string(&t.pre),
            t.label,
            net.marking_string(&t.post)
        ));
    }
    out
}

/// Transition-set view keyed by place indices, for structural comparisons.
pub fn transition_set(net: &PTNet) -> BTreeSet<(Vec<(u32, u32)>, Sequence, Vec<(u32, u32)>)> {
    let flat = |m: &Marking| m.iter().map(|(p, k)| (p.0, k)).collect::<Vec<_>>();
    net.transitions
        .iter()
        .map(|t| (flat(&t.pre), t.label.clone(), flat(&t.post)))
        .collect()
}

/// Place multiplicity table for a dense marking, by name.
pub fn marking_by_name(net: &PTNet, m: &Marking) -> BTreeMap<String, u32> {
    m.iter().map(|(p, k)| (net.place_name(*p).to_string(), k)).collect()
}
