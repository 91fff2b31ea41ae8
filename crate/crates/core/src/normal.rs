//! Structural-congruence normal forms.
//!
//! A state `(ν r1)…(ν rk)(q1 | … | qn)` is kept as a list of canonically
//! numbered bound names plus a multiset of sequential components.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::env::{max_tmp, Env};
use crate::error::{Error, Result};
use crate::multiset::Multiset;
use crate::term::{Name, Term};

/// Upper bound on nested constant unfoldings while flattening one term.
const MAX_UNFOLD_DEPTH: usize = 512;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    /// `Bound(0)`, `Bound(1)`, … in first-use order.
    pub restricted: Vec<Name>,
    /// Sequential components with their multiplicities.
    pub components: Multiset<Term>,
}

impl NormalForm {
    pub fn to_term(&self) -> Term {
        Term::restrict_all(
            self.restricted.iter().cloned(),
            Term::par_all(self.components.elements().cloned()),
        )
    }

    pub fn is_terminated(&self) -> bool {
        self.components.support().all(|c| *c == Term::Nil)
    }

    /// Number of components, counting multiplicity.
    pub fn width(&self) -> u32 {
        self.components.size()
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.restricted.is_empty() {
            let names: Vec<String> = self.restricted.iter().map(|n| n.to_string()).collect();
            write!(f, "new({}) ", names.join(", "))?;
        }
        if self.components.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.components.elements().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Keep `0` components and restrictions whose name is not free.
    pub strict: bool,
}

pub fn normalize(t: &Term, env: &Env) -> Result<NormalForm> {
    normalize_with(t, env, NormalizeOptions::default())
}

pub fn normalize_with(t: &Term, env: &Env, opts: NormalizeOptions) -> Result<NormalForm> {
    extend(Vec::new(), Multiset::new(), std::slice::from_ref(t), env, opts.strict)
}

/// Normal form of `(ν restricted)(base | extra…)` where `base` already
/// holds canonical sequential components free of `Tmp` names.
pub(crate) fn extend(
    mut restricted: Vec<Name>,
    mut comps: Multiset<Term>,
    extra: &[Term],
    env: &Env,
    strict: bool,
) -> Result<NormalForm> {
    let mut next = extra.iter().filter_map(max_tmp).max().map_or(0, |k| k + 1);
    for t in extra {
        let flat = flatten(t, env, strict, &mut next)?;
        restricted.extend(flat.restricted);
        for c in &flat.components {
            comps.insert(canonical_binders(c, env), 1);
        }
    }
    if !strict && !restricted.is_empty() {
        let mut free = BTreeSet::new();
        for c in comps.support() {
            free.extend(env.free_names(c)?);
        }
        restricted.retain(|n| free.contains(n));
    }
    Ok(number(restricted, comps, env))
}

/// Top-level shape of a process: extruded restrictions (as `Tmp` names)
/// and the flattened parallel components, constants unfolded.
pub(crate) struct Flat {
    pub restricted: Vec<Name>,
    pub components: Vec<Term>,
}

/// Flattens `t`; fresh restriction names start at `*next`.
pub(crate) fn flatten(t: &Term, env: &Env, strict: bool, next: &mut u32) -> Result<Flat> {
    let mut flat = Flat {
        restricted: Vec::new(),
        components: Vec::new(),
    };
    flatten_into(t, env, strict, next, &mut flat, 0)?;
    Ok(flat)
}

fn flatten_into(
    t: &Term,
    env: &Env,
    strict: bool,
    next: &mut u32,
    out: &mut Flat,
    depth: usize,
) -> Result<()> {
    match t {
        Term::Nil => {
            if strict {
                out.components.push(Term::Nil);
            }
        }
        Term::Par(l, r) => {
            flatten_into(l, env, strict, next, out, depth)?;
            flatten_into(r, env, strict, next, out, depth)?;
        }
        Term::Restrict(x, body) => {
            let z = Name::Tmp(*next);
            *next += 1;
            let renamed = env.rename(body, &BTreeMap::from([(x.clone(), z.clone())]));
            out.restricted.push(z);
            flatten_into(&renamed, env, strict, next, out, depth)?;
        }
        Term::Const(c) => {
            if depth >= MAX_UNFOLD_DEPTH {
                return Err(Error::Unguarded(c.name.to_string()));
            }
            let body = env.unfold(c)?;
            flatten_into(&body, env, strict, next, out, depth + 1)?;
        }
        Term::Prefix(..) | Term::Strong(..) | Term::Sum(..) => out.components.push(t.clone()),
    }
    Ok(())
}

/// Renames every restriction below the top level to `Local(depth)`, where
/// depth counts the enclosing binders of that restriction.
pub fn canonical_binders(t: &Term, env: &Env) -> Term {
    canon(t, &BTreeMap::new(), 0, env)
}

fn canon(t: &Term, map: &BTreeMap<Name, Name>, depth: u32, env: &Env) -> Term {
    let sub = |n: &Name| map.get(n).unwrap_or(n).clone();
    match t {
        Term::Nil => Term::Nil,
        Term::Prefix(a, p) => Term::prefix(a.map_name(sub), canon(p, map, depth, env)),
        Term::Strong(a, p) => Term::strong(a.map_name(sub), canon(p, map, depth, env)),
        Term::Sum(l, r) => Term::sum(canon(l, map, depth, env), canon(r, map, depth, env)),
        Term::Par(l, r) => Term::par(canon(l, map, depth, env), canon(r, map, depth, env)),
        Term::Restrict(x, p) => {
            let mut inner = map.clone();
            inner.insert(x.clone(), Name::Local(depth));
            Term::restrict(Name::Local(depth), canon(p, &inner, depth + 1, env))
        }
        Term::Const(c) if map.is_empty() => Term::Const(c.clone()),
        Term::Const(c) => Term::Const(env.compose(c, sub)),
    }
}

/// Numbers the top-level names `Bound(0..)` by first use and sorts.
fn number(restricted: Vec<Name>, comps: Multiset<Term>, env: &Env) -> NormalForm {
    if restricted.is_empty() {
        return NormalForm {
            restricted,
            components: comps,
        };
    }
    let set: BTreeSet<Name> = restricted.iter().cloned().collect();
    let blank: BTreeMap<Name, Name> = set
        .iter()
        .map(|n| (n.clone(), Name::Tmp(u32::MAX)))
        .collect();
    let mut keyed: Vec<(Term, Term, u32)> = comps
        .iter()
        .map(|(c, k)| (env.rename(c, &blank), c.clone(), k))
        .collect();
    keyed.sort();
    let mut comps: Vec<(Term, u32)> = keyed.into_iter().map(|(_, c, k)| (c, k)).collect();
    let mut order = first_use(&comps, &set, &restricted);
    for _ in 0..4 {
        let map: BTreeMap<Name, Name> = order
            .iter()
            .enumerate()
            .map(|(k, n)| (n.clone(), Name::Bound(k as u32)))
            .filter(|(a, b)| a != b)
            .collect();
        comps = comps.iter().map(|(c, k)| (env.rename(c, &map), *k)).collect();
        comps.sort();
        let bound: Vec<Name> = (0..order.len() as u32).map(Name::Bound).collect();
        let bset: BTreeSet<Name> = bound.iter().cloned().collect();
        let again = first_use(&comps, &bset, &bound);
        if again == bound {
            break;
        }
        order = again;
    }
    NormalForm {
        restricted: (0..order.len() as u32).map(Name::Bound).collect(),
        components: comps.into_iter().collect(),
    }
}

fn first_use(comps: &[(Term, u32)], set: &BTreeSet<Name>, all: &[Name]) -> Vec<Name> {
    let mut order: Vec<Name> = Vec::new();
    let mut placed: BTreeSet<Name> = BTreeSet::new();
    for (c, _) in comps {
        c.visit_names(&mut |n| {
            if set.contains(n) && placed.insert(n.clone()) {
                order.push(n.clone());
            }
        });
    }
    for n in all {
        if placed.insert(n.clone()) {
            order.push(n.clone());
        }
    }
    order
}
