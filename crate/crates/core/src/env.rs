//! Constant environments, free names and syntactic substitution.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::term::{Action, ConstRef, Name, Term};

/// The defining equations `C ≝ q` of a program, together with the
/// free-name table of every constant and a memo of unfolded derived
/// constants.
pub struct Env {
    defs: BTreeMap<Arc<str>, Term>,
    order: Vec<Arc<str>>,
    free: BTreeMap<Arc<str>, BTreeSet<Name>>,
    unfolded: Mutex<HashMap<ConstRef, Term>>,
}

impl Env {
    pub fn new(defs: impl IntoIterator<Item = (String, Term)>) -> Env {
        let mut map = BTreeMap::new();
        let mut order = Vec::new();
        for (name, body) in defs {
            let key: Arc<str> = Arc::from(name.as_str());
            if map.insert(key.clone(), body).is_none() {
                order.push(key);
            }
        }
        let free = free_name_table(&map);
        Env {
            defs: map,
            order,
            free,
            unfolded: Mutex::new(HashMap::new()),
        }
    }

    pub fn empty() -> Env {
        Env::new(Vec::new())
    }

    pub fn get(&self, name: &str) -> Option<&Term> {
        self.defs.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.defs.contains_key(name)
    }

    /// Definitions in declaration order.
    pub fn definitions(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.order
            .iter()
            .map(move |k| (k.as_ref(), &self.defs[k]))
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    /// Free names of a base constant's body (least fixpoint over all
    /// constants). Empty for an undefined constant.
    pub fn constant_free_names(&self, name: &str) -> &BTreeSet<Name> {
        static EMPTY: BTreeSet<Name> = BTreeSet::new();
        self.free.get(name).unwrap_or(&EMPTY)
    }

    /// Free names of `t`, unfolding constants through the fixpoint table.
    pub fn free_names(&self, t: &Term) -> Result<BTreeSet<Name>> {
        let mut out = BTreeSet::new();
        self.collect_free(t, &mut out, &mut Vec::new())?;
        Ok(out)
    }

    fn collect_free(
        &self,
        t: &Term,
        out: &mut BTreeSet<Name>,
        bound: &mut Vec<Name>,
    ) -> Result<()> {
        match t {
            Term::Nil => {}
            Term::Prefix(a, p) | Term::Strong(a, p) => {
                if let Some(n) = a.name() {
                    if !bound.contains(n) {
                        out.insert(n.clone());
                    }
                }
                self.collect_free(p, out, bound)?;
            }
            Term::Sum(l, r) | Term::Par(l, r) => {
                self.collect_free(l, out, bound)?;
                self.collect_free(r, out, bound)?;
            }
            Term::Restrict(x, p) => {
                bound.push(x.clone());
                let r = self.collect_free(p, out, bound);
                bound.pop();
                r?;
            }
            Term::Const(c) => {
                if !self.defs.contains_key(&c.name) {
                    return Err(Error::UndefinedConstant(c.name.to_string()));
                }
                for n in self.constant_free_names(&c.name) {
                    let img = c.image(n);
                    if !bound.contains(img) {
                        out.insert(img.clone());
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies `f` to the renaming of `c`: the result maps each free name
    /// `x` of the base body to `f(ρ(x))`, identity pairs dropped.
    pub(crate) fn compose(&self, c: &ConstRef, f: impl Fn(&Name) -> Name) -> ConstRef {
        let renaming: Vec<(Name, Name)> = self
            .constant_free_names(&c.name)
            .iter()
            .filter_map(|x| {
                let y = f(c.image(x));
                (y != *x).then(|| (x.clone(), y))
            })
            .collect();
        ConstRef {
            name: c.name.clone(),
            renaming: Arc::from(renaming),
        }
    }

    /// The body of a (possibly derived) constant. Derived bodies are
    /// memoized, so repeated unfoldings share one term.
    pub fn unfold(&self, c: &ConstRef) -> Result<Term> {
        let base = self
            .defs
            .get(&c.name)
            .ok_or_else(|| Error::UndefinedConstant(c.name.to_string()))?;
        if c.is_plain() {
            return Ok(base.clone());
        }
        let mut memo = self.unfolded.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = memo.get(c) {
            return Ok(t.clone());
        }
        let map: BTreeMap<Name, Name> = c.renaming.iter().cloned().collect();
        let body = self.rename(base, &map);
        memo.insert(c.clone(), body.clone());
        Ok(body)
    }

    /// Simultaneous capture-avoiding renaming of free names.
    pub fn rename(&self, t: &Term, map: &BTreeMap<Name, Name>) -> Term {
        if map.is_empty() {
            return t.clone();
        }
        match t {
            Term::Nil => Term::Nil,
            Term::Prefix(a, p) => Term::prefix(rename_action(a, map), self.rename(p, map)),
            Term::Strong(a, p) => Term::strong(rename_action(a, map), self.rename(p, map)),
            Term::Sum(l, r) => Term::sum(self.rename(l, map), self.rename(r, map)),
            Term::Par(l, r) => Term::par(self.rename(l, map), self.rename(r, map)),
            Term::Restrict(x, p) => {
                let mut inner = map.clone();
                inner.remove(x);
                if inner.values().any(|v| v == x) {
                    let z = fresh_tmp(p, inner.values());
                    inner.insert(x.clone(), z.clone());
                    Term::restrict(z, self.rename(p, &inner))
                } else {
                    Term::restrict(x.clone(), self.rename(p, &inner))
                }
            }
            Term::Const(c) => Term::Const(self.compose(c, |n| map.get(n).unwrap_or(n).clone())),
        }
    }

    /// `t{to/from}` with the bound-name-converting rule for restrictions:
    /// `((ν from) q){to/from} = (ν to)(q{to/from})`. Under a constant the
    /// result is the derived constant `C{to/from}`. The caller guarantees
    /// that `to` is fresh for the scopes involved; a binder named `to`
    /// around a free `from` is still alpha-renamed out of the way.
    pub fn substitute(&self, t: &Term, from: &Name, to: &Name) -> Term {
        if from == to {
            return t.clone();
        }
        match t {
            Term::Nil => Term::Nil,
            Term::Prefix(a, p) => Term::prefix(subst_action(a, from, to), self.substitute(p, from, to)),
            Term::Strong(a, p) => Term::strong(subst_action(a, from, to), self.substitute(p, from, to)),
            Term::Sum(l, r) => Term::sum(self.substitute(l, from, to), self.substitute(r, from, to)),
            Term::Par(l, r) => Term::par(self.substitute(l, from, to), self.substitute(r, from, to)),
            Term::Restrict(x, p) if x == from => Term::restrict(to.clone(), self.substitute(p, from, to)),
            Term::Restrict(x, p) if x == to && self.mentions_free(p, from) => {
                let z = fresh_tmp(p, [to, from]);
                let renamed = self.rename(p, &BTreeMap::from([(to.clone(), z.clone())]));
                Term::restrict(z, self.substitute(&renamed, from, to))
            }
            Term::Restrict(x, p) => Term::restrict(x.clone(), self.substitute(p, from, to)),
            Term::Const(c) => Term::Const(self.compose(c, |n| if n == from { to.clone() } else { n.clone() })),
        }
    }

    fn mentions_free(&self, t: &Term, n: &Name) -> bool {
        self.free_names(t).map(|s| s.contains(n)).unwrap_or(true)
    }
}

impl Clone for Env {
    fn clone(&self) -> Env {
        Env {
            defs: self.defs.clone(),
            order: self.order.clone(),
            free: self.free.clone(),
            unfolded: Mutex::new(HashMap::new()),
        }
    }
}

impl fmt::Debug for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.definitions()).finish()
    }
}

fn rename_action(a: &Action, map: &BTreeMap<Name, Name>) -> Action {
    a.map_name(|n| map.get(n).unwrap_or(n).clone())
}

fn subst_action(a: &Action, from: &Name, to: &Name) -> Action {
    a.map_name(|n| if n == from { to.clone() } else { n.clone() })
}

/// Largest `Tmp` index occurring anywhere in `t`.
pub(crate) fn max_tmp(t: &Term) -> Option<u32> {
    let mut best = None;
    t.visit_names(&mut |n| {
        if let Some(k) = n.tmp_index() {
            best = Some(best.map_or(k, |b: u32| b.max(k)));
        }
    });
    best
}

fn fresh_tmp<'a>(t: &Term, avoid: impl IntoIterator<Item = &'a Name>) -> Name {
    let mut next = max_tmp(t).map_or(0, |k| k + 1);
    for n in avoid {
        if let Some(k) = n.tmp_index() {
            next = next.max(k + 1);
        }
    }
    Name::Tmp(next)
}

/// Least fixpoint of `fn(C) = fn(body(C))`, reading constants through the
/// current approximation.
fn free_name_table(defs: &BTreeMap<Arc<str>, Term>) -> BTreeMap<Arc<str>, BTreeSet<Name>> {
    let mut table: BTreeMap<Arc<str>, BTreeSet<Name>> =
        defs.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
    loop {
        let mut changed = false;
        for (k, body) in defs {
            let mut out = BTreeSet::new();
            approx_free(body, &table, &mut out, &mut Vec::new());
            if out != table[k] {
                table.insert(k.clone(), out);
                changed = true;
            }
        }
        if !changed {
            return table;
        }
    }
}

fn approx_free(
    t: &Term,
    table: &BTreeMap<Arc<str>, BTreeSet<Name>>,
    out: &mut BTreeSet<Name>,
    bound: &mut Vec<Name>,
) {
    match t {
        Term::Nil => {}
        Term::Prefix(a, p) | Term::Strong(a, p) => {
            if let Some(n) = a.name() {
                if !bound.contains(n) {
                    out.insert(n.clone());
                }
            }
            approx_free(p, table, out, bound);
        }
        Term::Sum(l, r) | Term::Par(l, r) => {
            approx_free(l, table, out, bound);
            approx_free(r, table, out, bound);
        }
        Term::Restrict(x, p) => {
            bound.push(x.clone());
            approx_free(p, table, out, bound);
            bound.pop();
        }
        Term::Const(c) => {
            if let Some(names) = table.get(&c.name) {
                for n in names {
                    let img = c.image(n);
                    if !bound.contains(img) {
                        out.insert(img.clone());
                    }
                }
            }
        }
    }
}

/// Free names of `t` in `env`.
pub fn free_names(t: &Term, env: &Env) -> Result<BTreeSet<Name>> {
    env.free_names(t)
}

/// Syntactic substitution `t{to/from}`; see [`Env::substitute`].
pub fn substitute(t: &Term, from: &Name, to: &Name, env: &Env) -> Term {
    env.substitute(t, from, to)
}
