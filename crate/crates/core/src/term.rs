//! Abstract syntax of Multi-CCS processes.

use std::fmt;
use std::sync::Arc;

/// A channel name.
///
/// User programs only ever contain [`Name::Vis`]. The other namespaces are
/// produced internally: `Res` by decomposition into net places, `Bound` for
/// the canonically numbered top-level restrictions of a normal form, `Local`
/// for restrictions still folded under a prefix, and `Tmp` for scratch names
/// during normalization and capture-avoiding renaming.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Name {
    Vis(Arc<str>),
    Res(u32),
    Bound(u32),
    Local(u32),
    Tmp(u32),
}

impl Name {
    pub fn vis(s: &str) -> Name {
        Name::Vis(Arc::from(s))
    }

    pub fn is_visible(&self) -> bool {
        matches!(self, Name::Vis(_))
    }

    pub(crate) fn tmp_index(&self) -> Option<u32> {
        match self {
            Name::Tmp(k) => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Name::Vis(s) => write!(f, "{s}"),
            Name::Res(k) => write!(f, "_d{k}"),
            Name::Bound(k) => write!(f, "_v{k}"),
            Name::Local(k) => write!(f, "_l{k}"),
            Name::Tmp(k) => write!(f, "_t{k}"),
        }
    }
}

/// An action: input `a`, output `ā` or the silent `τ`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Tau,
    In(Name),
    Out(Name),
}

impl Action {
    pub fn input(s: &str) -> Action {
        Action::In(Name::vis(s))
    }

    pub fn output(s: &str) -> Action {
        Action::Out(Name::vis(s))
    }

    /// Complement; `None` on `τ`.
    pub fn complement(&self) -> Option<Action> {
        match self {
            Action::Tau => None,
            Action::In(n) => Some(Action::Out(n.clone())),
            Action::Out(n) => Some(Action::In(n.clone())),
        }
    }

    pub fn is_complement_of(&self, other: &Action) -> bool {
        match (self, other) {
            (Action::In(a), Action::Out(b)) | (Action::Out(a), Action::In(b)) => a == b,
            _ => false,
        }
    }

    pub fn name(&self) -> Option<&Name> {
        match self {
            Action::Tau => None,
            Action::In(n) | Action::Out(n) => Some(n),
        }
    }

    pub fn map_name(&self, f: impl FnOnce(&Name) -> Name) -> Action {
        match self {
            Action::Tau => Action::Tau,
            Action::In(n) => Action::In(f(n)),
            Action::Out(n) => Action::Out(f(n)),
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Tau => write!(f, "tau"),
            Action::In(n) => write!(f, "{n}"),
            Action::Out(n) => write!(f, "~{n}"),
        }
    }
}

/// A transition label: a nonempty sequence of actions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequence(Vec<Action>);

impl Sequence {
    pub fn new(actions: Vec<Action>) -> Option<Sequence> {
        if actions.is_empty() {
            None
        } else {
            Some(Sequence(actions))
        }
    }

    pub fn single(a: Action) -> Sequence {
        Sequence(vec![a])
    }

    pub fn tau() -> Sequence {
        Sequence::single(Action::Tau)
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &Action {
        &self.0[0]
    }

    /// The sequence without its first action, if anything remains.
    pub fn rest(&self) -> Option<Sequence> {
        Sequence::new(self.0[1..].to_vec())
    }

    pub fn prepend(&self, a: Action) -> Sequence {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(a);
        v.extend(self.0.iter().cloned());
        Sequence(v)
    }

    pub fn is_tau(&self) -> bool {
        self.0.len() == 1 && self.0[0] == Action::Tau
    }

    /// True iff every named action uses a visible name.
    pub fn is_observable(&self) -> bool {
        self.0
            .iter()
            .all(|a| a.name().map_or(true, Name::is_visible))
    }

    pub fn mentions(&self, n: &Name) -> bool {
        self.0.iter().any(|a| a.name() == Some(n))
    }

    /// Space-separated rendering used for graph labels.
    pub fn spaced(&self) -> String {
        self.0
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Reference to a process constant, possibly with a renaming applied.
///
/// A plain constant `C` has an empty renaming; `C{b/a}` is the derived
/// constant whose body is the body of `C` with `b` for `a`. The renaming is
/// kept sorted, restricted to the free names of the body and free of
/// identity pairs, so equal derived constants have equal references.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConstRef {
    pub name: Arc<str>,
    pub renaming: Arc<[(Name, Name)]>,
}

impl ConstRef {
    pub fn plain(name: &str) -> ConstRef {
        ConstRef {
            name: Arc::from(name),
            renaming: Arc::from(Vec::new()),
        }
    }

    pub fn is_plain(&self) -> bool {
        self.renaming.is_empty()
    }

    /// Image of a free name of the base body under this reference's renaming.
    pub fn image<'a>(&'a self, n: &'a Name) -> &'a Name {
        self.renaming
            .iter()
            .find(|(k, _)| k == n)
            .map(|(_, v)| v)
            .unwrap_or(n)
    }
}

impl fmt::Display for ConstRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.renaming.is_empty() {
            write!(f, "{{")?;
            for (i, (from, to)) in self.renaming.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{to}/{from}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// A Multi-CCS process term.
///
/// The derived order (constructor tag, then action, then children) is the
/// total structural order used to sort normal-form components.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Nil,
    Prefix(Action, Arc<Term>),
    Strong(Action, Arc<Term>),
    Sum(Arc<Term>, Arc<Term>),
    Par(Arc<Term>, Arc<Term>),
    Restrict(Name, Arc<Term>),
    Const(ConstRef),
}

impl Term {
    pub fn prefix(a: Action, body: Term) -> Term {
        Term::Prefix(a, Arc::new(body))
    }

    pub fn strong(a: Action, body: Term) -> Term {
        Term::Strong(a, Arc::new(body))
    }

    pub fn sum(l: Term, r: Term) -> Term {
        Term::Sum(Arc::new(l), Arc::new(r))
    }

    pub fn par(l: Term, r: Term) -> Term {
        Term::Par(Arc::new(l), Arc::new(r))
    }

    pub fn restrict(n: Name, body: Term) -> Term {
        Term::Restrict(n, Arc::new(body))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(ConstRef::plain(name))
    }

    /// Left-associated parallel composition; `0` when empty.
    pub fn par_all(items: impl IntoIterator<Item = Term>) -> Term {
        items
            .into_iter()
            .reduce(Term::par)
            .unwrap_or(Term::Nil)
    }

    /// Left-associated sum; `0` when empty.
    pub fn sum_all(items: impl IntoIterator<Item = Term>) -> Term {
        items
            .into_iter()
            .reduce(Term::sum)
            .unwrap_or(Term::Nil)
    }

    /// Restricts `names`, the first one outermost.
    pub fn restrict_all(names: impl IntoIterator<Item = Name>, body: Term) -> Term {
        let names: Vec<Name> = names.into_iter().collect();
        names
            .into_iter()
            .rev()
            .fold(body, |acc, n| Term::restrict(n, acc))
    }

    /// Sequential: `0`, a prefix, a strong prefix or a sum.
    pub fn is_sequential(&self) -> bool {
        matches!(
            self,
            Term::Nil | Term::Prefix(..) | Term::Strong(..) | Term::Sum(..)
        )
    }

    /// Number of constructors, for size-bounded generation and tests.
    pub fn size(&self) -> usize {
        match self {
            Term::Nil | Term::Const(_) => 1,
            Term::Prefix(_, p) | Term::Strong(_, p) | Term::Restrict(_, p) => 1 + p.size(),
            Term::Sum(l, r) | Term::Par(l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn contains_strong_prefix(&self) -> bool {
        match self {
            Term::Strong(..) => true,
            Term::Nil | Term::Const(_) => false,
            Term::Prefix(_, p) | Term::Restrict(_, p) => p.contains_strong_prefix(),
            Term::Sum(l, r) | Term::Par(l, r) => {
                l.contains_strong_prefix() || r.contains_strong_prefix()
            }
        }
    }

    /// Visits every name occurrence (binders, actions, constant renamings)
    /// in left-to-right order.
    pub(crate) fn visit_names(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Term::Nil => {}
            Term::Prefix(a, p) | Term::Strong(a, p) => {
                if let Some(n) = a.name() {
                    f(n);
                }
                p.visit_names(f);
            }
            Term::Sum(l, r) | Term::Par(l, r) => {
                l.visit_names(f);
                r.visit_names(f);
            }
            Term::Restrict(n, p) => {
                f(n);
                p.visit_names(f);
            }
            Term::Const(c) => {
                for (_, v) in c.renaming.iter() {
                    f(v);
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Top,
    Par,
    Sum,
    Seq,
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, ctx: Level) -> fmt::Result {
    let own = match t {
        Term::Restrict(..) => Level::Top,
        Term::Par(..) => Level::Par,
        Term::Sum(..) => Level::Sum,
        _ => Level::Seq,
    };
    let wrap = own < ctx;
    if wrap {
        write!(f, "(")?;
    }
    match t {
        Term::Nil => write!(f, "0")?,
        Term::Const(c) => write!(f, "{c}")?,
        Term::Prefix(a, p) => {
            write!(f, "{a}.")?;
            write_term(f, p, Level::Seq)?;
        }
        Term::Strong(a, p) => {
            write!(f, "<{a}>.")?;
            write_term(f, p, Level::Seq)?;
        }
        Term::Sum(l, r) => {
            write_term(f, l, Level::Sum)?;
            write!(f, " + ")?;
            write_term(f, r, Level::Seq)?;
        }
        Term::Par(l, r) => {
            write_term(f, l, Level::Par)?;
            write!(f, " | ")?;
            write_term(f, r, Level::Sum)?;
        }
        Term::Restrict(..) => {
            let mut names = Vec::new();
            let mut body = t;
            while let Term::Restrict(n, b) = body {
                names.push(n.to_string());
                body = b;
            }
            write!(f, "new({}) ", names.join(", "))?;
            write_term(f, body, Level::Top)?;
        }
    }
    if wrap {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, Level::Top)
    }
}
