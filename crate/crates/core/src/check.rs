//! Well-formedness checks and the finite-net fragment classifier.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::env::Env;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UndefinedConstant { name: String, context: String },
    /// `constant` can reach itself through occurrences not under a normal prefix.
    Unguarded { constant: String },
    NonSequentialSum { context: String, subterm: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UndefinedConstant { name, context } => {
                write!(f, "closedness: constant {name} used in {context} has no definition")
            }
            Violation::Unguarded { constant } => write!(
                f,
                "guardedness: constant {constant} recurs without passing a normal prefix"
            ),
            Violation::NonSequentialSum { context, subterm } => {
                write!(f, "sum shape: non-sequential summand `{subterm}` in {context}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WellFormedReport {
    pub violations: Vec<Violation>,
}

impl WellFormedReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for WellFormedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return writeln!(f, "well-formed: yes");
        }
        writeln!(f, "well-formed: no")?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

pub fn check_wellformed(env: &Env, main: &Term) -> WellFormedReport {
    let mut violations = Vec::new();
    let mut sites: Vec<(String, &Term)> = env
        .definitions()
        .map(|(n, b)| (format!("constant {n}"), b))
        .collect();
    sites.push(("main".to_string(), main));
    for (context, t) in &sites {
        let mut used = BTreeSet::new();
        constants(t, &mut used);
        for name in used {
            if !env.contains(&name) {
                violations.push(Violation::UndefinedConstant {
                    name,
                    context: context.clone(),
                });
            }
        }
        sums(t, context, &mut violations);
    }
    let graph: BTreeMap<String, BTreeSet<String>> = env
        .definitions()
        .map(|(n, b)| {
            let mut out = BTreeSet::new();
            unguarded(b, &mut out);
            (n.to_string(), out)
        })
        .collect();
    for c in graph.keys() {
        if reaches(&graph, c, c) {
            violations.push(Violation::Unguarded { constant: c.clone() });
        }
    }
    WellFormedReport { violations }
}

fn constants(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Nil => {}
        Term::Const(c) => {
            out.insert(c.name.to_string());
        }
        Term::Prefix(_, p) | Term::Strong(_, p) | Term::Restrict(_, p) => constants(p, out),
        Term::Sum(l, r) | Term::Par(l, r) => {
            constants(l, out);
            constants(r, out);
        }
    }
}

/// Constants occurring in `t` outside every normal prefix.
fn unguarded(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Nil | Term::Prefix(..) => {}
        Term::Const(c) => {
            out.insert(c.name.to_string());
        }
        Term::Strong(_, p) | Term::Restrict(_, p) => unguarded(p, out),
        Term::Sum(l, r) | Term::Par(l, r) => {
            unguarded(l, out);
            unguarded(r, out);
        }
    }
}

fn reaches(graph: &BTreeMap<String, BTreeSet<String>>, from: &str, target: &str) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<&str> = graph.get(from).into_iter().flatten().map(|s| s.as_str()).collect();
    while let Some(n) = stack.pop() {
        if n == target {
            return true;
        }
        if seen.insert(n) {
            stack.extend(graph.get(n).into_iter().flatten().map(|s| s.as_str()));
        }
    }
    false
}

fn sums(t: &Term, context: &str, out: &mut Vec<Violation>) {
    match t {
        Term::Nil | Term::Const(_) => {}
        Term::Prefix(_, p) | Term::Strong(_, p) | Term::Restrict(_, p) => sums(p, context, out),
        Term::Par(l, r) => {
            sums(l, context, out);
            sums(r, context, out);
        }
        Term::Sum(l, r) => {
            for side in [l, r] {
                if !side.is_sequential() {
                    out.push(Violation::NonSequentialSum {
                        context: context.to_string(),
                        subterm: side.to_string(),
                    });
                }
                sums(side, context, out);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentReport {
    pub finite_net: bool,
    /// First violating production, when not finite-net.
    pub diagnosis: Option<String>,
}

impl fmt::Display for FragmentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.diagnosis {
            None => writeln!(f, "finite-net: yes"),
            Some(d) => writeln!(f, "finite-net: no ({d})"),
        }
    }
}

/// Checks the three-level finite-net grammar: restriction and top-level
/// parallel in `main`, no restriction below a prefix or inside any
/// constant reachable from `main`.
pub fn classify_finite_net(env: &Env, main: &Term) -> FragmentReport {
    let verdict = (|| {
        p_level(main).map_err(|e| format!("{e} in main"))?;
        let mut todo = BTreeSet::new();
        constants(main, &mut todo);
        let mut seen = BTreeSet::new();
        while let Some(c) = todo.pop_first() {
            if !seen.insert(c.clone()) {
                continue;
            }
            let body = env
                .get(&c)
                .ok_or_else(|| format!("constant {c} is undefined"))?;
            t_level(body).map_err(|e| format!("{e} in the body of constant {c}"))?;
            constants(body, &mut todo);
        }
        Ok::<(), String>(())
    })();
    match verdict {
        Ok(()) => FragmentReport {
            finite_net: true,
            diagnosis: None,
        },
        Err(d) => FragmentReport {
            finite_net: false,
            diagnosis: Some(d),
        },
    }
}

fn p_level(t: &Term) -> Result<(), String> {
    match t {
        Term::Restrict(_, p) => p_level(p),
        Term::Par(l, r) => {
            p_level(l)?;
            p_level(r)
        }
        _ => t_level(t),
    }
}

fn t_level(t: &Term) -> Result<(), String> {
    match t {
        Term::Par(l, r) => {
            t_level(l)?;
            t_level(r)
        }
        Term::Const(_) => Ok(()),
        Term::Restrict(..) => Err(format!("restriction `{t}` below the top level")),
        _ => s_level(t),
    }
}

fn s_level(t: &Term) -> Result<(), String> {
    match t {
        Term::Nil => Ok(()),
        Term::Prefix(_, q) | Term::Strong(_, q) => t_level(q),
        Term::Sum(l, r) => {
            s_level(l)?;
            s_level(r)
        }
        _ => Err(format!("non-sequential summand `{t}`")),
    }
}
