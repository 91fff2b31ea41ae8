//! Translation of finite P/T nets into finite-net processes.
//!
//! Place `s_i` becomes constant `C_i`, one summand per transition it
//! feeds plus a distinguishing `y_i.0`. Multi-input transitions are
//! coordinated by a leader place that performs a strong-prefix chain on
//! the transition's channel `x_j`, matched by single outputs of the other
//! input tokens.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::net::{PTNet, PlaceId};
use crate::parse::Program;
use crate::term::{Action, Name, Term};

/// The restricted channel names used by a translation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranslationNames {
    /// One per transition, in transition order.
    pub x: Vec<Name>,
    /// One per place, in place order.
    pub y: Vec<Name>,
}

impl TranslationNames {
    /// `x1…xv`, `y1…yn`, each family under the shortest prefix (`x`,
    /// `x_`, `x__`, …) that avoids every label name.
    pub fn choose(net: &PTNet) -> TranslationNames {
        let used: BTreeSet<String> = net
            .transitions
            .iter()
            .flat_map(|t| t.label.actions().iter().filter_map(|a| a.name()).map(|n| n.to_string()))
            .collect();
        let family = |base: &str, count: usize| {
            let mut prefix = base.to_string();
            loop {
                let names: Vec<String> = (1..=count).map(|k| format!("{prefix}{k}")).collect();
                if names.iter().all(|n| !used.contains(n)) {
                    return names.iter().map(|n| Name::vis(n)).collect::<Vec<_>>();
                }
                prefix.push('_');
            }
        };
        TranslationNames {
            x: family("x", net.num_transitions()),
            y: family("y", net.num_places()),
        }
    }
}

pub fn constant_name(i: usize) -> String {
    format!("C{}", i + 1)
}

/// The leader of an input set: minimal arc weight, then minimal index.
pub fn leader(pre: &crate::net::Marking) -> Option<PlaceId> {
    pre.iter().min_by_key(|(p, k)| (*k, **p)).map(|(p, _)| *p)
}

pub fn translate(net: &PTNet) -> Result<Program> {
    for t in &net.transitions {
        if t.label.len() != 1 {
            return Err(Error::Translate(format!(
                "transition {} has the multi-action label {}",
                t.name, t.label
            )));
        }
        if t.pre.is_empty() {
            return Err(Error::Translate(format!("transition {} has an empty preset", t.name)));
        }
    }
    let names = TranslationNames::choose(net);
    let pi = |post: &crate::net::Marking| {
        Term::par_all(
            post.iter()
                .flat_map(|(p, k)| std::iter::repeat_n(Term::constant(&constant_name(p.index())), k as usize)),
        )
    };
    let mut defs = Vec::new();
    for i in 0..net.num_places() {
        let si = PlaceId(i as u32);
        let mut summands = Vec::new();
        for (j, t) in net.transitions.iter().enumerate() {
            let w = t.pre.count(&si);
            if w == 0 {
                continue;
            }
            let a = t.label.first().clone();
            let x = &names.x[j];
            let d = t.pre.size() - 1;
            let cont = pi(&t.post);
            if d == 0 {
                summands.push(Term::prefix(a, cont));
            } else if leader(&t.pre) != Some(si) {
                summands.push(Term::prefix(Action::Out(x.clone()), Term::Nil));
            } else if w == 1 {
                if a == Action::Tau {
                    summands.push(chain(x, d - 1, Term::prefix(Action::In(x.clone()), cont)));
                } else {
                    summands.push(chain(x, d, Term::prefix(a, cont)));
                }
            } else {
                summands.push(Term::prefix(Action::Out(x.clone()), Term::Nil));
                summands.push(chain(x, d, Term::prefix(a, cont)));
            }
        }
        summands.push(Term::prefix(Action::In(names.y[i].clone()), Term::Nil));
        defs.push((constant_name(i), Term::sum_all(summands)));
    }
    let tokens = Term::par_all(net.initial.iter().flat_map(|(p, k)| {
        std::iter::repeat_n(Term::constant(&constant_name(p.index())), k as usize)
    }));
    let main = Term::restrict_all(names.x.iter().chain(&names.y).cloned(), tokens);
    Ok(Program::new(defs, main))
}

fn chain(x: &Name, n: u32, body: Term) -> Term {
    (0..n).fold(body, |acc, _| Term::strong(Action::In(x.clone()), acc))
}

/// One weight-1 input, or two distinct weight-1 inputs on a τ transition.
pub fn is_ccs_net(net: &PTNet) -> bool {
    net.transitions.iter().all(|t| {
        let arcs: Vec<u32> = t.pre.iter().map(|(_, k)| k).collect();
        match arcs[..] {
            [1] => true,
            [1, 1] => t.label.is_tau(),
            _ => false,
        }
    })
}
