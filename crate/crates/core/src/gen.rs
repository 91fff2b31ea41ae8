//! Seeded random generators for finite-net programs and P/T nets.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::net::{Marking, PTNet, PlaceId};
use crate::parse::Program;
use crate::term::{Action, Name, Sequence, Term};

const NAMES: [&str; 3] = ["a", "b", "c"];

fn action(rng: &mut impl Rng, tau_weight: f64) -> Action {
    if rng.gen_bool(tau_weight) {
        return Action::Tau;
    }
    let n = NAMES.choose(rng).unwrap();
    if rng.gen_bool(0.5) {
        Action::input(n)
    } else {
        Action::output(n)
    }
}

/// A random finite-net program: up to three constants whose bodies are
/// sums of (occasionally strong) prefixes, and a main term restricting a
/// random subset of the channel names over a parallel of constants.
pub fn finite_net_program(rng: &mut impl Rng) -> Program {
    let k = rng.gen_range(1..=3);
    let cname = |i: usize| format!("P{}", i + 1);
    let mut defs = Vec::new();
    for _ in 0..k {
        let summands = rng.gen_range(1..=2);
        let body = Term::sum_all((0..summands).map(|_| summand(rng, k, 2)));
        defs.push(body);
    }
    let defs: Vec<(String, Term)> = defs.into_iter().enumerate().map(|(i, b)| (cname(i), b)).collect();
    let comps = rng.gen_range(1..=3);
    let par = Term::par_all((0..comps).map(|_| Term::constant(&cname(rng.gen_range(0..k)))));
    let restricted: Vec<Name> = NAMES.iter().filter(|_| rng.gen_bool(0.5)).map(|n| Name::vis(n)).collect();
    Program::new(defs, Term::restrict_all(restricted, par))
}

fn summand(rng: &mut impl Rng, k: usize, depth: u32) -> Term {
    let a = action(rng, 0.15);
    let cont = continuation(rng, k, depth);
    if depth > 1 && rng.gen_bool(0.2) {
        let inner = Term::prefix(action(rng, 0.0), cont);
        Term::strong(a, inner)
    } else {
        Term::prefix(a, cont)
    }
}

fn continuation(rng: &mut impl Rng, k: usize, depth: u32) -> Term {
    let c = |rng: &mut dyn rand::RngCore| Term::constant(&format!("P{}", rng.gen_range(0..k) + 1));
    match rng.gen_range(0..10) {
        0..=1 => Term::Nil,
        2..=5 => c(rng),
        6 if depth > 0 => summand(rng, k, depth - 1),
        7 => Term::par(c(rng), Term::Nil),
        _ => c(rng),
    }
}

/// Shape limits for random nets.
#[derive(Clone, Copy, Debug)]
pub struct NetShape {
    pub max_places: usize,
    pub max_transitions: usize,
    pub max_weight: u32,
}

impl Default for NetShape {
    fn default() -> NetShape {
        NetShape {
            max_places: 6,
            max_transitions: 6,
            max_weight: 3,
        }
    }
}

fn weighted(rng: &mut impl Rng, n: usize, parts: std::ops::RangeInclusive<usize>, max_w: u32) -> Marking {
    let parts = rng.gen_range(parts);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx.into_iter()
        .take(parts)
        .map(|i| (PlaceId(i as u32), rng.gen_range(1..=max_w)))
        .collect()
}

fn label(rng: &mut impl Rng) -> Sequence {
    Sequence::single(action(rng, 0.25))
}

fn assemble(name: &str, n: usize, initial: Marking, trans: Vec<(Marking, Sequence, Marking)>) -> PTNet {
    let mut net = PTNet::new(name);
    for i in 0..n {
        net.add_place(&format!("s{}", i + 1), None);
    }
    net.initial = initial;
    for (j, (pre, l, post)) in trans.into_iter().enumerate() {
        net.add_transition(&format!("t{}", j + 1), pre, l, post);
    }
    net
}

/// A random net with nonempty presets and pairwise distinct transitions.
/// Callers filter for reducedness.
pub fn random_net(rng: &mut impl Rng, shape: NetShape) -> PTNet {
    let n = rng.gen_range(1..=shape.max_places);
    let v = rng.gen_range(1..=shape.max_transitions);
    let mut trans: Vec<(Marking, Sequence, Marking)> = Vec::new();
    for _ in 0..v {
        let pre = weighted(rng, n, 1..=n.min(3), shape.max_weight);
        let post = weighted(rng, n, 0..=n.min(2), shape.max_weight);
        let t = (pre, label(rng), post);
        if !trans.contains(&t) {
            trans.push(t);
        }
    }
    let initial = weighted(rng, n, 1..=n, shape.max_weight);
    assemble("random", n, initial, trans)
}

/// A random CCS net: each preset is one weight-1 place, or two distinct
/// weight-1 places on a τ transition.
pub fn random_ccs_net(rng: &mut impl Rng, shape: NetShape) -> PTNet {
    let n = rng.gen_range(1..=shape.max_places);
    let v = rng.gen_range(1..=shape.max_transitions);
    let mut trans: Vec<(Marking, Sequence, Marking)> = Vec::new();
    for _ in 0..v {
        let (pre, l) = if n >= 2 && rng.gen_bool(0.4) {
            (weighted(rng, n, 2..=2, 1), Sequence::tau())
        } else {
            (weighted(rng, n, 1..=1, 1), label(rng))
        };
        let post = weighted(rng, n, 0..=n.min(2), shape.max_weight.min(2));
        let t = (pre, l, post);
        if !trans.contains(&t) {
            trans.push(t);
        }
    }
    let initial = weighted(rng, n, 1..=n, 2);
    assemble("ccs", n, initial, trans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::{check_wellformed, classify_finite_net};
    use crate::net2term::is_ccs_net;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn programs_are_finite_net_and_wellformed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let p = finite_net_program(&mut rng);
            assert!(check_wellformed(&p.env, &p.main).is_ok(), "{p}");
            assert!(classify_finite_net(&p.env, &p.main).finite_net, "{p}");
        }
    }

    #[test]
    fn ccs_nets_classify() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert!(is_ccs_net(&random_ccs_net(&mut rng, NetShape::default())));
        }
    }

    #[test]
    fn random_nets_respect_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let n = random_net(&mut rng, NetShape::default());
            assert!(n.num_places() <= 6 && n.num_transitions() <= 6);
            assert!(n.transitions.iter().all(|t| !t.pre.is_empty()));
            assert!(n.transitions.iter().all(|t| t.pre.iter().all(|(_, w)| w <= 3)));
        }
    }
}
