//! Graphviz output for transition systems and nets.

use std::fmt::Write;

use crate::lts::Lts;
use crate::net::PTNet;

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn lts_to_dot(lts: &Lts) -> String {
    let mut out = String::from("digraph lts {\n  rankdir=LR;\n  node [shape=ellipse];\n");
    for (i, s) in lts.states.iter().enumerate() {
        let shape = if i == lts.initial { ", peripheries=2" } else { "" };
        let _ = writeln!(out, "  n{i} [label=\"{}\"{shape}];", esc(&s.to_string()));
    }
    for (s, l, t) in &lts.transitions {
        let _ = writeln!(out, "  n{s} -> n{t} [label=\"{}\"];", esc(&l.spaced()));
    }
    out.push_str("}\n");
    out
}

pub fn net_to_dot(net: &PTNet) -> String {
    let mut out = format!("digraph \"{}\" {{\n  rankdir=LR;\n", esc(&net.name));
    for (i, p) in net.places.iter().enumerate() {
        let k = net.initial.count(&crate::net::PlaceId(i as u32));
        let tokens = if k > 0 { format!("\\n{k}") } else { String::new() };
        let _ = writeln!(out, "  p{i} [shape=circle, label=\"{}{tokens}\"];", esc(&p.name));
    }
    for (j, t) in net.transitions.iter().enumerate() {
        let _ = writeln!(
            out,
            "  t{j} [shape=box, label=\"{}: {}\"];",
            esc(&t.name),
            esc(&t.label.spaced())
        );
        for (p, w) in t.pre.iter() {
            let _ = writeln!(out, "  p{} -> t{j} [label=\"{w}\"];", p.index());
        }
        for (p, w) in t.post.iter() {
            let _ = writeln!(out, "  t{j} -> p{} [label=\"{w}\"];", p.index());
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::State;
    use crate::netfmt::parse_net;

    #[test]
    fn net_shapes_and_weights() {
        let n = parse_net("net n place s init 2 trans t label ~a in s:2 out").unwrap();
        let d = net_to_dot(&n);
        assert!(d.contains("p0 [shape=circle, label=\"s\\n2\"];"));
        assert!(d.contains("t0 [shape=box, label=\"t: ~a\"];"));
        assert!(d.contains("p0 -> t0 [label=\"2\"];"));
    }

    #[test]
    fn lts_edges_are_space_separated() {
        let lts = Lts {
            states: vec![State::Marking("p".into()), State::Marking("q".into())],
            transitions: vec![(0, crate::parse::parse_sequence("a.~b").unwrap(), 1)],
            initial: 0,
            complete: true,
        };
        assert!(lts_to_dot(&lts).contains("n0 -> n1 [label=\"a ~b\"];"));
    }
}
