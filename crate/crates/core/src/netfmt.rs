//! Text format for P/T nets.
//!
//! ```text
//! net NAME
//! place s1 init 2
//! trans t1 label a.~b in s1:2 out s1:1 s2:1
//! ```

use std::collections::HashSet;
use std::fmt::Write;

use crate::error::Result;
use crate::lex::{describe, Cursor, Tok};
use crate::net::{Marking, PTNet};
use crate::parse::sequence;

pub fn parse_net(src: &str) -> Result<PTNet> {
    let mut p = Cursor::new(src)?;
    p.expect_word("net")?;
    let name = ident(&mut p)?;
    let mut net = PTNet::new(&name);
    let mut tnames = HashSet::new();
    while !p.at_eof() {
        if p.is_word("place") {
            p.bump();
            let pname = ident(&mut p)?;
            if net.place_id(&pname).is_some() {
                return p.error(format!("place `{pname}` declared twice"));
            }
            if !net.transitions.is_empty() {
                return p.error("places must be declared before transitions");
            }
            p.expect_word("init")?;
            let k = nat(&mut p)?;
            let id = net.add_place(&pname, None);
            if k > 0 {
                net.initial.insert(id, k);
            }
        } else if p.is_word("trans") {
            p.bump();
            let tname = ident(&mut p)?;
            if !tnames.insert(tname.clone()) {
                return p.error(format!("transition `{tname}` declared twice"));
            }
            p.expect_word("label")?;
            let label = sequence(&mut p)?;
            p.expect_word("in")?;
            let pre = arcs(&mut p, &net)?;
            p.expect_word("out")?;
            let post = arcs(&mut p, &net)?;
            net.add_transition(&tname, pre, label, post);
        } else {
            return p.error(format!("expected `place` or `trans`, found {}", describe(p.peek())));
        }
    }
    Ok(net)
}

fn ident(p: &mut Cursor) -> Result<String> {
    match p.peek().clone() {
        Tok::Lower(s) | Tok::Upper(s) => {
            p.bump();
            Ok(s)
        }
        other => p.error(format!("expected an identifier, found {}", describe(&other))),
    }
}

fn nat(p: &mut Cursor) -> Result<u32> {
    match p.peek().clone() {
        Tok::Num(n) => {
            p.bump();
            Ok(n)
        }
        other => p.error(format!("expected a number, found {}", describe(&other))),
    }
}

fn arcs(p: &mut Cursor, net: &PTNet) -> Result<Marking> {
    let mut m = Marking::new();
    while matches!(p.peek(), Tok::Lower(_) | Tok::Upper(_)) && *p.peek_at(1) == Tok::Sym(':') {
        let pname = ident(p)?;
        let Some(id) = net.place_id(&pname) else {
            return p.error(format!("undeclared place `{pname}`"));
        };
        p.expect_sym(':')?;
        let k = nat(p)?;
        if k == 0 {
            return p.error("arc weights must be positive");
        }
        m.insert(id, k);
    }
    Ok(m)
}

pub fn print_net(net: &PTNet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "net {}", net.name);
    for (i, pl) in net.places.iter().enumerate() {
        let k = net.initial.count(&crate::net::PlaceId(i as u32));
        let _ = writeln!(out, "place {} init {}", pl.name, k);
    }
    let arcs = |m: &Marking| {
        m.iter()
            .map(|(p, k)| format!(" {}:{}", net.place_name(*p), k))
            .collect::<String>()
    };
    for t in &net.transitions {
        let _ = writeln!(
            out,
            "trans {} label {} in{} out{}",
            t.name,
            t.label,
            arcs(&t.pre),
            arcs(&t.post)
        );
    }
    out
}
