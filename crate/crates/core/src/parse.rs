//! Parser and printer for the program text format.
//!
//! ```text
//! program ::= { UCIDENT "=" term ";" } "main" "=" term ";"
//! term    ::= "new" "(" name { "," name } ")" term | par
//! par     ::= sum { "|" sum }
//! sum     ::= seq { "+" seq }
//! seq     ::= "0" | prefix "." seq | "(" term ")" | UCIDENT
//! prefix  ::= act | "<" act ">"
//! act     ::= "tau" | name | "~" name
//! ```

use std::fmt;

use crate::env::Env;
use crate::error::Result;
use crate::lex::{describe, Cursor, Tok};
use crate::term::{Action, Name, Sequence, Term};

const RESERVED: &[&str] = &["new", "main", "tau"];

/// A parsed program: constant definitions plus the main term.
#[derive(Clone, Debug)]
pub struct Program {
    pub env: Env,
    pub main: Term,
}

impl Program {
    pub fn new(defs: Vec<(String, Term)>, main: Term) -> Program {
        Program {
            env: Env::new(defs),
            main,
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, body) in self.env.definitions() {
            writeln!(f, "{name} = {body};")?;
        }
        writeln!(f, "main = {};", self.main)
    }
}

pub fn parse_program(src: &str) -> Result<Program> {
    let mut p = Cursor::new(src)?;
    let mut defs = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Upper(name) => {
                p.bump();
                p.expect_sym('=')?;
                let body = term(&mut p)?;
                p.expect_sym(';')?;
                if defs.iter().any(|(n, _): &(String, Term)| *n == name) {
                    return p.error(format!("constant `{name}` defined twice"));
                }
                defs.push((name, body));
            }
            Tok::Lower(w) if w == "main" => break,
            other => return p.error(format!("expected a definition or `main`, found {}", describe(&other))),
        }
    }
    p.expect_word("main")?;
    p.expect_sym('=')?;
    let main = term(&mut p)?;
    p.expect_sym(';')?;
    if !p.at_eof() {
        return p.error(format!("unexpected {} after main", describe(p.peek())));
    }
    Ok(Program::new(defs, main))
}

pub fn parse_term(src: &str) -> Result<Term> {
    let mut p = Cursor::new(src)?;
    let t = term(&mut p)?;
    if !p.at_eof() {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(t)
}

/// Parses a dotted action sequence such as `a.~b.tau`.
pub fn parse_sequence(src: &str) -> Result<Sequence> {
    let mut p = Cursor::new(src)?;
    let s = sequence(&mut p)?;
    if !p.at_eof() {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(s)
}

pub(crate) fn sequence(p: &mut Cursor) -> Result<Sequence> {
    let mut acts = vec![action(p)?];
    while p.is_sym('.') {
        p.bump();
        acts.push(action(p)?);
    }
    Ok(Sequence::new(acts).expect("nonempty"))
}

fn term(p: &mut Cursor) -> Result<Term> {
    if p.is_word("new") {
        p.bump();
        p.expect_sym('(')?;
        let mut names = vec![name(p)?];
        while p.is_sym(',') {
            p.bump();
            names.push(name(p)?);
        }
        p.expect_sym(')')?;
        let body = term(p)?;
        return Ok(Term::restrict_all(names, body));
    }
    let mut t = sum(p)?;
    while p.is_sym('|') {
        p.bump();
        t = Term::par(t, sum(p)?);
    }
    Ok(t)
}

fn sum(p: &mut Cursor) -> Result<Term> {
    let mut t = seq(p)?;
    while p.is_sym('+') {
        p.bump();
        t = Term::sum(t, seq(p)?);
    }
    Ok(t)
}

fn seq(p: &mut Cursor) -> Result<Term> {
    match p.peek().clone() {
        Tok::Num(0) => {
            p.bump();
            Ok(Term::Nil)
        }
        Tok::Sym('(') => {
            p.bump();
            let t = term(p)?;
            p.expect_sym(')')?;
            Ok(t)
        }
        Tok::Upper(c) => {
            p.bump();
            Ok(Term::constant(&c))
        }
        Tok::Sym('<') => {
            p.bump();
            let a = action(p)?;
            p.expect_sym('>')?;
            p.expect_sym('.')?;
            Ok(Term::strong(a, seq(p)?))
        }
        Tok::Lower(_) | Tok::Sym('~') => {
            let a = action(p)?;
            p.expect_sym('.')?;
            Ok(Term::prefix(a, seq(p)?))
        }
        other => p.error(format!("expected a process, found {}", describe(&other))),
    }
}

fn action(p: &mut Cursor) -> Result<Action> {
    if p.is_word("tau") {
        p.bump();
        return Ok(Action::Tau);
    }
    if p.is_sym('~') {
        p.bump();
        return Ok(Action::Out(name(p)?));
    }
    Ok(Action::In(name(p)?))
}

fn name(p: &mut Cursor) -> Result<Name> {
    match p.peek().clone() {
        Tok::Lower(s) if !RESERVED.contains(&s.as_str()) => {
            p.bump();
            Ok(Name::vis(&s))
        }
        other => p.error(format!("expected a channel name, found {}", describe(&other))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn precedence_prefix_then_sum_then_par() {
        let t = parse_term("a.0 + b.0 | c.0").unwrap();
        assert!(matches!(&t, Term::Par(l, _) if matches!(**l, Term::Sum(..))));
        let t = parse_term("new(a, b) a.0 | ~b.0").unwrap();
        match t {
            Term::Restrict(a, inner) => {
                assert_eq!(a, Name::vis("a"));
                assert!(matches!(&*inner, Term::Restrict(b, body)
                    if *b == Name::vis("b") && matches!(**body, Term::Par(..))));
            }
            _ => panic!("expected restriction"),
        }
    }

    #[test]
    fn strong_prefix_and_outputs() {
        let t = parse_term("<a>.~a.(B | B)").unwrap();
        assert_eq!(t.to_string(), "<a>.~a.(B | B)");
        assert!(t.contains_strong_prefix());
    }

    #[test]
    fn comments_and_whitespace() {
        let p = parse_program("# semi-counter\nA = up.(down.0 | A); # rec\n main = A ;").unwrap();
        assert_eq!(p.env.len(), 1);
        assert_eq!(p.main, Term::constant("A"));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_program("A = a.;\nmain = A;") {
            Err(Error::Parse { line: 1, col: 7, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_program("main = a.0").is_err());
        assert!(parse_term("new.0").is_err());
        assert!(parse_program("A = 0; A = 0; main = A;").is_err());
    }

    #[test]
    fn sequences() {
        let s = parse_sequence("a.~b.tau").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_string(), "a.~b.tau");
    }
}
