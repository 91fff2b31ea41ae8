//! The synchronization relation against a bottom-up forward closure of
//! its inference rules over a two-name alphabet.

use std::collections::{BTreeSet, HashMap};

use mccs::{sync_outcomes, Action, Sequence, SyncMode};

type Seq = Vec<Action>;
type Facts = HashMap<(Seq, Seq), BTreeSet<Seq>>;

const MAX_TOTAL: usize = 6;

fn alphabet() -> Vec<Action> {
    vec![
        Action::Tau,
        Action::input("a"),
        Action::output("a"),
        Action::input("b"),
        Action::output("b"),
    ]
}

fn words(max_len: usize) -> Vec<Vec<Seq>> {
    let mut by_len: Vec<Vec<Seq>> = vec![vec![vec![]]];
    for l in 1..=max_len {
        let mut next = Vec::new();
        for w in &by_len[l - 1] {
            for a in alphabet() {
                let mut v = vec![a];
                v.extend(w.iter().cloned());
                next.push(v);
            }
        }
        by_len.push(next);
    }
    by_len
}

fn cons(a: &Action, s: &[Action]) -> Seq {
    let mut v = vec![a.clone()];
    v.extend_from_slice(s);
    v
}

/// Derives every fact `(s1, s2) ↦ σ` with `|s1| + |s2| <= MAX_TOTAL` by
/// firing each rule forward from facts of smaller total length.
fn forward_closure() -> Facts {
    let ws = words(MAX_TOTAL - 1);
    let mut facts: Facts = HashMap::new();
    let add = |f: &mut Facts, s1: Seq, s2: Seq, out: Seq| {
        f.entry((s1, s2)).or_default().insert(out);
    };
    for a in alphabet() {
        let Some(c) = a.complement() else { continue };
        add(&mut facts, vec![a.clone()], vec![c.clone()], vec![Action::Tau]);
        for l in 1..MAX_TOTAL - 1 {
            for r in &ws[l] {
                add(&mut facts, cons(&a, r), vec![c.clone()], r.clone());
                add(&mut facts, vec![a.clone()], cons(&c, r), r.clone());
            }
        }
    }
    for total in 2..MAX_TOTAL {
        let layer: Vec<((Seq, Seq), BTreeSet<Seq>)> = facts
            .iter()
            .filter(|((x, y), _)| x.len() + y.len() == total)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        for ((x, y), outs) in layer {
            for a in alphabet() {
                for o in &outs {
                    let lifted = if a == Action::Tau { o.clone() } else { cons(&a, o) };
                    add(&mut facts, cons(&a, &x), y.clone(), lifted.clone());
                    add(&mut facts, x.clone(), cons(&a, &y), lifted);
                    if total + 2 <= MAX_TOTAL {
                        if let Some(c) = a.complement() {
                            add(&mut facts, cons(&a, &x), cons(&c, &y), o.clone());
                        }
                    }
                }
            }
        }
    }
    facts
}

fn seq(v: &[Action]) -> Sequence {
    Sequence::new(v.to_vec()).unwrap()
}

fn all_pairs() -> Vec<(Seq, Seq)> {
    let ws = words(MAX_TOTAL - 1);
    let mut out = Vec::new();
    for l1 in 1..MAX_TOTAL {
        for l2 in 1..=MAX_TOTAL - l1 {
            for x in &ws[l1] {
                for y in &ws[l2] {
                    out.push((x.clone(), y.clone()));
                }
            }
        }
    }
    out
}

#[test]
fn agrees_with_forward_closure_up_to_total_length_six() {
    let facts = forward_closure();
    let empty = BTreeSet::new();
    let mut checked = 0;
    for (x, y) in all_pairs() {
        let want: BTreeSet<Sequence> = facts
            .get(&(x.clone(), y.clone()))
            .unwrap_or(&empty)
            .iter()
            .map(|v| seq(v))
            .collect();
        let got = sync_outcomes(&seq(&x), &seq(&y), SyncMode::General);
        assert_eq!(got, want, "Sync({}, {})", seq(&x), seq(&y));
        checked += 1;
    }
    assert!(checked > 50_000);
}

#[test]
fn structural_laws() {
    for (x, y) in all_pairs() {
        let (s1, s2) = (seq(&x), seq(&y));
        let general = sync_outcomes(&s1, &s2, SyncMode::General);
        assert_eq!(general, sync_outcomes(&s2, &s1, SyncMode::General));
        let gated = sync_outcomes(&s1, &s2, SyncMode::FiniteNet);
        assert!(gated.is_subset(&general));
        if s1.len() == 1 || s2.len() == 1 {
            assert_eq!(gated, general);
        } else {
            assert!(gated.is_empty());
        }
        // At least one pair is consumed, so no outcome is a plain shuffle.
        for s in &general {
            assert!(s.len() < s1.len() + s2.len());
        }
    }
}

#[test]
fn worked_cases() {
    let o = |a: &str, b: &str| -> Vec<String> {
        sync_outcomes(&mccs::parse_sequence(a).unwrap(), &mccs::parse_sequence(b).unwrap(), SyncMode::General)
            .into_iter()
            .map(|s| s.to_string())
            .collect()
    };
    assert_eq!(o("a.a", "~a"), vec!["a", "a.tau"]);
    assert_eq!(o("a.b", "~a"), vec!["b"]);
    assert_eq!(o("a", "~a"), vec!["tau"]);
    assert!(o("a", "b").is_empty());
    assert!(o("tau", "tau").is_empty());
}
