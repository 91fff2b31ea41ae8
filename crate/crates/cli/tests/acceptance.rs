//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_RED` are reported but do not fail the
//! process; any other FAIL exits nonzero.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use mccs::gen::{finite_net_program, random_ccs_net, random_net, NetShape};
use mccs::{
    bisimilar, build_lts, build_net, classify_finite_net, isomorphic, marking_graph, normalize,
    parse_program, parse_sequence, parse_term, step, sync_outcomes, translate, verify_isomorphism, Action, Budget,
    Env, Marking, PTNet, Program, Sequence, SyncMode, Term,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const EXPECTED_RED: &[u32] = &[7, 8];

struct Report {
    ok: bool,
    detail: String,
}

impl Report {
    fn new(ok: bool, detail: impl Into<String>) -> Report {
        Report { ok, detail: detail.into() }
    }
}

fn corpus_path(name: &str) -> PathBuf {
    [env!("CARGO_MANIFEST_DIR"), "..", "..", "corpus", name].iter().collect()
}

fn load(name: &str) -> Program {
    parse_program(&std::fs::read_to_string(corpus_path(name)).unwrap()).unwrap()
}

fn mccs(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mccs")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn place_term(net: &PTNet, p: mccs::PlaceId) -> String {
    net.places[p.index()].term.as_ref().map(|t| t.to_string()).unwrap_or_default()
}

fn place_where(net: &PTNet, f: impl Fn(&str) -> bool) -> Vec<mccs::PlaceId> {
    (0..net.num_places() as u32)
        .map(mccs::PlaceId)
        .filter(|&p| f(&place_term(net, p)))
        .collect()
}

// ---- token game on dense markings ----------------------------------------

type Dense = Vec<u32>;

struct Game {
    pre: Vec<Dense>,
    post: Vec<Dense>,
    initial: Dense,
}

impl Game {
    fn of(net: &PTNet) -> Game {
        let n = net.num_places();
        let dense = |m: &Marking| {
            let mut v = vec![0; n];
            for (p, k) in m.iter() {
                v[p.index()] = k;
            }
            v
        };
        Game {
            pre: net.transitions.iter().map(|t| dense(&t.pre)).collect(),
            post: net.transitions.iter().map(|t| dense(&t.post)).collect(),
            initial: dense(&net.initial),
        }
    }

    fn enabled(&self, m: &Dense, t: usize) -> bool {
        m.iter().zip(&self.pre[t]).all(|(a, b)| a >= b)
    }

    /// All reachable markings, or `None` past `cap`.
    fn reach(&self, cap: usize) -> Option<Vec<Dense>> {
        let mut seen: HashSet<Dense> = HashSet::from([self.initial.clone()]);
        let mut order = vec![self.initial.clone()];
        let mut queue = VecDeque::from([self.initial.clone()]);
        while let Some(m) = queue.pop_front() {
            for t in 0..self.pre.len() {
                if !self.enabled(&m, t) {
                    continue;
                }
                let m2: Dense = m
                    .iter()
                    .zip(&self.pre[t])
                    .zip(&self.post[t])
                    .map(|((a, b), c)| a - b + c)
                    .collect();
                if seen.insert(m2.clone()) {
                    if order.len() >= cap {
                        return None;
                    }
                    order.push(m2.clone());
                    queue.push_back(m2);
                }
            }
        }
        Some(order)
    }

    /// Reducedness by exhaustive reachability; `None` when not decided.
    fn reduced(&self, cap: usize) -> Option<bool> {
        if self.pre.iter().any(|p| p.iter().all(|&k| k == 0)) {
            return Some(false);
        }
        let reach = self.reach(cap)?;
        let places = self.initial.len();
        let markable = (0..places).all(|i| reach.iter().any(|m| m[i] > 0));
        let live = (0..self.pre.len()).all(|t| reach.iter().any(|m| self.enabled(m, t)));
        Some(markable && live)
    }
}

// ---- independent Sync oracle: forward closure of the rules ----------------

type Seq = Vec<Action>;
type Facts = HashMap<(Seq, Seq), BTreeSet<Seq>>;

const SYNC_TOTAL: usize = 6;

fn alphabet() -> Vec<Action> {
    vec![
        Action::Tau,
        Action::input("a"),
        Action::output("a"),
        Action::input("b"),
        Action::output("b"),
    ]
}

fn cons(a: &Action, s: &[Action]) -> Seq {
    let mut v = vec![a.clone()];
    v.extend_from_slice(s);
    v
}

fn words(max_len: usize) -> Vec<Vec<Seq>> {
    let mut by_len: Vec<Vec<Seq>> = vec![vec![vec![]]];
    for l in 1..=max_len {
        let next = by_len[l - 1]
            .iter()
            .flat_map(|w| alphabet().into_iter().map(move |a| cons(&a, w)))
            .collect();
        by_len.push(next);
    }
    by_len
}

fn sync_closure() -> Facts {
    let ws = words(SYNC_TOTAL - 1);
    let mut facts: Facts = HashMap::new();
    let add = |f: &mut Facts, s1: Seq, s2: Seq, out: Seq| {
        f.entry((s1, s2)).or_default().insert(out);
    };
    for a in alphabet() {
        let Some(c) = a.complement() else { continue };
        add(&mut facts, vec![a.clone()], vec![c.clone()], vec![Action::Tau]);
        for l in 1..SYNC_TOTAL - 1 {
            for r in &ws[l] {
                add(&mut facts, cons(&a, r), vec![c.clone()], r.clone());
                add(&mut facts, vec![a.clone()], cons(&c, r), r.clone());
            }
        }
    }
    for total in 2..SYNC_TOTAL {
        let layer: Vec<_> = facts
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
                    if total + 2 <= SYNC_TOTAL {
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

// ---- criteria -------------------------------------------------------------

fn c1_semicounter() -> Report {
    let p = load("semicounter.mccs");
    let net = build_net(&p.main, &p.env, SyncMode::FiniteNet, Budget::default()).unwrap();
    if !net.complete || (net.num_places(), net.num_transitions()) != (2, 2) {
        return Report::new(false, format!("{} places, {} transitions", net.num_places(), net.num_transitions()));
    }
    let up = place_where(&net, |t| t.starts_with("up."));
    let down = place_where(&net, |t| t == "down.0");
    if up.len() != 1 || down.len() != 1 {
        return Report::new(false, "place terms do not match");
    }
    let (u, d) = (up[0], down[0]);
    let want: BTreeSet<(Marking, String, Marking)> = [
        (Marking::singleton(u), "up".to_string(), Marking::singleton(u).union(&Marking::singleton(d))),
        (Marking::singleton(d), "down".to_string(), Marking::new()),
    ]
    .into();
    let got: BTreeSet<_> = net
        .transitions
        .iter()
        .map(|t| (t.pre.clone(), t.label.to_string(), t.post.clone()))
        .collect();
    Report::new(got == want && net.initial == Marking::singleton(u), "2 places, 2 transitions")
}

fn c2_dining() -> Report {
    let p = load("dining.mccs");
    let net = build_net(&p.main, &p.env, SyncMode::FiniteNet, Budget::default()).unwrap();
    let shape = (net.num_places(), net.num_transitions());
    if !net.complete || shape != (10, 8) {
        return Report::new(false, format!("{shape:?}"));
    }
    // Schemas: two think loops, two three-way acquires, two eats, two
    // three-way releases.
    let count = |f: &dyn Fn(&mccs::Transition) -> bool| net.transitions.iter().filter(|t| f(t)).count();
    let think = count(&|t| t.label.to_string() == "think" && t.pre == t.post && t.pre.size() == 1);
    let eat = count(&|t| t.label.to_string() == "eat" && t.pre.size() == 1 && t.post.size() == 1);
    let three_way = count(&|t| t.label.is_tau() && t.pre.size() == 3 && t.post.size() == 3);
    if (think, eat, three_way) != (2, 2, 4) {
        return Report::new(false, format!("schemas think={think} eat={eat} tau3={three_way}"));
    }
    let eating = place_where(&net, |t| t.starts_with("eat."));
    if eating.len() != 2 {
        return Report::new(false, "expected two eating places");
    }
    let Some(reach) = Game::of(&net).reach(100_000) else {
        return Report::new(false, "reachability did not terminate");
    };
    let violation = reach.iter().any(|m| eating.iter().all(|p| m[p.index()] > 0));
    Report::new(!violation, format!("10 places, 8 transitions, {} reachable markings, mutual exclusion holds", reach.len()))
}

fn c3_readers_writers() -> Report {
    let p = load("rw.mccs");
    let net = build_net(&p.main, &p.env, SyncMode::FiniteNet, Budget::default()).unwrap();
    if !net.complete {
        return Report::new(false, "incomplete");
    }
    let one = |f: &dyn Fn(&str) -> bool| {
        let v = place_where(&net, |t| f(t));
        (v.len() == 1).then(|| v[0])
    };
    let (Some(rd), Some(lk), Some(wr)) = (
        one(&|t| t.contains(".read.") && !t.starts_with("read")),
        one(&|t| t.starts_with('~') && t.matches('~').count() == 2),
        one(&|t| t.starts_with('<') && t.contains("write") && t.matches('<').count() == 4),
    ) else {
        return Report::new(false, "could not identify rd, lk, wr places");
    };
    let mut want = Marking::new();
    want.insert(rd, 4);
    want.insert(lk, 3);
    want.insert(wr, 2);
    if net.initial != want {
        return Report::new(false, format!("dec(Sys) = {}", net.marking_string(&net.initial)));
    }
    let mut reader = Marking::singleton(rd);
    reader.insert(lk, 1);
    let mut writer = Marking::singleton(wr);
    writer.insert(lk, 3);
    let has = |pre: &Marking| net.transitions.iter().any(|t| t.label.is_tau() && t.pre == *pre);
    Report::new(
        has(&reader) && has(&writer),
        format!("dec(Sys) = {}; rd+lk and 3lk+wr acquires derived", net.marking_string(&net.initial)),
    )
}

fn c4_multisync() -> Report {
    let env = Env::empty();
    let target = normalize(&parse_term("new(a) ((p.p.0 | q.q.0) | r.r.0)").unwrap(), &env).unwrap();
    let mut notes = Vec::new();
    let mut ok = true;
    for f in ["multisync.mccs", "multisync_assoc.mccs"] {
        let p = load(f);
        let nf = normalize(&p.main, &p.env).unwrap();
        let moves = step(&nf, &p.env, SyncMode::General).unwrap();
        let hit = moves.iter().any(|(l, t)| l.is_tau() && *t == target);
        ok &= hit;
        notes.push(format!("{f}: {}", if hit { "tau move found" } else { "missing" }));
    }
    Report::new(ok, notes.join(", "))
}

fn related_against_net(p: &Program, budget: Budget) -> Option<bool> {
    let lts = build_lts(&p.main, &p.env, SyncMode::FiniteNet, budget).ok()?;
    let net = build_net(&p.main, &p.env, SyncMode::FiniteNet, budget).ok()?;
    if !lts.complete || !net.complete {
        return None;
    }
    let mg = marking_graph(&net, &budget);
    if !mg.complete {
        return None;
    }
    Some(bisimilar(&lts, &mg).ok()?.related)
}

fn c5_against_net() -> Report {
    let dir = std::env::temp_dir().join(format!("mccs-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let fig4a_term = dir.join("fig4a.mccs");
    let fig = corpus_path("fig4a.pnet");
    let (code, _) = mccs(&["translate", fig.to_str().unwrap(), "-o", fig4a_term.to_str().unwrap()]);
    if code != 0 {
        return Report::new(false, "translate of fig4a failed");
    }
    let named = [corpus_path("dining.mccs"), corpus_path("rw.mccs"), fig4a_term.clone()];
    for f in &named {
        let (code, out) = mccs(&["bisim", f.to_str().unwrap(), "--against-net"]);
        if code != 0 {
            return Report::new(false, format!("{}: {}", f.display(), out.lines().next().unwrap_or("")));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let budget = Budget { max_states: 2000, max_places: 200, max_transitions: 400, ..Budget::default() };
    let (mut related, mut tried) = (0, 0);
    let mut failure = None;
    for _ in 0..400 {
        if related >= 60 {
            break;
        }
        let p = finite_net_program(&mut rng);
        if !classify_finite_net(&p.env, &p.main).finite_net {
            continue;
        }
        match related_against_net(&p, budget) {
            Some(true) => related += 1,
            Some(false) => {
                failure.get_or_insert_with(|| p.to_string());
            }
            None => continue,
        }
        tried += 1;
    }
    match failure {
        Some(p) => Report::new(false, format!("random term not related:\n{p}")),
        None => Report::new(
            related >= 50 && related == tried,
            format!("DF, Sys, fig4a term and {related}/{tried} random terms related"),
        ),
    }
}

fn c6_budgets() -> Report {
    let mut notes = Vec::new();
    let mut ok = true;
    let mut entries: Vec<_> = std::fs::read_dir(corpus_path("")).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    let mut finite = 0;
    for path in entries.iter().filter(|p| p.extension().is_some_and(|e| e == "mccs")) {
        let Ok(p) = parse_program(&std::fs::read_to_string(path).unwrap()) else { continue };
        if !classify_finite_net(&p.env, &p.main).finite_net {
            continue;
        }
        let Ok(net) = build_net(&p.main, &p.env, SyncMode::FiniteNet, Budget::default()) else { continue };
        finite += 1;
        if !net.complete {
            ok = false;
            notes.push(format!("{} incomplete", name_of(path)));
        }
    }
    notes.push(format!("{finite} finite-net corpus terms complete"));

    let c = load("counter.mccs");
    let places = |k: usize| {
        let n = build_net(&c.main, &c.env, SyncMode::General, Budget { max_places: k, ..Budget::default() }).unwrap();
        (n.complete, n.num_places())
    };
    let (c1, c2) = (places(20), places(40));
    ok &= !c1.0 && !c2.0 && c1.1 < c2.1;
    notes.push(format!("counter places {} -> {}", c1.1, c2.1));

    let b = load("bprocess.mccs");
    let trans = |k: usize| {
        let n = build_net(&b.main, &b.env, SyncMode::General, Budget { max_transitions: k, ..Budget::default() }).unwrap();
        (n.complete, n.num_transitions())
    };
    let (b1, b2) = (trans(20), trans(40));
    ok &= !b1.0 && !b2.0 && b1.1 < b2.1;
    notes.push(format!("B transitions {} -> {}", b1.1, b2.1));
    Report::new(ok, notes.join(", "))
}

fn name_of(p: &Path) -> String {
    p.file_name().unwrap().to_string_lossy().into_owned()
}

fn roundtrips(net: &PTNet, budget: Budget) -> Result<bool, String> {
    let program = translate(net).map_err(|e| e.to_string())?;
    let rebuilt = build_net(&program.main, &program.env, SyncMode::FiniteNet, budget).map_err(|e| e.to_string())?;
    if !rebuilt.complete {
        return Err("rebuilt net incomplete".into());
    }
    Ok(match isomorphic(net, &rebuilt) {
        Some(w) => verify_isomorphism(net, &rebuilt, &w),
        None => false,
    })
}

/// Some pair of transitions carries complementary visible actions.
fn has_complementary_labels(net: &PTNet) -> bool {
    let actions: Vec<&Action> = net.transitions.iter().flat_map(|t| t.label.actions()).collect();
    actions.iter().any(|a| actions.iter().any(|b| a.is_complement_of(b)))
}

fn c7_roundtrip_reduced() -> Report {
    for f in ["fig4a.pnet", "fig4b.pnet"] {
        let (code, out) = mccs(&["roundtrip", corpus_path(f).to_str().unwrap()]);
        if code != 0 || !out.starts_with("isomorphic: yes") {
            return Report::new(false, format!("{f} not isomorphic"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let budget = Budget { max_places: 500, max_transitions: 2000, ..Budget::default() };
    let (mut pass, mut total, mut plain_fail) = (0, 0, 0);
    let mut counterexample = None;
    let mut attempts = 0;
    while total < 100 && attempts < 100_000 {
        attempts += 1;
        let net = random_net(&mut rng, NetShape::default());
        if Game::of(&net).reduced(5000) != Some(true) {
            continue;
        }
        total += 1;
        match roundtrips(&net, budget) {
            Ok(true) => pass += 1,
            other => {
                if !has_complementary_labels(&net) {
                    plain_fail += 1;
                }
                counterexample.get_or_insert_with(|| {
                    let why = match other {
                        Err(e) => e,
                        _ => "not isomorphic".into(),
                    };
                    format!("{why}\n{}", mccs::print_net(&net))
                });
            }
        }
    }
    let mut detail = format!(
        "fig4a, fig4b isomorphic; random reduced nets {pass}/{total} ({} failures with complementary labels, {plain_fail} without)",
        total - pass - plain_fail
    );
    if let Some(c) = counterexample {
        detail.push_str("\n  first counterexample: ");
        detail.push_str(&c.trim_end().replace('\n', "\n    "));
    }
    Report::new(total >= 100 && pass == total, detail)
}

fn c8_ccs_nets() -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let budget = Budget::default();
    let (mut pass, mut total, mut plain_fail) = (0, 0, 0);
    let mut failure = None;
    let mut attempts = 0;
    while total < 60 && attempts < 100_000 {
        attempts += 1;
        let net = random_ccs_net(&mut rng, NetShape::default());
        if Game::of(&net).reduced(5000) != Some(true) {
            continue;
        }
        total += 1;
        let program = match translate(&net) {
            Ok(p) => p,
            Err(e) => {
                failure.get_or_insert(format!("translate: {e}"));
                continue;
            }
        };
        let strong = program.main.contains_strong_prefix()
            || program.env.definitions().any(|(_, body): (_, &Term)| body.contains_strong_prefix());
        if strong {
            failure.get_or_insert(format!("strong prefix in\n{program}"));
            continue;
        }
        match roundtrips(&net, budget) {
            Ok(true) => pass += 1,
            _ => {
                if !has_complementary_labels(&net) {
                    plain_fail += 1;
                }
                failure.get_or_insert(format!("not isomorphic:\n{}", mccs::print_net(&net)));
            }
        }
    }
    let mut detail = format!(
        "{pass}/{total} CCS nets: no strong prefix, isomorphic ({} failures with complementary labels, {plain_fail} without)",
        total - pass - plain_fail
    );
    if let Some(f) = failure {
        detail.push_str("\n  first counterexample: ");
        detail.push_str(&f.trim_end().replace('\n', "\n    "));
    }
    Report::new(total >= 50 && pass == total, detail)
}

fn c9_sync() -> Report {
    let facts = sync_closure();
    let ws = words(SYNC_TOTAL - 1);
    let empty = BTreeSet::new();
    let seq = |v: &[Action]| Sequence::new(v.to_vec()).unwrap();
    let mut checked = 0;
    for l1 in 1..SYNC_TOTAL {
        for l2 in 1..=SYNC_TOTAL - l1 {
            for x in &ws[l1] {
                for y in &ws[l2] {
                    let (s1, s2) = (seq(x), seq(y));
                    let got = sync_outcomes(&s1, &s2, SyncMode::General);
                    let want: BTreeSet<Sequence> =
                        facts.get(&(x.clone(), y.clone())).unwrap_or(&empty).iter().map(|v| seq(v)).collect();
                    if got != want {
                        return Report::new(false, format!("Sync({s1}, {s2}) differs from the closure"));
                    }
                    if got != sync_outcomes(&s2, &s1, SyncMode::General) {
                        return Report::new(false, format!("Sync({s1}, {s2}) not symmetric"));
                    }
                    let gated = sync_outcomes(&s1, &s2, SyncMode::FiniteNet);
                    let gate_ok = if s1.len() == 1 || s2.len() == 1 { gated == got } else { gated.is_empty() };
                    if !gate_ok {
                        return Report::new(false, format!("finite-net gate wrong on ({s1}, {s2})"));
                    }
                    if got.iter().any(|s| s.len() >= s1.len() + s2.len()) {
                        return Report::new(false, format!("outcome too long on ({s1}, {s2})"));
                    }
                    checked += 1;
                }
            }
        }
    }
    let worked = sync_outcomes(&parse_sequence("a.a").unwrap(), &parse_sequence("~a").unwrap(), SyncMode::General);
    let worked: Vec<String> = worked.iter().map(|s| s.to_string()).collect();
    Report::new(worked == ["a", "a.tau"], format!("{checked} pairs agree with the closure"))
}

fn c10_doubling() -> Report {
    let b = load("bprocess.mccs");
    let budget = Budget { max_transitions: 40, ..Budget::default() };
    let general = build_net(&b.main, &b.env, SyncMode::General, budget).unwrap();
    let label = parse_sequence("a.~a").unwrap();
    let find = |k: u32| {
        general
            .transitions
            .iter()
            .position(|t| t.pre.size() == k && t.post.size() == 2 * k && t.label == label && t.pre.support().count() == 1)
    };
    let (one, two) = (find(1), find(2));
    let gated = build_net(&b.main, &b.env, SyncMode::FiniteNet, Budget::default()).unwrap();
    let ok = matches!((one, two), (Some(x), Some(y)) if x != y)
        && gated.complete
        && gated.num_transitions() == 1;
    Report::new(
        ok,
        format!("general: p->2p {}, 2p->4p {}; finite-net: {} transition(s)", one.is_some(), two.is_some(), gated.num_transitions()),
    )
}

fn main() {
    let criteria: [(u32, &str, Option<Duration>, fn() -> Report); 10] = [
        (1, "semicounter net", Some(Duration::from_secs(1)), c1_semicounter),
        (2, "dining philosophers net and mutual exclusion", Some(Duration::from_secs(5)), c2_dining),
        (3, "readers and writers decomposition", Some(Duration::from_secs(5)), c3_readers_writers),
        (4, "multiway synchronization", None, c4_multisync),
        (5, "bisimilar against own net", None, c5_against_net),
        (6, "budgets and completeness", None, c6_budgets),
        (7, "round trip of reduced nets", Some(Duration::from_secs(60)), c7_roundtrip_reduced),
        (8, "round trip of CCS nets", None, c8_ccs_nets),
        (9, "synchronization relation", None, c9_sync),
        (10, "transition doubling", None, c10_doubling),
    ];
    let mut unexpected = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let mut r = run();
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > limit {
                r.ok = false;
                r.detail.push_str(&format!(" (over the {}s limit)", limit.as_secs()));
            }
        }
        let tag = if r.ok { "PASS" } else { "FAIL" };
        println!("{tag} [{id:>2}] {name} ({:.2}s): {}", took.as_secs_f64(), r.detail);
        if !r.ok && !EXPECTED_RED.contains(&id) {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} unexpected failure(s)");
        std::process::exit(1);
    }
}
