use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mccs::{
    build_net, check_wellformed, classify_finite_net, explore, is_reduced, is_safe, isomorphic,
    lts_to_dot, marking_graph, net_to_dot, parse_net, parse_program, parse_sequence, print_net,
    sync_outcomes, translate, Budget, Error, Lts, Marking, PTNet, Program, Semantics, SyncMode,
};

const EXIT_PROPERTY: u8 = 1;
const EXIT_PARSE: u8 = 3;
const EXIT_WELLFORMED: u8 = 4;
const EXIT_BUDGET: u8 = 5;
const EXIT_IO: u8 = 6;

#[derive(Parser)]
#[command(name = "mccs", version, about = "Multi-CCS semantics, nets and translations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    General,
    FiniteNet,
}

#[derive(Args, Clone)]
struct Limits {
    /// general or finite-net; defaults to finite-net when the program is in that fragment
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = 10_000)]
    max_states: usize,
    #[arg(long, default_value_t = 5_000)]
    max_places: usize,
    #[arg(long = "max-trans", default_value_t = 20_000)]
    max_transitions: usize,
    #[arg(long, default_value_t = 16)]
    max_seq_len: usize,
}

impl Limits {
    fn budget(&self) -> Budget {
        Budget {
            max_states: self.max_states.max(1),
            max_seq_len: self.max_seq_len.max(1),
            max_places: self.max_places.max(1),
            max_transitions: self.max_transitions.max(1),
        }
    }

    fn mode_for(&self, p: &Program) -> SyncMode {
        match self.mode {
            Some(Mode::General) => SyncMode::General,
            Some(Mode::FiniteNet) => SyncMode::FiniteNet,
            None if classify_finite_net(&p.env, &p.main).finite_net => SyncMode::FiniteNet,
            None => SyncMode::General,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Well-formedness and finite-net classification of a program
    Check { file: PathBuf },
    /// Build and summarize the transition system of a program
    Lts {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
        /// Write the LTS in DOT format
        #[arg(long)]
        dot: Option<PathBuf>,
        /// List every transition
        #[arg(long)]
        verbose: bool,
    },
    /// Build the P/T net of a program
    Net {
        file: PathBuf,
        #[command(flatten)]
        limits: Limits,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Write the net in the .pnet text format
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Translate a net into a finite-net program
    Translate {
        net: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Translate a net, rebuild its net and check isomorphism with the original
    Roundtrip {
        net: PathBuf,
        #[command(flatten)]
        limits: Limits,
    },
    /// Strong bisimilarity of two programs or nets, or of a program and its net
    Bisim {
        first: PathBuf,
        second: Option<PathBuf>,
        /// Compare the program's LTS with the marking graph of its net
        #[arg(long)]
        against_net: bool,
        #[command(flatten)]
        limits: Limits,
        /// Also print the machine-readable report block
        #[arg(long)]
        structured: bool,
    },
    /// Isomorphism of two nets
    Iso {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        structured: bool,
    },
    /// Print all synchronizations of two dotted sequences
    SyncDebug {
        first: String,
        second: String,
        #[arg(long, value_enum, default_value = "general")]
        mode: Mode,
    },
    /// Interactively fire transitions of a program or net
    Step {
        file: PathBuf,
        /// Play the token game of the program's net instead of the SOS rules
        #[arg(long)]
        net: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Emit DOT for a program's LTS (or net with --net) or for a .pnet file
    Dot {
        file: PathBuf,
        #[arg(long)]
        net: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        limits: Limits,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Parse { .. } => EXIT_PARSE,
            Error::UndefinedConstant(_) | Error::Unguarded(_) | Error::IllFormed(_) => EXIT_WELLFORMED,
            Error::Incomplete(_) => EXIT_BUDGET,
            Error::Translate(_) => EXIT_IO,
        };
        fail(code, e.to_string())
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn is_net_file(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "pnet")
}

fn load_program(path: &Path) -> Result<Program, Failure> {
    let text = read(path)?;
    let p = parse_program(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let report = check_wellformed(&p.env, &p.main);
    if !report.is_ok() {
        return Err(fail(EXIT_WELLFORMED, format!("{}: {}", path.display(), report.to_string().trim_end())));
    }
    Ok(p)
}

fn load_net(path: &Path) -> Result<PTNet, Failure> {
    let text = read(path)?;
    parse_net(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn mode_name(m: SyncMode) -> &'static str {
    match m {
        SyncMode::General => "general",
        SyncMode::FiniteNet => "finite-net",
    }
}

fn completeness(complete: bool) -> &'static str {
    if complete {
        "complete"
    } else {
        "incomplete (budget exhausted)"
    }
}

macro_rules! emit {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        let _ = writeln!($out, $($arg)*);
    }};
}

macro_rules! put {
    ($out:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        let _ = write!($out, $($arg)*);
    }};
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli.command, &mut out);
    // A closed pipe downstream is not an error of ours.
    let _ = io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cmd: Command, out: &mut String) -> Outcome {
    match cmd {
        Command::Check { file } => check(out, &file),
        Command::Lts {
            file,
            limits,
            dot,
            verbose,
        } => lts(out, &file, &limits, dot.as_deref(), verbose),
        Command::Net {
            file,
            limits,
            dot,
            export,
        } => net(out, &file, &limits, dot.as_deref(), export.as_deref()),
        Command::Translate { net, output } => {
            let n = load_net(&net)?;
            let text = translate(&n)?.to_string();
            match output {
                Some(path) => write(&path, &text)?,
                None => put!(out, "{text}"),
            }
            Ok(0)
        }
        Command::Roundtrip { net, limits } => roundtrip(out, &net, &limits),
        Command::Bisim {
            first,
            second,
            against_net,
            limits,
            structured,
        } => bisim(out, &first, second.as_deref(), against_net, &limits, structured),
        Command::Iso {
            first,
            second,
            structured,
        } => {
            let (a, b) = (load_net(&first)?, load_net(&second)?);
            match isomorphic(&a, &b) {
                Some(w) => {
                    put!(out, "{}", w.report(&a, &b));
                    if structured {
                        put!(out, "{}", w.structured(&a, &b));
                    }
                    Ok(0)
                }
                None => {
                    emit!(out, "isomorphic: no");
                    if structured {
                        put!(out, "begin iso\nrelated false\nend iso\n");
                    }
                    Ok(EXIT_PROPERTY)
                }
            }
        }
        Command::SyncDebug {
            first,
            second,
            mode,
        } => {
            let parse = |s: &str| parse_sequence(s).map_err(|e| fail(EXIT_PARSE, format!("`{s}`: {e}")));
            let (a, b) = (parse(&first)?, parse(&second)?);
            let mode = match mode {
                Mode::General => SyncMode::General,
                Mode::FiniteNet => SyncMode::FiniteNet,
            };
            let outs = sync_outcomes(&a, &b, mode);
            emit!(out, "Sync({a}, {b}) [{}]: {} outcome(s)", mode_name(mode), outs.len());
            for s in outs {
                emit!(out, "  {s}");
            }
            Ok(0)
        }
        Command::Step { file, net, limits } => step(&file, net, &limits),
        Command::Dot {
            file,
            net,
            output,
            limits,
        } => {
            let text = if is_net_file(&file) {
                net_to_dot(&load_net(&file)?)
            } else {
                let p = load_program(&file)?;
                let mode = limits.mode_for(&p);
                if net {
                    net_to_dot(&build_net(&p.main, &p.env, mode, limits.budget())?)
                } else {
                    let (l, _) = explore(&p.main, &p.env, mode, limits.budget())?;
                    lts_to_dot(&l)
                }
            };
            match output {
                Some(path) => write(&path, &text)?,
                None => put!(out, "{text}"),
            }
            Ok(0)
        }
    }
}

fn check(out: &mut String, file: &Path) -> Outcome {
    let text = read(file)?;
    let p = parse_program(&text).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", file.display())))?;
    let report = check_wellformed(&p.env, &p.main);
    put!(out, "{report}");
    if !report.is_ok() {
        return Ok(EXIT_WELLFORMED);
    }
    put!(out, "{}", classify_finite_net(&p.env, &p.main));
    Ok(0)
}

fn lts(out: &mut String, file: &Path, limits: &Limits, dot: Option<&Path>, verbose: bool) -> Outcome {
    let p = load_program(file)?;
    let mode = limits.mode_for(&p);
    let (l, _) = explore(&p.main, &p.env, mode, limits.budget())?;
    emit!(out, 
        "{} states, {} transitions, {} [mode {}]",
        l.num_states(),
        l.transitions.len(),
        completeness(l.complete),
        mode_name(mode)
    );
    emit!(out, "initial: {}", l.states[l.initial]);
    if verbose {
        print_lts(out, &l);
    }
    if let Some(path) = dot {
        write(path, &lts_to_dot(&l))?;
    }
    Ok(if l.complete { 0 } else { EXIT_BUDGET })
}

fn print_lts(out: &mut String, l: &Lts) {
    for (i, s) in l.states.iter().enumerate() {
        emit!(out, "  state {i}: {s}");
    }
    for (s, lab, t) in &l.transitions {
        emit!(out, "  {s} --{lab}--> {t}");
    }
}

fn net(out: &mut String, file: &Path, limits: &Limits, dot: Option<&Path>, export: Option<&Path>) -> Outcome {
    let p = load_program(file)?;
    let mode = limits.mode_for(&p);
    let budget = limits.budget();
    let n = build_net(&p.main, &p.env, mode, budget)?;
    emit!(out, 
        "{} places, {} transitions, {} [mode {}]",
        n.num_places(),
        n.num_transitions(),
        completeness(n.complete),
        mode_name(mode)
    );
    emit!(out, "reduced: {}", is_reduced(&n, &budget));
    emit!(out, "safe: {}", is_safe(&n, &budget));
    put!(out, "{}", mccs::net::describe(&n));
    if let Some(path) = dot {
        write(path, &net_to_dot(&n))?;
    }
    if let Some(path) = export {
        write(path, &print_net(&n))?;
    }
    Ok(if n.complete { 0 } else { EXIT_BUDGET })
}

fn roundtrip(out: &mut String, file: &Path, limits: &Limits) -> Outcome {
    let original = load_net(file)?;
    let program = translate(&original)?;
    let rebuilt = build_net(&program.main, &program.env, SyncMode::FiniteNet, limits.budget())?;
    if !rebuilt.complete {
        return Err(fail(EXIT_BUDGET, "rebuilding the net exhausted the budget"));
    }
    match isomorphic(&original, &rebuilt) {
        Some(w) => {
            emit!(out, "isomorphic: yes");
            for (i, q) in w.map.iter().enumerate() {
                let term = rebuilt.places[q.index()]
                    .term
                    .as_ref()
                    .map(|t| t.to_string())
                    .unwrap_or_default();
                emit!(out, "  {} -> {} = {}", original.places[i].name, rebuilt.place_name(*q), term);
            }
            Ok(0)
        }
        None => {
            emit!(out, "isomorphic: no");
            emit!(out, 
                "original: {} places, {} transitions; rebuilt: {} places, {} transitions",
                original.num_places(),
                original.num_transitions(),
                rebuilt.num_places(),
                rebuilt.num_transitions()
            );
            emit!(out, "--- original");
            put!(out, "{}", mccs::net::describe(&original));
            emit!(out, "--- rebuilt");
            put!(out, "{}", mccs::net::describe(&rebuilt));
            Ok(EXIT_PROPERTY)
        }
    }
}

fn system_of(file: &Path, limits: &Limits) -> Result<Lts, Failure> {
    if is_net_file(file) {
        Ok(marking_graph(&load_net(file)?, &limits.budget()))
    } else {
        let p = load_program(file)?;
        Ok(explore(&p.main, &p.env, limits.mode_for(&p), limits.budget())?.0)
    }
}

fn bisim(out: &mut String, first: &Path, second: Option<&Path>, against_net: bool, limits: &Limits, structured: bool) -> Outcome {
    let (a, b) = match (second, against_net) {
        (None, true) => {
            let p = load_program(first)?;
            let mode = limits.mode_for(&p);
            let budget = limits.budget();
            let (l, _) = explore(&p.main, &p.env, mode, budget)?;
            let n = build_net(&p.main, &p.env, mode, budget)?;
            if !n.complete {
                return Err(fail(EXIT_BUDGET, "net construction exhausted the budget"));
            }
            (l, marking_graph(&n, &budget))
        }
        (Some(second), false) => (system_of(first, limits)?, system_of(second, limits)?),
        _ => return Err(fail(2, "give either two files or one program with --against-net")),
    };
    let r = mccs::bisimilar(&a, &b)?;
    put!(out, "{}", r.report());
    if structured {
        put!(out, "{}", r.structured());
    }
    Ok(if r.related { 0 } else { EXIT_PROPERTY })
}

fn step(file: &Path, use_net: bool, limits: &Limits) -> Outcome {
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    let mut prompt = |choices: usize| -> Option<usize> {
        loop {
            print!("choose [1-{choices}, q]> ");
            let _ = io::stdout().flush();
            let line = lines.next()?.ok()?;
            let line = line.trim();
            if line == "q" || line == "quit" {
                return None;
            }
            match line.parse::<usize>() {
                Ok(k) if (1..=choices).contains(&k) => return Some(k - 1),
                _ => println!("expected a number between 1 and {choices}, or q"),
            }
        }
    };
    if is_net_file(file) || use_net {
        let n = if is_net_file(file) {
            load_net(file)?
        } else {
            let p = load_program(file)?;
            build_net(&p.main, &p.env, limits.mode_for(&p), limits.budget())?
        };
        let mut m: Marking = n.initial.clone();
        loop {
            println!("marking: {}", n.marking_string(&m));
            let enabled = n.enabled(&m);
            if enabled.is_empty() {
                println!("no enabled transitions");
                return Ok(0);
            }
            for (k, t) in enabled.iter().enumerate() {
                let tr = &n.transitions[*t];
                println!("  {}. {} [{}]", k + 1, tr.label, tr.name);
            }
            match prompt(enabled.len()) {
                Some(k) => m = n.fire(&m, enabled[k]),
                None => return Ok(0),
            }
        }
    }
    let p = load_program(file)?;
    let mode = limits.mode_for(&p);
    let mut sem = Semantics::new(&p.env, mode, limits.budget());
    let mut state = mccs::normalize(&p.main, &p.env)?;
    loop {
        println!("state: {state}");
        let succ = sem.step(&state)?;
        if succ.is_empty() {
            println!("no enabled transitions");
            return Ok(0);
        }
        for (k, (l, target)) in succ.iter().enumerate() {
            println!("  {}. {} -> {}", k + 1, l, target);
        }
        match prompt(succ.len()) {
            Some(k) => state = succ[k].1.clone(),
            None => return Ok(0),
        }
    }
}
