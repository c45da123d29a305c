use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use ccsynth::closure::{is_trace_closed, ClosureError, ClosureVerdict};
use ccsynth::compose::{sync_product, ComposeError};
use ccsynth::localize::{extend_with_start, implementable_local, project_spec};
use ccsynth::model::{LoadError, Model, StrategiesFile};
use ccsynth::simulate::{check_prefix_consistency, run_simulation, Outcome};
use ccsynth::synthesize::{spec_automata, synthesize, CcStrategy, SynthesisError, SynthesisOptions, Verdict};
use ccsynth::{Ltl, Word};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NOT_CLOSED: u8 = 3;
pub const EXIT_EMPTY: u8 = 4;
pub const EXIT_TOO_LARGE: u8 = 5;
pub const EXIT_UNVERIFIED: u8 = 6;

#[derive(Debug)]
pub enum CliError {
    Load(LoadError),
    Synthesis(SynthesisError),
    Io(String),
    Usage(String),
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Synthesis(SynthesisError::Compose(ComposeError::TooLarge { .. })) => EXIT_TOO_LARGE,
            CliError::Usage(_) => EXIT_USAGE,
            _ => EXIT_INPUT,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Load(e) => write!(f, "{e}"),
            CliError::Synthesis(e) => write!(f, "{e}"),
            CliError::Io(e) | CliError::Usage(e) | CliError::Invalid(e) => f.write_str(e),
        }
    }
}

impl From<LoadError> for CliError {
    fn from(e: LoadError) -> Self {
        CliError::Load(e)
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        CliError::Synthesis(e)
    }
}

impl From<ComposeError> for CliError {
    fn from(e: ComposeError) -> Self {
        CliError::Synthesis(e.into())
    }
}

impl From<ClosureError> for CliError {
    fn from(e: ClosureError) -> Self {
        CliError::Synthesis(e.into())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// The formula text: a file's contents when `spec` names a file.
fn spec_text(spec: Option<&str>) -> Result<Option<String>> {
    match spec {
        Some(s) if Path::new(s).is_file() => fs::read_to_string(s)
            .map(|t| Some(t.trim().to_string()))
            .map_err(|e| CliError::Io(format!("cannot read {s}: {e}"))),
        other => Ok(other.map(str::to_string)),
    }
}

fn load(model: &Path, spec: Option<&str>) -> Result<(Model, Ltl)> {
    let model = Model::load(model)?;
    let text = spec_text(spec)?;
    let phi = model.parse_spec(text.as_deref())?;
    Ok((model, phi))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn print_not_closed(inside: &Word, outside: &Word) {
    println!("NotClosed");
    println!("  in language:     {inside}");
    println!("  not in language: {outside}");
}

pub fn check_closure(model: &Path, spec: Option<&str>) -> Result<u8> {
    let (model, phi) = load(model, spec)?;
    let (b_phi, b_not_phi) = spec_automata(&phi, model.distribution.global());
    match is_trace_closed(&b_phi, &b_not_phi, &model.distribution)? {
        ClosureVerdict::Closed => {
            println!("Closed");
            Ok(EXIT_OK)
        }
        ClosureVerdict::NotClosed { inside, outside } => {
            print_not_closed(&inside, &outside);
            Ok(EXIT_NOT_CLOSED)
        }
    }
}

pub fn synth(model: &Path, spec: Option<&str>, max_states: usize, out: Option<&Path>) -> Result<u8> {
    let (model, phi) = load(model, spec)?;
    let options = SynthesisOptions {
        max_product_states: max_states,
    };
    let report = synthesize(&phi, &model.distribution, &model.systems, &options)?;
    let stats = &report.stats;
    let mut summary = String::new();
    let mut line = |s: String| {
        summary.push_str(&s);
        summary.push('\n');
    };
    let code = match &report.verdict {
        Verdict::NotTraceClosed { inside, outside } => {
            print_not_closed(inside, outside);
            return Ok(EXIT_NOT_CLOSED);
        }
        Verdict::EmptyIntersection => {
            println!("EmptyIntersection");
            println!("  no word satisfies the specification and is implementable by every agent");
            for (agent, (b, e)) in model.distribution.agents().iter().zip(&stats.local_states) {
                println!("  agent {agent}: local specification {b} states, implementable {e} states");
            }
            return Ok(EXIT_EMPTY);
        }
        Verdict::Success(success) => {
            line("Success".to_string());
            line(format!(
                "  specification automaton: {} states (negation: {})",
                stats.spec_states, stats.negated_spec_states
            ));
            for (i, s) in success.strategies.iter().enumerate() {
                let (b, e) = stats.local_states[i];
                let shape = if s.run.is_finite() { "finite" } else { "lasso" };
                line(format!(
                    "  agent {}: local specification {b} states, implementable {e} states, {shape} strategy, word {}",
                    s.agent, success.local_words[i]
                ));
            }
            line(format!(
                "  product: {} states (bound {})",
                stats.product_states, stats.product_bound
            ));
            line(format!("  global word: {}", success.global_word));
            let v = &success.verification;
            if v.passed() {
                line("  verification: passed".to_string());
                EXIT_OK
            } else {
                line("  verification: FAILED".to_string());
                for p in &v.problems {
                    line(format!("    {p}"));
                }
                EXIT_UNVERIFIED
            }
        }
    };
    let Verdict::Success(success) = &report.verdict else { unreachable!() };
    write_output(out, &success.to_file().to_json())?;
    if out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(code)
}

pub struct SimulateArgs<'a> {
    pub model: &'a Path,
    pub strategies: &'a Path,
    pub seed: u64,
    pub runs: u64,
    pub max_events: usize,
    pub out: Option<&'a Path>,
}

pub fn simulate(args: &SimulateArgs<'_>) -> Result<u8> {
    let model = Model::load(args.model)?;
    let file = StrategiesFile::load(args.strategies)?;
    let d = &model.distribution;
    let mut strategies = Vec::new();
    let mut words = vec![None; d.len()];
    for entry in &file.agents {
        let i = model.agent_index(&entry.id)?;
        let ts = &model.systems[i];
        let s = CcStrategy::from_entry(entry, ts, d);
        s.check(ts)
            .map_err(|e| CliError::Invalid(format!("strategy of agent `{}`: {e}", entry.id)))?;
        words[i] = s.word(ts);
        strategies.push(s);
    }
    let words: Vec<Word> = words
        .into_iter()
        .zip(d.agents())
        .map(|(w, a)| w.ok_or_else(|| CliError::Invalid(format!("no strategy for agent `{a}`"))))
        .collect::<Result<_>>()?;
    if let Some(dir) = args.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    }

    let (mut deadlocks, mut consistent) = (0, 0);
    for k in 0..args.runs {
        let seed = args.seed.wrapping_add(k);
        let trace = run_simulation(&strategies, &model.systems, d, seed, args.max_events);
        let ok = check_prefix_consistency(&trace, &words, d);
        consistent += u64::from(ok);
        let outcome = match &trace.outcome {
            Outcome::RunningBoundReached => "bound reached".to_string(),
            Outcome::AllFinished => "all finished".to_string(),
            Outcome::Deadlock(waiting) => {
                deadlocks += 1;
                let edges: Vec<String> = waiting
                    .iter()
                    .map(|(a, p, on)| {
                        let on: Vec<String> = on.iter().map(ToString::to_string).collect();
                        format!("{a} waits for {} on {p}", on.join(","))
                    })
                    .collect();
                format!("DEADLOCK ({})", edges.join("; "))
            }
        };
        println!(
            "seed {seed}: {outcome}, {} properties, {}",
            trace.word.len(),
            if ok { "consistent" } else { "INCONSISTENT" }
        );
        if let Some(dir) = args.out {
            let path = dir.join(format!("trace_{seed}.txt"));
            write_output(Some(&path), &trace.to_lines())?;
        }
    }
    println!("runs: {}, deadlocks: {deadlocks}, consistent: {consistent}/{}", args.runs, args.runs);
    Ok(EXIT_OK)
}

pub fn export_dot(model: &Path, spec: Option<&str>, which: &str, max_states: usize, out: Option<&Path>) -> Result<u8> {
    let (model, phi) = load(model, spec)?;
    let d = &model.distribution;
    let (b_phi, _) = spec_automata(&phi, d.global());
    let local = |i: usize| {
        let b_i = project_spec(&b_phi, d.alphabet(i)).reduce();
        let e_i = implementable_local(&extend_with_start(&model.systems[i]), &b_i)
            .expect("model alphabets agree")
            .automaton
            .reduce();
        (b_i, e_i)
    };
    let text = match which.split_once(':') {
        None if which == "bphi" => b_phi.to_dot(),
        None if which == "product" => {
            let components = (0..d.len()).map(|i| local(i).1).collect();
            sync_product(components)?.to_dot(max_states)?
        }
        Some((kind @ ("bi" | "ei"), agent)) => {
            let (b_i, e_i) = local(model.agent_index(agent)?);
            if kind == "bi" {
                b_i.to_dot()
            } else {
                e_i.to_dot()
            }
        }
        _ => {
            return Err(CliError::Usage(format!(
                "unknown --which `{which}`; expected bphi, bi:AGENT, ei:AGENT or product"
            )))
        }
    };
    write_output(out, &text)?;
    Ok(EXIT_OK)
}
