//! The `usp` command: evaluates rules, checks axioms and strategyproofness,
//! runs synthesis and prints threshold tables. Every command prints one JSON
//! [`Report`] and exits 0 (pass, feasible, value), 1 (fail, infeasible) or
//! 2 (usage error or refusal).

pub mod figure1;
pub mod payload;
pub mod report;

use std::path::Path;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use usp_core::axioms::{Axiom, SweepDomain, AXIOM_NAMES};
use usp_core::manip::{check_u_pi_sp_with, check_u_sp_with, sp_boundary_with, Reduction, SpOptions};
use usp_core::profile::alternative_name;
use usp_core::rational;
use usp_core::synth::{
    certify_condorcet_gadget, certify_condorcet_impossibility, certify_expost_impossibility,
    certify_rank_based_impossibility, BoundSolver, GadgetCase, SynthesisOutcome, SynthesisProblem,
    SynthesisStatus,
};
use usp_core::{parse_rule, Error, Preset, Profile, Result, UtilitySet, UtilityVector};

pub use figure1::{threshold_table, ThresholdRow, ThresholdTable};
pub use report::{Inputs, Outcome, Report};

#[derive(Parser, Debug)]
#[command(
    name = "usp",
    version,
    about = "Exact strategyproofness checks and synthesis for randomized voting rules"
)]
pub struct Cli {
    /// Worker threads for sweeps and bound computations (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lottery chosen by a rule at one profile.
    Eval {
        #[arg(long)]
        rule: String,
        /// Profile file, or inline `a>b>c; b>c>a; ...`.
        #[arg(long)]
        profile: String,
    },
    /// Axiom sweeps over all profiles of a size.
    Axioms {
        #[command(subcommand)]
        command: AxiomsCommand,
    },
    /// Strategyproofness for a set of utility functions.
    Sp {
        #[command(subcommand)]
        command: SpCommand,
    },
    /// Rule synthesis and impossibility certificates.
    Synth {
        #[command(subcommand)]
        command: SynthCommand,
    },
    /// Threshold table: least `u(1)` making rd, rd_k and omni_star strategyproof.
    Figure1 {
        #[arg(long)]
        m: usize,
        /// `u(2), ..., u(m)`, e.g. `3,2,1,0`.
        #[arg(long)]
        tail: String,
        #[arg(long)]
        n: usize,
        /// Largest `k` for the rd_k rows.
        #[arg(long, default_value_t = 3)]
        max_rd_k: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum AxiomsCommand {
    Check {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        axiom: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        alpha: Option<String>,
        /// Refuse sweeps over more profiles than this.
        #[arg(long)]
        cap: Option<u128>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SpCommand {
    /// Exhaustive search for a profitable misreport.
    Check {
        #[arg(long)]
        rule: String,
        /// Utility-set file, preset (`SD`, `RDK:k=1`, `OMNI`, `EQUIDISTANT`,
        /// `EPS_INDIFF:eps=1/4`), or `finite:<u>;<u>` / `vertices:<u>;<u>`.
        #[arg(long, conflicts_with = "utility")]
        utility_set: Option<String>,
        /// A single utility vector, applied through each voter's ranks.
        #[arg(long)]
        utility: Option<String>,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        /// auto, full, anonymous or tops_only.
        #[arg(long, default_value = "auto")]
        reduction: String,
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Least `u(1)` for which the rule is strategyproof, given `u(2..m)`.
    Boundary {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        tail: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "auto")]
        reduction: String,
        #[arg(long)]
        cap: Option<u128>,
    },
}

#[derive(Subcommand, Debug)]
pub enum SynthCommand {
    /// Solve a synthesis problem file.
    Run {
        #[arg(long)]
        problem: String,
        /// Write a feasible table here (usable as `table:<file>`).
        #[arg(long)]
        out: Option<String>,
    },
    /// Least and greatest feasible probability per class and alternative.
    Bounds {
        #[arg(long)]
        problem: String,
        /// Restrict to the class of this profile (file or inline).
        #[arg(long)]
        profile: Option<String>,
        /// Restrict to this alternative (index or letter).
        #[arg(long)]
        alternative: Option<String>,
    },
    /// Rank-based, k-unanimous rules under a single utility below the bound.
    #[command(name = "certify-thm2")]
    CertifyThm2 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        utility: String,
    },
    /// Condorcet-consistent rules on the gadget profiles.
    #[command(name = "certify-thm3")]
    CertifyThm3 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        utility: String,
        /// Force a gadget (`one` or `two`) instead of choosing by the utility.
        #[arg(long)]
        case: Option<String>,
    },
    /// Ex post efficient rules with a strengthened unanimity guarantee.
    #[command(name = "certify-thm5")]
    CertifyThm5 {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        utility: String,
    },
}

/// Verdict, payload and statistics of one command.
struct Answer {
    result: Outcome,
    payload: Value,
    stats: Value,
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// exit code and the text to print on standard output.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let report = execute(&cli, &argv[1.min(argv.len())..]);
    (report.exit_code(), report.to_json())
}

/// Runs a parsed command and wraps the outcome in a [`Report`].
pub fn execute(cli: &Cli, command: &[String]) -> Report {
    let start = Instant::now();
    let mut inputs = Inputs::new(command);
    let answer = with_jobs(cli.jobs, || dispatch(&cli.command, &mut inputs)).unwrap_or_else(|e| Answer {
        result: Outcome::Error,
        payload: json!({ "error": e.to_string() }),
        stats: Value::Null,
    });
    Report {
        command: command.to_vec(),
        inputs_digest: inputs.digest(),
        result: answer.result,
        payload: answer.payload,
        stats: answer.stats,
        duration_ms: start.elapsed().as_millis() as u64,
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match jobs {
        None => f(),
        Some(0) => Err(Error::parse("--jobs must be at least 1")),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(f),
    }
}

fn dispatch(command: &Command, inputs: &mut Inputs) -> Result<Answer> {
    match command {
        Command::Eval { rule, profile } => eval(rule, profile, inputs),
        Command::Axioms {
            command:
                AxiomsCommand::Check {
                    rule,
                    axiom,
                    m,
                    n,
                    k,
                    alpha,
                    cap,
                },
        } => axioms_check(rule, axiom, *m, *n, *k, alpha.as_deref(), *cap),
        Command::Sp { command } => match command {
            SpCommand::Check {
                rule,
                utility_set,
                utility,
                m,
                n,
                reduction,
                cap,
            } => sp_check(rule, utility_set.as_deref(), utility.as_deref(), *m, *n, reduction, *cap, inputs),
            SpCommand::Boundary {
                rule,
                tail,
                m,
                n,
                reduction,
                cap,
            } => sp_boundary_cmd(rule, tail, *m, *n, reduction, *cap),
        },
        Command::Synth { command } => match command {
            SynthCommand::Run { problem, out } => synth_run(problem, out.as_deref(), inputs),
            SynthCommand::Bounds {
                problem,
                profile,
                alternative,
            } => synth_bounds(problem, profile.as_deref(), alternative.as_deref(), inputs),
            SynthCommand::CertifyThm2 { m, n, k, utility } => {
                let u = UtilityVector::parse(utility)?;
                let out = certify_rank_based_impossibility(*m, *n, *k, &u)?;
                Ok(synthesis_answer(&out, json!({ "utility": u })))
            }
            SynthCommand::CertifyThm3 { m, utility, case } => {
                let u = UtilityVector::parse(utility)?;
                let cert = match case.as_deref() {
                    None => certify_condorcet_impossibility(*m, &u)?,
                    Some("one") => certify_condorcet_gadget(*m, &u, GadgetCase::One)?,
                    Some("two") => certify_condorcet_gadget(*m, &u, GadgetCase::Two)?,
                    Some(other) => {
                        return Err(Error::parse(format!(
                            "unknown gadget case `{other}`; valid cases: one, two"
                        )))
                    }
                };
                let names: Vec<String> = (0..*m).map(alternative_name).collect();
                let context = json!({
                    "utility": u,
                    "case": cert.case,
                    "profiles": cert.profiles.iter().map(|p| p.to_text(Some(&names))).collect::<Vec<_>>(),
                    "condorcet_winners": cert.winners.iter().map(|w| w.map(alternative_name)).collect::<Vec<_>>(),
                });
                Ok(synthesis_answer(&cert.outcome, context))
            }
            SynthCommand::CertifyThm5 {
                m,
                n,
                k,
                epsilon,
                utility,
            } => {
                let u = UtilityVector::parse(utility)?;
                let eps = rational::parse(epsilon)?;
                let out = certify_expost_impossibility(*m, *n, *k, &eps, &u)?;
                Ok(synthesis_answer(&out, json!({ "utility": u, "epsilon": eps.to_string() })))
            }
        },
        Command::Figure1 { m, tail, n, max_rd_k } => {
            let tail = rational::parse_list(tail)?;
            let table = threshold_table(*m, &tail, *n, *max_rd_k, &SpOptions::default())?;
            let rendered = table.render();
            let mut payload = serde_json::to_value(&table).expect("table serializes");
            payload["text"] = Value::String(rendered);
            Ok(Answer {
                result: Outcome::Value,
                payload,
                stats: json!({ "rows": table.rows.len() }),
            })
        }
    }
}

fn read_or_inline_profile(arg: &str, inputs: &mut Inputs) -> Result<(Vec<String>, Profile)> {
    if Path::new(arg).is_file() {
        let text = inputs
            .read(arg)
            .map_err(|e| Error::parse(format!("cannot read `{arg}`: {e}")))?;
        Profile::parse_text(&text)
    } else {
        let p = Profile::parse_compact(arg)?;
        Ok(((0..p.m()).map(alternative_name).collect(), p))
    }
}

fn eval(rule: &str, profile: &str, inputs: &mut Inputs) -> Result<Answer> {
    let f = parse_rule(rule)?;
    let (names, p) = read_or_inline_profile(profile, inputs)?;
    let lottery = f.evaluate(&p)?;
    let by_name: serde_json::Map<String, Value> = names
        .iter()
        .zip(lottery.probs())
        .map(|(name, q)| (name.clone(), Value::String(q.to_string())))
        .collect();
    Ok(Answer {
        result: Outcome::Value,
        payload: json!({
            "rule": f.name(),
            "m": p.m(),
            "n": p.n(),
            "lottery": lottery,
            "by_alternative": by_name,
        }),
        stats: Value::Null,
    })
}

fn with_cap(opts: &mut SpOptions, cap: Option<u128>) {
    if let Some(c) = cap {
        opts.cap = c;
    }
}

fn axioms_check(
    rule: &str,
    axiom: &str,
    m: usize,
    n: usize,
    k: Option<usize>,
    alpha: Option<&str>,
    cap: Option<u128>,
) -> Result<Answer> {
    let f = parse_rule(rule)?;
    let alpha = alpha.map(rational::parse).transpose()?;
    let axiom = Axiom::parse(axiom, k, alpha).map_err(|e| match e {
        Error::Parse(msg) if !msg.contains("valid") => {
            Error::Parse(format!("{msg}; valid axioms: {AXIOM_NAMES}"))
        }
        other => other,
    })?;
    let mut domain = SweepDomain::full(m, n);
    if let Some(c) = cap {
        domain = domain.with_cap(c);
    }
    let report = axiom.check(f.as_ref(), &domain)?;
    Ok(Answer {
        result: if report.passed() { Outcome::Pass } else { Outcome::Fail },
        stats: json!({ "profiles_visited": report.profiles_visited }),
        payload: serde_json::to_value(&report).expect("report serializes"),
    })
}

/// Resolves `--utility-set`: a file, a preset, or an inline list.
fn utility_set(arg: &str, m: usize, inputs: &mut Inputs) -> Result<UtilitySet> {
    if Path::new(arg).is_file() {
        let text = inputs
            .read(arg)
            .map_err(|e| Error::parse(format!("cannot read `{arg}`: {e}")))?;
        let doc: usp_core::utility::UtilitySetDoc =
            serde_json::from_str(&text).map_err(|e| Error::parse(format!("utility set: {e}")))?;
        return doc.build();
    }
    let vectors = |list: &str| -> Result<Vec<UtilityVector>> {
        list.split(';').map(|v| UtilityVector::parse(v.trim())).collect()
    };
    if let Some(list) = arg.strip_prefix("finite:") {
        return UtilitySet::finite(vectors(list)?);
    }
    if let Some(list) = arg.strip_prefix("vertices:") {
        return UtilitySet::vertices(vectors(list)?);
    }
    UtilitySet::preset(Preset::parse(arg)?, m)
}

#[allow(clippy::too_many_arguments)]
fn sp_check(
    rule: &str,
    set: Option<&str>,
    single: Option<&str>,
    m: usize,
    n: usize,
    reduction: &str,
    cap: Option<u128>,
    inputs: &mut Inputs,
) -> Result<Answer> {
    let f = parse_rule(rule)?;
    let mut opts = SpOptions {
        reduction: Reduction::parse(reduction)?,
        ..SpOptions::default()
    };
    with_cap(&mut opts, cap);
    let report = match (set, single) {
        (Some(s), None) => check_u_sp_with(f.as_ref(), &utility_set(s, m, inputs)?, m, n, &opts)?,
        (None, Some(u)) => check_u_pi_sp_with(f.as_ref(), &UtilityVector::parse(u)?, m, n, &opts)?,
        _ => return Err(Error::parse("give exactly one of --utility-set and --utility")),
    };
    Ok(Answer {
        result: if report.passed() { Outcome::Pass } else { Outcome::Fail },
        stats: json!({ "units_visited": report.units_visited, "reduction": report.reduction }),
        payload: serde_json::to_value(&report).expect("report serializes"),
    })
}

fn sp_boundary_cmd(
    rule: &str,
    tail: &str,
    m: usize,
    n: usize,
    reduction: &str,
    cap: Option<u128>,
) -> Result<Answer> {
    let f = parse_rule(rule)?;
    let tail = rational::parse_list(tail)?;
    let mut opts = SpOptions {
        reduction: Reduction::parse(reduction)?,
        ..SpOptions::default()
    };
    with_cap(&mut opts, cap);
    let b = sp_boundary_with(f.as_ref(), &tail, m, n, &opts)?;
    Ok(Answer {
        result: Outcome::Value,
        payload: json!({
            "rule": f.name(),
            "tail": rational::format_list(&tail),
            "threshold": b.threshold.to_string(),
            "attained": b.attained,
        }),
        stats: Value::Null,
    })
}

fn synthesis_answer(out: &SynthesisOutcome, context: Value) -> Answer {
    let stats = serde_json::to_value(&out.stats).expect("stats serialize");
    match &out.status {
        SynthesisStatus::Feasible(table) => Answer {
            result: Outcome::Feasible,
            payload: json!({ "context": context, "table": table }),
            stats,
        },
        SynthesisStatus::Infeasible(inf) => Answer {
            result: Outcome::Infeasible,
            payload: json!({ "context": context, "infeasibility": payload::infeasibility_json(inf) }),
            stats,
        },
    }
}

fn read_problem(path: &str, inputs: &mut Inputs) -> Result<SynthesisProblem> {
    let text = inputs
        .read(path)
        .map_err(|e| Error::parse(format!("cannot read `{path}`: {e}")))?;
    SynthesisProblem::from_json(&text)
}

fn synth_run(problem: &str, out: Option<&str>, inputs: &mut Inputs) -> Result<Answer> {
    let p = read_problem(problem, inputs)?;
    let outcome = usp_core::synth::synthesize(&p)?;
    if let (Some(path), Some(table)) = (out, outcome.table()) {
        let text = serde_json::to_string_pretty(table).expect("table serializes");
        std::fs::write(path, text).map_err(|e| Error::parse(format!("cannot write `{path}`: {e}")))?;
    }
    Ok(synthesis_answer(&outcome, json!({ "m": p.m, "n": p.n })))
}

fn parse_alternative(s: &str, m: usize) -> Result<usize> {
    let x = match s.parse::<usize>() {
        Ok(x) => x,
        Err(_) => match s.as_bytes() {
            [c] if c.is_ascii_lowercase() => (c - b'a') as usize,
            _ => return Err(Error::parse(format!("bad alternative `{s}`"))),
        },
    };
    if x >= m {
        return Err(Error::domain(format!("alternative {s} is out of range for m = {m}")));
    }
    Ok(x)
}

fn synth_bounds(
    problem: &str,
    profile: Option<&str>,
    alternative: Option<&str>,
    inputs: &mut Inputs,
) -> Result<Answer> {
    let p = read_problem(problem, inputs)?;
    let solver = match BoundSolver::new(&p)? {
        Ok(s) => s,
        Err(inf) => {
            return Ok(Answer {
                result: Outcome::Infeasible,
                payload: json!({ "infeasibility": payload::infeasibility_json(&inf) }),
                stats: Value::Null,
            })
        }
    };
    let index = solver.index();
    let classes: Vec<usize> = match profile {
        Some(arg) => {
            let (_, prof) = read_or_inline_profile(arg, inputs)?;
            vec![index
                .class_of(&prof)
                .ok_or_else(|| Error::domain(format!("profile {prof} is not in the problem")))?]
        }
        None => (0..index.classes.len()).collect(),
    };
    let alternatives: Vec<usize> = match alternative {
        Some(a) => vec![parse_alternative(a, p.m)?],
        None => (0..p.m).collect(),
    };
    let mut rows = Vec::new();
    for &c in &classes {
        for &x in &alternatives {
            let (lo, hi) = solver.bounds(c, x)?;
            rows.push(json!({
                "class": c,
                "profile": index.classes[c].representative,
                "alternative": alternative_name(x),
                "min": lo.to_string(),
                "max": hi.to_string(),
            }));
        }
    }
    Ok(Answer {
        result: Outcome::Value,
        stats: json!({ "classes": classes.len(), "bound_programs": 2 * rows.len() }),
        payload: json!({ "bounds": rows }),
    })
}
