//! `propg`: a batch calculator for countably based abelian pro-p groups.
//!
//! Descriptor arguments are literal program text, `-` for standard input,
//! or the path of a file holding the text.  Exit codes: 0 for success (and
//! affirmative verdicts), 1 for negative verdicts (not isomorphic, not
//! supported, invalid, a failing suite), 2 for any error.

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use propg_cli::{ast, parse, print};
use propg_core::classify::{
    decide_embedding, topological_iso, CheckedInvariant, Evidence, EmbeddingDecision, Invariant,
    InvariantValue, IsoCertificate,
};
use propg_core::classify::abstract_iso;
use propg_core::construct::{construct, construction_case, materialize, PresentationTree};
use propg_core::decompose::{DecompositionPlan, DecompositionStyle};
use propg_core::finite::GroupElement;
use propg_core::suite::{run_all_suites, run_suite, SuiteOutcome, SUITE_NAMES};
use propg_core::torsion::{dual, torsion_series_data, torsion_type};
use propg_core::{MaterializedTree, ProPDescriptor};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::process::ExitCode;

const EXIT_CODES_HELP: &str = "Exit codes:
  0  success; for verdict commands, the affirmative verdict
     (isomorphic / embeds / valid / all suites pass)
  1  the negative verdict (not isomorphic / not supported /
     invalid / a suite failed)
  2  any error: parse or lowering failures, unsupported inputs,
     bad ordinals, unreadable files, unknown suites

Descriptor arguments are program text, `-` for standard input, or a file
path.  JSON output (--format json) is canonical and byte-stable; schemas
live in crates/cli/schema/.";

#[derive(Parser)]
#[command(
    name = "propg",
    version,
    about = "Classify, dualize, construct, and verify countably based abelian pro-p groups",
    after_long_help = EXIT_CODES_HELP
)]
struct Cli {
    /// Output format for results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a descriptor and print its canonical form.
    Normalize { descriptor: String },
    /// Check the torsion-sequence laws, listing any violations.
    Validate { descriptor: String },
    /// The Pontryagin dual: a countable discrete torsion-plus-divisible group.
    Dual { descriptor: String },
    /// The torsion series at one stage: the layer there and the remainder.
    Series {
        /// Stage ordinal, e.g. `0`, `3`, `w*1`, `w^2*1+4`.
        #[arg(long)]
        at: String,
        descriptor: String,
    },
    /// The torsion type: the stage at which the torsion series stabilizes.
    Type { descriptor: String },
    /// Decide isomorphism of two groups and print the certificate.
    #[command(group(ArgGroup::new("mode").required(true).args(["topological", "abstract_mode"])))]
    Iso {
        /// Decide topological isomorphism.
        #[arg(long)]
        topological: bool,
        /// Decide abstract isomorphism.
        #[arg(long = "abstract")]
        abstract_mode: bool,
        a: String,
        b: String,
    },
    /// Decide whether the first group embeds into the second.
    Embed {
        a: String,
        b: String,
        /// Stages of the source taken into the witness.
        #[arg(long, default_value_t = 6)]
        level: u32,
        /// Cap on the factor count drawn from any one stage.
        #[arg(long, default_value_t = 3)]
        cap: u64,
    },
    /// Build a presentation tree realizing a descriptor's torsion sequence.
    Construct {
        descriptor: String,
        /// Emit the full tree as JSON (consumed by `materialize`).
        #[arg(long)]
        emit_tree: bool,
    },
    /// Materialize a presentation tree into a finite group at a stage.
    Materialize {
        /// Tree JSON: text, `-` for standard input, or a file path.
        tree: String,
        /// Stage: factors of exponent beyond this vanish.
        #[arg(long)]
        level: u32,
        /// Cap on infinite multiplicities.
        #[arg(long, default_value_t = 2)]
        cap: u64,
    },
    /// Split a descriptor into an infinite product and print leading parts.
    Decompose {
        descriptor: String,
        /// How many leading parts to print (the residual follows).
        #[arg(long)]
        take: u64,
        /// Give every part exactly one cyclic factor on top.
        #[arg(long)]
        cyclic_tops: bool,
    },
    /// Run the oracle suites and print a pass/fail table.
    Verify {
        /// One suite (annihilator, theta, delta, roundtrip); default all.
        #[arg(long)]
        suite: Option<String>,
    },
}

/// A command failure: the message goes to standard error, the code is 2.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(err: E) -> Self {
        Failure(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// Resolve a descriptor argument: stdin, file contents, or literal text.
fn read_input(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut text = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut text)
            .map_err(|e| Failure(format!("reading standard input: {e}")))?;
        return Ok(text);
    }
    if std::path::Path::new(arg).is_file() {
        return std::fs::read_to_string(arg)
            .map_err(|e| Failure(format!("reading {arg}: {e}")));
    }
    Ok(arg.to_string())
}

/// Parse and lower one descriptor argument, rendering errors line:column.
fn descriptor(arg: &str) -> Result<ProPDescriptor, Failure> {
    let text = read_input(arg)?;
    let program = parse::parse_program(&text).map_err(|e| Failure(e.to_string()))?;
    ast::lower(&program).map_err(|e| {
        let (line, column) = parse::position(&text, e.span.start);
        Failure(format!("{line}:{column}: {}", e.message))
    })
}

fn emit(format: Format, text: String, json: Value) -> Result<(), Failure> {
    match format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{}", serde_json::to_string(&json)?),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    match &cli.command {
        Command::Normalize { descriptor: arg } => {
            let d = descriptor(arg)?;
            let text = print::print_descriptor(&d);
            let json = json!({ "descriptor": d, "text": text });
            emit(cli.format, text, json)?;
            Ok(0)
        }
        Command::Validate { descriptor: arg } => {
            let d = descriptor(arg)?;
            let report = d.validate();
            let mut text = String::new();
            if report.is_valid() {
                text.push_str("valid");
            } else {
                let _ = write!(text, "invalid: {} violation(s)", report.violations.len());
                for v in &report.violations {
                    let kind = match v.kind {
                        propg_core::ViolationKind::Trivial => "trivial entry",
                        propg_core::ViolationKind::BoundedExponent => {
                            "bounded exponent before the final entry"
                        }
                    };
                    let _ = write!(text, "\n  at {}: {}", v.index, kind);
                }
            }
            let json = json!({ "valid": report.is_valid(), "violations": report.violations });
            emit(cli.format, text, json)?;
            Ok(if report.is_valid() { 0 } else { 1 })
        }
        Command::Dual { descriptor: arg } => {
            let d = descriptor(arg)?;
            let dd = dual(&d);
            let ulm = if dd.ulm_seq().is_empty() {
                "trivial".to_string()
            } else {
                print::print_sequence(dd.ulm_seq())
            };
            let text = format!(
                "prime: {}\nulm_seq: {}\ndivisible_rank: {}",
                dd.prime(),
                ulm,
                dd.divisible_rank()
            );
            let json = json!({ "dual": dd });
            emit(cli.format, text, json)?;
            Ok(0)
        }
        Command::Series { at, descriptor: arg } => {
            let d = descriptor(arg)?;
            let index = parse::parse_ordinal(at)?;
            let data = torsion_series_data(&d, &index)?;
            let text = format!(
                "index: {index}\nlayer: {}\nremainder: {}",
                print::print_layer(&data.layer),
                print::print_descriptor(&data.remainder)
            );
            let json = json!({
                "index": index,
                "layer": data.layer,
                "layer_text": print::print_layer(&data.layer),
                "remainder": data.remainder,
                "remainder_text": print::print_descriptor(&data.remainder),
            });
            emit(cli.format, text, json)?;
            Ok(0)
        }
        Command::Type { descriptor: arg } => {
            let d = descriptor(arg)?;
            let t = torsion_type(&d);
            emit(cli.format, t.to_string(), json!({ "torsion_type": t }))?;
            Ok(0)
        }
        Command::Iso { topological, a, b, .. } => {
            let da = descriptor(a)?;
            let db = descriptor(b)?;
            let certificate =
                if *topological { topological_iso(&da, &db) } else { abstract_iso(&da, &db) };
            let text = certificate_text(&certificate);
            emit(cli.format, text, json!({ "certificate": certificate }))?;
            Ok(if certificate.isomorphic { 0 } else { 1 })
        }
        Command::Embed { a, b, level, cap } => {
            let da = descriptor(a)?;
            let db = descriptor(b)?;
            let decision = decide_embedding(&da, &db, *level, *cap)?;
            let (text, code) = match &decision {
                EmbeddingDecision::Embeds(witness) => {
                    let mut text =
                        format!("verdict: embeds (level {}, cap {})", witness.level, witness.cap);
                    for a in &witness.assignments {
                        let _ = write!(
                            text,
                            "\nassign: {} factor(s) of exponent {} into exponent {}",
                            a.copies, a.source_exp, a.target_exp
                        );
                    }
                    for chain in &witness.chains {
                        let rungs: Vec<String> =
                            chain.iter().map(|r| r.to_string()).collect();
                        let _ = write!(text, "\nchain: {}", rungs.join(" < "));
                    }
                    (text, 0)
                }
                EmbeddingDecision::NotSupported { reason } => {
                    (format!("verdict: not supported: {reason}"), 1)
                }
            };
            emit(cli.format, text, json!({ "decision": decision }))?;
            Ok(code)
        }
        Command::Construct { descriptor: arg, emit_tree } => {
            let d = descriptor(arg)?;
            let case = construction_case(d.torsion_seq())?;
            let tree = construct(&d)?;
            let case_name = serde_json::to_value(case)?;
            let mut text = format!(
                "case: {}",
                case_name.as_str().expect("cases serialize as strings")
            );
            if *emit_tree {
                let _ = write!(text, "\n{}", serde_json::to_string(&tree)?);
            }
            let json = if *emit_tree {
                json!({ "case": case, "tree": tree })
            } else {
                json!({ "case": case })
            };
            emit(cli.format, text, json)?;
            Ok(0)
        }
        Command::Materialize { tree: arg, level, cap } => {
            let text = read_input(arg)?;
            let tree: PresentationTree = serde_json::from_str(&text)
                .map_err(|e| Failure(format!("tree JSON: {e}")))?;
            let stage = materialize(&tree, *level, *cap)?;
            let (text, json) = materialization_output(&stage);
            emit(cli.format, text, json)?;
            Ok(0)
        }
        Command::Decompose { descriptor: arg, take, cyclic_tops } => {
            let d = descriptor(arg)?;
            let style =
                if *cyclic_tops { DecompositionStyle::CyclicTops } else { DecompositionStyle::Default };
            let plan = DecompositionPlan::new(&d, style)?;
            let (parts, residual) = plan.take(*take);
            let mut text = String::new();
            for (n, part) in parts.iter().enumerate() {
                let _ = writeln!(text, "part {n}: {}", print::print_descriptor(part));
            }
            let _ = write!(text, "residual: {}", print::print_descriptor(&residual));
            let json = json!({
                "parts": parts
                    .iter()
                    .map(|p| json!({ "descriptor": p, "text": print::print_descriptor(p) }))
                    .collect::<Vec<_>>(),
                "residual": { "descriptor": residual, "text": print::print_descriptor(&residual) },
            });
            emit(cli.format, text, json)?;
            Ok(0)
        }
        Command::Verify { suite } => {
            let outcomes: Vec<SuiteOutcome> = match suite {
                Some(name) => {
                    let outcome = run_suite(name).ok_or_else(|| {
                        Failure(format!(
                            "unknown suite `{name}`; expected one of: {}",
                            SUITE_NAMES.join(", ")
                        ))
                    })??;
                    vec![outcome]
                }
                None => run_all_suites()?,
            };
            let mut text = String::new();
            for outcome in &outcomes {
                let verdict = if outcome.passed() { "pass" } else { "fail" };
                let _ = write!(
                    text,
                    "{}{:<12} {:>5} cases  {}",
                    if text.is_empty() { "" } else { "\n" },
                    outcome.name,
                    outcome.cases,
                    verdict
                );
                for failure in &outcome.failures {
                    let _ = write!(text, "\n    {failure}");
                }
            }
            let json = json!({
                "suites": outcomes
                    .iter()
                    .map(|o| {
                        json!({
                            "name": o.name,
                            "cases": o.cases,
                            "passed": o.passed(),
                            "failures": o.failures,
                        })
                    })
                    .collect::<Vec<_>>(),
            });
            emit(cli.format, text, json)?;
            Ok(if outcomes.iter().all(SuiteOutcome::passed) { 0 } else { 1 })
        }
    }
}

fn invariant_name(invariant: &Invariant) -> String {
    match invariant {
        Invariant::Prime => "prime".into(),
        Invariant::FreeRank => "free_rank".into(),
        Invariant::TorsionType => "torsion_type".into(),
        Invariant::TorsionSequence => "torsion_sequence".into(),
        Invariant::LayerAt(index) => format!("layer_at {index}"),
        Invariant::ClosureOfTorsion => "closure_of_torsion".into(),
    }
}

fn invariant_value(value: &InvariantValue) -> String {
    match value {
        InvariantValue::Prime(p) => p.to_string(),
        InvariantValue::Rank(r) => r.to_string(),
        InvariantValue::Type(t) => t.to_string(),
        InvariantValue::Layer(None) => "absent".into(),
        InvariantValue::Layer(Some(layer)) => print::print_layer(layer),
        InvariantValue::Sequence(seq) => {
            if seq.is_empty() {
                "trivial".into()
            } else {
                print::print_sequence(seq)
            }
        }
    }
}

fn certificate_text(certificate: &IsoCertificate) -> String {
    let mode = match certificate.mode {
        propg_core::classify::ClassificationMode::Topological => "topological",
        propg_core::classify::ClassificationMode::Abstract => "abstract",
    };
    let mut text = format!(
        "verdict: {} ({mode})",
        if certificate.isomorphic { "isomorphic" } else { "not isomorphic" }
    );
    match &certificate.evidence {
        Evidence::Match { compared } => {
            let names: Vec<String> = compared.iter().map(|c| invariant_name(&c.invariant)).collect();
            let _ = write!(text, "\nagreeing invariants: {}", names.join(", "));
        }
        Evidence::Mismatch { witness } => {
            let CheckedInvariant { invariant, left, right } = witness;
            let _ = write!(
                text,
                "\nmismatch at {}: left {}, right {}",
                invariant_name(invariant),
                invariant_value(left),
                invariant_value(right)
            );
        }
    }
    text
}

fn element_json(elem: &GroupElement) -> Value {
    json!(elem.coords())
}

fn materialization_output(stage: &MaterializedTree) -> (String, Value) {
    let group = &stage.group;
    let coords = |elems: &[GroupElement]| -> Vec<Value> { elems.iter().map(element_json).collect() };
    let mut text = format!(
        "prime: {}\nexponents: {:?}\norder: {}^{}",
        group.prime(),
        group.exponents(),
        group.prime(),
        group.order_log_p()
    );
    let _ = write!(text, "\ngenerators: {}", stage.generators.len());
    let _ = write!(text, "\ntop_gens: {}", stage.top_gens.len());
    if let Some(images) = &stage.child_images {
        let _ = write!(text, "\nchild_images: {}", images.len());
    }
    if let Some(new_gen) = &stage.new_gen {
        let _ = write!(text, "\nnew_gen: {:?}", new_gen.coords());
    }
    if let Some(delta) = &stage.delta {
        let _ = write!(text, "\ndelta: {:?}", delta.coords());
    }
    let json = json!({
        "prime": group.prime(),
        "exponents": group.exponents(),
        "order_log_p": group.order_log_p(),
        "generators": coords(&stage.generators),
        "top_gens": coords(&stage.top_gens),
        "child_images": stage.child_images.as_deref().map(coords),
        "new_gen": stage.new_gen.as_ref().map(element_json),
        "delta": stage.delta.as_ref().map(element_json),
    });
    (text, json)
}
