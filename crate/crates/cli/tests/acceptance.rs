//! Acceptance checks for the command-line interface: the golden corpus
//! round-trips byte-identically, the parser survives arbitrary input, and
//! the documented exit codes hold.  The criterion prints one line.
//!
//! The fuzz volume runs in-process against the real parser; the byte
//! round trips and exit codes drive the compiled binary.

use propg_cli::ast::lower;
use propg_cli::parse::{parse_ordinal, parse_program};
use propg_cli::print::print_descriptor;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Output};
use std::time::Instant;

fn report(label: &str, failures: &[String]) {
    if failures.is_empty() {
        println!("{label}: pass");
    } else {
        println!("{label}: fail");
        for failure in failures.iter().take(10) {
            println!("  {failure}");
        }
        panic!("{label} failed with {} case(s)", failures.len());
    }
}

fn propg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_propg"))
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

/// The corpus lines, comments and blanks dropped.
fn corpus() -> Vec<String> {
    let text = include_str!("../fixtures/golden/corpus.txt");
    text.lines()
        .map(str::trim_end)
        .filter(|line| !line.is_empty() && !line.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn criterion_11_cli_round_trips_fuzz_and_exit_codes() {
    let mut failures = Vec::new();

    // Golden corpus: every program lowers, its canonical print lowers to
    // the same descriptor, and printing is byte-stable.
    let corpus = corpus();
    if corpus.len() < 100 {
        failures.push(format!("golden corpus has only {} cases", corpus.len()));
    }
    for line in &corpus {
        let lowered = match parse_program(line).map_err(|e| e.to_string()).and_then(|program| {
            lower(&program).map_err(|e| e.message.clone())
        }) {
            Ok(d) => d,
            Err(message) => {
                failures.push(format!("corpus line does not lower: {line} ({message})"));
                continue;
            }
        };
        let printed = print_descriptor(&lowered);
        match parse_program(&printed).map_err(|e| e.to_string()).and_then(|program| {
            lower(&program).map_err(|e| e.message.clone())
        }) {
            Ok(reparsed) => {
                if reparsed != lowered {
                    failures.push(format!("round trip changed the descriptor: {line}"));
                } else if print_descriptor(&reparsed) != printed {
                    failures.push(format!("printing is not byte-identical: {line}"));
                }
            }
            Err(message) => {
                failures.push(format!(
                    "canonical text does not lower: {printed} from {line} ({message})"
                ));
            }
        }
    }

    // The same round trip through the binary: `normalize` output is the
    // canonical text, byte-identical across runs and across re-input.
    for line in corpus.iter().step_by(9) {
        let first = propg(&["normalize", line]);
        if !first.status.success() {
            failures.push(format!("binary does not normalize corpus line: {line}"));
            continue;
        }
        let canonical = stdout_of(&first);
        let second = propg(&["normalize", canonical.trim_end()]);
        let again = propg(&["normalize", line]);
        if stdout_of(&second) != canonical || stdout_of(&again) != canonical {
            failures.push(format!("binary round trip is not byte-identical: {line}"));
        }
        let a = propg(&["--format", "json", "normalize", line]);
        let b = propg(&["--format", "json", "normalize", line]);
        if a.stdout != b.stdout || !a.status.success() {
            failures.push(format!("JSON output is not deterministic: {line}"));
        }
    }

    // Fuzz: 10^5 arbitrary inputs into the real parser, in-process.
    // Every input must return a program or a positioned error; a panic
    // fails the criterion.
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xF022);
    let alphabet: &[u8] = b"seqCprodlayerZptrivialrepeatforinN[](),*^=;aleph0 w+0123456789_";
    let mut panics = 0u64;
    for round in 0..100_000u64 {
        let len = (rng.gen::<u32>() % 64) as usize;
        let mut bytes = Vec::with_capacity(len);
        for _ in 0..len {
            let b = match round % 10 {
                0..=6 => alphabet[rng.gen::<u32>() as usize % alphabet.len()],
                7 | 8 => rng.gen::<u8>() % 0x80,
                _ => rng.gen::<u8>(),
            };
            bytes.push(b);
        }
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            if let Ok(program) = parse_program(&text) {
                // Lowering must be total as well: an error, never a panic.
                let _ = lower(&program);
            }
            let _ = parse_ordinal(&text);
        }));
        if outcome.is_err() {
            panics += 1;
            if panics <= 5 {
                failures.push(format!("parser panicked on {text:?}"));
            }
        }
    }
    if panics > 0 {
        failures.push(format!("{panics} fuzz inputs panicked"));
    }
    let fuzz_seconds = started.elapsed().as_secs_f64();
    if fuzz_seconds > 60.0 {
        failures.push(format!("fuzzing took {fuzz_seconds:.1}s"));
    }

    // Hostile inputs through the real binary: deep nesting, stray bytes,
    // truncations.  Clean exit with code 2 — no crash.  Control bytes
    // cannot ride in an argument, so they go through standard input.
    let deep = "(".repeat(50_000);
    for nasty in [deep.as_str(), "seq[C(2,", "let let = 1; let"] {
        let output = propg(&["normalize", nasty]);
        if output.status.code() != Some(2) {
            failures.push(format!(
                "hostile input did not exit 2: {:?} -> {:?}",
                &nasty[..nasty.len().min(20)],
                output.status
            ));
        }
    }
    {
        use std::io::Write as _;
        let mut child = Command::new(env!("CARGO_BIN_EXE_propg"))
            .args(["normalize", "-"])
            .stdin(std::process::Stdio::piped())
            .stdout(std::process::Stdio::piped())
            .stderr(std::process::Stdio::piped())
            .spawn()
            .expect("the binary runs");
        child
            .stdin
            .take()
            .expect("stdin is piped")
            .write_all(b"\x00\x01\x02seq[")
            .expect("stdin accepts bytes");
        let output = child.wait_with_output().expect("the binary exits");
        if output.status.code() != Some(2) {
            failures.push(format!("control bytes on stdin did not exit 2: {:?}", output.status));
        }
    }

    // Documented exit codes.
    let full = "seq[prod(C(2,i) for i in N)]";
    let expectations: &[(&[&str], i32)] = &[
        (&["iso", "--topological", full, full], 0),
        (&["iso", "--topological", full, "seq[prod(C(2,i) for i in N)] * Zp(2)^1"], 1),
        (&["iso", "--abstract", full, "seq[prod(C(2,i) for i in N)] * Zp(2)^1"], 0),
        (&["iso", "--topological", "seq[", full], 2),
        (&["normalize", full], 0),
        (&["normalize", "seq[C(4,1)]"], 2),
        (&["validate", "seq[prod(C(2,i) for i in N), C(2,2)]"], 0),
        (&["validate", "seq[C(2,1), C(2,2)]"], 1),
        (&["embed", "seq[C(2,2)]", full], 0),
        (&["embed", full, "seq[C(2,2)]"], 1),
        (&["type", full], 0),
        (&["series", "--at", "w^), 1", full], 2),
        (&["verify", "--suite", "no_such_suite"], 2),
    ];
    for (args, expected) in expectations {
        let output = propg(args);
        if output.status.code() != Some(*expected) {
            failures.push(format!(
                "exit code for {:?}: expected {expected}, got {:?}",
                args,
                output.status.code()
            ));
        }
    }

    // The fast suite runs through the CLI and reports a pass table.
    let verify = propg(&["verify", "--suite", "theta"]);
    if verify.status.code() != Some(0) || !stdout_of(&verify).contains("pass") {
        failures.push("verify --suite theta did not pass".into());
    }

    report("criterion 11 (CLI round trips, fuzz, exit codes)", &failures);
}
