//! Command-line surface over the classification library.
//!
//! Exit codes: 0 success (or equivalent), 1 inequivalent, 2 malformed input,
//! 3 eigenvalue outside Q(i), 4 dimension or index out of range,
//! 5 verification failure. All diagnostics go to stderr; stdout carries only
//! the declared payload.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slocc_core::canonical::render;
use slocc_core::enumerate::family_form;
use slocc_core::exactmath::GaussRat;
use slocc_core::state::{parse_state, serialize_state};
use slocc_core::verify::{
    classify_and_cross_check, orbit_invariance, random_ilo, stabilizer_dimension, Rng,
};
use slocc_core::{classify, enumerate_families, equivalent, instantiate, Error, Seed};

#[derive(Parser)]
#[command(
    name = "slocc",
    about = "Exact SLOCC classification of 2xMxN pure states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a state file and print its canonical form as JSON.
    Classify { file: PathBuf },
    /// Decide SLOCC equivalence of two state files.
    Equiv { a: PathBuf, b: PathBuf },
    /// List all inequivalent genuine class families for dimensions (m, n).
    Enumerate {
        m: usize,
        n: usize,
        /// Emit a JSON document instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Print a random member of an enumerated class as state JSON.
    Random {
        m: usize,
        n: usize,
        /// Index into the enumerated family list.
        #[arg(long)]
        class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the orbit-invariance and oracle harnesses over all families with
    /// m <= 6, n <= 7.
    Verify {
        /// Random ILO trials per family.
        #[arg(long, default_value_t = 2)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the stabilizer dimension of a state.
    StabDim { file: PathBuf },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::MalformedInput(_) | Error::DimensionMismatch(_) => 2,
        Error::EigenvalueOutsideField(_) => 3,
        Error::DimensionOutOfRange(_) | Error::ConstraintViolation(_) => 4,
        Error::Singular | Error::UnsupportedStructure(_) => 2,
    }
}

fn fail(err: Error) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(exit_code_for(&err))
}

fn read_state(path: &PathBuf) -> Result<slocc_core::MatrixPair, Error> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::MalformedInput(format!("{}: {e}", path.display())))?;
    parse_state(&bytes)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Classify { file } => {
            let state = match read_state(&file) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            match classify(&state) {
                Ok(cf) => {
                    let mut out = render(&cf);
                    out.push(b'\n');
                    let _ = std::io::Write::write_all(&mut std::io::stdout(), &out);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Equiv { a, b } => {
            let (sa, sb) = match (read_state(&a), read_state(&b)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => return fail(e),
            };
            let (ca, cb) = match (classify(&sa), classify(&sb)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => return fail(e),
            };
            let same = match equivalent(&sa, &sb) {
                Ok(v) => v,
                Err(e) => return fail(e),
            };
            println!("{}", if same { "EQUIVALENT" } else { "INEQUIVALENT" });
            println!("a: {}", ca.encoding);
            println!("b: {}", cb.encoding);
            if same {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Enumerate { m, n, json } => {
            let families = match enumerate_families(m, n, true) {
                Ok(f) => f,
                Err(e) => return fail(e),
            };
            let forms: Result<Vec<_>, _> = families.iter().map(family_form).collect();
            let forms = match forms {
                Ok(f) => f,
                Err(e) => return fail(e),
            };
            if json {
                let docs: Vec<serde_json::Value> = forms
                    .iter()
                    .map(|cf| serde_json::from_slice(&render(cf)).expect("valid json"))
                    .collect();
                let doc = serde_json::json!([{
                    "m": m,
                    "n": n,
                    "count": families.len(),
                    "families": docs,
                }]);
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("valid json")
                );
            } else {
                for (k, (family, form)) in families.iter().zip(&forms).enumerate() {
                    println!("[{k}] {}", family.skeleton());
                    println!("    params: {}", family.constraints());
                    println!("    canonical: {}", form.encoding);
                }
                println!("count: {}", families.len());
            }
            ExitCode::SUCCESS
        }
        Command::Random { m, n, class, seed } => {
            let families = match enumerate_families(m, n, true) {
                Ok(f) => f,
                Err(e) => return fail(e),
            };
            let Some(family) = families.get(class) else {
                return fail(Error::DimensionOutOfRange(format!(
                    "class index {class} out of range ({} families)",
                    families.len()
                )));
            };
            let mut rng = Rng::new(Seed(seed));
            let params = draw_params(&mut rng, family.param_count);
            let member = match instantiate(family, &params) {
                Ok(p) => p,
                Err(e) => return fail(e),
            };
            let ilo = random_ilo(m, n, Seed(rng.next_u64()));
            let state = ilo.apply(&member);
            let mut out = serialize_state(&state);
            out.push(b'\n');
            let _ = std::io::Write::write_all(&mut std::io::stdout(), &out);
            ExitCode::SUCCESS
        }
        Command::Verify { trials, seed } => {
            let mut rng = Rng::new(Seed(seed));
            let mut total_trials = 0usize;
            let mut failures: Vec<serde_json::Value> = Vec::new();
            for m in 1..=6usize {
                for n in m..=(2 * m).min(7) {
                    let families = match enumerate_families(m, n, true) {
                        Ok(f) => f,
                        Err(e) => return fail(e),
                    };
                    for family in &families {
                        let params = draw_params(&mut rng, family.param_count);
                        let member = match instantiate(family, &params) {
                            Ok(p) => p,
                            Err(e) => return fail(e),
                        };
                        let report = match orbit_invariance(&member, trials, Seed(rng.next_u64())) {
                            Ok(r) => r,
                            Err(e) => return fail(e),
                        };
                        total_trials += report.trials;
                        for f in report.failures {
                            failures.push(serde_json::json!({
                                "seed": f.seed,
                                "expected": f.expected,
                                "got": f.got,
                            }));
                        }
                        if m <= 5 && trials > 0 {
                            let ilo = random_ilo(m, n, Seed(rng.next_u64()));
                            let moved = ilo.apply(&member);
                            total_trials += 1;
                            match classify_and_cross_check(&moved) {
                                Ok((_, true)) => {}
                                Ok((cf, false)) => failures.push(serde_json::json!({
                                    "seed": seed,
                                    "expected": "oracle agreement",
                                    "got": cf.encoding,
                                })),
                                Err(e) => return fail(e),
                            }
                        }
                    }
                }
            }
            let report = serde_json::json!({
                "trials": total_trials,
                "failures": failures,
            });
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("valid json")
            );
            if failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(5)
            }
        }
        Command::StabDim { file } => {
            let state = match read_state(&file) {
                Ok(s) => s,
                Err(e) => return fail(e),
            };
            println!("{}", stabilizer_dimension(&state));
            ExitCode::SUCCESS
        }
    }
}

/// Seed-derived valid instantiation parameters: distinct values outside the
/// pinned points.
fn draw_params(rng: &mut Rng, count: usize) -> Vec<GaussRat> {
    let mut out: Vec<GaussRat> = Vec::with_capacity(count);
    while out.len() < count {
        let re = rng.next_range(-9, 9);
        let im = rng.next_range(-2, 2);
        let cand = GaussRat::from_parts(re, im, 1);
        if cand.is_zero() || cand.is_one() || out.contains(&cand) {
            continue;
        }
        out.push(cand);
    }
    out
}
