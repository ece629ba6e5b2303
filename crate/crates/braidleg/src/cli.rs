//! Command-line front end: problem-file loading, subcommand dispatch and
//! deterministic report emission.
//!
//! Exit codes: `0` success, `1` validation error (bad flags, malformed
//! files, out-of-range indices), `2` internal-consistency error (an
//! invariant the engine guarantees failed - a bug, not a user error).

use std::collections::BTreeMap;
use std::io::Write;

use clap::{Args, Parser, Subcommand};

use crate::context::Context;
use crate::element::Element;
use crate::error::{EngineError, Result};
use crate::gen::GenId;
use crate::legendre::{classical_check, LegendreEngine, Role};
use crate::parse::parse_element;
use crate::problem::{
    self, emit_json, ClassicalCheckOut, CoeffOut, FlowCoeffOut, FlowReport, HjReport,
    LegendreImageOut, LegendreReport,
};
use crate::qcoeff::format_rat;
use crate::verify::run_suite;
use crate::weight::mi_string;

#[derive(Parser, Debug)]
#[command(
    name = "braidleg",
    about = "Exact computer algebra for braided phase spaces",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct AlgebraOpts {
    /// Number of degrees of freedom.
    #[arg(long, default_value_t = 1)]
    s: usize,
    /// Braiding assignment: symbolic | ones | side.
    #[arg(long, default_value = "symbolic")]
    q: String,
}

impl AlgebraOpts {
    fn context(&self) -> Result<Context> {
        match self.q.as_str() {
            "symbolic" => Context::symbolic(self.s),
            "ones" => Context::ones(self.s),
            "side" => Context::side_conditions(self.s),
            other => Err(EngineError::Validation(format!(
                "unknown --q value '{other}' (expected symbolic|ones|side)"
            ))),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an expression and print its normal form.
    NormalForm {
        #[command(flatten)]
        opts: AlgebraOpts,
        expr: String,
    },
    /// Bracket of two expressions, normal-formed.
    Bracket {
        #[command(flatten)]
        opts: AlgebraOpts,
        left: String,
        right: String,
    },
    /// Evolve an action series from a problem file.
    HjEvolve {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Evolve a Hamiltonian coefficient flow from a problem file.
    HamEvolve {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Run the braided Legendre transformation described by a problem file.
    Legendre {
        #[arg(long)]
        problem: String,
        /// Compute the inverse direction (coordinate-side caps).
        #[arg(long)]
        inverse: bool,
        /// Compare the classical pipeline against the series oracle.
        #[arg(long)]
        classical_check: bool,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Normal form in the bracketing algebra.
    EpocheNf {
        #[command(flatten)]
        opts: AlgebraOpts,
        /// Use the thermodynamic leaf labels Tb, Sb, pb, Vb (s = 2).
        #[arg(long)]
        thermo: bool,
        #[arg(long, default_value_t = 6)]
        leafcap: u32,
        #[arg(long, default_value_t = 4)]
        etacap: u32,
        expr: String,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        cases: usize,
    },
}

/// Entry point used by the binary: run on the process arguments and
/// standard output.
pub fn run() -> i32 {
    let mut stdout = std::io::stdout();
    let args: Vec<String> = std::env::args().collect();
    run_cli(&args, &mut stdout)
}

/// Run on explicit arguments, writing the report to `out`. Returns the
/// exit code.
pub fn run_cli<W: Write>(args: &[String], out: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with its own formatting
            let _ = write!(out, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch<W: Write>(cli: Cli, out: &mut W) -> Result<()> {
    match cli.command {
        Command::NormalForm { opts, expr } => {
            let ctx = opts.context()?;
            let e = parse_element(&expr, &ctx)?;
            writeln!(out, "{e}").ok();
            Ok(())
        }
        Command::Bracket { opts, left, right } => {
            let ctx = opts.context()?;
            let l = parse_element(&left, &ctx)?;
            let r = parse_element(&right, &ctx)?;
            let b = crate::bracket::bracket(&l, &r, &ctx)?;
            writeln!(out, "{b}").ok();
            Ok(())
        }
        Command::HjEvolve { problem, format } => {
            let spec: problem::HjProblem = problem::load_json(&problem)?;
            problem::check_version(spec.version)?;
            let ctx = spec.q.to_context(spec.s)?;
            let ham = problem::ham_table_from_specs(&spec.hamiltonian, &ctx)?;
            let seed = problem::parse_seed_table(&spec.seed, &ctx)?;
            let series = crate::hj::hj_evolve(&seed, &ham, spec.mmax, spec.d, &ctx)?;
            let report = HjReport {
                coefficients: series
                    .reported()
                    .map(|((m, n), e)| CoeffOut {
                        m: *m,
                        n: n.clone(),
                        element: e.to_string(),
                    })
                    .collect(),
            };
            emit(out, &format, &report, |w| {
                for c in &report.coefficients {
                    writeln!(w, "b[{};{}] = {}", c.m, mi_string(&c.n), c.element).ok();
                }
            })
        }
        Command::HamEvolve { problem, format } => {
            let spec: problem::HamProblem = problem::load_json(&problem)?;
            problem::check_version(spec.version)?;
            let ctx = spec.q.to_context(spec.s)?;
            let ham = problem::ham_table_from_specs(&spec.hamiltonian, &ctx)?;
            let mut seed_p = BTreeMap::new();
            for e in &spec.seeds.p {
                ctx.check_s_index(e.i)?;
                ctx.check_multi_index(&e.m)?;
                let elem = parse_element(&e.value, &ctx)?;
                if !elem.is_zero() {
                    seed_p.insert((e.i, e.m.clone()), elem);
                }
            }
            let mut seed_x = BTreeMap::new();
            for e in &spec.seeds.x {
                ctx.check_s_index(e.a)?;
                ctx.check_multi_index(&e.n)?;
                let elem = parse_element(&e.value, &ctx)?;
                if !elem.is_zero() {
                    seed_x.insert((e.a, e.n.clone()), elem);
                }
            }
            let flow = crate::hamsys::ham_evolve(&seed_p, &seed_x, &ham, spec.mmax, spec.d, &ctx)?;
            let report = FlowReport {
                p: flow
                    .p
                    .iter()
                    .map(|((i, n, m), e)| FlowCoeffOut {
                        index: *i,
                        order: *n,
                        m: m.clone(),
                        element: e.to_string(),
                    })
                    .collect(),
                x: flow
                    .x
                    .iter()
                    .map(|((a, n, m), e)| FlowCoeffOut {
                        index: *a,
                        order: *n,
                        m: m.clone(),
                        element: e.to_string(),
                    })
                    .collect(),
            };
            emit(out, &format, &report, |w| {
                for c in &report.p {
                    writeln!(
                        w,
                        "P[{};{};{}] = {}",
                        c.index,
                        mi_string(&c.m),
                        c.order,
                        c.element
                    )
                    .ok();
                }
                for c in &report.x {
                    writeln!(
                        w,
                        "X[{};{};{}] = {}",
                        c.index,
                        mi_string(&c.m),
                        c.order,
                        c.element
                    )
                    .ok();
                }
            })
        }
        Command::Legendre {
            problem,
            inverse,
            classical_check: run_check,
            format,
        } => {
            let spec: problem::LegendreProblem = problem::load_json(&problem)?;
            problem::check_version(spec.version)?;
            let ctx = spec.q.to_context(spec.s)?;
            let report = legendre_report(&spec, &ctx, inverse, run_check)?;
            let failed = report.classical_ok == Some(false);
            emit(out, &format, &report, |w| {
                for img in &report.images {
                    writeln!(w, "{} -> {}", img.generator, img.element).ok();
                }
                for c in &report.classical_check {
                    writeln!(
                        w,
                        "a[{}]: pipeline {} oracle {} {}",
                        mi_string(&c.index),
                        c.pipeline,
                        c.oracle,
                        if c.equal { "ok" } else { "MISMATCH" }
                    )
                    .ok();
                }
            })?;
            if failed {
                return Err(EngineError::InternalConsistency(
                    "classical check found mismatching coefficients".into(),
                ));
            }
            Ok(())
        }
        Command::EpocheNf {
            opts,
            thermo,
            leafcap,
            etacap,
            expr,
        } => {
            let ctx = opts.context()?;
            let e = crate::epoche::parse_epoche(&expr, &ctx, thermo)?;
            let nf = crate::epoche::epoche_normal_form(&e, leafcap, etacap, &ctx)?;
            writeln!(
                out,
                "{}",
                crate::epoche::format_epoche(&nf, ctx.s(), thermo)
            )
            .ok();
            Ok(())
        }
        Command::Verify {
            suite,
            s,
            seed,
            cases,
        } => {
            let report = run_suite(&suite, s, seed, cases)?;
            writeln!(out, "{}", report.summary()).ok();
            if report.ok() {
                Ok(())
            } else {
                Err(EngineError::InternalConsistency(format!(
                    "suite {} failed: {}/{}",
                    report.name, report.passed, report.cases
                )))
            }
        }
    }
}

fn legendre_report(
    spec: &problem::LegendreProblem,
    ctx: &Context,
    inverse: bool,
    run_check: bool,
) -> Result<LegendreReport> {
    let s = spec.s;
    let mut b_table = crate::classical::CoeffTable::new();
    for e in &spec.b {
        ctx.check_multi_index(&e.n)?;
        b_table.insert(e.n.clone(), e.value.to_rat()?);
    }
    let tables = match spec.mode.as_str() {
        "symbolic" => crate::legendre::LegendreTables::default(),
        "classical" => {
            if !ctx.braiding_trivial() {
                return Err(EngineError::Validation(
                    "classical mode requires q = ones".into(),
                ));
            }
            crate::legendre::classical_tables(s, &b_table)?
        }
        other => {
            return Err(EngineError::Validation(format!(
                "unknown mode '{other}' (expected symbolic|classical)"
            )))
        }
    };
    let mut engine = LegendreEngine::with_tables(ctx, tables);
    let role = if inverse {
        Role::Inverse
    } else {
        Role::Forward
    };
    let mut images = Vec::new();
    for r in 1..=spec.r_max {
        for list in crate::verify::sorted_lists(s as u32, r + 2) {
            let img = engine.cap_image(role, &list)?;
            let gen = if inverse {
                GenId::BCap(list.clone())
            } else {
                GenId::ACap(list.clone())
            };
            images.push(LegendreImageOut {
                generator: gen.to_string(),
                element: img.to_string(),
            });
        }
    }
    let mut check_out = Vec::new();
    let mut classical_ok = None;
    if run_check {
        if spec.mode != "classical" {
            return Err(EngineError::Validation(
                "--classical-check needs mode = classical and a b table".into(),
            ));
        }
        let report = classical_check(s, &b_table, spec.r_max, ctx)?;
        classical_ok = Some(report.ok());
        for e in &report.entries {
            check_out.push(ClassicalCheckOut {
                index: e.index.clone(),
                pipeline: format_rat(&e.pipeline),
                oracle: format_rat(&e.oracle),
                equal: e.pipeline == e.oracle,
            });
        }
    }
    Ok(LegendreReport {
        images,
        classical_check: check_out,
        classical_ok,
    })
}

fn emit<W: Write, T: serde::Serialize, F: FnOnce(&mut W)>(
    out: &mut W,
    format: &str,
    value: &T,
    text: F,
) -> Result<()> {
    match format {
        "json" => {
            writeln!(out, "{}", emit_json(value)).ok();
            Ok(())
        }
        "text" => {
            text(out);
            Ok(())
        }
        other => Err(EngineError::Validation(format!(
            "unknown format '{other}' (expected json|text)"
        ))),
    }
}

/// Re-parse helper used by round-trip tests: every expression the reports
/// emit must parse back to an equal element.
pub fn reparse_roundtrip(e: &Element, ctx: &Context) -> Result<bool> {
    let printed = e.to_string();
    if printed == "0" {
        return Ok(e.is_zero());
    }
    Ok(parse_element(&printed, ctx)? == *e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_vec(args: &[&str]) -> (i32, String) {
        let argv: Vec<String> = std::iter::once("braidleg".to_string())
            .chain(args.iter().map(|s| s.to_string()))
            .collect();
        let mut buf = Vec::new();
        let code = run_cli(&argv, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn bracket_subcommand_classical_example() {
        let (code, out) = run_vec(&["bracket", "--s", "1", "--q", "ones", "p1", "x1*x1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "2*x1*h[1,1]");
    }

    #[test]
    fn normal_form_subcommand() {
        let (code, out) = run_vec(&["normal-form", "--s", "2", "p1*x2"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "q[1,4]^-1*x2*p1");
    }

    #[test]
    fn unknown_flag_is_validation_error() {
        let (code, _) = run_vec(&["bracket", "--nonsense", "p1", "x1"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn malformed_expression_is_validation_error() {
        let (code, out) = run_vec(&["normal-form", "--s", "1", "p1**"]);
        assert_eq!(code, 1);
        assert!(out.contains("error:"));
    }

    #[test]
    fn hj_text_format_lists_coefficients() {
        let path = format!(
            "{}/tests/problems/hj_harmonic.json",
            env!("CARGO_MANIFEST_DIR")
        );
        let (code, out) = run_vec(&["hj-evolve", "--problem", &path, "--format", "text"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("b[1;2] = -1"), "{out}");
        assert!(out.contains("b[3;2] = -2*h[1,1]^2"), "{out}");
    }

    #[test]
    fn verify_suite_reports_counts() {
        let (code, out) = run_vec(&[
            "verify", "--suite", "jacobi", "--s", "2", "--seed", "7", "--cases", "3",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("3/3 identities hold"), "{out}");
    }

    #[test]
    fn epoche_subcommand_rewrites_out_of_order_pair() {
        // pb1 sorts before xb1, so this word is already ordered
        let (code, out) = run_vec(&[
            "epoche-nf",
            "--s",
            "2",
            "--leafcap",
            "6",
            "--etacap",
            "4",
            "hbar[pb1]*hbar[xb1]",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "hbar[pb1]*hbar[xb1]");
        // the reversed word picks up the braiding factor and the
        // concatenation term
        let (code, out) = run_vec(&["epoche-nf", "--s", "2", "hbar[xb1]*hbar[pb1]"]);
        assert_eq!(code, 0);
        assert_eq!(
            out.trim(),
            "q[1,3]*hbar[pb1]*hbar[xb1] + hbar[(pb1,xb1)]*eta"
        );
    }
}
