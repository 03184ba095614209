//! The `gxbtc` command-line front end.
//!
//! Every subcommand writes one JSON document, to `-o` when given and to
//! standard output otherwise. Exit codes: 0 success, 1 negative verdict,
//! 2 inconclusive, 64 usage, 65 malformed input, 70 internal failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::category::io::TheoryFile;
use crate::compose::compose_torsors;
use crate::consistency::{self, CheckOptions, ConsistencyReport};
use crate::constructions::{build_spt, fixtures, trivial_extension};
use crate::equivalence::theories_equivalent;
use crate::groups::cohomology::{cohomology, AnyCochain, CoefficientModule, FiniteCohomology, U1Cohomology};
use crate::groups::{CochainFile, FiniteGroup, FiniteModule, PhaseCochain, U1};
use crate::phase::{lcm, DEFAULT_TOL};
use crate::torsor::{
    apply_torsor_with, relative_obstruction_tol, solve_cocycleator, t_from_file, t_to_file, TorsorInput,
    TorsorOptions,
};
use crate::{Error, GxTheory};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Debug, Parser)]
#[command(name = "gxbtc", version, about = "G-crossed braided tensor category toolkit")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Residual tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Root order N for snapping phases to μ_N [default: lcm(|G|, |A|, 8)].
    #[arg(long, global = true)]
    root_order: Option<u64>,
    /// Seed for randomized steps; every current pipeline is deterministic.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output path.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    /// Compact single-line JSON.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the consistency equations of a theory.
    Check {
        theory: PathBuf,
        #[arg(long = "eq", value_enum, default_value_t = EqChoice::All)]
        eq: EqChoice,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(0..=4))]
        max_defects: u8,
    },
    /// Apply the torsor functor `(t, X)`.
    Torsor {
        theory: PathBuf,
        #[arg(long)]
        t: PathBuf,
        #[arg(long, conflicts_with = "solve_x")]
        x: Option<PathBuf>,
        /// Solve `dX = O_r(t)⁻¹` (the default when `--x` is absent).
        #[arg(long)]
        solve_x: bool,
        /// Skip the base-theory precondition checks.
        #[arg(long)]
        no_precheck: bool,
    },
    /// Relative obstruction `O_r(t)` and its class in H⁴(G, U(1)).
    Obstruction {
        theory: PathBuf,
        #[arg(long)]
        t: PathBuf,
    },
    /// Compose two torsor functors.
    Compose {
        theory: PathBuf,
        #[arg(long)]
        t1: PathBuf,
        #[arg(long)]
        x1: Option<PathBuf>,
        #[arg(long)]
        t2: PathBuf,
        #[arg(long)]
        x2: Option<PathBuf>,
    },
    /// Search for a relabeling and gauge transformation between two theories.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Group cohomology `Hⁿ(G, M)`.
    Cohomology {
        #[arg(long)]
        group: String,
        /// `u1`, `z<N>` (trivial action) or `charges` (needs `--theory`).
        #[arg(long)]
        coeff: String,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        theory: Option<PathBuf>,
        /// Include one representative cocycle per class.
        #[arg(long)]
        representatives: bool,
    },
    /// Build a theory.
    Build {
        #[command(subcommand)]
        what: BuildCommand,
    },
    /// Classify the torsors of a trivially extended theory.
    EnumerateExtensions {
        #[arg(long)]
        c0: PathBuf,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
}

#[derive(Debug, Subcommand)]
enum BuildCommand {
    /// SPT phase from a 3-cocycle file or a cohomology class index.
    Spt {
        #[arg(long)]
        group: String,
        #[arg(long, conflicts_with = "class")]
        alpha: Option<PathBuf>,
        /// Index of a class of H³(G, U(1)) in enumeration order.
        #[arg(long)]
        class: Option<usize>,
    },
    /// Trivial extension of a theory over the trivial group.
    TrivialExt {
        #[arg(long)]
        c0: PathBuf,
        #[arg(long)]
        group: String,
    },
    /// A built-in theory: toric-code, semion, anti-semion, double-semion,
    /// z4, fibonacci or z<N>^<p>.
    Fixture { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EqChoice {
    Pentagon,
    Hexagon,
    Heptagon,
    Eta,
    Kappa,
    All,
}

/// A finished command: the report and its exit code.
struct Outcome {
    report: Value,
    code: i32,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { report, code: EXIT_OK }
    }
}

/// Errors carrying their exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io(_)
            | Error::Json(_)
            | Error::InvalidInput(_)
            | Error::GradeViolation(_)
            | Error::NotACocycle { .. }
            | Error::NotA1Cocycle
            | Error::NotAbelian { .. }
            | Error::NotAbelianMonodromy { .. }
            | Error::InadmissibleTuple { .. }
            | Error::Precondition(_)
            | Error::SnapFailure { .. } => EXIT_DATA,
            Error::RootOrderTooSmall { .. } => EXIT_USAGE,
            Error::BudgetExceeded(_) => EXIT_INCONCLUSIVE,
            Error::MatchFailure(_)
            | Error::RepresentativeDependent { .. }
            | Error::RestrictionMismatch(_)
            | Error::Overflow => EXIT_INTERNAL,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

/// Process entry point.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Run with explicit arguments (including the program name) and streams.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    if !(cli.global.tol.is_finite() && cli.global.tol > 0.0) {
        let _ = writeln!(err, "error: --tol must be a positive number");
        return EXIT_USAGE;
    }
    let result = dispatch(&cli);
    match result {
        Ok(outcome) => match emit(&outcome.report, &cli.global, out) {
            Ok(()) => outcome.code,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_INTERNAL
            }
        },
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn emit(report: &Value, g: &Global, out: &mut dyn Write) -> std::io::Result<()> {
    let mut text = if g.json {
        serde_json::to_string(report)?
    } else {
        serde_json::to_string_pretty(report)?
    };
    text.push('\n');
    match &g.output {
        Some(path) => std::fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Check { theory, eq, max_defects } => cmd_check(g, theory, *eq, *max_defects as usize),
        Command::Torsor {
            theory,
            t,
            x,
            solve_x: _,
            no_precheck,
        } => cmd_torsor(g, theory, t, x.as_deref(), *no_precheck),
        Command::Obstruction { theory, t } => cmd_obstruction(g, theory, t),
        Command::Compose { theory, t1, x1, t2, x2 } => cmd_compose(theory, t1, x1.as_deref(), t2, x2.as_deref()),
        Command::Equiv { a, b, budget } => cmd_equiv(g, a, b, *budget),
        Command::Cohomology {
            group,
            coeff,
            degree,
            theory,
            representatives,
        } => cmd_cohomology(g, group, coeff, *degree, theory.as_deref(), *representatives),
        Command::Build { what } => cmd_build(g, what),
        Command::EnumerateExtensions { c0, group, budget } => cmd_enumerate(g, c0, group, *budget),
    }
}

fn load_theory(path: &Path) -> Result<GxTheory, Failure> {
    GxTheory::load(path).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_cochain_file(path: &Path) -> Result<CochainFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn load_phase_cochain(path: &Path, group: &Arc<FiniteGroup>, degree: usize) -> Result<PhaseCochain, Failure> {
    let c = PhaseCochain::from_file(&load_cochain_file(path)?, group.clone()).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })?;
    if c.degree() != degree {
        return Err(Failure {
            code: EXIT_DATA,
            message: format!("{}: expected a {degree}-cochain, got degree {}", path.display(), c.degree()),
        });
    }
    Ok(c)
}

fn parse_group(spec: &str) -> Result<Arc<FiniteGroup>, Failure> {
    FiniteGroup::parse(spec).map(Arc::new).map_err(|e| Failure {
        code: EXIT_USAGE,
        message: e.to_string(),
    })
}

fn root_order(g: &Global, theory: Option<&GxTheory>, group: &FiniteGroup) -> Result<u64, Failure> {
    if let Some(n) = g.root_order {
        if n == 0 {
            return Err(Failure {
                code: EXIT_USAGE,
                message: "--root-order must be positive".into(),
            });
        }
        return Ok(n);
    }
    let a = match theory {
        Some(t) => t.abelian_subgroup()?.order() as u64,
        None => 1,
    };
    Ok(lcm(lcm(group.order() as u64, a), 8))
}

fn reports_json(reports: &[ConsistencyReport]) -> Value {
    Value::Array(reports.iter().map(|r| serde_json::to_value(r).expect("report serializes")).collect())
}

fn cmd_check(g: &Global, path: &Path, eq: EqChoice, max_defects: usize) -> CmdResult {
    let th = load_theory(path)?;
    let opts = CheckOptions { tol: g.tol, max_defects };
    let reports = match eq {
        EqChoice::Pentagon => vec![consistency::check_pentagon(&th, &opts)],
        EqChoice::Hexagon => vec![consistency::check_hexagon(&th, &opts)],
        EqChoice::Heptagon => vec![
            consistency::check_heptagon_plus(&th, &opts),
            consistency::check_heptagon_minus(&th, &opts),
        ],
        EqChoice::Eta => vec![consistency::check_eta_associativity(&th, &opts)],
        EqChoice::Kappa => vec![consistency::check_kappa_sliding(&th, &opts)],
        EqChoice::All => consistency::check_all(&th, &opts),
    };
    let violations = th.validate();
    let passed = violations.is_empty() && consistency::all_passed(&reports);
    let worst = reports.iter().map(|r| r.worst_residual).fold(0.0, f64::max);
    Ok(Outcome {
        report: json!({
            "theory": th.name(),
            "passed": passed,
            "tol": g.tol,
            "max_defects": max_defects,
            "worst_residual": worst,
            "violations": violations,
            "equations": reports_json(&reports),
        }),
        code: if passed { EXIT_OK } else { EXIT_NEGATIVE },
    })
}

fn load_t(theory: &GxTheory, path: &Path) -> Result<crate::groups::ModuleCochain, Failure> {
    let file = load_cochain_file(path)?;
    t_from_file(theory, &file).map_err(|e| Failure {
        code: EXIT_DATA,
        message: format!("{}: {e}", path.display()),
    })
}

fn cmd_torsor(g: &Global, theory: &Path, t: &Path, x: Option<&Path>, no_precheck: bool) -> CmdResult {
    let th = load_theory(theory)?;
    let t = load_t(&th, t)?;
    let x = match x {
        Some(p) => load_phase_cochain(p, th.group(), 3)?,
        None => {
            let n = root_order(g, Some(&th), th.group())?;
            match solve_cocycleator(&th, &t, n)? {
                Some(x) => x,
                None => {
                    return Ok(Outcome {
                        report: json!({
                            "obstructed": true,
                            "t": t_to_file(&th, &t)?,
                            "message": "O_r(t) is not a coboundary; no X exists",
                        }),
                        code: EXIT_NEGATIVE,
                    })
                }
            }
        }
    };
    let opts = TorsorOptions {
        tol: g.tol,
        check_preconditions: !no_precheck,
        record_obstruction: true,
    };
    let out = apply_torsor_with(&th, &TorsorInput::with_x(t, x), &opts)?;
    let file = TheoryFile::from_theory(&out);
    Ok(Outcome::ok(serde_json::to_value(file).map_err(Error::from)?))
}

fn cmd_obstruction(g: &Global, theory: &Path, t: &Path) -> CmdResult {
    let th = load_theory(theory)?;
    let t = load_t(&th, t)?;
    let o = relative_obstruction_tol(&th, &t, g.tol.max(1e-6))?;
    let n = root_order(g, Some(&th), th.group())?;
    let h4 = U1Cohomology::new(th.group().clone(), 4, n)?;
    let class = h4.class_of(&o)?;
    let trivial = class.iter().all(|&c| c == 0);
    let x = if trivial {
        solve_cocycleator(&th, &t, n)?.map(|x| x.to_file())
    } else {
        None
    };
    Ok(Outcome::ok(json!({
        "t": t_to_file(&th, &t)?,
        "o_r": o.to_file(),
        "h4_invariants": h4.invariants(),
        "class": class,
        "trivial": trivial,
        "root_order": n,
        "x": x,
    })))
}

fn cmd_compose(theory: &Path, t1: &Path, x1: Option<&Path>, t2: &Path, x2: Option<&Path>) -> CmdResult {
    let th = load_theory(theory)?;
    let grp = th.group().clone();
    let input = |t: &Path, x: Option<&Path>| -> Result<TorsorInput, Failure> {
        let t = load_t(&th, t)?;
        let x = match x {
            Some(p) => load_phase_cochain(p, &grp, 3)?,
            None => PhaseCochain::identity(grp.clone(), U1, 3),
        };
        Ok(TorsorInput::with_x(t, x))
    };
    let (in1, in2) = (input(t1, x1)?, input(t2, x2)?);
    let comp = compose_torsors(&th, &in1, &in2)?;
    Ok(Outcome::ok(json!({
        "t": t_to_file(&th, &comp.composite.t)?,
        "x": comp.composite.x.to_file(),
        "y": comp.y.to_file(),
        "gauge": comp.gauge,
    })))
}

fn cmd_equiv(g: &Global, a: &Path, b: &Path, budget: usize) -> CmdResult {
    let (ta, tb) = (load_theory(a)?, load_theory(b)?);
    match theories_equivalent(&ta, &tb, budget, g.tol) {
        Ok(Some(w)) => Ok(Outcome::ok(json!({ "equivalent": true, "witness": w }))),
        Ok(None) => Ok(Outcome {
            report: json!({ "equivalent": false }),
            code: EXIT_NEGATIVE,
        }),
        Err(Error::BudgetExceeded(n)) => Ok(Outcome {
            report: json!({ "equivalent": null, "inconclusive": format!("budget of {n} relabelings exhausted") }),
            code: EXIT_INCONCLUSIVE,
        }),
        Err(e) => Err(e.into()),
    }
}

fn cochain_json(c: &AnyCochain) -> Value {
    match c {
        AnyCochain::Phase(p) => serde_json::to_value(p.to_file()).expect("cochain serializes"),
        AnyCochain::Module(m) => serde_json::to_value(m.to_file()).expect("cochain serializes"),
    }
}

fn cmd_cohomology(
    g: &Global,
    group: &str,
    coeff: &str,
    degree: usize,
    theory: Option<&Path>,
    representatives: bool,
) -> CmdResult {
    let grp = parse_group(group)?;
    let module = match coeff.to_ascii_lowercase().as_str() {
        "u1" => CoefficientModule::RootsOfUnity(root_order(g, None, &grp)?),
        "charges" => {
            let path = theory.ok_or_else(|| Failure {
                code: EXIT_USAGE,
                message: "--coeff charges needs --theory".into(),
            })?;
            let th = load_theory(path)?;
            if **th.group() != *grp {
                return Err(Failure {
                    code: EXIT_USAGE,
                    message: format!("theory is graded by {}, not {}", th.group().name(), grp.name()),
                });
            }
            CoefficientModule::AbelianCharges(th.abelian_subgroup()?.module().clone())
        }
        other => match other.strip_prefix('z').and_then(|n| n.parse::<u64>().ok()).filter(|&n| n > 0) {
            Some(n) => CoefficientModule::AbelianCharges(FiniteModule::trivial(&[n], grp.order())),
            None => {
                return Err(Failure {
                    code: EXIT_USAGE,
                    message: format!("unknown coefficient module {coeff:?}"),
                })
            }
        },
    };
    let h = cohomology(degree, grp.clone(), &module)?;
    let mut report = json!({
        "group": grp.name(),
        "degree": degree,
        "coeff": coeff,
        "structure": h.structure(),
        "invariants": h.invariants,
        "order": h.order(),
    });
    if representatives {
        report["representatives"] = Value::Array(h.representatives.iter().map(cochain_json).collect());
    }
    Ok(Outcome::ok(report))
}

fn theory_json(t: &GxTheory) -> Result<Value, Failure> {
    Ok(serde_json::to_value(TheoryFile::from_theory(t)).map_err(Error::from)?)
}

fn cmd_build(g: &Global, what: &BuildCommand) -> CmdResult {
    let theory = match what {
        BuildCommand::Spt { group, alpha, class } => {
            let grp = parse_group(group)?;
            let alpha = match (alpha, class) {
                (Some(p), _) => load_phase_cochain(p, &grp, 3)?,
                (None, k) => {
                    let h3 = U1Cohomology::new(grp.clone(), 3, root_order(g, None, &grp)?)?;
                    let reps = h3.representatives();
                    let k = k.unwrap_or(0);
                    reps.get(k).cloned().ok_or_else(|| Failure {
                        code: EXIT_USAGE,
                        message: format!("class {k} out of range: H3 has {} classes", reps.len()),
                    })?
                }
            };
            build_spt(&alpha)?
        }
        BuildCommand::TrivialExt { c0, group } => trivial_extension(&load_theory(c0)?, parse_group(group)?)?,
        BuildCommand::Fixture { name } => fixture(name)?,
    };
    Ok(Outcome::ok(theory_json(&theory)?))
}

fn fixture(name: &str) -> Result<GxTheory, Failure> {
    if let Some(t) = fixtures::by_name(name) {
        return Ok(t);
    }
    let parsed = name
        .strip_prefix('z')
        .and_then(|s| s.split_once('^'))
        .and_then(|(n, p)| Some((n.parse::<usize>().ok()?, p.parse::<i64>().ok()?)));
    match parsed {
        Some((n, p)) if n > 0 => Ok(fixtures::z_n(n, p)?),
        _ => Err(Failure {
            code: EXIT_USAGE,
            message: format!("unknown fixture {name:?}; known: {}, z<N>^<p>", fixtures::NAMES.join(", ")),
        }),
    }
}

/// One torsor class of the enumeration.
struct Row {
    t_class: Vec<u64>,
    alpha_class: Option<Vec<u64>>,
    obstructed: bool,
    theory: Option<GxTheory>,
}

fn cmd_enumerate(g: &Global, c0: &Path, group: &str, budget: usize) -> CmdResult {
    let base = trivial_extension(&load_theory(c0)?, parse_group(group)?)?;
    let grp = base.group().clone();
    let a = base.abelian_subgroup()?;
    let n = root_order(g, Some(&base), &grp)?;
    let h2 = FiniteCohomology::new(grp.clone(), a.module().clone(), 2)?;
    let h3 = U1Cohomology::new(grp.clone(), 3, n)?;
    let alphas = h3.representatives();
    let opts = TorsorOptions {
        tol: g.tol,
        check_preconditions: false,
        record_obstruction: false,
    };

    let mut rows = Vec::new();
    for t in h2.representatives()? {
        let t_class = h2.class_of(&t)?;
        let Some(x) = solve_cocycleator(&base, &t, n)? else {
            rows.push(Row {
                t_class,
                alpha_class: None,
                obstructed: true,
                theory: None,
            });
            continue;
        };
        for alpha in &alphas {
            let input = TorsorInput::with_x(t.clone(), x.mul(alpha));
            rows.push(Row {
                t_class: t_class.clone(),
                alpha_class: Some(h3.class_of(alpha)?),
                obstructed: false,
                theory: Some(apply_torsor_with(&base, &input, &opts)?),
            });
        }
    }

    // Greedy collapse: each theory joins the first earlier class it is
    // equivalent to.
    let mut reps: Vec<usize> = Vec::new();
    let mut table = Vec::new();
    let mut inconclusive = 0usize;
    for (i, row) in rows.iter().enumerate() {
        let mut entry = json!({
            "t_class": row.t_class,
            "alpha_class": row.alpha_class,
            "obstructed": row.obstructed,
        });
        if let Some(th) = &row.theory {
            let mut class = None;
            let mut status = "new";
            for (k, &r) in reps.iter().enumerate() {
                let other = rows[r].theory.as_ref().expect("representatives are unobstructed");
                match theories_equivalent(other, th, budget, g.tol) {
                    Ok(Some(_)) => {
                        class = Some(k);
                        status = "collapsed";
                        break;
                    }
                    Ok(None) => {}
                    Err(Error::BudgetExceeded(_)) => status = "inconclusive",
                    Err(e) => return Err(e.into()),
                }
            }
            if status == "inconclusive" {
                inconclusive += 1;
            }
            let class = class.unwrap_or_else(|| {
                reps.push(i);
                reps.len() - 1
            });
            entry["equivalence_class"] = json!(class);
            entry["collapse"] = json!(status);
        }
        table.push(entry);
    }
    let obstructed = rows.iter().filter(|r| r.obstructed).count();
    Ok(Outcome {
        report: json!({
            "base": base.name(),
            "group": grp.name(),
            "h2": h2.invariants(),
            "h3": h3.invariants(),
            "root_order": n,
            "rows": table,
            "obstructed_t_classes": obstructed,
            "distinct_classes": reps.len(),
            "inconclusive": inconclusive,
        }),
        code: if inconclusive > 0 { EXIT_INCONCLUSIVE } else { EXIT_OK },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("gxbtc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn cohomology_of_z2() {
        let (code, out, _) = run_str(&["cohomology", "--group", "Z2", "--coeff", "u1", "--degree", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["structure"], "Z2");
        let (_, out, _) = run_str(&["cohomology", "--group", "Z2", "--coeff", "z2", "--degree", "2", "--json"]);
        assert!(out.contains("\"structure\":\"Z2\""));
    }

    #[test]
    fn usage_errors_exit_64() {
        assert_eq!(run_str(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["cohomology", "--group", "Q8x", "--coeff", "u1", "--degree", "2"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["cohomology", "--group", "Z2", "--coeff", "w", "--degree", "2"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn missing_file_exits_65() {
        let (code, _, err) = run_str(&["check", "/nonexistent/theory.json"]);
        assert_eq!(code, EXIT_DATA);
        assert!(err.contains("nonexistent"));
    }

    #[test]
    fn unknown_fixture() {
        assert_eq!(run_str(&["build", "fixture", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["build", "fixture", "z3^2"]).0, EXIT_OK);
    }

    #[test]
    fn spt_class_out_of_range() {
        assert_eq!(run_str(&["build", "spt", "--group", "Z2", "--class", "2"]).0, EXIT_USAGE);
        let (code, out, _) = run_str(&["build", "spt", "--group", "Z2", "--class", "1"]);
        assert_eq!(code, 0);
        let th = GxTheory::from_json(&out).unwrap();
        assert_eq!(th.num_charges(), 2);
    }
}
