//! The `qset` command-line front end.
//!
//! Exit codes: 0 when everything checked holds, 1 when some axiom or formula
//! fails (the report lists the witnesses), 2 for unreadable input, parse and
//! sort errors, 3 when a resource bound is hit.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use quasiset::closure::{close, ClosureOp};
use quasiset::do_model::{
    gen_do, interpret, AxiomVerdict, DAxiom, DWitness, DoSystem, GenConfig, InterpretError,
    InterpretOptions,
};
use quasiset::format::{
    do_system_from_json, do_system_to_json, rational_spec_from_json, universe_from_json,
    universe_to_json,
};
use quasiset::formula::{
    check_axiom, check_sorts, evaluate, parse, Axiom, AxiomReport, CorpusOptions,
    SeparationInstance, Valuation, VarSort,
};
use quasiset::rational_model::build_universe;
use quasiset::{Error, Universe, DEFAULT_POWER_BOUND};
use serde_json::{json, Value};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qset",
    version,
    about = "Finite-model laboratory for quasi-set theory"
)]
struct Cli {
    /// Print a machine-readable JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a D_O-system file against D1-D6.
    CheckDo {
        #[arg(long = "in")]
        input: PathBuf,
        /// D1..D6 or `all`.
        #[arg(long, default_value = "all")]
        axiom: String,
    },
    /// Generate a random D_O-system satisfying D1-D6.
    GenDo {
        #[arg(long)]
        n: usize,
        /// Number of distinct intrinsic states.
        #[arg(long)]
        species: usize,
        #[arg(long, default_value_t = 0.5)]
        micro_fraction: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Translate a valid D_O-system into a quasi-set universe.
    Interpret {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Build P(class) for particle classes of at most this size.
        #[arg(long, default_value_t = InterpretOptions::default().max_power_class)]
        max_power_class: usize,
    },
    /// Build a universe from a rational/Cauchy-sequence spec.
    BuildRational {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Add witnesses (weak pairs, power quasi-sets, quotients, separations).
    Close {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "weakpair,power")]
        ops: Vec<String>,
        /// Largest quasi-cardinal whose power quasi-set is built.
        #[arg(long, default_value_t = 8)]
        max_card: usize,
    },
    /// Evaluate the formulas of a file, one per line, on a universe.
    Eval {
        #[arg(long)]
        universe: PathBuf,
        #[arg(long)]
        formulas: PathBuf,
    },
    /// Check the axiom corpus on a universe.
    Axioms {
        #[arg(long)]
        universe: PathBuf,
        /// `all` or one of weak_pair, separation, quasi_cardinality,
        /// subqset_cardinals, power_qset, weak_extensionality.
        #[arg(long, default_value = "all")]
        corpus: String,
        /// Separation instance `var: formula`; replaces the stock instances.
        #[arg(long)]
        alpha: Vec<String>,
        /// Largest quasi-cardinal whose power quasi-set is built.
        #[arg(long, default_value_t = DEFAULT_POWER_BOUND)]
        max_card: usize,
    },
}

enum Failure {
    Input(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Resource(_) => EXIT_RESOURCE,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Resource(m) => m,
        }
    }
}

fn in_file(path: &Path, e: Error) -> Failure {
    let msg = format!("{}: {e}", path.display());
    if e.is_resource() {
        Failure::Resource(msg)
    } else {
        Failure::Input(msg)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: cannot read: {e}", path.display())))
}

fn write_or_print(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| Failure::Input(format!("{}: cannot write: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn load_universe(path: &Path) -> Result<Universe, Failure> {
    universe_from_json(&read(path)?).map_err(|e| in_file(path, e))
}

fn load_do_system(path: &Path) -> Result<DoSystem, Failure> {
    do_system_from_json(&read(path)?).map_err(|e| in_file(path, e))
}

/// Runs `qset` with `args` (including the program name) and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                return EXIT_INPUT;
            }
            let _ = out.write_all(text.as_bytes());
            return EXIT_HOLDS;
        }
    };
    let mut report = Report {
        json: cli.json,
        out,
    };
    match dispatch(cli.command, &mut report) {
        Ok(code) => code,
        Err(f) => {
            if report.json {
                report.emit_json(json!({ "error": f.message(), "exit": f.code() }));
            } else {
                let _ = writeln!(err, "error: {}", f.message());
            }
            f.code()
        }
    }
}

struct Report<'a> {
    json: bool,
    out: &'a mut dyn Write,
}

impl Report<'_> {
    fn line(&mut self, text: impl AsRef<str>) {
        if !self.json {
            let _ = writeln!(self.out, "{}", text.as_ref());
        }
    }

    fn emit_json(&mut self, v: Value) {
        let _ = writeln!(
            self.out,
            "{}",
            serde_json::to_string_pretty(&v).expect("json value")
        );
    }
}

fn dispatch(cmd: Command, r: &mut Report) -> Result<i32, Failure> {
    match cmd {
        Command::CheckDo { input, axiom } => check_do(&input, &axiom, r),
        Command::GenDo {
            n,
            species,
            micro_fraction,
            seed,
            out,
        } => {
            let s = gen_do(GenConfig {
                n,
                species_count: species,
                micro_fraction,
                seed,
            })
            .map_err(|e| Failure::Input(e.to_string()))?;
            let text = do_system_to_json(&s);
            let micro = s.particles().iter().filter(|p| p.micro).count();
            match &out {
                Some(path) => {
                    write_or_print(r.out, Some(path), &text)?;
                    let summary = format!(
                        "wrote {}: {} particles ({micro} micro, {} macro), {} intrinsic states",
                        path.display(),
                        s.particles().len(),
                        s.particles().len() - micro,
                        s.intrinsic_pool().len()
                    );
                    if r.json {
                        r.emit_json(json!({
                            "out": path.display().to_string(),
                            "particles": s.particles().len(),
                            "micro": micro,
                            "states": s.intrinsic_pool().len(),
                        }));
                    } else {
                        r.line(summary);
                    }
                }
                None => write_or_print(r.out, None, &text)?,
            }
            Ok(EXIT_HOLDS)
        }
        Command::Interpret {
            input,
            out,
            max_power_class,
        } => {
            let s = load_do_system(&input)?;
            match interpret(&s, InterpretOptions { max_power_class }) {
                Ok(u) => {
                    emit_universe(r, &u, out.as_deref())?;
                    Ok(EXIT_HOLDS)
                }
                Err(InterpretError::Axiom(_)) => {
                    let failing: Vec<AxiomVerdict> =
                        s.check_all().into_iter().filter(|v| !v.holds).collect();
                    if r.json {
                        r.emit_json(json!({
                            "file": input.display().to_string(),
                            "refused": true,
                            "verdicts": failing.iter().map(|v| verdict_json(&s, v)).collect::<Vec<_>>(),
                        }));
                    } else {
                        r.line(format!(
                            "{}: not a D_O-system, refusing to interpret",
                            input.display()
                        ));
                        for v in &failing {
                            r.line(verdict_text(&s, v));
                        }
                    }
                    Ok(EXIT_VIOLATED)
                }
                Err(InterpretError::Universe(e)) => Err(in_file(&input, e)),
            }
        }
        Command::BuildRational { input, out } => {
            let spec = rational_spec_from_json(&read(&input)?).map_err(|e| in_file(&input, e))?;
            let u = build_universe(&spec).map_err(|e| in_file(&input, e))?;
            emit_universe(r, &u, out.as_deref())?;
            Ok(EXIT_HOLDS)
        }
        Command::Close {
            input,
            out,
            ops,
            max_card,
        } => {
            let u = load_universe(&input)?;
            let ops = ops
                .iter()
                .map(|s| s.trim().parse::<ClosureOp>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::Input(e.to_string()))?;
            let c = close(&u, &ops, max_card).map_err(|e| in_file(&input, e))?;
            let text = universe_to_json(&c.universe);
            write_or_print(r.out, out.as_deref(), &text)?;
            if out.is_some() {
                if r.json {
                    r.emit_json(json!({ "added": c.added, "skipped_power": c.skipped }));
                } else {
                    r.line(format!("added {} quasi-sets", c.added));
                    if !c.skipped.is_empty() {
                        r.line(format!(
                            "power quasi-set not built (qc above {max_card}): {}",
                            c.skipped.join(", ")
                        ));
                    }
                }
            }
            Ok(EXIT_HOLDS)
        }
        Command::Eval { universe, formulas } => eval_file(&universe, &formulas, r),
        Command::Axioms {
            universe,
            corpus,
            alpha,
            max_card,
        } => axioms(&universe, &corpus, &alpha, max_card, r),
    }
}

fn emit_universe(r: &mut Report, u: &Universe, out: Option<&Path>) -> Result<(), Failure> {
    let text = universe_to_json(u);
    write_or_print(r.out, out, &text)?;
    if let Some(path) = out {
        let atoms = u.atom_handles().count();
        if r.json {
            r.emit_json(json!({
                "out": path.display().to_string(),
                "atoms": atoms,
                "qsets": u.len() - atoms,
            }));
        } else {
            r.line(format!(
                "wrote {}: {atoms} atoms, {} quasi-sets",
                path.display(),
                u.len() - atoms
            ));
        }
    }
    Ok(())
}

fn describe_particle(s: &DoSystem, i: usize) -> String {
    let p = &s.particles()[i];
    let scale = match (p.micro, p.macro_) {
        (true, false) => "micro",
        (false, true) => "macro",
        (true, true) => "micro and macro",
        (false, false) => "neither micro nor macro",
    };
    format!("P[{i}] = ⟨{}, {}⟩ ({scale})", p.x, p.lam)
}

fn witness_detail(s: &DoSystem, w: DWitness) -> String {
    match w {
        DWitness::Labels(i, j) => format!("λ_{i} = λ_{j} = {}", s.lambda()[i - 1]),
        DWitness::Particle(i) => describe_particle(s, i),
        DWitness::Particles(i, j) => {
            format!("{}; {}", describe_particle(s, i), describe_particle(s, j))
        }
    }
}

fn verdict_text(s: &DoSystem, v: &AxiomVerdict) -> String {
    match v.witness {
        Some(w) if !v.holds => format!("{}: violated: {}", v.axiom, witness_detail(s, w)),
        _ => v.to_string(),
    }
}

fn verdict_json(s: &DoSystem, v: &AxiomVerdict) -> Value {
    let witness = v.witness.map(|w| {
        let (kind, idx): (&str, Vec<usize>) = match w {
            DWitness::Labels(i, j) => ("labels", vec![i, j]),
            DWitness::Particle(i) => ("particle", vec![i]),
            DWitness::Particles(i, j) => ("particles", vec![i, j]),
        };
        json!({ "kind": kind, "indices": idx, "detail": witness_detail(s, w) })
    });
    json!({
        "axiom": v.axiom.to_string(),
        "holds": v.holds,
        "note": v.note,
        "witness": witness,
    })
}

fn check_do(input: &Path, axiom: &str, r: &mut Report) -> Result<i32, Failure> {
    let s = load_do_system(input)?;
    let verdicts = if axiom.eq_ignore_ascii_case("all") {
        s.check_all()
    } else {
        let a = DAxiom::parse(axiom).map_err(|e| Failure::Input(e.to_string()))?;
        vec![s.check(a)]
    };
    let holds = verdicts.iter().all(|v| v.holds);
    if r.json {
        r.emit_json(json!({
            "file": input.display().to_string(),
            "holds": holds,
            "verdicts": verdicts.iter().map(|v| verdict_json(&s, v)).collect::<Vec<_>>(),
        }));
    } else {
        for v in &verdicts {
            r.line(verdict_text(&s, v));
        }
    }
    Ok(if holds { EXIT_HOLDS } else { EXIT_VIOLATED })
}

fn declared_sorts(u: &Universe) -> std::collections::BTreeMap<String, VarSort> {
    u.entities()
        .iter()
        .map(|e| {
            let sort = if e.is_micro() {
                VarSort::MicroAtom
            } else if e.is_macro() {
                VarSort::MacroAtom
            } else {
                VarSort::QSet
            };
            (e.name().to_string(), sort)
        })
        .collect()
}

fn eval_file(universe: &Path, formulas: &Path, r: &mut Report) -> Result<i32, Failure> {
    let u = load_universe(universe)?;
    let text = read(formulas)?;
    let sorts = declared_sorts(&u);
    let mut results = Vec::new();
    let mut code = EXIT_HOLDS;
    let severity = |c: i32| match c {
        EXIT_INPUT => 3,
        EXIT_RESOURCE => 2,
        EXIT_VIOLATED => 1,
        _ => 0,
    };
    for (k, line) in text.lines().enumerate() {
        let src = line.trim_end();
        if src.trim().is_empty() || src.trim_start().starts_with('#') {
            continue;
        }
        let lineno = k + 1;
        let outcome = parse(src).and_then(|f| {
            let mut v = Valuation::new();
            for var in f.free_vars() {
                let h = u
                    .lookup(&var)
                    .ok_or_else(|| Error::UnboundVariable(var.clone()))?;
                v.insert(var, h);
            }
            check_sorts(&f, &sorts)?;
            evaluate(&u, &f, &v)
        });
        let this = match &outcome {
            Ok(true) => EXIT_HOLDS,
            Ok(false) => EXIT_VIOLATED,
            Err(e) if e.is_resource() => EXIT_RESOURCE,
            Err(_) => EXIT_INPUT,
        };
        if severity(this) > severity(code) {
            code = this;
        }
        let place = match outcome.as_ref().err().and_then(Error::span) {
            Some(sp) => format!("{}:{lineno}:{}", formulas.display(), sp.start + 1),
            None => format!("{}:{lineno}", formulas.display()),
        };
        match &outcome {
            Ok(b) => r.line(format!("{place}: {b}: {src}")),
            Err(e) => r.line(format!("{place}: error: {e}")),
        }
        results.push(match outcome {
            Ok(b) => json!({ "line": lineno, "formula": src, "value": b }),
            Err(e) => json!({
                "line": lineno,
                "formula": src,
                "error": e.to_string(),
                "span": e.span().map(|s| vec![s.start, s.end]),
            }),
        });
    }
    if r.json {
        r.emit_json(json!({
            "file": formulas.display().to_string(),
            "exit": code,
            "results": results,
        }));
    }
    Ok(code)
}

fn axioms(
    universe: &Path,
    corpus: &str,
    alpha: &[String],
    max_card: usize,
    r: &mut Report,
) -> Result<i32, Failure> {
    let u = load_universe(universe)?;
    let selected: Vec<Axiom> = if corpus == "all" {
        Axiom::ALL.to_vec()
    } else {
        vec![corpus
            .parse()
            .map_err(|e: Error| Failure::Input(e.to_string()))?]
    };
    let mut opts = CorpusOptions {
        power_bound: max_card,
        ..CorpusOptions::default()
    };
    if !alpha.is_empty() {
        opts.separation = alpha
            .iter()
            .map(|a| {
                let (var, src) = a.split_once(':').ok_or_else(|| {
                    Failure::Input(format!("--alpha `{a}`: expected `var: formula`"))
                })?;
                SeparationInstance::parse(var.trim(), src.trim())
                    .map_err(|e| Failure::Input(format!("--alpha `{a}`: {e}")))
            })
            .collect::<Result<_, _>>()?;
    }
    let reports: Vec<AxiomReport> = selected
        .iter()
        .map(|&a| check_axiom(&u, a, &opts))
        .collect::<Result<_, _>>()
        .map_err(|e| in_file(universe, e))?;
    let holds = reports.iter().all(AxiomReport::holds);
    if r.json {
        r.emit_json(json!({
            "universe": universe.display().to_string(),
            "holds": holds,
            "axioms": reports.iter().map(|rep| json!({
                "axiom": rep.axiom.name(),
                "holds": rep.holds(),
                "instances": rep.instances,
                "witnesses": rep.witnesses.len(),
                "violations": rep.violations,
            })).collect::<Vec<_>>(),
        }));
    } else {
        for rep in &reports {
            let status = if rep.holds() { "holds" } else { "VIOLATED" };
            r.line(format!(
                "{:<20} {status:<8} {} instances, {} witnesses",
                rep.axiom.name(),
                rep.instances,
                rep.witnesses.len()
            ));
            for v in &rep.violations {
                r.line(format!("  counterexample: {v}"));
            }
        }
    }
    Ok(if holds { EXIT_HOLDS } else { EXIT_VIOLATED })
}
