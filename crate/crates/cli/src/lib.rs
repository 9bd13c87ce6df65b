//! Command-line front end: parses extension documents, runs validation and
//! the tower computations, and renders deterministic text reports.

pub mod document;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use nabcoh::cohomology::{cohomology, hom_identification, validate_equivariance, CochainComplex};
use nabcoh::exactla::{format_rational, zero_vec, CoefficientAlgebra, Rational};
use nabcoh::gmcheck::h1_vanishing_check;
use nabcoh::lie::validate_module;
use nabcoh::nabtower::{
    evaluate_points, normalize_section, obstruction, run_tower, section_variety,
    validate_extension, GradedExtension, Section, StageStatus, TowerReport, TowerStatus,
};
use nabcoh::validation::ValidationReport;
use num_traits::{One, Zero};

use document::{build, parse, Built, InputDocument};

#[derive(Parser, Debug)]
#[command(
    name = "nabcoh",
    version,
    about = "Graded Lie extensions: cohomology, section varieties and lifting towers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Lie, ideal, grading and group axioms.
    Validate { document: String },
    /// Cohomology tables of the document's module, or of each tower stage.
    Cohomology {
        document: String,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        /// Restrict to one weight.
        #[arg(long, allow_negative_numbers = true)]
        weight: Option<i64>,
        /// Use all cochains instead of group-invariant ones.
        #[arg(long)]
        all: bool,
    },
    /// Coordinates and equations of the section variety, and its points.
    Sections {
        document: String,
        #[arg(long, default_value = "rationals")]
        algebra: String,
    },
    /// Stage-by-stage obstructions and torsors.
    Tower {
        document: String,
        #[arg(long)]
        max_stage: Option<usize>,
        #[arg(long, default_value = "rationals")]
        algebra: String,
    },
    /// Conjugate the document's section into graded form.
    Normalize { document: String },
    /// First cohomology of the multiplicative group with a character twist.
    GmCheck {
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        #[arg(long, default_value_t = 10)]
        max_degree: i64,
        #[arg(long, default_value = "rationals")]
        algebra: String,
    },
}

/// Exit status and the text written to standard output and error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    /// Bad input or failed validation: exit 1.
    Input(String),
    /// Computation refused or failed: exit 2.
    Compute(String),
}

/// Runs a command line (`args[0]` is the program name).
pub fn run(args: &[String]) -> Outcome {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let mut report = format!("$ nabcoh {}\n", args[1..].join(" "));
    let result = dispatch(&cli.command, &mut report);
    let (code, stderr) = match result {
        Ok(code) => (code, String::new()),
        Err(Failure::Input(m)) => {
            let _ = writeln!(report, "result: invalid input");
            (1, format!("error: {m}\n"))
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(report, "result: error");
            (2, format!("error: {m}\n"))
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &report) {
            return Outcome {
                code: 2,
                stdout: report,
                stderr: format!("{stderr}error: cannot write {}: {e}\n", path.display()),
            };
        }
    }
    Outcome {
        code,
        stdout: report,
        stderr,
    }
}

fn dispatch(command: &Command, out: &mut String) -> Result<i32, Failure> {
    match command {
        Command::Validate { document } => {
            let (_, built) = load(document, out)?;
            let report = full_validation(&built);
            let _ = writeln!(out, "validation:");
            out.push_str(&report.to_string());
            let failed = report.failures().count();
            if failed == 0 {
                let _ = writeln!(out, "result: valid");
                Ok(0)
            } else {
                let _ = writeln!(out, "result: invalid ({})", counted(failed, "failed check"));
                Ok(1)
            }
        }
        Command::Cohomology {
            document,
            max_degree,
            weight,
            all,
        } => {
            let (_, built) = load(document, out)?;
            require_valid(&built, out)?;
            cohomology_command(&built, *max_degree, *weight, !*all, out)
        }
        Command::Sections { document, algebra } => {
            let (_, built) = load(document, out)?;
            require_valid(&built, out)?;
            let alg = algebra_named(algebra)?;
            sections_command(&built.extension, &alg, out)
        }
        Command::Tower {
            document,
            max_stage,
            algebra,
        } => {
            let (_, built) = load(document, out)?;
            require_valid(&built, out)?;
            let alg = algebra_named(algebra)?;
            tower_command(&built.extension, *max_stage, &alg, out)
        }
        Command::Normalize { document } => {
            let (_, built) = load(document, out)?;
            require_valid(&built, out)?;
            normalize_command(&built, out)
        }
        Command::GmCheck {
            d,
            max_degree,
            algebra,
        } => {
            let alg = algebra_named(algebra)?;
            let r = h1_vanishing_check(*d, *max_degree, &alg)
                .map_err(|e| Failure::Compute(e.to_string()))?;
            let _ = writeln!(
                out,
                "cocycle condition f(t⊗t) = f(t⊗1) + (t^{d}⊗1)·f(1⊗t) over {}, exponents -{m}..{m}",
                r.algebra,
                m = r.bound
            );
            let _ = writeln!(out, "cocycle space dimension {}", r.cocycle_dim);
            let _ = writeln!(out, "coboundary space dimension {}", r.coboundary_dim);
            if r.verified {
                let _ = writeln!(out, "result: H1 vanishes (verified)");
                Ok(0)
            } else {
                let _ = writeln!(out, "result: H1 does not vanish");
                Ok(1)
            }
        }
    }
}

fn algebra_named(name: &str) -> Result<CoefficientAlgebra, Failure> {
    CoefficientAlgebra::by_name(name).ok_or_else(|| {
        Failure::Input(format!(
            "unknown coefficient algebra \"{name}\" (use rationals, dual or split)"
        ))
    })
}

/// Tries the path as given, with `.json` appended, and under `fixtures/`.
fn resolve(arg: &str) -> Option<PathBuf> {
    let candidates = [
        PathBuf::from(arg),
        PathBuf::from(format!("{arg}.json")),
        Path::new("fixtures").join(format!("{arg}.json")),
    ];
    candidates.into_iter().find(|p| p.is_file())
}

fn load(arg: &str, out: &mut String) -> Result<(InputDocument, Built), Failure> {
    let path =
        resolve(arg).ok_or_else(|| Failure::Compute(format!("no document found at \"{arg}\"")))?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Failure::Compute(format!("cannot read {}: {e}", path.display())))?;
    let doc = parse(&text).map_err(|e| Failure::Input(e.to_string()))?;
    let built = build(&doc).map_err(Failure::Input)?;
    let e = &built.extension;
    let _ = writeln!(
        out,
        "document: {} ({} basis elements: {} quotient, {} kernel; depth {})",
        doc.name,
        doc.basis.len(),
        e.g_indices().len(),
        e.n_indices().len(),
        e.depth()
    );
    Ok((doc, built))
}

fn full_validation(built: &Built) -> ValidationReport {
    let mut report = validate_extension(&built.extension);
    if let Some((module, action)) = &built.module {
        report.extend(validate_module(module));
        if let Some(a) = action {
            report.extend(validate_equivariance(module, a));
        }
    }
    report
}

fn require_valid(built: &Built, out: &mut String) -> Result<(), Failure> {
    let report = full_validation(built);
    if report.passed() {
        let _ = writeln!(out, "validation: pass ({} checks)", report.checks.len());
        Ok(())
    } else {
        let _ = writeln!(out, "validation:");
        out.push_str(&report.to_string());
        let first = report.failures().next().expect("a failure");
        Err(Failure::Input(format!(
            "{} fails at {}",
            first.name,
            first.witness.clone().unwrap_or_default()
        )))
    }
}

/// `2*x - 1/2*z`, or `0`.
pub fn format_vector(names: &dyn Fn(usize) -> String, v: &[Rational]) -> String {
    let mut s = String::new();
    for (i, c) in v.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let neg = *c < Rational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if abs.is_one() {
            s.push_str(&names(i));
        } else {
            let _ = write!(s, "{}*{}", format_rational(&abs), names(i));
        }
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

fn cohomology_table(
    complex: &CochainComplex,
    max_degree: usize,
    weight: Option<i64>,
    invariant: bool,
    out: &mut String,
) {
    let l = complex.module().algebra();
    let v = complex.module().space();
    let bound: i64 = (0..l.dim()).map(|i| l.weight(i).abs()).sum::<i64>()
        + (0..v.dim()).map(|i| v.weight(i).abs()).max().unwrap_or(0);
    let _ = writeln!(
        out,
        "{:>3} {:>7} {:>9} {:>9} {:>13} {:>4}",
        "j", "weight", "cochains", "cocycles", "coboundaries", "dim"
    );
    let mut reps = Vec::new();
    for j in 0..=max_degree {
        for m in -bound..=bound {
            if weight.is_some_and(|w| w != m) {
                continue;
            }
            let slice = complex.slice(j, m);
            if slice.dim() == 0 {
                continue;
            }
            let r = cohomology(complex, j, m, invariant);
            let cochains = if invariant {
                complex.invariant_cochains(&slice).len()
            } else {
                slice.dim()
            };
            let _ = writeln!(
                out,
                "{j:>3} {m:>7} {cochains:>9} {:>9} {:>13} {:>4}",
                r.cocycle_dim, r.coboundary_dim, r.dimension
            );
            for c in &r.representatives {
                reps.push(format!(
                    "  H^{j}_({m}): {}",
                    nabcoh::cohomology::describe_cochain(complex, &slice, c)
                ));
            }
        }
    }
    if !reps.is_empty() {
        let _ = writeln!(out, "representatives:");
        for r in reps {
            let _ = writeln!(out, "{r}");
        }
    }
}

fn cohomology_command(
    built: &Built,
    max_degree: usize,
    weight: Option<i64>,
    invariant: bool,
    out: &mut String,
) -> Result<i32, Failure> {
    let kind = if invariant { "invariant" } else { "all" };
    if let Some((module, action)) = &built.module {
        let complex = CochainComplex::new(module.clone(), action.clone())
            .map_err(|e| Failure::Compute(e.to_string()))?;
        let _ = writeln!(
            out,
            "cohomology with coefficients in the module ({kind} cochains)"
        );
        cohomology_table(&complex, max_degree, weight, invariant, out);
        match hom_identification(&complex) {
            Ok(h) => {
                let _ =
                    writeln!(
                    out,
                    "H^1_(0) against graded Hom(H_1(u), V): {} and {}, comparison map rank {}{}",
                    h.cohomology_dim,
                    h.hom_dim,
                    h.map_rank,
                    if h.is_isomorphism() { ", isomorphism" } else { "" }
                );
            }
            Err(e) => {
                let _ = writeln!(
                    out,
                    "H^1_(0) against graded Hom(H_1(u), V): not applicable ({e})"
                );
            }
        }
    } else {
        let e = &built.extension;
        for stage in 1..=e.depth() {
            let st = e
                .stage(stage)
                .map_err(|er| Failure::Compute(er.to_string()))?;
            let names: Vec<&str> = st.z.iter().map(|&i| e.total().name(i)).collect();
            let _ = writeln!(
                out,
                "stage {stage}: coefficients z = <{}> ({kind} cochains)",
                names.join(", ")
            );
            cohomology_table(&st.complex, max_degree, weight, invariant, out);
        }
    }
    let _ = writeln!(out, "result: computed");
    Ok(0)
}

fn tower_result(report: &TowerReport) -> String {
    match &report.status {
        TowerStatus::Empty { from_stage } => format!("empty from stage {from_stage}"),
        TowerStatus::Conditional { from_stage } => format!("conditional from stage {from_stage}"),
        TowerStatus::Parametrized => {
            let par = report.parametrization.as_ref().expect("nonempty");
            let free = par.free_parameters();
            if free.is_empty() {
                "single point".into()
            } else {
                let names: Vec<&str> = free
                    .iter()
                    .map(|&i| par.parameter_names[i].as_str())
                    .collect();
                format!(
                    "affine space of dimension {} over the rationals (parameters {})",
                    free.len(),
                    names.join(", ")
                )
            }
        }
    }
}

fn print_points(report: &TowerReport, out: &mut String) {
    let Some(par) = &report.parametrization else {
        return;
    };
    if report.coordinate_names.is_empty() {
        let _ = writeln!(out, "points over {}: no coordinates", par.algebra.name());
        return;
    }
    let _ = writeln!(out, "points over {}:", par.algebra.name());
    for (i, n) in report.coordinate_names.iter().enumerate() {
        let _ = writeln!(out, "  {n} = {}", par.describe_value(i));
    }
    if !par.residuals.is_empty() {
        let _ = writeln!(out, "residual conditions:");
        for r in &par.residuals {
            let _ = writeln!(
                out,
                "  {} = 0",
                r.format_with(&|v| par.parameter_names[v].clone())
            );
        }
    }
}

fn sections_command(
    e: &GradedExtension,
    alg: &CoefficientAlgebra,
    out: &mut String,
) -> Result<i32, Failure> {
    let variety = section_variety(e).map_err(|er| Failure::Compute(er.to_string()))?;
    let l = e.total();
    let g = e.g_indices();
    let n = e.n_indices();
    let _ = writeln!(
        out,
        "section variety: {}, {}",
        counted(variety.coordinates.len(), "coordinate"),
        counted(variety.constraints.len(), "constraint")
    );
    if !variety.coordinates.is_empty() {
        let _ = writeln!(out, "coordinates:");
    }
    for c in &variety.coordinates {
        let parts: Vec<String> = (0..g.len())
            .filter(|&a| (0..n.len()).any(|r| !c.map.get(r, a).is_zero()))
            .map(|a| {
                let col: Vec<Rational> = (0..n.len()).map(|r| c.map.get(r, a).clone()).collect();
                format!(
                    "{} ↦ {}",
                    l.name(g[a]),
                    format_vector(&|r| l.name(n[r]).to_string(), &col)
                )
            })
            .collect();
        let _ = writeln!(
            out,
            "  {} (weight {}): {}",
            c.name,
            c.weight,
            parts.join(", ")
        );
    }
    if !variety.constraints.is_empty() {
        let _ = writeln!(out, "constraints:");
    }
    for c in &variety.constraints {
        let _ = writeln!(out, "  {}", variety.describe_constraint(e, c));
    }
    let report = evaluate_points(e, alg).map_err(|er| Failure::Compute(er.to_string()))?;
    print_points(&report, out);
    let _ = writeln!(out, "result: {}", tower_result(&report));
    Ok(0)
}

fn counted(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn status_word(s: StageStatus) -> &'static str {
    match s {
        StageStatus::Unobstructed => "unobstructed",
        StageStatus::Conditional => "conditional",
        StageStatus::Empty => "empty",
    }
}

fn tower_command(
    e: &GradedExtension,
    max_stage: Option<usize>,
    alg: &CoefficientAlgebra,
    out: &mut String,
) -> Result<i32, Failure> {
    let max = max_stage.unwrap_or_else(|| e.depth());
    let report = run_tower(e, max, alg).map_err(|er| Failure::Compute(er.to_string()))?;
    let _ = writeln!(out, "tower over {}, stages 1..{max}", alg.name());
    let _ = writeln!(
        out,
        "{:>5} {:>5} {:>11} {:>4} {:>4} {:>3} {:>3} {:>10}  status",
        "stage", "slice", "coordinates", "rows", "rank", "Z1", "H2", "conditions"
    );
    for s in &report.stages {
        let _ = writeln!(
            out,
            "{:>5} {:>5} {:>11} {:>4} {:>4} {:>3} {:>3} {:>10}  {}",
            s.stage,
            s.slice_dim,
            s.coordinates,
            s.constraint_rows,
            s.rank,
            s.torsor_dim,
            s.h2_dim,
            s.conditions,
            status_word(s.status)
        );
    }
    if let TowerStatus::Empty { from_stage } = report.status {
        if alg.dim() == 1 {
            if let Some(sigma) = zero_parameter_section(e, from_stage - 1) {
                let ob = obstruction(e, &sigma, from_stage)
                    .map_err(|er| Failure::Compute(er.to_string()))?;
                let coords: Vec<String> = ob.coordinates.iter().map(format_rational).collect();
                let _ = writeln!(
                    out,
                    "obstruction at stage {from_stage} (lower parameters 0): class [{}] in basis {{{}}}",
                    coords.join(", "),
                    ob.class_basis_text.join(", ")
                );
                let _ = writeln!(out, "  bracket defect: {}", ob.defect_text);
            }
        }
    }
    print_points(&report, out);
    let _ = writeln!(out, "result: {}", tower_result(&report));
    Ok(0)
}

/// The stage-`stage` section with every free parameter set to zero, when
/// the tower through that stage has no residual conditions.
fn zero_parameter_section(e: &GradedExtension, stage: usize) -> Option<Section> {
    if stage == 0 {
        return Some(Section::canonical(e));
    }
    let report = run_tower(e, stage, &CoefficientAlgebra::rationals()).ok()?;
    if report.status != TowerStatus::Parametrized {
        return None;
    }
    let par = report.parametrization?;
    let values: Vec<Rational> = par
        .point(&zero_vec(par.free_parameters().len()))
        .iter()
        .map(|a| a.coords()[0].clone())
        .collect();
    Some(
        section_variety(e)
            .ok()?
            .section_at(e, &values)
            .truncate(e, stage),
    )
}

fn print_section(e: &GradedExtension, s: &Section, out: &mut String) {
    let l = e.total();
    for (c, &a) in e.g_indices().iter().enumerate() {
        let _ = writeln!(
            out,
            "  {} ↦ {}",
            l.name(a),
            format_vector(&|i| l.name(i).to_string(), &s.image(c))
        );
    }
}

fn normalize_command(built: &Built, out: &mut String) -> Result<i32, Failure> {
    let e = &built.extension;
    let s = built
        .section
        .as_ref()
        .ok_or_else(|| Failure::Input("the document declares no section".into()))?;
    let _ = writeln!(out, "input section:");
    print_section(e, s, out);
    let _ = writeln!(
        out,
        "graded: {}",
        if s.is_section(e) && s.is_graded(e) {
            "yes"
        } else {
            "no"
        }
    );
    let (u, normal) = normalize_section(e, s).map_err(|er| Failure::Compute(er.to_string()))?;
    let l = e.total();
    let _ = writeln!(
        out,
        "conjugating element u = {}",
        format_vector(&|i| l.name(i).to_string(), &u)
    );
    let _ = writeln!(out, "normalized section:");
    print_section(e, &normal, out);
    let _ = writeln!(out, "result: normalized");
    Ok(0)
}
