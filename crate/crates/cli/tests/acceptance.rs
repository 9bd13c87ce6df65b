//! One line per acceptance criterion; exits nonzero when any fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use nabcoh::cohomology::{cohomology, hom_identification, CochainComplex};
use nabcoh::exactla::{
    algebra_mul, coordinates_in, rat, AlgebraElement, CoefficientAlgebra, Matrix, Rational,
};
use nabcoh::gmcheck::h1_vanishing_check;
use nabcoh::lie::{free_lie_basis, validate_module};
use nabcoh::nabtower::{
    conjugate_section, evaluate_points, grading_centralizer, lift_section, normalize_section,
    obstruction, obstruction_with_splitting, run_tower, section_variety, solve_stage_directly,
    verify_parametrization, GradedExtension, LiftOutcome, Parametrization, Section, SectionVariety,
    TowerStatus,
};
use nabcoh::poly::Poly;
use nabcoh::random::{
    random_equivariant_trivial, random_extension, random_module, random_nilpotent, seeded,
    small_rational,
};
use nabcoh_cli::document::{build, parse};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn weight_bound(complex: &CochainComplex) -> i64 {
    let l = complex.module().algebra();
    let v = complex.module().space();
    (0..l.dim()).map(|i| l.weight(i).abs()).sum::<i64>()
        + (0..v.dim()).map(|i| v.weight(i).abs()).max().unwrap_or(0)
}

fn ce_soundness() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(1);
    let mut instances = 0;
    let mut products = 0;
    for _ in 0..100 {
        let u = random_nilpotent(&mut rng, 5, 6);
        let module = random_module(&mut rng, &u, 8 - 1 - u.algebra.dim());
        if !validate_module(&module).passed() {
            return outcome(false, "generator produced an invalid module");
        }
        let complex = CochainComplex::new(module, None).unwrap();
        let b = weight_bound(&complex);
        for j in 0..=2 {
            for m in -b..=b {
                if complex.slice(j, m).dim() == 0 {
                    continue;
                }
                products += 1;
                if !complex
                    .d_matrix(j + 1, m)
                    .mul(&complex.d_matrix(j, m))
                    .is_zero()
                {
                    return outcome(false, format!("d∘d ≠ 0 at j={j} m={m}"));
                }
            }
        }
        instances += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        secs < 60.0,
        format!("{instances} modules, {products} compositions C^j→C^(j+2) for j ≤ 2, {secs:.1}s"),
    )
}

fn weight_concentration() -> Outcome {
    let mut rng = seeded(2);
    let mut slices = 0;
    for _ in 0..50 {
        let u = random_nilpotent(&mut rng, 5, 5);
        let module = random_module(&mut rng, &u, 3);
        let complex = CochainComplex::new(module, None).unwrap();
        let b = weight_bound(&complex);
        for j in 0..=3 {
            for m in (-b..=b).filter(|&m| m != 0) {
                if complex.slice(j, m).dim() == 0 {
                    continue;
                }
                slices += 1;
                let d = cohomology(&complex, j, m, false).dimension;
                if d != 0 {
                    return outcome(false, format!("H^{j}_({m}) has dimension {d}"));
                }
            }
        }
    }
    outcome(
        true,
        format!("50 instances, {slices} nonzero-weight slices all acyclic"),
    )
}

fn hom_identification_check() -> Outcome {
    let mut rng = seeded(3);
    let mut with_group = 0;
    let mut nonzero = 0;
    for _ in 0..50 {
        let u = random_nilpotent(&mut rng, 6, 4);
        let (module, action) = random_equivariant_trivial(&mut rng, &u, 3);
        with_group += usize::from(action.is_some());
        let complex = CochainComplex::new(module, action).unwrap();
        let id = hom_identification(&complex).unwrap();
        if !id.is_isomorphism() {
            return outcome(
                false,
                format!(
                    "{} vs {} (rank {})",
                    id.cohomology_dim, id.hom_dim, id.map_rank
                ),
            );
        }
        nonzero += usize::from(id.hom_dim > 0);
    }
    outcome(
        true,
        format!("50 instances ({with_group} with a group action, {nonzero} with nonzero H^1)"),
    )
}

fn flat(m: &Matrix) -> Vec<Rational> {
    (0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect()
}

#[derive(Default)]
struct TowerTally {
    stages: usize,
    obstructed: usize,
    lifted: usize,
    torsor_checked: usize,
    torsor_positive: usize,
    perturbed: usize,
    failure: Option<String>,
}

fn z_rows(e: &GradedExtension, stage: usize) -> Vec<usize> {
    e.n_indices()
        .iter()
        .enumerate()
        .filter(|(_, &k)| e.total().weight(k) == -(stage as i64))
        .map(|(r, _)| r)
        .collect()
}

fn check_torsor(
    e: &GradedExtension,
    variety: &SectionVariety,
    sigma: &Section,
    stage: usize,
    section: &Section,
    torsor: &[Matrix],
    rng: &mut impl Rng,
) -> Result<(), String> {
    let w = -(stage as i64);
    let (cols, sol) = solve_stage_directly(e, variety, sigma, stage)
        .map_err(|er| er.to_string())?
        .ok_or("direct solve inconsistent for a lifted stage")?;
    if sol.kernel.len() != torsor.len() {
        return Err(format!(
            "direct solutions of dimension {} vs Z¹ of dimension {}",
            sol.kernel.len(),
            torsor.len()
        ));
    }
    let base = section.defect(e);
    let torsor_flat: Vec<Vec<Rational>> = torsor.iter().map(flat).collect();
    // the action: translates are lifts; freeness: nonzero translates move
    for t in torsor {
        if t.is_zero() {
            return Err("zero torsor vector".into());
        }
        let moved = Section::from_defect(e, &base.add(t));
        if !moved.homomorphism_defects(e, w).is_empty() {
            return Err("translate is not a lift".into());
        }
    }
    // transitivity: every lift differs from the base by an element of Z¹
    let lower = variety
        .coordinates_of(e, &sigma.truncate(e, stage - 1))
        .ok_or("lower coordinates")?;
    for _ in 0..4 {
        let mut values = lower.clone();
        for (j, &i) in cols.iter().enumerate() {
            values[i] = sol.particular[j].clone();
        }
        for k in &sol.kernel {
            let c = small_rational(rng);
            for (j, &i) in cols.iter().enumerate() {
                values[i] += &k[j] * &c;
            }
        }
        let other = variety.section_at(e, &values);
        if !other.homomorphism_defects(e, w).is_empty() {
            return Err("direct solution is not a lift".into());
        }
        let diff = flat(&other.defect(e).sub(&base));
        let inside = if torsor.is_empty() {
            diff.iter().all(|x| *x == rat(0))
        } else {
            coordinates_in(diff.len(), &torsor_flat, &diff).is_some()
        };
        if !inside {
            return Err("two lifts differ by a non-cocycle".into());
        }
    }
    Ok(())
}

fn tower_runs() -> TowerTally {
    let mut t = TowerTally::default();
    let mut rng = seeded(4);
    let mut attempts = 0;
    while (t.stages < 60 || t.perturbed < 30 || t.torsor_positive < 10) && attempts < 3000 {
        attempts += 1;
        let group = rng.gen_bool(0.5);
        let e = random_extension(&mut rng, 6, 4, group);
        let stage = rng.gen_range(1..=e.depth());
        let Some(sigma) = common::random_stage_section(&mut rng, &e, stage - 1) else {
            continue;
        };
        let variety = section_variety(&e).unwrap();
        let ob = obstruction(&e, &sigma, stage).unwrap();
        let lift = lift_section(&e, &sigma, stage).unwrap();
        let direct = solve_stage_directly(&e, &variety, &sigma, stage).unwrap();
        t.stages += 1;
        let lifted = matches!(lift, LiftOutcome::Lifted { .. });
        if ob.zero != lifted || lifted != direct.is_some() {
            t.failure = Some(format!(
                "stage {stage}: class zero {}, lifted {lifted}, direct {}",
                ob.zero,
                direct.is_some()
            ));
            return t;
        }
        let rows = z_rows(&e, stage);
        let coords = variety.stage_coordinates(stage);
        if !coords.is_empty() && !rows.is_empty() {
            let mut pert = Matrix::zeros(rows.len(), e.g_indices().len());
            for &i in &coords {
                let c = small_rational(&mut rng);
                for (r, &row) in rows.iter().enumerate() {
                    for col in 0..pert.cols() {
                        pert.add_to(r, col, &(variety.coordinates[i].map.get(row, col) * &c));
                    }
                }
            }
            let ob2 = obstruction_with_splitting(&e, &sigma, stage, &pert).unwrap();
            if ob2.coordinates != ob.coordinates {
                t.failure = Some("obstruction changed under a different splitting".into());
                return t;
            }
            t.perturbed += 1;
        }
        match lift {
            LiftOutcome::Obstructed(_) => t.obstructed += 1,
            LiftOutcome::Lifted { section, torsor } => {
                t.lifted += 1;
                if let Err(m) =
                    check_torsor(&e, &variety, &sigma, stage, &section, &torsor, &mut rng)
                {
                    t.failure = Some(m);
                    return t;
                }
                t.torsor_checked += 1;
                t.torsor_positive += usize::from(!torsor.is_empty());
            }
        }
    }
    t
}

fn golden_fixtures(root: &Path) -> Outcome {
    let cases: &[(&str, &[&str], i32, &[&str])] = &[
        (
            "h2.tower",
            &["tower", "fixtures/h2", "--max-stage", "2"],
            0,
            &["class [1]", "result: empty from stage 2"],
        ),
        (
            "h2.sections",
            &["sections", "fixtures/h2"],
            0,
            &["result: empty from stage 2"],
        ),
        (
            "l1.sections",
            &["sections", "fixtures/l1"],
            0,
            &["1 coordinate, 0 constraints", "affine space of dimension 1"],
        ),
        (
            "u2.sections",
            &["sections", "fixtures/u2"],
            0,
            &["c1 = 1\n", "result: single point"],
        ),
        (
            "l1-z2.sections",
            &["sections", "fixtures/l1-z2"],
            0,
            &["result: single point"],
        ),
        (
            "a2.normalize",
            &["normalize", "fixtures/a2"],
            0,
            &["u = -1/2*z"],
        ),
        (
            "broken-ideal.validate",
            &["validate", "broken-ideal"],
            1,
            &["FAIL at (y, z)"],
        ),
        (
            "gm-check.d0",
            &["gm-check", "--d", "0", "--max-degree", "10"],
            0,
            &["cocycle space dimension 0"],
        ),
    ];
    for (name, args, code, needles) in cases {
        let expected =
            match std::fs::read_to_string(root.join(format!("fixtures/expected/{name}.txt"))) {
                Ok(s) => s,
                Err(e) => return outcome(false, format!("{name}: {e}")),
            };
        let mut argv = vec!["nabcoh".to_string()];
        argv.extend(args.iter().map(|s| s.to_string()));
        let got = nabcoh_cli::run(&argv);
        if got.code != *code || got.stdout != expected {
            return outcome(
                false,
                format!("{name}: report differs from the shipped expectation"),
            );
        }
        if let Some(n) = needles.iter().find(|n| !got.stdout.contains(*n)) {
            return outcome(false, format!("{name}: missing {n:?}"));
        }
    }
    outcome(
        true,
        format!("{} reports identical to fixtures/expected", cases.len()),
    )
}

fn normalization() -> Outcome {
    let mut rng = seeded(8);
    let mut pairs = 0;
    let mut extensions = 0;
    let mut attempts = 0;
    while pairs < 100 && attempts < 2000 {
        attempts += 1;
        let e = random_extension(&mut rng, 6, 4, false);
        let Some(s) = common::random_graded_section(&mut rng, &e) else {
            continue;
        };
        extensions += 1;
        if !grading_centralizer(&e).is_empty() {
            return outcome(
                false,
                "nonzero kernel element commuting with the grading element",
            );
        }
        match normalize_section(&e, &s) {
            Ok((u, same)) if u.iter().all(|x| *x == rat(0)) && same == s => {}
            _ => return outcome(false, "a graded section is moved by normalization"),
        }
        for _ in 0..3 {
            let u = common::random_kernel_element(&mut rng, &e);
            let moved = conjugate_section(&e, &u, &s).unwrap();
            let (back, normal) = normalize_section(&e, &moved).unwrap();
            let neg: Vec<Rational> = u.iter().map(|x| -x).collect();
            if normal != s || back != neg {
                return outcome(false, "normalize(conjugate(u, s)) ≠ s");
            }
            pairs += 1;
        }
    }
    outcome(
        pairs >= 100,
        format!("{pairs} pairs over {extensions} extensions; stabilizer trivial in each"),
    )
}

fn eval_poly(p: &Poly, args: &[AlgebraElement], alg: &Arc<CoefficientAlgebra>) -> AlgebraElement {
    let mut acc = AlgebraElement::zero(alg);
    for (m, c) in p.terms() {
        let mut t = AlgebraElement::from_rational(alg, c);
        for &(v, e) in m {
            for _ in 0..e {
                t = algebra_mul(&t, &args[v]).unwrap();
            }
        }
        acc = acc.add(&t).unwrap();
    }
    acc
}

/// Parameters reproducing a given point, read off from the free
/// coordinates (each free parameter is one component of one coordinate).
fn params_of(par: &Parametrization, names: &[String], point: &[AlgebraElement]) -> Vec<Rational> {
    par.free_parameters()
        .iter()
        .map(|&i| {
            let pname = &par.parameter_names[i];
            let (coord, comp) = pname.split_once('.').unwrap_or((pname.as_str(), "1"));
            let k = names.iter().position(|n| n == coord).unwrap();
            let r = par
                .algebra
                .basis_names()
                .iter()
                .position(|b| b == comp)
                .unwrap_or(0);
            point[k].coords()[r].clone()
        })
        .collect()
}

fn functor_of_points(root: &Path) -> Outcome {
    let mut rng = seeded(9);
    let dual = Arc::new(CoefficientAlgebra::dual_numbers());
    let split = Arc::new(CoefficientAlgebra::split());
    let mut cases: Vec<GradedExtension> = ["l1", "u2", "l1-z2", "a2"]
        .iter()
        .map(|f| {
            build(
                &parse(&std::fs::read_to_string(root.join(format!("fixtures/{f}.json"))).unwrap())
                    .unwrap(),
            )
            .unwrap()
            .extension
        })
        .collect();
    for _ in 0..40 {
        let group = rng.gen_bool(0.5);
        cases.push(random_extension(&mut rng, 5, 3, group));
    }
    let mut verified = 0;
    let mut cross = 0;
    for e in &cases {
        let variety = section_variety(e).unwrap();
        let names = variety.coordinate_names();
        let q = run_tower(e, e.depth(), &CoefficientAlgebra::rationals()).unwrap();
        if q.status == TowerStatus::Parametrized
            && evaluate_points(e, &split).unwrap().status != TowerStatus::Parametrized
        {
            return outcome(false, "split tower disagrees with the rational tower");
        }
        for alg in [&dual, &split] {
            let report = evaluate_points(e, alg).unwrap();
            if report.status != TowerStatus::Parametrized {
                if let (TowerStatus::Empty { .. }, TowerStatus::Parametrized) =
                    (&report.status, &q.status)
                {
                    return outcome(false, "rational points exist but none over the algebra");
                }
                continue;
            }
            let par = report.parametrization.unwrap();
            if verify_parametrization(&variety, &par) != Some(true) {
                return outcome(false, "parametrization fails substitution");
            }
            let params: Vec<Rational> = par
                .free_parameters()
                .iter()
                .map(|_| small_rational(&mut rng))
                .collect();
            if !variety.check_point(&par.point(&params)).unwrap() {
                return outcome(false, "a tower point violates the constraints");
            }
            verified += 1;
            // independent points: pairs of rational points, or a rational
            // curve evaluated at a + ε b
            let Some(qpar) = &q.parametrization else {
                continue;
            };
            let free = qpar.free_parameters();
            let a: Vec<Rational> = free.iter().map(|_| small_rational(&mut rng)).collect();
            let b: Vec<Rational> = free.iter().map(|_| small_rational(&mut rng)).collect();
            let mut full_a = vec![rat(0); qpar.parameter_names.len()];
            let mut full_b = vec![rat(0); qpar.parameter_names.len()];
            for (k, &i) in free.iter().enumerate() {
                full_a[i] = a[k].clone();
                full_b[i] = b[k].clone();
            }
            let candidate: Vec<AlgebraElement> = if alg.name() == "split" {
                let pa = qpar.point(&a);
                let pb = qpar.point(&b);
                pa.iter()
                    .zip(&pb)
                    .map(|(x, y)| {
                        AlgebraElement::new(alg, vec![x.coords()[0].clone(), y.coords()[0].clone()])
                            .unwrap()
                    })
                    .collect()
            } else {
                let args: Vec<AlgebraElement> = full_a
                    .iter()
                    .zip(&full_b)
                    .map(|(x, y)| AlgebraElement::new(alg, vec![x.clone(), y.clone()]).unwrap())
                    .collect();
                qpar.values
                    .iter()
                    .map(|comps| eval_poly(&comps[0], &args, alg))
                    .collect()
            };
            if !variety.check_point(&candidate).unwrap() {
                return outcome(false, "independent candidate fails substitution");
            }
            let recovered = par.point(&params_of(&par, &names, &candidate));
            if recovered != candidate {
                return outcome(
                    false,
                    "an independent solution is missing from the tower's solution set",
                );
            }
            cross += 1;
        }
    }
    outcome(true, format!("{} extensions; {verified} parametrizations verified, {cross} independent points recovered", cases.len()))
}

fn appendix() -> Outcome {
    let start = Instant::now();
    let mut runs = 0;
    for alg in [
        CoefficientAlgebra::rationals(),
        CoefficientAlgebra::dual_numbers(),
        CoefficientAlgebra::split(),
    ] {
        for d in -5..=5 {
            let r = h1_vanishing_check(d, 10, &alg).unwrap();
            if !r.verified || (d == 0 && r.cocycle_dim != 0) {
                return outcome(false, format!("d={d} over {}: {r:?}", alg.name()));
            }
            runs += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        secs < 10.0,
        format!("{runs} (d, A) pairs verified, d=0 cocycle space dimension 0, {secs:.2}s"),
    )
}

fn free_lie_dims() -> Outcome {
    let mut cases = 0;
    for k in 1..=3usize {
        for depth in 1..=6i64 {
            for mask in 0..(1u32 << k) {
                let weights: Vec<i64> = (0..k)
                    .map(|g| if mask >> g & 1 == 1 { -2 } else { -1 })
                    .collect();
                let gens: Vec<(String, i64)> = weights
                    .iter()
                    .enumerate()
                    .map(|(g, &w)| (format!("g{g}"), w))
                    .collect();
                let dims = free_lie_basis(&gens, depth).unwrap().dims_by_weight();
                if dims != common::brute_force_free_lie_dims(&weights, depth) {
                    return outcome(false, format!("weights {weights:?}, depth {depth}"));
                }
                cases += 1;
            }
        }
    }
    outcome(
        true,
        format!("{cases} generator/depth configurations match the bracket-expansion oracle"),
    )
}

fn report(name: &str, o: Outcome, failed: &mut usize) {
    println!(
        "criterion {name}: {} ({})",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail
    );
    *failed += usize::from(!o.passed);
}

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    std::env::set_current_dir(&root).unwrap();
    let mut failed = 0;
    report("1 CE soundness", ce_soundness(), &mut failed);
    report(
        "2 weight concentration",
        weight_concentration(),
        &mut failed,
    );
    report(
        "3 hom identification",
        hom_identification_check(),
        &mut failed,
    );
    let tower = tower_runs();
    let ok = tower.failure.is_none();
    let note = tower
        .failure
        .clone()
        .map(|f| format!("; failure: {f}"))
        .unwrap_or_default();
    report(
        "4 tower exactness",
        outcome(
            ok && tower.stages >= 50,
            format!(
                "{} stages, {} obstructed, {} lifted{note}",
                tower.stages, tower.obstructed, tower.lifted
            ),
        ),
        &mut failed,
    );
    report(
        "5 torsor structure",
        outcome(
            ok && tower.torsor_checked > 0 && tower.torsor_positive > 0,
            format!(
                "{} lifted stages checked, {} with nonzero Z¹",
                tower.torsor_checked, tower.torsor_positive
            ),
        ),
        &mut failed,
    );
    report("6 golden fixtures", golden_fixtures(&root), &mut failed);
    report(
        "7 splitting independence",
        outcome(
            ok && tower.perturbed >= 25,
            format!(
                "{} perturbed splittings, classes unchanged",
                tower.perturbed
            ),
        ),
        &mut failed,
    );
    report("8 normalization", normalization(), &mut failed);
    report("9 functor of points", functor_of_points(&root), &mut failed);
    report("10 appendix vanishing", appendix(), &mut failed);
    report("11 free Lie dimensions", free_lie_dims(), &mut failed);
    println!("acceptance: {} of 11 criteria pass", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
