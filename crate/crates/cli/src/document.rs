//! JSON input documents: one graded extension per file, rationals written
//! as strings, basis order significant.

use std::collections::{BTreeMap, BTreeSet};

use nabcoh::cohomology::EquivariantAction;
use nabcoh::exactla::{parse_rational, Matrix, Rational};
use nabcoh::graded::{FiniteGroupAction, GradedVectorSpace};
use nabcoh::lie::{GradedLieAlgebra, LieModule, Terms};
use nabcoh::nabtower::{GradedExtension, Section};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    #[default]
    Quotient,
    Kernel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDecl {
    pub name: String,
    pub weight: i64,
    #[serde(default)]
    pub part: Part,
}

/// `(element, coefficient)` pairs.
pub type Combination = Vec<(String, String)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketDecl {
    pub left: String,
    pub right: String,
    pub value: Combination,
}

/// Row `i`, column `j`: coefficient of basis element `i` in the image of
/// basis element `j`.
pub type MatrixDecl = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupGenerator {
    pub order: usize,
    pub matrix: MatrixDecl,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDecl {
    pub generators: Vec<GroupGenerator>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleBasisDecl {
    pub name: String,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDecl {
    pub element: String,
    pub vector: String,
    pub value: Combination,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDecl {
    pub basis: Vec<ModuleBasisDecl>,
    #[serde(default)]
    pub action: Vec<ActionDecl>,
    /// One matrix per group generator, in generator order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Vec<MatrixDecl>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageDecl {
    pub element: String,
    pub value: Combination,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub format: u32,
    pub name: String,
    pub basis: Vec<BasisDecl>,
    pub grading_element: String,
    #[serde(default)]
    pub brackets: Vec<BracketDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<ModuleDecl>,
    /// Images of quotient elements under a section; omitted elements map
    /// to themselves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<Vec<ImageDecl>>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocumentError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}", .0.join("\n"))]
    Schema(Vec<String>),
}

/// Parses and checks references, uniqueness and rational syntax.
pub fn parse(text: &str) -> Result<InputDocument, DocumentError> {
    let doc: InputDocument = serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let errors = check(&doc);
    if errors.is_empty() {
        Ok(doc)
    } else {
        Err(DocumentError::Schema(errors))
    }
}

pub fn serialize(doc: &InputDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain data");
    s.push('\n');
    s
}

fn check_rational(errors: &mut Vec<String>, field: &str, text: &str) {
    if let Err(e) = parse_rational(text) {
        errors.push(format!("{field}: {e}"));
    }
}

fn check_combination(
    errors: &mut Vec<String>,
    field: &str,
    value: &Combination,
    names: &BTreeSet<&str>,
) {
    for (k, (n, c)) in value.iter().enumerate() {
        if !names.contains(n.as_str()) {
            errors.push(format!("{field}[{k}]: unknown element \"{n}\""));
        }
        check_rational(errors, &format!("{field}[{k}]"), c);
    }
}

fn check_matrix(errors: &mut Vec<String>, field: &str, m: &MatrixDecl, dim: usize) {
    if m.len() != dim || m.iter().any(|r| r.len() != dim) {
        errors.push(format!("{field}: expected a {dim}×{dim} matrix"));
        return;
    }
    for (i, row) in m.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            check_rational(errors, &format!("{field}[{i}][{j}]"), c);
        }
    }
}

fn unique_names<'a>(
    errors: &mut Vec<String>,
    field: &str,
    names: impl Iterator<Item = &'a str>,
) -> BTreeSet<&'a str> {
    let mut seen = BTreeSet::new();
    for (i, n) in names.enumerate() {
        if n.is_empty() {
            errors.push(format!("{field}[{i}]: empty name"));
        } else if !seen.insert(n) {
            errors.push(format!("{field}[{i}]: duplicate name \"{n}\""));
        }
    }
    seen
}

fn check(doc: &InputDocument) -> Vec<String> {
    let mut errors = Vec::new();
    if doc.format != FORMAT_VERSION {
        errors.push(format!(
            "format: unsupported version {} (expected {FORMAT_VERSION})",
            doc.format
        ));
    }
    let names = unique_names(
        &mut errors,
        "basis",
        doc.basis.iter().map(|b| b.name.as_str()),
    );
    if !names.contains(doc.grading_element.as_str()) {
        errors.push(format!(
            "grading_element: unknown element \"{}\"",
            doc.grading_element
        ));
    }
    for (i, b) in doc.brackets.iter().enumerate() {
        for (side, n) in [("left", &b.left), ("right", &b.right)] {
            if !names.contains(n.as_str()) {
                errors.push(format!("brackets[{i}].{side}: unknown element \"{n}\""));
            }
        }
        check_combination(
            &mut errors,
            &format!("brackets[{i}].value"),
            &b.value,
            &names,
        );
    }
    let ngens = doc.group.as_ref().map_or(0, |g| g.generators.len());
    if let Some(g) = &doc.group {
        for (i, gen) in g.generators.iter().enumerate() {
            if gen.order == 0 {
                errors.push(format!("group.generators[{i}].order: must be positive"));
            }
            check_matrix(
                &mut errors,
                &format!("group.generators[{i}].matrix"),
                &gen.matrix,
                doc.basis.len(),
            );
        }
    }
    if let Some(m) = &doc.module {
        let vnames = unique_names(
            &mut errors,
            "module.basis",
            m.basis.iter().map(|b| b.name.as_str()),
        );
        for (i, a) in m.action.iter().enumerate() {
            if !names.contains(a.element.as_str()) {
                errors.push(format!(
                    "module.action[{i}].element: unknown element \"{}\"",
                    a.element
                ));
            }
            if !vnames.contains(a.vector.as_str()) {
                errors.push(format!(
                    "module.action[{i}].vector: unknown module element \"{}\"",
                    a.vector
                ));
            }
            check_combination(
                &mut errors,
                &format!("module.action[{i}].value"),
                &a.value,
                &vnames,
            );
        }
        if let Some(gs) = &m.group {
            if gs.len() != ngens {
                errors.push(format!(
                    "module.group: {} matrices for {ngens} group generators",
                    gs.len()
                ));
            }
            for (i, g) in gs.iter().enumerate() {
                check_matrix(&mut errors, &format!("module.group[{i}]"), g, m.basis.len());
            }
        }
    }
    if let Some(s) = &doc.section {
        let mut seen = BTreeSet::new();
        for (i, img) in s.iter().enumerate() {
            match doc.basis.iter().find(|b| b.name == img.element) {
                None => errors.push(format!(
                    "section[{i}].element: unknown element \"{}\"",
                    img.element
                )),
                Some(b) if b.part == Part::Kernel => errors.push(format!(
                    "section[{i}].element: \"{}\" is a kernel element",
                    img.element
                )),
                Some(_) if !seen.insert(img.element.as_str()) => errors.push(format!(
                    "section[{i}].element: duplicate image for \"{}\"",
                    img.element
                )),
                Some(_) => {}
            }
            check_combination(
                &mut errors,
                &format!("section[{i}].value"),
                &img.value,
                &names,
            );
        }
    }
    errors
}

/// Mathematical objects described by a checked document.
#[derive(Clone, Debug)]
pub struct Built {
    pub extension: GradedExtension,
    pub module: Option<(LieModule, Option<EquivariantAction>)>,
    pub section: Option<Section>,
}

fn q(text: &str) -> Rational {
    parse_rational(text).expect("checked during parsing")
}

fn terms(value: &Combination, space: &GradedVectorSpace) -> Terms {
    value
        .iter()
        .map(|(n, c)| (space.index_of(n).expect("checked"), q(c)))
        .collect()
}

fn matrix(m: &MatrixDecl) -> Matrix {
    Matrix::from_rows(m.iter().map(|r| r.iter().map(|c| q(c)).collect()).collect())
        .expect("checked shape")
}

/// Brackets with the grading element that are not declared default to
/// `[h, v] = weight(v)·v`.
pub fn build(doc: &InputDocument) -> Result<Built, String> {
    let space = GradedVectorSpace::new(doc.basis.iter().map(|b| (b.name.clone(), b.weight)))
        .map_err(|e| e.to_string())?;
    let h = space.index_of(&doc.grading_element).expect("checked");
    let mut declared: BTreeMap<(usize, usize), Terms> = BTreeMap::new();
    for b in &doc.brackets {
        let (a, c) = (
            space.index_of(&b.left).expect("checked"),
            space.index_of(&b.right).expect("checked"),
        );
        declared.insert((a, c), terms(&b.value, &space));
    }
    for v in 0..space.dim() {
        if v != h && !declared.contains_key(&(h, v)) && !declared.contains_key(&(v, h)) {
            declared.insert(
                (h, v),
                vec![(v, Rational::from_integer(space.weight(v).into()))],
            );
        }
    }
    let entries = declared.into_iter().map(|((a, b), t)| (a, b, t)).collect();
    let algebra = GradedLieAlgebra::from_brackets(space.clone(), entries, Some(h));
    let kernel = doc.basis.iter().map(|b| b.part == Part::Kernel).collect();
    let group = match &doc.group {
        None => None,
        Some(g) => Some(
            FiniteGroupAction::from_generators(
                space.dim(),
                g.generators
                    .iter()
                    .map(|gen| (matrix(&gen.matrix), gen.order))
                    .collect(),
            )
            .map_err(|e| format!("group: {e}"))?,
        ),
    };
    let extension =
        GradedExtension::new(algebra.clone(), kernel, group).map_err(|e| e.to_string())?;

    let module = match &doc.module {
        None => None,
        Some(m) => {
            let vspace = GradedVectorSpace::new(m.basis.iter().map(|b| (b.name.clone(), b.weight)))
                .map_err(|e| e.to_string())?;
            let mut declared: BTreeMap<(usize, usize), Terms> = BTreeMap::new();
            for a in &m.action {
                let key = (
                    space.index_of(&a.element).expect("checked"),
                    vspace.index_of(&a.vector).expect("checked"),
                );
                declared.insert(key, terms(&a.value, &vspace));
            }
            for v in 0..vspace.dim() {
                declared
                    .entry((h, v))
                    .or_insert_with(|| vec![(v, Rational::from_integer(vspace.weight(v).into()))]);
            }
            let entries = declared.into_iter().map(|((a, v), t)| (a, v, t)).collect();
            let module = LieModule::from_action(algebra.clone(), vspace, entries);
            let action = match (&doc.group, &m.group) {
                (Some(g), Some(mg)) => Some(
                    EquivariantAction::new(
                        space.dim(),
                        module.dim(),
                        g.generators
                            .iter()
                            .zip(mg)
                            .map(|(gen, mm)| (matrix(&gen.matrix), matrix(mm), gen.order))
                            .collect(),
                    )
                    .map_err(|e| format!("module.group: {e}"))?,
                ),
                (Some(g), None) => Some(
                    EquivariantAction::new(
                        space.dim(),
                        module.dim(),
                        g.generators
                            .iter()
                            .map(|gen| {
                                (
                                    matrix(&gen.matrix),
                                    Matrix::identity(module.dim()),
                                    gen.order,
                                )
                            })
                            .collect(),
                    )
                    .map_err(|e| format!("module.group: {e}"))?,
                ),
                _ => None,
            };
            Some((module, action))
        }
    };

    let section = doc.section.as_ref().map(|images| {
        let g = extension.g_indices();
        let n = space.dim();
        let mut map = Section::canonical(&extension).map().clone();
        for img in images {
            let a = space.index_of(&img.element).expect("checked");
            let c = g.iter().position(|&i| i == a).expect("quotient element");
            let mut col = vec![Rational::from_integer(0.into()); n];
            for (k, x) in terms(&img.value, &space) {
                col[k] += x;
            }
            map.set_column(c, &col);
        }
        Section::from_map(map)
    });
    Ok(Built {
        extension,
        module,
        section,
    })
}
