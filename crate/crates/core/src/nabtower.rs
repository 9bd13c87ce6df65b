//! Graded extensions `0 → n → ĝ → g → 0`, the variety of graded Lie
//! sections, the stage-by-stage obstruction/torsor tower, section
//! conjugation and normalization, and evaluation over coefficient algebras.
//!
//! Stage `N` works in `Q_N = ĝ / W_{-N-1} n`; its central slice `z` is the
//! part of `n` of weight `-N`. A stage-`N` section is a graded Lie section
//! of `Q_N → g`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::cohomology::{
    ce_differential, cohomology, describe_cochain, is_coboundary, Cochain, CochainComplex,
    CohomologyError, EquivariantAction,
};
use crate::exactla::{
    coordinates_in, is_zero_vec, kernel_image, solve_affine, unit_vec, zero_vec, AlgebraElement,
    CoefficientAlgebra, ExactError, Matrix, Rational,
};
use crate::graded::{FiniteGroupAction, GradedError};
use crate::lie::{
    exp_ad, free_lie_basis, validate_lie, FreeLieTruncation, GradedLieAlgebra, LieError, LieModule,
};
use crate::poly::Poly;
use crate::validation::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("extension failed validation: {0}")]
    Invalid(String),
    #[error("kernel mask has {found} entries, algebra has dimension {expected}")]
    MaskLength { expected: usize, found: usize },
    #[error("stage {stage} exceeds the kernel depth {depth}")]
    StageOutOfRange { stage: usize, depth: usize },
    #[error("not a section of the previous stage: {0}")]
    NotPreviousStageSection(String),
    #[error("not a graded section: {0}")]
    NotGradedSection(String),
    #[error("not a Lie section: {0}")]
    NotSection(String),
    #[error("element does not lie in the kernel")]
    NotInKernel,
    #[error("quotient is not the given free truncation: {0}")]
    NotFreePresentation(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

fn square_block(m: &Matrix, idx: &[usize]) -> Matrix {
    let mut out = Matrix::zeros(idx.len(), idx.len());
    for (i, &a) in idx.iter().enumerate() {
        for (j, &b) in idx.iter().enumerate() {
            out.set(i, j, m.get(a, b).clone());
        }
    }
    out
}

/// Extension data: the total algebra, which basis elements span the kernel,
/// and a finite group acting on the total algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedExtension {
    total: GradedLieAlgebra,
    kernel: Vec<bool>,
    group: FiniteGroupAction,
}

impl GradedExtension {
    /// Only shapes are checked; see [`validate_extension`].
    pub fn new(
        total: GradedLieAlgebra,
        kernel: Vec<bool>,
        group: Option<FiniteGroupAction>,
    ) -> Result<Self, TowerError> {
        if kernel.len() != total.dim() {
            return Err(TowerError::MaskLength {
                expected: total.dim(),
                found: kernel.len(),
            });
        }
        let group = group.unwrap_or_else(|| FiniteGroupAction::trivial(total.dim()));
        if group.dim() != total.dim() {
            return Err(ExactError::Dimension(
                "group acts on a space of the wrong dimension".into(),
            )
            .into());
        }
        Ok(GradedExtension {
            total,
            kernel,
            group,
        })
    }

    pub fn total(&self) -> &GradedLieAlgebra {
        &self.total
    }

    pub fn kernel_mask(&self) -> &[bool] {
        &self.kernel
    }

    pub fn group(&self) -> &FiniteGroupAction {
        &self.group
    }

    pub fn g_indices(&self) -> Vec<usize> {
        (0..self.total.dim()).filter(|&i| !self.kernel[i]).collect()
    }

    pub fn n_indices(&self) -> Vec<usize> {
        (0..self.total.dim()).filter(|&i| self.kernel[i]).collect()
    }

    /// Largest `N` with a kernel element of weight `-N`.
    pub fn depth(&self) -> usize {
        self.n_indices()
            .iter()
            .map(|&i| (-self.total.weight(i)).max(0) as usize)
            .max()
            .unwrap_or(0)
    }

    /// The quotient `g`, with bracket the canonical projection of ĝ's.
    pub fn quotient(&self) -> GradedLieAlgebra {
        self.total.subalgebra(&self.g_indices())
    }

    pub fn quotient_group(&self) -> FiniteGroupAction {
        let g = self.g_indices();
        self.group.induced(g.len(), |m| square_block(m, &g))
    }

    /// Drops the kernel elements of weight below `-stage`.
    pub fn truncated(&self, stage: usize) -> GradedExtension {
        let keep: Vec<usize> = (0..self.total.dim())
            .filter(|&i| !self.kernel[i] || self.total.weight(i) >= -(stage as i64))
            .collect();
        GradedExtension {
            total: self.total.subalgebra(&keep),
            kernel: keep.iter().map(|&i| self.kernel[i]).collect(),
            group: self.group.induced(keep.len(), |m| square_block(m, &keep)),
        }
    }

    fn ensure_valid(&self) -> Result<(), TowerError> {
        let report = validate_extension(self);
        let first = report
            .failures()
            .next()
            .map(|c| format!("{} at {}", c.name, c.witness.clone().unwrap_or_default()));
        match first {
            None => Ok(()),
            Some(msg) => Err(TowerError::Invalid(msg)),
        }
    }

    fn grading(&self) -> usize {
        self.total
            .grading_element()
            .expect("validated extensions carry a grading element")
    }

    /// The module `z` over `g` at the given stage, with `a·e` the
    /// `z`-component of `[a, e]`, and the matching group action.
    pub fn stage(&self, stage: usize) -> Result<TowerStage, TowerError> {
        let depth = self.depth();
        if stage == 0 || stage > depth {
            return Err(TowerError::StageOutOfRange { stage, depth });
        }
        let g_idx = self.g_indices();
        let z_idx: Vec<usize> = self
            .n_indices()
            .into_iter()
            .filter(|&i| self.total.weight(i) == -(stage as i64))
            .collect();
        let g = self.quotient();
        let zspace = self.total.space().subspace(&z_idx);
        let mut entries = Vec::new();
        for (a, &ta) in g_idx.iter().enumerate() {
            for (e, &te) in z_idx.iter().enumerate() {
                let t = self
                    .total
                    .bracket_terms(ta, te)
                    .iter()
                    .filter_map(|(k, c)| z_idx.iter().position(|x| x == k).map(|p| (p, c.clone())))
                    .collect();
                entries.push((a, e, t));
            }
        }
        let module = LieModule::from_action(g, zspace, entries);
        let action = if self.group.is_trivial() {
            None
        } else {
            let gens = self
                .group
                .generators()
                .iter()
                .zip(self.group.orders())
                .map(|(m, &o)| (square_block(m, &g_idx), square_block(m, &z_idx), o))
                .collect();
            Some(EquivariantAction::new(g_idx.len(), z_idx.len(), gens)?)
        };
        let complex = CochainComplex::new(module, action)?;
        Ok(TowerStage {
            stage,
            z: z_idx,
            complex,
        })
    }
}

/// One step of the tower: the central slice and its cochain complex.
#[derive(Clone, Debug)]
pub struct TowerStage {
    pub stage: usize,
    /// Total-algebra indices of the slice `z`.
    pub z: Vec<usize>,
    pub complex: CochainComplex,
}

/// Checks the conditions under which the tower machinery applies and
/// reports the first witness of each failure.
pub fn validate_extension(e: &GradedExtension) -> ValidationReport {
    let l = &e.total;
    let mut report = validate_lie(l);
    let n = l.dim();

    let h = l.grading_element();
    report.record(
        "grading element present",
        h.is_none().then(|| "none declared".to_string()),
    );
    if let Some(h) = h {
        report.record(
            "grading element outside kernel",
            e.kernel[h].then(|| format!("{} is marked as kernel", l.name(h))),
        );
    }
    report.record(
        "kernel weights negative",
        e.n_indices()
            .into_iter()
            .find(|&i| l.weight(i) >= 0)
            .map(|i| format!("{} has weight {}", l.name(i), l.weight(i))),
    );
    report.record(
        "quotient weights negative",
        e.g_indices()
            .into_iter()
            .find(|&i| Some(i) != h && l.weight(i) >= 0)
            .map(|i| format!("{} has weight {}", l.name(i), l.weight(i))),
    );

    let mut witness = None;
    'ideal: for a in 0..n {
        for b in e.n_indices() {
            if l.bracket_terms(a, b).iter().any(|(k, _)| !e.kernel[*k]) {
                witness = Some(format!("({}, {})", l.name(a), l.name(b)));
                break 'ideal;
            }
        }
    }
    report.record("kernel is an ideal", witness);

    let q = validate_lie(&e.quotient());
    let qw = q
        .failures()
        .next()
        .map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()));
    report.record("quotient bracket", qw);

    let mut kernel_w = None;
    let mut fix_w = None;
    let mut weight_w = None;
    let mut auto_w = None;
    for (gi, m) in e.group.generators().iter().enumerate() {
        for j in 0..n {
            for i in 0..n {
                if m.get(i, j).is_zero() {
                    continue;
                }
                if kernel_w.is_none() && e.kernel[i] != e.kernel[j] {
                    kernel_w = Some(format!("generator {gi} on {}", l.name(j)));
                }
                if weight_w.is_none() && l.weight(i) != l.weight(j) {
                    weight_w = Some(format!("generator {gi} on {}", l.name(j)));
                }
            }
        }
        if let Some(h) = h {
            if fix_w.is_none() && m.column(h) != unit_vec(n, h) {
                fix_w = Some(format!("generator {gi}"));
            }
        }
        if auto_w.is_none() {
            let cols = m.columns();
            'auto: for a in 0..n {
                for b in a + 1..n {
                    let lhs = m.mul_vec(&l.bracket(&unit_vec(n, a), &unit_vec(n, b)));
                    if lhs != l.bracket(&cols[a], &cols[b]) {
                        auto_w = Some(format!("generator {gi} at ({}, {})", l.name(a), l.name(b)));
                        break 'auto;
                    }
                }
            }
        }
    }
    report.record("group preserves kernel", kernel_w);
    report.record("group preserves weights", weight_w);
    report.record("group fixes grading element", fix_w);
    report.record("group acts by automorphisms", auto_w);
    report
}

/// A linear section `s: g → ĝ`, stored as its matrix in total coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    map: Matrix,
}

impl Section {
    pub fn from_map(map: Matrix) -> Self {
        Section { map }
    }

    /// The splitting given by the basis partition.
    pub fn canonical(e: &GradedExtension) -> Self {
        let g = e.g_indices();
        let n = e.total.dim();
        Section {
            map: Matrix::from_columns(n, &g.iter().map(|&i| unit_vec(n, i)).collect::<Vec<_>>())
                .expect("lengths"),
        }
    }

    /// Canonical splitting plus a defect `g → n` (rows indexed by kernel
    /// elements in basis order).
    pub fn from_defect(e: &GradedExtension, defect: &Matrix) -> Self {
        let mut s = Self::canonical(e);
        for (r, &k) in e.n_indices().iter().enumerate() {
            for c in 0..defect.cols() {
                if !defect.get(r, c).is_zero() {
                    s.map.add_to(k, c, defect.get(r, c));
                }
            }
        }
        s
    }

    pub fn map(&self) -> &Matrix {
        &self.map
    }

    pub fn defect(&self, e: &GradedExtension) -> Matrix {
        let rows = e
            .n_indices()
            .iter()
            .map(|&k| self.map.row(k).to_vec())
            .collect::<Vec<_>>();
        if rows.is_empty() {
            Matrix::zeros(0, self.map.cols())
        } else {
            Matrix::from_rows(rows).expect("uniform rows")
        }
    }

    pub fn image(&self, a: usize) -> Vec<Rational> {
        self.map.column(a)
    }

    /// `π ∘ s = id`.
    pub fn is_section(&self, e: &GradedExtension) -> bool {
        let g = e.g_indices();
        self.map.rows() == e.total.dim()
            && self.map.cols() == g.len()
            && g.iter().enumerate().all(|(r, &k)| {
                self.map.row(k).iter().enumerate().all(|(c, x)| {
                    if c == r {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    /// Weight-preserving and fixing the grading element.
    pub fn is_graded(&self, e: &GradedExtension) -> bool {
        let g = e.g_indices();
        let l = &e.total;
        (0..g.len()).all(|c| {
            (0..l.dim()).all(|r| self.map.get(r, c).is_zero() || l.weight(r) == l.weight(g[c]))
        })
    }

    /// `s(W_m) ⊆ W_m`: no component of weight above its argument's.
    pub fn is_filtered(&self, e: &GradedExtension) -> bool {
        let g = e.g_indices();
        let l = &e.total;
        (0..g.len()).all(|c| {
            (0..l.dim()).all(|r| self.map.get(r, c).is_zero() || l.weight(r) <= l.weight(g[c]))
        })
    }

    /// Nonzero values of `s([a,b]) − [s(a), s(b)]` restricted to total
    /// basis elements of weight at least `min_weight`.
    pub fn homomorphism_defects(
        &self,
        e: &GradedExtension,
        min_weight: i64,
    ) -> Vec<(usize, usize, Vec<Rational>)> {
        let g = e.quotient();
        let l = &e.total;
        let mut out = Vec::new();
        for a in 0..g.dim() {
            for b in a + 1..g.dim() {
                let ab = g.bracket(&unit_vec(g.dim(), a), &unit_vec(g.dim(), b));
                let mut d = self.map.mul_vec(&ab);
                let br = l.bracket(&self.image(a), &self.image(b));
                for (x, y) in d.iter_mut().zip(br) {
                    *x -= y;
                }
                for (k, x) in d.iter_mut().enumerate() {
                    if l.weight(k) < min_weight {
                        *x = Rational::zero();
                    }
                }
                if !is_zero_vec(&d) {
                    out.push((a, b, d));
                }
            }
        }
        out
    }

    pub fn is_homomorphism(&self, e: &GradedExtension) -> bool {
        self.homomorphism_defects(e, i64::MIN).is_empty()
    }

    /// Zeroes every component in kernel elements of weight below `-stage`.
    pub fn truncate(&self, e: &GradedExtension, stage: usize) -> Section {
        let mut map = self.map.clone();
        for k in e.n_indices() {
            if e.total.weight(k) < -(stage as i64) {
                for c in 0..map.cols() {
                    map.set(k, c, Rational::zero());
                }
            }
        }
        Section { map }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub name: String,
    /// Weight of the graded pieces the map connects.
    pub weight: i64,
    /// Defect map `g → n`, rows indexed by kernel elements.
    pub map: Matrix,
}

/// One entry of `s([a,b]) − [s(a), s(b)]`, as a polynomial in the
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub left: usize,
    pub right: usize,
    /// Position among the kernel elements.
    pub target: usize,
    pub weight: i64,
    pub poly: Poly,
}

/// Coordinates (a basis of invariant weight-preserving maps `g → n`) and
/// the polynomial conditions for the section to be a Lie homomorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionVariety {
    pub coordinates: Vec<Coordinate>,
    /// Nonzero constraints only.
    pub constraints: Vec<Constraint>,
    /// Number of `(pair, kernel element)` entries examined.
    pub rows: usize,
}

impl SectionVariety {
    pub fn coordinate_names(&self) -> Vec<String> {
        self.coordinates.iter().map(|c| c.name.clone()).collect()
    }

    pub fn stage_coordinates(&self, stage: usize) -> Vec<usize> {
        (0..self.coordinates.len())
            .filter(|&i| self.coordinates[i].weight == -(stage as i64))
            .collect()
    }

    pub fn defect_at(&self, e: &GradedExtension, values: &[Rational]) -> Matrix {
        let mut d = Matrix::zeros(e.n_indices().len(), e.g_indices().len());
        for (c, v) in self.coordinates.iter().zip(values) {
            if !v.is_zero() {
                d = d.add(&c.map.scale(v));
            }
        }
        d
    }

    pub fn section_at(&self, e: &GradedExtension, values: &[Rational]) -> Section {
        Section::from_defect(e, &self.defect_at(e, values))
    }

    /// Coordinates of a graded section, or `None` when its defect is not in
    /// the coordinate span.
    pub fn coordinates_of(&self, e: &GradedExtension, s: &Section) -> Option<Vec<Rational>> {
        let flat = |m: &Matrix| -> Vec<Rational> {
            (0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect()
        };
        let target = flat(&s.defect(e));
        let basis: Vec<Vec<Rational>> = self.coordinates.iter().map(|c| flat(&c.map)).collect();
        if basis.is_empty() {
            return is_zero_vec(&target).then(Vec::new);
        }
        coordinates_in(target.len(), &basis, &target)
    }

    /// Substitutes a point over `A` into every constraint using the
    /// algebra's multiplication.
    pub fn check_point(&self, point: &[AlgebraElement]) -> Result<bool, ExactError> {
        if point.len() != self.coordinates.len() {
            return Err(ExactError::Dimension(
                "point has the wrong number of coordinates".into(),
            ));
        }
        let Some(first) = point.first() else {
            return Ok(self.constraints.is_empty());
        };
        let alg = Arc::clone(first.algebra());
        for c in &self.constraints {
            let mut acc = AlgebraElement::zero(&alg);
            for (m, q) in c.poly.terms() {
                let mut t = AlgebraElement::from_rational(&alg, q);
                for &(v, e) in m {
                    for _ in 0..e {
                        t = crate::exactla::algebra_mul(&t, &point[v])?;
                    }
                }
                acc = acc.add(&t)?;
            }
            if !acc.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn describe_constraint(&self, e: &GradedExtension, c: &Constraint) -> String {
        let g = e.g_indices();
        let n = e.n_indices();
        let l = &e.total;
        let names = self.coordinate_names();
        format!(
            "[{}, {}] @ {}: {} = 0",
            l.name(g[c.left]),
            l.name(g[c.right]),
            l.name(n[c.target]),
            c.poly.format_with(&|i| names[i].clone())
        )
    }
}

/// Invariant weight-preserving maps `g → n` in each weight, then the
/// constraint polynomials of `s([a,b]) = [s(a), s(b)]`.
pub fn section_variety(e: &GradedExtension) -> Result<SectionVariety, TowerError> {
    e.ensure_valid()?;
    let l = &e.total;
    let g_idx = e.g_indices();
    let n_idx = e.n_indices();
    let mut weights: Vec<i64> = n_idx.iter().map(|&k| l.weight(k)).collect();
    weights.sort_unstable_by(|a, b| b.cmp(a));
    weights.dedup();

    let g_inv: Vec<Matrix> = e
        .group
        .generators()
        .iter()
        .map(|m| {
            square_block(m, &g_idx)
                .inverse()
                .expect("group elements are invertible")
        })
        .collect();
    let n_blocks: Vec<Matrix> = e
        .group
        .generators()
        .iter()
        .map(|m| square_block(m, &n_idx))
        .collect();

    let mut coordinates = Vec::new();
    for w in weights {
        let entries: Vec<(usize, usize)> = n_idx
            .iter()
            .enumerate()
            .filter(|(_, &k)| l.weight(k) == w)
            .flat_map(|(r, _)| {
                g_idx
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| l.weight(a) == w)
                    .map(move |(c, _)| (r, c))
            })
            .collect();
        let k = entries.len();
        let basis = if e.group.is_trivial() || k == 0 {
            (0..k).map(|i| unit_vec(k, i)).collect::<Vec<_>>()
        } else {
            let id = Matrix::identity(k);
            let blocks: Vec<Matrix> = n_blocks
                .iter()
                .zip(&g_inv)
                .map(|(gn, ginv)| {
                    let mut m = Matrix::zeros(k, k);
                    for (col, &(r, c)) in entries.iter().enumerate() {
                        for (row, &(r2, c2)) in entries.iter().enumerate() {
                            let v = gn.get(r2, r) * ginv.get(c, c2);
                            if !v.is_zero() {
                                m.set(row, col, v);
                            }
                        }
                    }
                    m.sub(&id)
                })
                .collect();
            kernel_image(&Matrix::vstack(&blocks, k)).kernel
        };
        for v in basis {
            let mut map = Matrix::zeros(n_idx.len(), g_idx.len());
            for (x, &(r, c)) in v.iter().zip(&entries) {
                map.set(r, c, x.clone());
            }
            coordinates.push(Coordinate {
                name: format!("c{}", coordinates.len() + 1),
                weight: w,
                map,
            });
        }
    }

    // images D_i(a) as total vectors
    let dim = l.dim();
    let images: Vec<Vec<Vec<Rational>>> = coordinates
        .iter()
        .map(|c| {
            (0..g_idx.len())
                .map(|a| {
                    let mut v = zero_vec(dim);
                    for (r, &k) in n_idx.iter().enumerate() {
                        v[k] = c.map.get(r, a).clone();
                    }
                    v
                })
                .collect()
        })
        .collect();
    let g = e.quotient();
    let mut constraints = Vec::new();
    let mut rows = 0;
    for a in 0..g_idx.len() {
        for b in a + 1..g_idx.len() {
            let wab = l.weight(g_idx[a]) + l.weight(g_idx[b]);
            let targets: Vec<usize> = (0..n_idx.len())
                .filter(|&r| l.weight(n_idx[r]) == wab)
                .collect();
            if targets.is_empty() {
                continue;
            }
            rows += targets.len();
            let beta = g.bracket(&unit_vec(g.dim(), a), &unit_vec(g.dim(), b));
            let full = l.bracket(&unit_vec(dim, g_idx[a]), &unit_vec(dim, g_idx[b]));
            let mut polys: Vec<Poly> = targets
                .iter()
                .map(|&r| Poly::constant(-full[n_idx[r]].clone()))
                .collect();
            for (i, c) in coordinates.iter().enumerate() {
                let d_beta = c.map.mul_vec(&beta);
                let da_b = l.bracket(&images[i][a], &unit_vec(dim, g_idx[b]));
                let a_db = l.bracket(&unit_vec(dim, g_idx[a]), &images[i][b]);
                for (p, &r) in polys.iter_mut().zip(&targets) {
                    let k = n_idx[r];
                    let coef = &d_beta[r] - &da_b[k] - &a_db[k];
                    p.add_term(vec![(i, 1)], &coef);
                }
                for j in 0..coordinates.len() {
                    let q = l.bracket(&images[i][a], &images[j][b]);
                    for (p, &r) in polys.iter_mut().zip(&targets) {
                        let coef = -q[n_idx[r]].clone();
                        let mono = if i == j {
                            vec![(i, 2)]
                        } else {
                            vec![(i.min(j), 1), (i.max(j), 1)]
                        };
                        p.add_term(mono, &coef);
                    }
                }
            }
            for (p, &r) in polys.into_iter().zip(&targets) {
                if !p.is_zero() {
                    constraints.push(Constraint {
                        left: a,
                        right: b,
                        target: r,
                        weight: wab,
                        poly: p,
                    });
                }
            }
        }
    }
    Ok(SectionVariety {
        coordinates,
        constraints,
        rows,
    })
}

fn stage_section_check(
    e: &GradedExtension,
    sigma: &Section,
    stage: usize,
) -> Result<(), TowerError> {
    if !sigma.is_section(e) || !sigma.is_graded(e) {
        return Err(TowerError::NotGradedSection(
            "not a weight-preserving section".into(),
        ));
    }
    let prev = -(stage as i64) + 1;
    if let Some((a, b, _)) = sigma.homomorphism_defects(e, prev).first() {
        let g = e.g_indices();
        return Err(TowerError::NotPreviousStageSection(format!(
            "bracket condition fails on ({}, {})",
            e.total.name(g[*a]),
            e.total.name(g[*b])
        )));
    }
    Ok(())
}

/// `h_σ(a,b) = [σ̃a, σ̃b] − σ̃[a,b]` projected to the slice, where `σ̃` is
/// `σ` followed by the canonical splitting, optionally perturbed by a
/// weight-preserving map `g → z` (rows indexed by the slice).
pub fn bracket_defect(
    e: &GradedExtension,
    sigma: &Section,
    stage: usize,
    perturbation: Option<&Matrix>,
) -> Result<(TowerStage, Cochain), TowerError> {
    e.ensure_valid()?;
    let st = e.stage(stage)?;
    stage_section_check(e, sigma, stage)?;
    let mut tilde = sigma.truncate(e, stage - 1);
    if let Some(p) = perturbation {
        for (r, &k) in st.z.iter().enumerate() {
            for c in 0..p.cols() {
                tilde.map.add_to(k, c, p.get(r, c));
            }
        }
    }
    let g = e.quotient();
    let l = &e.total;
    let slice = st.complex.slice(2, 0);
    let mut values = zero_vec(slice.dim());
    for (i, &(w, v)) in slice.coords.iter().enumerate() {
        let idx = &slice.wedges[w].indices;
        let (a, b) = (idx[0], idx[1]);
        let br = l.bracket(&tilde.image(a), &tilde.image(b));
        let s_ab = tilde
            .map
            .mul_vec(&g.bracket(&unit_vec(g.dim(), a), &unit_vec(g.dim(), b)));
        values[i] = &br[st.z[v]] - &s_ab[st.z[v]];
    }
    let h = Cochain {
        degree: 2,
        weight: 0,
        values,
    };
    if !ce_differential(&st.complex, &h).is_zero() {
        return Err(CohomologyError::NotCocycle.into());
    }
    Ok((st, h))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionClass {
    pub stage: usize,
    pub defect: Cochain,
    pub defect_text: String,
    pub zero: bool,
    /// Coordinates against `class_basis`.
    pub coordinates: Vec<Rational>,
    pub class_basis: Vec<Cochain>,
    pub class_basis_text: Vec<String>,
}

fn class_of(st: &TowerStage, h: &Cochain) -> Result<ObstructionClass, TowerError> {
    let h2 = cohomology(&st.complex, 2, 0, true);
    let slice = st.complex.slice(2, 0);
    let n = slice.dim();
    let mut cols: Vec<Vec<Rational>> = h2
        .representatives
        .iter()
        .map(|c| c.values.clone())
        .collect();
    cols.extend(h2.coboundary_basis.iter().cloned());
    let coordinates = if cols.is_empty() {
        Vec::new()
    } else {
        let m = Matrix::from_columns(n, &cols)?;
        let sol = solve_affine(&m, &h.values)?.ok_or_else(|| {
            TowerError::Invalid("bracket defect is not an invariant cocycle".into())
        })?;
        sol.particular[..h2.representatives.len()].to_vec()
    };
    let zero = is_coboundary(&st.complex, h, true)?.is_some();
    debug_assert_eq!(zero, coordinates.iter().all(Zero::is_zero));
    Ok(ObstructionClass {
        stage: st.stage,
        defect: h.clone(),
        defect_text: describe_cochain(&st.complex, &slice, h),
        zero,
        coordinates,
        class_basis_text: h2
            .representatives
            .iter()
            .map(|c| describe_cochain(&st.complex, &slice, c))
            .collect(),
        class_basis: h2.representatives,
    })
}

/// Class of the bracket defect in `H²_(0)(g, z)^G`.
pub fn obstruction(
    e: &GradedExtension,
    sigma: &Section,
    stage: usize,
) -> Result<ObstructionClass, TowerError> {
    let (st, h) = bracket_defect(e, sigma, stage, None)?;
    class_of(&st, &h)
}

/// Same class computed after perturbing the splitting of `Q_N → Q_{N-1}`.
pub fn obstruction_with_splitting(
    e: &GradedExtension,
    sigma: &Section,
    stage: usize,
    perturbation: &Matrix,
) -> Result<ObstructionClass, TowerError> {
    let (st, h) = bracket_defect(e, sigma, stage, Some(perturbation))?;
    class_of(&st, &h)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftOutcome {
    Obstructed(ObstructionClass),
    Lifted {
        section: Section,
        /// Basis of `Z¹_(0)(g, z)^G` as defect maps `g → n`.
        torsor: Vec<Matrix>,
    },
}

fn cochain_to_defect(e: &GradedExtension, st: &TowerStage, c: &Cochain) -> Matrix {
    let n_idx = e.n_indices();
    let slice = st.complex.slice(1, 0);
    let mut m = Matrix::zeros(n_idx.len(), e.g_indices().len());
    for (i, &(w, v)) in slice.coords.iter().enumerate() {
        let a = slice.wedges[w].indices[0];
        let r = n_idx
            .iter()
            .position(|&k| k == st.z[v])
            .expect("slice lies in the kernel");
        m.set(r, a, c.values[i].clone());
    }
    m
}

/// Lifts a stage-`(N−1)` section to stage `N` when its obstruction
/// vanishes, returning one lift and the torsor basis.
pub fn lift_section(
    e: &GradedExtension,
    sigma: &Section,
    stage: usize,
) -> Result<LiftOutcome, TowerError> {
    let (st, h) = bracket_defect(e, sigma, stage, None)?;
    let Some(v) = is_coboundary(&st.complex, &h, true)? else {
        return Ok(LiftOutcome::Obstructed(class_of(&st, &h)?));
    };
    // the defect of σ̃ + f is −(h + df), so f = −v
    let f = cochain_to_defect(e, &st, &v).scale(&-Rational::one());
    let base = sigma.truncate(e, stage - 1);
    let section = Section::from_defect(e, &base.defect(e).add(&f));
    let torsor = cohomology(&st.complex, 1, 0, true)
        .cocycle_basis
        .iter()
        .map(|z| {
            cochain_to_defect(
                e,
                &st,
                &Cochain {
                    degree: 1,
                    weight: 0,
                    values: z.clone(),
                },
            )
        })
        .collect();
    Ok(LiftOutcome::Lifted { section, torsor })
}

/// Solves the stage-`N` constraints directly for the stage-`N` coordinates
/// with the lower coordinates fixed by `sigma`. Returns the affine solution
/// set in stage coordinates, or `None` when inconsistent.
pub fn solve_stage_directly(
    e: &GradedExtension,
    variety: &SectionVariety,
    sigma: &Section,
    stage: usize,
) -> Result<Option<(Vec<usize>, crate::exactla::AffineSolution)>, TowerError> {
    let lower = sigma.truncate(e, stage - 1);
    let values = variety.coordinates_of(e, &lower).ok_or_else(|| {
        TowerError::NotGradedSection("defect outside the invariant coordinate span".into())
    })?;
    let cols = variety.stage_coordinates(stage);
    let rows: Vec<&Constraint> = variety
        .constraints
        .iter()
        .filter(|c| c.weight == -(stage as i64))
        .collect();
    let mut m = Matrix::zeros(rows.len(), cols.len());
    let mut rhs = zero_vec(rows.len());
    for (r, c) in rows.iter().enumerate() {
        let mut rest = c.poly.clone();
        for (j, &i) in cols.iter().enumerate() {
            let a = c.poly.linear_coefficient(i);
            m.set(r, j, a.clone());
            rest.add_term(vec![(i, 1)], &-a);
        }
        rhs[r] = -rest.evaluate(&values);
    }
    Ok(solve_affine(&m, &rhs)?.map(|s| (cols, s)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageStatus {
    Unobstructed,
    /// Lifting imposes nonlinear conditions on earlier parameters.
    Conditional,
    Empty,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StageReport {
    pub stage: usize,
    pub slice_dim: usize,
    pub coordinates: usize,
    pub constraint_rows: usize,
    pub rank: usize,
    pub torsor_dim: usize,
    pub h2_dim: usize,
    pub conditions: usize,
    pub cumulative_coordinates: usize,
    pub cumulative_constraints: usize,
    pub status: StageStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerStatus {
    /// Every point is described by the free parameters.
    Parametrized,
    Conditional {
        from_stage: usize,
    },
    Empty {
        from_stage: usize,
    },
}

/// Solution set over a coefficient algebra: each coordinate's value as one
/// polynomial per algebra basis element, in ℚ-parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parametrization {
    pub algebra: Arc<CoefficientAlgebra>,
    pub parameter_names: Vec<String>,
    eliminated: Vec<bool>,
    /// `values[i][r]`: component `r` of coordinate `i`.
    pub values: Vec<Vec<Poly>>,
    /// Nonlinear conditions left on the parameters.
    pub residuals: Vec<Poly>,
}

impl Parametrization {
    fn new(algebra: Arc<CoefficientAlgebra>, ncoords: usize) -> Self {
        let d = algebra.dim();
        Parametrization {
            algebra,
            parameter_names: Vec::new(),
            eliminated: Vec::new(),
            values: vec![vec![Poly::zero(); d]; ncoords],
            residuals: Vec::new(),
        }
    }

    /// Indices of parameters that were not eliminated.
    pub fn free_parameters(&self) -> Vec<usize> {
        (0..self.parameter_names.len())
            .filter(|&i| !self.eliminated[i])
            .collect()
    }

    fn new_parameter(&mut self, name: String) -> Poly {
        self.parameter_names.push(name);
        self.eliminated.push(false);
        Poly::var(self.parameter_names.len() - 1)
    }

    fn substitute(&mut self, var: usize, value: &Poly) {
        for comps in &mut self.values {
            for p in comps.iter_mut() {
                *p = p.substitute(var, value);
            }
        }
        self.eliminated[var] = true;
    }

    /// Adds conditions (polynomials that must vanish), eliminating
    /// parameters that occur only linearly. Returns `false` on an
    /// inconsistent constant condition.
    fn absorb(&mut self, new: Vec<Poly>) -> bool {
        let mut pending: Vec<Poly> = std::mem::take(&mut self.residuals);
        pending.extend(new);
        loop {
            pending.retain(|p| !p.is_zero());
            if pending.iter().any(|p| p.degree() == Some(0)) {
                self.residuals = pending;
                return false;
            }
            let pick = pending.iter().enumerate().find_map(|(k, p)| {
                p.variables()
                    .into_iter()
                    .rev()
                    .find(|&v| !p.linear_coefficient(v).is_zero() && !p.occurs_nonlinearly(v))
                    .map(|v| (k, v))
            });
            let Some((k, v)) = pick else { break };
            let p = pending.remove(k);
            let a = p.linear_coefficient(v);
            let mut rest = p.clone();
            rest.add_term(vec![(v, 1)], &-a.clone());
            let value = rest.scale(&(-a.recip()));
            self.substitute(v, &value);
            for q in pending.iter_mut() {
                *q = q.substitute(v, &value);
            }
        }
        self.residuals = pending;
        true
    }

    /// Coordinate values over the algebra at the given free-parameter
    /// values (in the order of [`Self::free_parameters`]).
    pub fn point(&self, params: &[Rational]) -> Vec<AlgebraElement> {
        let mut full = zero_vec(self.parameter_names.len());
        for (&i, x) in self.free_parameters().iter().zip(params) {
            full[i] = x.clone();
        }
        self.values
            .iter()
            .map(|comps| {
                AlgebraElement::new(
                    &self.algebra,
                    comps.iter().map(|p| p.evaluate(&full)).collect(),
                )
                .expect("component count matches the algebra")
            })
            .collect()
    }

    pub fn describe_value(&self, i: usize) -> String {
        let names = &self.parameter_names;
        let d = self.algebra.dim();
        let parts: Vec<String> = self.values[i]
            .iter()
            .zip(self.algebra.basis_names())
            .filter(|(p, _)| !p.is_zero())
            .map(|(p, b)| {
                let s = p.format_with(&|v| names[v].clone());
                let s = if s.contains(' ') && d > 1 {
                    format!("({s})")
                } else {
                    s
                };
                if d == 1 || b == "1" {
                    s
                } else if s == "1" {
                    b.clone()
                } else {
                    format!("{s}*{b}")
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Evaluates a coordinate polynomial over `A` with coordinate values given
/// as component polynomials.
fn eval_over_algebra(p: &Poly, values: &[Vec<Poly>], alg: &CoefficientAlgebra) -> Vec<Poly> {
    let d = alg.dim();
    let mul = |x: &[Poly], y: &[Poly]| -> Vec<Poly> {
        let mut out = vec![Poly::zero(); d];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let prod = xi.mul(yj);
                for (k, c) in alg.table()[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].add(&prod.scale(c));
                    }
                }
            }
        }
        out
    };
    let mut acc = vec![Poly::zero(); d];
    for (m, q) in p.terms() {
        let mut t: Vec<Poly> = alg
            .unit_coords()
            .iter()
            .map(|u| Poly::constant(u * q))
            .collect();
        for &(v, e) in m {
            for _ in 0..e {
                t = mul(&t, &values[v]);
            }
        }
        for (a, b) in acc.iter_mut().zip(t) {
            *a = a.add(&b);
        }
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerReport {
    pub stages: Vec<StageReport>,
    pub status: TowerStatus,
    pub coordinate_names: Vec<String>,
    /// Absent when the variety is empty.
    pub parametrization: Option<Parametrization>,
}

impl TowerReport {
    pub fn is_empty(&self) -> bool {
        matches!(self.status, TowerStatus::Empty { .. })
    }
}

/// Runs stages `1..=max_stage` over the coefficient algebra `A`. At stage
/// `N` the constraints of weight `-N` are affine-linear in the stage-`N`
/// coordinates with a constant matrix; that matrix is row-reduced once and
/// the reduction applied to the polynomial right-hand sides.
pub fn run_tower(
    e: &GradedExtension,
    max_stage: usize,
    algebra: &CoefficientAlgebra,
) -> Result<TowerReport, TowerError> {
    let depth = e.depth();
    if max_stage > depth {
        return Err(TowerError::StageOutOfRange {
            stage: max_stage,
            depth,
        });
    }
    let variety = section_variety(e)?;
    let alg = Arc::new(algebra.clone());
    let d = alg.dim();
    let mut par = Parametrization::new(Arc::clone(&alg), variety.coordinates.len());
    let mut stages = Vec::new();
    let mut status = TowerStatus::Parametrized;
    let mut cumulative_coordinates = 0;
    let mut cumulative_constraints = 0;
    let names = variety.coordinate_names();

    for stage in 1..=max_stage {
        let st = e.stage(stage)?;
        let cols = variety.stage_coordinates(stage);
        let rows: Vec<&Constraint> = variety
            .constraints
            .iter()
            .filter(|c| c.weight == -(stage as i64))
            .collect();
        let mut m = Matrix::zeros(rows.len(), cols.len());
        let mut rests = Vec::new();
        for (r, c) in rows.iter().enumerate() {
            let mut rest = c.poly.clone();
            for (j, &i) in cols.iter().enumerate() {
                let a = c.poly.linear_coefficient(i);
                debug_assert!(!c.poly.occurs_nonlinearly(i));
                m.set(r, j, a.clone());
                rest.add_term(vec![(i, 1)], &-a);
            }
            rests.push(eval_over_algebra(&rest, &par.values, &alg));
        }
        let ech = m.echelon();
        let rank = ech.rank();
        let free = ech.free_columns();
        // fresh parameters for free stage coordinates
        let mut fresh: BTreeMap<(usize, usize), Poly> = BTreeMap::new();
        for &f in &free {
            for r in 0..d {
                let pname = if d == 1 {
                    names[cols[f]].clone()
                } else {
                    format!("{}.{}", names[cols[f]], alg.basis_names()[r])
                };
                fresh.insert((f, r), par.new_parameter(pname));
            }
        }
        let mut conditions = Vec::new();
        for r in 0..d {
            // T·(−rest) row by row
            let tb: Vec<Poly> = (0..rows.len())
                .map(|i| {
                    let mut acc = Poly::zero();
                    for (k, rest) in rests.iter().enumerate() {
                        let t = ech.transform.get(i, k);
                        if !t.is_zero() {
                            acc = acc.sub(&rest[r].scale(t));
                        }
                    }
                    acc
                })
                .collect();
            for (row, &p) in ech.pivots.iter().enumerate() {
                let mut v = tb[row].clone();
                for &f in &free {
                    let c = ech.reduced.get(row, f);
                    if !c.is_zero() {
                        v = v.sub(&fresh[&(f, r)].scale(c));
                    }
                }
                par.values[cols[p]][r] = v;
            }
            for &f in &free {
                par.values[cols[f]][r] = fresh[&(f, r)].clone();
            }
            conditions.extend(tb[rank..].iter().filter(|p| !p.is_zero()).cloned());
        }
        let n_conditions = conditions.len();
        let consistent = par.absorb(conditions);
        let stage_status = if !consistent {
            StageStatus::Empty
        } else if !par.residuals.is_empty() {
            StageStatus::Conditional
        } else {
            StageStatus::Unobstructed
        };
        cumulative_coordinates += cols.len();
        cumulative_constraints += rows.len();
        stages.push(StageReport {
            stage,
            slice_dim: st.z.len(),
            coordinates: cols.len(),
            constraint_rows: rows.len(),
            rank,
            torsor_dim: cohomology(&st.complex, 1, 0, true).cocycle_dim,
            h2_dim: cohomology(&st.complex, 2, 0, true).dimension,
            conditions: n_conditions,
            cumulative_coordinates,
            cumulative_constraints,
            status: stage_status,
        });
        match stage_status {
            StageStatus::Empty => {
                status = TowerStatus::Empty { from_stage: stage };
                break;
            }
            StageStatus::Conditional if status == TowerStatus::Parametrized => {
                status = TowerStatus::Conditional { from_stage: stage };
            }
            _ => {}
        }
    }
    let parametrization = (!matches!(status, TowerStatus::Empty { .. })).then_some(par);
    Ok(TowerReport {
        stages,
        status,
        coordinate_names: names,
        parametrization,
    })
}

/// Full tower over `A`: the solution set of the section variety.
pub fn evaluate_points(
    e: &GradedExtension,
    algebra: &CoefficientAlgebra,
) -> Result<TowerReport, TowerError> {
    run_tower(e, e.depth(), algebra)
}

/// Substitutes the parametrization into every constraint symbolically.
/// Returns `None` when nonlinear residual conditions remain (the identity
/// then only holds on their zero set).
pub fn verify_parametrization(variety: &SectionVariety, par: &Parametrization) -> Option<bool> {
    if !par.residuals.is_empty() {
        return None;
    }
    Some(variety.constraints.iter().all(|c| {
        eval_over_algebra(&c.poly, &par.values, &par.algebra)
            .iter()
            .all(Poly::is_zero)
    }))
}

/// `exp(ad u) ∘ s` for `u` in the kernel.
pub fn conjugate_section(
    e: &GradedExtension,
    u: &[Rational],
    s: &Section,
) -> Result<Section, TowerError> {
    if u.len() != e.total.dim()
        || u.iter()
            .enumerate()
            .any(|(i, x)| !x.is_zero() && !e.kernel[i])
    {
        return Err(TowerError::NotInKernel);
    }
    if !s.is_section(e) {
        return Err(TowerError::NotSection("π ∘ s is not the identity".into()));
    }
    Ok(Section {
        map: exp_ad(&e.total, u)?.mul(&s.map),
    })
}

/// Finds `u` in the kernel with `exp(ad u) ∘ s` graded. Weight by weight,
/// the weight `-k` part of `exp(ad u)(s(h0))` changes by `k·δ` when `δ` of
/// weight `-k` is added to `u`.
pub fn normalize_section(
    e: &GradedExtension,
    s: &Section,
) -> Result<(Vec<Rational>, Section), TowerError> {
    e.ensure_valid()?;
    if !s.is_section(e) {
        return Err(TowerError::NotSection("π ∘ s is not the identity".into()));
    }
    if !s.is_filtered(e) {
        return Err(TowerError::NotSection(
            "does not preserve the weight filtration".into(),
        ));
    }
    if !s.is_homomorphism(e) {
        return Err(TowerError::NotSection(
            "not a Lie algebra homomorphism".into(),
        ));
    }
    let l = &e.total;
    let h = e.grading();
    let hq = e
        .g_indices()
        .iter()
        .position(|&i| i == h)
        .expect("grading element lies in the quotient");
    let mut u = zero_vec(l.dim());
    for k in 1..=e.depth() as i64 {
        let c = exp_ad(l, &u)?.mul_vec(&s.image(hq));
        for i in e.n_indices() {
            if l.weight(i) == -k && !c[i].is_zero() {
                u[i] -= &c[i] / Rational::from_integer(k.into());
            }
        }
    }
    let normal = conjugate_section(e, &u, s)?;
    if !normal.is_graded(e) {
        return Err(TowerError::NotSection("conjugate is not graded".into()));
    }
    Ok((u, normal))
}

/// Kernel elements commuting with the grading element. Weight-0 kernel
/// elements do not exist, so this is always trivial for valid extensions.
pub fn grading_centralizer(e: &GradedExtension) -> Vec<Vec<Rational>> {
    let l = &e.total;
    let h = e.grading();
    let n_idx = e.n_indices();
    let cols: Vec<Vec<Rational>> = n_idx
        .iter()
        .map(|&k| l.bracket(&unit_vec(l.dim(), h), &unit_vec(l.dim(), k)))
        .collect();
    if cols.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_columns(l.dim(), &cols).expect("lengths");
    kernel_image(&m)
        .kernel
        .into_iter()
        .map(|y| {
            let mut v = zero_vec(l.dim());
            for (x, &k) in y.iter().zip(&n_idx) {
                v[k] = x.clone();
            }
            v
        })
        .collect()
}

/// Builds a section from lifts of the free generators by bracketing, and
/// reports whether the relations hold: every bracket word of weight below
/// the truncation depth must map to zero in the total algebra.
pub fn section_from_generator_lifts(
    e: &GradedExtension,
    free: &FreeLieTruncation,
    lifts: &[Vec<Rational>],
) -> Result<(Section, bool), TowerError> {
    let l = &e.total;
    let g = e.quotient();
    let neg: Vec<usize> = g.negative_indices();
    let sub = g.subalgebra(&neg);
    let fa = free.algebra();
    if sub.space() != fa.space()
        || (0..fa.dim())
            .any(|a| (0..fa.dim()).any(|b| sub.bracket_terms(a, b) != fa.bracket_terms(a, b)))
    {
        return Err(TowerError::NotFreePresentation(
            "negative part differs from the free truncation".into(),
        ));
    }
    if lifts.len() != free.generators().len() {
        return Err(TowerError::NotFreePresentation(
            "one lift per generator is required".into(),
        ));
    }
    let g_idx = e.g_indices();
    for (gi, v) in lifts.iter().enumerate() {
        let target = g_idx[neg[free.generator_index(gi)]];
        let ok = v.len() == l.dim()
            && (0..l.dim()).all(|k| {
                if e.kernel[k] {
                    v[k].is_zero() || l.weight(k) == l.weight(target)
                } else if k == target {
                    v[k].is_one()
                } else {
                    v[k].is_zero()
                }
            });
        if !ok {
            return Err(TowerError::NotFreePresentation(format!(
                "lift of generator {gi} is not a graded lift"
            )));
        }
    }
    let full_depth = (0..l.dim())
        .map(|i| -l.weight(i))
        .max()
        .unwrap_or(0)
        .max(free.depth());
    let deep = free_lie_basis(free.generators(), full_depth)?;
    let phi = deep.extend_generator_map(l, lifts);
    let dw = deep.algebra();
    let relations_hold = (0..dw.dim())
        .filter(|&w| dw.weight(w) < -free.depth())
        .all(|w| is_zero_vec(&phi.column(w)));
    let mut map = Matrix::zeros(l.dim(), g_idx.len());
    for (c, &t) in g_idx.iter().enumerate() {
        let col = match neg.iter().position(|&x| x == c) {
            None => unit_vec(l.dim(), t),
            Some(p) => {
                let w = dw.space().index_of(fa.name(p)).expect("same Lyndon words");
                phi.column(w)
            }
        };
        for (r, x) in col.into_iter().enumerate() {
            map.set(r, c, x);
        }
    }
    Ok((Section { map }, relations_hold))
}
