//! Chevalley–Eilenberg cochains split by weight, the differential, cohomology
//! of weight slices with optional finite-group invariants, and coboundary
//! solving.
//!
//! A cochain of degree `j` and weight `m` is a linear map `Λ^j L → V` that
//! sends a wedge of weight `w` into `V_{w+m}`. Storage is dense over the
//! `(wedge, module basis)` pairs allowed by that rule.

use std::collections::HashMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{
    coordinates_in, format_rational, independent_subset, kernel_image, quotient_basis,
    solve_affine, span_rank, zero_vec, ExactError, Matrix, Rational,
};
use crate::graded::{exterior_basis, exterior_power_matrix, FiniteGroupAction, GradedError, Wedge};
use crate::lie::{lower_central_series, LieModule};
use crate::validation::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("cochain is not a cocycle")]
    NotCocycle,
    #[error("cochain has degree {found}, expected {expected}")]
    WrongDegree { expected: usize, found: usize },
    #[error("module has weight-0 basis element {0:?}")]
    WeightZeroModule(String),
    #[error("negative part of the algebra acts nontrivially on the module")]
    NontrivialNegativeAction,
    #[error("group action does not match the algebra or module dimension")]
    ActionMismatch,
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A finite group acting on both the algebra and the module, with the two
/// element lists indexed consistently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantAction {
    pub on_algebra: FiniteGroupAction,
    pub on_module: FiniteGroupAction,
}

fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.rows() + b.rows();
    let mut m = Matrix::zeros(n, n);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            m.set(i, j, a.get(i, j).clone());
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            m.set(a.rows() + i, a.cols() + j, b.get(i, j).clone());
        }
    }
    m
}

fn block(m: &Matrix, start: usize, len: usize) -> Matrix {
    let rows = (start..start + len)
        .map(|i| m.row(i)[start..start + len].to_vec())
        .collect::<Vec<_>>();
    if rows.is_empty() {
        Matrix::zeros(0, 0)
    } else {
        Matrix::from_rows(rows).expect("square block")
    }
}

impl EquivariantAction {
    pub fn trivial(algebra_dim: usize, module_dim: usize) -> Self {
        EquivariantAction {
            on_algebra: FiniteGroupAction::trivial(algebra_dim),
            on_module: FiniteGroupAction::trivial(module_dim),
        }
    }

    /// Generators given as `(on algebra, on module, order)`; the group is
    /// closed jointly so both element lists line up.
    pub fn new(
        algebra_dim: usize,
        module_dim: usize,
        generators: Vec<(Matrix, Matrix, usize)>,
    ) -> Result<Self, CohomologyError> {
        let mut joint = Vec::new();
        for (a, b, order) in generators {
            if a.rows() != algebra_dim
                || a.cols() != algebra_dim
                || b.rows() != module_dim
                || b.cols() != module_dim
            {
                return Err(CohomologyError::ActionMismatch);
            }
            joint.push((block_diag(&a, &b), order));
        }
        let total = FiniteGroupAction::from_generators(algebra_dim + module_dim, joint)?;
        Ok(EquivariantAction {
            on_algebra: total.induced(algebra_dim, |m| block(m, 0, algebra_dim)),
            on_module: total.induced(module_dim, |m| block(m, algebra_dim, module_dim)),
        })
    }

    /// Same group, module replaced (the caller supplies a module action per
    /// element, in element order).
    pub fn with_module(&self, module_dim: usize, f: impl Fn(&Matrix) -> Matrix) -> Self {
        EquivariantAction {
            on_algebra: self.on_algebra.clone(),
            on_module: self.on_algebra.induced(module_dim, f),
        }
    }

    pub fn order(&self) -> usize {
        self.on_algebra.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.on_algebra.is_trivial() && self.on_module.is_trivial()
    }
}

/// Checks that the group acts on the algebra by weight-preserving Lie
/// automorphisms and on the module compatibly with the action.
pub fn validate_equivariance(module: &LieModule, action: &EquivariantAction) -> ValidationReport {
    let l = module.algebra();
    let mut report = ValidationReport::default();
    let n = l.dim();
    let d = module.dim();
    if action.on_algebra.dim() != n || action.on_module.dim() != d {
        report.record(
            "group dimensions",
            Some("action does not match algebra/module".into()),
        );
        return report;
    }
    let mut witness = None;
    'w: for (gi, (ga, gv)) in action
        .on_algebra
        .generators()
        .iter()
        .zip(action.on_module.generators())
        .enumerate()
    {
        for j in 0..n {
            for i in 0..n {
                if !ga.get(i, j).is_zero() && l.weight(i) != l.weight(j) {
                    witness = Some(format!("generator {gi} on {}", l.name(j)));
                    break 'w;
                }
            }
        }
        for j in 0..d {
            for i in 0..d {
                if !gv.get(i, j).is_zero() && module.space().weight(i) != module.space().weight(j) {
                    witness = Some(format!("generator {gi} on {}", module.space().name(j)));
                    break 'w;
                }
            }
        }
    }
    report.record("group preserves weights", witness);

    let mut witness = None;
    'a: for (gi, ga) in action.on_algebra.generators().iter().enumerate() {
        let cols = ga.columns();
        for a in 0..n {
            for b in a + 1..n {
                let lhs = ga.mul_vec(&l.bracket(
                    &crate::exactla::unit_vec(n, a),
                    &crate::exactla::unit_vec(n, b),
                ));
                let rhs = l.bracket(&cols[a], &cols[b]);
                if lhs != rhs {
                    witness = Some(format!("generator {gi} at ({}, {})", l.name(a), l.name(b)));
                    break 'a;
                }
            }
        }
    }
    report.record("group acts by automorphisms", witness);

    let mut witness = None;
    'm: for (gi, (ga, gv)) in action
        .on_algebra
        .generators()
        .iter()
        .zip(action.on_module.generators())
        .enumerate()
    {
        let cols = ga.columns();
        for a in 0..n {
            let lhs = gv.mul(&module.action_matrix(a));
            let mut rho = Matrix::zeros(d, d);
            for (k, c) in cols[a].iter().enumerate() {
                if !c.is_zero() {
                    rho = rho.add(&module.action_matrix(k).scale(c));
                }
            }
            if lhs != rho.mul(gv) {
                witness = Some(format!("generator {gi} at {}", l.name(a)));
                break 'm;
            }
        }
    }
    report.record("group compatible with module action", witness);
    report
}

/// Coordinates of the weight-`m` slice of degree-`j` cochains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainSlice {
    pub degree: usize,
    pub weight: i64,
    /// All of `Λ^j L`, in lexicographic order.
    pub wedges: Vec<Wedge>,
    /// `(wedge index, module basis index)` for each coordinate.
    pub coords: Vec<(usize, usize)>,
    wedge_index: HashMap<Vec<usize>, usize>,
    coord_index: HashMap<(usize, usize), usize>,
}

impl CochainSlice {
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn wedge_position(&self, indices: &[usize]) -> Option<usize> {
        self.wedge_index.get(indices).copied()
    }

    pub fn coord(&self, wedge: usize, v: usize) -> Option<usize> {
        self.coord_index.get(&(wedge, v)).copied()
    }

    /// Module vector `c(e_{t_0} ∧ … )` for an arbitrary index tuple.
    pub fn evaluate(&self, c: &Cochain, tuple: &[usize], module_dim: usize) -> Vec<Rational> {
        let mut out = zero_vec(module_dim);
        let Some((sorted, sign)) = crate::graded::sort_with_sign(tuple) else {
            return out;
        };
        let Some(w) = self.wedge_position(&sorted) else {
            return out;
        };
        for v in 0..module_dim {
            if let Some(i) = self.coord(w, v) {
                out[v] = if sign < 0 {
                    -c.values[i].clone()
                } else {
                    c.values[i].clone()
                };
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cochain {
    pub degree: usize,
    pub weight: i64,
    pub values: Vec<Rational>,
}

impl Cochain {
    pub fn zero(slice: &CochainSlice) -> Self {
        Cochain {
            degree: slice.degree,
            weight: slice.weight,
            values: zero_vec(slice.dim()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, q: &Rational) -> Cochain {
        Cochain {
            degree: self.degree,
            weight: self.weight,
            values: self.values.iter().map(|x| x * q).collect(),
        }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        Cochain {
            degree: self.degree,
            weight: self.weight,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Cochain complex of a module, with an optional compatible group action.
#[derive(Clone, Debug)]
pub struct CochainComplex {
    module: LieModule,
    action: Option<EquivariantAction>,
}

impl CochainComplex {
    pub fn new(
        module: LieModule,
        action: Option<EquivariantAction>,
    ) -> Result<Self, CohomologyError> {
        if let Some(a) = &action {
            if a.on_algebra.dim() != module.algebra().dim() || a.on_module.dim() != module.dim() {
                return Err(CohomologyError::ActionMismatch);
            }
        }
        Ok(CochainComplex { module, action })
    }

    pub fn module(&self) -> &LieModule {
        &self.module
    }

    pub fn action(&self) -> Option<&EquivariantAction> {
        self.action.as_ref()
    }

    pub fn slice(&self, degree: usize, weight: i64) -> CochainSlice {
        let l = self.module.algebra();
        let v = self.module.space();
        let wedges = exterior_basis(l.space(), degree);
        let mut coords = Vec::new();
        for (wi, w) in wedges.iter().enumerate() {
            for m in v.graded_component(w.weight + weight) {
                coords.push((wi, m));
            }
        }
        let wedge_index = wedges
            .iter()
            .enumerate()
            .map(|(i, w)| (w.indices.clone(), i))
            .collect();
        let coord_index = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        CochainSlice {
            degree,
            weight,
            wedges,
            coords,
            wedge_index,
            coord_index,
        }
    }

    /// Matrix of `d: C^j_(m) → C^{j+1}_(m)` in slice coordinates.
    pub fn differential_matrix(&self, source: &CochainSlice, target: &CochainSlice) -> Matrix {
        let l = self.module.algebra();
        let n = l.dim();
        let mut out = Matrix::zeros(target.dim(), source.dim());
        // pairs (a<b) with nonzero l-component of [a,b], per l
        let mut pairs_by_target: Vec<Vec<(usize, usize, Rational)>> = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                for (k, c) in l.bracket_terms(a, b) {
                    pairs_by_target[*k].push((a, b, c.clone()));
                }
            }
        }
        for (col, &(sw, v)) in source.coords.iter().enumerate() {
            let s = &source.wedges[sw].indices;
            for x in (0..n).filter(|x| !s.contains(x)) {
                let mut t = s.clone();
                let i = t.partition_point(|&y| y < x);
                t.insert(i, x);
                let sign = if i % 2 == 0 {
                    Rational::one()
                } else {
                    -Rational::one()
                };
                let Some(tw) = target.wedge_position(&t) else {
                    continue;
                };
                for (w, a) in self.module.act_basis(x, v) {
                    if let Some(row) = target.coord(tw, *w) {
                        out.add_to(row, col, &(&sign * a));
                    }
                }
            }
            for (p, &lidx) in s.iter().enumerate() {
                let rest: Vec<usize> = s.iter().copied().filter(|&y| y != lidx).collect();
                for (a, b, coef) in &pairs_by_target[lidx] {
                    if rest.contains(a) || rest.contains(b) {
                        continue;
                    }
                    let mut t = rest.clone();
                    let ia = t.partition_point(|&y| y < *a);
                    t.insert(ia, *a);
                    let ib = t.partition_point(|&y| y < *b);
                    t.insert(ib, *b);
                    let Some(tw) = target.wedge_position(&t) else {
                        continue;
                    };
                    let Some(row) = target.coord(tw, v) else {
                        continue;
                    };
                    let odd = (p + ia + ib) % 2 == 1;
                    let val = if odd { -coef.clone() } else { coef.clone() };
                    out.add_to(row, col, &val);
                }
            }
        }
        out
    }

    pub fn d_matrix(&self, degree: usize, weight: i64) -> Matrix {
        self.differential_matrix(&self.slice(degree, weight), &self.slice(degree + 1, weight))
    }

    /// Matrix of `c ↦ g·c` on the slice, where `(g·c)(t) = g·c(g⁻¹ t)`, for
    /// the given group element index.
    pub fn group_matrix(&self, slice: &CochainSlice, ga: &Matrix, gv: &Matrix) -> Matrix {
        let inv = ga.inverse().expect("group elements are invertible");
        let lam = exterior_power_matrix(&inv, &slice.wedges);
        let mut out = Matrix::zeros(slice.dim(), slice.dim());
        for (col, &(s, v)) in slice.coords.iter().enumerate() {
            for (row, &(t, w)) in slice.coords.iter().enumerate() {
                let a = gv.get(w, v);
                let b = lam.get(s, t);
                if !a.is_zero() && !b.is_zero() {
                    out.set(row, col, a * b);
                }
            }
        }
        out
    }

    /// Basis of the group-invariant cochains of the slice.
    pub fn invariant_cochains(&self, slice: &CochainSlice) -> Vec<Vec<Rational>> {
        let n = slice.dim();
        let Some(action) = &self.action else {
            return (0..n).map(|i| crate::exactla::unit_vec(n, i)).collect();
        };
        let id = Matrix::identity(n);
        let blocks: Vec<Matrix> = action
            .on_algebra
            .generators()
            .iter()
            .zip(action.on_module.generators())
            .map(|(ga, gv)| self.group_matrix(slice, ga, gv).sub(&id))
            .collect();
        if blocks.is_empty() {
            return (0..n).map(|i| crate::exactla::unit_vec(n, i)).collect();
        }
        kernel_image(&Matrix::vstack(&blocks, n)).kernel
    }

    /// Reynolds operator on the slice.
    pub fn averaging_matrix(&self, slice: &CochainSlice) -> Matrix {
        let n = slice.dim();
        let Some(action) = &self.action else {
            return Matrix::identity(n);
        };
        let mut acc = Matrix::zeros(n, n);
        for (ga, gv) in action
            .on_algebra
            .elements()
            .iter()
            .zip(action.on_module.elements())
        {
            acc = acc.add(&self.group_matrix(slice, ga, gv));
        }
        acc.scale(&Rational::new(1.into(), (action.order() as i64).into()))
    }
}

/// Applies the differential to a cochain.
pub fn ce_differential(complex: &CochainComplex, c: &Cochain) -> Cochain {
    let d = complex.d_matrix(c.degree, c.weight);
    Cochain {
        degree: c.degree + 1,
        weight: c.weight,
        values: d.mul_vec(&c.values),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyResult {
    pub degree: usize,
    pub weight: i64,
    pub invariant: bool,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub dimension: usize,
    pub representatives: Vec<Cochain>,
    /// Bases of the (invariant, when requested) cocycles and coboundaries,
    /// in slice coordinates.
    pub cocycle_basis: Vec<Vec<Rational>>,
    pub coboundary_basis: Vec<Vec<Rational>>,
    /// Invariant dimension computed by averaging full cocycles against all
    /// coboundaries; equals `dimension` when `invariant` is set.
    pub averaged_dimension: Option<usize>,
}

/// `H^j_(m)`, optionally restricted to group invariants (computed on the
/// invariant subcomplex and cross-checked by averaging).
pub fn cohomology(
    complex: &CochainComplex,
    degree: usize,
    weight: i64,
    invariant: bool,
) -> CohomologyResult {
    let slice = complex.slice(degree, weight);
    let n = slice.dim();
    let d_out = complex.differential_matrix(&slice, &complex.slice(degree + 1, weight));
    let (d_in, prev_inv) = if degree == 0 {
        (Matrix::zeros(n, 0), Vec::new())
    } else {
        let prev = complex.slice(degree - 1, weight);
        let inv = if invariant {
            complex.invariant_cochains(&prev)
        } else {
            Vec::new()
        };
        (complex.differential_matrix(&prev, &slice), inv)
    };

    let (cocycles, coboundaries) = if invariant {
        let inv = complex.invariant_cochains(&slice);
        let p = Matrix::from_columns(n, &inv).expect("lengths");
        let z = kernel_image(&d_out.mul(&p))
            .kernel
            .iter()
            .map(|y| p.mul_vec(y))
            .collect::<Vec<_>>();
        let b: Vec<Vec<Rational>> = prev_inv.iter().map(|y| d_in.mul_vec(y)).collect();
        (z, independent_subset(n, &b))
    } else {
        (kernel_image(&d_out).kernel, kernel_image(&d_in).image)
    };

    let zmat = Matrix::from_columns(n, &cocycles).expect("lengths");
    let in_z: Vec<Vec<Rational>> = coboundaries
        .iter()
        .map(|b| coordinates_in(n, &cocycles, b).expect("coboundaries are cocycles"))
        .collect();
    let reps = quotient_basis(cocycles.len(), &in_z).expect("lengths");
    let representatives = reps
        .iter()
        .map(|r| Cochain {
            degree,
            weight,
            values: if cocycles.is_empty() {
                zero_vec(n)
            } else {
                zmat.mul_vec(r)
            },
        })
        .collect::<Vec<_>>();

    let averaged_dimension = invariant.then(|| {
        let all_z = kernel_image(&d_out).kernel;
        let all_b = kernel_image(&d_in).image;
        let avg = complex.averaging_matrix(&slice);
        let mut span: Vec<Vec<Rational>> = all_z.iter().map(|z| avg.mul_vec(z)).collect();
        span.extend(all_b.iter().cloned());
        span_rank(n, &span) - span_rank(n, &all_b)
    });

    CohomologyResult {
        degree,
        weight,
        invariant,
        cocycle_dim: cocycles.len(),
        coboundary_dim: coboundaries.len(),
        dimension: representatives.len(),
        representatives,
        cocycle_basis: cocycles,
        coboundary_basis: coboundaries,
        averaged_dimension,
    }
}

/// Returns `v` with `dv = z`, invariant when requested, or `None` when no
/// such primitive exists. Errors when `z` is not a cocycle.
pub fn is_coboundary(
    complex: &CochainComplex,
    z: &Cochain,
    invariant: bool,
) -> Result<Option<Cochain>, CohomologyError> {
    let slice = complex.slice(z.degree, z.weight);
    if z.values.len() != slice.dim() {
        return Err(ExactError::Dimension("cochain does not match its slice".into()).into());
    }
    if !ce_differential(complex, z).is_zero() {
        return Err(CohomologyError::NotCocycle);
    }
    if z.degree == 0 {
        return Ok(z.is_zero().then(|| z.clone()));
    }
    let prev = complex.slice(z.degree - 1, z.weight);
    let d = complex.differential_matrix(&prev, &slice);
    let basis = if invariant {
        complex.invariant_cochains(&prev)
    } else {
        (0..prev.dim())
            .map(|i| crate::exactla::unit_vec(prev.dim(), i))
            .collect()
    };
    let p = Matrix::from_columns(prev.dim(), &basis)?;
    let Some(sol) = solve_affine(&d.mul(&p), &z.values)? else {
        return Ok(None);
    };
    Ok(Some(Cochain {
        degree: z.degree - 1,
        weight: z.weight,
        values: p.mul_vec(&sol.particular),
    }))
}

/// Human-readable cochain, e.g. `x*∧y*⊗z` or `-1/2 w*⊗z + ...`.
pub fn describe_cochain(complex: &CochainComplex, slice: &CochainSlice, c: &Cochain) -> String {
    let l = complex.module.algebra();
    let v = complex.module.space();
    let mut parts = Vec::new();
    for (i, &(w, m)) in slice.coords.iter().enumerate() {
        let x = &c.values[i];
        if x.is_zero() {
            continue;
        }
        let wedge = slice.wedges[w]
            .indices
            .iter()
            .map(|&k| format!("{}*", l.name(k)))
            .collect::<Vec<_>>()
            .join("∧");
        let body = if wedge.is_empty() {
            v.name(m).to_string()
        } else {
            format!("{wedge}⊗{}", v.name(m))
        };
        if x.is_one() {
            parts.push(body);
        } else {
            parts.push(format!("{} {body}", format_rational(x)));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Both sides of `H^1_(0)(L,V)^G ≅ Hom_G(H_1(u), V)_weight-preserving`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomIdentification {
    pub cohomology_dim: usize,
    pub hom_dim: usize,
    /// `(H1 basis element index in L, module basis index)` coordinates of
    /// weight-preserving maps.
    pub hom_coords: Vec<(usize, usize)>,
    pub hom_basis: Vec<Vec<Rational>>,
    /// Image of each cohomology representative under restriction to `u`.
    pub images: Vec<Vec<Rational>>,
    pub map_rank: usize,
}

impl HomIdentification {
    pub fn is_isomorphism(&self) -> bool {
        self.cohomology_dim == self.hom_dim && self.map_rank == self.hom_dim
    }
}

/// Computes both sides independently and the comparison map. Requires a
/// module with no weight-0 part on which the negative part acts trivially.
pub fn hom_identification(complex: &CochainComplex) -> Result<HomIdentification, CohomologyError> {
    let module = &complex.module;
    let l = module.algebra();
    let v = module.space();
    if let Some(i) = (0..v.dim()).find(|&i| v.weight(i) == 0) {
        return Err(CohomologyError::WeightZeroModule(v.name(i).to_string()));
    }
    if !module.negative_part_acts_trivially() {
        return Err(CohomologyError::NontrivialNegativeAction);
    }
    let h1 = cohomology(complex, 1, 0, true);

    let lcs = lower_central_series(l);
    let u = l.negative_indices();
    let hom_coords: Vec<(usize, usize)> = lcs
        .h1_indices
        .iter()
        .flat_map(|&h| {
            v.graded_component(l.weight(h))
                .into_iter()
                .map(move |m| (h, m))
        })
        .collect();
    let k = hom_coords.len();

    // projection u → H1 in the representative basis
    let n = l.dim();
    let comm: Vec<Vec<Rational>> = lcs.terms.get(1).cloned().unwrap_or_default();
    let mut basis = lcs.h1.clone();
    basis.extend(comm.iter().cloned());
    let project = |x: &[Rational]| -> Vec<Rational> {
        let c = coordinates_in(n, &basis, x).expect("x lies in u");
        c[..lcs.h1.len()].to_vec()
    };

    let hom_basis = match &complex.action {
        Some(action) if !action.is_trivial() => {
            let mut blocks = Vec::new();
            for (ga, gv) in action
                .on_algebra
                .generators()
                .iter()
                .zip(action.on_module.generators())
            {
                // φ ∘ ρ(g) − g_V ∘ φ, as a linear map of φ's coordinates
                let mut m = Matrix::zeros(k, k);
                for (col, &(h, vv)) in hom_coords.iter().enumerate() {
                    for (row, &(h2, w)) in hom_coords.iter().enumerate() {
                        // (φ∘ρ(g))(h2) = φ(project(g h2)); the unit map φ=(h,vv)
                        // contributes project(g h2)[h] at value vv
                        let img = project(&ga.column(h2));
                        let hpos = lcs.h1_indices.iter().position(|&x| x == h).expect("h1");
                        let mut val = Rational::zero();
                        if w == vv {
                            val += &img[hpos];
                        }
                        if h == h2 {
                            val -= gv.get(w, vv);
                        }
                        m.set(row, col, val);
                    }
                }
                blocks.push(m);
            }
            kernel_image(&Matrix::vstack(&blocks, k)).kernel
        }
        _ => (0..k).map(|i| crate::exactla::unit_vec(k, i)).collect(),
    };

    let slice = complex.slice(1, 0);
    let images: Vec<Vec<Rational>> = h1
        .representatives
        .iter()
        .map(|c| {
            hom_coords
                .iter()
                .map(|&(h, m)| {
                    let w = slice.wedge_position(&[h]).expect("degree-1 wedge");
                    slice
                        .coord(w, m)
                        .map(|i| c.values[i].clone())
                        .unwrap_or_else(Rational::zero)
                })
                .collect()
        })
        .collect();
    debug_assert!(u.iter().all(|&i| l.weight(i) < 0));
    let map_rank = span_rank(k, &images);
    Ok(HomIdentification {
        cohomology_dim: h1.dimension,
        hom_dim: hom_basis.len(),
        hom_coords,
        hom_basis,
        images,
        map_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{rat, unit_vec};
    use crate::graded::GradedVectorSpace;
    use crate::lie::GradedLieAlgebra;

    fn h2_quotient() -> GradedLieAlgebra {
        let space = GradedVectorSpace::new([("h0", 0), ("x", -1), ("y", -1)]).unwrap();
        GradedLieAlgebra::from_brackets(
            space,
            vec![(0, 1, vec![(1, rat(-1))]), (0, 2, vec![(2, rat(-1))])],
            Some(0),
        )
    }

    fn z_line(l: &GradedLieAlgebra) -> LieModule {
        LieModule::trivial(l, GradedVectorSpace::new([("z", -2)]).unwrap())
    }

    #[test]
    fn degree_zero_differential() {
        let l = h2_quotient();
        let cx = CochainComplex::new(z_line(&l), None).unwrap();
        let s0 = cx.slice(0, -2);
        let v = Cochain {
            degree: 0,
            weight: -2,
            values: vec![rat(1)],
        };
        let dv = ce_differential(&cx, &v);
        let s1 = cx.slice(1, -2);
        assert_eq!(s0.dim(), 1);
        assert_eq!(s1.evaluate(&dv, &[0], 1), vec![rat(-2)]);
        assert_eq!(s1.evaluate(&dv, &[1], 1), vec![rat(0)]);
    }

    #[test]
    fn h2_cohomology_examples() {
        let l = h2_quotient();
        let cx = CochainComplex::new(z_line(&l), None).unwrap();
        assert_eq!(cohomology(&cx, 1, 0, false).dimension, 0);
        let h = cohomology(&cx, 2, 0, false);
        assert_eq!(h.dimension, 1);
        let slice = cx.slice(2, 0);
        assert_eq!(
            describe_cochain(&cx, &slice, &h.representatives[0]),
            "x*∧y*⊗z"
        );
        assert!(ce_differential(&cx, &h.representatives[0]).is_zero());
        assert_eq!(
            is_coboundary(&cx, &h.representatives[0], false).unwrap(),
            None
        );
    }

    #[test]
    fn l1_torsor_dimension() {
        let space = GradedVectorSpace::new([("h0", 0), ("x", -1)]).unwrap();
        let l = GradedLieAlgebra::from_brackets(space, vec![(0, 1, vec![(1, rat(-1))])], Some(0));
        let m = LieModule::trivial(&l, GradedVectorSpace::new([("m", -1)]).unwrap());
        let cx = CochainComplex::new(m, None).unwrap();
        assert_eq!(cohomology(&cx, 1, 0, false).dimension, 1);
        let hi = hom_identification(&cx).unwrap();
        assert_eq!((hi.cohomology_dim, hi.hom_dim), (1, 1));
        assert!(hi.is_isomorphism());
    }

    #[test]
    fn sign_action_kills_invariants() {
        let space = GradedVectorSpace::new([("h0", 0), ("x", -1)]).unwrap();
        let l = GradedLieAlgebra::from_brackets(space, vec![(0, 1, vec![(1, rat(-1))])], Some(0));
        let m = LieModule::trivial(&l, GradedVectorSpace::new([("m", -1)]).unwrap());
        let act = EquivariantAction::new(
            2,
            1,
            vec![(Matrix::identity(2), Matrix::from_i64(&[&[-1]]), 2)],
        )
        .unwrap();
        let cx = CochainComplex::new(m, Some(act)).unwrap();
        let h = cohomology(&cx, 1, 0, true);
        assert_eq!(h.dimension, 0);
        assert_eq!(h.averaged_dimension, Some(0));
        assert_eq!(hom_identification(&cx).unwrap().hom_dim, 0);
    }

    #[test]
    fn abelian_hom_identification() {
        let space = GradedVectorSpace::new([("h0", 0), ("x", -1), ("w", -2)]).unwrap();
        let l = GradedLieAlgebra::from_brackets(
            space,
            vec![(0, 1, vec![(1, rat(-1))]), (0, 2, vec![(2, rat(-2))])],
            Some(0),
        );
        let m = LieModule::trivial(&l, GradedVectorSpace::new([("w", -2)]).unwrap());
        let cx = CochainComplex::new(m, None).unwrap();
        let hi = hom_identification(&cx).unwrap();
        assert_eq!((hi.cohomology_dim, hi.hom_dim), (1, 1));
        assert!(hi.is_isomorphism());
    }

    #[test]
    fn weight_zero_module_rejected() {
        let l = h2_quotient();
        let m = LieModule::trivial(&l, GradedVectorSpace::new([("v", 0)]).unwrap());
        let cx = CochainComplex::new(m, None).unwrap();
        assert_eq!(
            hom_identification(&cx),
            Err(CohomologyError::WeightZeroModule("v".into()))
        );
    }

    #[test]
    fn non_cocycle_rejected() {
        let l = h2_quotient();
        let cx = CochainComplex::new(z_line(&l), None).unwrap();
        let slice = cx.slice(1, -1);
        let c = Cochain {
            degree: 1,
            weight: -1,
            values: unit_vec(slice.dim(), 0),
        };
        assert_eq!(
            is_coboundary(&cx, &c, false),
            Err(CohomologyError::NotCocycle)
        );
        let zero = Cochain::zero(&cx.slice(2, 0));
        assert!(is_coboundary(&cx, &zero, false).unwrap().unwrap().is_zero());
    }
}
