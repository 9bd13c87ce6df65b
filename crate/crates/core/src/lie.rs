//! Graded Lie algebras with exact structure constants, graded modules,
//! lower central series, free Lie algebras on weighted generators (Lyndon
//! basis) and the nilpotent exponential `exp(ad u)`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{
    add_scaled, is_zero_vec, quotient_basis, solve_affine, unit_vec, zero_vec, ExactError, Matrix,
    Rational,
};
use crate::graded::{GradedError, GradedVectorSpace};
use crate::validation::ValidationReport;

/// Sparse vector: `(basis index, coefficient)` pairs sorted by index, no zeros.
pub type Terms = Vec<(usize, Rational)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("generator {0:?} must have negative weight")]
    NonNegativeGenerator(String),
    #[error("depth must be at least 1, got {0}")]
    BadDepth(i64),
    #[error("element has a component of weight {0}; exp(ad) needs strictly negative weights")]
    NonNegativeComponent(i64),
    #[error("subspace is not an ideal: {0}")]
    NotIdeal(String),
    #[error("basis change is not weight-homogeneous or not invertible")]
    BadBasisChange,
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub fn terms_from_dense(v: &[Rational]) -> Terms {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, x.clone()))
        .collect()
}

pub fn dense_from_terms(n: usize, t: &Terms) -> Vec<Rational> {
    let mut v = zero_vec(n);
    for (i, x) in t {
        v[*i] += x;
    }
    v
}

fn neg_terms(t: &Terms) -> Terms {
    t.iter().map(|(i, x)| (*i, -x)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedLieAlgebra {
    space: GradedVectorSpace,
    table: Vec<Vec<Terms>>,
    grading: Option<usize>,
}

impl GradedLieAlgebra {
    /// Builds the table from `(a, b, [e_a, e_b])` entries. An entry for
    /// `(a, b)` without one for `(b, a)` implies `[e_b, e_a] = −[e_a, e_b]`.
    /// Nothing is validated here; see [`validate_lie`].
    pub fn from_brackets(
        space: GradedVectorSpace,
        entries: Vec<(usize, usize, Terms)>,
        grading: Option<usize>,
    ) -> Self {
        let n = space.dim();
        let mut table = vec![vec![Terms::new(); n]; n];
        let mut explicit = vec![vec![false; n]; n];
        for (a, b, v) in entries {
            let v: Terms = v.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            if !explicit[b][a] && a != b {
                table[b][a] = neg_terms(&v);
            }
            table[a][b] = v;
            explicit[a][b] = true;
        }
        for row in &mut table {
            for t in row.iter_mut() {
                t.sort_by_key(|(i, _)| *i);
            }
        }
        GradedLieAlgebra {
            space,
            table,
            grading,
        }
    }

    pub fn abelian(space: GradedVectorSpace) -> Self {
        Self::from_brackets(space, Vec::new(), None)
    }

    /// Prepends a grading element acting by `[h0, v] = weight(v)·v`.
    pub fn with_grading_element(&self, name: &str) -> Result<Self, LieError> {
        let n = self.dim();
        let space = GradedVectorSpace::new(
            std::iter::once((name.to_string(), 0)).chain(
                self.space
                    .basis()
                    .iter()
                    .map(|b| (b.name.clone(), b.weight)),
            ),
        )?;
        let mut entries = Vec::new();
        for i in 0..n {
            let w = self.space.weight(i);
            if w != 0 {
                entries.push((0, i + 1, vec![(i + 1, Rational::from_integer(w.into()))]));
            }
            for j in i + 1..n {
                let t: Terms = self.table[i][j]
                    .iter()
                    .map(|(k, x)| (k + 1, x.clone()))
                    .collect();
                entries.push((i + 1, j + 1, t));
            }
        }
        Ok(Self::from_brackets(space, entries, Some(0)))
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn name(&self, i: usize) -> &str {
        self.space.name(i)
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.space.weight(i)
    }

    pub fn grading_element(&self) -> Option<usize> {
        self.grading
    }

    pub fn bracket_terms(&self, a: usize, b: usize) -> &Terms {
        &self.table[a][b]
    }

    /// Indices of the negative-weight basis elements (the nilpotent part).
    pub fn negative_indices(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weight(i) < 0).collect()
    }

    pub fn bracket(&self, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let mut out = zero_vec(self.dim());
        for (a, x) in u.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in v.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in &self.table[a][b] {
                    out[*k] += &xy * c;
                }
            }
        }
        out
    }

    fn bracket_basis_terms(&self, a: usize, v: &Terms) -> Terms {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (b, y) in v {
            for (k, c) in &self.table[a][*b] {
                *acc.entry(*k).or_insert_with(Rational::zero) += y * c;
            }
        }
        acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
    }

    /// Matrix of `ad u = [u, ·]`.
    pub fn ad_matrix(&self, u: &[Rational]) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vec<Rational>> = (0..n).map(|j| self.bracket(u, &unit_vec(n, j))).collect();
        Matrix::from_columns(n, &cols).expect("square")
    }

    /// Quotient by a graded ideal spanned by homogeneous vectors. The
    /// quotient basis is the set of standard basis vectors completing the
    /// ideal. Returns the quotient and the projection matrix.
    pub fn quotient_by_ideal(
        &self,
        ideal: &[Vec<Rational>],
    ) -> Result<(GradedLieAlgebra, Matrix), LieError> {
        let n = self.dim();
        for v in ideal {
            for b in 0..n {
                let w = self.bracket(&unit_vec(n, b), v);
                if !crate::exactla::coordinates_in(n, ideal, &w).is_some() {
                    return Err(LieError::NotIdeal(format!(
                        "[{}, ·] leaves the subspace",
                        self.name(b)
                    )));
                }
            }
        }
        let reps = quotient_basis(n, ideal)?;
        let kept: Vec<usize> = reps
            .iter()
            .map(|r| r.iter().position(|x| !x.is_zero()).expect("unit vector"))
            .collect();
        let mut cols = ideal.to_vec();
        cols.extend(reps.iter().cloned());
        let full = Matrix::from_columns(n, &cols)?;
        let inv = full.inverse().ok_or(LieError::BadBasisChange)?;
        let proj_rows: Vec<Vec<Rational>> = (ideal.len()..n).map(|r| inv.row(r).to_vec()).collect();
        let projection = Matrix::from_rows(proj_rows)?;
        let projection = if kept.is_empty() {
            Matrix::zeros(0, n)
        } else {
            projection
        };
        let space = self.space.subspace(&kept);
        let mut entries = Vec::new();
        for (qa, &a) in kept.iter().enumerate() {
            for (qb, &b) in kept.iter().enumerate().skip(qa + 1) {
                let v = dense_from_terms(n, &self.table[a][b]);
                entries.push((qa, qb, terms_from_dense(&projection.mul_vec(&v))));
            }
        }
        let grading = self.grading.and_then(|h| kept.iter().position(|&k| k == h));
        Ok((
            GradedLieAlgebra::from_brackets(space, entries, grading),
            projection,
        ))
    }

    /// Re-expresses the algebra in the basis given by the columns of `p`.
    /// Columns must be homogeneous; the new basis takes `names`.
    pub fn change_basis(
        &self,
        p: &Matrix,
        names: Vec<String>,
    ) -> Result<GradedLieAlgebra, LieError> {
        let n = self.dim();
        let inv = p.inverse().ok_or(LieError::BadBasisChange)?;
        let cols = p.columns();
        let mut weights = Vec::new();
        for c in &cols {
            weights.push(
                self.space
                    .homogeneous_weight(c)
                    .ok_or(LieError::BadBasisChange)?,
            );
        }
        let space = GradedVectorSpace::new(names.into_iter().zip(weights))?;
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let br = self.bracket(&cols[i], &cols[j]);
                entries.push((i, j, terms_from_dense(&inv.mul_vec(&br))));
            }
        }
        let grading = self
            .grading
            .and_then(|h| cols.iter().position(|c| *c == unit_vec(n, h)));
        Ok(GradedLieAlgebra::from_brackets(space, entries, grading))
    }

    /// Restriction to the span of the given basis elements (assumed closed).
    pub fn subalgebra(&self, indices: &[usize]) -> GradedLieAlgebra {
        let pos: HashMap<usize, usize> = indices.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut entries = Vec::new();
        for (pa, &a) in indices.iter().enumerate() {
            for (pb, &b) in indices.iter().enumerate().skip(pa + 1) {
                let t = self.table[a][b]
                    .iter()
                    .filter_map(|(k, x)| pos.get(k).map(|&p| (p, x.clone())))
                    .collect();
                entries.push((pa, pb, t));
            }
        }
        let grading = self.grading.and_then(|h| pos.get(&h).copied());
        GradedLieAlgebra::from_brackets(self.space.subspace(indices), entries, grading)
    }
}

/// Checks antisymmetry, Jacobi, weight additivity and the grading-element
/// axiom, reporting the first violating basis tuple of each.
pub fn validate_lie(l: &GradedLieAlgebra) -> ValidationReport {
    let n = l.dim();
    let mut report = ValidationReport::default();

    let mut witness = None;
    'anti: for a in 0..n {
        for b in a..n {
            if l.table[a][b] != neg_terms(&l.table[b][a]) {
                witness = Some(format!("({}, {})", l.name(a), l.name(b)));
                break 'anti;
            }
        }
    }
    report.record("antisymmetry", witness);

    let mut witness = None;
    'add: for a in 0..n {
        for b in 0..n {
            if let Some((k, _)) = l.table[a][b]
                .iter()
                .find(|(k, _)| l.weight(*k) != l.weight(a) + l.weight(b))
            {
                witness = Some(format!("({}, {}) -> {}", l.name(a), l.name(b), l.name(*k)));
                break 'add;
            }
        }
    }
    report.record("weight additivity", witness);

    let min_w = l.space.min_weight().unwrap_or(0);
    let mut witness = None;
    'jac: for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if l.weight(a) + l.weight(b) + l.weight(c) < min_w
                    && witness.is_none()
                    && l.grading.is_none()
                {
                    // every term lands below the lowest weight; still checked
                    // below when the algebra is not weight-additive
                }
                let bc = l.bracket_basis_terms(a, &l.table[b][c]);
                let ca = l.bracket_basis_terms(b, &l.table[c][a]);
                let ab = l.bracket_basis_terms(c, &l.table[a][b]);
                let mut sum = zero_vec(n);
                for t in [bc, ca, ab] {
                    for (k, x) in t {
                        sum[k] += x;
                    }
                }
                if !is_zero_vec(&sum) {
                    witness = Some(format!("({}, {}, {})", l.name(a), l.name(b), l.name(c)));
                    break 'jac;
                }
            }
        }
    }
    report.record("jacobi", witness);

    if let Some(h) = l.grading {
        let mut witness = None;
        if l.weight(h) != 0 {
            witness = Some(format!("{} has weight {}", l.name(h), l.weight(h)));
        }
        for v in 0..n {
            if witness.is_some() {
                break;
            }
            let w = l.weight(v);
            let expected: Terms = if w == 0 {
                Vec::new()
            } else {
                vec![(v, Rational::from_integer(w.into()))]
            };
            if l.table[h][v] != expected {
                witness = Some(format!("({}, {})", l.name(h), l.name(v)));
            }
        }
        report.record("grading element", witness);
    }
    report
}

/// Graded module over a graded Lie algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieModule {
    algebra: GradedLieAlgebra,
    space: GradedVectorSpace,
    action: Vec<Vec<Terms>>,
}

impl LieModule {
    /// `(a, v, e_a · v_v)` entries; unspecified actions are zero.
    pub fn from_action(
        algebra: GradedLieAlgebra,
        space: GradedVectorSpace,
        entries: Vec<(usize, usize, Terms)>,
    ) -> Self {
        let mut action = vec![vec![Terms::new(); space.dim()]; algebra.dim()];
        for (a, v, t) in entries {
            let mut t: Terms = t.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            t.sort_by_key(|(i, _)| *i);
            action[a][v] = t;
        }
        LieModule {
            algebra,
            space,
            action,
        }
    }

    pub fn adjoint(algebra: &GradedLieAlgebra) -> Self {
        LieModule {
            algebra: algebra.clone(),
            space: algebra.space.clone(),
            action: algebra.table.clone(),
        }
    }

    /// Module on which the negative part acts by zero and the grading
    /// element (if any) acts by weights.
    pub fn trivial(algebra: &GradedLieAlgebra, space: GradedVectorSpace) -> Self {
        let mut entries = Vec::new();
        if let Some(h) = algebra.grading {
            for v in 0..space.dim() {
                entries.push((
                    h,
                    v,
                    vec![(v, Rational::from_integer(space.weight(v).into()))],
                ));
            }
        }
        Self::from_action(algebra.clone(), space, entries)
    }

    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.algebra
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn act_basis(&self, a: usize, v: usize) -> &Terms {
        &self.action[a][v]
    }

    pub fn action_matrix(&self, a: usize) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|v| dense_from_terms(n, &self.action[a][v]))
            .collect();
        Matrix::from_columns(n, &cols).expect("square")
    }

    pub fn act(&self, x: &[Rational], v: &[Rational]) -> Vec<Rational> {
        let mut out = zero_vec(self.dim());
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, vb) in v.iter().enumerate() {
                if vb.is_zero() {
                    continue;
                }
                let c = xa * vb;
                for (k, y) in &self.action[a][b] {
                    out[*k] += &c * y;
                }
            }
        }
        out
    }

    /// True when every negative-weight element of the algebra acts by zero.
    pub fn negative_part_acts_trivially(&self) -> bool {
        self.algebra
            .negative_indices()
            .iter()
            .all(|&a| self.action[a].iter().all(Vec::is_empty))
    }

    /// Direct sum with another module over the same algebra; names of the
    /// second summand get `suffix` appended.
    pub fn direct_sum(&self, other: &LieModule, suffix: &str) -> Result<LieModule, LieError> {
        let off = self.dim();
        let space = GradedVectorSpace::new(
            self.space
                .basis()
                .iter()
                .map(|b| (b.name.clone(), b.weight))
                .chain(
                    other
                        .space
                        .basis()
                        .iter()
                        .map(|b| (format!("{}{suffix}", b.name), b.weight)),
                ),
        )?;
        let mut entries = Vec::new();
        for a in 0..self.algebra.dim() {
            for v in 0..off {
                entries.push((a, v, self.action[a][v].clone()));
            }
            for v in 0..other.dim() {
                entries.push((
                    a,
                    v + off,
                    other.action[a][v]
                        .iter()
                        .map(|(k, x)| (k + off, x.clone()))
                        .collect(),
                ));
            }
        }
        Ok(LieModule::from_action(self.algebra.clone(), space, entries))
    }
}

/// Checks `[x,y]·v = x·(y·v) − y·(x·v)`, weight additivity and the grading
/// element acting by weights.
pub fn validate_module(m: &LieModule) -> ValidationReport {
    let l = &m.algebra;
    let n = l.dim();
    let d = m.dim();
    let mut report = ValidationReport::default();

    let mut witness = None;
    'add: for a in 0..n {
        for v in 0..d {
            if let Some((k, _)) = m.action[a][v]
                .iter()
                .find(|(k, _)| m.space.weight(*k) != l.weight(a) + m.space.weight(v))
            {
                witness = Some(format!(
                    "{} . {} -> {}",
                    l.name(a),
                    m.space.name(v),
                    m.space.name(*k)
                ));
                break 'add;
            }
        }
    }
    report.record("module weight additivity", witness);

    let mats: Vec<Matrix> = (0..n).map(|a| m.action_matrix(a)).collect();
    let mut witness = None;
    'comp: for a in 0..n {
        for b in a + 1..n {
            let mut lhs = Matrix::zeros(d, d);
            for (k, c) in l.bracket_terms(a, b) {
                lhs = lhs.add(&mats[*k].scale(c));
            }
            let rhs = mats[a].mul(&mats[b]).sub(&mats[b].mul(&mats[a]));
            if lhs != rhs {
                witness = Some(format!("({}, {})", l.name(a), l.name(b)));
                break 'comp;
            }
        }
    }
    report.record("bracket compatibility", witness);

    if let Some(h) = l.grading {
        let mut witness = None;
        for v in 0..d {
            let w = m.space.weight(v);
            let expected: Terms = if w == 0 {
                Vec::new()
            } else {
                vec![(v, Rational::from_integer(w.into()))]
            };
            if m.action[h][v] != expected {
                witness = Some(format!("{} . {}", l.name(h), m.space.name(v)));
                break;
            }
        }
        report.record("module grading element", witness);
    }
    report
}

/// Lower central series of the negative part `u`, with `H1(u) = u/[u,u]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerCentralSeries {
    /// `terms[k]` is a basis of `L^{k+1}`, in coordinates of the full algebra.
    pub terms: Vec<Vec<Vec<Rational>>>,
    /// Representatives of a basis of `H1(u)`: standard basis vectors of
    /// the full algebra completing `[u,u]` inside `u`.
    pub h1: Vec<Vec<Rational>>,
    pub h1_indices: Vec<usize>,
}

pub fn lower_central_series(l: &GradedLieAlgebra) -> LowerCentralSeries {
    let n = l.dim();
    let u = l.negative_indices();
    let first: Vec<Vec<Rational>> = u.iter().map(|&i| unit_vec(n, i)).collect();
    let mut terms = vec![first];
    loop {
        let last = terms.last().expect("nonempty");
        if last.is_empty() {
            break;
        }
        let mut spans = Vec::new();
        for &a in &u {
            for v in last {
                let w = l.bracket(&unit_vec(n, a), v);
                if !is_zero_vec(&w) {
                    spans.push(w);
                }
            }
        }
        let next = crate::exactla::independent_subset(n, &spans);
        let stable = next.len() == last.len();
        terms.push(next);
        if stable {
            break;
        }
    }
    let commutator: Vec<Vec<Rational>> = terms
        .get(1)
        .map(|c| {
            c.iter()
                .map(|v| u.iter().map(|&i| v[i].clone()).collect())
                .collect()
        })
        .unwrap_or_default();
    let reps = quotient_basis(u.len(), &commutator).expect("consistent lengths");
    let h1_indices: Vec<usize> = reps
        .iter()
        .map(|r| u[r.iter().position(|x| x.is_one()).expect("unit")])
        .collect();
    let h1 = h1_indices.iter().map(|&i| unit_vec(n, i)).collect();
    LowerCentralSeries {
        terms,
        h1,
        h1_indices,
    }
}

/// `Σ_k (ad u)^k / k!`. The sum is finite because every component of `u`
/// has negative weight.
pub fn exp_ad(l: &GradedLieAlgebra, u: &[Rational]) -> Result<Matrix, LieError> {
    if let Some(i) = (0..l.dim()).find(|&i| !u[i].is_zero() && l.weight(i) >= 0) {
        return Err(LieError::NonNegativeComponent(l.weight(i)));
    }
    let n = l.dim();
    let ad = l.ad_matrix(u);
    let mut total = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=n + 1 {
        term = ad
            .mul(&term)
            .scale(&Rational::new(1.into(), (k as i64).into()));
        if term.is_zero() {
            break;
        }
        total = total.add(&term);
    }
    Ok(total)
}

/// Lyndon words of length at most `max_len` over an alphabet of size `k`,
/// in lexicographic order (Duval's algorithm).
pub fn lyndon_words(k: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || max_len == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        out.push(w.clone());
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == k - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            None => return out,
            Some(last) => *last += 1,
        }
    }
}

/// Standard factorization `w = uv` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[usize]) -> Option<(&[usize], &[usize])> {
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .map(|i| w.split_at(i))
}

pub fn is_lyndon(w: &[usize]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w[i..] > *w)
}

type AssocPoly = HashMap<Vec<usize>, Rational>;

fn assoc_commutator(p: &AssocPoly, q: &AssocPoly) -> AssocPoly {
    let mut out = AssocPoly::new();
    for (u, a) in p {
        for (v, b) in q {
            let ab = a * b;
            let mut uv = u.clone();
            uv.extend_from_slice(v);
            *out.entry(uv).or_insert_with(Rational::zero) += &ab;
            let mut vu = v.clone();
            vu.extend_from_slice(u);
            *out.entry(vu).or_insert_with(Rational::zero) -= &ab;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Free Lie algebra on weighted generators, truncated below weight `-depth`,
/// with the Lyndon basis and standard bracketing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeLieTruncation {
    generators: Vec<(String, i64)>,
    depth: i64,
    words: Vec<Vec<usize>>,
    algebra: GradedLieAlgebra,
}

pub fn free_lie_basis(
    generators: &[(String, i64)],
    depth: i64,
) -> Result<FreeLieTruncation, LieError> {
    if depth < 1 {
        return Err(LieError::BadDepth(depth));
    }
    if let Some((name, _)) = generators.iter().find(|(_, w)| *w >= 0) {
        return Err(LieError::NonNegativeGenerator(name.clone()));
    }
    let weight = |w: &[usize]| -> i64 { w.iter().map(|&g| generators[g].1).sum() };
    let mut words: Vec<Vec<usize>> = lyndon_words(generators.len(), depth as usize)
        .into_iter()
        .filter(|w| weight(w) >= -depth)
        .collect();
    words.sort_by(|a, b| weight(b).cmp(&weight(a)).then_with(|| a.cmp(b)));

    let mut names: HashMap<Vec<usize>, String> = HashMap::new();
    let mut expansions: HashMap<Vec<usize>, AssocPoly> = HashMap::new();
    for w in words.iter().filter(|w| w.len() == 1) {
        names.insert(w.clone(), generators[w[0]].0.clone());
        expansions.insert(w.clone(), AssocPoly::from([(w.clone(), Rational::one())]));
    }
    let mut by_len = words.clone();
    by_len.sort_by_key(Vec::len);
    for w in by_len.iter().filter(|w| w.len() > 1) {
        let (u, v) = standard_factorization(w).expect("Lyndon words of length > 1 factor");
        let name = format!("[{},{}]", names[u], names[v]);
        let poly = assoc_commutator(&expansions[u], &expansions[v]);
        names.insert(w.clone(), name);
        expansions.insert(w.clone(), poly);
    }

    let index: HashMap<&Vec<usize>, usize> =
        words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let space = GradedVectorSpace::new(words.iter().map(|w| (names[w].clone(), weight(w))))?;
    let mut entries = Vec::new();
    for a in 0..words.len() {
        for b in a + 1..words.len() {
            if weight(&words[a]) + weight(&words[b]) < -depth {
                continue;
            }
            let mut poly = assoc_commutator(&expansions[&words[a]], &expansions[&words[b]]);
            let mut terms = Terms::new();
            while let Some(lead) = poly.keys().min().cloned() {
                let coef = poly[&lead].clone();
                let k = *index
                    .get(&lead)
                    .expect("leading word of a Lie polynomial is Lyndon");
                for (word, c) in &expansions[&words[k]] {
                    *poly.entry(word.clone()).or_insert_with(Rational::zero) -= &coef * c;
                }
                poly.retain(|_, c| !c.is_zero());
                terms.push((k, coef));
            }
            terms.sort_by_key(|(i, _)| *i);
            entries.push((a, b, terms));
        }
    }
    let algebra = GradedLieAlgebra::from_brackets(space, entries, None);
    Ok(FreeLieTruncation {
        generators: generators.to_vec(),
        depth,
        words,
        algebra,
    })
}

impl FreeLieTruncation {
    pub fn algebra(&self) -> &GradedLieAlgebra {
        &self.algebra
    }

    pub fn into_algebra(self) -> GradedLieAlgebra {
        self.algebra
    }

    pub fn generators(&self) -> &[(String, i64)] {
        &self.generators
    }

    pub fn depth(&self) -> i64 {
        self.depth
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// Basis index of generator `g`.
    pub fn generator_index(&self, g: usize) -> usize {
        self.words
            .iter()
            .position(|w| w.as_slice() == [g])
            .expect("generator present")
    }

    pub fn dims_by_weight(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for b in self.algebra.space().basis() {
            *out.entry(b.weight).or_insert(0) += 1;
        }
        out
    }

    /// Extends generator images to the whole basis by bracketing along the
    /// standard factorization. The result is `target.dim() × self.dim()`.
    /// It is a Lie homomorphism exactly when the images satisfy the
    /// truncation relations in `target`.
    pub fn extend_generator_map(
        &self,
        target: &GradedLieAlgebra,
        images: &[Vec<Rational>],
    ) -> Matrix {
        let mut cache: HashMap<Vec<usize>, Vec<Rational>> = HashMap::new();
        fn image(
            w: &[usize],
            target: &GradedLieAlgebra,
            images: &[Vec<Rational>],
            cache: &mut HashMap<Vec<usize>, Vec<Rational>>,
        ) -> Vec<Rational> {
            if let Some(v) = cache.get(w) {
                return v.clone();
            }
            let v = if w.len() == 1 {
                images[w[0]].clone()
            } else {
                let (a, b) = standard_factorization(w).expect("Lyndon");
                let ia = image(a, target, images, cache);
                let ib = image(b, target, images, cache);
                target.bracket(&ia, &ib)
            };
            cache.insert(w.to_vec(), v.clone());
            v
        }
        let cols: Vec<Vec<Rational>> = self
            .words
            .iter()
            .map(|w| image(w, target, images, &mut cache))
            .collect();
        Matrix::from_columns(target.dim(), &cols).expect("uniform image length")
    }
}

/// Solves `x = Σ c_i basis_i` when `basis` spans `x`; helper for callers
/// that re-express brackets in a non-standard basis.
pub fn express_in(basis: &Matrix, x: &[Rational]) -> Option<Vec<Rational>> {
    solve_affine(basis, x).ok().flatten().map(|s| s.particular)
}

pub fn add_terms_into(target: &mut [Rational], coef: &Rational, t: &Terms) {
    let v = dense_from_terms(target.len(), t);
    add_scaled(target, coef, &v);
}
