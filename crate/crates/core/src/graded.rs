//! Graded vector spaces, homogeneous maps, weight truncations, exterior
//! power bases and finite group actions.

use std::collections::{HashMap, HashSet, VecDeque};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactla::{kernel_image, zero_vec, ExactError, Matrix, Rational};

/// Upper bound on the number of elements produced when closing a group
/// under composition.
pub const GROUP_ELEMENT_CAP: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("duplicate basis name {0:?}")]
    DuplicateName(String),
    #[error("truncation cutoff must be at least 1, got {0}")]
    BadCutoff(i64),
    #[error("map is not homogeneous of shift {shift}: basis element {source_name:?} has image outside weight {expected}")]
    NotHomogeneous {
        shift: i64,
        source_name: String,
        expected: i64,
    },
    #[error("group generator {0} is not invertible")]
    NotInvertible(usize),
    #[error("group generator {index} does not have declared order {order}")]
    WrongOrder { index: usize, order: usize },
    #[error("group generated exceeds {GROUP_ELEMENT_CAP} elements")]
    GroupTooLarge,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub weight: i64,
}

/// Finite-dimensional graded space with an ordered, named basis. The basis
/// order fixes coordinates for everything built on top.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVectorSpace {
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
}

impl GradedVectorSpace {
    pub fn new<S: Into<String>>(
        elements: impl IntoIterator<Item = (S, i64)>,
    ) -> Result<Self, GradedError> {
        let mut basis = Vec::new();
        let mut index = HashMap::new();
        for (name, weight) in elements {
            let name = name.into();
            if index.insert(name.clone(), basis.len()).is_some() {
                return Err(GradedError::DuplicateName(name));
            }
            basis.push(BasisElement { name, weight });
        }
        Ok(GradedVectorSpace { basis, index })
    }

    pub fn zero() -> Self {
        GradedVectorSpace {
            basis: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.basis[i].weight
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Indices of the basis elements of weight `m`, in basis order.
    pub fn graded_component(&self, m: i64) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.basis[i].weight == m)
            .collect()
    }

    /// Distinct weights in increasing order.
    pub fn weights(&self) -> Vec<i64> {
        let mut w: Vec<i64> = self.basis.iter().map(|b| b.weight).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    pub fn min_weight(&self) -> Option<i64> {
        self.basis.iter().map(|b| b.weight).min()
    }

    /// Subspace spanned by the chosen basis elements, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> GradedVectorSpace {
        GradedVectorSpace::new(
            indices
                .iter()
                .map(|&i| (self.basis[i].name.clone(), self.basis[i].weight)),
        )
        .expect("subset of unique names")
    }

    /// Weight of a vector if it is homogeneous and nonzero.
    pub fn homogeneous_weight(&self, v: &[Rational]) -> Option<i64> {
        let mut w = None;
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            match w {
                None => w = Some(self.weight(i)),
                Some(w0) if w0 != self.weight(i) => return None,
                _ => {}
            }
        }
        w
    }
}

/// Linear map homogeneous of a fixed weight shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    source: GradedVectorSpace,
    target: GradedVectorSpace,
    shift: i64,
    matrix: Matrix,
}

impl GradedMap {
    pub fn new(
        source: GradedVectorSpace,
        target: GradedVectorSpace,
        shift: i64,
        matrix: Matrix,
    ) -> Result<Self, GradedError> {
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(ExactError::Dimension(format!(
                "matrix is {}x{}, spaces need {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.dim(),
                source.dim()
            ))
            .into());
        }
        for j in 0..source.dim() {
            let expected = source.weight(j) + shift;
            if (0..target.dim())
                .any(|i| !matrix.get(i, j).is_zero() && target.weight(i) != expected)
            {
                return Err(GradedError::NotHomogeneous {
                    shift,
                    source_name: source.name(j).to_string(),
                    expected,
                });
            }
        }
        Ok(GradedMap {
            source,
            target,
            shift,
            matrix,
        })
    }

    pub fn identity(space: &GradedVectorSpace) -> Self {
        GradedMap {
            source: space.clone(),
            target: space.clone(),
            shift: 0,
            matrix: Matrix::identity(space.dim()),
        }
    }

    pub fn source(&self) -> &GradedVectorSpace {
        &self.source
    }

    pub fn target(&self) -> &GradedVectorSpace {
        &self.target
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `self ∘ inner`; shifts add.
    pub fn compose(&self, inner: &GradedMap) -> Result<GradedMap, GradedError> {
        if inner.target != self.source {
            return Err(ExactError::Dimension(
                "composition of maps between different spaces".into(),
            )
            .into());
        }
        Ok(GradedMap {
            source: inner.source.clone(),
            target: self.target.clone(),
            shift: self.shift + inner.shift,
            matrix: self.matrix.mul(&inner.matrix),
        })
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        self.matrix.mul_vec(v)
    }
}

/// Quotient of a space by `W_{-N-1}`: keeps the basis elements of weight ≥ −N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightTruncation {
    pub original: GradedVectorSpace,
    pub cutoff: i64,
    pub quotient: GradedVectorSpace,
    pub kept: Vec<usize>,
    pub projection: GradedMap,
}

pub fn truncate(space: &GradedVectorSpace, cutoff: i64) -> Result<WeightTruncation, GradedError> {
    if cutoff < 1 {
        return Err(GradedError::BadCutoff(cutoff));
    }
    let kept: Vec<usize> = (0..space.dim())
        .filter(|&i| space.weight(i) >= -cutoff)
        .collect();
    let quotient = space.subspace(&kept);
    let mut m = Matrix::zeros(kept.len(), space.dim());
    for (row, &i) in kept.iter().enumerate() {
        m.set(row, i, Rational::one());
    }
    let projection = GradedMap::new(space.clone(), quotient.clone(), 0, m)?;
    Ok(WeightTruncation {
        original: space.clone(),
        cutoff,
        quotient,
        kept,
        projection,
    })
}

/// Basis element of an exterior power: strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wedge {
    pub indices: Vec<usize>,
    pub weight: i64,
}

/// Basis of `Λ^j V`: increasing index tuples in lexicographic order.
pub fn exterior_basis(space: &GradedVectorSpace, j: usize) -> Vec<Wedge> {
    let n = space.dim();
    let mut out = Vec::new();
    if j > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..j).collect();
    loop {
        out.push(Wedge {
            weight: idx.iter().map(|&i| space.weight(i)).sum(),
            indices: idx.clone(),
        });
        // advance to the next combination
        let mut k = j;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < n - j + k {
                idx[k] += 1;
                for l in k + 1..j {
                    idx[l] = idx[l - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Sorts indices, returning the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut k = i;
        while k > 0 && v[k - 1] > v[k] {
            v.swap(k - 1, k);
            sign = -sign;
            k -= 1;
        }
        if k > 0 && v[k - 1] == v[k] {
            return None;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Matrix of `Λ^j g` on the wedge basis of degree `j`, where `g` is an
/// `n×n` matrix.
pub fn exterior_power_matrix(g: &Matrix, wedges: &[Wedge]) -> Matrix {
    let pos: HashMap<&[usize], usize> = wedges
        .iter()
        .enumerate()
        .map(|(i, w)| (w.indices.as_slice(), i))
        .collect();
    let mut out = Matrix::zeros(wedges.len(), wedges.len());
    for (col, w) in wedges.iter().enumerate() {
        let mut terms: HashMap<Vec<usize>, Rational> =
            HashMap::from([(Vec::new(), Rational::one())]);
        for &i in &w.indices {
            let mut next: HashMap<Vec<usize>, Rational> = HashMap::new();
            for (partial, coef) in &terms {
                for k in 0..g.rows() {
                    let a = g.get(k, i);
                    if a.is_zero() || partial.contains(&k) {
                        continue;
                    }
                    let mut t = partial.clone();
                    t.push(k);
                    *next.entry(t).or_insert_with(Rational::zero) += coef * a;
                }
            }
            terms = next;
        }
        for (t, coef) in terms {
            if coef.is_zero() {
                continue;
            }
            let (sorted, sign) = sort_with_sign(&t).expect("distinct indices");
            let row = *pos.get(sorted.as_slice()).expect("wedge of same degree");
            let val = if sign < 0 { -coef } else { coef };
            out.add_to(row, col, &val);
        }
    }
    out
}

/// Finite group acting linearly on a fixed-dimensional space. `elements`
/// is the closure of the generators under composition, identity first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupAction {
    dim: usize,
    generators: Vec<Matrix>,
    orders: Vec<usize>,
    elements: Vec<Matrix>,
}

impl FiniteGroupAction {
    pub fn trivial(dim: usize) -> Self {
        FiniteGroupAction {
            dim,
            generators: Vec::new(),
            orders: Vec::new(),
            elements: vec![Matrix::identity(dim)],
        }
    }

    /// Checks invertibility and declared orders, then closes the group by
    /// breadth-first composition.
    pub fn from_generators(
        dim: usize,
        generators: Vec<(Matrix, usize)>,
    ) -> Result<Self, GradedError> {
        let id = Matrix::identity(dim);
        for (index, (g, order)) in generators.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(
                    ExactError::Dimension(format!("generator {index} has wrong shape")).into(),
                );
            }
            if g.inverse().is_none() {
                return Err(GradedError::NotInvertible(index));
            }
            let mut p = id.clone();
            for _ in 0..*order {
                p = g.mul(&p);
            }
            if *order == 0 || p != id {
                return Err(GradedError::WrongOrder {
                    index,
                    order: *order,
                });
            }
        }
        let (mats, orders): (Vec<Matrix>, Vec<usize>) = generators.into_iter().unzip();
        let mut elements = vec![id.clone()];
        let mut seen: HashSet<Matrix> = HashSet::from([id]);
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for g in &mats {
                let h = g.mul(&elements[i]);
                if seen.insert(h.clone()) {
                    if elements.len() == GROUP_ELEMENT_CAP {
                        return Err(GradedError::GroupTooLarge);
                    }
                    elements.push(h);
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        Ok(FiniteGroupAction {
            dim,
            generators: mats,
            orders,
            elements,
        })
    }

    /// Generators must be weight-preserving maps of `space` to itself.
    pub fn on_space(
        space: &GradedVectorSpace,
        generators: Vec<(GradedMap, usize)>,
    ) -> Result<Self, GradedError> {
        let mut mats = Vec::new();
        for (index, (g, order)) in generators.into_iter().enumerate() {
            if g.shift() != 0 || g.source() != space || g.target() != space {
                return Err(ExactError::Dimension(format!(
                    "generator {index} is not a weight-preserving endomorphism"
                ))
                .into());
            }
            mats.push((g.matrix().clone(), order));
        }
        Self::from_generators(space.dim(), mats)
    }

    /// Applies `f` to every generator and every element, keeping the
    /// indexing. Used to induce actions on quotients, subspaces and
    /// derived spaces.
    pub fn induced(&self, dim: usize, f: impl Fn(&Matrix) -> Matrix) -> FiniteGroupAction {
        FiniteGroupAction {
            dim,
            generators: self.generators.iter().map(&f).collect(),
            orders: self.orders.clone(),
            elements: self.elements.iter().map(&f).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn elements(&self) -> &[Matrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements
            .iter()
            .all(|g| *g == Matrix::identity(self.dim))
    }

    /// Averaging operator `(1/|G|) Σ g`.
    pub fn reynolds_matrix(&self) -> Matrix {
        let mut acc = Matrix::zeros(self.dim, self.dim);
        for g in &self.elements {
            acc = acc.add(g);
        }
        acc.scale(&Rational::new(
            1.into(),
            (self.elements.len() as i64).into(),
        ))
    }

    pub fn reynolds_project(&self, v: &[Rational]) -> Vec<Rational> {
        let mut acc = zero_vec(self.dim);
        for g in &self.elements {
            for (a, x) in acc.iter_mut().zip(g.mul_vec(v)) {
                *a += x;
            }
        }
        let n = Rational::new(1.into(), (self.elements.len() as i64).into());
        acc.into_iter().map(|x| x * &n).collect()
    }

    /// Exact kernel of the stacked `g − id` over the generators.
    pub fn invariant_subspace(&self) -> Vec<Vec<Rational>> {
        let id = Matrix::identity(self.dim);
        let blocks: Vec<Matrix> = self.generators.iter().map(|g| g.sub(&id)).collect();
        if blocks.is_empty() {
            return (0..self.dim)
                .map(|i| crate::exactla::unit_vec(self.dim, i))
                .collect();
        }
        kernel_image(&Matrix::vstack(&blocks, self.dim)).kernel
    }
}
