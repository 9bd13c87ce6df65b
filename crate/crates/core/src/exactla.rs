//! Exact scalars, dense matrices over the rationals and finite-dimensional
//! commutative coefficient algebras.
//!
//! Everything downstream reduces to the kernels in this module: row
//! reduction with a fixed pivot rule, affine solves, kernels, images and
//! quotient complements. No floating point is used anywhere.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms.
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("cannot parse rational {0:?}: write exact values such as \"1/2\"")]
    Parse(String),
    #[error("invalid coefficient algebra: {0}")]
    InvalidAlgebra(String),
    #[error("elements belong to different coefficient algebras")]
    ParentMismatch,
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`. Decimal notation is rejected.
pub fn parse_rational(text: &str) -> Result<Rational, ExactError> {
    let t = text.trim();
    let ok = !t.is_empty()
        && t.chars()
            .all(|c| c.is_ascii_digit() || c == '-' || c == '+' || c == '/');
    if !ok {
        return Err(ExactError::Parse(text.to_string()));
    }
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| ExactError::Parse(text.to_string()))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| ExactError::Parse(text.to_string()))?;
    if den.is_zero() {
        return Err(ExactError::Parse(text.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn zero_vec(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vec<Rational> {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_scaled(target: &mut [Rational], coef: &Rational, v: &[Rational]) {
    if coef.is_zero() {
        return;
    }
    for (t, x) in target.iter_mut().zip(v) {
        if !x.is_zero() {
            *t += coef * x;
        }
    }
}

pub fn scale_vec(coef: &Rational, v: &[Rational]) -> Vec<Rational> {
    v.iter().map(|x| coef * x).collect()
}

pub fn sub_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add_vec(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: zero_vec(rows * cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Dimension("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a matrix with `rows` rows whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Result<Self, ExactError> {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(ExactError::Dimension(format!(
                    "column {j} has length {}, expected {rows}",
                    col.len()
                )));
            }
            for (i, x) in col.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect();
        Matrix::from_rows(rows).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.data[i * self.cols + j] = value;
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) {
        self.data[i * self.cols + j] += value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Rational>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, col: &[Rational]) {
        for (i, x) in col.iter().enumerate() {
            self.set(i, j, x.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: add_vec(&self.data, &other.data),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: sub_vec(&self.data, &other.data),
        }
    }

    pub fn scale(&self, coef: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: scale_vec(coef, &self.data),
        }
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[Matrix], cols: usize) -> Matrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            rows += b.rows;
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Reduced row echelon form. The pivot in each column is the first row,
    /// scanning downward from the current position, with a nonzero entry.
    pub fn echelon(&self) -> Echelon {
        let mut a = self.clone();
        let mut transform = Matrix::identity(self.rows);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a.get(i, c).is_zero()) else {
                continue;
            };
            a.swap_rows(p, r);
            transform.swap_rows(p, r);
            let inv = a.get(r, c).recip();
            a.scale_row(r, &inv);
            transform.scale_row(r, &inv);
            for i in 0..a.rows {
                if i != r && !a.get(i, c).is_zero() {
                    let f = a.get(i, c).clone();
                    a.sub_row_multiple(i, r, &f);
                    transform.sub_row_multiple(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon {
            reduced: a,
            pivots,
            transform,
        }
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, f: &Rational) {
        for c in 0..self.cols {
            let x = &mut self.data[i * self.cols + c];
            if !x.is_zero() {
                *x *= f;
            }
        }
    }

    /// row_i -= f * row_j
    fn sub_row_multiple(&mut self, i: usize, j: usize, f: &Rational) {
        for c in 0..self.cols {
            let y = self.data[j * self.cols + c].clone();
            if !y.is_zero() {
                self.data[i * self.cols + c] -= f * y;
            }
        }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let e = self.echelon();
        (e.pivots.len() == self.rows).then_some(e.transform)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(format_rational).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Result of row reduction: `transform * original = reduced`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub reduced: Matrix,
    pub pivots: Vec<usize>,
    pub transform: Matrix,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.reduced.cols())
            .filter(|c| !self.pivots.contains(c))
            .collect()
    }

    /// Kernel basis: one vector per free column, with that coordinate set to 1.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let n = self.reduced.cols();
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = unit_vec(n, f);
                for (row, &p) in self.pivots.iter().enumerate() {
                    v[p] = -self.reduced.get(row, f).clone();
                }
                v
            })
            .collect()
    }
}

/// A particular solution of `Mx = b` together with a kernel basis of `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
}

/// Solves `Mx = b` exactly. Free variables are set to zero in the
/// particular solution. Returns `Ok(None)` for inconsistent systems.
pub fn solve_affine(m: &Matrix, b: &[Rational]) -> Result<Option<AffineSolution>, ExactError> {
    if b.len() != m.rows() {
        return Err(ExactError::Dimension(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            m.rows()
        )));
    }
    let e = m.echelon();
    let tb = e.transform.mul_vec(b);
    if tb[e.rank()..].iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }
    let mut particular = zero_vec(m.cols());
    for (row, &p) in e.pivots.iter().enumerate() {
        particular[p] = tb[row].clone();
    }
    Ok(Some(AffineSolution {
        particular,
        kernel: e.kernel(),
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelImage {
    pub kernel: Vec<Vec<Rational>>,
    /// Pivot columns of the original matrix.
    pub image: Vec<Vec<Rational>>,
    pub rank: usize,
}

pub fn kernel_image(m: &Matrix) -> KernelImage {
    let e = m.echelon();
    KernelImage {
        kernel: e.kernel(),
        image: e.pivots.iter().map(|&p| m.column(p)).collect(),
        rank: e.rank(),
    }
}

/// Completes the span of `subspace` to a basis of the ambient space using
/// standard basis vectors at the non-pivot coordinates of the row-reduced
/// subspace.
pub fn quotient_basis(
    ambient: usize,
    subspace: &[Vec<Rational>],
) -> Result<Vec<Vec<Rational>>, ExactError> {
    if let Some(v) = subspace.iter().find(|v| v.len() != ambient) {
        return Err(ExactError::Dimension(format!(
            "subspace vector of length {} in ambient dimension {ambient}",
            v.len()
        )));
    }
    if subspace.is_empty() {
        return Ok((0..ambient).map(|i| unit_vec(ambient, i)).collect());
    }
    let e = Matrix::from_rows(subspace.to_vec())?.echelon();
    Ok(e.free_columns()
        .into_iter()
        .map(|f| unit_vec(ambient, f))
        .collect())
}

/// Rank of the span of a list of vectors of common length `n`.
pub fn span_rank(n: usize, vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_columns(n, vectors)
        .expect("uniform vector length")
        .rank()
}

/// Coordinates of `v` against `basis` (which must be independent), if `v`
/// lies in the span.
pub fn coordinates_in(n: usize, basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    if basis.is_empty() {
        return is_zero_vec(v).then(Vec::new);
    }
    let m = Matrix::from_columns(n, basis).ok()?;
    solve_affine(&m, v).ok().flatten().map(|s| s.particular)
}

/// Basis of the intersection of the spans of two families in `ℚ^n`.
pub fn intersect_spans(n: usize, a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut cols: Vec<Vec<Rational>> = a.to_vec();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x).collect::<Vec<_>>()));
    let m = Matrix::from_columns(n, &cols).expect("uniform vector length");
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for k in kernel_image(&m).kernel {
        let mut v = zero_vec(n);
        for (coef, basis_vec) in k.iter().zip(a) {
            add_scaled(&mut v, coef, basis_vec);
        }
        out.push(v);
    }
    independent_subset(n, &out)
}

/// Keeps the vectors that increase the rank, in input order.
pub fn independent_subset(n: usize, vectors: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut kept: Vec<Vec<Rational>> = Vec::new();
    for v in vectors {
        let mut trial = kept.clone();
        trial.push(v.clone());
        if span_rank(n, &trial) > kept.len() {
            kept = trial;
        }
    }
    kept
}

/// Finite-dimensional commutative associative unital ℚ-algebra given by
/// structure constants `e_i e_j = Σ_k table[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientAlgebra {
    name: String,
    basis: Vec<String>,
    table: Vec<Vec<Vec<Rational>>>,
    unit: Vec<Rational>,
}

impl CoefficientAlgebra {
    pub fn new(
        name: impl Into<String>,
        basis: Vec<String>,
        table: Vec<Vec<Vec<Rational>>>,
        unit: Vec<Rational>,
    ) -> Result<Self, ExactError> {
        let n = basis.len();
        if n == 0 {
            return Err(ExactError::InvalidAlgebra(
                "dimension must be positive".into(),
            ));
        }
        if unit.len() != n
            || table.len() != n
            || table
                .iter()
                .any(|r| r.len() != n || r.iter().any(|v| v.len() != n))
        {
            return Err(ExactError::InvalidAlgebra(
                "table shape does not match basis".into(),
            ));
        }
        let alg = CoefficientAlgebra {
            name: name.into(),
            basis,
            table,
            unit,
        };
        for i in 0..n {
            for j in 0..n {
                if alg.table[i][j] != alg.table[j][i] {
                    return Err(ExactError::InvalidAlgebra(format!(
                        "not commutative on ({}, {})",
                        alg.basis[i], alg.basis[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = alg.mul_coords(&alg.table[i][j], &unit_vec(n, k));
                    let right = alg.mul_coords(&unit_vec(n, i), &alg.table[j][k]);
                    if left != right {
                        return Err(ExactError::InvalidAlgebra(format!(
                            "not associative on ({}, {}, {})",
                            alg.basis[i], alg.basis[j], alg.basis[k]
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            if alg.mul_coords(&alg.unit, &unit_vec(n, i)) != unit_vec(n, i) {
                return Err(ExactError::InvalidAlgebra(format!(
                    "unit does not fix {}",
                    alg.basis[i]
                )));
            }
        }
        Ok(alg)
    }

    pub fn rationals() -> Self {
        Self::truncated_polynomial("rationals", "t", 1)
    }

    /// ℚ[ε]/(ε²).
    pub fn dual_numbers() -> Self {
        Self::truncated_polynomial("dual", "eps", 2)
    }

    /// ℚ × ℚ with idempotent basis.
    pub fn split() -> Self {
        let e = |i: usize| unit_vec(2, i);
        let z = zero_vec(2);
        CoefficientAlgebra::new(
            "split",
            vec!["e1".into(), "e2".into()],
            vec![vec![e(0), z.clone()], vec![z, e(1)]],
            vec![rat(1), rat(1)],
        )
        .expect("ℚ×ℚ is a commutative algebra")
    }

    /// ℚ[t]/(t^n) with basis 1, t, …, t^{n-1}.
    pub fn truncated_polynomial(name: &str, var: &str, n: usize) -> Self {
        let basis = (0..n)
            .map(|k| match k {
                0 => "1".to_string(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            })
            .collect();
        let table = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i + j < n {
                            unit_vec(n, i + j)
                        } else {
                            zero_vec(n)
                        }
                    })
                    .collect()
            })
            .collect();
        CoefficientAlgebra::new(name, basis, table, unit_vec(n, 0))
            .expect("truncated polynomial ring is a commutative algebra")
    }

    /// Built-in algebras: `rationals`, `dual`, `split`, `trunc3`.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "rationals" | "Q" => Some(Self::rationals()),
            "dual" => Some(Self::dual_numbers()),
            "split" => Some(Self::split()),
            "trunc3" => Some(Self::truncated_polynomial("trunc3", "t", 3)),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    /// `table()[i][j]` holds the coordinates of `e_i e_j`.
    pub fn table(&self) -> &[Vec<Vec<Rational>>] {
        &self.table
    }

    pub fn unit_coords(&self) -> &[Rational] {
        &self.unit
    }

    pub fn mul_coords(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = self.dim();
        let mut out = zero_vec(n);
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                add_scaled(&mut out, &xy, &self.table[i][j]);
            }
        }
        out
    }

    /// Matrix of multiplication by `a` as a ℚ-linear map of the algebra.
    pub fn multiplication_matrix(&self, a: &[Rational]) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|j| self.mul_coords(a, &unit_vec(n, j)))
            .collect();
        Matrix::from_columns(n, &cols).expect("square")
    }
}

/// Element of a coefficient algebra, carrying its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    algebra: Arc<CoefficientAlgebra>,
    coords: Vec<Rational>,
}

impl AlgebraElement {
    pub fn new(
        algebra: &Arc<CoefficientAlgebra>,
        coords: Vec<Rational>,
    ) -> Result<Self, ExactError> {
        if coords.len() != algebra.dim() {
            return Err(ExactError::Dimension(format!(
                "{} coordinates for an algebra of dimension {}",
                coords.len(),
                algebra.dim()
            )));
        }
        Ok(AlgebraElement {
            algebra: Arc::clone(algebra),
            coords,
        })
    }

    pub fn zero(algebra: &Arc<CoefficientAlgebra>) -> Self {
        AlgebraElement {
            algebra: Arc::clone(algebra),
            coords: zero_vec(algebra.dim()),
        }
    }

    pub fn one(algebra: &Arc<CoefficientAlgebra>) -> Self {
        AlgebraElement {
            algebra: Arc::clone(algebra),
            coords: algebra.unit.clone(),
        }
    }

    pub fn from_rational(algebra: &Arc<CoefficientAlgebra>, q: &Rational) -> Self {
        AlgebraElement {
            algebra: Arc::clone(algebra),
            coords: scale_vec(q, &algebra.unit),
        }
    }

    pub fn algebra(&self) -> &Arc<CoefficientAlgebra> {
        &self.algebra
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coords)
    }

    fn check_parent(&self, other: &AlgebraElement) -> Result<(), ExactError> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(ExactError::ParentMismatch)
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, ExactError> {
        self.check_parent(other)?;
        Ok(AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            coords: add_vec(&self.coords, &other.coords),
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement, ExactError> {
        self.check_parent(other)?;
        Ok(AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            coords: sub_vec(&self.coords, &other.coords),
        })
    }

    pub fn scale(&self, q: &Rational) -> AlgebraElement {
        AlgebraElement {
            algebra: Arc::clone(&self.algebra),
            coords: scale_vec(q, &self.coords),
        }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coords
            .iter()
            .zip(self.algebra.basis_names())
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, b)| {
                if b == "1" {
                    format_rational(c)
                } else {
                    format!("{}*{b}", format_rational(c))
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Product through the multiplication table.
pub fn algebra_mul(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, ExactError> {
    a.check_parent(b)?;
    Ok(AlgebraElement {
        algebra: Arc::clone(&a.algebra),
        coords: a.algebra.mul_coords(&a.coords, &b.coords),
    })
}

pub fn abs_max(v: &[Rational]) -> Rational {
    v.iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn solve_identity() {
        let s = solve_affine(&Matrix::identity(2), &v(&[1, 2]))
            .unwrap()
            .unwrap();
        assert_eq!(s.particular, v(&[1, 2]));
        assert!(s.kernel.is_empty());
    }

    #[test]
    fn solve_zero_map() {
        let s = solve_affine(&Matrix::zeros(2, 2), &v(&[0, 0]))
            .unwrap()
            .unwrap();
        assert_eq!(s.particular, v(&[0, 0]));
        assert_eq!(s.kernel.len(), 2);
    }

    #[test]
    fn solve_single_row() {
        let s = solve_affine(&Matrix::from_i64(&[&[1, 1]]), &v(&[3]))
            .unwrap()
            .unwrap();
        assert_eq!(s.particular, v(&[3, 0]));
        assert_eq!(s.kernel, vec![v(&[-1, 1])]);
    }

    #[test]
    fn solve_inconsistent_and_mismatch() {
        let m = Matrix::from_i64(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve_affine(&m, &v(&[1, 3])).unwrap(), None);
        assert!(matches!(
            solve_affine(&m, &v(&[1])),
            Err(ExactError::Dimension(_))
        ));
    }

    #[test]
    fn kernel_image_examples() {
        let ki = kernel_image(&Matrix::identity(3));
        assert_eq!((ki.rank, ki.kernel.len()), (3, 0));
        let ki = kernel_image(&Matrix::zeros(2, 3));
        assert_eq!((ki.rank, ki.kernel.len()), (0, 3));
        let ki = kernel_image(&Matrix::from_i64(&[&[1, 2], &[2, 4]]));
        assert_eq!(ki.rank, 1);
        assert_eq!(ki.kernel, vec![v(&[-2, 1])]);
        assert_eq!(ki.image, vec![v(&[1, 2])]);
    }

    #[test]
    fn quotient_basis_examples() {
        assert_eq!(quotient_basis(2, &[v(&[1, 0])]).unwrap(), vec![v(&[0, 1])]);
        assert_eq!(
            quotient_basis(3, &[]).unwrap(),
            vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])]
        );
        assert_eq!(quotient_basis(2, &[v(&[1, 1])]).unwrap(), vec![v(&[0, 1])]);
    }

    #[test]
    fn rational_text() {
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("4").unwrap(), rat(4));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&ratio(6, 3)), "2");
        assert_eq!(format_rational(&ratio(-1, 2)), "-1/2");
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_i64(&[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        assert!(Matrix::from_i64(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn dual_number_products() {
        let a = Arc::new(CoefficientAlgebra::dual_numbers());
        let eps = AlgebraElement::new(&a, v(&[0, 1])).unwrap();
        assert!(algebra_mul(&eps, &eps).unwrap().is_zero());
        let p = AlgebraElement::new(&a, v(&[1, 1])).unwrap();
        let m = AlgebraElement::new(&a, v(&[1, -1])).unwrap();
        assert_eq!(algebra_mul(&p, &m).unwrap(), AlgebraElement::one(&a));
        let x = AlgebraElement::new(&a, v(&[3, -7])).unwrap();
        assert_eq!(algebra_mul(&AlgebraElement::one(&a), &x).unwrap(), x);
    }

    #[test]
    fn parent_mismatch() {
        let a = Arc::new(CoefficientAlgebra::dual_numbers());
        let b = Arc::new(CoefficientAlgebra::split());
        let x = AlgebraElement::one(&a);
        let y = AlgebraElement::one(&b);
        assert_eq!(algebra_mul(&x, &y), Err(ExactError::ParentMismatch));
    }

    #[test]
    fn rejects_broken_tables() {
        // e1*e2 = e1 but e2*e1 = e2
        let bad = CoefficientAlgebra::new(
            "bad",
            vec!["1".into(), "e".into()],
            vec![vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[0, 1]), v(&[1, 0])]],
            v(&[1, 0]),
        );
        assert!(bad.is_ok(), "ℚ[e]/(e²-1) is fine");
        let noncomm = CoefficientAlgebra::new(
            "noncomm",
            vec!["1".into(), "e".into()],
            vec![vec![v(&[1, 0]), v(&[0, 1])], vec![v(&[0, 0]), v(&[0, 0])]],
            v(&[1, 0]),
        );
        assert!(matches!(noncomm, Err(ExactError::InvalidAlgebra(_))));
        // commutative but not associative: e*e = 1 + e with a wrong unit row
        let nonassoc = CoefficientAlgebra::new(
            "nonassoc",
            vec!["a".into(), "b".into()],
            vec![vec![v(&[0, 1]), v(&[1, 0])], vec![v(&[1, 0]), v(&[1, 0])]],
            v(&[1, 0]),
        );
        assert!(matches!(nonassoc, Err(ExactError::InvalidAlgebra(_))));
    }
}
