//! Seeded random instances for property tests: negatively graded
//! nilpotent algebras (free truncations modulo random ideals), graded
//! modules over them, sign actions, and graded extensions.

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::EquivariantAction;
use crate::exactla::{coordinates_in, quotient_basis, ratio, unit_vec, zero_vec, Matrix, Rational};
use crate::graded::{FiniteGroupAction, GradedVectorSpace};
use crate::lie::{free_lie_basis, terms_from_dense, GradedLieAlgebra, LieModule};
use crate::nabtower::GradedExtension;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero rational with small numerator and denominator.
pub fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-3..=3);
    }
    ratio(n, rng.gen_range(1..=3))
}

pub fn random_vector<R: Rng>(rng: &mut R, support: &[usize], dim: usize) -> Vec<Rational> {
    let mut v = zero_vec(dim);
    for &i in support {
        if rng.gen_bool(0.7) {
            v[i] = small_rational(rng);
        }
    }
    if let (true, Some(&i)) = (v.iter().all(Zero::is_zero), support.choose(rng)) {
        v[i] = small_rational(rng);
    }
    v
}

/// Negatively graded nilpotent algebra whose basis elements carry a
/// multidegree in the generators; every bracket is multihomogeneous.
#[derive(Clone, Debug)]
pub struct Nilpotent {
    pub algebra: GradedLieAlgebra,
    pub multidegree: Vec<Vec<u32>>,
}

impl Nilpotent {
    /// Basis elements sharing a multidegree with `i`.
    pub fn same_multidegree(&self, i: usize) -> Vec<usize> {
        (0..self.multidegree.len())
            .filter(|&j| self.multidegree[j] == self.multidegree[i])
            .collect()
    }

    /// Diagonal automorphism scaling generator `g` by `signs[g]`.
    pub fn sign_matrix(&self, signs: &[i64]) -> Matrix {
        let n = self.algebra.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, md) in self.multidegree.iter().enumerate() {
            let odd: u32 = md
                .iter()
                .zip(signs)
                .filter(|(_, &s)| s < 0)
                .map(|(&d, _)| d)
                .sum();
            m.set(
                i,
                i,
                Rational::from_integer(if odd.is_multiple_of(2) { 1.into() } else { (-1).into() }),
            );
        }
        m
    }

    /// A random sign vector on the generators (possibly all `+1`).
    pub fn random_signs<R: Rng>(&self, rng: &mut R) -> Vec<i64> {
        let k = self.multidegree.first().map_or(0, Vec::len);
        (0..k)
            .map(|_| if rng.gen_bool(0.5) { -1 } else { 1 })
            .collect()
    }
}

/// Closes the span of homogeneous vectors under bracketing with the algebra.
pub fn ideal_closure(l: &GradedLieAlgebra, seeds: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = l.dim();
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    let mut queue: Vec<Vec<Rational>> = seeds.to_vec();
    while let Some(v) = queue.pop() {
        if v.iter().all(Zero::is_zero) || coordinates_in(n, &basis, &v).is_some() {
            continue;
        }
        for b in 0..n {
            queue.push(l.bracket(&unit_vec(n, b), &v));
        }
        basis.push(v);
    }
    basis
}

/// Multihomogeneous ideal generated by up to `max_seeds` random elements.
pub fn random_ideal<R: Rng>(rng: &mut R, u: &Nilpotent, max_seeds: usize) -> Vec<Vec<Rational>> {
    let n = u.algebra.dim();
    if n == 0 {
        return Vec::new();
    }
    let count = rng.gen_range(0..=max_seeds);
    let seeds: Vec<Vec<Rational>> = (0..count)
        .map(|_| {
            let support = u.same_multidegree(rng.gen_range(0..n));
            random_vector(rng, &support, n)
        })
        .collect();
    ideal_closure(&u.algebra, &seeds)
}

/// Free truncation on 1–3 generators of weight −1 or −2, modulo a random
/// multihomogeneous ideal, with at most `max_dim` basis elements. Seeds are
/// added until the quotient is small enough.
pub fn random_nilpotent<R: Rng>(rng: &mut R, max_dim: usize, max_weight: i64) -> Nilpotent {
    loop {
        let k = rng.gen_range(1..=3);
        let gens: Vec<(String, i64)> = (0..k)
            .map(|i| {
                (
                    ["x", "y", "w"][i].to_string(),
                    if rng.gen_bool(0.75) { -1 } else { -2 },
                )
            })
            .collect();
        let mut depth = rng.gen_range(2..=max_weight.max(2));
        let mut free = free_lie_basis(&gens, depth).expect("negative generators");
        while free.algebra().dim() > 40 {
            depth -= 1;
            free = free_lie_basis(&gens, depth).expect("negative generators");
        }
        let multidegree: Vec<Vec<u32>> = free
            .words()
            .iter()
            .map(|w| {
                (0..k)
                    .map(|g| w.iter().filter(|&&x| x == g).count() as u32)
                    .collect()
            })
            .collect();
        let full = Nilpotent {
            algebra: free.algebra().clone(),
            multidegree,
        };
        let n = full.algebra.dim();
        let mut seeds: Vec<Vec<Rational>> = (0..rng.gen_range(0..=2))
            .map(|_| {
                let support = full.same_multidegree(rng.gen_range(0..n));
                random_vector(rng, &support, n)
            })
            .collect();
        let q = loop {
            let ideal = ideal_closure(&full.algebra, &seeds);
            let (q, _) = full
                .algebra
                .quotient_by_ideal(&ideal)
                .expect("closure is an ideal");
            if q.dim() <= max_dim {
                break q;
            }
            let pick = full
                .algebra
                .space()
                .index_of(q.name(rng.gen_range(0..q.dim())))
                .expect("kept word");
            let support = full.same_multidegree(pick);
            seeds.push(random_vector(rng, &support, n));
        };
        if q.dim() == 0 {
            continue;
        }
        let multidegree = (0..q.dim())
            .map(|i| {
                full.multidegree[full.algebra.space().index_of(q.name(i)).expect("kept word")]
                    .clone()
            })
            .collect();
        return Nilpotent {
            algebra: q,
            multidegree,
        };
    }
}

/// Random graded module over `h0 ⊕ u` (grading element at index 0): a
/// direct sum of weight-shifted adjoint quotients and trivial pieces.
pub fn random_module<R: Rng>(rng: &mut R, u: &Nilpotent, max_dim: usize) -> LieModule {
    let l = u.algebra.with_grading_element("h0").expect("fresh name");
    let mut module: Option<LieModule> = None;
    let mut pieces = 0;
    while module.as_ref().map_or(0, LieModule::dim) < max_dim && pieces < 3 {
        pieces += 1;
        let room = max_dim - module.as_ref().map_or(0, LieModule::dim);
        let piece = if rng.gen_bool(0.6) {
            shifted_adjoint_quotient(rng, u, &l, room)
        } else {
            None
        };
        let piece = piece.unwrap_or_else(|| {
            let d = rng.gen_range(1..=room.min(2));
            let space =
                GradedVectorSpace::new((0..d).map(|i| (format!("v{i}"), -rng.gen_range(1..=6i64))))
                    .unwrap();
            LieModule::trivial(&l, space)
        });
        module = Some(match module {
            None => piece,
            Some(m) => m
                .direct_sum(&piece, &format!("_{pieces}"))
                .expect("same algebra"),
        });
        if rng.gen_bool(0.4) {
            break;
        }
    }
    module.expect("at least one piece")
}

fn shifted_adjoint_quotient<R: Rng>(
    rng: &mut R,
    u: &Nilpotent,
    l: &GradedLieAlgebra,
    room: usize,
) -> Option<LieModule> {
    let ideal = random_ideal(rng, u, 2);
    let (q, proj) = u.algebra.quotient_by_ideal(&ideal).ok()?;
    if q.dim() == 0 || q.dim() > room {
        return None;
    }
    let shift = -rng.gen_range(0..=2i64);
    let n = u.algebra.dim();
    let kept: Vec<usize> = (0..q.dim())
        .map(|i| u.algebra.space().index_of(q.name(i)).expect("kept"))
        .collect();
    let space =
        GradedVectorSpace::new((0..q.dim()).map(|i| (format!("a{i}"), q.weight(i) + shift)))
            .ok()?;
    let mut entries = Vec::new();
    for v in 0..q.dim() {
        entries.push((
            0,
            v,
            vec![(v, Rational::from_integer(space.weight(v).into()))],
        ));
    }
    for a in 0..n {
        for (v, &kv) in kept.iter().enumerate() {
            let br = u.algebra.bracket(&unit_vec(n, a), &unit_vec(n, kv));
            entries.push((a + 1, v, terms_from_dense(&proj.mul_vec(&br))));
        }
    }
    Some(LieModule::from_action(l.clone(), space, entries))
}

/// Trivial module with nonzero weights and a sign action of order 2
/// compatible with a sign automorphism of the algebra.
pub fn random_equivariant_trivial<R: Rng>(
    rng: &mut R,
    u: &Nilpotent,
    max_dim: usize,
) -> (LieModule, Option<EquivariantAction>) {
    let l = u.algebra.with_grading_element("h0").expect("fresh name");
    let d = rng.gen_range(1..=max_dim);
    let space = GradedVectorSpace::new((0..d).map(|i| (format!("v{i}"), -rng.gen_range(1..=6i64))))
        .unwrap();
    let module = LieModule::trivial(&l, space);
    if rng.gen_bool(0.4) {
        return (module, None);
    }
    let signs = u.random_signs(rng);
    let ga = block_with_h0(&u.sign_matrix(&signs));
    let mut gv = Matrix::identity(d);
    for i in 0..d {
        if rng.gen_bool(0.5) {
            gv.set(i, i, Rational::from_integer((-1).into()));
        }
    }
    let action = EquivariantAction::new(l.dim(), d, vec![(ga, gv, 2)]).expect("commuting signs");
    (module, Some(action))
}

/// `diag(1, m)`.
pub fn block_with_h0(m: &Matrix) -> Matrix {
    let n = m.rows() + 1;
    let mut out = Matrix::identity(n);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i + 1, j + 1, m.get(i, j).clone());
        }
    }
    out
}

/// Random extension `0 → n → h0 ⊕ u → h0 ⊕ u/n → 0` with `n` a nonzero
/// proper multihomogeneous ideal, in a basis adapted to `n`, optionally
/// with a sign action of order 2.
pub fn random_extension<R: Rng>(
    rng: &mut R,
    max_dim: usize,
    max_weight: i64,
    with_group: bool,
) -> GradedExtension {
    loop {
        let u = random_nilpotent(rng, max_dim, max_weight);
        let n_basis = random_ideal(rng, &u, 2);
        let dim = u.algebra.dim();
        if n_basis.is_empty() || n_basis.len() == dim {
            continue;
        }
        let complement = quotient_basis(dim, &n_basis).expect("independent");
        let mut cols = complement.clone();
        let mut names: Vec<String> = complement
            .iter()
            .map(|c| {
                u.algebra
                    .name(c.iter().position(|x| !x.is_zero()).expect("unit"))
                    .to_string()
            })
            .collect();
        let mut n_sorted = n_basis.clone();
        n_sorted.sort_by_key(|v| {
            -u.algebra
                .space()
                .homogeneous_weight(v)
                .expect("homogeneous")
        });
        for (i, v) in n_sorted.into_iter().enumerate() {
            cols.push(v);
            names.push(format!("n{}", i + 1));
        }
        let p = Matrix::from_columns(dim, &cols).expect("lengths");
        let adapted = u
            .algebra
            .change_basis(&p, names)
            .expect("homogeneous basis");
        let total = adapted.with_grading_element("h0").expect("fresh name");
        let mut kernel = vec![false; total.dim()];
        for k in kernel.iter_mut().skip(1 + complement.len()) {
            *k = true;
        }
        let group = if with_group {
            let s = u.sign_matrix(&u.random_signs(rng));
            let conj = p.inverse().expect("basis").mul(&s).mul(&p);
            (!conj.sub(&Matrix::identity(dim)).is_zero()).then(|| {
                FiniteGroupAction::from_generators(total.dim(), vec![(block_with_h0(&conj), 2)])
                    .expect("involution")
            })
        } else {
            None
        };
        return GradedExtension::new(total, kernel, group).expect("shapes");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{validate_lie, validate_module};
    use crate::nabtower::validate_extension;

    #[test]
    fn generated_instances_validate() {
        let mut rng = seeded(7);
        for _ in 0..20 {
            let u = random_nilpotent(&mut rng, 6, 4);
            let l = u.algebra.with_grading_element("h0").unwrap();
            assert!(validate_lie(&l).passed());
            let m = random_module(&mut rng, &u, 4);
            assert!(validate_module(&m).passed(), "{}", validate_module(&m));
            let e = random_extension(&mut rng, 6, 4, true);
            assert!(
                validate_extension(&e).passed(),
                "{}",
                validate_extension(&e)
            );
        }
    }
}
