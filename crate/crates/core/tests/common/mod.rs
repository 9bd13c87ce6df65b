#![allow(dead_code)]

use std::collections::BTreeMap;

use nabcoh::exactla::{rat, span_rank, CoefficientAlgebra, Rational};
use nabcoh::nabtower::{run_tower, section_variety, GradedExtension, Section, TowerStatus};
use nabcoh::random::small_rational;
use num_traits::Zero;
use rand::Rng;

type Assoc = BTreeMap<Vec<usize>, Rational>;

fn commutator(a: &Assoc, b: &Assoc) -> Assoc {
    let mut out = Assoc::new();
    for (u, x) in a {
        for (v, y) in b {
            let mut uv = u.clone();
            uv.extend(v);
            *out.entry(uv).or_insert_with(Rational::zero) += x * y;
            let mut vu = v.clone();
            vu.extend(u);
            *out.entry(vu).or_insert_with(Rational::zero) -= x * y;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Dimensions by weight of the free Lie algebra truncated below `-depth`,
/// from the ranks of all left-normed brackets expanded in the free
/// associative algebra, one multidegree at a time.
pub fn brute_force_free_lie_dims(weights: &[i64], depth: i64) -> BTreeMap<i64, usize> {
    let k = weights.len();
    let mut by_content: BTreeMap<Vec<usize>, Vec<Assoc>> = BTreeMap::new();
    let mut frontier: Vec<(Vec<usize>, Assoc)> = Vec::new();
    for g in 0..k {
        if -weights[g] <= depth {
            frontier.push((vec![g], Assoc::from([(vec![g], rat(1))])));
        }
    }
    while let Some((seq, poly)) = frontier.pop() {
        if poly.is_empty() {
            continue;
        }
        let mut content = vec![0; k];
        for &g in &seq {
            content[g] += 1;
        }
        by_content.entry(content).or_default().push(poly.clone());
        let w: i64 = seq.iter().map(|&g| weights[g]).sum();
        for g in 0..k {
            if w + weights[g] >= -depth {
                let gen = Assoc::from([(vec![g], rat(1))]);
                let mut next = seq.clone();
                next.push(g);
                frontier.push((next, commutator(&gen, &poly)));
            }
        }
    }
    let mut dims = BTreeMap::new();
    for (content, polys) in by_content {
        let words: Vec<Vec<usize>> = {
            let mut all: Vec<Vec<usize>> = polys.iter().flat_map(|p| p.keys().cloned()).collect();
            all.sort();
            all.dedup();
            all
        };
        let vectors: Vec<Vec<Rational>> = polys
            .iter()
            .map(|p| {
                words
                    .iter()
                    .map(|w| p.get(w).cloned().unwrap_or_else(Rational::zero))
                    .collect()
            })
            .collect();
        let r = span_rank(words.len(), &vectors);
        let w: i64 = content
            .iter()
            .zip(weights)
            .map(|(&c, &wt)| c as i64 * wt)
            .sum();
        if r > 0 {
            *dims.entry(w).or_insert(0) += r;
        }
    }
    dims
}

/// A random rational point of the stage-`stage` section variety, when the
/// tower up to that stage is parametrized without residual conditions.
pub fn random_stage_section<R: Rng>(
    rng: &mut R,
    e: &GradedExtension,
    stage: usize,
) -> Option<Section> {
    if stage == 0 {
        return Some(Section::canonical(e));
    }
    let report = run_tower(e, stage, &CoefficientAlgebra::rationals()).ok()?;
    if report.status != TowerStatus::Parametrized {
        return None;
    }
    let par = report.parametrization?;
    let params: Vec<Rational> = par
        .free_parameters()
        .iter()
        .map(|_| {
            if rng.gen_bool(0.3) {
                rat(0)
            } else {
                small_rational(rng)
            }
        })
        .collect();
    let values: Vec<Rational> = par
        .point(&params)
        .iter()
        .map(|a| a.coords()[0].clone())
        .collect();
    let variety = section_variety(e).ok()?;
    // coordinates above the stage stay zero in the parametrization
    Some(variety.section_at(e, &values).truncate(e, stage))
}

/// A random graded Lie section over ℚ, when one exists and the full tower
/// is parametrized.
pub fn random_graded_section<R: Rng>(rng: &mut R, e: &GradedExtension) -> Option<Section> {
    random_stage_section(rng, e, e.depth())
}

pub fn random_kernel_element<R: Rng>(rng: &mut R, e: &GradedExtension) -> Vec<Rational> {
    let mut u = vec![rat(0); e.total().dim()];
    for k in e.n_indices() {
        if rng.gen_bool(0.7) {
            u[k] = small_rational(rng);
        }
    }
    u
}
