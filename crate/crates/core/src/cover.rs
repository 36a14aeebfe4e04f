//! Covering a target cone by group translates of a candidate domain.
//!
//! This is a spot-checker: it certifies covering only for a supplied ray
//! sample and a finite ball of group words.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::cone::{Cone, Membership};
use crate::error::check_rank;
use crate::linalg;
use crate::{Error, Result};

/// Unimodular integer matrix acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LatticeAutomorphism {
    matrix: Vec<Vec<i64>>,
}

impl LatticeAutomorphism {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.len();
        if n == 0 || matrix.iter().any(|row| row.len() != n) {
            return Err(Error::NotUnimodular("matrix is not square".into()));
        }
        let det = linalg::determinant(&matrix);
        if linalg::inverse_unimodular(&matrix).is_none() {
            return Err(Error::NotUnimodular(format!("determinant {det}")));
        }
        Ok(Self { matrix })
    }

    pub fn identity(rank: usize) -> Self {
        Self {
            matrix: linalg::identity(rank),
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Self {
            matrix: linalg::inverse_unimodular(&self.matrix).expect("checked unimodular"),
        }
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        check_rank(self.rank(), v.len())?;
        linalg::mat_vec(&self.matrix, v)
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank(), other.rank())?;
        Ok(Self {
            matrix: linalg::mat_mul(&self.matrix, &other.matrix)?,
        })
    }

    /// Whether the image of `cone` is `cone` itself.
    pub fn preserves(&self, cone: &Cone) -> Result<bool> {
        Ok(cone.image(&self.matrix)? == *cone)
    }
}

/// A letter `k >= 0` stands for generator `k`, `-k - 1` for its inverse.
pub type Letter = i32;

fn letter_name(l: Letter) -> String {
    if l >= 0 {
        format!("g{l}")
    } else {
        format!("g{}^-1", -l - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupElement {
    pub matrix: LatticeAutomorphism,
    pub word: Vec<Letter>,
}

impl GroupElement {
    /// `"id"` for the empty word, otherwise letters joined by `*`.
    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "id".into()
        } else {
            self.word.iter().map(|&l| letter_name(l)).collect::<Vec<_>>().join("*")
        }
    }
}

/// All distinct products of at most `depth` generators and inverses, sorted
/// by word length and then by matrix. Each matrix keeps the first word that
/// reaches it.
pub fn orbit_ball(generators: &[LatticeAutomorphism], depth: usize) -> Result<Vec<GroupElement>> {
    let rank = match generators.first() {
        Some(g) => g.rank(),
        None => {
            return Err(Error::invalid("generators", "at least one generator is required"));
        }
    };
    let mut letters: Vec<(Letter, LatticeAutomorphism)> = Vec::new();
    for (k, g) in generators.iter().enumerate() {
        check_rank(rank, g.rank())?;
        let g = LatticeAutomorphism::new(g.matrix.clone())?;
        letters.push((k as Letter, g.inverse()));
        letters.push((k as Letter, g));
    }
    // Generator before inverse.
    letters.sort_by_key(|(k, _)| *k);
    let letters: Vec<(Letter, LatticeAutomorphism)> = letters
        .chunks(2)
        .flat_map(|pair| {
            let k = pair[0].0;
            [(k, pair[1].1.clone()), (-k - 1, pair[0].1.clone())]
        })
        .collect();

    let identity = GroupElement {
        matrix: LatticeAutomorphism::identity(rank),
        word: Vec::new(),
    };
    let mut seen: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
    seen.insert(identity.matrix.matrix.clone());
    let mut ball = vec![identity.clone()];
    let mut layer = vec![identity];
    for _ in 0..depth {
        let mut next = Vec::new();
        for el in &layer {
            for (l, m) in &letters {
                let product = el.matrix.compose(m)?;
                if seen.insert(product.matrix.clone()) {
                    let mut word = el.word.clone();
                    word.push(*l);
                    next.push(GroupElement { matrix: product, word });
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort_by(|a, b| a.matrix.matrix.cmp(&b.matrix.matrix));
        ball.extend(next.iter().cloned());
        layer = next;
    }
    Ok(ball)
}

/// A rational polyhedral cone inside the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateDomain {
    pi: Cone,
}

impl CandidateDomain {
    pub fn new(pi: Cone, target: &Cone) -> Result<Self> {
        check_rank(target.rank(), pi.rank())?;
        for ray in pi.rays() {
            if !target.contains_int(ray, Membership::Closed)? {
                return Err(Error::invalid(
                    "candidate",
                    format!("generator {ray:?} lies outside the target cone"),
                ));
            }
        }
        Ok(Self { pi })
    }

    pub fn cone(&self) -> &Cone {
        &self.pi
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub ray: Vec<i64>,
    pub word: String,
    pub matrix: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub depth: usize,
    pub rays_tested: usize,
    pub covered: usize,
    pub uncovered: Vec<Vec<i64>>,
    pub witnesses: Vec<Witness>,
    pub warnings: Vec<String>,
}

/// Assigns each ray the first element `g` of `ball` with `ray` in `g(pi)`.
///
/// Rays must lie in the interior of `target`. Rays with no witness are
/// reported as uncovered with a warning.
pub fn covers(
    pi: &CandidateDomain,
    ball: &[GroupElement],
    target: &Cone,
    rays: &[Vec<i64>],
    depth: usize,
) -> Result<CoverReport> {
    check_rank(target.rank(), pi.cone().rank())?;
    for ray in rays {
        check_rank(target.rank(), ray.len())?;
        if !target.contains_int(ray, Membership::Open)? {
            return Err(Error::RayOutsideTarget(ray.clone()));
        }
    }
    let translates = ball
        .iter()
        .map(|g| pi.cone().image(g.matrix.matrix()))
        .collect::<Result<Vec<_>>>()?;
    let inverses: Vec<LatticeAutomorphism> = ball.iter().map(|g| g.matrix.inverse()).collect();

    let found = rays
        .par_iter()
        .map(|ray| -> Result<Option<usize>> {
            for (i, cone) in translates.iter().enumerate() {
                if cone.contains_int(ray, Membership::Closed)? {
                    // Re-check through the inverse image.
                    let back = inverses[i].apply(ray)?;
                    if !pi.cone().contains_int(&back, Membership::Closed)? {
                        return Err(Error::Atlas(format!("witness for {ray:?} failed verification")));
                    }
                    return Ok(Some(i));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = CoverReport {
        depth,
        rays_tested: rays.len(),
        covered: 0,
        uncovered: Vec::new(),
        witnesses: Vec::new(),
        warnings: Vec::new(),
    };
    for (ray, hit) in rays.iter().zip(found) {
        match hit {
            Some(i) => {
                report.covered += 1;
                report.witnesses.push(Witness {
                    ray: ray.clone(),
                    word: ball[i].word_string(),
                    matrix: ball[i].matrix.matrix().to_vec(),
                });
            }
            None => {
                report
                    .warnings
                    .push(format!("ray {ray:?} not covered by the word ball of depth {depth}"));
                report.uncovered.push(ray.clone());
            }
        }
    }
    Ok(report)
}

/// Pairs `(i, j)`, `i < j`, of ball indices whose translates of `pi` have
/// overlapping interiors.
pub fn overlap_audit(pi: &CandidateDomain, ball: &[GroupElement]) -> Result<Vec<(usize, usize)>> {
    let translates = ball
        .iter()
        .map(|g| pi.cone().image(g.matrix.matrix()))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(usize, usize)> = (0..ball.len())
        .flat_map(|i| (i + 1..ball.len()).map(move |j| (i, j)))
        .collect();
    let hits = pairs
        .par_iter()
        .map(|&(i, j)| Ok(translates[i].intersect(&translates[j])?.is_full_dimensional()))
        .collect::<Result<Vec<bool>>>()?;
    Ok(pairs
        .into_iter()
        .zip(hits)
        .filter_map(|(p, hit)| hit.then_some(p))
        .collect())
}

/// All integer vectors with every coordinate in `[min, max]`, in lex order.
pub fn grid_rays(rank: usize, min: i64, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|v| {
                (min..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// The hyperbolic example on `Z^2`: `M = [[2, 1], [1, 1]]`, the candidate
/// `cone((0,1),(1,1))`, and the rational target spanned by the Fibonacci
/// approximants `(89, 55)` and `(-55, 89)` of the eigenrays of `M`.
pub fn fibonacci_example() -> (LatticeAutomorphism, CandidateDomain, Cone) {
    let m = LatticeAutomorphism::new(vec![vec![2, 1], vec![1, 1]]).expect("unimodular");
    let target = Cone::from_rays(2, &[vec![89, 55], vec![-55, 89]]).expect("target");
    let pi = Cone::from_rays(2, &[vec![0, 1], vec![1, 1]]).expect("candidate");
    let pi = CandidateDomain::new(pi, &target).expect("candidate inside target");
    (m, pi, target)
}
