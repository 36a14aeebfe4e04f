//! Rational polyhedral cones with both generator and half-space descriptions.
//!
//! Every [`Cone`] carries a canonical pair of descriptions computed by the
//! double description method over exact integers. Generators and inward
//! normals are primitive, deduplicated and sorted lexicographically; a
//! lineality space (or, dually, an affine-hull equation) appears as a `±v`
//! pair. Two cones are equal as sets iff they are equal as values.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::check_rank;
use crate::lattice::CurveClass;
use crate::linalg::{self, BigVec};
use crate::{Error, Rational, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// Relative interior.
    Open,
    Closed,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cone {
    rank: usize,
    rays: Vec<Vec<i64>>,
    halfspaces: Vec<Vec<i64>>,
}

/// A hyperplane `gamma^perp` in divisor space, normalized so that the first
/// nonzero entry of `gamma` is positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WallHyperplane {
    normal: CurveClass,
}

impl WallHyperplane {
    pub fn new(normal: CurveClass) -> Result<Self> {
        if normal.is_zero() {
            return Err(Error::ZeroVector("wall normal"));
        }
        if !normal.is_primitive() {
            return Err(Error::NotPrimitive("wall normal"));
        }
        let positive = normal.coords().iter().find(|&&x| x != 0).unwrap() > &0;
        Ok(Self {
            normal: if positive { normal } else { normal.neg() },
        })
    }

    pub fn normal(&self) -> &CurveClass {
        &self.normal
    }

    /// True if `gamma` spans the same hyperplane (either sign).
    pub fn matches(&self, gamma: &CurveClass) -> bool {
        gamma == &self.normal || gamma.neg() == self.normal
    }
}

/// Generators of `{x : c . x >= 0 for all c in constraints}` as
/// (lineality basis, extreme rays), both canonical.
fn double_description(rank: usize, constraints: &[BigVec]) -> (Vec<BigVec>, Vec<BigVec>) {
    let mut lineality: Vec<BigVec> = (0..rank)
        .map(|i| {
            let mut v = vec![BigInt::zero(); rank];
            v[i] = BigInt::from(1);
            v
        })
        .collect();
    let mut extreme: Vec<BigVec> = Vec::new();
    let mut seen: Vec<BigVec> = Vec::new();

    for h in constraints {
        if h.iter().all(Zero::is_zero) {
            continue;
        }
        if let Some(idx) = lineality.iter().position(|l| !linalg::dot(h, l).is_zero()) {
            let mut l0 = lineality.remove(idx);
            if linalg::dot(h, &l0).is_negative() {
                l0 = l0.iter().map(|x| -x).collect();
            }
            let d0 = linalg::dot(h, &l0);
            let shift = |v: &BigVec| -> BigVec {
                let dv = linalg::dot(h, v);
                linalg::primitive(v.iter().zip(&l0).map(|(x, y)| &d0 * x - &dv * y).collect())
            };
            lineality = lineality.iter().map(shift).collect();
            extreme = extreme.iter().map(shift).collect();
            extreme.push(l0);
        } else {
            let dim_lin = lineality.len();
            let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
            for e in extreme.drain(..) {
                let s = linalg::dot(h, &e);
                if s.is_positive() {
                    pos.push((e, s));
                } else if s.is_negative() {
                    neg.push((e, s));
                } else {
                    zero.push(e);
                }
            }
            let mut next: Vec<BigVec> = zero.clone();
            next.extend(pos.iter().map(|(e, _)| e.clone()));
            for (p, sp) in &pos {
                for (n, sn) in &neg {
                    let active: Vec<BigVec> = seen
                        .iter()
                        .filter(|c| linalg::dot(c, p).is_zero() && linalg::dot(c, n).is_zero())
                        .cloned()
                        .collect();
                    // Algebraic adjacency test.
                    if linalg::rank(&active, rank) + dim_lin + 2 != rank {
                        continue;
                    }
                    let combo: BigVec = p
                        .iter()
                        .zip(n)
                        .map(|(x, y)| sp * y - sn * x)
                        .collect();
                    next.push(linalg::primitive(combo));
                }
            }
            extreme = next;
        }
        seen.push(h.clone());
    }

    let lineality = linalg::row_space_basis(&lineality, rank);
    let mut rays: Vec<BigVec> = extreme
        .iter()
        .map(|e| linalg::project_out(e, &lineality))
        .filter(|e| e.iter().any(|x| !x.is_zero()))
        .collect();
    rays.sort();
    rays.dedup();
    (lineality, rays)
}

fn assemble(lineality: Vec<BigVec>, rays: Vec<BigVec>) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::with_capacity(rays.len() + 2 * lineality.len());
    for l in lineality {
        out.push(linalg::to_i64(&l.iter().map(|x| -x).collect::<Vec<_>>())?);
        out.push(linalg::to_i64(&l)?);
    }
    for r in rays {
        out.push(linalg::to_i64(&r)?);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn check_vectors(rank: usize, vs: &[Vec<i64>], what: &'static str) -> Result<()> {
    for v in vs {
        check_rank(rank, v.len())?;
        if v.iter().all(|&x| x == 0) {
            return Err(Error::ZeroVector(what));
        }
    }
    Ok(())
}

impl Cone {
    /// The cone of nonnegative combinations of `rays`. An empty list gives `{0}`.
    pub fn from_rays(rank: usize, rays: &[Vec<i64>]) -> Result<Self> {
        check_vectors(rank, rays, "ray")?;
        Self::from_big_rays(rank, rays.iter().map(|r| linalg::to_big(r)).collect())
    }

    /// The cone `{x : h . x >= 0 for every h}`. An empty list gives the whole space.
    pub fn from_halfspaces(rank: usize, normals: &[Vec<i64>]) -> Result<Self> {
        check_vectors(rank, normals, "normal")?;
        let big: Vec<BigVec> = normals.iter().map(|r| linalg::to_big(r)).collect();
        let (lin, ext) = double_description(rank, &big);
        let rays = assemble(lin, ext)?;
        Self::from_rays(rank, &rays)
    }

    fn from_big_rays(rank: usize, rays: Vec<BigVec>) -> Result<Self> {
        let (lin, ext) = double_description(rank, &rays);
        let halfspaces_big: Vec<BigVec> = lin
            .iter()
            .flat_map(|l| [l.clone(), l.iter().map(|x| -x).collect()])
            .chain(ext.iter().cloned())
            .collect();
        let (lin2, ext2) = double_description(rank, &halfspaces_big);
        Ok(Self {
            rank,
            rays: assemble(lin2, ext2)?,
            halfspaces: assemble(lin, ext)?,
        })
    }

    pub fn zero(rank: usize) -> Self {
        Self::from_rays(rank, &[]).expect("zero cone")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Canonical generators (lineality appears as `±v` pairs).
    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    /// Canonical inward normals (affine-hull equations appear as `±h` pairs).
    pub fn halfspaces(&self) -> &[Vec<i64>] {
        &self.halfspaces
    }

    fn paired(vs: &[Vec<i64>], v: &[i64]) -> bool {
        let neg: Vec<i64> = v.iter().map(|x| -x).collect();
        vs.binary_search(&neg).is_ok()
    }

    /// Normals that are part of an equation pair.
    pub fn equations(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.halfspaces
            .iter()
            .filter(|h| Self::paired(&self.halfspaces, h))
    }

    /// Facet normals, i.e. the normals that are not equations.
    pub fn facet_normals(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.halfspaces
            .iter()
            .filter(|h| !Self::paired(&self.halfspaces, h))
    }

    pub fn dimension(&self) -> usize {
        self.rank - self.equations().count() / 2
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.dimension() == self.rank
    }

    /// Lineality-free and full-dimensional with exactly `rank` generators.
    pub fn is_simplicial(&self) -> bool {
        self.is_full_dimensional()
            && self.rays.len() == self.rank
            && !self.rays.iter().any(|r| Self::paired(&self.rays, r))
    }

    pub fn contains(&self, v: &[Rational], mode: Membership) -> Result<bool> {
        check_rank(self.rank, v.len())?;
        Ok(self.contains_big(&linalg::clear_denominators(v), mode))
    }

    pub fn contains_int(&self, v: &[i64], mode: Membership) -> Result<bool> {
        check_rank(self.rank, v.len())?;
        Ok(self.contains_big(&linalg::to_big(v), mode))
    }

    fn contains_big(&self, v: &BigVec, mode: Membership) -> bool {
        self.halfspaces.iter().all(|h| {
            let s = linalg::dot(&linalg::to_big(h), v);
            match mode {
                Membership::Closed => !s.is_negative(),
                Membership::Open if Self::paired(&self.halfspaces, h) => s.is_zero(),
                Membership::Open => s.is_positive(),
            }
        })
    }

    pub fn intersect(&self, other: &Cone) -> Result<Cone> {
        check_rank(self.rank, other.rank)?;
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        Cone::from_halfspaces(self.rank, &hs)
    }

    /// Convex hull of the union.
    pub fn hull(&self, other: &Cone) -> Result<Cone> {
        check_rank(self.rank, other.rank)?;
        let mut rays = self.rays.clone();
        rays.extend(other.rays.iter().cloned());
        Cone::from_rays(self.rank, &rays)
    }

    /// Image under the linear map with matrix `m` (acting on column vectors).
    pub fn image(&self, m: &[Vec<i64>]) -> Result<Cone> {
        check_rank(self.rank, m.len())?;
        let rays = self
            .rays
            .iter()
            .map(|r| linalg::mat_vec(m, r))
            .collect::<Result<Vec<_>>>()?;
        Cone::from_rays(self.rank, &rays)
    }

    /// True if `gamma` is a facet normal, i.e. `gamma^perp` supports a facet
    /// and the cone lies on the side `gamma >= 0`.
    pub fn has_facet_normal(&self, gamma: &CurveClass) -> bool {
        self.facet_normals().any(|h| h.as_slice() == gamma.coords())
    }
}

/// The hyperplane of the shared codimension-one face of two full-dimensional
/// cones with disjoint interiors, or `None` if they meet in lower dimension.
pub fn common_wall(a: &Cone, b: &Cone) -> Result<Option<WallHyperplane>> {
    check_rank(a.rank, b.rank)?;
    if !a.is_full_dimensional() || !b.is_full_dimensional() {
        return Err(Error::NotFullDimensional);
    }
    let meet = a.intersect(b)?;
    let dim = meet.dimension();
    if dim == a.rank {
        return Err(Error::NotAdjacent);
    }
    if dim + 1 != a.rank || a.rank == 0 {
        return Ok(None);
    }
    let normal = meet
        .equations()
        .next()
        .expect("codimension-one cone has an equation")
        .clone();
    WallHyperplane::new(CurveClass::new(normal)).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn cone(rays: &[[i64; 2]]) -> Cone {
        Cone::from_rays(2, &rays.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn vs(v: &[[i64; 2]]) -> Vec<Vec<i64>> {
        let mut out: Vec<Vec<i64>> = v.iter().map(|r| r.to_vec()).collect();
        out.sort();
        out
    }

    #[test]
    fn quadrant_is_self_dual() {
        let q = cone(&[[1, 0], [0, 1]]);
        assert_eq!(q.halfspaces(), vs(&[[1, 0], [0, 1]]).as_slice());
        assert_eq!(q.rays(), vs(&[[0, 1], [1, 0]]).as_slice());
        assert!(q.is_simplicial());
    }

    #[test]
    fn skew_cone_halfspaces() {
        let k = cone(&[[1, 0], [1, 2]]);
        assert_eq!(k.halfspaces(), vs(&[[0, 1], [2, -1]]).as_slice());
    }

    #[test]
    fn single_ray_is_an_intersection() {
        let k = cone(&[[1, 1]]);
        assert_eq!(k.halfspaces(), vs(&[[1, -1], [-1, 1], [1, 1]]).as_slice());
        assert_eq!(k.dimension(), 1);
        assert!(k.contains_int(&[3, 3], Membership::Open).unwrap());
        assert!(!k.contains_int(&[-3, -3], Membership::Closed).unwrap());
    }

    #[test]
    fn redundant_generators_are_dropped() {
        let k = cone(&[[1, 0], [2, 1], [1, 1], [3, 3], [0, 1]]);
        assert_eq!(k.rays(), vs(&[[0, 1], [1, 0]]).as_slice());
    }

    #[test]
    fn lineality_and_whole_space() {
        let half = cone(&[[1, 0], [-1, 0], [0, 1]]);
        assert_eq!(half.halfspaces(), vs(&[[0, 1]]).as_slice());
        assert_eq!(half.rays(), vs(&[[-1, 0], [1, 0], [0, 1]]).as_slice());
        let all = Cone::from_halfspaces(2, &[]).unwrap();
        assert_eq!(all.halfspaces().len(), 0);
        assert_eq!(all.rays().len(), 4);
        let zero = Cone::zero(2);
        assert_eq!(zero.rays().len(), 0);
        assert_eq!(zero.dimension(), 0);
        assert!(zero.contains_int(&[0, 0], Membership::Open).unwrap());
    }

    #[test]
    fn membership_examples() {
        let q = cone(&[[1, 0], [0, 1]]);
        assert!(q.contains_int(&[1, 1], Membership::Open).unwrap());
        assert!(!q.contains_int(&[1, 0], Membership::Open).unwrap());
        assert!(q.contains_int(&[1, 0], Membership::Closed).unwrap());
        let k = cone(&[[1, 0], [1, 2]]);
        assert!(k.contains(&[ratio(1, 1), ratio(1, 1)], Membership::Closed).unwrap());
        assert!(k.contains(&[ratio(1, 3), ratio(1, 7)], Membership::Open).unwrap());
        assert!(q.contains_int(&[1, 0, 0], Membership::Open).is_err());
    }

    #[test]
    fn rejects_bad_rays() {
        assert_eq!(Cone::from_rays(2, &[vec![0, 0]]), Err(Error::ZeroVector("ray")));
        assert!(matches!(
            Cone::from_rays(2, &[vec![1, 0, 0]]),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn intersections() {
        let q = cone(&[[1, 0], [0, 1]]);
        assert_eq!(q.intersect(&q).unwrap(), q);
        let v = cone(&[[1, 1], [-1, 1]]);
        assert_eq!(q.intersect(&v).unwrap(), cone(&[[1, 1], [0, 1]]));
        let opp = cone(&[[-1, 0], [0, -1]]);
        assert_eq!(q.intersect(&opp).unwrap(), Cone::zero(2));
    }

    #[test]
    fn common_walls() {
        let q = cone(&[[1, 0], [0, 1]]);
        let left = cone(&[[0, 1], [-1, 0]]);
        let w = common_wall(&q, &left).unwrap().unwrap();
        assert_eq!(w.normal().coords(), &[1, 0]);
        assert_eq!(common_wall(&left, &q).unwrap().unwrap(), w);
        let opp = cone(&[[-1, 0], [0, -1]]);
        assert_eq!(common_wall(&q, &opp).unwrap(), None);
        assert_eq!(common_wall(&q, &q), Err(Error::NotAdjacent));
        assert_eq!(
            common_wall(&q, &cone(&[[1, 1]])),
            Err(Error::NotFullDimensional)
        );
    }

    #[test]
    fn three_dimensional_octant_and_square_cone() {
        let k = Cone::from_rays(
            3,
            &[vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]],
        )
        .unwrap();
        assert_eq!(k.halfspaces().len(), 4);
        assert_eq!(k.rays().len(), 4);
        assert!(!k.is_simplicial());
        assert!(k.contains_int(&[0, 0, 1], Membership::Open).unwrap());
        assert!(!k.contains_int(&[1, 1, 1], Membership::Open).unwrap());
        assert!(k.contains_int(&[1, 1, 2], Membership::Closed).unwrap());
    }
}
