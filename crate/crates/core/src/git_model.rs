//! The local flop model: `C*` acting on `C^4` with weights `(1, 1, -1, -1)`.
//!
//! Reductions at level `r` of the moment map
//! `mu = (|w|^2 + |x|^2 - |y|^2 - |z|^2) / 2` are the small resolution
//! blowing up `A = B = 0` for `r < 0`, the cone `AD - BC = 0` at `r = 0`, and
//! the other small resolution for `r > 0`. The exceptional curve has area
//! `AREA_SLOPE * |r|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

/// Area of the exceptional curve per unit `|r|`, pinned from the quadrature
/// of the reduction of `C^2` by the diagonal circle action.
pub const AREA_SLOPE: f64 = 2.0 * PI;

pub const DEFAULT_SEED: u64 = 0x6b61_686c_6572;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointC4 {
    pub w: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl PointC4 {
    pub fn new(w: Complex64, x: Complex64, y: Complex64, z: Complex64) -> Self {
        Self { w, x, y, z }
    }

    pub fn real(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self::new(w.into(), x.into(), y.into(), z.into())
    }

    pub fn is_finite(&self) -> bool {
        [self.w, self.x, self.y, self.z].iter().all(|c| c.is_finite())
    }

    /// `(|w|^2 + |x|^2) / 2` and `(|y|^2 + |z|^2) / 2`.
    fn half_norms(&self) -> (f64, f64) {
        (
            0.5 * (self.w.norm_sqr() + self.x.norm_sqr()),
            0.5 * (self.y.norm_sqr() + self.z.norm_sqr()),
        )
    }
}

/// `(sw, sx, y/s, z/s)`.
pub fn act(s: Complex64, p: &PointC4) -> Result<PointC4> {
    if s == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroScalar);
    }
    let inv = s.inv();
    Ok(PointC4::new(s * p.w, s * p.x, inv * p.y, inv * p.z))
}

pub fn moment_map(p: &PointC4) -> f64 {
    let (pos, neg) = p.half_norms();
    pos - neg
}

/// Generators `A = wy, B = wz, C = xy, D = xz` of the invariant ring.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Invariants {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Invariants {
    /// `AD - BC`, identically zero on the image.
    pub fn relation(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }
}

pub fn invariants(p: &PointC4) -> Invariants {
    Invariants {
        a: p.w * p.y,
        b: p.w * p.z,
        c: p.x * p.y,
        d: p.x * p.z,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UnstableLocus {
    Empty,
    /// `{y = z = 0}`
    YZZero,
    /// `{w = x = 0}`
    WXZero,
}

impl UnstableLocus {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnstableLocus::Empty => "empty",
            UnstableLocus::YZZero => "y_z_zero",
            UnstableLocus::WXZero => "w_x_zero",
        }
    }

    pub fn contains(&self, p: &PointC4) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            UnstableLocus::Empty => false,
            UnstableLocus::YZZero => p.y == zero && p.z == zero,
            UnstableLocus::WXZero => p.w == zero && p.x == zero,
        }
    }
}

pub fn unstable_locus(r: f64) -> UnstableLocus {
    if r < 0.0 {
        UnstableLocus::YZZero
    } else if r > 0.0 {
        UnstableLocus::WXZero
    } else {
        UnstableLocus::Empty
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuotientLabel {
    #[serde(rename = "singular_cone")]
    SingularCone,
    /// Blowup of the cone along `A = B = 0`.
    #[serde(rename = "blowup_AB")]
    BlowupAB,
    /// Blowup of the cone along `A = C = 0`.
    #[serde(rename = "blowup_AC")]
    BlowupAC,
}

impl QuotientLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuotientLabel::SingularCone => "singular_cone",
            QuotientLabel::BlowupAB => "blowup_AB",
            QuotientLabel::BlowupAC => "blowup_AC",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientDescriptor {
    pub label: QuotientLabel,
    pub unstable_locus: UnstableLocus,
}

pub fn classify_quotient(r: f64) -> QuotientDescriptor {
    let label = if r < 0.0 {
        QuotientLabel::BlowupAB
    } else if r > 0.0 {
        QuotientLabel::BlowupAC
    } else {
        QuotientLabel::SingularCone
    };
    QuotientDescriptor {
        label,
        unstable_locus: unstable_locus(r),
    }
}

/// Probe of the real one-parameter subgroup `s = e^t`, `t` in `[-t_max, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitProbe {
    pub t_max: f64,
    pub steps: usize,
    pub tol: f64,
}

impl Default for OrbitProbe {
    fn default() -> Self {
        Self {
            t_max: 20.0,
            steps: 401,
            tol: 1e-9,
        }
    }
}

/// Whether the closure of the `C*`-orbit of `p` meets `mu^{-1}(r)`.
///
/// Along `s = e^t`, `mu = P e^{2t} - N e^{-2t}` with `P, N >= 0`, which is
/// nondecreasing in `t`. A sign change on the probe grid is refined by
/// bisection; values beyond the grid are decided from the limits
/// `t -> ±inf`, and the origin is added when it lies in the closure.
pub fn orbit_closure_meets_level(p: &PointC4, r: f64, probe: &OrbitProbe) -> Result<bool> {
    let bad_tol = probe.tol.is_nan() || probe.tol <= 0.0;
    if !probe.t_max.is_finite() || probe.t_max <= 0.0 || probe.steps < 2 || bad_tol {
        return Err(Error::Degenerate(format!("orbit probe {probe:?}")));
    }
    if !p.is_finite() || !r.is_finite() {
        return Err(Error::Degenerate("non-finite point or level".into()));
    }
    let (pos, neg) = p.half_norms();
    let f = |t: f64| pos * (2.0 * t).exp() - neg * (-2.0 * t).exp() - r;

    // The origin is in the closure unless both halves are nonzero.
    if (pos == 0.0 || neg == 0.0) && r.abs() <= probe.tol {
        return Ok(true);
    }
    if pos == 0.0 && neg == 0.0 {
        return Ok(false);
    }

    let h = 2.0 * probe.t_max / (probe.steps - 1) as f64;
    let grid: Vec<f64> = (0..probe.steps).map(|i| -probe.t_max + h * i as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    if values.iter().any(|v| v.abs() <= probe.tol) {
        return Ok(true);
    }
    for i in 1..grid.len() {
        if values[i - 1] < 0.0 && values[i] > 0.0 {
            let (mut lo, mut hi) = (grid[i - 1], grid[i]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(f(lo).abs() <= probe.tol.max(1e-12 * r.abs())
                || f(hi).abs() <= probe.tol.max(1e-12 * r.abs())
                || hi - lo < 1e-12);
        }
    }
    // Beyond the grid: mu -> -inf as t -> -inf iff N > 0, -> +inf as t -> +inf iff P > 0.
    let first = values[0];
    let last = *values.last().unwrap();
    Ok((first > 0.0 && neg > 0.0) || (last < 0.0 && pos > 0.0))
}

/// Area of the exceptional curve of the reduction at level `r`, by
/// integrating the pulled-back form over a section of the level set.
///
/// For `r > 0` the curve is `{y = z = 0, |w|^2 + |x|^2 = 2r} / S^1`, for
/// `r < 0` the same with `(y, z)`. It is parametrized by
/// `R (cos t, sin t e^{i phi})`, `R = sqrt(2|r|)`, and `omega(d_t, d_phi)` is
/// evaluated with central differences on an `n x n_phi` midpoint grid.
pub fn exceptional_area(r: f64, n: usize) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::Degenerate(
            "r = 0: the exceptional curve collapses to a point".into(),
        ));
    }
    if !r.is_finite() {
        return Err(Error::Degenerate("non-finite level".into()));
    }
    if n < 1000 {
        return Err(Error::Degenerate(format!("sample count {n} < 1000")));
    }
    let radius = (2.0 * r.abs()).sqrt();
    let section = |t: f64, phi: f64| -> [Complex64; 2] {
        [
            Complex64::new(radius * t.cos(), 0.0),
            Complex64::from_polar(radius * t.sin(), phi),
        ]
    };
    // omega = (i/2) sum dz ^ d(z bar), so omega(u, v) = sum Im(conj(u_k) v_k).
    let omega = |u: &[Complex64; 2], v: &[Complex64; 2]| -> f64 {
        u.iter().zip(v).map(|(a, b)| (a.conj() * b).im).sum()
    };
    let n_phi = 64usize;
    let dt = 0.5 * PI / n as f64;
    let dphi = 2.0 * PI / n_phi as f64;
    let eps = 1e-6;
    // Rows in parallel, summed in a fixed order so the result does not
    // depend on the thread count.
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t = (i as f64 + 0.5) * dt;
            let mut row = 0.0;
            for j in 0..n_phi {
                let phi = (j as f64 + 0.5) * dphi;
                let (tp, tm) = (section(t + eps, phi), section(t - eps, phi));
                let (pp, pm) = (section(t, phi + eps), section(t, phi - eps));
                let d_t = [(tp[0] - tm[0]) / (2.0 * eps), (tp[1] - tm[1]) / (2.0 * eps)];
                let d_phi = [(pp[0] - pm[0]) / (2.0 * eps), (pp[1] - pm[1]) / (2.0 * eps)];
                row += omega(&d_t, &d_phi);
            }
            row
        })
        .collect();
    let total: f64 = rows.iter().sum();
    Ok((total * dt * dphi).abs())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgreementReport {
    pub seed: u64,
    pub locus_points: usize,
    pub generic_points: usize,
    pub misclassified: usize,
}

fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
}

/// Draws `count` points, half on the unstable locus at level `r` (for `r = 0`,
/// on either coordinate plane) and half generic, and counts disagreements
/// between the locus and [`orbit_closure_meets_level`].
pub fn sample_agreement(r: f64, count: usize, seed: u64, probe: &OrbitProbe) -> Result<AgreementReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = Complex64::new(0.0, 0.0);
    let locus = unstable_locus(r);
    let n_locus = count / 2;
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let mut c = [
            random_complex(&mut rng),
            random_complex(&mut rng),
            random_complex(&mut rng),
            random_complex(&mut rng),
        ];
        if i < n_locus {
            let kill_yz = match locus {
                UnstableLocus::YZZero => true,
                UnstableLocus::WXZero => false,
                UnstableLocus::Empty => i % 2 == 0,
            };
            if kill_yz {
                c[2] = zero;
                c[3] = zero;
            } else {
                c[0] = zero;
                c[1] = zero;
            }
        }
        points.push(PointC4::new(c[0], c[1], c[2], c[3]));
    }
    let misclassified = points
        .par_iter()
        .map(|p| {
            orbit_closure_meets_level(p, r, probe).map(|meets| usize::from(meets == locus.contains(p)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum();
    Ok(AgreementReport {
        seed,
        locus_points: n_locus,
        generic_points: count - n_locus,
        misclassified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn action_examples() {
        let p = PointC4::real(1.0, 0.0, 1.0, 0.0);
        assert_eq!(act(c(1.0, 0.0), &p).unwrap(), p);
        assert_eq!(act(c(2.0, 0.0), &p).unwrap(), PointC4::real(2.0, 0.0, 0.5, 0.0));
        assert_eq!(act(c(0.0, 0.0), &p), Err(Error::ZeroScalar));
    }

    #[test]
    fn moment_map_examples() {
        assert_eq!(moment_map(&PointC4::real(0.0, 0.0, 0.0, 0.0)), 0.0);
        assert_eq!(moment_map(&PointC4::real(1.0, 1.0, 0.0, 0.0)), 1.0);
        let p = PointC4::new(c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1), c(0.0, 1.5));
        let q = act(Complex64::from_polar(1.0, 0.83), &p).unwrap();
        assert!((moment_map(&p) - moment_map(&q)).abs() < 1e-14);
    }

    #[test]
    fn invariant_examples() {
        let i = invariants(&PointC4::real(1.0, 1.0, 1.0, 1.0));
        assert_eq!((i.a, i.b, i.c, i.d), (c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)));
        let i = invariants(&PointC4::real(1.0, 2.0, 3.0, 4.0));
        assert_eq!((i.a.re, i.b.re, i.c.re, i.d.re), (3.0, 4.0, 6.0, 8.0));
        assert_eq!(i.relation(), c(0.0, 0.0));
    }

    #[test]
    fn invariants_are_preserved_by_the_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = PointC4::new(
                random_complex(&mut rng),
                random_complex(&mut rng),
                random_complex(&mut rng),
                random_complex(&mut rng),
            );
            let s = random_complex(&mut rng) + c(0.1, 0.0);
            let (i0, i1) = (invariants(&p), invariants(&act(s, &p).unwrap()));
            for (a, b) in [(i0.a, i1.a), (i0.b, i1.b), (i0.c, i1.c), (i0.d, i1.d)] {
                assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn locus_and_quotient_by_sign() {
        assert_eq!(unstable_locus(-1.0), UnstableLocus::YZZero);
        assert_eq!(unstable_locus(0.0), UnstableLocus::Empty);
        assert_eq!(unstable_locus(1.0), UnstableLocus::WXZero);
        assert_eq!(classify_quotient(-0.5).label, QuotientLabel::BlowupAB);
        assert_eq!(classify_quotient(0.0).label, QuotientLabel::SingularCone);
        assert_eq!(classify_quotient(2.0).label, QuotientLabel::BlowupAC);
        for r in [-3.0, 0.0, 3.0] {
            assert_eq!(classify_quotient(r).unstable_locus, unstable_locus(r));
        }
    }

    #[test]
    fn orbit_closure_examples() {
        let probe = OrbitProbe::default();
        assert!(!orbit_closure_meets_level(&PointC4::real(1.0, 0.0, 0.0, 0.0), -1.0, &probe).unwrap());
        assert!(orbit_closure_meets_level(&PointC4::real(1.0, 0.0, 0.0, 0.0), 0.0, &probe).unwrap());
        assert!(orbit_closure_meets_level(&PointC4::real(1.0, 0.0, 0.0, 0.0), 3.0, &probe).unwrap());
        for r in [-1e6, -1.0, 0.0, 0.3, 1e6] {
            assert!(orbit_closure_meets_level(&PointC4::real(1.0, 0.0, 1.0, 0.0), r, &probe).unwrap());
        }
        assert!(!orbit_closure_meets_level(&PointC4::real(0.0, 0.0, 1.0, 0.0), 1.0, &probe).unwrap());
        assert!(orbit_closure_meets_level(&PointC4::real(0.0, 0.0, 0.0, 0.0), 0.0, &probe).unwrap());
        assert!(!orbit_closure_meets_level(&PointC4::real(0.0, 0.0, 0.0, 0.0), 1.0, &probe).unwrap());
        let bad = OrbitProbe { steps: 1, ..probe };
        assert!(orbit_closure_meets_level(&PointC4::real(1.0, 0.0, 0.0, 0.0), 1.0, &bad).is_err());
    }

    #[test]
    fn moment_map_is_monotone_along_real_orbits() {
        let p = PointC4::new(c(0.3, 0.2), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let q = PointC4::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.2, 0.2));
        let mut prev = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for i in -20..=20 {
            let s = c((i as f64 * 0.25).exp(), 0.0);
            let (mp, mq) = (moment_map(&act(s, &p).unwrap()), moment_map(&act(s, &q).unwrap()));
            assert!(mp >= prev.0 && mq >= prev.1);
            prev = (mp, mq);
        }
    }

    #[test]
    fn sampled_agreement_has_no_misclassifications() {
        for r in [-1.0, 0.0, 1.0] {
            let rep = sample_agreement(r, 200, DEFAULT_SEED, &OrbitProbe::default()).unwrap();
            assert_eq!(rep.misclassified, 0, "r = {r}");
        }
    }

    /// Independent oracle: area of the reduction of C^2 at level r through the
    /// Fubini–Study density in the affine chart, `int 2 pi R^2 rho/(1+rho^2)^2`,
    /// by Simpson's rule after `rho = s/(1-s)`.
    fn reduction_area_oracle(r: f64) -> f64 {
        let r2 = 2.0 * r.abs();
        let density = |s: f64| {
            if s >= 1.0 {
                return 0.0;
            }
            let rho = s / (1.0 - s);
            let jac = 1.0 / ((1.0 - s) * (1.0 - s));
            2.0 * PI * r2 * rho / ((1.0 + rho * rho) * (1.0 + rho * rho)) * jac
        };
        let m = 20_000;
        let h = 1.0 / m as f64;
        let mut acc = density(0.0) + density(1.0);
        for i in 1..m {
            acc += density(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn area_slope_matches_the_oracle() {
        let kappa = reduction_area_oracle(1.0);
        assert!((kappa - AREA_SLOPE).abs() / AREA_SLOPE < 1e-6, "kappa = {kappa}");
        for r in [0.25, -0.5, 2.0] {
            let a = exceptional_area(r, 1000).unwrap();
            assert!((a - reduction_area_oracle(r)).abs() / a < 1e-3);
            assert!((a - AREA_SLOPE * r.abs()).abs() / a < 1e-3);
        }
    }

    #[test]
    fn area_errors() {
        assert!(exceptional_area(0.0, 1000).is_err());
        assert!(exceptional_area(1.0, 10).is_err());
    }
}
