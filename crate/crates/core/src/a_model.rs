//! A-model three-point functions of a threefold chart and the comparison of
//! the two sides of a flop.
//!
//! For divisors `A, B, C` the function is
//! `A.B.C + sum_eta n_eta (A.eta)(B.eta)(C.eta) q^eta / (1 - q^eta)`
//! with the counts `n_eta` read from the chart.

use serde::Serialize;

use crate::atlas::{flop, ModelChart, WallDescriptor, WallKind};
use crate::lattice::{pair, DivisorClass};
use crate::qalg::{self, expand_in, series_add, QExpression, QSeries, RationalFunction};
use crate::rational::{self, int, ratio, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreePointQuery {
    pub a: DivisorClass,
    pub b: DivisorClass,
    pub c: DivisorClass,
    pub order: u64,
}

fn degree_product(a: &DivisorClass, b: &DivisorClass, c: &DivisorClass, eta: &crate::lattice::CurveClass) -> Result<i64> {
    let (x, y, z) = (pair(a, eta)?, pair(b, eta)?, pair(c, eta)?);
    x.checked_mul(y)
        .and_then(|v| v.checked_mul(z))
        .ok_or(Error::Overflow)
}

/// The three-point function truncated at total degree `order` in the
/// chart's framing exponents.
pub fn three_point_series(
    chart: &ModelChart,
    a: &DivisorClass,
    b: &DivisorClass,
    c: &DivisorClass,
    order: u64,
) -> Result<QSeries> {
    let framing = chart.effective_framing();
    let classical = chart.cubic.eval(a, b, c)?;
    let mut s = QSeries::constant(chart.rank(), order, int(classical));
    for curve in &chart.curves {
        let k = degree_product(a, b, c, &curve.eta)?
            .checked_mul(curve.n)
            .ok_or(Error::Overflow)?;
        let term = qalg::PrimitiveTerm {
            c: int(k),
            eta: curve.eta.clone(),
        };
        s = series_add(&s, &expand_in(&term, &framing, order)?)?;
    }
    Ok(s)
}

/// The three-point function as a closed expression: the constant `A.B.C`
/// plus one multiple-cover term per curve class.
pub fn three_point_closed(
    chart: &ModelChart,
    a: &DivisorClass,
    b: &DivisorClass,
    c: &DivisorClass,
) -> Result<QExpression> {
    let classical = chart.cubic.eval(a, b, c)?;
    let mut e = QExpression::constant(chart.rank(), int(classical));
    for curve in &chart.curves {
        let k = degree_product(a, b, c, &curve.eta)?
            .checked_mul(curve.n)
            .ok_or(Error::Overflow)?;
        e.add_primitive(qalg::PrimitiveTerm {
            c: int(k),
            eta: curve.eta.clone(),
        })?;
    }
    Ok(e)
}

/// Continues an expression across a flopping wall: every term on a positive
/// multiple `k gamma` is rewritten as `-c - c q^{-k gamma}/(1 - q^{-k gamma})`.
/// The value is unchanged wherever both forms are defined.
pub fn continue_across_wall(expr: &QExpression, wall: &WallDescriptor) -> Result<QExpression> {
    if wall.kind != WallKind::Flopping {
        return Err(Error::Degenerate("continuation needs a flopping wall".into()));
    }
    let mut out = expr.clone();
    for t in expr.primitives() {
        if matches!(t.eta.multiple_of(&wall.gamma), Some(k) if k > 0) {
            out = out.flip_term(&t.eta)?;
        }
    }
    Ok(out)
}

pub fn default_samples() -> Vec<Rational> {
    vec![
        ratio(1, 3),
        ratio(-1, 3),
        ratio(1, 2),
        ratio(-1, 2),
        int(2),
        int(3),
        ratio(-7, 2),
        int(10),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaSample {
    #[serde(serialize_with = "ser_rational")]
    pub u: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub lhs: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaReport {
    pub wall: WallDescriptor,
    pub symbolic_verdict: bool,
    pub lhs_form: RationalFunction,
    pub rhs_form: RationalFunction,
    pub sample_points: Vec<LemmaSample>,
    #[serde(serialize_with = "ser_rational")]
    pub max_discrepancy: Rational,
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(x))
}

/// Compares the classical term plus the wall term on both sides of the flop
/// across `wall_index`, with `u = q^gamma`:
///
/// `A.B.C + n a b c u/(1-u)` against
/// `Â.B̂.Ĉ + n â b̂ ĉ u^{-1}/(1-u^{-1})`,
///
/// where hats denote the flopped chart and `-gamma`. The comparison is done
/// symbolically on canonical rational functions and exactly at each sample.
pub fn verify_flop_lemma(
    chart: &ModelChart,
    wall_index: usize,
    a: &DivisorClass,
    b: &DivisorClass,
    c: &DivisorClass,
    samples: &[Rational],
) -> Result<LemmaReport> {
    let wall = chart.wall(wall_index)?.clone();
    let flopped = flop(chart, wall_index)?;
    let gamma = &wall.gamma;
    let gamma_hat = gamma.neg();
    let n = wall.n_gamma;

    let classical = chart.cubic.eval(a, b, c)?;
    let classical_hat = flopped.cubic.eval(a, b, c)?;
    let k = degree_product(a, b, c, gamma)?.checked_mul(n).ok_or(Error::Overflow)?;
    let k_hat = degree_product(a, b, c, &gamma_hat)?
        .checked_mul(n)
        .ok_or(Error::Overflow)?;

    let lhs = QExpression::constant(chart.rank(), int(classical))
        .with_primitive(int(k), gamma.clone())?;
    let rhs = QExpression::constant(chart.rank(), int(classical_hat))
        .with_primitive(int(k_hat), gamma_hat)?;
    let lhs_form = qalg::restrict_to_wall_variable(&lhs, gamma)?;
    let rhs_form = qalg::restrict_to_wall_variable(&rhs, gamma)?;

    let one = int(1);
    let mut sample_points = Vec::with_capacity(samples.len());
    let mut max_discrepancy = int(0);
    for u in samples {
        if *u == int(0) || *u == one {
            return Err(Error::Pole(format!(
                "sample u = {} is excluded",
                rational::format(u)
            )));
        }
        let l = int(classical) + int(k) * u / (&one - u);
        let inv = u.recip();
        let r = int(classical_hat) + int(k_hat) * &inv / (&one - &inv);
        let d = if l >= r { &l - &r } else { &r - &l };
        if d > max_discrepancy {
            max_discrepancy = d;
        }
        sample_points.push(LemmaSample {
            u: u.clone(),
            lhs: l,
            rhs: r,
        });
    }
    Ok(LemmaReport {
        wall,
        symbolic_verdict: lhs_form == rhs_form,
        lhs_form,
        rhs_form,
        sample_points,
        max_discrepancy,
    })
}
