//! Exact algebra of the monomials `q^eta`: truncated multivariate series,
//! multiple-cover terms `c q^eta / (1 - q^eta)`, closed expressions built from
//! them, and univariate rational functions in a wall variable `u = q^gamma`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::check_rank;
use crate::lattice::{CurveClass, FramingBasis};
use crate::rational::{self, Rational};
use crate::{Error, Result};

/// Exponent vector of a series monomial, ordered by total degree and then
/// lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QMonomial(Vec<u32>);

impl QMonomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn one(rank: usize) -> Self {
        Self(vec![0; rank])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    fn mul(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn try_from_exponents(e: &[i64]) -> Result<Self> {
        e.iter()
            .map(|&x| u32::try_from(x).map_err(|_| Error::NotExpandable(e.to_vec())))
            .collect::<Result<_>>()
            .map(Self)
    }
}

impl Ord for QMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for QMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A power series truncated at total degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    rank: usize,
    order: u64,
    terms: BTreeMap<QMonomial, Rational>,
}

impl QSeries {
    pub fn zero(rank: usize, order: u64) -> Self {
        Self {
            rank,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(rank: usize, order: u64, c: Rational) -> Self {
        let mut s = Self::zero(rank, order);
        s.add_term(QMonomial::one(rank), c);
        s
    }

    /// Builds a series from terms; terms above `order` are dropped.
    pub fn from_terms(
        rank: usize,
        order: u64,
        terms: impl IntoIterator<Item = (QMonomial, Rational)>,
    ) -> Result<Self> {
        let mut s = Self::zero(rank, order);
        for (m, c) in terms {
            check_rank(rank, m.0.len())?;
            s.add_term(m, c);
        }
        Ok(s)
    }

    fn add_term(&mut self, m: QMonomial, c: Rational) {
        if m.degree() > self.order || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &QMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut s = Self::zero(self.rank, self.order);
        for (m, v) in &self.terms {
            s.add_term(m.clone(), v * c);
        }
        s
    }

    /// Deterministic text form: one `c * q^[e1,...,er]` line per term, sorted
    /// by degree then exponent.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            let exps: Vec<String> = m.0.iter().map(u32::to_string).collect();
            out.push_str(&format!("{} * q^[{}]\n", rational::format(c), exps.join(",")));
        }
        out
    }
}

/// Sum, truncated to the smaller order.
pub fn series_add(a: &QSeries, b: &QSeries) -> Result<QSeries> {
    check_rank(a.rank, b.rank)?;
    let mut s = QSeries::zero(a.rank, a.order.min(b.order));
    for (m, c) in a.terms.iter().chain(&b.terms) {
        s.add_term(m.clone(), c.clone());
    }
    Ok(s)
}

/// Product, truncated to the smaller order.
pub fn series_mul(a: &QSeries, b: &QSeries) -> Result<QSeries> {
    check_rank(a.rank, b.rank)?;
    let mut s = QSeries::zero(a.rank, a.order.min(b.order));
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            s.add_term(ma.mul(mb), ca * cb);
        }
    }
    Ok(s)
}

/// `c * q^eta / (1 - q^eta)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimitiveTerm {
    #[serde(serialize_with = "ser_rational")]
    pub c: Rational,
    pub eta: CurveClass,
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(x))
}

/// Multiple-cover expansion `sum_{k >= 1, k deg(eta) <= N} c q^{k eta}`, with the
/// coordinates of `eta` read as series exponents.
pub fn expand(term: &PrimitiveTerm, order: u64) -> Result<QSeries> {
    expand_exponents(&term.c, term.eta.coords(), order)
}

/// [`expand`] after converting `eta` to exponents in `framing`.
pub fn expand_in(term: &PrimitiveTerm, framing: &FramingBasis, order: u64) -> Result<QSeries> {
    expand_exponents(&term.c, &framing.curve_exponents(&term.eta)?, order)
}

fn expand_exponents(c: &Rational, exps: &[i64], order: u64) -> Result<QSeries> {
    let base = QMonomial::try_from_exponents(exps)?;
    let deg = base.degree();
    if deg == 0 {
        return Err(Error::ZeroVector("curve class"));
    }
    let mut s = QSeries::zero(exps.len(), order);
    let mut m = base.clone();
    while m.degree() <= order {
        s.add_term(m.clone(), c.clone());
        m = m.mul(&base);
    }
    Ok(s)
}

/// Polynomial part plus multiple-cover terms, in lattice coordinates.
///
/// Primitive terms are kept merged by class, sorted, and free of zero
/// coefficients, so structurally equal expressions are equal values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QExpression {
    rank: usize,
    poly: BTreeMap<CurveClass, Rational>,
    prims: BTreeMap<CurveClass, Rational>,
}

impl QExpression {
    pub fn zero(rank: usize) -> Self {
        Self {
            rank,
            poly: BTreeMap::new(),
            prims: BTreeMap::new(),
        }
    }

    pub fn constant(rank: usize, c: Rational) -> Self {
        let mut e = Self::zero(rank);
        e.add_monomial(CurveClass::zero(rank), c).expect("rank");
        e
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn add_monomial(&mut self, eta: CurveClass, c: Rational) -> Result<()> {
        check_rank(self.rank, eta.rank())?;
        add_merged(&mut self.poly, eta, c);
        Ok(())
    }

    pub fn add_primitive(&mut self, term: PrimitiveTerm) -> Result<()> {
        check_rank(self.rank, term.eta.rank())?;
        if term.eta.is_zero() {
            return Err(Error::ZeroVector("primitive term class"));
        }
        add_merged(&mut self.prims, term.eta, term.c);
        Ok(())
    }

    pub fn with_primitive(mut self, c: Rational, eta: CurveClass) -> Result<Self> {
        self.add_primitive(PrimitiveTerm { c, eta })?;
        Ok(self)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_rank(self.rank, other.rank)?;
        let mut out = self.clone();
        for (k, v) in &other.poly {
            add_merged(&mut out.poly, k.clone(), v.clone());
        }
        for (k, v) in &other.prims {
            add_merged(&mut out.prims, k.clone(), v.clone());
        }
        Ok(out)
    }

    /// Polynomial part as `(exponent, coefficient)` pairs.
    pub fn poly(&self) -> impl Iterator<Item = (&CurveClass, &Rational)> {
        self.poly.iter()
    }

    pub fn constant_term(&self) -> Rational {
        self.poly
            .get(&CurveClass::zero(self.rank))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn primitives(&self) -> Vec<PrimitiveTerm> {
        self.prims
            .iter()
            .map(|(eta, c)| PrimitiveTerm {
                c: c.clone(),
                eta: eta.clone(),
            })
            .collect()
    }

    /// Rewrites `c q^eta/(1-q^eta)` as `-c - c q^{-eta}/(1-q^{-eta})`; equal as
    /// functions away from `q^eta = 1`.
    pub fn flip_term(&self, eta: &CurveClass) -> Result<Self> {
        let mut out = self.clone();
        if let Some(c) = out.prims.remove(eta) {
            add_merged(&mut out.poly, CurveClass::zero(self.rank), -c.clone());
            add_merged(&mut out.prims, eta.neg(), -c);
        }
        Ok(out)
    }

    /// Applies [`Self::flip_term`] to every primitive term whose class has a
    /// negative exponent in `framing`, so all terms become expandable there.
    pub fn normalized_for(&self, framing: &FramingBasis) -> Result<Self> {
        let mut out = self.clone();
        for eta in self.prims.keys() {
            let e = framing.curve_exponents(eta)?;
            if e.iter().any(|&x| x < 0) {
                let flipped = framing.curve_exponents(&eta.neg())?;
                if flipped.iter().any(|&x| x < 0) {
                    return Err(Error::NotExpandable(e));
                }
                out = out.flip_term(eta)?;
            }
        }
        Ok(out)
    }

    /// Truncated series in the exponents of `framing`.
    pub fn to_series(&self, framing: &FramingBasis, order: u64) -> Result<QSeries> {
        check_rank(self.rank, framing.rank())?;
        let expr = self.normalized_for(framing)?;
        let mut s = QSeries::zero(self.rank, order);
        for (eta, c) in &expr.poly {
            let m = QMonomial::try_from_exponents(&framing.curve_exponents(eta)?)?;
            s.add_term(m, c.clone());
        }
        for t in expr.primitives() {
            s = series_add(&s, &expand_in(&t, framing, order)?)?;
        }
        Ok(s)
    }

    /// Exact value with `q^eta = prod q_j^{eta_j}` in lattice coordinates.
    pub fn eval(&self, q: &[Rational]) -> Result<Rational> {
        check_rank(self.rank, q.len())?;
        let mut total = Rational::zero();
        for (eta, c) in &self.poly {
            total += c * monomial_value(q, eta)?;
        }
        for (eta, c) in &self.prims {
            let x = monomial_value(q, eta)?;
            if x.is_one() {
                return Err(Error::OnWallLocus(eta.coords().to_vec()));
            }
            total += c * &x / (Rational::one() - &x);
        }
        Ok(total)
    }
}

fn add_merged(map: &mut BTreeMap<CurveClass, Rational>, key: CurveClass, c: Rational) {
    let remove = {
        let e = map.entry(key.clone()).or_insert_with(Rational::zero);
        *e += c;
        e.is_zero()
    };
    if remove {
        map.remove(&key);
    }
}

fn monomial_value(q: &[Rational], eta: &CurveClass) -> Result<Rational> {
    let mut x = Rational::one();
    for (qj, &e) in q.iter().zip(eta.coords()) {
        x *= rational::pow(qj, e)
            .ok_or_else(|| Error::Pole(format!("q^{:?} with a zero coordinate", eta.coords())))?;
    }
    Ok(x)
}

/// Dense univariate polynomial over the rationals, lowest degree first, with
/// no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
struct UniPoly(Vec<Rational>);

impl UniPoly {
    fn trimmed(mut v: Vec<Rational>) -> Self {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        Self(v)
    }

    fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        Self::trimmed(v)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &Rational {
        self.0.last().expect("nonzero polynomial")
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::trimmed(
            (0..n)
                .map(|i| {
                    self.0.get(i).cloned().unwrap_or_else(Rational::zero)
                        + o.0.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }

    fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self(Vec::new());
        }
        let mut v = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::trimmed(v)
    }

    fn divrem(&self, d: &Self) -> (Self, Self) {
        let mut r = self.clone();
        let mut q = vec![Rational::zero(); self.0.len().saturating_sub(d.degree()).max(1)];
        while !r.is_zero() && r.degree() >= d.degree() {
            let shift = r.degree() - d.degree();
            let f = r.lead() / d.lead();
            q[shift] += &f;
            r = r.add(&Self::monomial(-f, shift).mul(d));
        }
        (Self::trimmed(q), r)
    }

    fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a
    }

    fn eval(&self, u: &Rational) -> Rational {
        self.0
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * u + c)
    }
}

/// Canonical univariate rational function `num(u) / den(u)`: integer
/// coefficients (lowest degree first), coprime, jointly primitive, leading
/// denominator coefficient positive. Zero is `0 / 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunction {
    num: Vec<BigInt>,
    den: Vec<BigInt>,
}

impl RationalFunction {
    fn from_polys(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self {
                num: Vec::new(),
                den: vec![BigInt::one()],
            };
        }
        let g = num.gcd(&den);
        let (num, _) = num.divrem(&g);
        let (den, _) = den.divrem(&g);
        let lcm = num
            .0
            .iter()
            .chain(&den.0)
            .fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let to_int = |p: &UniPoly| -> Vec<BigInt> {
            p.0.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect()
        };
        let (mut n, mut d) = (to_int(&num), to_int(&den));
        let mut content = n.iter().chain(&d).fold(BigInt::zero(), |g, x| g.gcd(x));
        if d.last().unwrap().is_negative() {
            content = -content;
        }
        for x in n.iter_mut().chain(d.iter_mut()) {
            *x /= &content;
        }
        Self { num: n, den: d }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_polys(UniPoly::trimmed(vec![c]), UniPoly(vec![Rational::one()]))
    }

    /// Builds the canonical form of `num / den` from integer coefficient lists.
    pub fn new(num: Vec<i64>, den: Vec<i64>) -> Result<Self> {
        let conv = |v: Vec<i64>| UniPoly::trimmed(v.into_iter().map(rational::int).collect());
        let den = conv(den);
        if den.is_zero() {
            return Err(Error::Pole("zero denominator".into()));
        }
        Ok(Self::from_polys(conv(num), den))
    }

    /// `c u^k` for any integer `k`.
    pub fn monomial(c: Rational, k: i64) -> Self {
        if k >= 0 {
            Self::from_polys(UniPoly::monomial(c, k as usize), UniPoly(vec![Rational::one()]))
        } else {
            Self::from_polys(
                UniPoly::trimmed(vec![c]),
                UniPoly::monomial(Rational::one(), k.unsigned_abs() as usize),
            )
        }
    }

    /// `c u^k / (1 - u^k)` for `k != 0`.
    pub fn multiple_cover(c: Rational, k: i64) -> Self {
        assert!(k != 0);
        let m = k.unsigned_abs() as usize;
        let one = UniPoly(vec![Rational::one()]);
        if k > 0 {
            Self::from_polys(
                UniPoly::monomial(c, m),
                one.add(&UniPoly::monomial(-Rational::one(), m)),
            )
        } else {
            // u^{-m} / (1 - u^{-m}) = 1 / (u^m - 1)
            Self::from_polys(
                UniPoly::trimmed(vec![c]),
                UniPoly::monomial(Rational::one(), m).add(&one.neg()),
            )
        }
    }

    fn polys(&self) -> (UniPoly, UniPoly) {
        let conv = |v: &[BigInt]| UniPoly(v.iter().map(|x| Rational::from_integer(x.clone())).collect());
        (conv(&self.num), conv(&self.den))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.polys();
        let (c, d) = other.polys();
        Self::from_polys(a.mul(&d).add(&c.mul(&b)), b.mul(&d))
    }

    pub fn numerator(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &[BigInt] {
        &self.den
    }

    pub fn as_constant(&self) -> Option<Rational> {
        (self.num.len() <= 1 && self.den.len() == 1).then(|| {
            let n = self.num.first().cloned().unwrap_or_else(BigInt::zero);
            Rational::new(n, self.den[0].clone())
        })
    }

    pub fn eval(&self, u: &Rational) -> Result<Rational> {
        let (n, d) = self.polys();
        let dv = d.eval(u);
        if dv.is_zero() {
            return Err(Error::Pole(format!("denominator vanishes at u = {}", rational::format(u))));
        }
        Ok(n.eval(u) / dv)
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let strs = |v: &[BigInt]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
        let mut st = s.serialize_struct("RationalFunction", 3)?;
        st.serialize_field("num", &strs(&self.num))?;
        st.serialize_field("den", &strs(&self.den))?;
        st.serialize_field("text", &self.to_string())?;
        st.end()
    }
}

fn fmt_poly(p: &[BigInt]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    let mut parts = Vec::new();
    for (k, c) in p.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let body = match (k, mag.is_one()) {
            (0, _) => mag.to_string(),
            (1, true) => "u".into(),
            (1, false) => format!("{mag}*u"),
            (_, true) => format!("u^{k}"),
            (_, false) => format!("{mag}*u^{k}"),
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        parts.push((sign, body));
    }
    let mut s = String::new();
    for (i, (sign, body)) in parts.iter().enumerate() {
        match (i, *sign) {
            (0, "-") => s.push_str(&format!("-{body}")),
            (0, _) => s.push_str(body),
            (_, sign) => s.push_str(&format!(" {sign} {body}")),
        }
    }
    s
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.len() == 1 && self.den[0].is_one() {
            write!(f, "{}", fmt_poly(&self.num))
        } else {
            write!(f, "({}) / ({})", fmt_poly(&self.num), fmt_poly(&self.den))
        }
    }
}

/// Rewrites `expr` as a rational function of `u = q^gamma`. Every class in
/// the expression must be an integer multiple of `gamma`.
pub fn restrict_to_wall_variable(expr: &QExpression, gamma: &CurveClass) -> Result<RationalFunction> {
    check_rank(expr.rank, gamma.rank())?;
    if gamma.is_zero() {
        return Err(Error::ZeroVector("wall class"));
    }
    let mut out = RationalFunction::constant(Rational::zero());
    for (eta, c) in &expr.poly {
        let k = eta
            .multiple_of(gamma)
            .ok_or_else(|| Error::MixedClasses(eta.coords().to_vec()))?;
        out = out.add(&RationalFunction::monomial(c.clone(), k));
    }
    for (eta, c) in &expr.prims {
        let k = eta
            .multiple_of(gamma)
            .ok_or_else(|| Error::MixedClasses(eta.coords().to_vec()))?;
        out = out.add(&RationalFunction::multiple_cover(c.clone(), k));
    }
    Ok(out)
}
