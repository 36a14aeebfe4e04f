//! Charts of birational models, walls between them, flops and divisorial
//! reflections, and the assembly of nef cones into the movable cone.
//!
//! Divisor classes of two models related by a flop are identified through
//! proper transform, which is the identity on coordinates. Flopping the curve
//! class `gamma` sends it to `-gamma` and shifts the cubic form by
//! `-n_gamma (. gamma)^3`.

use serde::{Deserialize, Serialize};

use crate::cone::{self, Cone, Membership};
use crate::error::check_rank;
use crate::lattice::{pair, CubicForm, CurveClass, DivisorClass, FramingBasis};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WallKind {
    Flopping,
    Divisorial,
    MoriFibration,
}

/// User-supplied image of a nef generator under the flop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProperTransform {
    pub from: DivisorClass,
    pub to: DivisorClass,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallDescriptor {
    /// The extremal curve class; the wall is `gamma^perp` and the chart lies
    /// on the side `gamma >= 0`.
    pub gamma: CurveClass,
    pub kind: WallKind,
    /// Number of curves in the class (flopping walls).
    #[serde(rename = "n", default)]
    pub n_gamma: i64,
    /// Contracted divisor (divisorial walls).
    #[serde(rename = "e", default, skip_serializing_if = "Option::is_none")]
    pub e_divisor: Option<DivisorClass>,
    /// Auxiliary divisor `w` with `w . gamma = -2`; nef generators off the
    /// wall are sent to `g + (g . gamma) w` by a flop.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<DivisorClass>,
    /// Overrides for the flopped images of individual nef generators.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transforms: Vec<ProperTransform>,
}

impl WallDescriptor {
    pub fn flopping(gamma: CurveClass, n_gamma: i64) -> Self {
        Self {
            gamma,
            kind: WallKind::Flopping,
            n_gamma,
            e_divisor: None,
            aux: None,
            transforms: Vec::new(),
        }
    }

    pub fn divisorial(gamma: CurveClass, e: DivisorClass) -> Self {
        Self {
            gamma,
            kind: WallKind::Divisorial,
            n_gamma: 0,
            e_divisor: Some(e),
            aux: None,
            transforms: Vec::new(),
        }
    }

    pub fn mori_fibration(gamma: CurveClass) -> Self {
        Self {
            gamma,
            kind: WallKind::MoriFibration,
            n_gamma: 0,
            e_divisor: None,
            aux: None,
            transforms: Vec::new(),
        }
    }

    /// Checks the descriptor on its own; `field` prefixes diagnostics.
    pub fn validate(&self, rank: usize, field: &str) -> Result<()> {
        let gamma_field = format!("{field}.gamma");
        if self.gamma.rank() != rank {
            return Err(Error::invalid(gamma_field, format!("expected rank {rank}")));
        }
        if self.gamma.is_zero() || !self.gamma.is_primitive() {
            return Err(Error::invalid(gamma_field, "must be nonzero and primitive"));
        }
        if self.kind == WallKind::Flopping && self.n_gamma < 1 {
            return Err(Error::invalid(
                format!("{field}.n"),
                "flopping walls need n >= 1",
            ));
        }
        if self.kind != WallKind::Flopping && self.n_gamma < 0 {
            return Err(Error::invalid(format!("{field}.n"), "must be nonnegative"));
        }
        if let Some(e) = &self.e_divisor {
            if self.kind != WallKind::Divisorial {
                return Err(Error::invalid(
                    format!("{field}.e"),
                    "only divisorial walls carry a contracted divisor",
                ));
            }
            check_rank(rank, e.rank())
                .map_err(|err| Error::invalid(format!("{field}.e"), err.to_string()))?;
            let eg = pair(e, &self.gamma)?;
            if eg != -2 {
                return Err(Error::invalid(
                    format!("{field}.e"),
                    Error::NotReflectionWall(eg).to_string(),
                ));
            }
        }
        if let Some(w) = &self.aux {
            check_rank(rank, w.rank())
                .map_err(|err| Error::invalid(format!("{field}.aux"), err.to_string()))?;
            let wg = pair(w, &self.gamma)?;
            if wg != -2 {
                return Err(Error::invalid(
                    format!("{field}.aux"),
                    format!("aux . gamma = {wg}, expected -2"),
                ));
            }
        }
        for (i, t) in self.transforms.iter().enumerate() {
            let f = format!("{field}.transforms[{i}]");
            if t.from.rank() != rank || t.to.rank() != rank {
                return Err(Error::invalid(f, format!("expected rank {rank}")));
            }
            if !t.from.is_primitive() || !t.to.is_primitive() {
                return Err(Error::invalid(f, "classes must be primitive"));
            }
        }
        Ok(())
    }

    /// The same wall seen from the other side of a flop.
    fn transported(&self) -> Self {
        Self {
            gamma: self.gamma.neg(),
            kind: self.kind,
            n_gamma: self.n_gamma,
            e_divisor: self.e_divisor.clone(),
            aux: self.aux.as_ref().map(DivisorClass::neg),
            transforms: self
                .transforms
                .iter()
                .map(|t| ProperTransform {
                    from: t.to.clone(),
                    to: t.from.clone(),
                })
                .collect(),
        }
    }
}

/// Signed count `n` of rational curves in class `eta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveCount {
    pub eta: CurveClass,
    pub n: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelChart {
    pub id: String,
    pub cubic: CubicForm,
    pub nef: Cone,
    pub walls: Vec<WallDescriptor>,
    pub curves: Vec<CurveCount>,
    pub framing: Option<FramingBasis>,
}

impl ModelChart {
    /// Builds a chart and checks its invariants: every wall supports a facet
    /// of the nef cone, and curve classes pair nonnegatively with it.
    pub fn new(
        id: impl Into<String>,
        cubic: CubicForm,
        nef: Cone,
        walls: Vec<WallDescriptor>,
        curves: Vec<CurveCount>,
        framing: Option<FramingBasis>,
    ) -> Result<Self> {
        let chart = Self {
            id: id.into(),
            cubic,
            nef,
            walls,
            curves,
            framing,
        };
        chart.validate()?;
        Ok(chart)
    }

    pub fn rank(&self) -> usize {
        self.cubic.rank()
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        if self.nef.rank() != r {
            return Err(Error::invalid("nef_rays", format!("expected rank {r}")));
        }
        if !self.nef.is_full_dimensional() {
            return Err(Error::invalid("nef_rays", "nef cone must be full-dimensional"));
        }
        for (i, w) in self.walls.iter().enumerate() {
            let field = format!("walls[{i}]");
            w.validate(r, &field)?;
            if !self.nef.has_facet_normal(&w.gamma) {
                return Err(Error::invalid(
                    format!("{field}.gamma"),
                    "gamma^perp does not support a facet of the nef cone with the cone on the side gamma >= 0",
                ));
            }
            for (k, t) in w.transforms.iter().enumerate() {
                if !self.nef.rays().contains(&t.from.coords().to_vec()) {
                    return Err(Error::invalid(
                        format!("{field}.transforms[{k}].from"),
                        "not a generator of the nef cone",
                    ));
                }
            }
        }
        for (i, c) in self.curves.iter().enumerate() {
            let field = format!("curves[{i}].eta");
            if c.eta.rank() != r {
                return Err(Error::invalid(field, format!("expected rank {r}")));
            }
            if c.eta.is_zero() {
                return Err(Error::invalid(field, "curve class must be nonzero"));
            }
            if self.curves[..i].iter().any(|o| o.eta == c.eta) {
                return Err(Error::invalid(field, "duplicate curve class"));
            }
            for ray in self.nef.rays() {
                if pair(&DivisorClass::new(ray.clone()), &c.eta)? < 0 {
                    return Err(Error::invalid(
                        field,
                        format!("pairs negatively with nef generator {ray:?}"),
                    ));
                }
            }
        }
        for (i, w) in self.walls.iter().enumerate() {
            if w.kind != WallKind::Flopping {
                continue;
            }
            if let Some(c) = self.curves.iter().find(|c| c.eta == w.gamma) {
                if c.n != w.n_gamma {
                    return Err(Error::invalid(
                        format!("walls[{i}].n"),
                        format!("disagrees with the curve count {} for gamma", c.n),
                    ));
                }
            }
        }
        if let Some(fr) = &self.framing {
            if fr.rank() != r {
                return Err(Error::invalid("framing", format!("expected rank {r}")));
            }
            for (i, e) in fr.basis().iter().enumerate() {
                if !self.nef.contains_int(e.coords(), Membership::Closed)? {
                    return Err(Error::invalid(
                        format!("framing[{i}]"),
                        "framing vector outside the nef cone",
                    ));
                }
            }
        }
        Ok(())
    }

    /// The declared framing, else the nef generators when they form a lattice
    /// basis, else the standard basis.
    pub fn effective_framing(&self) -> FramingBasis {
        if let Some(fr) = &self.framing {
            return fr.clone();
        }
        if self.nef.is_simplicial() {
            let basis = self
                .nef
                .rays()
                .iter()
                .map(|r| DivisorClass::new(r.clone()))
                .collect();
            if let Ok(fr) = FramingBasis::new(basis) {
                return fr;
            }
        }
        FramingBasis::standard(self.rank())
    }

    pub fn wall(&self, index: usize) -> Result<&WallDescriptor> {
        self.walls.get(index).ok_or(Error::WallNotOnChart(index))
    }
}

fn flopped_id(id: &str, wall: usize) -> String {
    let tag = format!("/flop{wall}");
    match id.strip_suffix(&tag) {
        Some(base) => base.to_string(),
        None => format!("{id}{tag}"),
    }
}

fn primitive_i64(v: Vec<i128>) -> Result<Vec<i64>> {
    let g = v.iter().fold(0i128, |g, &x| num_integer::gcd(g, x));
    v.into_iter()
        .map(|x| i64::try_from(if g > 1 { x / g } else { x }).map_err(|_| Error::Overflow))
        .collect()
}

/// Image of a nef generator `g` with `g . gamma > 0` across the wall.
fn transport_generator(chart: &ModelChart, wall: &WallDescriptor, g: &[i64]) -> Result<Vec<i64>> {
    let gd = DivisorClass::new(g.to_vec());
    if let Some(t) = wall.transforms.iter().find(|t| t.from == gd) {
        return Ok(t.to.coords().to_vec());
    }
    let p = pair(&gd, &wall.gamma)?;
    if let Some(w) = &wall.aux {
        return gd.add(&w.scale(p)?).map(|v| v.coords().to_vec());
    }
    if chart.rank() == 2 && chart.nef.is_simplicial() {
        // Euclidean mirror of g across the line of the generator on the wall.
        let v = chart
            .nef
            .rays()
            .iter()
            .find(|r| pair(&DivisorClass::new((*r).clone()), &wall.gamma) == Ok(0))
            .ok_or_else(|| Error::FlopUndetermined("no nef generator on the wall".into()))?;
        let gv = g[0] as i128 * v[0] as i128 + g[1] as i128 * v[1] as i128;
        let vv = v[0] as i128 * v[0] as i128 + v[1] as i128 * v[1] as i128;
        return primitive_i64(
            (0..2)
                .map(|i| 2 * gv * v[i] as i128 - vv * g[i] as i128)
                .collect(),
        );
    }
    Err(Error::FlopUndetermined(format!(
        "generator {g:?} has no proper transform; supply `transforms` or `aux` on the wall"
    )))
}

/// Flops `chart` across its flopping wall `wall_index`.
///
/// The returned chart has the cubic `F - n (. gamma)^3`, the curve counts on
/// positive multiples of `gamma` moved to the opposite classes, the flopped
/// wall replaced by its transport (class `-gamma`), and the nef cone on the
/// other side of the wall. All other walls and curves are carried verbatim.
pub fn flop(chart: &ModelChart, wall_index: usize) -> Result<ModelChart> {
    let wall = chart.wall(wall_index)?;
    if wall.kind != WallKind::Flopping {
        return Err(Error::NotFlopping(wall_index));
    }
    let gamma = &wall.gamma;
    let cubic = chart.cubic.add_cube_of(gamma, -wall.n_gamma)?;

    let mut rays = Vec::with_capacity(chart.nef.rays().len());
    for g in chart.nef.rays() {
        let p = pair(&DivisorClass::new(g.clone()), gamma)?;
        if p == 0 {
            rays.push(g.clone());
        } else {
            let image = transport_generator(chart, wall, g)?;
            if pair(&DivisorClass::new(image.clone()), gamma)? >= 0 {
                return Err(Error::FlopUndetermined(format!(
                    "image {image:?} of {g:?} does not cross the wall"
                )));
            }
            rays.push(image);
        }
    }
    let nef = Cone::from_rays(chart.rank(), &rays)?;
    let transported = wall.transported();
    if !nef.is_full_dimensional() || !nef.has_facet_normal(&transported.gamma) {
        return Err(Error::FlopUndetermined(
            "flopped generators do not span a chamber on the wall".into(),
        ));
    }

    let curves = chart
        .curves
        .iter()
        .map(|c| match c.eta.multiple_of(gamma) {
            Some(k) if k > 0 => CurveCount {
                eta: c.eta.neg(),
                n: c.n,
            },
            _ => c.clone(),
        })
        .collect();
    let mut walls = chart.walls.clone();
    walls[wall_index] = transported;

    Ok(ModelChart {
        id: flopped_id(&chart.id, wall_index),
        cubic,
        nef,
        walls,
        curves,
        framing: None,
    })
}

/// Caveats attached to a flop: untransported wall data and non-generic curve
/// configurations.
pub fn flop_notes(chart: &ModelChart, wall_index: usize) -> Result<Vec<String>> {
    let wall = chart.wall(wall_index)?;
    let mut notes = Vec::new();
    if chart.walls.len() > 1 {
        notes.push(
            "walls other than the flopped one are transported verbatim and are unverified on the new chart"
                .to_string(),
        );
    }
    for c in &chart.curves {
        if let Some(k) = c.eta.multiple_of(&wall.gamma) {
            if k.abs() >= 2 {
                notes.push(format!(
                    "non-generic: curve class {:?} is {k} times the flopped class",
                    c.eta.coords()
                ));
            }
        }
    }
    if chart.framing.is_some() {
        notes.push("declared framing dropped; the flopped chart uses its default".to_string());
    }
    if let Ok(flopped) = flop(chart, wall_index) {
        for c in &flopped.curves {
            let negative = flopped
                .nef
                .rays()
                .iter()
                .any(|r| pair(&DivisorClass::new(r.clone()), &c.eta).is_ok_and(|p| p < 0));
            if negative {
                notes.push(format!(
                    "curve class {:?} pairs negatively with the flopped nef cone",
                    c.eta.coords()
                ));
            }
        }
    }
    Ok(notes)
}

/// `H -> H + (H . gamma) E` for a divisorial wall with `E . gamma = -2`.
pub fn reflect_divisorial(h: &DivisorClass, wall: &WallDescriptor) -> Result<DivisorClass> {
    if wall.kind != WallKind::Divisorial {
        return Err(Error::Degenerate("reflection needs a divisorial wall".into()));
    }
    let e = wall.e_divisor.as_ref().ok_or(Error::MissingDivisor)?;
    let eg = pair(e, &wall.gamma)?;
    if eg != -2 {
        return Err(Error::NotReflectionWall(eg));
    }
    let hg = pair(h, &wall.gamma)?;
    h.add(&e.scale(hg)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    pub a: String,
    pub b: String,
    /// The wall as seen from chart `a`.
    pub wall: WallDescriptor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    pub charts: Vec<ModelChart>,
    pub adjacency: Vec<Adjacency>,
}

impl Atlas {
    pub fn new(charts: Vec<ModelChart>, adjacency: Vec<Adjacency>) -> Result<Self> {
        if charts.is_empty() {
            return Err(Error::EmptyAtlas);
        }
        let r = charts[0].rank();
        for (i, c) in charts.iter().enumerate() {
            check_rank(r, c.rank())?;
            if charts[..i].iter().any(|o| o.id == c.id) {
                return Err(Error::Atlas(format!("duplicate chart id {:?}", c.id)));
            }
        }
        for adj in &adjacency {
            for id in [&adj.a, &adj.b] {
                if !charts.iter().any(|c| &c.id == id) {
                    return Err(Error::Atlas(format!("adjacency names unknown chart {id:?}")));
                }
            }
            adj.wall.validate(r, "adjacency.wall")?;
        }
        Ok(Self { charts, adjacency })
    }

    pub fn rank(&self) -> usize {
        self.charts[0].rank()
    }

    fn chart(&self, id: &str) -> &ModelChart {
        self.charts.iter().find(|c| c.id == id).expect("validated id")
    }
}

/// Convex hull of all chart nef cones.
pub fn movable_cone(atlas: &Atlas) -> Result<Cone> {
    let first = atlas.charts.first().ok_or(Error::EmptyAtlas)?;
    let rays: Vec<Vec<i64>> = atlas
        .charts
        .iter()
        .flat_map(|c| c.nef.rays().iter().cloned())
        .collect();
    Cone::from_rays(first.rank(), &rays)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChamberWall {
    pub a: String,
    pub b: String,
    pub normal: CurveClass,
    /// Declared kind, `None` when the charts share a wall no adjacency names.
    pub kind: Option<WallKind>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChamberReport {
    pub chambers: Vec<String>,
    pub interiors_disjoint: bool,
    pub walls: Vec<ChamberWall>,
    pub movable_rays: Vec<Vec<i64>>,
    pub movable_halfspaces: Vec<Vec<i64>>,
}

/// Lists chambers and their common walls. Overlapping interiors and declared
/// adjacencies that do not match the geometry are errors.
pub fn chamber_structure(atlas: &Atlas) -> Result<ChamberReport> {
    let mut walls = Vec::new();
    for (i, a) in atlas.charts.iter().enumerate() {
        for b in &atlas.charts[i + 1..] {
            match cone::common_wall(&a.nef, &b.nef) {
                Err(Error::NotAdjacent) => {
                    return Err(Error::OverlappingChambers(a.id.clone(), b.id.clone()))
                }
                Err(e) => return Err(e),
                Ok(None) => {}
                Ok(Some(h)) => {
                    let kind = atlas
                        .adjacency
                        .iter()
                        .find(|adj| {
                            (adj.a == a.id && adj.b == b.id) || (adj.a == b.id && adj.b == a.id)
                        })
                        .map(|adj| adj.wall.kind);
                    walls.push(ChamberWall {
                        a: a.id.clone(),
                        b: b.id.clone(),
                        normal: h.normal().clone(),
                        kind,
                    });
                }
            }
        }
    }
    for adj in &atlas.adjacency {
        let (a, b) = (atlas.chart(&adj.a), atlas.chart(&adj.b));
        match cone::common_wall(&a.nef, &b.nef)? {
            Some(h) if h.matches(&adj.wall.gamma) => {}
            Some(h) => {
                return Err(Error::Atlas(format!(
                    "declared wall {:?} between {:?} and {:?} differs from the common wall {:?}",
                    adj.wall.gamma.coords(),
                    adj.a,
                    adj.b,
                    h.normal().coords()
                )))
            }
            None => {
                return Err(Error::Atlas(format!(
                    "charts {:?} and {:?} are declared adjacent but share no wall",
                    adj.a, adj.b
                )))
            }
        }
    }
    let mov = movable_cone(atlas)?;
    Ok(ChamberReport {
        chambers: atlas.charts.iter().map(|c| c.id.clone()).collect(),
        interiors_disjoint: true,
        walls,
        movable_rays: mov.rays().to_vec(),
        movable_halfspaces: mov.halfspaces().to_vec(),
    })
}
