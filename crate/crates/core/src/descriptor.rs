//! JSON documents: chart descriptors, atlas directories and cover
//! configurations.
//!
//! A chart descriptor looks like
//!
//! ```json
//! {
//!   "id": "X",
//!   "rank": 2,
//!   "cubic": [{"i": 1, "j": 1, "k": 1, "c": 8}, {"i": 1, "j": 1, "k": 2, "c": 4}],
//!   "nef_rays": [[1, 0], [1, 1]],
//!   "walls": [{"gamma": [1, -1], "kind": "flopping", "n": 1}],
//!   "curves": [{"eta": [1, -1], "n": 1}]
//! }
//! ```
//!
//! Cubic indices are 1-based and must satisfy `i <= j <= k`. An optional
//! `framing` lists a lattice basis of divisor classes inside the nef cone.
//! A nonempty `torsion` list is rejected.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atlas::{Adjacency, Atlas, CurveCount, ModelChart, WallDescriptor};
use crate::cone::Cone;
use crate::cover::{self, CandidateDomain, LatticeAutomorphism};
use crate::lattice::{CubicForm, DivisorClass, FramingBasis};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubicEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryDescriptor {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub rank: usize,
    pub cubic: Vec<CubicEntry>,
    pub nef_rays: Vec<Vec<i64>>,
    #[serde(default)]
    pub walls: Vec<WallDescriptor>,
    #[serde(default)]
    pub curves: Vec<CurveCount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub framing: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<serde_json::Value>,
}

fn field_err(field: impl Into<String>, err: Error) -> Error {
    match err {
        e @ Error::Invalid { .. } => e,
        e => Error::invalid(field, e.to_string()),
    }
}

impl GeometryDescriptor {
    /// Validates the descriptor and builds the chart. `default_id` is used
    /// when the document has no `id`.
    pub fn to_chart(&self, default_id: &str) -> Result<ModelChart> {
        let r = self.rank;
        if r == 0 {
            return Err(Error::invalid("rank", "must be positive"));
        }
        if !self.torsion.is_empty() {
            return Err(Error::invalid(
                "torsion",
                "torsion in the cohomology lattice is not supported",
            ));
        }
        let mut entries = Vec::with_capacity(self.cubic.len());
        for (n, e) in self.cubic.iter().enumerate() {
            let idx = [e.i, e.j, e.k];
            if idx.iter().any(|&x| x == 0 || x > r) {
                return Err(Error::invalid(
                    format!("cubic[{n}]"),
                    format!("indices {idx:?} must lie in 1..={r}"),
                ));
            }
            entries.push(([e.i - 1, e.j - 1, e.k - 1], e.c));
        }
        let cubic = CubicForm::from_entries(r, entries).map_err(|e| field_err("cubic", e))?;
        for (n, ray) in self.nef_rays.iter().enumerate() {
            if ray.len() != r {
                return Err(Error::invalid(
                    format!("nef_rays[{n}]"),
                    format!("expected {r} coordinates, found {}", ray.len()),
                ));
            }
        }
        let nef = Cone::from_rays(r, &self.nef_rays).map_err(|e| field_err("nef_rays", e))?;
        let framing = match &self.framing {
            None => None,
            Some(rows) => {
                for (n, row) in rows.iter().enumerate() {
                    if row.len() != r {
                        return Err(Error::invalid(
                            format!("framing[{n}]"),
                            format!("expected {r} coordinates, found {}", row.len()),
                        ));
                    }
                }
                if rows.len() != r {
                    return Err(Error::invalid("framing", format!("expected {r} vectors")));
                }
                let basis = rows.iter().map(|v| DivisorClass::new(v.clone())).collect();
                Some(FramingBasis::new(basis).map_err(|e| field_err("framing", e))?)
            }
        };
        let id = self.id.clone().unwrap_or_else(|| default_id.to_string());
        ModelChart::new(id, cubic, nef, self.walls.clone(), self.curves.clone(), framing)
    }

    pub fn from_chart(chart: &ModelChart) -> Self {
        Self {
            id: Some(chart.id.clone()),
            rank: chart.rank(),
            cubic: chart
                .cubic
                .entries()
                .map(|([i, j, k], c)| CubicEntry {
                    i: i + 1,
                    j: j + 1,
                    k: k + 1,
                    c,
                })
                .collect(),
            nef_rays: chart.nef.rays().to_vec(),
            walls: chart.walls.clone(),
            curves: chart.curves.clone(),
            framing: chart
                .framing
                .as_ref()
                .map(|f| f.basis().iter().map(|e| e.coords().to_vec()).collect()),
            torsion: Vec::new(),
        }
    }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parses and validates a chart descriptor.
pub fn parse_chart(text: &str, default_id: &str) -> Result<ModelChart> {
    let desc: GeometryDescriptor = parse_json(text, "descriptor")?;
    desc.to_chart(default_id)
}

pub fn chart_to_json(chart: &ModelChart) -> serde_json::Value {
    serde_json::to_value(GeometryDescriptor::from_chart(chart)).expect("descriptor serializes")
}

/// Loads a chart descriptor; the file stem is the default chart id.
pub fn load_descriptor(path: &Path) -> Result<ModelChart> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("chart")
        .to_string();
    parse_chart(&read(path)?, &stem).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        e => e,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdjacencyEntry {
    pub a: String,
    pub b: String,
    /// Index into the walls of chart `a`.
    pub wall: usize,
}

pub const ADJACENCY_FILE: &str = "adjacency.json";

/// Loads every `*.json` chart in `dir` (sorted by file name) together with
/// the optional `adjacency.json`.
pub fn load_atlas(dir: &Path) -> Result<Atlas> {
    let listing = fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for entry in listing {
        let p = entry.map_err(|e| Error::Io(e.to_string()))?.path();
        let is_json = p.extension().is_some_and(|x| x == "json");
        let is_adj = p.file_name().is_some_and(|n| n == ADJACENCY_FILE);
        if p.is_file() && is_json && !is_adj {
            paths.push(p);
        }
    }
    paths.sort();
    let charts = paths
        .iter()
        .map(|p| load_descriptor(p))
        .collect::<Result<Vec<_>>>()?;
    let adj_path = dir.join(ADJACENCY_FILE);
    let entries: Vec<AdjacencyEntry> = if adj_path.is_file() {
        parse_json(&read(&adj_path)?, ADJACENCY_FILE)?
    } else {
        Vec::new()
    };
    let mut adjacency = Vec::with_capacity(entries.len());
    for (n, e) in entries.iter().enumerate() {
        let chart = charts
            .iter()
            .find(|c| c.id == e.a)
            .ok_or_else(|| Error::invalid(format!("adjacency[{n}].a"), format!("unknown chart {:?}", e.a)))?;
        let wall = chart
            .walls
            .get(e.wall)
            .ok_or_else(|| Error::invalid(format!("adjacency[{n}].wall"), format!("chart {:?} has no wall {}", e.a, e.wall)))?;
        adjacency.push(Adjacency {
            a: e.a.clone(),
            b: e.b.clone(),
            wall: wall.clone(),
        });
    }
    Atlas::new(charts, adjacency)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RayGrid {
    pub min: i64,
    pub max: i64,
}

/// Input of the `cover` command.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverConfig {
    pub generators: Vec<Vec<Vec<i64>>>,
    /// Rays of the candidate domain.
    pub candidate: Vec<Vec<i64>>,
    /// Rays of the target cone.
    pub target: Vec<Vec<i64>>,
    /// Explicit sample rays.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rays: Option<Vec<Vec<i64>>>,
    /// All integer vectors in the box `[min, max]^r` strictly inside the target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<RayGrid>,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit_depth: Option<usize>,
}

pub struct CoverSetup {
    pub generators: Vec<LatticeAutomorphism>,
    pub candidate: CandidateDomain,
    pub target: Cone,
    pub rays: Vec<Vec<i64>>,
}

impl CoverConfig {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text, "cover config")
    }

    pub fn setup(&self) -> Result<CoverSetup> {
        let r = self
            .target
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("target", "needs at least one ray"))?;
        let target = Cone::from_rays(r, &self.target).map_err(|e| field_err("target", e))?;
        if !target.is_full_dimensional() {
            return Err(Error::invalid("target", "must be full-dimensional"));
        }
        let pi = Cone::from_rays(r, &self.candidate).map_err(|e| field_err("candidate", e))?;
        let candidate = CandidateDomain::new(pi, &target)?;
        let generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(n, m)| {
                if m.len() != r {
                    return Err(Error::invalid(format!("generators[{n}]"), format!("expected a {r}x{r} matrix")));
                }
                LatticeAutomorphism::new(m.clone()).map_err(|e| field_err(format!("generators[{n}]"), e))
            })
            .collect::<Result<Vec<_>>>()?;
        if generators.is_empty() {
            return Err(Error::invalid("generators", "at least one generator is required"));
        }
        let rays = match (&self.rays, &self.grid) {
            (Some(rays), None) => rays.clone(),
            (None, Some(g)) => cover::grid_rays(r, g.min, g.max)
                .into_iter()
                .filter(|v| target.contains_int(v, crate::cone::Membership::Open).unwrap_or(false))
                .collect(),
            _ => return Err(Error::invalid("rays", "give exactly one of `rays` and `grid`")),
        };
        Ok(CoverSetup {
            generators,
            candidate,
            target,
            rays,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = r#"{
        "id": "X",
        "rank": 2,
        "cubic": [{"i": 1, "j": 1, "k": 1, "c": 8}, {"i": 1, "j": 1, "k": 2, "c": 4},
                  {"i": 1, "j": 2, "k": 2, "c": 2}],
        "nef_rays": [[1, 0], [1, 1]],
        "walls": [{"gamma": [1, -1], "kind": "flopping", "n": 1}],
        "curves": [{"eta": [1, -1], "n": 1}]
    }"#;

    #[test]
    fn fixture_loads() {
        let chart = parse_chart(FIXTURE, "chart").unwrap();
        assert_eq!(chart, crate::atlas::fixtures::flop_chart(1));
        assert_eq!(chart.walls.len(), 1);
    }

    #[test]
    fn round_trip_is_identity() {
        let chart = parse_chart(FIXTURE, "chart").unwrap();
        let text = serde_json::to_string(&chart_to_json(&chart)).unwrap();
        assert_eq!(parse_chart(&text, "other").unwrap(), chart);
    }

    fn rejects(text: &str, needle: &str) {
        let err = parse_chart(text, "chart").unwrap_err().to_string();
        assert!(err.contains(needle), "{err}");
    }

    #[test]
    fn rejections_name_the_field() {
        rejects(&FIXTURE.replace(r#""i": 1, "j": 1, "k": 2"#, r#""i": 1, "j": 2, "k": 1"#), "cubic");
        rejects(
            &FIXTURE.replace(
                r#"{"i": 1, "j": 2, "k": 2, "c": 2}"#,
                r#"{"i": 1, "j": 2, "k": 2, "c": 2}, {"i": 1, "j": 2, "k": 2, "c": 3}"#,
            ),
            "duplicate",
        );
        rejects(&FIXTURE.replace(r#""rank": 2"#, r#""rank": 3"#), "nef_rays[0]");
        rejects(&FIXTURE.replace(r#""id": "X","#, r#""id": "X", "torsion": [2],"#), "torsion");
        rejects(&FIXTURE.replace(r#""id": "X","#, r#""id": "X", "colour": 1,"#), "unknown field");
        rejects(&FIXTURE.replace(r#""i": 1, "j": 1, "k": 1"#, r#""i": 0, "j": 1, "k": 1"#), "cubic[0]");
    }

    #[test]
    fn divisorial_wall_needs_minus_two() {
        let text = FIXTURE.replace(
            r#"{"gamma": [1, -1], "kind": "flopping", "n": 1}"#,
            r#"{"gamma": [1, -1], "kind": "flopping", "n": 1},
               {"gamma": [0, 1], "kind": "divisorial", "e": [0, -1]}"#,
        );
        rejects(&text, "walls[1].e");
    }
}
