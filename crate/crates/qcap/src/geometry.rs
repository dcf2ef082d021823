//! Parametric cross-section descriptions and their resolution into concrete
//! boundary segments.
//!
//! A cross-section file declares named parameters, conductor loops, and
//! dielectric interfaces with expression-valued coordinates. Resolution
//! evaluates every expression against (possibly overridden) parameters and
//! converts to meters, producing the flat segment list the mesher consumes.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr::eval_param_expr;

/// A 2D point or vector in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Ordered name -> value map with unique identifier keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Parameters(Vec<(String, f64)>);

fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Parameters {
    pub fn from_pairs(pairs: Vec<(String, f64)>) -> Result<Self> {
        for (i, (name, _)) in pairs.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::Parse(format!("parameter name `{name}` is not an identifier")));
            }
            if pairs[..i].iter().any(|(prev, _)| prev == name) {
                return Err(Error::Parse(format!("duplicate parameter `{name}`")));
            }
        }
        Ok(Parameters(pairs))
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn pairs(&self) -> &[(String, f64)] {
        &self.0
    }

    /// Returns a copy with `overrides` applied; every key must already exist.
    pub fn with_overrides(&self, overrides: &BTreeMap<String, f64>) -> Result<Parameters> {
        for name in overrides.keys() {
            if self.get(name).is_none() {
                return Err(Error::UnknownParameter(name.clone()));
            }
        }
        Ok(Parameters(
            self.0
                .iter()
                .map(|(n, v)| (n.clone(), *overrides.get(n).unwrap_or(v)))
                .collect(),
        ))
    }
}

impl Serialize for Parameters {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (name, value) in &self.0 {
            map.serialize_entry(name, value)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Parameters {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ParamVisitor;

        impl<'de> Visitor<'de> for ParamVisitor {
            type Value = Parameters;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of parameter names to numbers")
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                mut access: A,
            ) -> std::result::Result<Parameters, A::Error> {
                let mut pairs = Vec::new();
                while let Some((name, value)) = access.next_entry::<String, f64>()? {
                    pairs.push((name, value));
                }
                Parameters::from_pairs(pairs).map_err(serde::de::Error::custom)
            }
        }

        deserializer.deserialize_map(ParamVisitor)
    }
}

/// Length scale of all file coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Unit {
    #[serde(rename = "mm")]
    Mm,
    #[serde(rename = "m")]
    M,
}

impl Unit {
    pub fn meters_per_unit(self) -> f64 {
        match self {
            Unit::Mm => 1e-3,
            Unit::M => 1.0,
        }
    }
}

/// A coordinate or permittivity: a plain number or an expression string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamExpr {
    Number(f64),
    Text(String),
}

impl ParamExpr {
    pub fn eval(&self, params: &Parameters) -> Result<f64> {
        match self {
            ParamExpr::Number(v) => Ok(*v),
            ParamExpr::Text(text) => eval_param_expr(text, params),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConductorSpec {
    pub name: String,
    /// Closed vertex loop, counter-clockwise; the closing edge is implicit.
    #[serde(rename = "loop")]
    pub vertices: Vec<(ParamExpr, ParamExpr)>,
    /// Relative permittivity of the dielectric touching each edge
    /// (edge i runs from vertex i to vertex i+1).
    pub face_eps_r: Vec<ParamExpr>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterfaceSpec {
    pub polyline: Vec<(ParamExpr, ParamExpr)>,
    /// Medium on the normal side; the normal is the edge direction rotated
    /// 90 degrees counter-clockwise.
    pub eps_r_pos: ParamExpr,
    pub eps_r_neg: ParamExpr,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossSection {
    pub unit: Unit,
    #[serde(default)]
    pub parameters: Parameters,
    #[serde(default)]
    pub ground_plane: bool,
    pub conductors: Vec<ConductorSpec>,
    #[serde(default)]
    pub dielectric_interfaces: Vec<InterfaceSpec>,
}

/// Parses and structurally validates a geometry document. Expressions stay
/// unevaluated; value-level checks happen in [`resolve_geometry`].
pub fn parse_cross_section(text: &str) -> Result<CrossSection> {
    let cs: CrossSection =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if cs.conductors.is_empty() {
        return Err(Error::Parse("at least one conductor is required".into()));
    }
    if !cs.ground_plane && cs.conductors.len() < 2 {
        return Err(Error::Parse(
            "a single conductor without a ground plane has no return path".into(),
        ));
    }
    for c in &cs.conductors {
        if c.name.is_empty() {
            return Err(Error::Parse("conductor name must be nonempty".into()));
        }
        if c.vertices.len() < 3 {
            return Err(Error::Parse(format!(
                "conductor `{}` loop needs at least 3 vertices",
                c.name
            )));
        }
        if c.face_eps_r.len() != c.vertices.len() {
            return Err(Error::Parse(format!(
                "conductor `{}` has {} face_eps_r entries for {} edges",
                c.name,
                c.face_eps_r.len(),
                c.vertices.len()
            )));
        }
    }
    for (i, iface) in cs.dielectric_interfaces.iter().enumerate() {
        if iface.polyline.len() < 2 {
            return Err(Error::Parse(format!(
                "dielectric interface {i} polyline needs at least 2 vertices"
            )));
        }
    }
    Ok(cs)
}

/// Boundary segment classification with its physical attributes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SegmentKind {
    /// Face of conductor `conductor`, touching a dielectric of permittivity
    /// `eps_r`.
    ConductorFace { conductor: usize, eps_r: f64 },
    /// Dielectric-dielectric interface; `eps_pos` lies on the normal side.
    DielectricInterface { eps_pos: f64, eps_neg: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    pub kind: SegmentKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedGeometry {
    pub segments: Vec<Segment>,
    pub n_cond: usize,
    pub ground_plane: bool,
}

/// Evaluates every expression with `overrides` applied and converts
/// coordinates to meters. Fails with the collected diagnostics if any
/// geometric invariant is violated.
pub fn resolve_geometry(
    cs: &CrossSection,
    overrides: &BTreeMap<String, f64>,
) -> Result<ResolvedGeometry> {
    let params = cs.parameters.with_overrides(overrides)?;
    let scale = cs.unit.meters_per_unit();
    let mut diagnostics = Vec::new();
    let mut segments = Vec::new();

    for (ci, spec) in cs.conductors.iter().enumerate() {
        let mut loop_pts = Vec::with_capacity(spec.vertices.len());
        for (ex, ey) in &spec.vertices {
            loop_pts.push(Point::new(ex.eval(&params)? * scale, ey.eval(&params)? * scale));
        }
        // Shoelace formula; positive area means counter-clockwise.
        let area: f64 = loop_pts
            .iter()
            .zip(loop_pts.iter().cycle().skip(1))
            .map(|(p, q)| p.x * q.y - q.x * p.y)
            .sum::<f64>()
            / 2.0;
        if area <= 0.0 {
            diagnostics.push(format!(
                "conductor `{}` loop is not counter-clockwise (signed area {area:e} m^2)",
                spec.name
            ));
        }
        for (ei, eps_expr) in spec.face_eps_r.iter().enumerate() {
            let eps_r = eps_expr.eval(&params)?;
            if eps_r <= 0.0 {
                diagnostics.push(format!(
                    "conductor `{}` edge {ei} has nonpositive face_eps_r {eps_r}",
                    spec.name
                ));
            }
            segments.push(Segment {
                a: loop_pts[ei],
                b: loop_pts[(ei + 1) % loop_pts.len()],
                kind: SegmentKind::ConductorFace { conductor: ci, eps_r },
            });
        }
    }

    for (ii, spec) in cs.dielectric_interfaces.iter().enumerate() {
        let eps_pos = spec.eps_r_pos.eval(&params)?;
        let eps_neg = spec.eps_r_neg.eval(&params)?;
        if eps_pos <= 0.0 || eps_neg <= 0.0 {
            diagnostics.push(format!(
                "interface {ii} has nonpositive permittivity (pos {eps_pos}, neg {eps_neg})"
            ));
        }
        if eps_pos == eps_neg {
            diagnostics.push(format!(
                "interface {ii} has eps_r_pos = eps_r_neg = {eps_pos}; no physical interface"
            ));
        }
        let mut prev: Option<Point> = None;
        for (ex, ey) in &spec.polyline {
            let p = Point::new(ex.eval(&params)? * scale, ey.eval(&params)? * scale);
            if let Some(a) = prev {
                segments.push(Segment {
                    a,
                    b: p,
                    kind: SegmentKind::DielectricInterface { eps_pos, eps_neg },
                });
            }
            prev = Some(p);
        }
    }

    let rg = ResolvedGeometry {
        segments,
        n_cond: cs.conductors.len(),
        ground_plane: cs.ground_plane,
    };
    diagnostics.extend(validate_geometry(&rg));
    if diagnostics.is_empty() {
        Ok(rg)
    } else {
        Err(Error::InvalidGeometry(diagnostics))
    }
}

/// Checks the resolved-geometry invariants, returning one human-readable
/// diagnostic per violation (empty means valid).
pub fn validate_geometry(rg: &ResolvedGeometry) -> Vec<String> {
    let mut out = Vec::new();
    let mut owned = vec![0usize; rg.n_cond];
    for (i, seg) in rg.segments.iter().enumerate() {
        let len = (seg.b - seg.a).norm();
        if len <= 0.0 {
            out.push(format!("segment {i} has zero length"));
        }
        if rg.ground_plane && (seg.a.y <= 0.0 || seg.b.y <= 0.0) {
            out.push(format!(
                "segment {i} touches or crosses the ground plane (y must be > 0)"
            ));
        }
        if let SegmentKind::ConductorFace { conductor, .. } = seg.kind {
            if conductor < rg.n_cond {
                owned[conductor] += 1;
            } else {
                out.push(format!(
                    "segment {i} references conductor {conductor}, but only {} exist",
                    rg.n_cond
                ));
            }
        }
    }
    for (ci, count) in owned.iter().enumerate() {
        if *count == 0 {
            out.push(format!("conductor {ci} owns no boundary segments"));
        }
    }
    out
}
