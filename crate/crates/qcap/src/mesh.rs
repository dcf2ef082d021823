//! Boundary discretization into subintervals and the two refinement
//! operators: full bisection and top-fraction bisection by charge score.

use crate::error::{Error, Result};
use crate::geometry::{Point, ResolvedGeometry, SegmentKind};

/// A straight subinterval carrying one constant charge unknown.
#[derive(Clone, Debug, PartialEq)]
pub struct Element {
    pub a: Point,
    pub b: Point,
    pub length: f64,
    pub midpoint: Point,
    /// Unit normal. Conductor faces: outward (counter-clockwise travel
    /// rotated -90 degrees). Dielectric interfaces: travel rotated +90
    /// degrees, pointing into the eps_pos medium.
    pub normal: Point,
    pub kind: SegmentKind,
    /// Index of the resolved-geometry segment this element came from.
    pub parent: usize,
}

impl Element {
    pub fn new(a: Point, b: Point, kind: SegmentKind, parent: usize) -> Element {
        let d = b - a;
        let length = d.norm();
        let normal = match kind {
            SegmentKind::ConductorFace { .. } => Point::new(d.y / length, -d.x / length),
            SegmentKind::DielectricInterface { .. } => Point::new(-d.y / length, d.x / length),
        };
        Element {
            a,
            b,
            length,
            midpoint: Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0),
            normal,
            kind,
            parent,
        }
    }

    fn bisect(&self) -> (Element, Element) {
        let m = self.midpoint;
        (
            Element::new(self.a, m, self.kind, self.parent),
            Element::new(m, self.b, self.kind, self.parent),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub elements: Vec<Element>,
    pub n_cond: usize,
}

impl Mesh {
    pub fn n(&self) -> usize {
        self.elements.len()
    }
}

/// Splits every boundary segment of length L into ceil(L / l_max) equal
/// elements, so every element length is at most l_max. Order is
/// deterministic: segments in input order, subdivisions left to right.
pub fn build_initial_mesh(rg: &ResolvedGeometry, l_max: f64) -> Result<Mesh> {
    if !(l_max > 0.0) || !l_max.is_finite() {
        return Err(Error::Config(format!(
            "initial element length must be positive and finite, got {l_max}"
        )));
    }
    let mut elements = Vec::new();
    for (si, seg) in rg.segments.iter().enumerate() {
        let len = (seg.b - seg.a).norm();
        // The relative backoff keeps the count stable when L/l_max lands on
        // an integer up to roundoff (uniform scaling must not flip counts).
        let n = ((len / l_max * (1.0 - 1e-12)).ceil() as usize).max(1);
        let d = seg.b - seg.a;
        for i in 0..n {
            let a = if i == 0 { seg.a } else { seg.a + d * (i as f64 / n as f64) };
            let b = if i + 1 == n {
                seg.b
            } else {
                seg.a + d * ((i + 1) as f64 / n as f64)
            };
            elements.push(Element::new(a, b, seg.kind, si));
        }
    }
    Ok(Mesh { elements, n_cond: rg.n_cond })
}

/// Replaces every element by its two halves; N doubles.
pub fn refine_all(mesh: &Mesh) -> Mesh {
    let mut elements = Vec::with_capacity(mesh.elements.len() * 2);
    for e in &mesh.elements {
        let (left, right) = e.bisect();
        elements.push(left);
        elements.push(right);
    }
    Mesh { elements, n_cond: mesh.n_cond }
}

/// Bisects the k = max(1, ceil(p/100 * N)) elements with the largest
/// charge score, in place; the rest are copied. Ties prefer the larger
/// element, then the lower index. With p = 100 the result is identical to
/// [`refine_all`], order included.
pub fn refine_top_fraction(mesh: &Mesh, charge_score: &[f64], p: f64) -> Result<Mesh> {
    let n = mesh.elements.len();
    if charge_score.len() != n {
        return Err(Error::ScoreLength { expected: n, got: charge_score.len() });
    }
    if !(p > 0.0 && p <= 100.0) {
        return Err(Error::Config(format!("refinement percentage must be in (0, 100], got {p}")));
    }
    let k = ((p / 100.0 * n as f64).ceil() as usize).clamp(1, n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        charge_score[j]
            .total_cmp(&charge_score[i])
            .then_with(|| mesh.elements[j].length.total_cmp(&mesh.elements[i].length))
            .then_with(|| i.cmp(&j))
    });
    let mut split = vec![false; n];
    for &i in order.iter().take(k) {
        split[i] = true;
    }
    let mut elements = Vec::with_capacity(n + k);
    for (i, e) in mesh.elements.iter().enumerate() {
        if split[i] {
            let (left, right) = e.bisect();
            elements.push(left);
            elements.push(right);
        } else {
            elements.push(e.clone());
        }
    }
    Ok(Mesh { elements, n_cond: mesh.n_cond })
}
