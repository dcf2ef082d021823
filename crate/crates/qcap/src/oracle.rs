//! Independent verification: adaptive numerical quadrature of the raw
//! potential/field integrands (sharing no antiderivative code with the
//! closed-form kernels), analytic capacitance formulas for canonical
//! structures, and the pass/fail suite behind the `verify` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adaptive::{
    run_adaptive, AdaptiveConfig, ControlQuantity, RefinementMethod,
};
use crate::error::{Error, Result};
use crate::geometry::{
    ConductorSpec, CrossSection, InterfaceSpec, ParamExpr, Parameters, Point, Unit,
};
use crate::kernel::{segment_field, segment_potential};
use crate::mesh::Element;
use crate::system::EPS0;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Observation points closer to the element than this fraction of its length
/// are rejected: the quadrature (unlike the closed forms) cannot handle the
/// near-singular integrand.
pub const MIN_DISTANCE_FRACTION: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { abs_tol: 1e-14, rel_tol: 1e-12, max_subdivisions: 60 }
    }
}

impl QuadratureSettings {
    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::Config(
                "quadrature tolerances must be positive and subdivision depth nonzero".into(),
            ));
        }
        Ok(())
    }
}

fn distance_to_segment(elem: &Element, obs: Point) -> f64 {
    let d = elem.b - elem.a;
    let t = ((obs - elem.a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
    let nearest = elem.a + d * t;
    (obs - nearest).norm()
}

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: usize,
    max_depth: usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let refined = left + right;
    let delta = refined - whole;
    let tol = abs_tol.max(rel_tol * refined.abs());
    if delta.abs() <= 15.0 * tol {
        return Ok(refined + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureDepth { max_subdivisions: max_depth });
    }
    let half_abs = 0.5 * abs_tol;
    Ok(adapt(f, a, m, fa, flm, fm, left, half_abs, rel_tol, depth - 1, max_depth)?
        + adapt(f, m, b, fm, frm, fb, right, half_abs, rel_tol, depth - 1, max_depth)?)
}

fn integrate(f: impl Fn(f64) -> f64, length: f64, qs: &QuadratureSettings) -> Result<f64> {
    let fa = f(0.0);
    let fm = f(0.5 * length);
    let fb = f(length);
    let whole = simpson(fa, fm, fb, length);
    adapt(
        &f,
        0.0,
        length,
        fa,
        fm,
        fb,
        whole,
        qs.abs_tol,
        qs.rel_tol,
        qs.max_subdivisions,
        qs.max_subdivisions,
    )
}

fn guard_distance(elem: &Element, obs: Point) -> Result<()> {
    let limit = MIN_DISTANCE_FRACTION * elem.length;
    if distance_to_segment(elem, obs) < limit {
        return Err(Error::QuadratureTooClose { limit });
    }
    Ok(())
}

/// Numerically integrates -ln|obs - r'| / 2pi over the element.
pub fn quad_potential(elem: &Element, obs: Point, qs: &QuadratureSettings) -> Result<f64> {
    qs.validate()?;
    guard_distance(elem, obs)?;
    let tangent = (elem.b - elem.a) * (1.0 / elem.length);
    integrate(
        |s| {
            let r = obs - (elem.a + tangent * s);
            -r.norm().ln() / TWO_PI
        },
        elem.length,
        qs,
    )
}

/// Numerically integrates (obs - r') / (2pi |obs - r'|^2) over the element.
pub fn quad_field(elem: &Element, obs: Point, qs: &QuadratureSettings) -> Result<Point> {
    qs.validate()?;
    guard_distance(elem, obs)?;
    let tangent = (elem.b - elem.a) * (1.0 / elem.length);
    let component = |pick: fn(Point) -> f64| {
        integrate(
            |s| {
                let r = obs - (elem.a + tangent * s);
                pick(r) / (TWO_PI * r.dot(r))
            },
            elem.length,
            qs,
        )
    };
    Ok(Point::new(component(|r| r.x)?, component(|r| r.y)?))
}

/// Capacitance per unit length of a coaxial line, inner radius `a`, outer
/// radius `b`, homogeneous dielectric `eps_r` (meters, F/m).
pub fn analytic_coax(a: f64, b: f64, eps_r: f64) -> Result<f64> {
    if !(a > 0.0 && b > a && eps_r > 0.0) {
        return Err(Error::Config(format!(
            "coax requires 0 < a < b and eps_r > 0, got a={a}, b={b}, eps_r={eps_r}"
        )));
    }
    Ok(TWO_PI * EPS0 * eps_r / (b / a).ln())
}

/// Coax with two concentric dielectric layers: `eps_r1` between `a` and `b`,
/// `eps_r2` between `b` and `c`.
pub fn analytic_two_layer_coax(
    a: f64,
    b: f64,
    c: f64,
    eps_r1: f64,
    eps_r2: f64,
) -> Result<f64> {
    if !(a > 0.0 && b > a && c > b && eps_r1 > 0.0 && eps_r2 > 0.0) {
        return Err(Error::Config(format!(
            "two-layer coax requires 0 < a < b < c and positive permittivities, got a={a}, b={b}, c={c}"
        )));
    }
    Ok(TWO_PI * EPS0 / ((b / a).ln() / eps_r1 + (c / b).ln() / eps_r2))
}

/// Round wire of radius `r0` with its center `h` above a ground plane.
pub fn analytic_wire_over_ground(h: f64, r0: f64) -> Result<f64> {
    if !(r0 > 0.0 && h > r0) {
        return Err(Error::Config(format!(
            "wire over ground requires 0 < r0 < h, got h={h}, r0={r0}"
        )));
    }
    Ok(TWO_PI * EPS0 / (h / r0).acosh())
}

/// Number of polygon edges used to approximate every circle.
pub const CIRCLE_EDGES: usize = 64;

fn circle_points(center: Point, radius: f64, closed: bool) -> Vec<(ParamExpr, ParamExpr)> {
    let n = CIRCLE_EDGES;
    let mut pts = Vec::with_capacity(n + usize::from(closed));
    for i in 0..n {
        let theta = TWO_PI * i as f64 / n as f64;
        pts.push((
            ParamExpr::Number(center.x + radius * theta.cos()),
            ParamExpr::Number(center.y + radius * theta.sin()),
        ));
    }
    if closed {
        pts.push(pts[0].clone());
    }
    pts
}

fn circle_conductor(name: &str, center: Point, radius: f64, face_eps_r: f64) -> ConductorSpec {
    ConductorSpec {
        name: name.into(),
        vertices: circle_points(center, radius, false),
        face_eps_r: vec![ParamExpr::Number(face_eps_r); CIRCLE_EDGES],
    }
}

/// Concentric circular conductors of radii `a` (inner, face dielectric
/// `eps_r`) and `b` (outer shell), polygonized; coordinates in millimeters.
pub fn coax_cross_section(a_mm: f64, b_mm: f64, eps_r: f64) -> CrossSection {
    let center = Point::new(0.0, 0.0);
    CrossSection {
        unit: Unit::Mm,
        parameters: Parameters::from_pairs(Vec::new()).unwrap(),
        ground_plane: false,
        conductors: vec![
            circle_conductor("inner", center, a_mm, eps_r),
            circle_conductor("outer", center, b_mm, 1.0),
        ],
        dielectric_interfaces: Vec::new(),
    }
}

/// Coax with a dielectric-dielectric interface at radius `b`; `eps_r1` fills
/// `a..b` (the interface normal points into it), `eps_r2` fills `b..c`.
pub fn two_layer_coax_cross_section(
    a_mm: f64,
    b_mm: f64,
    c_mm: f64,
    eps_r1: f64,
    eps_r2: f64,
) -> CrossSection {
    let center = Point::new(0.0, 0.0);
    CrossSection {
        unit: Unit::Mm,
        parameters: Parameters::from_pairs(Vec::new()).unwrap(),
        ground_plane: false,
        conductors: vec![
            circle_conductor("inner", center, a_mm, eps_r1),
            circle_conductor("outer", center, c_mm, 1.0),
        ],
        dielectric_interfaces: vec![InterfaceSpec {
            polyline: circle_points(center, b_mm, true),
            eps_r_pos: ParamExpr::Number(eps_r1),
            eps_r_neg: ParamExpr::Number(eps_r2),
        }],
    }
}

/// Round wire (polygonized) centered `h_mm` above the y = 0 ground plane.
pub fn wire_over_ground_cross_section(h_mm: f64, r0_mm: f64) -> CrossSection {
    CrossSection {
        unit: Unit::Mm,
        parameters: Parameters::from_pairs(Vec::new()).unwrap(),
        ground_plane: true,
        conductors: vec![circle_conductor("wire", Point::new(0.0, h_mm), r0_mm, 1.0)],
        dielectric_interfaces: Vec::new(),
    }
}

/// Worst relative disagreement between closed-form kernels and the
/// quadrature, over randomized element/observation pairs kept at least
/// 0.01 element lengths away from the element. Generic over the kernel
/// callables so tests can feed deliberately corrupted kernels.
pub fn kernel_agreement<P, F>(
    pairs: usize,
    seed: u64,
    potential: P,
    field: F,
) -> Result<(f64, f64)>
where
    P: Fn(&Element, Point) -> f64,
    F: Fn(&Element, Point) -> Result<Point>,
{
    // Everything lives in a box of diameter < 1 m so distances stay below
    // 1 m and the log integrand keeps one sign (no spurious relative-error
    // blowups near a zero crossing of the potential).
    const HALF: f64 = 0.35;
    let qs = QuadratureSettings::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_p = 0.0f64;
    let mut worst_f = 0.0f64;
    let mut made = 0usize;
    while made < pairs {
        let a = Point::new(rng.gen_range(-HALF..HALF), rng.gen_range(-HALF..HALF));
        let b = Point::new(rng.gen_range(-HALF..HALF), rng.gen_range(-HALF..HALF));
        let len = (b - a).norm();
        if !(len > 1e-3) {
            continue;
        }
        let elem = Element::new(
            a,
            b,
            crate::geometry::SegmentKind::ConductorFace { conductor: 0, eps_r: 1.0 },
            0,
        );
        let obs = Point::new(rng.gen_range(-HALF..HALF), rng.gen_range(-HALF..HALF));
        if distance_to_segment(&elem, obs) < 0.01 * len {
            continue;
        }
        made += 1;

        let p_quad = quad_potential(&elem, obs, &qs)?;
        worst_p = worst_p.max((potential(&elem, obs) - p_quad).abs() / p_quad.abs());

        let f_quad = quad_field(&elem, obs, &qs)?;
        let f_closed = field(&elem, obs)?;
        worst_f = worst_f.max((f_closed - f_quad).norm() / f_quad.norm());
    }
    Ok((worst_p, worst_f))
}

#[derive(Clone, Debug)]
pub struct VerificationCheck {
    pub name: String,
    /// Worst observed relative error.
    pub worst: f64,
    pub limit: f64,
}

impl VerificationCheck {
    pub fn passed(&self) -> bool {
        self.worst <= self.limit
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub checks: Vec<VerificationCheck>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(VerificationCheck::passed)
    }
}

fn solve_structure(cs: &CrossSection) -> Result<f64> {
    let rg = crate::geometry::resolve_geometry(cs, &std::collections::BTreeMap::new())?;
    let cfg = AdaptiveConfig {
        method: RefinementMethod::All,
        tol: 1e-2,
        max_iters: 30,
        // Larger than any polygon edge: iteration 0 puts one element per edge.
        initial_l_max: 1.0,
        control: ControlQuantity::DiagonalElement(0),
    };
    let (c, _) = run_adaptive(&rg, &cfg)?;
    Ok(c.at(0, 0))
}

/// Runs the full oracle suite: kernels against quadrature on `pairs` random
/// configurations, then the three canonical structures against their
/// analytic capacitances.
pub fn run_verification(pairs: usize, seed: u64) -> Result<VerificationReport> {
    let (worst_p, worst_f) = kernel_agreement(pairs, seed, segment_potential, segment_field)?;
    let mut checks = vec![
        VerificationCheck {
            name: format!("potential kernel vs quadrature ({pairs} random pairs)"),
            worst: worst_p,
            limit: 1e-10,
        },
        VerificationCheck {
            name: format!("field kernel vs quadrature ({pairs} random pairs)"),
            worst: worst_f,
            limit: 1e-10,
        },
    ];

    let coax = solve_structure(&coax_cross_section(1.0, 2.0, 1.0))?;
    let coax_ref = analytic_coax(1e-3, 2e-3, 1.0)?;
    checks.push(VerificationCheck {
        name: "coax capacitance vs analytic".into(),
        worst: (coax - coax_ref).abs() / coax_ref,
        limit: 5e-3,
    });

    let layered = solve_structure(&two_layer_coax_cross_section(1.0, 1.5, 2.0, 2.0, 1.0))?;
    let layered_ref = analytic_two_layer_coax(1e-3, 1.5e-3, 2e-3, 2.0, 1.0)?;
    checks.push(VerificationCheck {
        name: "two-layer coax capacitance vs analytic".into(),
        worst: (layered - layered_ref).abs() / layered_ref,
        limit: 1e-2,
    });

    let wire = solve_structure(&wire_over_ground_cross_section(10.0, 1.0))?;
    let wire_ref = analytic_wire_over_ground(10e-3, 1e-3)?;
    checks.push(VerificationCheck {
        name: "wire over ground capacitance vs analytic".into(),
        worst: (wire - wire_ref).abs() / wire_ref,
        limit: 1e-2,
    });

    Ok(VerificationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{resolve_geometry, SegmentKind};
    use std::collections::BTreeMap;

    fn unit_elem() -> Element {
        Element::new(
            Point::new(0.1, -0.2),
            Point::new(0.4, 0.1),
            SegmentKind::ConductorFace { conductor: 0, eps_r: 1.0 },
            0,
        )
    }

    #[test]
    fn quadrature_agrees_with_the_closed_form_potential() {
        let e = unit_elem();
        let obs = Point::new(-0.1, 0.3);
        let q = quad_potential(&e, obs, &QuadratureSettings::default()).unwrap();
        let p = segment_potential(&e, obs);
        assert!((q - p).abs() / p.abs() < 1e-10, "q={q}, p={p}");
    }

    #[test]
    fn quadrature_agrees_with_the_closed_form_field() {
        let e = unit_elem();
        let obs = Point::new(-0.1, 0.3);
        let q = quad_field(&e, obs, &QuadratureSettings::default()).unwrap();
        let f = segment_field(&e, obs).unwrap();
        assert!((q - f).norm() / f.norm() < 1e-10);
    }

    #[test]
    fn perpendicular_bisector_field_has_no_tangential_part() {
        let e = Element::new(
            Point::new(-0.25, 0.0),
            Point::new(0.25, 0.0),
            SegmentKind::ConductorFace { conductor: 0, eps_r: 1.0 },
            0,
        );
        let q = quad_field(&e, Point::new(0.0, 0.2), &QuadratureSettings::default()).unwrap();
        assert!(q.x.abs() < 1e-13);
        assert!(q.y > 0.0);
    }

    #[test]
    fn observation_too_close_to_the_element_is_rejected() {
        let e = Element::new(
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            SegmentKind::ConductorFace { conductor: 0, eps_r: 1.0 },
            0,
        );
        let obs = Point::new(0.5, 1e-8);
        assert!(matches!(
            quad_potential(&e, obs, &QuadratureSettings::default()),
            Err(Error::QuadratureTooClose { .. })
        ));
        assert!(matches!(
            quad_field(&e, obs, &QuadratureSettings::default()),
            Err(Error::QuadratureTooClose { .. })
        ));
    }

    #[test]
    fn analytic_formulas_reproduce_reference_values() {
        let coax = analytic_coax(1e-3, 2e-3, 1.0).unwrap();
        assert!((coax - 8.0261e-11).abs() / coax < 1e-4);
        let layered = analytic_two_layer_coax(1e-3, 1.5e-3, 2e-3, 2.0, 1.0).unwrap();
        assert!((layered - 1.1344e-10).abs() / layered < 1e-4);
        let wire = analytic_wire_over_ground(10e-3, 1e-3).unwrap();
        assert!((wire - 1.8587e-11).abs() / wire < 1e-4);
    }

    #[test]
    fn analytic_formulas_reject_bad_domains() {
        assert!(analytic_coax(2e-3, 1e-3, 1.0).is_err());
        assert!(analytic_coax(0.0, 1e-3, 1.0).is_err());
        assert!(analytic_two_layer_coax(1e-3, 0.5e-3, 2e-3, 1.0, 1.0).is_err());
        assert!(analytic_wire_over_ground(1e-3, 2e-3).is_err());
    }

    #[test]
    fn kernels_and_quadrature_agree_on_random_pairs() {
        let (worst_p, worst_f) =
            kernel_agreement(100, 42, segment_potential, segment_field).unwrap();
        assert!(worst_p <= 1e-10, "potential disagreement {worst_p:e}");
        assert!(worst_f <= 1e-10, "field disagreement {worst_f:e}");
    }

    #[test]
    fn corrupted_kernel_breaks_the_agreement() {
        let (worst_p, _) = kernel_agreement(
            50,
            42,
            |e, o| segment_potential(e, o) * (1.0 + 1e-6),
            segment_field,
        )
        .unwrap();
        assert!(worst_p > 1e-10, "corruption went undetected: {worst_p:e}");
    }

    #[test]
    fn polygonized_structures_resolve_with_expected_element_counts() {
        let coax = resolve_geometry(&coax_cross_section(1.0, 2.0, 1.0), &BTreeMap::new()).unwrap();
        assert_eq!(coax.segments.len(), 2 * CIRCLE_EDGES);
        assert!(!coax.ground_plane);

        let layered = resolve_geometry(
            &two_layer_coax_cross_section(1.0, 1.5, 2.0, 2.0, 1.0),
            &BTreeMap::new(),
        )
        .unwrap();
        assert_eq!(layered.segments.len(), 3 * CIRCLE_EDGES);

        let wire =
            resolve_geometry(&wire_over_ground_cross_section(10.0, 1.0), &BTreeMap::new()).unwrap();
        assert_eq!(wire.segments.len(), CIRCLE_EDGES);
        assert!(wire.ground_plane);
        assert_eq!(wire.n_cond, 1);
    }
}
