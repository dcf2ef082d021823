//! Closed-form integrals of the 2D logarithmic potential kernel and its
//! gradient over straight elements, plus ground-plane image composition.
//!
//! For a unit line-charge density on an element, the potential at `obs` is
//!
//! ```text
//! P = -(1/2pi) * [h(u) - h(u - L)],   h(s) = (s/2) ln(s^2 + v^2) - s + v atan(s/v)
//! ```
//!
//! in the local frame (u along the element from endpoint a, v across), with
//! the conventions s ln(.) = 0 at s = 0 and the atan term = 0 at v = 0.
//! The integrated gradient splits into a tangential part ln(ra/rb)/2pi and a
//! normal part equal to the subtended angle over 2pi. Values are purely
//! geometric: no permittivity enters here.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::Element;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

fn h(s: f64, v: f64) -> f64 {
    let log_term = if s == 0.0 { 0.0 } else { 0.5 * s * (s * s + v * v).ln() };
    let atan_term = if v == 0.0 { 0.0 } else { v * (s / v).atan() };
    log_term - s + atan_term
}

fn local_frame(a: Point, b: Point, obs: Point) -> (f64, f64, f64, Point, Point) {
    let d = b - a;
    let len = d.norm();
    let tangent = d * (1.0 / len);
    let across = Point::new(tangent.y, -tangent.x);
    let r = obs - a;
    (r.dot(tangent), r.dot(across), len, tangent, across)
}

fn potential_ab(a: Point, b: Point, obs: Point) -> f64 {
    let (u, v, len, _, _) = local_frame(a, b, obs);
    -(h(u, v) - h(u - len, v)) / TWO_PI
}

fn field_ab(a: Point, b: Point, obs: Point) -> Result<Point> {
    let (u, v, len, tangent, across) = local_frame(a, b, obs);
    let ra = u.hypot(v);
    let rb = (u - len).hypot(v);
    if ra == 0.0 || rb == 0.0 {
        return Err(Error::EndpointSingularity);
    }
    let f_t = (ra / rb).ln() / TWO_PI;
    // Subtended angle, as atan2 of the cross and dot products of the two
    // endpoint-to-observer vectors; equals atan(u/v) - atan((u-L)/v) for
    // v != 0 and degrades gracefully on the element's line.
    let f_n = (len * v).atan2(v * v + u * (u - len)) / TWO_PI;
    Ok(tangent * f_t + across * f_n)
}

fn mirrored(p: Point) -> Point {
    Point::new(p.x, -p.y)
}

/// Potential of a unit charge density on `elem` observed at `obs`, in meters
/// (multiply by sigma/eps0 for volts). Finite everywhere, including on the
/// element itself.
pub fn segment_potential(elem: &Element, obs: Point) -> f64 {
    potential_ab(elem.a, elem.b, obs)
}

/// Integrated gradient kernel F = (1/2pi) int (obs - r') / |obs - r'|^2 dl'.
/// At the element's own midpoint the principal value is the zero vector.
/// Observation at an element endpoint is not integrable.
pub fn segment_field(elem: &Element, obs: Point) -> Result<Point> {
    if obs == elem.midpoint {
        return Ok(Point::new(0.0, 0.0));
    }
    field_ab(elem.a, elem.b, obs)
}

/// Potential with an infinite grounded plane at y = 0: the direct term minus
/// the mirrored element (the image carries the opposite charge).
pub fn grounded_potential(elem: &Element, obs: Point) -> f64 {
    potential_ab(elem.a, elem.b, obs) - potential_ab(mirrored(elem.a), mirrored(elem.b), obs)
}

/// Field kernel with the y = 0 image term. The direct part keeps the
/// principal-value rule of [`segment_field`]; the image of an element never
/// contains an observation point above the plane.
pub fn grounded_field(elem: &Element, obs: Point) -> Result<Point> {
    let direct = segment_field(elem, obs)?;
    let image = field_ab(mirrored(elem.a), mirrored(elem.b), obs)?;
    Ok(direct - image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SegmentKind;

    fn elem(a: Point, b: Point) -> Element {
        Element::new(a, b, SegmentKind::ConductorFace { conductor: 0, eps_r: 1.0 }, 0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn self_potential_at_the_midpoint() {
        // L = 2: P = (L/2pi)(1 - ln(L/2)) = 1/pi.
        let e = elem(Point::new(0.0, 0.0), Point::new(2.0, 0.0));
        let p = segment_potential(&e, Point::new(1.0, 0.0));
        assert!((p - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn far_observation_matches_the_point_charge_value() {
        let e = elem(Point::new(0.0, 0.0), Point::new(0.01, 0.0));
        let p = segment_potential(&e, Point::new(0.005, 100.0));
        let point_charge = -(0.01 / TWO_PI) * 100.0f64.ln();
        assert!(rel(p, point_charge) < 1e-6, "p={p:e} vs {point_charge:e}");
    }

    #[test]
    fn symmetric_observation_sees_a_purely_normal_field() {
        let e = elem(Point::new(-1.0, 0.0), Point::new(1.0, 0.0));
        let f = segment_field(&e, Point::new(0.0, 1.0)).unwrap();
        assert_eq!(f.x, 0.0);
        assert!((f.y - 0.25).abs() < 1e-15);
    }

    #[test]
    fn own_midpoint_takes_the_principal_value() {
        let e = elem(Point::new(0.2, 0.4), Point::new(0.8, 1.3));
        let f = segment_field(&e, e.midpoint).unwrap();
        assert_eq!((f.x, f.y), (0.0, 0.0));
    }

    #[test]
    fn endpoint_observation_is_an_error() {
        let e = elem(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert_eq!(segment_field(&e, Point::new(1.0, 0.0)), Err(Error::EndpointSingularity));
        assert_eq!(segment_field(&e, Point::new(0.0, 0.0)), Err(Error::EndpointSingularity));
    }

    #[test]
    fn collinear_outside_observation_has_no_normal_component() {
        let e = elem(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        let f = segment_field(&e, Point::new(3.0, 0.0)).unwrap();
        assert_eq!(f.y, 0.0);
        assert!((f.x - (3.0f64 / 2.0).ln() / TWO_PI).abs() < 1e-15);
    }

    #[test]
    fn grounded_potential_vanishes_on_the_plane() {
        let e = elem(Point::new(0.3, 0.2), Point::new(0.9, 1.1));
        for x in [-2.0, 0.0, 0.77, 5.0] {
            assert_eq!(grounded_potential(&e, Point::new(x, 0.0)), 0.0);
        }
    }

    #[test]
    fn grounded_field_on_the_plane_is_vertical() {
        let e = elem(Point::new(0.3, 0.2), Point::new(0.9, 1.1));
        let f = grounded_field(&e, Point::new(2.0, 0.0)).unwrap();
        assert!(f.x.abs() < 1e-16, "tangential residue {:e}", f.x);
        assert!(f.y.abs() > 1e-3);
    }

    #[test]
    fn image_term_scales_as_the_log_of_plane_distance() {
        // The image sits ~2*depth away, so the potential difference between
        // two depths is (L/2pi) ln of the image-distance ratio; the field
        // image instead decays, so the grounded field approaches the
        // ungrounded one as the plane recedes.
        let l = 0.01;
        let make = |depth: f64| {
            (elem(Point::new(0.0, depth), Point::new(l, depth)), Point::new(0.005, depth + 0.02))
        };
        let potential_gap = |depth: f64| {
            let (e, obs) = make(depth);
            (grounded_potential(&e, obs) - segment_potential(&e, obs)).abs()
        };
        let expected = l / TWO_PI * (20.02f64 / 2.02).ln();
        let measured = potential_gap(10.0) - potential_gap(1.0);
        assert!((measured - expected).abs() / expected < 1e-3, "gap step {measured:e}");

        let field_gap = |depth: f64| {
            let (e, obs) = make(depth);
            (grounded_field(&e, obs).unwrap() - segment_field(&e, obs).unwrap()).norm()
        };
        assert!(field_gap(10.0) < field_gap(1.0));
        assert!(field_gap(100.0) < field_gap(10.0));
    }

    #[test]
    fn translating_element_and_observer_together_changes_nothing() {
        // Dyadic coordinates and shifts keep every difference exact, so the
        // invariance holds bitwise.
        let shift = Point::new(5.25, -3.125);
        let a = Point::new(0.5, 0.25);
        let b = Point::new(1.75, 1.0);
        let obs = Point::new(-0.75, 2.5);
        let f0 = segment_field(&elem(a, b), obs).unwrap();
        let f1 = segment_field(&elem(a + shift, b + shift), obs + shift).unwrap();
        assert_eq!(f0.x.to_bits(), f1.x.to_bits());
        assert_eq!(f0.y.to_bits(), f1.y.to_bits());
        let p0 = segment_potential(&elem(a, b), obs);
        let p1 = segment_potential(&elem(a + shift, b + shift), obs + shift);
        assert_eq!(p0.to_bits(), p1.to_bits());
    }

    #[test]
    fn halves_sum_to_the_parent_value() {
        let a = Point::new(0.1, 0.2);
        let b = Point::new(0.9, 0.7);
        let mid = Point::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
        let obs = Point::new(0.4, 1.5);
        let p_whole = segment_potential(&elem(a, b), obs);
        let p_split = segment_potential(&elem(a, mid), obs) + segment_potential(&elem(mid, b), obs);
        assert!(rel(p_whole, p_split) < 1e-12);
        let f_whole = segment_field(&elem(a, b), obs).unwrap();
        let fa = segment_field(&elem(a, mid), obs).unwrap();
        let fb = segment_field(&elem(mid, b), obs).unwrap();
        assert!((f_whole.x - fa.x - fb.x).abs() < 1e-12 * f_whole.norm());
        assert!((f_whole.y - fa.y - fb.y).abs() < 1e-12 * f_whole.norm());
    }

    #[test]
    fn far_field_error_decays_quadratically_with_distance() {
        let e = elem(Point::new(0.0, 0.0), Point::new(0.1, 0.0));
        let err_at = |d: f64| {
            let obs = Point::new(0.05, d);
            let approx = -(0.1 / TWO_PI) * (obs - e.midpoint).norm().ln();
            (segment_potential(&e, obs) - approx).abs()
        };
        // O((L/d)^2): doubling the distance should shrink the error by
        // roughly 4; demand at least 3 to stay robust.
        assert!(err_at(2.0) < err_at(1.0) / 3.0);
        assert!(err_at(4.0) < err_at(2.0) / 3.0);
    }
}
