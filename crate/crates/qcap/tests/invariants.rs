//! Property tests for the core invariants: expression parsing, mesh
//! refinement bookkeeping, and kernel symmetries.

use proptest::prelude::*;

use qcap::expr::eval_param_expr;
use qcap::geometry::{Parameters, Point, ResolvedGeometry, Segment, SegmentKind};
use qcap::kernel::{grounded_potential, segment_field, segment_potential};
use qcap::mesh::{build_initial_mesh, refine_all, refine_top_fraction, Element};

fn conductor_kind() -> SegmentKind {
    SegmentKind::ConductorFace { conductor: 0, eps_r: 1.0 }
}

fn segment_strategy() -> impl Strategy<Value = Segment> {
    (
        -10.0f64..10.0,
        -10.0f64..10.0,
        -10.0f64..10.0,
        -10.0f64..10.0,
    )
        .prop_filter_map("segment must have usable length", |(ax, ay, bx, by)| {
            let a = Point::new(ax, ay);
            let b = Point::new(bx, by);
            ((b - a).norm() > 1e-3).then_some(Segment { a, b, kind: conductor_kind() })
        })
}

fn geometry_strategy() -> impl Strategy<Value = ResolvedGeometry> {
    prop::collection::vec(segment_strategy(), 1..6).prop_map(|segments| ResolvedGeometry {
        segments,
        n_cond: 1,
        ground_plane: false,
    })
}

/// Observation points at a workable distance from the element.
fn element_with_observer() -> impl Strategy<Value = (Element, Point)> {
    (segment_strategy(), -12.0f64..12.0, -12.0f64..12.0).prop_filter_map(
        "observer must stay off the element",
        |(seg, ox, oy)| {
            let elem = Element::new(seg.a, seg.b, seg.kind, 0);
            let obs = Point::new(ox, oy);
            let d = elem.b - elem.a;
            let t = ((obs - elem.a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
            let dist = (obs - (elem.a + d * t)).norm();
            (dist > 0.05 * elem.length).then_some((elem, obs))
        },
    )
}

proptest! {
    #[test]
    fn displayed_floats_evaluate_back_to_the_same_value(
        x in prop::num::f64::NORMAL.prop_filter("finite", |v| v.is_finite())
    ) {
        let params = Parameters::from_pairs(Vec::new()).unwrap();
        let text = format!("{x}");
        prop_assert_eq!(eval_param_expr(&text, &params).unwrap(), x);
    }

    #[test]
    fn initial_meshes_conserve_length_and_respect_the_bound(
        rg in geometry_strategy(),
        l_max in 0.01f64..10.0
    ) {
        let mesh = build_initial_mesh(&rg, l_max).unwrap();
        let total: f64 = rg.segments.iter().map(|s| (s.b - s.a).norm()).sum();
        let meshed: f64 = mesh.elements.iter().map(|e| e.length).sum();
        prop_assert!((meshed - total).abs() <= 1e-9 * total);
        for e in &mesh.elements {
            prop_assert!(e.length <= l_max * (1.0 + 1e-9));
        }
    }

    #[test]
    fn full_refinement_conserves_length_too(rg in geometry_strategy()) {
        let mesh = build_initial_mesh(&rg, 1.0).unwrap();
        let refined = refine_all(&mesh);
        prop_assert_eq!(refined.n(), 2 * mesh.n());
        let before: f64 = mesh.elements.iter().map(|e| e.length).sum();
        let after: f64 = refined.elements.iter().map(|e| e.length).sum();
        prop_assert!((after - before).abs() <= 1e-9 * before);
    }

    #[test]
    fn top_hundred_percent_is_exactly_full_refinement(
        rg in geometry_strategy(),
        seed in any::<u64>()
    ) {
        let mesh = build_initial_mesh(&rg, 0.5).unwrap();
        // Arbitrary deterministic scores; the selection must not matter at 100%.
        let scores: Vec<f64> = (0..mesh.n())
            .map(|i| ((i as u64).wrapping_mul(seed | 1) % 1000) as f64)
            .collect();
        let top = refine_top_fraction(&mesh, &scores, 100.0).unwrap();
        let all = refine_all(&mesh);
        prop_assert_eq!(top, all);
    }

    #[test]
    fn splitting_an_element_preserves_potential_and_field(
        (elem, obs) in element_with_observer()
    ) {
        let mid = elem.midpoint;
        let left = Element::new(elem.a, mid, elem.kind, 0);
        let right = Element::new(mid, elem.b, elem.kind, 0);

        let p_whole = segment_potential(&elem, obs);
        let p_split = segment_potential(&left, obs) + segment_potential(&right, obs);
        prop_assert!((p_whole - p_split).abs() <= 1e-12 * p_whole.abs().max(1e-12));

        let f_whole = segment_field(&elem, obs).unwrap();
        let f_split = segment_field(&left, obs).unwrap() + segment_field(&right, obs).unwrap();
        prop_assert!((f_whole - f_split).norm() <= 1e-12 * f_whole.norm().max(1e-12));
    }

    #[test]
    fn translating_element_and_observer_together_is_bitwise_exact(
        ax in -640i32..640, ay in -640i32..640,
        bx in -640i32..640, by in -640i32..640,
        ox in -640i32..640, oy in -640i32..640,
        sx in -640i32..640, sy in -640i32..640
    ) {
        // Coordinates and shifts on a 1/64 grid add without rounding, so the
        // local frame is reproduced exactly.
        let g = 1.0 / 64.0;
        let a = Point::new(ax as f64 * g, ay as f64 * g);
        let b = Point::new(bx as f64 * g, by as f64 * g);
        prop_assume!((b - a).norm() > 1e-6);
        let obs = Point::new(ox as f64 * g, oy as f64 * g);
        prop_assume!(obs != a && obs != b);
        let shift = Point::new(sx as f64 * g, sy as f64 * g);

        let elem = Element::new(a, b, conductor_kind(), 0);
        let moved = Element::new(a + shift, b + shift, conductor_kind(), 0);
        let p0 = segment_potential(&elem, obs);
        let p1 = segment_potential(&moved, obs + shift);
        prop_assert_eq!(p0.to_bits(), p1.to_bits());

        if obs != elem.midpoint {
            let f0 = segment_field(&elem, obs).unwrap();
            let f1 = segment_field(&moved, obs + shift).unwrap();
            prop_assert_eq!(f0.x.to_bits(), f1.x.to_bits());
            prop_assert_eq!(f0.y.to_bits(), f1.y.to_bits());
        }
    }

    #[test]
    fn grounded_potential_vanishes_on_the_plane(
        ax in 0.1f64..5.0, ay in 0.1f64..5.0,
        bx in 0.1f64..5.0, by in 0.1f64..5.0,
        ox in -10.0f64..10.0
    ) {
        let a = Point::new(ax, ay);
        let b = Point::new(bx + 5.0, by);
        prop_assume!((b - a).norm() > 1e-3);
        let elem = Element::new(a, b, conductor_kind(), 0);
        let p = grounded_potential(&elem, Point::new(ox, 0.0));
        prop_assert!(p.abs() <= 1e-12);
    }
}
