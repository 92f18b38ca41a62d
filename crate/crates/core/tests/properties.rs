use proptest::prelude::*;

use curvkep::curvature::{geodesic_energy, killing_charges, GeodesicField};
use curvkep::duality::{make_dictionary, Branch, DualityDictionary};
use curvkep::flows::{drift_report, integrate};
use curvkep::kepler::{kepler_bracket_table, kepler_constants, kepler_vector_field, KeplerField};
use curvkep::maps::{natural_to_transformed, registered_maps, transformed_to_natural};
use curvkep::phase::{
    derivative_along, hamiltonian_vector_field, numeric_gradient, poisson_bracket, refined_symplectic_check,
    BracketField, Numeric, ScalarField, JACOBIAN_STEP,
};
use curvkep::{Chart, ChartedGeodesicState, IntegratorConfig, KeplerParams, PhasePoint, System, Vec3};

fn vec3(lo: f64, hi: f64) -> impl Strategy<Value = Vec3> {
    (lo..hi, lo..hi, lo..hi).prop_map(|(a, b, c)| Vec3::new(a, b, c))
}

/// Points with `0.3 ≤ |x|` and moderate momenta.
fn phase_point() -> impl Strategy<Value = PhasePoint> {
    (vec3(-2.0, 2.0), vec3(-1.5, 1.5))
        .prop_filter("away from the origin", |(x, _)| x.norm() > 0.3)
        .prop_map(|(x, p)| PhasePoint::new(x, p))
}

fn curvature() -> impl Strategy<Value = f64> {
    prop_oneof![Just(-1.0), Just(0.0), Just(1.0)]
}

fn natural_state() -> impl Strategy<Value = ChartedGeodesicState> {
    (phase_point(), curvature())
        .prop_filter("inside the chart", |(z, k)| 1.0 + 0.25 * k * z.position.norm_squared() > 0.1)
        .prop_map(|(z, k)| ChartedGeodesicState::natural(z, k).expect("filtered"))
}

/// Point, curvature and chart, inside the natural chart when that chart is drawn.
fn charted() -> impl Strategy<Value = (PhasePoint, f64, Chart)> {
    (phase_point(), curvature(), any::<bool>())
        .prop_map(|(z, k, t)| (z, k, if t { Chart::Transformed } else { Chart::Natural }))
        .prop_filter("inside the chart", |(z, k, chart)| {
            *chart == Chart::Transformed || 1.0 + 0.25 * k * z.position.norm_squared() > 0.1
        })
}

fn fields(k: f64, chart: Chart) -> Vec<Box<dyn ScalarField>> {
    let mut out: Vec<Box<dyn ScalarField>> = vec![Box::new(GeodesicField::energy(k, chart))];
    out.extend(GeodesicField::charges(k, chart).into_iter().map(|f| Box::new(f) as Box<dyn ScalarField>));
    let alpha = KeplerParams::new(1.0).expect("nonzero");
    out.push(Box::new(KeplerField::energy(alpha)));
    out.extend(KeplerField::charges(alpha).into_iter().map(|f| Box::new(f) as Box<dyn ScalarField>));
    out
}

proptest! {
    #[test]
    fn brackets_are_antisymmetric((z, k, chart) in charted()) {
        let fs = fields(k, chart);
        for f in &fs {
            for g in &fs {
                let s = poisson_bracket(f, g, &z).unwrap() + poisson_bracket(g, f, &z).unwrap();
                prop_assert_eq!(s, 0.0);
                let n = poisson_bracket(&Numeric(f), &Numeric(g), &z).unwrap()
                    + poisson_bracket(&Numeric(g), &Numeric(f), &z).unwrap();
                prop_assert!(n.abs() < 1e-10, "{}", n);
            }
        }
    }

    #[test]
    fn jacobi_identity(z in phase_point(), k in curvature(), idx in (0usize..14, 0usize..14, 0usize..14)) {
        let fs = fields(k, Chart::Transformed);
        let (f, g, h) = (&fs[idx.0], &fs[idx.1], &fs[idx.2]);
        let j = poisson_bracket(f, &BracketField(g, h), &z).unwrap()
            + poisson_bracket(g, &BracketField(h, f), &z).unwrap()
            + poisson_bracket(h, &BracketField(f, g), &z).unwrap();
        prop_assert!(j.abs() < 1e-6, "{}", j);
    }

    #[test]
    fn flows_preserve_their_generator((z, k, chart) in charted()) {
        for f in fields(k, chart) {
            let v = hamiltonian_vector_field(&f, &z).unwrap();
            prop_assert!(derivative_along(&f, &v, &z).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn closed_gradients_match_differences((z, k, chart) in charted()) {
        for f in fields(k, chart) {
            let a = f.gradient(&z).unwrap().to_array();
            let b = numeric_gradient(&f, &z).unwrap().to_array();
            let scale = a.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            for i in 0..6 {
                prop_assert!((a[i] - b[i]).abs() <= 1e-6 * scale, "{} vs {}", a[i], b[i]);
            }
        }
    }

    #[test]
    fn kepler_field_matches_generic_field(z in phase_point(), alpha in prop_oneof![0.5..3.0, -3.0..-0.5]) {
        let params = KeplerParams::new(alpha).unwrap();
        let special = kepler_vector_field(&z, &params).unwrap();
        let generic = hamiltonian_vector_field(&KeplerField::energy(params), &z).unwrap();
        prop_assert!(special.max_diff(&generic) < 1e-12);
    }

    #[test]
    fn runge_lenz_vector_identity(z in phase_point(), alpha in 0.5..3.0f64) {
        let params = KeplerParams::new(alpha).unwrap();
        let c = kepler_constants(&z, &params).unwrap();
        let (x, p) = (z.position, z.momentum);
        let oracle = p.cross(&x.cross(&p)) - x.normalize() * alpha;
        prop_assert!((c.textbook_runge_lenz() - oracle).amax() < 1e-12);
        prop_assert!(c.angular_momentum.dot(&c.runge_lenz).abs() < 1e-12);
    }

    #[test]
    fn composed_maps_are_canonical(z in phase_point(), k in curvature(), picks in proptest::collection::vec(0usize..8, 1..4)) {
        let maps = registered_maps(k);
        let chain: Vec<_> = picks
            .iter()
            .map(|&i| if i % 2 == 0 { maps[(i / 2) % maps.len()] } else { maps[(i / 2) % maps.len()].inverted() })
            .collect();
        let composite = |w: &PhasePoint| chain.iter().try_fold(*w, |acc, m| m.forward(&acc));
        prop_assume!(composite(&z).map(|w| w.is_finite() && w.position.norm() < 1e3 && w.momentum.norm() < 1e3).unwrap_or(false));
        let r = refined_symplectic_check(&composite, &z, JACOBIAN_STEP);
        prop_assume!(r.is_ok());
        let r = r.unwrap();
        prop_assert!(r.residual < 1e-8, "{} at {:?}", r.residual, z);
    }

    #[test]
    fn charts_agree_on_energy_and_charges(st in natural_state()) {
        let w = ChartedGeodesicState::transformed(natural_to_transformed(&st.point).unwrap(), st.k).unwrap();
        let g = geodesic_energy(&st).unwrap();
        prop_assert!((g - geodesic_energy(&w).unwrap()).abs() <= 1e-12 * g.max(1.0));
        let a = killing_charges(&st).unwrap().charges();
        let b = killing_charges(&w).unwrap().charges();
        for i in 0..6 {
            prop_assert!((a[i] - b[i]).abs() < 1e-11 * a[i].abs().max(1.0));
        }
        let back = transformed_to_natural(&w.point).unwrap();
        prop_assert!(back.distance(&st.point) < 1e-12 * st.point.position.norm().max(1.0) * 10.0);
    }

    #[test]
    fn kepler_table_on_mapped_points_has_curvature_structure(st in natural_state()) {
        // the mapped point has H = −k for α = 2√G
        let w = natural_to_transformed(&st.point).unwrap();
        let g = geodesic_energy(&st).unwrap();
        prop_assume!(g > 1e-3);
        let report = kepler_bracket_table(&w, &KeplerParams::new(2.0 * g.sqrt()).unwrap()).unwrap();
        prop_assert!((report.structure_parameter - st.k).abs() < 1e-10 * g.max(1.0));
        prop_assert!(report.max_residual < 1e-8);
    }

    #[test]
    fn dictionary_is_an_involution(k in -3.0..3.0f64, c in 1e-3..10.0f64, repulsive in any::<bool>()) {
        let branch = if repulsive && k < 0.0 { Branch::Repulsive } else { Branch::Attractive };
        let d = make_dictionary(k, c, branch).unwrap();
        prop_assert_eq!(d.energy, -k);
        prop_assert!((d.alpha * d.alpha - 4.0 * c).abs() <= 4.0 * f64::EPSILON * 4.0 * c);
        let back = DualityDictionary::from_kepler(d.energy, d.alpha).unwrap();
        prop_assert_eq!(back.k, k);
        prop_assert!((back.c - c).abs() <= 2.0 * f64::EPSILON * c);
        prop_assert_eq!(back.branch, branch);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn flows_are_reversible(z in phase_point(), k in curvature(), kepler in any::<bool>()) {
        let tol = 1e-11;
        let system = if kepler {
            System::Kepler(KeplerParams::new(1.0).unwrap())
        } else {
            System::Geodesic { k, chart: Chart::Natural }
        };
        match system {
            System::Geodesic { .. } => prop_assume!(1.0 + 0.25 * k * z.position.norm_squared() > 0.1),
            // close pericentre passes amplify global error beyond any fixed multiple of the tolerance
            System::Kepler(_) => {
                let j2 = z.position.cross(&z.momentum).norm_squared();
                let e = kepler_constants(&z, &KeplerParams::new(1.0).unwrap()).unwrap().textbook_runge_lenz().norm();
                prop_assume!(j2 / (1.0 + e) > 0.25);
            }
        }
        let cfg = IntegratorConfig::with_tolerance(tol).samples(3);
        let fwd = integrate(system, &z, 1.5, &cfg).unwrap();
        prop_assume!(!fwd.is_truncated());
        let end = fwd.last().point;
        let back = integrate(system, &PhasePoint::new(end.position, -end.momentum), 1.5, &cfg).unwrap();
        prop_assume!(!back.is_truncated());
        let home = back.last().point;
        let d = PhasePoint::new(home.position, -home.momentum).distance(&z);
        let scale = z.to_array().iter().chain(end.to_array().iter()).fold(1.0f64, |m, c| m.max(c.abs()));
        prop_assert!(d < 100.0 * tol * scale, "{}", d);
    }
}

#[test]
fn drift_is_monotone_in_tolerance() {
    let problems = [
        (System::Kepler(KeplerParams::new(1.0).unwrap()), PhasePoint::from_arrays([1., 0., 0.], [0.15, 1.06, 0.1]), 40.0),
        (
            System::Geodesic { k: 1.0, chart: Chart::Natural },
            PhasePoint::from_arrays([0.2, -0.1, 0.3], [0.5, 0.6, -0.2]),
            30.0,
        ),
        (
            System::Geodesic { k: -1.0, chart: Chart::Transformed },
            PhasePoint::from_arrays([1., 0.2, 0.], [0.3, 1.6, 0.1]),
            10.0,
        ),
    ];
    for (system, z, t) in problems {
        let mut previous: Option<f64> = None;
        for tol in [1e-6, 5e-7, 2.5e-7, 1.25e-7, 6.25e-8] {
            let traj = integrate(system, &z, t, &IntegratorConfig::with_tolerance(tol)).unwrap();
            assert!(!traj.is_truncated());
            let d = drift_report(&traj).max;
            if let Some(p) = previous {
                assert!(d <= 10.0 * p, "{system:?}: drift {d:e} at tol {tol:e} after {p:e}");
            }
            previous = Some(d);
        }
    }
}
