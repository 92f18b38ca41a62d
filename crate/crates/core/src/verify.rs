//! Verification suites over seeded random samples.
//!
//! Each suite returns named checks with a residual, a tolerance and a
//! verdict. Checks are sorted by name so reports are reproducible.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::algebra::{classify_curvature, classify_kepler_energy, Algebra, BracketReport};
use crate::curvature::{
    curvature_bracket_table, geodesic_energy, geodesic_vector_field, kepler_form_residual, killing_charges, Chart,
    ChartedGeodesicState, GeodesicField, TransformedBranch,
};
use crate::duality::{
    charge_transport_residual, kepler_eom_residual, make_dictionary, map_trajectory, substitute_k_with_minus_h,
    two_form_correspondence, vector_field_proportionality, Branch, DualityDictionary,
};
use crate::error::{Error, Result};
use crate::flows::{
    dual_kepler_radius, drift_report, integrate, integrate_regularized_geodesic,
    integrate_regularized_geodesic_from, IntegratorConfig, Sheet, System, Trajectory, TruncationReason,
};
use crate::kepler::{kepler_bracket_table, kepler_constants, kepler_vector_field, KeplerField, KeplerParams};
use crate::maps::{inversion, natural_to_transformed, registered_maps, transformed_to_antipodal_sheet};
use crate::phase::{derivative_along, refined_symplectic_check, PhasePoint, JACOBIAN_STEP};
use crate::sampling::{EnergyClass, Sampler};

pub const BRACKET_TOLERANCE: f64 = 1e-8;
pub const CONSERVATION_TOLERANCE: f64 = 1e-10;
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-8;
pub const INVOLUTION_TOLERANCE: f64 = 1e-12;
pub const TRANSPORT_TOLERANCE: f64 = 1e-10;
pub const KEPLER_FORM_TOLERANCE: f64 = 1e-12;
pub const PROPORTIONALITY_TOLERANCE: f64 = 1e-10;
pub const SUBSTITUTION_TOLERANCE: f64 = 1e-12;
pub const EOM_TOLERANCE: f64 = 1e-6;
pub const CHARGE_TRANSPORT_TOLERANCE: f64 = 1e-9;
pub const DRIFT_TOLERANCE: f64 = 1e-9;
pub const CURVATURES: [f64; 3] = [-1.0, 0.0, 1.0];
pub const CHARTS: [Chart; 2] = [Chart::Natural, Chart::Transformed];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Brackets,
    Symplectic,
    Constants,
    Duality,
    Regularize,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Brackets, Suite::Symplectic, Suite::Constants, Suite::Duality, Suite::Regularize];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Brackets => "brackets",
            Suite::Symplectic => "symplectic",
            Suite::Constants => "constants",
            Suite::Duality => "duality",
            Suite::Regularize => "regularize",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// Worst residual over the points examined.
    pub residual: f64,
    pub tolerance: f64,
    /// Points or trajectories examined.
    pub samples: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// `residual < tolerance`; a NaN residual fails.
    pub fn new(name: impl Into<String>, residual: f64, tolerance: f64, samples: usize) -> Self {
        Check { name: name.into(), residual, tolerance, samples, passed: residual < tolerance, note: None }
    }

    /// A check whose verdict is not a residual comparison.
    pub fn verdict(name: impl Into<String>, passed: bool, note: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            residual: if passed { 0.0 } else { 1.0 },
            tolerance: 0.5,
            samples: 1,
            passed,
            note: Some(note.into()),
        }
    }

    fn failed(name: impl Into<String>, tolerance: f64, err: &Error) -> Self {
        Check {
            name: name.into(),
            residual: f64::INFINITY,
            tolerance,
            samples: 0,
            passed: false,
            note: Some(err.to_string()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Run one suite with `samples` random points per check.
pub fn run_suite(suite: Suite, seed: u64, samples: usize) -> Result<VerifyReport> {
    if samples == 0 {
        return Err(Error::InvalidInput("at least one sample is required".into()));
    }
    let mut checks = match suite {
        Suite::Brackets => bracket_checks(seed, samples),
        Suite::Symplectic => symplectic_checks(seed, samples),
        Suite::Constants => constant_checks(seed, samples),
        Suite::Duality => duality_checks(seed, samples),
        Suite::Regularize => regularize_checks(),
    };
    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { suite, seed, samples, checks, passed })
}

/// Max of `f` over `n` points, or a failed check on the first error.
fn sweep<F>(name: String, tolerance: f64, n: usize, mut f: F) -> Check
where
    F: FnMut(usize) -> Result<f64>,
{
    let mut worst: f64 = 0.0;
    for i in 0..n {
        match f(i) {
            Ok(r) => worst = if r.is_nan() { f64::NAN } else { worst.max(r) },
            Err(e) => return Check::failed(name, tolerance, &e),
        }
    }
    Check::new(name, worst, tolerance, n)
}

fn chart_name(chart: Chart) -> &'static str {
    match chart {
        Chart::Natural => "natural",
        Chart::Transformed => "transformed",
    }
}

/// Random state for a chart; transformed points are drawn directly.
pub fn geodesic_state(sampler: &mut Sampler, k: f64, chart: Chart) -> Result<ChartedGeodesicState> {
    match chart {
        Chart::Natural => ChartedGeodesicState::natural(sampler.natural_point(k), k),
        Chart::Transformed => ChartedGeodesicState::transformed(sampler.transformed_point(), k),
    }
}

fn kepler_class_algebra(class: EnergyClass) -> Algebra {
    match class {
        EnergyClass::Negative => Algebra::So4,
        EnergyClass::Zero => Algebra::Iso3,
        EnergyClass::Positive => Algebra::So31,
    }
}

pub fn bracket_checks(seed: u64, n: usize) -> Vec<Check> {
    let mut sampler = Sampler::new(seed);
    let params = KeplerParams::new(1.0).expect("nonzero coupling");
    let mut checks = Vec::new();
    for class in EnergyClass::ALL {
        let want = kepler_class_algebra(class);
        let mut mislabelled = 0;
        let check = sweep(format!("brackets/kepler/{}", class.label()), BRACKET_TOLERANCE, n, |_| {
            let report = kepler_bracket_table(&sampler.kepler_point(1.0, class), &params)?;
            mislabelled += usize::from(report.algebra != want);
            Ok(report.max_residual)
        });
        checks.push(check);
        checks.push(Check::verdict(
            format!("classify/kepler/{}", class.label()),
            mislabelled == 0,
            format!("{mislabelled} of {n} points not labelled {want}"),
        ));
    }
    for k in CURVATURES {
        let want = classify_curvature(k);
        for chart in CHARTS {
            let mut mislabelled = 0;
            let check = sweep(format!("brackets/geodesic/k={k}/{}", chart_name(chart)), BRACKET_TOLERANCE, n, |_| {
                let report = curvature_bracket_table(&geodesic_state(&mut sampler, k, chart)?)?;
                mislabelled += usize::from(report.algebra != want);
                Ok(report.max_residual)
            });
            checks.push(check);
            checks.push(Check::verdict(
                format!("classify/geodesic/k={k}/{}", chart_name(chart)),
                mislabelled == 0,
                format!("{mislabelled} of {n} points not labelled {want}"),
            ));
        }
    }
    checks
}

pub fn symplectic_checks(seed: u64, n: usize) -> Vec<Check> {
    let mut sampler = Sampler::new(seed);
    let mut checks = Vec::new();
    for k in CURVATURES {
        for map in registered_maps(k) {
            for (label, m) in [("forward", map), ("inverse", map.inverted())] {
                let check = sweep(format!("symplectic/k={k}/{}/{label}", map.name), SYMPLECTIC_TOLERANCE, n, |_| {
                    let at = loop {
                        let z = sampler.natural_point(k);
                        let z = if label == "inverse" { map.forward(&z) } else { Ok(z) };
                        if let Ok(z) = z {
                            if m.in_domain(&z) {
                                break z;
                            }
                        }
                    };
                    Ok(refined_symplectic_check(&m, &at, JACOBIAN_STEP)?.residual)
                });
                checks.push(check);
            }
        }
    }
    checks.push(sweep("involution/inversion".into(), INVOLUTION_TOLERANCE, n, |_| {
        let z = sampler.natural_point(1.0);
        let back = inversion(&inversion(&z)?)?;
        Ok(back.distance(&z) / z.to_array().iter().fold(1.0f64, |m, c| m.max(c.abs())))
    }));
    for k in CURVATURES {
        checks.push(sweep(format!("round_trip/k={k}/registered_maps"), INVOLUTION_TOLERANCE, n, |_| {
            let z = sampler.natural_point(k);
            let mut worst: f64 = 0.0;
            for map in registered_maps(k) {
                let back = map.inverse(&map.forward(&z)?)?;
                worst = worst.max(back.distance(&z) / z.to_array().iter().fold(1.0f64, |m, c| m.max(c.abs())));
            }
            Ok(worst)
        }));
    }
    checks
}

/// Max over the six charges of `|X(f)|` for the system's own flow `X`.
fn kepler_conservation(pt: &PhasePoint, params: &KeplerParams) -> Result<f64> {
    let v = kepler_vector_field(pt, params)?;
    let mut worst = derivative_along(&KeplerField::energy(*params), &v, pt)?.abs();
    for f in KeplerField::charges(*params) {
        worst = worst.max(derivative_along(&f, &v, pt)?.abs());
    }
    Ok(worst)
}

fn geodesic_conservation(state: &ChartedGeodesicState) -> Result<f64> {
    let v = geodesic_vector_field(state)?;
    let mut worst = derivative_along(&GeodesicField::energy(state.k, state.chart), &v, &state.point)?.abs();
    for f in GeodesicField::charges(state.k, state.chart) {
        worst = worst.max(derivative_along(&f, &v, &state.point)?.abs());
    }
    Ok(worst)
}

pub fn constant_checks(seed: u64, n: usize) -> Vec<Check> {
    let mut sampler = Sampler::new(seed);
    let params = KeplerParams::new(1.0).expect("nonzero coupling");
    let mut checks = Vec::new();
    for class in EnergyClass::ALL {
        checks.push(sweep(format!("conserved/kepler/{}", class.label()), CONSERVATION_TOLERANCE, n, |_| {
            kepler_conservation(&sampler.kepler_point(1.0, class), &params)
        }));
    }
    for k in CURVATURES {
        for chart in CHARTS {
            checks.push(sweep(
                format!("conserved/geodesic/k={k}/{}", chart_name(chart)),
                CONSERVATION_TOLERANCE,
                n,
                |_| geodesic_conservation(&geodesic_state(&mut sampler, k, chart)?),
            ));
        }
    }
    checks.push(sweep("conserved/kepler/orthogonality".into(), CONSERVATION_TOLERANCE, n, |_| {
        let inv = kepler_constants(&sampler.kepler_point(1.0, EnergyClass::Negative), &params)?;
        Ok(inv.angular_momentum.dot(&inv.runge_lenz).abs())
    }));
    checks
}

/// Transformed point with `k + |p̄|²/2 > 0`.
fn attractive_transformed_state(sampler: &mut Sampler, k: f64) -> Result<ChartedGeodesicState> {
    loop {
        let z = sampler.transformed_point();
        if k + 0.5 * z.momentum.norm_squared() > 0.0 {
            return ChartedGeodesicState::transformed(z, k);
        }
    }
}

/// The transformed-chart circular geodesic used by the end-to-end checks.
pub fn circular_duality_run(samples: usize) -> Result<(Trajectory, DualityDictionary, Trajectory)> {
    let start = PhasePoint::from_arrays([1., 0., 0.], [0., 1., 0.]);
    let cfg = IntegratorConfig::with_tolerance(1e-12).samples(samples);
    let geo = integrate(System::Geodesic { k: 1.0, chart: Chart::Transformed }, &start, 6.0, &cfg)?;
    let dict = make_dictionary(1.0, geo.first().energy, Branch::Attractive)?;
    let kep = map_trajectory(&geo, &dict)?;
    Ok((geo, dict, kep))
}

pub fn duality_checks(seed: u64, n: usize) -> Vec<Check> {
    let mut sampler = Sampler::new(seed);
    let mut checks = Vec::new();
    for k in CURVATURES {
        checks.push(sweep(format!("proportionality/k={k}"), PROPORTIONALITY_TOLERANCE, n, |_| {
            Ok(vector_field_proportionality(&attractive_transformed_state(&mut sampler, k)?)?.residual)
        }));
        checks.push(sweep(format!("energy_transport/k={k}"), TRANSPORT_TOLERANCE, n, |_| {
            let z = sampler.natural_point(k);
            let g_nat = geodesic_energy(&ChartedGeodesicState::natural(z, k)?)?;
            let g_tr = geodesic_energy(&ChartedGeodesicState::transformed(natural_to_transformed(&z)?, k)?)?;
            Ok((g_nat - g_tr).abs() / g_nat.max(1.0))
        }));
        checks.push(sweep(format!("charge_transport/k={k}"), TRANSPORT_TOLERANCE, n, |_| {
            let z = sampler.natural_point(k);
            let a = killing_charges(&ChartedGeodesicState::natural(z, k)?)?.charges();
            let b = killing_charges(&ChartedGeodesicState::transformed(natural_to_transformed(&z)?, k)?)?.charges();
            let scale = a.iter().fold(1.0f64, |m, c| m.max(c.abs()));
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale)
        }));
        for branch in [TransformedBranch::Attractive, TransformedBranch::Repulsive] {
            if branch == TransformedBranch::Repulsive && k >= 0.0 {
                continue;
            }
            let label = if branch == TransformedBranch::Attractive { "attractive" } else { "repulsive" };
            checks.push(sweep(format!("kepler_form/k={k}/{label}"), KEPLER_FORM_TOLERANCE, n, |_| loop {
                let state = ChartedGeodesicState::transformed(sampler.transformed_point(), k)?;
                let (b, residual) = kepler_form_residual(&state)?;
                if b == branch {
                    break Ok(residual);
                }
            }));
        }
    }
    let params = KeplerParams::new(1.0).expect("nonzero coupling");
    checks.push(sweep("substitution/runge_lenz".into(), SUBSTITUTION_TOLERANCE, n, |i| {
        let z = sampler.kepler_point(1.0, EnergyClass::ALL[i % 3]);
        let a = kepler_constants(&z, &params)?.runge_lenz;
        Ok((substitute_k_with_minus_h(&z, &params)? - a).amax() / a.amax().max(1.0))
    }));
    checks.push(sweep("dictionary/involution".into(), 1e-15, n, |_| {
        let k = sampler.uniform(-2.0, 2.0);
        let c = sampler.uniform(0.01, 4.0);
        let branch = if k < 0.0 && sampler.uniform(0.0, 1.0) < 0.5 { Branch::Repulsive } else { Branch::Attractive };
        let d = make_dictionary(k, c, branch)?;
        let back = DualityDictionary::from_kepler(d.energy, d.alpha)?;
        Ok(((back.k - k).abs() + (back.c - c).abs() / c).max(if back.branch == branch { 0.0 } else { 1.0 }))
    }));
    checks.push(Check::verdict(
        "dictionary/excluded_cases",
        matches!(make_dictionary(1.0, 0.0, Branch::Attractive), Err(Error::Excluded(_)))
            && matches!(make_dictionary(1.0, 1.0, Branch::Repulsive), Err(Error::Inconsistent(_))),
        "C = 0 excluded; repulsive needs k < 0",
    ));
    match circular_duality_run(4001) {
        Ok((geo, dict, kep)) => {
            let energy = kep.samples.iter().map(|s| (s.energy - dict.energy).abs()).fold(0.0, f64::max);
            checks.push(Check::new("end_to_end/kepler_energy", energy, DRIFT_TOLERANCE, kep.samples.len()));
            match kepler_eom_residual(&kep, &KeplerParams::new(dict.alpha).expect("positive coupling")) {
                Ok(r) => checks.push(Check::new("end_to_end/kepler_eom", r, EOM_TOLERANCE, kep.samples.len())),
                Err(e) => checks.push(Check::failed("end_to_end/kepler_eom", EOM_TOLERANCE, &e)),
            }
            match charge_transport_residual(&geo, &kep) {
                Ok(r) => checks.push(Check::new(
                    "end_to_end/charge_transport",
                    r,
                    CHARGE_TRANSPORT_TOLERANCE,
                    kep.samples.len(),
                )),
                Err(e) => checks.push(Check::failed("end_to_end/charge_transport", CHARGE_TRANSPORT_TOLERANCE, &e)),
            }
            match two_form_correspondence(&geo, &kep, &dict) {
                Ok(r) => checks.push(
                    Check::new(
                        "end_to_end/time_rate",
                        r.time_rate_residual,
                        crate::duality::TIME_RATE_TOLERANCE,
                        kep.samples.len(),
                    )
                    .with_note(format!("two-form correspondence passed: {}", r.passed)),
                ),
                Err(e) => checks.push(Check::failed("end_to_end/time_rate", crate::duality::TIME_RATE_TOLERANCE, &e)),
            }
        }
        Err(e) => checks.push(Check::failed("end_to_end/kepler_energy", DRIFT_TOLERANCE, &e)),
    }
    checks
}

/// Geodesic whose dual is the radial Kepler orbit from `x̄ = (2,0,0)`,
/// `p̄ = 0` at `k = 1`. It starts at the north pole, i.e. in the antipodal sheet.
pub fn radial_collision_run(lambda_final: f64, samples: usize) -> Result<Trajectory> {
    let k = 1.0;
    let dual_start = PhasePoint::from_arrays([2., 0., 0.], [0.; 3]);
    let start = ChartedGeodesicState::natural(transformed_to_antipodal_sheet(&dual_start, k)?, k)?;
    let cfg = IntegratorConfig::with_tolerance(1e-12).samples(samples);
    integrate_regularized_geodesic_from(k, &start, Sheet::Antipodal, lambda_final, &cfg)
}

/// Largest jump of the energy and charges across the switch events.
pub fn switch_discontinuity(traj: &Trajectory) -> f64 {
    traj.switches
        .iter()
        .map(|s| {
            s.charges_before
                .iter()
                .zip(&s.charges_after)
                .map(|(a, b)| (a - b).abs())
                .fold((s.energy_before - s.energy_after).abs(), f64::max)
        })
        .fold(0.0, f64::max)
}

pub fn regularize_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    match radial_collision_run(5.0, 5001) {
        Ok(traj) => {
            let drift = drift_report(&traj);
            checks.push(Check::new("radial/energy_drift", drift.energy, DRIFT_TOLERANCE, traj.samples.len()));
            checks.push(Check::new("radial/charge_drift", drift.max, DRIFT_TOLERANCE, traj.samples.len()));
            checks.push(Check::verdict(
                "radial/switches",
                !traj.switches.is_empty() && !traj.is_truncated(),
                format!("{} switch events, truncated: {}", traj.switches.len(), traj.is_truncated()),
            ));
            checks.push(Check::new("radial/switch_continuity", switch_discontinuity(&traj), DRIFT_TOLERANCE, 1));
            let (at, radius) = traj
                .samples
                .iter()
                .map(|s| (s.t, dual_kepler_radius(s, 1.0)))
                .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
            // half a great circle at speed √(2G) = √2 on the unit sphere
            let expected = PI / SQRT_2;
            checks.push(
                Check::new("radial/collision_parameter", (at - expected).abs(), 2.0 * 5.0 / 5000.0, 1)
                    .with_note(format!("min dual radius {radius:e} at lambda {at}")),
            );
        }
        Err(e) => checks.push(Check::failed("radial/energy_drift", DRIFT_TOLERANCE, &e)),
    }
    let params = KeplerParams::new(2.0).expect("nonzero coupling");
    match integrate(
        System::Kepler(params),
        &PhasePoint::from_arrays([2., 0., 0.], [0.; 3]),
        5.0,
        &IntegratorConfig::default(),
    ) {
        Ok(traj) => {
            let reason = traj.truncation.as_ref().map(|t| t.reason);
            checks.push(Check::verdict(
                "radial/unregularized_truncates",
                reason == Some(TruncationReason::CollisionFloor),
                format!("truncation: {reason:?}"),
            ));
        }
        Err(e) => checks.push(Check::failed("radial/unregularized_truncates", 0.5, &e)),
    }
    let great_circle = ChartedGeodesicState::natural(PhasePoint::from_arrays([1., 0., 0.], [0., 0.5, 0.3]), 1.0);
    match great_circle.and_then(|s| {
        integrate_regularized_geodesic(1.0, &s, 20.0, &IntegratorConfig::with_tolerance(1e-12).samples(4001))
    }) {
        Ok(traj) => {
            checks.push(Check::new("great_circle/switch_continuity", switch_discontinuity(&traj), DRIFT_TOLERANCE, 1));
            checks.push(Check::new("great_circle/drift", drift_report(&traj).max, DRIFT_TOLERANCE, 1));
            checks.push(Check::verdict(
                "great_circle/switches",
                !traj.switches.is_empty(),
                format!("{} switch events", traj.switches.len()),
            ));
        }
        Err(e) => checks.push(Check::failed("great_circle/drift", DRIFT_TOLERANCE, &e)),
    }
    checks
}

/// Algebra label backed by a bracket table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub system: String,
    /// `k` for geodesics, `E` for Kepler.
    pub parameter: f64,
    pub algebra: Algebra,
    /// Label read off the table at the representative point.
    pub table_algebra: Algebra,
    pub max_residual: f64,
    pub table: BracketReport,
}

/// Classify the geodesic charge algebra at curvature `k` (natural chart,
/// fixed generic point).
pub fn classify_geodesic(k: f64) -> Result<Classification> {
    if !k.is_finite() {
        return Err(Error::InvalidInput(format!("k must be finite, got {k}")));
    }
    let point = PhasePoint::from_arrays([0.3, -0.2, 0.1], [0.7, 0.4, -0.5]);
    let table = curvature_bracket_table(&ChartedGeodesicState::natural(point, k)?)?;
    Ok(Classification {
        system: "geodesic".into(),
        parameter: k,
        algebra: classify_curvature(k),
        table_algebra: table.algebra,
        max_residual: table.max_residual,
        table,
    })
}

/// Classify the Kepler charge algebra on the energy surface `H = energy`
/// (`α = 1`, at a generic point of that surface).
pub fn classify_kepler(energy: f64) -> Result<Classification> {
    if !energy.is_finite() {
        return Err(Error::InvalidInput(format!("energy must be finite, got {energy}")));
    }
    let r = 1.0 / (1.0 + energy.abs());
    let x = crate::phase::Vec3::new(1.0, 0.2, -0.3).normalize() * r;
    let speed = (2.0 * (energy + 1.0 / r)).sqrt();
    let p = crate::phase::Vec3::new(0.1, 1.0, 0.4).normalize() * speed;
    let params = KeplerParams::new(1.0)?;
    let table = kepler_bracket_table(&PhasePoint::new(x, p), &params)?;
    Ok(Classification {
        system: "kepler".into(),
        parameter: energy,
        algebra: classify_kepler_energy(energy),
        table_algebra: table.algebra,
        max_residual: table.max_residual,
        table,
    })
}
