//! Numerical integration of the Kepler and geodesic flows.
//!
//! Trajectories are sampled on a uniform time grid from the dense output of
//! an adaptive Dormand–Prince 5(4) integrator. Every sample carries the
//! closed-form energy and the six charges so drift can be read off directly.
//!
//! For `k > 0` the natural chart can be left through the pole at infinity.
//! [`integrate_regularized_geodesic`] switches to the antipodal stereographic
//! sheet whenever `|x|` crosses `2/√k`, which keeps coordinates bounded and
//! carries the flow through the points that the duality maps to Kepler
//! collisions.

mod dopri5;

use serde::{Deserialize, Serialize};

use crate::curvature::{geodesic_vector_field, killing_charges, Chart, ChartedGeodesicState};
use crate::error::{Error, Result};
use crate::kepler::{kepler_constants, KeplerParams};
use crate::maps::{antipodal_isometry, antipodal_sheet_to_transformed, natural_to_transformed};
use crate::phase::{PhasePoint, Tangent};

use dopri5::{Dopri5, State, StepFailure};

/// Smallest Kepler radius (and transformed-chart `|x̄|`) the plain integrator accepts.
pub const COLLISION_FLOOR: f64 = 1e-8;

/// Natural-chart radius treated as reaching the excluded pole (`k > 0`).
pub const POLE_ESCAPE_RADIUS: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Number of uniformly spaced output samples, endpoints included.
    pub samples: usize,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_step: f64::INFINITY, samples: 1001, max_steps: 10_000_000 }
    }
}

impl IntegratorConfig {
    /// Same relative and absolute tolerance.
    pub fn with_tolerance(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, ..Self::default() }
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidInput("max step must be positive".into()));
        }
        if self.samples < 2 {
            return Err(Error::InvalidInput("at least two output samples are required".into()));
        }
        Ok(())
    }
}

/// Which Hamiltonian system to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    Kepler(KeplerParams),
    Geodesic { k: f64, chart: Chart },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemTag {
    Kepler,
    GeodesicNatural,
    GeodesicTransformed,
}

impl SystemTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemTag::Kepler => "kepler",
            SystemTag::GeodesicNatural => "geodesic-natural",
            SystemTag::GeodesicTransformed => "geodesic-transformed",
        }
    }
}

/// Stereographic sheet of a natural-chart sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    #[default]
    Primary,
    /// Coordinates after the antipodal isometry.
    Antipodal,
}

impl Sheet {
    pub fn flipped(self) -> Sheet {
        match self {
            Sheet::Primary => Sheet::Antipodal,
            Sheet::Antipodal => Sheet::Primary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub point: PhasePoint,
    /// `H` or `G`.
    pub energy: f64,
    /// `(J, A)` or `(L, D)`; geodesic charges are expressed in the primary sheet.
    pub charges: [f64; 6],
    pub sheet: Sheet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchEvent {
    pub t: f64,
    pub sheet_after: Sheet,
    pub energy_before: f64,
    pub energy_after: f64,
    pub charges_before: [f64; 6],
    pub charges_after: [f64; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationReason {
    /// `|x|` fell below [`COLLISION_FLOOR`].
    CollisionFloor,
    /// A `k < 0` natural chart reached its boundary sphere.
    ChartBoundary,
    /// A `k > 0` natural chart ran off to the pole.
    PoleEscape,
    /// The error control could not shrink the step further.
    StepUnderflow,
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Truncation {
    pub t: f64,
    pub reason: TruncationReason,
    pub message: String,
}

/// Time-ordered samples of one flow.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub system: SystemTag,
    /// `α` for Kepler, `k` for geodesics.
    pub parameter: f64,
    pub samples: Vec<Sample>,
    pub config: Option<IntegratorConfig>,
    pub switches: Vec<SwitchEvent>,
    pub truncation: Option<Truncation>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncation.is_some()
    }

    pub fn first(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    /// Checks the sample-ordering invariant.
    pub fn validate(&self) -> Result<()> {
        if self.samples.is_empty() {
            return Err(Error::InvalidInput("trajectory has no samples".into()));
        }
        if self.samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidInput("sample times are not strictly increasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum DomainExit {
    Collision(f64),
    Boundary(f64),
    Escape(f64),
}

impl DomainExit {
    fn truncation(self, t: f64) -> Truncation {
        let (reason, message) = match self {
            DomainExit::Collision(r) => {
                (TruncationReason::CollisionFloor, format!("radius {r:e} below collision floor {COLLISION_FLOOR:e}"))
            }
            DomainExit::Boundary(f) => (TruncationReason::ChartBoundary, format!("conformal factor {f:e} at chart boundary")),
            DomainExit::Escape(r) => (TruncationReason::PoleEscape, format!("radius {r:e} reached the excluded pole")),
        };
        Truncation { t, reason, message }
    }
}

fn to_state(pt: &PhasePoint) -> State {
    pt.to_array()
}

fn from_tangent(v: Tangent) -> State {
    [v.dx[0], v.dx[1], v.dx[2], v.dp[0], v.dp[1], v.dp[2]]
}

fn domain_rhs(system: System) -> impl FnMut(f64, &State) -> std::result::Result<State, DomainExit> {
    move |_t, y| {
        let pt = PhasePoint::from_slice(y);
        let r = pt.position.norm();
        if !pt.is_finite() {
            return Err(DomainExit::Escape(f64::INFINITY));
        }
        match system {
            System::Kepler(params) => {
                if r < COLLISION_FLOOR {
                    return Err(DomainExit::Collision(r));
                }
                let a = params.alpha() / (r * r * r);
                Ok([y[3], y[4], y[5], -a * y[0], -a * y[1], -a * y[2]])
            }
            System::Geodesic { k, chart } => {
                match chart {
                    Chart::Natural => {
                        if r > POLE_ESCAPE_RADIUS {
                            return Err(DomainExit::Escape(r));
                        }
                        let f = 1.0 + 0.25 * k * r * r;
                        if !(f > 0.0) {
                            return Err(DomainExit::Boundary(f));
                        }
                    }
                    Chart::Transformed if r < COLLISION_FLOOR => return Err(DomainExit::Collision(r)),
                    Chart::Transformed => {}
                }
                let state = ChartedGeodesicState { point: pt, chart, k };
                geodesic_vector_field(&state).map(from_tangent).map_err(|_| DomainExit::Escape(r))
            }
        }
    }
}

fn observe(system: System, pt: &PhasePoint, sheet: Sheet) -> Result<(f64, [f64; 6])> {
    match system {
        System::Kepler(params) => {
            let c = kepler_constants(pt, &params)?;
            Ok((c.energy, c.charges()))
        }
        System::Geodesic { k, chart } => {
            let c = killing_charges(&ChartedGeodesicState::new(*pt, chart, k)?)?;
            let mut charges = c.charges();
            if sheet == Sheet::Antipodal {
                for d in &mut charges[3..] {
                    *d = -*d;
                }
            }
            Ok((c.energy, charges))
        }
    }
}

fn make_sample(system: System, t: f64, y: &State, sheet: Sheet) -> Result<Sample> {
    let point = PhasePoint::from_slice(y);
    let (energy, charges) = observe(system, &point, sheet)?;
    Ok(Sample { t, point, energy, charges, sheet })
}

fn check_start(system: System, start: &PhasePoint, t_final: f64, cfg: &IntegratorConfig) -> Result<()> {
    cfg.validate()?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidInput(format!("final time must be positive, got {t_final}")));
    }
    if domain_rhs(system)(0.0, &to_state(start)).is_err() {
        return Err(Error::InvalidInput("start point outside the system's domain".into()));
    }
    observe(system, start, Sheet::Primary).map(|_| ())
}

struct SwitchRule {
    k: f64,
    radius: f64,
}

fn drive(
    system: System,
    start: &PhasePoint,
    start_sheet: Sheet,
    t_final: f64,
    cfg: &IntegratorConfig,
    switch: Option<SwitchRule>,
) -> Result<Trajectory> {
    check_start(system, start, t_final, cfg)?;
    let tag = match system {
        System::Kepler(_) => SystemTag::Kepler,
        System::Geodesic { chart: Chart::Natural, .. } => SystemTag::GeodesicNatural,
        System::Geodesic { chart: Chart::Transformed, .. } => SystemTag::GeodesicTransformed,
    };
    let parameter = match system {
        System::Kepler(p) => p.alpha(),
        System::Geodesic { k, .. } => k,
    };
    let n = cfg.samples;
    let grid: Vec<f64> = (0..n).map(|i| if i + 1 == n { t_final } else { t_final * i as f64 / (n - 1) as f64 }).collect();

    let mut sheet = start_sheet;
    let mut samples = Vec::with_capacity(n);
    samples.push(make_sample(system, 0.0, &to_state(start), sheet)?);
    let mut switches = Vec::new();
    let mut truncation = None;

    let mut stepper = Dopri5::new(domain_rhs(system), 0.0, to_state(start), cfg.rtol, cfg.atol, cfg.max_step)
        .map_err(|_| Error::InvalidInput("start point outside the system's domain".into()))?;
    let mut next = 1;
    while stepper.t < t_final {
        if stepper.accepted >= cfg.max_steps {
            truncation = Some(Truncation {
                t: stepper.t,
                reason: TruncationReason::StepLimit,
                message: format!("step limit {} reached", cfg.max_steps),
            });
            break;
        }
        let dense = match stepper.step(t_final) {
            Ok(d) => d,
            Err(StepFailure::Domain(exit)) => {
                truncation = Some(exit.truncation(stepper.t));
                break;
            }
            Err(StepFailure::Underflow) => {
                truncation = Some(Truncation {
                    t: stepper.t,
                    reason: TruncationReason::StepUnderflow,
                    message: format!("step size underflow at radius {:e}", PhasePoint::from_slice(&stepper.y).position.norm()),
                });
                break;
            }
        };
        while next < n && grid[next] <= stepper.t {
            let y = if grid[next] == stepper.t { stepper.y } else { dense.eval(grid[next]) };
            samples.push(make_sample(system, grid[next], &y, sheet)?);
            next += 1;
        }
        if let Some(rule) = &switch {
            let pt = PhasePoint::from_slice(&stepper.y);
            if pt.position.norm() > rule.radius && stepper.t < t_final {
                let (energy_before, charges_before) = observe(system, &pt, sheet)?;
                let mapped = antipodal_isometry(&pt, rule.k)?;
                sheet = sheet.flipped();
                let (energy_after, charges_after) = observe(system, &mapped, sheet)?;
                stepper
                    .reset(to_state(&mapped))
                    .map_err(|_| Error::InvalidInput("switched state left the chart".into()))?;
                switches.push(SwitchEvent {
                    t: stepper.t,
                    sheet_after: sheet,
                    energy_before,
                    energy_after,
                    charges_before,
                    charges_after,
                });
            }
        }
    }
    if truncation.is_some() && stepper.t > samples.last().map_or(0.0, |s| s.t) {
        samples.push(make_sample(system, stepper.t, &stepper.y, sheet)?);
    }
    Ok(Trajectory {
        system: tag,
        parameter,
        samples,
        config: Some(*cfg),
        switches,
        truncation,
        accepted_steps: stepper.accepted,
        rejected_steps: stepper.rejected,
    })
}

/// Integrate a flow from `start` over `[0, t_final]`.
///
/// Leaving the domain (Kepler collision floor, chart boundary, pole) stops
/// the integration; the partial trajectory is returned with
/// [`Trajectory::truncation`] set and the last reached state appended.
pub fn integrate(system: System, start: &PhasePoint, t_final: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    drive(system, start, Sheet::Primary, t_final, cfg, None)
}

/// Natural-chart geodesic flow for `k > 0` with antipodal chart switching at `|x| = 2/√k`.
pub fn integrate_regularized_geodesic(
    k: f64,
    start: &ChartedGeodesicState,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    integrate_regularized_geodesic_from(k, start, Sheet::Primary, t_final, cfg)
}

/// As [`integrate_regularized_geodesic`], starting in a given sheet.
pub fn integrate_regularized_geodesic_from(
    k: f64,
    start: &ChartedGeodesicState,
    sheet: Sheet,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::InvalidInput(format!("regularization needs k > 0, got {k}")));
    }
    if start.chart != Chart::Natural || start.k != k {
        return Err(Error::InvalidInput("regularized start must be a natural-chart state with the same k".into()));
    }
    let rule = SwitchRule { k, radius: 2.0 / k.sqrt() };
    drive(System::Geodesic { k, chart: Chart::Natural }, &start.point, sheet, t_final, cfg, Some(rule))
}

/// Transformed-chart image of a natural-chart sample from either sheet.
/// Fails exactly at the points the duality sends to a Kepler collision.
pub fn sample_to_transformed(sample: &Sample, k: f64) -> Result<PhasePoint> {
    match sample.sheet {
        Sheet::Primary => natural_to_transformed(&sample.point),
        Sheet::Antipodal => antipodal_sheet_to_transformed(&sample.point, k),
    }
}

/// `|x̄|` of the dual Kepler point of a natural-chart sample; zero at collision.
pub fn dual_kepler_radius(sample: &Sample, k: f64) -> f64 {
    let (x, p) = (&sample.point.position, &sample.point.momentum);
    let scale = 2.0 * std::f64::consts::SQRT_2;
    match sample.sheet {
        Sheet::Primary => x.norm_squared() * p.norm() / scale,
        Sheet::Antipodal => 4.0 / k * p.norm() / scale,
    }
}

/// Maximum relative drift of each conserved column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftReport {
    pub samples: usize,
    pub energy: f64,
    pub charges: [f64; 6],
    /// Largest of all the above.
    pub max: f64,
}

/// Drift of each column relative to its initial value. Energies are divided by
/// `|E₀|`; each charge by the norm of its 3-vector at the first sample. Zero
/// references fall back to absolute drift.
pub fn drift_report(traj: &Trajectory) -> DriftReport {
    let first = traj.first();
    let energy_ref = if first.energy != 0.0 { first.energy.abs() } else { 1.0 };
    let vec_ref = |range: std::ops::Range<usize>| {
        let n = first.charges[range].iter().map(|c| c * c).sum::<f64>().sqrt();
        if n > 0.0 {
            n
        } else {
            1.0
        }
    };
    let refs = [vec_ref(0..3), vec_ref(3..6)];
    let mut energy: f64 = 0.0;
    let mut charges = [0.0f64; 6];
    for s in &traj.samples {
        energy = energy.max((s.energy - first.energy).abs() / energy_ref);
        for i in 0..6 {
            charges[i] = charges[i].max((s.charges[i] - first.charges[i]).abs() / refs[i / 3]);
        }
    }
    let max = charges.iter().fold(energy, |m, c| m.max(*c));
    DriftReport { samples: traj.samples.len(), energy, charges, max }
}
