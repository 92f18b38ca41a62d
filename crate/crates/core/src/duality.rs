//! Correspondence between geodesic motion at curvature `k` and Kepler motion.
//!
//! On the energy surface `G = C` of the transformed chart, the identity map
//! `ψ: (x̄, p̄) ↦ (x, p)` sends geodesic flow lines to Kepler orbits with
//!
//! ```text
//! E = −k,   α = ±2√C,   dτ/dλ = √C |x̄|
//! ```
//!
//! and the charges agree, `J = L` and `A = D`. This module holds the
//! parameter dictionary, the samplewise trajectory map with its time
//! reparametrization, and the numerical checks of the correspondence.

use serde::{Deserialize, Serialize};

use crate::curvature::{
    effective_alpha, geodesic_energy, transformed_branch, transitive_killing_field, Chart, ChartedGeodesicState,
    GeodesicField, TransformedBranch,
};
use crate::error::{Error, Result};
use crate::flows::{Sample, SystemTag, Trajectory};
use crate::kepler::{kepler_constants, kepler_energy, kepler_vector_field, KeplerParams};
use crate::maps::transformed_to_natural;
use crate::phase::{hamiltonian_vector_field, PhasePoint, Tangent, Vec3};

/// Relative tolerance of the time quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
/// Largest relative drift of `G` accepted by [`map_trajectory`].
pub const ENERGY_DRIFT_LIMIT: f64 = 1e-9;
/// Largest relative mismatch between the dictionary's `C` and the trajectory's `G`.
pub const ENERGY_MATCH_TOLERANCE: f64 = 1e-10;
/// Pass threshold for the energy residuals of [`two_form_correspondence`].
pub const ENERGY_RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Pass threshold for the time-rate residual of [`two_form_correspondence`].
pub const TIME_RATE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `α = +2√C`.
    Attractive,
    /// `α = −2√C`; requires `k < 0`.
    Repulsive,
}

impl Branch {
    pub fn sign(&self) -> f64 {
        match self {
            Branch::Attractive => 1.0,
            Branch::Repulsive => -1.0,
        }
    }
}

impl From<TransformedBranch> for Branch {
    fn from(b: TransformedBranch) -> Self {
        match b {
            TransformedBranch::Attractive => Branch::Attractive,
            TransformedBranch::Repulsive => Branch::Repulsive,
        }
    }
}

/// `(k, C, branch) ↦ (E, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualityDictionary {
    pub k: f64,
    /// Value of `G` on the geodesic energy surface.
    pub c: f64,
    pub branch: Branch,
    /// Kepler energy, `−k`.
    pub energy: f64,
    /// Kepler coupling, `±2√C`.
    pub alpha: f64,
}

pub fn make_dictionary(k: f64, c: f64, branch: Branch) -> Result<DualityDictionary> {
    if !(k.is_finite() && c.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite dictionary input (k = {k}, C = {c})")));
    }
    if c < 0.0 {
        return Err(Error::InvalidInput(format!("C = G must be non-negative, got {c}")));
    }
    if c == 0.0 {
        return Err(Error::Excluded("C = 0 gives alpha = 2 sqrt(C) = 0".into()));
    }
    if branch == Branch::Repulsive && k >= 0.0 {
        return Err(Error::Inconsistent(format!(
            "repulsive branch (alpha < 0) needs H > 0, i.e. k < 0; got k = {k}"
        )));
    }
    Ok(DualityDictionary { k, c, branch, energy: -k, alpha: branch.sign() * 2.0 * c.sqrt() })
}

impl DualityDictionary {
    /// The dictionary entry for a given Kepler problem `(E, α)`.
    pub fn from_kepler(energy: f64, alpha: f64) -> Result<Self> {
        let branch = if alpha < 0.0 { Branch::Repulsive } else { Branch::Attractive };
        make_dictionary(-energy, 0.25 * alpha * alpha, branch)
    }

    pub fn kepler_params(&self) -> Result<KeplerParams> {
        KeplerParams::new(self.alpha)
    }
}

/// One point of an evolution space: phase point, time, and family parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionPoint {
    pub point: PhasePoint,
    /// `λ` for geodesics, `τ` for Kepler.
    pub time: f64,
    /// `k` for geodesics, `α` for Kepler.
    pub parameter: f64,
}

pub fn evolution_points(traj: &Trajectory) -> Vec<EvolutionPoint> {
    traj.samples
        .iter()
        .map(|s| EvolutionPoint { point: s.point, time: s.t, parameter: traj.parameter })
        .collect()
}

/// `ψ`: transformed-chart geodesic point to Kepler point. The identity on
/// coordinates; only the Kepler domain `x ≠ 0` is enforced.
pub fn psi_map(geodesic_pt: &PhasePoint) -> Result<PhasePoint> {
    if geodesic_pt.position.norm_squared() > 0.0 {
        Ok(*geodesic_pt)
    } else {
        Err(Error::Origin { what: "psi map (Kepler collision)" })
    }
}

pub fn psi_inverse(kepler_pt: &PhasePoint) -> Result<PhasePoint> {
    psi_map(kepler_pt)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProportionalityReport {
    pub energy: f64,
    pub branch: Branch,
    /// Pointwise `α = ±2√G`.
    pub alpha: f64,
    /// `±√G |x̄|`.
    pub factor: f64,
    pub geodesic_field: Tangent,
    pub kepler_field: Tangent,
    /// Max-norm of `X_G − factor · X_H`.
    pub residual: f64,
}

/// Compare `X_G` (from the gradient of the transformed `G`) with
/// `√G |x̄| · X_H(α = 2√G)` at `ψ(state)`.
pub fn vector_field_proportionality(state: &ChartedGeodesicState) -> Result<ProportionalityReport> {
    if state.chart != Chart::Transformed {
        return Err(Error::InvalidInput("proportionality is stated in the transformed chart".into()));
    }
    let g = geodesic_energy(state)?;
    if g == 0.0 {
        return Err(Error::Excluded("G = 0 gives alpha = 0".into()));
    }
    let branch = transformed_branch(&state.point, state.k);
    let alpha = effective_alpha(state)?;
    let factor = branch.sign() * g.sqrt() * state.point.position.norm();
    let geodesic_field = hamiltonian_vector_field(&GeodesicField::energy(state.k, Chart::Transformed), &state.point)?;
    let kepler_field = kepler_vector_field(&psi_map(&state.point)?, &KeplerParams::new(alpha)?)?;
    let residual = geodesic_field.max_diff(&kepler_field.scale(factor));
    Ok(ProportionalityReport { energy: g, branch: branch.into(), alpha, factor, geodesic_field, kepler_field, residual })
}

/// Integral of a quadratic through `(0, f0), (a, f1), (a + b, f2)` over `[0, a]`.
fn first_interval(a: f64, b: f64, f: [f64; 3]) -> f64 {
    a * (2.0 * a + 3.0 * b) / (6.0 * (a + b)) * f[0] + a * (a + 3.0 * b) / (6.0 * b) * f[1]
        - a * a * a / (6.0 * b * (a + b)) * f[2]
}

/// Same quadratic integrated over `[a, a + b]`.
fn second_interval(a: f64, b: f64, f: [f64; 3]) -> f64 {
    -b * b * b / (6.0 * a * (a + b)) * f[0] + b * (3.0 * a + b) / (6.0 * a) * f[1]
        + b * (3.0 * a + 2.0 * b) / (6.0 * (a + b)) * f[2]
}

fn simpson_pair(t: [f64; 3], f: [f64; 3]) -> f64 {
    let (a, b) = (t[1] - t[0], t[2] - t[1]);
    first_interval(a, b, f) + second_interval(a, b, f)
}

/// Cumulative integral from composite Simpson on a (possibly non-uniform)
/// grid, plus a grid-halving error estimate for the running total.
///
/// Even-indexed values are exact composite Simpson sums; odd-indexed values
/// add one interval of the local interpolating quadratic. With fewer than
/// five nodes no estimate is possible and zero is returned for it.
pub fn cumulative_simpson(times: &[f64], values: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = times.len();
    if n != values.len() {
        return Err(Error::Alignment(format!("{} times vs {} values", n, values.len())));
    }
    if n < 2 {
        return Err(Error::InvalidInput("quadrature needs at least two nodes".into()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("quadrature nodes must be strictly increasing".into()));
    }
    if n == 2 {
        return Ok((vec![0.0, 0.5 * (times[1] - times[0]) * (values[0] + values[1])], 0.0));
    }
    let mut out = vec![0.0; n];
    for i in (2..n).step_by(2) {
        out[i] = out[i - 2]
            + simpson_pair([times[i - 2], times[i - 1], times[i]], [values[i - 2], values[i - 1], values[i]]);
    }
    for i in (1..n).step_by(2) {
        out[i] = if i + 1 < n {
            let (a, b) = (times[i] - times[i - 1], times[i + 1] - times[i]);
            out[i - 1] + first_interval(a, b, [values[i - 1], values[i], values[i + 1]])
        } else {
            let (a, b) = (times[i - 1] - times[i - 2], times[i] - times[i - 1]);
            out[i - 1] + second_interval(a, b, [values[i - 2], values[i - 1], values[i]])
        };
    }
    let m = (n - 1) / 4 * 4;
    let estimate = if m >= 4 {
        let mut coarse = 0.0;
        for j in (4..=m).step_by(4) {
            coarse += simpson_pair([times[j - 4], times[j - 2], times[j]], [values[j - 4], values[j - 2], values[j]]);
        }
        (out[m] - coarse).abs() / 15.0
    } else {
        0.0
    };
    Ok((out, estimate))
}

fn require_transformed_geodesic(traj: &Trajectory) -> Result<()> {
    if traj.system != SystemTag::GeodesicTransformed {
        return Err(Error::InvalidInput(format!(
            "expected a transformed-chart geodesic trajectory, got {}",
            traj.system.as_str()
        )));
    }
    traj.validate()
}

/// Replace the geodesic time `λ` by Kepler time `τ(λ) = ∫₀^λ √C |x̄(s)| ds`.
///
/// The output carries the same phase points, `τ(0) = 0`, the Kepler
/// parameter `α = 2√C`, and Kepler conserved columns.
pub fn reparametrize_time(traj: &Trajectory, c: f64) -> Result<Trajectory> {
    require_transformed_geodesic(traj)?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Excluded(format!("C must be positive, got {c}")));
    }
    let root = c.sqrt();
    let lambdas = traj.times();
    let rates = traj
        .samples
        .iter()
        .map(|s| {
            let r = s.point.position.norm();
            if r > 0.0 {
                Ok(root * r)
            } else {
                Err(Error::Origin { what: "time reparametrization (|x̄| = 0)" })
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let (taus, estimate) = cumulative_simpson(&lambdas, &rates)?;
    let total = taus.last().copied().unwrap_or(0.0).abs();
    let tolerance = QUADRATURE_TOLERANCE * total.max(f64::MIN_POSITIVE);
    if estimate > tolerance {
        return Err(Error::Resolution { estimate, tolerance });
    }
    if taus.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Resolution { estimate: f64::INFINITY, tolerance });
    }
    let params = KeplerParams::new(2.0 * root)?;
    let samples = traj
        .samples
        .iter()
        .zip(&taus)
        .map(|(s, &tau)| {
            let inv = kepler_constants(&s.point, &params)?;
            Ok(Sample { t: tau, point: s.point, energy: inv.energy, charges: inv.charges(), sheet: s.sheet })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        system: SystemTag::Kepler,
        parameter: params.alpha(),
        samples,
        config: traj.config,
        switches: Vec::new(),
        truncation: traj.truncation.clone(),
        accepted_steps: traj.accepted_steps,
        rejected_steps: traj.rejected_steps,
    })
}

/// Map a transformed-chart geodesic trajectory on `G = C` to the Kepler
/// trajectory with `E = −k`, `α = 2√C`.
pub fn map_trajectory(traj: &Trajectory, dict: &DualityDictionary) -> Result<Trajectory> {
    require_transformed_geodesic(traj)?;
    if dict.branch != Branch::Attractive {
        return Err(Error::Inconsistent("trajectory map is implemented for the attractive branch only".into()));
    }
    if traj.parameter != dict.k {
        return Err(Error::Inconsistent(format!("trajectory k = {} but dictionary k = {}", traj.parameter, dict.k)));
    }
    let g0 = traj.first().energy;
    let drift = traj.samples.iter().map(|s| (s.energy - g0).abs()).fold(0.0, f64::max) / g0.abs().max(f64::MIN_POSITIVE);
    if drift > ENERGY_DRIFT_LIMIT {
        return Err(Error::InvalidInput(format!("G drifts by {drift:e} along the input (limit {ENERGY_DRIFT_LIMIT:e})")));
    }
    if (dict.c - g0).abs() > ENERGY_MATCH_TOLERANCE * g0.abs().max(1.0) {
        return Err(Error::Inconsistent(format!("dictionary C = {} but trajectory G = {g0}", dict.c)));
    }
    for s in &traj.samples {
        psi_map(&s.point)?;
    }
    let mut out = reparametrize_time(traj, dict.c)?;
    out.parameter = dict.alpha;
    Ok(out)
}

/// Weights of the first derivative at `z` from values at `nodes` (Fornberg).
fn derivative_weights(z: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    for i in 1..n {
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                c[i][1] = c1 * (c[i - 1][0] - c5 * c[i - 1][1]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            c[j][1] = (c4 * c[j][1] - c[j][0]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|w| w[1]).collect()
}

/// Fourth-order derivative at every node from a five-point stencil, shifted
/// inward near the ends. Needs at least five nodes; returns nothing otherwise.
fn sampled_derivatives(times: &[f64], values: &[[f64; 6]]) -> Vec<(usize, [f64; 6])> {
    const WIDTH: usize = 5;
    let n = times.len();
    if n < WIDTH {
        return Vec::new();
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(WIDTH / 2).min(n - WIDTH);
            let w = derivative_weights(times[i], &times[lo..lo + WIDTH]);
            (i, std::array::from_fn(|j| (0..WIDTH).map(|m| w[m] * values[lo + m][j]).sum()))
        })
        .collect()
}

/// Max over samples of `|dX/dτ − X_H(X)|` with `dX/dτ` from finite differences.
pub fn kepler_eom_residual(traj: &Trajectory, params: &KeplerParams) -> Result<f64> {
    let times = traj.times();
    let values: Vec<[f64; 6]> = traj.samples.iter().map(|s| s.point.to_array()).collect();
    let mut worst: f64 = 0.0;
    for (i, d) in sampled_derivatives(&times, &values) {
        let v = kepler_vector_field(&traj.samples[i].point, params)?;
        let want = [v.dx[0], v.dx[1], v.dx[2], v.dp[0], v.dp[1], v.dp[2]];
        for j in 0..6 {
            worst = worst.max((d[j] - want[j]).abs());
        }
    }
    Ok(worst)
}

/// Max over samples of `|J − L|` and `|A − D|` between aligned trajectories.
pub fn charge_transport_residual(geodesic: &Trajectory, kepler: &Trajectory) -> Result<f64> {
    check_alignment(geodesic, kepler)?;
    Ok(geodesic
        .samples
        .iter()
        .zip(&kepler.samples)
        .flat_map(|(g, k)| g.charges.iter().zip(&k.charges).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max))
}

fn check_alignment(geodesic: &Trajectory, kepler: &Trajectory) -> Result<()> {
    if geodesic.samples.len() != kepler.samples.len() {
        return Err(Error::Alignment(format!(
            "{} geodesic samples vs {} Kepler samples",
            geodesic.samples.len(),
            kepler.samples.len()
        )));
    }
    if let Some(i) = geodesic.samples.iter().zip(&kepler.samples).position(|(g, k)| g.point != k.point) {
        return Err(Error::Alignment(format!("sample {i} is not related by psi")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoFormReport {
    /// Max `|H − E|` along the Kepler trajectory.
    pub kepler_energy_residual: f64,
    /// Max `|G − C|` along the geodesic trajectory.
    pub geodesic_energy_residual: f64,
    /// Max `|dτ/dλ − √C |x̄||` over samples.
    pub time_rate_residual: f64,
    pub passed: bool,
}

/// Check `dH ∧ dτ = dG ∧ dλ` on a sampled flow through its consequences:
/// `H ≡ E` and `G ≡ C` on the two trajectories, and `dτ/dλ = √C |x̄|`.
pub fn two_form_correspondence(
    geodesic: &Trajectory,
    kepler: &Trajectory,
    dict: &DualityDictionary,
) -> Result<TwoFormReport> {
    check_alignment(geodesic, kepler)?;
    let kepler_energy_residual = kepler.samples.iter().map(|s| (s.energy - dict.energy).abs()).fold(0.0, f64::max);
    let geodesic_energy_residual = geodesic.samples.iter().map(|s| (s.energy - dict.c).abs()).fold(0.0, f64::max);
    let lambdas = geodesic.times();
    let taus: Vec<[f64; 6]> = kepler.samples.iter().map(|s| [s.t, 0., 0., 0., 0., 0.]).collect();
    let root = dict.c.sqrt();
    let time_rate_residual = sampled_derivatives(&lambdas, &taus)
        .into_iter()
        .map(|(i, d)| (d[0] - root * geodesic.samples[i].point.position.norm()).abs())
        .fold(0.0, f64::max);
    let passed = kepler_energy_residual <= ENERGY_RESIDUAL_TOLERANCE
        && geodesic_energy_residual <= ENERGY_RESIDUAL_TOLERANCE
        && time_rate_residual <= TIME_RATE_TOLERANCE;
    Ok(TwoFormReport { kepler_energy_residual, geodesic_energy_residual, time_rate_residual, passed })
}

/// Evaluate the transitive charge `D` at the natural-chart preimage of a Kepler
/// point with `k` replaced by `−H`. The result equals the Runge–Lenz vector `A`.
pub fn substitute_k_with_minus_h(pt_kepler: &PhasePoint, params: &KeplerParams) -> Result<Vec3> {
    let h = kepler_energy(pt_kepler, params)?;
    let natural = transformed_to_natural(pt_kepler)?;
    let d = Vec3::from_fn(|i, _| transitive_killing_field(i, &natural.position, -h).dot(&natural.momentum));
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::{integrate, IntegratorConfig, System};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    fn pt(x: [f64; 3], p: [f64; 3]) -> PhasePoint {
        PhasePoint::from_arrays(x, p)
    }

    #[test]
    fn dictionary_examples() {
        let d = make_dictionary(1.0, 1.0, Branch::Attractive).unwrap();
        assert_eq!((d.energy, d.alpha), (-1.0, 2.0));
        let d = make_dictionary(0.0, 0.25, Branch::Attractive).unwrap();
        assert_eq!((d.energy, d.alpha), (0.0, 1.0));
        assert!(matches!(make_dictionary(1.0, 0.0, Branch::Attractive), Err(Error::Excluded(_))));
        assert!(matches!(make_dictionary(1.0, 1.0, Branch::Repulsive), Err(Error::Inconsistent(_))));
        assert!(matches!(make_dictionary(0.0, 1.0, Branch::Repulsive), Err(Error::Inconsistent(_))));
        let d = make_dictionary(-1.0, 4.0, Branch::Repulsive).unwrap();
        assert_eq!((d.energy, d.alpha), (1.0, -4.0));
    }

    #[test]
    fn dictionary_round_trips_through_kepler() {
        for (k, c, b) in [(1.0, 0.3, Branch::Attractive), (-2.0, 1.7, Branch::Repulsive), (-0.5, 2.0, Branch::Attractive)] {
            let d = make_dictionary(k, c, b).unwrap();
            let back = DualityDictionary::from_kepler(d.energy, d.alpha).unwrap();
            assert_eq!(back.k, k);
            assert_abs_diff_eq!(back.c, c, epsilon = 1e-15);
            assert_eq!(back.branch, b);
        }
    }

    #[test]
    fn psi_is_identity_off_the_origin() {
        let z = pt([0.1, 0.2, 0.3], [1., 2., 3.]);
        assert_eq!(psi_map(&z).unwrap(), z);
        assert_eq!(psi_inverse(&psi_map(&z).unwrap()).unwrap(), z);
        assert!(psi_map(&pt([0.; 3], [1., 0., 0.])).is_err());
    }

    #[test]
    fn proportionality_examples() {
        let s = ChartedGeodesicState::transformed(pt([2., 0., 0.], [0.; 3]), 1.0).unwrap();
        let r = vector_field_proportionality(&s).unwrap();
        assert_eq!(r.alpha, 2.0);
        assert_eq!(r.factor, 2.0);
        assert_abs_diff_eq!(r.kepler_field.dp, Vec3::new(-0.5, 0., 0.), epsilon = 1e-15);
        assert_abs_diff_eq!(r.geodesic_field.dp, Vec3::new(-1., 0., 0.), epsilon = 1e-15);
        assert!(r.residual < 1e-15);

        let s = ChartedGeodesicState::transformed(pt([1., 0., 0.], [0., 1., 0.]), 1.0).unwrap();
        assert!(vector_field_proportionality(&s).unwrap().residual < 1e-12);

        let zero = ChartedGeodesicState::transformed(pt([1., 0., 0.], [2., 0., 0.]), -2.0).unwrap();
        assert!(matches!(vector_field_proportionality(&zero), Err(Error::Excluded(_))));
    }

    #[test]
    fn simpson_examples() {
        let t: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let (tau, est) = cumulative_simpson(&t, &vec![2.5; 11]).unwrap();
        for (ti, taui) in t.iter().zip(&tau) {
            assert_abs_diff_eq!(*taui, 2.5 * ti, epsilon = 1e-15);
        }
        assert!(est < 1e-15);

        let t = [0.0, 0.5, 1.0];
        let (tau, _) = cumulative_simpson(&t, &[1.0, 1.5, 2.0]).unwrap();
        assert_abs_diff_eq!(tau[2], 1.5, epsilon = 1e-15);

        // uneven grid, exact for quadratics at every node
        let t = [0.0, 0.1, 0.35, 0.4, 0.8, 1.0];
        let f: Vec<f64> = t.iter().map(|s| 1.0 + s + 3.0 * s * s).collect();
        let (tau, _) = cumulative_simpson(&t, &f).unwrap();
        for (s, v) in t.iter().zip(&tau) {
            assert_abs_diff_eq!(*v, s + 0.5 * s * s + s * s * s, epsilon = 1e-14);
        }
        assert!(cumulative_simpson(&[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn substitution_examples() {
        let a = KeplerParams::new(1.0).unwrap();
        let z = pt([1., 0., 0.], [0., 1., 0.]);
        assert_abs_diff_eq!(substitute_k_with_minus_h(&z, &a).unwrap(), Vec3::zeros(), epsilon = 1e-15);
        let z = pt([1., 0., 0.], [0., 1.1, 0.]);
        let d = substitute_k_with_minus_h(&z, &a).unwrap();
        let want = Vec3::new(0.21 / SQRT_2, 0., 0.);
        assert_abs_diff_eq!(d, want, epsilon = 1e-14);
        assert_abs_diff_eq!(d, kepler_constants(&z, &a).unwrap().runge_lenz, epsilon = 1e-14);
    }

    fn circular_geodesic(samples: usize) -> Trajectory {
        integrate(
            System::Geodesic { k: 1.0, chart: Chart::Transformed },
            &pt([1., 0., 0.], [0., 1., 0.]),
            6.0,
            &IntegratorConfig::with_tolerance(1e-12).samples(samples),
        )
        .unwrap()
    }

    #[test]
    fn map_trajectory_gives_energy_minus_k() {
        let geo = circular_geodesic(4001);
        assert_eq!(geo.first().energy, 0.5625);
        let dict = make_dictionary(1.0, 0.5625, Branch::Attractive).unwrap();
        assert_eq!(dict.alpha, 1.5);
        let kep = map_trajectory(&geo, &dict).unwrap();
        assert_eq!(kep.parameter, 1.5);
        assert_eq!(kep.first().t, 0.0);
        for s in &kep.samples {
            assert!((s.energy + 1.0).abs() < 1e-9);
        }
        assert!(charge_transport_residual(&geo, &kep).unwrap() < 1e-9);
        let rep = two_form_correspondence(&geo, &kep, &dict).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn mapped_orbit_solves_kepler_equations() {
        let geo = circular_geodesic(4001);
        let dict = make_dictionary(1.0, 0.5625, Branch::Attractive).unwrap();
        let kep = map_trajectory(&geo, &dict).unwrap();
        let res = kepler_eom_residual(&kep, &dict.kepler_params().unwrap()).unwrap();
        assert!(res < 1e-6, "{res}");
    }

    #[test]
    fn radial_start_has_energy_minus_k() {
        let geo = integrate(
            System::Geodesic { k: 1.0, chart: Chart::Transformed },
            &pt([2., 0., 0.], [0.; 3]),
            0.5,
            &IntegratorConfig::with_tolerance(1e-12).samples(2001),
        )
        .unwrap();
        let dict = make_dictionary(1.0, 1.0, Branch::Attractive).unwrap();
        let kep = map_trajectory(&geo, &dict).unwrap();
        assert_eq!(kep.parameter, 2.0);
        assert_eq!(kep.first().energy, -1.0);
    }

    #[test]
    fn flat_geodesic_is_a_parabolic_orbit() {
        let geo = integrate(
            System::Geodesic { k: 0.0, chart: Chart::Transformed },
            &pt([1., 0., 0.], [0., SQRT_2, 0.]),
            4.0,
            &IntegratorConfig::with_tolerance(1e-12).samples(4001),
        )
        .unwrap();
        assert_abs_diff_eq!(geo.first().energy, 0.25, epsilon = 1e-15);
        let dict = make_dictionary(0.0, 0.25, Branch::Attractive).unwrap();
        let kep = map_trajectory(&geo, &dict).unwrap();
        let rep = two_form_correspondence(&geo, &kep, &dict).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(kep.samples.iter().all(|s| s.energy.abs() < 1e-9));
    }

    #[test]
    fn wrong_dictionary_fails_by_two_k() {
        let geo = circular_geodesic(2001);
        let dict = make_dictionary(1.0, 0.5625, Branch::Attractive).unwrap();
        let kep = map_trajectory(&geo, &dict).unwrap();
        let wrong = DualityDictionary { energy: 1.0, ..dict };
        let rep = two_form_correspondence(&geo, &kep, &wrong).unwrap();
        assert!(!rep.passed);
        assert_abs_diff_eq!(rep.kepler_energy_residual, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn map_trajectory_rejects_mismatches() {
        let geo = circular_geodesic(2001);
        let off = make_dictionary(1.0, 0.6, Branch::Attractive).unwrap();
        assert!(matches!(map_trajectory(&geo, &off), Err(Error::Inconsistent(_))));
        let other_k = make_dictionary(2.0, 0.5625, Branch::Attractive).unwrap();
        assert!(matches!(map_trajectory(&geo, &other_k), Err(Error::Inconsistent(_))));
        let mut drifting = geo.clone();
        drifting.samples[500].energy *= 1.0 + 1e-6;
        let dict = make_dictionary(1.0, 0.5625, Branch::Attractive).unwrap();
        assert!(matches!(map_trajectory(&drifting, &dict), Err(Error::InvalidInput(_))));
        let short = Trajectory { samples: geo.samples[..50].to_vec(), ..geo.clone() };
        let kep = map_trajectory(&geo, &dict).unwrap();
        assert!(matches!(two_form_correspondence(&short, &kep, &dict), Err(Error::Alignment(_))));
    }

    #[test]
    fn coarse_sampling_is_a_resolution_error() {
        let geo = integrate(
            System::Geodesic { k: 1.0, chart: Chart::Transformed },
            &pt([1., 0., 0.], [0., 1., 0.]),
            6.0,
            &IntegratorConfig::with_tolerance(1e-12).samples(9),
        )
        .unwrap();
        assert!(matches!(reparametrize_time(&geo, 0.5625), Err(Error::Resolution { .. })));
    }
}
