//! Geodesic motion on a 3-space of constant curvature `k`.
//!
//! In stereographic coordinates the metric is `(1 + k|x|²/4)⁻² δᵢⱼ` and the
//! geodesic Hamiltonian is `G = ½ (1 + k|x|²/4)² |p|²`. The six Killing
//! charges are `L = x × p` and `D = (1 − k|x|²/4) p + (k/2) x (x·p)`.
//!
//! The transformed chart is the image of [`crate::maps::natural_to_transformed`],
//! where `G = ¼ (k + |p̄|²/2)² |x̄|²` and the flow has Kepler form up to the
//! factor `√G |x̄|`. Writing `s = k + |p̄|²/2`, the printed closed forms use
//! `2√G/|x̄| = |s|`; on the branch `s < 0` (only reachable for `k < 0`) the
//! same formulas hold with `α = −2√G`. [`TransformedBranch`] carries that sign.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::algebra::{bracket_report, classify_curvature, BracketReport};
use crate::error::{Error, Result};
use crate::kepler::angular_momentum_gradient;
use crate::phase::{Gradient, PhasePoint, ScalarField, Tangent, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    /// Stereographic coordinates `(x, p)`.
    Natural,
    /// Inverted-and-swapped coordinates `(x̄, p̄)`.
    Transformed,
}

/// A geodesic phase point tagged with its chart and curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartedGeodesicState {
    pub point: PhasePoint,
    pub chart: Chart,
    pub k: f64,
}

impl ChartedGeodesicState {
    /// Validates the chart domain: the open conformal ball for a natural
    /// chart with `k < 0`, `x̄ ≠ 0` for the transformed chart.
    pub fn new(point: PhasePoint, chart: Chart, k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidInput(format!("curvature must be finite, got {k}")));
        }
        let state = Self { point, chart, k };
        state.check_domain()?;
        Ok(state)
    }

    pub fn natural(point: PhasePoint, k: f64) -> Result<Self> {
        Self::new(point, Chart::Natural, k)
    }

    pub fn transformed(point: PhasePoint, k: f64) -> Result<Self> {
        Self::new(point, Chart::Transformed, k)
    }

    pub fn check_domain(&self) -> Result<()> {
        match self.chart {
            Chart::Natural => conformal_factor(&self.point.position, self.k).map(|_| ()),
            Chart::Transformed => transformed_radius(&self.point).map(|_| ()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeodesicInvariants {
    pub energy: f64,
    pub rotational: Vec3,
    pub transitive: Vec3,
}

impl GeodesicInvariants {
    /// `[L₁, L₂, L₃, D₁, D₂, D₃]`.
    pub fn charges(&self) -> [f64; 6] {
        let (l, d) = (&self.rotational, &self.transitive);
        [l[0], l[1], l[2], d[0], d[1], d[2]]
    }
}

/// `1 + k|x|²/4`; the metric is its inverse square times the flat metric.
pub fn conformal_factor(x: &Vec3, k: f64) -> Result<f64> {
    let f = 1.0 + 0.25 * k * x.norm_squared();
    if f > 0.0 && f.is_finite() {
        Ok(f)
    } else {
        Err(Error::ChartBoundary { k, factor: f })
    }
}

fn transformed_radius(pt: &PhasePoint) -> Result<f64> {
    let r = pt.position.norm();
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Origin { what: "transformed chart" })
    }
}

/// Sign of `s = k + |p̄|²/2` at a transformed-chart point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformedBranch {
    /// `s >= 0`: Kepler form with `α = +2√G`.
    Attractive,
    /// `s < 0`: Kepler form with `α = −2√G`.
    Repulsive,
}

impl TransformedBranch {
    pub fn sign(&self) -> f64 {
        match self {
            TransformedBranch::Attractive => 1.0,
            TransformedBranch::Repulsive => -1.0,
        }
    }
}

/// `s = k + |p̄|²/2`.
fn momentum_shift(pt: &PhasePoint, k: f64) -> f64 {
    k + 0.5 * pt.momentum.norm_squared()
}

pub fn transformed_branch(pt: &PhasePoint, k: f64) -> TransformedBranch {
    if momentum_shift(pt, k) >= 0.0 {
        TransformedBranch::Attractive
    } else {
        TransformedBranch::Repulsive
    }
}

/// Kepler coupling `α = ±2√G` matching a transformed-chart state.
pub fn effective_alpha(state: &ChartedGeodesicState) -> Result<f64> {
    let g = geodesic_energy(state)?;
    Ok(transformed_branch(&state.point, state.k).sign() * 2.0 * g.sqrt())
}

/// Residual of `−k = |p̄|²/2 − α/|x̄|` with `α = ±2√G` chosen by branch.
pub fn kepler_form_residual(state: &ChartedGeodesicState) -> Result<(TransformedBranch, f64)> {
    if state.chart != Chart::Transformed {
        return Err(Error::InvalidInput("kepler form requires the transformed chart".into()));
    }
    let r = transformed_radius(&state.point)?;
    let branch = transformed_branch(&state.point, state.k);
    let alpha = effective_alpha(state)?;
    let lhs = 0.5 * state.point.momentum.norm_squared() - alpha / r;
    Ok((branch, (lhs + state.k).abs()))
}

pub fn geodesic_energy(state: &ChartedGeodesicState) -> Result<f64> {
    let (x, p) = (&state.point.position, &state.point.momentum);
    match state.chart {
        Chart::Natural => {
            let f = conformal_factor(x, state.k)?;
            Ok(0.5 * f * f * p.norm_squared())
        }
        Chart::Transformed => {
            let r = transformed_radius(&state.point)?;
            let s = momentum_shift(&state.point, state.k);
            Ok(0.25 * s * s * r * r)
        }
    }
}

/// Hamiltonian vector field of `G` in the state's chart.
///
/// In the transformed chart the factored Kepler form `√G|x̄| · X_H(α = 2√G)`
/// is used when `G > 0` (with the branch sign on `s < 0`); at `G = 0` the
/// gradient form is returned.
pub fn geodesic_vector_field(state: &ChartedGeodesicState) -> Result<Tangent> {
    let (x, p) = (&state.point.position, &state.point.momentum);
    match state.chart {
        Chart::Natural => {
            let f = conformal_factor(x, state.k)?;
            Ok(Tangent::new(f * f * p, -(0.5 * state.k * f * p.norm_squared()) * x))
        }
        Chart::Transformed => {
            let r = transformed_radius(&state.point)?;
            let g = geodesic_energy(state)?;
            if g > 0.0 {
                let sign = transformed_branch(&state.point, state.k).sign();
                let root = g.sqrt();
                let factor = sign * root * r;
                let alpha = sign * 2.0 * root;
                Ok(Tangent::new(factor * p, (-factor * alpha / (r * r * r)) * x))
            } else {
                hamiltonian_field_of_energy(state)
            }
        }
    }
}

fn hamiltonian_field_of_energy(state: &ChartedGeodesicState) -> Result<Tangent> {
    let g = GeodesicField::energy(state.k, state.chart).gradient(&state.point)?;
    Ok(Tangent::new(g.wrt_momentum, -g.wrt_position))
}

pub fn killing_charges(state: &ChartedGeodesicState) -> Result<GeodesicInvariants> {
    let (x, p) = (&state.point.position, &state.point.momentum);
    let energy = geodesic_energy(state)?;
    let transitive = match state.chart {
        Chart::Natural => {
            let r2 = x.norm_squared();
            p * (1.0 - 0.25 * state.k * r2) + x * (0.5 * state.k * x.dot(p))
        }
        Chart::Transformed => {
            let r = transformed_radius(&state.point)?;
            let alpha = effective_alpha(state)?;
            (x * (p.norm_squared() - alpha / r) - p * x.dot(p)) / SQRT_2
        }
    };
    Ok(GeodesicInvariants { energy, rotational: x.cross(p), transitive })
}

/// Rotational Killing field `Rᵢ = εᵢⱼₖ xʲ ∂/∂xᵏ` as a vector on configuration space.
pub fn rotation_killing_field(i: usize, x: &Vec3) -> Vec3 {
    let mut e = Vec3::zeros();
    e[i] = 1.0;
    e.cross(x)
}

/// Transitive Killing field `Pᵢ = (1 − k|x|²/4) ∂/∂xⁱ + (k/2) xⁱ xʲ ∂/∂xʲ`.
pub fn transitive_killing_field(i: usize, x: &Vec3, k: f64) -> Vec3 {
    let mut e = Vec3::zeros();
    e[i] = 1.0;
    e * (1.0 - 0.25 * k * x.norm_squared()) + x * (0.5 * k * x[i])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeodesicQuantity {
    Energy,
    Rotational(usize),
    Transitive(usize),
}

/// A geodesic phase-space function with closed-form gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicField {
    pub k: f64,
    pub chart: Chart,
    pub quantity: GeodesicQuantity,
}

pub const GEODESIC_CHARGE_NAMES: [&str; 6] = ["L1", "L2", "L3", "D1", "D2", "D3"];

impl GeodesicField {
    pub fn new(k: f64, chart: Chart, quantity: GeodesicQuantity) -> Self {
        Self { k, chart, quantity }
    }

    pub fn energy(k: f64, chart: Chart) -> Self {
        Self::new(k, chart, GeodesicQuantity::Energy)
    }

    /// `[L₁, L₂, L₃, D₁, D₂, D₃]` as fields.
    pub fn charges(k: f64, chart: Chart) -> [GeodesicField; 6] {
        use GeodesicQuantity::*;
        [Rotational(0), Rotational(1), Rotational(2), Transitive(0), Transitive(1), Transitive(2)]
            .map(|q| Self::new(k, chart, q))
    }

    fn state(&self, at: &PhasePoint) -> Result<ChartedGeodesicState> {
        ChartedGeodesicState::new(*at, self.chart, self.k)
    }
}

impl ScalarField for GeodesicField {
    fn value(&self, at: &PhasePoint) -> Result<f64> {
        let inv = killing_charges(&self.state(at)?)?;
        Ok(match self.quantity {
            GeodesicQuantity::Energy => inv.energy,
            GeodesicQuantity::Rotational(i) => inv.rotational[i],
            GeodesicQuantity::Transitive(i) => inv.transitive[i],
        })
    }

    fn gradient(&self, at: &PhasePoint) -> Result<Gradient> {
        self.state(at)?.check_domain()?;
        let k = self.k;
        let (x, p) = (&at.position, &at.momentum);
        let mut e = Vec3::zeros();
        Ok(match (self.chart, self.quantity) {
            (_, GeodesicQuantity::Rotational(i)) => angular_momentum_gradient(i, at),
            (Chart::Natural, GeodesicQuantity::Energy) => {
                let f = 1.0 + 0.25 * k * x.norm_squared();
                Gradient::new(x * (0.5 * k * f * p.norm_squared()), p * (f * f))
            }
            (Chart::Natural, GeodesicQuantity::Transitive(i)) => {
                e[i] = 1.0;
                let xp = x.dot(p);
                let dx = (x * p[i] - e * xp - p * x[i]) * (-0.5 * k);
                let dp = e * (1.0 - 0.25 * k * x.norm_squared()) + x * (0.5 * k * x[i]);
                Gradient::new(dx, dp)
            }
            (Chart::Transformed, GeodesicQuantity::Energy) => {
                let s = momentum_shift(at, k);
                Gradient::new(x * (0.5 * s * s), p * (0.5 * s * x.norm_squared()))
            }
            // √2 Dᵢ = x̄ⁱ(|p̄|²/2 − k) − p̄ᵢ(x̄·p̄) on either branch
            (Chart::Transformed, GeodesicQuantity::Transitive(i)) => {
                e[i] = 1.0;
                let xp = x.dot(p);
                let dx = e * (0.5 * p.norm_squared() - k) - p * p[i];
                let dp = p * x[i] - e * xp - x * p[i];
                Gradient::new(dx / SQRT_2, dp / SQRT_2)
            }
        })
    }
}

/// Brackets of `L`, `D` against `{L,L} = −εL`, `{L,D} = −εD`, `{D,D} = −kεL`.
pub fn curvature_bracket_table(state: &ChartedGeodesicState) -> Result<BracketReport> {
    state.check_domain()?;
    let system = match state.chart {
        Chart::Natural => "geodesic-natural",
        Chart::Transformed => "geodesic-transformed",
    };
    bracket_report(
        system,
        GEODESIC_CHARGE_NAMES,
        &GeodesicField::charges(state.k, state.chart),
        state.k,
        classify_curvature(state.k),
        &state.point,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Algebra;
    use crate::phase::{hamiltonian_vector_field, numeric_gradient};
    use approx::assert_abs_diff_eq;

    fn pt(x: [f64; 3], p: [f64; 3]) -> PhasePoint {
        PhasePoint::from_arrays(x, p)
    }

    #[test]
    fn conformal_factor_examples() {
        assert_eq!(conformal_factor(&Vec3::new(3.0, -2.0, 1.0), 0.0).unwrap(), 1.0);
        assert_eq!(conformal_factor(&Vec3::new(1.0, 0.0, 0.0), 4.0).unwrap(), 2.0);
        assert!(conformal_factor(&Vec3::new(0.999, 0.0, 0.0), -4.0).unwrap() > 0.0);
        assert!(matches!(
            conformal_factor(&Vec3::new(1.0, 0.0, 0.0), -4.0),
            Err(Error::ChartBoundary { .. })
        ));
    }

    #[test]
    fn chart_domains() {
        assert!(ChartedGeodesicState::natural(pt([2.5, 0., 0.], [0.; 3]), -1.0).is_err());
        assert!(ChartedGeodesicState::natural(pt([1e6, 0., 0.], [0.; 3]), 1.0).is_ok());
        assert!(matches!(
            ChartedGeodesicState::transformed(pt([0.; 3], [1., 0., 0.]), 1.0),
            Err(Error::Origin { .. })
        ));
    }

    #[test]
    fn energy_examples() {
        let s = ChartedGeodesicState::natural(pt([5., -1., 2.], [1., 0., 0.]), 0.0).unwrap();
        assert_eq!(geodesic_energy(&s).unwrap(), 0.5);
        let s = ChartedGeodesicState::natural(pt([1., 0., 0.], [0., 1., 0.]), 4.0).unwrap();
        assert_eq!(geodesic_energy(&s).unwrap(), 2.0);
        let s = ChartedGeodesicState::transformed(pt([1., 0., 0.], [0., 1., 0.]), 1.0).unwrap();
        assert_eq!(geodesic_energy(&s).unwrap(), 0.5625);
    }

    #[test]
    fn vector_field_examples() {
        let s = ChartedGeodesicState::natural(pt([1., 2., 3.], [0.5, -1., 2.]), 0.0).unwrap();
        let v = geodesic_vector_field(&s).unwrap();
        assert_eq!(v.dx, s.point.momentum);
        assert_eq!(v.dp, Vec3::zeros());

        let s = ChartedGeodesicState::natural(pt([0.; 3], [0.5, -1., 2.]), 3.0).unwrap();
        let v = geodesic_vector_field(&s).unwrap();
        assert_eq!(v.dx, s.point.momentum);
        assert_abs_diff_eq!(v.dp.norm(), 0.0);

        let s = ChartedGeodesicState::transformed(pt([2., 0., 0.], [0.; 3]), 1.0).unwrap();
        assert_eq!(geodesic_energy(&s).unwrap(), 1.0);
        let v = geodesic_vector_field(&s).unwrap();
        assert_eq!(v.dx, Vec3::zeros());
        assert_abs_diff_eq!(v.dp, Vec3::new(-1., 0., 0.), epsilon = 1e-15);
        let generic = hamiltonian_vector_field(&GeodesicField::energy(1.0, Chart::Transformed), &s.point).unwrap();
        assert!(generic.max_diff(&v) < 1e-15);
    }

    #[test]
    fn factored_field_matches_gradient_field_on_both_branches() {
        for (k, z) in [
            (1.0, pt([0.3, -0.7, 1.2], [0.4, 0.2, -1.1])),
            (-1.0, pt([0.3, -0.7, 1.2], [0.4, 1.2, -1.1])),
            (-2.0, pt([0.3, -0.7, 1.2], [0.4, 0.2, -0.5])),
        ] {
            let s = ChartedGeodesicState::transformed(z, k).unwrap();
            let factored = geodesic_vector_field(&s).unwrap();
            let generic = hamiltonian_field_of_energy(&s).unwrap();
            assert!(factored.max_diff(&generic) < 1e-13, "k={k}");
        }
        let zero = ChartedGeodesicState::transformed(pt([1., 0., 0.], [2., 0., 0.]), -2.0).unwrap();
        assert_eq!(geodesic_energy(&zero).unwrap(), 0.0);
        assert!(geodesic_vector_field(&zero).is_ok());
    }

    #[test]
    fn charge_examples() {
        let s = ChartedGeodesicState::natural(pt([0.4, 1.0, -3.0], [3., 1., 2.]), 0.0).unwrap();
        assert_eq!(killing_charges(&s).unwrap().transitive, Vec3::new(3., 1., 2.));

        let s = ChartedGeodesicState::natural(pt([1., 0., 0.], [0., 1., 0.]), 2.0).unwrap();
        assert_eq!(killing_charges(&s).unwrap().transitive, Vec3::new(0., 0.5, 0.));

        let s = ChartedGeodesicState::transformed(pt([2., 0., 0.], [0.; 3]), 1.0).unwrap();
        let d = killing_charges(&s).unwrap().transitive;
        assert_abs_diff_eq!(d * SQRT_2, Vec3::new(-2., 0., 0.), epsilon = 1e-15);
    }

    #[test]
    fn killing_fields_generate_charges() {
        let k = -0.6;
        let z = pt([0.5, -0.3, 0.9], [1.2, 0.4, -0.7]);
        let s = ChartedGeodesicState::natural(z, k).unwrap();
        let inv = killing_charges(&s).unwrap();
        for i in 0..3 {
            let l = rotation_killing_field(i, &z.position).dot(&z.momentum);
            let d = transitive_killing_field(i, &z.position, k).dot(&z.momentum);
            assert_abs_diff_eq!(l, inv.rotational[i], epsilon = 1e-15);
            assert_abs_diff_eq!(d, inv.transitive[i], epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_form_gradients_match_differences() {
        for (chart, k, z) in [
            (Chart::Natural, 0.7, pt([0.7, 1.1, -0.5], [0.4, -0.8, 0.3])),
            (Chart::Natural, -0.4, pt([0.7, 1.1, -0.5], [0.4, -0.8, 0.3])),
            (Chart::Transformed, -1.0, pt([0.7, 1.1, -0.5], [1.4, -0.8, 0.9])),
            (Chart::Transformed, 1.0, pt([0.7, 1.1, -0.5], [0.4, -0.8, 0.3])),
        ] {
            let mut fields = vec![GeodesicField::energy(k, chart)];
            fields.extend(GeodesicField::charges(k, chart));
            for f in fields {
                let exact = f.gradient(&z).unwrap().to_array();
                let approx = numeric_gradient(&f, &z).unwrap().to_array();
                for (e, n) in exact.iter().zip(approx) {
                    assert!((e - n).abs() <= 1e-6 * e.abs().max(1.0), "{f:?}: {e} vs {n}");
                }
            }
        }
    }

    #[test]
    fn bracket_table_examples() {
        let s = ChartedGeodesicState::natural(pt([0.3, 0.1, -0.4], [1., 2., 0.5]), 0.0).unwrap();
        let t = curvature_bracket_table(&s).unwrap();
        assert_abs_diff_eq!(t.bracket(3, 4), 0.0, epsilon = 1e-15);
        assert_eq!(t.algebra, Algebra::Iso3);

        let s = ChartedGeodesicState::natural(pt([1., 0., 0.], [0., 1., 0.]), 1.0).unwrap();
        let t = curvature_bracket_table(&s).unwrap();
        assert_abs_diff_eq!(t.bracket(3, 4), -1.0, epsilon = 1e-15);
        assert_eq!(t.bracket(0, 0), 0.0);
        assert_eq!(t.algebra, Algebra::So4);
        assert!(t.max_residual < 1e-14);

        let s = ChartedGeodesicState::natural(pt([1., 0., 0.], [0., 1., 0.]), -1.0).unwrap();
        assert_eq!(curvature_bracket_table(&s).unwrap().algebra, Algebra::So31);
    }

    #[test]
    fn kepler_form_identity_on_both_branches() {
        let s = ChartedGeodesicState::transformed(pt([0.8, 0.2, -0.1], [0.3, 0.5, 0.4]), 1.0).unwrap();
        let (branch, res) = kepler_form_residual(&s).unwrap();
        assert_eq!(branch, TransformedBranch::Attractive);
        assert!(res < 1e-15);
        let s = ChartedGeodesicState::transformed(pt([0.8, 0.2, -0.1], [0.3, 0.5, 0.4]), -1.0).unwrap();
        let (branch, res) = kepler_form_residual(&s).unwrap();
        assert_eq!(branch, TransformedBranch::Repulsive);
        assert!(res < 1e-15);
    }
}
