//! The Kepler problem `H = |p|²/2 − α/|x|` on `(R³ \ {0}) × R³`.
//!
//! Conserved quantities are the angular momentum `J = x × p` and the
//! Runge–Lenz vector in the normalization
//!
//! ```text
//! √2 A = x (|p|² − α/|x|) − p (x·p)
//! ```
//!
//! so that `{Aᵢ, Aⱼ} = H εᵢⱼₖ Jₖ`. The textbook vector `p × J − α x/|x|` is
//! [`KeplerInvariants::textbook_runge_lenz`].

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::algebra::{bracket_report, Algebra, BracketReport};
use crate::error::{Error, Result};
use crate::phase::{Gradient, PhasePoint, ScalarField, Tangent, Vec3};

/// Force-strength parameter `α`; positive is attractive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeplerParams {
    alpha: f64,
}

impl KeplerParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidInput(format!("alpha must be finite, got {alpha}")));
        }
        if alpha == 0.0 {
            return Err(Error::Excluded("alpha = 2 sqrt(C) = 0".into()));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_attractive(&self) -> bool {
        self.alpha > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KeplerInvariants {
    pub energy: f64,
    pub angular_momentum: Vec3,
    pub runge_lenz: Vec3,
}

impl KeplerInvariants {
    /// `√2 A = p × J − α x/|x|`.
    pub fn textbook_runge_lenz(&self) -> Vec3 {
        self.runge_lenz * SQRT_2
    }

    /// `[J₁, J₂, J₃, A₁, A₂, A₃]`.
    pub fn charges(&self) -> [f64; 6] {
        let (j, a) = (&self.angular_momentum, &self.runge_lenz);
        [j[0], j[1], j[2], a[0], a[1], a[2]]
    }
}

fn radius(pt: &PhasePoint) -> Result<f64> {
    let r = pt.position.norm();
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(Error::Singularity { radius: r })
    }
}

pub fn kepler_energy(pt: &PhasePoint, params: &KeplerParams) -> Result<f64> {
    let r = radius(pt)?;
    Ok(0.5 * pt.momentum.norm_squared() - params.alpha / r)
}

/// `dx = p`, `dp = −α x/|x|³`.
pub fn kepler_vector_field(pt: &PhasePoint, params: &KeplerParams) -> Result<Tangent> {
    let r = radius(pt)?;
    Ok(Tangent::new(pt.momentum, -params.alpha / (r * r * r) * pt.position))
}

pub fn kepler_constants(pt: &PhasePoint, params: &KeplerParams) -> Result<KeplerInvariants> {
    let r = radius(pt)?;
    let (x, p) = (&pt.position, &pt.momentum);
    let p2 = p.norm_squared();
    Ok(KeplerInvariants {
        energy: 0.5 * p2 - params.alpha / r,
        angular_momentum: x.cross(p),
        runge_lenz: (x * (p2 - params.alpha / r) - p * x.dot(p)) / SQRT_2,
    })
}

/// One of the Kepler phase-space functions with a closed-form gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KeplerQuantity {
    Energy,
    AngularMomentum(usize),
    RungeLenz(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeplerField {
    pub params: KeplerParams,
    pub quantity: KeplerQuantity,
}

impl KeplerField {
    pub fn new(params: KeplerParams, quantity: KeplerQuantity) -> Self {
        Self { params, quantity }
    }

    pub fn energy(params: KeplerParams) -> Self {
        Self::new(params, KeplerQuantity::Energy)
    }

    /// `[J₁, J₂, J₃, A₁, A₂, A₃]` as fields.
    pub fn charges(params: KeplerParams) -> [KeplerField; 6] {
        use KeplerQuantity::*;
        [
            AngularMomentum(0),
            AngularMomentum(1),
            AngularMomentum(2),
            RungeLenz(0),
            RungeLenz(1),
            RungeLenz(2),
        ]
        .map(|q| Self::new(params, q))
    }
}

pub const KEPLER_CHARGE_NAMES: [&str; 6] = ["J1", "J2", "J3", "A1", "A2", "A3"];

fn unit(i: usize) -> Vec3 {
    let mut e = Vec3::zeros();
    e[i] = 1.0;
    e
}

/// Gradient of `Jᵢ = (x × p)ᵢ`: `∂/∂x = p × eᵢ`, `∂/∂p = eᵢ × x`.
pub(crate) fn angular_momentum_gradient(i: usize, pt: &PhasePoint) -> Gradient {
    let e = unit(i);
    Gradient::new(pt.momentum.cross(&e), e.cross(&pt.position))
}

impl ScalarField for KeplerField {
    fn value(&self, at: &PhasePoint) -> Result<f64> {
        let inv = kepler_constants(at, &self.params)?;
        Ok(match self.quantity {
            KeplerQuantity::Energy => inv.energy,
            KeplerQuantity::AngularMomentum(i) => inv.angular_momentum[i],
            KeplerQuantity::RungeLenz(i) => inv.runge_lenz[i],
        })
    }

    fn gradient(&self, at: &PhasePoint) -> Result<Gradient> {
        let r = radius(at)?;
        let alpha = self.params.alpha;
        let (x, p) = (&at.position, &at.momentum);
        Ok(match self.quantity {
            KeplerQuantity::Energy => Gradient::new(alpha / (r * r * r) * x, *p),
            KeplerQuantity::AngularMomentum(i) => angular_momentum_gradient(i, at),
            KeplerQuantity::RungeLenz(i) => {
                let e = unit(i);
                let p2 = p.norm_squared();
                let xp = x.dot(p);
                let dx = e * (p2 - alpha / r) + x * (x[i] * alpha / (r * r * r)) - p * p[i];
                let dp = p * (2.0 * x[i]) - e * xp - x * p[i];
                Gradient::new(dx / SQRT_2, dp / SQRT_2)
            }
        })
    }
}

/// Brackets of `J`, `A` against `{J,J} = −εJ`, `{J,A} = −εA`, `{A,A} = HεJ`.
///
/// The label is taken from the sign of `H` at the point, with energies
/// within a few ulps of the point's energy scale treated as zero.
pub fn kepler_bracket_table(pt: &PhasePoint, params: &KeplerParams) -> Result<BracketReport> {
    let r = radius(pt)?;
    let energy = kepler_energy(pt, params)?;
    let scale = 0.5 * pt.momentum.norm_squared() + params.alpha.abs() / r;
    let algebra = Algebra::from_structure_parameter(-energy, 64.0 * f64::EPSILON * scale);
    bracket_report(
        "kepler",
        KEPLER_CHARGE_NAMES,
        &KeplerField::charges(*params),
        -energy,
        algebra,
        pt,
    )
}
