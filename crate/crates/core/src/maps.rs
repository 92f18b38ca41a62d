//! Canonical transformations between the geodesic charts.
//!
//! `natural_to_transformed` is the inversion `x' = x/|x|²` with its cotangent
//! lift, followed by the swap `x̄ = p'/2√2`, `p̄ = −2√2 x'`. For `k > 0` the
//! scaled inversion `x ↦ 4x/(k|x|²)` is an isometry of the sphere fixing the
//! sphere `|x| = 2/√k`; it is used to switch between the two stereographic
//! sheets when regularizing collisions.

use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::phase::{PhaseMap, PhasePoint};

const TWO_SQRT_2: f64 = 2.0 * SQRT_2;

fn nonzero_position(pt: &PhasePoint, what: &'static str) -> Result<f64> {
    let r2 = pt.position.norm_squared();
    if r2 > 0.0 && r2.is_finite() {
        Ok(r2)
    } else {
        Err(Error::Origin { what })
    }
}

fn positive_curvature(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("antipodal isometry needs k > 0, got {k}")))
    }
}

/// `x' = x/|x|²`, `p' = |x|² p − 2x (x·p)`. An involution.
pub fn inversion(pt: &PhasePoint) -> Result<PhasePoint> {
    let r2 = nonzero_position(pt, "inversion")?;
    let (x, p) = (&pt.position, &pt.momentum);
    Ok(PhasePoint::new(x / r2, p * r2 - x * (2.0 * x.dot(p))))
}

/// `x̄ = p'/2√2`, `p̄ = −2√2 x'`.
pub fn swap(pt: &PhasePoint) -> Result<PhasePoint> {
    Ok(PhasePoint::new(pt.momentum / TWO_SQRT_2, pt.position * -TWO_SQRT_2))
}

/// Inverse of [`swap`]: `x' = −p̄/2√2`, `p' = 2√2 x̄`.
pub fn unswap(pt: &PhasePoint) -> Result<PhasePoint> {
    Ok(PhasePoint::new(pt.momentum / -TWO_SQRT_2, pt.position * TWO_SQRT_2))
}

/// `swap ∘ inversion`. Fails at `x = 0` and where the image has `x̄ = 0`.
pub fn natural_to_transformed(pt: &PhasePoint) -> Result<PhasePoint> {
    let image = swap(&inversion(pt)?)?;
    if image.position.norm_squared() > 0.0 {
        Ok(image)
    } else {
        Err(Error::Origin { what: "transformed chart image (p' = 0)" })
    }
}

/// `inversion ∘ unswap`. Fails where `p̄ = 0` (the excluded pole of the natural chart).
pub fn transformed_to_natural(pt: &PhasePoint) -> Result<PhasePoint> {
    inversion(&unswap(pt)?).map_err(|_| Error::Origin { what: "natural chart image (p̄ = 0)" })
}

/// Scaled inversion `x ↦ 4x/(k|x|²)` with momenta `(k|x|²/4) p − (k/2) x (x·p)`.
pub fn antipodal_isometry(pt: &PhasePoint, k: f64) -> Result<PhasePoint> {
    positive_curvature(k)?;
    let r2 = nonzero_position(pt, "antipodal isometry")?;
    let (x, p) = (&pt.position, &pt.momentum);
    Ok(PhasePoint::new(
        x * (4.0 / (k * r2)),
        p * (0.25 * k * r2) - x * (0.5 * k * x.dot(p)),
    ))
}

/// Transformed-chart coordinates of a point given in the antipodal sheet,
/// i.e. `swap ∘ inversion ∘ antipodal_isometry` extended continuously
/// through the sheet's origin. Fails only where `p = 0`.
pub fn antipodal_sheet_to_transformed(pt: &PhasePoint, k: f64) -> Result<PhasePoint> {
    positive_curvature(k)?;
    let primed = PhasePoint::new(pt.position * (0.25 * k), pt.momentum * (4.0 / k));
    let image = swap(&primed)?;
    if image.position.norm_squared() > 0.0 {
        Ok(image)
    } else {
        Err(Error::Origin { what: "transformed chart image (p = 0)" })
    }
}

/// Inverse of [`antipodal_sheet_to_transformed`].
pub fn transformed_to_antipodal_sheet(pt: &PhasePoint, k: f64) -> Result<PhasePoint> {
    positive_curvature(k)?;
    let primed = unswap(pt)?;
    Ok(PhasePoint::new(primed.position * (4.0 / k), primed.momentum * (0.25 * k)))
}

type MapFn = fn(&PhasePoint, f64) -> Result<PhasePoint>;

/// A named invertible phase-space map with a scalar parameter (curvature).
#[derive(Clone, Copy)]
pub struct CanonicalMap {
    pub name: &'static str,
    pub parameter: f64,
    forward: MapFn,
    inverse: MapFn,
}

impl std::fmt::Debug for CanonicalMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CanonicalMap")
            .field("name", &self.name)
            .field("parameter", &self.parameter)
            .finish()
    }
}

impl CanonicalMap {
    pub fn forward(&self, pt: &PhasePoint) -> Result<PhasePoint> {
        (self.forward)(pt, self.parameter)
    }

    pub fn inverse(&self, pt: &PhasePoint) -> Result<PhasePoint> {
        (self.inverse)(pt, self.parameter)
    }

    /// True when both the map and its inverse are defined at `pt`.
    pub fn in_domain(&self, pt: &PhasePoint) -> bool {
        self.forward(pt).and_then(|q| self.inverse(&q)).is_ok()
    }

    /// The inverse as a map in its own right.
    pub fn inverted(&self) -> CanonicalMap {
        CanonicalMap { name: self.name, parameter: self.parameter, forward: self.inverse, inverse: self.forward }
    }
}

impl PhaseMap for CanonicalMap {
    fn apply(&self, at: &PhasePoint) -> Result<PhasePoint> {
        self.forward(at)
    }
}

/// Every map used by the crate. The curvature only matters for `k > 0` maps,
/// which are omitted otherwise.
pub fn registered_maps(k: f64) -> Vec<CanonicalMap> {
    let mut maps = vec![
        CanonicalMap { name: "inversion", parameter: k, forward: |z, _| inversion(z), inverse: |z, _| inversion(z) },
        CanonicalMap { name: "swap", parameter: k, forward: |z, _| swap(z), inverse: |z, _| unswap(z) },
        CanonicalMap {
            name: "natural_to_transformed",
            parameter: k,
            forward: |z, _| natural_to_transformed(z),
            inverse: |z, _| transformed_to_natural(z),
        },
    ];
    if k > 0.0 {
        maps.push(CanonicalMap {
            name: "antipodal_isometry",
            parameter: k,
            forward: antipodal_isometry,
            inverse: antipodal_isometry,
        });
        maps.push(CanonicalMap {
            name: "antipodal_sheet_to_transformed",
            parameter: k,
            forward: antipodal_sheet_to_transformed,
            inverse: transformed_to_antipodal_sheet,
        });
    }
    maps
}
