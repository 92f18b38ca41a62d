//! Six-dimensional canonical phase space: points, tangent vectors, scalar
//! fields, the Poisson bracket and a numerical symplecticity check.
//!
//! Every phase space in this crate is `R³ × R³` with coordinates
//! `(x¹, x², x³, p₁, p₂, p₃)` and the constant two-form `ω = dpᵢ ∧ dxⁱ`.
//!
//! ## Sign convention
//!
//! The Hamiltonian vector field of `f` is fixed by `ω(X_f) = −df`, which gives
//!
//! ```text
//! X_f = (∂f/∂pᵢ) ∂/∂xⁱ − (∂f/∂xⁱ) ∂/∂pᵢ
//! ```
//!
//! and the bracket is `{f, g} = X_f(g) = Σᵢ ∂f/∂pᵢ ∂g/∂xⁱ − ∂f/∂xⁱ ∂g/∂pᵢ`.
//! With it `{x¹, p₁} = −1`, `{J₁, J₂} = −J₃`, and the structure constants of
//! the Kepler and geodesic charges take the negative-ε form reported by
//! [`crate::algebra::BracketReport`].

use nalgebra::Matrix6;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Name of the active bracket convention, recorded in every report.
pub const BRACKET_CONVENTION: &str = "{f,g} = X_f(g), omega(X_f) = -df, omega = dp^dx";

/// Coordinate labels in phase-space order.
pub const COORDINATE_NAMES: [&str; 6] = ["x1", "x2", "x3", "p1", "p2", "p3"];

/// Default relative step for numerical Jacobians, `eps^(1/4)`.
pub const JACOBIAN_STEP: f64 = 1.220_703_125e-4;

/// Default pass threshold of [`symplectic_check`].
pub const SYMPLECTIC_TOLERANCE: f64 = 1e-8;

/// Totally antisymmetric Levi-Civita symbol on `{0, 1, 2}`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// A canonical pair `(x, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub position: Vec3,
    pub momentum: Vec3,
}

impl PhasePoint {
    pub fn new(position: Vec3, momentum: Vec3) -> Self {
        Self { position, momentum }
    }

    pub fn from_arrays(x: [f64; 3], p: [f64; 3]) -> Self {
        Self::new(Vec3::from(x), Vec3::from(p))
    }

    pub fn from_slice(z: &[f64; 6]) -> Self {
        Self::new(Vec3::new(z[0], z[1], z[2]), Vec3::new(z[3], z[4], z[5]))
    }

    pub fn to_array(&self) -> [f64; 6] {
        let (x, p) = (&self.position, &self.momentum);
        [x[0], x[1], x[2], p[0], p[1], p[2]]
    }

    /// Euclidean distance in `R⁶`.
    pub fn distance(&self, other: &PhasePoint) -> f64 {
        ((self.position - other.position).norm_squared()
            + (self.momentum - other.momentum).norm_squared())
        .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }
}

/// A tangent vector `dx ∂/∂x + dp ∂/∂p`, e.g. a Hamiltonian vector field value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tangent {
    pub dx: Vec3,
    pub dp: Vec3,
}

impl Tangent {
    pub fn new(dx: Vec3, dp: Vec3) -> Self {
        Self { dx, dp }
    }

    pub fn scale(&self, s: f64) -> Tangent {
        Tangent::new(self.dx * s, self.dp * s)
    }

    /// Max-norm of `self − other`.
    pub fn max_diff(&self, other: &Tangent) -> f64 {
        (self.dx - other.dx).amax().max((self.dp - other.dp).amax())
    }

    pub fn max_norm(&self) -> f64 {
        self.dx.amax().max(self.dp.amax())
    }
}

/// Partial derivatives of a scalar field: `∂f/∂x` and `∂f/∂p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub wrt_position: Vec3,
    pub wrt_momentum: Vec3,
}

impl Gradient {
    pub fn new(wrt_position: Vec3, wrt_momentum: Vec3) -> Self {
        Self { wrt_position, wrt_momentum }
    }

    pub fn to_array(&self) -> [f64; 6] {
        let (a, b) = (&self.wrt_position, &self.wrt_momentum);
        [a[0], a[1], a[2], b[0], b[1], b[2]]
    }

    fn check_finite(&self) -> Result<()> {
        match self.to_array().iter().position(|v| !v.is_finite()) {
            Some(i) => Err(Error::NonFinite { coordinate: COORDINATE_NAMES[i] }),
            None => Ok(()),
        }
    }

    /// Contraction with a tangent vector, i.e. the directional derivative `X(f)`.
    pub fn contract(&self, v: &Tangent) -> f64 {
        self.wrt_position.dot(&v.dx) + self.wrt_momentum.dot(&v.dp)
    }
}

/// A real-valued function on phase space.
///
/// Fields with a closed-form gradient override [`ScalarField::gradient`];
/// everything else falls back to central differences.
pub trait ScalarField {
    fn value(&self, at: &PhasePoint) -> Result<f64>;

    fn gradient(&self, at: &PhasePoint) -> Result<Gradient> {
        numeric_gradient(self, at)
    }
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn value(&self, at: &PhasePoint) -> Result<f64> {
        (**self).value(at)
    }

    fn gradient(&self, at: &PhasePoint) -> Result<Gradient> {
        (**self).gradient(at)
    }
}

impl<F: ScalarField + ?Sized> ScalarField for Box<F> {
    fn value(&self, at: &PhasePoint) -> Result<f64> {
        (**self).value(at)
    }

    fn gradient(&self, at: &PhasePoint) -> Result<Gradient> {
        (**self).gradient(at)
    }
}

/// Central-difference gradient with step `max(1, |zⱼ|) · eps^(1/3)`.
pub fn numeric_gradient<F: ScalarField + ?Sized>(f: &F, at: &PhasePoint) -> Result<Gradient> {
    let base = at.to_array();
    let rel = f64::EPSILON.cbrt();
    let mut out = [0.0; 6];
    for (j, slot) in out.iter_mut().enumerate() {
        let h = rel * base[j].abs().max(1.0);
        let mut plus = base;
        let mut minus = base;
        plus[j] += h;
        minus[j] -= h;
        // the realised step differs from h by rounding
        let span = plus[j] - minus[j];
        let d = (f.value(&PhasePoint::from_slice(&plus))?
            - f.value(&PhasePoint::from_slice(&minus))?)
            / span;
        if !d.is_finite() {
            return Err(Error::NonFinite { coordinate: COORDINATE_NAMES[j] });
        }
        *slot = d;
    }
    Ok(Gradient::new(
        Vec3::new(out[0], out[1], out[2]),
        Vec3::new(out[3], out[4], out[5]),
    ))
}

/// Scalar field from a closure; gradients are always numeric.
pub struct FnField<F>(pub F);

impl<F> ScalarField for FnField<F>
where
    F: Fn(&PhasePoint) -> Result<f64>,
{
    fn value(&self, at: &PhasePoint) -> Result<f64> {
        (self.0)(at)
    }
}

/// Wraps a field and discards its closed-form gradient. Used as an oracle.
pub struct Numeric<F>(pub F);

impl<F: ScalarField> ScalarField for Numeric<F> {
    fn value(&self, at: &PhasePoint) -> Result<f64> {
        self.0.value(at)
    }
}

/// The field `{f, g}` itself, with a numeric gradient (for Jacobi-identity checks).
pub struct BracketField<F, G>(pub F, pub G);

impl<F: ScalarField, G: ScalarField> ScalarField for BracketField<F, G> {
    fn value(&self, at: &PhasePoint) -> Result<f64> {
        poisson_bracket(&self.0, &self.1, at)
    }
}

/// `{f, g} = Σᵢ ∂f/∂pᵢ ∂g/∂xⁱ − ∂f/∂xⁱ ∂g/∂pᵢ`.
pub fn poisson_bracket<F, G>(f: &F, g: &G, at: &PhasePoint) -> Result<f64>
where
    F: ScalarField + ?Sized,
    G: ScalarField + ?Sized,
{
    let df = f.gradient(at)?;
    df.check_finite()?;
    let dg = g.gradient(at)?;
    dg.check_finite()?;
    Ok(bracket_of_gradients(&df, &dg))
}

pub(crate) fn bracket_of_gradients(df: &Gradient, dg: &Gradient) -> f64 {
    df.wrt_momentum.dot(&dg.wrt_position) - df.wrt_position.dot(&dg.wrt_momentum)
}

/// `X_f`: `dx = ∂f/∂p`, `dp = −∂f/∂x`.
pub fn hamiltonian_vector_field<F>(f: &F, at: &PhasePoint) -> Result<Tangent>
where
    F: ScalarField + ?Sized,
{
    let df = f.gradient(at)?;
    df.check_finite()?;
    Ok(Tangent::new(df.wrt_momentum, -df.wrt_position))
}

/// `X(f)` for a given tangent vector.
pub fn derivative_along<F>(f: &F, v: &Tangent, at: &PhasePoint) -> Result<f64>
where
    F: ScalarField + ?Sized,
{
    let df = f.gradient(at)?;
    df.check_finite()?;
    Ok(df.contract(v))
}

/// A map of phase space into itself.
pub trait PhaseMap {
    fn apply(&self, at: &PhasePoint) -> Result<PhasePoint>;
}

impl<F> PhaseMap for F
where
    F: Fn(&PhasePoint) -> Result<PhasePoint>,
{
    fn apply(&self, at: &PhasePoint) -> Result<PhasePoint> {
        self(at)
    }
}

/// Outcome of [`symplectic_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymplecticReport {
    /// Max-norm of `Mᵀ Ω₀ M − Ω₀`.
    pub residual: f64,
    pub point: PhasePoint,
    pub tolerance: f64,
    pub passed: bool,
}

impl SymplecticReport {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.passed = self.residual < tolerance;
        self
    }
}

/// Constant canonical matrix in `(x, p)` ordering.
fn canonical_matrix() -> Matrix6<f64> {
    let mut omega = Matrix6::zeros();
    for i in 0..3 {
        omega[(i, i + 3)] = -1.0;
        omega[(i + 3, i)] = 1.0;
    }
    omega
}

/// Central-difference Jacobian of `map` at `at`; column `j` uses the step
/// `h · max(1, |zⱼ|)`.
pub fn numeric_jacobian<M: PhaseMap + ?Sized>(map: &M, at: &PhasePoint, h: f64) -> Result<Matrix6<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("finite-difference step must be positive, got {h}")));
    }
    let base = at.to_array();
    let mut jac = Matrix6::zeros();
    for j in 0..6 {
        let step = h * base[j].abs().max(1.0);
        let mut plus = base;
        let mut minus = base;
        plus[j] += step;
        minus[j] -= step;
        let span = plus[j] - minus[j];
        let fp = map.apply(&PhasePoint::from_slice(&plus))?.to_array();
        let fm = map.apply(&PhasePoint::from_slice(&minus))?.to_array();
        for i in 0..6 {
            jac[(i, j)] = (fp[i] - fm[i]) / span;
        }
    }
    Ok(jac)
}

/// Richardson extrapolation of [`numeric_jacobian`] from steps `h` and `h/2`,
/// fourth order in `h`.
pub fn refined_jacobian<M: PhaseMap + ?Sized>(map: &M, at: &PhasePoint, h: f64) -> Result<Matrix6<f64>> {
    let coarse = numeric_jacobian(map, at, h)?;
    let fine = numeric_jacobian(map, at, 0.5 * h)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

/// Numerical test of canonicity: residual of `Mᵀ Ω₀ M = Ω₀` for the Jacobian `M`.
pub fn symplectic_check<M: PhaseMap + ?Sized>(map: &M, at: &PhasePoint, h: f64) -> Result<SymplecticReport> {
    Ok(symplectic_report(&numeric_jacobian(map, at, h)?, at))
}

/// As [`symplectic_check`] with the Richardson-refined Jacobian.
pub fn refined_symplectic_check<M: PhaseMap + ?Sized>(map: &M, at: &PhasePoint, h: f64) -> Result<SymplecticReport> {
    Ok(symplectic_report(&refined_jacobian(map, at, h)?, at))
}

fn symplectic_report(jac: &Matrix6<f64>, at: &PhasePoint) -> SymplecticReport {
    let omega = canonical_matrix();
    let residual = (jac.transpose() * omega * jac - omega).amax();
    SymplecticReport { residual, point: *at, tolerance: SYMPLECTIC_TOLERANCE, passed: residual < SYMPLECTIC_TOLERANCE }
}
