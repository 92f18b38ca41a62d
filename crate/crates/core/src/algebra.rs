//! Structure constants of six conserved charges and the Lie algebra they span.
//!
//! Both systems carry three rotational charges `R` (`J` or `L`) and three
//! transitive charges `T` (`A` or `D`) with brackets
//!
//! ```text
//! {Rᵢ, Rⱼ} = −εᵢⱼₖ Rₖ,   {Rᵢ, Tⱼ} = −εᵢⱼₖ Tₖ,   {Tᵢ, Tⱼ} = −κ εᵢⱼₖ Rₖ
//! ```
//!
//! where `κ = k` for geodesic motion and `κ = −H` for the Kepler problem.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::phase::{levi_civita, poisson_bracket, PhasePoint, ScalarField, BRACKET_CONVENTION};

/// The three real forms reached by the charge algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algebra {
    #[serde(rename = "so(4)")]
    So4,
    #[serde(rename = "iso(3)")]
    Iso3,
    #[serde(rename = "so(3,1)")]
    So31,
}

impl Algebra {
    /// Classify by the sign of `κ`; `|κ| <= zero_tol` counts as zero.
    pub fn from_structure_parameter(kappa: f64, zero_tol: f64) -> Algebra {
        if kappa > zero_tol {
            Algebra::So4
        } else if kappa < -zero_tol {
            Algebra::So31
        } else {
            Algebra::Iso3
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Algebra::So4 => "so(4)",
            Algebra::Iso3 => "iso(3)",
            Algebra::So31 => "so(3,1)",
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Algebra of geodesic charges on a space of curvature `k`.
pub fn classify_curvature(k: f64) -> Algebra {
    Algebra::from_structure_parameter(k, 0.0)
}

/// Algebra of Kepler charges restricted to the energy surface `H = energy`.
pub fn classify_kepler_energy(energy: f64) -> Algebra {
    Algebra::from_structure_parameter(-energy, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketEntry {
    pub left: String,
    pub right: String,
    pub computed: f64,
    pub expected: f64,
    pub residual: f64,
}

/// All brackets among the six charges at one phase point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BracketReport {
    pub system: String,
    pub convention: &'static str,
    pub point: PhasePoint,
    /// `κ` in `{Tᵢ, Tⱼ} = −κ εᵢⱼₖ Rₖ`.
    pub structure_parameter: f64,
    pub charges: [f64; 6],
    /// Full antisymmetric matrix `{cᵢ, cⱼ}`, rows and columns in charge order.
    pub matrix: [[f64; 6]; 6],
    /// The 15 independent pairs `i < j`.
    pub entries: Vec<BracketEntry>,
    /// Largest `|computed − expected|` over the full matrix.
    pub max_residual: f64,
    pub algebra: Algebra,
}

impl BracketReport {
    pub fn bracket(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }
}

/// Expected `{cₐ, c_b}` from the structure constants.
pub fn expected_bracket(a: usize, b: usize, charges: &[f64; 6], kappa: f64) -> f64 {
    let (ia, ib) = (a % 3, b % 3);
    let rot = (a < 3, b < 3);
    (0..3)
        .map(|k| {
            let eps = levi_civita(ia, ib, k);
            match rot {
                (true, true) => -eps * charges[k],
                (true, false) | (false, true) => -eps * charges[3 + k],
                (false, false) => -kappa * eps * charges[k],
            }
        })
        .sum()
}

/// Evaluate the bracket table of six charge fields (rotational first).
pub(crate) fn bracket_report<F: ScalarField>(
    system: &str,
    names: [&str; 6],
    fields: &[F; 6],
    kappa: f64,
    algebra: Algebra,
    at: &PhasePoint,
) -> Result<BracketReport> {
    let mut charges = [0.0; 6];
    for (c, f) in charges.iter_mut().zip(fields) {
        *c = f.value(at)?;
    }
    let mut matrix = [[0.0; 6]; 6];
    let mut entries = Vec::with_capacity(15);
    let mut max_residual: f64 = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            let computed = poisson_bracket(&fields[a], &fields[b], at)?;
            let expected = expected_bracket(a, b, &charges, kappa);
            let residual = (computed - expected).abs();
            max_residual = max_residual.max(residual);
            matrix[a][b] = computed;
            if a < b {
                entries.push(BracketEntry {
                    left: names[a].to_string(),
                    right: names[b].to_string(),
                    computed,
                    expected,
                    residual,
                });
            }
        }
    }
    Ok(BracketReport {
        system: system.to_string(),
        convention: BRACKET_CONVENTION,
        point: *at,
        structure_parameter: kappa,
        charges,
        matrix,
        entries,
        max_residual,
        algebra,
    })
}
