//! Incompressible hyperelastic strain-energy models for TPU, uniaxial stress, and
//! least-squares calibration of the coefficient-linear families.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsq;

const INCOMPRESSIBLE_TOL: f64 = 1e-12;

/// Principal stretches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StretchState {
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
}

impl StretchState {
    pub fn new(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        for l in [lambda1, lambda2, lambda3] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::domain(format!("stretch must be > 0, got {l}")));
            }
        }
        Ok(Self {
            lambda1,
            lambda2,
            lambda3,
        })
    }

    /// Like [`StretchState::new`] but also requires `λ1 λ2 λ3 = 1`.
    pub fn incompressible(lambda1: f64, lambda2: f64, lambda3: f64) -> Result<Self> {
        let s = Self::new(lambda1, lambda2, lambda3)?;
        let j = lambda1 * lambda2 * lambda3;
        if (j - 1.0).abs() > INCOMPRESSIBLE_TOL {
            return Err(Error::domain(format!(
                "stretches are not volume preserving: λ1λ2λ3 = {j}"
            )));
        }
        Ok(s)
    }

    pub fn stretches(&self) -> [f64; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantSet {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl InvariantSet {
    pub const IDENTITY: InvariantSet = InvariantSet {
        i1: 3.0,
        i2: 3.0,
        i3: 1.0,
    };
}

pub fn invariants_of(state: &StretchState) -> InvariantSet {
    let [a, b, c] = state.stretches().map(|l| l * l);
    InvariantSet {
        i1: a + b + c,
        i2: a * b + b * c + c * a,
        i3: a * b * c,
    }
}

/// Incompressible uniaxial tension `(λ, λ^-1/2, λ^-1/2)`.
pub fn uniaxial_state(lambda: f64) -> Result<StretchState> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::domain(format!("stretch must be > 0, got {lambda}")));
    }
    let lateral = 1.0 / lambda.sqrt();
    StretchState::new(lambda, lateral, lateral)
}

/// Stretch from engineering strain, `λ = 1 + ε`.
pub fn stretch_from_strain(strain: f64) -> f64 {
    1.0 + strain
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    NeoHookean,
    MooneyRivlin2,
    MooneyRivlin5,
    Yeoh3,
    /// `N` (μ, α) pairs, stored interleaved.
    Ogden,
}

impl Family {
    pub fn coefficient_names(&self) -> &'static [&'static str] {
        match self {
            Family::NeoHookean => &["C10"],
            Family::MooneyRivlin2 => &["C10", "C01"],
            Family::MooneyRivlin5 => &["C10", "C01", "C20", "C11", "C02"],
            Family::Yeoh3 => &["C10", "C20", "C30"],
            Family::Ogden => &[],
        }
    }

    /// Families whose uniaxial stress is linear in the coefficients.
    pub fn is_linear(&self) -> bool {
        !matches!(self, Family::Ogden)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::NeoHookean => "neo-hookean",
            Family::MooneyRivlin2 => "mr2",
            Family::MooneyRivlin5 => "mr5",
            Family::Yeoh3 => "yeoh3",
            Family::Ogden => "ogden",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "neo-hookean" | "neohookean" | "nh" => Ok(Family::NeoHookean),
            "mr2" | "mooney-rivlin-2" | "mooney-rivlin2" => Ok(Family::MooneyRivlin2),
            "mr5" | "mooney-rivlin-5" | "mooney-rivlin5" => Ok(Family::MooneyRivlin5),
            "yeoh3" | "yeoh" => Ok(Family::Yeoh3),
            "ogden" => Ok(Family::Ogden),
            other => Err(Error::UnsupportedModel(other.to_string())),
        }
    }
}

/// A strain-energy family with its coefficients (MPa; Ogden exponents dimensionless).
/// Incompressible throughout (`D1 = 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    family: Family,
    coefficients: Vec<f64>,
}

impl MaterialModel {
    pub fn new(family: Family, coefficients: Vec<f64>) -> Result<Self> {
        let ok = match family {
            Family::Ogden => !coefficients.is_empty() && coefficients.len().is_multiple_of(2),
            f => coefficients.len() == f.coefficient_names().len(),
        };
        if !ok {
            return Err(Error::UnsupportedModel(format!(
                "{family} does not take {} coefficients",
                coefficients.len()
            )));
        }
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::UnsupportedModel(format!(
                "{family} coefficient is not finite: {c}"
            )));
        }
        if family == Family::Ogden && coefficients.chunks(2).any(|p| p[1] == 0.0) {
            return Err(Error::UnsupportedModel("ogden exponent α = 0".into()));
        }
        Ok(Self {
            family,
            coefficients,
        })
    }

    pub fn neo_hookean(c10: f64) -> Self {
        Self::new(Family::NeoHookean, vec![c10]).expect("one coefficient")
    }

    pub fn mooney_rivlin5(c10: f64, c01: f64, c20: f64, c11: f64, c02: f64) -> Self {
        Self::new(Family::MooneyRivlin5, vec![c10, c01, c20, c11, c02]).expect("five coefficients")
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn incompressibility_d1(&self) -> f64 {
        0.0
    }

    /// `(name, value)` pairs; Ogden terms are named `mu1, alpha1, mu2, ...`.
    pub fn named_coefficients(&self) -> Vec<(String, f64)> {
        match self.family {
            Family::Ogden => self
                .coefficients
                .chunks(2)
                .enumerate()
                .flat_map(|(i, p)| {
                    [
                        (format!("mu{}", i + 1), p[0]),
                        (format!("alpha{}", i + 1), p[1]),
                    ]
                })
                .collect(),
            f => f
                .coefficient_names()
                .iter()
                .zip(&self.coefficients)
                .map(|(n, v)| (n.to_string(), *v))
                .collect(),
        }
    }
}

/// TPU 85A, Mooney-Rivlin five-parameter constants (MPa).
pub fn tpu85_mr5() -> MaterialModel {
    MaterialModel::mooney_rivlin5(-3.1992, 6.977, 0.0281, -0.074972, 0.92155)
}

/// TPU 95A, Mooney-Rivlin five-parameter constants (MPa).
pub fn tpu95_mr5() -> MaterialModel {
    MaterialModel::mooney_rivlin5(-28.763, 42.995, 0.10499, -6.6676, 9.138)
}

/// Strain energy density (MPa) from invariants.
///
/// Ogden energy depends on the stretches themselves, so it is rejected here; use
/// [`strain_energy_at`].
pub fn strain_energy(model: &MaterialModel, inv: &InvariantSet) -> Result<f64> {
    let p = inv.i1 - 3.0;
    let q = inv.i2 - 3.0;
    let c = &model.coefficients;
    Ok(match model.family {
        Family::NeoHookean => c[0] * p,
        Family::MooneyRivlin2 => c[0] * p + c[1] * q,
        Family::MooneyRivlin5 => c[0] * p + c[1] * q + c[2] * p * p + c[3] * p * q + c[4] * q * q,
        Family::Yeoh3 => c[0] * p + c[1] * p * p + c[2] * p * p * p,
        Family::Ogden => {
            return Err(Error::UnsupportedModel(
                "ogden energy needs principal stretches, not invariants".into(),
            ))
        }
    })
}

/// Strain energy density (MPa) at a stretch state, for every family.
pub fn strain_energy_at(model: &MaterialModel, state: &StretchState) -> Result<f64> {
    match model.family {
        Family::Ogden => Ok(model
            .coefficients
            .chunks(2)
            .map(|t| {
                let (mu, alpha) = (t[0], t[1]);
                let sum: f64 = state.stretches().iter().map(|l| l.powf(alpha)).sum();
                mu / alpha * (sum - 3.0)
            })
            .sum()),
        _ => strain_energy(model, &invariants_of(state)),
    }
}

/// Analytic `(∂W/∂I1, ∂W/∂I2)`.
pub fn energy_derivatives(model: &MaterialModel, inv: &InvariantSet) -> Result<(f64, f64)> {
    let p = inv.i1 - 3.0;
    let q = inv.i2 - 3.0;
    let c = &model.coefficients;
    Ok(match model.family {
        Family::NeoHookean => (c[0], 0.0),
        Family::MooneyRivlin2 => (c[0], c[1]),
        Family::MooneyRivlin5 => (
            c[0] + 2.0 * c[2] * p + c[3] * q,
            c[1] + c[3] * p + 2.0 * c[4] * q,
        ),
        Family::Yeoh3 => (c[0] + 2.0 * c[1] * p + 3.0 * c[2] * p * p, 0.0),
        Family::Ogden => {
            return Err(Error::UnsupportedModel(
                "ogden energy is not expressed in invariants".into(),
            ))
        }
    })
}

/// Nominal (engineering) stress in incompressible uniaxial tension, MPa.
///
/// Invariant families use `P = 2 (λ − λ⁻²)(∂W/∂I1 + λ⁻¹ ∂W/∂I2)`; Ogden uses
/// `P = Σ μ (λ^(α−1) − λ^(−α/2 − 1))`.
pub fn uniaxial_nominal_stress(model: &MaterialModel, lambda: f64) -> Result<f64> {
    let state = uniaxial_state(lambda)?;
    match model.family {
        Family::Ogden => Ok(model
            .coefficients
            .chunks(2)
            .map(|t| t[0] * (lambda.powf(t[1] - 1.0) - lambda.powf(-0.5 * t[1] - 1.0)))
            .sum()),
        _ => {
            let (w1, w2) = energy_derivatives(model, &invariants_of(&state))?;
            Ok(2.0 * (lambda - lambda.powi(-2)) * (w1 + w2 / lambda))
        }
    }
}

/// Ordered uniaxial tensile samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StressStrainDataset {
    samples: Vec<(f64, f64)>,
    pub material_label: String,
}

impl StressStrainDataset {
    /// `samples` are `(engineering strain, nominal stress MPa)`.
    pub fn new(samples: Vec<(f64, f64)>, material_label: impl Into<String>) -> Result<Self> {
        for (i, (e, s)) in samples.iter().enumerate() {
            if !e.is_finite() || !s.is_finite() {
                return Err(Error::validation(
                    "samples",
                    format!("sample {i} is not finite"),
                ));
            }
        }
        if let Some((e, _)) = samples.first() {
            if *e < 0.0 {
                return Err(Error::validation("strain", "first strain must be >= 0"));
            }
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
            return Err(Error::validation(
                "strain",
                format!("strains must be strictly increasing (sample {})", i + 1),
            ));
        }
        Ok(Self {
            samples,
            material_label: material_label.into(),
        })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn peak_stress(&self) -> f64 {
        self.samples
            .iter()
            .map(|(_, s)| s.abs())
            .fold(0.0, f64::max)
    }
}

/// Noise-free uniaxial curve of `n` stretches evenly spaced over `[lambda_lo, lambda_hi]`.
pub fn synthesize_uniaxial(
    model: &MaterialModel,
    lambda_lo: f64,
    lambda_hi: f64,
    n: usize,
    label: &str,
) -> Result<StressStrainDataset> {
    if n < 2 || !(lambda_hi > lambda_lo) || lambda_lo < 1.0 {
        return Err(Error::domain("need n >= 2 and 1 <= lambda_lo < lambda_hi"));
    }
    let step = (lambda_hi - lambda_lo) / (n - 1) as f64;
    let samples = (0..n)
        .map(|i| {
            let l = lambda_lo + step * i as f64;
            uniaxial_nominal_stress(model, l).map(|p| (l - 1.0, p))
        })
        .collect::<Result<Vec<_>>>()?;
    StressStrainDataset::new(samples, label)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialFit {
    pub model: MaterialModel,
    pub rms_residual_mpa: f64,
    pub residual_norm: f64,
    pub condition: f64,
    pub samples: usize,
}

fn design_row(family: Family, lambda: f64) -> Vec<f64> {
    let f = 2.0 * (lambda - lambda.powi(-2));
    let p = lambda * lambda + 2.0 / lambda - 3.0;
    let q = 2.0 * lambda + lambda.powi(-2) - 3.0;
    match family {
        Family::NeoHookean => vec![f],
        Family::MooneyRivlin2 => vec![f, f / lambda],
        Family::MooneyRivlin5 => vec![
            f,
            f / lambda,
            2.0 * f * p,
            f * (q + p / lambda),
            2.0 * f * q / lambda,
        ],
        Family::Yeoh3 => vec![f, 2.0 * f * p, 3.0 * f * p * p],
        Family::Ogden => unreachable!("ogden is not linear in its coefficients"),
    }
}

/// Least-squares calibration of a coefficient-linear family to nominal stress data.
pub fn fit_linear_family(data: &StressStrainDataset, family: Family) -> Result<MaterialFit> {
    if !family.is_linear() {
        return Err(Error::UnsupportedModel(format!(
            "{family} is evaluate-only; fitting needs a coefficient-linear family"
        )));
    }
    let n_coef = family.coefficient_names().len();
    if data.len() < n_coef {
        return Err(Error::domain(format!(
            "{family} needs at least {n_coef} samples, got {}",
            data.len()
        )));
    }
    if !data.samples.iter().any(|(e, _)| *e > 0.0) {
        return Err(Error::domain("at least one sample must have strain > 0"));
    }
    let rows: Vec<Vec<f64>> = data
        .samples
        .iter()
        .map(|(e, _)| design_row(family, stretch_from_strain(*e)))
        .collect();
    let targets: Vec<f64> = data.samples.iter().map(|(_, s)| *s).collect();
    let sol = lsq::solve(&rows, &targets, n_coef)?;
    Ok(MaterialFit {
        model: MaterialModel::new(family, sol.coefficients)?,
        rms_residual_mpa: sol.rms_residual,
        residual_norm: sol.residual_norm,
        condition: sol.condition,
        samples: data.len(),
    })
}
