//! Empirical axial stiffness force `FK(y) = a y³ + b y² + c y + d` (y in mm, FK in N),
//! its derivative, cubic calibration, and binned secant stiffness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lsq;
use crate::units::n_per_mm_to_n_per_m;

/// Bin width used by [`interval_stiffness`] callers that do not pick one.
pub const DEFAULT_BIN_WIDTH_MM: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StiffnessCubic {
    /// N/mm³
    pub a: f64,
    /// N/mm²
    pub b: f64,
    /// N/mm
    pub c: f64,
    /// N
    pub d: f64,
    /// Displacement interval (mm) the coefficients were fitted on.
    pub valid_range: (f64, f64),
}

/// Model L13 fit, valid over the 0–40 mm test stroke.
pub const L13: StiffnessCubic = StiffnessCubic {
    a: 4.1481e-4,
    b: 1.2865e-2,
    c: 2.0789,
    d: -0.2246,
    valid_range: (0.0, 40.0),
};

impl StiffnessCubic {
    pub fn new(a: f64, b: f64, c: f64, d: f64, valid_range: (f64, f64)) -> Result<Self> {
        if ![a, b, c, d].iter().all(|v| v.is_finite()) {
            return Err(Error::validation(
                "stiffness",
                "coefficients must be finite",
            ));
        }
        if !(valid_range.0.is_finite()
            && valid_range.1.is_finite()
            && valid_range.1 > valid_range.0)
        {
            return Err(Error::validation(
                "stiffness.valid_range_mm",
                "range must be nonempty",
            ));
        }
        let poly = Self {
            a,
            b,
            c,
            d,
            valid_range,
        };
        if c <= 0.0 {
            log::warn!("stiffness cubic has non-positive linear term c = {c}");
        }
        Ok(poly)
    }

    pub fn zero(valid_range: (f64, f64)) -> Self {
        Self {
            a: 0.0,
            b: 0.0,
            c: 0.0,
            d: 0.0,
            valid_range,
        }
    }

    pub fn is_physical(&self) -> bool {
        self.c > 0.0
    }

    pub fn is_extrapolated(&self, y: f64) -> bool {
        y < self.valid_range.0 || y > self.valid_range.1
    }

    /// Coefficients of the derivative, `(3a, 2b, c)`.
    pub fn derivative_coefficients(&self) -> (f64, f64, f64) {
        (3.0 * self.a, 2.0 * self.b, self.c)
    }

    /// Force only, no extrapolation flag; used in inner loops.
    #[inline]
    pub fn force(&self, y: f64) -> f64 {
        ((self.a * y + self.b) * y + self.c) * y + self.d
    }

    #[inline]
    pub fn stiffness(&self, y: f64) -> f64 {
        (3.0 * self.a * y + 2.0 * self.b) * y + self.c
    }

    /// Smallest root of `FK(y) = target` on `[lo, hi]` by bisection, if bracketed.
    pub fn solve_force(&self, target: f64, lo: f64, hi: f64) -> Option<f64> {
        crate::roots::bisect(|y| self.force(y) - target, lo, hi, 1e-12).ok()
    }
}

/// A value with an out-of-range marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub extrapolated: bool,
}

/// `FK(y)` in N, flagged when `y` falls outside the fitted range.
pub fn stiffness_force(poly: &StiffnessCubic, y: f64) -> Flagged {
    Flagged {
        value: poly.force(y),
        extrapolated: poly.is_extrapolated(y),
    }
}

/// `dFK/dy = 3a y² + 2b y + c` in N/mm.
pub fn axial_stiffness(poly: &StiffnessCubic, y: f64) -> Flagged {
    Flagged {
        value: poly.stiffness(y),
        extrapolated: poly.is_extrapolated(y),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceDisplacementDataset {
    samples: Vec<(f64, f64)>,
    pub pressure_kpa: Option<f64>,
    pub model_label: String,
}

impl ForceDisplacementDataset {
    /// `samples` are `(displacement mm, force N)` with nondecreasing displacement.
    pub fn new(
        samples: Vec<(f64, f64)>,
        pressure_kpa: Option<f64>,
        model_label: impl Into<String>,
    ) -> Result<Self> {
        if samples
            .iter()
            .any(|(y, f)| !y.is_finite() || !f.is_finite())
        {
            return Err(Error::validation("samples", "values must be finite"));
        }
        if let Some(i) = samples.windows(2).position(|w| w[1].0 < w[0].0) {
            return Err(Error::validation(
                "displacement_mm",
                format!("displacements must be nondecreasing (sample {})", i + 1),
            ));
        }
        if let Some(p) = pressure_kpa {
            if !p.is_finite() {
                return Err(Error::validation("pressure_kpa", "must be finite"));
            }
        }
        Ok(Self {
            samples,
            pressure_kpa,
            model_label: model_label.into(),
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

    pub fn span(&self) -> Option<(f64, f64)> {
        Some((self.samples.first()?.0, self.samples.last()?.0))
    }

    /// Linear interpolation of force at displacement `y` (clamped to the data span).
    pub fn force_at(&self, y: f64) -> Option<f64> {
        let s = &self.samples;
        let first = s.first()?;
        let last = s.last()?;
        if y <= first.0 {
            return Some(first.1);
        }
        if y >= last.0 {
            return Some(last.1);
        }
        let i = s.partition_point(|p| p.0 <= y);
        let (y0, f0) = s[i - 1];
        let (y1, f1) = s[i];
        if y1 == y0 {
            return Some(f1);
        }
        Some(f0 + (f1 - f0) * (y - y0) / (y1 - y0))
    }
}

/// Cubic samples `(y, FK(y))` on an even grid; handy for tests and demos.
pub fn synthesize(poly: &StiffnessCubic, y_lo: f64, y_hi: f64, n: usize) -> Vec<(f64, f64)> {
    let step = if n > 1 {
        (y_hi - y_lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n)
        .map(|i| {
            let y = y_lo + step * i as f64;
            (y, poly.force(y))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicFit {
    pub poly: StiffnessCubic,
    pub rms_residual_n: f64,
    pub residual_norm: f64,
    pub condition: f64,
    pub samples: usize,
}

/// Least-squares cubic through force–displacement data.
pub fn fit_cubic(data: &ForceDisplacementDataset) -> Result<CubicFit> {
    if data.len() < 4 {
        return Err(Error::domain(format!(
            "cubic fit needs at least 4 samples, got {}",
            data.len()
        )));
    }
    let (lo, hi) = data.span().expect("nonempty");
    if !(hi > lo) {
        return Err(Error::RankDeficient {
            condition: f64::INFINITY,
            limit: lsq::CONDITION_LIMIT,
        });
    }
    let rows: Vec<Vec<f64>> = data
        .samples
        .iter()
        .map(|(y, _)| vec![y * y * y, y * y, *y, 1.0])
        .collect();
    let targets: Vec<f64> = data.samples.iter().map(|(_, f)| *f).collect();
    let sol = lsq::solve(&rows, &targets, 4)?;
    let c = &sol.coefficients;
    Ok(CubicFit {
        poly: StiffnessCubic::new(c[0], c[1], c[2], c[3], (lo, hi))?,
        rms_residual_n: sol.rms_residual,
        residual_norm: sol.residual_norm,
        condition: sol.condition,
        samples: data.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalStiffness {
    pub interval: (f64, f64),
    /// N/m
    pub stiffness: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalStiffnessReport {
    pub intervals: Vec<IntervalStiffness>,
}

/// Secant stiffness `ΔF / Δy` over consecutive bins of `bin_width` mm starting at the
/// first displacement; the last bin is truncated at the data end. Reported in N/m.
pub fn interval_stiffness(
    data: &ForceDisplacementDataset,
    bin_width: f64,
) -> Result<IntervalStiffnessReport> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(Error::domain(format!(
            "bin width must be > 0, got {bin_width}"
        )));
    }
    let (lo, hi) = data
        .span()
        .ok_or_else(|| Error::domain("empty force-displacement dataset"))?;
    if !(hi > lo) {
        return Err(Error::domain("dataset spans zero displacement"));
    }
    let n_bins = ((hi - lo) / bin_width - 1e-9).ceil().max(1.0) as usize;
    let intervals = (0..n_bins)
        .map(|k| {
            let start = lo + bin_width * k as f64;
            let end = (start + bin_width).min(hi);
            let f0 = data.force_at(start).expect("nonempty");
            let f1 = data.force_at(end).expect("nonempty");
            IntervalStiffness {
                interval: (start, end),
                stiffness: n_per_mm_to_n_per_m((f1 - f0) / (end - start)),
            }
        })
        .collect();
    Ok(IntervalStiffnessReport { intervals })
}

/// Whether the first-bin stiffness grows with pressure across datasets.
///
/// Datasets without a pressure label are ignored. Returns `None` with fewer than two
/// labelled datasets.
pub fn stiffness_increases_with_pressure(
    groups: &[ForceDisplacementDataset],
    bin_width: f64,
) -> Result<Option<bool>> {
    let mut labelled: Vec<(f64, f64)> = Vec::new();
    for g in groups {
        if let Some(p) = g.pressure_kpa {
            let report = interval_stiffness(g, bin_width)?;
            labelled.push((p, report.intervals[0].stiffness));
        }
    }
    if labelled.len() < 2 {
        return Ok(None);
    }
    labelled.sort_by(|x, y| x.0.total_cmp(&y.0));
    Ok(Some(labelled.windows(2).all(|w| w[1].1 > w[0].1)))
}
