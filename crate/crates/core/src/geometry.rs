//! Fold and sleeve geometry, and the closed-form stroke models built on it.
//!
//! Folds are treated as rigid hinged plates: a fold of side length `S` inclined at
//! `θ` from the horizontal stands `2 S sin θ` tall at rest and `2 S` when fully
//! unfolded. Angles enter and leave this module in degrees; they are stored in
//! radians.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single repeated bellows fold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoldSpec {
    fold_length: f64,
    fold_angle: f64,
    fold_count: u32,
}

impl FoldSpec {
    /// `fold_length_mm` is the fold side (hypotenuse) `S`; the angle is in degrees.
    pub fn new(fold_length_mm: f64, fold_angle_deg: f64, fold_count: u32) -> Result<Self> {
        if !(fold_length_mm.is_finite() && fold_length_mm > 0.0) {
            return Err(Error::domain(format!(
                "fold length must be > 0 mm, got {fold_length_mm}"
            )));
        }
        check_open_angle(fold_angle_deg)?;
        if fold_count == 0 {
            return Err(Error::domain("fold count must be at least 1"));
        }
        Ok(Self {
            fold_length: fold_length_mm,
            fold_angle: fold_angle_deg.to_radians(),
            fold_count,
        })
    }

    /// Builds the fold from its horizontal width `fw` instead of its side length.
    pub fn from_width(fold_width_mm: f64, fold_angle_deg: f64, fold_count: u32) -> Result<Self> {
        let s = fold_length_from_width(fold_width_mm, fold_angle_deg)?;
        Self::new(s, fold_angle_deg, fold_count)
    }

    pub fn fold_length(&self) -> f64 {
        self.fold_length
    }

    /// Fold angle in radians.
    pub fn fold_angle(&self) -> f64 {
        self.fold_angle
    }

    pub fn fold_angle_deg(&self) -> f64 {
        self.fold_angle.to_degrees()
    }

    pub fn fold_count(&self) -> u32 {
        self.fold_count
    }

    pub fn with_fold_count(self, fold_count: u32) -> Result<Self> {
        if fold_count == 0 {
            return Err(Error::domain("fold count must be at least 1"));
        }
        Ok(Self { fold_count, ..self })
    }

    /// Rest height of one fold, `2 S sin θ`.
    pub fn rest_pitch(&self) -> f64 {
        2.0 * self.fold_length * self.fold_angle.sin()
    }

    /// Horizontal projection `S cos θ`, the radial reach of one fold side.
    pub fn radial_projection(&self) -> f64 {
        self.fold_length * self.fold_angle.cos()
    }
}

fn check_open_angle(angle_deg: f64) -> Result<()> {
    if !(angle_deg.is_finite() && angle_deg > 0.0 && angle_deg < 90.0) {
        return Err(Error::domain(format!(
            "fold angle must lie strictly inside (0°, 90°), got {angle_deg}°"
        )));
    }
    Ok(())
}

/// The four radii used by the projected-area terms of the static model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radii {
    pub cap_inner: f64,
    pub cap_outer: f64,
    pub external_wall_inner: f64,
    pub internal_wall_outer: f64,
}

/// Gap between the sleeve radius and the external wall used by [`Radii::derived`].
pub const DEFAULT_WALL_GAP_MM: f64 = 0.0;
/// Radial width of the cap annulus used by [`Radii::derived`].
pub const DEFAULT_CAP_RIM_MM: f64 = 2.0;

impl Radii {
    /// Default radii from the sleeve radius and wall thickness:
    /// `R1i = r`, `R1o = r + cap_rim`, `R2i = r + gap`, `R3i = r - wt`.
    ///
    /// These are not measured values; they exist so a config that only carries the
    /// tabulated parameters still yields a usable static model.
    pub fn derived(sleeve_radius: f64, wall_thickness: f64, gap: f64, cap_rim: f64) -> Self {
        Self {
            cap_inner: sleeve_radius,
            cap_outer: sleeve_radius + cap_rim,
            external_wall_inner: sleeve_radius + gap,
            internal_wall_outer: sleeve_radius - wall_thickness,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("cap_inner_radius_mm", self.cap_inner),
            ("cap_outer_radius_mm", self.cap_outer),
            ("external_wall_inner_radius_mm", self.external_wall_inner),
            ("internal_wall_outer_radius_mm", self.internal_wall_outer),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, format!("must be > 0 mm, got {v}")));
            }
        }
        if self.cap_outer <= self.cap_inner {
            return Err(Error::validation(
                "cap_outer_radius_mm",
                "must exceed cap_inner_radius_mm",
            ));
        }
        let ordered = self.internal_wall_outer <= self.cap_inner
            && self.cap_inner <= self.external_wall_inner
            && self.external_wall_inner <= self.cap_outer;
        if !ordered {
            return Err(Error::validation(
                "radii",
                format!(
                    "expected R3i <= R1i <= R2i <= R1o, got {} / {} / {} / {}",
                    self.internal_wall_outer,
                    self.cap_inner,
                    self.external_wall_inner,
                    self.cap_outer
                ),
            ));
        }
        Ok(())
    }
}

/// Full sleeve description plus the optional overrides a config may carry.
#[derive(Debug, Clone, PartialEq)]
pub struct ActuatorGeometry {
    pub sleeve_radius: f64,
    pub actuator_length: f64,
    pub fold_width: f64,
    /// Radians.
    pub fold_angle: f64,
    pub restraining_layer_thickness: f64,
    pub restraining_layer_count: u32,
    pub wall_thickness: f64,
    pub constraining_layer_thickness: Option<f64>,
    pub shore_hardness: f64,
    pub radii: Radii,
    /// Use this `S` directly instead of `fw / cos θ`.
    pub fold_length_override: Option<f64>,
    /// Use this fold count instead of the pitch estimate.
    pub fold_count_override: Option<u32>,
}

impl ActuatorGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sleeve_radius_mm", self.sleeve_radius),
            ("actuator_length_mm", self.actuator_length),
            ("fold_width_mm", self.fold_width),
            (
                "restraining_layer_thickness_mm",
                self.restraining_layer_thickness,
            ),
            ("wall_thickness_mm", self.wall_thickness),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, format!("must be > 0 mm, got {v}")));
            }
        }
        if let Some(tc) = self.constraining_layer_thickness {
            if !(tc.is_finite() && tc > 0.0) {
                return Err(Error::validation(
                    "constraining_layer_thickness_mm",
                    format!("must be > 0 mm, got {tc}"),
                ));
            }
        }
        if let Some(s) = self.fold_length_override {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::validation(
                    "fold_length_mm",
                    format!("must be > 0 mm, got {s}"),
                ));
            }
        }
        if self.fold_count_override == Some(0) {
            return Err(Error::validation("fold_count", "must be at least 1"));
        }
        let deg = self.fold_angle.to_degrees();
        if !(deg > 0.0 && deg < 90.0) {
            return Err(Error::validation(
                "fold_angle_deg",
                format!("must lie strictly inside (0, 90), got {deg}"),
            ));
        }
        self.radii.validate()
    }

    /// Non-fatal observations about the geometry (untested material grades, ...).
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.shore_hardness != 85.0 && self.shore_hardness != 95.0 {
            out.push(format!(
                "shore hardness {} is outside the characterised grades (85A, 95A)",
                self.shore_hardness
            ));
        }
        let deg = self.fold_angle.to_degrees();
        if !(25.0..=45.0).contains(&deg) {
            out.push(format!(
                "fold angle {deg}° is outside the tested span [25°, 45°]"
            ));
        }
        out
    }

    pub fn fold_angle_deg(&self) -> f64 {
        self.fold_angle.to_degrees()
    }

    /// Fold side length `S`, from the override or `fw / cos θ`.
    pub fn fold_length(&self) -> Result<f64> {
        match self.fold_length_override {
            Some(s) => Ok(s),
            None => fold_length_from_width(self.fold_width, self.fold_angle_deg()),
        }
    }

    /// Fold description with `N` taken from the override or estimated from `l`.
    pub fn fold_spec(&self) -> Result<FoldSpec> {
        let base = FoldSpec::new(self.fold_length()?, self.fold_angle_deg(), 1)?;
        let n = match self.fold_count_override {
            Some(n) => n,
            None => estimate_fold_count(self.actuator_length, &base)?,
        };
        base.with_fold_count(n)
    }

    /// Offset between the sleeve wall and the constrained side used by the bending model.
    /// Falls back to the restraining layer thickness when no constraining layer is set.
    pub fn bending_offset(&self) -> f64 {
        self.constraining_layer_thickness
            .unwrap_or(self.restraining_layer_thickness)
    }
}

/// Bending description: constrained side length, wall offset, curvature radius and
/// total bend angle (degrees).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BendGeometry {
    pub constrained_side_length: f64,
    pub offset_thickness: f64,
    pub curvature_radius: f64,
    pub bend_angle_total: f64,
}

impl BendGeometry {
    /// `|ρ φ(rad) − L|`; zero for a self-consistent bend.
    pub fn arc_residual(&self) -> f64 {
        (self.curvature_radius * self.bend_angle_total.to_radians() - self.constrained_side_length)
            .abs()
    }

    pub fn is_arc_consistent(&self) -> bool {
        self.arc_residual() <= 1e-9 * self.constrained_side_length.abs()
    }
}

/// Side length from the horizontal fold width, `S = fw / cos θ`.
pub fn fold_length_from_width(fold_width_mm: f64, fold_angle_deg: f64) -> Result<f64> {
    if !(fold_width_mm.is_finite() && fold_width_mm > 0.0) {
        return Err(Error::domain(format!(
            "fold width must be > 0 mm, got {fold_width_mm}"
        )));
    }
    check_open_angle(fold_angle_deg)?;
    Ok(fold_width_mm / fold_angle_deg.to_radians().cos())
}

/// Stroke gained by fully opening one fold, `2 S (1 − sin θ)`.
pub fn extension_single_fold(spec: &FoldSpec) -> f64 {
    2.0 * spec.fold_length * (1.0 - spec.fold_angle.sin())
}

pub fn extension_total(spec: &FoldSpec) -> f64 {
    f64::from(spec.fold_count) * extension_single_fold(spec)
}

/// Stroke lost by fully collapsing every fold, `2 S sin θ N`.
pub fn contraction_total(spec: &FoldSpec) -> f64 {
    2.0 * spec.fold_length * spec.fold_angle.sin() * f64::from(spec.fold_count)
}

/// Radius of the bend's central line, `L (r + offset) / (N δ)`.
///
/// Returns [`Error::DivisionByZero`] when `δ = 0`: the actuator is straight.
pub fn curvature_radius(
    constrained_length: f64,
    fold_count: u32,
    delta_single: f64,
    sleeve_radius: f64,
    offset: f64,
) -> Result<f64> {
    if fold_count == 0 {
        return Err(Error::domain("fold count must be at least 1"));
    }
    if delta_single == 0.0 {
        return Err(Error::DivisionByZero(
            "zero differential extension: actuator is straight".into(),
        ));
    }
    if delta_single < 0.0 {
        return Err(Error::domain("single-fold extension must be > 0"));
    }
    Ok(constrained_length * (sleeve_radius + offset) / (f64::from(fold_count) * delta_single))
}

/// Total bend angle in degrees using the per-fold form `δ / (ρ + r + offset)`.
pub fn bend_angle_per_fold(
    delta_single: f64,
    rho: f64,
    sleeve_radius: f64,
    offset: f64,
    fold_count: u32,
) -> f64 {
    let per_fold = delta_single / (rho + sleeve_radius + offset);
    f64::from(fold_count) * per_fold.to_degrees()
}

/// Total bend angle in degrees that closes the arc-length balance `L = ρ φ`, i.e.
/// `φ = N δ / (r + offset)`.
pub fn bend_angle_consistent(
    delta_single: f64,
    sleeve_radius: f64,
    offset: f64,
    fold_count: u32,
) -> f64 {
    let rad = f64::from(fold_count) * delta_single / (sleeve_radius + offset);
    rad.to_degrees()
}

/// `floor(l / (2 S sin θ))`, at least one fold.
pub fn estimate_fold_count(actuator_length: f64, spec: &FoldSpec) -> Result<u32> {
    let pitch = spec.rest_pitch();
    if pitch > actuator_length {
        return Err(Error::domain(format!(
            "fold pitch {pitch:.4} mm exceeds actuator length {actuator_length} mm"
        )));
    }
    // Guard against 2.9999999 when l is an exact multiple of the pitch.
    let ratio = actuator_length / pitch;
    let n = (ratio + 1e-9 * ratio).floor();
    Ok((n as u32).max(1))
}

/// Result of evaluating both bending formulations for one fold geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BendReport {
    Straight,
    Bent {
        curvature_radius: f64,
        angle_per_fold_deg: f64,
        angle_consistent_deg: f64,
        /// `|ρ φ_per_fold(rad) − L|`, the mismatch of the per-fold formula.
        per_fold_residual: f64,
    },
}

/// Evaluates the bending models for a differential extension `δ` per fold.
pub fn bend_report(
    constrained_length: f64,
    fold_count: u32,
    delta_single: f64,
    sleeve_radius: f64,
    offset: f64,
) -> Result<BendReport> {
    let rho = match curvature_radius(
        constrained_length,
        fold_count,
        delta_single,
        sleeve_radius,
        offset,
    ) {
        Ok(rho) => rho,
        Err(Error::DivisionByZero(_)) => return Ok(BendReport::Straight),
        Err(e) => return Err(e),
    };
    let angle_per_fold = bend_angle_per_fold(delta_single, rho, sleeve_radius, offset, fold_count);
    let angle_consistent = bend_angle_consistent(delta_single, sleeve_radius, offset, fold_count);
    let per_fold = BendGeometry {
        constrained_side_length: constrained_length,
        offset_thickness: offset,
        curvature_radius: rho,
        bend_angle_total: angle_per_fold,
    };
    Ok(BendReport::Bent {
        curvature_radius: rho,
        angle_per_fold_deg: angle_per_fold,
        angle_consistent_deg: angle_consistent,
        per_fold_residual: per_fold.arc_residual(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn fold_length_examples() {
        assert_relative_eq!(
            fold_length_from_width(16.0, 30.0).unwrap(),
            18.475_208_614_068_024,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fold_length_from_width(12.0, 40.0).unwrap(),
            15.664_887_471_987_343,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            fold_length_from_width(10.0, 1e-9).unwrap(),
            10.0,
            max_relative = 1e-12
        );
        assert!(fold_length_from_width(10.0, 0.0).is_err());
        assert!(fold_length_from_width(10.0, 90.0).is_err());
        assert!(fold_length_from_width(10.0, -5.0).is_err());
    }

    #[test]
    fn extension_examples() {
        let f = FoldSpec::new(10.0, 30.0, 5).unwrap();
        assert_relative_eq!(extension_single_fold(&f), 10.0, max_relative = 1e-12);
        assert_relative_eq!(extension_total(&f), 50.0, max_relative = 1e-12);

        let one = f.with_fold_count(1).unwrap();
        assert_eq!(extension_total(&one), extension_single_fold(&one));

        let s = 18.475_208_614_068_024;
        let g = FoldSpec::new(s, 30.0, 10).unwrap();
        assert_relative_eq!(extension_single_fold(&g), s, max_relative = 1e-12);
        assert_relative_eq!(extension_total(&g), 10.0 * s, max_relative = 1e-12);

        let near_closed = FoldSpec::new(10.0, 90.0 - 1e-7, 1).unwrap();
        assert!(extension_single_fold(&near_closed) < 1e-12);
    }

    #[test]
    fn contraction_examples() {
        let f = FoldSpec::new(10.0, 30.0, 5).unwrap();
        assert_relative_eq!(contraction_total(&f), 50.0, max_relative = 1e-12);
        let g = FoldSpec::new(10.0, 40.0, 5).unwrap();
        assert_relative_eq!(
            contraction_total(&g),
            64.278_760_968_653_93,
            max_relative = 1e-12
        );
        let flat = FoldSpec::new(10.0, 1e-9, 5).unwrap();
        assert!(contraction_total(&flat) < 1e-8);
    }

    #[test]
    fn bending_examples() {
        assert_relative_eq!(
            curvature_radius(120.0, 10, 2.0, 30.0, 1.6).unwrap(),
            189.6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            curvature_radius(120.0, 10, 4.0, 30.0, 1.6).unwrap(),
            94.8,
            max_relative = 1e-12
        );
        assert!(matches!(
            curvature_radius(120.0, 10, 0.0, 30.0, 1.6),
            Err(Error::DivisionByZero(_))
        ));

        assert_relative_eq!(
            bend_angle_per_fold(2.0, 189.6, 30.0, 1.6, 10),
            5.180_450_227_222_633,
            max_relative = 1e-12
        );
        assert_eq!(bend_angle_per_fold(0.0, 189.6, 30.0, 1.6, 10), 0.0);
        assert_relative_eq!(
            bend_angle_per_fold(2.0, 189.6, 30.0, 1.6, 20),
            2.0 * bend_angle_per_fold(2.0, 189.6, 30.0, 1.6, 10),
            max_relative = 1e-15
        );

        assert_relative_eq!(
            bend_angle_consistent(2.0, 30.0, 1.6, 10),
            36.263_151_590_558_43,
            max_relative = 1e-12
        );
        assert_eq!(bend_angle_consistent(0.0, 30.0, 1.6, 10), 0.0);
    }

    #[test]
    fn consistent_bend_closes_the_arc() {
        let rho = curvature_radius(120.0, 10, 2.0, 30.0, 1.6).unwrap();
        let phi = bend_angle_consistent(2.0, 30.0, 1.6, 10);
        let bend = BendGeometry {
            constrained_side_length: 120.0,
            offset_thickness: 1.6,
            curvature_radius: rho,
            bend_angle_total: phi,
        };
        assert!(bend.is_arc_consistent());
    }

    #[test]
    fn per_fold_bend_residual_is_exposed() {
        match bend_report(120.0, 10, 2.0, 30.0, 1.6).unwrap() {
            BendReport::Bent {
                per_fold_residual, ..
            } => assert!(per_fold_residual > 1.0),
            BendReport::Straight => panic!("expected a bend"),
        }
        assert_eq!(
            bend_report(120.0, 10, 0.0, 30.0, 1.6).unwrap(),
            BendReport::Straight
        );
    }

    #[test]
    fn fold_count_estimates() {
        let s = 18.475_208_614_068_024;
        let f = FoldSpec::new(s, 30.0, 1).unwrap();
        assert_eq!(estimate_fold_count(80.0, &f).unwrap(), 4);
        assert_eq!(estimate_fold_count(f.rest_pitch(), &f).unwrap(), 1);
        let g = FoldSpec::new(13.856, 30.0, 1).unwrap();
        assert_eq!(estimate_fold_count(120.0, &g).unwrap(), 8);
        assert!(estimate_fold_count(10.0, &f).is_err());
    }

    #[test]
    fn rejects_bad_fold_specs() {
        assert!(FoldSpec::new(0.0, 30.0, 1).is_err());
        assert!(FoldSpec::new(10.0, 90.0, 1).is_err());
        assert!(FoldSpec::new(10.0, 0.0, 1).is_err());
        assert!(FoldSpec::new(10.0, 30.0, 0).is_err());
    }

    #[test]
    fn derived_radii_are_ordered() {
        let r = Radii::derived(30.0, 0.96, DEFAULT_WALL_GAP_MM, DEFAULT_CAP_RIM_MM);
        r.validate().unwrap();
        let bad = Radii {
            cap_outer: 29.0,
            ..r
        };
        assert!(bad.validate().is_err());
    }

    proptest! {
        #[test]
        fn extension_decreases_and_contraction_increases_with_angle(
            s in 1.0f64..50.0, n in 1u32..40, a in 1.0f64..88.0, da in 0.01f64..1.0
        ) {
            let lo = FoldSpec::new(s, a, n).unwrap();
            let hi = FoldSpec::new(s, a + da, n).unwrap();
            prop_assert!(extension_total(&hi) < extension_total(&lo));
            prop_assert!(contraction_total(&hi) > contraction_total(&lo));
        }

        #[test]
        fn extension_plus_rest_height_is_unfolded_length(
            s in 0.1f64..50.0, n in 1u32..40, a in 0.5f64..89.5
        ) {
            let f = FoldSpec::new(s, a, n).unwrap();
            let full = 2.0 * s * f64::from(n);
            let sum = extension_total(&f) + contraction_total(&f);
            prop_assert!((sum - full).abs() <= 1e-12 * full);
        }

        #[test]
        fn strokes_are_homogeneous_in_fold_length(
            s in 0.1f64..50.0, k in 0.1f64..10.0, n in 1u32..40, a in 0.5f64..89.5
        ) {
            let f = FoldSpec::new(s, a, n).unwrap();
            let g = FoldSpec::new(k * s, a, n).unwrap();
            prop_assert!((extension_total(&g) - k * extension_total(&f)).abs()
                <= 1e-12 * extension_total(&g).max(1e-300));
            prop_assert!((contraction_total(&g) - k * contraction_total(&f)).abs()
                <= 1e-12 * contraction_total(&g));
        }

        #[test]
        fn bend_angles_are_linear_in_fold_count(
            d in 0.0f64..10.0, rho in 10.0f64..500.0, n in 1u32..50
        ) {
            let p1 = bend_angle_per_fold(d, rho, 30.0, 1.6, n);
            let p2 = bend_angle_per_fold(d, rho, 30.0, 1.6, 2 * n);
            prop_assert!((p2 - 2.0 * p1).abs() <= 1e-12 * p2.abs().max(1e-300));
            let c1 = bend_angle_consistent(d, 30.0, 1.6, n);
            let c2 = bend_angle_consistent(d, 30.0, 1.6, 2 * n);
            prop_assert!((c2 - 2.0 * c1).abs() <= 1e-12 * c2.abs().max(1e-300));
        }

        #[test]
        fn consistent_angle_satisfies_arc_identity(
            l in 10.0f64..300.0, d in 0.01f64..10.0, n in 1u32..50, r in 5.0f64..60.0, off in 0.1f64..5.0
        ) {
            let rho = curvature_radius(l, n, d, r, off).unwrap();
            let phi = bend_angle_consistent(d, r, off, n).to_radians();
            prop_assert!((rho * phi - l).abs() <= 1e-9 * l);
        }
    }
}
