//! Conversions between boundary units (kPa, degrees) and internal units (MPa, radians).
//!
//! Internally lengths are mm, forces N and pressures MPa, so `pressure * area` is
//! already in newtons.

pub fn kpa_to_mpa(kpa: f64) -> f64 {
    kpa / 1000.0
}

pub fn mpa_to_kpa(mpa: f64) -> f64 {
    mpa * 1000.0
}

pub fn deg_to_rad(deg: f64) -> f64 {
    deg.to_radians()
}

pub fn rad_to_deg(rad: f64) -> f64 {
    rad.to_degrees()
}

/// N/mm to N/m.
pub fn n_per_mm_to_n_per_m(k: f64) -> f64 {
    k * 1000.0
}
