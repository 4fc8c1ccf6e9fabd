//! Physical constants (CODATA 2018, SI).

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// One debye in C·m (10⁻²¹/c).
pub const DEBYE: f64 = 1e-21 / SPEED_OF_LIGHT;

pub const NANOMETER: f64 = 1e-9;
pub const MICROMETER: f64 = 1e-6;
