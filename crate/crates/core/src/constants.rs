//! CODATA 2018 values, SI units.

pub const HBAR: f64 = 1.054_571_817e-34;
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;

/// 1 D = 1e-21 / c  C·m.
pub const DEBYE: f64 = 1e-21 / SPEED_OF_LIGHT;

pub const FOUR_PI_EPS0: f64 = 4.0 * std::f64::consts::PI * EPSILON_0;
