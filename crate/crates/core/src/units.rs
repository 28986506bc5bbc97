//! Boundary conversions between configuration units (dBm, dB, degrees, Hz)
//! and the SI values used internally.

use crate::Scalar;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn dbm_to_watts<T: Scalar>(dbm: T) -> T {
    T::of(10.0).powf((dbm - T::of(30.0)) / T::of(10.0))
}

pub fn watts_to_dbm<T: Scalar>(watts: T) -> T {
    T::of(10.0) * watts.log10() + T::of(30.0)
}

pub fn db_to_linear<T: Scalar>(db: T) -> T {
    T::of(10.0).powf(db / T::of(10.0))
}

pub fn linear_to_db<T: Scalar>(linear: T) -> T {
    T::of(10.0) * linear.log10()
}

pub fn wavelength<T: Scalar>(frequency_hz: T) -> T {
    T::of(SPEED_OF_LIGHT) / frequency_hz
}

pub fn wavenumber<T: Scalar>(wavelength: T) -> T {
    T::two() * T::PI() / wavelength
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_conversions() {
        assert!((dbm_to_watts(30.0_f64) - 1.0).abs() < 1e-12);
        assert!((dbm_to_watts(-50.0_f64) - 1e-8).abs() < 1e-20);
        assert!((watts_to_dbm(1e-3_f64)).abs() < 1e-12);
        assert!((db_to_linear(20.0_f64) - 100.0).abs() < 1e-12);
        assert!((linear_to_db(100.0_f64) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn carrier_150ghz() {
        let lambda = wavelength(150e9_f64);
        assert!((lambda - 1.998_616_4e-3).abs() < 1e-9);
        assert!((wavenumber(lambda) - 3143.7675).abs() < 1e-3);
    }
}
