//! Analytic Gaussian beam model for focused and collimated beams radiated by
//! a large array or an illuminated intelligent surface.
//!
//! The transmitter sits at the origin of the xz-plane with its broadside
//! along +z. A beam is described by its footprint on the panel, a steering
//! angle and an intended focal distance. Collimated beams (beam-forming) are
//! the limit of an infinitely distant focus and are modelled explicitly by
//! [`Focus::Infinite`] rather than a huge sentinel distance.
//!
//! All quantities are SI: metres, watts, radians.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::Scalar;

/// Intended focal distance of a beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Focus<T> {
    /// Beam-focusing towards a finite distance (m).
    Finite(T),
    /// Beam-forming: the focus is at infinity.
    Infinite,
}

impl<T: Scalar> Focus<T> {
    /// `1 / f_0`, zero for an infinite focus.
    fn inverse(self) -> T {
        match self {
            Focus::Finite(f0) => f0.recip(),
            Focus::Infinite => T::zero(),
        }
    }
}

/// Point on the xz-plane (m). `z` is measured along the panel broadside.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanePoint<T> {
    pub x: T,
    pub z: T,
}

impl<T: Scalar> PlanePoint<T> {
    pub fn new(x: T, z: T) -> Self {
        Self { x, z }
    }

    /// Point at distance `d` from the origin and angle `theta` from broadside.
    pub fn from_polar(d: T, theta: T) -> Self {
        Self {
            x: d * theta.sin(),
            z: d * theta.cos(),
        }
    }

    pub fn distance(&self) -> T {
        self.x.hypot(self.z)
    }

    /// Angle from broadside, positive towards +x.
    pub fn angle(&self) -> T {
        self.x.atan2(self.z)
    }

    pub fn distance_to(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.z - other.z)
    }
}

/// Transmit-side description of one beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocusedBeam<T> {
    tx_power: T,
    w_x: T,
    w_y: T,
    steering: T,
    focus: Focus<T>,
    wavenumber: T,
}

impl<T: Scalar> FocusedBeam<T> {
    /// Validates and builds a beam.
    ///
    /// `w_x`/`w_y` are the horizontal/vertical footprint radii on the panel,
    /// `steering` the direction on the xz-plane and `wavenumber` is `2π/λ`.
    pub fn new(
        tx_power: T,
        w_x: T,
        w_y: T,
        steering: T,
        focus: Focus<T>,
        wavenumber: T,
    ) -> Result<Self> {
        if !(tx_power > T::zero()) {
            return Err(domain(format!(
                "transmit power must be positive, got {tx_power}"
            )));
        }
        if !(w_x > T::zero() && w_y > T::zero()) {
            return Err(domain(format!(
                "footprint radii must be positive, got ({w_x}, {w_y})"
            )));
        }
        if !(wavenumber > T::zero()) {
            return Err(domain(format!(
                "wavenumber must be positive, got {wavenumber}"
            )));
        }
        if let Focus::Finite(f0) = focus {
            if !(f0 > T::zero()) {
                return Err(domain(format!("focal distance must be positive, got {f0}")));
            }
        }
        // cos(θ) must stay bounded away from zero for the model to be finite.
        if !(steering.abs() < T::FRAC_PI_2()) || steering.cos() <= T::epsilon() {
            return Err(domain(format!("grazing steering angle {steering} rad")));
        }
        Ok(Self {
            tx_power,
            w_x,
            w_y,
            steering,
            focus,
            wavenumber,
        })
    }

    pub fn tx_power(&self) -> T {
        self.tx_power
    }

    pub fn w_x(&self) -> T {
        self.w_x
    }

    pub fn w_y(&self) -> T {
        self.w_y
    }

    pub fn steering(&self) -> T {
        self.steering
    }

    pub fn focus(&self) -> Focus<T> {
        self.focus
    }

    pub fn wavenumber(&self) -> T {
        self.wavenumber
    }

    pub fn wavelength(&self) -> T {
        T::two() * T::PI() / self.wavenumber
    }

    /// Power density `S_r(x, z)` in W/m².
    ///
    /// The exponent denominator uses `cos²(θ_r)` in the diffraction term.
    pub fn power_density(&self, p: PlanePoint<T>) -> T {
        let two = T::two();
        let one = T::one();
        let (s, c) = self.steering.sin_cos();
        let k = self.wavenumber;
        let inv_f0 = self.focus.inverse();

        let defocus = one - p.z * inv_f0 / c;
        let diffr_y = two * p.z / (k * self.w_y * self.w_y * c);
        let diffr_x = two * p.z / (k * self.w_x * self.w_x * c);
        let c2 = c * c;

        let vertical = (defocus * defocus + diffr_y * diffr_y).sqrt();
        let horizontal = (defocus * defocus + diffr_x * diffr_x / (c2 * c2)).sqrt();

        let offset = p.x * c - p.z * s;
        let axial = c - p.z * inv_f0;
        let spread = two * p.z / (k * self.w_x * self.w_x * c2);
        let width2 = self.w_x * self.w_x * (axial * axial + spread * spread);
        let gauss = (-(two * offset * offset) / width2).exp();

        two * self.tx_power / (T::PI() * self.w_x * self.w_y) / vertical / horizontal * gauss
    }
}

/// Receiver antenna: gain and the matching effective aperture `G λ² / 4π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverAperture<T> {
    gain: T,
    effective_area: T,
}

impl<T: Scalar> ReceiverAperture<T> {
    pub fn new(gain: T, wavelength: T) -> Result<Self> {
        if !(gain > T::zero()) {
            return Err(domain(format!(
                "receiver gain must be positive, got {gain}"
            )));
        }
        if !(wavelength > T::zero()) {
            return Err(domain(format!(
                "wavelength must be positive, got {wavelength}"
            )));
        }
        let effective_area = gain * wavelength * wavelength / (T::of(4.0) * T::PI());
        Ok(Self {
            gain,
            effective_area,
        })
    }

    pub fn gain(&self) -> T {
        self.gain
    }

    pub fn effective_area(&self) -> T {
        self.effective_area
    }

    /// Received power for an incident power density.
    pub fn received_power(&self, density: T) -> T {
        density * self.effective_area
    }
}

/// Position and size of the 3dB focal ellipse of one beam.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FocusGeometry<T> {
    pub focal_distance: T,
    pub major_radius: T,
    pub rayleigh_length: T,
    pub intended_focus: T,
    pub footprint: T,
}

impl<T: Scalar> FocusGeometry<T> {
    /// Focal ellipse of a broadside beam with a symmetric footprint `w`.
    pub fn of_beam(intended_focus: T, footprint: T, wavenumber: T) -> Result<Self> {
        let rayleigh_length = rayleigh_length(footprint, wavenumber)?;
        Ok(Self {
            focal_distance: focal_distance(intended_focus, rayleigh_length)?,
            major_radius: focal_major_radius(intended_focus, rayleigh_length)?,
            rayleigh_length,
            intended_focus,
            footprint,
        })
    }
}

fn positive<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `z_R = k w² / 2`.
pub fn rayleigh_length<T: Scalar>(w: T, k: T) -> Result<T> {
    positive("footprint radius", w)?;
    positive("wavenumber", k)?;
    Ok(k * w * w / T::two())
}

/// On-axis distance of peak power for an intended focus `f_0`.
pub fn focal_distance<T: Scalar>(f0: T, z_r: T) -> Result<T> {
    positive("intended focal distance", f0)?;
    positive("Rayleigh length", z_r)?;
    let ratio = f0 / z_r;
    Ok(f0 / (ratio * ratio + T::one()))
}

/// Half-length of the 3dB focal ellipse along the beam axis.
pub fn focal_major_radius<T: Scalar>(f0: T, z_r: T) -> Result<T> {
    let d_f = focal_distance(f0, z_r)?;
    Ok(d_f * f0 / z_r)
}

/// Intended focus and footprint that place a focal ellipse of major radius
/// `r_max` at distance `d_f`. Returns `(f_0, w_x)`.
pub fn invert_focus<T: Scalar>(d_f: T, r_max: T, k: T) -> Result<(T, T)> {
    positive("focal distance", d_f)?;
    positive("major radius", r_max)?;
    positive("wavenumber", k)?;
    let ratio = r_max / d_f;
    let f0 = d_f * (ratio * ratio + T::one());
    let w_x = (T::two() * (r_max * r_max + d_f * d_f) / (k * r_max)).sqrt();
    Ok((f0, w_x))
}

/// Far-field 3dB beamwidth `sqrt(2 ln 2) λ / (π w)` in radians.
pub fn beamwidth_3db<T: Scalar>(w: T, lambda: T) -> Result<T> {
    positive("footprint radius", w)?;
    positive("wavelength", lambda)?;
    Ok((T::two() * T::LN_2()).sqrt() * lambda / (T::PI() * w))
}

/// Horizontal footprint on a surface illuminated at incidence angle `theta_i`.
pub fn lis_footprint<T: Scalar>(w_y: T, theta_i: T) -> Result<T> {
    positive("vertical footprint", w_y)?;
    if !(theta_i.abs() < T::FRAC_PI_2()) || theta_i.cos() <= T::epsilon() {
        return Err(domain(format!("grazing incidence angle {theta_i} rad")));
    }
    Ok(w_y / theta_i.cos())
}
