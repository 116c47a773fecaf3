//! Laboratory estimates: restore hbar and c in the focal-point <E^2> and
//! turn it into a Casimir-Polder potential, an atom-beam deflection, a
//! levitation height, a trap temperature, and an interferometric phase.
//!
//! Units are CGS-Gaussian throughout, with the polarizability stored in the
//! Heaviside-Lorentz convention (4 pi times the Gaussian value), so the
//! interaction energy is V = -(1/2) alpha <E^2> with no extra 4 pi.

use crate::error::{Error, Result};
use crate::observables::{Geometry, ObservableKind, VacuumObservable};

/// Frozen CODATA constants in CGS; the version tag is echoed into every
/// output row so results are replayable.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct PhysicalConstants {
    /// erg s
    pub hbar: f64,
    /// cm / s
    pub c: f64,
    /// erg / K
    pub k_b: f64,
    /// standard gravity, cm / s^2
    pub g: f64,
    pub version: &'static str,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants {
            hbar: 1.054_571_6e-27,
            c: 2.997_924_58e10,
            k_b: 1.380_649e-16,
            g: 980.665,
            version: "codata-cgs-v1",
        }
    }
}

impl PhysicalConstants {
    /// erg cm; 3.1615e-17 to the figures used in the estimates.
    pub fn hbar_c(&self) -> f64 {
        self.hbar * self.c
    }
}

/// Plasma-wavelength validity floor: geometric optics fails for distances
/// below lambda_P, about 0.1 um for common metals.
pub const DEFAULT_LAMBDA_P_CM: f64 = 1e-5;

#[derive(Clone, Copy, Debug)]
pub struct LabSettings {
    pub constants: PhysicalConstants,
    /// Validity floor in cm.
    pub lambda_p_floor: f64,
    /// Downgrade the floor violation from an error to a pass-through.
    pub allow_sub_plasma: bool,
}

impl Default for LabSettings {
    fn default() -> Self {
        LabSettings {
            constants: PhysicalConstants::default(),
            lambda_p_floor: DEFAULT_LAMBDA_P_CM,
            allow_sub_plasma: false,
        }
    }
}

impl LabSettings {
    fn check_floor(&self, a: f64) -> Result<()> {
        if !(a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "distance must be positive, got {a} cm"
            )));
        }
        if a < self.lambda_p_floor && !self.allow_sub_plasma {
            return Err(Error::BelowPlasmaFloor {
                a,
                floor: self.lambda_p_floor,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct AtomSpec {
    pub name: String,
    /// grams
    pub mass: f64,
    /// cm^3, Heaviside-Lorentz convention
    pub polarizability: f64,
}

impl AtomSpec {
    pub fn new(name: &str, mass: f64, polarizability: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "atom mass must be positive, got {mass} g"
            )));
        }
        if !(polarizability > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "polarizability must be positive, got {polarizability} cm^3"
            )));
        }
        Ok(AtomSpec {
            name: name.to_string(),
            mass,
            polarizability,
        })
    }

    pub fn sodium() -> Self {
        AtomSpec {
            name: "Na".into(),
            mass: 3.8e-23,
            polarizability: 3.0e-22,
        }
    }

    /// Built-in presets by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "Na" | "na" | "sodium" => Ok(AtomSpec::sodium()),
            other => Err(Error::Config(format!("unknown atom preset '{other}'"))),
        }
    }
}

/// Dimensionless Lambda with <E^2> = Lambda hbar c / a^4.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct LambdaCoefficient {
    pub geometry: Geometry,
    pub xi0: f64,
    pub value: f64,
}

impl LambdaCoefficient {
    /// The focal-point Lambda from the exact closed-form coefficients:
    /// 9.38e-3 xi0 (1 - ln xi0) (revolution), 3.18e-3 ... (cylinder), or
    /// the plate value 3/(16 pi^2) regardless of xi0.
    pub fn for_mirror(geometry: Geometry, xi0: f64) -> Result<Self> {
        let pi = std::f64::consts::PI;
        let value = match geometry {
            Geometry::FlatPlate => 3.0 / (16.0 * pi * pi),
            Geometry::Revolution | Geometry::Cylinder => {
                if !(xi0 >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "xi0 must be nonnegative, got {xi0}"
                    )));
                }
                let mut coeff = 12.0 * (4051.0 / 524_880.0) / (pi * pi);
                if geometry == Geometry::Cylinder {
                    coeff *= 16.0 / (15.0 * pi);
                }
                if xi0 == 0.0 {
                    0.0
                } else {
                    coeff * xi0 * (1.0 - xi0.ln())
                }
            }
        };
        Ok(LambdaCoefficient {
            geometry,
            xi0,
            value,
        })
    }

    /// Extract Lambda from a computed observable of the E^2 class:
    /// the value is Lambda / a^4 in hbar = c = 1 units.
    pub fn from_observable(obs: &VacuumObservable) -> Result<Self> {
        match obs.kind {
            ObservableKind::ESq | ObservableKind::BSq | ObservableKind::RhoEm => {}
            other => {
                return Err(Error::IncompatibleKinds {
                    from_kind: other.to_string(),
                    to_kind: "Lambda coefficient (E^2 class)".into(),
                })
            }
        }
        Ok(LambdaCoefficient {
            geometry: obs.geometry,
            xi0: obs.xi0,
            value: obs.value * obs.a.powi(4),
        })
    }
}

/// Casimir-Polder interaction energy V = -(1/2) alpha <E^2>, in erg, with
/// <E^2> = Lambda hbar c / a^4 at distance a (cm).
pub fn casimir_polder_potential(
    settings: &LabSettings,
    atom: &AtomSpec,
    lambda: &LambdaCoefficient,
    a: f64,
) -> Result<f64> {
    settings.check_floor(a)?;
    Ok(-0.5 * atom.polarizability * lambda.value * settings.constants.hbar_c() / a.powi(4))
}

/// Fractional transverse deflection of an atom beam after time t (s) under
/// the constant force F = -dV/da evaluated at the initial distance:
/// Delta a / a = alpha Lambda hbar c t^2 / (m a^6).
pub fn deflection_ratio(
    settings: &LabSettings,
    atom: &AtomSpec,
    lambda: &LambdaCoefficient,
    a: f64,
    t: f64,
) -> Result<f64> {
    settings.check_floor(a)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "flight time must be nonnegative, got {t} s"
        )));
    }
    let c = settings.constants.hbar_c();
    Ok(atom.polarizability * lambda.value * c * t * t / (atom.mass * a.powi(6)))
}

/// Height (cm) at which the attraction toward the focus balances gravity:
/// a = (2 Lambda alpha hbar c / (m g))^{1/5}.
pub fn levitation_height(
    settings: &LabSettings,
    atom: &AtomSpec,
    lambda: &LambdaCoefficient,
) -> Result<f64> {
    if !(lambda.value > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "levitation needs Lambda > 0, got {}",
            lambda.value
        )));
    }
    let k = &settings.constants;
    Ok((2.0 * lambda.value * atom.polarizability * k.hbar_c() / (atom.mass * k.g)).powf(0.2))
}

/// Trap temperature from (3/2) k T = |V|: T = alpha Lambda hbar c / (3 k_B a^4).
pub fn trap_temperature(
    settings: &LabSettings,
    atom: &AtomSpec,
    lambda: &LambdaCoefficient,
    a: f64,
) -> Result<f64> {
    settings.check_floor(a)?;
    let k = &settings.constants;
    Ok(atom.polarizability * lambda.value * k.hbar_c() / (3.0 * k.k_b * a.powi(4)))
}

/// Interferometric phase accumulated over time t near the cylinder focus:
/// Delta phi = (t/2) alpha Lambda_pc c / a^4 (the hbar of <E^2> cancels
/// against the phase's 1/hbar).
pub fn phase_shift(
    settings: &LabSettings,
    atom: &AtomSpec,
    a: f64,
    t: f64,
    xi0: f64,
) -> Result<f64> {
    settings.check_floor(a)?;
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "interrogation time must be nonnegative, got {t} s"
        )));
    }
    let lambda = LambdaCoefficient::for_mirror(Geometry::Cylinder, xi0)?;
    Ok(0.5 * t * atom.polarizability * lambda.value * settings.constants.c / a.powi(4))
}
