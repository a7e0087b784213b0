//! Center-of-mass elastic kinematics, constants and screened propagators.
//!
//! Internal units: hbar = c = 1 and the electron mass sets the energy scale
//! (m = 1 unless a caller chooses otherwise). The metric is (+, -, -, -).
//! In the CoM frame p1 = -p2 = p along +z and p3 = -p4 = q; elastic
//! scattering keeps |p| = |q| = k and transfers no energy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::Vec3;

/// Electron rest energy in eV.
pub const ELECTRON_MASS_EV: f64 = 510_998.95;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicsConstants {
    /// Fine-structure constant.
    pub alpha_em: f64,
    /// e^2 = 4 pi alpha_em (Heaviside-Lorentz).
    pub e_squared: f64,
    /// Electron mass in the active unit system.
    pub electron_mass: f64,
    /// MeV fm, used for unit conversion only.
    pub hbar_c: f64,
}

impl Default for PhysicsConstants {
    fn default() -> Self {
        Self::with_mass(1.0)
    }
}

impl PhysicsConstants {
    pub const ALPHA_EM: f64 = 1.0 / 137.035999;
    pub const HBAR_C_MEV_FM: f64 = 197.327;

    pub fn with_mass(electron_mass: f64) -> Self {
        Self {
            alpha_em: Self::ALPHA_EM,
            e_squared: 4.0 * std::f64::consts::PI * Self::ALPHA_EM,
            electron_mass,
            hbar_c: Self::HBAR_C_MEV_FM,
        }
    }

    pub fn for_unit(unit: EnergyUnit) -> Self {
        Self::with_mass(unit.electron_mass())
    }
}

/// Energy unit used at the I/O boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnergyUnit {
    /// Electron mass = 1.
    #[default]
    Internal,
    #[serde(rename = "eV")]
    Ev,
    MeV,
}

impl EnergyUnit {
    /// Electron rest energy expressed in this unit.
    pub fn electron_mass(self) -> f64 {
        match self {
            EnergyUnit::Internal => 1.0,
            EnergyUnit::Ev => ELECTRON_MASS_EV,
            EnergyUnit::MeV => ELECTRON_MASS_EV * 1e-6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EnergyUnit::Internal => "internal",
            EnergyUnit::Ev => "eV",
            EnergyUnit::MeV => "MeV",
        }
    }
}

impl std::str::FromStr for EnergyUnit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "internal" => Ok(EnergyUnit::Internal),
            "eV" | "ev" => Ok(EnergyUnit::Ev),
            "MeV" | "mev" => Ok(EnergyUnit::MeV),
            other => Err(Error::Invalid(format!(
                "unknown unit '{other}' (expected internal, eV or MeV)"
            ))),
        }
    }
}

/// Elastic CoM kinematics for one scattering configuration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComKinematics {
    pub m: f64,
    pub k: f64,
    /// cos of the angle between p and q.
    pub x: f64,
    pub p_vec: Vec3,
    pub q_vec: Vec3,
    /// sqrt(k^2 + m^2), energy of one electron.
    pub e_single: f64,
    /// Energy of the two-electron system.
    pub e_total: f64,
}

fn check_mass_momentum(m: f64, k: f64) -> Result<()> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::OutOfDomain {
            what: "m",
            value: m,
            domain: "m > 0",
        });
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::OutOfDomain {
            what: "k",
            value: k,
            domain: "k > 0",
        });
    }
    Ok(())
}

/// p along +z, q = k (sin theta, 0, cos theta).
pub fn build_kinematics(m: f64, k: f64, x: f64) -> Result<ComKinematics> {
    check_mass_momentum(m, k)?;
    if !(x.abs() <= 1.0) {
        return Err(Error::OutOfDomain {
            what: "x",
            value: x,
            domain: "|x| <= 1",
        });
    }
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    let e_single = k.hypot(m);
    Ok(ComKinematics {
        m,
        k,
        x,
        p_vec: Vec3::new(0.0, 0.0, k),
        q_vec: Vec3::new(k * sin_theta, 0.0, k * x),
        e_single,
        e_total: 2.0 * e_single,
    })
}

impl ComKinematics {
    /// Kinematics with arbitrary incoming/outgoing directions (normalized
    /// internally). Used by the two-sphere projection.
    pub fn with_directions(m: f64, k: f64, p_dir: Vec3, q_dir: Vec3) -> Result<ComKinematics> {
        check_mass_momentum(m, k)?;
        let (np, nq) = (p_dir.norm(), q_dir.norm());
        if !(np > 0.0) || !(nq > 0.0) {
            return Err(Error::Invalid("direction vectors must be nonzero".into()));
        }
        let p_hat = p_dir * (1.0 / np);
        let q_hat = q_dir * (1.0 / nq);
        let x = p_hat.dot(q_hat).clamp(-1.0, 1.0);
        let e_single = k.hypot(m);
        Ok(ComKinematics {
            m,
            k,
            x,
            p_vec: p_hat * k,
            q_vec: q_hat * k,
            e_single,
            e_total: 2.0 * e_single,
        })
    }

    pub fn p_dot_q(&self) -> f64 {
        self.q_vec.dot(self.p_vec)
    }

    pub fn q_cross_p(&self) -> Vec3 {
        self.q_vec.cross(self.p_vec)
    }
}

/// Which pairing of incoming and outgoing electrons the photon connects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    /// (p1 - p3)^2
    Direct,
    /// (p2 - p3)^2
    Exchange,
}

/// Minkowski momentum transfer squared minus alpha^2:
/// Direct = -(2k^2(1-x) + alpha^2), Exchange = -(2k^2(1+x) + alpha^2).
pub fn screened_denominator(kin: &ComKinematics, channel: Channel, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::OutOfDomain {
            what: "alpha",
            value: alpha,
            domain: "alpha >= 0",
        });
    }
    let k2 = kin.k * kin.k;
    let transfer = match channel {
        Channel::Direct => 2.0 * k2 * (1.0 - kin.x),
        Channel::Exchange => 2.0 * k2 * (1.0 + kin.x),
    };
    let d = -(transfer + alpha * alpha);
    if d == 0.0 {
        return Err(Error::ForwardSingularity { channel, x: kin.x });
    }
    Ok(d)
}
