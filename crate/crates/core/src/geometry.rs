//! Positions and local frame vectors.
//!
//! Everything downstream works in beam-fixed coordinates: the two beams
//! propagate along +z and their intensity profiles are functions of the
//! spherical radius r, the colatitude θ measured from +z, and the azimuth φ.
//! The azimuth is conventionally 0 on the z axis itself so that points there
//! still evaluate to something definite.

use serde::{Deserialize, Serialize};

/// Cartesian 3-vector.
pub type Vec3 = [f64; 3];

/// Dot product.
pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Euclidean norm.
pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// Scale a vector.
pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Component-wise sum.
pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Component-wise difference.
pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Cross product.
pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// A point in the beam-fixed frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Build from spherical coordinates (r, θ, φ), θ from the +z axis.
    pub fn from_spherical(r: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = (theta.sin(), theta.cos());
        let (sp, cp) = (phi.sin(), phi.cos());
        Self::new(r * st * cp, r * st * sp, r * ct)
    }

    /// Build from cylindrical coordinates (ρ, φ, z).
    pub fn from_cylindrical(rho: f64, phi: f64, z: f64) -> Self {
        Self::new(rho * phi.cos(), rho * phi.sin(), z)
    }

    /// Spherical radius.
    pub fn r(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Cylindrical radius.
    pub fn rho(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Colatitude in [0, π]; 0 at the origin.
    pub fn theta(&self) -> f64 {
        self.rho().atan2(self.z)
    }

    /// Azimuth in (−π, π]; defined as 0 anywhere on the z axis.
    pub fn phi(&self) -> f64 {
        if self.x == 0.0 && self.y == 0.0 {
            0.0
        } else {
            self.y.atan2(self.x)
        }
    }

    pub fn as_array(&self) -> Vec3 {
        [self.x, self.y, self.z]
    }

    /// Radial unit vector; e_z at the origin.
    pub fn unit_radial(&self) -> Vec3 {
        let r = self.r();
        if r == 0.0 {
            [0.0, 0.0, 1.0]
        } else {
            [self.x / r, self.y / r, self.z / r]
        }
    }

    /// Azimuthal unit vector e_φ = (−sin φ, cos φ, 0); e_y on the z axis.
    pub fn unit_azimuthal(&self) -> Vec3 {
        let p = self.phi();
        [-p.sin(), p.cos(), 0.0]
    }

    /// Polar unit vector e_θ = e_φ × e_r.
    pub fn unit_polar(&self) -> Vec3 {
        cross(self.unit_azimuthal(), self.unit_radial())
    }

    /// Displace by `h` along a Cartesian axis (0 = x, 1 = y, 2 = z).
    pub fn step(&self, axis: usize, h: f64) -> Self {
        let mut p = *self;
        match axis {
            0 => p.x += h,
            1 => p.y += h,
            _ => p.z += h,
        }
        p
    }
}
