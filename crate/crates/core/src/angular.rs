//! Angular-momentum structure of motion around the monopole.
//!
//! With a monopole of charge q = g/2 at the origin, the conserved angular
//! momentum is L = r × (p − A) − q·e_r rather than the bare orbital operator,
//! and its spectrum starts at l = |q| instead of 0: the allowed values are
//! l = |q|, |q|+1, … with m = −l … l, all half-integers when g is odd. The simultaneous eigensections of L² and L_z are the monopole
//! harmonics
//!
//! ```text
//! Y_{q,l,m}(θ, φ) = √((2l+1)/4π) · d^l_{−m,q}(θ) · e^{i(m±q)φ} ,
//! ```
//!
//! built from the small Wigner-d matrix; the upper sign lives on patch A
//! (regular at θ = 0), the lower on patch B (regular at θ = π), and the two
//! differ by the transition function e^{−2iqφ} — the inverse of the dark
//! section's e^{igφ}, since the centre-of-mass amplitude must unwind the
//! internal section for the total state to stay single-valued.
//!
//! The free radial problem at energy E > 0 separates on these harmonics and
//! is solved by J_μ(kr)/√(kr) with k = √(2(M/ħ)E) and the shifted index
//! μ = √(l(l+1) − q² + ¼): the monopole moves the centrifugal barrier from
//! l(l+1) to l(l+1) − q².

use num_complex::Complex64;

use crate::fields::{AtomConfig, Patch};
use crate::special::{bessel_j, ln_factorial};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AngularError {
    #[error("invalid quantum numbers: {0}")]
    InvalidQuantum(String),
}

/// Half-integer stored exactly as twice its value, so admissibility checks
/// never go through floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i32);

impl HalfInt {
    /// The half-integer d/2.
    pub const fn from_doubled(d: i32) -> HalfInt {
        HalfInt(d)
    }

    /// The integer n as a half-integer.
    pub const fn from_int(n: i32) -> HalfInt {
        HalfInt(2 * n)
    }

    /// g/2 for an integer g.
    pub const fn half_of(g: i32) -> HalfInt {
        HalfInt(g)
    }

    pub const fn doubled(self) -> i32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        0.5 * f64::from(self.0)
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    pub const fn abs(self) -> HalfInt {
        HalfInt(self.0.abs())
    }
}

impl std::ops::Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl std::ops::Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl std::ops::Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl std::fmt::Display for HalfInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Validated (q, l, m) triple for motion around a monopole of charge q.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonopoleQuantum {
    q: HalfInt,
    l: HalfInt,
    m: HalfInt,
}

impl MonopoleQuantum {
    pub fn new(q: HalfInt, l: HalfInt, m: HalfInt) -> Result<MonopoleQuantum, AngularError> {
        let (qd, ld, md) = (q.doubled(), l.doubled(), m.doubled());
        if ld < qd.abs() || (ld - qd.abs()) % 2 != 0 {
            return Err(AngularError::InvalidQuantum(format!(
                "l = {l} must be |q|, |q|+1, … for q = {q}"
            )));
        }
        if md.abs() > ld || (ld - md) % 2 != 0 {
            return Err(AngularError::InvalidQuantum(format!(
                "m = {m} must run over −l … l in integer steps for l = {l}"
            )));
        }
        Ok(MonopoleQuantum { q, l, m })
    }

    pub fn q(&self) -> HalfInt {
        self.q
    }

    pub fn l(&self) -> HalfInt {
        self.l
    }

    pub fn m(&self) -> HalfInt {
        self.m
    }
}

/// First `count` allowed l values for winding number g: |g|/2, |g|/2 + 1, …
pub fn allowed_l(g: i32, count: usize) -> Vec<HalfInt> {
    (0..count)
        .map(|i| HalfInt::from_doubled(g.abs() + 2 * i as i32))
        .collect()
}

/// Shifted Bessel index μ = √(l(l+1) − (g/2)² + ¼) = √((2l+1)² − g²)/2.
///
/// The radicand is computed in integers, so admissible inputs can never go
/// negative by rounding; it is bounded below by |g| + 1 > 0.
pub fn mu_index(l: HalfInt, g: i32) -> Result<f64, AngularError> {
    let ld = l.doubled();
    if ld < g.abs() || (ld - g.abs()) % 2 != 0 {
        return Err(AngularError::InvalidQuantum(format!(
            "l = {l} is not an allowed level for winding g = {g}"
        )));
    }
    let ld = i64::from(ld);
    let g = i64::from(g);
    let radicand = (ld + 1) * (ld + 1) - g * g;
    Ok(0.5 * (radicand as f64).sqrt())
}

/// Free radial solution R(r) = J_μ(kr)/√(kr) at energy E > 0.
pub fn free_radial(
    l: HalfInt,
    g: i32,
    energy: f64,
    atom: &AtomConfig,
    r: f64,
) -> Result<f64, AngularError> {
    assert!(energy > 0.0, "free states need E > 0, got {energy}");
    assert!(r > 0.0, "radius must be positive, got {r}");
    let mu = mu_index(l, g)?;
    let k = (2.0 * atom.mass_over_hbar * energy).sqrt();
    let x = k * r;
    Ok(bessel_j(mu, x) / x.sqrt())
}

/// Small Wigner-d matrix element d^l_{m1,m2}(β) for β ∈ [0, π].
///
/// Evaluated by the log-factorial sum with sign-tracked terms; exact at the
/// endpoints, where d^l(0) = δ_{m1,m2}.
pub fn wigner_d(l: HalfInt, m1: HalfInt, m2: HalfInt, beta: f64) -> Result<f64, AngularError> {
    assert!(
        (0.0..=std::f64::consts::PI).contains(&beta),
        "β is a colatitude, got {beta}"
    );
    let (ld, m1d, m2d) = (l.doubled(), m1.doubled(), m2.doubled());
    if ld < 0 || m1d.abs() > ld || m2d.abs() > ld || (ld - m1d) % 2 != 0 || (ld - m2d) % 2 != 0 {
        return Err(AngularError::InvalidQuantum(format!(
            "indices (l, m1, m2) = ({l}, {m1}, {m2}) are not a valid d-matrix element"
        )));
    }
    let j_plus_m = i64::from((ld + m2d) / 2);
    let j_minus_m = i64::from((ld - m2d) / 2);
    let j_plus_m1 = i64::from((ld + m1d) / 2);
    let j_minus_m1 = i64::from((ld - m1d) / 2);
    let t = i64::from((m1d - m2d) / 2);

    let prefactor = 0.5
        * (ln_factorial(j_plus_m1 as usize)
            + ln_factorial(j_minus_m1 as usize)
            + ln_factorial(j_plus_m as usize)
            + ln_factorial(j_minus_m as usize));
    let cos_half = (0.5 * beta).cos();
    let sin_half = (0.5 * beta).sin();

    let mut sum = 0.0;
    for s in 0.max(-t)..=j_plus_m.min(j_minus_m1) {
        let exp_cos = i64::from(ld) - t - 2 * s;
        let exp_sin = t + 2 * s;
        let mut ln_mag = prefactor
            - ln_factorial((j_plus_m - s) as usize)
            - ln_factorial(s as usize)
            - ln_factorial((t + s) as usize)
            - ln_factorial((j_minus_m1 - s) as usize);
        if exp_cos > 0 {
            if cos_half == 0.0 {
                continue;
            }
            ln_mag += exp_cos as f64 * cos_half.ln();
        }
        if exp_sin > 0 {
            if sin_half == 0.0 {
                continue;
            }
            ln_mag += exp_sin as f64 * sin_half.ln();
        }
        let term = ln_mag.exp();
        sum += if (t + s) % 2 == 0 { term } else { -term };
    }
    Ok(sum)
}

/// Monopole harmonic Y_{q,l,m}(θ, φ) on a gauge patch.
///
/// Patch A carries the phase e^{i(m+q)φ} and is regular at the north pole;
/// patch B carries e^{i(m−q)φ} and is regular at the south pole. m ± q is
/// always an integer, so each section is single-valued on its patch.
pub fn monopole_harmonic(
    q: HalfInt,
    l: HalfInt,
    m: HalfInt,
    theta: f64,
    phi: f64,
    patch: Patch,
) -> Result<Complex64, AngularError> {
    let quantum = MonopoleQuantum::new(q, l, m)?;
    let norm = ((f64::from(l.doubled()) + 1.0) / (4.0 * std::f64::consts::PI)).sqrt();
    let d = wigner_d(quantum.l, -quantum.m, quantum.q, theta)?;
    let winding = match patch {
        Patch::A => (m.doubled() + q.doubled()) / 2,
        Patch::B => (m.doubled() - q.doubled()) / 2,
    };
    Ok(Complex64::from_polar(norm * d, f64::from(winding) * phi))
}
