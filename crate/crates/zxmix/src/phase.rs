//! Spider phases: exact rational multiples of π with a float escape hatch.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64 as C64;
use num_rational::Rational64 as R64;
use num_traits::{One, Zero};

/// Tolerance used when comparing float-valued phases.
pub const PHASE_EPSILON: f64 = 1e-12;

/// A spider phase in `[0, 2π)`.
///
/// The rational variant stores the phase as a reduced fraction of π, so that
/// rules relying on exact phase arithmetic (π-commutation, copying) can fire
/// without numeric slack. Irrational phases fall back to a plain float in
/// radians.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Phase {
    /// `r · π` with `r` reduced and normalized into `[0, 2)`.
    Rational(R64),
    /// Radians, normalized into `[0, 2π)`.
    Float(f64),
}

impl Phase {
    /// Phase `(num / den) · π`, reduced and normalized into `[0, 2π)`.
    ///
    /// Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "phase denominator must be nonzero");
        Self::Rational(normalize_turns(R64::new(num, den)))
    }

    /// The zero phase.
    pub fn zero() -> Self { Self::new(0, 1) }

    /// The phase π.
    pub fn pi() -> Self { Self::new(1, 1) }

    /// A float phase from radians, normalized into `[0, 2π)`.
    ///
    /// Panics on non-finite input.
    pub fn from_radians(rad: f64) -> Self {
        assert!(rad.is_finite(), "phase must be finite");
        Self::Float(rad.rem_euclid(TAU))
    }

    /// The phase value in radians.
    pub fn radians(&self) -> f64 {
        match self {
            Self::Rational(r) => rational_to_f64(*r) * PI,
            Self::Float(v) => *v,
        }
    }

    /// `true` if this is the rational variant.
    pub fn is_rational(&self) -> bool { matches!(self, Self::Rational(_)) }

    /// `true` if the phase is exactly 0 (rational) or 0.0 (float).
    pub fn is_zero(&self) -> bool {
        match self {
            Self::Rational(r) => r.is_zero(),
            Self::Float(v) => *v == 0.0,
        }
    }

    /// `true` if the phase is exactly π.
    pub fn is_pi(&self) -> bool {
        match self {
            Self::Rational(r) => r.is_one(),
            Self::Float(v) => *v == PI,
        }
    }

    /// Sum of two phases, mod 2π. Rational + rational stays exact.
    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Self::Rational(a), Self::Rational(b)) => {
                Self::Rational(normalize_turns(a + b))
            }
            _ => Self::from_radians(self.radians() + other.radians()),
        }
    }

    /// Negation mod 2π. Exact for rationals.
    pub fn neg(&self) -> Self {
        match self {
            Self::Rational(r) => Self::Rational(normalize_turns(-r)),
            Self::Float(v) => Self::Float((-v).rem_euclid(TAU)),
        }
    }

    /// `e^{iα}`, with exact values at the axis phases 0, π/2, π, 3π/2.
    pub fn cexp(&self) -> C64 {
        if let Self::Rational(r) = self {
            let (n, d) = (*r.numer(), *r.denom());
            match (n, d) {
                (0, _) => return C64::new(1.0, 0.0),
                (1, 1) => return C64::new(-1.0, 0.0),
                (1, 2) => return C64::new(0.0, 1.0),
                (3, 2) => return C64::new(0.0, -1.0),
                _ => {}
            }
        }
        let v = self.radians();
        C64::new(v.cos(), v.sin())
    }

    /// Compare phases: exact for rational/rational, within
    /// [`PHASE_EPSILON`] (mod 2π) whenever a float is involved.
    pub fn approx_eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Rational(a), Self::Rational(b)) => a == b,
            _ => {
                let d = (self.radians() - other.radians()).abs();
                d.min(TAU - d) <= PHASE_EPSILON
            }
        }
    }

    /// Byte key for canonical forms; distinguishes the two variants and is
    /// exact on the stored representation.
    pub(crate) fn key_bytes(&self) -> [u8; 17] {
        let mut out = [0u8; 17];
        match self {
            Self::Rational(r) => {
                out[0] = 0;
                out[1..9].copy_from_slice(&r.numer().to_le_bytes());
                out[9..17].copy_from_slice(&r.denom().to_le_bytes());
            }
            Self::Float(v) => {
                out[0] = 1;
                out[1..9].copy_from_slice(&v.to_bits().to_le_bytes());
            }
        }
        out
    }
}

/// Reduce a phase expressed in units of π into `[0, 2)`.
fn normalize_turns(r: R64) -> R64 {
    let two = R64::from_integer(2);
    let mut m = r % two;
    if m < R64::zero() {
        m += two;
    }
    m
}

fn rational_to_f64(r: R64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rational(r) if r.is_zero() => write!(f, "0"),
            Self::Rational(r) if r.is_one() => write!(f, "π"),
            Self::Rational(r) if *r.denom() == 1 => write!(f, "{}π", r.numer()),
            Self::Rational(r) if *r.numer() == 1 => write!(f, "π/{}", r.denom()),
            Self::Rational(r) => write!(f, "{}π/{}", r.numer(), r.denom()),
            Self::Float(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(Phase::new(5, 2), Phase::new(1, 2));
        assert_eq!(Phase::new(-1, 4), Phase::new(7, 4));
        assert_eq!(Phase::new(2, 4), Phase::new(1, 2));
        assert_eq!(Phase::new(4, 2), Phase::zero());
        assert_eq!(Phase::new(1, -2), Phase::new(3, 2));
    }

    #[test]
    fn addition_stays_exact() {
        let a = Phase::new(1, 4);
        assert_eq!(a.add(&a), Phase::new(1, 2));
        assert_eq!(Phase::new(7, 4).add(&Phase::new(1, 2)), Phase::new(1, 4));
        // float contaminates
        let f = Phase::from_radians(0.1);
        assert!(!a.add(&f).is_rational());
    }

    #[test]
    fn negation() {
        assert_eq!(Phase::new(1, 4).neg(), Phase::new(7, 4));
        assert_eq!(Phase::zero().neg(), Phase::zero());
        assert_eq!(Phase::pi().neg(), Phase::pi());
    }

    #[test]
    fn axis_phases_are_exact() {
        assert_eq!(Phase::zero().cexp(), C64::new(1.0, 0.0));
        assert_eq!(Phase::pi().cexp(), C64::new(-1.0, 0.0));
        assert_eq!(Phase::new(1, 2).cexp(), C64::new(0.0, 1.0));
        assert_eq!(Phase::new(3, 2).cexp(), C64::new(0.0, -1.0));
    }

    #[test]
    fn approx_eq_wraps() {
        let a = Phase::from_radians(1e-13);
        let b = Phase::from_radians(TAU - 1e-13);
        assert!(a.approx_eq(&b));
        assert!(Phase::new(1, 3).approx_eq(&Phase::from_radians(PI / 3.0)));
    }
}
