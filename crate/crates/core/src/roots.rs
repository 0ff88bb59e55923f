//! Fourth and eighth roots of unity stored as exponents.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg};
use std::str::FromStr;

use nalgebra::Complex;

/// `i^t` for `t` in `0..4`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mod4Exponent(u8);

impl Mod4Exponent {
    pub const ONE: Self = Self(0);
    pub const I: Self = Self(1);
    pub const MINUS_ONE: Self = Self(2);
    pub const MINUS_I: Self = Self(3);

    pub fn new(t: i64) -> Self {
        Self(t.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_eighth(self) -> EighthRoot {
        EighthRoot(2 * self.0)
    }

    pub fn to_complex(self) -> Complex<f64> {
        match self.0 {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        }
    }

    pub fn token(self) -> &'static str {
        ["1", "i", "-1", "-i"][self.0 as usize]
    }
}

impl Add for Mod4Exponent {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self((self.0 + rhs.0) % 4)
    }
}

impl AddAssign for Mod4Exponent {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Neg for Mod4Exponent {
    type Output = Self;
    /// Complex conjugate (inverse) of the root.
    fn neg(self) -> Self {
        Self((4 - self.0) % 4)
    }
}

impl fmt::Display for Mod4Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Mod4Exponent {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "1" => Ok(Self::ONE),
            "i" => Ok(Self::I),
            "-1" => Ok(Self::MINUS_ONE),
            "-i" => Ok(Self::MINUS_I),
            _ => Err(format!("`{s}` is not one of 1, i, -1, -i")),
        }
    }
}

/// `e^{i pi t / 4}` for `t` in `0..8`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EighthRoot(u8);

impl EighthRoot {
    pub const ONE: Self = Self(0);

    pub fn new(t: i64) -> Self {
        Self(t.rem_euclid(8) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    /// `Some(i^(t/2))` when the root is a fourth root of unity.
    pub fn as_mod4(self) -> Option<Mod4Exponent> {
        self.0.is_multiple_of(2).then_some(Mod4Exponent(self.0 / 2))
    }

    pub fn pow(self, k: u64) -> Self {
        Self(((self.0 as u64 * (k % 8)) % 8) as u8)
    }

    pub fn to_complex(self) -> Complex<f64> {
        Complex::from_polar(1.0, std::f64::consts::FRAC_PI_4 * self.0 as f64)
    }
}

impl Add for EighthRoot {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self((self.0 + rhs.0) % 8)
    }
}

impl Mul<u64> for EighthRoot {
    type Output = Self;
    fn mul(self, k: u64) -> Self {
        self.pow(k)
    }
}

impl Neg for EighthRoot {
    type Output = Self;
    fn neg(self) -> Self {
        Self((8 - self.0) % 8)
    }
}
