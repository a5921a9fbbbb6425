//! Exact LUT quantities in hundredths of a LUT.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_rational::Ratio;

/// LUT count with 0.01 granularity. Every cost in the model is a multiple of
/// 0.05, so hundredths keep all sums exact.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Luts(i64);

impl Luts {
    pub const ZERO: Luts = Luts(0);

    pub const fn from_hundredths(h: i64) -> Self {
        Luts(h)
    }

    pub const fn whole(n: i64) -> Self {
        Luts(n * 100)
    }

    pub const fn hundredths(self) -> i64 {
        self.0
    }

    /// Compression surrogate of 0.65 LUT per output bit.
    pub const fn compression_surrogate(w_out: u32) -> Self {
        Luts(65 * w_out as i64)
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64 / 100.0
    }

    pub fn ratio(self) -> Ratio<i64> {
        Ratio::new(self.0, 100)
    }

    /// Integer part, for comparisons with physical LUT tallies.
    pub fn floor(self) -> i64 {
        self.0.div_euclid(100)
    }
}

impl Add for Luts {
    type Output = Luts;
    fn add(self, rhs: Luts) -> Luts {
        Luts(self.0 + rhs.0)
    }
}

impl AddAssign for Luts {
    fn add_assign(&mut self, rhs: Luts) {
        self.0 += rhs.0;
    }
}

impl Sub for Luts {
    type Output = Luts;
    fn sub(self, rhs: Luts) -> Luts {
        Luts(self.0 - rhs.0)
    }
}

impl Mul<i64> for Luts {
    type Output = Luts;
    fn mul(self, rhs: i64) -> Luts {
        Luts(self.0 * rhs)
    }
}

impl Sum for Luts {
    fn sum<I: Iterator<Item = Luts>>(iter: I) -> Luts {
        iter.fold(Luts::ZERO, Add::add)
    }
}

impl fmt::Display for Luts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let a = self.0.abs();
        let (int, frac) = (a / 100, a % 100);
        match frac {
            0 => write!(f, "{sign}{int}"),
            x if x % 10 == 0 => write!(f, "{sign}{int}.{}", x / 10),
            x => write!(f, "{sign}{int}.{x:02}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_trims_zeros() {
        assert_eq!(Luts::from_hundredths(890).to_string(), "8.9");
        assert_eq!(Luts::from_hundredths(2665).to_string(), "26.65");
        assert_eq!(Luts::whole(13).to_string(), "13");
        assert_eq!(Luts::from_hundredths(-5).to_string(), "-0.05");
    }

    #[test]
    fn surrogate() {
        assert_eq!(Luts::compression_surrogate(41), Luts::from_hundredths(2665));
    }
}
