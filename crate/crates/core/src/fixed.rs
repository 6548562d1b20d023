//! Exact half-up rounding of ratios to a fixed number of decimal places.

use std::fmt;

use serde::{Serialize, Serializer};

/// A non-negative decimal stored as an integer count of `10^-places` units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fixed {
    units: u64,
    places: u8,
}

impl Fixed {
    /// `numerator / denominator` rounded half-up. `None` when the
    /// denominator is zero.
    pub fn ratio(numerator: u64, denominator: u64, places: u8) -> Option<Fixed> {
        if denominator == 0 {
            return None;
        }
        let scale = 10u128.pow(places as u32);
        let n = numerator as u128 * scale;
        let d = denominator as u128;
        let units = (2 * n + d) / (2 * d);
        Some(Fixed {
            units: units as u64,
            places,
        })
    }

    /// `100 * part / whole`, half-up at `places` decimals.
    pub fn percent(part: u64, whole: u64, places: u8) -> Option<Fixed> {
        Fixed::ratio(part.checked_mul(100)?, whole, places)
    }

    pub fn zero(places: u8) -> Fixed {
        Fixed { units: 0, places }
    }

    pub fn units(self) -> u64 {
        self.units
    }

    pub fn places(self) -> u8 {
        self.places
    }

    pub fn as_f64(self) -> f64 {
        self.units as f64 / 10f64.powi(self.places as i32)
    }
}

impl fmt::Display for Fixed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.places == 0 {
            return write!(f, "{}", self.units);
        }
        let scale = 10u64.pow(self.places as u32);
        write!(
            f,
            "{}.{:0width$}",
            self.units / scale,
            self.units % scale,
            width = self.places as usize
        )
    }
}

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_up_at_exact_midpoint() {
        // 1/8 = 0.125 -> 0.13
        assert_eq!(Fixed::ratio(1, 8, 2).unwrap().to_string(), "0.13");
        // 0.05 -> 0.1
        assert_eq!(Fixed::ratio(1, 20, 1).unwrap().to_string(), "0.1");
    }

    #[test]
    fn percent_formatting_keeps_trailing_zeros() {
        assert_eq!(Fixed::percent(11, 2179, 2).unwrap().to_string(), "0.50");
        assert_eq!(Fixed::percent(1, 1, 1).unwrap().to_string(), "100.0");
        assert_eq!(Fixed::percent(0, 100, 1).unwrap().to_string(), "0.0");
    }

    #[test]
    fn zero_denominator_is_undefined() {
        assert!(Fixed::percent(3, 0, 1).is_none());
    }

    #[test]
    fn ratio_two_places() {
        assert_eq!(Fixed::ratio(10, 5, 2).unwrap().to_string(), "2.00");
        assert_eq!(Fixed::ratio(0, 5, 2).unwrap().to_string(), "0.00");
    }
}
