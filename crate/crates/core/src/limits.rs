use serde::Serialize;

/// Enumeration and arithmetic caps shared by all operations.
///
/// Exceeding any cap is reported as an error, never silently sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    /// Largest set of ring elements (or matrices) that may be enumerated.
    pub elements: u128,
    /// Largest number of candidate maps that may be examined.
    pub maps: u128,
    /// Degree cap for Gröbner computations and standard monomials.
    pub degree: u32,
    /// Bit-size cap for rational coefficients.
    pub coefficient_bits: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            elements: 1_000_000,
            maps: 10_000_000,
            degree: 48,
            coefficient_bits: 4096,
        }
    }
}

impl Limits {
    pub(crate) fn check_elements(&self, what: &str, needed: u128) -> crate::Result<()> {
        if needed > self.elements {
            return Err(crate::Error::CapExceeded { what: what.to_string(), needed, cap: self.elements });
        }
        Ok(())
    }

    pub(crate) fn check_maps(&self, what: &str, needed: u128) -> crate::Result<()> {
        if needed > self.maps {
            return Err(crate::Error::CapExceeded { what: what.to_string(), needed, cap: self.maps });
        }
        Ok(())
    }
}
