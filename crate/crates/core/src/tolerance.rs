//! Numeric tolerances shared by the Fourier, Bohr-set and structure code.
//!
//! Integer quantities (sumset sizes, representation counts, census totals)
//! are always compared exactly; these constants only apply to quantities that
//! pass through floating point.

/// Unit-modulus check for character values.
pub const CHARACTER_UNIT: f64 = 1e-12;

/// Bohr-set membership: `2|sin(pi * phase)| <= radius + BOHR_MEMBERSHIP`.
pub const BOHR_MEMBERSHIP: f64 = 1e-12;

/// Relative tolerance for the Parseval and inversion self-checks of the DFT.
pub const DFT_SELF_CHECK: f64 = 1e-9;

/// Inclusive-side slack for spectrum thresholds `|A^(chi)| >= eps |A|`,
/// applied relative to `max(1, |A|)`.
pub const SPECTRUM_THRESHOLD: f64 = 1e-9;

/// Inclusive-side slack for real-valued thresholds such as `delta * p`.
pub const THRESHOLD: f64 = 1e-9;

/// Distance from an integer below which `eps * N` is treated as integral.
pub const INTEGRALITY: f64 = 1e-9;
