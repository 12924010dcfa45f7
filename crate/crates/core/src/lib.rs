//! Diagnostics for weighted composition operators `u C_φ` from weighted
//! Bergman spaces `A^p_α` and Hardy spaces `H^p` into the Bloch space.
//!
//! Every characterization of boundedness, compactness and the essential
//! norm is computed independently on a boundary-refined polar grid and the
//! verdicts are cross-checked:
//!
//! * the direct boundary ratios `P` and `Q`,
//! * the test-function families `f_a, g_a` (Bergman) or `p_a, q_a` (Hardy),
//! * the power sequences `j^σ ‖I_u(φ^j)‖_B` and `j^σ ‖J_u(φ^{j-1})‖_B`.

pub mod criteria;
pub mod disk;
pub mod oracle;
pub mod report;
pub mod spaces;
pub mod symbol;

pub use criteria::{analyze, AnalysisConfig, Classification, DiagnosticsReport};
pub use disk::{build_grid, DiskGrid, SupEstimate, TailEstimate, Trend, TrendRule};
pub use spaces::SpaceSpec;
pub use symbol::{parse_symbol, AnalyticSymbol};
