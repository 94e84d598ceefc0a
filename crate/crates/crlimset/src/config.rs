//! All numeric tolerances in one place.
//!
//! The constructions here are exact in principle; doubles plus the thresholds
//! below stand in for exact arithmetic. Anything that compares floats reads
//! its cutoff from this record so a run has a single tolerance story.

/// Tolerance bundle used across the crate.
#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    /// Relative bound on ||M^T H conj(M) - H||_inf for accepting a group element.
    pub form_preservation: f64,
    /// Relative bound for |<v,v>| on boundary lifts.
    pub null_cone: f64,
    /// Sphere-equation bound for chart coordinates.
    pub s3_chart: f64,
    /// Goldman-sign dead zone and trace comparisons in classification.
    pub trace_classify: f64,
    /// |det M - 1| bound for det-normalized elements.
    pub unit_det: f64,
    /// Residual bound on the ball-chart diagonalization T.
    pub chart: f64,
    /// Relative eigenvalue-modulus gap under which a loxodromic is treated as degenerate.
    pub eigen_gap: f64,
    /// |det H| under which a Gram matrix is rejected as degenerate.
    pub gram_degenerate: f64,
    /// Default projective-equality tolerance (relators, witnesses).
    pub projective: f64,
    /// Exponent search bound for rank-one peripheral detection.
    pub peripheral_power_bound: i32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            form_preservation: 1e-9,
            null_cone: 1e-9,
            s3_chart: 1e-9,
            trace_classify: 1e-8,
            unit_det: 1e-10,
            chart: 1e-10,
            eigen_gap: 1e-10,
            gram_degenerate: 1e-12,
            projective: 1e-8,
            peripheral_power_bound: 12,
        }
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        form_preservation: 1e-9,
        null_cone: 1e-9,
        s3_chart: 1e-9,
        trace_classify: 1e-8,
        unit_det: 1e-10,
        chart: 1e-10,
        eigen_gap: 1e-10,
        gram_degenerate: 1e-12,
        projective: 1e-8,
        peripheral_power_bound: 12,
    };
}
