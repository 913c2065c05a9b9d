/// Numerical tolerances shared by every computation in the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Stochasticity checks on distributions and kernels.
    pub prob: f64,
    /// Feasibility residuals of linear programs.
    pub lp: f64,
    /// Deduplication radius (infinity norm) for polytope vertices.
    pub vertex: f64,
    /// Pivot threshold for rank computations.
    pub rank: f64,
    /// Entropy comparisons, in bits.
    pub ent: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            prob: 1e-9,
            lp: 1e-9,
            vertex: 1e-8,
            rank: 1e-10,
            ent: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn is_valid(&self) -> bool {
        [self.prob, self.lp, self.vertex, self.rank, self.ent]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0)
    }
}
