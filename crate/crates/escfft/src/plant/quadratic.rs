//! Univariate quadratic static map.

/// `J(u) = curvature * (u - optimum)^2 + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticMap {
    pub curvature: f64,
    pub optimum: f64,
    pub offset: f64,
}

impl QuadraticMap {
    pub fn cost(&self, u: f64) -> f64 {
        let e = u - self.optimum;
        self.curvature * e * e + self.offset
    }

    /// Analytic derivative, handy as a test oracle.
    pub fn derivative(&self, u: f64) -> f64 {
        2.0 * self.curvature * (u - self.optimum)
    }
}
