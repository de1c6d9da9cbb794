use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{CouplerError, Result};

/// Finite-difference approximation of −d²/dφ² used for the kinetic term.
///
/// `TightBinding` is the nearest-neighbour hopping form. Its O(dφ²) error
/// shifts the anharmonicity by several percent at practical grid sizes,
/// which propagates directly into the diagonal coupling; the sixth-order
/// stencil removes that dependence and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum KineticStencil {
    TightBinding,
    FourthOrder,
    #[default]
    SixthOrder,
}

impl KineticStencil {
    /// Coefficients of dφ²·(−d²/dφ²): diagonal first, then the offsets
    /// ±1, ±2, ...
    pub fn coefficients(self) -> &'static [f64] {
        match self {
            KineticStencil::TightBinding => &[2.0, -1.0],
            KineticStencil::FourthOrder => &[5.0 / 2.0, -4.0 / 3.0, 1.0 / 12.0],
            KineticStencil::SixthOrder => &[49.0 / 18.0, -3.0 / 2.0, 3.0 / 20.0, -1.0 / 90.0],
        }
    }

    pub fn reach(self) -> usize {
        self.coefficients().len() - 1
    }

    pub fn name(self) -> &'static str {
        match self {
            KineticStencil::TightBinding => "tight-binding",
            KineticStencil::FourthOrder => "fourth-order",
            KineticStencil::SixthOrder => "sixth-order",
        }
    }
}

impl std::str::FromStr for KineticStencil {
    type Err = CouplerError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tight-binding" => Ok(KineticStencil::TightBinding),
            "fourth-order" => Ok(KineticStencil::FourthOrder),
            "sixth-order" => Ok(KineticStencil::SixthOrder),
            other => Err(CouplerError::InvalidGrid(format!(
                "unknown stencil '{other}' (expected tight-binding, fourth-order or sixth-order)"
            ))),
        }
    }
}

/// Uniform phase grid `{−span, −span + dφ, …, 0, …, span}` on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub span: f64,
    #[serde(default)]
    pub stencil: KineticStencil,
}

/// Smallest grid considered converged enough for production sweeps.
pub const PRODUCTION_MIN_POINTS: usize = 31;

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_points: 61,
            span: PI,
            stencil: KineticStencil::default(),
        }
    }
}

impl GridSpec {
    pub fn new(n_points: usize, span: f64) -> Result<Self> {
        let grid = Self {
            n_points,
            span,
            stencil: KineticStencil::default(),
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn with_stencil(mut self, stencil: KineticStencil) -> Self {
        self.stencil = stencil;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points.is_multiple_of(2) {
            return Err(CouplerError::InvalidGrid(format!(
                "n_points must be odd so that phi = 0 is a grid point, got {}",
                self.n_points
            )));
        }
        if self.n_points < 2 * self.stencil.reach() + 1 {
            return Err(CouplerError::InvalidGrid(format!(
                "n_points = {} is too small for the {} stencil",
                self.n_points,
                self.stencil.name()
            )));
        }
        if !(self.span.is_finite() && self.span > 0.0) {
            return Err(CouplerError::InvalidGrid(format!(
                "span must be positive, got {}",
                self.span
            )));
        }
        Ok(())
    }

    pub fn is_production(&self) -> bool {
        self.n_points >= PRODUCTION_MIN_POINTS
    }

    pub fn d_phi(&self) -> f64 {
        2.0 * self.span / (self.n_points - 1) as f64
    }

    /// Index of φ = 0.
    pub fn center(&self) -> usize {
        self.n_points / 2
    }

    pub fn point(&self, i: usize) -> f64 {
        // symmetric about the centre so that mirrored points are exact negatives
        (i as f64 - self.center() as f64) * self.d_phi()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }
}
