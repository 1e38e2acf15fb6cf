//! Residual certification on grids and an independent integration check.

mod grid;
mod rk;

pub use grid::{grid_scan, tabulate, GridReport, TableRow};
pub use rk::{crosscheck, crosscheck_from, rk_integrate, StepStats, Trajectory, TrajectoryPoint};

use crate::chart::StructureFunction;
use crate::error::{Error, Result};
use crate::jetcalc::Jet;

/// Residual of an equation at one point, with the magnitude of its dominant
/// terms. The relative residual is `|value| / (1 + scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        self.value.abs() / (1.0 + self.scale)
    }
}

/// A second-order equation `y'' = a(z, y, y')` that can both judge a
/// candidate jet and drive an integrator.
pub trait Equation: Send + Sync {
    fn describe(&self) -> String;

    /// Residual of the equation for the jet `y` (order >= 2) at `y.point()`.
    fn residual(&self, y: &Jet) -> Result<Residual>;

    /// `y''` solved from the equation.
    fn acceleration(&self, z: f64, y: f64, dy: f64) -> Result<f64>;
}

/// `y y'' = F(z, y^2)` for any structure function, written as
/// `y'' - F(z, y^2) / y`.
pub struct StructureEquation<F> {
    rhs: F,
    name: String,
}

impl<F: StructureFunction> StructureEquation<F> {
    pub fn new(rhs: F, name: impl Into<String>) -> Self {
        Self { rhs, name: name.into() }
    }
}

impl<F: StructureFunction> Equation for StructureEquation<F> {
    fn describe(&self) -> String {
        self.name.clone()
    }

    fn residual(&self, y: &Jet) -> Result<Residual> {
        let z = y.point();
        let v = y.value();
        if !(v > 0.0) {
            return Err(Error::domain("y must be positive", z));
        }
        let f = self.rhs.eval(z, v * v)?;
        Ok(Residual {
            value: y.d(2) - f / v,
            scale: self.rhs.magnitude(z, v * v)? / v,
        })
    }

    fn acceleration(&self, z: f64, y: f64, _dy: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::SolutionEscape { at: z, value: y });
        }
        Ok(self.rhs.eval(z, y * y)? / y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::{jet_eval, Expr};

    #[test]
    fn structure_equation_on_exact_solution() {
        // y = e^z solves y y'' = y^2, i.e. F(z, v) = v.
        let eq = StructureEquation::new(|_z: f64, v: f64| Ok(v), "y'' = y");
        let j = jet_eval(&Expr::var().exp(), 0.3, 2).unwrap();
        let r = eq.residual(&j).unwrap();
        assert!(r.value.abs() < 1e-15);
        assert!((eq.acceleration(0.0, 2.0, 0.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(eq.acceleration(0.0, -1.0, 0.0).is_err());
    }
}
