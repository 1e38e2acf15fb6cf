use rayon::prelude::*;

use super::{Equation, Residual};
use crate::chart::{Interval, SolutionEvaluator};
use crate::error::{Error, Result};

/// Outcome of a residual scan over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridReport {
    pub n_points: usize,
    pub tolerance: f64,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    /// Location of the largest relative residual.
    pub argmax_z: f64,
    /// Points whose relative residual exceeds the tolerance, as `(z, residual)`.
    pub failures: Vec<(f64, f64)>,
}

impl GridReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

fn check_interval(sol: &SolutionEvaluator, interval: &Interval) -> Result<()> {
    if sol.domain().contains_interval(interval) {
        Ok(())
    } else {
        let d = sol.domain();
        Err(Error::InvalidParameter(format!(
            "scan interval [{}, {}] leaves the solution domain [{}, {}]",
            interval.lo, interval.hi, d.lo, d.hi
        )))
    }
}

/// Evaluates the residual of `eq` for `sol` at `n` points of `interval`
/// (log-spaced on positive intervals) and flags relative residuals above `tol`.
///
/// Points are evaluated in parallel; the report does not depend on the order.
pub fn grid_scan(
    sol: &SolutionEvaluator,
    eq: &dyn Equation,
    interval: Interval,
    n: usize,
    tol: f64,
) -> Result<GridReport> {
    check_interval(sol, &interval)?;
    let pts = interval.grid(n)?;
    let residuals: Vec<(f64, Residual)> = pts
        .par_iter()
        .map(|&z| {
            let r = sol.jet(z, 2).and_then(|j| eq.residual(&j));
            r.map(|r| (z, r)).map_err(|e| e.at_point(z))
        })
        .collect::<Result<_>>()?;

    let mut report = GridReport {
        n_points: pts.len(),
        tolerance: tol,
        max_abs_residual: 0.0,
        max_rel_residual: 0.0,
        argmax_z: pts[0],
        failures: Vec::new(),
    };
    for (z, r) in residuals {
        let (abs, rel) = (r.value.abs(), r.relative());
        if !rel.is_finite() {
            return Err(Error::domain("non-finite residual", z).at_point(z));
        }
        report.max_abs_residual = report.max_abs_residual.max(abs);
        if rel > report.max_rel_residual {
            report.max_rel_residual = rel;
            report.argmax_z = z;
        }
        if rel > tol {
            report.failures.push((z, r.value));
        }
    }
    Ok(report)
}

/// One row of a solution table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableRow {
    pub z: f64,
    pub y: f64,
    pub dy: f64,
    pub d2y: f64,
    pub residual: f64,
}

/// Solution values, derivatives and residuals on the same grid as [`grid_scan`].
pub fn tabulate(sol: &SolutionEvaluator, eq: &dyn Equation, interval: Interval, n: usize) -> Result<Vec<TableRow>> {
    check_interval(sol, &interval)?;
    interval
        .grid(n)?
        .par_iter()
        .map(|&z| {
            let j = sol.jet(z, 2).map_err(|e| e.at_point(z))?;
            let r = eq.residual(&j).map_err(|e| e.at_point(z))?;
            Ok(TableRow {
                z,
                y: j.value(),
                dy: j.d(1),
                d2y: j.d(2),
                residual: r.value,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::Expr;
    use crate::verify::StructureEquation;

    #[test]
    fn exact_and_wrong_candidates() {
        let eq = StructureEquation::new(|_z: f64, v: f64| Ok(v), "y'' = y");
        let d = Interval::new(0.5, 3.0).unwrap();
        let good = SolutionEvaluator::closed(Expr::var().exp(), d);
        let r = grid_scan(&good, &eq, d, 50, 1e-12).unwrap();
        assert!(r.pass());
        assert_eq!(r.n_points, 50);
        let bad = SolutionEvaluator::closed(Expr::var(), d);
        let r = grid_scan(&bad, &eq, d, 50, 1e-8).unwrap();
        assert!(!r.pass());
        assert_eq!(r.failures.len(), 50);
    }

    #[test]
    fn errors_carry_the_grid_point() {
        let eq = StructureEquation::new(|_z: f64, v: f64| Ok(v), "y'' = y");
        let d = Interval::new(-1.0, 1.0).unwrap();
        let sol = SolutionEvaluator::closed(Expr::var(), d);
        match grid_scan(&sol, &eq, d, 3, 1e-8) {
            Err(Error::AtPoint { z, .. }) => assert_eq!(z, -1.0),
            other => panic!("{other:?}"),
        }
        let outside = Interval::new(-2.0, 1.0).unwrap();
        assert!(grid_scan(&sol, &eq, outside, 3, 1e-8).is_err());
    }

    #[test]
    fn table_rows_follow_grid() {
        let eq = StructureEquation::new(|_z: f64, v: f64| Ok(v), "y'' = y");
        let d = Interval::new(1.0, 4.0).unwrap();
        let sol = SolutionEvaluator::closed(Expr::var().exp(), d);
        let rows = tabulate(&sol, &eq, d, 3).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0].z, 1.0);
        assert!((rows[1].z - 2.0).abs() < 1e-15);
        assert!((rows[2].y - 4f64.exp()).abs() < 1e-12);
    }
}
