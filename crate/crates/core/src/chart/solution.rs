use std::fmt;
use std::sync::Arc;

use super::domain::Interval;
use crate::error::{Error, Result};
use crate::jetcalc::{jet_compose, Expr, Jet};

#[derive(Clone)]
enum Repr {
    Closed(Expr),
    /// `Y(z) = y(f(z)) / sqrt(f'(z))`.
    Backlund {
        base: Arc<SolutionEvaluator>,
        map: Expr,
    },
    /// `Y(z) = y(f(z)) * factor(z)` with a closed-form positive factor.
    Pullback {
        base: Arc<SolutionEvaluator>,
        map: Expr,
        factor: Expr,
    },
}

/// A solution `z -> y(z)` that can be evaluated as a jet, restricted to a
/// validity interval.
#[derive(Clone)]
pub struct SolutionEvaluator {
    repr: Repr,
    domain: Interval,
    positive: bool,
    label: String,
}

impl SolutionEvaluator {
    pub fn closed(expr: Expr, domain: Interval) -> Self {
        Self {
            label: format!("y(z) = {expr}"),
            repr: Repr::Closed(expr),
            domain,
            positive: true,
        }
    }

    pub(crate) fn backlund(base: &SolutionEvaluator, map: Expr, domain: Interval) -> Self {
        Self {
            label: format!("B2[{}; f(z) = {map}]", base.label),
            repr: Repr::Backlund {
                base: Arc::new(base.clone()),
                map,
            },
            domain,
            positive: true,
        }
    }

    /// `y(f(z)) * factor(z)`; the factor must stay positive on `domain`.
    pub fn pullback(base: &SolutionEvaluator, map: Expr, factor: Expr, domain: Interval) -> Self {
        Self {
            label: format!("{}∘({map}) * ({factor})", base.label),
            repr: Repr::Pullback {
                base: Arc::new(base.clone()),
                map,
                factor,
            },
            domain,
            positive: true,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Disables the positivity check; for deliberately invalid candidates.
    pub fn allow_nonpositive(mut self) -> Self {
        self.positive = false;
        self
    }

    /// Restricts to a sub-interval of the current domain.
    pub fn restricted(&self, domain: Interval) -> Result<Self> {
        if !self.domain.contains_interval(&domain) {
            return Err(Error::InvalidParameter(format!(
                "[{}, {}] is not inside the solution domain [{}, {}]",
                domain.lo, domain.hi, self.domain.lo, self.domain.hi
            )));
        }
        let mut out = self.clone();
        out.domain = domain;
        Ok(out)
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn value(&self, z: f64) -> Result<f64> {
        Ok(self.jet(z, 0)?.value())
    }

    pub fn jet(&self, z: f64, order: usize) -> Result<Jet> {
        if !self.domain.contains(z) {
            return Err(Error::domain(
                format!("outside the solution domain [{}, {}]", self.domain.lo, self.domain.hi),
                z,
            ));
        }
        let j = match &self.repr {
            Repr::Closed(e) => e.jet(z, order)?,
            Repr::Backlund { base, map } => {
                let fj = map.jet(z, order + 1)?;
                let x = fj.value();
                if !base.domain.contains(x) {
                    return Err(Error::DomainEscape { at: z, image: x });
                }
                let fp = fj.derivative()?;
                if !(fp.value() > 0.0) {
                    return Err(Error::NegativeDerivative {
                        at: z,
                        value: fp.value(),
                    });
                }
                let y = base.jet(x, order)?;
                let pulled = jet_compose(&y, &fj.truncate(order))?;
                pulled.try_mul(&fp.powf(-0.5)?)?
            }
            Repr::Pullback { base, map, factor } => {
                let cj = factor.jet(z, order).map_err(|e| pole_from(e, z))?;
                if cj.value() == 0.0 {
                    return Err(Error::Pole { at: z });
                }
                if cj.value() < 0.0 {
                    return Err(Error::domain("negative branch factor", z));
                }
                let fj = map.jet(z, order).map_err(|e| pole_from(e, z))?;
                let x = fj.value();
                if !base.domain.contains(x) {
                    return Err(Error::DomainEscape { at: z, image: x });
                }
                let y = base.jet(x, order)?;
                jet_compose(&y, &fj)?.try_mul(&cj)?
            }
        };
        if !j.is_finite() {
            return Err(Error::domain("non-finite solution jet", z));
        }
        if self.positive && !(j.value() > 0.0) {
            return Err(Error::domain(
                format!("solution value {} is not positive", j.value()),
                z,
            ));
        }
        Ok(j)
    }
}

fn pole_from(e: Error, z: f64) -> Error {
    match e {
        Error::Domain { ref what, .. } if what == "division by zero" => Error::Pole { at: z },
        other => other,
    }
}

impl fmt::Debug for SolutionEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolutionEvaluator")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}
