use crate::error::{Error, Result};

/// Number of samples used when scanning an interval for guard violations.
pub const DOMAIN_SAMPLES: usize = 1000;

const BISECTION_STEPS: usize = 60;

/// Closed interval `[lo, hi]`; ends may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::InvalidParameter(format!("interval [{lo}, {hi}] is empty")));
        }
        Ok(Self { lo, hi })
    }

    pub fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn positive() -> Self {
        Self {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, z: f64) -> bool {
        self.lo <= z && z <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn require_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "interval [{}, {}] must be finite",
                self.lo, self.hi
            )))
        }
    }

    /// `n >= 2` equally spaced points including both ends.
    pub fn linspace(&self, n: usize) -> Result<Vec<f64>> {
        self.require_finite()?;
        if n < 2 {
            return Err(Error::InvalidParameter(format!("need at least 2 points, got {n}")));
        }
        let step = self.len() / (n - 1) as f64;
        Ok((0..n)
            .map(|i| if i == n - 1 { self.hi } else { self.lo + step * i as f64 })
            .collect())
    }

    /// `n >= 2` log-spaced points; requires `lo > 0`.
    pub fn logspace(&self, n: usize) -> Result<Vec<f64>> {
        if !(self.lo > 0.0) {
            return Err(Error::InvalidParameter("log spacing needs a positive interval".into()));
        }
        let logs = Interval {
            lo: self.lo.ln(),
            hi: self.hi.ln(),
        }
        .linspace(n)?;
        let mut pts: Vec<f64> = logs.into_iter().map(f64::exp).collect();
        pts[0] = self.lo;
        pts[n - 1] = self.hi;
        Ok(pts)
    }

    /// Log-spaced on positive intervals, linear otherwise.
    pub fn grid(&self, n: usize) -> Result<Vec<f64>> {
        if self.lo > 0.0 {
            self.logspace(n)
        } else {
            self.linspace(n)
        }
    }
}

/// Largest contiguous part of `requested` on which `guard` holds.
///
/// The interval is sampled at [`DOMAIN_SAMPLES`] points; the longest run of
/// passing samples is kept and each end adjacent to a failing sample is
/// refined by bisection. Fails with the guard's own error when no sample passes.
pub fn admissible_subinterval<G>(requested: Interval, guard: G) -> Result<Interval>
where
    G: Fn(f64) -> Result<()>,
{
    let pts = requested.linspace(DOMAIN_SAMPLES)?;
    let mut first_err = None;
    let ok: Vec<bool> = pts
        .iter()
        .map(|&z| match guard(z) {
            Ok(()) => true,
            Err(e) => {
                first_err.get_or_insert(e);
                false
            }
        })
        .collect();

    let mut best: Option<(usize, usize)> = None;
    let mut start = None;
    for (i, &good) in ok.iter().enumerate() {
        match (good, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if best.is_none_or(|(a, b)| i - 1 - s > b - a) {
                    best = Some((s, i - 1));
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        let e = ok.len() - 1;
        if best.is_none_or(|(a, b)| e - s > b - a) {
            best = Some((s, e));
        }
    }
    let Some((s, e)) = best else {
        return Err(first_err.expect("no sample passed, so some failed"));
    };

    let passes = |z: f64| guard(z).is_ok();
    let refine = |mut good: f64, mut bad: f64| {
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (good + bad);
            if mid == good || mid == bad {
                break;
            }
            if passes(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    };
    let lo = if s > 0 { refine(pts[s], pts[s - 1]) } else { pts[s] };
    let hi = if e + 1 < pts.len() {
        refine(pts[e], pts[e + 1])
    } else {
        pts[e]
    };
    Interval::new(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_both_ends() {
        let i = Interval::new(0.5, 8.0).unwrap();
        let g = i.grid(5).unwrap();
        assert_eq!(g[0], 0.5);
        assert_eq!(g[4], 8.0);
        assert!((g[2] - 2.0).abs() < 1e-14);
        let l = Interval::new(-1.0, 1.0).unwrap().grid(3).unwrap();
        assert_eq!(l, vec![-1.0, 0.0, 1.0]);
        assert!(Interval::positive().linspace(3).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn whole_interval_when_guard_always_holds() {
        let i = Interval::new(0.0, 2.0).unwrap();
        assert_eq!(admissible_subinterval(i, |_| Ok(())).unwrap(), i);
    }

    #[test]
    fn bisection_finds_sign_change() {
        let i = Interval::new(0.0, 3.0).unwrap();
        let guard = |z: f64| {
            if z < std::f64::consts::SQRT_2 {
                Ok(())
            } else {
                Err(Error::domain("past sqrt 2", z))
            }
        };
        let d = admissible_subinterval(i, guard).unwrap();
        assert_eq!(d.lo, 0.0);
        assert!((d.hi - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn keeps_longest_run_around_a_pole() {
        let i = Interval::new(0.0, 4.0).unwrap();
        let guard = |z: f64| {
            if (z - 1.0).abs() < 0.01 {
                Err(Error::Pole { at: z })
            } else {
                Ok(())
            }
        };
        let d = admissible_subinterval(i, guard).unwrap();
        assert!((d.lo - 1.01).abs() < 1e-9);
        assert_eq!(d.hi, 4.0);
    }

    #[test]
    fn reports_guard_error_when_nothing_passes() {
        let i = Interval::new(0.0, 1.0).unwrap();
        let err = admissible_subinterval(i, |z| Err(Error::Pole { at: z })).unwrap_err();
        assert_eq!(err, Error::Pole { at: 0.0 });
    }
}
