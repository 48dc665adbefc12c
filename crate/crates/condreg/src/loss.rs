//! Separable orthogonally invariant losses.
//!
//! Each loss acts eigenvalue-by-eigenvalue through a closed convex scalar
//! function `l`, so the matrix problems reduce to clamped scalar problems.
//! Three families are built in:
//!
//! * `Gaussian` — `l(x) = -log x` on `x > 0` (negative log-likelihood of a
//!   precision-matrix eigenvalue),
//! * `Quadratic` — `l(x) = x^2 / 2` on all of `R` (Frobenius projection),
//! * `NuclearPair` — `l(x) = -log x + eta * (w x + (1 - w) / x)` on `x > 0`,
//!   a log-likelihood with a pair of nuclear-norm penalties. The weight `w`
//!   is called `mix` here so it cannot be confused with the region index
//!   `alpha` used by the solvers.
//!
//! Infinite values are legitimate: the per-eigenvalue minimizer can sit at
//! `+inf` (e.g. the Gaussian loss against a zero sample eigenvalue), and the
//! solvers clamp it back into a finite interval. IEEE infinities serve as
//! the extended reals throughout.

use crate::error::{Error, Result};

/// Tolerance on `|l'(x) - y|` for the NuclearPair root solves.
const ROOT_TOL: f64 = 1e-12;

/// A separable orthogonally invariant loss, applied to every eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralLoss {
    Gaussian,
    Quadratic,
    NuclearPair {
        /// Penalty weight, `eta >= 0`. `eta = 0` degenerates to `Gaussian`.
        eta: f64,
        /// Mixing weight in `[0, 1]` between the trace and inverse-trace terms.
        mix: f64,
    },
}

impl SpectralLoss {
    pub fn nuclear_pair(eta: f64, mix: f64) -> Result<Self> {
        let loss = SpectralLoss::NuclearPair { eta, mix };
        loss.validate()?;
        Ok(loss)
    }

    pub fn validate(&self) -> Result<()> {
        if let SpectralLoss::NuclearPair { eta, mix } = *self {
            if !(eta >= 0.0 && eta.is_finite()) {
                return Err(Error::InvalidParameter(format!("eta must be >= 0, got {eta}")));
            }
            if !(0.0..=1.0).contains(&mix) {
                return Err(Error::InvalidParameter(format!("mix must be in [0, 1], got {mix}")));
            }
        }
        Ok(())
    }

    /// Whether the domain of `l` is the positive half-line.
    pub fn positive_domain(&self) -> bool {
        !matches!(self, SpectralLoss::Quadratic)
    }

    /// `l(x)`, with `+inf` outside the domain.
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            SpectralLoss::Gaussian => {
                if x > 0.0 {
                    -x.ln()
                } else {
                    f64::INFINITY
                }
            }
            SpectralLoss::Quadratic => 0.5 * x * x,
            SpectralLoss::NuclearPair { eta, mix } => {
                if x > 0.0 {
                    -x.ln() + eta * (mix * x + (1.0 - mix) / x)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `(l'(x), l''(x))` at an interior point of the domain.
    pub fn derivatives(&self, x: f64) -> Result<(f64, f64)> {
        if self.positive_domain() && x <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{self:?} is only defined for positive eigenvalues, got {x}"
            )));
        }
        Ok((self.lprime(x), self.lsecond(x)))
    }

    /// `l'(x)`; the caller guarantees `x` is interior.
    #[inline]
    pub(crate) fn lprime(&self, x: f64) -> f64 {
        match *self {
            SpectralLoss::Gaussian => -1.0 / x,
            SpectralLoss::Quadratic => x,
            SpectralLoss::NuclearPair { eta, mix } => {
                -1.0 / x + eta * mix - eta * (1.0 - mix) / (x * x)
            }
        }
    }

    /// `l''(x)`; the caller guarantees `x` is interior.
    #[inline]
    pub(crate) fn lsecond(&self, x: f64) -> f64 {
        match *self {
            SpectralLoss::Gaussian => 1.0 / (x * x),
            SpectralLoss::Quadratic => 1.0,
            SpectralLoss::NuclearPair { eta, mix } => {
                1.0 / (x * x) + 2.0 * eta * (1.0 - mix) / (x * x * x)
            }
        }
    }

    /// Generalized inverse of the nondecreasing map `l'`.
    ///
    /// `Gaussian`: `-1/y` for `y < 0`, else `+inf`. `Quadratic`: `y` itself.
    /// `NuclearPair`: the unique positive root of `l'(x) = y` when
    /// `y < eta * mix`, else `+inf` (the supremum of `l'` over the domain).
    pub fn lprime_inverse(&self, y: f64) -> f64 {
        match *self {
            SpectralLoss::Gaussian => {
                if y < 0.0 {
                    -1.0 / y
                } else {
                    f64::INFINITY
                }
            }
            SpectralLoss::Quadratic => y,
            SpectralLoss::NuclearPair { eta, mix } => {
                if eta == 0.0 {
                    return SpectralLoss::Gaussian.lprime_inverse(y);
                }
                if y >= eta * mix {
                    return f64::INFINITY;
                }
                nuclear_root(*self, y)
            }
        }
    }

    /// Per-eigenvalue unconstrained minimizer of `l(x) - d x`.
    ///
    /// For the quadratic loss the raw stationary point `d` is returned even
    /// when it is negative; the downstream clamp at a positive lower
    /// truncation realizes the positivity constraint and keeps the region
    /// geometry of the solvers intact.
    pub fn unconstrained_minimizer(&self, d: f64) -> f64 {
        self.lprime_inverse(d)
    }
}

/// Safeguarded Newton for `l'(x) = y` on `(0, inf)`, NuclearPair only.
/// Newton from `max(1, -1/y)` with a bisection fallback on an expanding
/// bracket; terminates at `|l'(x) - y| <= ROOT_TOL * (1 + |y|)`.
fn nuclear_root(loss: SpectralLoss, y: f64) -> f64 {
    let tol = ROOT_TOL * (1.0 + y.abs());
    let g = |x: f64| loss.lprime(x) - y;

    let mut x = if y < 0.0 { (-1.0 / y).max(1.0) } else { 1.0 };

    // l' is strictly increasing with range (-inf, eta*mix), so a sign
    // change always brackets the root.
    let mut lo = x;
    let mut hi = x;
    let mut iters = 0;
    while g(lo) > 0.0 && iters < 2000 {
        lo *= 0.5;
        iters += 1;
    }
    iters = 0;
    while g(hi) < 0.0 && iters < 2000 {
        hi *= 2.0;
        iters += 1;
    }
    x = x.clamp(lo, hi);

    for _ in 0..200 {
        let gx = g(x);
        if gx.abs() <= tol {
            return x;
        }
        if gx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = gx / loss.lsecond(x);
        let mut next = x - step;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {a} ~ {b} within {tol}");
    }

    #[test]
    fn values_of_the_three_families() {
        assert_eq!(SpectralLoss::Gaussian.value(1.0), 0.0);
        assert_eq!(SpectralLoss::Quadratic.value(3.0), 4.5);
        let nuc = SpectralLoss::nuclear_pair(1.0, 0.5).unwrap();
        assert_close(nuc.value(1.0), 1.0, 1e-15);
        assert_eq!(SpectralLoss::Gaussian.value(0.0), f64::INFINITY);
        assert_eq!(nuc.value(-1.0), f64::INFINITY);
    }

    #[test]
    fn derivatives_of_the_three_families() {
        let (d1, d2) = SpectralLoss::Gaussian.derivatives(2.0).unwrap();
        assert_close(d1, -0.5, 1e-15);
        assert_close(d2, 0.25, 1e-15);

        let (d1, d2) = SpectralLoss::Quadratic.derivatives(2.0).unwrap();
        assert_close(d1, 2.0, 1e-15);
        assert_close(d2, 1.0, 1e-15);

        // l'(1) = -1/1 + eta*w - eta*(1-w)/1 = -1; l''(1) = 1 + 2*eta*(1-w) = 2.
        let nuc = SpectralLoss::nuclear_pair(1.0, 0.5).unwrap();
        let (d1, d2) = nuc.derivatives(1.0).unwrap();
        assert_close(d1, -1.0, 1e-15);
        assert_close(d2, 2.0, 1e-15);
    }

    #[test]
    fn derivatives_reject_out_of_domain() {
        assert!(SpectralLoss::Gaussian.derivatives(0.0).is_err());
        assert!(SpectralLoss::nuclear_pair(1.0, 0.5).unwrap().derivatives(-3.0).is_err());
        assert!(SpectralLoss::Quadratic.derivatives(-3.0).is_ok());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let losses = [
            SpectralLoss::Gaussian,
            SpectralLoss::Quadratic,
            SpectralLoss::nuclear_pair(0.7, 0.3).unwrap(),
            SpectralLoss::nuclear_pair(2.0, 0.9).unwrap(),
        ];
        let h = 1e-6;
        for loss in losses {
            for k in 1..40 {
                let x = 0.25 * k as f64;
                let (d1, d2) = loss.derivatives(x).unwrap();
                let fd1 = (loss.value(x + h) - loss.value(x - h)) / (2.0 * h);
                let fd2 = (loss.value(x + h) - 2.0 * loss.value(x) + loss.value(x - h)) / (h * h);
                assert!((d1 - fd1).abs() <= 1e-5 * (1.0 + d1.abs()), "{loss:?} l' at {x}");
                assert!((d2 - fd2).abs() <= 1e-3 * (1.0 + d2.abs()), "{loss:?} l'' at {x}");
                assert!(d2 >= 0.0);
            }
        }
    }

    #[test]
    fn minimizers_of_the_three_families() {
        assert_close(SpectralLoss::Gaussian.unconstrained_minimizer(-4.0), 0.25, 1e-15);
        assert_eq!(SpectralLoss::Gaussian.unconstrained_minimizer(0.0), f64::INFINITY);
        assert_close(SpectralLoss::Quadratic.unconstrained_minimizer(3.0), 3.0, 1e-15);
        // Raw stationary point even when negative.
        assert_close(SpectralLoss::Quadratic.unconstrained_minimizer(-2.0), -2.0, 1e-15);
        let degenerate = SpectralLoss::nuclear_pair(0.0, 0.5).unwrap();
        assert_close(degenerate.unconstrained_minimizer(-2.0), 0.5, 1e-12);
    }

    #[test]
    fn nuclear_minimizer_solves_stationarity() {
        // l'(x) = 0 with eta = 1, w = 1/2 means x^2 - 2x - 1 = 0, x = 1 + sqrt(2).
        let nuc = SpectralLoss::nuclear_pair(1.0, 0.5).unwrap();
        let root = nuc.unconstrained_minimizer(0.0);
        assert_close(root, 1.0 + std::f64::consts::SQRT_2, 1e-10);

        // Independent check by plain bisection on l'.
        let mut lo = 1e-6;
        let mut hi = 100.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if nuc.lprime(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert_close(root, 0.5 * (lo + hi), 1e-9);
    }

    #[test]
    fn nuclear_minimizer_hits_infinity_above_supremum() {
        let nuc = SpectralLoss::nuclear_pair(1.0, 0.5).unwrap();
        assert_eq!(nuc.unconstrained_minimizer(0.5), f64::INFINITY);
        assert_eq!(nuc.unconstrained_minimizer(2.0), f64::INFINITY);
    }

    #[test]
    fn lprime_inverse_examples() {
        assert_close(SpectralLoss::Gaussian.lprime_inverse(-2.0), 0.5, 1e-15);
        assert_close(SpectralLoss::Quadratic.lprime_inverse(1.7), 1.7, 1e-15);
    }

    #[test]
    fn lprime_inverse_roundtrip() {
        let losses = [
            SpectralLoss::Gaussian,
            SpectralLoss::Quadratic,
            SpectralLoss::nuclear_pair(1.3, 0.4).unwrap(),
        ];
        for loss in losses {
            for k in 1..20 {
                let x = 0.37 * k as f64;
                let y = loss.lprime(x);
                let back = loss.lprime_inverse(y);
                assert!((back - x).abs() <= 1e-9 * (1.0 + x), "{loss:?} at {x}: got {back}");
            }
        }
    }

    #[test]
    fn optimality_of_finite_minimizers() {
        let losses = [
            SpectralLoss::Gaussian,
            SpectralLoss::Quadratic,
            SpectralLoss::nuclear_pair(0.8, 0.25).unwrap(),
        ];
        for loss in losses {
            for d in [-3.0, -1.0, -0.2, 0.05] {
                let x = loss.unconstrained_minimizer(d);
                if x.is_finite() {
                    assert!((loss.lprime(x) - d).abs() <= 1e-10 * (1.0 + d.abs()));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn minimizers_preserve_order(d1 in -10.0f64..2.0, d2 in -10.0f64..2.0,
                                     eta in 0.0f64..3.0, mix in 0.0f64..1.0) {
            let losses = [
                SpectralLoss::Gaussian,
                SpectralLoss::Quadratic,
                SpectralLoss::NuclearPair { eta, mix },
            ];
            let (hi, lo) = if d1 >= d2 { (d1, d2) } else { (d2, d1) };
            for loss in losses {
                let a = loss.unconstrained_minimizer(hi);
                let b = loss.unconstrained_minimizer(lo);
                prop_assert!(a >= b || (a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }
}
