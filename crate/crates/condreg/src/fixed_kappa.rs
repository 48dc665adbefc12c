//! Exact solver for the condition-number constrained eigenvalue problem at
//! one fixed bound `kappa`.
//!
//! Given the spectrum `d_1 >= ... >= d_p` of `f(S)` and a separable
//! orthogonally invariant loss `l`, the matrix problem reduces to
//!
//! ```text
//! minimize   sum_i l(lambda_i) - d_i lambda_i
//! subject to u <= lambda_i <= kappa * u   for some u > 0,
//! ```
//!
//! whose solution clamps the per-eigenvalue minimizers
//! `t_i = argmin l(x) - d_i x` into the interval `[u*, kappa u*]`:
//! `lambda_i* = max(u*, min(t_i, kappa u*))`. The optimal `u*` is the
//! stationary point of the region-restricted objective, located by walking
//! the rectangles the line `v = kappa u` crosses in the `(u, v)` plane.
//! A region is indexed by `(alpha, beta)`: the `alpha` smallest `t_i` clamp
//! to `u`, the `p - beta + 1` largest clamp to `v = kappa u`. Each region
//! test costs O(1) after one O(p) prefix-sum pass, the line visits at most
//! `2p + 1` rectangles, and the whole solve is O(p) past the
//! eigendecomposition.

use crate::error::{Error, Result};
use crate::loss::SpectralLoss;
use crate::matrix::{eigendecompose, reconstruct, SymmetricMatrix};

/// Region of the `(u, v)` plane, in the conventions of the solver:
/// `alpha` in `[0, p]` counts eigenvalues clamped at the lower truncation,
/// `p - beta + 1` (with `beta` in `[1, p + 1]`) counts those clamped at the
/// upper truncation, and `alpha < beta`. `alpha = 0` (nothing clamped below)
/// and `beta = p + 1` (nothing clamped above) extend the interior regions to
/// cover the inactive-constraint and fully-released cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionIndex {
    pub alpha: usize,
    pub beta: usize,
}

/// Solution of the fixed-bound eigenvalue problem.
#[derive(Debug, Clone)]
pub struct ClampedEigenSolution {
    /// Lower truncation `u* > 0`.
    pub u_star: f64,
    /// Upper truncation `v* = kappa * u*`.
    pub v_star: f64,
    /// Clamped eigenvalues, non-increasing, aligned with the input `d`.
    pub lambdas: Vec<f64>,
    pub region: RegionIndex,
    pub kappa: f64,
}

/// Work counters for the region search.
#[derive(Debug, Clone, Copy, Default)]
pub struct SolveStats {
    /// Number of rectangles tested along the line `v = kappa u`.
    pub region_tests: usize,
}

/// Per-eigenvalue unconstrained minimizers `t_i`, non-increasing because
/// the input is and `l'` is monotone. `+inf` entries are allowed.
pub fn unconstrained_minimizers(d: &[f64], loss: &SpectralLoss) -> Vec<f64> {
    d.iter().map(|&di| loss.unconstrained_minimizer(di)).collect()
}

/// Lower truncations must stay positive; for the quadratic loss an
/// indefinite input can push the stationary point to zero or below, in
/// which case the solve falls back to this floor. Zero (no-op) for the
/// losses whose domain already enforces positivity.
pub(crate) fn positivity_floor(loss: &SpectralLoss, d: &[f64]) -> f64 {
    if loss.positive_domain() {
        return 0.0;
    }
    let scale = d.iter().filter(|x| x.is_finite()).fold(0.0f64, |m, x| m.max(x.abs()));
    1e-12 * (1.0 + scale)
}

fn validate_inputs(d: &[f64], loss: &SpectralLoss, kappa: f64) -> Result<()> {
    loss.validate()?;
    if !(kappa >= 1.0) {
        return Err(Error::InvalidParameter(format!("kappa must be >= 1, got {kappa}")));
    }
    if d.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    if !d.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("spectrum has non-finite entries".into()));
    }
    if d.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("spectrum must be sorted non-increasing".into()));
    }
    Ok(())
}

/// Prefix sums over the non-increasing spectrum `d`, giving O(1) block sums.
pub(crate) struct BlockSums {
    /// `prefix[k] = d_0 + ... + d_{k-1}`.
    prefix: Vec<f64>,
}

impl BlockSums {
    pub(crate) fn new(d: &[f64]) -> Self {
        let mut prefix = Vec::with_capacity(d.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for &x in d {
            acc += x;
            prefix.push(acc);
        }
        Self { prefix }
    }

    fn p(&self) -> usize {
        self.prefix.len() - 1
    }

    /// Sum of the `alpha` smallest entries.
    pub(crate) fn bottom(&self, alpha: usize) -> f64 {
        let p = self.p();
        self.prefix[p] - self.prefix[p - alpha]
    }

    /// Sum of the `p - beta + 1` largest entries.
    pub(crate) fn top(&self, beta: usize) -> f64 {
        self.prefix[self.p() + 1 - beta]
    }
}

enum RegionRoot {
    /// Stationary point of the region-restricted objective.
    Root(f64),
    /// The restricted derivative stays negative for every `u > 0`; the
    /// stationary point lies beyond any boundary.
    AboveAll,
}

/// Stationary equation of region `(alpha, beta)`:
/// `alpha * l'(u) + kappa * C * l'(kappa u) = A + kappa * B`
/// with `A` the bottom block sum, `B` the top block sum, `C = p - beta + 1`.
fn region_root(
    loss: &SpectralLoss,
    kappa: f64,
    alpha: usize,
    top_count: usize,
    bottom_sum: f64,
    top_sum: f64,
) -> RegionRoot {
    let a = alpha as f64;
    let c = top_count as f64;
    let rhs = bottom_sum + kappa * top_sum;
    debug_assert!(alpha + top_count >= 1);

    match *loss {
        SpectralLoss::Gaussian => {
            // -(alpha + C) / u = rhs
            if rhs < 0.0 {
                RegionRoot::Root(-(a + c) / rhs)
            } else {
                RegionRoot::AboveAll
            }
        }
        SpectralLoss::Quadratic => RegionRoot::Root(rhs / (a + kappa * kappa * c)),
        SpectralLoss::NuclearPair { eta, mix } => {
            // g(u) = alpha l'(u) + kappa C l'(kappa u) - rhs, strictly increasing,
            // g(0+) = -inf, sup g = (alpha + kappa C) eta mix - rhs.
            let sup = (a + kappa * c) * eta * mix - rhs;
            if sup <= 0.0 {
                return RegionRoot::AboveAll;
            }
            let g = |u: f64| a * loss.lprime(u) + kappa * c * loss.lprime(kappa * u) - rhs;
            let gprime = |u: f64| a * loss.lsecond(u) + kappa * kappa * c * loss.lsecond(kappa * u);

            let mut lo = 1.0;
            let mut iters = 0;
            while g(lo) > 0.0 && iters < 2000 {
                lo *= 0.5;
                iters += 1;
            }
            let mut hi = lo.max(1.0);
            iters = 0;
            while g(hi) < 0.0 && iters < 2000 {
                hi *= 2.0;
                iters += 1;
            }
            if g(hi) < 0.0 {
                return RegionRoot::AboveAll;
            }
            let tol = 1e-12 * (1.0 + rhs.abs());
            let mut u = 0.5 * (lo + hi);
            for _ in 0..200 {
                let gu = g(u);
                if gu.abs() <= tol {
                    break;
                }
                if gu > 0.0 {
                    hi = u;
                } else {
                    lo = u;
                }
                let mut next = u - gu / gprime(u);
                if !(next > lo && next < hi) || !next.is_finite() {
                    next = 0.5 * (lo + hi);
                }
                u = next;
            }
            RegionRoot::Root(u)
        }
    }
}

/// Root of the stationarity equation of a single rectangle; the public
/// entry point recomputes the block sums, while the walk uses prefix sums.
///
/// Closed forms: Gaussian `u = -(alpha + C) / (A + kappa B)`, quadratic
/// `u = (A + kappa B) / (alpha + kappa^2 C)`; NuclearPair by safeguarded
/// Newton to `|lhs - rhs| <= 1e-12 (1 + |rhs|)`.
pub fn region_stationary_u(
    d: &[f64],
    loss: &SpectralLoss,
    kappa: f64,
    region: RegionIndex,
) -> Result<f64> {
    validate_inputs(d, loss, kappa)?;
    let p = d.len();
    if region.alpha > p || region.beta < 1 || region.beta > p + 1 || region.alpha >= region.beta {
        return Err(Error::InvalidParameter(format!(
            "region (alpha={}, beta={}) is out of range for p={p}",
            region.alpha, region.beta
        )));
    }
    let top_count = p + 1 - region.beta;
    if region.alpha == 0 && top_count == 0 {
        return Err(Error::InvalidParameter(
            "region (0, p+1) has no clamped eigenvalues; the constraint is inactive".into(),
        ));
    }
    let sums = BlockSums::new(d);
    match region_root(
        loss,
        kappa,
        region.alpha,
        top_count,
        sums.bottom(region.alpha),
        sums.top(region.beta),
    ) {
        RegionRoot::Root(u) => Ok(u),
        RegionRoot::AboveAll => Err(Error::Numerical(
            "the region-restricted objective has no stationary point".into(),
        )),
    }
}

/// Size of the tie block at `values[idx]`, scanning toward index 0.
/// Entries within relative tolerance `1e-12` count as tied.
pub(crate) fn tie_block_len(values: &[f64], idx: usize) -> usize {
    let v = values[idx];
    let tol = 1e-12 * (1.0 + v.abs());
    let mut len = 1;
    let mut j = idx;
    while j > 0 && (values[j - 1] - v).abs() <= tol {
        len += 1;
        j -= 1;
    }
    len
}

fn clamp_lambdas(lam: &[f64], u: f64, kappa: f64) -> Vec<f64> {
    let v = kappa * u;
    lam.iter().map(|&t| u.max(t.min(v))).collect()
}

/// Classification of each eigenvalue at a solution: `-1` clamped at the
/// lower truncation, `1` at the upper, `0` free. Boundary ties resolve
/// with relative tolerance `1e-9`.
pub fn clamp_pattern(lam: &[f64], u: f64, kappa: f64) -> Vec<i8> {
    let v = kappa * u;
    let tol_u = 1e-9 * (1.0 + u.abs());
    let tol_v = 1e-9 * (1.0 + v.abs());
    lam.iter()
        .map(|&t| {
            if t <= u + tol_u {
                -1
            } else if t >= v - tol_v {
                1
            } else {
                0
            }
        })
        .collect()
}

fn inactive_solution(lam: &[f64], kappa: f64) -> ClampedEigenSolution {
    let p = lam.len();
    let u = lam[p - 1];
    ClampedEigenSolution {
        u_star: u,
        v_star: kappa * u,
        lambdas: lam.to_vec(),
        region: RegionIndex { alpha: 0, beta: p + 1 },
        kappa,
    }
}

/// Solves the fixed-bound problem for a non-increasing spectrum `d`.
///
/// When every finite minimizer already fits a `kappa` ratio the constraint
/// is inactive and the unclamped minimizers are returned with
/// `u* = min t_i`. Otherwise the region walk runs; it starts below every
/// positive minimizer and advances only to the neighbour rectangles the
/// line `v = kappa u` can enter next, so at most `3p` region tests occur.
pub fn solve_fixed_kappa(
    d: &[f64],
    loss: &SpectralLoss,
    kappa: f64,
) -> Result<ClampedEigenSolution> {
    solve_fixed_kappa_counted(d, loss, kappa).map(|(sol, _)| sol)
}

/// [`solve_fixed_kappa`] with region-test counters, for complexity checks.
pub fn solve_fixed_kappa_counted(
    d: &[f64],
    loss: &SpectralLoss,
    kappa: f64,
) -> Result<(ClampedEigenSolution, SolveStats)> {
    validate_inputs(d, loss, kappa)?;
    let p = d.len();
    let lam = unconstrained_minimizers(d, loss);
    let n_inf = lam.iter().filter(|x| x.is_infinite()).count();
    if n_inf == p {
        return Err(Error::Numerical(
            "no finite solution: every per-eigenvalue minimizer is infinite".into(),
        ));
    }

    // Inactive constraint: all minimizers finite, positive, within ratio kappa.
    if n_inf == 0 && lam[p - 1] > 0.0 && lam[0] <= kappa * lam[p - 1] {
        return Ok((inactive_solution(&lam, kappa), SolveStats::default()));
    }

    let floor = positivity_floor(loss, d);
    let sums = BlockSums::new(d);
    let mut alpha = lam.iter().filter(|&&t| t <= 0.0).count();
    let mut beta = alpha + 1;
    let mut stats = SolveStats::default();
    let max_tests = 3 * p + 3;

    loop {
        stats.region_tests += 1;
        if stats.region_tests > max_tests {
            return Err(Error::Numerical(format!(
                "region walk exceeded {max_tests} tests; spectrum may be malformed"
            )));
        }

        let top_count = p + 1 - beta;
        let u_right = if alpha >= p { f64::INFINITY } else { lam[p - alpha - 1] };
        let v_top = if beta > p { f64::INFINITY } else { lam[p - beta] };
        let exit = u_right.min(v_top / kappa);

        let root = region_root(loss, kappa, alpha, top_count, sums.bottom(alpha), sums.top(beta));
        if let RegionRoot::Root(u) = root {
            let tol = 1e-12 * (1.0 + u.abs());
            if u <= exit + tol {
                // Clamp into the closed rectangle: at a boundary the
                // neighbouring regions share the stationary point.
                let u_left = if alpha >= 1 { lam[p - alpha] } else { f64::NEG_INFINITY };
                let v_bot = if beta >= 2 { lam[p - beta + 1] } else { f64::NEG_INFINITY };
                let entry = u_left.max(v_bot / kappa);
                let u_star = u.clamp(entry.min(exit), exit).max(floor);
                return Ok((
                    ClampedEigenSolution {
                        u_star,
                        v_star: kappa * u_star,
                        lambdas: clamp_lambdas(&lam, u_star, kappa),
                        region: RegionIndex { alpha, beta },
                        kappa,
                    },
                    stats,
                ));
            }
        }

        // Advance along the line to the next rectangle.
        let du = u_right;
        let dv = v_top / kappa;
        if du.is_infinite() && dv.is_infinite() {
            return Err(Error::Numerical(
                "no finite minimizer: the objective is unbounded below under this bound".into(),
            ));
        }
        let tie = du.is_finite() && dv.is_finite() && (du - dv).abs() <= 1e-12 * (1.0 + du.abs());
        if tie || du < dv {
            alpha += tie_block_len(&lam, p - alpha - 1);
        }
        if tie || dv < du {
            beta += tie_block_len(&lam, p - beta);
        }
    }
}

/// Golden-section reference solver for the same univariate problem,
/// followed by a bisection polish on the clamped derivative. It shares
/// nothing with the region walk and serves as its test oracle.
pub fn oracle_univariate(d: &[f64], loss: &SpectralLoss, kappa: f64) -> Result<f64> {
    validate_inputs(d, loss, kappa)?;
    let p = d.len();
    let lam = unconstrained_minimizers(d, loss);
    if lam.iter().all(|x| x.is_infinite()) {
        return Err(Error::Numerical(
            "no finite solution: every per-eigenvalue minimizer is infinite".into(),
        ));
    }
    if lam.iter().all(|x| x.is_finite()) && lam[p - 1] > 0.0 && lam[0] <= kappa * lam[p - 1] {
        return Ok(lam[p - 1]);
    }

    let floor = positivity_floor(loss, d);
    let phi_prime = |u: f64| -> f64 {
        let v = kappa * u;
        let mut acc = 0.0;
        for (&t, &di) in lam.iter().zip(d) {
            if t <= u {
                acc += loss.lprime(u) - di;
            } else if t >= v {
                acc += kappa * (loss.lprime(v) - di);
            }
        }
        acc
    };
    let phi = |u: f64| -> f64 {
        let v = kappa * u;
        let mut acc = 0.0;
        for (&t, &di) in lam.iter().zip(d) {
            let x = u.max(t.min(v));
            acc += loss.value(x) - di * x;
        }
        acc
    };

    // Bracket the sign change of the derivative.
    let anchor = {
        let mean = d.iter().sum::<f64>() / p as f64;
        let guess = loss.lprime_inverse(mean);
        if guess.is_finite() && guess > 0.0 {
            guess
        } else {
            1.0
        }
    };
    let lo_limit = if floor > 0.0 { floor } else { anchor * 1e-150 };
    let mut lo = anchor.max(lo_limit);
    let mut iters = 0;
    while phi_prime(lo) > 0.0 && lo > lo_limit && iters < 2000 {
        lo = (0.5 * lo).max(lo_limit);
        iters += 1;
    }
    if phi_prime(lo) >= 0.0 && lo <= lo_limit {
        // Derivative positive on the whole positive axis: floor optimum.
        return Ok(lo_limit);
    }
    let mut hi = lo.max(anchor);
    iters = 0;
    while phi_prime(hi) < 0.0 && iters < 2000 {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Numerical(
                "oracle bracket expansion failed: objective unbounded below".into(),
            ));
        }
        iters += 1;
    }
    if phi_prime(hi) < 0.0 {
        return Err(Error::Numerical(
            "oracle bracket expansion failed: objective unbounded below".into(),
        ));
    }

    // Golden section on the bracketed interval.
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut g = a + inv_phi * (b - a);
    let mut fc = phi(c);
    let mut fg = phi(g);
    for _ in 0..400 {
        if b - a <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc < fg {
            b = g;
            g = c;
            fg = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = g;
            fc = fg;
            g = a + inv_phi * (b - a);
            fg = phi(g);
        }
    }

    // Polish: bisection on the derivative restores full precision where
    // the value-based search flattens out.
    let mut blo = (a * 0.5).max(lo_limit);
    let mut bhi = b * 2.0;
    let mut iters = 0;
    while phi_prime(blo) > 0.0 && blo > lo_limit && iters < 200 {
        blo = (0.5 * blo).max(lo_limit);
        iters += 1;
    }
    iters = 0;
    while phi_prime(bhi) < 0.0 && iters < 200 {
        bhi *= 2.0;
        iters += 1;
    }
    for _ in 0..300 {
        if bhi - blo <= 1e-13 * (1.0 + blo.abs()) {
            break;
        }
        let mid = 0.5 * (blo + bhi);
        if phi_prime(mid) < 0.0 {
            blo = mid;
        } else {
            bhi = mid;
        }
    }
    Ok((0.5 * (blo + bhi)).max(lo_limit))
}

/// Spectral map applied to the sample covariance before the eigenvalue
/// solve. The loss fixes the admissible map: the likelihood losses pair
/// with `Negate` and the quadratic loss with `Identity`; `ConstantIdentity`
/// and `Zero` belong to the pseudo-likelihood losses handled by the
/// splitting solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FMap {
    Negate,
    Identity,
    ConstantIdentity,
    Zero,
}

impl FMap {
    pub fn apply(&self, s: &SymmetricMatrix) -> SymmetricMatrix {
        match self {
            FMap::Negate => s.scaled(-1.0),
            FMap::Identity => s.clone(),
            FMap::ConstantIdentity => SymmetricMatrix::identity(s.dim()),
            FMap::Zero => SymmetricMatrix::zeros(s.dim()),
        }
    }
}

/// Full matrix estimate: eigendecompose `f(S)`, solve the eigenvalue
/// problem at bound `kappa`, and rebuild in the same basis.
pub fn estimate(
    s: &SymmetricMatrix,
    loss: &SpectralLoss,
    fmap: FMap,
    kappa: f64,
) -> Result<SymmetricMatrix> {
    let consistent = matches!(
        (loss, fmap),
        (SpectralLoss::Gaussian, FMap::Negate)
            | (SpectralLoss::NuclearPair { .. }, FMap::Negate)
            | (SpectralLoss::Quadratic, FMap::Identity)
    );
    if !consistent {
        return Err(Error::InvalidParameter(format!(
            "loss {loss:?} is not paired with spectral map {fmap:?}"
        )));
    }
    let f = fmap.apply(s);
    let spec = eigendecompose(&f)?;
    let sol = solve_fixed_kappa(spec.values(), loss, kappa)?;
    reconstruct(spec.vectors(), &sol.lambdas)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::condition_number;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {a} ~ {b} within {tol}");
    }

    #[test]
    fn gaussian_region_closed_form() {
        // s = (4, 1) means d = (-1, -4); region (1, 2) at kappa = 2.
        let u = region_stationary_u(
            &[-1.0, -4.0],
            &SpectralLoss::Gaussian,
            2.0,
            RegionIndex { alpha: 1, beta: 2 },
        )
        .unwrap();
        assert_close(u, 1.0 / 3.0, 1e-14);
    }

    #[test]
    fn quadratic_region_closed_form() {
        let u = region_stationary_u(
            &[3.0, 1.0],
            &SpectralLoss::Quadratic,
            2.0,
            RegionIndex { alpha: 1, beta: 2 },
        )
        .unwrap();
        assert_close(u, 1.4, 1e-14);
    }

    #[test]
    fn region_at_kappa_one_reduces_to_mean_equation() {
        // Any region (alpha, alpha + 1) at kappa = 1 solves sum l'(u) = sum d.
        let d = [-0.5, -1.0, -2.5];
        let expected = SpectralLoss::Gaussian.lprime_inverse(d.iter().sum::<f64>() / 3.0);
        for alpha in 0..3 {
            let u = region_stationary_u(
                &d,
                &SpectralLoss::Gaussian,
                1.0,
                RegionIndex { alpha, beta: alpha + 1 },
            )
            .unwrap();
            assert_close(u, expected, 1e-12);
        }
    }

    #[test]
    fn empty_region_is_rejected() {
        let err = region_stationary_u(
            &[3.0, 1.0],
            &SpectralLoss::Quadratic,
            2.0,
            RegionIndex { alpha: 0, beta: 3 },
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn gaussian_solve_two_eigenvalues() {
        let sol = solve_fixed_kappa(&[-1.0, -4.0], &SpectralLoss::Gaussian, 2.0).unwrap();
        assert_close(sol.u_star, 1.0 / 3.0, 1e-12);
        assert_close(sol.v_star, 2.0 / 3.0, 1e-12);
        assert_close(sol.lambdas[0], 2.0 / 3.0, 1e-12);
        assert_close(sol.lambdas[1], 1.0 / 3.0, 1e-12);
        assert_eq!(sol.region, RegionIndex { alpha: 1, beta: 2 });
    }

    #[test]
    fn quadratic_solve_at_kappa_one_averages() {
        let sol = solve_fixed_kappa(&[3.0, 1.0], &SpectralLoss::Quadratic, 1.0).unwrap();
        assert_close(sol.u_star, 2.0, 1e-12);
        assert_close(sol.v_star, 2.0, 1e-12);
        assert_close(sol.lambdas[0], 2.0, 1e-12);
        assert_close(sol.lambdas[1], 2.0, 1e-12);
    }

    #[test]
    fn constraint_inactive_at_the_boundary() {
        // Sample condition number is exactly 4: the unconstrained
        // minimizers are feasible.
        let sol = solve_fixed_kappa(&[-1.0, -4.0], &SpectralLoss::Gaussian, 4.0).unwrap();
        assert_close(sol.lambdas[0], 1.0, 1e-12);
        assert_close(sol.lambdas[1], 0.25, 1e-12);
        assert_eq!(sol.region, RegionIndex { alpha: 0, beta: 3 });
    }

    #[test]
    fn kappa_below_one_is_rejected() {
        let err = solve_fixed_kappa(&[-1.0, -4.0], &SpectralLoss::Gaussian, 0.5).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn all_infinite_minimizers_error() {
        let err = solve_fixed_kappa(&[0.0, 0.0], &SpectralLoss::Gaussian, 2.0).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn unsorted_spectrum_is_rejected() {
        let err = solve_fixed_kappa(&[1.0, 3.0], &SpectralLoss::Quadratic, 2.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn singular_gaussian_block_stays_upper_clamped() {
        // d = (0, -1, -1): one zero sample eigenvalue, minimizer at +inf.
        let sol = solve_fixed_kappa(&[0.0, -1.0, -1.0], &SpectralLoss::Gaussian, 3.0).unwrap();
        assert_close(sol.u_star, 1.5, 1e-12);
        assert_close(sol.lambdas[0], 4.5, 1e-12);
        assert_close(sol.lambdas[1], 1.5, 1e-12);
        assert_close(sol.lambdas[2], 1.5, 1e-12);
    }

    #[test]
    fn unbounded_positive_gaussian_spectrum_errors() {
        let err = solve_fixed_kappa(&[1.0, -1.0], &SpectralLoss::Gaussian, 2.0).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }

    #[test]
    fn degenerate_single_eigenvalue() {
        let sol = solve_fixed_kappa(&[-2.0], &SpectralLoss::Gaussian, 7.0).unwrap();
        assert_close(sol.u_star, 0.5, 1e-14);
        assert_close(sol.lambdas[0], 0.5, 1e-14);
    }

    #[test]
    fn quadratic_negative_spectrum_floors_at_tiny_positive() {
        let d = [-1.0, -2.0, -3.0];
        let sol = solve_fixed_kappa(&d, &SpectralLoss::Quadratic, 5.0).unwrap();
        assert!(sol.u_star > 0.0);
        assert!(sol.u_star <= 1e-11);
        assert!(sol.lambdas.iter().all(|&x| x > 0.0));
        let oracle = oracle_univariate(&d, &SpectralLoss::Quadratic, 5.0).unwrap();
        assert_close(sol.u_star, oracle, 1e-10);
    }

    #[test]
    fn quadratic_mixed_signs_matches_oracle() {
        let d = [1.0, -2.0];
        let kappa = 3.0;
        let sol = solve_fixed_kappa(&d, &SpectralLoss::Quadratic, kappa).unwrap();
        // Interior optimum: region (1, 2), u = (A + kB)/(alpha + k^2 C) = 0.1.
        assert_close(sol.u_star, 0.1, 1e-12);
        let oracle = oracle_univariate(&d, &SpectralLoss::Quadratic, kappa).unwrap();
        assert_close(sol.u_star, oracle, 1e-9);
    }

    #[test]
    fn oracle_agrees_on_the_worked_examples() {
        let u = oracle_univariate(&[-1.0, -4.0], &SpectralLoss::Gaussian, 2.0).unwrap();
        assert_close(u, 1.0 / 3.0, 1e-10);
        let u = oracle_univariate(&[3.0, 1.0], &SpectralLoss::Quadratic, 2.0).unwrap();
        assert_close(u, 1.4, 1e-10);
        // kappa = 1 collapses to the mean equation.
        let u = oracle_univariate(&[3.0, 1.0], &SpectralLoss::Quadratic, 1.0).unwrap();
        assert_close(u, 2.0, 1e-10);
    }

    #[test]
    fn estimate_gaussian_shrinks_toward_identity_direction() {
        let s = SymmetricMatrix::from_diagonal(&[4.0, 1.0]);
        let omega = estimate(&s, &SpectralLoss::Gaussian, FMap::Negate, 2.0).unwrap();
        // The precision eigenvalue paired with the large sample eigenvalue
        // is the small one: clamp of 1/4 up to u* = 1/3 on the first axis,
        // clamp of 1/1 down to 2/3 on the second.
        assert_close(omega.get(0, 0), 1.0 / 3.0, 1e-10);
        assert_close(omega.get(1, 1), 2.0 / 3.0, 1e-10);
        assert_close(omega.get(0, 1), 0.0, 1e-12);
    }

    #[test]
    fn estimate_quadratic_at_kappa_one_is_scaled_identity() {
        let s = SymmetricMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let est = estimate(&s, &SpectralLoss::Quadratic, FMap::Identity, 1.0).unwrap();
        let mean = s.trace() / 2.0;
        assert_close(est.get(0, 0), mean, 1e-10);
        assert_close(est.get(1, 1), mean, 1e-10);
        assert_close(est.get(0, 1), 0.0, 1e-10);
    }

    #[test]
    fn estimate_large_kappa_recovers_inverse() {
        let s = SymmetricMatrix::from_diagonal(&[2.0, 0.5]);
        let omega = estimate(&s, &SpectralLoss::Gaussian, FMap::Negate, 1e9).unwrap();
        assert_close(omega.get(0, 0), 0.5, 1e-8);
        assert_close(omega.get(1, 1), 2.0, 1e-8);
    }

    #[test]
    fn estimate_rejects_mismatched_map() {
        let s = SymmetricMatrix::identity(2);
        assert!(estimate(&s, &SpectralLoss::Gaussian, FMap::Identity, 2.0).is_err());
        assert!(estimate(&s, &SpectralLoss::Quadratic, FMap::Negate, 2.0).is_err());
        assert!(estimate(&s, &SpectralLoss::Gaussian, FMap::Zero, 2.0).is_err());
    }

    #[test]
    fn estimates_stay_feasible() {
        let s = SymmetricMatrix::from_rows(&[
            vec![3.0, 0.8, -0.3],
            vec![0.8, 1.5, 0.2],
            vec![-0.3, 0.2, 0.4],
        ])
        .unwrap();
        for kappa in [1.0, 1.5, 2.0, 10.0] {
            let omega = estimate(&s, &SpectralLoss::Gaussian, FMap::Negate, kappa).unwrap();
            let cond = condition_number(&omega).unwrap();
            assert!(cond.value <= kappa * (1.0 + 1e-8), "kappa={kappa}: {}", cond.value);
        }
    }

    #[test]
    fn ties_advance_together() {
        // Two tied interior minimizers force simultaneous boundary hits.
        let d = [-1.0, -1.0, -4.0, -4.0];
        let (sol, stats) =
            solve_fixed_kappa_counted(&d, &SpectralLoss::Gaussian, 2.0).unwrap();
        let oracle = oracle_univariate(&d, &SpectralLoss::Gaussian, 2.0).unwrap();
        assert_close(sol.u_star, oracle, 1e-9 * (1.0 + oracle));
        assert!(stats.region_tests <= 3 * d.len());
    }
}
