//! Solution paths in the condition bound `kappa`.
//!
//! The truncation pair `(u*(kappa), v*(kappa) = kappa u*(kappa))` traces a
//! continuous, piecewise smooth curve in the `(u, v)` plane as `kappa` grows
//! from 1. Within one clamping region the curve solves the stationarity
//! equation of that region; its slope changes only where the curve crosses
//! one of the lines `u = t_i` or `v = t_i` spanned by the per-eigenvalue
//! minimizers, and at such a crossing the region can only lose its
//! bottom-most clamped eigenvalue, lose its top-most, or both at once.
//! Walking those events forward yields the whole path with O(p) work after
//! the eigendecomposition.
//!
//! Three builders share the walk: [`gaussian_path`] (segments are straight
//! lines in the `(u, v)` plane), [`quadratic_path`] (rational segments
//! `u = (A + kappa B) / (alpha + kappa^2 C)`, which satisfy the quadratic
//! continuation ODE exactly), and [`generic_path`] (Newton continuation for
//! any twice-differentiable loss, used for the nuclear-pair family and as a
//! cross-check of the closed forms).

use crate::error::{Error, Result};
use crate::fixed_kappa::{
    positivity_floor, tie_block_len, unconstrained_minimizers, BlockSums, ClampedEigenSolution,
    RegionIndex,
};
use crate::loss::SpectralLoss;

/// Relative tolerance for breakpoint refinement in `kappa`.
const EVENT_RTOL: f64 = 1e-10;

/// Per-segment evaluator for the lower truncation `u(kappa)`.
#[derive(Debug, Clone)]
pub enum SegmentForm {
    /// `u = -count / (bottom_sum + kappa * top_sum)`; straight line in the
    /// `(u, v)` plane with slope `-bottom_sum / top_sum`.
    GaussianExplicit { count: f64, bottom_sum: f64, top_sum: f64 },
    /// `u = (bottom_sum + kappa * top_sum) / (alpha + kappa^2 * top_count)`.
    QuadraticRational { bottom_sum: f64, top_sum: f64, alpha: f64, top_count: f64 },
    /// Warm-started Newton solve of the region stationarity equation; the
    /// knot table seeds the iteration, the equation itself is always solved
    /// to full precision at the queried `kappa`.
    NumericSamples {
        loss: SpectralLoss,
        alpha: usize,
        top_count: usize,
        bottom_sum: f64,
        top_sum: f64,
        knots: Vec<(f64, f64)>,
    },
    /// Lower truncation frozen; the upper one keeps growing as `kappa u`.
    ConstantU { u: f64 },
    /// Upper truncation frozen; `u = v / kappa`.
    ConstantV { v: f64 },
    /// Constraint inactive: the clamp reproduces the unconstrained minimizers.
    Unconstrained,
}

#[derive(Debug, Clone)]
pub struct PathSegment {
    pub kappa_lo: f64,
    /// `+inf` on the terminal segment.
    pub kappa_hi: f64,
    pub region: RegionIndex,
    pub form: SegmentForm,
}

/// The entire family of solutions indexed by the condition bound.
#[derive(Debug, Clone)]
pub struct SolutionPath {
    dim: usize,
    /// Ordered event locations, starting at `kappa = 1`.
    pub breakpoints: Vec<f64>,
    /// Segments covering `[1, +inf)`; `segments[j]` spans
    /// `[breakpoints[j], breakpoints[j + 1])` with the last one unbounded.
    pub segments: Vec<PathSegment>,
    /// Bound beyond which the clamped eigenvalues stop changing; `+inf`
    /// when an infinite minimizer keeps the constraint active forever.
    pub terminal_kappa: f64,
    floor: f64,
}

impl SolutionPath {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn regions(&self) -> impl Iterator<Item = RegionIndex> + '_ {
        self.segments.iter().map(|s| s.region)
    }
}

/// Initial point of the path: at `kappa = 1` every eigenvalue clamps to a
/// single value `u_1` solving `sum_i l'(u) = sum_i d_i`, which for a loss
/// shared across eigenvalues is `(l')^{-1}(mean d)`. The returned region
/// `(alpha, alpha + 1)` brackets `u_1` between neighbouring minimizers.
pub fn initial_point(d: &[f64], loss: &SpectralLoss) -> Result<(f64, RegionIndex)> {
    loss.validate()?;
    if d.is_empty() || !d.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("spectrum must be non-empty and finite".into()));
    }
    let p = d.len();
    let mean = d.iter().sum::<f64>() / p as f64;
    let u1 = loss.lprime_inverse(mean);
    if !u1.is_finite() {
        return Err(Error::Numerical(
            "no finite initial point: the mean stationarity equation has no root".into(),
        ));
    }
    let lam = unconstrained_minimizers(d, loss);
    let alpha = initial_alpha(&lam, u1);
    Ok((u1, RegionIndex { alpha, beta: alpha + 1 }))
}

/// Number of minimizers strictly below `u1`; ties at `u1` count as not
/// clamped below, matching the half-open region convention.
fn initial_alpha(lam: &[f64], u1: f64) -> usize {
    let tol = 1e-12 * (1.0 + u1.abs());
    lam.iter().filter(|&&t| t < u1 - tol).count()
}

/// Tie block scanning toward the end of the array (equal entries are
/// contiguous because the input is sorted).
fn tie_block_forward(values: &[f64], idx: usize) -> usize {
    let v = values[idx];
    let tol = 1e-12 * (1.0 + v.abs());
    let mut len = 1;
    let mut j = idx;
    while j + 1 < values.len() && (values[j + 1] - v).abs() <= tol {
        len += 1;
        j += 1;
    }
    len
}

enum Style {
    Gaussian,
    Quadratic,
    Numeric,
}

/// Piecewise-linear path for the Gaussian loss, from the sample
/// eigenvalues `s` (non-increasing, `s_1 > 0`, zeros allowed).
pub fn gaussian_path(s: &[f64]) -> Result<SolutionPath> {
    if s.is_empty() || !s.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("eigenvalues must be non-empty and finite".into()));
    }
    if s.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("eigenvalues must be sorted non-increasing".into()));
    }
    let s1 = s[0];
    if !(s1 > 0.0) {
        return Err(Error::InvalidInput("all sample eigenvalues are zero".into()));
    }
    let tol = 1e-12 * s1;
    if s.iter().any(|&x| x < -tol) {
        return Err(Error::InvalidInput("sample eigenvalues must be non-negative".into()));
    }
    // d = spectrum of -S, non-increasing; tiny negative dust clamps to 0.
    let d: Vec<f64> = s.iter().rev().map(|&x| -x.max(0.0)).collect();
    build_path(&d, &SpectralLoss::Gaussian, Style::Gaussian)
}

/// Rational path for the quadratic loss. Each segment
/// `u = (A + kappa B) / (alpha + kappa^2 C)` satisfies both the region
/// stationarity equation and the quadratic continuation ODE exactly.
pub fn quadratic_path(d: &[f64]) -> Result<SolutionPath> {
    build_path(d, &SpectralLoss::Quadratic, Style::Quadratic)
}

/// Continuation path for any built-in loss: within a region the truncation
/// solves the stationarity equation by warm-started Newton, and boundary
/// events are located by adaptive stepping plus bisection in `kappa`.
pub fn generic_path(d: &[f64], loss: &SpectralLoss) -> Result<SolutionPath> {
    build_path(d, loss, Style::Numeric)
}

struct Walk<'a> {
    loss: &'a SpectralLoss,
    lam: Vec<f64>,
    sums: BlockSums,
    p: usize,
    floor: f64,
}

impl Walk<'_> {
    fn u_boundary(&self, alpha: usize) -> f64 {
        // Level that releases the bottom-most clamped eigenvalue.
        if alpha >= 1 {
            self.lam[self.p - alpha]
        } else {
            f64::NEG_INFINITY
        }
    }

    fn v_boundary(&self, beta: usize) -> f64 {
        // Level that releases the top-most clamped eigenvalue.
        if beta <= self.p {
            self.lam[self.p - beta]
        } else {
            f64::INFINITY
        }
    }

    fn blocks(&self, alpha: usize, beta: usize) -> (f64, f64, usize) {
        (self.sums.bottom(alpha), self.sums.top(beta), self.p + 1 - beta)
    }
}

fn build_path(d: &[f64], loss: &SpectralLoss, style: Style) -> Result<SolutionPath> {
    loss.validate()?;
    if d.is_empty() {
        return Err(Error::InvalidInput("empty spectrum".into()));
    }
    if !d.iter().all(|x| x.is_finite()) {
        return Err(Error::InvalidInput("spectrum has non-finite entries".into()));
    }
    if d.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidParameter("spectrum must be sorted non-increasing".into()));
    }
    let p = d.len();
    let lam = unconstrained_minimizers(d, loss);
    if lam.iter().all(|x| x.is_infinite()) {
        return Err(Error::Numerical(
            "no finite solution: every per-eigenvalue minimizer is infinite".into(),
        ));
    }
    let floor = positivity_floor(loss, d);
    let mean = d.iter().sum::<f64>() / p as f64;
    let u1 = loss.lprime_inverse(mean);
    if u1 == f64::INFINITY {
        return Err(Error::Numerical(
            "no finite initial point: the mean stationarity equation has no root".into(),
        ));
    }

    // Start region: below every positive minimizer when the stationary
    // point at kappa = 1 is not positive (quadratic loss on indefinite
    // input); otherwise bracketed by the minimizers around u_1.
    let mut alpha = if u1 <= 0.0 {
        lam.iter().filter(|&&t| t <= 0.0).count()
    } else {
        initial_alpha(&lam, u1)
    };
    let mut beta = alpha + 1;

    let walk = Walk { loss, lam: lam.clone(), sums: BlockSums::new(d), p, floor };
    let mut breakpoints = vec![1.0];
    let mut segments: Vec<PathSegment> = Vec::new();
    let mut kappa_cur = 1.0;
    let mut u_cur = if u1 > 0.0 { u1 } else { floor };
    let mut terminal_kappa = f64::INFINITY;
    let mut guard = 0;

    loop {
        guard += 1;
        if guard > 2 * p + 4 {
            return Err(Error::Numerical("path walk exceeded its segment budget".into()));
        }

        // Terminal states first.
        if alpha == 0 && beta == p + 1 {
            segments.push(PathSegment {
                kappa_lo: kappa_cur,
                kappa_hi: f64::INFINITY,
                region: RegionIndex { alpha: 0, beta: p + 1 },
                form: SegmentForm::Unconstrained,
            });
            terminal_kappa = kappa_cur;
            break;
        }
        if beta == p + 1 {
            // Bottom block only: its stationarity no longer depends on kappa.
            let (a, _, _) = walk.blocks(alpha, beta);
            let u_hat = loss.lprime_inverse(a / alpha as f64);
            segments.push(PathSegment {
                kappa_lo: kappa_cur,
                kappa_hi: f64::INFINITY,
                region: RegionIndex { alpha, beta },
                form: SegmentForm::ConstantU { u: u_hat },
            });
            terminal_kappa = kappa_cur;
            break;
        }
        if alpha == 0 {
            let (_, b, c) = walk.blocks(alpha, beta);
            let v_hat = loss.lprime_inverse(b / c as f64);
            let all_finite = lam.iter().all(|x| x.is_finite());
            if all_finite && (!v_hat.is_finite() || v_hat >= lam[0] * (1.0 - 1e-9)) {
                segments.push(PathSegment {
                    kappa_lo: kappa_cur,
                    kappa_hi: f64::INFINITY,
                    region: RegionIndex { alpha: 0, beta: p + 1 },
                    form: SegmentForm::Unconstrained,
                });
            } else {
                let v = if v_hat.is_finite() { v_hat } else { kappa_cur * u_cur };
                segments.push(PathSegment {
                    kappa_lo: kappa_cur,
                    kappa_hi: f64::INFINITY,
                    region: RegionIndex { alpha, beta },
                    form: SegmentForm::ConstantV { v },
                });
            }
            terminal_kappa = kappa_cur;
            break;
        }

        let (a, b, c) = walk.blocks(alpha, beta);
        let region = RegionIndex { alpha, beta };
        let form = match style {
            Style::Gaussian => SegmentForm::GaussianExplicit {
                count: (alpha + c) as f64,
                bottom_sum: a,
                top_sum: b,
            },
            Style::Quadratic => SegmentForm::QuadraticRational {
                bottom_sum: a,
                top_sum: b,
                alpha: alpha as f64,
                top_count: c as f64,
            },
            Style::Numeric => SegmentForm::NumericSamples {
                loss: *loss,
                alpha,
                top_count: c,
                bottom_sum: a,
                top_sum: b,
                knots: vec![(kappa_cur, u_cur)],
            },
        };

        let u_level = walk.u_boundary(alpha);
        let v_level = walk.v_boundary(beta);
        let event = match &form {
            SegmentForm::GaussianExplicit { count, bottom_sum, top_sum } => next_event_gaussian(
                *count, *bottom_sum, *top_sum, kappa_cur, u_level, v_level, floor,
            ),
            SegmentForm::QuadraticRational { bottom_sum, top_sum, alpha, top_count } => {
                next_event_quadratic(
                    *bottom_sum, *top_sum, *alpha, *top_count, kappa_cur, u_level, v_level, floor,
                )
            }
            SegmentForm::NumericSamples { .. } => next_event_numeric(
                &walk, loss, alpha, c, a, b, kappa_cur, u_cur, u_level, v_level,
            )?,
            _ => unreachable!(),
        };

        match event {
            None => {
                // No further boundary crossings: the region persists for
                // every larger bound (an infinite minimizer keeps the
                // constraint active, or the truncations approach their
                // asymptotes without reaching a boundary).
                segments.push(PathSegment {
                    kappa_lo: kappa_cur,
                    kappa_hi: f64::INFINITY,
                    region,
                    form,
                });
                terminal_kappa = f64::INFINITY;
                break;
            }
            Some(ev) => {
                let mut seg = PathSegment {
                    kappa_lo: kappa_cur,
                    kappa_hi: ev.kappa,
                    region,
                    form,
                };
                if let SegmentForm::NumericSamples { knots, .. } = &mut seg.form {
                    knots.push((ev.kappa, ev.u));
                }
                segments.push(seg);
                breakpoints.push(ev.kappa);
                kappa_cur = ev.kappa;
                u_cur = ev.u;
                if ev.fires_u {
                    alpha -= tie_block_forward(&walk.lam, p - alpha);
                }
                if ev.fires_v {
                    beta += tie_block_len(&walk.lam, p - beta);
                }
            }
        }
    }

    Ok(SolutionPath { dim: p, breakpoints, segments, terminal_kappa, floor })
}

struct Event {
    kappa: f64,
    u: f64,
    fires_u: bool,
    fires_v: bool,
}

/// Stable roots of `a x^2 + b x + c = 0`, ascending.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return vec![];
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = if q == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![q / a, c / q]
    };
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

fn admissible(kappa: f64, kappa_cur: f64) -> bool {
    kappa.is_finite() && kappa > kappa_cur * (1.0 + 1e-14)
}

fn pick_event(
    kappa_u: Option<f64>,
    kappa_v: Option<f64>,
    u_of: impl Fn(f64) -> f64,
) -> Option<Event> {
    let next = match (kappa_u, kappa_v) {
        (None, None) => return None,
        (Some(ku), None) => ku,
        (None, Some(kv)) => kv,
        (Some(ku), Some(kv)) => ku.min(kv),
    };
    let tol = 1e-9 * next;
    let fires_u = kappa_u.is_some_and(|k| (k - next).abs() <= tol);
    let fires_v = kappa_v.is_some_and(|k| (k - next).abs() <= tol);
    Some(Event { kappa: next, u: u_of(next), fires_u, fires_v })
}

fn next_event_gaussian(
    count: f64,
    a: f64,
    b: f64,
    kappa_cur: f64,
    u_level: f64,
    v_level: f64,
    _floor: f64,
) -> Option<Event> {
    let u_of = |k: f64| -count / (a + k * b);
    // u(k) = L  <=>  a + k b = -count / L
    let kappa_u = if u_level > 0.0 && b != 0.0 {
        let k = (-count / u_level - a) / b;
        admissible(k, kappa_cur).then_some(k)
    } else {
        None
    };
    // k u(k) = M  <=>  k (-count - M b) = M a
    let kappa_v = if v_level.is_finite() {
        let denom = -count - v_level * b;
        if denom != 0.0 {
            let k = v_level * a / denom;
            admissible(k, kappa_cur).then_some(k)
        } else {
            None
        }
    } else {
        None
    };
    pick_event(kappa_u, kappa_v, u_of)
}

#[allow(clippy::too_many_arguments)]
fn next_event_quadratic(
    a: f64,
    b: f64,
    alpha: f64,
    c: f64,
    kappa_cur: f64,
    u_level: f64,
    v_level: f64,
    floor: f64,
) -> Option<Event> {
    let u_of = |k: f64| (a + k * b) / (alpha + k * k * c);
    let first_admissible = |roots: Vec<f64>| -> Option<f64> {
        roots
            .into_iter()
            .find(|&k| admissible(k, kappa_cur) && u_of(k) > floor)
    };
    // u(k) = L  <=>  L c k^2 - b k + (L alpha - a) = 0
    let kappa_u = if u_level > floor {
        first_admissible(quadratic_roots(u_level * c, -b, u_level * alpha - a))
    } else {
        None
    };
    // k u(k) = M  <=>  (b - M c) k^2 + a k - M alpha = 0
    let kappa_v = if v_level.is_finite() {
        first_admissible(quadratic_roots(b - v_level * c, a, -v_level * alpha))
    } else {
        None
    };
    pick_event(kappa_u, kappa_v, u_of)
}

/// Warm-started Newton solve of the region stationarity equation at a
/// fixed `kappa`; `None` when the restricted derivative has no root.
fn newton_region_u(
    loss: &SpectralLoss,
    kappa: f64,
    alpha: usize,
    top_count: usize,
    bottom_sum: f64,
    top_sum: f64,
    warm: f64,
) -> Option<f64> {
    let a = alpha as f64;
    let c = top_count as f64;
    let rhs = bottom_sum + kappa * top_sum;

    match loss {
        SpectralLoss::Gaussian => {
            if rhs < 0.0 {
                return Some(-(a + c) / rhs);
            }
            return None;
        }
        SpectralLoss::Quadratic => {
            return Some(rhs / (a + kappa * kappa * c));
        }
        SpectralLoss::NuclearPair { .. } => {}
    }

    let g = |u: f64| a * loss.lprime(u) + kappa * c * loss.lprime(kappa * u) - rhs;
    let gp = |u: f64| a * loss.lsecond(u) + kappa * kappa * c * loss.lsecond(kappa * u);

    let mut lo = warm.max(1e-300);
    let mut iters = 0;
    while g(lo) > 0.0 && iters < 4000 {
        lo *= 0.5;
        iters += 1;
    }
    if g(lo) > 0.0 {
        return None;
    }
    let mut hi = lo.max(warm);
    iters = 0;
    while g(hi) < 0.0 && iters < 4000 {
        hi *= 2.0;
        if !hi.is_finite() {
            return None;
        }
        iters += 1;
    }
    let tol = 1e-13 * (1.0 + rhs.abs());
    let mut u = warm.clamp(lo, hi);
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
        let mut next = u - gu / gp(u);
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        u = next;
    }
    Some(u)
}

/// Adaptive stepping in `kappa`: march by 10% increments, halving when a
/// boundary bracket appears so no region is stepped over, then refine the
/// crossing by bisection to relative `1e-10`.
#[allow(clippy::too_many_arguments)]
fn next_event_numeric(
    walk: &Walk<'_>,
    loss: &SpectralLoss,
    alpha: usize,
    top_count: usize,
    bottom_sum: f64,
    top_sum: f64,
    kappa_cur: f64,
    u_cur: f64,
    u_level: f64,
    v_level: f64,
) -> Result<Option<Event>> {
    let solve = |kappa: f64, warm: f64| -> Result<f64> {
        newton_region_u(loss, kappa, alpha, top_count, bottom_sum, top_sum, warm).ok_or_else(
            || Error::Numerical(format!(
                "stationarity equation lost its root in region ({alpha}, {}) at kappa {kappa}",
                walk.p + 1 - top_count
            )),
        )
    };
    // Inside the region: u above the release level, v below its ceiling.
    let crossed_u = |u: f64| u_level > walk.floor && u <= u_level;
    let crossed_v = |k: f64, u: f64| v_level.is_finite() && k * u >= v_level;

    let all_finite = walk.lam.iter().all(|x| x.is_finite());
    let ceiling = if all_finite && walk.lam[walk.p - 1] > 0.0 {
        2.0 * walk.lam[0] / walk.lam[walk.p - 1] + 10.0
    } else {
        1e7
    };

    let mut k_lo = kappa_cur;
    let mut u_lo = u_cur;
    loop {
        if k_lo > ceiling {
            return Ok(None);
        }
        let mut step = 0.1 * k_lo;
        let (k_hit, u_hit) = loop {
            let k_try = k_lo + step;
            let u_try = solve(k_try, u_lo)?;
            let cu = crossed_u(u_try);
            let cv = crossed_v(k_try, u_try);
            if cu && cv && step > 1e-12 * k_lo {
                // Both boundaries inside one step: shrink until the
                // ordering of the two events is resolved.
                step *= 0.5;
                continue;
            }
            break (if cu || cv { Some(k_try) } else { None }, u_try);
        };

        match k_hit {
            None => {
                k_lo = k_lo + step;
                u_lo = u_hit;
            }
            Some(mut k_hi) => {
                // Bisect the first crossing.
                let mut warm = u_lo;
                for _ in 0..200 {
                    if k_hi - k_lo <= EVENT_RTOL * k_hi {
                        break;
                    }
                    let mid = 0.5 * (k_lo + k_hi);
                    let u_mid = solve(mid, warm)?;
                    warm = u_mid;
                    if crossed_u(u_mid) || crossed_v(mid, u_mid) {
                        k_hi = mid;
                    } else {
                        k_lo = mid;
                        u_lo = u_mid;
                    }
                }
                let u_star = solve(k_hi, warm)?;
                let tol_u = 1e-7 * (1.0 + u_level.abs());
                let tol_v = 1e-7 * (1.0 + v_level.abs());
                let fires_u = u_level > walk.floor && (u_star - u_level).abs() <= tol_u;
                let fires_v = v_level.is_finite() && (k_hi * u_star - v_level).abs() <= tol_v;
                return Ok(Some(Event {
                    kappa: k_hi,
                    u: u_star,
                    fires_u: fires_u || (!fires_v && crossed_u(u_star)),
                    fires_v: fires_v || (!fires_u && crossed_v(k_hi, u_star)),
                }));
            }
        }
    }
}

/// Evaluates a path at one bound: binary-search the segment, evaluate its
/// truncation, clamp the minimizers. `lam` must be the same minimizer
/// vector the path was built from.
pub fn eval_path(path: &SolutionPath, kappa: f64, lam: &[f64]) -> Result<ClampedEigenSolution> {
    if !(kappa >= 1.0) {
        return Err(Error::InvalidParameter(format!("kappa must be >= 1, got {kappa}")));
    }
    if lam.len() != path.dim {
        return Err(Error::DimensionMismatch(format!(
            "path built for dimension {}, got {} minimizers",
            path.dim,
            lam.len()
        )));
    }
    let idx = path
        .segments
        .partition_point(|s| s.kappa_lo <= kappa)
        .saturating_sub(1);
    let seg = &path.segments[idx];

    let u_raw = match &seg.form {
        SegmentForm::GaussianExplicit { count, bottom_sum, top_sum } => {
            -count / (bottom_sum + kappa * top_sum)
        }
        SegmentForm::QuadraticRational { bottom_sum, top_sum, alpha, top_count } => {
            (bottom_sum + kappa * top_sum) / (alpha + kappa * kappa * top_count)
        }
        SegmentForm::NumericSamples { loss, alpha, top_count, bottom_sum, top_sum, knots } => {
            let warm = knots
                .iter()
                .min_by(|a, b| {
                    (a.0 - kappa).abs().partial_cmp(&(b.0 - kappa).abs()).unwrap()
                })
                .map_or(1.0, |k| k.1);
            newton_region_u(loss, kappa, *alpha, *top_count, *bottom_sum, *top_sum, warm)
                .ok_or_else(|| {
                    Error::Numerical("stationarity equation has no root at this bound".into())
                })?
        }
        SegmentForm::ConstantU { u } => *u,
        SegmentForm::ConstantV { v } => v / kappa,
        SegmentForm::Unconstrained => {
            let u = lam.iter().rev().find(|x| x.is_finite()).copied().unwrap_or(1.0);
            u
        }
    };
    let u = u_raw.max(path.floor);
    let v = kappa * u;
    let lambdas = lam.iter().map(|&t| u.max(t.min(v))).collect();
    Ok(ClampedEigenSolution { u_star: u, v_star: v, lambdas, region: seg.region, kappa })
}
