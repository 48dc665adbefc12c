//! Orthogonal projection onto the condition-number ball.
//!
//! The proximal operator of the indicator of the constraint set is the
//! Frobenius projection; being an indicator, it does not depend on the
//! proximal step size, so none appears in the API. The projection
//! eigendecomposes the input, solves the quadratic-loss clamping problem on
//! the spectrum, and rebuilds in the same basis. Inputs need not be
//! positive definite: an indefinite or negative definite matrix projects to
//! a positive definite matrix whose eigenvalues sit in a tiny positive
//! interval, the constrained optimum over positive truncations.

use crate::error::Result;
use crate::fixed_kappa::solve_fixed_kappa;
use crate::loss::SpectralLoss;
use crate::matrix::{eigendecompose, reconstruct, SymmetricMatrix};
use crate::path::{quadratic_path, SolutionPath};

/// Closest matrix (in Frobenius norm) with condition number at most
/// `kappa`; always positive definite.
pub fn project(x: &SymmetricMatrix, kappa: f64) -> Result<SymmetricMatrix> {
    let spec = eigendecompose(x)?;
    let sol = solve_fixed_kappa(spec.values(), &SpectralLoss::Quadratic, kappa)?;
    reconstruct(spec.vectors(), &sol.lambdas)
}

/// The projection for every bound at once: the quadratic-loss path over the
/// spectrum of `x`. Evaluating the path at a bound and rebuilding in the
/// eigenbasis of `x` reproduces [`project`] at that bound.
pub fn project_path(x: &SymmetricMatrix) -> Result<SolutionPath> {
    let spec = eigendecompose(x)?;
    quadratic_path(spec.values())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::condition_number;
    use crate::path::eval_path;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {a} ~ {b} within {tol}");
    }

    #[test]
    fn projects_diagonal_example() {
        let x = SymmetricMatrix::from_diagonal(&[3.0, 1.0]);
        let px = project(&x, 2.0).unwrap();
        assert_close(px.get(0, 0), 2.8, 1e-10);
        assert_close(px.get(1, 1), 1.4, 1e-10);
        assert_close(px.get(0, 1), 0.0, 1e-12);
    }

    #[test]
    fn feasible_input_is_untouched() {
        let x = SymmetricMatrix::from_rows(&[vec![2.0, 0.3], vec![0.3, 1.5]]).unwrap();
        let kappa = condition_number(&x).unwrap().value + 1.0;
        let px = project(&x, kappa).unwrap();
        assert!((&px - &x).frobenius_norm() <= 1e-9 * x.frobenius_norm());
    }

    #[test]
    fn kappa_one_projects_to_scaled_identity() {
        let x = SymmetricMatrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let px = project(&x, 1.0).unwrap();
        let mean = x.trace() / 2.0;
        assert_close(px.get(0, 0), mean, 1e-10);
        assert_close(px.get(1, 1), mean, 1e-10);
        assert_close(px.get(0, 1), 0.0, 1e-10);
    }

    #[test]
    fn negative_definite_input_yields_positive_definite_output() {
        let x = SymmetricMatrix::from_diagonal(&[-1.0, -2.0, -5.0]);
        let px = project(&x, 10.0).unwrap();
        let cond = condition_number(&px).unwrap();
        assert!(cond.lambda_min > 0.0);
        assert!(cond.value <= 10.0 * (1.0 + 1e-8));
    }

    #[test]
    fn idempotent_within_tolerance() {
        let x = SymmetricMatrix::from_rows(&[
            vec![3.0, -1.2, 0.4],
            vec![-1.2, 0.5, 0.9],
            vec![0.4, 0.9, -2.0],
        ])
        .unwrap();
        let p1 = project(&x, 3.0).unwrap();
        let p2 = project(&p1, 3.0).unwrap();
        assert!((&p2 - &p1).frobenius_norm() <= 1e-9 * (1.0 + p1.frobenius_norm()));
    }

    #[test]
    fn path_matches_direct_projection() {
        let x = SymmetricMatrix::from_rows(&[
            vec![2.0, 0.7, -0.3],
            vec![0.7, -1.0, 0.2],
            vec![-0.3, 0.2, 0.8],
        ])
        .unwrap();
        let spec = eigendecompose(&x).unwrap();
        let path = project_path(&x).unwrap();
        for i in 0..30 {
            let kappa = 1.0 + 0.4 * i as f64;
            let sol = eval_path(&path, kappa, spec.values()).unwrap();
            let via_path =
                crate::matrix::reconstruct(spec.vectors(), &sol.lambdas).unwrap();
            let direct = project(&x, kappa).unwrap();
            assert!(
                (&via_path - &direct).frobenius_norm()
                    <= 1e-8 * (1.0 + direct.frobenius_norm()),
                "kappa = {kappa}"
            );
        }
    }

    #[test]
    fn path_of_diagonal_example() {
        let x = SymmetricMatrix::from_diagonal(&[3.0, 1.0]);
        let path = project_path(&x).unwrap();
        assert_close(path.terminal_kappa, 3.0, 1e-9);
    }

    #[test]
    fn path_of_scaled_identity_is_a_point() {
        let x = SymmetricMatrix::from_diagonal(&[2.5, 2.5, 2.5]);
        let path = project_path(&x).unwrap();
        assert_close(path.terminal_kappa, 1.0, 1e-12);
    }
}
