//! Conjugate gradients for symmetric positive semidefinite operators.

use crate::error::{Error, Result};
use crate::exec::{dot, Execution};

#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Solves `A x = b` starting from zero. `project` is applied to the
/// right-hand side, residuals and search directions so iterates stay in
/// a subspace complementary to the kernel of `A`. Converges when the true
/// residual 2-norm is at most `tol`.
pub fn conjugate_gradient<A, P>(
    apply: A,
    project: P,
    b: &[f64],
    tol: f64,
    max_iter: usize,
    exec: Execution,
) -> Result<CgSolution>
where
    A: Fn(&[f64], &mut [f64]),
    P: Fn(&mut [f64]),
{
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    project(&mut r);
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r, exec);
    let mut iterations = 0;

    loop {
        if rr.sqrt() <= tol {
            // the recurrence drifts; confirm against the true residual
            apply(&x, &mut ap);
            let mut true_r: Vec<f64> = b.iter().zip(&ap).map(|(bi, ai)| bi - ai).collect();
            project(&mut true_r);
            let true_rr = dot(&true_r, &true_r, exec);
            if true_rr.sqrt() <= tol || iterations >= max_iter {
                if true_rr.sqrt() > tol {
                    return Err(Error::NotConverged {
                        iterations,
                        residual: true_rr.sqrt(),
                    });
                }
                return Ok(CgSolution {
                    x,
                    iterations,
                    residual: true_rr.sqrt(),
                });
            }
            r = true_r;
            p.copy_from_slice(&r);
            rr = true_rr;
        }
        if iterations >= max_iter {
            return Err(Error::NotConverged {
                iterations,
                residual: rr.sqrt(),
            });
        }
        apply(&p, &mut ap);
        project(&mut ap);
        let pap = dot(&p, &ap, exec);
        if pap <= 0.0 {
            // residual lies in the kernel; nothing more to gain
            return Err(Error::NotConverged {
                iterations,
                residual: rr.sqrt(),
            });
        }
        let alpha = rr / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        project(&mut r);
        let rr_new = dot(&r, &r, exec);
        let beta = rr_new / rr;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
        project(&mut p);
        rr = rr_new;
        iterations += 1;
    }
}

/// Subtracts the mean.
pub fn project_zero_mean(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}
