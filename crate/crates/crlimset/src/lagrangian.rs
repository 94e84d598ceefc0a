//! Representations of the even triangle group with unipotent commutator.
//!
//! For x, y of order 3 and xy of order n, the commutator trace satisfies a
//! real quadratic whose roots are conjugate; forcing tr[x,y] = 3 pins
//! t = tr(x y^-1) to a conjugate pair off the real axis. We solve for the
//! pair numerically: keep X fixed in its conjugacy class, move Y by group
//! conjugations, and drive (tr XY, tr [X,Y]) onto the target by Gauss-Newton
//! with a minimum-norm step.

use num_complex::Complex64;
use thiserror::Error;

use crate::herm::{ball_chart, projective_dist, GroupElement, HermError, HermitianForm};
use crate::linalg::{Mat3, C64, ONE, ZERO};
use crate::triangle::{build, elliptic_trace, Order, TriangleError, TriangleSpec};

#[derive(Debug, Error)]
pub enum LagrangianError {
    #[error("order n must satisfy 4 <= n < infinity, got {0}")]
    InvalidOrder(u32),
    #[error("no convergence after {0} restarts")]
    NoConvergence(u32),
    #[error(transparent)]
    Triangle(#[from] TriangleError),
    #[error(transparent)]
    Herm(#[from] HermError),
}

/// The solved pair, on the standard form diag(1,1,-1).
#[derive(Clone, Debug)]
pub struct LagrangianSolution {
    pub x: GroupElement,
    pub y: GroupElement,
    /// tr(x y^-1), branch with positive imaginary part.
    pub trace_xy_inv: C64,
    /// |tr [x,y] - 3| at the solution.
    pub commutator_residual: f64,
    pub restarts: u32,
}

const MAX_RESTARTS: u32 = 24;
const GN_ITERS: usize = 160;
const TARGET_RESIDUAL: f64 = 1e-12;

/// Basis of the Lie algebra of the isometry group of diag(1,1,-1):
/// trace-free E with E^dagger J + J E = 0.
fn su21_basis() -> [Mat3; 8] {
    let i = C64::new(0.0, 1.0);
    let mut out = [Mat3::zero(); 8];
    out[0] = Mat3::diag(i, -i, ZERO);
    out[1] = Mat3::diag(i, ZERO, -i);
    out[2].0[0][1] = ONE;
    out[2].0[1][0] = -ONE;
    out[3].0[0][1] = i;
    out[3].0[1][0] = i;
    out[4].0[0][2] = ONE;
    out[4].0[2][0] = ONE;
    out[5].0[0][2] = i;
    out[5].0[2][0] = -i;
    out[6].0[1][2] = ONE;
    out[6].0[2][1] = ONE;
    out[7].0[1][2] = i;
    out[7].0[2][1] = -i;
    out
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn unit_interval(state: &mut u64) -> f64 {
    (splitmix64(state) >> 11) as f64 / (1u64 << 53) as f64
}

fn commutator(x: &Mat3, y: &Mat3) -> Mat3 {
    x.mul(y)
        .mul(&x.inverse().expect("invertible"))
        .mul(&y.inverse().expect("invertible"))
}

fn residual(x: &Mat3, y: &Mat3, tau: f64) -> [f64; 4] {
    let t1 = x.mul(y).trace() - C64::new(tau, 0.0);
    let t2 = commutator(x, y).trace() - C64::new(3.0, 0.0);
    [t1.re, t1.im, t2.re, t2.im]
}

fn norm4(r: &[f64; 4]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Solve a 4x4 linear system by Gaussian elimination with partial pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for col in (0..4).rev() {
        let mut s = b[col];
        for k in (col + 1)..4 {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Finds eta with tr eta(x) = tr eta(y) = 0, tr eta(xy) = elliptic_trace(n)
/// and tr eta([x,y]) = 3, with [x,y] not the identity. Restarts are seeded
/// deterministically, so the returned branch is reproducible.
pub fn lagrangian_solve(n: u32) -> Result<LagrangianSolution, LagrangianError> {
    if n < 4 {
        return Err(LagrangianError::InvalidOrder(n));
    }
    let spec = TriangleSpec::at_unipotent_angle(Order::Finite(3), Order::Finite(3), Order::Finite(n))?;
    let tri = build(&spec)?;
    let chart = ball_chart(&tri.gram)?;
    let x0 = chart.to_standard(tri.x.matrix());
    let y0 = chart.to_standard(tri.y.matrix());
    let tau = elliptic_trace(n);
    let basis = su21_basis();
    let form = HermitianForm::standard();

    let mut rng_state: u64 = 0x5eed_0000 + n as u64;

    for restart in 0..MAX_RESTARTS {
        // random conjugation moves Y off the triangle locus
        let mut e = Mat3::zero();
        for b in &basis {
            let amp = 0.4 * (2.0 * unit_interval(&mut rng_state) - 1.0);
            e = e.add(&b.scale(C64::new(amp, 0.0)));
        }
        let g = e.expm();
        let g_inv = g.inverse().expect("exponential is invertible");
        let mut y = g.mul(&y0).mul(&g_inv);

        let mut r = residual(&x0, &y, tau);
        let mut converged = false;
        for _ in 0..GN_ITERS {
            if norm4(&r) < TARGET_RESIDUAL {
                converged = true;
                break;
            }
            // numerical Jacobian of the residual against the 8 conjugation directions
            let h = 1e-6;
            let mut jac = [[0.0f64; 8]; 4];
            for (col, b) in basis.iter().enumerate() {
                let gp = b.scale(C64::new(h, 0.0)).expm();
                let gm = b.scale(C64::new(-h, 0.0)).expm();
                let rp = residual(&x0, &gp.mul(&y).mul(&gm), tau);
                let rm = residual(&x0, &gm.mul(&y).mul(&gp), tau);
                for row in 0..4 {
                    jac[row][col] = (rp[row] - rm[row]) / (2.0 * h);
                }
            }
            // minimum-norm step: delta = J^T (J J^T + lambda I)^-1 r
            let mut jjt = [[0.0f64; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    jjt[i][j] = (0..8).map(|k| jac[i][k] * jac[j][k]).sum();
                }
            }
            let lambda = 1e-12 * (0..4).map(|i| jjt[i][i]).sum::<f64>().max(1e-30);
            for (i, row) in jjt.iter_mut().enumerate() {
                row[i] += lambda;
            }
            let Some(mu) = solve4(jjt, r) else { break };
            let mut delta = [0.0f64; 8];
            for (k, d) in delta.iter_mut().enumerate() {
                *d = (0..4).map(|i| jac[i][k] * mu[i]).sum();
            }

            // damped update with halving on failure to descend
            let mut step = 1.0f64;
            let mut improved = false;
            for _ in 0..28 {
                let mut e = Mat3::zero();
                for (k, b) in basis.iter().enumerate() {
                    e = e.add(&b.scale(C64::new(-step * delta[k], 0.0)));
                }
                let gs = e.expm();
                let gs_inv = gs.inverse().expect("invertible");
                let y_new = gs.mul(&y).mul(&gs_inv);
                let r_new = residual(&x0, &y_new, tau);
                if norm4(&r_new) < norm4(&r) {
                    y = y_new;
                    r = r_new;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }

        if !converged {
            continue;
        }
        // reject the degenerate solution where the commutator is the identity
        let comm = commutator(&x0, &y);
        if projective_dist(&comm, &Mat3::identity()) < 1e-6 {
            continue;
        }
        let t = x0.mul(&y.inverse().expect("invertible")).trace();
        if t.im.abs() < 1e-6 {
            continue;
        }
        // normalize to the branch with positive imaginary part by entrywise
        // conjugation (the standard form is real, so this stays in the group)
        let (xm, ym) = if t.im > 0.0 {
            (x0, y)
        } else {
            (x0.conj(), y.conj())
        };
        let x = GroupElement::with_tol(xm, &form, 1e-7)?;
        let y = GroupElement::with_tol(ym, &form, 1e-7)?;
        let trace_xy_inv = xm.mul(&ym.inverse().expect("invertible")).trace();
        let commutator_residual = (commutator(&xm, &ym).trace() - C64::new(3.0, 0.0)).norm();
        return Ok(LagrangianSolution {
            x,
            y,
            trace_xy_inv,
            commutator_residual,
            restarts: restart,
        });
    }
    Err(LagrangianError::NoConvergence(MAX_RESTARTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::unit_cube_roots;

    #[test]
    fn n4_matches_reference_value() {
        let sol = lagrangian_solve(4).unwrap();
        let expect = Complex64::new(2.820, 0.222);
        assert!(
            (sol.trace_xy_inv - expect).norm() < 5e-3,
            "t = {}",
            sol.trace_xy_inv
        );
        assert!(sol.commutator_residual < 1e-8);
    }

    #[test]
    fn returned_pair_has_order_three() {
        let sol = lagrangian_solve(5).unwrap();
        let x3 = sol.x.matrix().powi(3);
        let ok = unit_cube_roots()
            .iter()
            .any(|&w| x3.sub(&Mat3::scalar(w)).norm_inf() < 1e-7);
        assert!(ok);
        let y3 = sol.y.matrix().powi(3);
        let ok = unit_cube_roots()
            .iter()
            .any(|&w| y3.sub(&Mat3::scalar(w)).norm_inf() < 1e-7);
        assert!(ok);
    }

    #[test]
    fn imaginary_part_nonzero_small_orders() {
        for n in 4..=10 {
            let sol = lagrangian_solve(n).unwrap();
            assert!(
                sol.trace_xy_inv.im > 1e-6,
                "n = {n}: t = {}",
                sol.trace_xy_inv
            );
        }
    }

    #[test]
    fn rejects_small_order() {
        assert!(matches!(
            lagrangian_solve(3),
            Err(LagrangianError::InvalidOrder(3))
        ));
    }
}
