//! Dense 3x3 complex linear algebra.
//!
//! Everything downstream works on fixed-size 3x3 matrices over C, so we keep a
//! small self-contained kernel instead of pulling in a general solver:
//! characteristic-polynomial eigenvalues with one Newton polish per root,
//! eigenvectors by row cross products, and a plain series exponential.

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Column vector in C^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3(pub [C64; 3]);

impl Vec3 {
    pub fn zero() -> Self {
        Vec3([ZERO; 3])
    }

    pub fn from_reals(x: f64, y: f64, z: f64) -> Self {
        Vec3([C64::new(x, 0.0), C64::new(y, 0.0), C64::new(z, 0.0)])
    }

    pub fn conj(&self) -> Self {
        Vec3([self.0[0].conj(), self.0[1].conj(), self.0[2].conj()])
    }

    pub fn scale(&self, s: C64) -> Self {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    /// Bilinear dot product (no conjugation).
    pub fn dot(&self, other: &Vec3) -> C64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// Bilinear cross product; `a.cross(b)` is dot-orthogonal to both factors.
    pub fn cross(&self, other: &Vec3) -> Vec3 {
        let a = &self.0;
        let b = &other.0;
        Vec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    /// Euclidean norm sqrt(sum |z_i|^2).
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Rescale so the largest-modulus coordinate has modulus 1.
    pub fn normalized_by_max(&self) -> Vec3 {
        let m = self.max_abs();
        if m == 0.0 {
            *self
        } else {
            self.scale(C64::new(1.0 / m, 0.0))
        }
    }

    pub fn sub(&self, other: &Vec3) -> Vec3 {
        Vec3([
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ])
    }
}

/// Row-major 3x3 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3(pub [[C64; 3]; 3]);

impl Mat3 {
    pub fn zero() -> Self {
        Mat3([[ZERO; 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Mat3::zero();
        for i in 0..3 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn diag(a: C64, b: C64, c: C64) -> Self {
        let mut m = Mat3::zero();
        m.0[0][0] = a;
        m.0[1][1] = b;
        m.0[2][2] = c;
        m
    }

    pub fn scalar(s: C64) -> Self {
        Mat3::diag(s, s, s)
    }

    pub fn from_rows(r0: [C64; 3], r1: [C64; 3], r2: [C64; 3]) -> Self {
        Mat3([r0, r1, r2])
    }

    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Self {
        let mut m = Mat3::zero();
        for i in 0..3 {
            m.0[i][0] = c0.0[i];
            m.0[i][1] = c1.0[i];
            m.0[i][2] = c2.0[i];
        }
        m
    }

    pub fn row(&self, i: usize) -> Vec3 {
        Vec3(self.0[i])
    }

    pub fn col(&self, j: usize) -> Vec3 {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn transpose(&self) -> Mat3 {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn conj(&self) -> Mat3 {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] = m.0[i][j].conj();
            }
        }
        m
    }

    pub fn adjoint(&self) -> Mat3 {
        self.transpose().conj()
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut s = ZERO;
                for k in 0..3 {
                    s += self.0[i][k] * other.0[k][j];
                }
                m.0[i][j] = s;
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        let mut out = Vec3::zero();
        for i in 0..3 {
            out.0[i] = self.0[i][0] * v.0[0] + self.0[i][1] * v.0[1] + self.0[i][2] * v.0[2];
        }
        out
    }

    pub fn add(&self, other: &Mat3) -> Mat3 {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] += other.0[i][j];
            }
        }
        m
    }

    pub fn sub(&self, other: &Mat3) -> Mat3 {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] -= other.0[i][j];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Mat3 {
        let mut m = *self;
        for i in 0..3 {
            for j in 0..3 {
                m.0[i][j] *= s;
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    pub fn det(&self) -> C64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Classical adjugate, so `self * adjugate == det * I`.
    pub fn adjugate(&self) -> Mat3 {
        let m = &self.0;
        let cof = |i: usize, j: usize| -> C64 {
            let r = [(i + 1) % 3, (i + 2) % 3];
            let c = [(j + 1) % 3, (j + 2) % 3];
            m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
        };
        let mut adj = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                // transposed cofactor matrix
                adj.0[j][i] = cof(i, j);
            }
        }
        adj
    }

    pub fn inverse(&self) -> Option<Mat3> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return None;
        }
        Some(self.adjugate().scale(ONE / d))
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn powi(&self, k: i32) -> Mat3 {
        if k == 0 {
            return Mat3::identity();
        }
        let base = if k < 0 {
            self.inverse().expect("singular matrix has no negative power")
        } else {
            *self
        };
        let mut out = Mat3::identity();
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Max entry modulus.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Coefficients (c2, c1, c0) of det(lambda I - M) = l^3 + c2 l^2 + c1 l + c0.
    pub fn char_poly(&self) -> (C64, C64, C64) {
        let tr = self.trace();
        // sum of principal 2x2 minors
        let m = &self.0;
        let m2 = (m[0][0] * m[1][1] - m[0][1] * m[1][0])
            + (m[0][0] * m[2][2] - m[0][2] * m[2][0])
            + (m[1][1] * m[2][2] - m[1][2] * m[2][1]);
        (-tr, m2, -self.det())
    }

    /// Eigenvalues via Cardano on the characteristic cubic, each polished by
    /// one or two Newton steps. No ordering guarantee.
    pub fn eigenvalues(&self) -> [C64; 3] {
        let (c2, c1, c0) = self.char_poly();
        cubic_roots(c2, c1, c0)
    }

    /// Eigenvector for a (simple) eigenvalue: largest cross product of two
    /// rows of M - lambda*I. Returns None when all cross products degenerate,
    /// which happens exactly when the eigenvalue is multiple.
    pub fn eigenvector(&self, lambda: C64) -> Option<Vec3> {
        let a = self.sub(&Mat3::scalar(lambda));
        let rows = [a.row(0), a.row(1), a.row(2)];
        let mut best: Option<Vec3> = None;
        let mut best_norm = 0.0;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let c = rows[i].cross(&rows[j]);
            let n = c.norm();
            if n > best_norm {
                best_norm = n;
                best = Some(c);
            }
        }
        let scale = a.norm_inf().max(1.0);
        // cross products scale like entries squared
        if best_norm <= 1e-12 * scale * scale {
            return None;
        }
        best.map(|v| v.normalized_by_max())
    }

    /// Matrix exponential by scaling and squaring with a truncated series.
    pub fn expm(&self) -> Mat3 {
        let norm = self.norm_inf();
        let s = if norm > 0.5 {
            (norm / 0.5).log2().ceil() as u32
        } else {
            0
        };
        let a = self.scale(C64::new(1.0 / f64::powi(2.0, s as i32), 0.0));
        let mut term = Mat3::identity();
        let mut sum = Mat3::identity();
        for k in 1..=16 {
            term = term.mul(&a).scale(C64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..s {
            sum = sum.mul(&sum);
        }
        sum
    }
}

/// Roots of l^3 + c2 l^2 + c1 l + c0 over C (Cardano + Newton polish).
pub fn cubic_roots(c2: C64, c1: C64, c0: C64) -> [C64; 3] {
    // depressed cubic t^3 + p t + q with l = t - c2/3
    let shift = c2 / 3.0;
    let p = c1 - c2 * c2 / 3.0;
    let q = c0 - c1 * c2 / 3.0 + c2 * c2 * c2 * (2.0 / 27.0);

    let mut roots = if p.norm() < 1e-14 && q.norm() < 1e-14 {
        [ZERO; 3]
    } else {
        let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        // pick the branch keeping u away from zero
        let u3a = -q / 2.0 + disc;
        let u3b = -q / 2.0 - disc;
        let u3 = if u3a.norm() >= u3b.norm() { u3a } else { u3b };
        let u = u3.powf(1.0 / 3.0);
        let omega = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let mut out = [ZERO; 3];
        let mut uk = u;
        for r in out.iter_mut() {
            // t = u - p/(3u)
            *r = uk - p / (uk * 3.0);
            uk *= omega;
        }
        out
    };

    for r in roots.iter_mut() {
        let mut l = *r - shift;
        // Newton polish, skipped near critical points of the cubic
        for _ in 0..2 {
            let f = ((l + c2) * l + c1) * l + c0;
            let df = (l * 3.0 + c2 * 2.0) * l + c1;
            if df.norm() < 1e-8 {
                break;
            }
            l -= f / df;
        }
        *r = l;
    }
    roots
}

/// Real roots of l^3 + b l^2 + c l + d assuming all roots are real (the
/// Hermitian case). Ascending order.
pub fn real_cubic_roots(b: f64, c: f64, d: f64) -> [f64; 3] {
    let p = c - b * b / 3.0;
    let q = d - b * c / 3.0 + 2.0 * b * b * b / 27.0;
    let mut out = if p.abs() < 1e-14 && q.abs() < 1e-14 {
        [0.0; 3]
    } else {
        // trigonometric method; clamp guards tiny excursions outside [-1,1]
        let m = (-p / 3.0).max(0.0);
        let sm = m.sqrt();
        let arg = if sm > 0.0 {
            (3.0 * q / (2.0 * p * sm)).clamp(-1.0, 1.0)
        } else {
            0.0
        };
        let phi = arg.acos() / 3.0;
        let mut r = [0.0; 3];
        for (k, rk) in r.iter_mut().enumerate() {
            *rk = 2.0 * sm * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos();
        }
        r
    };
    for r in out.iter_mut() {
        let mut l = *r - b / 3.0;
        for _ in 0..2 {
            let f = ((l + b) * l + c) * l + d;
            let df = (3.0 * l + 2.0 * b) * l + c;
            if df.abs() < 1e-10 {
                break;
            }
            l -= f / df;
        }
        *r = l;
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

/// Jacobi eigenvalue iteration for a real symmetric 4x4 matrix.
/// Returns (eigenvalues descending, matching orthonormal column vectors).
pub fn sym4_eigen(a: [[f64; 4]; 4]) -> ([f64; 4], [[f64; 4]; 4]) {
    let mut a = a;
    let mut v = [[0.0; 4]; 4];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _sweep in 0..50 {
        let mut off = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                off += a[i][j] * a[i][j];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                if a[p][q].abs() < 1e-18 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..4 {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap());
    let mut vals = [0.0; 4];
    let mut vecs = [[0.0; 4]; 4];
    for (slot, &i) in idx.iter().enumerate() {
        vals[slot] = a[i][i];
        for k in 0..4 {
            vecs[slot][k] = v[k][i];
        }
    }
    (vals, vecs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjugate_inverse() {
        let m = Mat3::from_rows(
            [c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0)],
            [c(0.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)],
            [c(3.0, 0.0), c(0.0, 0.5), c(1.0, 0.0)],
        );
        let inv = m.inverse().unwrap();
        let prod = m.mul(&inv);
        assert!(prod.sub(&Mat3::identity()).norm_inf() < 1e-13);
    }

    #[test]
    fn eigen_diag() {
        let m = Mat3::diag(c(2.0, 0.0), c(1.0, 0.0), c(0.5, 0.0));
        let mut evs: Vec<f64> = m.eigenvalues().iter().map(|z| z.re).collect();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((evs[0] - 0.5).abs() < 1e-12);
        assert!((evs[1] - 1.0).abs() < 1e-12);
        assert!((evs[2] - 2.0).abs() < 1e-12);
        let v = m.eigenvector(c(2.0, 0.0)).unwrap();
        assert!(v.0[1].norm() < 1e-12 && v.0[2].norm() < 1e-12);
    }

    #[test]
    fn eigen_residual_random_ish() {
        // fixed "random" matrix; residual ||Mv - lambda v|| must be tiny
        let m = Mat3::from_rows(
            [c(0.3, 0.1), c(-1.2, 0.4), c(0.7, 0.0)],
            [c(2.0, -0.3), c(0.1, 0.1), c(-0.5, 0.9)],
            [c(0.0, 1.1), c(0.6, -0.2), c(-0.8, 0.3)],
        );
        for lam in m.eigenvalues() {
            let v = m.eigenvector(lam).unwrap();
            let r = m.mul_vec(&v).sub(&v.scale(lam));
            assert!(r.norm() < 1e-10 * v.norm().max(1.0), "residual {}", r.norm());
        }
    }

    #[test]
    fn real_cubic_sorted() {
        // (l-1)(l-2)(l+3) = l^3 - 7l + 6... expand: l^3 +0 l^2 -7 l +6
        let r = real_cubic_roots(0.0, -7.0, 6.0);
        assert!((r[0] + 3.0).abs() < 1e-12);
        assert!((r[1] - 1.0).abs() < 1e-12);
        assert!((r[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn expm_identity_log() {
        let e = Mat3::zero().expm();
        assert!(e.sub(&Mat3::identity()).norm_inf() < 1e-15);
        // exp of diag is diag of exps
        let d = Mat3::diag(c(0.0, 1.0), c(0.2, 0.0), c(-0.2, -1.0));
        let e = d.expm();
        assert!((e.0[0][0] - c(0.0, 1.0).exp()).norm() < 1e-12);
        assert!((e.0[1][1] - c(0.2, 0.0).exp()).norm() < 1e-12);
        assert!((e.0[2][2] - c(-0.2, -1.0).exp()).norm() < 1e-12);
    }

    #[test]
    fn jacobi_4x4() {
        let a = [
            [4.0, 1.0, 0.0, 0.5],
            [1.0, 3.0, 0.2, 0.0],
            [0.0, 0.2, 2.0, -0.3],
            [0.5, 0.0, -0.3, 1.0],
        ];
        let (vals, vecs) = sym4_eigen(a);
        for (slot, &lam) in vals.iter().enumerate() {
            let v = vecs[slot];
            let mut resid = 0.0;
            for i in 0..4 {
                let mut av = 0.0;
                for j in 0..4 {
                    av += a[i][j] * v[j];
                }
                resid += (av - lam * v[i]).powi(2);
            }
            assert!(resid.sqrt() < 1e-10);
        }
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }
}
