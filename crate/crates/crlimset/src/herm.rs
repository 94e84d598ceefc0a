//! Hermitian forms of signature (2,1) on C^3 and the isometries that
//! preserve them: classification by Goldman's trace polynomial, attractive
//! fixed points of loxodromics, and the chart taking an arbitrary (2,1) form
//! to the standard ball model.
//!
//! Convention: the product is `<z,w> = sum_ij H[i][j] z_i conj(w_j)`, i.e. the
//! Gram pairing of basis vectors is read off as `<e_i,e_j> = H[i][j]`. With
//! this convention a matrix M is an isometry iff `M^T H conj(M) = H`.

use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::config::Tolerances;
use crate::linalg::{real_cubic_roots, Mat3, Vec3, C64, ONE};

#[derive(Debug, Error)]
pub enum HermError {
    #[error("matrix does not preserve the form (residual {0:.3e})")]
    NotAnIsometry(f64),
    #[error("determinant is not a unit: |det - 1| = {0:.3e}")]
    NonUnitDeterminant(f64),
    #[error("element is not loxodromic")]
    NotLoxodromic,
    #[error("top eigenvalue moduli too close (relative gap {0:.3e})")]
    DegenerateEigenstructure(f64),
    #[error("form has signature {0:?}, expected (2,1)")]
    WrongSignature((u8, u8)),
    #[error("elements live on different Hermitian forms")]
    FormMismatch,
    #[error("lift is not on the null cone (|<v,v>| = {0:.3e} relative)")]
    NotNull(f64),
}

/// A Hermitian 3x3 form. Entries satisfy H[i][j] = conj(H[j][i]) exactly:
/// the constructor symmetrizes its input.
#[derive(Clone, Debug)]
pub struct HermitianForm {
    entries: Mat3,
}

impl HermitianForm {
    pub fn new(entries: Mat3) -> Self {
        let mut h = entries;
        for i in 0..3 {
            h.0[i][i] = Complex64::new(h.0[i][i].re, 0.0);
            for j in (i + 1)..3 {
                let avg = (h.0[i][j] + h.0[j][i].conj()) * 0.5;
                h.0[i][j] = avg;
                h.0[j][i] = avg.conj();
            }
        }
        HermitianForm { entries: h }
    }

    /// diag(1, 1, -1).
    pub fn standard() -> Arc<Self> {
        Arc::new(HermitianForm::new(Mat3::diag(
            ONE,
            ONE,
            Complex64::new(-1.0, 0.0),
        )))
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.entries
    }

    /// Real eigenvalues, ascending. The characteristic polynomial of a
    /// Hermitian matrix has real coefficients and real roots.
    pub fn eigenvalues(&self) -> [f64; 3] {
        let (c2, c1, c0) = self.entries.char_poly();
        real_cubic_roots(c2.re, c1.re, c0.re)
    }

    /// (positive, negative) inertia counted from eigenvalue signs.
    pub fn signature(&self) -> (u8, u8) {
        let ev = self.eigenvalues();
        let pos = ev.iter().filter(|&&l| l > 0.0).count() as u8;
        let neg = ev.iter().filter(|&&l| l < 0.0).count() as u8;
        (pos, neg)
    }

    pub fn norm_inf(&self) -> f64 {
        self.entries.norm_inf()
    }

    fn same_as(&self, other: &HermitianForm) -> bool {
        self.entries.sub(&other.entries).norm_inf()
            <= 1e-12 * self.norm_inf().max(other.norm_inf()).max(1.0)
    }
}

/// `<z,w> = sum_ij H[i][j] z_i conj(w_j)`; conjugate-symmetric in (z,w).
pub fn herm_product(z: &Vec3, w: &Vec3, h: &HermitianForm) -> C64 {
    h.matrix().mul_vec(&w.conj()).dot(z)
}

/// Goldman's trace polynomial f(tau) = |tau|^4 - 8 Re(tau^3) + 18 |tau|^2 - 27.
/// For real tau this equals (tau+1)(tau-3)^3.
pub fn goldman_f(tau: C64) -> f64 {
    let n2 = tau.norm_sqr();
    n2 * n2 - 8.0 * (tau * tau * tau).re + 18.0 * n2 - 27.0
}

/// An element of U(2,1) for a declared form; `det_normalized` records
/// whether det = 1, which classification requires.
#[derive(Clone, Debug)]
pub struct GroupElement {
    matrix: Mat3,
    form: Arc<HermitianForm>,
    det_normalized: bool,
}

impl GroupElement {
    /// Wraps a matrix after checking it preserves `form`:
    /// ||M^T H conj(M) - H||_inf < tol * ||H||_inf.
    pub fn new(matrix: Mat3, form: &Arc<HermitianForm>) -> Result<Self, HermError> {
        Self::with_tol(matrix, form, Tolerances::DEFAULT.form_preservation)
    }

    pub fn with_tol(matrix: Mat3, form: &Arc<HermitianForm>, tol: f64) -> Result<Self, HermError> {
        let resid = form_residual(&matrix, form);
        if resid >= tol {
            return Err(HermError::NotAnIsometry(resid));
        }
        let det_normalized = (matrix.det() - ONE).norm() < Tolerances::DEFAULT.unit_det;
        Ok(GroupElement {
            matrix,
            form: Arc::clone(form),
            det_normalized,
        })
    }

    pub fn identity(form: &Arc<HermitianForm>) -> Self {
        GroupElement {
            matrix: Mat3::identity(),
            form: Arc::clone(form),
            det_normalized: true,
        }
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.matrix
    }

    pub fn form(&self) -> &Arc<HermitianForm> {
        &self.form
    }

    pub fn is_det_normalized(&self) -> bool {
        self.det_normalized
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn det(&self) -> C64 {
        self.matrix.det()
    }

    pub fn mul(&self, other: &GroupElement) -> Result<GroupElement, HermError> {
        if !same_form(self, other) {
            return Err(HermError::FormMismatch);
        }
        let matrix = self.matrix.mul(&other.matrix);
        let det_normalized = (matrix.det() - ONE).norm() < Tolerances::DEFAULT.unit_det;
        Ok(GroupElement {
            matrix,
            form: Arc::clone(&self.form),
            det_normalized,
        })
    }

    pub fn inverse(&self) -> GroupElement {
        let inv = self
            .matrix
            .inverse()
            .expect("form-preserving matrices are invertible");
        GroupElement {
            matrix: inv,
            form: Arc::clone(&self.form),
            det_normalized: self.det_normalized,
        }
    }

    pub fn powi(&self, k: i32) -> GroupElement {
        GroupElement {
            matrix: self.matrix.powi(k),
            form: Arc::clone(&self.form),
            det_normalized: self.det_normalized,
        }
    }
}

pub fn same_form(a: &GroupElement, b: &GroupElement) -> bool {
    Arc::ptr_eq(a.form(), b.form()) || a.form.same_as(&b.form)
}

/// ||M^T H conj(M) - H||_inf / ||H||_inf.
pub fn form_residual(m: &Mat3, form: &HermitianForm) -> f64 {
    let h = form.matrix();
    let lhs = m.transpose().mul(h).mul(&m.conj());
    lhs.sub(h).norm_inf() / form.norm_inf().max(1e-300)
}

/// Isometry type tags. `classify` emits Loxodromic, RegularElliptic,
/// Identity, Unipotent and EllipticOrParabolicBoundary; the coarser Elliptic
/// and Parabolic tags exist for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsometryTag {
    Elliptic,
    RegularElliptic,
    Loxodromic,
    Parabolic,
    Unipotent,
    EllipticOrParabolicBoundary,
    Identity,
}

impl std::fmt::Display for IsometryTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            IsometryTag::Elliptic => "elliptic",
            IsometryTag::RegularElliptic => "regular elliptic",
            IsometryTag::Loxodromic => "loxodromic",
            IsometryTag::Parabolic => "parabolic",
            IsometryTag::Unipotent => "unipotent",
            IsometryTag::EllipticOrParabolicBoundary => "elliptic/parabolic boundary",
            IsometryTag::Identity => "identity",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IsometryClass {
    pub tag: IsometryTag,
    pub trace: C64,
}

impl IsometryClass {
    pub fn is_elliptic_type(&self) -> bool {
        matches!(
            self.tag,
            IsometryTag::Elliptic | IsometryTag::RegularElliptic
        )
    }
}

pub fn unit_cube_roots() -> [C64; 3] {
    let w = 2.0 * std::f64::consts::PI / 3.0;
    [ONE, C64::from_polar(1.0, w), C64::from_polar(1.0, -w)]
}

fn is_scalar_cube_root(m: &Mat3, tol: f64) -> bool {
    unit_cube_roots()
        .iter()
        .any(|&w| m.sub(&Mat3::scalar(w)).norm_inf() < tol)
}

/// Goldman classification of a det-normalized element.
///
/// Sign of f(tr) gives loxodromic / regular elliptic; at the boundary the
/// trichotomy is: identity (scalar cube root of unity), unipotent
/// (tr^3 = 27), or the unresolved reflection/ellipto-parabolic case.
pub fn classify(m: &GroupElement, tol: f64) -> Result<IsometryClass, HermError> {
    let det_err = (m.det() - ONE).norm();
    if det_err >= tol.max(Tolerances::DEFAULT.unit_det) {
        return Err(HermError::NonUnitDeterminant(det_err));
    }
    let trace = m.trace();
    Ok(IsometryClass {
        tag: classify_trace(&m.matrix, trace, tol),
        trace,
    })
}

fn classify_trace(m: &Mat3, trace: C64, tol: f64) -> IsometryTag {
    let f = goldman_f(trace);
    if f > tol {
        IsometryTag::Loxodromic
    } else if f < -tol {
        IsometryTag::RegularElliptic
    } else if is_scalar_cube_root(m, tol) {
        IsometryTag::Identity
    } else if (trace * trace * trace - Complex64::new(27.0, 0.0)).norm() < 27.0 * tol {
        IsometryTag::Unipotent
    } else {
        IsometryTag::EllipticOrParabolicBoundary
    }
}

/// A point of the boundary sphere: a null lift plus ball-chart coordinates
/// (z1, z2) with |z1|^2 + |z2|^2 = 1.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryPoint {
    pub lift: Vec3,
    pub s3: (C64, C64),
}

impl BoundaryPoint {
    /// Validates the null-cone condition and charts the lift.
    pub fn from_lift(lift: Vec3, chart: &BallChart) -> Result<Self, HermError> {
        let lift = lift.normalized_by_max();
        let pairing = herm_product(&lift, &lift, &chart.form);
        let scale = lift.norm().powi(2);
        if pairing.norm() >= Tolerances::DEFAULT.null_cone * scale {
            return Err(HermError::NotNull(pairing.norm() / scale));
        }
        let s3 = chart.s3_of_lift(&lift)?;
        Ok(BoundaryPoint { lift, s3 })
    }

    /// Point from chart coordinates; the pair is renormalized onto the sphere.
    pub fn from_s3(z1: C64, z2: C64, chart: &BallChart) -> BoundaryPoint {
        let n = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
        let (z1, z2) = (z1 / n, z2 / n);
        let lift = chart.t.mul_vec(&Vec3([z1, z2, ONE])).normalized_by_max();
        BoundaryPoint { lift, s3: (z1, z2) }
    }
}

/// Basis transform to the standard form: columns t_i with
/// `<t_i, t_j> = diag(1,1,-1)` under the declared form's product.
#[derive(Clone, Debug)]
pub struct BallChart {
    pub t: Mat3,
    pub t_inv: Mat3,
    form: Arc<HermitianForm>,
}

impl BallChart {
    pub fn form(&self) -> &Arc<HermitianForm> {
        &self.form
    }

    /// Chart a null lift to (z1, z2) on the unit sphere of C^2.
    pub fn s3_of_lift(&self, lift: &Vec3) -> Result<(C64, C64), HermError> {
        let u = self.t_inv.mul_vec(lift);
        // null vectors have |u1|^2 + |u2|^2 = |u3|^2, so u3 != 0
        let z1 = u.0[0] / u.0[2];
        let z2 = u.0[1] / u.0[2];
        let n = (z1.norm_sqr() + z2.norm_sqr()).sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(HermError::NotNull(f64::INFINITY));
        }
        Ok((z1 / n, z2 / n))
    }

    /// Conjugate a matrix on this form into the standard frame.
    pub fn to_standard(&self, m: &Mat3) -> Mat3 {
        self.t_inv.mul(m).mul(&self.t)
    }
}

/// Computes the chart for a signature-(2,1) form.
///
/// The negative eigenvalue of a (2,1) form is simple, so its eigenvector is
/// stable; the positive 2-space is then orthonormalized against the form
/// directly, which stays well-defined when the positive eigenvalues collide.
pub fn ball_chart(form: &Arc<HermitianForm>) -> Result<BallChart, HermError> {
    let sig = form.signature();
    if sig != (2, 1) {
        return Err(HermError::WrongSignature(sig));
    }
    // the standard-convention matrix for this product is H^T
    let k = form.matrix().transpose();
    let lambda_neg = form.eigenvalues()[0];
    let v_neg = k
        .eigenvector(Complex64::new(lambda_neg, 0.0))
        .ok_or(HermError::WrongSignature(sig))?;
    let phi = |a: &Vec3, b: &Vec3| herm_product(a, b, form);
    let t3 = v_neg.scale(Complex64::new(
        1.0 / (-phi(&v_neg, &v_neg).re).sqrt(),
        0.0,
    ));

    // project the standard basis off t3 (w = e + <e,t3> t3 since <t3,t3> = -1)
    let mut candidates: Vec<Vec3> = Vec::with_capacity(3);
    for i in 0..3 {
        let mut e = Vec3::zero();
        e.0[i] = ONE;
        let proj = phi(&e, &t3);
        let mut w = e;
        for c in 0..3 {
            w.0[c] += proj * t3.0[c];
        }
        candidates.push(w);
    }
    candidates.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());

    let t1 = {
        let v = candidates[0];
        let n = phi(&v, &v).re;
        v.scale(Complex64::new(1.0 / n.sqrt(), 0.0))
    };

    let mut t2 = None;
    for cand in &candidates[1..] {
        let mut w = *cand;
        let c = phi(&w, &t1);
        for k in 0..3 {
            w.0[k] -= c * t1.0[k];
        }
        let n = phi(&w, &w).re;
        if n > 1e-12 {
            t2 = Some(w.scale(Complex64::new(1.0 / n.sqrt(), 0.0)));
            break;
        }
    }
    let t2 = t2.ok_or(HermError::WrongSignature(sig))?;

    let t = Mat3::from_cols(t1, t2, t3);
    let t_inv = t.inverse().ok_or(HermError::WrongSignature(sig))?;
    Ok(BallChart {
        t,
        t_inv,
        form: Arc::clone(form),
    })
}

/// Projectivized eigenvector for the eigenvalue of strictly largest modulus.
/// The result lies on the null cone of the element's form.
pub fn attractive_fixed_point(m: &GroupElement) -> Result<BoundaryPoint, HermError> {
    let chart = ball_chart(m.form())?;
    attractive_fixed_point_in(m, &chart)
}

pub fn attractive_fixed_point_in(
    m: &GroupElement,
    chart: &BallChart,
) -> Result<BoundaryPoint, HermError> {
    let lift = attractive_lift(&m.matrix, Tolerances::DEFAULT.trace_classify)?;
    BoundaryPoint::from_lift(lift, chart)
}

/// Attractive eigenvector of a loxodromic matrix, unvalidated against a chart.
pub fn attractive_lift(m: &Mat3, classify_tol: f64) -> Result<Vec3, HermError> {
    if goldman_f(m.trace()) <= classify_tol {
        return Err(HermError::NotLoxodromic);
    }
    let mut evs = m.eigenvalues();
    evs.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    let gap = (evs[0].norm() - evs[1].norm()) / evs[0].norm().max(1e-300);
    if gap < Tolerances::DEFAULT.eigen_gap {
        return Err(HermError::DegenerateEigenstructure(gap));
    }
    m.eigenvector(evs[0])
        .ok_or(HermError::DegenerateEigenstructure(gap))
}

/// Equality in PU(2,1): true iff min over unit cube roots w of ||M - wN||_inf < tol.
pub fn projective_equal(m: &GroupElement, n: &GroupElement, tol: f64) -> Result<bool, HermError> {
    if !same_form(m, n) {
        return Err(HermError::FormMismatch);
    }
    Ok(projective_dist(&m.matrix, &n.matrix) < tol)
}

pub fn projective_dist(m: &Mat3, n: &Mat3) -> f64 {
    unit_cube_roots()
        .iter()
        .map(|&w| m.sub(&n.scale(w)).norm_inf())
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn antidiagonal_form() -> Arc<HermitianForm> {
        // <z,z> = z1 conj(z3) + |z2|^2 + z3 conj(z1)
        let mut m = Mat3::zero();
        m.0[0][2] = ONE;
        m.0[1][1] = ONE;
        m.0[2][0] = ONE;
        Arc::new(HermitianForm::new(m))
    }

    #[test]
    fn herm_product_standard() {
        let h = HermitianForm::standard();
        let e1 = Vec3::from_reals(1.0, 0.0, 0.0);
        let e3 = Vec3::from_reals(0.0, 0.0, 1.0);
        let null = Vec3::from_reals(1.0, 0.0, 1.0);
        assert_eq!(herm_product(&e1, &e1, &h), ONE);
        assert_eq!(herm_product(&e3, &e3, &h), c(-1.0, 0.0));
        assert_eq!(herm_product(&null, &null, &h), c(0.0, 0.0));
    }

    #[test]
    fn herm_product_conjugate_symmetric() {
        let mut m = Mat3::identity();
        m.0[0][2] = c(0.3, 0.4);
        m.0[2][0] = c(0.3, -0.4);
        let h = Arc::new(HermitianForm::new(m));
        let z = Vec3([c(1.0, 2.0), c(0.0, -1.0), c(0.5, 0.5)]);
        let w = Vec3([c(-1.0, 0.3), c(2.0, 0.0), c(0.0, 1.0)]);
        let zw = herm_product(&z, &w, &h);
        let wz = herm_product(&w, &z, &h);
        assert!((zw - wz.conj()).norm() < 1e-14);
    }

    #[test]
    fn goldman_values() {
        assert!(goldman_f(c(3.0, 0.0)).abs() < 1e-12);
        assert!((goldman_f(c(0.0, 0.0)) + 27.0).abs() < 1e-12);
        assert!((goldman_f(c(4.0, 0.0)) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn classify_diagonal_loxodromic() {
        let h = antidiagonal_form();
        let m = Mat3::diag(c(2.0, 0.0), c(1.0, 0.0), c(0.5, 0.0));
        let g = GroupElement::new(m, &h).unwrap();
        let cls = classify(&g, 1e-8).unwrap();
        assert_eq!(cls.tag, IsometryTag::Loxodromic);
        assert!((cls.trace.re - 3.5).abs() < 1e-14);
        assert!((goldman_f(cls.trace) - 0.5625).abs() < 1e-12);
    }

    #[test]
    fn classify_identity_and_scalars() {
        let h = HermitianForm::standard();
        let g = GroupElement::identity(&h);
        assert_eq!(classify(&g, 1e-8).unwrap().tag, IsometryTag::Identity);
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let g = GroupElement::new(Mat3::scalar(w), &h).unwrap();
        assert_eq!(classify(&g, 1e-8).unwrap().tag, IsometryTag::Identity);
    }

    #[test]
    fn classify_rejects_unnormalized() {
        let h = HermitianForm::standard();
        // preserves the form but det = -1
        let m = Mat3::diag(c(-1.0, 0.0), ONE, ONE);
        let g = GroupElement::new(m, &h).unwrap();
        assert!(!g.is_det_normalized());
        assert!(matches!(
            classify(&g, 1e-8),
            Err(HermError::NonUnitDeterminant(_))
        ));
    }

    #[test]
    fn attractive_point_diagonal() {
        let h = antidiagonal_form();
        let m = Mat3::diag(c(2.0, 0.0), c(1.0, 0.0), c(0.5, 0.0));
        let g = GroupElement::new(m, &h).unwrap();
        let p = attractive_fixed_point(&g).unwrap();
        assert!(p.lift.0[1].norm() < 1e-10);
        assert!(p.lift.0[2].norm() < 1e-10);
        assert!((p.lift.0[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn attractive_point_conjugation_equivariant() {
        let h = antidiagonal_form();
        let g = GroupElement::new(Mat3::diag(c(2.0, 0.0), ONE, c(0.5, 0.0)), &h).unwrap();
        // Heisenberg translation fixing e1: [[1,a,b],[0,1,-conj(a)],[0,0,1]]
        // with 2 Re(b) = -|a|^2 preserves the antidiagonal form.
        let k_m = Mat3::from_rows(
            [ONE, ONE, c(-0.5, 0.3)],
            [ZERO, ONE, c(-1.0, 0.0)],
            [ZERO, ZERO, ONE],
        );
        let k = GroupElement::new(k_m, &h).unwrap();
        let conj = k.mul(&g).unwrap().mul(&k.inverse()).unwrap();
        let p = attractive_fixed_point(&g).unwrap();
        let q = attractive_fixed_point(&conj).unwrap();
        let kp = k.matrix().mul_vec(&p.lift).normalized_by_max();
        // projective comparison of lifts: parallel iff the cross product vanishes
        let cross = kp.cross(&q.lift).norm();
        assert!(cross < 1e-8, "cross {}", cross);
    }

    #[test]
    fn attractive_point_of_square_matches() {
        let h = antidiagonal_form();
        let k_m = Mat3::from_rows(
            [ONE, ONE, c(-0.5, 0.3)],
            [ZERO, ONE, c(-1.0, 0.0)],
            [ZERO, ZERO, ONE],
        );
        let k = GroupElement::new(k_m, &h).unwrap();
        let g0 = GroupElement::new(Mat3::diag(c(2.0, 0.0), ONE, c(0.5, 0.0)), &h).unwrap();
        let g = k.mul(&g0).unwrap().mul(&k.inverse()).unwrap();
        let p = attractive_fixed_point(&g).unwrap();
        let q = attractive_fixed_point(&g.mul(&g).unwrap()).unwrap();
        assert!(p.lift.cross(&q.lift).norm() < 1e-8);
    }

    #[test]
    fn ball_chart_diagonal_cases() {
        let h = HermitianForm::standard();
        let chart = ball_chart(&h).unwrap();
        assert!(chart.t.sub(&Mat3::identity()).norm_inf() < 1e-12);

        let h4 = Arc::new(HermitianForm::new(Mat3::diag(
            c(4.0, 0.0),
            ONE,
            c(-1.0, 0.0),
        )));
        let chart = ball_chart(&h4).unwrap();
        let expected = Mat3::diag(c(0.5, 0.0), ONE, ONE);
        assert!(chart.t.sub(&expected).norm_inf() < 1e-12);
    }

    #[test]
    fn ball_chart_wrong_signature() {
        let h = Arc::new(HermitianForm::new(Mat3::identity()));
        assert!(matches!(
            ball_chart(&h),
            Err(HermError::WrongSignature((3, 0)))
        ));
    }

    #[test]
    fn projective_equal_cube_roots() {
        let h = HermitianForm::standard();
        let u = GroupElement::new(
            Mat3::diag(C64::from_polar(1.0, 0.7), C64::from_polar(1.0, -0.7), ONE),
            &h,
        )
        .unwrap();
        assert!(projective_equal(&u, &u, 1e-10).unwrap());
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let scaled = GroupElement::new(u.matrix().scale(w), &h).unwrap();
        assert!(projective_equal(&u, &scaled, 1e-10).unwrap());
        let other = GroupElement::new(
            Mat3::diag(C64::from_polar(1.0, 1.3), C64::from_polar(1.0, -1.3), ONE),
            &h,
        )
        .unwrap();
        assert!(!projective_equal(&u, &other, 1e-6).unwrap());
    }

    #[test]
    fn form_mismatch_rejected() {
        let h1 = HermitianForm::standard();
        let h2 = antidiagonal_form();
        let a = GroupElement::identity(&h1);
        let b = GroupElement::identity(&h2);
        assert!(matches!(
            projective_equal(&a, &b, 1e-8),
            Err(HermError::FormMismatch)
        ));
    }
}
