//! Triangle group realizations in PU(2,1) from the Gram-matrix
//! parametrization: three complex reflections I1, I2, I3 written in the dual
//! basis (v1, v2, v3), with the pairings c_ij = cos(pi/p), cos(pi/q),
//! cos(pi/r) e^{i theta} as entries of the preserved Hermitian form.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::config::Tolerances;
use crate::herm::{classify, GroupElement, HermError, HermitianForm, IsometryTag};
use crate::linalg::{Mat3, C64, ONE, ZERO};

#[derive(Debug, Error)]
pub enum TriangleError {
    #[error("invalid triangle orders ({0}, {1}, {2}): need 2 <= p <= q <= r and 1/p + 1/q + 1/r < 1")]
    InvalidOrders(Order, Order, Order),
    #[error("theta = {0} out of range [0, pi]")]
    ThetaOutOfRange(f64),
    #[error("Gram matrix is degenerate (|det| = {0:.3e})")]
    Degenerate(f64),
    #[error("Gram matrix has signature {0:?}, expected (2,1)")]
    WrongSignature((u8, u8)),
    #[error("unipotent angle undefined: cos(theta) = {0} falls outside [-1, 1]")]
    OutOfRange(f64),
    #[error("discreteness criterion only covers (3,3,r) triangles, got ({0}, {1}, {2})")]
    Unsupported(Order, Order, Order),
    #[error(transparent)]
    Form(#[from] HermError),
}

/// A reflection order: a finite integer >= 2 or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    /// cos(pi / n), with the n = infinity limit equal to 1.
    pub fn cos_pi_over(self) -> f64 {
        match self {
            Order::Finite(n) => (std::f64::consts::PI / n as f64).cos(),
            Order::Infinite => 1.0,
        }
    }

    pub fn recip(self) -> f64 {
        match self {
            Order::Finite(n) => 1.0 / n as f64,
            Order::Infinite => 0.0,
        }
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}

/// Orders (p, q, r) with 2 <= p <= q <= r and an angular invariant in [0, pi].
#[derive(Clone, Copy, Debug)]
pub struct TriangleSpec {
    pub p: Order,
    pub q: Order,
    pub r: Order,
    pub theta: f64,
}

impl TriangleSpec {
    pub fn new(p: Order, q: Order, r: Order, theta: f64) -> Result<Self, TriangleError> {
        let ok_orders = match (p, q, r) {
            (Order::Finite(a), _, _) if a < 2 => false,
            _ => p <= q && q <= r,
        };
        if !ok_orders || p.recip() + q.recip() + r.recip() >= 1.0 {
            return Err(TriangleError::InvalidOrders(p, q, r));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(TriangleError::ThetaOutOfRange(theta));
        }
        Ok(TriangleSpec { p, q, r, theta })
    }

    /// Spec with`theta` set to the angle making I3 I2 I1 I2 unipotent.
    pub fn at_unipotent_angle(p: Order, q: Order, r: Order) -> Result<Self, TriangleError> {
        let theta = theta_unipotent(r)?;
        TriangleSpec::new(p, q, r, theta)
    }
}

/// Upper bound on cos(theta) for the Gram form to have signature (2,1);
/// p = 2 forces c12 = 0 and the group is rigid with theta = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AdmissibleBound {
    Rigid,
    CosThetaBelow(f64),
}

pub fn admissible_bound(p: Order, q: Order, r: Order) -> AdmissibleBound {
    let (cp, cq, cr) = (p.cos_pi_over(), q.cos_pi_over(), r.cos_pi_over());
    let denom = 2.0 * cp * cq * cr;
    if denom == 0.0 {
        return AdmissibleBound::Rigid;
    }
    AdmissibleBound::CosThetaBelow((-1.0 + cp * cp + cq * cq + cr * cr) / denom)
}

/// Closed-form determinant of the Gram matrix; negative iff signature (2,1).
pub fn gram_determinant(spec: &TriangleSpec) -> f64 {
    let (cp, cq, cr) = (
        spec.p.cos_pi_over(),
        spec.q.cos_pi_over(),
        spec.r.cos_pi_over(),
    );
    1.0 + 2.0 * spec.theta.cos() * cp * cq * cr - cp * cp - cq * cq - cr * cr
}

/// The unit-diagonal Gram form with entries c12 = cos(pi/p), c23 = cos(pi/q),
/// c13 = cos(pi/r) e^{i theta} (modulus 1 when r is infinite).
pub fn gram_matrix(spec: &TriangleSpec) -> Result<Arc<HermitianForm>, TriangleError> {
    let det = gram_determinant(spec);
    if det.abs() < Tolerances::DEFAULT.gram_degenerate {
        return Err(TriangleError::Degenerate(det.abs()));
    }
    let c12 = C64::new(spec.p.cos_pi_over(), 0.0);
    let c23 = C64::new(spec.q.cos_pi_over(), 0.0);
    let c13 = C64::from_polar(spec.r.cos_pi_over(), spec.theta);
    let h = Arc::new(HermitianForm::new(Mat3::from_rows(
        [ONE, c12, c13],
        [c12.conj(), ONE, c23],
        [c13.conj(), c23.conj(), ONE],
    )));
    let sig = h.signature();
    if sig != (2, 1) {
        return Err(TriangleError::WrongSignature(sig));
    }
    Ok(h)
}

/// Angle theta making I3 I2 I1 I2 unipotent: cos(theta) = cos(pi/r) - 3/(4 cos(pi/r)).
/// Defined for r >= 4 (including infinity, where cos(pi/r) = 1 gives 1/4).
pub fn theta_unipotent(r: Order) -> Result<f64, TriangleError> {
    if let Order::Finite(n) = r {
        if n < 4 {
            return Err(TriangleError::InvalidOrders(
                Order::Finite(3),
                Order::Finite(3),
                r,
            ));
        }
    }
    let cr = r.cos_pi_over();
    let c = cr - 3.0 / (4.0 * cr);
    if !(-1.0..=1.0).contains(&c) {
        return Err(TriangleError::OutOfRange(c));
    }
    Ok(c.acos())
}

/// Trace tr(x) = 4 cos^2(pi/k) - 1 of a regular elliptic of order k.
pub fn elliptic_trace(k: u32) -> f64 {
    let c = (std::f64::consts::PI / k as f64).cos();
    4.0 * c * c - 1.0
}

/// Closed form for tr(I3 I2 I1 I2):
/// 16 |c32 c12|^2 - 16 Re(c12 c23 c31) + 4 |c13|^2 - 1.
/// For (3,3,r) this reduces to 4 cos^2(pi/r) - 4 cos(pi/r) cos(theta).
pub fn trace_i3i2i1i2(spec: &TriangleSpec) -> f64 {
    let (cp, cq, cr) = (
        spec.p.cos_pi_over(),
        spec.q.cos_pi_over(),
        spec.r.cos_pi_over(),
    );
    let pair = cq * cp;
    16.0 * pair * pair - 16.0 * cp * cq * cr * spec.theta.cos() + 4.0 * cr * cr - 1.0
}

/// A realized triangle group: the Gram form, the three reflections in the
/// (v1, v2, v3) basis, and the even-subgroup generators x = I1 I2, y = I2 I3.
#[derive(Clone, Debug)]
pub struct TriangleRealization {
    pub spec: TriangleSpec,
    pub gram: Arc<HermitianForm>,
    pub i1: GroupElement,
    pub i2: GroupElement,
    pub i3: GroupElement,
    pub x: GroupElement,
    pub y: GroupElement,
    pub c12: C64,
    pub c23: C64,
    pub c13: C64,
}

pub fn build(spec: &TriangleSpec) -> Result<TriangleRealization, TriangleError> {
    let gram = gram_matrix(spec)?;
    let h = gram.matrix();
    let (c12, c23, c13) = (h.0[0][1], h.0[1][2], h.0[0][2]);
    let (c21, c32, c31) = (c12.conj(), c23.conj(), c13.conj());
    let two = C64::new(2.0, 0.0);

    let i1 = Mat3::from_rows(
        [ONE, two * c21, two * c31],
        [ZERO, -ONE, ZERO],
        [ZERO, ZERO, -ONE],
    );
    let i2 = Mat3::from_rows(
        [-ONE, ZERO, ZERO],
        [two * c12, ONE, two * c32],
        [ZERO, ZERO, -ONE],
    );
    let i3 = Mat3::from_rows(
        [-ONE, ZERO, ZERO],
        [ZERO, -ONE, ZERO],
        [two * c13, two * c23, ONE],
    );

    let i1 = GroupElement::new(i1, &gram)?;
    let i2 = GroupElement::new(i2, &gram)?;
    let i3 = GroupElement::new(i3, &gram)?;
    let x = i1.mul(&i2)?;
    let y = i2.mul(&i3)?;

    Ok(TriangleRealization {
        spec: *spec,
        gram,
        i1,
        i2,
        i3,
        x,
        y,
        c12,
        c23,
        c13,
    })
}

impl TriangleRealization {
    /// Entrywise complex conjugate of the whole realization. This realizes
    /// the angular invariant -theta on the conjugated Gram form.
    pub fn conjugated(&self) -> TriangleRealization {
        let gram = Arc::new(HermitianForm::new(self.gram.matrix().conj()));
        let conj = |g: &GroupElement| {
            GroupElement::new(g.matrix().conj(), &gram).expect("conjugate preserves conjugate form")
        };
        TriangleRealization {
            spec: self.spec,
            gram: Arc::clone(&gram),
            i1: conj(&self.i1),
            i2: conj(&self.i2),
            i3: conj(&self.i3),
            x: conj(&self.x),
            y: conj(&self.y),
            c12: self.c12.conj(),
            c23: self.c23.conj(),
            c13: self.c13.conj(),
        }
    }

    /// Product I3 I2 I1 I2 whose trace pins the angular invariant.
    pub fn quad_word(&self) -> GroupElement {
        self.i3
            .mul(&self.i2)
            .and_then(|m| m.mul(&self.i1))
            .and_then(|m| m.mul(&self.i2))
            .expect("shared form")
    }
}

/// True iff I3 I2 I1 I2 is not elliptic. Only supported for (3,3,r),
/// where non-ellipticity of this word decides discreteness and faithfulness.
pub fn discreteness_check(real: &TriangleRealization) -> Result<bool, TriangleError> {
    let spec = &real.spec;
    if (spec.p, spec.q) != (Order::Finite(3), Order::Finite(3)) {
        return Err(TriangleError::Unsupported(spec.p, spec.q, spec.r));
    }
    let w = real.quad_word();
    let cls = classify(&w, Tolerances::DEFAULT.trace_classify)?;
    Ok(match cls.tag {
        IsometryTag::Loxodromic | IsometryTag::Unipotent | IsometryTag::Identity => true,
        IsometryTag::RegularElliptic | IsometryTag::Elliptic => false,
        // boundary case: real trace in (-1,3) means elliptic
        _ => {
            let t = cls.trace;
            !(t.im.abs() < 1e-9 && t.re > -1.0 && t.re < 3.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herm::{form_residual, projective_dist};

    fn spec(p: u32, q: u32, r: Order, theta: f64) -> TriangleSpec {
        TriangleSpec::new(Order::Finite(p), Order::Finite(q), r, theta).unwrap()
    }

    #[test]
    fn gram_degenerate_at_right_angle() {
        let s = spec(3, 3, Order::Finite(4), std::f64::consts::FRAC_PI_2);
        // cos(pi/2) is ~6e-17, so the determinant sits below the cutoff
        assert!(matches!(
            gram_matrix(&s),
            Err(TriangleError::Degenerate(_))
        ));
    }

    #[test]
    fn gram_determinant_hand_values() {
        let th = theta_unipotent(Order::Finite(4)).unwrap();
        let s = spec(3, 3, Order::Finite(4), th);
        assert!((gram_determinant(&s) + 0.125).abs() < 1e-12);
        let h = gram_matrix(&s).unwrap();
        assert_eq!(h.signature(), (2, 1));

        // determinant sign must match the eigenvalue product
        let ev = h.eigenvalues();
        let prod: f64 = ev.iter().product();
        assert!((prod - gram_determinant(&s)).abs() < 1e-10);
    }

    #[test]
    fn rigid_case_real_entries() {
        let s = spec(2, 4, Order::Finite(6), 0.0);
        let h = gram_matrix(&s).unwrap();
        assert!(h.matrix().0[0][1].norm() < 1e-15); // c12 = cos(pi/2) = 0
        for row in h.matrix().0.iter() {
            for e in row {
                assert!(e.im.abs() < 1e-15);
            }
        }
        assert_eq!(
            admissible_bound(Order::Finite(2), Order::Finite(4), Order::Finite(6)),
            AdmissibleBound::Rigid
        );
    }

    #[test]
    fn admissible_bound_values() {
        match admissible_bound(Order::Finite(3), Order::Finite(3), Order::Finite(4)) {
            AdmissibleBound::CosThetaBelow(b) => assert!(b.abs() < 1e-12),
            _ => panic!("expected a finite bound"),
        }
        match admissible_bound(Order::Finite(3), Order::Finite(3), Order::Infinite) {
            AdmissibleBound::CosThetaBelow(b) => assert!((b - 1.0).abs() < 1e-12),
            _ => panic!("expected a finite bound"),
        }
        // (3,3,5): just inside the bound the Gram determinant is negative
        match admissible_bound(Order::Finite(3), Order::Finite(3), Order::Finite(5)) {
            AdmissibleBound::CosThetaBelow(b) => {
                let c5 = (std::f64::consts::PI / 5.0).cos();
                let expect = (2.0 * c5 * c5 - 1.0) / c5;
                assert!((b - expect).abs() < 1e-12, "b = {b}, expect = {expect}");
                let s = spec(3, 3, Order::Finite(5), (b - 1e-3).acos());
                assert!(gram_determinant(&s) < 0.0);
                let s = spec(3, 3, Order::Finite(5), (b + 1e-3).min(1.0).acos());
                assert!(gram_determinant(&s) > 0.0);
            }
            _ => panic!("expected a finite bound"),
        }
    }

    #[test]
    fn theta_unipotent_values() {
        let t_inf = theta_unipotent(Order::Infinite).unwrap();
        assert!((t_inf - 0.25f64.acos()).abs() < 1e-15);
        let t4 = theta_unipotent(Order::Finite(4)).unwrap();
        assert!((t4 - 1.932163).abs() < 1e-6);
        // oracle: the closed-form trace of I3I2I1I2 equals 3 exactly at this angle
        let s = spec(3, 3, Order::Finite(4), t4);
        assert!((trace_i3i2i1i2(&s) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn theta_unipotent_root_find_oracle() {
        // bisection on theta -> trace(I3I2I1I2) - 3 for r = 5
        let r = Order::Finite(5);
        let (mut lo, mut hi) = (1.0f64, 3.0f64);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let s = spec(3, 3, r, mid);
            if trace_i3i2i1i2(&s) > 3.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let found = 0.5 * (lo + hi);
        assert!((found - theta_unipotent(r).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn build_334_relations() {
        let s = TriangleSpec::at_unipotent_angle(
            Order::Finite(3),
            Order::Finite(3),
            Order::Finite(4),
        )
        .unwrap();
        let t = build(&s).unwrap();
        for ik in [&t.i1, &t.i2, &t.i3] {
            assert!(form_residual(ik.matrix(), &t.gram) < 1e-12);
            assert!(projective_dist(&ik.matrix().mul(ik.matrix()), &Mat3::identity()) < 1e-12);
        }
        let id = Mat3::identity();
        assert!(projective_dist(&t.x.matrix().powi(3), &id) < 1e-8);
        assert!(projective_dist(&t.y.matrix().powi(3), &id) < 1e-8);
        let i3i1 = t.i3.mul(&t.i1).unwrap();
        assert!(projective_dist(&i3i1.matrix().powi(4), &id) < 1e-8);
    }

    #[test]
    fn build_33inf_unipotent_pair() {
        let s =
            TriangleSpec::at_unipotent_angle(Order::Finite(3), Order::Finite(3), Order::Infinite)
                .unwrap();
        let t = build(&s).unwrap();
        let i3i1 = t.i3.mul(&t.i1).unwrap();
        let tr = i3i1.trace();
        let pair = 4.0 * t.c13.norm_sqr() - 1.0;
        assert!((tr.re - pair).abs() < 1e-10 && tr.im.abs() < 1e-10);
        assert!((pair - 3.0).abs() < 1e-12);
        let cls = classify(&i3i1, 1e-8).unwrap();
        assert_eq!(cls.tag, IsometryTag::Unipotent);
    }

    #[test]
    fn build_rigid_all_real() {
        let s = spec(2, 4, Order::Finite(6), 0.0);
        let t = build(&s).unwrap();
        for g in [&t.i1, &t.i2, &t.i3] {
            for row in g.matrix().0.iter() {
                for e in row {
                    assert!(e.im.abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn pair_trace_identity() {
        for (r, theta) in [
            (Order::Finite(4), 1.95),
            (Order::Finite(5), 2.2),
            (Order::Finite(7), 1.6),
            (Order::Infinite, 1.35),
        ] {
            let s = spec(3, 3, r, theta);
            let t = match build(&s) {
                Ok(t) => t,
                Err(_) => continue,
            };
            let checks = [
                (t.i1.mul(&t.i2).unwrap(), t.c12),
                (t.i2.mul(&t.i3).unwrap(), t.c23),
                (t.i3.mul(&t.i1).unwrap(), t.c13),
            ];
            for (g, c) in checks {
                let expect = 4.0 * c.norm_sqr() - 1.0;
                assert!((g.trace().re - expect).abs() < 1e-9);
                assert!(g.trace().im.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn quad_word_trace_matches_matrices() {
        // deterministic sweep over admissible (r, theta)
        let mut checked = 0;
        for r in [4u32, 5, 6, 7, 9, 12] {
            let bound = match admissible_bound(Order::Finite(3), Order::Finite(3), Order::Finite(r))
            {
                AdmissibleBound::CosThetaBelow(b) => b,
                _ => unreachable!(),
            };
            for k in 0..17 {
                let cos_theta = -1.0 + (bound + 1.0) * (k as f64 + 0.31) / 17.5;
                let s = spec(3, 3, Order::Finite(r), cos_theta.acos());
                let t = match build(&s) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                let w = t.quad_word();
                assert!((w.trace().re - trace_i3i2i1i2(&s)).abs() < 1e-9);
                assert!(w.trace().im.abs() < 1e-9);
                checked += 1;
            }
        }
        assert!(checked >= 100, "only {checked} admissible samples");
    }

    #[test]
    fn quad_word_trace_range_and_max() {
        // (3,3,4) at theta = pi attains the maximum 2 + 2 sqrt(2)
        let s = spec(3, 3, Order::Finite(4), std::f64::consts::PI);
        let expect = 2.0 + 2.0 * 2.0f64.sqrt();
        assert!((trace_i3i2i1i2(&s) - expect).abs() < 1e-12);

        for r in [4u32, 5, 8, 12] {
            let cr = (std::f64::consts::PI / r as f64).cos();
            let bound =
                match admissible_bound(Order::Finite(3), Order::Finite(3), Order::Finite(r)) {
                    AdmissibleBound::CosThetaBelow(b) => b,
                    _ => unreachable!(),
                };
            for k in 0..40 {
                let cos_theta = -1.0 + (bound + 1.0) * (k as f64 + 0.5) / 40.0;
                let s = spec(3, 3, Order::Finite(r), cos_theta.acos());
                let tr = trace_i3i2i1i2(&s);
                assert!(tr > 4.0 * (1.0 - cr * cr) - 1e-9);
                assert!(tr <= 4.0 * cr * (cr + 1.0) + 1e-9);
            }
        }
    }

    #[test]
    fn conjugation_realizes_minus_theta() {
        let s = spec(3, 3, Order::Finite(5), 2.0);
        let t = build(&s).unwrap();
        let tc = t.conjugated();
        let coords = |t: &TriangleRealization| {
            let x = t.x.matrix();
            let y = t.y.matrix();
            [
                x.trace(),
                y.trace(),
                x.mul(y).trace(),
                x.mul(&y.inverse().unwrap()).trace(),
                x.mul(y)
                    .mul(&x.inverse().unwrap())
                    .mul(&y.inverse().unwrap())
                    .trace(),
            ]
        };
        let a = coords(&t);
        let b = coords(&tc);
        for (u, v) in a.iter().zip(b.iter()) {
            assert!((u.conj() - v).norm() < 1e-10);
        }
    }

    #[test]
    fn elliptic_trace_values() {
        assert!(elliptic_trace(3).abs() < 1e-12);
        assert!((elliptic_trace(4) - 1.0).abs() < 1e-12);
        assert!((elliptic_trace(2) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn discreteness_examples() {
        let t4 = build(
            &TriangleSpec::at_unipotent_angle(Order::Finite(3), Order::Finite(3), Order::Finite(4))
                .unwrap(),
        )
        .unwrap();
        assert!(discreteness_check(&t4).unwrap());

        let tmax = build(&spec(3, 3, Order::Finite(4), std::f64::consts::PI)).unwrap();
        assert!(discreteness_check(&tmax).unwrap());

        // cos(theta) = -0.01 gives trace ~2.028 in (-1,3): elliptic, not discrete-certified
        let tell = build(&spec(3, 3, Order::Finite(4), (-0.01f64).acos())).unwrap();
        assert!(!discreteness_check(&tell).unwrap());

        let rigid = build(&spec(2, 4, Order::Finite(6), 0.0)).unwrap();
        assert!(matches!(
            discreteness_check(&rigid),
            Err(TriangleError::Unsupported(_, _, _))
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(TriangleSpec::new(Order::Finite(3), Order::Finite(3), Order::Finite(3), 0.5).is_err());
        assert!(TriangleSpec::new(Order::Finite(4), Order::Finite(3), Order::Finite(5), 0.5).is_err());
        assert!(TriangleSpec::new(Order::Finite(3), Order::Finite(3), Order::Finite(4), -0.1).is_err());
        assert!(TriangleSpec::new(Order::Finite(1), Order::Finite(3), Order::Finite(4), 0.1).is_err());
    }
}
