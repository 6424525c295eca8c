//! Truncated Gaussian wavepackets with linear phases.
//!
//! A [`Wavepacket`] is the function
//!
//! ```text
//! x -> amplitude * e^{i beta x} * e^{-(x - mu)^2 / (2 sigma^2)}   for x in [l, r]
//! ```
//!
//! and zero elsewhere. Displacements `e^{-itP}`, phases `e^{itQ}` and the
//! squeezing `M_alpha` map such functions to functions of the same form, which
//! makes the family closed under every elementary oscillator gate used here.
//!
//! Overlaps are the only numerical step. When the Gaussian product is
//! negligible outside the common support the untruncated closed form is used;
//! otherwise the integral is evaluated by adaptive Gauss-Legendre quadrature
//! over the support intersection.

use crate::error::{bail, Result};
use crate::math::*;
use crate::quadrature;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavepacket {
    pub amplitude: C64,
    /// Gaussian center `mu`.
    pub center: f64,
    /// Gaussian scale `sigma > 0`.
    pub width: f64,
    pub left: f64,
    pub right: f64,
    /// Linear phase slope `beta`.
    pub slope: f64,
}

/// The Gaussian product is treated as untruncated when the support extends
/// this many units of `p (x - m)^2` past its peak on both sides (`e^{-40}`).
const CLOSED_FORM_EXPONENT: f64 = 40.0;

impl Wavepacket {
    pub fn new(amplitude: C64, center: f64, width: f64, left: f64, right: f64, slope: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            bail!(Parameter, "wavepacket width must be positive and finite, got {width}");
        }
        if !(left < right) || !left.is_finite() || !right.is_finite() {
            bail!(Parameter, "wavepacket support must satisfy l < r, got [{left}, {right}]");
        }
        if !center.is_finite() || !slope.is_finite() || !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            bail!(Parameter, "wavepacket fields must be finite");
        }
        Ok(Wavepacket { amplitude, center, width, left, right, slope })
    }

    /// Unit-norm packet with zero phase slope.
    pub fn normalized(center: f64, width: f64, left: f64, right: f64) -> Result<Self> {
        let raw = Self::new(c(1.0, 0.0), center, width, left, right, 0.0)?;
        let n = inner_product(&raw, &raw).re;
        Ok(raw.scale(c(1.0 / n.sqrt(), 0.0)))
    }

    pub fn eval(&self, x: f64) -> C64 {
        if x < self.left || x > self.right {
            return c(0.0, 0.0);
        }
        let u = (x - self.center) / self.width;
        self.amplitude * cis(self.slope * x) * (-0.5 * u * u).exp()
    }

    pub fn norm_sqr(&self) -> f64 {
        inner_product(self, self).re
    }

    /// `e^{-itP}`: the function `x -> f(x - t)`.
    pub fn translate(&self, t: f64) -> Self {
        Wavepacket {
            amplitude: self.amplitude * cis(-self.slope * t),
            center: self.center + t,
            left: self.left + t,
            right: self.right + t,
            ..*self
        }
    }

    /// `e^{itQ}`: multiplication by `e^{itx}`.
    pub fn phase_mul(&self, t: f64) -> Self {
        Wavepacket { slope: self.slope + t, ..*self }
    }

    /// `M_alpha`: the function `x -> alpha^{-1/2} f(x / alpha)`.
    pub fn dilate(&self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            bail!(Parameter, "squeezing factor must be positive, got {alpha}");
        }
        Ok(Wavepacket {
            amplitude: self.amplitude / alpha.sqrt(),
            center: self.center * alpha,
            width: self.width * alpha,
            left: self.left * alpha,
            right: self.right * alpha,
            slope: self.slope / alpha,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Wavepacket { amplitude: self.amplitude * s, ..*self }
    }

    /// True when every real field agrees to `tol` (relative, absolute near zero),
    /// i.e. the two packets are the same function up to amplitude.
    pub fn same_shape(&self, other: &Wavepacket, tol: f64) -> bool {
        close(self.left, other.left, tol)
            && close(self.right, other.right, tol)
            && close(self.center, other.center, tol)
            && close(self.width, other.width, tol)
            && close(self.slope, other.slope, tol)
    }

    /// Shape and amplitude agree to `tol`.
    pub fn approx_eq(&self, other: &Wavepacket, tol: f64) -> bool {
        self.same_shape(other, tol)
            && (self.amplitude - other.amplitude).norm() <= tol * self.amplitude.norm().max(other.amplitude.norm())
    }

    /// `|amplitude| * sqrt(sigma)`, proportional to the untruncated norm.
    pub fn weight(&self) -> f64 {
        self.amplitude.norm() * self.width.sqrt()
    }
}

/// `<a, b> = int conj(a(x)) b(x) dx` over the common support.
///
/// Disjoint supports give exactly zero without any quadrature.
pub fn inner_product(a: &Wavepacket, b: &Wavepacket) -> C64 {
    let lo = a.left.max(b.left);
    let hi = a.right.min(b.right);
    if !(lo < hi) {
        return c(0.0, 0.0);
    }
    let sa2 = a.width * a.width;
    let sb2 = b.width * b.width;
    let s = sa2 + sb2;
    let dmu = a.center - b.center;
    // Product of the two Gaussians is e^{k} e^{-p (x - m)^2}.
    let k = -dmu * dmu / (2.0 * s);
    let m = (a.center * sb2 + b.center * sa2) / s;
    let p = s / (2.0 * sa2 * sb2);
    let omega = b.slope - a.slope;
    let ek = k.exp();
    if ek == 0.0 {
        return c(0.0, 0.0);
    }
    let pref = a.amplitude.conj() * b.amplitude * ek * cis(omega * m);
    let r = (CLOSED_FORM_EXPONENT / p).sqrt();
    let full_scale = (PI / p).sqrt();
    if lo <= m - r && hi >= m + r {
        return pref * full_scale * (-omega * omega / (4.0 * p)).exp();
    }
    let integrand = |y: f64| cis(omega * y) * (-p * y * y).exp();
    let (mut y1, mut y2) = (lo - m, hi - m);
    // Far tails contribute below e^{-46}; drop them when the core is inside.
    let rc = (46.0 / p).sqrt();
    if y1 < rc && y2 > -rc {
        y1 = y1.max(-rc);
        y2 = y2.min(rc);
    }
    let mut max_panel = 2.0 / p.sqrt();
    if omega != 0.0 {
        max_panel = max_panel.min(8.0 * PI / omega.abs());
    }
    pref * quadrature::integrate(&integrand, y1, y2, max_panel, 1e-17 * full_scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn unit(center: f64, width: f64, l: f64, r: f64) -> Wavepacket {
        Wavepacket::normalized(center, width, l, r).unwrap()
    }

    #[test]
    fn normalized_packet_has_unit_norm() {
        let w = unit(0.0, 0.1, -0.5, 0.5);
        assert!((inner_product(&w, &w) - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn disjoint_supports_are_exactly_orthogonal() {
        let a = unit(0.5, 0.2, 0.0, 1.0);
        let b = unit(2.5, 0.2, 2.0, 3.0);
        assert_eq!(inner_product(&a, &b), c(0.0, 0.0));
    }

    #[test]
    fn phase_offset_pi_overlap_matches_frozen_grid_value() {
        // Reference from a 1e5-point composite Simpson evaluation of the raw
        // integrand (see the oracle module tests for the live cross-check).
        let a = unit(0.0, 0.05, -0.25, 0.25);
        let b = a.phase_mul(PI);
        let v = inner_product(&a, &b);
        assert!((v.re - FROZEN_PI_OVERLAP).abs() < 1e-8, "{v}");
        assert!(v.im.abs() < 1e-12);
    }

    /// `int e^{-x^2/s^2} cos(pi x) / int e^{-x^2/s^2}` over [-0.25, 0.25], s = 0.05.
    pub(crate) const FROZEN_PI_OVERLAP: f64 = 0.993_850_483_404_095;

    #[test]
    fn translate_shifts_and_rephases() {
        let w = Wavepacket::new(c(1.0, 0.0), 0.0, 0.3, -1.0, 1.0, 1.0).unwrap();
        let t = w.translate(PI);
        assert!((t.amplitude - c(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(t.center, PI);
        for i in 0..100 {
            let x = -1.0 + PI + 2.0 * i as f64 / 99.0;
            assert!((t.eval(x) - w.eval(x - PI)).norm() < 1e-14);
        }
        let z = unit(0.0, 0.3, -1.0, 1.0).translate(2.0);
        assert_eq!(z.center, 2.0);
        assert_eq!((z.left, z.right), (1.0, 3.0));
        assert_eq!(z.amplitude, unit(0.0, 0.3, -1.0, 1.0).amplitude);
    }

    #[test]
    fn phase_mul_is_pointwise_and_invertible() {
        let w = unit(0.1, 0.2, -0.7, 0.9);
        assert_eq!(w.phase_mul(0.0), w);
        assert_eq!(w.phase_mul(1.3).phase_mul(-1.3), w);
        let p = w.phase_mul(0.8);
        for i in 0..50 {
            let x = -0.7 + 1.6 * i as f64 / 49.0;
            assert!((p.eval(x) - cis(0.8 * x) * w.eval(x)).norm() < 1e-14);
        }
    }

    #[test]
    fn dilation_preserves_norm_and_inverts() {
        let w = unit(0.3, 0.1, -0.2, 0.8).phase_mul(2.0);
        let d = w.dilate(2f64.sqrt()).unwrap();
        assert!((d.norm_sqr() - 1.0).abs() < 1e-12);
        let back = d.dilate(1.0 / 2f64.sqrt()).unwrap();
        assert!(back.approx_eq(&w, 1e-15));
        assert_eq!(w.dilate(1.0).unwrap(), w);
        assert!(w.dilate(0.0).is_err());
        assert!(w.dilate(-1.0).is_err());
        for i in 0..40 {
            let x = -0.29 + 1.4 * i as f64 / 39.0;
            let expect = w.eval(x / 1.5) / 1.5f64.sqrt();
            assert!((w.dilate(1.5).unwrap().eval(x) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn constructor_rejects_bad_fields() {
        assert!(Wavepacket::new(c(1.0, 0.0), 0.0, 0.0, -1.0, 1.0, 0.0).is_err());
        assert!(Wavepacket::new(c(1.0, 0.0), 0.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn truncated_and_closed_form_paths_agree() {
        // Wide support takes the closed form; a support just past the cut
        // takes quadrature. Both must agree to rounding.
        let a = Wavepacket::new(c(1.0, 0.0), 0.0, 0.1, -1.0, 1.0, 0.0).unwrap();
        let b = Wavepacket::new(c(1.0, 0.0), 0.05, 0.12, -1.0, 1.0, 3.0).unwrap();
        let wide = inner_product(&a, &b);
        let a2 = Wavepacket { left: -0.9, right: 0.95, ..a };
        let narrow = inner_product(&a2, &b);
        assert!((wide - narrow).norm() < 1e-13 * wide.norm());
    }

    fn arb_packet() -> impl Strategy<Value = Wavepacket> {
        (-2.0..2.0f64, 0.05..1.0f64, 0.05..3.0f64, 0.05..3.0f64, -6.0..6.0f64, 0.0..6.3f64)
            .prop_map(|(mu, s, wl, wr, beta, ph)| Wavepacket::new(cis(ph), mu, s, mu - wl, mu + wr, beta).unwrap())
    }

    #[derive(Clone, Debug)]
    enum Op {
        T(f64),
        Ph(f64),
        D(f64),
    }

    fn arb_op() -> impl Strategy<Value = Op> {
        prop_oneof![(-3.0..3.0f64).prop_map(Op::T), (-4.0..4.0f64).prop_map(Op::Ph), (0.4..2.5f64).prop_map(Op::D)]
    }

    fn gram(ps: &[Wavepacket]) -> Vec<C64> {
        ps.iter().flat_map(|a| ps.iter().map(move |b| inner_product(a, b))).collect()
    }

    proptest! {
        #[test]
        fn hermitian_symmetry(a in arb_packet(), b in arb_packet()) {
            let ab = inner_product(&a, &b);
            let ba = inner_product(&b, &a);
            prop_assert!((ab - ba.conj()).norm() <= 1e-14 * (1.0 + ab.norm()));
        }

        #[test]
        fn gram_matrix_invariant(ps in proptest::collection::vec(arb_packet(), 1..5),
                                 ops in proptest::collection::vec(arb_op(), 1..8)) {
            let g0 = gram(&ps);
            let mut cur = ps.clone();
            for op in &ops {
                cur = cur.iter().map(|w| match *op {
                    Op::T(t) => w.translate(t),
                    Op::Ph(t) => w.phase_mul(t),
                    Op::D(a) => w.dilate(a).unwrap(),
                }).collect();
            }
            let g1 = gram(&cur);
            let scale = g0.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (x, y) in g0.iter().zip(&g1) {
                prop_assert!((x - y).norm() <= 1e-12 * scale, "{} vs {}", x, y);
            }
        }
    }
}
