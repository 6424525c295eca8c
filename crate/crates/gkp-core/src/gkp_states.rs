//! Code parameters and codeword constructors.
//!
//! Both envelopes start from a state on the unit lattice and reach the
//! dimension-`d` codewords through the gate primitives,
//!
//! ```text
//! codeword(j) = e^{-i sqrt(2 pi / d) j P} M_{sqrt(2 pi d)} base
//! ```
//!
//! so the constructors double as a check of the packet algebra.
//!
//! On the unit lattice each peak is `e^{-x^2 / (2 Delta^2)}` truncated to
//! `[-eps, eps]`. After the squeezing by `sqrt(2 pi d)` a peak reads
//! `e^{-(x - c)^2 / (4 pi d Delta^2)}`, which is a Gaussian of standard scale
//! `sigma = Delta sqrt(2 pi d)` with support half-width `eps sqrt(2 pi d)`.

use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::math::*;
use crate::wavepacket::{self, Wavepacket};

/// Relative tolerance for treating two packet shapes as identical.
pub const SHAPE_TOL: f64 = 1e-12;
/// Packets lighter than this fraction of the heaviest one are dropped.
pub const PRUNE_REL: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Envelope {
    Gaussian,
    Comb,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GkpCodeParams {
    pub d: usize,
    /// Envelope squeezing; unused for the comb envelope.
    pub kappa: f64,
    pub delta: f64,
    pub eps: f64,
    pub envelope: Envelope,
    /// Number of comb peaks `L`; unused for the Gaussian envelope.
    pub comb_len: usize,
    /// Set when `kappa` lies outside `(0, 1/4)`, where the closed-form
    /// bounds are not claimed.
    pub outside_bound_domain: bool,
}

impl GkpCodeParams {
    /// Gaussian envelope with independent `Delta` and `eps`.
    pub fn gaussian(d: usize, kappa: f64, delta: f64, eps: f64) -> Result<Self> {
        check_common(d, delta, eps)?;
        if !(kappa > 0.0) || !kappa.is_finite() {
            bail!(Parameter, "kappa must be positive, got {kappa}");
        }
        Ok(GkpCodeParams {
            d,
            kappa,
            delta,
            eps,
            envelope: Envelope::Gaussian,
            comb_len: 0,
            outside_bound_domain: !(kappa < 0.25),
        })
    }

    /// Rectangular envelope with `L` peaks; `None` picks [`default_l`].
    pub fn comb(d: usize, delta: f64, eps: f64, comb_len: Option<usize>) -> Result<Self> {
        check_common(d, delta, eps)?;
        let l = match comb_len {
            Some(l) => l,
            None => default_l(delta, d)?,
        };
        if l < 2 || l % 2 != 0 {
            bail!(Parameter, "comb length L must be even and at least 2, got {l}");
        }
        Ok(GkpCodeParams {
            d,
            kappa: 0.0,
            delta,
            eps,
            envelope: Envelope::Comb,
            comb_len: l,
            outside_bound_domain: !(delta < 0.25),
        })
    }

    /// The same peak shape and envelope in another code dimension.
    pub fn with_dimension(&self, d: usize) -> Self {
        GkpCodeParams { d, ..*self }
    }

    /// True when codewords of this dimension have disjoint supports.
    pub fn orthogonal_truncation(&self) -> bool {
        self.eps <= 0.5 / self.d as f64 * (1.0 + 1e-15)
    }

    /// Peak width in position units, `Delta sqrt(2 pi d)`.
    pub fn sigma(&self) -> f64 {
        self.delta * (2.0 * PI * self.d as f64).sqrt()
    }

    /// Number of envelope terms on each side of the origin (Gaussian only).
    pub fn envelope_cut(&self) -> usize {
        envelope_cut(self.kappa)
    }
}

fn check_common(d: usize, delta: f64, eps: f64) -> Result<()> {
    if d < 2 {
        bail!(Parameter, "code dimension d must be at least 2, got {d}");
    }
    if !(delta > 0.0) || !delta.is_finite() {
        bail!(Parameter, "Delta must be positive, got {delta}");
    }
    if !(eps > 0.0 && eps < 0.5) {
        bail!(Parameter, "eps must lie in (0, 1/2), got {eps}");
    }
    Ok(())
}

/// Symmetrically squeezed code: `Delta = kappa / (2 pi d)`, `eps = 1 / (2d)`.
///
/// `kappa` outside `(0, 1/4)` is accepted but flagged through
/// [`GkpCodeParams::outside_bound_domain`].
pub fn symmetric_params(kappa: f64, d: usize) -> Result<GkpCodeParams> {
    if d < 2 {
        bail!(Parameter, "code dimension d must be at least 2, got {d}");
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        bail!(Parameter, "kappa must be positive, got {kappa}");
    }
    GkpCodeParams::gaussian(d, kappa, kappa / (2.0 * PI * d as f64), 0.5 / d as f64)
}

/// Envelope cut `S = ceil(6 / kappa)`: weights below `e^{-18}` are dropped.
pub fn envelope_cut(kappa: f64) -> usize {
    (6.0 / kappa).ceil() as usize
}

/// `L = 2^{2(ceil(log2 1/Delta) - floor(log2 d))}`, requiring `Delta < 1/d`.
pub fn default_l(delta: f64, d: usize) -> Result<usize> {
    if d < 2 {
        bail!(Parameter, "code dimension d must be at least 2, got {d}");
    }
    if !(delta > 0.0) || delta * d as f64 >= 1.0 {
        bail!(Parameter, "default L needs 0 < Delta < 1/d, got Delta = {delta}, d = {d}");
    }
    // Smallest n with 2^n >= 1/Delta, done exactly on the binary exponent.
    let mut n: i32 = 0;
    while 2f64.powi(n) * delta < 1.0 {
        n += 1;
    }
    let floor_log_d = (usize::BITS - 1 - d.leading_zeros()) as i32;
    let e = 2 * (n - floor_log_d);
    if e >= 62 {
        bail!(TooLarge, "default L = 2^{e} does not fit");
    }
    Ok(1usize << e)
}

/// A superposition of wavepackets on one mode.
///
/// Packets are kept sorted by their left support endpoint so that overlaps
/// can be found by a sweep instead of all pairs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModeState {
    packets: Vec<Wavepacket>,
}

impl ModeState {
    pub fn new(mut packets: Vec<Wavepacket>) -> Self {
        packets.retain(|p| p.amplitude.norm() > 0.0);
        packets.sort_by(|a, b| a.left.total_cmp(&b.left));
        ModeState { packets }
    }

    pub fn packets(&self) -> &[Wavepacket] {
        &self.packets
    }

    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    pub fn eval(&self, x: f64) -> C64 {
        self.packets.iter().take_while(|p| p.left <= x).filter(|p| x <= p.right).map(|p| p.eval(x)).sum()
    }

    /// `(x, psi(x))` on `n` uniformly spaced points including both ends.
    pub fn sample(&self, x_min: f64, x_max: f64, n: usize) -> Vec<(f64, C64)> {
        let step = if n > 1 { (x_max - x_min) / (n - 1) as f64 } else { 0.0 };
        (0..n)
            .map(|i| {
                let x = x_min + step * i as f64;
                (x, self.eval(x))
            })
            .collect()
    }

    /// `<self, other>`, visiting only packet pairs whose supports intersect.
    pub fn inner_product(&self, other: &ModeState) -> C64 {
        if self.packets.is_empty() || other.packets.is_empty() {
            return c(0.0, 0.0);
        }
        let max_len = other.packets.iter().map(|p| p.right - p.left).fold(0.0, f64::max);
        let mut acc = c(0.0, 0.0);
        for a in &self.packets {
            let start = other.packets.partition_point(|b| b.left < a.left - max_len);
            for b in other.packets[start..].iter().take_while(|b| b.left < a.right) {
                if b.right > a.left {
                    acc += wavepacket::inner_product(a, b);
                }
            }
        }
        acc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner_product(self).re
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            bail!(Precondition, "cannot normalize a zero state");
        }
        Ok(self.scale(c(1.0 / n.sqrt(), 0.0)))
    }

    pub fn translate(&self, t: f64) -> Self {
        ModeState { packets: self.packets.iter().map(|p| p.translate(t)).collect() }
    }

    pub fn phase_mul(&self, t: f64) -> Self {
        ModeState { packets: self.packets.iter().map(|p| p.phase_mul(t)).collect() }
    }

    pub fn dilate(&self, alpha: f64) -> Result<Self> {
        Ok(ModeState { packets: self.packets.iter().map(|p| p.dilate(alpha)).collect::<Result<_>>()? })
    }

    pub fn scale(&self, s: C64) -> Self {
        if s == c(0.0, 0.0) {
            return ModeState::default();
        }
        ModeState { packets: self.packets.iter().map(|p| p.scale(s)).collect() }
    }

    /// Sum of two states with identical packets combined.
    pub fn add(&self, other: &ModeState) -> Self {
        let mut packets = Vec::with_capacity(self.len() + other.len());
        packets.extend_from_slice(&self.packets);
        packets.extend_from_slice(&other.packets);
        let mut s = ModeState::new(packets);
        s.compact();
        s
    }

    /// Combines packets of identical shape and prunes negligible ones.
    pub fn compact(&mut self) {
        let ps = core::mem::take(&mut self.packets);
        let mut out: Vec<Wavepacket> = Vec::with_capacity(ps.len());
        let mut group_start = 0;
        for p in ps {
            let joins_group = out.len() > group_start && close(out[out.len() - 1].left, p.left, SHAPE_TOL);
            if !joins_group {
                group_start = out.len();
            }
            match out[group_start..].iter_mut().find(|q| q.same_shape(&p, SHAPE_TOL)) {
                Some(q) => q.amplitude += p.amplitude,
                None => out.push(p),
            }
        }
        let max_w = out.iter().map(|p| p.weight()).fold(0.0, f64::max);
        out.retain(|p| p.amplitude.norm() > 0.0 && p.weight() >= PRUNE_REL * max_w);
        self.packets = out;
    }

    /// Packet-by-packet equality within `tol`.
    pub fn approx_eq(&self, other: &ModeState, tol: f64) -> bool {
        self.packets.len() == other.packets.len()
            && self.packets.iter().zip(&other.packets).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn max_weight(&self) -> f64 {
        self.packets.iter().map(|p| p.weight()).fold(0.0, f64::max)
    }
}

/// Truncated Gaussian-envelope codeword `j`.
///
/// Requires `eps <= 1/(2d)`, which makes distinct codewords exactly
/// orthogonal.
pub fn make_gkp_codeword(p: &GkpCodeParams, j: usize) -> Result<ModeState> {
    if p.envelope != Envelope::Gaussian {
        bail!(Parameter, "make_gkp_codeword needs the gaussian envelope");
    }
    if !p.orthogonal_truncation() {
        bail!(Parameter, "eps = {} exceeds 1/(2d) = {}; codewords would not be orthogonal", p.eps, 0.5 / p.d as f64);
    }
    gkp_codeword_relaxed(p, j)
}

/// Gaussian-envelope codeword without the orthogonality requirement on `eps`.
///
/// Used for targets of the embedding, where a code of dimension `2d` carries
/// the truncation chosen for dimension `d`.
pub fn gkp_codeword_relaxed(p: &GkpCodeParams, j: usize) -> Result<ModeState> {
    if j >= p.d {
        bail!(Index, "codeword index j = {j} must be below d = {}", p.d);
    }
    let peak = Wavepacket::normalized(0.0, p.delta, -p.eps, p.eps)?;
    let cut = p.envelope_cut() as i64;
    let base: Vec<Wavepacket> = (-cut..=cut)
        .map(|s| {
            let w = (-0.5 * p.kappa * p.kappa * (s * s) as f64).exp();
            peak.translate(s as f64).scale(c(w, 0.0))
        })
        .collect();
    place_on_lattice(ModeState::new(base), p.d, j)
}

/// Rectangular-envelope (comb) codeword `j` with `L = p.comb_len` peaks.
pub fn make_comb_codeword(p: &GkpCodeParams, j: usize) -> Result<ModeState> {
    if p.envelope != Envelope::Comb {
        bail!(Parameter, "make_comb_codeword needs the comb envelope");
    }
    if j >= p.d {
        bail!(Index, "codeword index j = {j} must be below d = {}", p.d);
    }
    if !p.orthogonal_truncation() {
        bail!(Parameter, "eps = {} exceeds 1/(2d) = {}; codewords would not be orthogonal", p.eps, 0.5 / p.d as f64);
    }
    place_on_lattice(comb_base_state(p.comb_len, p.delta, p.eps)?, p.d, j)
}

/// The integer-spaced comb: `L` normalized peaks at `z = -L/2, ..., L/2 - 1`
/// with weight `1/sqrt(L)` each.
pub fn comb_base_state(l: usize, delta: f64, eps: f64) -> Result<ModeState> {
    if l < 2 || l % 2 != 0 {
        bail!(Parameter, "comb length L must be even and at least 2, got {l}");
    }
    if !(eps > 0.0 && eps < 0.5) {
        bail!(Parameter, "eps must lie in (0, 1/2), got {eps}");
    }
    let peak = Wavepacket::normalized(0.0, delta, -eps, eps)?.scale(c(1.0 / (l as f64).sqrt(), 0.0));
    let half = (l / 2) as i64;
    Ok(ModeState::new((-half..half).map(|z| peak.translate(z as f64)).collect()))
}

fn place_on_lattice(base: ModeState, d: usize, j: usize) -> Result<ModeState> {
    let df = d as f64;
    base.dilate((2.0 * PI * df).sqrt())?.translate(j as f64 * (2.0 * PI / df).sqrt()).normalized()
}

/// Codeword for either envelope.
pub fn make_codeword(p: &GkpCodeParams, j: usize) -> Result<ModeState> {
    match p.envelope {
        Envelope::Gaussian => make_gkp_codeword(p, j),
        Envelope::Comb => make_comb_codeword(p, j),
    }
}

/// Codeword for either envelope without the orthogonality check.
pub fn make_codeword_relaxed(p: &GkpCodeParams, j: usize) -> Result<ModeState> {
    match p.envelope {
        Envelope::Gaussian => gkp_codeword_relaxed(p, j),
        Envelope::Comb => {
            if j >= p.d {
                bail!(Index, "codeword index j = {j} must be below d = {}", p.d);
            }
            place_on_lattice(comb_base_state(p.comb_len, p.delta, p.eps)?, p.d, j)
        }
    }
}

/// Truncated vacuum: one packet with `sigma = 1` on `[-8, 8]`.
pub fn make_vacuum() -> ModeState {
    ModeState::new(alloc::vec![Wavepacket::normalized(0.0, 1.0, -8.0, 8.0).expect("valid vacuum packet")])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn symmetric_preset_values() {
        let p = symmetric_params(0.1, 4).unwrap();
        assert!((p.delta - 0.003_978_873_577_297_384).abs() < 1e-15);
        assert_eq!(p.eps, 0.125);
        assert!(((2.0 * PI * 4.0 * p.delta) - 0.1).abs() < 1e-15);
        assert_eq!(symmetric_params(0.2, 2).unwrap().eps, 0.25);
        assert!(symmetric_params(0.3, 2).unwrap().outside_bound_domain);
        assert!(!symmetric_params(0.2, 2).unwrap().outside_bound_domain);
    }

    #[test]
    fn default_l_examples() {
        assert_eq!(default_l(1.0 / 16.0, 2).unwrap(), 64);
        assert_eq!(default_l(0.1, 2).unwrap(), 64);
        assert_eq!(default_l(1.0 / 32.0, 2).unwrap(), 256);
        assert!(default_l(0.5, 2).is_err());
    }

    #[test]
    fn codewords_are_orthonormal() {
        for &(kappa, d) in &[(0.2, 2usize), (0.1, 4), (0.05, 8)] {
            let p = symmetric_params(kappa, d).unwrap();
            let ws: Vec<_> = (0..d).map(|j| make_gkp_codeword(&p, j).unwrap()).collect();
            for j in 0..d {
                for k in 0..d {
                    let v = ws[j].inner_product(&ws[k]);
                    if j == k {
                        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
                    } else {
                        assert!(v.norm() < 1e-15, "{kappa} {d} {j} {k} {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn comb_codewords_are_orthonormal() {
        let p = GkpCodeParams::comb(4, 0.01, 0.125, Some(16)).unwrap();
        for j in 0..4 {
            let a = make_comb_codeword(&p, j).unwrap();
            assert_eq!(a.len(), 16);
            for k in 0..4 {
                let v = a.inner_product(&make_comb_codeword(&p, k).unwrap());
                let expect = if j == k { 1.0 } else { 0.0 };
                assert!((v - c(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn peaks_sit_near_lattice_points() {
        let p = symmetric_params(0.2, 2).unwrap();
        let w = make_gkp_codeword(&p, 1).unwrap();
        let half = p.eps * (2.0 * PI * 2.0).sqrt();
        for pk in w.packets() {
            let s = ((pk.center - PI.sqrt()) / (4.0 * PI).sqrt()).round();
            let lattice = PI.sqrt() + s * (4.0 * PI).sqrt();
            assert!((pk.left - (lattice - half)).abs() < 1e-12);
            assert!((pk.right - (lattice + half)).abs() < 1e-12);
            assert!((pk.width - p.sigma()).abs() < 1e-15);
        }
    }

    #[test]
    fn d2_kappa02_peak_count_and_weight() {
        // Frozen: 61 peaks; central-peak probability 1 / sum_s e^{-kappa^2 s^2}
        // evaluated with mpmath (kappa = 0.2, |s| <= 30).
        let p = symmetric_params(0.2, 2).unwrap();
        let w = make_gkp_codeword(&p, 0).unwrap();
        assert_eq!(w.len(), 61);
        let centre = w.packets().iter().find(|pk| pk.center.abs() < 1e-9).unwrap();
        let mass = centre.norm_sqr();
        assert!((mass - FROZEN_D2_CENTRAL_MASS).abs() < 1e-10, "{mass}");
        assert!((w.norm_sqr() - 1.0).abs() < 1e-12);
    }

    pub(crate) const FROZEN_D2_CENTRAL_MASS: f64 = 0.112_837_916_709_551_26;

    #[test]
    fn builder_equals_gate_composition_fieldwise() {
        let p = symmetric_params(0.2, 4).unwrap();
        let w = make_gkp_codeword(&p, 3).unwrap();
        let w0 = make_gkp_codeword(&p, 0).unwrap();
        let shifted = w0.translate(3.0 * (2.0 * PI / 4.0).sqrt());
        assert!(w.approx_eq(&shifted, 1e-12));
    }

    #[test]
    fn smaller_kappa_keeps_more_peaks() {
        let mut last = 0;
        for kappa in [0.24, 0.2, 0.15, 0.1, 0.07, 0.05] {
            let n = make_gkp_codeword(&symmetric_params(kappa, 2).unwrap(), 0).unwrap().len();
            assert!(n > last);
            last = n;
        }
    }

    #[test]
    fn vacuum_overlaps() {
        let v = make_vacuum();
        assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(v.inner_product(&v.translate(16.1)), c(0.0, 0.0));
        let o = v.inner_product(&v.translate(1.0));
        assert!((o.re - (-0.25f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn parameter_errors() {
        let p = symmetric_params(0.2, 2).unwrap();
        assert!(make_gkp_codeword(&p, 2).is_err());
        let wide = GkpCodeParams::gaussian(4, 0.2, 0.01, 0.2).unwrap();
        assert!(make_gkp_codeword(&wide, 0).is_err());
        assert!(gkp_codeword_relaxed(&wide, 0).is_ok());
        assert!(GkpCodeParams::comb(2, 0.01, 0.2, Some(5)).is_err());
        assert!(make_comb_codeword(&p, 0).is_err());
    }

    #[test]
    fn compact_merges_and_cancels() {
        let a = Wavepacket::normalized(0.0, 0.1, -0.5, 0.5).unwrap();
        let s = ModeState::new(alloc::vec![a]);
        let t = s.add(&s.scale(c(-1.0, 0.0)));
        assert!(t.is_empty());
        let u = s.add(&s);
        assert_eq!(u.len(), 1);
        assert!((u.norm_sqr() - 4.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn mode_ops_preserve_norm(kappa in 0.08..0.24f64, j in 0usize..4, t in -3.0..3.0f64,
                                  ph in -5.0..5.0f64, a in 0.5..2.0f64) {
            let p = symmetric_params(kappa, 4).unwrap();
            let w = make_gkp_codeword(&p, j).unwrap();
            let v = w.translate(t).phase_mul(ph).dilate(a).unwrap();
            prop_assert!((v.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }
}
