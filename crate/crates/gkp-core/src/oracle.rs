//! Brute-force reference values that share no code with the wavepacket
//! engine or the circuit builders.
//!
//! Functions are pointwise closures built from the raw definitions together
//! with a list of intervals outside of which they vanish (or are below
//! `e^{-72}` of their peak: truncated Gaussians are clipped at 12 widths).
//! Overlaps are composite Simpson or trapezoid sums over every intersection
//! of the two interval lists, each with its own uniform grid, so narrow peaks
//! far apart are resolved without a huge global grid. Every overlap is
//! recomputed on twice as many points and must agree to `1e-9`.
//!
//! Gate actions on functions are applied through the transformation rules of
//! the operators themselves:
//! `(e^{-itP} f)(x) = f(x - t)`, `(e^{iaQ} f)(x) = e^{iax} f(x)`,
//! `(M_a f)(x) = f(x/a)/sqrt(a)`.
//!
//! Matrix elements of the basic maps reduce to single-mode overlaps. With
//! `t = sqrt(2 pi/d)` and `a = sqrt(pi) 2^{(l-1)/2}`,
//!
//! ```text
//! <f_j, b| W_qCX |f_k, b'>  = delta_{bb'} ((1 - b) <f_j, f_k> + b <f_j, f_k(. - t)>)
//! <f_j, b| W_LSB |f_k, b'>  = (<f_j, f_k> + (-1)^{b+b'} <f_j, e^{iax} f_k>) / 2
//! <g_m| W_Embed |f_j>       = <g_m, M_sqrt2 f_j>
//! ```
//!
//! where the LSB line expands `H (|0><0| (x) 1 + |1><1| (x) e^{iaQ}) H`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{bail, Result};
use crate::linalg::CMatrix;
use crate::logical_layer::{LogicalMap, MapKind};
use crate::math::*;

/// Truncated Gaussians are treated as zero beyond this many widths.
const CLIP_WIDTHS: f64 = 12.0;
/// Agreement required between a grid and its refinement.
pub const CONVERGENCE_TOL: f64 = 1e-9;
/// Smallest number of subintervals used on any piece.
const MIN_PIECE_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Trapezoid,
    Simpson,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    /// Total number of grid points, shared among the pieces.
    pub points: usize,
    pub rule: Rule,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, points: usize, rule: Rule) -> Result<Self> {
        if !(x_min < x_max) {
            bail!(Parameter, "grid needs x_min < x_max, got [{x_min}, {x_max}]");
        }
        if points < 10_000 {
            bail!(Parameter, "grid needs at least 10^4 points, got {points}");
        }
        if rule == Rule::Simpson && points % 2 != 0 {
            bail!(Parameter, "Simpson's rule needs an even number of points, got {points}");
        }
        Ok(GridSpec { x_min, x_max, points, rule })
    }

    /// `[-(max support) - 2, (max support) + 2]`, `2 10^5` points, Simpson.
    pub fn covering(fs: &[&OracleFn]) -> Self {
        let r = fs.iter().flat_map(|f| f.support.iter().map(|&(a, b)| a.abs().max(b.abs()))).fold(0.0f64, f64::max);
        GridSpec { x_min: -r - 2.0, x_max: r + 2.0, points: 200_000, rule: Rule::Simpson }
    }
}

type Pointwise = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A function given pointwise, with the intervals carrying its mass.
#[derive(Clone)]
pub struct OracleFn {
    eval: Pointwise,
    /// Sorted, pairwise disjoint; the function is smooth on each.
    support: Vec<(f64, f64)>,
}

impl core::fmt::Debug for OracleFn {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("OracleFn").field("pieces", &self.support.len()).finish()
    }
}

impl OracleFn {
    pub fn new(eval: impl Fn(f64) -> C64 + Send + Sync + 'static, mut support: Vec<(f64, f64)>) -> Self {
        support.retain(|(a, b)| b > a);
        support.sort_by(|x, y| x.0.total_cmp(&y.0));
        OracleFn { eval: Arc::new(eval), support }
    }

    pub fn eval(&self, x: f64) -> C64 {
        (self.eval)(x)
    }

    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    /// `x -> f(x - t)`.
    pub fn translate(&self, t: f64) -> Self {
        let f = self.eval.clone();
        OracleFn {
            eval: Arc::new(move |x| f(x - t)),
            support: self.support.iter().map(|&(a, b)| (a + t, b + t)).collect(),
        }
    }

    /// `x -> e^{iax} f(x)`.
    pub fn phase(&self, a: f64) -> Self {
        let f = self.eval.clone();
        OracleFn { eval: Arc::new(move |x| cis(a * x) * f(x)), support: self.support.clone() }
    }

    /// `x -> f(x/a)/sqrt(a)`.
    pub fn dilate(&self, a: f64) -> Self {
        let f = self.eval.clone();
        let s = 1.0 / a.sqrt();
        OracleFn {
            eval: Arc::new(move |x| f(x / a) * s),
            support: self.support.iter().map(|&(l, r)| (l * a, r * a)).collect(),
        }
    }

    pub fn scale(&self, k: C64) -> Self {
        let f = self.eval.clone();
        OracleFn { eval: Arc::new(move |x| f(x) * k), support: self.support.clone() }
    }
}

fn inside(x: f64, lo: f64, hi: f64) -> bool {
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    x >= lo - slack && x <= hi + slack
}

/// `A e^{i beta x} e^{-(x - mu)^2/(2 sigma^2)}` on `[left, right]`.
pub fn packet_fn(amplitude: C64, center: f64, width: f64, left: f64, right: f64, slope: f64) -> OracleFn {
    let eval = move |x: f64| {
        if !inside(x, left, right) {
            return c(0.0, 0.0);
        }
        let u = (x - center) / width;
        amplitude * cis(slope * x) * (-0.5 * u * u).exp()
    };
    let lo = left.max(center - CLIP_WIDTHS * width);
    let hi = right.min(center + CLIP_WIDTHS * width);
    OracleFn::new(eval, alloc::vec![(lo, hi)])
}

/// Code parameters as the oracle sees them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleEnvelope {
    Gaussian { kappa: f64 },
    Comb { comb_len: usize },
}

/// Unnormalized codeword `j` of dimension `d`: peaks of width
/// `Delta sqrt(2 pi d)` truncated to `+- eps sqrt(2 pi d)` at
/// `s sqrt(2 pi d) + j sqrt(2 pi/d)`, weighted by `e^{-kappa^2 s^2/2}`
/// (Gaussian envelope, `|s|` up to `sqrt(80)/kappa`) or 1
/// (comb, `s = -L/2 .. L/2 - 1`).
pub fn codeword_fn(d: usize, envelope: OracleEnvelope, delta: f64, eps: f64, j: usize) -> OracleFn {
    let root = (2.0 * PI * d as f64).sqrt();
    let spacing = root;
    let offset = j as f64 * (2.0 * PI / d as f64).sqrt();
    let sigma = delta * root;
    let half = eps * root;
    let (s_lo, s_hi) = match envelope {
        OracleEnvelope::Gaussian { kappa } => {
            let s = (80f64.sqrt() / kappa).ceil() as i64;
            (-s, s)
        }
        OracleEnvelope::Comb { comb_len } => (-(comb_len as i64) / 2, comb_len as i64 / 2 - 1),
    };
    let weight = move |s: i64| match envelope {
        OracleEnvelope::Gaussian { kappa } => (-0.5 * kappa * kappa * (s * s) as f64).exp(),
        OracleEnvelope::Comb { .. } => 1.0,
    };
    let eval = move |x: f64| {
        let s0 = ((x - offset) / spacing).round() as i64;
        let mut acc = c(0.0, 0.0);
        for s in (s0 - 1)..=(s0 + 1) {
            if s < s_lo || s > s_hi {
                continue;
            }
            let centre = s as f64 * spacing + offset;
            if inside(x, centre - half, centre + half) {
                let u = (x - centre) / sigma;
                acc += c(weight(s) * (-0.5 * u * u).exp(), 0.0);
            }
        }
        acc
    };
    let clip = half.min(CLIP_WIDTHS * sigma);
    let support = (s_lo..=s_hi)
        .map(|s| {
            let centre = s as f64 * spacing + offset;
            (centre - clip, centre + clip)
        })
        .collect();
    OracleFn::new(eval, support)
}

/// The integer-spaced comb (`d = 1` lattice, unit spacing), unnormalized.
pub fn unit_comb_fn(comb_len: usize, delta: f64, eps: f64) -> OracleFn {
    let h = (comb_len / 2) as i64;
    let eval = move |x: f64| {
        let z = x.round() as i64;
        if z < -h || z >= h || !inside(x, z as f64 - eps, z as f64 + eps) {
            return c(0.0, 0.0);
        }
        let u = (x - z as f64) / delta;
        c((-0.5 * u * u).exp(), 0.0)
    };
    let clip = eps.min(CLIP_WIDTHS * delta);
    OracleFn::new(eval, (-h..h).map(|z| (z as f64 - clip, z as f64 + clip)).collect())
}

fn intersections(a: &[(f64, f64)], b: &[(f64, f64)], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let l = a[i].0.max(b[j].0).max(lo);
        let r = a[i].1.min(b[j].1).min(hi);
        if r > l {
            out.push((l, r));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

fn piece_sum(f: &OracleFn, g: &OracleFn, a: f64, b: f64, n: usize, rule: Rule) -> C64 {
    let h = (b - a) / n as f64;
    let term = |i: usize| {
        let x = if i == n { b } else { a + h * i as f64 };
        f.eval(x).conj() * g.eval(x)
    };
    let mut acc = c(0.0, 0.0);
    match rule {
        Rule::Trapezoid => {
            acc += (term(0) + term(n)) * 0.5;
            for i in 1..n {
                acc += term(i);
            }
            acc * h
        }
        Rule::Simpson => {
            acc += term(0) + term(n);
            for i in 1..n {
                acc += term(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * (h / 3.0)
        }
    }
}

fn grid_sum(f: &OracleFn, g: &OracleFn, pieces: &[(f64, f64)], per_piece: usize, rule: Rule) -> C64 {
    pieces.iter().map(|&(a, b)| piece_sum(f, g, a, b, per_piece, rule)).sum()
}

/// `int conj(f) g` over `[x_min, x_max]`.
pub fn grid_overlap(f: &OracleFn, g: &OracleFn, spec: &GridSpec) -> Result<C64> {
    let pieces = intersections(&f.support, &g.support, spec.x_min, spec.x_max);
    if pieces.is_empty() {
        return Ok(c(0.0, 0.0));
    }
    let mut n = (spec.points / pieces.len()).max(MIN_PIECE_POINTS);
    n += n % 2;
    let mut coarse = grid_sum(f, g, &pieces, n, spec.rule);
    for _ in 0..=3 {
        let fine = grid_sum(f, g, &pieces, 2 * n, spec.rule);
        if (fine - coarse).norm() <= CONVERGENCE_TOL {
            return Ok(fine);
        }
        coarse = fine;
        n *= 2;
    }
    bail!(Convergence, "grid overlap did not settle to {CONVERGENCE_TOL:e} after 3 refinements")
}

/// `f / ||f||` with the norm taken on the grid.
pub fn normalized(f: &OracleFn, spec: &GridSpec) -> Result<OracleFn> {
    let n = grid_overlap(f, f, spec)?.re;
    if !(n > 0.0) {
        bail!(Precondition, "cannot normalize a function of zero norm");
    }
    Ok(f.scale(c(1.0 / n.sqrt(), 0.0)))
}

/// Overlap on the default covering grid.
pub fn overlap(f: &OracleFn, g: &OracleFn) -> Result<C64> {
    grid_overlap(f, g, &GridSpec::covering(&[f, g]))
}

/// Normalized codewords of the symmetric code `Delta = kappa/(2 pi d)`,
/// `eps = 1/(2d)` with `d = 2^ell`, as dimension-`2^bits` codewords.
fn symmetric_words(ell: usize, bits: usize, kappa: f64) -> Result<Vec<OracleFn>> {
    let d = (1usize << ell) as f64;
    let delta = kappa / (2.0 * PI * d);
    let eps = 1.0 / (2.0 * d);
    (0..1usize << bits)
        .map(|j| {
            let f = codeword_fn(1 << bits, OracleEnvelope::Gaussian { kappa }, delta, eps, j);
            normalized(&f, &GridSpec::covering(&[&f]))
        })
        .collect()
}

/// Elements of `W_qCX` on the symmetric `2^l` code, index `2x + b`.
pub fn qcx_elements(ell: usize, kappa: f64) -> Result<CMatrix> {
    let words = symmetric_words(ell, ell, kappa)?;
    let t = (2.0 * PI / (1usize << ell) as f64).sqrt();
    let shifted: Vec<OracleFn> = words.iter().map(|f| f.translate(t)).collect();
    let d = words.len();
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for j in 0..d {
        for k in 0..d {
            m[(2 * j, 2 * k)] = overlap(&words[j], &words[k])?;
            m[(2 * j + 1, 2 * k + 1)] = overlap(&words[j], &shifted[k])?;
        }
    }
    Ok(m)
}

/// Elements of `W_LSB` on the symmetric `2^l` code, index `2x + b`.
pub fn lsb_elements(ell: usize, kappa: f64) -> Result<CMatrix> {
    let words = symmetric_words(ell, ell, kappa)?;
    let a = PI.sqrt() * 2f64.powf((ell as f64 - 1.0) / 2.0);
    let d = words.len();
    let mut m = CMatrix::zeros(2 * d, 2 * d);
    for j in 0..d {
        for k in 0..d {
            let plain = overlap(&words[j], &words[k])?;
            let phased = overlap(&words[j], &words[k].phase(a))?;
            for b in 0..2 {
                for bp in 0..2 {
                    let sign = if (b + bp) % 2 == 0 { 1.0 } else { -1.0 };
                    m[(2 * j + b, 2 * k + bp)] = (plain + phased * sign) * 0.5;
                }
            }
        }
    }
    Ok(m)
}

/// Elements `<g_m, M_sqrt2 f_j>` of `W_Embed` from the `2^l` to the `2^{l+1}`
/// code (same `Delta`, `eps`).
pub fn embed_elements(ell: usize, kappa: f64) -> Result<CMatrix> {
    let src = symmetric_words(ell, ell, kappa)?;
    let dst = symmetric_words(ell, ell + 1, kappa)?;
    let mut m = CMatrix::zeros(dst.len(), src.len());
    for (j, f) in src.iter().enumerate() {
        let g = f.dilate(2f64.sqrt());
        for (r, h) in dst.iter().enumerate() {
            m[(r, j)] = overlap(h, &g)?;
        }
    }
    Ok(m)
}

/// Largest register size for formula matrices.
pub const MAX_FORMULA_ELL: usize = 8;

/// Matrix of a basic map from its arithmetic definition.
pub fn formula_matrix(map: LogicalMap) -> Result<CMatrix> {
    let ell = map.ell;
    if ell == 0 || ell > MAX_FORMULA_ELL {
        bail!(TooLarge, "formula matrices need 1 <= l <= {MAX_FORMULA_ELL}, got {ell}");
    }
    let d = 1usize << ell;
    let one = c(1.0, 0.0);
    let m = match map.kind {
        MapKind::Embed => {
            let mut m = CMatrix::zeros(2 * d, d);
            for x in 0..d {
                m[(x + x, x)] = one;
            }
            m
        }
        MapKind::EmbedAdj => {
            let mut m = CMatrix::zeros(d, 2 * d);
            for x in 0..d {
                m[(x, x + x)] = one;
            }
            m
        }
        kind => {
            let mut m = CMatrix::zeros(2 * d, 2 * d);
            for x in 0..d {
                for b in 0..2usize {
                    let (y, bb) = match kind {
                        MapKind::QCX => ((x + b) % d, b),
                        MapKind::QCXAdj => ((x + d - b) % d, b),
                        _ => (x, (b + x) % 2),
                    };
                    m[(bb + 2 * y, b + 2 * x)] = one;
                }
            }
            m
        }
    };
    Ok(m)
}

/// The bit-transfer permutation `(x, b) -> (x - 2^j (b xor x_j), b xor x_j)`,
/// index `2x + b`.
pub fn bit_transfer_formula(ell: usize, j: usize) -> Result<CMatrix> {
    if ell == 0 || ell > MAX_FORMULA_ELL || j >= ell {
        bail!(Index, "bit transfer needs 0 <= j < l <= {MAX_FORMULA_ELL}, got j = {j}, l = {ell}");
    }
    let d = 1i64 << ell;
    let mut m = CMatrix::zeros(2 * d as usize, 2 * d as usize);
    for x in 0..d {
        let xj = (x / (1 << j)) % 2;
        for b in 0..2i64 {
            let nb = (b + xj) % 2;
            let y = (x - nb * (1 << j)).rem_euclid(d);
            m[((2 * y + nb) as usize, (2 * x + b) as usize)] = c(1.0, 0.0);
        }
    }
    Ok(m)
}
