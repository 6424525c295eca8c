//! Seeded random unitaries and wavepackets.

use gkp_core::linalg::CMatrix;
use gkp_core::wavepacket::Wavepacket;
use gkp_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SimRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut SimRng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed `n x n` unitary: Gram-Schmidt on complex Gaussian
/// columns.
pub fn random_unitary(n: usize, rng: &mut SimRng) -> CMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        for q in &cols {
            let p: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    CMatrix::from_fn(n, n, |r, k| cols[k][r])
}

pub fn random_two_qubit(rng: &mut SimRng) -> [[C64; 4]; 4] {
    let m = random_unitary(4, rng);
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            *v = m[(r, k)];
        }
    }
    out
}

/// A packet with unit-modulus amplitude, centre in `[-3, 3]`, width in
/// `[0.05, 1.5]`, support reaching `0.1..4` to either side and slope in
/// `[-10, 10]`.
pub fn random_packet(rng: &mut SimRng) -> Wavepacket {
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let center = rng.random_range(-3.0..3.0);
    let width = rng.random_range(0.05..1.5);
    let left = center - rng.random_range(0.1..4.0);
    let right = center + rng.random_range(0.1..4.0);
    let slope = rng.random_range(-10.0..10.0);
    Wavepacket::new(C64::from_polar(1.0, phase), center, width, left, right, slope).expect("valid random packet")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitaries_are_unitary_and_seeded() {
        let a = random_unitary(8, &mut rng(3));
        assert!(a.unitarity_defect() < 1e-12);
        assert_eq!(a, random_unitary(8, &mut rng(3)));
        assert_ne!(a, random_unitary(8, &mut rng(4)));
    }
}
