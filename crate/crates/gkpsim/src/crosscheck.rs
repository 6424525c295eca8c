//! Wavepacket engine against the grid oracle.

use gkp_core::error_analysis::basic_map_report;
use gkp_core::linalg::CMatrix;
use gkp_core::logical_layer::MapKind;
use gkp_core::oracle::{self, packet_fn};
use gkp_core::wavepacket::{inner_product, Wavepacket};
use gkp_core::Result;
use rayon::prelude::*;

use crate::random::{random_packet, rng};

#[derive(Clone, Debug, PartialEq)]
pub struct PacketCase {
    pub a: Wavepacket,
    pub b: Wavepacket,
    pub delta: f64,
}

/// The `i`-th pair of a seeded stream; each case has its own generator so
/// results do not depend on scheduling.
pub fn packet_pair(seed: u64, i: u64) -> (Wavepacket, Wavepacket) {
    let mut r = rng(seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (random_packet(&mut r), random_packet(&mut r))
}

fn oracle_of(p: &Wavepacket) -> oracle::OracleFn {
    packet_fn(p.amplitude, p.center, p.width, p.left, p.right, p.slope)
}

/// `|<a|b>_engine - <a|b>_oracle|` for `cases` seeded pairs.
pub fn packet_cases(cases: usize, seed: u64) -> Result<Vec<PacketCase>> {
    (0..cases as u64)
        .into_par_iter()
        .map(|i| {
            let (a, b) = packet_pair(seed, i);
            let want = oracle::overlap(&oracle_of(&a), &oracle_of(&b))?;
            Ok(PacketCase { delta: (inner_product(&a, &b) - want).norm(), a, b })
        })
        .collect()
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.max_abs_diff(b)
}

/// Largest element deviation for qCX, LSB and Embed on the symmetric code.
pub fn element_deltas(ell: usize, kappa: f64) -> Result<[(MapKind, f64); 3]> {
    let (qcx, _) = basic_map_report(MapKind::QCX, ell, kappa)?;
    let (lsb, _) = basic_map_report(MapKind::LSB, ell, kappa)?;
    let (embed, _) = basic_map_report(MapKind::Embed, ell, kappa)?;
    Ok([
        (MapKind::QCX, max_diff(&qcx, &oracle::qcx_elements(ell, kappa)?)),
        (MapKind::LSB, max_diff(&lsb, &oracle::lsb_elements(ell, kappa)?)),
        (MapKind::Embed, max_diff(&embed, &oracle::embed_elements(ell, kappa)?)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_reproducible() {
        assert_eq!(packet_pair(5, 17), packet_pair(5, 17));
        assert_ne!(packet_pair(5, 17), packet_pair(5, 18));
        let cases = packet_cases(16, 1).unwrap();
        assert!(cases.iter().all(|c| c.delta < 1e-8));
    }
}
