//! The Leech lattice, built from the extended binary Golay code.
//!
//! Ambient model: integer vectors x in Z^24 with the inner product
//! (1/8) x . y, subject to
//!   * all coordinates congruent to m mod 2 for a single m in {0, 1},
//!   * (x - m)/2 reduces mod 2 to a Golay codeword,
//!   * sum(x) = 4m mod 8.
//!
//! The basis is obtained by Hermite reduction of an explicit generating set
//! and cached for the process lifetime. The resulting Gram matrix is even
//! unimodular of rank 24; minimality of the norm (no vectors of squared
//! length 2) is checked in the test suite by enumeration.

use super::Lattice;
use crate::matrix::{IMat, Int, Rat};
use std::sync::OnceLock;

/// Generator rows of the [24,12,8] extended binary Golay code in the
/// bordered-circulant form over the quadratic residues mod 11.
pub fn golay_generators() -> [u32; 12] {
    let qr = [1u32, 3, 4, 5, 9];
    let mut rows = [0u32; 12];
    // B[0] = (0, 1, ..., 1); B[i][0] = 1, B[i][j] = 1 iff (j - i) mod 11 in QR u {0}.
    let mut b = [[0u8; 12]; 12];
    for j in 1..12 {
        b[0][j] = 1;
    }
    for i in 1..12 {
        b[i][0] = 1;
        for j in 1..12 {
            let d = ((j as i32 - i as i32).rem_euclid(11)) as u32;
            if d == 0 || qr.contains(&d) {
                b[i][j] = 1;
            }
        }
    }
    for (i, row) in rows.iter_mut().enumerate() {
        let mut bits = 1u32 << i;
        for j in 0..12 {
            if b[i][j] == 1 {
                bits |= 1 << (12 + j);
            }
        }
        *row = bits;
    }
    rows
}

/// The Leech lattice with its ambient integer basis.
pub struct LeechModel {
    pub lattice: Lattice,
    /// Rows are the ambient Z^24 coordinates of the basis vectors; the inner
    /// product of ambient vectors is (1/8) x . y.
    pub ambient_basis: IMat,
}

impl LeechModel {
    /// Ambient coordinates of a point given in basis coordinates.
    pub fn to_ambient(&self, coords: &[Rat]) -> Vec<Rat> {
        let b = self.ambient_basis.to_rat();
        b.vec_mul(coords)
    }

    /// Basis coordinates of an ambient point (must lie in the rational span,
    /// which is all of Q^24 here).
    pub fn from_ambient(&self, ambient: &[Rat]) -> Vec<Rat> {
        let b = self.ambient_basis.to_rat();
        let binv = b.inverse().expect("full rank");
        // coords * B = ambient  =>  coords = ambient * B^{-1}
        binv.vec_mul(ambient)
    }
}

/// Builds (once) and returns the cached Leech model.
pub fn leech_lattice() -> &'static LeechModel {
    static CACHE: OnceLock<LeechModel> = OnceLock::new();
    CACHE.get_or_init(build)
}

fn build() -> LeechModel {
    let golay = golay_generators();
    let mut gens: Vec<Vec<Int>> = Vec::new();
    // 2c for each Golay generator row c.
    for row in golay {
        let v: Vec<Int> = (0..24).map(|j| Int::from(2 * ((row >> j) & 1) as i64)).collect();
        gens.push(v);
    }
    // 4(e_0 - e_j) and 4(e_0 + e_1): even sums, codeword 0.
    for j in 1..24 {
        let mut v = vec![Int::from(0); 24];
        v[0] = Int::from(4);
        v[j] = Int::from(-4);
        gens.push(v);
    }
    let mut v = vec![Int::from(0); 24];
    v[0] = Int::from(4);
    v[1] = Int::from(4);
    gens.push(v);
    // 8 e_0.
    let mut v = vec![Int::from(0); 24];
    v[0] = Int::from(8);
    gens.push(v);
    // The odd-class generator (-3, 1, ..., 1): coordinate sum 20 = 4 mod 8.
    let mut v = vec![Int::from(1); 24];
    v[0] = Int::from(-3);
    gens.push(v);

    let basis = IMat::from_rows(gens).hnf_basis();
    assert_eq!(basis.nrows(), 24, "Leech generators span rank 24");
    // Gram = B B^T / 8.
    let bb = basis.mul(&basis.transpose()).to_rat();
    let gram = bb.scale(&Rat::new(Int::from(1), Int::from(8)));
    let lattice = Lattice::named(gram, "Leech").expect("positive definite");
    assert!(lattice.is_even(), "Leech is even");
    assert_eq!(lattice.det(), crate::matrix::rat(1), "Leech is unimodular");
    LeechModel { lattice, ambient_basis: basis }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::rat;

    #[test]
    fn golay_weight_distribution() {
        let rows = golay_generators();
        let mut counts = [0u32; 25];
        for m in 0u32..4096 {
            let mut v = 0u32;
            for (i, row) in rows.iter().enumerate() {
                if (m >> i) & 1 == 1 {
                    v ^= row;
                }
            }
            counts[v.count_ones() as usize] += 1;
        }
        assert_eq!(counts[0], 1);
        assert_eq!(counts[8], 759);
        assert_eq!(counts[12], 2576);
        assert_eq!(counts[16], 759);
        assert_eq!(counts[24], 1);
        assert_eq!(counts.iter().sum::<u32>(), 4096);
    }

    #[test]
    fn leech_is_even_unimodular_rank_24() {
        let model = leech_lattice();
        assert_eq!(model.lattice.rank(), 24);
        assert!(model.lattice.is_even());
        assert_eq!(model.lattice.det(), rat(1));
    }

    #[test]
    fn frame_vector_membership() {
        let model = leech_lattice();
        // 8 e_0 is a lattice vector of squared length 8.
        let ambient: Vec<Rat> = (0..24).map(|i| rat(if i == 0 { 8 } else { 0 })).collect();
        let coords = model.from_ambient(&ambient);
        assert!(coords.iter().all(|c| c.is_integer()));
        assert_eq!(model.lattice.norm(&coords), rat(8));
    }
}
