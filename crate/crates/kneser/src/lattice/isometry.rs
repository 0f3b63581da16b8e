//! Isometry testing by invariant prefilter and backtracking search.
//!
//! Two integral lattices are compared first on cheap invariants (rank,
//! determinant, counts of vectors of squared length up to 4 and the root
//! system). When the fingerprints agree, a witness is searched by assigning
//! images to the basis vectors of the first lattice among the short vectors
//! of the second, pruning on inner-product profiles. Every witness is
//! re-verified against the exact Gram identity before being returned, so a
//! false positive is impossible; absence of a witness is a definite answer
//! because the candidate pools are complete for the basis norms involved.

use super::{reflection, root_system, short_vectors, GeneratorSet, Isometry, Lattice, RootSystemDesc};
use crate::matrix::{lll_gram, rat, Mat, Rat};
use num_traits::ToPrimitive;

/// Cheap isometry invariants.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Fingerprint {
    pub rank: usize,
    pub det: Rat,
    /// Sign-pair counts of squared lengths 1..=4.
    pub short_counts: [usize; 4],
    pub roots: RootSystemDesc,
}

/// Computes the invariant fingerprint of an integral lattice.
pub fn fingerprint(l: &Lattice) -> Fingerprint {
    let mut short_counts = [0usize; 4];
    let sv = short_vectors(l, &rat(4));
    for v in &sv {
        let n = l.norm(v);
        for (k, slot) in short_counts.iter_mut().enumerate() {
            if n == rat(k as i64 + 1) {
                *slot += 1;
            }
        }
    }
    Fingerprint {
        rank: l.rank(),
        det: l.det(),
        short_counts,
        roots: root_system(l).unwrap_or_default(),
    }
}

/// Searches for an isometry from `l1` onto `l2`. Returns a verified witness
/// or `None`. Both lattices must be integral and positive definite.
pub fn is_isometric(l1: &Lattice, l2: &Lattice) -> Option<Isometry> {
    if l1.rank() != l2.rank() {
        return None;
    }
    if l1.rank() == 0 {
        return Some(Isometry::identity(0));
    }
    if l1.gram() == l2.gram() {
        return Some(Isometry::identity(l1.rank()));
    }
    if fingerprint(l1) != fingerprint(l2) {
        return None;
    }
    search_witness(l1, l2)
}

fn search_witness(l1: &Lattice, l2: &Lattice) -> Option<Isometry> {
    let n = l1.rank();
    // Work with an LLL-reduced basis of l1 so the required candidate pools
    // stay small; a witness for the reduced basis transfers back through the
    // unimodular transform.
    let (u1, g1red) = lll_gram(l1.gram());
    let g1 = &g1red;
    let max_norm = (0..n).map(|i| g1[(i, i)].clone()).max().unwrap();

    // Candidate pool: all vectors of l2 with squared length up to the largest
    // basis norm, as integer coordinate vectors, both signs.
    let g2int = l2.gram().to_integer().expect("integral lattice");
    let g2: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| g2int[(i, j)].to_i64().expect("entry fits")).collect())
        .collect();
    let pool_pairs = short_vectors(l2, &max_norm);
    let mut pool: Vec<Vec<i64>> = Vec::with_capacity(2 * pool_pairs.len());
    for v in &pool_pairs {
        let iv: Vec<i64> = v.iter().map(|c| c.numer().to_i64().unwrap()).collect();
        let neg: Vec<i64> = iv.iter().map(|&x| -x).collect();
        pool.push(iv);
        pool.push(neg);
    }
    // Precompute G2 * w for every pool vector.
    let gw: Vec<Vec<i64>> = pool
        .iter()
        .map(|w| (0..n).map(|i| (0..n).map(|j| g2[i][j] * w[j]).sum()).collect())
        .collect();
    let pool_norm: Vec<i64> = pool.iter().zip(&gw).map(|(w, g)| dot(w, g)).collect();

    // Target inner products for the reduced basis of l1 (fits i64 at desk
    // scale; the Gram entries of a reduced integral lattice are small).
    let g1i: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = &g1[(i, j)];
                    assert!(x.is_integer());
                    x.to_integer().to_i64().expect("entry fits")
                })
                .collect()
        })
        .collect();

    // Slot order: rarer norms first so the branching collapses early.
    let mut order: Vec<usize> = (0..n).collect();
    let norm_freq = |i: usize| pool_norm.iter().filter(|&&x| x == g1i[i][i]).count();
    order.sort_by_key(|&i| norm_freq(i));

    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    if !assign(&mut chosen, &order, &g1i, &pool, &gw, &pool_norm) {
        return None;
    }
    // Build the witness in original coordinates: columns are images of the
    // reduced basis; compose with the reduction transform.
    let mut m_red = Mat::zeros(n, n);
    for (slot, &pi) in chosen.iter().enumerate() {
        let basis_index = order[slot];
        for r in 0..n {
            m_red[(r, basis_index)] = rat(pool[pi][r]);
        }
    }
    // m_red maps reduced-basis coordinates to l2 coordinates. Original l1
    // coordinates x satisfy x_red = U^{-T} x, so the full map is
    // m = m_red * U^{-T}.
    let u_t_inv = u1.to_rat().transpose().inverse().expect("unimodular");
    let m = m_red.mul(&u_t_inv);
    let iso = Isometry { matrix: m };
    // Exact re-verification: never return an unverified witness.
    iso.verify(l1, l2).then_some(iso)
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Depth-first assignment of pool vectors to basis slots with inner-product
/// pruning. `chosen[k]` is the pool index assigned to slot `k`.
fn assign(
    chosen: &mut Vec<usize>,
    order: &[usize],
    g1: &[Vec<i64>],
    pool: &[Vec<i64>],
    gw: &[Vec<i64>],
    pool_norm: &[i64],
) -> bool {
    let depth = chosen.len();
    if depth == order.len() {
        return true;
    }
    let bi = order[depth];
    'cand: for (pi, w) in pool.iter().enumerate() {
        if pool_norm[pi] != g1[bi][bi] {
            continue;
        }
        for (slot, &pj) in chosen.iter().enumerate() {
            let bj = order[slot];
            if dot(w, &gw[pj]) != g1[bi][bj] {
                continue 'cand;
            }
        }
        chosen.push(pi);
        if assign(chosen, order, g1, pool, gw, pool_norm) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Union of the reflections in all squared-length-2 vectors (one per sign
/// pair) with the supplied extra generators, deduplicated.
pub fn automorphism_generators(
    l: &Lattice,
    extra: &GeneratorSet,
) -> Result<GeneratorSet, super::LatticeError> {
    for g in &extra.gens {
        if !g.verify(l, l) {
            return Err(super::LatticeError::NotAnIsometry);
        }
    }
    let mut gens: Vec<Isometry> = Vec::new();
    for beta in short_vectors(l, &rat(2)) {
        if l.norm(&beta) == rat(2) {
            gens.push(reflection(l, &beta));
        }
    }
    gens.extend(extra.gens.iter().cloned());
    gens.dedup_by(|a, b| a.matrix == b.matrix);
    let mut seen: Vec<&Isometry> = Vec::new();
    let mut out: Vec<Isometry> = Vec::new();
    for g in &gens {
        if !seen.iter().any(|s| s.matrix == g.matrix) {
            out.push(g.clone());
            seen.push(g);
        }
    }
    Ok(GeneratorSet::new(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{direct_sum, make_lattice};
    use crate::matrix::IMat;

    fn transform(l: &Lattice, u: &IMat) -> Lattice {
        let ur = u.to_rat();
        Lattice::new(ur.mul(l.gram()).mul(&ur.transpose())).unwrap()
    }

    #[test]
    fn identity_on_self() {
        let e8 = make_lattice('E', 8).unwrap();
        let iso = is_isometric(&e8, &e8).unwrap();
        assert!(iso.verify(&e8, &e8));
    }

    #[test]
    fn recovers_unimodular_change_of_basis() {
        let e8 = make_lattice('E', 8).unwrap();
        // A fixed "random-looking" unimodular transform.
        let mut u = IMat::identity(8);
        let ops: [(usize, usize, i64); 6] =
            [(0, 3, 2), (5, 1, -1), (2, 7, 3), (4, 0, 1), (6, 2, -2), (7, 5, 1)];
        for (a, b, c) in ops {
            u.add_row_multiple(a, b, &crate::matrix::Int::from(c));
        }
        let l2 = transform(&e8, &u);
        let iso = is_isometric(&e8, &l2).expect("isometric by construction");
        assert!(iso.verify(&e8, &l2));
    }

    #[test]
    fn distinguishes_non_isometric() {
        let e8 = make_lattice('E', 8).unwrap();
        let d8 = make_lattice('D', 8).unwrap();
        assert!(is_isometric(&e8, &d8).is_none());
        let z8 = make_lattice('Z', 8).unwrap();
        assert!(is_isometric(&e8, &z8).is_none());
    }

    #[test]
    fn weyl_generators_of_e8() {
        let e8 = make_lattice('E', 8).unwrap();
        let gens = automorphism_generators(&e8, &GeneratorSet::default()).unwrap();
        assert_eq!(gens.gens.len(), 120);
        assert!(gens.verify(&e8));
        let zero = crate::lattice::Lattice::zero();
        let g0 = automorphism_generators(&zero, &GeneratorSet::default()).unwrap();
        assert!(g0.gens.is_empty());
    }

    #[test]
    fn swap_generator_verifies() {
        let e8 = make_lattice('E', 8).unwrap();
        let ee = direct_sum(&e8, &e8);
        let mut m = Mat::zeros(16, 16);
        for i in 0..8 {
            m[(i, 8 + i)] = rat(1);
            m[(8 + i, i)] = rat(1);
        }
        let swap = Isometry { matrix: m };
        let gens = automorphism_generators(&ee, &GeneratorSet::new(vec![swap])).unwrap();
        assert_eq!(gens.gens.len(), 240 + 1);
    }
}
