//! Root systems from squared-length-2 vectors.
//!
//! An integral lattice's vectors of squared length 2 decompose into
//! connected components under non-orthogonality; each component is a
//! simply-laced root system identified by its rank and root count
//! (A_n: n(n+1), D_n: 2n(n-1), E6: 72, E7: 126, E8: 240).

use super::{short_vectors, Isometry, Lattice, LatticeError, LatticeVector};
use crate::matrix::{rat, Mat, Rat};
use num_traits::Zero;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum RootSeries {
    A,
    D,
    E,
}

impl std::fmt::Display for RootSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootSeries::A => write!(f, "A"),
            RootSeries::D => write!(f, "D"),
            RootSeries::E => write!(f, "E"),
        }
    }
}

/// Multiset of irreducible components with the total root count.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RootSystemDesc {
    /// Sorted component list (series, rank).
    pub components: Vec<(RootSeries, usize)>,
    pub root_count: usize,
}

impl RootSystemDesc {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Root count of one irreducible component.
    pub fn component_roots(series: RootSeries, rank: usize) -> usize {
        match series {
            RootSeries::A => rank * (rank + 1),
            RootSeries::D => 2 * rank * (rank - 1),
            RootSeries::E => match rank {
                6 => 72,
                7 => 126,
                8 => 240,
                _ => unreachable!("E rank"),
            },
        }
    }
}

impl std::fmt::Display for RootSystemDesc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.components.is_empty() {
            return write!(f, "(empty)");
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.components.len() {
            let (s, r) = self.components[i];
            let mut mult = 1;
            while i + mult < self.components.len() && self.components[i + mult] == (s, r) {
                mult += 1;
            }
            if mult == 1 {
                parts.push(format!("{s}{r}"));
            } else {
                parts.push(format!("{s}{r}^{mult}"));
            }
            i += mult;
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Decomposes the squared-length-2 vectors of an integral lattice into
/// irreducible simply-laced root systems.
pub fn root_system(l: &Lattice) -> Result<RootSystemDesc, LatticeError> {
    if !l.is_integral() {
        return Err(LatticeError::NotIntegral);
    }
    let pairs: Vec<LatticeVector> = short_vectors(l, &rat(2))
        .into_iter()
        .filter(|v| l.norm(v) == rat(2))
        .collect();
    if pairs.is_empty() {
        return Ok(RootSystemDesc::default());
    }
    // Union-find over sign-pair representatives, joined by non-orthogonality.
    let m = pairs.len();
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..m {
        for j in i + 1..m {
            if !l.inner(&pairs[i], &pairs[j]).is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..m {
        let r = find(&mut parent, i);
        comps.entry(r).or_default().push(i);
    }
    let mut components = Vec::new();
    let mut total = 0usize;
    for idxs in comps.values() {
        let count = 2 * idxs.len();
        total += count;
        // Rank = rational rank of the span of the component's vectors.
        let rows: Vec<Vec<Rat>> = idxs.iter().map(|&i| pairs[i].clone()).collect();
        let rank = rational_rank(&Mat::from_rows(rows));
        let series = identify_component(rank, count).ok_or(LatticeError::NonAdeRoots)?;
        components.push((series, rank));
    }
    components.sort();
    Ok(RootSystemDesc { components, root_count: total })
}

fn identify_component(rank: usize, count: usize) -> Option<RootSeries> {
    // D3 = A3 is reported as A3; D_n only from rank 4 up. D2 cannot occur
    // (it is disconnected).
    if count == rank * (rank + 1) {
        return Some(RootSeries::A);
    }
    if rank >= 4 && count == 2 * rank * (rank - 1) {
        return Some(RootSeries::D);
    }
    match (rank, count) {
        (6, 72) => Some(RootSeries::E),
        (7, 126) => Some(RootSeries::E),
        (8, 240) => Some(RootSeries::E),
        _ => None,
    }
}

fn rational_rank(m: &Mat) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut rank = 0;
    for col in 0..cols {
        let mut pivot = None;
        for r in rank..rows {
            if !a[(r, col)].is_zero() {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { continue };
        for j in 0..cols {
            let t = a[(p, j)].clone();
            a[(p, j)] = a[(rank, j)].clone();
            a[(rank, j)] = t;
        }
        let pv = a[(rank, col)].clone();
        for r in 0..rows {
            if r != rank && !a[(r, col)].is_zero() {
                let f = &a[(r, col)] / &pv;
                for j in 0..cols {
                    let t = &f * &a[(rank, j)];
                    a[(r, j)] -= t;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Reflection in a squared-length-2 vector: x -> x - <x, b> b.
pub fn reflection(l: &Lattice, beta: &[Rat]) -> Isometry {
    debug_assert_eq!(l.norm(beta), rat(2));
    let n = l.rank();
    let gb = l.gram().mul_vec(beta);
    let mut m = Mat::identity(n);
    for i in 0..n {
        for j in 0..n {
            let t = &beta[i] * &gb[j];
            m[(i, j)] -= t;
        }
    }
    Isometry { matrix: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{direct_sum, make_lattice};

    #[test]
    fn identifies_irreducibles() {
        for (kind, rank, count) in [
            ('A', 2, 6),
            ('A', 15, 240),
            ('D', 4, 24),
            ('D', 8, 112),
            ('D', 16, 480),
            ('E', 6, 72),
            ('E', 7, 126),
            ('E', 8, 240),
        ] {
            let l = make_lattice(kind, rank).unwrap();
            let rs = root_system(&l).unwrap();
            assert_eq!(rs.root_count, count, "{kind}{rank}");
            assert_eq!(rs.components.len(), 1);
            let series = match kind {
                'A' => RootSeries::A,
                'D' => RootSeries::D,
                _ => RootSeries::E,
            };
            assert_eq!(rs.components[0], (series, rank));
        }
    }

    #[test]
    fn direct_sum_is_union() {
        let a1 = make_lattice('A', 1).unwrap();
        let e7 = make_lattice('E', 7).unwrap();
        let s = direct_sum(&direct_sum(&a1, &a1), &direct_sum(&e7, &e7));
        let rs = root_system(&s).unwrap();
        assert_eq!(
            rs.components,
            vec![
                (RootSeries::A, 1),
                (RootSeries::A, 1),
                (RootSeries::E, 7),
                (RootSeries::E, 7)
            ]
        );
        assert_eq!(rs.root_count, 2 * 2 + 2 * 126);
    }

    #[test]
    fn d3_is_a3() {
        let d3 = make_lattice('D', 3).unwrap();
        let rs = root_system(&d3).unwrap();
        assert_eq!(rs.components, vec![(RootSeries::A, 3)]);
    }

    #[test]
    fn zn_has_no_roots_below_two() {
        // Z^n does have squared-length-2 vectors (e_i ± e_j): A-type pieces.
        let z2 = make_lattice('Z', 2).unwrap();
        let rs = root_system(&z2).unwrap();
        assert_eq!(rs.root_count, 4);
    }

    #[test]
    fn reflections_are_isometries() {
        let e8 = make_lattice('E', 8).unwrap();
        for beta in short_vectors(&e8, &rat(2)).iter().take(10) {
            let r = reflection(&e8, beta);
            assert!(r.verify(&e8, &e8));
            // Involution.
            let sq = r.compose(&r);
            assert_eq!(sq.matrix, Mat::identity(8));
        }
    }

    #[test]
    fn display_groups_multiplicities() {
        let rs = RootSystemDesc {
            components: vec![
                (RootSeries::A, 1),
                (RootSeries::A, 1),
                (RootSeries::E, 7),
                (RootSeries::E, 7),
            ],
            root_count: 256,
        };
        assert_eq!(rs.to_string(), "A1^2 E7^2");
    }
}
