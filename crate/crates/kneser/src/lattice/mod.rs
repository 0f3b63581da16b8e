//! Positive-definite lattices with exact rational Gram matrices.
//!
//! A lattice is stored purely through the Gram matrix of a chosen basis;
//! vectors are rational coordinate columns in that basis. Integral coordinates
//! are the lattice points themselves, rational ones denote points of L tensor Q
//! (dual vectors, coset representatives, glue vectors). There is no ambient
//! embedding anywhere: all arithmetic is exact and dimension independent.
//!
//! Conventions used throughout the crate:
//! * coordinate vectors are columns; an isometry `U: L1 -> L2` maps
//!   coordinates by `x -> U x` and satisfies `U^T G2 U = G1` exactly;
//! * sublattices are returned together with their basis written row-wise in
//!   the coordinates of the parent lattice.

mod enumerate;
mod isometry;
mod leech;
mod roots;

pub use enumerate::{coset_norm_counts, coset_short_vectors, short_vectors};
pub use isometry::{automorphism_generators, fingerprint, is_isometric, Fingerprint};
pub use leech::{leech_lattice, LeechModel};
pub use roots::{reflection, root_system, RootSeries, RootSystemDesc};

use crate::matrix::{rat, IMat, Int, Mat, Rat};
use num_traits::{One, Zero};

#[derive(Debug, thiserror::Error)]
pub enum LatticeError {
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid series/rank combination: {0}{1}")]
    InvalidSeries(char, usize),
    #[error("lattice is not integral")]
    NotIntegral,
    #[error("lattice is not odd")]
    NotOdd,
    #[error("lattice is not even")]
    NotEven,
    #[error("glue vector does not lie in the dual lattice")]
    GlueNotDual,
    #[error("glue vectors generate a non-integral extension")]
    GlueNotIntegral,
    #[error("extension is not even")]
    ExtensionNotEven,
    #[error("matrix is not an isometry of the lattice")]
    NotAnIsometry,
    #[error("squared-length-2 vectors do not form an ADE configuration")]
    NonAdeRoots,
}

/// A positive-definite lattice given by the Gram matrix of a basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Lattice {
    gram: Mat,
    name: Option<String>,
}

impl std::fmt::Debug for Lattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Lattice(rank {}, det {}", self.rank(), self.det())?;
        if let Some(n) = &self.name {
            write!(f, ", {n}")?;
        }
        write!(f, ")")
    }
}

/// Rational coordinate vector relative to a lattice basis.
pub type LatticeVector = Vec<Rat>;

impl Lattice {
    /// Validates symmetry and positive definiteness before accepting the Gram
    /// matrix. Rank 0 is allowed (the zero lattice).
    pub fn new(gram: Mat) -> Result<Self, LatticeError> {
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        if gram.nrows() > 0 && !gram.is_positive_definite() {
            return Err(LatticeError::NotPositiveDefinite);
        }
        Ok(Lattice { gram, name: None })
    }

    pub fn named(gram: Mat, name: &str) -> Result<Self, LatticeError> {
        let mut l = Lattice::new(gram)?;
        l.name = Some(name.to_string());
        Ok(l)
    }

    pub fn zero() -> Self {
        Lattice { gram: Mat::zeros(0, 0), name: Some("0".into()) }
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn det(&self) -> Rat {
        self.gram.det()
    }

    pub fn is_integral(&self) -> bool {
        self.gram.to_integer().is_some()
    }

    /// Even: integral with all diagonal entries even.
    pub fn is_even(&self) -> bool {
        match self.gram.to_integer() {
            None => false,
            Some(gi) => (0..self.rank()).all(|i| num_integer::Integer::is_even(&gi[(i, i)])),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.is_integral() && !self.is_even()
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_integral() && self.det() == rat(1)
    }

    /// Inner product of two coordinate vectors.
    pub fn inner(&self, x: &[Rat], y: &[Rat]) -> Rat {
        let gx = self.gram.mul_vec(y);
        x.iter().zip(&gx).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, x: &[Rat]) -> Rat {
        self.inner(x, x)
    }

    /// Membership in the lattice itself (integral coordinates).
    pub fn contains(&self, x: &[Rat]) -> bool {
        x.iter().all(|c| c.is_integer())
    }

    /// Membership in the dual lattice.
    pub fn dual_contains(&self, x: &[Rat]) -> bool {
        self.gram.mul_vec(x).iter().all(|c| c.is_integer())
    }
}

/// An isometry between lattices: `U^T G_target U = G_source`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Isometry {
    pub matrix: Mat,
}

impl Isometry {
    pub fn identity(n: usize) -> Self {
        Isometry { matrix: Mat::identity(n) }
    }

    pub fn verify(&self, source: &Lattice, target: &Lattice) -> bool {
        if self.matrix.nrows() != target.rank() || self.matrix.ncols() != source.rank() {
            return false;
        }
        let lhs = self.matrix.transpose().mul(target.gram()).mul(&self.matrix);
        lhs == *source.gram()
    }

    pub fn apply(&self, x: &[Rat]) -> Vec<Rat> {
        self.matrix.mul_vec(x)
    }

    pub fn compose(&self, inner: &Isometry) -> Isometry {
        Isometry { matrix: self.matrix.mul(&inner.matrix) }
    }

    pub fn inverse(&self) -> Option<Isometry> {
        self.matrix.inverse().map(|m| Isometry { matrix: m })
    }
}

/// Generating set for a subgroup of the automorphism group of one lattice.
#[derive(Clone, Debug, Default)]
pub struct GeneratorSet {
    pub gens: Vec<Isometry>,
}

impl GeneratorSet {
    pub fn new(gens: Vec<Isometry>) -> Self {
        GeneratorSet { gens }
    }

    pub fn verify(&self, l: &Lattice) -> bool {
        self.gens.iter().all(|g| g.verify(l, l))
    }
}

/// A sublattice together with its basis in parent coordinates (rows).
#[derive(Clone, Debug)]
pub struct Sublattice {
    pub lattice: Lattice,
    pub basis_in_parent: Mat,
}

impl Sublattice {
    /// Coordinates in the parent of a vector given in sublattice coordinates.
    pub fn to_parent(&self, x: &[Rat]) -> Vec<Rat> {
        self.basis_in_parent.vec_mul(x)
    }

    /// Sublattice coordinates of a parent vector lying in the rational span.
    pub fn from_parent(&self, x: &[Rat]) -> Option<Vec<Rat>> {
        // Solve c * basis = x; with full-rank basis rows this is a square or
        // overdetermined exact solve via the Gram trick:
        // c = x G B^T (B G B^T)^{-1}  where B = basis_in_parent rows.
        // Only valid when x lies in the rational row span; verify after.
        let b = &self.basis_in_parent;
        if b.nrows() == 0 {
            return if x.iter().all(|v| v.is_zero()) { Some(vec![]) } else { None };
        }
        let bt = b.transpose();
        let bbt = b.mul(&bt);
        let inv = bbt.inverse()?;
        // row vector x * B^T, then * inv
        let xbt: Vec<Rat> = (0..b.nrows())
            .map(|i| b.row(i).iter().zip(x).map(|(a, c)| a * c).sum())
            .collect();
        let c = inv.vec_mul(&xbt);
        let back = b.vec_mul(&c);
        if back == x.to_vec() {
            Some(c)
        } else {
            None
        }
    }
}

/// Standard lattices: root lattices A, D, E and the odd unimodular Z^n.
pub fn make_lattice(kind: char, rank: usize) -> Result<Lattice, LatticeError> {
    let gram = match (kind, rank) {
        ('Z', n) if n >= 1 => Mat::identity(n),
        ('A', n) if n >= 1 => Mat::from_fn(n, n, |i, j| {
            if i == j {
                rat(2)
            } else if i.abs_diff(j) == 1 {
                rat(-1)
            } else {
                rat(0)
            }
        }),
        ('D', n) if n >= 2 => Mat::from_fn(n, n, |i, j| {
            // Basis e1-e2, ..., e_{n-1}-e_n, e_{n-1}+e_n.
            if i == j {
                rat(2)
            } else {
                let (a, b) = (i.min(j), i.max(j));
                if b == n - 1 {
                    if a == n - 3 {
                        rat(-1)
                    } else {
                        rat(0)
                    }
                } else if b - a == 1 {
                    rat(-1)
                } else {
                    rat(0)
                }
            }
        }),
        ('E', n @ 6..=8) => {
            // Bourbaki numbering: chain 1-3-4-5-...-n with node 2 attached to 4.
            let mut edges: Vec<(usize, usize)> = vec![(1, 3), (2, 4)];
            for v in 3..n {
                edges.push((v, v + 1));
            }
            Mat::from_fn(n, n, |i, j| {
                if i == j {
                    rat(2)
                } else {
                    let e = (i + 1).min(j + 1);
                    let f = (i + 1).max(j + 1);
                    if edges.contains(&(e, f)) {
                        rat(-1)
                    } else {
                        rat(0)
                    }
                }
            })
        }
        (k, n) => return Err(LatticeError::InvalidSeries(k, n)),
    };
    let name = format!("{kind}{rank}");
    Lattice::named(gram, &name)
}

/// Same lattice with the bilinear form scaled by a positive integer.
pub fn rescale(l: &Lattice, m: u64) -> Lattice {
    let gram = l.gram.scale(&rat(m as i64));
    let name = l.name.as_ref().map(|n| format!("{n}({m})"));
    let mut out = Lattice::new(gram).expect("rescaling preserves definiteness");
    out.name = name;
    out
}

/// Orthogonal direct sum.
pub fn direct_sum(l1: &Lattice, l2: &Lattice) -> Lattice {
    let gram = Mat::block_diag(&[&l1.gram, &l2.gram]);
    let name = match (&l1.name, &l2.name) {
        (Some(a), Some(b)) => Some(format!("{a}+{b}")),
        _ => None,
    };
    let mut out = Lattice::new(gram).expect("block sum of definite forms is definite");
    out.name = name;
    out
}

pub fn direct_sum_all(ls: &[&Lattice]) -> Lattice {
    let grams: Vec<&Mat> = ls.iter().map(|l| &l.gram).collect();
    Lattice::new(Mat::block_diag(&grams)).expect("definite")
}

/// Dual lattice and the dual basis written in the source basis (rows).
pub fn dual_lattice(l: &Lattice) -> (Lattice, Mat) {
    if l.rank() == 0 {
        return (Lattice::zero(), Mat::zeros(0, 0));
    }
    let ginv = l.gram.inverse().expect("nondegenerate");
    let lat = Lattice::new(ginv.clone()).expect("inverse of definite is definite");
    (lat, ginv)
}

/// Even sublattice of an odd integral lattice, together with a vector
/// `h` in `L` but outside the even part (so `<h,h>/2` is in `1/2 + Z`).
pub fn even_sublattice(l: &Lattice) -> Result<(Sublattice, LatticeVector), LatticeError> {
    let gi = l.gram.to_integer().ok_or(LatticeError::NotIntegral)?;
    let n = l.rank();
    let odd: Vec<usize> =
        (0..n).filter(|&i| num_integer::Integer::is_odd(&gi[(i, i)])).collect();
    if odd.is_empty() {
        return Err(LatticeError::NotOdd);
    }
    // Kernel basis of the parity functional x -> sum_i G_ii x_i mod 2.
    let p = odd[0];
    let mut rows: Vec<Vec<Int>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = vec![Int::zero(); n];
        if i == p {
            r[p] = Int::from(2);
        } else {
            r[i] = Int::one();
            if odd.contains(&i) {
                r[p] = -Int::one();
            }
        }
        rows.push(r);
    }
    let basis = IMat::from_rows(rows).hnf_basis();
    let sub = sublattice_from_rows(l, &basis.to_rat());
    let mut h = vec![Rat::zero(); n];
    h[p] = Rat::one();
    Ok((sub, h))
}

fn sublattice_from_rows(parent: &Lattice, rows: &Mat) -> Sublattice {
    let gram = rows.mul(parent.gram()).mul(&rows.transpose());
    Sublattice {
        lattice: Lattice::new(gram).expect("restriction of definite form"),
        basis_in_parent: rows.clone(),
    }
}

/// Index-finite extension of `l` by glue vectors from the dual lattice.
/// Returns the extension with its basis expressed in `l` coordinates.
pub fn glue_extension(
    l: &Lattice,
    glue: &[LatticeVector],
    require_even: bool,
) -> Result<Sublattice, LatticeError> {
    let n = l.rank();
    for g in glue {
        if !l.dual_contains(g) {
            return Err(LatticeError::GlueNotDual);
        }
    }
    // Integrality of the extension: all pairwise inner products integral.
    for (i, g) in glue.iter().enumerate() {
        for h in &glue[i..] {
            if !l.inner(g, h).is_integer() {
                return Err(LatticeError::GlueNotIntegral);
            }
        }
    }
    if require_even {
        for g in glue {
            if !(l.norm(g) / rat(2)).is_integer() {
                return Err(LatticeError::ExtensionNotEven);
            }
        }
    }
    // Hermite reduction of the generator stack [I; glue], scaled integral.
    let mut rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    rows.extend(glue.iter().cloned());
    let stack = Mat::from_rows(rows);
    let d = stack.denom_lcm();
    let scaled = stack.scale(&Rat::from_integer(d.clone())).to_integer().expect("scaled integral");
    let hnf = scaled.hnf_basis();
    debug_assert_eq!(hnf.nrows(), n, "glue extension keeps full rank");
    let basis = hnf.to_rat().scale(&Rat::new(Int::one(), d));
    Ok(sublattice_from_rows(l, &basis))
}

/// Splits off the sublattice spanned by the squared-length-1 vectors.
/// Returns the number of sign pairs `l` and the orthogonal complement
/// ("stump"); the input is isometric to `Z^l + stump`.
pub fn split_unit_vectors(l: &Lattice) -> (usize, Sublattice) {
    let units = short_vectors(l, &rat(1));
    let units: Vec<LatticeVector> =
        units.into_iter().filter(|v| l.norm(v) == rat(1)).collect();
    let count = units.len();
    if count == 0 {
        return (
            0,
            Sublattice { lattice: l.clone(), basis_in_parent: Mat::identity(l.rank()) },
        );
    }
    // Stump = integer kernel of x -> (<x, u_i>)_i, i.e. left kernel of G U^T.
    let umat = Mat::from_rows(units);
    let gu = Mat::from_rows(
        (0..l.rank()).map(|i| {
            let e: Vec<Rat> =
                (0..l.rank()).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect();
            let ge = l.gram.mul_vec(&e);
            (0..umat.nrows()).map(|k| umat.row(k).iter().zip(&ge).map(|(a, b)| a * b).sum()).collect()
        })
        .collect(),
    );
    let d = gu.denom_lcm();
    let gui = gu.scale(&Rat::from_integer(d)).to_integer().expect("scaled integral");
    let kernel = gui.left_kernel();
    (count, sublattice_from_rows(l, &kernel.to_rat()))
}

/// The sublattice `{ x in L : <x, h> integral }` for `h` in `L tensor Q`.
pub fn fixed_sublattice_vector(l: &Lattice, h: &[Rat]) -> Sublattice {
    let n = l.rank();
    let w = l.gram.mul_vec(h);
    let mut d = Int::one();
    for c in &w {
        d = num_integer::lcm(d, c.denom().clone());
    }
    if d.is_one() {
        return Sublattice { lattice: l.clone(), basis_in_parent: Mat::identity(n) };
    }
    // Kernel of z -> (d*w) . z mod d: left kernel of the column [d*w | d] with
    // the auxiliary coordinate projected away.
    let mut rows: Vec<Vec<Int>> = Vec::with_capacity(n + 1);
    for c in &w {
        let s = (c * Rat::from_integer(d.clone())).to_integer();
        rows.push(vec![s]);
    }
    rows.push(vec![d.clone()]);
    let a = IMat::from_rows(rows);
    let k = a.left_kernel();
    // Drop the auxiliary last coordinate; the projection keeps rank n.
    let basis_rows: Vec<Vec<Rat>> = (0..k.nrows())
        .map(|i| (0..n).map(|j| Rat::from_integer(k[(i, j)].clone())).collect())
        .collect();
    let basis = IMat::from_rows(
        basis_rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect(),
    )
    .hnf_basis();
    debug_assert_eq!(basis.nrows(), n);
    sublattice_from_rows(l, &basis.to_rat())
}

/// Fixed lattice and coinvariant (orthogonal complement of the fixed part)
/// of an isometry of `l`.
pub fn fixed_and_coinvariant(
    l: &Lattice,
    nu: &Isometry,
) -> Result<(Sublattice, Sublattice), LatticeError> {
    if !nu.verify(l, l) {
        return Err(LatticeError::NotAnIsometry);
    }
    let n = l.rank();
    let u = nu.matrix.to_integer().ok_or(LatticeError::NotAnIsometry)?;
    // Fixed vectors: x with U x = x, i.e. rows x of the left kernel of (U - I)^T.
    let mut umi = u.clone();
    for i in 0..n {
        umi[(i, i)] -= Int::one();
    }
    let fix = umi.transpose().left_kernel();
    let fix_sub = sublattice_from_rows(l, &fix.to_rat());
    // Coinvariant: { x : <x, f> = 0 for all fixed f } = left kernel of G F^T.
    let gft = l.gram.mul(&fix.to_rat().transpose());
    let d = gft.denom_lcm();
    let gfti = gft.scale(&Rat::from_integer(d)).to_integer().expect("scaled integral");
    let coin = gfti.left_kernel();
    let coin_sub = sublattice_from_rows(l, &coin.to_rat());
    debug_assert_eq!(fix_sub.lattice.rank() + coin_sub.lattice.rank(), n);
    Ok((fix_sub, coin_sub))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ratio;

    #[test]
    fn standard_gram_determinants() {
        assert_eq!(make_lattice('Z', 1).unwrap().gram()[(0, 0)], rat(1));
        assert_eq!(make_lattice('A', 2).unwrap().det(), rat(3));
        assert_eq!(make_lattice('A', 15).unwrap().det(), rat(16));
        assert_eq!(make_lattice('D', 8).unwrap().det(), rat(4));
        assert_eq!(make_lattice('E', 6).unwrap().det(), rat(3));
        assert_eq!(make_lattice('E', 7).unwrap().det(), rat(2));
        assert_eq!(make_lattice('E', 8).unwrap().det(), rat(1));
        assert!(make_lattice('E', 9).is_err());
        assert!(make_lattice('A', 0).is_err());
        for k in ['A', 'D', 'E'] {
            let n = if k == 'E' { 8 } else { 4 };
            assert!(make_lattice(k, n).unwrap().is_even());
        }
        assert!(make_lattice('Z', 3).unwrap().is_odd());
    }

    #[test]
    fn rescale_and_determinant_identity() {
        let a1 = make_lattice('A', 1).unwrap();
        let s = rescale(&a1, 2);
        assert_eq!(s.gram()[(0, 0)], rat(4));
        let z2 = make_lattice('Z', 2).unwrap();
        assert_eq!(rescale(&z2, 3).gram()[(0, 0)], rat(3));
        // det(rescale(L, m)) = m^rk * det(L) on a 3x3 example.
        let g = Mat::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let l = Lattice::new(g).unwrap();
        let m = 5u64;
        assert_eq!(rescale(&l, m).det(), rat(125) * l.det());
    }

    #[test]
    fn dual_of_a2_and_unimodular_z() {
        let zn = make_lattice('Z', 4).unwrap();
        let (dual, _) = dual_lattice(&zn);
        assert_eq!(dual.gram(), zn.gram());
        let a2 = make_lattice('A', 2).unwrap();
        let (d, change) = dual_lattice(&a2);
        assert_eq!(d.det(), ratio(1, 3));
        // Dual basis vectors pair integrally with the lattice.
        for i in 0..2 {
            let row: Vec<Rat> = change.row(i).to_vec();
            assert!(a2.dual_contains(&row));
        }
        let d8 = make_lattice('D', 8).unwrap();
        assert_eq!(dual_lattice(&d8).0.det(), ratio(1, 4));
    }

    #[test]
    fn even_sublattice_of_z() {
        let z1 = make_lattice('Z', 1).unwrap();
        let (k, h) = even_sublattice(&z1).unwrap();
        assert_eq!(k.lattice.gram()[(0, 0)], rat(4));
        assert_eq!(h, vec![rat(1)]);
        let z4 = make_lattice('Z', 4).unwrap();
        let (k, h) = even_sublattice(&z4).unwrap();
        assert_eq!(k.lattice.det(), rat(4) * z4.det());
        let hn = z4.norm(&h) / rat(2);
        assert!(!hn.is_integer());
        assert!(even_sublattice(&make_lattice('E', 8).unwrap()).is_err());
    }

    #[test]
    fn glue_empty_is_identity() {
        let d8 = make_lattice('D', 8).unwrap();
        let e = glue_extension(&d8, &[], false).unwrap();
        assert_eq!(e.lattice.gram(), d8.gram());
    }

    #[test]
    fn fixed_sublattice_parity() {
        let z2 = make_lattice('Z', 2).unwrap();
        let h = vec![ratio(1, 2), rat(0)];
        let s = fixed_sublattice_vector(&z2, &h);
        assert_eq!(s.lattice.det(), rat(4));
        assert_eq!(s.lattice.gram()[(0, 0)], rat(4));
        assert_eq!(s.lattice.gram()[(1, 1)], rat(1));
        // h in the dual: the whole lattice is fixed.
        let s2 = fixed_sublattice_vector(&z2, &[rat(1), rat(3)]);
        assert_eq!(s2.lattice.gram(), z2.gram());
    }

    #[test]
    fn fixed_and_coinvariant_of_swap() {
        let e8 = make_lattice('E', 8).unwrap();
        let ee = direct_sum(&e8, &e8);
        let mut m = Mat::zeros(16, 16);
        for i in 0..8 {
            m[(i, 8 + i)] = Rat::one();
            m[(8 + i, i)] = Rat::one();
        }
        let swap = Isometry { matrix: m };
        assert!(swap.verify(&ee, &ee));
        let (fix, coin) = fixed_and_coinvariant(&ee, &swap).unwrap();
        assert_eq!(fix.lattice.rank(), 8);
        assert_eq!(coin.lattice.rank(), 8);
        // Diagonal vectors have doubled norms: Gram is 2 * Gram(E8).
        let doubled = e8.gram().scale(&rat(2));
        assert_eq!(fix.lattice.gram(), &doubled);
        let id = Isometry::identity(16);
        let (f, c) = fixed_and_coinvariant(&ee, &id).unwrap();
        assert_eq!(f.lattice.rank(), 16);
        assert_eq!(c.lattice.rank(), 0);
        let neg = Isometry { matrix: Mat::identity(16).scale(&rat(-1)) };
        let (f, c) = fixed_and_coinvariant(&ee, &neg).unwrap();
        assert_eq!(f.lattice.rank(), 0);
        assert_eq!(c.lattice.rank(), 16);
    }
}
