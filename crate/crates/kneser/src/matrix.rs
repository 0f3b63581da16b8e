//! Exact dense linear algebra over the integers and rationals.
//!
//! Everything in this crate that touches a Gram matrix goes through the two
//! matrix types here: [`Mat`] (arbitrary-precision rationals) and [`IMat`]
//! (arbitrary-precision integers). The integer type carries the normal-form
//! algorithms (Hermite, Smith), the rational type the solver, inverse and
//! the LDL-based positive-definiteness test. Sizes are desk scale (rank at
//! most 25), so all algorithms are the simple textbook ones with exact
//! arithmetic and no fraction-free tricks beyond what correctness needs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Rational from an integer literal.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Rational from a numerator/denominator pair.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Dense matrix of exact rationals, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    nrows: usize,
    ncols: usize,
    data: Vec<Rat>,
}

impl std::fmt::Debug for Mat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            let row: Vec<String> = (0..self.ncols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.ncols + j]
    }
}

impl Mat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Mat { nrows, ncols, data: vec![Rat::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Mat { nrows, ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut m = Mat::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rat]> {
        (0..self.nrows).map(|i| self.row(i))
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let mut out = Mat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let t = a * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    /// Matrix times column vector.
    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.ncols, v.len());
        (0..self.nrows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.nrows, v.len());
        (0..self.ncols)
            .map(|j| (0..self.nrows).map(|i| &v[i] * &self[(i, j)]).sum())
            .collect()
    }

    pub fn scale(&self, c: &Rat) -> Mat {
        Mat { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.nrows == self.ncols
            && (0..self.nrows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn block_diag(blocks: &[&Mat]) -> Mat {
        let n: usize = blocks.iter().map(|b| b.nrows).sum();
        let m: usize = blocks.iter().map(|b| b.ncols).sum();
        let mut out = Mat::zeros(n, m);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.nrows {
                for j in 0..b.ncols {
                    out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                }
            }
            r0 += b.nrows;
            c0 += b.ncols;
        }
        out
    }

    /// Determinant by exact Gaussian elimination with partial pivoting.
    pub fn det(&self) -> Rat {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        if n == 0 {
            return Rat::one();
        }
        let mut a = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[(r, col)].is_zero());
            let Some(p) = pivot else { return Rat::zero() };
            if p != col {
                for j in 0..n {
                    let t = a[(p, j)].clone();
                    a[(p, j)] = a[(col, j)].clone();
                    a[(col, j)] = t;
                }
                det = -det;
            }
            let pv = a[(col, col)].clone();
            det *= &pv;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &pv;
                for j in col..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= t;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| !a[(r, col)].is_zero())?;
            if p != col {
                for j in 0..n {
                    a.data.swap(p * n + j, col * n + j);
                    inv.data.swap(p * n + j, col * n + j);
                }
            }
            let pv = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] /= &pv;
                inv[(col, j)] /= &pv;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(r, j)] -= t;
                    let t = &f * &inv[(col, j)];
                    inv[(r, j)] -= t;
                }
            }
        }
        Some(inv)
    }

    /// All leading principal minors positive, i.e. the symmetric matrix is
    /// positive definite. Uses the exact LDL pivot sequence.
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_symmetric() {
            return false;
        }
        let n = self.nrows;
        let mut a = self.clone();
        for k in 0..n {
            if !a[(k, k)].is_positive() {
                return false;
            }
            let pv = a[(k, k)].clone();
            for i in k + 1..n {
                let f = &a[(i, k)] / &pv;
                for j in k + 1..n {
                    let t = &f * &a[(k, j)];
                    a[(i, j)] -= t;
                }
            }
        }
        true
    }

    /// Least common multiple of all entry denominators.
    pub fn denom_lcm(&self) -> Int {
        let mut l = Int::one();
        for x in &self.data {
            l = num_integer::lcm(l, x.denom().clone());
        }
        l
    }

    /// Exact integer matrix when every entry is integral.
    pub fn to_integer(&self) -> Option<IMat> {
        let mut data = Vec::with_capacity(self.data.len());
        for x in &self.data {
            if !x.is_integer() {
                return None;
            }
            data.push(x.to_integer());
        }
        Some(IMat { nrows: self.nrows, ncols: self.ncols, data })
    }

    pub fn map<F: FnMut(&Rat) -> Rat>(&self, mut f: F) -> Mat {
        Mat { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|x| f(x)).collect() }
    }
}

/// Dense matrix of exact integers, row major.
#[derive(Clone, PartialEq, Eq)]
pub struct IMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Int>,
}

impl std::fmt::Debug for IMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IMat {}x{} [", self.nrows, self.ncols)?;
        for i in 0..self.nrows {
            let row: Vec<String> = (0..self.ncols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = Int;
    fn index(&self, (i, j): (usize, usize)) -> &Int {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Int {
        &mut self.data[i * self.ncols + j]
    }
}

impl IMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IMat { nrows, ncols, data: vec![Int::zero(); nrows * ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Int::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Int>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        IMat { nrows, ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        IMat::from_rows(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn to_rat(&self) -> Mat {
        Mat {
            nrows: self.nrows,
            ncols: self.ncols,
            data: self.data.iter().map(|x| Rat::from_integer(x.clone())).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }

    /// row(a) += c * row(b)
    pub fn add_row_multiple(&mut self, a: usize, b: usize, c: &Int) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.ncols {
            let t = c * &self[(b, j)];
            self[(a, j)] += t;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.ncols {
            let t = -self[(a, j)].clone();
            self[(a, j)] = t;
        }
    }

    /// Row-style Hermite normal form. Returns `(h, u)` with `u * self = h`,
    /// `u` unimodular, `h` upper echelon with positive pivots and entries
    /// above each pivot reduced into `[0, pivot)`. Zero rows of `h` sit at
    /// the bottom.
    pub fn hnf_with_transform(&self) -> (IMat, IMat) {
        let mut h = self.clone();
        let mut u = IMat::identity(self.nrows);
        let (m, n) = (self.nrows, self.ncols);
        let mut pivot_row = 0;
        for col in 0..n {
            if pivot_row == m {
                break;
            }
            // Clear the column below pivot_row by gcd elimination.
            loop {
                let mut best: Option<usize> = None;
                for r in pivot_row..m {
                    if !h[(r, col)].is_zero() {
                        let better = match best {
                            None => true,
                            Some(b) => h[(r, col)].abs() < h[(b, col)].abs(),
                        };
                        if better {
                            best = Some(r);
                        }
                    }
                }
                let Some(b) = best else { break };
                h.swap_rows(pivot_row, b);
                u.swap_rows(pivot_row, b);
                if h[(pivot_row, col)].is_negative() {
                    h.negate_row(pivot_row);
                    u.negate_row(pivot_row);
                }
                let pv = h[(pivot_row, col)].clone();
                let mut done = true;
                for r in pivot_row + 1..m {
                    if !h[(r, col)].is_zero() {
                        let q = num_integer::Integer::div_floor(&h[(r, col)], &pv);
                        h.add_row_multiple(r, pivot_row, &(-&q));
                        u.add_row_multiple(r, pivot_row, &(-q));
                        if !h[(r, col)].is_zero() {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if !h[(pivot_row, col)].is_zero() {
                // Reduce the entries above the pivot.
                let pv = h[(pivot_row, col)].clone();
                for r in 0..pivot_row {
                    let q = num_integer::Integer::div_floor(&h[(r, col)], &pv);
                    if !q.is_zero() {
                        h.add_row_multiple(r, pivot_row, &(-&q));
                        u.add_row_multiple(r, pivot_row, &(-q));
                    }
                }
                pivot_row += 1;
            }
        }
        (h, u)
    }

    /// Hermite normal form with zero rows dropped (a basis of the row span).
    pub fn hnf_basis(&self) -> IMat {
        let (h, _) = self.hnf_with_transform();
        let rows: Vec<Vec<Int>> = h
            .data
            .chunks(h.ncols.max(1))
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| r.to_vec())
            .collect();
        if rows.is_empty() {
            IMat::zeros(0, self.ncols)
        } else {
            IMat::from_rows(rows)
        }
    }

    pub fn rank(&self) -> usize {
        self.hnf_basis().nrows
    }

    /// Basis for the left kernel `{ x : x * self = 0 }`. The rows returned
    /// span a saturated sublattice (direct summand) of Z^nrows.
    pub fn left_kernel(&self) -> IMat {
        let (h, u) = self.hnf_with_transform();
        let mut rows = Vec::new();
        for i in 0..h.nrows {
            if h.row(i).iter().all(|x| x.is_zero()) {
                rows.push(u.row(i).to_vec());
            }
        }
        if rows.is_empty() {
            IMat::zeros(0, self.nrows)
        } else {
            IMat::from_rows(rows)
        }
    }

    /// Smith normal form. Returns `(d, u, v)` with `u * self * v = diag(d)`,
    /// `u`, `v` unimodular and `d[0] | d[1] | ...` nonnegative.
    pub fn snf_with_transforms(&self) -> (Vec<Int>, IMat, IMat) {
        let mut a = self.clone();
        let mut u = IMat::identity(self.nrows);
        let mut v = IMat::identity(self.ncols);
        let (m, n) = (self.nrows, self.ncols);
        let k = m.min(n);

        // Column operation helpers work on the transpose picture: applying a
        // column op to `a` multiplies `v` on the right by the same op.
        fn swap_cols(a: &mut IMat, x: usize, y: usize) {
            if x == y {
                return;
            }
            for i in 0..a.nrows {
                a.data.swap(i * a.ncols + x, i * a.ncols + y);
            }
        }
        fn add_col_multiple(a: &mut IMat, x: usize, y: usize, c: &Int) {
            if c.is_zero() {
                return;
            }
            for i in 0..a.nrows {
                let t = c * &a[(i, y)];
                a[(i, x)] += t;
            }
        }
        fn negate_col(a: &mut IMat, x: usize) {
            for i in 0..a.nrows {
                let t = -a[(i, x)].clone();
                a[(i, x)] = t;
            }
        }

        for t in 0..k {
            // Move a nonzero entry of minimal absolute value to (t, t).
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..m {
                    for j in t..n {
                        if !a[(i, j)].is_zero() {
                            let better = match best {
                                None => true,
                                Some(b) => a[(i, j)].abs() < a[b].abs(),
                            };
                            if better {
                                best = Some((i, j));
                            }
                        }
                    }
                }
                let Some((bi, bj)) = best else { break };
                a.swap_rows(t, bi);
                u.swap_rows(t, bi);
                swap_cols(&mut a, t, bj);
                swap_cols(&mut v, t, bj);
                if a[(t, t)].is_negative() {
                    a.negate_row(t);
                    u.negate_row(t);
                }
                let pv = a[(t, t)].clone();
                let mut clean = true;
                for i in t + 1..m {
                    if !a[(i, t)].is_zero() {
                        let q = num_integer::Integer::div_floor(&a[(i, t)], &pv);
                        a.add_row_multiple(i, t, &(-&q));
                        u.add_row_multiple(i, t, &(-q));
                        if !a[(i, t)].is_zero() {
                            clean = false;
                        }
                    }
                }
                for j in t + 1..n {
                    if !a[(t, j)].is_zero() {
                        let q = num_integer::Integer::div_floor(&a[(t, j)], &pv);
                        add_col_multiple(&mut a, j, t, &(-&q));
                        add_col_multiple(&mut v, j, t, &(-q));
                        if !a[(t, j)].is_zero() {
                            clean = false;
                        }
                    }
                }
                if clean {
                    break;
                }
            }
        }

        // Fix the divisibility chain d[t] | d[t+1].
        loop {
            let mut fixed = true;
            for t in 0..k.saturating_sub(1) {
                let (dt, dn) = (a[(t, t)].clone(), a[(t + 1, t + 1)].clone());
                if dt.is_zero() || dn.is_zero() {
                    continue;
                }
                if !num_integer::Integer::is_multiple_of(&dn, &dt) {
                    fixed = false;
                    // Standard trick: add column t+1 to column t, then re-reduce
                    // the leading 2x2 block with row/column gcd steps.
                    add_col_multiple(&mut a, t, t + 1, &Int::one());
                    add_col_multiple(&mut v, t, t + 1, &Int::one());
                    loop {
                        if a[(t + 1, t)].is_zero() && a[(t, t + 1)].is_zero() {
                            break;
                        }
                        if !a[(t + 1, t)].is_zero() {
                            if a[(t + 1, t)].abs() < a[(t, t)].abs() || a[(t, t)].is_zero() {
                                a.swap_rows(t, t + 1);
                                u.swap_rows(t, t + 1);
                            }
                            if a[(t, t)].is_negative() {
                                a.negate_row(t);
                                u.negate_row(t);
                            }
                            let q = num_integer::Integer::div_floor(&a[(t + 1, t)], &a[(t, t)]);
                            a.add_row_multiple(t + 1, t, &(-&q));
                            u.add_row_multiple(t + 1, t, &(-q));
                        }
                        if !a[(t, t + 1)].is_zero() {
                            if a[(t, t + 1)].abs() < a[(t, t)].abs() || a[(t, t)].is_zero() {
                                swap_cols(&mut a, t, t + 1);
                                swap_cols(&mut v, t, t + 1);
                            }
                            if a[(t, t)].is_negative() {
                                negate_col(&mut a, t);
                                negate_col(&mut v, t);
                            }
                            let q = num_integer::Integer::div_floor(&a[(t, t + 1)], &a[(t, t)]);
                            add_col_multiple(&mut a, t + 1, t, &(-&q));
                            add_col_multiple(&mut v, t + 1, t, &(-q));
                        }
                    }
                }
            }
            if fixed {
                break;
            }
        }
        let mut d = Vec::with_capacity(k);
        for t in 0..k {
            if a[(t, t)].is_negative() {
                a.negate_row(t);
                u.negate_row(t);
            }
            d.push(a[(t, t)].clone());
        }
        (d, u, v)
    }

    pub fn transpose(&self) -> IMat {
        let mut out = IMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = IMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }
}

/// Exact LLL reduction driven by the Gram matrix alone (delta = 3/4).
///
/// Returns `(u, g')` with `g' = u * g * u^T` the Gram matrix of the reduced
/// basis and `u` unimodular.
pub fn lll_gram(g: &Mat) -> (IMat, Mat) {
    let n = g.nrows();
    assert!(g.is_symmetric());
    let mut gram = g.clone();
    let mut u = IMat::identity(n);
    if n <= 1 {
        return (u, gram);
    }

    // Gram-Schmidt data recomputed from scratch; mu[i][j] for j < i, bstar[i]
    // the squared lengths of the orthogonalised vectors.
    let compute_gs = |gram: &Mat| -> (Vec<Vec<Rat>>, Vec<Rat>) {
        let n = gram.nrows();
        let mut mu = vec![vec![Rat::zero(); n]; n];
        let mut bstar = vec![Rat::zero(); n];
        for i in 0..n {
            // <b_i, b*_j> = <b_i, b_j> - sum_{k<j} mu[j][k] <b_i, b*_k>
            let mut inner_star = vec![Rat::zero(); i + 1];
            for j in 0..=i {
                let mut v = gram[(i, j)].clone();
                for k in 0..j {
                    let t = &mu[j][k] * &inner_star[k];
                    v -= t;
                }
                inner_star[j] = v;
            }
            for j in 0..i {
                mu[i][j] = if bstar[j].is_zero() {
                    Rat::zero()
                } else {
                    &inner_star[j] / &bstar[j]
                };
            }
            bstar[i] = inner_star[i].clone();
        }
        (mu, bstar)
    };

    // Apply a unimodular row op to both the transform and the Gram matrix.
    fn gram_add_multiple(gram: &mut Mat, a: usize, b: usize, c: &Rat) {
        let n = gram.nrows();
        for j in 0..n {
            let t = c * &gram[(b, j)];
            gram[(a, j)] += t;
        }
        for i in 0..n {
            let t = c * &gram[(i, b)];
            gram[(i, a)] += t;
        }
    }
    fn gram_swap(gram: &mut Mat, a: usize, b: usize) {
        let n = gram.nrows();
        for j in 0..n {
            let (x, y) = (gram[(a, j)].clone(), gram[(b, j)].clone());
            gram[(a, j)] = y;
            gram[(b, j)] = x;
        }
        for i in 0..n {
            let (x, y) = (gram[(i, a)].clone(), gram[(i, b)].clone());
            gram[(i, a)] = y;
            gram[(i, b)] = x;
        }
    }

    let delta = ratio(3, 4);
    let (mut mu, mut bstar) = compute_gs(&gram);
    let mut k = 1usize;
    while k < n {
        // Size-reduce b_k against b_{k-1} ... b_0.
        for j in (0..k).rev() {
            let q = (&mu[k][j] + ratio(1, 2)).floor();
            if !q.is_zero() {
                let c = -q;
                gram_add_multiple(&mut gram, k, j, &c);
                let ci = c.to_integer();
                u.add_row_multiple(k, j, &ci);
                let (m2, b2) = compute_gs(&gram);
                mu = m2;
                bstar = b2;
            }
        }
        // Lovasz condition.
        let lhs = &bstar[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bstar[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            gram_swap(&mut gram, k, k - 1);
            u.swap_rows(k, k - 1);
            let (m2, b2) = compute_gs(&gram);
            mu = m2;
            bstar = b2;
            k = k.max(2) - 1;
            if k == 0 {
                k = 1;
            }
        }
    }
    (u, gram)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_recovers_span() {
        let a = IMat::from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let (h, u) = a.hnf_with_transform();
        assert_eq!(u.mul(&a), h);
        // Unimodularity of the transform.
        let du = u.to_rat().det();
        assert!(du == rat(1) || du == rat(-1));
    }

    #[test]
    fn snf_divisibility_and_transforms() {
        let a = IMat::from_i64(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let (d, u, v) = a.snf_with_transforms();
        let prod = u.mul(&a).mul(&v);
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    assert_eq!(prod[(i, j)], d[i]);
                } else {
                    assert!(prod[(i, j)].is_zero());
                }
            }
        }
        for i in 0..d.len() - 1 {
            if !d[i].is_zero() {
                assert!(num_integer::Integer::is_multiple_of(&d[i + 1], &d[i]));
            }
        }
        // Known: SNF of this matrix is (2, 6, 12) up to the actual values;
        // verify against the determinant instead of hardcoding.
        let detd: Int = d.iter().product();
        assert_eq!(detd, a.to_rat().det().to_integer().abs());
    }

    #[test]
    fn kernel_is_left_annihilator() {
        let a = IMat::from_i64(&[vec![1, 2], vec![2, 4], vec![3, 6]]);
        let k = a.left_kernel();
        assert_eq!(k.nrows(), 2);
        let z = k.mul(&a);
        assert!(z.data.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn lll_preserves_determinant() {
        let g = Mat::from_i64(&[&[10, 3, 2], &[3, 5, 1], &[2, 1, 4]]);
        let (u, g2) = lll_gram(&g);
        assert_eq!(g2.det(), g.det());
        let ug = u.to_rat().mul(&g).mul(&u.to_rat().transpose());
        assert_eq!(ug, g2);
        // Reduced diagonal should not exceed the original one here.
        assert!(g2[(0, 0)] <= g[(0, 0)]);
    }

    #[test]
    fn posdef_detects_signature() {
        let g = Mat::from_i64(&[&[2, -1], &[-1, 2]]);
        assert!(g.is_positive_definite());
        let h = Mat::from_i64(&[&[1, 2], &[2, 1]]);
        assert!(!h.is_positive_definite());
    }
}

