//! Short-vector enumeration over lattice cosets.
//!
//! The search walks the standard Fincke-Pohst tree on an LLL-reduced basis.
//! Floating point is used only to prune (with a safety margin); every vector
//! that is reported has its squared length computed in exact integer
//! arithmetic on a globally rescaled Gram matrix, so the output is exact.
//! The top of the tree is split into branches that are processed by rayon in
//! parallel; results are merged in a fixed order, so the output is identical
//! for any worker count.

use super::{Lattice, LatticeVector};
use crate::matrix::{lll_gram, Int, Mat, Rat};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// All nonzero vectors of squared length at most `max_sqlen`, one
/// representative per sign pair (first nonzero coordinate positive),
/// sorted by squared length then lexicographically by coordinates.
pub fn short_vectors(l: &Lattice, max_sqlen: &Rat) -> Vec<LatticeVector> {
    if l.rank() == 0 || max_sqlen.is_negative() {
        return Vec::new();
    }
    let zero = vec![Rat::zero(); l.rank()];
    let mut all = enumerate_coset(l, &zero, max_sqlen);
    all.retain(|v| v.iter().find(|c| !c.is_zero()).map(|c| c.is_positive()).unwrap_or(false));
    sort_canonical(l, &mut all);
    all
}

/// All vectors `x` in `rep + L` with squared length at most `max_sqlen`,
/// sorted canonically. Contains the zero vector when `rep` is integral.
pub fn coset_short_vectors(l: &Lattice, rep: &[Rat], max_sqlen: &Rat) -> Vec<LatticeVector> {
    if l.rank() == 0 {
        return if !max_sqlen.is_negative() { vec![vec![]] } else { vec![] };
    }
    if max_sqlen.is_negative() {
        return Vec::new();
    }
    let mut all = enumerate_coset(l, rep, max_sqlen);
    sort_canonical(l, &mut all);
    all
}

/// Number of vectors in `rep + L` of each squared length up to `max_sqlen`.
/// This is the theta-series workhorse: no vectors are materialised.
pub fn coset_norm_counts(l: &Lattice, rep: &[Rat], max_sqlen: &Rat) -> BTreeMap<Rat, u64> {
    if l.rank() == 0 {
        let mut m = BTreeMap::new();
        if !max_sqlen.is_negative() {
            m.insert(Rat::zero(), 1);
        }
        return m;
    }
    if max_sqlen.is_negative() {
        return BTreeMap::new();
    }
    let setup = Setup::prepare(l, rep, max_sqlen);
    let counts = setup.run_counts();
    let scale = Rat::from_integer(setup.norm_scale.clone());
    counts.into_iter().map(|(f, c)| (Rat::from_integer(Int::from(f)) / &scale, c)).collect()
}

fn sort_canonical(l: &Lattice, vs: &mut Vec<LatticeVector>) {
    vs.sort_by(|a, b| {
        let na = l.norm(a);
        let nb = l.norm(b);
        na.cmp(&nb).then_with(|| a.cmp(b))
    });
}

fn enumerate_coset(l: &Lattice, rep: &[Rat], max_sqlen: &Rat) -> Vec<LatticeVector> {
    let setup = Setup::prepare(l, rep, max_sqlen);
    let raw = setup.run_collect();
    // Map reduced-basis solutions back to original coordinates: the point
    // rep' + z in reduced coordinates is rep + U^T z in original ones.
    let ut = &setup.u_t;
    let n = l.rank();
    raw.into_iter()
        .map(|z| {
            let mut out = rep.to_vec();
            for (i, item) in out.iter_mut().enumerate() {
                let mut acc = Rat::zero();
                for (j, &zj) in z.iter().enumerate().take(n) {
                    if zj != 0 {
                        acc += &ut[(i, j)] * Rat::from_integer(Int::from(zj));
                    }
                }
                *item += acc;
            }
            out
        })
        .collect()
}

/// Prepared integer/floating data for one enumeration run. All exact values
/// refer to the scaled picture `w = offset + step * z` with integer Gram
/// `gi`, where `w^T gi w = norm_scale * sqlen(rep + z)`.
struct Setup {
    n: usize,
    /// Integer Gram of the reduced lattice, flat row major: `gi = dG * G'`.
    gi: Vec<i64>,
    offset: Vec<i64>,
    step: i64,
    /// Accept exactly the vectors with `w^T gi w <= bound`.
    bound: i64,
    norm_scale: Int,
    /// Fincke-Pohst coefficients of `gi` as a real quadratic form:
    /// `x^T gi x = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2`.
    q: Vec<Vec<f64>>,
    /// Real coset offset per coordinate (x = z + rep_f).
    rep_f: Vec<f64>,
    /// step^2 as f64; the exact form in w is s^2 times the real form in x.
    s2f: f64,
    /// Transform back to original coordinates.
    u_t: Mat,
}

impl Setup {
    fn prepare(l: &Lattice, rep: &[Rat], max_sqlen: &Rat) -> Setup {
        let n = l.rank();
        let (u, g_red) = lll_gram(l.gram());
        let u_t = u.to_rat().transpose();
        let u_t_inv = u_t.inverse().expect("unimodular");
        let rep_red = u_t_inv.mul_vec(rep);

        let dg = g_red.denom_lcm();
        let gi_base = g_red.scale(&Rat::from_integer(dg.clone())).to_integer().expect("integral");
        let mut s = Int::one();
        for c in &rep_red {
            s = num_integer::lcm(s, c.denom().clone());
        }
        let step = s.to_i64().expect("coset denominator fits i64");

        let mut gi = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                gi[i * n + j] = gi_base[(i, j)].to_i64().expect("scaled gram fits i64");
            }
        }
        let offset: Vec<i64> = rep_red
            .iter()
            .map(|c| (c * Rat::from_integer(s.clone())).to_integer().to_i64().expect("offset"))
            .collect();

        let s2 = &s * &s;
        let norm_scale = &dg * &s2;
        let bound_rat = max_sqlen * Rat::from_integer(norm_scale.clone());
        let bound = bound_rat.floor().to_integer().to_i64().expect("bound fits i64");

        let mut q = vec![vec![0f64; n]; n];
        for i in 0..n {
            for j in 0..n {
                q[i][j] = gi[i * n + j] as f64;
            }
        }
        for i in 0..n {
            for k in 0..i {
                let f = q[k][k] * q[k][i];
                for j in i..n {
                    q[i][j] -= f * q[k][j];
                }
            }
            let qi = q[i][i];
            assert!(qi > 0.0, "positive definite");
            for j in i + 1..n {
                q[i][j] /= qi;
            }
        }
        let rep_f: Vec<f64> = rep_red
            .iter()
            .map(|c| c.numer().to_f64().unwrap() / c.denom().to_f64().unwrap())
            .collect();

        let s2f = (step as f64) * (step as f64);
        Setup { n, gi, offset, step, bound, norm_scale, q, rep_f, s2f, u_t }
    }

    fn run_collect(&self) -> Vec<Vec<i64>> {
        let branches = self.branches();
        if branches.len() <= 1 || self.n < 12 {
            let mut out = Vec::new();
            for b in &branches {
                Walker::run(self, b, &mut Sink::Collect(&mut out));
            }
            out
        } else {
            let parts: Vec<Vec<Vec<i64>>> = branches
                .par_iter()
                .map(|b| {
                    let mut out = Vec::new();
                    Walker::run(self, b, &mut Sink::Collect(&mut out));
                    out
                })
                .collect();
            parts.into_iter().flatten().collect()
        }
    }

    fn run_counts(&self) -> BTreeMap<i64, u64> {
        let branches = self.branches();
        if branches.len() <= 1 || self.n < 12 {
            let mut m = BTreeMap::new();
            for b in &branches {
                Walker::run(self, b, &mut Sink::Count(&mut m));
            }
            m
        } else {
            branches
                .par_iter()
                .map(|b| {
                    let mut m = BTreeMap::new();
                    Walker::run(self, b, &mut Sink::Count(&mut m));
                    m
                })
                .reduce(BTreeMap::new, |mut a, b| {
                    for (k, v) in b {
                        *a.entry(k).or_insert(0) += v;
                    }
                    a
                })
        }
    }

    /// Candidate interval for z at `level`, given the remaining f64 radius
    /// and the inner sum of the already assigned coordinates.
    fn range(&self, level: usize, dist: f64, inner: f64) -> (i64, i64) {
        if dist < 0.0 {
            return (1, 0);
        }
        let qii = self.q[level][level] * self.s2f;
        let half = (dist / qii).sqrt() + 1e-7;
        let center = -self.rep_f[level] - inner;
        ((center - half).ceil() as i64, (center + half).floor() as i64)
    }

    fn inner_sum(&self, level: usize, xf: &[f64]) -> f64 {
        let mut acc = 0.0;
        for j in level + 1..self.n {
            acc += self.q[level][j] * xf[j];
        }
        acc
    }

    /// Fixes the topmost coordinates, producing independent work items.
    fn branches(&self) -> Vec<Branch> {
        let split = match self.n {
            0..=11 => 0,
            12..=15 => 1,
            16..=19 => 2,
            _ => 3,
        };
        let mut cur = vec![Branch::root(self)];
        for _ in 0..split {
            let mut next = Vec::new();
            for b in &cur {
                b.expand(self, &mut next);
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        cur
    }
}

/// A fixed assignment of the coordinates above `level`.
#[derive(Clone)]
struct Branch {
    level: usize,
    /// Remaining f64 radius on entry to `level`.
    dist: f64,
    /// Exact partial norm of the assigned coordinates.
    wpart: i64,
    /// wlin[j] = sum_{k > level} gi[j][k] w_k, meaningful for j <= level.
    wlin: Vec<i64>,
    /// Real coordinates of assigned levels (entries <= level unused).
    xf: Vec<f64>,
    /// Full-length solution vector with the assigned entries filled in.
    zfix: Vec<i64>,
}

impl Branch {
    fn root(s: &Setup) -> Branch {
        Branch {
            level: s.n - 1,
            dist: s.bound as f64 + 0.5,
            wpart: 0,
            wlin: vec![0; s.n],
            xf: vec![0.0; s.n],
            zfix: vec![0; s.n],
        }
    }

    fn expand(&self, s: &Setup, out: &mut Vec<Branch>) {
        let level = self.level;
        if level == 0 {
            out.push(self.clone());
            return;
        }
        let n = s.n;
        let inner = s.inner_sum(level, &self.xf);
        let (lo, hi) = s.range(level, self.dist, inner);
        for zv in lo..=hi {
            let w = s.offset[level] + s.step * zv;
            let wpart = self.wpart + w * (s.gi[level * n + level] * w + 2 * self.wlin[level]);
            let mut wlin = self.wlin.clone();
            for (j, item) in wlin.iter_mut().enumerate().take(level) {
                *item += s.gi[j * n + level] * w;
            }
            let mut xf = self.xf.clone();
            xf[level] = s.rep_f[level] + zv as f64;
            let xl = xf[level] + inner;
            let dist = self.dist - s.q[level][level] * s.s2f * xl * xl;
            let mut zfix = self.zfix.clone();
            zfix[level] = zv;
            out.push(Branch { level: level - 1, dist, wpart, wlin, xf, zfix });
        }
    }
}

/// Sequential walk below a branch prefix. All per-level state lives in
/// preallocated buffers; nothing is allocated on the hot path.
struct Walker<'a> {
    s: &'a Setup,
    /// Row `level` holds wlin values valid on entry to `level` (n*n flat).
    wlin: Vec<i64>,
    xf: Vec<f64>,
    z: Vec<i64>,
}

impl<'a> Walker<'a> {
    fn run(s: &'a Setup, b: &Branch, sink: &mut Sink) {
        let n = s.n;
        let mut w = Walker { s, wlin: vec![0; n * n], xf: b.xf.clone(), z: b.zfix.clone() };
        w.wlin[b.level * n..b.level * n + n].copy_from_slice(&b.wlin);
        w.descend(b.level, b.dist, b.wpart, sink);
    }

    fn descend(&mut self, level: usize, dist: f64, wpart: i64, sink: &mut Sink) {
        let s = self.s;
        let n = s.n;
        let inner = s.inner_sum(level, &self.xf);
        let (lo, hi) = s.range(level, dist, inner);
        if level == 0 {
            let g00 = s.gi[0];
            let l0 = self.wlin[0];
            for zv in lo..=hi {
                let w = s.offset[0] + s.step * zv;
                let f = wpart + w * (g00 * w + 2 * l0);
                if f <= s.bound {
                    self.z[0] = zv;
                    sink.accept(&self.z, f);
                }
            }
            return;
        }
        for zv in lo..=hi {
            let w = s.offset[level] + s.step * zv;
            let f = wpart + w * (s.gi[level * n + level] * w + 2 * self.wlin[level * n + level]);
            for j in 0..level {
                self.wlin[(level - 1) * n + j] = self.wlin[level * n + j] + s.gi[j * n + level] * w;
            }
            self.xf[level] = s.rep_f[level] + zv as f64;
            let xl = self.xf[level] + inner;
            let child_dist = dist - s.q[level][level] * s.s2f * xl * xl;
            self.z[level] = zv;
            self.descend(level - 1, child_dist, f, sink);
        }
    }
}

enum Sink<'a> {
    Collect(&'a mut Vec<Vec<i64>>),
    Count(&'a mut BTreeMap<i64, u64>),
}

impl Sink<'_> {
    #[inline]
    fn accept(&mut self, z: &[i64], f: i64) {
        match self {
            Sink::Collect(v) => v.push(z.to_vec()),
            Sink::Count(m) => *m.entry(f).or_insert(0) += 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{direct_sum, make_lattice, rescale};
    use crate::matrix::{rat, ratio};

    /// Brute-force box oracle, independent of the tree search: bounds each
    /// coordinate via the dual Gram diagonal and scans the whole box.
    fn oracle_coset(l: &Lattice, rep: &[Rat], max: &Rat) -> Vec<Vec<Rat>> {
        let n = l.rank();
        let ginv = l.gram().inverse().unwrap();
        let mut bounds = Vec::new();
        for i in 0..n {
            let b2 = max * &ginv[(i, i)];
            let mut b = 0i64;
            while rat(b + 1) * rat(b + 1) <= b2 {
                b += 1;
            }
            bounds.push(b + 1);
        }
        fn rec(
            l: &Lattice,
            rep: &[Rat],
            max: &Rat,
            bounds: &[i64],
            z: &mut Vec<i64>,
            i: usize,
            out: &mut Vec<Vec<Rat>>,
        ) {
            if i == z.len() {
                let x: Vec<Rat> = rep.iter().zip(z.iter()).map(|(r, &c)| r + rat(c)).collect();
                if l.norm(&x) <= *max {
                    out.push(x);
                }
                return;
            }
            for c in -bounds[i]..=bounds[i] {
                z[i] = c;
                rec(l, rep, max, bounds, z, i + 1, out);
            }
        }
        let mut z = vec![0i64; n];
        let mut out = Vec::new();
        rec(l, rep, max, &bounds, &mut z, 0, &mut out);
        out.sort_by(|a, b| {
            let na = l.norm(a);
            let nb = l.norm(b);
            na.cmp(&nb).then_with(|| a.cmp(b))
        });
        out
    }

    #[test]
    fn e8_has_240_roots() {
        let e8 = make_lattice('E', 8).unwrap();
        let sv = short_vectors(&e8, &rat(2));
        assert_eq!(sv.len(), 120);
        assert!(sv.iter().all(|v| e8.norm(v) == rat(2)));
    }

    #[test]
    fn d8_and_direct_sum_counts() {
        let d8 = make_lattice('D', 8).unwrap();
        assert_eq!(short_vectors(&d8, &rat(2)).len(), 56); // 112 roots
        let e8 = make_lattice('E', 8).unwrap();
        let s = direct_sum(&e8, &e8);
        assert_eq!(short_vectors(&s, &rat(2)).len(), 240); // 480 roots
    }

    #[test]
    fn zn_unit_vectors() {
        let z8 = make_lattice('Z', 8).unwrap();
        assert_eq!(short_vectors(&z8, &rat(1)).len(), 8);
    }

    #[test]
    fn coset_matches_box_oracle() {
        let a2 = make_lattice('A', 2).unwrap();
        let rep = vec![ratio(1, 3), ratio(2, 3)];
        assert_eq!(coset_short_vectors(&a2, &rep, &rat(4)), oracle_coset(&a2, &rep, &rat(4)));

        let d4 = make_lattice('D', 4).unwrap();
        let rep = vec![ratio(1, 2), rat(0), ratio(-1, 2), rat(1)];
        assert_eq!(
            coset_short_vectors(&d4, &rep, &ratio(7, 2)),
            oracle_coset(&d4, &rep, &ratio(7, 2))
        );

        let z3 = make_lattice('Z', 3).unwrap();
        let rep = vec![rat(0), rat(0), rat(0)];
        assert_eq!(coset_short_vectors(&z3, &rep, &rat(3)), oracle_coset(&z3, &rep, &rat(3)));
    }

    #[test]
    fn e8_norm_counts() {
        let e8 = make_lattice('E', 8).unwrap();
        let zero = vec![rat(0); 8];
        let counts = coset_norm_counts(&e8, &zero, &rat(4));
        assert_eq!(counts.get(&rat(0)), Some(&1));
        assert_eq!(counts.get(&rat(2)), Some(&240));
        assert_eq!(counts.get(&rat(4)), Some(&2160));
    }

    #[test]
    fn two_z_coset() {
        // 2Z as Gram [[4]]; the coset of 1 within bound 1 is exactly {±1}.
        let l = rescale(&make_lattice('Z', 1).unwrap(), 4);
        let rep = vec![ratio(1, 2)];
        let got = coset_short_vectors(&l, &rep, &rat(1));
        assert_eq!(got.len(), 2);
        assert!(got.iter().all(|v| l.norm(v) == rat(1)));
    }

    #[test]
    fn counts_invariant_under_unimodular_change() {
        let d4 = make_lattice('D', 4).unwrap();
        let u = Mat::from_i64(&[&[1, 2, 0, -1], &[0, 1, 1, 0], &[0, 0, 1, 3], &[0, 0, 0, 1]]);
        let g2 = u.mul(d4.gram()).mul(&u.transpose());
        let l2 = Lattice::new(g2).unwrap();
        for bound in [2i64, 4, 6] {
            assert_eq!(
                short_vectors(&d4, &rat(bound)).len(),
                short_vectors(&l2, &rat(bound)).len()
            );
        }
    }
}
