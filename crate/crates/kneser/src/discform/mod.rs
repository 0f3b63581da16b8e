//! Finite quadratic modules (discriminant forms).
//!
//! A discriminant form is a finite abelian group `A` with a nondegenerate
//! quadratic form `q: A -> Q/Z`; the associated bilinear form is
//! `b(x,y) = q(x+y) - q(x) - q(y)`. For an even lattice `L` the quotient
//! `L'/L` with `q(a+L) = <a,a>/2 + Z` is the motivating example.
//!
//! Storage follows the generator presentation: a list of generator orders
//! and the symmetric `qgram` table whose diagonal holds `q(g_i)` and whose
//! off-diagonal entries hold `b(g_i, g_j)`, all reduced into `[0,1)`.
//! Group elements are tuples of residues modulo the generator orders.

pub mod symbol;

use crate::lattice::{Lattice, LatticeVector};
use crate::matrix::{rat, ratio, Int, Mat, Rat};
use num_traits::{One, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// Enumeration cutoff: operations that scan all group elements refuse to run
/// on forms larger than this.
pub const ENUM_BOUND: u64 = 1 << 16;

#[derive(Debug, thiserror::Error)]
pub enum FormError {
    #[error("form data is invalid: {0}")]
    BadData(String),
    #[error("bilinear form is degenerate")]
    Degenerate,
    #[error("form too large for enumeration (|A| > {0})")]
    TooLarge(u64),
    #[error("lattice is not even")]
    NotEven,
    #[error("subgroup is not isotropic")]
    NotIsotropic,
    #[error("Gauss sum does not lie on an eighth root of unity")]
    GaussSum,
    #[error("unknown genus symbol: {0}")]
    UnknownSymbol(String),
}

/// Element of a discriminant form: residues modulo the generator orders.
pub type DFElement = Vec<u64>;

/// A finite quadratic module in generator presentation.
#[derive(Clone, PartialEq, Eq)]
pub struct DiscriminantForm {
    orders: Vec<u64>,
    /// Symmetric table: diagonal q(g_i), off-diagonal b(g_i, g_j), in [0,1).
    qgram: Mat,
}

impl std::fmt::Debug for DiscriminantForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DiscriminantForm(orders {:?}, |A| = {})", self.orders, self.cardinality())
    }
}

fn frac(r: &Rat) -> Rat {
    r - r.floor()
}

impl DiscriminantForm {
    /// Validates well-definedness and nondegeneracy (the latter only up to
    /// the enumeration bound).
    pub fn new(orders: Vec<u64>, qgram: Mat) -> Result<Self, FormError> {
        if qgram.nrows() != orders.len() || !qgram.is_symmetric() {
            return Err(FormError::BadData("qgram shape".into()));
        }
        if orders.iter().any(|&d| d < 2) {
            return Err(FormError::BadData("generator orders must be >= 2".into()));
        }
        let qgram = qgram.map(|x| frac(x));
        let k = orders.len();
        for i in 0..k {
            let di = rat(orders[i] as i64);
            // q(d_i g_i) = d_i^2 q_i must vanish mod 1.
            if !frac(&(&di * &di * &qgram[(i, i)])).is_zero() {
                return Err(FormError::BadData(format!("q(g_{i}) incompatible with order")));
            }
            for j in 0..k {
                if i != j && !frac(&(&di * &qgram[(i, j)])).is_zero() {
                    return Err(FormError::BadData(format!("b(g_{i},g_{j}) incompatible")));
                }
            }
        }
        let form = DiscriminantForm { orders, qgram };
        if form.cardinality() <= ENUM_BOUND as u128 && !form.is_nondegenerate() {
            return Err(FormError::Degenerate);
        }
        Ok(form)
    }

    pub fn trivial() -> Self {
        DiscriminantForm { orders: vec![], qgram: Mat::zeros(0, 0) }
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn qgram(&self) -> &Mat {
        &self.qgram
    }

    pub fn cardinality(&self) -> u128 {
        self.orders.iter().map(|&d| d as u128).product()
    }

    pub fn zero(&self) -> DFElement {
        vec![0; self.orders.len()]
    }

    pub fn is_zero_elem(&self, x: &DFElement) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn add(&self, x: &DFElement, y: &DFElement) -> DFElement {
        x.iter().zip(y).zip(&self.orders).map(|((a, b), &d)| (a + b) % d).collect()
    }

    pub fn neg(&self, x: &DFElement) -> DFElement {
        x.iter().zip(&self.orders).map(|(&a, &d)| (d - a % d) % d).collect()
    }

    pub fn smul(&self, k: u64, x: &DFElement) -> DFElement {
        x.iter().zip(&self.orders).map(|(&a, &d)| (a as u128 * k as u128 % d as u128) as u64).collect()
    }

    pub fn elem_order(&self, x: &DFElement) -> u64 {
        let mut o = 1u64;
        for (&a, &d) in x.iter().zip(&self.orders) {
            if a != 0 {
                let g = num_integer::gcd(a, d);
                o = num_integer::lcm(o, d / g);
            }
        }
        o
    }

    /// Quadratic form value in [0,1).
    pub fn q(&self, x: &DFElement) -> Rat {
        let mut acc = Rat::zero();
        let k = self.orders.len();
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            acc += rat((x[i] * x[i]) as i64) * &self.qgram[(i, i)];
            for j in i + 1..k {
                if x[j] != 0 {
                    acc += rat((x[i] * x[j]) as i64) * &self.qgram[(i, j)];
                }
            }
        }
        frac(&acc)
    }

    /// Bilinear form value in [0,1).
    pub fn b(&self, x: &DFElement, y: &DFElement) -> Rat {
        let mut acc = Rat::zero();
        let k = self.orders.len();
        for i in 0..k {
            if x[i] == 0 {
                continue;
            }
            for j in 0..k {
                if y[j] == 0 {
                    continue;
                }
                let coeff = if i == j {
                    frac(&(rat(2) * &self.qgram[(i, i)]))
                } else {
                    self.qgram[(i, j)].clone()
                };
                acc += rat((x[i] * y[j]) as i64) * coeff;
            }
        }
        frac(&acc)
    }

    /// All group elements in mixed-radix lexicographic order.
    pub fn elements(&self) -> Vec<DFElement> {
        let mut out = Vec::new();
        let k = self.orders.len();
        let mut cur = vec![0u64; k];
        loop {
            out.push(cur.clone());
            // increment, most significant coordinate first (lexicographic).
            let mut i = k;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < self.orders[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    fn is_nondegenerate(&self) -> bool {
        let elems = self.elements();
        let gens: Vec<DFElement> = (0..self.orders.len())
            .map(|i| {
                let mut e = self.zero();
                e[i] = 1;
                e
            })
            .collect();
        elems
            .iter()
            .filter(|x| gens.iter().all(|g| self.b(x, g).is_zero()))
            .count()
            == 1
    }

    /// Negated form (same group, q replaced by -q).
    pub fn negated(&self) -> DiscriminantForm {
        DiscriminantForm {
            orders: self.orders.clone(),
            qgram: self.qgram.map(|x| frac(&(-x))),
        }
    }

    /// Orthogonal direct sum of two forms; generator lists concatenate.
    pub fn product(&self, other: &DiscriminantForm) -> DiscriminantForm {
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        let qgram = Mat::block_diag(&[&self.qgram, &other.qgram]);
        DiscriminantForm { orders, qgram }
    }

    /// Embeds an element of `self` into `self x other` (left factor).
    pub fn embed_left(&self, other: &DiscriminantForm, x: &DFElement) -> DFElement {
        let mut e = x.clone();
        e.extend(std::iter::repeat(0).take(other.orders.len()));
        e
    }

    pub fn embed_right(&self, _other: &DiscriminantForm, y: &DFElement) -> DFElement {
        let mut e = vec![0u64; self.orders.len()];
        e.extend_from_slice(y);
        e
    }

    /// Multiset of (element order, q value) pairs; an isomorphism invariant.
    pub fn value_statistics(&self) -> BTreeMap<(u64, Rat), usize> {
        let mut m = BTreeMap::new();
        for x in self.elements() {
            *m.entry((self.elem_order(&x), self.q(&x))).or_insert(0) += 1;
        }
        m
    }
}

/// Discriminant form of an even lattice together with generator lifts into
/// `L tensor Q` (basis coordinates).
pub fn discriminant_form(
    l: &Lattice,
) -> Result<(DiscriminantForm, Vec<LatticeVector>), FormError> {
    if !l.is_even() {
        return Err(FormError::NotEven);
    }
    let n = l.rank();
    if n == 0 {
        return Ok((DiscriminantForm::trivial(), vec![]));
    }
    let gi = l.gram().to_integer().expect("even lattice is integral");
    // L'/L in dual coordinates is Z^n / (rows of G); Smith form U G V = D
    // gives generators with dual coordinates the rows of V^{-1} and orders
    // the diagonal entries.
    let (d, _u, v) = gi.snf_with_transforms();
    let vinv = v
        .to_rat()
        .inverse()
        .expect("unimodular")
        .to_integer()
        .expect("inverse of unimodular is integral");
    let ginv = l.gram().inverse().expect("nondegenerate");
    let mut orders = Vec::new();
    let mut lifts: Vec<LatticeVector> = Vec::new();
    for i in 0..n {
        let di = d[i].to_u64().ok_or_else(|| FormError::BadData("order overflow".into()))?;
        if di <= 1 {
            continue;
        }
        orders.push(di);
        // Basis coordinates of the generator: (row i of V^{-1}) * G^{-1}.
        let row: Vec<Rat> = (0..n).map(|j| Rat::from_integer(vinv[(i, j)].clone())).collect();
        let coords = ginv.vec_mul(&row);
        lifts.push(coords);
    }
    let k = orders.len();
    let qgram = Mat::from_fn(k, k, |i, j| {
        if i == j {
            frac(&(l.norm(&lifts[i]) / rat(2)))
        } else {
            frac(&l.inner(&lifts[i], &lifts[j]))
        }
    });
    let form = DiscriminantForm::new(orders, qgram)?;
    debug_assert_eq!(form.cardinality(), {
        let det = l.det().to_integer();
        det.to_u128().unwrap()
    });
    Ok((form, lifts))
}

/// Signature modulo 8 via the Milgram Gauss sum, evaluated in f64 and
/// snapped to the nearest eighth root of unity (tolerance 1e-6).
pub fn signature_mod8(d: &DiscriminantForm) -> Result<u8, FormError> {
    if d.cardinality() > ENUM_BOUND as u128 {
        return Err(FormError::TooLarge(ENUM_BOUND));
    }
    let (mut re, mut im) = (0f64, 0f64);
    for x in d.elements() {
        let qx = d.q(&x);
        let angle = 2.0 * std::f64::consts::PI * qx.numer().to_f64().unwrap()
            / qx.denom().to_f64().unwrap();
        re += angle.cos();
        im += angle.sin();
    }
    let norm = (d.cardinality() as f64).sqrt();
    re /= norm;
    im /= norm;
    for k in 0..8u8 {
        let a = std::f64::consts::PI * (k as f64) / 4.0;
        if ((re - a.cos()).powi(2) + (im - a.sin()).powi(2)).sqrt() < 1e-6 {
            return Ok(k);
        }
    }
    Err(FormError::GaussSum)
}

/// A subgroup with cached, canonically sorted element list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DFSubgroup {
    pub gens: Vec<DFElement>,
    pub elements: Vec<DFElement>,
}

impl DFSubgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, x: &DFElement) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

/// Closure of a generating set under the group operation.
pub fn subgroup_closure(d: &DiscriminantForm, gens: &[DFElement]) -> DFSubgroup {
    let mut set: BTreeSet<DFElement> = BTreeSet::new();
    set.insert(d.zero());
    let mut queue: VecDeque<DFElement> = VecDeque::new();
    queue.push_back(d.zero());
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = d.add(&x, g);
            if set.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    DFSubgroup { gens: gens.to_vec(), elements: set.into_iter().collect() }
}

/// Orthogonal complement `{ x : b(x, s) = 0 for all s in S }`.
/// Asserts the cardinality identity `|S| * |S_perp| = |A|`.
pub fn orthogonal_complement(
    d: &DiscriminantForm,
    s: &DFSubgroup,
) -> Result<DFSubgroup, FormError> {
    if d.cardinality() > ENUM_BOUND as u128 {
        return Err(FormError::TooLarge(ENUM_BOUND));
    }
    let elems: Vec<DFElement> = d
        .elements()
        .into_iter()
        .filter(|x| s.gens.iter().all(|g| d.b(x, g).is_zero()))
        .collect();
    assert_eq!(
        (s.order() as u128) * (elems.len() as u128),
        d.cardinality(),
        "complement cardinality identity"
    );
    Ok(DFSubgroup { gens: elems.clone(), elements: elems })
}

/// All isotropic subgroups (q vanishes identically), in canonical order.
pub fn isotropic_subgroups(d: &DiscriminantForm) -> Result<Vec<DFSubgroup>, FormError> {
    if d.cardinality() > ENUM_BOUND as u128 {
        return Err(FormError::TooLarge(ENUM_BOUND));
    }
    let elems = d.elements();
    let mut found: BTreeSet<Vec<DFElement>> = BTreeSet::new();
    let zero_sub = subgroup_closure(d, &[]);
    let mut queue: VecDeque<Vec<DFElement>> = VecDeque::new();
    found.insert(zero_sub.elements.clone());
    queue.push_back(zero_sub.elements.clone());
    while let Some(cur) = queue.pop_front() {
        for x in &elems {
            if d.is_zero_elem(x) || cur.binary_search(x).is_ok() {
                continue;
            }
            if !d.q(x).is_zero() {
                continue;
            }
            if !cur.iter().all(|s| d.b(s, x).is_zero()) {
                continue;
            }
            // The extension stays isotropic; close it up.
            let mut gens = cur.clone();
            gens.push(x.clone());
            let ext = subgroup_closure(d, &gens);
            if found.insert(ext.elements.clone()) {
                queue.push_back(ext.elements.clone());
            }
        }
    }
    let mut out: Vec<DFSubgroup> = found
        .into_iter()
        .map(|elements| DFSubgroup { gens: elements.clone(), elements })
        .collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(out)
}

/// The induced form on `I_perp / I` for an isotropic subgroup `I`.
/// Returns the form together with lifts of its generators into `d`.
pub fn quotient_form(
    d: &DiscriminantForm,
    i_sub: &DFSubgroup,
) -> Result<(DiscriminantForm, Vec<DFElement>), FormError> {
    for x in &i_sub.elements {
        if !d.q(x).is_zero() {
            return Err(FormError::NotIsotropic);
        }
    }
    let iperp = orthogonal_complement(d, i_sub)?;
    // Coset representatives: first element of each coset in sorted order.
    let mut rep_of: BTreeMap<DFElement, DFElement> = BTreeMap::new();
    let mut reps: Vec<DFElement> = Vec::new();
    for x in &iperp.elements {
        if rep_of.contains_key(x) {
            continue;
        }
        reps.push(x.clone());
        for i in &i_sub.elements {
            rep_of.insert(d.add(x, i), x.clone());
        }
    }
    // q must be constant on cosets (isotropy of I inside I_perp).
    for r in &reps {
        for i in &i_sub.elements {
            debug_assert_eq!(d.q(&d.add(r, i)), d.q(r), "q constant on cosets");
        }
    }
    let (gens, orders) = decompose_group(&reps, |a, b| rep_of[&d.add(a, b)].clone());
    let k = gens.len();
    let qgram = Mat::from_fn(k, k, |i, j| {
        if i == j {
            d.q(&gens[i])
        } else {
            d.b(&gens[i], &gens[j])
        }
    });
    let form = DiscriminantForm::new(
        orders,
        qgram,
    )?;
    Ok((form, gens))
}

/// Greedy invariant-factor decomposition of a small abelian group given by
/// an element list and its operation. Returns generators (descending order
/// of element order) and their orders.
fn decompose_group<F>(elements: &[DFElement], add: F) -> (Vec<DFElement>, Vec<u64>)
where
    F: Fn(&DFElement, &DFElement) -> DFElement,
{
    // Element order within the quotient group.
    let zero = elements
        .iter()
        .find(|r| {
            // the representative of the zero coset is the one with r + r + ... stable;
            // zero is the unique element with r + r' = r' for all r'.
            elements.iter().all(|s| add(r, s) == *s)
        })
        .expect("zero element")
        .clone();
    let ord = |x: &DFElement| -> u64 {
        let mut k = 1u64;
        let mut cur = x.clone();
        while cur != zero {
            cur = add(&cur, x);
            k += 1;
        }
        k
    };
    let span = |gens: &[DFElement]| -> BTreeSet<DFElement> {
        let mut set = BTreeSet::new();
        set.insert(zero.clone());
        let mut queue: VecDeque<DFElement> = VecDeque::new();
        queue.push_back(zero.clone());
        while let Some(x) = queue.pop_front() {
            for g in gens {
                let y = add(&x, g);
                if set.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        set
    };

    let mut gens: Vec<DFElement> = Vec::new();
    let mut orders: Vec<u64> = Vec::new();
    let mut remaining: Vec<DFElement> = elements.to_vec();
    while span(&gens).len() < elements.len() {
        // Highest-order element independent of the current span.
        let cur_span = span(&gens);
        let mut best: Option<(u64, DFElement)> = None;
        for x in &remaining {
            if cur_span.contains(x) {
                continue;
            }
            let o = ord(x);
            // Require <x> to meet the span trivially so the sum is direct.
            let mut meets_trivially = true;
            let mut c = x.clone();
            while c != zero {
                if cur_span.contains(&c) {
                    meets_trivially = false;
                    break;
                }
                c = add(&c, x);
            }
            if !meets_trivially {
                continue;
            }
            if best.as_ref().map(|(bo, bx)| (o, x) > (*bo, bx)).unwrap_or(true) {
                best = Some((o, x.clone()));
            }
        }
        match best {
            Some((o, x)) => {
                gens.push(x);
                orders.push(o);
            }
            None => {
                // No directly-summing element: fall back to any element
                // outside the span and take the subgroup it generates jointly.
                // At desk scale this branch is not expected; fail loudly.
                panic!("abelian decomposition failed");
            }
        }
        remaining.retain(|x| !span(&gens).contains(x));
    }
    (gens, orders)
}

/// Isomorphism or anti-isometry witness between two forms.
#[derive(Clone, Debug)]
pub struct FormMap {
    /// Images of the source generators in the target form.
    pub images: Vec<DFElement>,
    /// True when the map negates the quadratic form.
    pub anti: bool,
}

impl FormMap {
    pub fn apply(&self, source: &DiscriminantForm, target: &DiscriminantForm, x: &DFElement) -> DFElement {
        let mut acc = target.zero();
        for (i, &c) in x.iter().enumerate() {
            acc = target.add(&acc, &target.smul(c, &self.images[i]));
        }
        let _ = source;
        acc
    }

    pub fn verify(&self, source: &DiscriminantForm, target: &DiscriminantForm) -> bool {
        let sign = self.anti;
        let k = source.orders().len();
        if self.images.len() != k {
            return false;
        }
        for i in 0..k {
            if target.elem_order(&self.images[i]) != source.orders()[i] {
                return false;
            }
            let qi = source.q(&unit(source, i));
            let want = if sign { frac(&(-qi)) } else { qi };
            if target.q(&self.images[i]) != want {
                return false;
            }
            for j in i + 1..k {
                let bij = source.b(&unit(source, i), &unit(source, j));
                let want = if sign { frac(&(-bij)) } else { bij };
                if target.b(&self.images[i], &self.images[j]) != want {
                    return false;
                }
            }
        }
        // Surjectivity (orders match, so bijectivity follows).
        let span = subgroup_closure(target, &self.images);
        span.order() as u128 == target.cardinality()
    }
}

fn unit(d: &DiscriminantForm, i: usize) -> DFElement {
    let mut e = d.zero();
    e[i] = 1;
    e
}

/// Searches for an isometry (`anti = false`) or anti-isometry (`anti = true`)
/// from `d1` onto `d2` by generator-image backtracking with invariant
/// prefilters. `None` is a definite negative.
pub fn is_isomorphic_df(
    d1: &DiscriminantForm,
    d2: &DiscriminantForm,
    anti: bool,
) -> Result<Option<FormMap>, FormError> {
    if d1.cardinality() > ENUM_BOUND as u128 || d2.cardinality() > ENUM_BOUND as u128 {
        return Err(FormError::TooLarge(ENUM_BOUND));
    }
    if d1.cardinality() != d2.cardinality() {
        return Ok(None);
    }
    let target_cmp = if anti { d2.negated() } else { d2.clone() };
    if d1.value_statistics() != target_cmp.value_statistics() {
        return Ok(None);
    }
    let elems2 = d2.elements();
    let k = d1.orders().len();
    let mut images: Vec<DFElement> = Vec::with_capacity(k);
    fn search(
        d1: &DiscriminantForm,
        d2: &DiscriminantForm,
        anti: bool,
        elems2: &[DFElement],
        images: &mut Vec<DFElement>,
    ) -> bool {
        let i = images.len();
        if i == d1.orders().len() {
            let span = subgroup_closure(d2, images);
            return span.order() as u128 == d2.cardinality();
        }
        let gi = unit(d1, i);
        let qi = d1.q(&gi);
        let want_q = if anti { frac(&(-qi)) } else { qi };
        'cand: for x in elems2 {
            if d2.elem_order(x) != d1.orders()[i] || d2.q(x) != want_q {
                continue;
            }
            for (j, img) in images.iter().enumerate() {
                let bij = d1.b(&unit(d1, j), &gi);
                let want_b = if anti { frac(&(-bij)) } else { bij };
                if d2.b(img, x) != want_b {
                    continue 'cand;
                }
            }
            images.push(x.clone());
            if search(d1, d2, anti, elems2, images) {
                return true;
            }
            images.pop();
        }
        false
    }
    if search(d1, d2, anti, &elems2, &mut images) {
        let map = FormMap { images, anti };
        debug_assert!(map.verify(d1, d2));
        Ok(Some(map))
    } else {
        Ok(None)
    }
}

/// The S and T matrices of the Weil representation on `C[A]`.
///
/// Elements are ordered by the canonical enumeration; `T` is diagonal with
/// phases `q(x)`, and `S[x][y] = |A|^{-1/2} e^{-2 pi i b(x,y)}`. Angles are
/// exact rationals measured in turns; the magnitude `|A|^{-1/2}` is kept as
/// the exact integer `|A|`.
#[derive(Clone, Debug)]
pub struct WeilMatrices {
    pub elements: Vec<DFElement>,
    /// T phases as exact turns in [0,1).
    pub t_angles: Vec<Rat>,
    /// S phase angles as exact turns in [0,1).
    pub s_angles: Mat,
    /// |A|; every S entry has magnitude 1/sqrt(|A|).
    pub group_order: u64,
}

impl WeilMatrices {
    /// The exact T matrix when all phases are half-integral turns
    /// (entries +-1); `None` otherwise.
    pub fn t_matrix_exact(&self) -> Option<Mat> {
        let n = self.elements.len();
        let mut m = Mat::zeros(n, n);
        for (i, a) in self.t_angles.iter().enumerate() {
            m[(i, i)] = phase_to_rat(a)?;
        }
        Some(m)
    }

    /// The exact S matrix when |A| is a perfect square and all phases are
    /// half-integral turns; `None` otherwise.
    pub fn s_matrix_exact(&self) -> Option<Mat> {
        let n = self.elements.len();
        let sq = (self.group_order as f64).sqrt().round() as u64;
        if sq * sq != self.group_order {
            return None;
        }
        let scale = ratio(1, sq as i64);
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = phase_to_rat(&self.s_angles[(i, j)])? * &scale;
            }
        }
        Some(m)
    }

    /// Complex S matrix for numeric work.
    pub fn s_matrix_complex(&self) -> Vec<Vec<num_complex::Complex64>> {
        let n = self.elements.len();
        let scale = 1.0 / (self.group_order as f64).sqrt();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a = &self.s_angles[(i, j)];
                        let th = 2.0 * std::f64::consts::PI * a.numer().to_f64().unwrap()
                            / a.denom().to_f64().unwrap();
                        num_complex::Complex64::new(th.cos() * scale, th.sin() * scale)
                    })
                    .collect()
            })
            .collect()
    }
}

fn phase_to_rat(turns: &Rat) -> Option<Rat> {
    if turns.is_zero() {
        Some(rat(1))
    } else if *turns == ratio(1, 2) {
        Some(rat(-1))
    } else {
        None
    }
}

pub fn weil_matrices(d: &DiscriminantForm) -> Result<WeilMatrices, FormError> {
    if d.cardinality() > ENUM_BOUND as u128 {
        return Err(FormError::TooLarge(ENUM_BOUND));
    }
    let elements = d.elements();
    let t_angles: Vec<Rat> = elements.iter().map(|x| d.q(x)).collect();
    let n = elements.len();
    let s_angles = Mat::from_fn(n, n, |i, j| frac(&(-d.b(&elements[i], &elements[j]))));
    Ok(WeilMatrices { elements, t_angles, s_angles, group_order: d.cardinality() as u64 })
}

/// Serialisable form data: `{orders, qgram_num, qgram_den}` with
/// `qgram[i][j] = qgram_num[i][j] / qgram_den`.
#[derive(serde::Serialize, serde::Deserialize, Clone, Debug)]
pub struct FormFile {
    pub orders: Vec<u64>,
    pub qgram_num: Vec<Vec<i64>>,
    pub qgram_den: i64,
}

impl FormFile {
    pub fn to_form(&self) -> Result<DiscriminantForm, FormError> {
        let k = self.orders.len();
        if self.qgram_num.len() != k || self.qgram_num.iter().any(|r| r.len() != k) {
            return Err(FormError::BadData("qgram shape".into()));
        }
        if self.qgram_den <= 0 {
            return Err(FormError::BadData("denominator".into()));
        }
        let qgram = Mat::from_fn(k, k, |i, j| ratio(self.qgram_num[i][j], self.qgram_den));
        DiscriminantForm::new(self.orders.clone(), qgram)
    }

    pub fn from_form(d: &DiscriminantForm) -> FormFile {
        let k = d.orders().len();
        let mut den = Int::one();
        for i in 0..k {
            for j in 0..k {
                den = num_integer::lcm(den, d.qgram()[(i, j)].denom().clone());
            }
        }
        let qgram_num = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        (&d.qgram()[(i, j)] * Rat::from_integer(den.clone()))
                            .to_integer()
                            .to_i64()
                            .expect("fits")
                    })
                    .collect()
            })
            .collect();
        FormFile {
            orders: d.orders().to_vec(),
            qgram_num,
            qgram_den: den.to_i64().expect("fits"),
        }
    }
}

/// The discriminant form 2_II^{+2}: Z2 x Z2 with q values (0, 0, 1/2) on the
/// nonzero elements. This is the hyperbolic 2-adic plane at scale 2.
pub fn two_ii_plus2() -> DiscriminantForm {
    let qgram = Mat::from_fn(2, 2, |i, j| if i == j { rat(0) } else { ratio(1, 2) });
    DiscriminantForm::new(vec![2, 2], qgram).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{even_sublattice, make_lattice};

    #[test]
    fn disc_of_e8_is_trivial() {
        let e8 = make_lattice('E', 8).unwrap();
        let (d, _) = discriminant_form(&e8).unwrap();
        assert_eq!(d.cardinality(), 1);
        assert_eq!(signature_mod8(&d).unwrap(), 0);
    }

    #[test]
    fn disc_of_a2() {
        let a2 = make_lattice('A', 2).unwrap();
        let (d, lifts) = discriminant_form(&a2).unwrap();
        assert_eq!(d.orders(), &[3]);
        // Both nonzero elements have q = 1/3.
        let g = vec![1u64];
        let g2 = vec![2u64];
        assert_eq!(d.q(&g), ratio(1, 3));
        assert_eq!(d.q(&g2), ratio(1, 3));
        assert_eq!(signature_mod8(&d).unwrap(), 2);
        // Lift has the minimal dual coset norm 2/3.
        assert_eq!(a2.norm(&lifts[0]), ratio(2, 3));
    }

    #[test]
    fn disc_of_even_part_of_z16() {
        let z16 = make_lattice('Z', 16).unwrap();
        let (k, _) = even_sublattice(&z16).unwrap();
        let (d, _) = discriminant_form(&k.lattice).unwrap();
        assert_eq!(d.cardinality(), 4);
        let qs: Vec<Rat> = d
            .elements()
            .into_iter()
            .filter(|x| !d.is_zero_elem(x))
            .map(|x| d.q(&x))
            .collect();
        let zeros = qs.iter().filter(|q| q.is_zero()).count();
        let halves = qs.iter().filter(|q| **q == ratio(1, 2)).count();
        assert_eq!((zeros, halves), (2, 1));
        // It is the hyperbolic plane.
        assert!(is_isomorphic_df(&d, &two_ii_plus2(), false).unwrap().is_some());
    }

    #[test]
    fn milgram_on_small_even_lattices() {
        for (kind, rank) in [('A', 1), ('A', 2), ('A', 3), ('D', 4), ('D', 8), ('E', 6), ('E', 7)] {
            let l = make_lattice(kind, rank).unwrap();
            let (d, _) = discriminant_form(&l).unwrap();
            let sig = signature_mod8(&d).unwrap();
            assert_eq!(sig as usize, rank % 8, "{kind}{rank}");
        }
    }

    #[test]
    fn bilinear_from_quadratic_exhaustive() {
        let d = two_ii_plus2();
        for x in d.elements() {
            for y in d.elements() {
                let lhs = d.b(&x, &y);
                let rhs = frac(&(d.q(&d.add(&x, &y)) - d.q(&x) - d.q(&y)));
                assert_eq!(lhs, rhs);
            }
            assert_eq!(d.q(&x), d.q(&d.neg(&x)));
        }
    }

    #[test]
    fn complement_in_hyperbolic_plane() {
        let d = two_ii_plus2();
        // gamma1 = (1,0): b(g1,g1) = 0, complement is <g1> itself.
        let g1 = vec![1u64, 0];
        let s = subgroup_closure(&d, &[g1.clone()]);
        let c = orthogonal_complement(&d, &s).unwrap();
        assert_eq!(c.order(), 2);
        assert!(c.contains(&g1));
        // Complement of 0 is everything; of the whole group is 0.
        let zero = subgroup_closure(&d, &[]);
        assert_eq!(orthogonal_complement(&d, &zero).unwrap().order(), 4);
        let all = subgroup_closure(&d, &[vec![1, 0], vec![0, 1]]);
        assert_eq!(orthogonal_complement(&d, &all).unwrap().order(), 1);
    }

    #[test]
    fn isotropic_subgroups_of_hyperbolic_plane() {
        let d = two_ii_plus2();
        let subs = isotropic_subgroups(&d).unwrap();
        // {0}, <gamma1>, <gamma2>; the q = 1/2 element is excluded.
        assert_eq!(subs.len(), 3);
        assert_eq!(subs[0].order(), 1);
        assert_eq!(subs[1].order(), 2);
        assert_eq!(subs[2].order(), 2);
        let a2 = make_lattice('A', 2).unwrap();
        let (da2, _) = discriminant_form(&a2).unwrap();
        assert_eq!(isotropic_subgroups(&da2).unwrap().len(), 1);
        assert_eq!(isotropic_subgroups(&DiscriminantForm::trivial()).unwrap().len(), 1);
    }

    #[test]
    fn quotient_by_trivial_is_identity() {
        let d = two_ii_plus2();
        let zero = subgroup_closure(&d, &[]);
        let (q, _) = quotient_form(&d, &zero).unwrap();
        assert!(is_isomorphic_df(&d, &q, false).unwrap().is_some());
        assert_eq!(signature_mod8(&q).unwrap(), signature_mod8(&d).unwrap());
    }

    #[test]
    fn quotient_of_doubled_plane() {
        // D x D with the diagonal anti-isometric subgroup of order 4 is
        // again of order 4 (|I_perp/I| = |D|/|I|^2 with |D| = 16, |I| = 2).
        let d = two_ii_plus2();
        let dd = d.product(&d);
        // I generated by (g1, g1) and (g2, g2): order 4, isotropic since the
        // plane is its own negative.
        let i = subgroup_closure(&dd, &[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        assert_eq!(i.order(), 4);
        let (q, _) = quotient_form(&dd, &i).unwrap();
        assert_eq!(q.cardinality(), 1);
        // A smaller isotropic subgroup leaves a 4-element quotient.
        let i2 = subgroup_closure(&dd, &[vec![1, 0, 1, 0]]);
        let (q2, _) = quotient_form(&dd, &i2).unwrap();
        assert_eq!(q2.cardinality(), 4);
        assert!(is_isomorphic_df(&q2, &d, false).unwrap().is_some());
    }

    #[test]
    fn anti_isometry_detection() {
        let d = two_ii_plus2();
        // The plane is its own negative (all values half-integral).
        assert!(is_isomorphic_df(&d, &d, true).unwrap().is_some());
        // disc(A2) is not isometric to its negative.
        let a2 = make_lattice('A', 2).unwrap();
        let (da2, _) = discriminant_form(&a2).unwrap();
        assert!(is_isomorphic_df(&da2, &da2, true).unwrap().is_none());
        assert!(is_isomorphic_df(&da2, &da2, false).unwrap().is_some());
        let e6 = make_lattice('E', 6).unwrap();
        let (de6, _) = discriminant_form(&e6).unwrap();
        assert!(is_isomorphic_df(&da2, &de6, true).unwrap().is_some());
        assert!(is_isomorphic_df(&da2, &de6, false).unwrap().is_none());
    }

    #[test]
    fn weil_matrices_of_hyperbolic_plane() {
        let d = two_ii_plus2();
        let w = weil_matrices(&d).unwrap();
        let t = w.t_matrix_exact().unwrap();
        // diag(1, 1, 1, -1) under the canonical element order (q = 0,0,0,1/2).
        for i in 0..4 {
            for j in 0..4 {
                let want = if i != j {
                    rat(0)
                } else if w.t_angles[i] == ratio(1, 2) {
                    rat(-1)
                } else {
                    rat(1)
                };
                assert_eq!(t[(i, j)], want);
            }
        }
        assert_eq!(w.t_angles.iter().filter(|a| **a == ratio(1, 2)).count(), 1);
        let s = w.s_matrix_exact().unwrap();
        let expect = Mat::from_i64(&[
            &[1, 1, 1, 1],
            &[1, 1, -1, -1],
            &[1, -1, 1, -1],
            &[1, -1, -1, 1],
        ])
        .scale(&ratio(1, 2));
        assert_eq!(s, expect);
        // S^2 = permutation of x -> -x = identity here; (ST)^3 = S^2.
        let s2 = s.mul(&s);
        assert_eq!(s2, Mat::identity(4));
        let st = s.mul(&t);
        let st3 = st.mul(&st).mul(&st);
        assert_eq!(st3, s2);
        // Trivial form: S = T = [1].
        let wt = weil_matrices(&DiscriminantForm::trivial()).unwrap();
        assert_eq!(wt.t_matrix_exact().unwrap(), Mat::identity(1));
        assert_eq!(wt.s_matrix_exact().unwrap(), Mat::identity(1));
    }

    #[test]
    fn form_file_round_trip() {
        let d = two_ii_plus2();
        let f = FormFile::from_form(&d);
        let d2 = f.to_form().unwrap();
        assert_eq!(d, d2);
    }
}
