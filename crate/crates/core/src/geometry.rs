//! Points and subspaces of F_q^v.
//!
//! Points are normalised so that the first nonzero coordinate is 1 and are
//! numbered in lexicographic order of their coordinate encodings
//! (coordinate 0 most significant). Subspaces are stored as their reduced
//! row echelon generator matrix, which is a canonical form.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{FieldCtx, FieldElement};

/// Gaussian coefficient `[v k]_q`; zero outside `0 <= k <= v`.
pub fn gaussian_coefficient(v: i64, k: i64, q: u64) -> BigUint {
    if k < 0 || k > v {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= q.pow((v - i) as u32) - 1u32;
        den *= q.pow((i + 1) as u32) - 1u32;
    }
    debug_assert!((&num % &den).is_zero());
    num / den
}

/// `[v 1]_q` as a machine integer, for indexing.
pub fn point_count(v: usize, q: u32) -> usize {
    (0..v).map(|e| (q as usize).pow(e as u32)).sum()
}

/// Index of a normalised point in the canonical order.
pub fn point_index(x: &[FieldElement], q: u32) -> usize {
    let v = x.len();
    let lead = x
        .iter()
        .position(|e| !e.is_zero())
        .expect("the zero vector is not a point");
    debug_assert_eq!(x[lead], FieldElement::ONE);
    let offset = point_count(v - 1 - lead, q);
    let tail = x[lead + 1..]
        .iter()
        .fold(0usize, |acc, e| acc * q as usize + e.0 as usize);
    offset + tail
}

/// Inverse of [`point_index`].
pub fn point_from_index(idx: usize, v: usize, q: u32) -> Vec<FieldElement> {
    let q = q as usize;
    let mut rest = idx;
    let mut group = 1usize;
    let mut lead = v - 1;
    loop {
        if rest < group {
            break;
        }
        rest -= group;
        group *= q;
        lead -= 1;
    }
    let mut x = vec![FieldElement::ZERO; v];
    x[lead] = FieldElement::ONE;
    for i in (lead + 1..v).rev() {
        x[i] = FieldElement((rest % q) as u16);
        rest /= q;
    }
    x
}

/// Scales a nonzero vector so its first nonzero coordinate is 1.
pub fn normalize(x: &mut [FieldElement], ctx: &FieldCtx) -> bool {
    let Some(lead) = x.iter().position(|e| !e.is_zero()) else {
        return false;
    };
    if x[lead] != FieldElement::ONE {
        let s = ctx.inv(x[lead]).unwrap();
        for e in x[lead..].iter_mut() {
            *e = ctx.mul(*e, s);
        }
    }
    true
}

/// All points of PG(v-1, q) in canonical order.
pub fn enumerate_points(v: usize, ctx: &FieldCtx) -> Vec<Vec<FieldElement>> {
    (0..point_count(v, ctx.q()))
        .map(|i| point_from_index(i, v, ctx.q()))
        .collect()
}

/// A subspace of F_q^v in canonical (RREF) form.
#[derive(Clone, Debug)]
pub struct Subspace {
    v: usize,
    k: usize,
    gen: Vec<FieldElement>,
    pivots: Vec<usize>,
    ctx: FieldCtx,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.v == other.v && self.gen == other.gen && self.ctx == other.ctx
    }
}

impl Eq for Subspace {}

impl Hash for Subspace {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.v.hash(state);
        self.gen.hash(state);
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.v, self.k, &self.gen).cmp(&(other.v, other.k, &other.gen))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Row-reduces `rows` (each of length `v`) and drops zero rows.
fn rref(
    ctx: &FieldCtx,
    v: usize,
    mut rows: Vec<Vec<FieldElement>>,
) -> (Vec<Vec<FieldElement>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..v {
        let Some(pr) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let s = ctx.inv(rows[rank][c]).unwrap();
        for e in rows[rank].iter_mut() {
            *e = ctx.mul(*e, s);
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = rows[r][c];
                let pivot_row = rows[rank].clone();
                for (x, &y) in rows[r].iter_mut().zip(&pivot_row) {
                    *x = ctx.sub(*x, ctx.mul(f, y));
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    rows.truncate(rank);
    (rows, pivots)
}

impl Subspace {
    /// Span of the given vectors, canonicalised.
    pub fn from_generators(ctx: &FieldCtx, v: usize, rows: &[Vec<FieldElement>]) -> Result<Self> {
        for row in rows {
            if row.len() != v {
                return Err(Error::AmbientMismatch(format!(
                    "vector of length {} in F_q^{v}",
                    row.len()
                )));
            }
            if let Some(e) = row.iter().find(|e| e.enc() >= ctx.q()) {
                return Err(Error::Field(format!(
                    "element {} not in GF({})",
                    e,
                    ctx.q()
                )));
            }
        }
        let (red, pivots) = rref(ctx, v, rows.to_vec());
        Ok(Subspace {
            v,
            k: red.len(),
            gen: red.into_iter().flatten().collect(),
            pivots,
            ctx: ctx.clone(),
        })
    }

    /// The zero subspace of F_q^v.
    pub fn zero(ctx: &FieldCtx, v: usize) -> Self {
        Subspace {
            v,
            k: 0,
            gen: Vec::new(),
            pivots: Vec::new(),
            ctx: ctx.clone(),
        }
    }

    /// The whole space F_q^v.
    pub fn full(ctx: &FieldCtx, v: usize) -> Self {
        let rows: Vec<Vec<FieldElement>> = (0..v)
            .map(|i| {
                let mut r = vec![FieldElement::ZERO; v];
                r[i] = FieldElement::ONE;
                r
            })
            .collect();
        Self::from_generators(ctx, v, &rows).unwrap()
    }

    pub fn ambient_dim(&self) -> usize {
        self.v
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.gen[i * self.v..(i + 1) * self.v]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[FieldElement]> {
        self.gen.chunks(self.v.max(1)).take(self.k)
    }

    /// True if the stored generator matrix is in reduced row echelon form.
    pub fn is_rref(&self) -> bool {
        let mut last: Option<usize> = None;
        for (i, row) in self.rows().enumerate() {
            let Some(p) = row.iter().position(|e| !e.is_zero()) else {
                return false;
            };
            if last.is_some_and(|l| p <= l) || row[p] != FieldElement::ONE || self.pivots[i] != p {
                return false;
            }
            for (j, other) in self.rows().enumerate() {
                if j != i && !other[p].is_zero() {
                    return false;
                }
            }
            last = Some(p);
        }
        true
    }

    /// Reduces `x` against the generator rows; the result is zero iff `x`
    /// lies in the subspace.
    pub fn reduce(&self, x: &mut [FieldElement]) {
        for (i, &c) in self.pivots.iter().enumerate() {
            let f = x[c];
            if f.is_zero() {
                continue;
            }
            let row = &self.gen[i * self.v..(i + 1) * self.v];
            for j in c..self.v {
                let t = self.ctx.mul(f, row[j]);
                x[j] = self.ctx.sub(x[j], t);
            }
        }
    }

    pub fn contains_vector(&self, x: &[FieldElement]) -> bool {
        let mut y = x.to_vec();
        self.reduce(&mut y);
        y.iter().all(|e| e.is_zero())
    }

    fn check_same_ambient(&self, other: &Subspace) -> Result<()> {
        if self.v != other.v || self.ctx != other.ctx {
            return Err(Error::AmbientMismatch(format!(
                "F_{}^{} vs F_{}^{}",
                self.ctx.q(),
                self.v,
                other.ctx.q(),
                other.v
            )));
        }
        Ok(())
    }

    /// True iff `other <= self`.
    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_same_ambient(other)?;
        Ok(other.k <= self.k && other.rows().all(|r| self.contains_vector(r)))
    }

    /// Linear combination `sum coeffs[i] * row_i`.
    pub fn combine(&self, coeffs: &[FieldElement]) -> Vec<FieldElement> {
        let mut x = vec![FieldElement::ZERO; self.v];
        for (row, &c) in self.rows().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            for (xj, &rj) in x.iter_mut().zip(row) {
                *xj = self.ctx.add(*xj, self.ctx.mul(c, rj));
            }
        }
        x
    }

    /// Calls `f` with every normalised nonzero vector of the subspace,
    /// i.e. one representative per point. Because the generators are in
    /// RREF, combinations whose first nonzero coefficient is 1 are already
    /// normalised.
    pub fn for_each_point_vector(&self, mut f: impl FnMut(&[FieldElement])) {
        let q = self.ctx.q() as usize;
        let k = self.k;
        let mut coeffs = vec![FieldElement::ZERO; k];
        for lead in 0..k {
            coeffs.iter_mut().for_each(|c| *c = FieldElement::ZERO);
            coeffs[lead] = FieldElement::ONE;
            let tail = k - 1 - lead;
            for code in 0..q.pow(tail as u32) {
                let mut rest = code;
                for c in coeffs[lead + 1..].iter_mut().rev() {
                    *c = FieldElement((rest % q) as u16);
                    rest /= q;
                }
                f(&self.combine(&coeffs));
            }
        }
    }

    /// Sorted indices of the points (1-subspaces) contained in this subspace.
    pub fn points(&self) -> Vec<u32> {
        let q = self.ctx.q();
        let mut out = Vec::with_capacity(point_count(self.k, q));
        self.for_each_point_vector(|x| out.push(point_index(x, q) as u32));
        out.sort_unstable();
        out
    }

    /// Span of this subspace and one extra vector.
    pub fn extend(&self, x: &[FieldElement]) -> Subspace {
        let mut rows: Vec<Vec<FieldElement>> = self.rows().map(|r| r.to_vec()).collect();
        rows.push(x.to_vec());
        Subspace::from_generators(&self.ctx, self.v, &rows).unwrap()
    }

    /// All `k`-subspaces containing this one, sorted canonically.
    pub fn superspaces(&self, k: usize) -> Result<Vec<Subspace>> {
        if k <= self.k {
            return Err(Error::NotProperExtension {
                dim: self.k,
                target: k,
            });
        }
        if k > self.v {
            return Err(Error::AmbientMismatch(format!(
                "no {k}-subspaces in F_q^{}",
                self.v
            )));
        }
        let points = enumerate_points(self.v, &self.ctx);
        let mut level = vec![self.clone()];
        for _ in self.k..k {
            let mut seen = HashSet::new();
            let mut next = Vec::new();
            for s in &level {
                for x in &points {
                    if s.contains_vector(x) {
                        continue;
                    }
                    let ext = s.extend(x);
                    if seen.insert(ext.clone()) {
                        next.push(ext);
                    }
                }
            }
            level = next;
        }
        level.sort();
        Ok(level)
    }
}

/// `subspace_contains(S, T)`: true iff `T <= S`.
pub fn subspace_contains(s: &Subspace, t: &Subspace) -> Result<bool> {
    s.contains(t)
}

/// Streaming enumeration of all k-subspaces of F_q^v: pivot-column
/// combinations in lexicographic order, then free entries as an odometer
/// with the last free entry changing fastest.
pub struct SubspaceIter {
    ctx: FieldCtx,
    v: usize,
    k: usize,
    pivots: Vec<usize>,
    free: Vec<(usize, usize)>,
    values: Vec<u16>,
    done: bool,
}

fn free_positions(v: usize, pivots: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &c) in pivots.iter().enumerate() {
        for j in c + 1..v {
            if !pivots.contains(&j) {
                out.push((i, j));
            }
        }
    }
    out
}

impl SubspaceIter {
    pub fn new(v: usize, k: usize, ctx: &FieldCtx) -> Self {
        let pivots: Vec<usize> = (0..k).collect();
        let free = free_positions(v, &pivots);
        SubspaceIter {
            ctx: ctx.clone(),
            v,
            k,
            values: vec![0; free.len()],
            free,
            pivots,
            done: k > v,
        }
    }

    fn current(&self) -> Subspace {
        let v = self.v;
        let mut gen = vec![FieldElement::ZERO; self.k * v];
        for (i, &c) in self.pivots.iter().enumerate() {
            gen[i * v + c] = FieldElement::ONE;
        }
        for (&(i, j), &val) in self.free.iter().zip(&self.values) {
            gen[i * v + j] = FieldElement(val);
        }
        Subspace {
            v,
            k: self.k,
            gen,
            pivots: self.pivots.clone(),
            ctx: self.ctx.clone(),
        }
    }

    fn advance(&mut self) {
        let q = self.ctx.q() as u16;
        for val in self.values.iter_mut().rev() {
            *val += 1;
            if *val < q {
                return;
            }
            *val = 0;
        }
        // next pivot combination
        let (v, k) = (self.v, self.k);
        let Some(i) = (0..k).rev().find(|&i| self.pivots[i] < v - k + i) else {
            self.done = true;
            return;
        };
        self.pivots[i] += 1;
        for j in i + 1..k {
            self.pivots[j] = self.pivots[j - 1] + 1;
        }
        self.free = free_positions(v, &self.pivots);
        self.values = vec![0; self.free.len()];
    }
}

impl Iterator for SubspaceIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        Some(out)
    }
}

/// All k-subspaces of F_q^v, streamed.
pub fn enumerate_subspaces(v: usize, k: usize, ctx: &FieldCtx) -> SubspaceIter {
    SubspaceIter::new(v, k, ctx)
}

/// All t-subspaces of a given subspace, each expressed in the ambient space.
pub fn subspaces_of(s: &Subspace, t: usize) -> impl Iterator<Item = Subspace> + '_ {
    SubspaceIter::new(s.dim(), t, s.ctx()).map(move |inner| {
        let rows: Vec<Vec<FieldElement>> = inner.rows().map(|c| s.combine(c)).collect();
        Subspace::from_generators(s.ctx(), s.ambient_dim(), &rows).unwrap()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn f(q: u32) -> FieldCtx {
        FieldCtx::with_order(q).unwrap()
    }

    fn vecs(rows: &[&[u16]]) -> Vec<Vec<FieldElement>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| FieldElement(x)).collect())
            .collect()
    }

    #[test]
    fn gaussian_values() {
        assert_eq!(gaussian_coefficient(3, 1, 2), BigUint::from(7u32));
        assert_eq!(gaussian_coefficient(9, 0, 3), BigUint::from(1u32));
        assert_eq!(gaussian_coefficient(7, 1, 4), BigUint::from(5461u32));
        assert_eq!(gaussian_coefficient(6, 3, 2), BigUint::from(1395u32));
        assert_eq!(gaussian_coefficient(4, 5, 2), BigUint::zero());
        assert_eq!(gaussian_coefficient(4, -1, 2), BigUint::zero());
        for v in 0..10 {
            for k in 0..=v {
                for q in [2, 3, 4, 5] {
                    assert_eq!(
                        gaussian_coefficient(v, k, q),
                        gaussian_coefficient(v, v - k, q)
                    );
                }
            }
        }
    }

    #[test]
    fn points_in_canonical_order() {
        let pts = enumerate_points(2, &f(2));
        assert_eq!(pts, vecs(&[&[0, 1], &[1, 0], &[1, 1]]));
        assert_eq!(enumerate_points(1, &f(5)).len(), 1);
        let p3 = enumerate_points(3, &f(2));
        assert_eq!(p3.len(), 7);
        assert!(p3.windows(2).all(|w| w[0] < w[1]));
        let p4 = enumerate_points(3, &f(4));
        assert!(p4.windows(2).all(|w| w[0] < w[1]));
        for (i, x) in p4.iter().enumerate() {
            assert_eq!(point_index(x, 4), i);
        }
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(enumerate_subspaces(4, 2, &f(2)).count(), 35);
        assert_eq!(enumerate_subspaces(6, 3, &f(2)).count(), 1395);
        let zero: Vec<_> = enumerate_subspaces(5, 0, &f(2)).collect();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[0].dim(), 0);
    }

    #[test]
    fn enumeration_matches_gaussian_exhaustive() {
        for q in [2u32, 4] {
            let ctx = f(q);
            let vmax = if q == 2 { 8 } else { 5 };
            for v in 0..=vmax {
                for k in 0..=v {
                    let expect = gaussian_coefficient(v as i64, k as i64, q as u64);
                    if expect > BigUint::from(300_000u32) {
                        continue;
                    }
                    let mut n = 0usize;
                    for s in enumerate_subspaces(v, k, &ctx) {
                        debug_assert!(s.is_rref());
                        n += 1;
                    }
                    assert_eq!(BigUint::from(n), expect, "v={v} k={k} q={q}");
                }
            }
        }
    }

    #[test]
    fn enumerated_subspaces_are_canonical_and_distinct() {
        let ctx = f(4);
        let all: Vec<_> = enumerate_subspaces(4, 2, &ctx).collect();
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        for s in &all {
            assert!(s.is_rref());
            let rows: Vec<Vec<FieldElement>> = s.rows().map(|r| r.to_vec()).collect();
            assert_eq!(&Subspace::from_generators(&ctx, 4, &rows).unwrap(), s);
        }
    }

    #[test]
    fn points_of_subspaces() {
        let ctx = f(2);
        let s = Subspace::from_generators(&ctx, 3, &vecs(&[&[1, 0, 0], &[0, 1, 0]])).unwrap();
        let expected: Vec<u32> = vecs(&[&[0, 1, 0], &[1, 0, 0], &[1, 1, 0]])
            .iter()
            .map(|x| point_index(x, 2) as u32)
            .collect();
        assert_eq!(s.points(), expected);
        let line = Subspace::from_generators(&ctx, 3, &vecs(&[&[0, 1, 1]])).unwrap();
        assert_eq!(
            line.points(),
            vec![point_index(&vecs(&[&[0, 1, 1]])[0], 2) as u32]
        );
        for s in enumerate_subspaces(3, 2, &f(4)) {
            assert_eq!(s.points().len(), 5);
        }
    }

    /// Brute force: normalise every nonzero vector of F_q^v that lies in S.
    fn points_brute(s: &Subspace) -> Vec<u32> {
        let ctx = s.ctx();
        let q = ctx.q() as usize;
        let v = s.ambient_dim();
        let mut out = HashSet::new();
        for code in 1..q.pow(v as u32) {
            let mut x: Vec<FieldElement> = (0..v)
                .map(|i| FieldElement(((code / q.pow(i as u32)) % q) as u16))
                .collect();
            if s.contains_vector(&x) {
                normalize(&mut x, ctx);
                out.insert(point_index(&x, q as u32) as u32);
            }
        }
        let mut v: Vec<_> = out.into_iter().collect();
        v.sort();
        v
    }

    #[test]
    fn points_match_brute_force() {
        for q in [2, 3, 4] {
            for k in 0..=3 {
                for s in enumerate_subspaces(3, k, &f(q)) {
                    let p = s.points();
                    assert_eq!(p.len(), point_count(k, q));
                    assert_eq!(p, points_brute(&s));
                }
            }
        }
    }

    #[test]
    fn containment() {
        let ctx = f(2);
        let plane = Subspace::from_generators(&ctx, 3, &vecs(&[&[1, 0, 0], &[0, 1, 0]])).unwrap();
        let a = Subspace::from_generators(&ctx, 3, &vecs(&[&[1, 0, 0]])).unwrap();
        let b = Subspace::from_generators(&ctx, 3, &vecs(&[&[0, 0, 1]])).unwrap();
        assert!(subspace_contains(&plane, &a).unwrap());
        assert!(!subspace_contains(&plane, &b).unwrap());
        assert!(subspace_contains(&plane, &plane).unwrap());
        assert!(subspace_contains(&plane, &Subspace::zero(&ctx, 3)).unwrap());
        let other = Subspace::zero(&ctx, 4);
        assert!(plane.contains(&other).is_err());
        assert!(plane.contains(&Subspace::zero(&f(4), 3)).is_err());
    }

    #[test]
    fn superspace_counts() {
        let ctx = f(2);
        let b = enumerate_subspaces(5, 2, &ctx).nth(3).unwrap();
        let sup = b.superspaces(3).unwrap();
        assert_eq!(sup.len(), 7);
        let p = enumerate_subspaces(4, 1, &ctx).next().unwrap();
        assert_eq!(p.superspaces(2).unwrap().len(), 7);
        let h = enumerate_subspaces(4, 3, &ctx).next().unwrap();
        assert_eq!(h.superspaces(4).unwrap().len(), 1);
        assert!(matches!(
            h.superspaces(3),
            Err(Error::NotProperExtension { .. })
        ));
        assert!(matches!(
            h.superspaces(2),
            Err(Error::NotProperExtension { .. })
        ));
    }

    #[test]
    fn subspaces_of_block() {
        let ctx = f(2);
        let s = enumerate_subspaces(5, 3, &ctx).nth(17).unwrap();
        let subs: Vec<_> = subspaces_of(&s, 2).collect();
        assert_eq!(subs.len(), 7);
        assert!(subs.iter().all(|t| s.contains(t).unwrap() && t.dim() == 2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn superspaces_agree_with_enumeration(
            q in prop::sample::select(vec![2u32, 3]),
            v in 3usize..=5,
            seed in any::<usize>(),
        ) {
            let ctx = f(q);
            let dim = 1 + seed % (v - 2);
            let total = gaussian_coefficient(v as i64, dim as i64, q as u64).to_usize().unwrap();
            let b = enumerate_subspaces(v, dim, &ctx).nth(seed % total).unwrap();
            for k in dim + 1..=v.min(dim + 2) {
                let sup = b.superspaces(k).unwrap();
                prop_assert!(sup.iter().all(|s| s.contains(&b).unwrap() && s.dim() == k));
                let brute = enumerate_subspaces(v, k, &ctx)
                    .filter(|s| s.contains(&b).unwrap())
                    .count();
                prop_assert_eq!(sup.len(), brute);
                let expect = gaussian_coefficient((v - dim) as i64, (k - dim) as i64, q as u64);
                prop_assert_eq!(BigUint::from(sup.len()), expect);
            }
        }
    }
}
