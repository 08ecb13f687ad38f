//! Subspace designs and combinatorial designs.
//!
//! Besides parameter arithmetic and brute-force verification this module
//! holds the constructions turning a t-(v,k,λ)_q subspace design into
//! combinatorial designs: the projective version on the points of
//! PG(v-1,q), the affine version outside a fixed hyperplane, and (for
//! q = 2) the design of all flats parallel to the blocks.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{parse_err, Error, Result};
use crate::field::{FieldCtx, FieldElement};
use crate::geometry::{enumerate_subspaces, gaussian_coefficient, subspaces_of, Subspace};
use crate::io::{content_lines, header_fields};

/// Whether parameters refer to a subspace design over F_q or to a
/// combinatorial design.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DesignKind {
    Subspace { q: u64 },
    Combinatorial,
}

/// Exact derived parameters of a t-(v,k,λ) design (or its q-analog).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignParams {
    pub kind: DesignKind,
    pub t: u64,
    pub v: u64,
    pub k: u64,
    pub lambda: BigUint,
    /// `lambda_s[s]` for `0 <= s <= t`.
    pub lambda_s: Vec<BigRational>,
    /// Repetition number (may be non-integral for inadmissible λ).
    pub r: BigRational,
}

pub fn binomial(n: i64, k: i64) -> BigUint {
    if k < 0 || n < 0 || k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from((n - i) as u64) / BigUint::from((i + 1) as u64);
    }
    acc
}

fn ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl DesignParams {
    fn coeff(&self, n: i64, k: i64) -> BigUint {
        match self.kind {
            DesignKind::Subspace { q } => gaussian_coefficient(n, k, q),
            DesignKind::Combinatorial => binomial(n, k),
        }
    }

    fn build(kind: DesignKind, t: u64, v: u64, k: u64, lambda: BigUint) -> Self {
        let mut p = DesignParams {
            kind,
            t,
            v,
            k,
            lambda,
            lambda_s: Vec::new(),
            r: BigRational::zero(),
        };
        let lam = BigRational::from_integer(BigInt::from(p.lambda.clone()));
        let (t_, v_, k_) = (t as i64, v as i64, k as i64);
        p.lambda_s = (0..=t_)
            .map(|s| &lam * ratio(p.coeff(v_ - s, t_ - s), p.coeff(k_ - s, t_ - s)))
            .collect();
        p.r = if t >= 1 {
            p.lambda_s[1].clone()
        } else {
            &p.lambda_s[0] * ratio(p.coeff(k_, 1), p.coeff(v_, 1))
        };
        p
    }

    /// Block count `b = lambda_0`.
    pub fn b(&self) -> &BigRational {
        &self.lambda_s[0]
    }

    /// `lambda_s` as an integer, if integral.
    pub fn lambda_at(&self, s: usize) -> Option<BigUint> {
        self.lambda_s.get(s).and_then(to_uint)
    }

    pub fn b_int(&self) -> Option<BigUint> {
        to_uint(self.b())
    }

    pub fn r_int(&self) -> Option<BigUint> {
        to_uint(&self.r)
    }

    /// Descriptions of the divisibility conditions λ violates.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (s, ls) in self.lambda_s.iter().enumerate() {
            if !ls.is_integer() {
                out.push(format!(
                    "lambda_{s} = {}/{} is not an integer",
                    ls.numer(),
                    ls.denom()
                ));
            }
        }
        if self.t == 0 && !self.r.is_integer() {
            out.push(format!(
                "r = {}/{} is not an integer",
                self.r.numer(),
                self.r.denom()
            ));
        }
        out
    }

    pub fn admissible(&self) -> bool {
        self.violations().is_empty()
    }

    /// Smallest λ for which every `lambda_s` (and r) is integral.
    pub fn lambda_min(&self) -> BigUint {
        let unit = Self::build(self.kind, self.t, self.v, self.k, BigUint::one());
        let mut l = BigInt::one();
        for x in unit.lambda_s.iter().chain(std::iter::once(&unit.r)) {
            l = l.lcm(x.denom());
        }
        l.to_biguint().unwrap()
    }

    pub fn label(&self) -> String {
        match self.kind {
            DesignKind::Subspace { q } => {
                format!("{}-({},{},{})_{}", self.t, self.v, self.k, self.lambda, q)
            }
            DesignKind::Combinatorial => {
                format!("{}-({},{},{})", self.t, self.v, self.k, self.lambda)
            }
        }
    }
}

fn to_uint(x: &BigRational) -> Option<BigUint> {
    x.is_integer()
        .then(|| x.to_integer().to_biguint())
        .flatten()
}

/// Parameters of a t-(v,k,λ)_q subspace design.
pub fn derive_params_q(t: u64, v: u64, k: u64, lambda: u64, q: u64) -> Result<DesignParams> {
    check_tkv(t, k, v)?;
    Ok(DesignParams::build(
        DesignKind::Subspace { q },
        t,
        v,
        k,
        BigUint::from(lambda),
    ))
}

/// Parameters of a combinatorial t-(n,k,λ) design.
pub fn derive_params_comb(t: u64, n: u64, k: u64, lambda: u64) -> Result<DesignParams> {
    check_tkv(t, k, n)?;
    Ok(DesignParams::build(
        DesignKind::Combinatorial,
        t,
        n,
        k,
        BigUint::from(lambda),
    ))
}

fn check_tkv(t: u64, k: u64, v: u64) -> Result<()> {
    if t <= k && k <= v {
        Ok(())
    } else {
        Err(Error::InvalidDesign(format!(
            "need 0 <= t <= k <= v, got t={t} k={k} v={v}"
        )))
    }
}

/// A t-(v,k,λ)_q subspace design: a set of k-subspaces of F_q^v.
#[derive(Debug, Clone)]
pub struct SubspaceDesign {
    pub t: usize,
    pub v: usize,
    pub k: usize,
    pub lambda: u64,
    pub ctx: FieldCtx,
    pub blocks: Vec<Subspace>,
    /// Set once a brute-force verification has succeeded.
    pub verified: bool,
}

impl SubspaceDesign {
    /// Checks block dimensions and distinctness; does not verify the design
    /// property.
    pub fn new(
        t: usize,
        v: usize,
        k: usize,
        lambda: u64,
        ctx: FieldCtx,
        blocks: Vec<Subspace>,
    ) -> Result<Self> {
        check_tkv(t as u64, k as u64, v as u64)?;
        let mut seen = HashSet::with_capacity(blocks.len());
        for (i, b) in blocks.iter().enumerate() {
            if b.ambient_dim() != v || b.ctx() != &ctx {
                return Err(Error::AmbientMismatch(format!(
                    "block #{i} lives in a different space"
                )));
            }
            if b.dim() != k {
                return Err(Error::InvalidDesign(format!(
                    "block #{i} has dimension {} instead of {k}",
                    b.dim()
                )));
            }
            if !seen.insert(b) {
                return Err(Error::InvalidDesign(format!("duplicate block #{i}")));
            }
        }
        Ok(SubspaceDesign {
            t,
            v,
            k,
            lambda,
            ctx,
            blocks,
            verified: false,
        })
    }

    pub fn q(&self) -> u32 {
        self.ctx.q()
    }

    pub fn params(&self) -> DesignParams {
        DesignParams::build(
            DesignKind::Subspace { q: self.q() as u64 },
            self.t as u64,
            self.v as u64,
            self.k as u64,
            BigUint::from(self.lambda),
        )
    }

    /// λ_2 as a machine integer.
    fn lambda_2(&self) -> Result<u64> {
        self.params()
            .lambda_at(2)
            .and_then(|x| x.to_u64())
            .ok_or_else(|| {
                Error::InvalidDesign(format!(
                    "{} has non-integral lambda_2",
                    self.params().label()
                ))
            })
    }

    /// Runs [`verify_subspace_design`] and records the outcome.
    pub fn verify(&mut self) -> VerifyReport<Subspace> {
        let rep = verify_subspace_design(self);
        self.verified = rep.verified;
        rep
    }
}

/// The trivial design: all k-subspaces, λ = [v-t k-t]_q.
pub fn trivial_design(t: usize, v: usize, k: usize, ctx: &FieldCtx) -> Result<SubspaceDesign> {
    check_tkv(t as u64, k as u64, v as u64)?;
    let lambda = gaussian_coefficient((v - t) as i64, (k - t) as i64, ctx.q() as u64)
        .to_u64()
        .ok_or_else(|| Error::Unsupported("lambda does not fit in 64 bits".into()))?;
    Ok(SubspaceDesign {
        t,
        v,
        k,
        lambda,
        ctx: ctx.clone(),
        blocks: enumerate_subspaces(v, k, ctx).collect(),
        verified: false,
    })
}

/// A t-(n,k,λ) combinatorial design on points `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinatorialDesign {
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub lambda: u64,
    /// Sorted point lists.
    pub blocks: Vec<Vec<u32>>,
    pub verified: bool,
}

impl CombinatorialDesign {
    /// Sorts each block and checks sizes, ranges and distinctness.
    pub fn new(
        n: usize,
        t: usize,
        k: usize,
        lambda: u64,
        mut blocks: Vec<Vec<u32>>,
    ) -> Result<Self> {
        check_tkv(t as u64, k as u64, n as u64)?;
        let mut seen = HashSet::with_capacity(blocks.len());
        for (i, b) in blocks.iter_mut().enumerate() {
            b.sort_unstable();
            if b.len() != k || b.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidDesign(format!(
                    "block #{i} does not have {k} distinct points"
                )));
            }
            if b.last().is_some_and(|&x| x as usize >= n) {
                return Err(Error::InvalidDesign(format!(
                    "block #{i} has a point outside 0..{n}"
                )));
            }
            if !seen.insert(b.clone()) {
                return Err(Error::InvalidDesign(format!("duplicate block #{i}")));
            }
        }
        Ok(CombinatorialDesign {
            n,
            t,
            k,
            lambda,
            blocks,
            verified: false,
        })
    }

    pub fn params(&self) -> DesignParams {
        DesignParams::build(
            DesignKind::Combinatorial,
            self.t as u64,
            self.n as u64,
            self.k as u64,
            BigUint::from(self.lambda),
        )
    }

    /// Same blocks, claimed as a t-(n,k,λ) design with other t and λ.
    pub fn with_params(&self, t: usize, lambda: u64) -> Result<Self> {
        check_tkv(t as u64, self.k as u64, self.n as u64)?;
        Ok(CombinatorialDesign {
            t,
            lambda,
            verified: false,
            ..self.clone()
        })
    }

    pub fn verify(&mut self) -> VerifyReport<Vec<u32>> {
        let rep = verify_comb_design(self);
        self.verified = rep.verified;
        rep
    }
}

/// Observed number of blocks through a t-set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservedLambda {
    Constant(u64),
    NonConstant,
}

/// Result of a brute-force design check. The witness is the first t-set
/// (in enumeration order) whose count differs from the claimed λ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport<W> {
    pub verified: bool,
    pub observed: ObservedLambda,
    pub witness: Option<(W, u64)>,
}

fn summarize<W>(lambda: u64, counts: impl Iterator<Item = (u64, W)>) -> VerifyReport<W> {
    let mut first: Option<u64> = None;
    let mut constant = true;
    let mut witness = None;
    for (c, w) in counts {
        match first {
            None => first = Some(c),
            Some(f) if f != c => constant = false,
            _ => {}
        }
        if c != lambda && witness.is_none() {
            witness = Some((w, c));
        }
    }
    let observed = match (constant, first) {
        (true, Some(f)) => ObservedLambda::Constant(f),
        (true, None) => ObservedLambda::Constant(lambda),
        (false, _) => ObservedLambda::NonConstant,
    };
    VerifyReport {
        verified: witness.is_none(),
        observed,
        witness,
    }
}

/// Counts, for every t-subspace, the blocks containing it.
pub fn verify_subspace_design(d: &SubspaceDesign) -> VerifyReport<Subspace> {
    let counts: HashMap<Subspace, u64> = d
        .blocks
        .par_iter()
        .fold(HashMap::new, |mut acc, b| {
            for s in subspaces_of(b, d.t) {
                *acc.entry(s).or_insert(0u64) += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    summarize(
        d.lambda,
        enumerate_subspaces(d.v, d.t, &d.ctx).map(|s| (counts.get(&s).copied().unwrap_or(0), s)),
    )
}

/// Rank of a sorted t-subset in the combinatorial number system.
fn subset_rank(set: &[u32], table: &[Vec<u64>]) -> u64 {
    set.iter()
        .enumerate()
        .map(|(i, &a)| table[a as usize][i + 1])
        .sum()
}

fn subset_unrank(mut rank: u64, t: usize, table: &[Vec<u64>]) -> Vec<u32> {
    let mut out = vec![0u32; t];
    for i in (1..=t).rev() {
        let mut a = i - 1;
        while a + 1 < table.len() && table[a + 1][i] <= rank {
            a += 1;
        }
        rank -= table[a][i];
        out[i - 1] = a as u32;
    }
    out
}

fn binom_table(n: usize, t: usize) -> Vec<Vec<u64>> {
    let mut c = vec![vec![0u64; t + 1]; n + 1];
    for a in 0..=n {
        c[a][0] = 1;
        for j in 1..=t.min(a) {
            c[a][j] = c[a - 1][j - 1] + if j < a { c[a - 1][j] } else { 0 };
        }
    }
    c
}

fn for_each_subset(block: &[u32], t: usize, f: &mut impl FnMut(&[u32])) {
    let mut idx: Vec<usize> = (0..t).collect();
    let mut buf = vec![0u32; t];
    if t > block.len() {
        return;
    }
    loop {
        for (b, &i) in buf.iter_mut().zip(&idx) {
            *b = block[i];
        }
        f(&buf);
        let Some(i) = (0..t).rev().find(|&i| idx[i] < block.len() - t + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

const DENSE_COUNT_LIMIT: u64 = 1 << 27;

/// Counts, for every t-subset of `0..n`, the blocks containing it.
pub fn verify_comb_design(d: &CombinatorialDesign) -> VerifyReport<Vec<u32>> {
    let table = binom_table(d.n, d.t);
    let total = table[d.n][d.t];
    if total <= DENSE_COUNT_LIMIT {
        let mut counts = vec![0u64; total as usize];
        for b in &d.blocks {
            for_each_subset(b, d.t, &mut |s| {
                counts[subset_rank(s, &table) as usize] += 1
            });
        }
        summarize(
            d.lambda,
            counts.iter().enumerate().map(|(i, &c)| (c, i as u64)),
        )
        .map_witness(|i| subset_unrank(i, d.t, &table))
    } else {
        let mut counts: HashMap<u64, u64> = HashMap::new();
        for b in &d.blocks {
            for_each_subset(b, d.t, &mut |s| {
                *counts.entry(subset_rank(s, &table)).or_insert(0) += 1
            });
        }
        summarize(
            d.lambda,
            (0..total).map(|i| (counts.get(&i).copied().unwrap_or(0), i)),
        )
        .map_witness(|i| subset_unrank(i, d.t, &table))
    }
}

impl<W> VerifyReport<W> {
    fn map_witness<U>(self, f: impl FnOnce(W) -> U) -> VerifyReport<U> {
        VerifyReport {
            verified: self.verified,
            observed: self.observed,
            witness: self.witness.map(|(w, c)| (f(w), c)),
        }
    }
}

/// Projective version: points of PG(v-1,q), blocks the point sets of the
/// subspace blocks. A 2-([v 1]_q, [k 1]_q, λ_2) design.
pub fn projective_version(d: &SubspaceDesign) -> Result<CombinatorialDesign> {
    if d.t < 2 {
        return Err(Error::ProjectiveNeedsT2(d.t));
    }
    let lambda = d.lambda_2()?;
    let q = d.q() as usize;
    let n = crate::geometry::point_count(d.v, d.q());
    let blocks: Vec<Vec<u32>> = d.blocks.par_iter().map(|b| b.points()).collect();
    Ok(CombinatorialDesign {
        n,
        t: 2,
        k: crate::geometry::point_count(d.k, q as u32),
        lambda,
        blocks,
        verified: false,
    })
}

/// Affine version with respect to the hyperplane `{x : a.x = 0}`, where
/// `a` defaults to the first unit vector.
///
/// A point outside the hyperplane is scaled so that `a.x = 1` and labelled
/// by its remaining coordinates read as a base-q number, least significant
/// first. For the default hyperplane this is `sum_{i>=1} x_i q^(i-1)`.
pub fn affine_version(
    d: &SubspaceDesign,
    normal: Option<&[FieldElement]>,
) -> Result<CombinatorialDesign> {
    if d.t < 2 {
        return Err(Error::AffineNeedsT2(d.t));
    }
    let ctx = &d.ctx;
    let q = d.q() as u64;
    let a: Vec<FieldElement> = match normal {
        Some(a) => a.to_vec(),
        None => {
            let mut e0 = vec![FieldElement::ZERO; d.v];
            e0[0] = FieldElement::ONE;
            e0
        }
    };
    if a.len() != d.v || a.iter().any(|e| e.enc() >= ctx.q()) {
        return Err(Error::AmbientMismatch(
            "hyperplane normal has the wrong shape".into(),
        ));
    }
    let Some(pivot) = a.iter().position(|e| !e.is_zero()) else {
        return Err(Error::AmbientMismatch("hyperplane normal is zero".into()));
    };
    let lambda = d.lambda_2()?;
    let label = |x: &[FieldElement]| -> Option<u32> {
        let s = x
            .iter()
            .zip(&a)
            .fold(FieldElement::ZERO, |acc, (&xi, &ai)| {
                ctx.add(acc, ctx.mul(xi, ai))
            });
        if s.is_zero() {
            return None;
        }
        let scale = ctx.inv(s).unwrap();
        let mut acc = 0u64;
        let mut w = 1u64;
        for (i, &xi) in x.iter().enumerate() {
            if i == pivot {
                continue;
            }
            acc += ctx.mul(xi, scale).enc() as u64 * w;
            w *= q;
        }
        Some(acc as u32)
    };
    let blocks: Vec<Vec<u32>> = d
        .blocks
        .par_iter()
        .filter_map(|b| {
            let mut pts = Vec::new();
            b.for_each_point_vector(|x| {
                if let Some(l) = label(x) {
                    pts.push(l);
                }
            });
            pts.sort_unstable();
            (!pts.is_empty()).then_some(pts)
        })
        .collect();
    Ok(CombinatorialDesign {
        n: q.pow(d.v as u32 - 1) as usize,
        t: 2,
        k: q.pow(d.k as u32 - 1) as usize,
        lambda,
        blocks,
        verified: false,
    })
}

/// All cosets `B + a` of all blocks, over F_2^v with vector `x` labelled
/// `sum x_i 2^i`. For a 2-(v,k,λ)_2 design this is a 3-(2^v, 2^k, λ) design.
pub fn flats_construction(d: &SubspaceDesign) -> Result<CombinatorialDesign> {
    if d.q() != 2 {
        return Err(Error::FlatsNeedQ2(d.q()));
    }
    if d.t < 2 {
        return Err(Error::InvalidDesign(format!(
            "flats construction needs t >= 2 (got t = {})",
            d.t
        )));
    }
    if d.v > 31 {
        return Err(Error::Unsupported(
            "flats construction limited to v <= 31".into(),
        ));
    }
    let lambda = d.lambda_2()?;
    let size = 1usize << d.v;
    let mut blocks = Vec::with_capacity(d.blocks.len() << (d.v - d.k));
    for b in &d.blocks {
        let basis: Vec<u32> = b
            .rows()
            .map(|r| r.iter().enumerate().map(|(i, e)| (e.enc()) << i).sum())
            .collect();
        let span: Vec<u32> = (0..1u32 << d.k)
            .map(|c| {
                basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| c >> i & 1 == 1)
                    .fold(0, |acc, (_, &g)| acc ^ g)
            })
            .collect();
        let mut covered = vec![false; size];
        for a in 0..size as u32 {
            if covered[a as usize] {
                continue;
            }
            let mut coset: Vec<u32> = span.iter().map(|&s| s ^ a).collect();
            for &x in &coset {
                covered[x as usize] = true;
            }
            coset.sort_unstable();
            blocks.push(coset);
        }
    }
    CombinatorialDesign::new(size, 3, 1 << d.k, lambda, blocks)
}

/// A design file of either kind.
#[derive(Debug, Clone)]
pub enum DesignFile {
    Subspace(SubspaceDesign),
    Combinatorial(CombinatorialDesign),
}

/// Parses a file beginning with either a `qdesign` or `cdesign` header.
pub fn parse_design(text: &str) -> Result<DesignFile> {
    let first = content_lines(text).next().map(|(_, l)| l).unwrap_or("");
    if first.starts_with("qdesign") {
        parse_qdesign(text).map(DesignFile::Subspace)
    } else if first.starts_with("cdesign") {
        parse_cdesign(text).map(DesignFile::Combinatorial)
    } else {
        Err(parse_err(1, "expected a qdesign or cdesign header"))
    }
}

pub fn parse_qdesign(text: &str) -> Result<SubspaceDesign> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty design file"))?;
    let h = header_fields(hl, header, "qdesign")?;
    let (t, v, k) = (h.get_usize("t")?, h.get_usize("v")?, h.get_usize("k")?);
    let lambda = h.get_u64("lambda")?;
    let q = h.get_u32("q")?;
    let poly = h.get_opt_u64("poly")?.map(|p| p as u32);
    let ctx =
        FieldCtx::with_order_and_modulus(q, poly).map_err(|e| parse_err(hl, e.to_string()))?;
    check_tkv(t as u64, k as u64, v as u64).map_err(|e| parse_err(hl, e.to_string()))?;
    let mut blocks = Vec::new();
    let mut seen: HashMap<Subspace, usize> = HashMap::new();
    for (ln, line) in lines {
        let mut rows = Vec::new();
        for vec_text in line.split(';') {
            let row: Vec<FieldElement> = vec_text
                .split_whitespace()
                .map(|tok| {
                    let x: u32 = tok
                        .parse()
                        .map_err(|_| parse_err(ln, format!("bad element {tok:?}")))?;
                    ctx.element(x).map_err(|e| parse_err(ln, e.to_string()))
                })
                .collect::<Result<_>>()?;
            if row.len() != v {
                return Err(parse_err(
                    ln,
                    format!("vector with {} entries, expected {v}", row.len()),
                ));
            }
            rows.push(row);
        }
        let s =
            Subspace::from_generators(&ctx, v, &rows).map_err(|e| parse_err(ln, e.to_string()))?;
        if s.dim() != k {
            return Err(parse_err(
                ln,
                format!("block spans dimension {}, expected {k}", s.dim()),
            ));
        }
        if seen.insert(s.clone(), ln).is_some() {
            return Err(Error::DuplicateBlock { line: ln });
        }
        blocks.push(s);
    }
    SubspaceDesign::new(t, v, k, lambda, ctx, blocks)
}

pub fn emit_qdesign(d: &SubspaceDesign) -> String {
    let mut out = format!(
        "qdesign t={} v={} k={} lambda={} q={} poly={}\n",
        d.t,
        d.v,
        d.k,
        d.lambda,
        d.q(),
        d.ctx.modulus()
    );
    for b in &d.blocks {
        let rows: Vec<String> = if b.dim() == 0 {
            vec![vec!["0"; d.v].join(" ")]
        } else {
            b.rows()
                .map(|r| {
                    r.iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                })
                .collect()
        };
        out.push_str(&rows.join("; "));
        out.push('\n');
    }
    out
}

pub fn parse_cdesign(text: &str) -> Result<CombinatorialDesign> {
    let mut lines = content_lines(text);
    let (hl, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty design file"))?;
    let h = header_fields(hl, header, "cdesign")?;
    let (t, n, k) = (h.get_usize("t")?, h.get_usize("n")?, h.get_usize("k")?);
    let lambda = h.get_u64("lambda")?;
    check_tkv(t as u64, k as u64, n as u64).map_err(|e| parse_err(hl, e.to_string()))?;
    let mut blocks = Vec::new();
    let mut seen = HashSet::new();
    for (ln, line) in lines {
        let mut b: Vec<u32> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse()
                    .map_err(|_| parse_err(ln, format!("bad point index {tok:?}")))
            })
            .collect::<Result<_>>()?;
        if b.windows(2).any(|w| w[0] >= w[1]) {
            return Err(parse_err(ln, "block indices must be strictly increasing"));
        }
        if b.len() != k || b.last().is_some_and(|&x| x as usize >= n) {
            return Err(parse_err(
                ln,
                format!("block must have {k} points below {n}"),
            ));
        }
        b.shrink_to_fit();
        if !seen.insert(b.clone()) {
            return Err(Error::DuplicateBlock { line: ln });
        }
        blocks.push(b);
    }
    CombinatorialDesign::new(n, t, k, lambda, blocks)
}

pub fn emit_cdesign(d: &CombinatorialDesign) -> String {
    let mut out = format!(
        "cdesign t={} n={} k={} lambda={}\n",
        d.t, d.n, d.k, d.lambda
    );
    for b in &d.blocks {
        let mut first = true;
        for x in b {
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{x}");
            first = false;
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> FieldCtx {
        FieldCtx::with_order(q).unwrap()
    }

    fn int(x: &BigRational) -> u64 {
        x.to_integer().to_u64().unwrap()
    }

    #[test]
    fn q_params() {
        let p = derive_params_q(2, 6, 3, 3, 2).unwrap();
        assert_eq!(int(&p.r), 31);
        assert_eq!(int(p.b()), 279);
        assert!(p.admissible());
        let p = derive_params_q(2, 7, 3, 21, 4).unwrap();
        assert_eq!(int(&p.r), 5733);
        let p0 = derive_params_q(0, 5, 2, 4, 2).unwrap();
        assert_eq!(p0.lambda_s.len(), 1);
        assert_eq!(int(p0.b()), 4);
        let bad = derive_params_q(2, 6, 3, 1, 2).unwrap();
        assert!(!bad.admissible());
        assert_eq!(bad.lambda_min(), BigUint::from(3u32));
        assert!(derive_params_q(3, 2, 2, 1, 2).is_err());
    }

    #[test]
    fn comb_params() {
        let p = derive_params_comb(3, 8, 4, 1).unwrap();
        assert_eq!((int(&p.r), int(p.b())), (7, 14));
        let p = derive_params_comb(2, 7, 3, 1).unwrap();
        assert_eq!((int(&p.r), int(p.b())), (3, 7));
        assert_eq!(int(&p.lambda_s[2]), 1);
        // r = b k / v for t = 0
        let p = derive_params_comb(0, 6, 2, 3).unwrap();
        assert_eq!(int(&p.r), 1);
    }

    #[test]
    fn trivial_designs() {
        let d = trivial_design(2, 3, 2, &f(2)).unwrap();
        assert_eq!((d.lambda, d.blocks.len()), (1, 7));
        let d = trivial_design(2, 6, 3, &f(2)).unwrap();
        assert_eq!((d.lambda, d.blocks.len()), (15, 1395));
        let d = trivial_design(3, 5, 3, &f(2)).unwrap();
        assert_eq!(d.lambda, 1);
    }

    #[test]
    fn verify_trivial_and_broken() {
        let mut d = trivial_design(2, 4, 2, &f(2)).unwrap();
        let rep = d.verify();
        assert!(rep.verified && d.verified);
        assert_eq!(rep.observed, ObservedLambda::Constant(1));
        let mut d = trivial_design(2, 5, 3, &f(2)).unwrap();
        assert_eq!(d.verify().observed, ObservedLambda::Constant(7));
        d.blocks.pop();
        let rep = verify_subspace_design(&d);
        assert!(!rep.verified);
        assert_eq!(rep.observed, ObservedLambda::NonConstant);
        let (w, c) = rep.witness.unwrap();
        assert_eq!(c, 6);
        assert_eq!(w.dim(), 2);
    }

    #[test]
    fn wrong_lambda_is_constant_but_unverified() {
        let mut d = trivial_design(2, 4, 3, &f(2)).unwrap();
        d.lambda = 2;
        let rep = verify_subspace_design(&d);
        assert!(!rep.verified);
        assert_eq!(rep.observed, ObservedLambda::Constant(3));
        assert_eq!(rep.witness.unwrap().1, 3);
    }

    fn fano() -> CombinatorialDesign {
        let lines = [
            [0, 1, 2],
            [0, 3, 4],
            [0, 5, 6],
            [1, 3, 5],
            [1, 4, 6],
            [2, 3, 6],
            [2, 4, 5],
        ];
        CombinatorialDesign::new(7, 2, 3, 1, lines.iter().map(|l| l.to_vec()).collect()).unwrap()
    }

    #[test]
    fn comb_verification() {
        let mut d = fano();
        assert!(d.verify().verified);
        let t0 = d.with_params(0, 7).unwrap();
        assert!(verify_comb_design(&t0).verified);
        let mut broken = fano();
        broken.blocks.pop();
        let rep = verify_comb_design(&broken);
        assert!(!rep.verified);
        let (w, c) = rep.witness.unwrap();
        assert_eq!((w, c), (vec![2, 4], 0));
    }

    #[test]
    fn subset_ranking_roundtrip() {
        let table = binom_table(10, 3);
        for r in 0..table[10][3] {
            let s = subset_unrank(r, 3, &table);
            assert!(s.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(subset_rank(&s, &table), r);
        }
    }

    #[test]
    fn constructions() {
        let fano_q = trivial_design(2, 3, 2, &f(2)).unwrap();
        let mut p = projective_version(&fano_q).unwrap();
        assert_eq!((p.n, p.k, p.lambda, p.blocks.len()), (7, 3, 1, 7));
        assert!(p.verify().verified);

        let d = trivial_design(2, 5, 3, &f(2)).unwrap();
        let mut p = projective_version(&d).unwrap();
        assert_eq!((p.n, p.k, p.lambda), (31, 7, 7));
        assert!(p.verify().verified);

        let d = trivial_design(2, 4, 3, &f(2)).unwrap();
        let mut a = affine_version(&d, None).unwrap();
        assert_eq!((a.n, a.k, a.lambda), (8, 4, 3));
        assert_eq!(int(&a.params().r), 7);
        assert!(a.verify().verified);

        let mut a = affine_version(&fano_q, None).unwrap();
        assert_eq!((a.n, a.k, a.lambda, a.blocks.len()), (4, 2, 1, 6));
        assert!(a.verify().verified);

        let mut fl = flats_construction(&fano_q).unwrap();
        assert_eq!((fl.n, fl.k, fl.lambda, fl.blocks.len()), (8, 4, 1, 14));
        assert!(fl.verify().verified);

        let fl = flats_construction(&trivial_design(2, 5, 3, &f(2)).unwrap()).unwrap();
        assert_eq!(fl.blocks.len(), 620);
        assert_eq!(int(&fl.params().r), 155);
    }

    #[test]
    fn construction_errors() {
        let d = trivial_design(1, 3, 2, &f(2)).unwrap();
        assert_eq!(
            projective_version(&d).unwrap_err(),
            Error::ProjectiveNeedsT2(1)
        );
        assert_eq!(
            affine_version(&d, None).unwrap_err(),
            Error::AffineNeedsT2(1)
        );
        let d4 = trivial_design(2, 3, 2, &f(4)).unwrap();
        assert_eq!(flats_construction(&d4).unwrap_err(), Error::FlatsNeedQ2(4));
    }

    #[test]
    fn affine_other_hyperplane() {
        let ctx = f(2);
        let d = trivial_design(2, 4, 2, &ctx).unwrap();
        let normal = vec![
            FieldElement(0),
            FieldElement(1),
            FieldElement(1),
            FieldElement(0),
        ];
        let mut a = affine_version(&d, Some(&normal)).unwrap();
        assert_eq!((a.n, a.k), (8, 2));
        assert!(a.verify().verified);
        assert!(a.blocks.iter().all(|b| b.len() == 2));
    }

    #[test]
    fn design_files_roundtrip() {
        let d = trivial_design(2, 3, 2, &f(4)).unwrap();
        let text = emit_qdesign(&d);
        let back = parse_qdesign(&text).unwrap();
        assert_eq!(back.blocks, d.blocks);
        assert_eq!(emit_qdesign(&back), text);

        let c = fano();
        let text = emit_cdesign(&c);
        assert_eq!(emit_cdesign(&parse_cdesign(&text).unwrap()), text);
    }

    #[test]
    fn qdesign_loader_canonicalises_and_rejects_duplicates() {
        let text =
            "# lines of PG(2,2)\nqdesign t=2 v=3 k=2 lambda=1 q=2\n1 1 0; 0 1 0\n0 0 1;0 1 0\n";
        let d = parse_qdesign(text).unwrap();
        assert_eq!(d.ctx.modulus(), 2);
        assert!(d.blocks.iter().all(|b| b.is_rref()));
        let dup = "qdesign t=2 v=3 k=2 lambda=1 q=2 poly=2\n1 0 0; 0 1 0\n1 1 0; 0 1 0\n";
        assert_eq!(
            parse_qdesign(dup).unwrap_err(),
            Error::DuplicateBlock { line: 3 }
        );
        let low_rank = "qdesign t=2 v=3 k=2 lambda=1 q=2\n1 0 0; 1 0 0\n";
        assert!(parse_qdesign(low_rank).is_err());
        let dup_c = "cdesign t=2 n=4 k=2 lambda=1\n0 1\n0 1\n";
        assert_eq!(
            parse_cdesign(dup_c).unwrap_err(),
            Error::DuplicateBlock { line: 3 }
        );
        assert!(matches!(
            parse_design(dup_c),
            Err(Error::DuplicateBlock { .. })
        ));
        assert!(parse_design("pmatrix rows=0 cols=0 p=2").is_err());
    }
}
