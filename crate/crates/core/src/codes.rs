//! Codes whose parity checks are the blocks of a design, together with the
//! closed-form rank and distance results for geometric designs.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::designs::{binomial, CombinatorialDesign, DesignParams};
use crate::error::{Error, Result};
use crate::geometry::gaussian_coefficient;
use crate::matrix::{binary_null_space, matrix_rank_p, PrimeMatrix};

/// Where the checks of a code came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeSource {
    /// Projective version of a design of k-subspaces of F_q^v.
    Projective { v: usize, k: usize, q: u32 },
    /// Affine version of a design of k-subspaces of F_q^v.
    Affine { v: usize, k: usize, q: u32 },
    /// Flats of a design of k-subspaces of F_2^v.
    Flats { v: usize, k: usize },
    /// Anything else.
    Combinatorial,
}

/// Block-point incidence matrix over F_2; row i is block i.
pub fn incidence_matrix(d: &CombinatorialDesign) -> PrimeMatrix {
    let mut m = PrimeMatrix::new_binary(d.n);
    for b in &d.blocks {
        m.push_support(b)
            .expect("design blocks lie inside the ground set");
    }
    m
}

/// Linear code over F_p with the design's blocks as parity checks.
#[derive(Debug, Clone)]
pub struct BinaryCode {
    pub n: usize,
    pub p: u32,
    pub checks: PrimeMatrix,
    /// Support of each check row.
    pub check_sets: Vec<Vec<u32>>,
    pub rank: usize,
    pub params: DesignParams,
    pub source: CodeSource,
}

impl BinaryCode {
    pub fn dim(&self) -> usize {
        self.n - self.rank
    }

    /// Whether `w` (0/1 entries) satisfies every check.
    pub fn is_codeword(&self, w: &[u8]) -> bool {
        self.unsatisfied(w) == 0
    }

    /// Number of checks with odd parity on `w`.
    pub fn unsatisfied(&self, w: &[u8]) -> usize {
        self.check_sets
            .iter()
            .filter(|c| c.iter().fold(0u8, |acc, &i| acc ^ w[i as usize]) == 1)
            .count()
    }

    /// Basis of the code as packed words.
    pub fn generator(&self) -> Result<Vec<Vec<u64>>> {
        binary_null_space(&self.checks)
    }
}

pub fn build_code(d: &CombinatorialDesign, p: u32) -> Result<BinaryCode> {
    build_code_from(d, p, CodeSource::Combinatorial)
}

pub fn build_code_from(d: &CombinatorialDesign, p: u32, source: CodeSource) -> Result<BinaryCode> {
    let checks = if p == 2 {
        incidence_matrix(d)
    } else {
        PrimeMatrix::from_supports(p, d.n, &d.blocks)?
    };
    let rank = matrix_rank_p(&checks, p)?;
    Ok(BinaryCode {
        n: d.n,
        p,
        checks,
        check_sets: d.blocks.clone(),
        rank,
        params: d.params(),
        source,
    })
}

/// One tuple of the rank formula with its product of inner sums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamadaTerm {
    pub s: Vec<usize>,
    pub factors: Vec<BigInt>,
    pub product: BigInt,
}

/// The tuple sum behind [`hamada_rank`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamadaBreakdown {
    pub v: usize,
    pub k: usize,
    pub p: u32,
    pub m: u32,
    pub terms: Vec<HamadaTerm>,
    pub total: BigInt,
}

impl fmt::Display for HamadaBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "hamada v={} k={} p={} m={}",
            self.v, self.k, self.p, self.m
        )?;
        for t in &self.terms {
            let factors: Vec<String> = t.factors.iter().map(|x| x.to_string()).collect();
            writeln!(
                f,
                "  s={:?} factors=[{}] product={}",
                t.s,
                factors.join(", "),
                t.product
            )?;
        }
        write!(f, "  total={}", self.total)
    }
}

fn signed_binomial(n: i64, k: i64) -> BigInt {
    BigInt::from(binomial(n, k))
}

/// Inner sum of the rank formula for `d = s_{j+1} p - s_j`.
fn hamada_factor(v: usize, p: u32, d: i64) -> BigInt {
    let (v, p) = (v as i64, p as i64);
    let mut acc = BigInt::zero();
    for i in 0..=d / p {
        let term = signed_binomial(v, i) * signed_binomial(v - 1 + d - i * p, v - 1);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Every admissible tuple `(s_0, .., s_{m-1})` and its contribution to the
/// p-rank of the points/k-subspaces design of PG(v-1, p^m).
pub fn hamada_breakdown(v: usize, k: usize, p: u32, m: u32) -> HamadaBreakdown {
    let m_us = m as usize;
    let mut terms = Vec::new();
    let mut total = BigInt::zero();
    if k <= v && m >= 1 {
        let width = v - k + 1;
        let count = width.pow(m);
        for code in 0..count {
            let mut c = code;
            let s: Vec<usize> = (0..m_us)
                .map(|_| {
                    let x = k + c % width;
                    c /= width;
                    x
                })
                .collect();
            let mut factors = Vec::with_capacity(m_us);
            let mut ok = true;
            for j in 0..m_us {
                let d = s[(j + 1) % m_us] as i64 * p as i64 - s[j] as i64;
                if d < 0 || d > v as i64 * (p as i64 - 1) {
                    ok = false;
                    break;
                }
                factors.push(hamada_factor(v, p, d));
            }
            if !ok {
                continue;
            }
            let product: BigInt = factors.iter().product();
            total += &product;
            terms.push(HamadaTerm {
                s,
                factors,
                product,
            });
        }
    }
    HamadaBreakdown {
        v,
        k,
        p,
        m,
        terms,
        total,
    }
}

/// Hamada's p-rank of the design of points and k-subspaces of F_q^v,
/// `q = p^m`.
pub fn hamada_rank(v: usize, k: usize, p: u32, m: u32) -> BigUint {
    let total = hamada_breakdown(v, k, p, m).total;
    if total.is_negative() {
        BigUint::zero()
    } else {
        total.to_biguint().unwrap()
    }
}

/// `sum_{i=0}^{v-k} C(v, i)`, the 2-rank of the binary projective design.
pub fn binary_rank_formula(v: usize, k: usize) -> BigUint {
    if k > v {
        return BigUint::zero();
    }
    (0..=v - k).map(|i| binomial(v as i64, i as i64)).sum()
}

/// 2-rank of the affine version of the trivial binary design: the code is
/// the Reed-Muller code R(k-2, v-1).
pub fn affine_binary_rank(v: usize, k: usize) -> BigUint {
    if k == 0 || v == 0 {
        return BigUint::zero();
    }
    binary_rank_formula(v - 1, k - 1)
}

/// 2-rank of the flats design of the trivial binary design, i.e. of the
/// Reed-Muller code R(k-1, v).
pub fn flats_binary_rank(v: usize, k: usize) -> BigUint {
    binary_rank_formula(v, k)
}

/// `[v-k+1 1]_q + 1`.
pub fn bch_bound(v: usize, k: usize, q: u32) -> BigUint {
    gaussian_coefficient(v as i64 - k as i64 + 1, 1, q as u64) + BigUint::one()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMode {
    Projective,
    Affine,
    Flats,
}

impl std::str::FromStr for DistanceMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projective" => Ok(DistanceMode::Projective),
            "affine" => Ok(DistanceMode::Affine),
            "flats" => Ok(DistanceMode::Flats),
            _ => Err(Error::Unsupported(format!("unknown mode {s:?}"))),
        }
    }
}

impl fmt::Display for DistanceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DistanceMode::Projective => "projective",
            DistanceMode::Affine => "affine",
            DistanceMode::Flats => "flats",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceBounds {
    pub lower: BigUint,
    pub exact: Option<BigUint>,
}

/// Lower bound and, where known, the exact minimum distance of the code of
/// the trivial design of k-subspaces of F_q^v.
pub fn distance_bounds(v: usize, k: usize, q: u32, mode: DistanceMode) -> DistanceBounds {
    let qb = BigUint::from(q);
    let pow2 = |e: usize| BigUint::one() << e;
    match mode {
        DistanceMode::Projective => {
            let lower = gaussian_coefficient(v as i64 - k as i64 + 1, 1, q as u64);
            let exact = if k + 1 >= v {
                Some(bch_bound(v, k, q))
            } else if q == 2 {
                Some(pow2(v - k + 1))
            } else if q.is_multiple_of(2) {
                Some(BigUint::from(q + 2) * qb.pow((v - k - 1) as u32))
            } else {
                None
            };
            DistanceBounds { lower, exact }
        }
        DistanceMode::Affine => DistanceBounds {
            lower: BigUint::from(2u32) * qb.pow((v - k) as u32),
            exact: (q == 2).then(|| pow2(v - k + 1)),
        },
        DistanceMode::Flats => DistanceBounds {
            lower: pow2(v - k + 1),
            exact: Some(pow2(v - k + 1)),
        },
    }
}

pub const DEFAULT_DISTANCE_CAP: usize = 24;

/// Minimum weight of a nonzero codeword, by Gray-code walk over all
/// `2^dim - 1` messages. Returns `n + 1` when the code is zero.
pub fn min_distance_bruteforce(code: &BinaryCode, cap: usize) -> Result<usize> {
    if code.p != 2 {
        return Err(Error::Unsupported(
            "minimum distance search is binary only".into(),
        ));
    }
    let dim = code.dim();
    if dim > cap {
        return Err(Error::SearchRefused { dim, cap });
    }
    let basis = code.generator()?;
    debug_assert_eq!(basis.len(), dim);
    min_weight_of_span(&basis, code.n)
}

fn min_weight_of_span(basis: &[Vec<u64>], n: usize) -> Result<usize> {
    let dim = basis.len();
    if dim == 0 {
        return Ok(n + 1);
    }
    let words = basis[0].len();
    let mut cur = vec![0u64; words];
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << dim) {
        let g = &basis[i.trailing_zeros() as usize];
        let mut w = 0usize;
        for (c, x) in cur.iter_mut().zip(g) {
            *c ^= x;
            w += c.count_ones() as usize;
        }
        best = best.min(w);
    }
    Ok(best)
}

/// Matrix rank next to the formulas that predict it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub matrix_rank: usize,
    pub hamada_rank: Option<BigUint>,
    pub binary_simplified: Option<BigUint>,
}

impl RankReport {
    /// The formula values that differ from the matrix rank.
    pub fn disagreements(&self) -> Vec<String> {
        let mr = BigUint::from(self.matrix_rank);
        let mut out = Vec::new();
        if let Some(h) = self.hamada_rank.as_ref().filter(|h| **h != mr) {
            out.push(format!("hamada_rank={h} but matrix_rank={mr}"));
        }
        if let Some(b) = self.binary_simplified.as_ref().filter(|b| **b != mr) {
            out.push(format!("binary_simplified={b} but matrix_rank={mr}"));
        }
        out
    }

    pub fn to_kv(&self) -> String {
        let opt = |x: &Option<BigUint>| x.as_ref().map_or("-".to_string(), |x| x.to_string());
        format!(
            "matrix_rank={}\nhamada_rank={}\nbinary_simplified={}\nagree={}\n",
            self.matrix_rank,
            opt(&self.hamada_rank),
            opt(&self.binary_simplified),
            self.disagreements().is_empty()
        )
    }
}

/// Rank report for a code, filling in the formulas that apply to its
/// source.
pub fn rank_report(code: &BinaryCode) -> RankReport {
    let (hamada, simplified) = match code.source {
        CodeSource::Projective { v, k, q } => {
            let (p, m) = crate::field::prime_power(q).unwrap_or((q, 1));
            let h = (p == code.p).then(|| hamada_rank(v, k, p, m));
            let b = (q == 2 && code.p == 2).then(|| binary_rank_formula(v, k));
            (h, b)
        }
        CodeSource::Affine { v, k, q: 2 } if code.p == 2 => (None, Some(affine_binary_rank(v, k))),
        CodeSource::Flats { v, k } if code.p == 2 => (None, Some(flats_binary_rank(v, k))),
        _ => (None, None),
    };
    RankReport {
        matrix_rank: code.rank,
        hamada_rank: hamada,
        binary_simplified: simplified,
    }
}

/// Summary of a code as emitted by `code params`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeReport {
    pub n: usize,
    pub rank: usize,
    pub dim: usize,
    pub ell: Option<u64>,
    pub d_bch: Option<BigUint>,
    pub d_lower: Option<BigUint>,
    pub d_exact: Option<BigUint>,
}

impl CodeReport {
    pub fn to_kv(&self) -> String {
        let opt = |x: &Option<BigUint>| x.as_ref().map_or("-".to_string(), |x| x.to_string());
        format!(
            "n={}\nrank={}\ndim={}\nell={}\nd_bch={}\nd_lower={}\nd_exact={}\n",
            self.n,
            self.rank,
            self.dim,
            self.ell.map_or("-".to_string(), |x| x.to_string()),
            opt(&self.d_bch),
            opt(&self.d_lower),
            opt(&self.d_exact)
        )
    }
}

pub fn code_report(code: &BinaryCode) -> CodeReport {
    let ell = crate::decoders::ell_for_params(&code.params);
    let (d_bch, bounds) = match code.source {
        CodeSource::Projective { v, k, q } => (
            Some(bch_bound(v, k, q)),
            Some(distance_bounds(v, k, q, DistanceMode::Projective)),
        ),
        CodeSource::Affine { v, k, q } => {
            (None, Some(distance_bounds(v, k, q, DistanceMode::Affine)))
        }
        CodeSource::Flats { v, k } => (None, Some(distance_bounds(v, k, 2, DistanceMode::Flats))),
        CodeSource::Combinatorial => (None, None),
    };
    CodeReport {
        n: code.n,
        rank: code.rank,
        dim: code.dim(),
        ell,
        d_bch,
        d_lower: bounds.as_ref().map(|b| b.lower.clone()),
        d_exact: bounds.and_then(|b| b.exact),
    }
}

/// Small integer view of a [`BigUint`], for tests and reports.
pub fn small(x: &BigUint) -> u64 {
    x.to_u64().expect("value fits in u64")
}
