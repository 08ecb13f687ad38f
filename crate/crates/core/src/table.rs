//! Code parameters for known subspace designs, one table row at a time.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::codes::{
    affine_binary_rank, binary_rank_formula, flats_binary_rank, hamada_rank, DistanceMode,
};
use crate::decoders::ell_for_params;
use crate::designs::{derive_params_comb, derive_params_q};
use crate::error::{Error, Result};
use crate::field::prime_power;
use crate::geometry::gaussian_coefficient;

/// A t-(v,k,λ)_q design and the construction applied to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableRowSpec {
    pub t: usize,
    pub v: usize,
    pub k: usize,
    pub lambda_known: u64,
    pub q: u32,
    pub mode: DistanceMode,
}

impl TableRowSpec {
    pub const fn new(
        t: usize,
        v: usize,
        k: usize,
        lambda_known: u64,
        q: u32,
        mode: DistanceMode,
    ) -> Self {
        TableRowSpec {
            t,
            v,
            k,
            lambda_known,
            q,
            mode,
        }
    }

    pub fn label(&self) -> String {
        format!(
            "{}-({},{},{})_{}",
            self.t, self.v, self.k, self.lambda_known, self.q
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowReport {
    pub spec: TableRowSpec,
    pub n: BigUint,
    pub dim: BigUint,
    pub ell: u64,
    pub r: BigUint,
    pub lambda_min: BigUint,
    pub lambda_max: BigUint,
    /// `lambda_max / lambda_known` to one decimal, absent when equal.
    pub speedup: Option<String>,
}

/// `a / b` rounded half-up to one decimal.
pub fn format_ratio(a: &BigUint, b: &BigUint) -> String {
    let tenths = (a * 20u32 + b) / (b * 2u32);
    format!("{}.{}", &tenths / 10u32, &tenths % 10u32)
}

fn int_or_err(x: Option<BigUint>, what: &str) -> Result<BigUint> {
    x.ok_or_else(|| Error::Inadmissible(format!("{what} is not an integer")))
}

/// Derives n, dim, ℓ, r, λ_min, λ_max and the speedup for one row.
///
/// The dimension is the one of the code of the trivial design; rows with
/// smaller λ are assumed to have the same rank.
pub fn cmd_table(spec: &TableRowSpec) -> Result<RowReport> {
    let TableRowSpec {
        t,
        v,
        k,
        lambda_known,
        q,
        mode,
    } = *spec;
    let params = derive_params_q(t as u64, v as u64, k as u64, lambda_known, q as u64)?;
    let violations = params.violations();
    if !violations.is_empty() {
        return Err(Error::Inadmissible(format!(
            "{}: {}",
            params.label(),
            violations.join("; ")
        )));
    }
    if lambda_known == 0 {
        return Err(Error::Inadmissible("lambda must be positive".into()));
    }
    let (p, m) = prime_power(q).ok_or_else(|| Error::Field(format!("{q} is not a prime power")))?;
    let q64 = q as u64;
    let lambda_2 = int_or_err(params.lambda_at(2), "lambda_2")?;
    let comb = match mode {
        DistanceMode::Projective => {
            if t < 2 {
                return Err(Error::ProjectiveNeedsT2(t));
            }
            let n = gaussian_coefficient(v as i64, 1, q64).to_u64().unwrap();
            let kk = gaussian_coefficient(k as i64, 1, q64).to_u64().unwrap();
            derive_params_comb(2, n, kk, lambda_2.to_u64().unwrap())?
        }
        DistanceMode::Affine => {
            if t < 2 {
                return Err(Error::AffineNeedsT2(t));
            }
            let (n, kk) = (q64.pow(v as u32 - 1), q64.pow(k as u32 - 1));
            if q == 2 && t == 3 {
                derive_params_comb(3, n, kk, lambda_known)?
            } else {
                derive_params_comb(2, n, kk, lambda_2.to_u64().unwrap())?
            }
        }
        DistanceMode::Flats => {
            if q != 2 {
                return Err(Error::FlatsNeedQ2(q));
            }
            if t < 2 {
                return Err(Error::InvalidDesign(format!(
                    "flats construction needs t >= 2 (got t = {t})"
                )));
            }
            derive_params_comb(3, 1 << v, 1 << k, lambda_2.to_u64().unwrap())?
        }
    };
    let n = BigUint::from(comb.v);
    let rank = match mode {
        DistanceMode::Projective if q == 2 => binary_rank_formula(v, k),
        DistanceMode::Projective => hamada_rank(v, k, p, m),
        DistanceMode::Affine if q == 2 => affine_binary_rank(v, k),
        DistanceMode::Affine => {
            return Err(Error::Unsupported(
                "affine rank prediction is only available for q = 2".into(),
            ))
        }
        DistanceMode::Flats => flats_binary_rank(v, k),
    };
    let r = match mode {
        DistanceMode::Flats => int_or_err(comb.r_int(), "r")?,
        _ => int_or_err(params.r_int(), "r")?,
    };
    let ell =
        ell_for_params(&comb).ok_or_else(|| Error::Inadmissible("capability undefined".into()))?;
    let lambda_max = gaussian_coefficient((v - t) as i64, (k - t) as i64, q64);
    let known = BigUint::from(lambda_known);
    let speedup = (lambda_max != known).then(|| format_ratio(&lambda_max, &known));
    Ok(RowReport {
        spec: *spec,
        dim: &n - rank.min(n.clone()),
        n,
        ell,
        r,
        lambda_min: params.lambda_min(),
        lambda_max,
        speedup,
    })
}

pub const TSV_HEADER: &str = "design\tlambda_min\tlambda_max\tn\tdim\tell\tr\tspeedup";

impl RowReport {
    pub fn to_tsv(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.spec.label(),
            self.lambda_min,
            self.lambda_max,
            self.n,
            self.dim,
            self.ell,
            self.r,
            self.speedup.as_deref().unwrap_or("")
        )
    }

    pub fn to_kv(&self) -> String {
        format!(
            "design={}\nmode={}\nlambda_min={}\nlambda_max={}\nn={}\ndim={}\nell={}\nr={}\nspeedup={}\n",
            self.spec.label(),
            self.spec.mode,
            self.lambda_min,
            self.lambda_max,
            self.n,
            self.dim,
            self.ell,
            self.r,
            self.speedup.as_deref().unwrap_or("-")
        )
    }

    /// `[n, dim, ell]`.
    pub fn code_triple(&self) -> String {
        format!("[{}, {}, {}]", self.n, self.dim, self.ell)
    }
}

/// Best known λ for small binary 2-designs (t, v, k, λ).
const BINARY_DESIGNS: [(usize, usize, usize, u64); 41] = [
    (2, 3, 2, 1),
    (2, 4, 2, 1),
    (2, 4, 3, 3),
    (2, 5, 2, 1),
    (2, 5, 3, 7),
    (2, 5, 4, 7),
    (2, 6, 2, 1),
    (2, 6, 3, 3),
    (2, 6, 4, 35),
    (2, 6, 5, 15),
    (2, 7, 2, 1),
    (2, 7, 3, 3),
    (2, 7, 4, 15),
    (2, 7, 5, 155),
    (2, 7, 6, 31),
    (2, 8, 2, 1),
    (2, 8, 3, 21),
    (2, 8, 4, 7),
    (2, 8, 5, 465),
    (2, 8, 6, 651),
    (2, 8, 7, 63),
    (2, 9, 2, 1),
    (2, 9, 3, 7),
    (2, 9, 4, 21),
    (2, 9, 5, 93),
    (2, 9, 6, 651),
    (2, 9, 8, 127),
    (2, 10, 2, 1),
    (2, 10, 3, 15),
    (2, 10, 4, 595),
    (2, 10, 5, 765),
    (2, 10, 9, 255),
    (2, 11, 2, 1),
    (2, 11, 3, 7),
    (2, 11, 10, 511),
    (2, 12, 2, 1),
    (2, 12, 3, 1023),
    (2, 12, 11, 1023),
    (2, 13, 2, 1),
    (2, 13, 3, 1),
    (2, 13, 12, 2047),
];

/// The catalogued rows for a construction and field order, in table order.
pub fn known_rows(mode: DistanceMode, q: u32) -> Vec<TableRowSpec> {
    match (mode, q) {
        (DistanceMode::Projective, 4) => vec![
            TableRowSpec::new(2, 7, 3, 21, 4, mode),
            TableRowSpec::new(2, 7, 4, 357, 4, mode),
        ],
        (_, 2) => {
            let mut rows: Vec<TableRowSpec> = BINARY_DESIGNS
                .iter()
                .map(|&(t, v, k, l)| TableRowSpec::new(t, v, k, l, 2, mode))
                .collect();
            if mode == DistanceMode::Affine {
                let at = rows.iter().position(|r| (r.v, r.k) == (8, 4)).unwrap() + 1;
                rows.insert(at, TableRowSpec::new(3, 8, 4, 11, 2, mode));
            }
            rows
        }
        _ => Vec::new(),
    }
}

/// Every catalogued row.
pub fn all_known_rows() -> Vec<TableRowSpec> {
    let mut rows = known_rows(DistanceMode::Projective, 2);
    rows.extend(known_rows(DistanceMode::Affine, 2));
    rows.extend(known_rows(DistanceMode::Flats, 2));
    rows.extend(known_rows(DistanceMode::Projective, 4));
    rows
}

/// Smallest λ for which the row's parameters are admissible, as a plain
/// scan; used to cross-check [`crate::designs::DesignParams::lambda_min`].
pub fn lambda_min_by_scan(t: usize, v: usize, k: usize, q: u32, limit: u64) -> Option<u64> {
    (1..=limit).find(|&l| {
        derive_params_q(t as u64, v as u64, k as u64, l, q as u64)
            .map(|p| p.admissible())
            .unwrap_or(false)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: usize, v: usize, k: usize, l: u64, q: u32, mode: DistanceMode) -> RowReport {
        cmd_table(&TableRowSpec::new(t, v, k, l, q, mode)).unwrap()
    }

    #[test]
    fn projective_row() {
        let r = row(2, 9, 5, 93, 2, DistanceMode::Projective);
        assert_eq!(r.code_triple(), "[511, 255, 8]");
        assert_eq!(r.r, BigUint::from(1581u32));
        assert_eq!(r.speedup.as_deref(), Some("127.0"));
        assert_eq!(r.lambda_min, BigUint::from(31u32));
        assert_eq!(r.lambda_max, BigUint::from(11811u32));
    }

    #[test]
    fn affine_rows() {
        let r = row(2, 3, 2, 1, 2, DistanceMode::Affine);
        assert_eq!(
            (r.code_triple(), r.r.to_u64()),
            ("[4, 1, 1]".into(), Some(3))
        );
        assert_eq!(r.speedup, None);
        let r = row(3, 8, 4, 11, 2, DistanceMode::Affine);
        assert_eq!(r.code_triple(), "[128, 29, 9]");
        assert_eq!(r.r, BigUint::from(4191u32));
        assert_eq!(r.lambda_max, BigUint::from(31u32));
        assert_eq!(r.lambda_min, BigUint::from(1u32));
        assert_eq!(r.speedup.as_deref(), Some("2.8"));
    }

    #[test]
    fn flats_and_q4_rows() {
        let r = row(2, 6, 3, 3, 2, DistanceMode::Flats);
        assert_eq!(r.code_triple(), "[64, 22, 5]");
        assert_eq!(r.r, BigUint::from(279u32));
        let r = row(2, 7, 4, 357, 4, DistanceMode::Projective);
        assert_eq!(r.code_triple(), "[5461, 3185, 32]");
        assert_eq!(r.r, BigUint::from(23205u32));
        assert_eq!(r.speedup.as_deref(), Some("16.2"));
        assert_eq!(r.lambda_min, BigUint::from(17u32));
    }

    #[test]
    fn inadmissible_and_unsupported() {
        let e = cmd_table(&TableRowSpec::new(2, 6, 3, 1, 2, DistanceMode::Projective)).unwrap_err();
        assert!(
            matches!(e, Error::Inadmissible(ref m) if m.contains("lambda_1")),
            "{e}"
        );
        assert_eq!(
            cmd_table(&TableRowSpec::new(2, 4, 2, 1, 4, DistanceMode::Flats)).unwrap_err(),
            Error::FlatsNeedQ2(4)
        );
    }

    #[test]
    fn ratio_rounding() {
        let f = |a: u32, b: u32| format_ratio(&BigUint::from(a), &BigUint::from(b));
        assert_eq!(f(31, 3), "10.3");
        assert_eq!(f(1, 4), "0.3");
        assert_eq!(f(2047, 1), "2047.0");
        assert_eq!(f(31, 11), "2.8");
    }

    #[test]
    fn catalogue_sizes() {
        assert_eq!(known_rows(DistanceMode::Projective, 2).len(), 41);
        assert_eq!(known_rows(DistanceMode::Affine, 2).len(), 42);
        assert_eq!(known_rows(DistanceMode::Flats, 2).len(), 41);
        assert_eq!(all_known_rows().len(), 126);
        for spec in all_known_rows() {
            let rep = cmd_table(&spec).unwrap();
            let scan = lambda_min_by_scan(spec.t, spec.v, spec.k, spec.q, 100_000).unwrap();
            assert_eq!(rep.lambda_min, BigUint::from(scan), "{}", spec.label());
        }
    }
}
