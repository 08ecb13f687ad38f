use proptest::prelude::*;

use num_traits::ToPrimitive;
use qdesign_codes::codes::{build_code, build_code_from, BinaryCode, CodeSource};
use qdesign_codes::decoders::{
    ell_one_step, measure_decoding_radius, DecodeStatus, Decoder, OneStepDecoder, TwoStepDecoder,
};
use qdesign_codes::designs::{
    affine_version, projective_version, trivial_design, CombinatorialDesign,
};
use qdesign_codes::field::FieldCtx;

fn complete_design(n: usize, k: usize) -> CombinatorialDesign {
    let mut blocks = Vec::new();
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize == k {
            blocks.push((0..n as u32).filter(|i| mask >> i & 1 == 1).collect());
        }
    }
    let lambda = qdesign_codes::designs::binomial(n as i64 - 2, k as i64 - 2)
        .to_u64()
        .unwrap();
    CombinatorialDesign::new(n, 2, k, lambda, blocks).unwrap()
}

fn geometric(v: usize, k: usize, q: u32, affine: bool) -> CombinatorialDesign {
    let d = trivial_design(2, v, k, &FieldCtx::with_order(q).unwrap()).unwrap();
    if affine {
        affine_version(&d, None).unwrap()
    } else {
        projective_version(&d).unwrap()
    }
}

fn pg_code(v: usize, k: usize) -> BinaryCode {
    let d = trivial_design(2, v, k, &FieldCtx::with_order(2).unwrap()).unwrap();
    build_code_from(
        &projective_version(&d).unwrap(),
        2,
        CodeSource::Projective { v, k, q: 2 },
    )
    .unwrap()
}

fn r_and_lambda(c: &CombinatorialDesign) -> (u64, u64) {
    let p = c.params();
    (
        p.r_int().unwrap().to_u64().unwrap(),
        p.lambda_at(2).unwrap().to_u64().unwrap(),
    )
}

/// N^T N = (r - λ) I + λ J, so p not dividing r - λ forces rank >= n - 1,
/// and p not dividing (r - λ) r k forces full rank.
fn check_hamada_divisibility(c: &CombinatorialDesign) {
    let (r, lambda) = r_and_lambda(c);
    let rank = build_code(c, 2).unwrap().rank;
    let n = c.n;
    if (r - lambda) % 2 == 1 {
        assert!(rank + 1 >= n, "n={n} k={} rank={rank}", c.k);
        if r % 2 == 1 && c.k % 2 == 1 {
            assert_eq!(rank, n, "n={n} k={}", c.k);
        }
    }
    assert!(rank <= n.min(c.blocks.len()));
}

#[test]
fn repetition_number_matches_derived_value() {
    for c in [
        geometric(4, 2, 2, false),
        geometric(5, 3, 2, false),
        geometric(3, 2, 3, false),
        geometric(4, 3, 2, true),
        geometric(3, 2, 4, true),
        complete_design(7, 3),
    ] {
        let (r, _) = r_and_lambda(&c);
        for x in 0..c.n as u32 {
            assert_eq!(c.blocks.iter().filter(|b| b.contains(&x)).count() as u64, r);
        }
    }
}

#[test]
fn hamada_divisibility_on_geometric_designs() {
    for (v, k, q, affine) in [
        (3, 2, 2, false),
        (4, 2, 2, false),
        (4, 3, 2, false),
        (5, 2, 2, false),
        (3, 2, 3, false),
        (4, 2, 3, false),
        (3, 2, 4, false),
        (4, 2, 2, true),
        (4, 2, 3, true),
        (3, 2, 5, true),
    ] {
        check_hamada_divisibility(&geometric(v, k, q, affine));
    }
}

#[test]
fn radius_is_at_least_ell() {
    for (v, k) in [(3, 2), (4, 2), (4, 3), (5, 2), (5, 3)] {
        let code = pg_code(v, k);
        let dec = OneStepDecoder::new(&code).unwrap();
        let ell = ell_one_step(dec.r, dec.lambda) as usize;
        let rep = measure_decoding_radius(&dec, 1 << 15, ell + 1, 11);
        assert!(
            rep.certified_radius >= ell,
            "({v},{k}): {} < {ell}",
            rep.certified_radius
        );
    }
}

/// Flats codes are decoded with the 3-design's own checks; the measured
/// radius must reach the capability listed for the row.
#[test]
fn flats_radius_reaches_table_ell() {
    use qdesign_codes::codes::DistanceMode;
    use qdesign_codes::designs::flats_construction;
    use qdesign_codes::table::{cmd_table, TableRowSpec};
    for (v, k) in [(3, 2), (4, 2), (4, 3), (5, 2), (5, 4)] {
        let d = trivial_design(2, v, k, &FieldCtx::with_order(2).unwrap()).unwrap();
        let row = cmd_table(&TableRowSpec::new(2, v, k, d.lambda, 2, DistanceMode::Flats)).unwrap();
        let code = build_code_from(
            &flats_construction(&d).unwrap(),
            2,
            CodeSource::Flats { v, k },
        )
        .unwrap();
        assert_eq!(code.dim() as u64, row.dim.to_u64().unwrap());
        let dec = OneStepDecoder::new(&code).unwrap();
        let ell = row.ell as usize;
        let rep = measure_decoding_radius(&dec, 1 << 16, ell, 5);
        assert!(rep.certified_radius >= ell, "flats ({v},{k}): {} < {ell}", rep.certified_radius);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn complete_designs_obey_hamada_divisibility(n in 4usize..10, k in 2usize..5) {
        prop_assume!(k < n);
        check_hamada_divisibility(&complete_design(n, k));
    }

    #[test]
    fn one_step_output_satisfies_every_check(bits in proptest::collection::vec(0u8..2, 31)) {
        let code = pg_code(5, 3);
        let dec = OneStepDecoder::new(&code).unwrap();
        let o = dec.decode(&bits).unwrap();
        if o.status == DecodeStatus::Decoded {
            prop_assert!(code.is_codeword(&o.word));
        }
    }

    #[test]
    fn two_step_output_satisfies_every_check(bits in proptest::collection::vec(0u8..2, 31)) {
        let code = pg_code(5, 3);
        let step2 = trivial_design(2, 5, 2, &FieldCtx::with_order(2).unwrap()).unwrap();
        let dec = TwoStepDecoder::new(&code, &step2).unwrap();
        let o = dec.decode(&bits).unwrap();
        if o.status == DecodeStatus::Decoded {
            prop_assert!(code.is_codeword(&o.word));
        }
    }
}
