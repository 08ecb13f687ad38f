//! One-step and two-step majority-logic decoding.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::codes::{BinaryCode, CodeSource};
use crate::designs::{binomial, projective_version, DesignKind, DesignParams, SubspaceDesign};
use crate::error::{Error, Result};
use crate::geometry::gaussian_coefficient;

/// `floor((r + λ - 1) / 2λ)`.
pub fn ell_one_step(r: u64, lambda: u64) -> u64 {
    (r + lambda - 1) / (2 * lambda)
}

/// Capability of a 3-design with repetition number r and pair/triple
/// indices λ2, λ3: `floor((r + λ2 - 3 λ3 - 1) / (2 (λ2 - λ3)))`.
///
/// Falls back to [`ell_one_step`] when λ2 = λ3.
pub fn ell_three_design(r: u64, lambda2: u64, lambda3: u64) -> u64 {
    if lambda2 <= lambda3 {
        return ell_one_step(r, lambda2);
    }
    (r + lambda2).saturating_sub(3 * lambda3 + 1) / (2 * (lambda2 - lambda3))
}

/// Majority-logic capability implied by design parameters: the Rudolph
/// bound for 2-designs and subspace designs, the three-design formula
/// for combinatorial 3-designs. `None` when t < 2 or a parameter is not
/// integral.
pub fn ell_for_params(p: &DesignParams) -> Option<u64> {
    if p.t < 2 {
        return None;
    }
    let r = p.r_int()?.to_u64()?;
    let l2 = p.lambda_at(2)?.to_u64()?;
    if l2 == 0 {
        return None;
    }
    match (p.kind, p.t) {
        (DesignKind::Combinatorial, 3) => Some(ell_three_design(r, l2, p.lambda_at(3)?.to_u64()?)),
        _ => Some(ell_one_step(r, l2)),
    }
}

fn pow(q: u64, e: usize) -> BigInt {
    BigInt::from(q).pow(e as u32)
}

/// The two bracketed expressions bounding ℓ for a 2-(v,k,λ)_q design,
/// evaluated exactly before taking floors.
pub fn ell_bounds(v: usize, k: usize, q: u64, lambda: u64) -> (BigInt, BigInt) {
    let x = BigRational::new(pow(q, v - 1) - 1, pow(q, k - 1) - 1);
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let base = (x - BigRational::one()) * &half;
    let extra = BigRational::new(BigInt::one(), BigInt::from(2 * lambda));
    (
        base.floor().to_integer(),
        (base + extra).floor().to_integer(),
    )
}

/// `2 q^(v-1) + q <= q^v + q^(v-k+1) + q^(k-2)`.
pub fn two_step_inequality(v: usize, k: usize, q: u64) -> bool {
    let qb = BigUint::from(q);
    let lhs = BigUint::from(2u32) * qb.pow(v as u32 - 1) + &qb;
    let rhs = qb.pow(v as u32) + qb.pow((v - k + 1) as u32) + qb.pow(k as u32 - 2);
    lhs <= rhs
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapabilityReport {
    /// One-step capability of the step-2 design.
    pub ell_one_step: u64,
    pub ell_bounds: (BigInt, BigInt),
    pub j: u64,
    pub ell_two_step: u64,
    /// Repetition number and λ of the step-2 design.
    pub r: u64,
    pub lambda_2: u64,
    pub half_j: u64,
}

impl CapabilityReport {
    pub fn to_kv(&self) -> String {
        format!(
            "J={}\nhalf_J={}\nr={}\nlambda={}\nell_step2={}\nell_bounds={},{}\nell_two_step={}\n",
            self.j,
            self.half_j,
            self.r,
            self.lambda_2,
            self.ell_one_step,
            self.ell_bounds.0,
            self.ell_bounds.1,
            self.ell_two_step
        )
    }
}

/// Capability of two-step decoding of the code of k-subspaces of F_q^v
/// with a step-2 design of (k-1)-subspaces with pair index λ.
pub fn two_step_capability(v: usize, k: usize, q: u64, lambda: u64) -> Result<CapabilityReport> {
    if k < 3 {
        return Err(Error::TwoStepNeedsK3(k));
    }
    if k > v || lambda == 0 {
        return Err(Error::InvalidDesign(format!(
            "need 3 <= k <= v and lambda >= 1, got v={v} k={k}"
        )));
    }
    let j = gaussian_coefficient((v - k + 1) as i64, 1, q)
        .to_u64()
        .unwrap();
    let num = BigUint::from(lambda) * gaussian_coefficient(v as i64 - 1, 1, q);
    let den = gaussian_coefficient(k as i64 - 2, 1, q);
    if &num % &den != BigUint::from(0u32) {
        return Err(Error::Inadmissible(format!(
            "r = {num}/{den} is not an integer for the step-2 design"
        )));
    }
    let r = (num / den).to_u64().unwrap();
    let ell1 = ell_one_step(r, lambda);
    Ok(CapabilityReport {
        ell_one_step: ell1,
        ell_bounds: ell_bounds(v, k - 1, q, lambda),
        j,
        ell_two_step: ell1.min(j / 2),
        r,
        lambda_2: lambda,
        half_j: j / 2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecodeStatus {
    Decoded,
    DetectedUncorrectable,
    /// Decoded to a codeword other than the one sent; needs an oracle.
    Miscorrected,
}

impl DecodeStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DecodeStatus::Decoded => "decoded",
            DecodeStatus::DetectedUncorrectable => "detected-uncorrectable",
            DecodeStatus::Miscorrected => "miscorrected",
        }
    }
}

/// Operation counts of one decoding run under the per-position cost model:
/// every position evaluates each check through it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Workload {
    pub check_evals: u64,
    pub bit_reads: u64,
}

impl std::ops::AddAssign for Workload {
    fn add_assign(&mut self, o: Self) {
        self.check_evals += o.check_evals;
        self.bit_reads += o.bit_reads;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    pub word: Vec<u8>,
    pub flips: Vec<usize>,
    pub workload: Workload,
}

impl DecodeOutcome {
    /// Marks a decoded result that differs from `sent` as miscorrected.
    pub fn against(mut self, sent: &[u8]) -> Self {
        if self.status == DecodeStatus::Decoded && self.word != sent {
            self.status = DecodeStatus::Miscorrected;
        }
        self
    }

    pub fn to_kv(&self) -> String {
        format!(
            "status={}\nflips={}\nword={}\ncheck_evals={}\nbit_reads={}\n",
            self.status.as_str(),
            self.flips.len(),
            crate::io::format_word(&self.word),
            self.workload.check_evals,
            self.workload.bit_reads
        )
    }
}

pub trait Decoder: Sync {
    fn n(&self) -> usize;
    fn decode(&self, w: &[u8]) -> Result<DecodeOutcome>;
}

fn check_word(w: &[u8], n: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::DecodeInput(format!(
            "word has length {}, expected {n}",
            w.len()
        )));
    }
    if let Some(i) = w.iter().position(|&x| x > 1) {
        return Err(Error::DecodeInput(format!(
            "non-binary symbol at position {i}"
        )));
    }
    Ok(())
}

fn parity(set: &[u32], w: &[u8]) -> u8 {
    set.iter().fold(0, |acc, &i| acc ^ w[i as usize])
}

fn incidence_lists(n: usize, sets: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let mut through = vec![Vec::new(); n];
    for (c, s) in sets.iter().enumerate() {
        for &j in s {
            through[j as usize].push(c as u32);
        }
    }
    through
}

/// Applies the threshold rule given per-check disagreement flags, then
/// verifies the result against `verify_sets`.
fn vote_and_verify(
    w: &[u8],
    through: &[Vec<u32>],
    check_sets: &[Vec<u32>],
    disagrees: &[u8],
    threshold: u64,
    verify_sets: &[Vec<u32>],
    mut workload: Workload,
) -> DecodeOutcome {
    let mut word = w.to_vec();
    let mut flips = Vec::new();
    for (j, checks) in through.iter().enumerate() {
        let u: u64 = checks.iter().map(|&c| disagrees[c as usize] as u64).sum();
        workload.check_evals += checks.len() as u64;
        workload.bit_reads += checks
            .iter()
            .map(|&c| check_sets[c as usize].len() as u64)
            .sum::<u64>();
        if 2 * u > threshold {
            word[j] ^= 1;
            flips.push(j);
        }
    }
    let ok = verify_sets.iter().all(|s| parity(s, &word) == 0);
    DecodeOutcome {
        status: if ok {
            DecodeStatus::Decoded
        } else {
            DecodeStatus::DetectedUncorrectable
        },
        word,
        flips,
        workload,
    }
}

/// Flips position j iff `2 U_j > r + λ - 1`, where U_j counts the failed
/// checks through j. All decisions are taken from the received word.
#[derive(Debug, Clone)]
pub struct OneStepDecoder {
    n: usize,
    checks: Vec<Vec<u32>>,
    through: Vec<Vec<u32>>,
    pub r: u64,
    pub lambda: u64,
}

impl OneStepDecoder {
    /// Uses r and λ_2 of the code's design.
    pub fn new(code: &BinaryCode) -> Result<Self> {
        let r = code.params.r_int().and_then(|x| x.to_u64());
        let l = code.params.lambda_at(2).and_then(|x| x.to_u64());
        match (code.params.t >= 2, r, l) {
            (true, Some(r), Some(l)) if l > 0 => {
                Ok(Self::with_params(code.n, code.check_sets.clone(), r, l))
            }
            _ => Err(Error::InvalidDesign(
                "one-step decoding needs a 2-design with integral r and lambda".into(),
            )),
        }
    }

    pub fn with_params(n: usize, checks: Vec<Vec<u32>>, r: u64, lambda: u64) -> Self {
        let through = incidence_lists(n, &checks);
        OneStepDecoder {
            n,
            checks,
            through,
            r,
            lambda,
        }
    }

    pub fn threshold(&self) -> u64 {
        self.r + self.lambda - 1
    }
}

impl Decoder for OneStepDecoder {
    fn n(&self) -> usize {
        self.n
    }

    fn decode(&self, w: &[u8]) -> Result<DecodeOutcome> {
        check_word(w, self.n)?;
        let syndrome: Vec<u8> = self.checks.iter().map(|c| parity(c, w)).collect();
        Ok(vote_and_verify(
            w,
            &self.through,
            &self.checks,
            &syndrome,
            self.threshold(),
            &self.checks,
            Workload::default(),
        ))
    }
}

/// Two-step decoder for the code of k-subspaces using a design of
/// (k-1)-subspaces.
///
/// Step 1 recovers the parity of every block B by majority over the
/// estimates `sum_{K \ B} w` for the k-spaces K above B; ties fall back to
/// the received parity of B. Step 2 is the one-step rule with the step-1
/// parities as targets.
#[derive(Debug, Clone)]
pub struct TwoStepDecoder {
    n: usize,
    code_checks: Vec<Vec<u32>>,
    blocks: Vec<Vec<u32>>,
    /// For each block B, the point sets K \ B of its superspaces.
    above: Vec<Vec<Vec<u32>>>,
    through: Vec<Vec<u32>>,
    pub r: u64,
    pub lambda: u64,
}

fn difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter()
        .copied()
        .filter(|x| b.binary_search(x).is_err())
        .collect()
}

impl TwoStepDecoder {
    pub fn new(code: &BinaryCode, d: &SubspaceDesign) -> Result<Self> {
        let CodeSource::Projective { v, k, q } = code.source else {
            return Err(Error::AmbientMismatch(
                "two-step decoding needs a projective geometry code".into(),
            ));
        };
        if k < 3 {
            return Err(Error::TwoStepNeedsK3(k));
        }
        if d.v != v || d.q() != q {
            return Err(Error::AmbientMismatch(format!(
                "step-2 design lives in F_{}^{}, code in F_{q}^{v}",
                d.q(),
                d.v
            )));
        }
        if d.k + 1 != k {
            return Err(Error::AmbientMismatch(format!(
                "step-2 blocks have dimension {}, expected {}",
                d.k,
                k - 1
            )));
        }
        let comb = projective_version(d)?;
        let params = comb.params();
        let r = params
            .r_int()
            .and_then(|x| x.to_u64())
            .ok_or_else(|| Error::InvalidDesign("step-2 design has non-integral r".into()))?;
        let above = d
            .blocks
            .par_iter()
            .zip(comb.blocks.par_iter())
            .map(|(b, pts)| {
                b.superspaces(k).map(|ks| {
                    ks.iter()
                        .map(|kk| difference(&kk.points(), pts))
                        .collect::<Vec<_>>()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TwoStepDecoder {
            n: code.n,
            code_checks: code.check_sets.clone(),
            through: incidence_lists(code.n, &comb.blocks),
            blocks: comb.blocks,
            above,
            r,
            lambda: comb.lambda,
        })
    }

    /// Number of superspaces used per block in step 1.
    pub fn j(&self) -> usize {
        self.above.first().map_or(0, |a| a.len())
    }
}

impl Decoder for TwoStepDecoder {
    fn n(&self) -> usize {
        self.n
    }

    fn decode(&self, w: &[u8]) -> Result<DecodeOutcome> {
        check_word(w, self.n)?;
        let mut workload = Workload::default();
        let mut disagrees = Vec::with_capacity(self.blocks.len());
        for (b, ks) in self.blocks.iter().zip(&self.above) {
            let received = parity(b, w);
            let ones = ks.iter().filter(|kb| parity(kb, w) == 1).count();
            workload.check_evals += ks.len() as u64;
            workload.bit_reads += ks.iter().map(|kb| kb.len() as u64).sum::<u64>();
            let est = match (2 * ones).cmp(&ks.len()) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => 0,
                std::cmp::Ordering::Equal => received,
            };
            disagrees.push(est ^ received);
        }
        Ok(vote_and_verify(
            w,
            &self.through,
            &self.blocks,
            &disagrees,
            self.r + self.lambda - 1,
            &self.code_checks,
            workload,
        ))
    }
}

/// Result of a weight-by-weight decoding sweep around the zero codeword.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadiusReport {
    pub certified_radius: usize,
    pub first_failure_weight: Option<usize>,
    pub trials: u64,
    /// Whether every tested weight was swept exhaustively.
    pub exhaustive: bool,
}

impl RadiusReport {
    pub fn to_kv(&self) -> String {
        format!(
            "radius={}\nfirst_failure={}\ntrials={}\nexhaustive={}\n",
            self.certified_radius,
            self.first_failure_weight
                .map_or("-".to_string(), |w| w.to_string()),
            self.trials,
            self.exhaustive
        )
    }
}

fn decodes_to_zero(dec: &dyn Decoder, support: &[usize]) -> bool {
    let mut w = vec![0u8; dec.n()];
    for &i in support {
        w[i] = 1;
    }
    matches!(dec.decode(&w), Ok(o) if o.status == DecodeStatus::Decoded && o.word.iter().all(|&x| x == 0))
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let w = c.len();
    let Some(i) = (0..w).rev().find(|&i| c[i] < n - w + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..w {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Every weight-w error pattern on the zero word, in lexicographic order;
/// returns the first pattern that does not decode back to zero.
pub fn exhaustive_failure(dec: &dyn Decoder, w: usize) -> Option<Vec<usize>> {
    let n = dec.n();
    if w > n {
        return None;
    }
    const BATCH: usize = 1 << 14;
    let mut cur: Vec<usize> = (0..w).collect();
    let mut more = true;
    while more {
        let mut batch = Vec::with_capacity(BATCH);
        while more && batch.len() < BATCH {
            batch.push(cur.clone());
            more = next_combination(&mut cur, n);
        }
        let fail = batch
            .par_iter()
            .position_first(|s| !decodes_to_zero(dec, s));
        if let Some(i) = fail {
            return Some(batch.swap_remove(i));
        }
    }
    None
}

fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Largest w such that all tested error patterns of weight <= w around the
/// zero codeword decode correctly. A weight is swept exhaustively when
/// C(n, w) <= budget and sampled `budget` times otherwise.
pub fn measure_decoding_radius(
    dec: &dyn Decoder,
    budget: u64,
    max_weight: usize,
    seed: u64,
) -> RadiusReport {
    let n = dec.n();
    let mut trials = 0u64;
    let mut exhaustive = true;
    for w in 1..=max_weight.min(n) {
        let total = binomial(n as i64, w as i64);
        let failed = if total <= BigUint::from(budget) {
            trials += total.to_u64().unwrap();
            exhaustive_failure(dec, w).is_some()
        } else {
            exhaustive = false;
            trials += budget;
            (0..budget).into_par_iter().any(|i| {
                let mut rng = trial_rng(seed, ((w as u64) << 40) | i);
                let s = sample(&mut rng, n, w).into_vec();
                !decodes_to_zero(dec, &s)
            })
        };
        if failed {
            return RadiusReport {
                certified_radius: w - 1,
                first_failure_weight: Some(w),
                trials,
                exhaustive,
            };
        }
    }
    RadiusReport {
        certified_radius: max_weight.min(n),
        first_failure_weight: None,
        trials,
        exhaustive,
    }
}

/// Aggregate of a channel simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimReport {
    pub seed: u64,
    pub weight: usize,
    pub trials: u64,
    pub decoded: u64,
    pub detected: u64,
    pub miscorrected: u64,
    pub workload: Workload,
}

impl SimReport {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            return 1.0;
        }
        self.decoded as f64 / self.trials as f64
    }

    pub fn to_kv(&self) -> String {
        format!(
            "seed={}\nweight={}\ntrials={}\ndecoded={}\ndetected={}\nmiscorrected={}\nsuccess_rate={}\ncheck_evals={}\nbit_reads={}\n",
            self.seed,
            self.weight,
            self.trials,
            self.decoded,
            self.detected,
            self.miscorrected,
            self.success_rate(),
            self.workload.check_evals,
            self.workload.bit_reads
        )
    }
}

/// Sends random codewords (or the zero word) through a channel adding a
/// uniformly random weight-w error. Trial i draws from its own ChaCha
/// stream, so results do not depend on thread scheduling.
pub fn simulate(
    code: &BinaryCode,
    dec: &dyn Decoder,
    weight: usize,
    trials: u64,
    seed: u64,
    random_codeword: bool,
) -> Result<SimReport> {
    let n = code.n;
    if weight > n {
        return Err(Error::DecodeInput(format!(
            "weight {weight} exceeds length {n}"
        )));
    }
    let basis = if random_codeword {
        code.generator()?
    } else {
        Vec::new()
    };
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let mut sent = vec![0u8; n];
            for g in &basis {
                if rng.gen::<bool>() {
                    for (j, s) in sent.iter_mut().enumerate() {
                        *s ^= (g[j / 64] >> (j % 64) & 1) as u8;
                    }
                }
            }
            let mut w = sent.clone();
            for j in sample(&mut rng, n, weight) {
                w[j] ^= 1;
            }
            dec.decode(&w).map(|o| o.against(&sent))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rep = SimReport {
        seed,
        weight,
        trials,
        decoded: 0,
        detected: 0,
        miscorrected: 0,
        workload: Workload::default(),
    };
    for o in per_trial {
        match o.status {
            DecodeStatus::Decoded => rep.decoded += 1,
            DecodeStatus::DetectedUncorrectable => rep.detected += 1,
            DecodeStatus::Miscorrected => rep.miscorrected += 1,
        }
        rep.workload += o.workload;
    }
    Ok(rep)
}
