//! Independent oracles and the seeded property suite.
//!
//! Every check draws random instances from its own ChaCha stream, derived
//! from the suite seed and the check name, so checks can run concurrently
//! and still produce the same report for the same seed.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::determinant::{det, vandermonde_matrix, Matrix};
use crate::evaluator::{
    binexp_multiplications, ceil_log2, cost_report, eval_power, eval_power_with, eval_shifted,
    tree_reduce, CostModel, EvalError, Schedule,
};
use crate::field::{ComplexField, Field, FieldError, PrimeField, RationalField};
use crate::node_table::{
    cofactor_column_k, difference_product, find_duplicate, vandermonde_det, NodeTable, TableError,
};
use crate::special_forms::{
    binomial_form_eval, binomial_form_eval_signed, make_roots_context, partial_fraction_eval,
    product_form_eval, roots_unity_eval, SignConvention,
};
use crate::table_file::{deserialize_table, serialize_table, AnyTable};

/// Ten primes between 30 and 61 bits used for exact-field instances.
pub const SUITE_PRIMES: [u64; 10] = [
    1_073_741_789,
    2_147_483_647,
    8_589_934_583,
    68_719_476_731,
    1_099_511_627_689,
    17_592_186_044_399,
    281_474_976_710_597,
    4_503_599_627_370_449,
    144_115_188_075_855_859,
    2_305_843_009_213_693_951,
];

/// Primes with p = 1 mod 720720 = lcm(1..=16), so every m <= 16 divides p - 1.
pub const ROOTS_PRIMES: [u64; 4] = [
    2_146_304_161,
    1_099_508_089_681,
    1_125_899_903_288_161,
    2_305_843_009_196_847_121,
];

/// Largest k for which brute-force determinants are run.
pub const BRUTE_FORCE_MAX_K: usize = 6;
/// Relative tolerance for complex-backend identities.
pub const COMPLEX_REL_TOL: f64 = 1e-9;
/// Consecutive rejected draws before node generation gives up.
pub const MAX_REJECTIONS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("base coincides with node {node}")]
    BaseCollidesWithNode { node: usize },
    #[error("brute-force determinants are limited to k <= {BRUTE_FORCE_MAX_K}, got {0}")]
    TooLarge(usize),
    #[error("this check needs an exact field")]
    InexactField,
    #[error("sum of P_j^{n} C_j is {residual}, expected 0")]
    LaplaceResidual { n: usize, residual: String },
    #[error("{identity}: {lhs} != {rhs}")]
    Mismatch {
        identity: &'static str,
        lhs: String,
        rhs: String,
    },
}

/// Checks `sum_j P_j^n C_j = 0` for every `0 <= n <= k-2`; `n = 0` is
/// `sum_j C_j = 0`. Returns the number of exponents checked.
pub fn laplace_zero_check<F: Field>(t: &NodeTable<F>) -> Result<usize, CheckError> {
    let field = t.field();
    if !field.is_exact() {
        return Err(CheckError::InexactField);
    }
    let k = t.k();
    for n in 0..k - 1 {
        let residual = field.sum(
            &(0..k)
                .map(|j| field.mul(t.power(j, n), &t.coeffs()[j]))
                .collect::<Vec<_>>(),
        );
        if !field.is_zero(&residual) {
            return Err(CheckError::LaplaceResidual {
                n,
                residual: field.encode(&residual),
            });
        }
    }
    Ok(k - 1)
}

fn exact_small_instance<F: Field>(
    field: &F,
    nodes: &[F::Elem],
    a: &F::Elem,
) -> Result<(), CheckError> {
    if !field.is_exact() {
        return Err(CheckError::InexactField);
    }
    let k = nodes.len();
    if k > BRUTE_FORCE_MAX_K {
        return Err(CheckError::TooLarge(k));
    }
    if k < 2 {
        return Err(TableError::TooFewNodes(k).into());
    }
    if let Some(j) = nodes.iter().position(|p| field.equals(p, a)) {
        return Err(CheckError::BaseCollidesWithNode { node: j + 1 });
    }
    Ok(())
}

fn mismatch<F: Field>(
    field: &F,
    identity: &'static str,
    lhs: &F::Elem,
    rhs: &F::Elem,
) -> CheckError {
    CheckError::Mismatch {
        identity,
        lhs: field.encode(lhs),
        rhs: field.encode(rhs),
    }
}

/// Builds `X` (Vandermonde columns `0..k-2`, last column `1/(P_j - a)`) and
/// checks, by brute-force determinant,
/// `|X| = (-1)^(k-1) * prod_j (P_j - a)^-1 * |V|`, `|X| != 0`, and
/// `|X| = sum_j C_{j,k} / (P_j - a)`. Returns `|X|`.
pub fn appendix_determinant_check<F: Field>(
    field: &F,
    nodes: &[F::Elem],
    a: &F::Elem,
) -> Result<F::Elem, CheckError> {
    exact_small_instance(field, nodes, a)?;
    if let Some((first, second)) = find_duplicate(field, nodes) {
        return Err(TableError::DuplicateNodes { first, second }.into());
    }
    let k = nodes.len();
    let shifts_inv = nodes
        .iter()
        .map(|p| field.inverse(&field.sub(p, a)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut x: Matrix<F::Elem> = vandermonde_matrix(field, nodes);
    for (row, inv) in x.iter_mut().zip(&shifts_inv) {
        row[k - 1] = inv.clone();
    }
    let det_x = det(field, &x);

    let c = field.product(&shifts_inv);
    let scaled = field.mul(&c, &vandermonde_det(field, nodes));
    let expected = if (k - 1) % 2 == 0 {
        scaled
    } else {
        field.neg(&scaled)
    };
    if !field.equals(&det_x, &expected) {
        return Err(mismatch(field, "|X| = (-1)^(k-1) c |V|", &det_x, &expected));
    }
    if field.is_zero(&det_x) {
        return Err(mismatch(field, "|X| != 0", &det_x, &field.zero()));
    }
    let laplace = field.sum(
        &(0..k)
            .map(|j| field.mul(&cofactor_column_k(field, nodes, j), &shifts_inv[j]))
            .collect::<Vec<_>>(),
    );
    if !field.equals(&det_x, &laplace) {
        return Err(mismatch(
            field,
            "|X| = sum_j C_{j,k} / (P_j - a)",
            &det_x,
            &laplace,
        ));
    }
    Ok(det_x)
}

/// Builds the matrix whose last column is the geometric sum
/// `sum_{i=1}^{k-1} P_j^(k-1-i) a^(i-1)`, checks it equals the closed form
/// `(P_j^(k-1) - a^(k-1)) / (P_j - a)` entry by entry, and that the
/// determinant is exactly zero.
pub fn zero_determinant_check<F: Field>(
    field: &F,
    nodes: &[F::Elem],
    a: &F::Elem,
) -> Result<(), CheckError> {
    exact_small_instance(field, nodes, a)?;
    let k = nodes.len();
    let top = (k - 1) as u64;
    let a_top = field.pow(a, top);
    let mut m = vandermonde_matrix(field, nodes);
    for (row, p) in m.iter_mut().zip(nodes) {
        let geometric = field.sum(
            &(1..k as u64)
                .map(|i| field.mul(&field.pow(p, top - i), &field.pow(a, i - 1)))
                .collect::<Vec<_>>(),
        );
        let closed = field.div(&field.sub(&field.pow(p, top), &a_top), &field.sub(p, a))?;
        if !field.equals(&geometric, &closed) {
            return Err(mismatch(
                field,
                "geometric column = closed form",
                &geometric,
                &closed,
            ));
        }
        row[k - 1] = geometric;
    }
    let d = det(field, &m);
    if !field.is_zero(&d) {
        return Err(mismatch(field, "det P = 0", &d, &field.zero()));
    }
    Ok(())
}

/// Random element generation for the property suite.
pub trait Sample: Field {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Self::Elem;
}

impl Sample for PrimeField {
    fn sample(&self, rng: &mut ChaCha8Rng) -> u64 {
        rng.random_range(0..self.modulus())
    }
}

impl Sample for RationalField {
    /// Small numerators and denominators keep big-rational growth tame.
    fn sample(&self, rng: &mut ChaCha8Rng) -> BigRational {
        let num: i64 = rng.random_range(-60..=60);
        let den: i64 = rng.random_range(1..=12);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

impl Sample for ComplexField {
    /// Uniform on the square `[-2, 2]^2`.
    fn sample(&self, rng: &mut ChaCha8Rng) -> Complex64 {
        Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
    }
}

/// `k` pairwise distinct random elements; fails after [`MAX_REJECTIONS`]
/// consecutive collisions, which signals a field too small for `k`.
pub fn distinct_nodes<F: Sample>(
    field: &F,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<F::Elem>, String> {
    let mut nodes: Vec<F::Elem> = Vec::with_capacity(k);
    while nodes.len() < k {
        let mut rejected = 0;
        loop {
            let x = field.sample(rng);
            if !nodes.iter().any(|p| field.equals(p, &x)) {
                nodes.push(x);
                break;
            }
            rejected += 1;
            if rejected >= MAX_REJECTIONS {
                return Err(format!("field too small for {k} distinct nodes"));
            }
        }
    }
    Ok(nodes)
}

/// A random element at least `pred`-acceptable, same rejection bound.
fn sample_where<F: Sample>(
    field: &F,
    rng: &mut ChaCha8Rng,
    accept: impl Fn(&F::Elem) -> bool,
) -> Result<F::Elem, String> {
    for _ in 0..MAX_REJECTIONS {
        let x = field.sample(rng);
        if accept(&x) {
            return Ok(x);
        }
    }
    Err("no acceptable sample after 1000 draws".to_string())
}

fn base_off_nodes<F: Sample>(
    field: &F,
    nodes: &[F::Elem],
    rng: &mut ChaCha8Rng,
) -> Result<F::Elem, String> {
    sample_where(field, rng, |x| !nodes.iter().any(|p| field.equals(p, x)))
}

fn show<F: Field>(field: &F, xs: &[F::Elem]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| field.encode(x)).collect();
    format!("[{}]", parts.join(" "))
}

/// `|x - y| / max(1, |x|, |y|)`, the same scale the complex field's equality uses.
pub fn complex_rel_err(x: &Complex64, y: &Complex64) -> f64 {
    (x - y).norm() / 1f64.max(x.norm()).max(y.norm())
}

/// Which backends the suite exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    Prime,
    Rational,
    Complex,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Prime, Backend::Rational, Backend::Complex];
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Prime => "prime",
            Backend::Rational => "rational",
            Backend::Complex => "complex",
        })
    }
}

/// Deliberate corruption used to show the suite catches broken tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Add one to a random coefficient of every exact-field table.
    Coeff,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub backends: Vec<Backend>,
    pub fault: Option<Fault>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            trials: 100,
            k_min: 2,
            k_max: 32,
            backends: Backend::ALL.to_vec(),
            fault: None,
        }
    }
}

impl SuiteConfig {
    /// A random k in the configured range, clamped to `[lo, hi]`.
    fn k(&self, rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
        let hi = self.k_max.min(hi).max(lo);
        let lo = self.k_min.max(lo).min(hi);
        rng.random_range(lo..=hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub instances_run: usize,
    pub failures: usize,
    pub first_counterexample: Option<String>,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// Sorted by name.
    pub checks: Vec<CheckOutcome>,
    pub seed: u64,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn total_failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.total_failures() == 0
    }

    /// Same seed and the same per-check results; elapsed time is ignored.
    pub fn same_outcome(&self, other: &VerifyReport) -> bool {
        self.seed == other.seed && self.checks == other.checks
    }

    pub fn render_text(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = format!("seed {}\n", self.seed);
        for c in &self.checks {
            let status = if c.failures == 0 { "ok" } else { "FAILED" };
            out.push_str(&format!(
                "  {:<width$}  {:>6} run  {:>6} failed  {}\n",
                c.name, c.instances_run, c.failures, status
            ));
            if let Some(ce) = &c.first_counterexample {
                out.push_str(&format!("    counterexample: {ce}\n"));
            }
        }
        out.push_str(&format!(
            "{} checks, {} failures: {}\n",
            self.checks.len(),
            self.total_failures(),
            if self.passed() { "PASS" } else { "FAIL" }
        ));
        out
    }

    /// `CHECK <name> <ran> <failed>` per check.
    pub fn render_lines(&self) -> String {
        self.checks
            .iter()
            .map(|c| format!("CHECK {} {} {}\n", c.name, c.instances_run, c.failures))
            .collect()
    }
}

fn stream_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a over the name, mixed with the seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

type Instance = Box<dyn Fn(&mut ChaCha8Rng) -> Result<(), String> + Send + Sync>;

struct Check {
    name: String,
    trials: usize,
    instance: Instance,
}

impl Check {
    fn run(&self, seed: u64) -> CheckOutcome {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, &self.name));
        let mut failures = 0;
        let mut first = None;
        for _ in 0..self.trials {
            if let Err(e) = (self.instance)(&mut rng) {
                failures += 1;
                first.get_or_insert(e);
            }
        }
        CheckOutcome {
            name: self.name.clone(),
            instances_run: self.trials,
            failures,
            first_counterexample: first,
        }
    }
}

fn random_table<F: Sample>(
    field: &F,
    k: usize,
    rng: &mut ChaCha8Rng,
    fault: Option<Fault>,
) -> Result<NodeTable<F>, String> {
    let nodes = distinct_nodes(field, k, rng)?;
    let t = NodeTable::build(field.clone(), nodes).map_err(|e| e.to_string())?;
    Ok(match fault {
        Some(Fault::Coeff) if field.is_exact() => {
            let j = rng.random_range(0..k);
            let c = field.add(&t.coeffs()[j], &field.one());
            t.with_coeff_unchecked(j, c)
        }
        _ => t,
    })
}

fn describe<F: Field>(t: &NodeTable<F>) -> String {
    let f = t.field();
    format!(
        "field={} k={} nodes={} coeffs={}",
        f.descriptor(),
        t.k(),
        show(f, t.nodes()),
        show(f, t.coeffs())
    )
}

fn field_axioms<F: Sample>(f: &F, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (x, y, z) = (f.sample(rng), f.sample(rng), f.sample(rng));
    let ctx = || format!("x={} y={} z={}", f.encode(&x), f.encode(&y), f.encode(&z));
    let laws = [
        (
            "add assoc",
            f.add(&f.add(&x, &y), &z),
            f.add(&x, &f.add(&y, &z)),
        ),
        (
            "mul assoc",
            f.mul(&f.mul(&x, &y), &z),
            f.mul(&x, &f.mul(&y, &z)),
        ),
        ("add comm", f.add(&x, &y), f.add(&y, &x)),
        ("mul comm", f.mul(&x, &y), f.mul(&y, &x)),
        (
            "distrib",
            f.mul(&x, &f.add(&y, &z)),
            f.add(&f.mul(&x, &y), &f.mul(&x, &z)),
        ),
        ("neg", f.add(&x, &f.neg(&x)), f.zero()),
        ("sub", f.add(&f.sub(&x, &y), &y), x.clone()),
    ];
    for (law, lhs, rhs) in laws {
        if !f.equals(&lhs, &rhs) {
            return Err(format!("{law}: {} ({})", ctx(), f.descriptor()));
        }
    }
    if !f.is_zero(&x) {
        let prod = f.mul(&x, &f.inverse(&x).map_err(|e| e.to_string())?);
        if !f.equals(&prod, &f.one()) {
            return Err(format!("x * x^-1 != 1: {}", ctx()));
        }
    }
    Ok(())
}

fn inverse_involution<F: Sample>(f: &F, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let x = sample_where(f, rng, |x| !f.is_zero(x))?;
    let back = f
        .inverse(&f.inverse(&x).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    if !f.equals(&back, &x) {
        return Err(format!(
            "inverse(inverse({})) = {}",
            f.encode(&x),
            f.encode(&back)
        ));
    }
    Ok(())
}

fn pow_repeated<F: Sample>(f: &F, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let a = f.sample(rng);
    let mut acc = f.one();
    for n in 0..=40u64 {
        let p = f.pow(&a, n);
        if !f.equals(&p, &acc) {
            return Err(format!(
                "a={} n={n}: {} != {}",
                f.encode(&a),
                f.encode(&p),
                f.encode(&acc)
            ));
        }
        acc = f.mul(&acc, &a);
    }
    Ok(())
}

fn coeff_identity<F: Sample>(
    f: &F,
    k: usize,
    rng: &mut ChaCha8Rng,
    fault: Option<Fault>,
) -> Result<(), String> {
    let t = random_table(f, k, rng, fault)?;
    for j in 0..k {
        let check = f.mul(&t.coeffs()[j], &difference_product(f, t.nodes(), j));
        if !f.equals(&check, &f.one()) {
            return Err(format!("C_{} * prod != 1; {}", j + 1, describe(&t)));
        }
    }
    let total = f.sum(t.coeffs());
    if !f.negligible(&total, t.coeffs()) {
        return Err(format!("sum C = {}; {}", f.encode(&total), describe(&t)));
    }
    Ok(())
}

fn laplace<F: Sample>(
    f: &F,
    k: usize,
    rng: &mut ChaCha8Rng,
    fault: Option<Fault>,
) -> Result<(), String> {
    let t = random_table(f, k, rng, fault)?;
    laplace_zero_check(&t)
        .map(|_| ())
        .map_err(|e| format!("{e}; {}", describe(&t)))
}

/// `eval_power(t, a, n) = a^n` for every `n < k`; exact comparison in exact
/// fields, relative error for complex.
fn central_identity_all_n<F: Field>(t: &NodeTable<F>, a: &F::Elem) -> Result<(), String> {
    let f = t.field();
    for n in 0..t.k() {
        let want = f.pow(a, n as u64);
        let got = match eval_power(t, a, n) {
            Ok(out) => out.value,
            Err(EvalError::ZeroDenominator) => {
                return Err(format!(
                    "denominator vanished: a={}; {}",
                    f.encode(a),
                    describe(t)
                ))
            }
            Err(e) => return Err(format!("{e}: a={} n={n}; {}", f.encode(a), describe(t))),
        };
        if !f.equals(&got, &want) {
            return Err(format!(
                "a={} n={n}: got {} want {}; {}",
                f.encode(a),
                f.encode(&got),
                f.encode(&want),
                describe(t)
            ));
        }
    }
    Ok(())
}

fn central_identity<F: Sample>(
    f: &F,
    k: usize,
    rng: &mut ChaCha8Rng,
    fault: Option<Fault>,
) -> Result<(), String> {
    let t = random_table(f, k, rng, fault)?;
    let a = base_off_nodes(f, t.nodes(), rng)?;
    central_identity_all_n(&t, &a)
}

fn shifted<F: Sample>(
    f: &F,
    k: usize,
    rng: &mut ChaCha8Rng,
    fault: Option<Fault>,
) -> Result<(), String> {
    let t = random_table(f, k, rng, fault)?;
    let alpha = f.sample(rng);
    let beta = sample_where(f, rng, |b| !f.is_zero(b))?;
    let shifted: Vec<F::Elem> = t
        .nodes()
        .iter()
        .map(|p| f.add(&alpha, &f.mul(&beta, p)))
        .collect();
    let a = base_off_nodes(f, &shifted, rng)?;
    let want = f.pow(&a, (k - 1) as u64);
    let ctx = || {
        format!(
            "alpha={} beta={} a={}; {}",
            f.encode(&alpha),
            f.encode(&beta),
            f.encode(&a),
            describe(&t)
        )
    };
    match eval_shifted(&t, &alpha, &beta, &a) {
        Ok(got) if f.equals(&got, &want) => Ok(()),
        Ok(got) => Err(format!(
            "got {} want {}: {}",
            f.encode(&got),
            f.encode(&want),
            ctx()
        )),
        Err(e) => Err(format!("{e}: {}", ctx())),
    }
}

fn parallel_schedule<F: Sample>(f: &F, k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let t = random_table(f, k, rng, None)?;
    let a = base_off_nodes(f, t.nodes(), rng)?;
    let n = rng.random_range(0..k);
    let seq = eval_power(&t, &a, n).map_err(|e| e.to_string())?;
    let par = eval_power_with(&t, &a, n, Schedule::Parallel).map_err(|e| e.to_string())?;
    if seq != par {
        return Err(format!(
            "schedules differ at a={} n={n}; {}",
            f.encode(&a),
            describe(&t)
        ));
    }
    Ok(())
}

fn tree_vs_sequential<F: Sample>(f: &F, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let m = rng.random_range(1..=1000);
    let xs: Vec<F::Elem> = (0..m).map(|_| f.sample(rng)).collect();
    let (tree, depth) = tree_reduce(f, &xs);
    let seq = f.sum(&xs);
    if !f.equals(&tree, &seq) {
        return Err(format!(
            "m={m}: tree {} sequential {}",
            f.encode(&tree),
            f.encode(&seq)
        ));
    }
    if depth != ceil_log2(m) {
        return Err(format!("m={m}: depth {depth}"));
    }
    Ok(())
}

fn roundtrip<F: Sample>(f: &F, k: usize, rng: &mut ChaCha8Rng) -> Result<(), String>
where
    NodeTable<F>: Into<AnyTable>,
{
    let t = random_table(f, k, rng, None)?;
    let text = serialize_table(&t);
    let back = deserialize_table(&text).map_err(|e| format!("{e}; {}", describe(&t)))?;
    if back != t.clone().into() {
        return Err(format!("round trip changed the table; {}", describe(&t)));
    }
    Ok(())
}

fn tamper_detected<F: Sample>(f: &F, k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let t = random_table(f, k, rng, None)?;
    let j = rng.random_range(0..k);
    let bad = t.with_coeff_unchecked(j, f.add(&t.coeffs()[j], &f.one()));
    match deserialize_table(&serialize_table(&bad)) {
        Err(TableError::InvariantViolation(_)) => Ok(()),
        other => Err(format!(
            "tampered coefficient {} not rejected: {other:?}",
            j + 1
        )),
    }
}

fn small_exact_instance<F: Sample>(
    f: &F,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<F::Elem>, F::Elem), String> {
    let nodes = distinct_nodes(f, k, rng)?;
    let a = base_off_nodes(f, &nodes, rng)?;
    Ok((nodes, a))
}

fn appendix<F: Sample>(f: &F, k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (nodes, a) = small_exact_instance(f, k, rng)?;
    appendix_determinant_check(f, &nodes, &a)
        .map(|_| ())
        .map_err(|e| format!("{e}: nodes={} a={}", show(f, &nodes), f.encode(&a)))
}

fn zero_det<F: Sample>(f: &F, k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let (nodes, a) = small_exact_instance(f, k, rng)?;
    zero_determinant_check(f, &nodes, &a)
        .map_err(|e| format!("{e}: nodes={} a={}", show(f, &nodes), f.encode(&a)))
}

fn vandermonde_bruteforce<F: Sample>(f: &F, k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let nodes = distinct_nodes(f, k, rng)?;
    let product = vandermonde_det(f, &nodes);
    let brute = det(f, &vandermonde_matrix(f, &nodes));
    if !f.equals(&product, &brute) {
        return Err(format!(
            "product {} brute force {}: nodes={}",
            f.encode(&product),
            f.encode(&brute),
            show(f, &nodes)
        ));
    }
    Ok(())
}

fn cofactor_ratio<F: Sample>(f: &F, k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let t = random_table(f, k, rng, None)?;
    let vdet = vandermonde_det(f, t.nodes());
    let want = if (k - 1) % 2 == 0 { vdet } else { f.neg(&vdet) };
    for j in 0..k {
        let ratio = f
            .div(&cofactor_column_k(f, t.nodes(), j), &t.coeffs()[j])
            .map_err(|e| e.to_string())?;
        if !f.equals(&ratio, &want) {
            return Err(format!(
                "C_{{{},k}}/C_{} = {} want {}; {}",
                j + 1,
                j + 1,
                f.encode(&ratio),
                f.encode(&want),
                describe(&t)
            ));
        }
    }
    Ok(())
}

fn binomial_form(k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = RationalField;
    let nodes: Vec<BigRational> = (1..=k).map(|j| f.from_integer(j as i128)).collect();
    let a = base_off_nodes(&f, &nodes, rng)?;
    let want = f.pow(&a, (k - 1) as u64);
    let got = binomial_form_eval(&f, k, &a).map_err(|e| e.to_string())?;
    let table = NodeTable::build(f, nodes).map_err(|e| e.to_string())?;
    let general = eval_power(&table, &a, k - 1)
        .map_err(|e| e.to_string())?
        .value;
    if got != want || general != got {
        return Err(format!(
            "k={k} a={a}: binomial {got} general {general} oracle {want}"
        ));
    }
    Ok(())
}

fn binomial_sign(k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = RationalField;
    let nodes: Vec<BigRational> = (1..=k).map(|j| f.from_integer(j as i128)).collect();
    let a = base_off_nodes(&f, &nodes, rng)?;
    let x = binomial_form_eval_signed(&f, k, &a, SignConvention::Alternating);
    let y = binomial_form_eval_signed(&f, k, &a, SignConvention::FromTop);
    if x != y {
        return Err(format!("k={k} a={a}: {x:?} vs {y:?}"));
    }
    Ok(())
}

fn roots_forms_prime(m: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let p = ROOTS_PRIMES[rng.random_range(0..ROOTS_PRIMES.len())];
    let f = PrimeField::new(p).map_err(|e| e.to_string())?;
    let ctx = make_roots_context(&f, m).map_err(|e| e.to_string())?;
    for (j, e) in ctx.roots().iter().enumerate() {
        if f.pow(e, m as u64) != 1 {
            return Err(format!("p={p} m={m}: root {} has e^m != 1", j + 1));
        }
    }
    let a = sample_where(&f, rng, |x| *x != 0 && !ctx.roots().contains(x))?;
    let oracle = f.sub(&f.pow(&a, m as u64), &1);
    let roots = roots_unity_eval(&ctx, &a).map_err(|e| e.to_string())?;
    let product = product_form_eval(&ctx, &a);
    let pfrac = partial_fraction_eval(&ctx, &a).map_err(|e| e.to_string())?;
    if roots != oracle || product != oracle || f.mul(&roots, &pfrac) != 1 {
        return Err(format!(
            "p={p} m={m} a={a}: roots {roots} product {product} oracle {oracle} pfrac {pfrac}"
        ));
    }
    Ok(())
}

/// A complex base at distance >= 0.1 from every root and from 0, |a| <= 2.
fn separated_complex_base(nodes: &[Complex64], rng: &mut ChaCha8Rng) -> Result<Complex64, String> {
    let f = ComplexField::default();
    sample_where(&f, rng, |a| {
        a.norm() <= 2.0 && a.norm() >= 0.1 && nodes.iter().all(|e| (a - e).norm() >= 0.1)
    })
}

fn roots_forms_complex(m: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = ComplexField::default();
    let ctx = make_roots_context(&f, m).map_err(|e| e.to_string())?;
    let a = separated_complex_base(ctx.roots(), rng)?;
    let oracle = f.sub(&f.pow(&a, m as u64), &f.one());
    let roots = roots_unity_eval(&ctx, &a).map_err(|e| e.to_string())?;
    let product = product_form_eval(&ctx, &a);
    let pfrac = partial_fraction_eval(&ctx, &a).map_err(|e| e.to_string())?;
    let errs = [
        complex_rel_err(&roots, &oracle),
        complex_rel_err(&product, &oracle),
        complex_rel_err(&f.mul(&roots, &pfrac), &f.one()),
    ];
    if errs.iter().any(|e| !(*e <= COMPLEX_REL_TOL)) {
        return Err(format!(
            "m={m} a={}: relative errors {errs:?}",
            f.encode(&a)
        ));
    }
    Ok(())
}

fn complex_central(k: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let f = ComplexField::default();
    let nodes = f.roots_of_unity(k).ok_or("no roots")?;
    let t = NodeTable::build(f, nodes).map_err(|e| e.to_string())?;
    let a = separated_complex_base(t.nodes(), rng)?;
    for n in 0..k {
        let got = eval_power(&t, &a, n).map_err(|e| e.to_string())?.value;
        let want = f.pow(&a, n as u64);
        let err = complex_rel_err(&got, &want);
        if !(err <= COMPLEX_REL_TOL) {
            return Err(format!(
                "k={k} n={n} a={}: relative error {err:e}",
                f.encode(&a)
            ));
        }
    }
    Ok(())
}

fn reduction_depth(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let k = rng.random_range(2..=1024usize);
    let f = PrimeField::new(SUITE_PRIMES[0]).map_err(|e| e.to_string())?;
    let xs = vec![1u64; k];
    let (_, depth) = tree_reduce(&f, &xs);
    // smallest d with 2^d >= k
    let oracle = (0..usize::BITS as usize)
        .find(|d| 1usize << d >= k)
        .unwrap();
    if depth != oracle {
        return Err(format!("k={k}: depth {depth} want {oracle}"));
    }
    Ok(())
}

fn binexp_count(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n: u64 = rng.random_range(1..1u64 << 40);
    // one squaring per bit after the leading one, one multiply per set bit after it
    let bits = format!("{n:b}");
    let oracle = (bits.len() - 1) + bits[1..].chars().filter(|c| *c == '1').count();
    let k = n as usize + 1;
    let report = cost_report(k, n, CostModel::default()).map_err(|e| e.to_string())?;
    if report.binexp_multiplications != oracle as u64 || binexp_multiplications(n) != oracle as u64
    {
        return Err(format!(
            "n={n}: {} want {oracle}",
            report.binexp_multiplications
        ));
    }
    Ok(())
}

fn random_prime_field(rng: &mut ChaCha8Rng) -> PrimeField {
    PrimeField::new(SUITE_PRIMES[rng.random_range(0..SUITE_PRIMES.len())])
        .expect("suite primes are prime")
}

fn checks(config: &SuiteConfig) -> Vec<Check> {
    let trials = config.trials;
    let fault = config.fault;
    let mut out: Vec<Check> = Vec::new();
    let mut add = |name: &str, instance: Instance| {
        out.push(Check {
            name: name.to_string(),
            trials,
            instance,
        })
    };
    // Each closure owns a copy of the config so it is `'static`.
    let cfg = || config.clone();

    for backend in &config.backends {
        match backend {
            Backend::Prime => {
                add(
                    "prime.field_axioms",
                    Box::new(|r| field_axioms(&random_prime_field(r), r)),
                );
                add(
                    "prime.inverse_involution",
                    Box::new(|r| inverse_involution(&random_prime_field(r), r)),
                );
                add(
                    "prime.pow_oracle",
                    Box::new(|r| pow_repeated(&random_prime_field(r), r)),
                );
                add(
                    "prime.from_integer_reduces",
                    Box::new(|r| {
                        let f = random_prime_field(r);
                        let m: i64 = r.random();
                        let p = f.modulus() as i128;
                        if f.from_integer(m as i128 + p) != f.from_integer(m as i128)
                            || f.from_integer(p + 3) != f.from_integer(3)
                        {
                            return Err(format!("p={p} m={m}"));
                        }
                        Ok(())
                    }),
                );
                let c = cfg();
                add(
                    "prime.coeff_identity",
                    Box::new(move |r| {
                        coeff_identity(&random_prime_field(r), c.k(r, 2, 128), r, fault)
                    }),
                );
                let c = cfg();
                add(
                    "prime.laplace_zero",
                    Box::new(move |r| laplace(&random_prime_field(r), c.k(r, 2, 128), r, fault)),
                );
                let c = cfg();
                add(
                    "prime.central_identity",
                    Box::new(move |r| {
                        central_identity(&random_prime_field(r), c.k(r, 2, 128), r, fault)
                    }),
                );
                let c = cfg();
                add(
                    "prime.shifted_eval",
                    Box::new(move |r| shifted(&random_prime_field(r), c.k(r, 2, 128), r, fault)),
                );
                let c = cfg();
                add(
                    "prime.parallel_schedule",
                    Box::new(move |r| parallel_schedule(&random_prime_field(r), c.k(r, 2, 128), r)),
                );
                add(
                    "prime.tree_reduce_sequential",
                    Box::new(|r| tree_vs_sequential(&random_prime_field(r), r)),
                );
                let c = cfg();
                add(
                    "prime.appendix_determinant",
                    Box::new(move |r| {
                        appendix(&random_prime_field(r), c.k(r, 2, BRUTE_FORCE_MAX_K), r)
                    }),
                );
                let c = cfg();
                add(
                    "prime.zero_determinant",
                    Box::new(move |r| {
                        zero_det(&random_prime_field(r), c.k(r, 2, BRUTE_FORCE_MAX_K), r)
                    }),
                );
                let c = cfg();
                add(
                    "prime.roots_forms",
                    Box::new(move |r| roots_forms_prime(c.k(r, 3, 13) - 1, r)),
                );
                let c = cfg();
                add(
                    "prime.table_roundtrip",
                    Box::new(move |r| roundtrip(&random_prime_field(r), c.k(r, 2, 128), r)),
                );
                let c = cfg();
                add(
                    "prime.table_tamper_detected",
                    Box::new(move |r| tamper_detected(&random_prime_field(r), c.k(r, 2, 128), r)),
                );
            }
            Backend::Rational => {
                let f = RationalField;
                add(
                    "rational.field_axioms",
                    Box::new(move |r| field_axioms(&f, r)),
                );
                add(
                    "rational.inverse_involution",
                    Box::new(move |r| inverse_involution(&f, r)),
                );
                add(
                    "rational.pow_oracle",
                    Box::new(move |r| pow_repeated(&f, r)),
                );
                let c = cfg();
                add(
                    "rational.coeff_identity",
                    Box::new(move |r| coeff_identity(&f, c.k(r, 2, 32), r, fault)),
                );
                let c = cfg();
                add(
                    "rational.laplace_zero",
                    Box::new(move |r| laplace(&f, c.k(r, 2, 32), r, fault)),
                );
                let c = cfg();
                add(
                    "rational.central_identity",
                    Box::new(move |r| central_identity(&f, c.k(r, 2, 32), r, fault)),
                );
                let c = cfg();
                add(
                    "rational.shifted_eval",
                    Box::new(move |r| shifted(&f, c.k(r, 2, 32), r, fault)),
                );
                add(
                    "rational.tree_reduce_sequential",
                    Box::new(move |r| tree_vs_sequential(&f, r)),
                );
                let c = cfg();
                add(
                    "rational.vandermonde_bruteforce",
                    Box::new(move |r| vandermonde_bruteforce(&f, c.k(r, 1, BRUTE_FORCE_MAX_K), r)),
                );
                let c = cfg();
                add(
                    "rational.cofactor_ratio",
                    Box::new(move |r| cofactor_ratio(&f, c.k(r, 2, BRUTE_FORCE_MAX_K), r)),
                );
                let c = cfg();
                add(
                    "rational.appendix_determinant",
                    Box::new(move |r| appendix(&f, c.k(r, 2, BRUTE_FORCE_MAX_K), r)),
                );
                let c = cfg();
                add(
                    "rational.zero_determinant",
                    Box::new(move |r| zero_det(&f, c.k(r, 2, BRUTE_FORCE_MAX_K), r)),
                );
                let c = cfg();
                add(
                    "rational.binomial_form",
                    Box::new(move |r| binomial_form(c.k(r, 2, 12), r)),
                );
                let c = cfg();
                add(
                    "rational.binomial_sign",
                    Box::new(move |r| binomial_sign(c.k(r, 2, 12), r)),
                );
                let c = cfg();
                add(
                    "rational.table_roundtrip",
                    Box::new(move |r| roundtrip(&f, c.k(r, 2, 32), r)),
                );
            }
            Backend::Complex => {
                let f = ComplexField::default();
                add(
                    "complex.field_axioms",
                    Box::new(move |r| field_axioms(&f, r)),
                );
                add(
                    "complex.inverse_involution",
                    Box::new(move |r| inverse_involution(&f, r)),
                );
                let c = cfg();
                add(
                    "complex.coeff_identity",
                    Box::new(move |r| coeff_identity(&f, c.k(r, 2, 17), r, None)),
                );
                let c = cfg();
                add(
                    "complex.central_identity",
                    Box::new(move |r| complex_central(c.k(r, 2, 17), r)),
                );
                let c = cfg();
                add(
                    "complex.roots_forms",
                    Box::new(move |r| roots_forms_complex(c.k(r, 3, 17) - 1, r)),
                );
                let c = cfg();
                add(
                    "complex.parallel_schedule",
                    Box::new(move |r| parallel_schedule(&f, c.k(r, 2, 17), r)),
                );
                let c = cfg();
                add(
                    "complex.table_roundtrip",
                    Box::new(move |r| roundtrip(&f, c.k(r, 2, 17), r)),
                );
            }
        }
    }
    add("model.reduction_depth", Box::new(reduction_depth));
    add("model.binexp_count", Box::new(binexp_count));
    out
}

/// Runs every check over `config.trials` seeded instances. Checks run
/// concurrently; the report is sorted by check name.
pub fn run_property_suite(config: &SuiteConfig) -> VerifyReport {
    let start = Instant::now();
    let mut results: Vec<CheckOutcome> = checks(config)
        .par_iter()
        .map(|c| c.run(config.seed))
        .collect();
    results.sort_by(|a, b| a.name.cmp(&b.name));
    VerifyReport {
        checks: results,
        seed: config.seed,
        elapsed: start.elapsed(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn laplace_examples() {
        let f = PrimeField::new(7).unwrap();
        let t = NodeTable::build(f, vec![1, 2, 3]).unwrap();
        // n = 0: 4 + 6 + 4 = 14; n = 1: 4 + 12 + 12 = 28
        assert_eq!(laplace_zero_check(&t), Ok(2));
        let t2 = NodeTable::build(f, vec![3, 5]).unwrap();
        assert_eq!(laplace_zero_check(&t2), Ok(1));
        let bad = t.with_coeff_unchecked(1, 5);
        assert_eq!(
            laplace_zero_check(&bad),
            Err(CheckError::LaplaceResidual {
                n: 0,
                residual: "6".to_string()
            })
        );
    }

    #[test]
    fn appendix_examples() {
        let f = RationalField;
        let det_x = appendix_determinant_check(&f, &[q(1, 1), q(2, 1)], &q(0, 1)).unwrap();
        assert_eq!(det_x, q(-1, 2));
        let det_x = appendix_determinant_check(&f, &[q(0, 1), q(1, 1)], &q(2, 1)).unwrap();
        // [[1, -1/2], [1, -1]]: -1 + 1/2
        assert_eq!(det_x, q(-1, 2));
        assert!(matches!(
            appendix_determinant_check(&f, &[q(1, 1), q(1, 1)], &q(0, 1)),
            Err(CheckError::Table(TableError::DuplicateNodes { .. }))
        ));
        assert!(matches!(
            appendix_determinant_check(&f, &[q(1, 1), q(2, 1)], &q(2, 1)),
            Err(CheckError::BaseCollidesWithNode { node: 2 })
        ));
        let seven: Vec<BigRational> = (0..7).map(|i| q(i, 1)).collect();
        assert_eq!(
            appendix_determinant_check(&f, &seven, &q(9, 1)),
            Err(CheckError::TooLarge(7))
        );
        assert_eq!(
            appendix_determinant_check(
                &ComplexField::default(),
                &[Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)],
                &Complex64::new(0.0, 0.0)
            ),
            Err(CheckError::InexactField)
        );
    }

    #[test]
    fn zero_determinant_examples() {
        let f = RationalField;
        assert_eq!(
            zero_determinant_check(&f, &[q(1, 1), q(2, 1), q(3, 1)], &q(4, 1)),
            Ok(())
        );
        assert_eq!(
            zero_determinant_check(&f, &[q(5, 1), q(-3, 2)], &q(1, 7)),
            Ok(())
        );
        let z7 = PrimeField::new(7).unwrap();
        assert_eq!(zero_determinant_check(&z7, &[1, 2, 3], &5), Ok(()));
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let config = SuiteConfig {
            seed: 42,
            trials: 5,
            k_max: 12,
            ..SuiteConfig::default()
        };
        let a = run_property_suite(&config);
        assert!(a.passed(), "{}", a.render_text());
        let b = run_property_suite(&config);
        assert!(a.same_outcome(&b));
        assert_eq!(a.render_text(), b.render_text());
        assert!(a.render_lines().lines().all(|l| l.starts_with("CHECK ")));
    }

    #[test]
    fn injected_fault_is_reported() {
        let config = SuiteConfig {
            seed: 42,
            trials: 5,
            k_max: 8,
            backends: vec![Backend::Prime],
            fault: Some(Fault::Coeff),
            ..SuiteConfig::default()
        };
        let report = run_property_suite(&config);
        assert!(!report.passed());
        let central = report
            .checks
            .iter()
            .find(|c| c.name == "prime.central_identity")
            .unwrap();
        assert!(central.failures > 0);
        assert!(central.first_counterexample.is_some());
        for c in &report.checks {
            assert_eq!(c.failures > 0, c.first_counterexample.is_some());
        }
    }

    #[test]
    fn node_generation_gives_up_in_tiny_fields() {
        let f = PrimeField::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(distinct_nodes(&f, 3, &mut rng).is_ok());
        assert!(distinct_nodes(&f, 4, &mut rng).is_err());
    }
}
