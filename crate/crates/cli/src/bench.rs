use std::hint::black_box;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vexp_core::evaluator::ceil_log2;
use vexp_core::verification::distinct_nodes;
use vexp_core::{eval_power_with, Field, FieldDescriptor, NodeTable, PrimeField};

use crate::commands::with_threads;
use crate::BenchArgs;

pub const CSV_HEADER: &str = "method,field,k,n,trials,threads,median_ns,p10_ns,p90_ns";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Vexp,
    Binexp,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Vexp => "vexp",
            Method::Binexp => "binexp",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub method: Method,
    pub field: FieldDescriptor,
    pub k: usize,
    pub n: usize,
    pub trials: usize,
    pub threads: usize,
    pub median_ns: u64,
    pub p10_ns: u64,
    pub p90_ns: u64,
}

impl BenchRecord {
    fn from_samples(
        method: Method,
        field: FieldDescriptor,
        k: usize,
        threads: usize,
        mut samples: Vec<u64>,
    ) -> Self {
        samples.sort_unstable();
        // nearest rank on the sorted samples
        let pick = |q: f64| samples[((samples.len() - 1) as f64 * q).round() as usize].max(1);
        BenchRecord {
            method,
            field,
            k,
            n: k - 1,
            trials: samples.len(),
            threads,
            median_ns: pick(0.5),
            p10_ns: pick(0.1),
            p90_ns: pick(0.9),
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.method.name(),
            self.field,
            self.k,
            self.n,
            self.trials,
            self.threads,
            self.median_ns,
            self.p10_ns,
            self.p90_ns
        )
    }
}

fn bench_k(
    field: PrimeField,
    k: usize,
    args: &BenchArgs,
    rng: &mut ChaCha8Rng,
) -> Result<[BenchRecord; 2]> {
    let nodes = distinct_nodes(&field, k, rng).map_err(anyhow::Error::msg)?;
    let table = NodeTable::build(field, nodes)?;
    let n = k - 1;
    let bases: Vec<u64> = (0..args.trials)
        .map(|_| loop {
            let a = rng.random_range(0..field.modulus());
            if !table.nodes().contains(&a) {
                break a;
            }
        })
        .collect();

    let vexp = with_threads(args.threads, |schedule| {
        bases
            .iter()
            .map(|a| {
                let start = Instant::now();
                let out = eval_power_with(&table, black_box(a), n, schedule);
                let ns = start.elapsed().as_nanos() as u64;
                black_box(out).map(|_| ns)
            })
            .collect::<Result<Vec<u64>, _>>()
    })??;
    let binexp: Vec<u64> = bases
        .iter()
        .map(|a| {
            let start = Instant::now();
            black_box(field.pow(black_box(a), n as u64));
            start.elapsed().as_nanos() as u64
        })
        .collect();

    let d = field.descriptor();
    Ok([
        BenchRecord::from_samples(Method::Vexp, d, k, args.threads, vexp),
        BenchRecord::from_samples(Method::Binexp, d, k, args.threads, binexp),
    ])
}

pub fn run(args: &BenchArgs) -> Result<ExitCode> {
    let FieldDescriptor::Prime { p } = args.field else {
        bail!("bench supports prime fields only, got {}", args.field);
    };
    let field = PrimeField::new(p)?;
    if args.trials == 0 {
        bail!("--trials must be at least 1");
    }
    if let Some(k) = args.k.iter().find(|&&k| k < 2 || k as u64 >= p) {
        bail!("k = {k} needs 2 <= k < p");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    println!("{CSV_HEADER}");
    for &k in &args.k {
        println!("# depth k={k} d={}", ceil_log2(k));
        for record in bench_k(field, k, args, &mut rng)? {
            println!("{}", record.csv());
        }
    }
    Ok(ExitCode::SUCCESS)
}
