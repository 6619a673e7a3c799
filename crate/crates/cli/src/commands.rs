use std::fs;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use sha2::{Digest, Sha256};
use vexp_core::special_forms::make_roots_context_with_extra;
use vexp_core::verification::{run_property_suite, Backend, Fault, SuiteConfig};
use vexp_core::{
    binomial_form_eval, deserialize_table, eval_power_with, make_field, make_roots_context,
    partial_fraction_eval, roots_unity_eval, AnyField, AnyTable, Field, FieldDescriptor, FormError,
    NodeTable, Schedule,
};

use crate::{EvalArgs, FormsCommand, PrecomputeArgs, VerifyArgs};

pub fn checksum(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Runs `f` on a rayon pool of `threads` workers, or inline for one thread.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce(Schedule) -> T + Send) -> Result<T> {
    if threads <= 1 {
        return Ok(f(Schedule::Sequential));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("building thread pool")?;
    Ok(pool.install(|| f(Schedule::Parallel)))
}

fn parse_node_list<F: Field>(field: &F, list: &str) -> Result<Vec<F::Elem>> {
    let sep = match field.descriptor() {
        FieldDescriptor::Complex { .. } => ';',
        _ => ',',
    };
    list.split(sep)
        .map(|s| field.decode(s.trim()).map_err(Into::into))
        .collect()
}

fn parse_range<F: Field>(field: &F, range: &str) -> Result<Vec<F::Elem>> {
    let (lo, hi) = range
        .split_once("..")
        .ok_or_else(|| anyhow!("node range must look like `1..4`, got {range:?}"))?;
    let lo: i128 = lo.trim().parse().context("range start")?;
    let hi: i128 = hi.trim().parse().context("range end")?;
    if hi < lo {
        bail!("empty node range {range:?}");
    }
    Ok((lo..=hi).map(|m| field.from_integer(m)).collect())
}

fn build_table<F: Field>(field: F, args: &PrecomputeArgs) -> Result<NodeTable<F>> {
    if let Some(spec) = &args.nodes_roots {
        let (m, extra) = match spec.split_once('+') {
            Some((m, extra)) => (m, Some(extra)),
            None => (spec.as_str(), None),
        };
        let m: usize = m.trim().parse().context("roots-of-unity order")?;
        return match extra {
            Some(x) => {
                let x = field.decode(x.trim())?;
                Ok(make_roots_context_with_extra(&field, m, x)?.table().clone())
            }
            None => {
                let roots = field
                    .roots_of_unity(m)
                    .ok_or(FormError::NoRootsOfUnity { m })?;
                Ok(NodeTable::build(field, roots)?)
            }
        };
    }
    let nodes = match (&args.nodes, &args.nodes_range) {
        (Some(list), _) => parse_node_list(&field, list)?,
        (None, Some(range)) => parse_range(&field, range)?,
        (None, None) => bail!("one of --nodes, --nodes-range, --nodes-roots is required"),
    };
    Ok(NodeTable::build(field, nodes)?)
}

pub fn precompute(args: &PrecomputeArgs) -> Result<ExitCode> {
    let table: AnyTable = match make_field(args.field)? {
        AnyField::Prime(f) => build_table(f, args)?.into(),
        AnyField::Rational(f) => build_table(f, args)?.into(),
        AnyField::Complex(f) => build_table(f, args)?.into(),
    };
    let text = table.serialize();
    fs::write(&args.out, &text).with_context(|| format!("writing {}", args.out.display()))?;
    println!("k {}", table.k());
    println!("checksum {}", checksum(&text));
    Ok(ExitCode::SUCCESS)
}

fn join<F: Field>(field: &F, xs: &[F::Elem]) -> String {
    xs.iter()
        .map(|x| field.encode(x))
        .collect::<Vec<_>>()
        .join(" ")
}

fn eval_typed<F: Field>(t: &NodeTable<F>, args: &EvalArgs) -> Result<ExitCode> {
    let field = t.field();
    let a = field.decode(&args.base)?;
    let out = with_threads(args.threads, |s| eval_power_with(t, &a, args.exp, s))??;
    println!("{}", field.encode(&out.value));
    if args.trace {
        println!("num {}", join(field, &out.numerator_summands));
        println!("den {}", join(field, &out.denominator_summands));
        println!("numerator {}", field.encode(&out.numerator));
        println!("denominator {}", field.encode(&out.denominator));
        println!("depth {}", out.reduction_depth);
        println!("divisions {}", out.division_count);
    }
    if args.check {
        let oracle = field.pow(&a, args.exp as u64);
        let ok = field.equals(&out.value, &oracle);
        println!(
            "oracle {} {}",
            field.encode(&oracle),
            if ok { "MATCH" } else { "MISMATCH" }
        );
        if !ok {
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn eval(args: &EvalArgs) -> Result<ExitCode> {
    let text = fs::read_to_string(&args.table)
        .with_context(|| format!("reading {}", args.table.display()))?;
    match deserialize_table(&text)? {
        AnyTable::Prime(t) => eval_typed(&t, args),
        AnyTable::Rational(t) => eval_typed(&t, args),
        AnyTable::Complex(t) => eval_typed(&t, args),
    }
}

fn parse_backends(list: &str) -> Result<Vec<Backend>> {
    list.split(',')
        .map(|b| match b.trim() {
            "prime" => Ok(Backend::Prime),
            "rational" => Ok(Backend::Rational),
            "complex" => Ok(Backend::Complex),
            other => Err(anyhow!("unknown backend {other:?}")),
        })
        .collect()
}

pub fn verify(args: &VerifyArgs) -> Result<ExitCode> {
    if args.kmin < 2 || args.kmax < args.kmin {
        bail!("need 2 <= kmin <= kmax");
    }
    let fault = match args.inject_fault.as_deref() {
        None => None,
        Some("coeff") => Some(Fault::Coeff),
        Some(other) => bail!("unknown fault {other:?}; expected `coeff`"),
    };
    let config = SuiteConfig {
        seed: args.seed,
        trials: args.trials,
        k_min: args.kmin,
        k_max: args.kmax,
        backends: parse_backends(&args.backends)?,
        fault,
    };
    let report = run_property_suite(&config);
    if args.lines {
        print!("{}", report.render_lines());
    } else {
        print!("{}", report.render_text());
    }
    eprintln!("elapsed {:.3}s", report.elapsed.as_secs_f64());
    Ok(if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn report_match<F: Field>(field: &F, value: &F::Elem, oracle: &F::Elem) -> ExitCode {
    let ok = field.equals(value, oracle);
    println!(
        "{} {} {}",
        field.encode(value),
        field.encode(oracle),
        if ok { "MATCH" } else { "MISMATCH" }
    );
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn binomial<F: Field>(field: &F, k: usize, base: &str) -> Result<ExitCode> {
    let a = field.decode(base)?;
    let value = binomial_form_eval(field, k, &a)?;
    let oracle = field.pow(&a, k.saturating_sub(1) as u64);
    Ok(report_match(field, &value, &oracle))
}

fn power_minus_one<F: Field>(field: &F, a: &F::Elem, m: usize) -> F::Elem {
    field.sub(&field.pow(a, m as u64), &field.one())
}

fn roots<F: Field>(field: &F, m: usize, base: &str) -> Result<ExitCode> {
    let a = field.decode(base)?;
    let ctx = make_roots_context(field, m)?;
    let value = roots_unity_eval(&ctx, &a)?;
    Ok(report_match(field, &value, &power_minus_one(field, &a, m)))
}

fn pfrac<F: Field>(field: &F, m: usize, base: &str) -> Result<ExitCode> {
    let a = field.decode(base)?;
    let ctx = make_roots_context(field, m)?;
    let value = partial_fraction_eval(&ctx, &a)?;
    let oracle = field.inverse(&power_minus_one(field, &a, m))?;
    Ok(report_match(field, &value, &oracle))
}

macro_rules! dispatch {
    ($field:expr, $f:ident, $($arg:expr),*) => {
        match make_field($field)? {
            AnyField::Prime(f) => $f(&f, $($arg),*),
            AnyField::Rational(f) => $f(&f, $($arg),*),
            AnyField::Complex(f) => $f(&f, $($arg),*),
        }
    };
}

pub fn forms(cmd: &FormsCommand) -> Result<ExitCode> {
    match cmd {
        FormsCommand::Binomial { k, base, field } => dispatch!(*field, binomial, *k, base),
        FormsCommand::Roots { m, base, field } => dispatch!(*field, roots, *m, base),
        FormsCommand::Pfrac { m, base, field } => dispatch!(*field, pfrac, *m, base),
    }
}
