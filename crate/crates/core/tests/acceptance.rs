//! Acceptance suite: nine criteria, one pass/fail line each. Expected values
//! come from oracles written here, independent of the library code paths
//! they check.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use gtm_core::analysis::{approx_leq_k, series_partial, series_sum, PowerSeriesInput, Truth};
use gtm_core::builtins::Registry;
use gtm_core::corpus;
use gtm_core::dsl;
use gtm_core::exact::{pow2_neg, ComplexQ, Interval, Rational};
use gtm_core::machine::{run, Machine, RunOutcome, Value};
use gtm_core::names::{
    beta_decode, beta_encode, decode_interval_record, decode_rational_record,
    encode_interval_record, encode_rational_record, iota_decode_prefix, iota_encode, Stream, Word,
};
use gtm_core::realize::{
    check_machine_realization_empirical, eval_stream_machine, generate_word_machine, lower_machine,
    Budgets, EvalVerdict, RealizerConfig, RealizerTable, Verdict,
};
use gtm_core::represent::{decode_sri, rho, rho_encode, Rep};
use gtm_core::weihrauch::{check_single_use, seeded_stream, split, verify_reduction};
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    let den: i64 = match rng.gen_range(0..3) {
        0 => rng.gen_range(1..=10),
        1 => 1 << rng.gen_range(0..40),
        _ => rng.gen_range(1..=1_000_000),
    };
    q(rng.gen_range(-1_000_000..=1_000_000), den)
}

fn all_binary_words(max_len: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for len in 1..=max_len {
        for bits in 0..(1u32 << len) {
            out.push(
                (0..len)
                    .rev()
                    .map(|i| if bits >> i & 1 == 1 { '1' } else { '0' })
                    .collect(),
            );
        }
    }
    out
}

/// `110 a₁0 a₂0 … aₙ0 11`, written out directly.
fn iota_oracle(w: &str) -> String {
    let body: String = w.chars().flat_map(|a| [a, '0']).collect();
    format!("110{body}11")
}

/// Sign, binary numerator, binary denominator, each in an `ι` block.
fn rational_oracle(x: &Rational) -> String {
    let sign = if x.is_negative() { "1" } else { "0" };
    let num = x.numer().abs().to_str_radix(2);
    let den = x.denom().to_str_radix(2);
    [sign, num.as_str(), den.as_str()]
        .iter()
        .map(|b| iota_oracle(b))
        .collect()
}

fn criterion_1() -> Check {
    let words = all_binary_words(10);
    for w in &words {
        let word = Word::from(w.as_str());
        let iota = iota_encode(&word).map_err(|e| e.to_string())?;
        if iota.as_str() != iota_oracle(w) {
            return Err(format!("ι({w}) = {iota}, expected {}", iota_oracle(w)));
        }
        let (blocks, used) = iota_decode_prefix(&iota).map_err(|e| e.to_string())?;
        if blocks != vec![word.clone()] || used != iota.len() {
            return Err(format!("ι-decoding of ι({w}) gives {blocks:?}"));
        }
        let name = beta_encode(&word).map_err(|e| e.to_string())?;
        if name.prefix(iota.len()) != iota {
            return Err(format!("β({w}) does not start with ι({w})"));
        }
        if beta_decode(&name).map_err(|e| e.to_string())? != word {
            return Err(format!("β round trip fails on {w}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let x = random_rational(&mut rng);
        let record = encode_rational_record(&x);
        if record.as_str() != rational_oracle(&x) {
            return Err(format!(
                "record of {x} is {record}, expected {}",
                rational_oracle(&x)
            ));
        }
        if decode_rational_record(&record).map_err(|e| e.to_string())? != x {
            return Err(format!("rational round trip fails on {x}"));
        }
        let y = random_rational(&mut rng);
        if x == y {
            continue;
        }
        let i = Interval {
            lo: x.clone().min(y.clone()),
            hi: x.max(y),
        };
        let record = encode_interval_record(&i);
        if record.as_str() != format!("{}{}", rational_oracle(&i.lo), rational_oracle(&i.hi)) {
            return Err(format!("interval record of {i} differs from the oracle"));
        }
        if decode_interval_record(&record).map_err(|e| e.to_string())? != i {
            return Err(format!("interval round trip fails on {i}"));
        }
    }
    Ok(format!(
        "{} words, 500 rationals, 500 intervals",
        words.len()
    ))
}

fn random_bits(rng: &mut impl Rng, len: usize) -> String {
    (0..len)
        .map(|_| if rng.gen_bool(0.5) { '1' } else { '0' })
        .collect()
}

fn word_output(m: &Machine, inputs: &[String]) -> Option<Word> {
    let values: Vec<Value> = inputs.iter().map(|w| Value::word(w)).collect();
    match run(m, &values, std::iter::repeat(0), 10_000).ok()? {
        RunOutcome::Accepted {
            output: Value::Word(w),
            ..
        } => Some(w),
        _ => None,
    }
}

fn criterion_2() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut premises = 0;
    for name in ["mono_copy", "mono_flip_trim", "mono_branch"] {
        let m = corpus::machine(name).map_err(|d| format!("{d:?}"))?;
        for _ in 0..1000 {
            let u: Vec<String> = (0..m.inputs)
                .map(|_| {
                    let len = rng.gen_range(0..12);
                    random_bits(&mut rng, len)
                })
                .collect();
            let u2: Vec<String> = u
                .iter()
                .map(|w| {
                    let extra = rng.gen_range(0..12);
                    format!("{w}{}", random_bits(&mut rng, extra))
                })
                .collect();
            let Some(out) = word_output(&m, &u) else {
                continue;
            };
            premises += 1;
            match word_output(&m, &u2) {
                None => {
                    return Err(format!(
                        "{name}: f_M({u:?}) = {out} but f_M({u2:?}) is undefined"
                    ))
                }
                Some(out2) if !out2.as_str().starts_with(out.as_str()) => {
                    return Err(format!(
                        "{name}: f_M({u:?}) = {out} is not a prefix of f_M({u2:?}) = {out2}"
                    ))
                }
                _ => {}
            }
        }
    }
    Ok(format!(
        "3000 pairs, {premises} with f_M(u) defined, 0 violations"
    ))
}

fn criterion_3() -> Check {
    let n = corpus::machine("stream_adder").map_err(|d| format!("{d:?}"))?;
    let registry = Registry::standard();
    let words =
        generate_word_machine(&n, &registry.default_generators()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let (x, y) = (random_rational(&mut rng), random_rational(&mut rng));
        let q = [rho_encode(&x), rho_encode(&y)];
        let direct = run(
            &n,
            &[Value::Stream(q[0].clone()), Value::Stream(q[1].clone())],
            std::iter::repeat(0),
            100,
        )
        .map_err(|e| e.to_string())?;
        let Some(Value::Stream(direct)) = direct.output() else {
            return Err(format!("direct run on {x}, {y} did not accept"));
        };
        let via_words =
            match eval_stream_machine(&words, &q, 64, 100_000, 1000).map_err(|e| e.to_string())? {
                EvalVerdict::Output { word, .. } => word,
                v => return Err(format!("{x} + {y}: {v:?}")),
            };
        if via_words.truncated(64) != direct.prefix(64) {
            return Err(format!(
                "{x} + {y}: {} vs {}",
                via_words.truncated(64),
                direct.prefix(64)
            ));
        }
    }
    Ok("50 pairs agree on 64 symbols".into())
}

fn criterion_4() -> Check {
    let n = corpus::machine("real_adder").map_err(|d| format!("{d:?}"))?;
    let config: RealizerConfig =
        toml::from_str(corpus::REAL_ADDER_REALIZERS).map_err(|e| e.to_string())?;
    let rt =
        RealizerTable::from_config(&config, &Registry::standard()).map_err(|e| e.to_string())?;
    let m = lower_machine(&n, &rt).map_err(|e| e.to_string())?;
    let rho: Rep = Arc::new(rho());
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let objects: Vec<Vec<Value>> = (0..100)
        .map(|_| {
            vec![
                Value::Rational(random_rational(&mut rng)),
                Value::Rational(random_rational(&mut rng)),
            ]
        })
        .collect();
    let verdicts = check_machine_realization_empirical(
        &m,
        &n,
        &[rho.clone(), rho.clone()],
        &rho,
        &objects,
        50,
        &Budgets::default(),
    );
    if let Some((i, v)) = verdicts.iter().enumerate().find(|(_, v)| !v.is_verified()) {
        return Err(format!("sample {i} ({:?}): {v}", objects[i]));
    }
    // Independent membership oracle: the decoded sum interval has width at
    // most 2^-50 and contains x + y.
    for y in objects.iter().take(10) {
        let names: Vec<Value> = y
            .iter()
            .map(|v| Value::Stream(rho_encode(v.as_rational().unwrap())))
            .collect();
        let out = run(&m, &names, std::iter::repeat(0), 100).map_err(|e| e.to_string())?;
        let Some(Value::Stream(s)) = out.output() else {
            return Err("lowered adder did not accept".into());
        };
        let i = gtm_core::represent::rho_decode(s, 50, 200).map_err(|e| e.to_string())?;
        let sum = y[0].as_rational().unwrap() + y[1].as_rational().unwrap();
        if !(i.lo <= sum && sum <= i.hi && i.width() <= pow2_neg(50)) {
            return Err(format!("{i} does not pin down {sum}"));
        }
    }
    Ok(format!(
        "{} of 100 verified at 2^-50",
        verdicts
            .iter()
            .filter(|v| matches!(v, Verdict::Verified { .. }))
            .count()
    ))
}

fn criterion_5() -> Check {
    for z in [q(1, 4), q(1, 8), q(-1, 4)] {
        let closed = Rational::from_integer(1.into()) / (Rational::from_integer(1.into()) - &z);
        let input = PowerSeriesInput::geometric(q(1, 2), q(1, 1), ComplexQ::real(z.clone()));
        for k in 0..=40 {
            let b = series_partial(&input, k).map_err(|e| e.to_string())?.value;
            let err = (&b.re - &closed).abs();
            if err > pow2_neg(k) || b.im != Rational::from_integer(0.into()) {
                return Err(format!("z = {z}, k = {k}: error {err}"));
            }
        }
        let name = series_sum(&input).map_err(|e| e.to_string())?;
        let re = decode_sri(&name.re, 40, 60).map_err(|e| e.to_string())?;
        let im = decode_sri(&name.im, 40, 60).map_err(|e| e.to_string())?;
        let zero = Rational::from_integer(0.into());
        if !(re.contains(&closed) && im.contains(&zero) && re.width() <= pow2_neg(40)) {
            return Err(format!("z = {z}: {re} + i{im} misses {closed}"));
        }
    }
    Ok("z ∈ {1/4, 1/8, -1/4}, k ≤ 40".into())
}

fn oracle_of(name: &str) -> &'static str {
    match name {
        "w_branch" => "stream.flip",
        _ => "stream.tail",
    }
}

fn criterion_6() -> Check {
    let registry = Registry::standard();
    let samples: Vec<Value> = (0..100).map(|s| Value::Stream(seeded_stream(s))).collect();
    for name in ["w_post", "w_branch", "w_two_sites"] {
        let m = corpus::machine(name).map_err(|d| format!("{d:?}"))?;
        let g = oracle_of(name);
        check_single_use(&m, g).map_err(|e| e.to_string())?;
        let s = split(&m, g).map_err(|e| e.to_string())?;
        let h = registry.get(g).ok_or("oracle not registered")?;
        let verdicts = verify_reduction(&m, &s, g, h, &samples, 64, 1000);
        if let Some(v) = verdicts.iter().find(|v| !v.is_verified()) {
            return Err(format!("{name}: {v}"));
        }
        // Independent check of the identity: f_M(p) against G(p, h(H(p))) by hand.
        for p in samples.iter().take(10) {
            let direct = run(&m, std::slice::from_ref(p), std::iter::repeat(0), 1000)
                .map_err(|e| e.to_string())?;
            let question = run(&s.h, std::slice::from_ref(p), std::iter::repeat(0), 1000)
                .map_err(|e| e.to_string())?;
            let Some(Value::Stream(question)) = question.output() else {
                return Err(format!("{name}: M_H rejected"));
            };
            let answer = match g {
                "stream.flip" => Stream::from_fn({
                    let question = question.clone();
                    move |i| {
                        if question.symbol(i) == b'0' {
                            b'1'
                        } else {
                            b'0'
                        }
                    }
                }),
                _ => Stream::from_fn({
                    let question = question.clone();
                    move |i| question.symbol(i + 1)
                }),
            };
            let composed = run(
                &s.g,
                &[p.clone(), Value::Stream(answer)],
                std::iter::repeat(0),
                1000,
            )
            .map_err(|e| e.to_string())?;
            match (direct.output(), composed.output()) {
                (Some(Value::Stream(a)), Some(Value::Stream(b)))
                    if a.prefix(64) == b.prefix(64) => {}
                _ => {
                    return Err(format!(
                        "{name}: identity fails under the hand-written oracle"
                    ))
                }
            }
        }
        let mut broken = s.clone();
        for l in m.labels_using(g) {
            if let Some(gtm_core::machine::Statement::Assign { args, .. }) =
                &mut broken.g.statements[l]
            {
                args[0] = 1;
            }
        }
        if !verify_reduction(&m, &broken, g, h, &samples, 64, 1000)
            .iter()
            .any(Verdict::is_refuted)
        {
            return Err(format!("{name}: corrupted M_G was not refuted"));
        }
    }
    Ok("3 machines x 100 inputs, mutations refuted".into())
}

/// Walks every path of at most `max_len` labels from label 0.
fn paths_use_at_most_once(m: &Machine, g: &str, max_len: usize) -> bool {
    fn walk(m: &Machine, g: &str, at: usize, len: usize, uses: usize, max_len: usize) -> bool {
        let here = m.statement(at).and_then(|s| s.function()) == Some(g);
        let uses = uses + usize::from(here);
        if uses > 1 {
            return false;
        }
        if len == max_len {
            return true;
        }
        let Some(s) = m.statement(at) else {
            return true;
        };
        let next: BTreeSet<usize> = s.successors().into_iter().collect();
        next.into_iter()
            .all(|n| walk(m, g, n, len + 1, uses, max_len))
    }
    walk(m, g, 0, 1, 0, max_len)
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut machines, mut violations) = (0, 0);
    while machines < 250 {
        let m = corpus::random_machine(&mut rng, 8);
        machines += 1;
        let used: BTreeSet<String> = m
            .statements
            .iter()
            .flatten()
            .filter_map(|s| s.function().map(String::from))
            .collect();
        for g in used {
            let expected = paths_use_at_most_once(&m, &g, 2 * m.labels.len());
            let got = check_single_use(&m, &g).is_ok();
            if got != expected {
                return Err(format!(
                    "`{g}`: check says {got}, paths say {expected}\n{}",
                    dsl::render(&m)
                ));
            }
            violations += usize::from(!expected);
        }
    }
    Ok(format!(
        "{machines} machines, {violations} violations found by both"
    ))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut tt, mut ff) = (0, 0);
    for _ in 0..500 {
        let k: u32 = rng.gen_range(0..=20);
        let y = random_rational(&mut rng);
        // Offsets cluster around 0 and 2^-k, where the answer is forced.
        let unit = pow2_neg(k);
        let offset = match rng.gen_range(0..4) {
            0 => &unit * q(rng.gen_range(-4..=4), 4),
            1 => &unit + &unit * q(rng.gen_range(-8..=8), 64),
            2 => q(rng.gen_range(-3..=3), 1),
            _ => &unit * q(rng.gen_range(-1000..=1000), 997),
        };
        let x = &y + &offset;
        let answer =
            approx_leq_k(&rho_encode(&x), &rho_encode(&y), k, 400).map_err(|e| e.to_string())?;
        if x < y && answer == Truth::Ff {
            return Err(format!("{x} <_{k} {y} answered ff"));
        }
        if x > &y + &unit && answer == Truth::Tt {
            return Err(format!("{x} > {y} + 2^-{k} answered tt"));
        }
        match answer {
            Truth::Tt => tt += 1,
            Truth::Ff => ff += 1,
        }
    }
    Ok(format!("500 triples ({tt} tt, {ff} ff), 0 inadmissible"))
}

fn criterion_9() -> Check {
    let registry = Registry::standard();
    let round_trip = |m: &Machine| -> Result<(), String> {
        let text = dsl::render(m);
        let back = dsl::parse(&text, &registry)
            .map_err(|d| format!("{d:?}\n{text}"))?
            .machine;
        if &back != m {
            return Err(format!("render/parse changed `{}`:\n{text}", m.name));
        }
        Ok(())
    };
    for (name, _) in corpus::MACHINES {
        round_trip(&corpus::machine(name).map_err(|d| format!("{name}: {d:?}"))?)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        round_trip(&corpus::random_machine(&mut rng, 8))?;
    }
    Ok(format!(
        "{} fixtures and 200 random machines",
        corpus::MACHINES.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check, u64); 9] = [
        ("encoding round-trips", criterion_1, 5),
        ("monotonicity of word machines", criterion_2, 30),
        (
            "generated word machine matches stream execution",
            criterion_3,
            60,
        ),
        ("realization closure of the lowered adder", criterion_4, 60),
        ("power-series error bound", criterion_5, 60),
        ("machine splitting identity", criterion_6, 60),
        ("single-use check against path enumeration", criterion_7, 30),
        ("approximate comparison soundness", criterion_8, 10),
        ("DSL round-trip", criterion_9, 10),
    ];
    let mut failed = 0;
    for (i, (title, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > Duration::from_secs(*limit) => {
                Err(format!("{detail}, but took {took:.1?} (limit {limit} s)"))
            }
            r => r,
        };
        match result {
            Ok(detail) => println!("criterion {}: PASS {title} ({detail}; {took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {title}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
