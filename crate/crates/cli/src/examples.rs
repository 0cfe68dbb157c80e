use clap::ValueEnum;
use gtm_core::analysis::{approx_leq_k, series_sum, PowerSeriesInput, Truth};
use gtm_core::builtins::Registry;
use gtm_core::corpus;
use gtm_core::exact::{pow2_neg, ComplexQ, Rational};
use gtm_core::machine::{self, enumerate_outcomes, seeded_tokens, Value};
use gtm_core::realize::{lower_machine, RealizerConfig, RealizerTable};
use gtm_core::represent::{decode_sri, rho_decode, rho_encode};
use serde_json::json;

use crate::commands::show;
use crate::output::Out;
use crate::{Failure, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    /// 1/3 + 1/6 through the lowered real adder.
    Addition,
    /// The geometric series at z = 1/4.
    Series,
    /// The two outputs of the coin machine.
    Coin,
    /// The approximate comparison on a few pairs.
    Leq,
}

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn failed(e: impl ToString) -> Failure {
    Failure::Verdict(e.to_string())
}

pub fn run(out: &Out, which: Example, precision: u32) -> Outcome {
    match which {
        Example::Addition => addition(out, precision),
        Example::Series => series(out, precision),
        Example::Coin => coin(out),
        Example::Leq => leq(out),
    }
}

fn addition(out: &Out, d: u32) -> Outcome {
    let n = corpus::machine("real_adder").map_err(|e| failed(format!("{e:?}")))?;
    let config: RealizerConfig = toml::from_str(corpus::REAL_ADDER_REALIZERS).map_err(failed)?;
    let rt = RealizerTable::from_config(&config, &Registry::standard()).map_err(failed)?;
    let m = lower_machine(&n, &rt).map_err(failed)?;
    let (x, y) = (q(1, 3), q(1, 6));
    let inputs = [Value::Stream(rho_encode(&x)), Value::Stream(rho_encode(&y))];
    let outcome = machine::run(&m, &inputs, std::iter::repeat(0), 100).map_err(failed)?;
    let Some(Value::Stream(sum)) = outcome.output() else {
        return Err(failed("the adder did not produce a stream"));
    };
    let i = rho_decode(sum, d, d as usize + 8).map_err(failed)?;
    out.emit(
        format!("{x} + {y} ∈ {i}\nwidth {} ≤ 2^-{d}", i.width()),
        json!({ "x": x.to_string(), "y": y.to_string(), "interval": i.to_string(), "width": i.width().to_string() }),
    );
    if i.contains(&q(1, 2)) && i.width() <= pow2_neg(d) {
        Ok(())
    } else {
        Err(failed("the interval misses 1/2"))
    }
}

fn series(out: &Out, d: u32) -> Outcome {
    let input = PowerSeriesInput::geometric(q(1, 2), q(1, 1), ComplexQ::real(q(1, 4)));
    let name = series_sum(&input).map_err(failed)?;
    let re = decode_sri(&name.re, d, d as usize + 8).map_err(failed)?;
    out.emit(
        format!("Σ (1/4)^j ∈ {re}\nclosed form 4/3"),
        json!({ "interval": re.to_string(), "closed_form": "4/3" }),
    );
    if re.contains(&q(4, 3)) {
        Ok(())
    } else {
        Err(failed("the interval misses 4/3"))
    }
}

fn coin(out: &Out) -> Outcome {
    let m = corpus::machine("coin").map_err(|e| failed(format!("{e:?}")))?;
    let all = enumerate_outcomes(&m, &[], 10, 4).map_err(failed)?;
    let values: Vec<String> = all.values.iter().map(|v| show(v, 8)).collect();
    out.emit(
        format!("f_M() = {{{}}}", values.join(", ")),
        json!({ "values": values }),
    );
    for seed in [0, 1] {
        let o = machine::run(&m, &[], seeded_tokens(seed), 10).map_err(failed)?;
        let shown = o.output().map(|v| show(v, 8)).unwrap_or_default();
        out.emit(
            format!("seed {seed}: {shown}"),
            json!({ "seed": seed, "output": shown }),
        );
    }
    Ok(())
}

fn leq(out: &Out) -> Outcome {
    let cases = [
        (q(0, 1), q(1, 1), 5),
        (q(2, 1), q(0, 1), 1),
        (q(1, 3), q(1, 3), 8),
        (q(1, 3), q(1, 3) - pow2_neg(12), 10),
        (q(-1, 2), q(-1, 3), 20),
    ];
    for (x, y, k) in cases {
        let answer = approx_leq_k(&rho_encode(&x), &rho_encode(&y), k, 200).map_err(failed)?;
        let admissible = if x < y {
            answer == Truth::Tt
        } else if x > &y + pow2_neg(k) {
            answer == Truth::Ff
        } else {
            true
        };
        out.emit(
            format!("{x} ≤_{k} {y} = {answer}"),
            json!({ "x": x.to_string(), "y": y.to_string(), "k": k, "answer": answer, "admissible": admissible }),
        );
        if !admissible {
            return Err(failed("inadmissible answer"));
        }
    }
    Ok(())
}
