use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gtm_core::analysis::{interval_add, series_partial, series_sum, PowerSeriesInput};
use gtm_core::builtins::{complete_intervals, Registry};
use gtm_core::dsl::{self, Diagnostic, Parsed};
use gtm_core::exact::{pow2_neg, ComplexQ, Interval, Rational};
use gtm_core::machine::{
    enumerate_outcomes, run_traced, seeded_tokens, CarrierId, Kind, Machine, RunOutcome,
    TraceRecord, Tri, Value,
};
use gtm_core::names::{
    beta_encode, decode_integer, decode_interval_record, decode_natural, decode_rational_record,
    encode_integer, encode_interval_record, encode_natural, encode_rational_record,
    iota_decode_prefix, iota_encode, Stream, Word,
};
use gtm_core::realize::{
    check_lowered, eval_stream_machine, generate_word_machine, lower_machine, Budgets, EvalVerdict,
    RealizerConfig, RealizerTable, Verdict,
};
use gtm_core::represent::{decode_sri, rho_decode, rho_encode};
use gtm_core::weihrauch::{seeded_stream, split, verify_reduction, SplitError};
use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::json;

use crate::literal;
use crate::output::Out;
use crate::{Failure, NameKind, Outcome};

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn report(out: &Out, path: &Path, d: &Diagnostic) {
    if out.lines() {
        println!(
            "{}",
            json!({ "file": path.display().to_string(), "diagnostic": d })
        );
    } else {
        eprintln!("{}: {d}", path.display());
    }
}

pub fn load(out: &Out, path: &Path) -> Result<Parsed, Failure> {
    let src = read(path)?;
    dsl::parse(&src, &Registry::standard()).map_err(|diagnostics| {
        for d in &diagnostics {
            report(out, path, d);
        }
        let errors = diagnostics.iter().filter(|d| d.is_error()).count();
        usage(format!("{}: {errors} error(s)", path.display()))
    })
}

pub fn show(v: &Value, n: usize) -> String {
    match v {
        Value::Word(w) => w.to_string(),
        Value::Stream(s) => format!("{}…", s.prefix(n)),
        other => other.render(),
    }
}

fn parse_inputs(m: &Machine, inputs: &[String]) -> Result<Vec<Value>, Failure> {
    if inputs.len() != m.inputs {
        return Err(usage(format!(
            "`{}` takes {} input(s), {} given",
            m.name,
            m.inputs,
            inputs.len()
        )));
    }
    inputs
        .iter()
        .enumerate()
        .map(|(i, text)| literal::parse(text, &m.carriers[i + 1]).map_err(usage))
        .collect()
}

pub fn check(out: &Out, path: &Path) -> Outcome {
    let parsed = load(out, path)?;
    for w in &parsed.warnings {
        report(out, path, w);
    }
    let m = &parsed.machine;
    out.emit(
        format!("ok: machine {} ({} labels, {} tapes, {} inputs)", m.name, m.labels.len(), m.tape_count(), m.inputs),
        json!({ "file": path.display().to_string(), "ok": true, "machine": m.name, "warnings": parsed.warnings.len() }),
    );
    Ok(())
}

pub fn fmt(out: &Out, path: &Path, write: bool) -> Outcome {
    let text = dsl::render(&load(out, path)?.machine);
    if write {
        fs::write(path, &text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        out.emit(
            format!("formatted {}", path.display()),
            json!({ "file": path.display().to_string(), "written": true }),
        );
    } else if out.lines() {
        println!(
            "{}",
            json!({ "file": path.display().to_string(), "source": text })
        );
    } else {
        print!("{text}");
    }
    Ok(())
}

fn human_step(r: &TraceRecord) -> String {
    let changed = r
        .changed
        .as_ref()
        .map(|c| format!(" tape {}[{}] = {}", c.tape, c.index, c.value))
        .unwrap_or_default();
    let token = r.token.map(|t| format!(" token {t}")).unwrap_or_default();
    format!(
        "{:>5}  {} -> {}  {:?} heads {:?}{changed}{token}",
        r.step, r.label, r.next, r.kind, r.heads
    )
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    out: &Out,
    path: &Path,
    inputs: &[String],
    seed: u64,
    max_steps: usize,
    trace: bool,
    enumerate: Option<usize>,
    n: usize,
) -> Outcome {
    let m = load(out, path)?.machine;
    let inputs = parse_inputs(&m, inputs)?;
    if let Some(max_branch) = enumerate {
        let o = enumerate_outcomes(&m, &inputs, max_steps, max_branch).map_err(usage)?;
        let values: Vec<String> = o.values.iter().map(|v| show(v, n)).collect();
        out.emit(
            format!("all computations accept: {:?}\nvalues: {}", o.all_maximal_accepting, values.join(", ")),
            json!({ "all_maximal_accepting": o.all_maximal_accepting, "values": values, "leaves": o.leaves }),
        );
        return match o.all_maximal_accepting {
            Tri::Yes => Ok(()),
            Tri::No => Err(Failure::Verdict(
                o.first_rejection
                    .unwrap_or_else(|| "a computation rejects".into()),
            )),
            Tri::Inconclusive => Err(Failure::Verdict(format!(
                "undetermined within {max_steps} steps"
            ))),
        };
    }
    let sink = |r: &TraceRecord| {
        if out.lines() {
            println!("{}", r.to_line());
        } else if trace {
            println!("{}", human_step(r));
        }
    };
    let outcome = run_traced(&m, &inputs, seeded_tokens(seed), max_steps, sink).map_err(usage)?;
    match outcome {
        RunOutcome::Accepted { output, steps } => {
            out.emit(
                format!("accepted after {steps} steps: {}", show(&output, n)),
                json!({ "outcome": "accepted", "output": show(&output, n), "steps": steps, "seed": seed }),
            );
            Ok(())
        }
        RunOutcome::RejectedAtFinal { steps } => {
            out.emit(
                format!("rejected after {steps} steps: no admissible value in the output cell"),
                json!({ "outcome": "rejected", "steps": steps, "seed": seed }),
            );
            Err(Failure::Verdict("run rejected".into()))
        }
        RunOutcome::Blocked { reason, steps } => {
            out.emit(
                format!("blocked after {steps} steps: {reason}"),
                json!({ "outcome": "blocked", "reason": reason, "steps": steps, "seed": seed }),
            );
            Err(Failure::Verdict("run blocked".into()))
        }
        RunOutcome::BudgetExceeded { steps } => {
            out.emit(
                format!("no result after {steps} steps"),
                json!({ "outcome": "budget_exceeded", "steps": steps, "seed": seed }),
            );
            Err(Failure::Verdict("step budget exhausted".into()))
        }
    }
}

#[derive(Debug, Deserialize)]
struct GeneratorConfig {
    #[serde(default)]
    generators: BTreeMap<String, String>,
}

fn word_machine(m: Machine, generators: Option<&Path>) -> Result<Machine, Failure> {
    if m.carriers.iter().all(|c| c.kind() == Some(Kind::Word)) {
        return Ok(m);
    }
    let registry = Registry::standard();
    let mut table = registry.default_generators();
    if let Some(path) = generators {
        let config: GeneratorConfig =
            toml::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        for (f, name) in config.generators {
            let h = registry
                .generator(&name)
                .ok_or_else(|| usage(format!("unknown generator `{name}`")))?;
            table.insert(f, h.clone());
        }
    }
    generate_word_machine(&m, &table).map_err(usage)
}

pub fn eval(
    out: &Out,
    path: &Path,
    inputs: &[String],
    demand: usize,
    limit: usize,
    max_steps: usize,
    generators: Option<&Path>,
) -> Outcome {
    let m = load(out, path)?.machine;
    if inputs.len() != m.inputs {
        return Err(usage(format!(
            "`{}` takes {} input(s), {} given",
            m.name,
            m.inputs,
            inputs.len()
        )));
    }
    let q: Vec<Stream> = inputs
        .iter()
        .map(
            |t| match literal::parse(t, &CarrierId::new("stream")).map_err(usage)? {
                Value::Stream(s) => Ok(s),
                _ => Err(usage(format!("`{t}` is not a stream"))),
            },
        )
        .collect::<Result<_, _>>()?;
    let words = word_machine(m, generators)?;
    match eval_stream_machine(&words, &q, demand, limit, max_steps)
        .map_err(|e| Failure::Verdict(e.to_string()))?
    {
        EvalVerdict::Output { word, at } => {
            let last = complete_intervals(&word).pop();
            let mut human = format!(
                "{word}\n({} symbols from input prefixes of length {at})",
                word.len()
            );
            if let Some(i) = &last {
                human.push_str(&format!(
                    "\nlast complete interval {i}, width {}",
                    i.width()
                ));
            }
            out.emit(
                human,
                json!({ "verdict": "output", "word": word, "prefix_length": at, "last_interval": last.map(|i| i.to_string()) }),
            );
            Ok(())
        }
        EvalVerdict::InsufficientPrecision { best, limit } => {
            out.emit(
                format!(
                    "insufficient precision: best output {:?} at prefix length {limit}",
                    best.as_ref().map(Word::to_string)
                ),
                json!({ "verdict": "insufficient_precision", "best": best, "limit": limit }),
            );
            Err(Failure::Verdict(format!(
                "fewer than {demand} output symbols"
            )))
        }
    }
}

fn nat(text: &str) -> Result<BigUint, Failure> {
    text.parse()
        .map_err(|_| usage(format!("`{text}` is not a natural number")))
}

fn interval(text: &str) -> Result<Interval, Failure> {
    match literal::parse(text, &CarrierId::new("interval")).map_err(usage)? {
        Value::Interval(i) if i.is_proper() => Ok(i),
        _ => Err(usage(format!("`{text}` is not an interval with lo < hi"))),
    }
}

fn name_record(out: &Out, kind: NameKind, name: String, complete: bool) {
    let shown = if complete {
        name.clone()
    } else {
        format!("{name}…")
    };
    out.emit(
        shown,
        json!({ "kind": format!("{kind:?}").to_lowercase(), "name": name, "complete": complete }),
    );
}

pub fn encode(out: &Out, kind: NameKind, value: &str, length: usize) -> Outcome {
    let word = |w: Word| (w.to_string(), true);
    let (name, complete) = match kind {
        NameKind::Nat => word(encode_natural(&nat(value)?)),
        NameKind::Int => {
            word(encode_integer(&value.parse::<BigInt>().map_err(|_| {
                usage(format!("`{value}` is not an integer"))
            })?))
        }
        NameKind::Rat => word(encode_rational_record(
            &literal::rational(value).map_err(usage)?,
        )),
        NameKind::Interval => word(encode_interval_record(&interval(value)?)),
        NameKind::Iota => word(iota_encode(&Word::from(value)).map_err(usage)?),
        NameKind::Beta => (
            beta_encode(&Word::from(value))
                .map_err(usage)?
                .prefix(length)
                .to_string(),
            false,
        ),
        NameKind::Rho => (
            rho_encode(&literal::rational(value).map_err(usage)?)
                .prefix(length)
                .to_string(),
            false,
        ),
    };
    name_record(out, kind, name, complete);
    Ok(())
}

/// Running intersection of the complete records in a finite prefix.
fn rho_prefix(w: &Word) -> Result<Option<Interval>, Failure> {
    let mut running: Option<Interval> = None;
    for (n, i) in complete_intervals(w).into_iter().enumerate() {
        running = Some(match running {
            None => i,
            Some(r) => r.intersect(&i).ok_or_else(|| {
                Failure::Verdict(format!("not a name: record {} misses {r}", n + 1))
            })?,
        });
    }
    Ok(running)
}

pub fn decode(out: &Out, kind: NameKind, name: &str, precision: Option<u32>) -> Outcome {
    let w = Word::from(name);
    let decoded = match kind {
        NameKind::Nat => decode_natural(&w).map_err(usage)?.to_string(),
        NameKind::Int => decode_integer(&w).map_err(usage)?.to_string(),
        NameKind::Rat => decode_rational_record(&w).map_err(usage)?.to_string(),
        NameKind::Interval => decode_interval_record(&w).map_err(usage)?.to_string(),
        NameKind::Iota => {
            let (blocks, used) = iota_decode_prefix(&w).map_err(usage)?;
            let blocks: Vec<String> = blocks.iter().map(|b| format!("\"{b}\"")).collect();
            let rest = if used < w.len() {
                format!(" (+{} symbols)", w.len() - used)
            } else {
                String::new()
            };
            format!("{}{rest}", blocks.join(" "))
        }
        NameKind::Beta => {
            let (blocks, _) = iota_decode_prefix(&w).map_err(usage)?;
            blocks
                .first()
                .ok_or_else(|| usage("no complete block"))?
                .to_string()
        }
        NameKind::Rho => {
            let i = rho_prefix(&w)?
                .ok_or_else(|| Failure::Verdict("no complete interval record".into()))?;
            if let Some(d) = precision {
                if i.width() > pow2_neg(d) {
                    out.emit(
                        format!("{i} (width {}, wider than 2^-{d})", i.width()),
                        json!({ "kind": "rho", "interval": i.to_string(), "width": i.width().to_string(), "sufficient": false }),
                    );
                    return Err(Failure::Verdict(format!(
                        "the prefix determines the value only to width {}",
                        i.width()
                    )));
                }
            }
            out.emit(
                format!("{i} (width {})", i.width()),
                json!({ "kind": "rho", "interval": i.to_string(), "width": i.width().to_string(), "sufficient": true }),
            );
            return Ok(());
        }
    };
    out.emit(
        &decoded,
        json!({ "kind": format!("{kind:?}").to_lowercase(), "value": decoded }),
    );
    Ok(())
}

fn realizer_table(path: &Path) -> Result<RealizerTable, Failure> {
    let config: RealizerConfig =
        toml::from_str(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    RealizerTable::from_config(&config, &Registry::standard()).map_err(usage)
}

pub fn lower(out: &Out, path: &Path, realizers: &Path) -> Outcome {
    let n = load(out, path)?.machine;
    let m = lower_machine(&n, &realizer_table(realizers)?).map_err(usage)?;
    let text = dsl::render(&m);
    if out.lines() {
        println!("{}", json!({ "machine": m.name, "source": text }));
    } else {
        print!("{text}");
    }
    Ok(())
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    Rational::new(
        rng.gen_range(-1000..=1000).into(),
        rng.gen_range(1..=300).into(),
    )
}

fn summary(verdicts: &[Verdict]) -> (usize, usize, usize, usize) {
    let count = |f: fn(&Verdict) -> bool| verdicts.iter().filter(|v| f(v)).count();
    (
        count(Verdict::is_verified),
        count(Verdict::is_refuted),
        count(|v| matches!(v, Verdict::Inconclusive { .. })),
        count(|v| matches!(v, Verdict::Skipped)),
    )
}

fn report_verdicts(out: &Out, labels: &[String], verdicts: &[Verdict]) -> Outcome {
    for (label, v) in labels.iter().zip(verdicts) {
        if out.lines() {
            println!("{}", json!({ "sample": label, "result": v }));
        } else if !v.is_verified() {
            println!("{label}: {v}");
        }
    }
    let (verified, refuted, inconclusive, skipped) = summary(verdicts);
    out.emit(
        format!("{verified} verified, {refuted} refuted, {inconclusive} inconclusive, {skipped} skipped"),
        json!({ "verified": verified, "refuted": refuted, "inconclusive": inconclusive, "skipped": skipped }),
    );
    if refuted > 0 {
        Err(Failure::Verdict(format!("{refuted} sample(s) refuted")))
    } else {
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
pub fn checkreal(
    out: &Out,
    path: &Path,
    realizers: &Path,
    samples: Option<&Path>,
    random: Option<usize>,
    seed: u64,
    precision: u32,
    max_steps: usize,
) -> Outcome {
    let n = load(out, path)?.machine;
    let rt = realizer_table(realizers)?;
    let objects: Vec<Vec<Value>> = match (samples, random) {
        (Some(file), _) => read(file)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|line| {
                let fields: Vec<String> = line.split_whitespace().map(String::from).collect();
                parse_inputs(&n, &fields)
            })
            .collect::<Result<_, _>>()?,
        (None, count) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count.unwrap_or(100))
                .map(|_| {
                    (0..n.inputs)
                        .map(|_| Value::Rational(random_rational(&mut rng)))
                        .collect()
                })
                .collect()
        }
    };
    let budgets = Budgets {
        max_steps,
        ..Budgets::default()
    };
    let verdicts = check_lowered(&n, &rt, &objects, precision, &budgets).map_err(usage)?;
    let labels: Vec<String> = objects
        .iter()
        .map(|y| y.iter().map(|v| v.render()).collect::<Vec<_>>().join(" "))
        .collect();
    report_verdicts(out, &labels, &verdicts)
}

pub fn series(out: &Out, coeffs: &str, r: &str, m: &str, z: &str, precision: u32) -> Outcome {
    let rational = |t: &str| literal::rational(t).map_err(usage);
    let (re, im) = z.split_once(',').unwrap_or((z, "0"));
    let z = ComplexQ::new(rational(re)?, rational(im)?);
    let (r, m) = (rational(r)?, rational(m)?);
    let input = if coeffs == "geometric" {
        PowerSeriesInput::geometric(r, m, z)
    } else {
        let list: Vec<Rational> = read(Path::new(coeffs))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(rational)
            .collect::<Result<_, _>>()?;
        PowerSeriesInput::new(move |j| list.get(j).cloned().unwrap_or_default(), r, m, z)
    };
    let partial = series_partial(&input, precision).map_err(|e| Failure::Verdict(e.to_string()))?;
    let name = series_sum(&input).map_err(|e| Failure::Verdict(e.to_string()))?;
    let probe = precision as usize + 8;
    let re = decode_sri(&name.re, precision, probe).map_err(|e| Failure::Verdict(e.to_string()))?;
    let im = decode_sri(&name.im, precision, probe).map_err(|e| Failure::Verdict(e.to_string()))?;
    out.emit(
        format!(
            "b_{precision} = {} ({} terms, q = {})\nRe s ∈ {re}\nIm s ∈ {im}",
            partial.value, partial.n, partial.q
        ),
        json!({
            "k": precision,
            "partial_sum": partial.value.to_string(),
            "terms": partial.n,
            "q": partial.q.to_string(),
            "re": re.to_string(),
            "im": im.to_string(),
        }),
    );
    Ok(())
}

pub fn real_add(out: &Out, a: &str, b: &str, precision: u32) -> Outcome {
    let x = literal::rational(a.strip_prefix("rat:").unwrap_or(a)).map_err(usage)?;
    let y = literal::rational(b.strip_prefix("rat:").unwrap_or(b)).map_err(usage)?;
    let sum = interval_add(&rho_encode(&x), &rho_encode(&y));
    let i = rho_decode(&sum, precision, precision as usize + 8)
        .map_err(|e| Failure::Verdict(e.to_string()))?;
    out.emit(
        format!("{i} (width {})", i.width()),
        json!({ "interval": i.to_string(), "width": i.width().to_string(), "precision": precision }),
    );
    Ok(())
}

fn split_failure(e: SplitError) -> Failure {
    match e {
        SplitError::NotSingleUse(v) => Failure::Verdict(v.to_string()),
        other => usage(other),
    }
}

pub fn wsplit(out: &Out, path: &Path, oracle: &str, out_dir: Option<&Path>) -> Outcome {
    let m = load(out, path)?.machine;
    let s = split(&m, oracle).map_err(split_failure)?;
    let (h, g) = (dsl::render(&s.h), dsl::render(&s.g));
    match out_dir {
        Some(dir) => {
            let hp = dir.join(format!("{}_h.gtm", m.name));
            let gp = dir.join(format!("{}_g.gtm", m.name));
            fs::write(&hp, &h)
                .and_then(|_| fs::write(&gp, &g))
                .map_err(|e| usage(format!("{}: {e}", dir.display())))?;
            out.emit(
                format!("wrote {} and {}", hp.display(), gp.display()),
                json!({ "h": hp.display().to_string(), "g": gp.display().to_string() }),
            );
        }
        None if out.lines() => println!("{}", json!({ "h": h, "g": g })),
        None => print!("// M_H\n{h}\n// M_G\n{g}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn wverify(
    out: &Out,
    path: &Path,
    oracle: &str,
    oracle_impl: Option<&str>,
    samples: u64,
    demand: usize,
    seed: u64,
    max_steps: usize,
) -> Outcome {
    let m = load(out, path)?.machine;
    let s = split(&m, oracle).map_err(split_failure)?;
    let name = oracle_impl.unwrap_or(oracle);
    let registry = Registry::standard();
    let h = registry
        .get(name)
        .ok_or_else(|| usage(format!("unknown function `{name}`")))?;
    let inputs: Vec<Value> = (0..samples)
        .map(|i| Value::Stream(seeded_stream(seed + i)))
        .collect();
    let verdicts = verify_reduction(&m, &s, oracle, h, &inputs, demand, max_steps);
    let labels: Vec<String> = (0..samples).map(|i| format!("seed {}", seed + i)).collect();
    report_verdicts(out, &labels, &verdicts)
}
