//! End-to-end acceptance run. Prints one line per criterion and fails if any
//! criterion fails or overruns its time limit.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use milnor_tangent::abelian::{
    make_hom, merge_invariant_factors, smith_normal_form, FpAbelianGroup, GroupWord, IntMatrix,
};
use milnor_tangent::cli::DEFAULT_CATALOG;
use milnor_tangent::differentials::{
    dlog_word, tangent_decomposition, GeneratorPolicy, OmegaGroup,
};
use milnor_tangent::milnor::{slot_reduction_sound, TangentK, UnitGroupData};
use milnor_tangent::ring::Ring;
use milnor_tangent::tangent::*;
use milnor_tangent::{Error, Limits};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn catalog_with_half() -> Vec<Arc<Ring>> {
    DEFAULT_CATALOG
        .iter()
        .map(|s| ring(s))
        .filter(|r| r.has_half())
        .collect()
}

fn tangent(r: &Arc<Ring>, degree: usize) -> TangentK {
    let dual = r.dual_numbers(4096).unwrap();
    TangentK::new(r.clone(), dual, degree, 20_000).unwrap()
}

fn torsion(g: &FpAbelianGroup) -> Vec<u64> {
    let f = g.invariant_factors();
    assert_eq!(f.free_rank, 0);
    f.torsion_u64()
}

fn cli_json(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_milnor-tangent"))
        .args(args)
        .env_remove("MILNOR_TANGENT_CARRIER_CAP")
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn theorem_main() -> Outcome {
    let spec = "poly:zmod:7:t:t^2";
    let text = cli_json(&[
        "verify", "--ring", spec, "--suite", "theorem", "--n", "1", "--format", "json",
    ]);
    let report: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let verdict = &report["results"][0]["verdicts"][0];
    ensure(
        verdict["status"] == "PASS" && verdict["cases"] == verdict["passed"],
        || format!("cli verdict {verdict}"),
    )?;

    let v = verify_theorem(ring(spec), 1, &Limits::default()).map_err(|e| e.to_string())?;
    for (name, ok) in v.checks() {
        ensure(ok, || format!("{name} is false"))?;
    }
    let oracle = torsion(&omega_full_tuples(&ring(spec), 1));
    ensure(oracle == vec![7], || format!("oracle gives {oracle:?}"))?;
    let tk = &v.tk.as_ref().unwrap().factors;
    let omega = &v.omega.as_ref().unwrap().factors;
    ensure(tk == &oracle && omega == &oracle, || {
        format!("TK {tk:?}, Omega {omega:?}")
    })?;
    ensure(v.iso, || "iso is false".into())?;
    Ok(format!("TK_2 = Omega^1 = {oracle:?}"))
}

fn theorem_trivial_targets() -> Outcome {
    let mut notes = Vec::new();
    for spec in ["zmod:7", "poly:zmod:3:x:x^2+1", "zmod:11", "zmod:49"] {
        let start = Instant::now();
        let v = verify_theorem(ring(spec), 1, &Limits::default()).map_err(|e| e.to_string())?;
        let oracle = torsion(&omega_full_tuples(&ring(spec), 1));
        let omega = &v.omega.as_ref().unwrap().factors;
        let tk = &v.tk.as_ref().unwrap().factors;
        ensure(v.iso && v.status == Status::Pass, || {
            format!("{spec}: {v:?}")
        })?;
        ensure(omega == &oracle && tk == &oracle, || {
            format!("{spec}: TK {tk:?}, Omega {omega:?}, oracle {oracle:?}")
        })?;
        ensure(start.elapsed() < Duration::from_secs(60), || {
            format!("{spec} took {:?}", start.elapsed())
        })?;
        notes.push(format!("{spec} {oracle:?}"));
    }
    Ok(notes.join(", "))
}

fn degree_zero() -> Outcome {
    for r in catalog_with_half() {
        let spec = r.spec().to_string();
        let additive: Vec<u64> = r
            .elements()
            .map(|x| {
                (1..=r.size() as i64)
                    .find(|&k| r.scale_int(k, x) == r.zero())
                    .unwrap() as u64
            })
            .collect();
        let expected = factors_from_orders(&additive);
        let tk = tangent(&r, 1);
        let b = build_b(&tk, 20_000).map_err(|e| e.to_string())?;
        ensure(torsion(tk.group()) == expected, || {
            format!(
                "{spec}: TK_1 {:?} vs (R,+) {expected:?}",
                torsion(tk.group())
            )
        })?;
        ensure(torsion(b.omega.group()) == expected, || {
            format!("{spec}: Omega^0 differs")
        })?;
        for s in r.elements() {
            let img = b.hom.apply(&tk.special_symbol(s, &[]).unwrap()).unwrap();
            let expected = b.omega.form(s, &[]).unwrap();
            ensure(
                b.omega.group().words_equal(&img, &expected).unwrap(),
                || format!("{spec}: B{{1+{}e}}", r.format(s)),
            )?;
        }
    }
    Ok(format!("{} rings", catalog_with_half().len()))
}

fn lemma_suites() -> Outcome {
    let mut total = 0;
    for spec in ["zmod:7", "poly:zmod:3:x:x^2+1", "zmod:11"] {
        let ctx = LemmaContext::new(ring(spec), &Limits::default()).map_err(|e| e.to_string())?;
        let mut vs = verify_lemma_epseps(&ctx).map_err(|e| e.to_string())?;
        for n in 2..=5 {
            vs.push(verify_lemma_cool(&ctx, n, 42, DEFAULT_SAMPLES).map_err(|e| e.to_string())?);
        }
        vs.extend(verify_lemma_morrow(&ctx).map_err(|e| e.to_string())?);
        for v in &vs {
            ensure(
                v.status == Status::Pass && v.cases > 0 && v.passed == v.cases,
                || format!("{spec}: {v:?}"),
            )?;
            if v.id == "cool-4" || v.id == "cool-5" {
                ensure(v.cases == DEFAULT_SAMPLES as u64, || {
                    format!("{spec}: {} drew {} samples", v.id, v.cases)
                })?;
            }
            total += v.cases;
        }
    }
    Ok(format!("{total} cases"))
}

fn divisibility() -> Outcome {
    let mut checked = 0;
    for r in catalog_with_half() {
        for degree in [1, 2] {
            let tk = tangent(&r, degree);
            let v = verify_divisibility(&tk).map_err(|e| e.to_string())?;
            let factors = torsion(tk.group());
            ensure(v.status == Status::Pass, || format!("{}: {v:?}", r.spec()))?;
            ensure(factors.iter().all(|d| d % 2 == 1), || {
                format!("{}: {factors:?}", r.spec())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} groups"))
}

fn decomposition() -> Outcome {
    let mut checked = 0;
    for r in catalog_with_half() {
        let dual = r.dual_numbers(4096).unwrap();
        for n in [0, 1] {
            let d = tangent_decomposition(r.clone(), dual.clone(), n, 20_000)
                .map_err(|e| e.to_string())?;
            let (top, low) = (
                d.omega_top.group().invariant_factors(),
                d.omega_low.group().invariant_factors(),
            );
            let mut parts = top.torsion.clone();
            parts.extend(top.torsion.clone());
            parts.extend(low.torsion.clone());
            let whole = d.dual_omega.group().invariant_factors();
            ensure(whole.torsion == merge_invariant_factors(&parts), || {
                format!("{} n={n}: factors differ", r.spec())
            })?;
            let (kernel, _) = d.combined.kernel();
            ensure(kernel.is_trivial() && d.combined.is_isomorphism(), || {
                format!("{} n={n}: not an isomorphism", r.spec())
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} cases"))
}

fn dlog_steinberg() -> Outcome {
    let mut pairs = 0;
    for spec in DEFAULT_CATALOG {
        let r = ring(spec);
        for s in [r.clone(), r.dual_numbers(4096).unwrap()] {
            let omega = OmegaGroup::new(s.clone(), 2, GeneratorPolicy::AllElements)
                .map_err(|e| e.to_string())?;
            for &u in s.units() {
                let v = s.sub(s.one(), u);
                if s.is_unit(v) {
                    let w = dlog_word(&omega, &[u, v]).unwrap();
                    ensure(omega.group().is_zero(&w).unwrap(), || {
                        format!("{}: dlog{{{}, {}}}", s.spec(), s.format(u), s.format(v))
                    })?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn infrastructure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for i in 0..1000 {
        let (rows, cols) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let data: Vec<Vec<BigInt>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| BigInt::from(rng.gen_range(-20i64..=20)))
                    .collect()
            })
            .collect();
        let a = IntMatrix::from_rows(cols, data);
        let f = smith_normal_form(&a);
        ensure(f.u.mul(&a).mul(&f.v) == f.s, || {
            format!("matrix {i}: U A V != S")
        })?;
        ensure(
            f.u.determinant().abs() == BigInt::from(1)
                && f.v.determinant().abs() == BigInt::from(1),
            || format!("matrix {i}: not unimodular"),
        )?;
        ensure(f.s.is_diagonal(), || format!("matrix {i}: S not diagonal"))?;
        let d = f.diagonal();
        for k in 1..d.len() {
            let ok = d[k - 1] >= BigInt::zero()
                && (d[k].is_zero() || (!d[k - 1].is_zero() && (&d[k] % &d[k - 1]).is_zero()));
            ensure(ok, || format!("matrix {i}: chain broken at {k}: {d:?}"))?;
        }
    }

    let mut slot_rings = 0;
    for spec in DEFAULT_CATALOG
        .iter()
        .copied()
        .chain(["zmod:8", "zmod:15", "poly:zmod:3:t:t^3"])
    {
        let r = ring(spec);
        if r.units().len() > 50 {
            continue;
        }
        let units = Arc::new(UnitGroupData::new(r.clone()));
        let sound = slot_reduction_sound(units, 3, 20_000).map_err(|e| e.to_string())?;
        ensure(sound, || format!("{spec}: slot reduction unsound"))?;
        slot_rings += 1;
    }

    // maps Z/a1 + Z/a2 -> Z/b with x_i -> g_i are well defined iff b | a_i g_i
    let mut negatives = 0;
    for _ in 0..300 {
        let a = [rng.gen_range(1u64..=12), rng.gen_range(1u64..=12)];
        let b = rng.gen_range(1u64..=12);
        let g = [rng.gen_range(0i64..12), rng.gen_range(0i64..12)];
        let src = Arc::new(FpAbelianGroup::diagonal(&big(&a)));
        let dst = Arc::new(FpAbelianGroup::cyclic(b));
        let images = g.iter().map(|&x| GroupWord::from_i64(&[x])).collect();
        let expected = (0..2).all(|i| (a[i] as i64 * g[i]) % b as i64 == 0);
        match make_hom(src, dst, images) {
            Ok(_) => ensure(expected, || format!("accepted {a:?} -> Z/{b} by {g:?}"))?,
            Err(Error::RelationNotPreserved { .. }) => {
                ensure(!expected, || format!("rejected {a:?} -> Z/{b} by {g:?}"))?;
                negatives += 1;
            }
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(format!(
        "1000 SNFs, {slot_rings} rings, {negatives} rejected maps"
    ))
}

fn stability_oracle() -> Outcome {
    for spec in DEFAULT_CATALOG {
        let r = ring(spec);
        let q = residue_field_size(&r);
        for k in 2..=6 {
            let got = r.check_weak_stability(k).holds;
            ensure(got == (q > k), || {
                format!("{spec} k={k}: got {got}, residue field has {q} elements")
            })?;
        }
    }
    let f5 = ring("zmod:5");
    ensure(
        f5.check_weak_stability(4).holds && !f5.check_weak_stability(5).holds,
        || "F_5 boundary".into(),
    )?;
    ensure(ring("zmod:7").check_weak_stability(6).holds, || {
        "F_7 weak-6".into()
    })?;
    Ok("8 rings, k = 2..6".into())
}

fn determinism() -> Outcome {
    let args = [
        "verify",
        "--catalog",
        "default",
        "--seed",
        "42",
        "--format",
        "json",
    ];
    let strip = |s: &str| -> String {
        s.lines()
            .filter(|l| !l.contains("\"timing_ms\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let a = cli_json(&args);
    let b = cli_json(&args);
    ensure(strip(&a) == strip(&b), || "reports differ".into())?;
    ensure(a.ends_with('\n'), || "report not newline-terminated".into())?;
    Ok(format!("{} bytes", a.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("theorem on F_7[t]/(t^2), n = 1", 60, theorem_main),
        (
            "theorem on F_7, F_9, F_11, Z/49, n = 1",
            240,
            theorem_trivial_targets,
        ),
        (
            "degree zero: TK_1 = (R,+) = Omega^0, B{1+se} = s",
            5,
            degree_zero,
        ),
        (
            "symbol identity suites on F_7, F_9, F_11",
            120,
            lemma_suites,
        ),
        ("TK is uniquely 2-divisible", 60, divisibility),
        (
            "Omega of the dual numbers splits in three",
            60,
            decomposition,
        ),
        ("dlog kills Steinberg pairs", 30, dlog_steinberg),
        ("SNF, slot reduction, hom certification", 60, infrastructure),
        ("stability against residue fields", 10, stability_oracle),
        ("seeded catalog report is reproducible", 120, determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(note) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{note}; over the {limit} s limit"))
            }
            other => other,
        };
        // Written to stderr directly so the lines survive output capture.
        let line = match &outcome {
            Ok(note) => format!(
                "criterion {:>2} PASS  {name} ({} ms; {note})\n",
                i + 1,
                elapsed.as_millis()
            ),
            Err(why) => {
                failed.push(i + 1);
                format!(
                    "criterion {:>2} FAIL  {name} ({} ms; {why})\n",
                    i + 1,
                    elapsed.as_millis()
                )
            }
        };
        let _ = std::io::stderr().write_all(line.as_bytes());
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
