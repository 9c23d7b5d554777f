mod common;

use common::ring;
use milnor_tangent::abelian::GroupWord;
use milnor_tangent::differentials::{compare_policies, GeneratorPolicy, OmegaGroup};
use milnor_tangent::milnor::{scaling_action, TangentK};
use milnor_tangent::tangent::*;
use milnor_tangent::Limits;

fn tangent(spec: &str, degree: usize) -> TangentK {
    let r = ring(spec);
    let dual = r.dual_numbers(4096).unwrap();
    TangentK::new(r, dual, degree, 20_000).unwrap()
}

#[test]
fn b_sends_special_symbols_to_forms() {
    let tk = tangent("poly:zmod:7:t:t^2", 2);
    let b = build_b(&tk, 20_000).unwrap();
    let r = tk.base().clone();
    let zero = GroupWord::zero(tk.group().generators());
    assert!(b
        .omega
        .group()
        .is_zero(&b.hom.apply(&zero).unwrap())
        .unwrap());
    for s in r.elements() {
        for &u in r.units() {
            let sym = tk.special_symbol(s, &[u]).unwrap();
            let expected = b.omega.form(s, &[u]).unwrap();
            let got = b.hom.apply(&sym).unwrap();
            assert!(b.omega.group().words_equal(&got, &expected).unwrap());
        }
    }
}

#[test]
fn f_on_small_examples() {
    let tk = tangent("poly:zmod:7:t:t^2", 2);
    let r = tk.base().clone();
    let units_only = OmegaGroup::new(r.clone(), 1, GeneratorPolicy::UnitsOnly).unwrap();
    let f = build_f(&tk, &units_only).unwrap();
    let zero = GroupWord::zero(units_only.group().generators());
    assert!(tk.group().is_zero(&f.apply(&zero).unwrap()).unwrap());
    // F(s dr) for a unit r is the class of {1 + s r e, r}
    let r_unit = r.add(r.one(), r.additive_basis()[1]);
    for s in r.elements() {
        let w = units_only.form(s, &[r_unit]).unwrap();
        let sym = tk
            .symbol(&[
                tk.dual()
                    .dual_from_parts(r.one(), r.mul(s, r_unit))
                    .unwrap(),
                tk.dual().include_base(r_unit).unwrap(),
            ])
            .unwrap();
        assert!(tk.group().words_equal(&f.apply(&w).unwrap(), &sym).unwrap());
    }

    // Omega^1 of F_7 vanishes, so every generator goes to zero.
    let tk = tangent("zmod:7", 2);
    let units_only = OmegaGroup::new(tk.base().clone(), 1, GeneratorPolicy::UnitsOnly).unwrap();
    let f = build_f(&tk, &units_only).unwrap();
    for i in 0..units_only.group().generators() {
        let img = f
            .apply(&GroupWord::generator(units_only.group().generators(), i))
            .unwrap();
        assert!(tk.group().is_zero(&img).unwrap());
    }
}

#[test]
fn f_requires_hypotheses() {
    let tk = tangent("zmod:5", 2);
    let units_only = OmegaGroup::new(tk.base().clone(), 1, GeneratorPolicy::UnitsOnly).unwrap();
    assert!(matches!(
        build_f(&tk, &units_only),
        Err(milnor_tangent::Error::NotStable { k: 5 })
    ));
    let tk = tangent("zmod:6", 2);
    assert!(matches!(
        build_b(&tk, 20_000),
        Err(milnor_tangent::Error::NoHalf)
    ));
}

#[test]
fn b_and_f_are_inverse() {
    for spec in ["zmod:7", "poly:zmod:3:x:x^2+1", "poly:zmod:7:t:t^2"] {
        let tk = tangent(spec, 2);
        let b = build_b(&tk, 20_000).unwrap();
        let cmp = compare_policies(tk.base().clone(), 1).unwrap();
        let f = build_f(&tk, &cmp.units_only).unwrap();
        assert!(
            f.then(&b.hom).unwrap().agrees_with(&cmp.forward).unwrap(),
            "{spec}"
        );
        let fb = b.hom.then(&cmp.backward).unwrap().then(&f).unwrap();
        assert!(fb.is_isomorphism(), "{spec}");
        assert!(b.hom.is_isomorphism(), "{spec}");
    }
}

#[test]
fn theorem_verdicts() {
    let limits = Limits::default();
    let v = verify_theorem(ring("poly:zmod:7:t:t^2"), 1, &limits).unwrap();
    assert_eq!(v.status, Status::Pass);
    assert_eq!(v.tk.as_ref().unwrap().factors, vec![7]);
    assert_eq!(v.omega.as_ref().unwrap().factors, vec![7]);
    assert!(v.iso);

    let v = verify_theorem(ring("zmod:5"), 1, &limits).unwrap();
    assert!(!v.weak_five_fold);
    assert_ne!(v.status, Status::Pass);
    assert_ne!(v.status, Status::Fail);
}

#[test]
fn epseps_examples() {
    let ctx = LemmaContext::new(ring("zmod:7"), &Limits::default()).unwrap();
    let r = ctx.base.clone();
    assert!(ctx.epseps_ii(r.from_int(1), r.from_int(2)).unwrap());
    // r_1 + r_2 = 0 is outside the statement
    assert!(ctx.epseps_ii(r.from_int(3), r.from_int(4)).is_err());
    let vs = verify_lemma_epseps(&ctx).unwrap();
    let iii = vs.iter().find(|v| v.id == "epseps-iii").unwrap();
    assert_eq!((iii.cases, iii.passed), (49, 49));
}

#[test]
fn cool_examples() {
    let ctx = LemmaContext::new(ring("zmod:7"), &Limits::default()).unwrap();
    let r = ctx.base.clone();
    for &u in r.units() {
        assert!(ctx.cool(&[u, r.neg(u)]).unwrap());
    }
    assert!(ctx
        .cool(&[r.from_int(1), r.from_int(2), r.from_int(4)])
        .unwrap());
    assert!(ctx.cool(&[r.from_int(1), r.from_int(1)]).is_err());
    let a = verify_lemma_cool(&ctx, 4, 7, 100).unwrap();
    let b = verify_lemma_cool(&ctx, 4, 7, 100).unwrap();
    assert_eq!((a.cases, a.passed), (b.cases, b.passed));
    assert_eq!(a.cases, 100);
}

#[test]
fn morrow_examples() {
    let ctx = LemmaContext::new(ring("zmod:7"), &Limits::default()).unwrap();
    let r = ctx.base.clone();
    let w = ctx.k2_base.symbol(&[r.from_int(3), r.from_int(4)]).unwrap();
    assert!(ctx.k2_base.group().is_zero(&w).unwrap());
    let vs = verify_lemma_morrow(&ctx).unwrap();
    assert_eq!(vs[1].cases, 36);
    assert!(vs.iter().all(|v| v.status == Status::Pass));
}

#[test]
fn divisibility_examples() {
    for (spec, degree) in [("zmod:7", 1), ("zmod:7", 2), ("poly:zmod:3:x:x^2+1", 2)] {
        let v = verify_divisibility(&tangent(spec, degree)).unwrap();
        assert_eq!(v.status, Status::Pass, "{spec}");
    }
    let v = verify_divisibility(&tangent("zmod:6", 2)).unwrap();
    assert_eq!(v.status, Status::SkippedNoHalf);
}

#[test]
fn action_examples() {
    let tk = tangent("zmod:7", 2);
    let r = tk.base().clone();
    let one = scaling_action(&tk, r.one()).unwrap();
    assert!(one
        .agrees_with(&milnor_tangent::abelian::GroupHom::identity(
            tk.group().clone()
        ))
        .unwrap());
    let three = scaling_action(&tk, r.from_int(3)).unwrap();
    let v = tk.special_symbol(r.from_int(2), &[r.from_int(5)]).unwrap();
    let expected = tk.special_symbol(r.from_int(6), &[r.from_int(5)]).unwrap();
    assert!(tk
        .group()
        .words_equal(&three.apply(&v).unwrap(), &expected)
        .unwrap());
    let vs = verify_action(&tk).unwrap();
    assert_eq!(vs[1].cases, 49);
    assert!(vs.iter().all(|v| v.status == Status::Pass));

    // the action on a ring with a nontrivial tangent group
    let vs = verify_action(&tangent("poly:zmod:7:t:t^2", 2)).unwrap();
    assert!(vs.iter().all(|v| v.status == Status::Pass));
}

#[test]
fn failing_cases_replay() {
    // without 1/2 the third identity has counterexamples
    let ctx = LemmaContext::new(ring("zmod:6"), &Limits::default()).unwrap();
    let r = ctx.base.clone();
    let mut found = None;
    'outer: for x in r.elements() {
        for y in r.elements() {
            if !ctx.epseps_iii(x, y).unwrap() {
                found = Some(vec![x.index(), y.index()]);
                break 'outer;
            }
        }
    }
    let inputs = found.expect("a failing pair");
    assert!(!ctx.replay("epseps-iii", &inputs).unwrap());
    assert!(ctx.replay("epseps-ii", &[1, 1]).is_err());
    assert!(ctx.replay("no-such-case", &[]).is_err());
}

#[test]
fn structure_verdicts() {
    let tk = tangent("poly:zmod:7:t:t^2", 2);
    let vs = verify_structure(&tk, &Limits::default()).unwrap();
    assert!(vs.iter().all(|v| v.status == Status::Pass), "{vs:?}");
    let tk = tangent("zmod:6", 2);
    let vs = verify_structure(&tk, &Limits::default()).unwrap();
    assert!(vs.iter().all(|v| v.status != Status::Fail), "{vs:?}");
}
