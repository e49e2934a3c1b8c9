mod common;

use common::{collocation_tableau, golub_welsch, gram_schmidt, poly_eval, poly_integral};
use hbvm::{ButcherTableau, LegendreBasis, QuadratureRule};

#[test]
fn orthonormal_under_independent_gauss_rule() {
    let (nodes, weights) = golub_welsch(12);
    let basis = LegendreBasis::new(10);
    for i in 0..=10 {
        for j in 0..=10 {
            let ip: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(&x, &w)| w * basis.eval(i, x).unwrap() * basis.eval(j, x).unwrap())
                .sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((ip - expect).abs() <= 1e-13, "<P{i},P{j}> = {ip}");
        }
    }
}

#[test]
fn recurrence_matches_gram_schmidt() {
    let gs = gram_schmidt(4);
    let basis = LegendreBasis::new(6);
    for (j, coeffs) in gs.iter().enumerate() {
        // positive leading coefficient
        assert!(*coeffs.last().unwrap() > 0.0);
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let v = basis.eval(j, x).unwrap();
            assert!((v - poly_eval(coeffs, x)).abs() <= 1e-10, "P{j}({x})");
            if j < 4 {
                let int = basis.eval_int(j, x).unwrap();
                assert!((int - poly_integral(coeffs, x)).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn newton_nodes_match_golub_welsch() {
    for k in 1..=20 {
        let rule = QuadratureRule::gauss(k).unwrap();
        let (nodes, weights) = golub_welsch(k);
        for i in 0..k {
            assert!((rule.nodes()[i] - nodes[i]).abs() <= 1e-14, "k={k}");
            assert!((rule.weights()[i] - weights[i]).abs() <= 1e-14, "k={k}");
        }
    }
}

#[test]
fn direct_double_sum_equals_factorised_tableau() {
    for k in 1..=12 {
        let rule = QuadratureRule::gauss(k).unwrap();
        let basis = LegendreBasis::new(k + 1);
        for s in 1..=k {
            let tab = ButcherTableau::new(&rule, s).unwrap();
            for i in 0..k {
                for l in 0..k {
                    let direct: f64 = rule.weights()[l]
                        * (0..s)
                            .map(|j| basis.eval_int(j, rule.nodes()[i]).unwrap() * basis.eval(j, rule.nodes()[l]).unwrap())
                            .sum::<f64>();
                    assert!((tab.a()[(i, l)] - direct).abs() <= 1e-14, "k={k} s={s}");
                }
            }
            let rep = tab.w_transformation_residuals();
            assert!(rep.factored_tableau <= 1e-14, "k={k} s={s}: {rep:?}");
            assert!(rep.max() <= 1e-12, "k={k} s={s}: {rep:?}");
        }
    }
}

#[test]
fn hbvm_s_s_is_gauss_collocation() {
    for s in 1..=3 {
        let tab = ButcherTableau::gauss(s, s).unwrap();
        let (a, b) = collocation_tableau(tab.c());
        assert!((tab.a() - a).amax() <= 1e-13, "s={s}");
        for (x, y) in tab.b().iter().zip(&b) {
            assert!((x - y).abs() <= 1e-13);
        }
    }
}

#[test]
fn low_order_rule_is_flagged() {
    let rule = QuadratureRule::interpolatory(&[0.25, 0.75]).unwrap();
    assert_eq!(rule.order(), 2);
    let tab = ButcherTableau::new(&rule, 2).unwrap();
    let rep = tab.w_transformation_residuals();
    assert!(rep.orthonormality > 1e-12);
    // exact on P_0, P_1 so the row sums still hold (q >= s)
    assert!(rep.row_sum <= 1e-13);
}
