//! Acceptance suite: one test per criterion, each printing a pass line.
//! Every tolerance here is exact coefficient agreement on the stated
//! window; there are no numeric thresholds to calibrate.

use qtail_core::bracket::{head_tail_match, jones2, kauffman_bracket, pretzel_pd};
use qtail_core::qfun::{euler_function, pentagonal_euler, SignedMonomial as M};
use qtail_core::series::{agree_up_to, SeriesError, TruncatedSeries};
use qtail_core::skein::{
    bubble_general, bubble_nann, bubble_sym, coeff_e, coeff_p, gamma_coeff, theta_coeff,
    theta_nn2i, GammaMethod, Method,
};
use qtail_core::stabilization::{normalized_skein, route_check, stabilization_check};
use qtail_core::tails::{
    tail_lk_multisum, tail_lk_product, tail_phi, tail_torus_even, tail_torus_odd, TailFamily,
    TailSpec,
};
use qtail_core::theta::{false_theta, ramanujan_theta};

/// Exact equality through `t` units of the common grid.
fn assert_eq_through(a: &TruncatedSeries, b: &TruncatedSeries, t: i64, what: &str) {
    let g = a.grid().max(b.grid());
    let a = a.promote(g).unwrap();
    let b = b.promote(g).unwrap();
    let t = (t * g as i64).min(a.trunc()).min(b.trunc());
    assert_eq!(a.truncate_to(t), b.truncate_to(t), "{what}");
}

#[test]
fn criterion_01_pentagonal_oracle() {
    let n = 2000;
    let product = euler_function(n);
    let oracle = pentagonal_euler(n);
    assert_eq!(product, oracle, "product expansion vs pentagonal number theorem");
    println!("[PASS] criterion 1: (q;q)_inf product = pentagonal series, {n} coefficients");
}

#[test]
fn criterion_02_false_theta_chain_500() {
    let n = 500;
    let psi = false_theta(M::q_pow(3), M::q_pow(1), n).unwrap();
    let mid = tail_torus_even(2, n, 1).unwrap();
    let right = tail_lk_product(1, n, 1).unwrap();
    assert_eq!(psi, mid, "Psi(q^3,q) vs (q;q)_inf sum q^(k^2+k)/(q;q)_k^2");
    assert_eq!(mid, right, "middle vs (q;q)_inf^2 sum q^k/(q;q)_k^2");
    println!("[PASS] criterion 2: false-theta chain exact on {n} coefficients");
}

#[test]
fn criterion_03_fock2() {
    for k in [2u64, 3, 4] {
        let lhs = false_theta(M::q_pow(2 * k as i64 - 1), M::q_pow(1), 200).unwrap();
        let rhs = tail_torus_even(k, 200, 1).unwrap();
        assert_eq!(lhs, rhs, "fock2 k={k}");
    }
    println!("[PASS] criterion 3: Psi(q^(2k-1),q) = torus-even multi-sum, k in 2..4, 200 coefficients");
}

#[test]
fn criterion_04_and1() {
    for k in [1u64, 2, 3] {
        let lhs = ramanujan_theta(M::neg_q_pow(2 * k as i64), M::neg_q_pow(1), 200).unwrap();
        let rhs = tail_torus_odd(k, 200, 1).unwrap();
        assert_eq!(lhs, rhs, "and1 k={k}");
    }
    assert_eq!(tail_torus_odd(1, 200, 1).unwrap(), euler_function(200), "k=1 vs Euler function");
    println!("[PASS] criterion 4: f(-q^2k,-q) = torus-odd multi-sum, k in 1..3, 200 coefficients");
}

#[test]
fn criterion_05_corollary() {
    for k in [1u64, 2, 3] {
        let a = tail_lk_product(k, 150, 1).unwrap();
        let b = tail_lk_multisum(k, 150, 1).unwrap();
        assert_eq!(a, b, "corollary k={k}");
    }
    // k = 1 additionally matches the middle of the false-theta chain
    assert_eq!(
        tail_lk_product(1, 150, 1).unwrap(),
        tail_torus_even(2, 150, 1).unwrap(),
        "k=1 vs middle display"
    );
    println!("[PASS] criterion 5: L_k product form = multi-sum form, k in 1..3, 150 coefficients");
}

#[test]
fn criterion_06_phi_reproduces_8_5_display() {
    let n = 150i64;
    // the published display, evaluated directly and independently
    let mut sum = TruncatedSeries::zero(1, n);
    let mut i = 0i64;
    while i * (i + 1) < n {
        let mut j = 0i64;
        while i * (i + 1) + j * (j + 1) < n {
            let num = qtail_core::qfun::pochhammer_q((i + j) as u64)
                .mul_monomial(1, i + i * i + j + j * j);
            let den = qtail_core::qfun::pochhammer_q(i as u64)
                .pow(2)
                .mul(&qtail_core::qfun::pochhammer_q(j as u64).pow(2));
            sum = sum.add(&num.div_to(&den, n).unwrap());
            j += 1;
        }
        i += 1;
    }
    let e = euler_function(n);
    let display = sum.mul(&e).mul(&e).truncate_to(n);
    let phi = tail_phi(1, 1, n, 1).unwrap();
    assert_eq!(phi, display, "Phi(1,1) through the general machinery vs the 8_5 display");
    println!("[PASS] criterion 6: tail_phi(1,1) = published 8_5 series, {n} coefficients");
}

#[test]
fn criterion_07_closed_vs_definitional() {
    // theta(n,n,2i) closed Pochhammer form vs factorial formula, n <= 8
    for n in 0..=8u64 {
        for i in 0..=n {
            let c = theta_nn2i(n, i, 100).unwrap();
            let f = theta_coeff(n, n, 2 * i, 100);
            assert_eq_through(&c, &f, 100, &format!("theta_nn2i({n},{i})"));
        }
    }
    // bubble closed forms vs the general theorem, n <= 5
    for n in 1..=5u64 {
        for a in 0..=n {
            for b in 0..=a.min(n) {
                let c = bubble_nann(n, a, b, 80).unwrap();
                let g = bubble_general(n, a, n, n, b, 80).unwrap();
                assert_eq_through(&c, &g, 80, &format!("bubble_nann({n},{a},{b})"));
            }
            for i in 0..=n - a {
                let c = bubble_sym(n, a, i, 80).unwrap();
                let g = bubble_general(n - a, n - a, n + a, n, i, 80).unwrap();
                assert_eq_through(&c, &g, 80, &format!("bubble_sym({n},{a},{i})"));
            }
        }
    }
    // E/P closed vs definitional on all monotone tuples, n <= 4, k <= 3
    fn tuples(n: u64, k: usize) -> Vec<Vec<u64>> {
        let mut out = vec![];
        fn rec(n: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for v in 0..=cur.last().copied().unwrap_or(n) {
                cur.push(v);
                rec(n, k, cur, out);
                cur.pop();
            }
        }
        rec(n, k, &mut vec![], &mut out);
        out
    }
    for n in 1..=4u64 {
        for k in 1..=3usize {
            for idx in tuples(n, k) {
                let ed = coeff_e(n, &idx, Method::Definitional, 60).unwrap();
                let ec = coeff_e(n, &idx, Method::Closed, 60).unwrap();
                assert_eq_through(&ed, &ec, 60, &format!("E n={n} idx={idx:?}"));
                let pd = coeff_p(n, &idx, Method::Definitional, 60).unwrap();
                let pc = coeff_p(n, &idx, Method::Closed, 60).unwrap();
                assert_eq_through(&pd, &pc, 60, &format!("P n={n} idx={idx:?}"));
            }
        }
    }
    // Gamma closed vs assembled, n <= 4
    for n in 1..=4u64 {
        for i in 0..=n {
            for j in 0..=n {
                let c = gamma_coeff(n, i, j, GammaMethod::Closed, 60).unwrap();
                let a = gamma_coeff(n, i, j, GammaMethod::Assembled, 60).unwrap();
                assert_eq_through(&c, &a, 60, &format!("Gamma n={n} i={i} j={j}"));
            }
        }
    }
    println!("[PASS] criterion 7: all closed forms equal their defining routes on the full small domains");
}

/// Normalized finite-color value with a window wide enough for `need`
/// integer coefficients after normalization.
fn skein_with_window(family: TailFamily, n: u64, need: usize) -> TruncatedSeries {
    let mut t = 2 * (need as i64 + 2);
    for _ in 0..20 {
        let s = normalized_skein(family, n, t).unwrap();
        let (norm, _, _) = s.normalize_tail().unwrap();
        if norm.trunc() >= 2 * need as i64 {
            return s;
        }
        t *= 2;
    }
    panic!("window did not stabilize for {family:?} n={n}");
}

#[test]
fn criterion_08_stabilization() {
    let families: Vec<TailFamily> = vec![
        TailFamily::LkProduct { k: 1 },
        TailFamily::LkProduct { k: 2 },
        TailFamily::LkProduct { k: 3 },
        TailFamily::Phi { k: 1, u: 1 },
        TailFamily::Phi { k: 1, u: 2 },
        TailFamily::Phi { k: 2, u: 1 },
        TailFamily::Phi { k: 2, u: 2 },
    ];
    for family in families {
        let mut prev: Option<TruncatedSeries> = None;
        for n in 1..=8u64 {
            let spec = TailSpec { family, trunc: n as i64 + 2 };
            let report = stabilization_check(&spec, n).unwrap();
            assert!(
                report.agreed() && report.agreed_terms >= n as usize,
                "{family:?} n={n}: {report:?}"
            );
            // consecutive colors agree through n terms
            let cur = skein_with_window(family, n, n as usize + 1);
            if let Some(p) = &prev {
                let r = agree_up_to(p, &cur, (n - 1) as usize).unwrap();
                assert!(r.agreed(), "{family:?} consecutive n={}..{n}: {r:?}", n - 1);
            }
            prev = Some(cur);
        }
    }
    println!("[PASS] criterion 8: S_B^(n)/Delta_n matches tails in >= n terms and stabilizes in n, n <= 8");
}

#[test]
fn criterion_09_route_equality() {
    let mut printed_all_matched = true;
    for n in 1..=5u64 {
        for k in 1..=3u64 {
            let r = route_check(n, k, 40).unwrap();
            assert!(
                r.corrected_equal,
                "theta route vs bubble route (corrected bound) n={n} k={k}: {r:?}"
            );
            if !r.printed_equal {
                printed_all_matched = false;
                // machine-readable discrepancy record, never a silent pass
                println!("[INFO] criterion 9 discrepancy report: {}", r.to_json());
            }
        }
    }
    assert!(
        !printed_all_matched,
        "the printed final-Delta bound unexpectedly matches; the corrected-bound note is stale"
    );
    println!("[PASS] criterion 9: routes agree exactly under the corrected bound, n <= 5, k <= 3");
}

#[test]
fn criterion_10_bracket_oracle() {
    // trefoil vs the torus-odd k=1 tail
    let j = jones2(&pretzel_pd(&[1, 1, 1]).unwrap(), 1).unwrap();
    let tail = tail_torus_odd(1, 12, 1).unwrap();
    let (r, _) = head_tail_match(&j, &tail).unwrap();
    assert!(r.agreed_terms >= 2, "P(1,1,1) vs torus-odd(1): {r:?}");

    // P(3,2,3) vs the Phi(1,1) tail
    let j = jones2(&pretzel_pd(&[3, 2, 3]).unwrap(), 1).unwrap();
    let (r, _) = head_tail_match(&j, &tail_phi(1, 1, 12, 1).unwrap()).unwrap();
    assert!(r.agreed_terms >= 2, "P(3,2,3) vs phi(1,1): {r:?}");

    // P(2,2,2) vs the ladder-family tails: the two ends of its Jones
    // polynomial see L_1 and L_2
    let j = jones2(&pretzel_pd(&[2, 2, 2]).unwrap(), 1).unwrap();
    let (r, _) = head_tail_match(&j, &tail_lk_product(1, 12, 1).unwrap()).unwrap();
    assert!(r.agreed_terms >= 2, "P(2,2,2) vs lk-product(1): {r:?}");
    let (r, _) = head_tail_match(&j, &tail_lk_product(2, 12, 1).unwrap()).unwrap();
    assert!(r.agreed_terms >= 2, "P(2,2,2) vs lk-product(2): {r:?}");
    let j4 = jones2(&pretzel_pd(&[2, 2, 2, 2]).unwrap(), 1).unwrap();
    let (r, _) = head_tail_match(&j4, &tail_lk_product(3, 12, 1).unwrap()).unwrap();
    assert!(r.agreed_terms >= 2, "P(2,2,2,2) vs lk-product(3): {r:?}");

    // negative control: a perturbed tail must fail and report the mismatch
    let perturbed = tail.add(&TruncatedSeries::monomial(1, 1, 1));
    let (r, _) = head_tail_match(&j, &perturbed).unwrap();
    assert!(r.agreed_terms <= 1 && r.first_mismatch.is_some(), "negative control: {r:?}");
    println!("[PASS] criterion 10: Jones oracle matches family tails on 2 normalized end coefficients");
}

#[test]
fn criterion_11_determinism_across_jobs() {
    for family in [
        TailFamily::TorusOdd { k: 3 },
        TailFamily::TorusEven { k: 4 },
        TailFamily::Phi { k: 2, u: 2 },
        TailFamily::LkProduct { k: 3 },
        TailFamily::LkMultisum { k: 3 },
    ] {
        let a = TailSpec { family, trunc: 80 }.eval(1).unwrap();
        let b = TailSpec { family, trunc: 80 }.eval(8).unwrap();
        assert_eq!(
            a.to_json().to_string(),
            b.to_json().to_string(),
            "jobs determinism for {family:?}"
        );
    }
    for params in [[1u64, 1, 1].as_slice(), &[3, 2, 3], &[2, 2, 2, 2]] {
        let d = pretzel_pd(params).unwrap();
        let a = kauffman_bracket(&d, 1).unwrap();
        let b = kauffman_bracket(&d, 8).unwrap();
        assert_eq!(a, b, "bracket determinism for {params:?}");
    }
    println!("[PASS] criterion 11: jobs=1 and jobs=8 produce bit-identical series");
}

#[test]
fn agreement_window_errors_are_reported() {
    // sanity for the checker plumbing: insufficient windows surface as the
    // typed error, not as a silent short comparison
    let a = euler_function(3);
    let b = euler_function(10);
    assert!(matches!(
        agree_up_to(&a, &b, 5),
        Err(SeriesError::InsufficientTruncation { .. })
    ));
}
