//! Laguerre recurrence against exact rational evaluation of
//! `L_n^{(-1)}(x) = Σ_{k=1}^{n} C(n-1, k-1) (-x)^k / k!`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use nmep_core::revivals::{laguerre_gen, laguerre_gen_all};

fn exact(n: usize, x: &BigRational) -> (BigRational, BigRational) {
    if n == 0 {
        return (BigRational::one(), BigRational::one());
    }
    let mut sum = BigRational::zero();
    let mut abs_sum = BigRational::zero();
    // term_k = C(n-1, k-1) (-x)^k / k!, built incrementally
    let mut term = -x.clone();
    for k in 1..=n {
        if k > 1 {
            let kb = BigInt::from(k as u64);
            let num = BigInt::from((n - k + 1) as u64);
            term = term * -x.clone() * BigRational::new(num, BigInt::from((k - 1) as u64) * kb);
        }
        sum += term.clone();
        abs_sum += if term < BigRational::zero() { -term.clone() } else { term.clone() };
    }
    (sum, abs_sum)
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

#[test]
fn low_orders_are_exact() {
    for x in [-2.5, 0.0, 0.125, 3.0] {
        let (e2, _) = exact(2, &rational(x));
        assert_eq!(laguerre_gen(2, x), e2.to_f64().unwrap());
    }
}

// Relative error away from roots; near a root the error is measured against
// the size of the largest intermediate value the recurrence carries.
#[test]
fn recurrence_against_rational_arithmetic() {
    let mut worst_rel: f64 = 0.0;
    let mut worst_scaled: f64 = 0.0;
    for n in [1usize, 2, 5, 10, 20, 35, 50] {
        for i in -20..=100 {
            let x = i as f64 * 1.0 + 0.37;
            if x.abs() > 100.0 {
                continue;
            }
            let (e, _) = exact(n, &rational(x));
            let e = e.to_f64().unwrap();
            let got = laguerre_gen(n, x);
            let scale = laguerre_gen_all(n, x).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let rel = (got - e).abs() / e.abs();
            let scaled = (got - e).abs() / scale;
            worst_scaled = worst_scaled.max(scaled);
            if e.abs() >= 1e-3 * scale {
                worst_rel = worst_rel.max(rel);
            }
            assert!(scaled < 1e-13, "n={n} x={x}: got {got}, exact {e}");
        }
    }
    eprintln!("worst relative {worst_rel:e}, worst scaled {worst_scaled:e}");
    assert!(worst_rel < 1e-12);
}
