use rug::{Float, Integer};

use super::*;

#[test]
fn weight_12_eigenvalue_at_two() {
    let h = hecke_basis(12).unwrap();
    assert_eq!(h.len(), 1);
    let expect = -24.0 / 2f64.powf(5.5);
    assert!((h[0].hecke_eigenvalue(2) - expect).abs() < 1e-15);
    assert!((expect + 0.530330).abs() < 1e-6);
    assert_eq!(h[0].hecke_eigenvalue(1), 1.0);
}

#[test]
fn weight_24_spectrum_matches_closed_form() {
    let data = miller_data(24, 20).unwrap();
    let cp = char_poly(&t2_matrix(&data));
    // discriminant of x^2 + b x + c
    let disc = Integer::from(&cp[1] * &cp[1]) - Integer::from(4) * &cp[0];
    assert!(disc > 0);
    assert_eq!(cp[1], -1080);
    assert_eq!(cp[0], Integer::from(-20468736i64));
    let h = hecke_basis(24).unwrap();
    assert_eq!(h.len(), 2);
    let s = 12.0 * 144169f64.sqrt();
    let scale = 2f64.powf(11.5);
    assert!((h[0].hecke_eigenvalue(2) - (540.0 - s) / scale).abs() < 1e-13);
    assert!((h[1].hecke_eigenvalue(2) - (540.0 + s) / scale).abs() < 1e-13);
    assert!(h[0].hecke_eigenvalue(2) < h[1].hecke_eigenvalue(2));
}

#[test]
fn multiplicativity_examples() {
    let d = &hecke_basis(12).unwrap()[0];
    let l2 = d.hecke_eigenvalue(2);
    let l3 = d.hecke_eigenvalue(3);
    assert!((d.hecke_eigenvalue(6) - l2 * l3).abs() < 1e-14);
    assert!((d.hecke_eigenvalue(4) - (l2 * l2 - 1.0)).abs() < 1e-14);
    assert!((d.hecke_eigenvalue(12) - d.hecke_eigenvalue(4) * l3).abs() < 1e-14);
}

#[test]
fn direct_coefficients_obey_hecke_relations() {
    for k in [12u32, 24, 36, 48, 60] {
        for f in hecke_basis(k).unwrap() {
            let n = f.space().exact_len();
            for a in 1..=8usize {
                for b in 1..=8usize {
                    if a * b > n {
                        continue;
                    }
                    let lhs = f.lambda_direct(a).unwrap() * f.lambda_direct(b).unwrap();
                    let g = crate::arith::numtheory::gcd(a as u64, b as u64) as usize;
                    let rhs: f64 = (1..=g)
                        .filter(|d| g.is_multiple_of(*d))
                        .map(|d| f.lambda_direct(a * b / (d * d)).unwrap())
                        .sum();
                    assert!((lhs - rhs).abs() < 1e-12, "k={k} a={a} b={b}");
                }
            }
        }
    }
}

#[test]
fn extended_table_agrees_with_direct_values() {
    let h = hecke_eigenforms(36, 300, 160).unwrap();
    for f in &h {
        let table = f.lambdas(5000);
        for n in 1..=300 {
            assert!(
                (table[n] - f.lambda_direct(n).unwrap()).abs() < 1e-12,
                "n={n}"
            );
        }
        for p in [307u64, 1009, 4999] {
            assert!(table[p as usize].abs() <= 2.0 + 1e-10);
        }
    }
}

#[test]
fn reconstruction_from_eigenforms() {
    // an arbitrary integer cusp form projects onto H_k and is rebuilt exactly
    let k = 48;
    let basis = miller_basis(k, 60).unwrap();
    let h = hecke_eigenforms(k, 60, 192).unwrap();
    let d = basis.len();
    let mut target = vec![Integer::new(); 61];
    for (i, b) in basis.iter().enumerate() {
        let c = Integer::from(3 * i as i64 - 5);
        for n in 1..=60 {
            target[n] += &c * b.coeff(n);
        }
    }
    // coordinates along H_k: solve sum_f c_f a_f(m) = target(m), m <= d
    let prec = 192;
    let coeffs: Vec<Vec<Float>> = h.iter().map(|f| f.qexp_coeffs(60).unwrap()).collect();
    let mut m: Vec<Vec<Float>> = (0..d)
        .map(|r| {
            let mut row: Vec<Float> = (0..d).map(|c| coeffs[c][r].clone()).collect();
            row.push(Float::with_val(prec, &target[r + 1]));
            row
        })
        .collect();
    for col in 0..d {
        for r in (col + 1)..d {
            let f = Float::with_val(prec, &m[r][col] / &m[col][col]);
            for c in col..=d {
                let t = Float::with_val(prec, &f * &m[col][c]);
                m[r][c] -= t;
            }
        }
    }
    let mut x = vec![Float::with_val(prec, 0); d];
    for col in (0..d).rev() {
        let mut s = m[col][d].clone();
        for c in (col + 1)..d {
            s -= Float::with_val(prec, &m[col][c] * &x[c]);
        }
        x[col] = s / &m[col][col];
    }
    for n in 1..=60 {
        let mut acc = Float::with_val(prec, 0);
        for f in 0..d {
            acc += Float::with_val(prec, &x[f] * &coeffs[f][n - 1]);
        }
        let err = Float::with_val(prec, &acc - &target[n]).abs();
        let size = Float::with_val(prec, &target[n])
            .abs()
            .max(&Float::with_val(prec, 1));
        assert!((err / size).to_f64() < 1e-40, "n={n}");
    }
}

#[test]
fn eigenvalues_invariant_under_rescaling() {
    // lambda is a ratio a(n)/(a(1) n^{(k-1)/2}); scale a_f by 7 and recompute
    let f = &hecke_basis(20).unwrap()[0];
    let a = f.qexp_coeffs(10).unwrap();
    for n in 1..=10usize {
        let scaled = Float::with_val(160, &a[n - 1] * 7u32) / Float::with_val(160, &a[0] * 7u32);
        let lam = scaled.to_f64() / (n as f64).powf(9.5);
        assert!((lam - f.hecke_eigenvalue(n as u64)).abs() < 1e-14);
    }
}

#[test]
fn degenerate_polynomial_detected() {
    let p = vec![Integer::from(1), Integer::from(-2), Integer::from(1)]; // (x-1)^2
    assert!(matches!(
        real_roots(&p, 128),
        Err(crate::error::Error::DegenerateSpectrum(_))
    ));
}

#[test]
fn text_roundtrip() {
    let f = &hecke_basis(24).unwrap()[1];
    let text = serialize_eigenform(f, 40);
    assert!(text.starts_with("weight=24 dim=2\n"));
    let parsed = parse_eigenform(&text).unwrap();
    assert_eq!(parsed.weight, 24);
    assert_eq!(parsed.dim, 2);
    assert_eq!(parsed.lambdas.len(), 40);
    for (n, v) in parsed.lambdas {
        assert_eq!(v, f.hecke_eigenvalue(n));
    }
    assert!(parse_eigenform("weight=12\nlambda 1 1\n").is_err());
    assert!(parse_eigenform("weight=12 dim=1\nlambda x 1\n").is_err());
}

#[test]
fn basis_is_built_once_per_weight() {
    let a = hecke_basis(24).unwrap();
    let b = hecke_basis(24).unwrap();
    assert!(a.iter().zip(&b).all(|(f, g)| f.same(g)));
}
