//! GF(2)[x] helpers for choosing reduction polynomials.

use super::field::GfContext;

fn degree(p: &[u64]) -> Option<usize> {
    p.iter()
        .rposition(|&l| l != 0)
        .map(|i| i * 64 + 63 - p[i].leading_zeros() as usize)
}

/// `a ^= b · x^shift`
fn xor_shifted(a: &mut Vec<u64>, b: &[u64], shift: usize) {
    let (ws, bs) = (shift / 64, shift % 64);
    let need = b.len() + ws + 1;
    if a.len() < need {
        a.resize(need, 0);
    }
    for (i, &l) in b.iter().enumerate() {
        a[i + ws] ^= l << bs;
        if bs > 0 {
            a[i + ws + 1] ^= l >> (64 - bs);
        }
    }
}

fn rem(mut a: Vec<u64>, b: &[u64]) -> Vec<u64> {
    let db = degree(b).expect("division by zero polynomial");
    while let Some(da) = degree(&a) {
        if da < db {
            break;
        }
        xor_shifted(&mut a, b, da - db);
    }
    a
}

fn gcd(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while degree(&b).is_some() {
        let r = rem(a, &b);
        a = b;
        b = r;
    }
    a
}

fn prime_factors(mut m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn taps_of(f: &[u64], m: usize) -> Vec<usize> {
    (0..m)
        .rev()
        .filter(|&e| (f[e / 64] >> (e % 64)) & 1 == 1)
        .collect()
}

fn x_poly(m: usize) -> Vec<u64> {
    let mut x = vec![0u64; m.div_ceil(64).max(1)];
    if m > 1 {
        x[0] = 2;
    }
    x
}

/// `gcd(x^{2^k} − x, f)` is trivial for every `k` in `ks`, plus (when
/// `full`) `x^{2^m} ≡ x (mod f)`. `f` has degree `m ≥ 2`.
fn frobenius_checks(f: &[u64], m: usize, ks: &[usize], full: bool) -> bool {
    let ctx = GfContext::unchecked(m, taps_of(f, m));
    let x = x_poly(m);
    let last = if full {
        m
    } else {
        ks.iter().copied().max().unwrap_or(0)
    };
    let mut cur = x.clone();
    for k in 1..=last {
        cur = ctx.mul_limbs(&cur, &cur);
        if ks.contains(&k) {
            let mut diff = cur.clone();
            for (d, xl) in diff.iter_mut().zip(&x) {
                *d ^= xl;
            }
            let g = gcd(f, &diff);
            if degree(&g) != Some(0) {
                return false;
            }
        }
    }
    !full || cur == x
}

/// Rabin's test: `f` of degree `m` is irreducible iff `x^{2^m} ≡ x (mod f)`
/// and `gcd(x^{2^{m/r}} − x, f) = 1` for every prime `r | m`.
pub(crate) fn is_irreducible(f: &[u64]) -> bool {
    let Some(m) = degree(f) else {
        return false;
    };
    match m {
        0 => false,
        1 => true,
        _ if f[0] & 1 == 0 => false,
        _ => {
            let ks: Vec<usize> = prime_factors(m).into_iter().map(|r| m / r).collect();
            frobenius_checks(f, m, &ks, true)
        }
    }
}

/// Exponents below `m` of the first irreducible `x^m + r(x)`, scanning
/// `r = 1, 3, 5, ...` in increasing numeric order.
pub(crate) fn first_irreducible(m: usize) -> Vec<usize> {
    assert!(m >= 1);
    let limbs = (m + 1).div_ceil(64);
    let small: Vec<usize> = (1..=(m / 2).min(12)).collect();
    let mut low: u64 = 1;
    loop {
        let mut f = vec![0u64; limbs];
        f[0] = low;
        f[m / 64] |= 1 << (m % 64);
        // Any reducible f has a factor of degree ≤ m/2; small factors are
        // ruled out cheaply before the full test.
        let cheap_ok = m < 2 || frobenius_checks(&f, m, &small, false);
        if cheap_ok && is_irreducible(&f) {
            return taps_of(&f, m);
        }
        low += 2;
        assert!(
            m >= 64 || low < (1 << m),
            "no irreducible polynomial of degree {m}"
        );
    }
}
