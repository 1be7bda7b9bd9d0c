//! Independent reference implementations used as test oracles. Everything
//! here works on dense `Vec<u8>` data or brute-force enumeration and shares
//! no code with the library's sparse kernels.
#![allow(dead_code)]

use rand::Rng;

pub type Dense = Vec<Vec<u8>>;

pub fn random_dense<R: Rng>(rng: &mut R, rows: usize, cols: usize, fill: f64) -> Dense {
    (0..rows)
        .map(|_| (0..cols).map(|_| u8::from(rng.gen_bool(fill))).collect())
        .collect()
}

/// `v · Mᵀ` by the schoolbook rule.
pub fn dense_vec_mul_t(v: &[u8], m: &Dense) -> Vec<u8> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a & b).fold(0, |x, y| x ^ y))
        .collect()
}

/// `A · Bᵀ` by the schoolbook rule.
pub fn dense_mul_t(a: &Dense, b: &Dense) -> Dense {
    a.iter().map(|row| dense_vec_mul_t(row, b)).collect()
}

/// Every vector in the row span, by enumerating all row subsets.
pub fn exhaustive_span(m: &Dense, cols: usize) -> Vec<Vec<u8>> {
    assert!(m.len() <= 16, "span enumeration is exponential");
    (0u32..1 << m.len())
        .map(|mask| {
            let mut v = vec![0u8; cols];
            for (i, row) in m.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (x, y) in v.iter_mut().zip(row) {
                        *x ^= y;
                    }
                }
            }
            v
        })
        .collect()
}

pub fn support_to_dense(len: usize, support: &[usize]) -> Vec<u8> {
    let mut v = vec![0u8; len];
    for &i in support {
        v[i] = 1;
    }
    v
}

/// Exact posteriors `Pr(e_i = 1 | e·Hᵀ = s)` by summing over all `2^n`
/// error patterns.
pub fn exhaustive_posterior(h: &Dense, s: &[u8], priors: &[f64]) -> Vec<f64> {
    let n = priors.len();
    assert!(n <= 20);
    let mut num = vec![0.0; n];
    let mut total = 0.0;
    for pattern in 0u32..1 << n {
        let e: Vec<u8> = (0..n).map(|i| (pattern >> i & 1) as u8).collect();
        if dense_vec_mul_t(&e, h) != s {
            continue;
        }
        let w: f64 = e
            .iter()
            .zip(priors)
            .map(|(&b, &p)| if b == 1 { p } else { 1.0 - p })
            .product();
        total += w;
        for i in 0..n {
            if e[i] == 1 {
                num[i] += w;
            }
        }
    }
    num.iter().map(|x| x / total).collect()
}

/// Random parity-check matrix whose Tanner graph is a forest: each new check
/// joins variables from distinct components, tracked with a union-find.
pub fn random_forest_checks<R: Rng>(rng: &mut R, n: usize, checks: usize) -> Dense {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut rows = Vec::new();
    for _ in 0..checks {
        let want = rng.gen_range(1..=4usize.min(n));
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut chosen: Vec<usize> = Vec::new();
        let mut roots = Vec::new();
        for v in order {
            let r = find(&mut parent, v);
            if !roots.contains(&r) {
                roots.push(r);
                chosen.push(v);
                if chosen.len() == want {
                    break;
                }
            }
        }
        for w in roots.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
        rows.push(support_to_dense(n, &chosen));
    }
    rows
}
