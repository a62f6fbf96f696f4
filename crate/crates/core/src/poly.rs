//! Dense complex polynomials stored as ascending coefficient vectors.

use nalgebra::DMatrix;

use crate::C64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Drops trailing coefficients that are exactly zero or negligible relative to the largest one.
pub fn trim(mut p: Vec<C64>, rel: f64) -> Vec<C64> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    while p.len() > 1 {
        let last = p[p.len() - 1].norm();
        if last == 0.0 || last <= rel * scale {
            p.pop();
        } else {
            break;
        }
    }
    if p.is_empty() {
        p.push(ZERO);
    }
    p
}

pub fn degree(p: &[C64]) -> usize {
    p.len().saturating_sub(1)
}

pub fn is_zero(p: &[C64]) -> bool {
    p.iter().all(|c| *c == ZERO)
}

pub fn eval(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}

/// Σ |p_k| |z|^k, the natural scale against which |p(z)| is judged small.
pub fn eval_abs(p: &[C64], z: C64) -> f64 {
    let r = z.norm();
    p.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

pub fn mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut out = vec![ZERO; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub fn add(p: &[C64], q: &[C64]) -> Vec<C64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|k| p.get(k).copied().unwrap_or(ZERO) + q.get(k).copied().unwrap_or(ZERO))
        .collect()
}

pub fn scale(p: &[C64], s: C64) -> Vec<C64> {
    p.iter().map(|c| c * s).collect()
}

pub fn derivative(p: &[C64]) -> Vec<C64> {
    if p.len() <= 1 {
        return vec![ZERO];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

/// Monic-times-`lead` polynomial with the given roots.
pub fn from_roots(roots: &[C64], lead: C64) -> Vec<C64> {
    let mut p = vec![lead];
    for r in roots {
        p = mul(&p, &[-r, ONE]);
    }
    p
}

/// Quotient of `p` by `(z - r)`, discarding the remainder.
pub fn deflate(p: &[C64], r: C64) -> Vec<C64> {
    let n = p.len();
    if n <= 1 {
        return vec![ZERO];
    }
    let mut q = vec![ZERO; n - 1];
    let mut acc = p[n - 1];
    q[n - 2] = acc;
    for k in (1..n - 1).rev() {
        acc = p[k] + acc * r;
        q[k - 1] = acc;
    }
    q
}

/// Roots of `p` as eigenvalues of the companion matrix, each polished by a few Newton steps.
pub fn roots(p: &[C64]) -> Vec<C64> {
    let p = trim(p.to_vec(), 0.0);
    let d = degree(&p);
    if d == 0 {
        return Vec::new();
    }
    // exact roots at the origin
    let zeros_at_origin = p.iter().take_while(|c| **c == ZERO).count();
    let q: Vec<C64> = p[zeros_at_origin..].to_vec();
    let m = degree(&q);
    let mut out = vec![ZERO; zeros_at_origin];
    if m == 0 {
        return out;
    }
    let lead = q[m];
    let mut comp = DMatrix::<C64>::zeros(m, m);
    for i in 1..m {
        comp[(i, i - 1)] = ONE;
    }
    for i in 0..m {
        comp[(i, m - 1)] = -q[i] / lead;
    }
    let eig = crate::linalg::eigenvalues(&comp);
    let dq = derivative(&q);
    for mut r in eig {
        for _ in 0..3 {
            let f = eval(&q, r);
            let df = eval(&dq, r);
            if df.norm() == 0.0 {
                break;
            }
            let cand = r - f / df;
            if eval(&q, cand).norm() < f.norm() {
                r = cand;
            } else {
                break;
            }
        }
        out.push(r);
    }
    out
}

/// First `n` Taylor coefficients at the origin of `num / den`; requires `den[0] != 0`.
pub fn series_div(num: &[C64], den: &[C64], n: usize) -> Vec<C64> {
    let d0 = den[0];
    let mut out = vec![ZERO; n];
    for k in 0..n {
        let mut acc = num.get(k).copied().unwrap_or(ZERO);
        for j in 1..den.len().min(k + 1) {
            acc -= den[j] * out[k - j];
        }
        out[k] = acc / d0;
    }
    out
}

/// Composes `p` with the Möbius map `w = (z - i)/(z + i)` after clearing denominators:
/// returns Σ p_k (z - i)^k (z + i)^(d - k) for the requested homogenising degree `d`.
pub fn compose_cayley(p: &[C64], d: usize) -> Vec<C64> {
    let i = C64::new(0.0, 1.0);
    let minus = [-i, ONE];
    let plus = [i, ONE];
    let mut out = vec![ZERO];
    for (k, c) in p.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let mut term = vec![*c];
        for _ in 0..k {
            term = mul(&term, &minus);
        }
        for _ in k..d {
            term = mul(&term, &plus);
        }
        out = add(&out, &term);
    }
    out
}
