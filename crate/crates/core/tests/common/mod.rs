#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rotgrid::anova::{enumerate_total_degree, Polynomial, Subset};

/// Polynomial with every total-degree-`m` coefficient drawn from U(−1, 1).
pub fn random_polynomial(rng: &mut ChaCha8Rng, n_vars: usize, degree: u32) -> Polynomial {
    let mut p = Polynomial::zero(n_vars);
    for alpha in enumerate_total_degree(n_vars, degree) {
        p.add_term(alpha, rng.random_range(-1.0..1.0));
    }
    p
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Pick-freeze Monte-Carlo estimate of `σ²_u` with its standard error.
///
/// Each sample contributes `Σ_{v⊆u} (−1)^{|u∖v|} f(x) f(x_v, y_{−v})`, whose
/// expectation is the Möbius inversion of `D_v + f_∅²`.
pub fn mc_sigma_sq<F, S>(f: F, d: usize, u: Subset, n: usize, rng: &mut ChaCha8Rng, mut sample: S) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
    S: FnMut(&mut ChaCha8Rng) -> f64,
{
    let subsets = u.subsets();
    let mut x = vec![0.0; d];
    let mut y = vec![0.0; d];
    let mut z = vec![0.0; d];
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        x.iter_mut().for_each(|v| *v = sample(rng));
        y.iter_mut().for_each(|v| *v = sample(rng));
        let fx = f(&x);
        let mut acc = 0.0;
        for &v in &subsets {
            for j in 0..d {
                z[j] = if v.contains(j) { x[j] } else { y[j] };
            }
            let sign = if (u.len() - v.len()).is_multiple_of(2) { 1.0 } else { -1.0 };
            acc += sign * fx * f(&z);
        }
        s1 += acc;
        s2 += acc * acc;
    }
    let nf = n as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0);
    (mean, (var / (nf - 1.0)).sqrt())
}

/// Angle in degrees between the lines spanned by `a` and `b`.
pub fn line_angle_deg(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    (dot.abs() / (na * nb)).min(1.0).acos().to_degrees()
}
