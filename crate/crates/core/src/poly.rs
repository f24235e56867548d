//! Sparse multivariate polynomials with exact derivatives.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    pub dim: usize,
    pub terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn monomial(dim: usize, exps: &[u32], c: f64) -> Self {
        let mut p = Poly::zero(dim);
        p.add_term(exps.to_vec(), c);
        p
    }

    /// x_i.
    pub fn var(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Poly::monomial(dim, &e, 1.0)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        let v = self.terms.entry(exps).or_insert(0.0);
        *v += c;
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Poly { dim: self.dim, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn add(&self, o: &Poly) -> Self {
        let mut p = self.clone();
        for (e, v) in &o.terms {
            p.add_term(e.clone(), *v);
        }
        p
    }

    pub fn mul(&self, o: &Poly) -> Self {
        let mut p = Poly::zero(self.dim);
        for (e1, v1) in &self.terms {
            for (e2, v2) in &o.terms {
                p.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), v1 * v2);
            }
        }
        p
    }

    /// Embeds into a larger space, placing variable i at position offset + i.
    pub fn embed(&self, dim: usize, offset: usize) -> Self {
        let mut p = Poly::zero(dim);
        for (e, v) in &self.terms {
            let mut ne = vec![0; dim];
            ne[offset..offset + self.dim].copy_from_slice(e);
            p.add_term(ne, *v);
        }
        p
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, c)| c * e.iter().zip(x).map(|(k, xi)| xi.powi(*k as i32)).product::<f64>()).sum()
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                p.add_term(ne, c * e[i] as f64);
            }
        }
        p
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.dim).map(|i| self.derivative(i)).collect()
    }

    pub fn hessian(&self) -> Vec<Vec<Poly>> {
        let g = self.gradient();
        g.iter().map(|gi| (0..self.dim).map(|j| gi.derivative(j)).collect()).collect()
    }
}

/// Probabilists' Hermite polynomial He_k in one variable.
pub fn hermite(k: usize) -> Poly {
    let x = Poly::var(1, 0);
    let (mut a, mut b) = (Poly::constant(1, 1.0), x.clone());
    if k == 0 {
        return a;
    }
    for j in 1..k {
        let next = x.mul(&b).add(&a.scale(-(j as f64)));
        a = b;
        b = next;
    }
    b
}

/// All exponent vectors in `dim` variables with total degree in [lo, hi].
pub fn multi_indices(dim: usize, lo: u32, hi: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(dim, left - k, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    rec(dim, hi, &mut Vec::new(), &mut all);
    all.retain(|e| {
        let d: u32 = e.iter().sum();
        d >= lo && d <= hi
    });
    all.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse(e.clone())));
    all
}
