//! Feasibility of `A_eq x = b_eq, A_le x ≤ b_le, x ≥ 0` over exact
//! rationals: phase one of the simplex method with Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

/// A linear constraint `coeffs · x (= or ≤) rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Q>,
    pub rhs: Q,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub vars: usize,
    pub eq: Vec<Row>,
    pub le: Vec<Row>,
}

impl Problem {
    pub fn new(vars: usize) -> Self {
        Problem { vars, ..Default::default() }
    }

    /// Whether `x` satisfies every constraint exactly.
    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        let dot = |r: &Row| -> Q { r.coeffs.iter().zip(x).map(|(a, b)| a * b).sum() };
        x.len() == self.vars
            && x.iter().all(|v| !v.is_negative())
            && self.eq.iter().all(|r| dot(r) == r.rhs)
            && self.le.iter().all(|r| dot(r) <= r.rhs)
    }
}

/// A vertex of the feasible region, or `None` when it is empty.
pub fn find_feasible(p: &Problem) -> Option<Vec<Q>> {
    let m = p.eq.len() + p.le.len();
    let slacks = p.le.len();
    // columns: original vars, slacks, artificials, rhs
    let n = p.vars + slacks + m;
    let mut t: Vec<Vec<Q>> = Vec::with_capacity(m);
    for (i, row) in p.eq.iter().chain(&p.le).enumerate() {
        let mut r = vec![Q::zero(); n + 1];
        for (j, a) in row.coeffs.iter().enumerate() {
            r[j] = a.clone();
        }
        if i >= p.eq.len() {
            r[p.vars + (i - p.eq.len())] = Q::one();
        }
        r[n] = row.rhs.clone();
        if r[n].is_negative() {
            for x in r.iter_mut() {
                *x = -x.clone();
            }
        }
        r[p.vars + slacks + i] = Q::one();
        t.push(r);
    }
    let mut basis: Vec<usize> = (0..m).map(|i| p.vars + slacks + i).collect();
    // reduced costs of minimizing the sum of artificials; last entry is -objective
    let mut d = vec![Q::zero(); n + 1];
    for r in &t {
        for j in 0..p.vars + slacks {
            d[j] -= &r[j];
        }
        d[n] -= &r[n];
    }
    while let Some(enter) = (0..n).find(|&j| d[j].is_negative()) {
        let mut leave: Option<(usize, Q)> = None;
        for (i, r) in t.iter().enumerate() {
            if r[enter].is_positive() {
                let ratio = &r[n] / &r[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // phase one is bounded below by zero, so a leaving row exists
        let (row, _) = leave.expect("phase one objective is bounded");
        pivot(&mut t, &mut d, row, enter);
        basis[row] = enter;
    }
    if !d[n].is_zero() {
        return None;
    }
    let mut x = vec![Q::zero(); p.vars];
    for (i, &b) in basis.iter().enumerate() {
        if b < p.vars {
            x[b] = t[i][n].clone();
        }
    }
    debug_assert!(p.satisfied_by(&x));
    Some(x)
}

fn pivot(t: &mut [Vec<Q>], d: &mut [Q], row: usize, col: usize) {
    let p = t[row][col].clone();
    for x in t[row].iter_mut() {
        *x /= &p;
    }
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i != row && !r[col].is_zero() {
            let f = r[col].clone();
            for (x, y) in r.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    if !d[col].is_zero() {
        let f = d[col].clone();
        for (x, y) in d.iter_mut().zip(&pivot_row) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
}
