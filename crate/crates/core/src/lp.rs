//! Exact two-phase simplex method over the rationals.
//!
//! Solves `max c.z` subject to `A z = b`, `z >= 0`. Bland's rule keeps it
//! from cycling; problem sizes here are a handful of rows and columns.

use num_traits::{One, Signed, Zero};

use crate::exactgeom::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal {
        value: Rational,
        solution: Vec<Rational>,
    },
}

struct Tableau {
    /// `rows x (cols + 1)`, last column is the right-hand side
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.t[r][c].recip();
        for v in self.t[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..self.t.len() {
            if i != r && !self.t[i][c].is_zero() {
                let f = self.t[i][c].clone();
                for k in 0..=self.cols {
                    if !self.t[r][k].is_zero() {
                        let d = &f * &self.t[r][k];
                        self.t[i][k] -= d;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of `c` for the current basis.
    fn reduced(&self, c: &[Rational], allowed: usize) -> Vec<Rational> {
        (0..allowed)
            .map(|j| {
                let mut r = c[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() {
                        r -= &c[b] * &self.t[i][j];
                    }
                }
                r
            })
            .collect()
    }

    /// Maximizes `c.z` over columns `< allowed`. Returns `false` if unbounded.
    fn optimize(&mut self, c: &[Rational], allowed: usize) -> bool {
        loop {
            let red = self.reduced(c, allowed);
            let Some(enter) =
                (0..allowed).find(|&j| red[j].is_positive() && !self.basis.contains(&j))
            else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                let a = &self.t[i][enter];
                if a.is_positive() {
                    let ratio = &self.t[i][self.cols] / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }

    fn value(&self, c: &[Rational]) -> Rational {
        self.basis
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, &b)| {
                acc + &c[b] * &self.t[i][self.cols]
            })
    }
}

pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let cols = n + m;
    let mut t = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r: Vec<Rational> = row
            .iter()
            .map(|x| if flip { -x.clone() } else { x.clone() })
            .collect();
        r.extend((0..m).map(|k| {
            if k == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        }));
        r.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(r);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        cols,
    };

    // phase one: maximize minus the sum of artificials
    let mut phase1 = vec![Rational::zero(); cols];
    for v in phase1.iter_mut().skip(n) {
        *v = -Rational::one();
    }
    tab.optimize(&phase1, cols);
    if tab.value(&phase1).is_negative() {
        return LpOutcome::Infeasible;
    }

    // drive remaining artificials out, dropping redundant rows
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.t.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut phase2 = c.to_vec();
    phase2.extend((0..m).map(|_| Rational::zero()));
    if !tab.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let mut solution = vec![Rational::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            solution[bv] = tab.t[i][cols].clone();
        }
    }
    LpOutcome::Optimal {
        value: tab.value(&phase2),
        solution,
    }
}
