//! Column-generation simplex for `min Σ y_k  s.t.  Σ y_k a_k = c, y ≥ 0`.
//!
//! This is the dual of `max c·x s.t. a_k·x ≤ 1`, which is the form the
//! cutting-plane dual norm needs: the simplex multipliers are the primal
//! point `x̂`, and adding a cut is adding a column, so the current basis
//! stays feasible and the solve warm-starts.
//!
//! Pivoting is exact. Past [`FLOAT_THRESHOLD`] columns a binary64 solve
//! proposes a basis first; it is adopted only if its exact inverse is
//! primal feasible.

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

pub const FLOAT_THRESHOLD: usize = 1500;

/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_STREAK: usize = 50;

#[derive(Clone, Debug)]
pub struct ColumnLp {
    rhs: Vec<Q>,
    columns: Vec<Vec<Q>>,
    basis: Vec<usize>,
    binv: Vec<Vec<Q>>,
    ybasic: Vec<Q>,
    pivots: usize,
}

impl ColumnLp {
    /// `basis[i]` names the column basic in row `i`; it must be invertible
    /// and give a nonnegative basic solution.
    pub fn new(rhs: Vec<Q>, columns: Vec<Vec<Q>>, basis: Vec<usize>) -> Result<Self> {
        let d = rhs.len();
        if basis.len() != d || columns.iter().any(|c| c.len() != d) {
            return Err(Error::Precondition("column dimensions do not match the right-hand side".into()));
        }
        let b: Vec<Vec<Q>> = (0..d).map(|i| basis.iter().map(|&k| columns[k][i].clone()).collect()).collect();
        let binv = invert(&b).ok_or_else(|| Error::Precondition("initial basis is singular".into()))?;
        let ybasic = mat_vec(&binv, &rhs);
        if ybasic.iter().any(|v| v.is_negative()) {
            return Err(Error::Precondition("initial basis is infeasible".into()));
        }
        Ok(ColumnLp { rhs, columns, basis, binv, ybasic, pivots: 0 })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn pivots(&self) -> usize {
        self.pivots
    }

    pub fn column(&self, k: usize) -> &[Q] {
        &self.columns[k]
    }

    pub fn add_column(&mut self, column: Vec<Q>) -> usize {
        assert_eq!(column.len(), self.dim());
        self.columns.push(column);
        self.columns.len() - 1
    }

    /// Current objective `Σ y`. Every basis visited is feasible, so this is
    /// always an upper bound for `max c·x` over the current cuts.
    pub fn value(&self) -> Q {
        self.ybasic.iter().sum()
    }

    /// Nonzero `(column, y)` pairs of the basic solution.
    pub fn primal(&self) -> Vec<(usize, Q)> {
        let mut out: Vec<(usize, Q)> = self
            .basis
            .iter()
            .zip(&self.ybasic)
            .filter(|(_, v)| !v.is_zero())
            .map(|(&k, v)| (k, v.clone()))
            .collect();
        out.sort_by_key(|(k, _)| *k);
        out
    }

    /// Simplex multipliers `x̂ = B^{-T} 1`.
    pub fn dual(&self) -> Vec<Q> {
        let d = self.dim();
        (0..d).map(|j| (0..d).map(|i| &self.binv[i][j]).sum()).collect()
    }

    pub fn reduced_cost(&self, x: &[Q], k: usize) -> Q {
        Q::one() - dot(x, &self.columns[k])
    }

    /// Pivots to optimality over the current columns.
    pub fn optimize(&mut self, max_pivots: usize) -> Result<()> {
        if self.columns.len() > FLOAT_THRESHOLD {
            self.try_float_basis();
        }
        let mut streak = 0usize;
        let mut count = 0usize;
        loop {
            let x = self.dual();
            let bland = streak >= DEGENERATE_STREAK;
            let mut entering: Option<(usize, Q)> = None;
            for k in 0..self.columns.len() {
                let rc = self.reduced_cost(&x, k);
                if !rc.is_negative() {
                    continue;
                }
                if bland {
                    entering = Some((k, rc));
                    break;
                }
                if entering.as_ref().is_none_or(|(_, best)| rc < *best) {
                    entering = Some((k, rc));
                }
            }
            let Some((k, _)) = entering else { return Ok(()) };
            if count >= max_pivots {
                return Err(Error::NoConvergence { iterations: count, gap: "pivot limit reached".into() });
            }
            let degenerate = self.pivot(k)?;
            streak = if degenerate { streak + 1 } else { 0 };
            count += 1;
        }
    }

    /// Brings column `k` into the basis; returns whether the step was degenerate.
    fn pivot(&mut self, k: usize) -> Result<bool> {
        let dir = mat_vec(&self.binv, &self.columns[k]);
        let mut leave: Option<(usize, Q)> = None;
        for (i, di) in dir.iter().enumerate() {
            if !di.is_positive() {
                continue;
            }
            let ratio = &self.ybasic[i] / di;
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((r, step)) = leave else { return Err(Error::Unbounded) };
        let pr = dir[r].clone();
        for v in self.binv[r].iter_mut() {
            *v = &*v / &pr;
        }
        self.ybasic[r] = &self.ybasic[r] / &pr;
        let row_r = self.binv[r].clone();
        let y_r = self.ybasic[r].clone();
        for (i, di) in dir.iter().enumerate() {
            if i == r || di.is_zero() {
                continue;
            }
            for (v, w) in self.binv[i].iter_mut().zip(&row_r) {
                *v -= di * w;
            }
            self.ybasic[i] = &self.ybasic[i] - di * &y_r;
        }
        self.basis[r] = k;
        self.pivots += 1;
        Ok(step.is_zero())
    }

    /// Replaces the basis with the one found by a binary64 solve when its
    /// exact inverse exists and is primal feasible.
    fn try_float_basis(&mut self) {
        let Some(candidate) = float_basis(&self.rhs, &self.columns, &self.basis) else { return };
        let d = self.dim();
        let b: Vec<Vec<Q>> = (0..d).map(|i| candidate.iter().map(|&k| self.columns[k][i].clone()).collect()).collect();
        let Some(binv) = invert(&b) else { return };
        let ybasic = mat_vec(&binv, &self.rhs);
        if ybasic.iter().any(|v| v.is_negative()) || ybasic.iter().sum::<Q>() > self.value() {
            return;
        }
        self.basis = candidate;
        self.binv = binv;
        self.ybasic = ybasic;
    }
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).filter(|(_, y)| !y.is_zero()).map(|(x, y)| x * y).sum()
}

fn mat_vec(m: &[Vec<Q>], v: &[Q]) -> Vec<Q> {
    m.iter().map(|row| dot(row, v)).collect()
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let d = m.len();
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let mut inv: Vec<Vec<Q>> = (0..d).map(|i| (0..d).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for col in 0..d {
        let p = (col..d).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let pv = a[col][col].clone();
        for j in 0..d {
            a[col][j] = &a[col][j] / &pv;
            inv[col][j] = &inv[col][j] / &pv;
        }
        for r in 0..d {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..d {
                let (t1, t2) = (&f * &a[col][j], &f * &inv[col][j]);
                a[r][j] -= t1;
                inv[r][j] -= t2;
            }
        }
    }
    Some(inv)
}

/// Binary64 revised simplex from `start`; returns the final basis.
fn float_basis(rhs: &[Q], columns: &[Vec<Q>], start: &[usize]) -> Option<Vec<usize>> {
    const EPS: f64 = 1e-11;
    let d = rhs.len();
    let f = |v: &Q| v.to_f64().unwrap_or(0.0);
    let cols: Vec<Vec<f64>> = columns.iter().map(|c| c.iter().map(f).collect()).collect();
    let c: Vec<f64> = rhs.iter().map(f).collect();
    let mut basis = start.to_vec();
    let build = |basis: &[usize]| -> Option<Vec<Vec<f64>>> {
        let b: Vec<Vec<f64>> = (0..d).map(|i| basis.iter().map(|&k| cols[k][i]).collect()).collect();
        invert_f64(&b)
    };
    let mut binv = build(&basis)?;
    for iter in 0..(50 * (d + columns.len())) {
        if iter % 64 == 63 {
            binv = build(&basis)?;
        }
        let x: Vec<f64> = (0..d).map(|j| (0..d).map(|i| binv[i][j]).sum()).collect();
        let mut best: Option<(usize, f64)> = None;
        for (k, col) in cols.iter().enumerate() {
            let rc = 1.0 - col.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>();
            if rc < -EPS && best.is_none_or(|(_, b)| rc < b) {
                best = Some((k, rc));
            }
        }
        let Some((k, _)) = best else { return Some(basis) };
        let y: Vec<f64> = binv.iter().map(|row| row.iter().zip(&c).map(|(a, b)| a * b).sum()).collect();
        let dir: Vec<f64> = binv.iter().map(|row| row.iter().zip(&cols[k]).map(|(a, b)| a * b).sum()).collect();
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..d {
            if dir[i] > EPS {
                let ratio = y[i].max(0.0) / dir[i];
                if leave.is_none_or(|(_, b)| ratio < b) {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave?;
        let pr = dir[r];
        for v in binv[r].iter_mut() {
            *v /= pr;
        }
        let row_r = binv[r].clone();
        for i in 0..d {
            if i != r && dir[i] != 0.0 {
                for (v, w) in binv[i].iter_mut().zip(&row_r) {
                    *v -= dir[i] * w;
                }
            }
        }
        basis[r] = k;
    }
    None
}

fn invert_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let d = m.len();
    let mut a = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for col in 0..d {
        let p = (col..d).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))?;
        if a[p][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, p);
        inv.swap(col, p);
        let pv = a[col][col];
        for j in 0..d {
            a[col][j] /= pv;
            inv[col][j] /= pv;
        }
        for r in 0..d {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for j in 0..d {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}
