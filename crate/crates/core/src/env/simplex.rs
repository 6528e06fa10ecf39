//! Dense two-phase simplex for tiny equality-form linear programs.

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// Maximizes `c . x` subject to `a x = b`, `x >= 0`, using Bland's rule.
pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let cols = n + m;
    let rhs = cols;
    let mut t = vec![vec![0.0; cols + 1]; m + 1];
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = sign * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][rhs] = sign * b[i];
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        m,
        cols,
    };

    let mut phase1 = vec![0.0; cols];
    for cost in phase1.iter_mut().skip(n) {
        *cost = -1.0;
    }
    tab.set_objective(&phase1);
    if tab.optimize(|_| true).is_err() {
        return LpOutcome::Infeasible;
    }
    let scale = 1.0 + b.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if tab.t[m][rhs] < -TOL * scale {
        return LpOutcome::Infeasible;
    }
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| tab.t[i][j].abs() > TOL) {
                tab.pivot(i, j);
            }
        }
    }

    let mut phase2 = vec![0.0; cols];
    phase2[..n].copy_from_slice(c);
    tab.set_objective(&phase2);
    if tab.optimize(|j| j < n).is_err() {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![0.0; n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.t[i][rhs];
        }
    }
    let value = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    LpOutcome::Optimal { x, value }
}

struct Tableau {
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    m: usize,
    cols: usize,
}

struct Unbounded;

impl Tableau {
    /// Objective row holds reduced costs `c_B B^-1 A_j - c_j`.
    fn set_objective(&mut self, cost: &[f64]) {
        let m = self.m;
        for j in 0..=self.cols {
            self.t[m][j] = if j < self.cols { -cost[j] } else { 0.0 };
        }
        for i in 0..m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=self.cols {
                    self.t[m][j] += cb * self.t[i][j];
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for x in self.t[r].iter_mut() {
            *x /= p;
        }
        let row = self.t[r].clone();
        for (i, ti) in self.t.iter_mut().enumerate() {
            if i != r {
                let f = ti[c];
                if f != 0.0 {
                    for (x, y) in ti.iter_mut().zip(&row) {
                        *x -= f * y;
                    }
                }
            }
        }
        self.basis[r] = c;
    }

    fn optimize(&mut self, allowed: impl Fn(usize) -> bool) -> Result<(), Unbounded> {
        let m = self.m;
        let rhs = self.cols;
        loop {
            let Some(enter) = (0..self.cols).find(|&j| allowed(j) && self.t[m][j] < -TOL) else {
                return Ok(());
            };
            let mut leave: Option<usize> = None;
            for i in 0..m {
                if self.t[i][enter] > TOL {
                    let ratio = self.t[i][rhs] / self.t[i][enter];
                    leave = match leave {
                        None => Some(i),
                        Some(l) => {
                            let best = self.t[l][rhs] / self.t[l][enter];
                            if ratio < best - TOL || (ratio <= best + TOL && self.basis[i] < self.basis[l]) {
                                Some(i)
                            } else {
                                Some(l)
                            }
                        }
                    };
                }
            }
            match leave {
                Some(r) => self.pivot(r, enter),
                None => return Err(Unbounded),
            }
        }
    }
}
