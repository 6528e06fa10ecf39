//! Maximum-entropy distributions on a finite `(w, r)` support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::simplex::{maximize, LpOutcome};

const RESIDUAL_TOL: f64 = 1e-10;
const MAX_ITER: usize = 500;
/// When no step improves in floating point, an iterate is accepted within
/// `STALL_FACTOR * RESIDUAL_TOL`.
const STALL_FACTOR: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Moment {
    W,
    W2,
    WR,
}

impl Moment {
    pub fn eval(&self, w: f64, r: f64) -> f64 {
        match self {
            Moment::W => w,
            Moment::W2 => w * w,
            Moment::WR => w * r,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Moment::W => "E[w]",
            Moment::W2 => "E[w^2]",
            Moment::WR => "E[wr]",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntSpec {
    pub atoms: Vec<(f64, f64)>,
    pub moments: Vec<(Moment, f64)>,
}

impl MaxEntSpec {
    /// Support `{0, 0.5, 2, 100} x {0, 1}` with `E[w] = 1`,
    /// `E[w^2] = second_moment` and `E[wr] = value`.
    pub fn standard(second_moment: f64, value: f64) -> Self {
        let mut atoms = Vec::new();
        for w in [0.0, 0.5, 2.0, 100.0] {
            for r in [0.0, 1.0] {
                atoms.push((w, r));
            }
        }
        Self {
            atoms,
            moments: vec![(Moment::W, 1.0), (Moment::W2, second_moment), (Moment::WR, value)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxEntDistribution {
    pub atoms: Vec<(f64, f64)>,
    pub probs: Vec<f64>,
    /// Natural parameters, one per moment, in the units of the raw moments.
    pub theta: Vec<f64>,
    pub moments: Vec<(Moment, f64)>,
}

impl MaxEntDistribution {
    pub fn expectation(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.atoms
            .iter()
            .zip(&self.probs)
            .map(|(&(w, r), p)| p * f(w, r))
            .sum()
    }

    /// `V(pi) = E[wr]`.
    pub fn value(&self) -> f64 {
        self.expectation(|w, r| w * r)
    }

    pub fn max_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.0).fold(0.0, f64::max)
    }
}

/// Fits `p_k ∝ exp(theta . f(atom_k))` matching every moment target.
pub fn maxent_fit(spec: &MaxEntSpec) -> Result<MaxEntDistribution> {
    validate_spec(spec)?;
    check_feasible(spec)?;
    let k = spec.atoms.len();
    let j = spec.moments.len();

    // Standardized features keep the Newton system well scaled.
    let mut shift = vec![0.0; j];
    let mut scale = vec![1.0; j];
    for (m, (mom, _)) in spec.moments.iter().enumerate() {
        let vals: Vec<f64> = spec.atoms.iter().map(|&(w, r)| mom.eval(w, r)).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        shift[m] = lo;
        scale[m] = if hi > lo { hi - lo } else { 1.0 };
    }
    let feat: Vec<Vec<f64>> = spec
        .atoms
        .iter()
        .map(|&(w, r)| {
            spec.moments
                .iter()
                .enumerate()
                .map(|(m, (mom, _))| (mom.eval(w, r) - shift[m]) / scale[m])
                .collect()
        })
        .collect();
    let target: Vec<f64> = spec
        .moments
        .iter()
        .enumerate()
        .map(|(m, &(_, t))| (t - shift[m]) / scale[m])
        .collect();
    let tol: Vec<f64> = spec
        .moments
        .iter()
        .enumerate()
        .map(|(m, &(_, t))| RESIDUAL_TOL * t.abs().max(1.0) / scale[m])
        .collect();

    let dual = |theta: &[f64]| -> (f64, Vec<f64>) {
        let s: Vec<f64> = feat.iter().map(|f| dot(theta, f)).collect();
        let mx = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = s.iter().map(|x| (x - mx).exp()).sum();
        let p = s.iter().map(|x| (x - mx).exp() / z).collect();
        (mx + z.ln() - dot(theta, &target), p)
    };

    // Largest moment residual in units of its tolerance.
    let residual = |p: &[f64]| -> (Vec<f64>, Vec<f64>, f64) {
        let mean: Vec<f64> = (0..j).map(|m| (0..k).map(|i| p[i] * feat[i][m]).sum()).collect();
        let grad: Vec<f64> = (0..j).map(|m| mean[m] - target[m]).collect();
        let worst = grad.iter().zip(&tol).map(|(g, t)| g.abs() / t).fold(0.0, f64::max);
        (mean, grad, worst)
    };

    let mut theta = vec![0.0; j];
    let (mut g, mut p) = dual(&theta);
    for _ in 0..MAX_ITER {
        let (mean, grad, worst) = residual(&p);
        if worst <= 1.0 {
            return Ok(finish(spec, p, &theta, &scale));
        }
        let mut hess = vec![vec![0.0; j]; j];
        for a in 0..j {
            for b in 0..j {
                hess[a][b] = (0..k)
                    .map(|i| p[i] * (feat[i][a] - mean[a]) * (feat[i][b] - mean[b]))
                    .sum();
            }
        }
        let neg: Vec<f64> = grad.iter().map(|x| -x).collect();
        let dir = solve(hess, neg).ok_or_else(|| {
            Error::NoConvergence("singular moment covariance; are two moments redundant?".into())
        })?;
        let slope = dot(&grad, &dir);
        let mut step = 1.0;
        loop {
            let cand: Vec<f64> = theta.iter().zip(&dir).map(|(t, d)| t + step * d).collect();
            let (gc, pc) = dual(&cand);
            // Near the optimum the dual is flat to rounding, so a step that
            // shrinks the residual is accepted as well.
            let armijo = gc < g && gc <= g + 1e-4 * step * slope;
            if armijo || (gc <= g + 1e-12 * g.abs().max(1.0) && residual(&pc).2 < worst) {
                theta = cand;
                g = gc;
                p = pc;
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                if worst <= STALL_FACTOR {
                    return Ok(finish(spec, p, &theta, &scale));
                }
                return Err(Error::NoConvergence(format!(
                    "maximum-entropy Newton stalled at {worst:.3e} times the residual tolerance"
                )));
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "maximum-entropy Newton did not reach residual {RESIDUAL_TOL} in {MAX_ITER} iterations"
    )))
}

fn finish(spec: &MaxEntSpec, probs: Vec<f64>, theta: &[f64], scale: &[f64]) -> MaxEntDistribution {
    MaxEntDistribution {
        atoms: spec.atoms.clone(),
        probs,
        theta: theta.iter().zip(scale).map(|(t, s)| t / s).collect(),
        moments: spec.moments.clone(),
    }
}

fn validate_spec(spec: &MaxEntSpec) -> Result<()> {
    if spec.atoms.is_empty() {
        return Err(Error::InfeasibleMoments("no atoms".into()));
    }
    for (i, a) in spec.atoms.iter().enumerate() {
        if !(a.0.is_finite() && a.1.is_finite()) {
            return Err(Error::InfeasibleMoments(format!("atom {a:?} is not finite")));
        }
        if spec.atoms[..i].contains(a) {
            return Err(Error::InfeasibleMoments(format!("duplicate atom {a:?}")));
        }
    }
    Ok(())
}

fn lp_rows(spec: &MaxEntSpec, skip: Option<usize>) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut a = vec![vec![1.0; spec.atoms.len()]];
    let mut b = vec![1.0];
    for (m, &(mom, t)) in spec.moments.iter().enumerate() {
        if Some(m) != skip {
            a.push(spec.atoms.iter().map(|&(w, r)| mom.eval(w, r)).collect());
            b.push(t);
        }
    }
    (a, b)
}

/// Linear feasibility of the targets; on failure names a target lying
/// outside the range attainable under the other constraints.
fn check_feasible(spec: &MaxEntSpec) -> Result<()> {
    let k = spec.atoms.len();
    let (a, b) = lp_rows(spec, None);
    if !matches!(maximize(&vec![0.0; k], &a, &b), LpOutcome::Infeasible) {
        return Ok(());
    }
    let mut violated = Vec::new();
    for (m, &(mom, t)) in spec.moments.iter().enumerate() {
        let (a, b) = lp_rows(spec, Some(m));
        let f: Vec<f64> = spec.atoms.iter().map(|&(w, r)| mom.eval(w, r)).collect();
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        if let (LpOutcome::Optimal { value: hi, .. }, LpOutcome::Optimal { value: neg_lo, .. }) =
            (maximize(&f, &a, &b), maximize(&neg, &a, &b))
        {
            let lo = -neg_lo;
            if t > hi {
                violated.push(format!(
                    "{} = {t} exceeds the maximum {hi} attainable under the other constraints",
                    mom.label()
                ));
            } else if t < lo {
                violated.push(format!(
                    "{} = {t} is below the minimum {lo} attainable under the other constraints",
                    mom.label()
                ));
            }
        }
    }
    if !violated.is_empty() {
        return Err(Error::InfeasibleMoments(violated.join("; ")));
    }
    Err(Error::InfeasibleMoments(
        "targets lie outside the convex hull of the atoms' moments".into(),
    ))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let norm = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-14 * norm.max(f64::MIN_POSITIVE) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
