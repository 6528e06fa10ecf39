//! Running sums that make the log-wealth lower bound a quadratic in `v`.
//!
//! For outcome vectors `b_i(v) = (u1_i, u2_i - v)` and bets `lambda_i`,
//!
//! * `sum_i A_i(v) = A0 + v A1 + v^2 A2` and `sum_i b_i(v) = b0 + v b1` feed
//!   the next bet,
//! * `sum_i [lambda_i' b_i(v) + PSI (lambda_i' b_i(v))^2]
//!    = (C + Q) + (T - S) v + U v^2` lower-bounds the log wealth of the bets
//!   actually placed.

use crate::bounds::PSI;
use crate::kahan::CompensatedSum;
use crate::process::OutcomeVector;
use crate::qp::QuadObjective;
use crate::types::Bet;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SufficientStats {
    n: u64,
    sum_u1: CompensatedSum,
    sum_u2: CompensatedSum,
    sum_u1u1: CompensatedSum,
    sum_u1u2: CompensatedSum,
    sum_u2u2: CompensatedSum,
    c: CompensatedSum,
    s: CompensatedSum,
    q: CompensatedSum,
    t: CompensatedSum,
    u: CompensatedSum,
}

impl SufficientStats {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds in one outcome and the bet that was in force when it arrived.
    pub fn update(&mut self, out: OutcomeVector, bet: Bet) {
        let (u1, u2) = (out.u1, out.u2);
        let (l1, l2) = (bet.lambda1, bet.lambda2);
        self.n += 1;
        self.sum_u1.add(u1);
        self.sum_u2.add(u2);
        self.sum_u1u1.add(u1 * u1);
        self.sum_u1u2.add(u1 * u2);
        self.sum_u2u2.add(u2 * u2);

        self.c.add(l1 * u1 + l2 * u2);
        self.s.add(l2);
        let lin = l1 * u1 + l2 * u2;
        self.q.add(PSI * lin * lin);
        self.t.add(PSI * (-2.0 * l2 * lin));
        self.u.add(PSI * l2 * l2);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn a0(&self) -> [[f64; 2]; 2] {
        let off = self.sum_u1u2.value();
        [[self.sum_u1u1.value(), off], [off, self.sum_u2u2.value()]]
    }

    pub fn a1(&self) -> [[f64; 2]; 2] {
        let off = -self.sum_u1.value();
        [[0.0, off], [off, -2.0 * self.sum_u2.value()]]
    }

    pub fn a2(&self) -> [[f64; 2]; 2] {
        [[0.0, 0.0], [0.0, self.n as f64]]
    }

    pub fn b0(&self) -> [f64; 2] {
        [self.sum_u1.value(), self.sum_u2.value()]
    }

    pub fn b1(&self) -> [f64; 2] {
        [0.0, -(self.n as f64)]
    }

    /// `sum_i A_i(v)` and `sum_i b_i(v)` as a bet objective.
    pub fn objective_at(&self, v: f64) -> QuadObjective {
        let (a0, a1, a2) = (self.a0(), self.a1(), self.a2());
        let mut a = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] = a0[i][j] + v * a1[i][j] + v * v * a2[i][j];
            }
        }
        // Guard the (u2 - v)^2 diagonal against cancellation.
        a[1][1] = a[1][1].max(0.0);
        let (b0, b1) = (self.b0(), self.b1());
        QuadObjective::from_parts_unchecked(a, [b0[0] + v * b1[0], b0[1] + v * b1[1]])
    }

    /// Scalars `(C, S, Q, T, U)`.
    pub fn wealth_scalars(&self) -> [f64; 5] {
        [
            self.c.value(),
            self.s.value(),
            self.q.value(),
            self.t.value(),
            self.u.value(),
        ]
    }

    /// Coefficients `(q0, q1, q2)` of the log-wealth lower bound in `v`.
    pub fn bound_coefficients(&self) -> [f64; 3] {
        let [c, s, q, t, u] = self.wealth_scalars();
        [c + q, t - s, u]
    }

    /// The log-wealth lower bound at `v`.
    pub fn log_wealth_lower_bound(&self, v: f64) -> f64 {
        let [q0, q1, q2] = self.bound_coefficients();
        q0 + q1 * v + q2 * v * v
    }
}
