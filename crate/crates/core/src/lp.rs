//! Exact two-phase simplex for `max cᵀz  s.t.  Az = b, z ≥ 0`.
//!
//! Every outcome carries a certificate that is re-verified by plain
//! arithmetic before it is returned:
//!
//! * `Optimal`: a feasible point and a dual `y` with `yᵀA ≥ cᵀ`, `yᵀb = cᵀz`.
//! * `Infeasible`: a Farkas vector `f` with `fᵀA ≤ 0`, `fᵀb > 0`.
//! * `Unbounded`: a feasible point and a ray `r ≥ 0` with `Ar = 0`, `cᵀr > 0`.
//!
//! Pivoting follows Bland's smallest-index rule, so degenerate problems
//! terminate without perturbation.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::rational::{self, dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("simplex certificate failed verification: {0}")]
    Certificate(&'static str),
}

/// `max cᵀz` subject to `Az = b`, `z ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityLp {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptimalSolution {
    pub point: Vec<Rational>,
    pub value: Rational,
    pub duals: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal(OptimalSolution),
    Infeasible { farkas: Vec<Rational> },
    Unbounded { point: Vec<Rational>, ray: Vec<Rational> },
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&OptimalSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }
}

impl EqualityLp {
    pub fn new(
        objective: Vec<Rational>,
        constraints: Vec<Vec<Rational>>,
        rhs: Vec<Rational>,
    ) -> Result<Self, LpError> {
        let lp = EqualityLp {
            objective,
            constraints,
            rhs,
        };
        lp.check_dimensions()?;
        Ok(lp)
    }

    pub fn variables(&self) -> usize {
        self.objective.len()
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    fn check_dimensions(&self) -> Result<(), LpError> {
        if self.constraints.len() != self.rhs.len() {
            return Err(LpError::Dimension(format!(
                "{} constraint rows but {} right-hand sides",
                self.constraints.len(),
                self.rhs.len()
            )));
        }
        if let Some((i, row)) = self
            .constraints
            .iter()
            .enumerate()
            .find(|(_, row)| row.len() != self.objective.len())
        {
            return Err(LpError::Dimension(format!(
                "row {i} has {} coefficients, expected {}",
                row.len(),
                self.objective.len()
            )));
        }
        Ok(())
    }

    fn row_activity(&self, z: &[Rational]) -> Vec<Rational> {
        self.constraints.iter().map(|row| dot(row, z)).collect()
    }

    /// `yᵀA` as a vector over columns.
    fn column_activity(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![rational::zero(); self.variables()];
        for (row, yi) in self.constraints.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o += yi * a;
                }
            }
        }
        out
    }

    pub fn is_feasible_point(&self, z: &[Rational]) -> bool {
        z.len() == self.variables()
            && z.iter().all(|v| !v.is_negative())
            && self.row_activity(z) == self.rhs
    }

    /// Checks an outcome against this LP using only multiplication and addition.
    pub fn verify(&self, outcome: &LpOutcome) -> Result<(), LpError> {
        match outcome {
            LpOutcome::Optimal(sol) => {
                if !self.is_feasible_point(&sol.point) {
                    return Err(LpError::Certificate("optimal point infeasible"));
                }
                if dot(&self.objective, &sol.point) != sol.value {
                    return Err(LpError::Certificate("objective value mismatch"));
                }
                if sol.duals.len() != self.rows() || dot(&sol.duals, &self.rhs) != sol.value {
                    return Err(LpError::Certificate("duality gap"));
                }
                let reduced = self.column_activity(&sol.duals);
                if reduced.iter().zip(&self.objective).any(|(ya, c)| ya < c) {
                    return Err(LpError::Certificate("dual infeasible"));
                }
            }
            LpOutcome::Infeasible { farkas } => {
                if farkas.len() != self.rows() {
                    return Err(LpError::Certificate("farkas length"));
                }
                if self.column_activity(farkas).iter().any(|v| v.is_positive()) {
                    return Err(LpError::Certificate("farkas fᵀA has a positive entry"));
                }
                if !dot(farkas, &self.rhs).is_positive() {
                    return Err(LpError::Certificate("farkas fᵀb not positive"));
                }
            }
            LpOutcome::Unbounded { point, ray } => {
                if !self.is_feasible_point(point) {
                    return Err(LpError::Certificate("unbounded base point infeasible"));
                }
                if ray.len() != self.variables() || ray.iter().any(|v| v.is_negative()) {
                    return Err(LpError::Certificate("ray not nonnegative"));
                }
                if self.row_activity(ray).iter().any(|v| !v.is_zero()) {
                    return Err(LpError::Certificate("ray leaves the feasible set"));
                }
                if !dot(&self.objective, ray).is_positive() {
                    return Err(LpError::Certificate("ray does not improve the objective"));
                }
            }
        }
        Ok(())
    }
}

/// Dense tableau over the structural columns followed by one artificial
/// column per row. The artificial block always holds `B⁻¹`.
struct Tableau {
    structural: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    reduced: Vec<Rational>,
    value: Rational,
}

impl Tableau {
    fn width(&self) -> usize {
        self.structural + self.rows.len()
    }

    fn price(&mut self, costs: &[Rational]) {
        let width = self.width();
        let mut reduced = costs.to_vec();
        let mut value = rational::zero();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..width {
                let a = &self.rows[r][j];
                if !a.is_zero() {
                    reduced[j] -= cb * a;
                }
            }
            value += cb * &self.rhs[r];
        }
        self.reduced = reduced;
        self.value = value;
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for v in self.rows[row].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        self.rhs[row] *= &inv;
        let nonzero: Vec<usize> = (0..self.width())
            .filter(|&j| !self.rows[row][j].is_zero())
            .collect();
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let f = self.rows[r][col].clone();
            for &j in &nonzero {
                let delta = &f * &pivot_row[j];
                self.rows[r][j] -= delta;
            }
            if !pivot_rhs.is_zero() {
                self.rhs[r] -= &f * &pivot_rhs;
            }
        }
        if !self.reduced[col].is_zero() {
            let f = self.reduced[col].clone();
            for &j in &nonzero {
                let delta = &f * &pivot_row[j];
                self.reduced[j] -= delta;
            }
            self.value += &f * &pivot_rhs;
        }
        self.basis[row] = col;
    }

    /// Runs Bland's rule over columns `< limit`; returns the entering column
    /// of an unbounded direction, if one is found.
    fn optimize(&mut self, limit: usize) -> Option<usize> {
        loop {
            let Some(col) = (0..limit).find(|&j| self.reduced[j].is_positive()) else {
                return None;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Some(col),
            }
        }
    }

    fn point(&self) -> Vec<Rational> {
        let mut z = vec![rational::zero(); self.structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                z[b] = self.rhs[r].clone();
            }
        }
        z
    }

    /// `c_Bᵀ B⁻¹`, read off the artificial block.
    fn duals(&self, costs: &[Rational]) -> Vec<Rational> {
        let m = self.rows.len();
        let mut y = vec![rational::zero(); m];
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &costs[b];
            if cb.is_zero() {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                let binv = &self.rows[r][self.structural + i];
                if !binv.is_zero() {
                    *yi += cb * binv;
                }
            }
        }
        y
    }
}

pub fn solve(lp: &EqualityLp) -> Result<LpOutcome, LpError> {
    lp.check_dimensions()?;
    let m = lp.rows();
    let k = lp.variables();

    // flip rows so that b ≥ 0; remember the signs for the certificates
    let signs: Vec<bool> = lp.rhs.iter().map(|b| b.is_negative()).collect();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, (row, b)) in lp.constraints.iter().zip(&lp.rhs).enumerate() {
        let mut line: Vec<Rational> = if signs[i] {
            row.iter().map(|a| -a).collect()
        } else {
            row.clone()
        };
        line.extend((0..m).map(|j| if i == j { rational::one() } else { rational::zero() }));
        rows.push(line);
        rhs.push(if signs[i] { -b } else { b.clone() });
    }
    let mut tab = Tableau {
        structural: k,
        rows,
        rhs,
        basis: (k..k + m).collect(),
        reduced: Vec::new(),
        value: rational::zero(),
    };
    let unsign = |y: Vec<Rational>| -> Vec<Rational> {
        y.into_iter()
            .zip(&signs)
            .map(|(v, &s)| if s { -v } else { v })
            .collect()
    };

    // phase 1: max −Σ artificials
    let mut phase1 = vec![rational::zero(); k + m];
    for c in phase1.iter_mut().skip(k) {
        *c = rational::int(-1);
    }
    tab.price(&phase1);
    if tab.optimize(k + m).is_some() {
        return Err(LpError::Certificate("phase one reported unbounded"));
    }
    if tab.value.is_negative() {
        let y = tab.duals(&phase1);
        let farkas = unsign(y.into_iter().map(|v| -v).collect());
        let outcome = LpOutcome::Infeasible { farkas };
        lp.verify(&outcome)?;
        return Ok(outcome);
    }

    // drive zero-level artificials out of the basis where a structural column allows it
    for r in 0..m {
        if tab.basis[r] < k {
            continue;
        }
        if let Some(j) = (0..k).find(|&j| !tab.rows[r][j].is_zero()) {
            tab.pivot(r, j);
        }
    }

    // phase 2
    let mut costs = lp.objective.clone();
    costs.extend((0..m).map(|_| rational::zero()));
    tab.price(&costs);
    let outcome = match tab.optimize(k) {
        None => {
            let point = tab.point();
            let value = tab.value.clone();
            let duals = unsign(tab.duals(&costs));
            LpOutcome::Optimal(OptimalSolution { point, value, duals })
        }
        Some(col) => {
            let point = tab.point();
            let mut ray = vec![rational::zero(); k];
            ray[col] = rational::one();
            for (r, &b) in tab.basis.iter().enumerate() {
                if b < k {
                    ray[b] = -tab.rows[r][col].clone();
                }
            }
            LpOutcome::Unbounded { point, ray }
        }
    };
    lp.verify(&outcome)?;
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn ints(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn trivial_optimum() {
        let lp = EqualityLp::new(ints(&[1]), vec![ints(&[1])], ints(&[1])).unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else {
            panic!("expected optimal");
        };
        assert_eq!(sol.point, ints(&[1]));
        assert_eq!(sol.value, int(1));
        assert_eq!(sol.duals, ints(&[1]));
    }

    #[test]
    fn trivial_infeasible() {
        let lp = EqualityLp::new(ints(&[1]), vec![ints(&[0])], ints(&[1])).unwrap();
        assert_eq!(
            solve(&lp).unwrap(),
            LpOutcome::Infeasible { farkas: ints(&[1]) }
        );
    }

    #[test]
    fn homogeneous_recombination_is_unbounded() {
        // columns (ω_{12}, ω_3, α): ω_{12} e({1,2}) + ω_3 e({3}) − α e(N) = 0, max ω_{12}
        let lp = EqualityLp::new(
            ints(&[1, 0, 0]),
            vec![ints(&[1, 0, -1]), ints(&[1, 0, -1]), ints(&[0, 1, -1])],
            ints(&[0, 0, 0]),
        )
        .unwrap();
        let LpOutcome::Unbounded { ray, .. } = solve(&lp).unwrap() else {
            panic!("expected unbounded");
        };
        assert_eq!(ray, ints(&[1, 1, 1]));
    }

    #[test]
    fn negative_rhs_and_fractional_optimum() {
        // max x + y s.t. -2x - y + s = -4 ... written as equality with slack
        // -2x - y = -3,  x + 3y + s = 6
        let lp = EqualityLp::new(
            ints(&[1, 1, 0]),
            vec![ints(&[-2, -1, 0]), ints(&[1, 3, 1])],
            ints(&[-3, 6]),
        )
        .unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else {
            panic!("expected optimal");
        };
        // vertex x = 3/5, y = 9/5
        assert_eq!(sol.point, vec![ratio(3, 5), ratio(9, 5), int(0)]);
        assert_eq!(sol.value, ratio(12, 5));
        lp.verify(&LpOutcome::Optimal(sol)).unwrap();
    }

    #[test]
    fn redundant_rows_keep_artificial_basic() {
        let lp = EqualityLp::new(
            ints(&[1, 1]),
            vec![ints(&[1, 1]), ints(&[2, 2]), ints(&[1, 0])],
            ints(&[2, 4, 1]),
        )
        .unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else {
            panic!("expected optimal");
        };
        assert_eq!(sol.point, ints(&[1, 1]));
        assert_eq!(sol.value, int(2));
    }

    #[test]
    fn dimension_errors() {
        assert!(EqualityLp::new(ints(&[1, 2]), vec![ints(&[1])], ints(&[1])).is_err());
        assert!(EqualityLp::new(ints(&[1]), vec![ints(&[1])], ints(&[1, 2])).is_err());
    }

    #[test]
    fn verify_catches_forged_certificates() {
        let lp = EqualityLp::new(ints(&[1]), vec![ints(&[1])], ints(&[1])).unwrap();
        let forged = LpOutcome::Optimal(OptimalSolution {
            point: ints(&[1]),
            value: int(1),
            duals: ints(&[0]),
        });
        assert!(lp.verify(&forged).is_err());
        assert!(lp
            .verify(&LpOutcome::Infeasible { farkas: ints(&[1]) })
            .is_err());
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's classic cycling example, as equalities with slacks (maximize form).
        let lp = EqualityLp::new(
            vec![ratio(3, 4), int(-150), ratio(1, 50), int(-6), int(0), int(0), int(0)],
            vec![
                vec![ratio(1, 4), int(-60), ratio(-1, 25), int(9), int(1), int(0), int(0)],
                vec![ratio(1, 2), int(-90), ratio(-1, 50), int(3), int(0), int(1), int(0)],
                vec![int(0), int(0), int(1), int(0), int(0), int(0), int(1)],
            ],
            ints(&[0, 0, 1]),
        )
        .unwrap();
        let LpOutcome::Optimal(sol) = solve(&lp).unwrap() else {
            panic!("expected optimal");
        };
        assert_eq!(sol.value, ratio(1, 20));
    }
}
