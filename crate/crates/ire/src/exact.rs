//! Exact rational arithmetic and the linear-algebra decision procedures used
//! throughout the crate: strict positivity of homogeneous equality systems and
//! row-space membership.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision rational number, always in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

/// Integer as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n/d` as a rational.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q` or an integer literal, with an optional leading sign on `p`.
pub fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let bad = || ExactError::BadRational(s.to_string());
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer: BigInt = num_str.parse().map_err(|_| bad())?;
    let denom: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if denom.is_zero() || denom.is_negative() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("malformed rational `{0}`")]
    BadRational(String),
}

/// A homogeneous system of linear equalities `sum coeff * var = 0` over an
/// ordered variable set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    variables: Vec<String>,
    rows: Vec<Vec<Rational>>,
}

impl LinearSystem {
    pub fn new<I, S>(variables: I) -> Result<LinearSystem, ExactError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let variables: Vec<String> = variables.into_iter().map(Into::into).collect();
        for (i, v) in variables.iter().enumerate() {
            if variables[..i].contains(v) {
                return Err(ExactError::DuplicateVariable(v.clone()));
            }
        }
        Ok(LinearSystem {
            variables,
            rows: Vec::new(),
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn index_of(&self, var: &str) -> Result<usize, ExactError> {
        self.variables
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| ExactError::UnknownVariable(var.to_string()))
    }

    fn dense(&self, coeffs: &BTreeMap<String, Rational>) -> Result<Vec<Rational>, ExactError> {
        let mut row = vec![Rational::zero(); self.variables.len()];
        for (var, c) in coeffs {
            row[self.index_of(var)?] = c.clone();
        }
        Ok(row)
    }

    fn sparse(&self, row: &[Rational]) -> BTreeMap<String, Rational> {
        self.variables
            .iter()
            .zip(row)
            .filter(|(_, c)| !c.is_zero())
            .map(|(v, c)| (v.clone(), c.clone()))
            .collect()
    }

    /// Appends the equality `sum coeff * var = 0`.
    pub fn add_row(&mut self, coeffs: &BTreeMap<String, Rational>) -> Result<(), ExactError> {
        let row = self.dense(coeffs)?;
        self.rows.push(row);
        Ok(())
    }

    /// Rows in sparse form, zero coefficients omitted.
    pub fn rows(&self) -> Vec<BTreeMap<String, Rational>> {
        self.rows.iter().map(|r| self.sparse(r)).collect()
    }

    /// A strictly positive solution of all equalities, or `None` if no such
    /// vector exists. Homogeneity makes `> 0` equivalent to `>= 1`, which is
    /// what the returned witness satisfies.
    pub fn positive_solution(&self) -> Option<BTreeMap<String, Rational>> {
        let n = self.variables.len();
        if n == 0 {
            return Some(BTreeMap::new());
        }
        // Substitute v = u + 1 with u >= 0, then run exact phase-1 simplex on
        // A u = -A 1 with artificial variables and Bland's rule.
        let m = self.rows.len();
        let mut a: Vec<Vec<Rational>> = Vec::with_capacity(m);
        let mut b: Vec<Rational> = Vec::with_capacity(m);
        for row in &self.rows {
            let rhs: Rational = -row.iter().fold(Rational::zero(), |s, c| s + c);
            if rhs.is_negative() {
                a.push(row.iter().map(|c| -c.clone()).collect());
                b.push(-rhs);
            } else {
                a.push(row.clone());
                b.push(rhs);
            }
        }
        // Tableau columns: n structural + m artificial. Basis starts as the
        // artificials; minimize their sum.
        let total = n + m;
        let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m);
        for (i, row) in a.iter().enumerate() {
            let mut t = vec![Rational::zero(); total + 1];
            t[..n].clone_from_slice(row);
            t[n + i] = Rational::one();
            t[total] = b[i].clone();
            tableau.push(t);
        }
        let mut basis: Vec<usize> = (n..total).collect();
        // Reduced-cost row for the phase-1 objective.
        let mut obj = vec![Rational::zero(); total + 1];
        for t in &tableau {
            for (j, o) in obj.iter_mut().enumerate() {
                *o += &t[j];
            }
        }
        for item in obj.iter_mut().skip(n).take(m) {
            *item = Rational::zero();
        }

        // Bland's rule: pivot on the first column with positive reduced cost.
        while let Some(entering) = (0..total).find(|&j| obj[j].is_positive()) {
            // Ratio test, ties broken by smallest basis variable.
            let mut leave: Option<usize> = None;
            let mut best: Option<Rational> = None;
            for (i, t) in tableau.iter().enumerate() {
                if t[entering].is_positive() {
                    let ratio = &t[total] / &t[entering];
                    let better = match &best {
                        None => true,
                        Some(r) => ratio < *r || (ratio == *r && basis[i] < basis[leave.unwrap()]),
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(i);
                    }
                }
            }
            let leave = leave?; // unbounded cannot happen for phase 1
                                // Pivot.
            let pivot = tableau[leave][entering].clone();
            for x in tableau[leave].iter_mut() {
                *x /= &pivot;
            }
            for i in 0..m {
                if i != leave && !tableau[i][entering].is_zero() {
                    let f = tableau[i][entering].clone();
                    for j in 0..=total {
                        let d = &tableau[leave][j] * &f;
                        tableau[i][j] -= d;
                    }
                }
            }
            if !obj[entering].is_zero() {
                let f = obj[entering].clone();
                for j in 0..=total {
                    let d = &tableau[leave][j] * &f;
                    obj[j] -= d;
                }
            }
            basis[leave] = entering;
        }

        if !obj[total].is_zero() {
            return None; // artificials cannot be driven to zero: infeasible
        }
        let mut u = vec![Rational::zero(); n];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < n {
                u[bv] = tableau[i][total].clone();
            } else if !tableau[i][total].is_zero() {
                return None;
            }
        }
        let one = Rational::one();
        Some(
            self.variables
                .iter()
                .zip(u)
                .map(|(v, x)| (v.clone(), x + &one))
                .collect(),
        )
    }

    /// Whether `target` is a rational linear combination of the equality rows;
    /// equivalently, every solution of the system annihilates `target`.
    pub fn in_row_space(&self, target: &BTreeMap<String, Rational>) -> Result<bool, ExactError> {
        let t = self.dense(target)?;
        if t.iter().all(Zero::is_zero) {
            return Ok(true);
        }
        let base = rank(self.rows.clone());
        let mut extended = self.rows.clone();
        extended.push(t);
        Ok(rank(extended) == base)
    }

    /// Rank of the coefficient matrix.
    pub fn rank(&self) -> usize {
        rank(self.rows.clone())
    }

    /// An exact basis of the solution space of the equalities.
    pub fn nullspace_basis(&self) -> Vec<BTreeMap<String, Rational>> {
        let n = self.variables.len();
        let (reduced, pivots) = rref(self.rows.clone(), n);
        let pivot_of_col: BTreeMap<usize, usize> =
            pivots.iter().enumerate().map(|(r, &c)| (c, r)).collect();
        let mut basis = Vec::new();
        for free in 0..n {
            if pivot_of_col.contains_key(&free) {
                continue;
            }
            let mut v = vec![Rational::zero(); n];
            v[free] = Rational::one();
            for (&col, &row) in &pivot_of_col {
                v[col] = -reduced[row][free].clone();
            }
            basis.push(self.sparse(&v));
        }
        basis
    }
}

impl fmt::Display for LinearSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let mut first = true;
            for (v, c) in &row {
                if first {
                    write!(f, "{c}*{v}")?;
                    first = false;
                } else {
                    write!(f, " + {c}*{v}")?;
                }
            }
            if first {
                write!(f, "0")?;
            }
            writeln!(f, " = 0")?;
        }
        Ok(())
    }
}

/// Row-reduces `rows` (each of width `n`) to reduced row-echelon form.
/// Returns the nonzero reduced rows and their pivot columns.
fn rref(mut rows: Vec<Vec<Rational>>, n: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(src) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, src);
        let p = rows[r][col].clone();
        for x in rows[r].iter_mut() {
            *x /= &p;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..n {
                    let d = &rows[r][j] * &f;
                    rows[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

fn rank(rows: Vec<Vec<Rational>>) -> usize {
    let n = rows.first().map_or(0, Vec::len);
    rref(rows, n).1.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(vars: &[&str], rows: &[&[(&str, i64)]]) -> LinearSystem {
        let mut s = LinearSystem::new(vars.iter().copied()).unwrap();
        for row in rows {
            let coeffs: BTreeMap<String, Rational> =
                row.iter().map(|(v, c)| (v.to_string(), rat(*c))).collect();
            s.add_row(&coeffs).unwrap();
        }
        s
    }

    /// Rows of the two-cycle scheme used across the crate's tests:
    /// (g + a + d) - (d + b) = 0 and b - (g + a) = 0 over a, b, g, d.
    fn two_cycle_rows() -> LinearSystem {
        sys(
            &["a", "b", "d", "g"],
            &[
                &[("g", 1), ("a", 1), ("b", -1)],
                &[("b", 1), ("g", -1), ("a", -1)],
            ],
        )
    }

    #[test]
    fn unconstrained_single_variable_has_unit_witness() {
        let s = sys(&["a"], &[&[]]);
        let w = s.positive_solution().unwrap();
        assert!(w["a"] >= rat(1));
    }

    #[test]
    fn zero_sum_row_is_infeasible() {
        // A row asserting a sum of variables equals zero admits no positive
        // solution.
        let s = sys(&["a", "b"], &[&[("a", 1), ("b", 1)]]);
        assert_eq!(s.positive_solution(), None);
    }

    #[test]
    fn two_cycle_rows_have_positive_witness() {
        let s = two_cycle_rows();
        let w = s.positive_solution().unwrap();
        for row in s.rows() {
            let total: Rational = row.iter().map(|(v, c)| c * &w[v]).sum();
            assert!(total.is_zero());
        }
        // (1,2,1,1) on (a,b,g,d) satisfies both rows.
        let v = |x: i64| rat(x);
        assert_eq!(&v(1) + &v(1) + &v(1), v(2) + v(1)); // row 1
        assert_eq!(v(2), v(1) + v(1)); // row 2
    }

    #[test]
    fn witness_satisfies_every_equality_exactly() {
        let s = sys(
            &["x", "y", "z"],
            &[&[("x", 2), ("y", -1)], &[("y", 3), ("z", -2)]],
        );
        let w = s.positive_solution().unwrap();
        for row in s.rows() {
            let total: Rational = row.iter().map(|(v, c)| c * &w[v]).sum();
            assert!(total.is_zero());
        }
        assert!(w.values().all(|x| *x >= rat(1)));
    }

    #[test]
    fn zero_row_is_in_any_row_space() {
        let s = sys(&["a", "b"], &[]);
        assert!(s.in_row_space(&BTreeMap::new()).unwrap());
    }

    #[test]
    fn row_itself_is_in_row_space() {
        let s = sys(&["a", "b"], &[&[("a", 1), ("b", -1)]]);
        let t: BTreeMap<String, Rational> =
            [("a".to_string(), rat(1)), ("b".to_string(), rat(-1))].into();
        assert!(s.in_row_space(&t).unwrap());
    }

    #[test]
    fn unforced_difference_is_not_in_row_space() {
        // The witness (1,2,1,1) separates a and b, so e_a - e_b cannot lie in
        // the row space.
        let s = two_cycle_rows();
        let t: BTreeMap<String, Rational> =
            [("a".to_string(), rat(1)), ("b".to_string(), rat(-1))].into();
        assert!(!s.in_row_space(&t).unwrap());
    }

    #[test]
    fn nullspace_of_empty_system_is_full() {
        let s = sys(&["a", "b"], &[]);
        assert_eq!(s.nullspace_basis().len(), 2);
    }

    #[test]
    fn nullspace_of_equality_row_identifies_variables() {
        let s = sys(&["a", "b"], &[&[("a", 1), ("b", -1)]]);
        let basis = s.nullspace_basis();
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0]["a"], basis[0]["b"]);
    }

    #[test]
    fn two_cycle_rows_have_rank_one_and_nullity_three() {
        // The two rows sum to zero, so only one is independent.
        let s = two_cycle_rows();
        assert_eq!(s.rank(), 1);
        assert_eq!(s.nullspace_basis().len(), 3);
    }

    #[test]
    fn witness_stays_valid_along_nullspace_directions() {
        let s = two_cycle_rows();
        let w = s.positive_solution().unwrap();
        for z in s.nullspace_basis() {
            for row in s.rows() {
                let total: Rational = row
                    .iter()
                    .map(|(v, c)| {
                        let zv = z.get(v).cloned().unwrap_or_else(Rational::zero);
                        c * (&w[v] + ratio(1, 7) * zv)
                    })
                    .sum();
                assert!(total.is_zero());
            }
        }
    }

    #[test]
    fn in_row_space_matches_nullspace_orthogonality() {
        let s = two_cycle_rows();
        let targets: Vec<BTreeMap<String, Rational>> = vec![
            [("a".to_string(), rat(1)), ("b".to_string(), rat(-1))].into(),
            [
                ("g".to_string(), rat(1)),
                ("a".to_string(), rat(1)),
                ("b".to_string(), rat(-1)),
            ]
            .into(),
        ];
        for t in targets {
            let direct = s.in_row_space(&t).unwrap();
            let via_nullspace = s.nullspace_basis().iter().all(|z| {
                let dot: Rational = t
                    .iter()
                    .map(|(v, c)| c * z.get(v).cloned().unwrap_or_else(Rational::zero))
                    .sum();
                dot.is_zero()
            });
            assert_eq!(direct, via_nullspace);
        }
    }

    #[test]
    fn rational_parse_and_format_round_trip() {
        for s in ["3/4", "-3/4", "7", "0", "-12/5"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
    }
}
