use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QdacError, Result};

/// A CNF over variables `1..=num_vars` in DIMACS literal convention.
///
/// Assignment `k` sets variable `v` to bit `num_vars - v` of `k`, so
/// variable 1 is the most significant bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<i64>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        if num_vars == 0 {
            return Err(QdacError::domain("a formula needs at least one variable"));
        }
        if num_vars >= 63 {
            return Err(QdacError::domain(format!("{num_vars} variables cannot be enumerated")));
        }
        for (i, c) in clauses.iter().enumerate() {
            if c.is_empty() {
                return Err(QdacError::domain(format!("clause {i} is empty")));
            }
            if let Some(&lit) = c.iter().find(|&&l| l == 0 || l.unsigned_abs() as usize > num_vars) {
                return Err(QdacError::domain(format!(
                    "clause {i} has literal {lit} outside 1..={num_vars}"
                )));
            }
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    /// Truth value of the formula under assignment `k`.
    pub fn evaluate(&self, k: usize) -> bool {
        self.clauses.iter().all(|c| {
            c.iter().any(|&lit| {
                let v = lit.unsigned_abs() as usize;
                let value = (k >> (self.num_vars - v)) & 1 == 1;
                value == (lit > 0)
            })
        })
    }

    pub fn count_satisfying(&self) -> usize {
        (0..1usize << self.num_vars).filter(|&k| self.evaluate(k)).count()
    }

    /// Exhaustive satisfiability check.
    pub fn brute_force_satisfiable(&self) -> bool {
        (0..1usize << self.num_vars).any(|k| self.evaluate(k))
    }

    /// Parses DIMACS CNF: `c` comment lines, one `p cnf <vars> <clauses>`
    /// header, and clauses terminated by `0` (possibly spanning lines).
    /// A line starting with `%` ends the input.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current: Vec<i64> = Vec::new();
        let mut last_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let lno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if line.starts_with('%') {
                break;
            }
            last_line = lno;
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(QdacError::parse(lno, "second `p` header"));
                }
                let parts: Vec<&str> = line.split_whitespace().collect();
                if parts.len() != 4 || parts[1] != "cnf" {
                    return Err(QdacError::parse(
                        lno,
                        format!("expected `p cnf <vars> <clauses>`, found `{line}`"),
                    ));
                }
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| QdacError::parse(lno, format!("`{s}` is not a non-negative integer")))
                };
                header = Some((num(parts[2])?, num(parts[3])?, lno));
                continue;
            }
            let Some((vars, _, _)) = header else {
                return Err(QdacError::parse(lno, "clause before the `p cnf` header"));
            };
            for tok in line.split_whitespace() {
                let lit: i64 = tok
                    .parse()
                    .map_err(|_| QdacError::parse(lno, format!("`{tok}` is not an integer literal")))?;
                if lit == 0 {
                    if current.is_empty() {
                        return Err(QdacError::parse(lno, "empty clause"));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else if lit.unsigned_abs() as usize > vars {
                    return Err(QdacError::parse(lno, format!("literal {lit} exceeds {vars} variables")));
                } else {
                    current.push(lit);
                }
            }
        }
        let Some((vars, expected, hline)) = header else {
            return Err(QdacError::parse(last_line.max(1), "missing `p cnf` header"));
        };
        if !current.is_empty() {
            return Err(QdacError::parse(last_line, "last clause is not terminated by 0"));
        }
        if clauses.len() != expected {
            return Err(QdacError::parse(
                hline,
                format!("header declares {expected} clauses, found {}", clauses.len()),
            ));
        }
        Self::new(vars, clauses).map_err(|e| QdacError::parse(hline, e.to_string()))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            for lit in c {
                out.push_str(&lit.to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    /// Uniformly random CNF: every clause has `min(width, num_vars)`
    /// distinct variables with random signs.
    pub fn random(num_vars: usize, width: usize, num_clauses: usize, seed: u64) -> Result<Self> {
        if width == 0 {
            return Err(QdacError::domain("clause width must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = width.min(num_vars);
        let clauses = (0..num_clauses)
            .map(|_| {
                sample(&mut rng, num_vars, w)
                    .into_iter()
                    .map(|v| {
                        let lit = v as i64 + 1;
                        if rng.random_bool(0.5) {
                            lit
                        } else {
                            -lit
                        }
                    })
                    .collect()
            })
            .collect();
        Self::new(num_vars, clauses)
    }
}
