use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{QdacError, Result};

/// Largest pointer width a truth table may have.
pub const MAX_POINTER_BITS: usize = 24;
/// Largest data width; keeps `2^{i-n+1}` an exact binary fraction.
pub const MAX_DATA_BITS: usize = 60;

/// Unit-sample function: `1` at `x = 0`, else `0`.
pub fn unit_sample(x: i64) -> u8 {
    u8::from(x == 0)
}

/// A converter instance: pointer width `m`, data width `n` and the truth
/// table `f(k)` for every `k < 2^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DacInstance {
    m: usize,
    n: usize,
    table: Vec<u64>,
}

impl DacInstance {
    pub fn new(m: usize, n: usize, table: Vec<u64>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(QdacError::domain("m and n must both be at least 1"));
        }
        if m > MAX_POINTER_BITS {
            return Err(QdacError::domain(format!("m = {m} exceeds {MAX_POINTER_BITS}")));
        }
        if n > MAX_DATA_BITS {
            return Err(QdacError::domain(format!("n = {n} exceeds {MAX_DATA_BITS}")));
        }
        if table.len() != 1usize << m {
            return Err(QdacError::domain(format!(
                "truth table has {} entries, expected 2^{m} = {}",
                table.len(),
                1usize << m
            )));
        }
        if let Some((k, v)) = table.iter().enumerate().find(|(_, &v)| v >> n != 0) {
            return Err(QdacError::domain(format!("f({k}) = {v} does not fit in {n} bits")));
        }
        Ok(Self { m, n, table })
    }

    pub fn from_fn(m: usize, n: usize, f: impl Fn(usize) -> u64) -> Result<Self> {
        if m > MAX_POINTER_BITS {
            return Err(QdacError::domain(format!("m = {m} exceeds {MAX_POINTER_BITS}")));
        }
        Self::new(m, n, (0..1usize << m).map(f).collect())
    }

    /// Clock function: `0` on even pointers, `2^{n-1}` on odd ones.
    pub fn clock(m: usize, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DATA_BITS {
            return Err(QdacError::domain("invalid data width"));
        }
        let top = 1u64 << (n - 1);
        Self::from_fn(m, n, |k| if k & 1 == 1 { top } else { 0 })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn value(&self, k: usize) -> u64 {
        self.table[k]
    }

    /// Bit `i` of `f(k)`.
    pub fn bit(&self, k: usize, i: usize) -> bool {
        (self.table[k] >> i) & 1 == 1
    }

    pub fn pointers(&self) -> usize {
        self.table.len()
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|&v| v == 0)
    }

    /// Parses the truth-table text format: a `m n` header followed by
    /// `2^m` binary words `f_{n-1}…f_0(k)` in ascending `k`. Blank lines
    /// and `#` comments are ignored.
    pub fn parse_truth_table(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (hline, header) = lines
            .next()
            .ok_or_else(|| QdacError::parse(1, "missing `m n` header"))?;
        let nums: Vec<&str> = header.split_whitespace().collect();
        if nums.len() != 2 {
            return Err(QdacError::parse(hline, format!("expected `m n`, found `{header}`")));
        }
        let parse_int = |s: &str| -> Result<usize> {
            s.parse::<usize>()
                .map_err(|_| QdacError::parse(hline, format!("`{s}` is not a non-negative integer")))
        };
        let (m, n) = (parse_int(nums[0])?, parse_int(nums[1])?);
        if m == 0 || n == 0 || m > MAX_POINTER_BITS || n > MAX_DATA_BITS {
            return Err(QdacError::parse(
                hline,
                format!("need 1 <= m <= {MAX_POINTER_BITS} and 1 <= n <= {MAX_DATA_BITS}, got m = {m}, n = {n}"),
            ));
        }
        let expected = 1usize << m;
        let mut table = Vec::with_capacity(expected);
        let mut last_line = hline;
        for (lno, word) in lines {
            last_line = lno;
            let word: String = word.split_whitespace().collect();
            if table.len() == expected {
                return Err(QdacError::parse(
                    lno,
                    format!("more than 2^{m} = {expected} table entries"),
                ));
            }
            if word.len() != n || !word.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(QdacError::parse(
                    lno,
                    format!(
                        "entry for k = {} must be {n} binary digits, found `{word}`",
                        table.len()
                    ),
                ));
            }
            table.push(u64::from_str_radix(&word, 2).expect("validated binary word"));
        }
        if table.len() != expected {
            return Err(QdacError::parse(
                last_line + 1,
                format!(
                    "missing table entry for k = {} (found {} of {expected} lines)",
                    table.len(),
                    table.len()
                ),
            ));
        }
        Self::new(m, n, table)
    }

    pub fn to_truth_table(&self) -> String {
        let mut out = format!("{} {}\n", self.m, self.n);
        for v in &self.table {
            let _ = writeln!(out, "{:0width$b}", v, width = self.n);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_shape() {
        assert!(DacInstance::new(0, 1, vec![0]).is_err());
        assert!(DacInstance::new(1, 0, vec![0, 0]).is_err());
        assert!(DacInstance::new(1, 2, vec![0, 1, 2]).is_err());
        assert!(DacInstance::new(1, 2, vec![0, 4]).is_err());
        let inst = DacInstance::new(1, 3, vec![0b101, 0b010]).unwrap();
        assert!(inst.bit(0, 0) && !inst.bit(0, 1) && inst.bit(0, 2));
        assert_eq!(unit_sample(0), 1);
        assert_eq!(unit_sample(-1), 0);
    }

    #[test]
    fn parses_with_comments_and_whitespace() {
        let text = "# example\n  2 3  \n101\n 0 1 0 # spaced\n\n000\n111\n";
        let inst = DacInstance::parse_truth_table(text).unwrap();
        assert_eq!(inst.table(), &[0b101, 0b010, 0, 0b111]);
        let again = DacInstance::parse_truth_table(&inst.to_truth_table()).unwrap();
        assert_eq!(again, inst);
    }

    #[test]
    fn missing_line_is_reported() {
        let err = DacInstance::parse_truth_table("2 2\n01\n10\n11\n").unwrap_err();
        match err {
            QdacError::Parse { line, msg } => {
                assert_eq!(line, 5);
                assert!(msg.contains("k = 3"), "{msg}");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn bad_word_names_its_line() {
        let err = DacInstance::parse_truth_table("1 2\n01\n1x\n").unwrap_err();
        assert!(matches!(err, QdacError::Parse { line: 3, .. }));
        let err = DacInstance::parse_truth_table("1 2\n01\n011\n").unwrap_err();
        assert!(matches!(err, QdacError::Parse { line: 3, .. }));
        let err = DacInstance::parse_truth_table("1\n01\n").unwrap_err();
        assert!(matches!(err, QdacError::Parse { line: 1, .. }));
    }

    #[test]
    fn clock_alternates() {
        let c = DacInstance::clock(2, 3).unwrap();
        assert_eq!(c.table(), &[0, 4, 0, 4]);
    }
}
