use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Sparse binary parity-check matrix with row and column adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    n: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Build from per-row column lists. Rejects duplicate edges, out-of-range
    /// columns and empty columns.
    pub fn from_rows(n: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut cols = vec![Vec::new(); n];
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::invalid(format!("duplicate edge ({r}, {})", w[0])));
                }
            }
            for &c in row.iter() {
                if c >= n {
                    return Err(Error::invalid(format!("column {c} out of range in row {r}")));
                }
                cols[c].push(r);
            }
        }
        if let Some(c) = cols.iter().position(|c| c.is_empty()) {
            return Err(Error::invalid(format!("column {c} has no checks")));
        }
        Ok(Self { n, rows, cols })
    }

    pub fn from_dense(m: usize, n: usize, data: &[u8]) -> Result<Self> {
        if data.len() != m * n {
            return Err(Error::LengthMismatch {
                what: "dense matrix entries",
                expected: m * n,
                got: data.len(),
            });
        }
        let rows = (0..m)
            .map(|r| (0..n).filter(|&c| data[r * n + c] != 0).collect())
            .collect();
        Self::from_rows(n, rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn syndrome_is_zero(&self, bits: &[u8]) -> bool {
        self.rows
            .iter()
            .all(|row| row.iter().fold(0u8, |acc, &c| acc ^ bits[c]) == 0)
    }

    /// True if two columns share two or more rows.
    pub fn has_four_cycle(&self) -> bool {
        let mut seen = HashSet::new();
        for row in &self.rows {
            for (i, &a) in row.iter().enumerate() {
                for &b in &row[i + 1..] {
                    if !seen.insert((a, b)) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Serialize in alist layout.
    pub fn to_alist(&self) -> String {
        let max_col = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.m());
        let _ = writeln!(s, "{max_col} {max_row}");
        let join = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let _ = writeln!(s, "{}", join(&mut self.cols.iter().map(Vec::len)));
        let _ = writeln!(s, "{}", join(&mut self.rows.iter().map(Vec::len)));
        for col in &self.cols {
            let mut entries: Vec<usize> = col.iter().map(|r| r + 1).collect();
            entries.resize(max_col, 0);
            let _ = writeln!(s, "{}", join(&mut entries.into_iter()));
        }
        for row in &self.rows {
            let mut entries: Vec<usize> = row.iter().map(|c| c + 1).collect();
            entries.resize(max_row, 0);
            let _ = writeln!(s, "{}", join(&mut entries.into_iter()));
        }
        s
    }

    /// Parse an alist description. Zero entries in adjacency lists are
    /// padding and skipped; stated degrees must match the adjacency lists.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut last_line = 0usize;
        let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, line) = lines.next().ok_or_else(|| Error::Parse {
                line: last_line + 1,
                msg: format!("unexpected end of file, expected {what}"),
            })?;
            last_line = no;
            let nums = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| Error::Parse {
                        line: no,
                        msg: format!("invalid integer '{t}' in {what}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((no, nums))
        };
        let expect_len = |no: usize, v: &[usize], len: usize, what: &str| -> Result<()> {
            if v.len() != len {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("expected {len} values for {what}, found {}", v.len()),
                });
            }
            Ok(())
        };

        let (no, header) = next_numbers("'n m' header")?;
        expect_len(no, &header, 2, "header")?;
        let (n, m) = (header[0], header[1]);
        if n == 0 || m == 0 {
            return Err(Error::Parse {
                line: no,
                msg: "matrix dimensions must be positive".into(),
            });
        }
        let (no, maxes) = next_numbers("maximum degrees")?;
        expect_len(no, &maxes, 2, "maximum degrees")?;
        let (no, col_deg) = next_numbers("column degrees")?;
        expect_len(no, &col_deg, n, "column degrees")?;
        let (no, row_deg) = next_numbers("row degrees")?;
        expect_len(no, &row_deg, m, "row degrees")?;
        if col_deg.iter().max() != Some(&maxes[0]) || row_deg.iter().max() != Some(&maxes[1]) {
            return Err(Error::Parse {
                line: no,
                msg: "maximum degrees disagree with degree lists".into(),
            });
        }

        let mut col_lists = Vec::with_capacity(n);
        for (c, &deg) in col_deg.iter().enumerate() {
            let (no, entries) = next_numbers("column adjacency")?;
            let list: Vec<usize> = entries.into_iter().filter(|&e| e != 0).collect();
            if list.len() != deg {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("column {} lists {} rows, degree says {deg}", c + 1, list.len()),
                });
            }
            if let Some(&bad) = list.iter().find(|&&r| r > m) {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("row index {bad} exceeds m = {m}"),
                });
            }
            col_lists.push((no, list));
        }
        let mut rows = Vec::with_capacity(m);
        for (r, &deg) in row_deg.iter().enumerate() {
            let (no, entries) = next_numbers("row adjacency")?;
            let list: Vec<usize> = entries.into_iter().filter(|&e| e != 0).collect();
            if list.len() != deg {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("row {} lists {} columns, degree says {deg}", r + 1, list.len()),
                });
            }
            if let Some(&bad) = list.iter().find(|&&c| c > n) {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("column index {bad} exceeds n = {n}"),
                });
            }
            rows.push(list.into_iter().map(|c| c - 1).collect::<Vec<_>>());
        }

        let h = Self::from_rows(n, rows).map_err(|e| Error::Parse {
            line: last_line,
            msg: e.to_string(),
        })?;
        for (c, (no, list)) in col_lists.into_iter().enumerate() {
            let mut from_cols: Vec<usize> = list.into_iter().map(|r| r - 1).collect();
            from_cols.sort_unstable();
            if from_cols != h.cols[c] {
                return Err(Error::Parse {
                    line: no,
                    msg: format!("column {} adjacency disagrees with row lists", c + 1),
                });
            }
        }
        Ok(h)
    }
}
