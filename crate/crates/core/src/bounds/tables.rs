//! Tabulation of the single-precoder diversity bound and of maximum
//! full-diversity coding rates, in aligned-text and CSV form.

use std::fmt;

use super::{delta_closed_form, max_full_diversity_rate, BoundsError};
use crate::rational::Rational;

/// Grid of `delta(beta, Rc, s)` values for `alpha = 0`; cells with
/// `s > beta + 1` are empty.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundTable {
    pub rc: Rational,
    pub s_max: u32,
    /// One row per beta: `(beta, cells[s-1])`.
    pub rows: Vec<(u32, Vec<Option<u32>>)>,
}

/// Single-precoder bound over `beta = 1..=beta_max`, `s = 1..=s_max`.
pub fn emit_bound_tables(rc: Rational, beta_max: u32, s_max: u32) -> Result<BoundTable, BoundsError> {
    if !rc.is_valid_rate() {
        return Err(BoundsError::InvalidRate(rc));
    }
    let mut rows = Vec::new();
    for beta in 1..=beta_max {
        let cells = (1..=s_max)
            .map(|s| {
                if s <= beta + 1 {
                    delta_closed_form(beta, 0, s, rc).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((beta, cells));
    }
    Ok(BoundTable { rc, s_max, rows })
}

impl BoundTable {
    pub fn cell(&self, beta: u32, s: u32) -> Option<u32> {
        self.rows
            .iter()
            .find(|(b, _)| *b == beta)
            .and_then(|(_, cells)| cells.get(s as usize - 1).copied().flatten())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta");
        for s in 1..=self.s_max {
            out.push_str(&format!(",s={s}"));
        }
        out.push('\n');
        for (beta, cells) in &self.rows {
            out.push_str(&beta.to_string());
            for c in cells {
                match c {
                    Some(v) => out.push_str(&format!(",{v}")),
                    None => out.push(','),
                }
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for BoundTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "delta_max(beta, Rc = {}, s) with alpha = 0", self.rc)?;
        write!(f, "beta\\s |")?;
        for s in 1..=self.s_max {
            write!(f, " {s:>3}")?;
        }
        writeln!(f)?;
        writeln!(f, "-------+{}", "-".repeat(4 * self.s_max as usize))?;
        for (beta, cells) in &self.rows {
            write!(f, "{beta:>6} |")?;
            for c in cells {
                match c {
                    Some(v) => write!(f, " {v:>3}")?,
                    None => write!(f, "   .")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Maximum full-diversity coding rates over `alpha = 0..=alpha_max` for a
/// set of relay counts, without precoding (`s = 1`).
#[derive(Clone, Debug)]
pub struct MaxRateTable {
    pub alpha_max: u32,
    /// One row per beta: `(beta, rates[alpha])`.
    pub rows: Vec<(u32, Vec<Rational>)>,
}

pub fn max_rate_table(betas: &[u32], alpha_max: u32) -> MaxRateTable {
    let rows = betas
        .iter()
        .map(|&beta| {
            let rates = (0..=alpha_max)
                .map(|alpha| max_full_diversity_rate(beta, alpha, 1))
                .collect();
            (beta, rates)
        })
        .collect();
    MaxRateTable { alpha_max, rows }
}

impl MaxRateTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta");
        for a in 0..=self.alpha_max {
            out.push_str(&format!(",alpha={a}"));
        }
        out.push('\n');
        for (beta, rates) in &self.rows {
            out.push_str(&beta.to_string());
            for r in rates {
                out.push_str(&format!(",{r}"));
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for MaxRateTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "max full-diversity Rc over the (beta+1+alpha)-slot frame, s = 1")?;
        write!(f, "beta\\alpha |")?;
        for a in 0..=self.alpha_max {
            write!(f, " {a:>6}")?;
        }
        writeln!(f)?;
        writeln!(f, "-----------+{}", "-".repeat(7 * (self.alpha_max as usize + 1)))?;
        for (beta, rates) in &self.rows {
            write!(f, "{beta:>10} |")?;
            for r in rates {
                write!(f, " {:>6}", r.to_string())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
