use num_rational::BigRational;
use crate::classfield::units::parse_decimal;
use crate::error::{Error, Result};
use crate::exactalg::interval::RatInterval;

/// Unconditional lower bounds for root discriminants on a degree grid.
///
/// Between grid degrees the bound of the nearest smaller grid degree is used:
/// the bounds increase with the degree, so this only weakens them.
#[derive(Clone, Debug)]
pub struct OdlyzkoTable {
    pub rows: Vec<(u32, BigRational)>,
}

impl OdlyzkoTable {
    /// Parses `degree,min_root_disc` rows after a header; `#` lines are
    /// comments. Values are exact decimals. Degrees must increase strictly
    /// and bounds must not decrease.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty discriminant table".into()))?;
        if header.replace(' ', "") != "degree,min_root_disc" {
            return Err(Error::Parse(format!("unexpected table header {header:?}")));
        }
        let mut rows: Vec<(u32, BigRational)> = Vec::new();
        for line in lines {
            let (d, v) = line.split_once(',').ok_or_else(|| Error::Parse(format!("bad table row {line:?}")))?;
            let d: u32 = d.trim().parse().map_err(|_| Error::Parse(format!("bad degree in {line:?}")))?;
            let v = parse_decimal(v.trim()).ok_or_else(|| Error::Parse(format!("bad bound in {line:?}")))?;
            if let Some((pd, pv)) = rows.last() {
                if d <= *pd {
                    return Err(Error::Parse(format!("degrees not increasing at {d}")));
                }
                if v < *pv {
                    return Err(Error::Parse(format!("bound decreases at degree {d}")));
                }
            }
            rows.push((d, v));
        }
        if rows.first().map(|r| r.0) != Some(1) {
            return Err(Error::Parse("table must start at degree 1".into()));
        }
        Ok(OdlyzkoTable { rows })
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Certified lower bound for the root discriminant of any field of degree n.
    pub fn lower_bound(&self, n: u32) -> &BigRational {
        let i = self.rows.partition_point(|(d, _)| *d <= n);
        &self.rows[i.max(1) - 1].1
    }

    /// The largest degree a field with root discriminant at most `bound.hi`
    /// can have: one less than the first degree whose bound exceeds it.
    pub fn max_degree(&self, bound: &RatInterval) -> Result<u32> {
        self.rows
            .iter()
            .find(|(_, v)| *v > bound.hi)
            .map(|(d, _)| d - 1)
            .ok_or_else(|| Error::Inconclusive(format!("bound {bound} is unbounded by table")))
    }
}

pub fn max_degree(table: &OdlyzkoTable, bound: &RatInterval) -> Result<u32> {
    table.max_degree(bound)
}
