//! CSV export of bound tables.
//!
//! Columns, in order: `bound_name, n, eps, sigma, value_bits, rate`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{BoundReport, PlanError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub bound_name: String,
    pub n: u64,
    pub eps: f64,
    pub sigma: f64,
    pub value_bits: f64,
    pub rate: f64,
}

impl<T: Real> From<&BoundReport<T>> for CsvRow {
    fn from(r: &BoundReport<T>) -> Self {
        CsvRow {
            bound_name: r.bound.name().to_string(),
            n: r.n,
            eps: r.eps.f64(),
            sigma: r.sigma.f64(),
            value_bits: r.value_bits.f64(),
            rate: r.rate.f64(),
        }
    }
}

pub fn write_csv<T: Real, W: Write>(out: W, reports: &[BoundReport<T>]) -> Result<(), PlanError> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(CsvRow::from(r))?;
    }
    if reports.is_empty() {
        w.write_record(["bound_name", "n", "eps", "sigma", "value_bits", "rate"])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>, PlanError> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(PlanError::from)
}

#[cfg(test)]
mod tests {
    use super::super::{evaluate, BoundKind};
    use super::*;
    use crate::source_model::{bsc_chain, entropy_profile, AlphabetSizes, BscChainParams};

    #[test]
    fn round_trip() {
        let prof = entropy_profile(&bsc_chain(BscChainParams::new(0.02, 0.15).unwrap()));
        let sizes = AlphabetSizes::new(2, 2, 2);
        let reports: Vec<_> = BoundKind::ALL
            .iter()
            .flat_map(|&k| {
                [2000u64, 20_000].map(|n| evaluate(k, n, 0.05, 0.05, &prof, sizes).unwrap())
            })
            .collect();
        let mut buf = Vec::new();
        write_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("bound_name,n,eps,sigma,value_bits,rate\n"));
        let rows = read_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), reports.len());
        for (row, r) in rows.iter().zip(&reports) {
            assert_eq!(row, &CsvRow::from(r));
        }
    }

    #[test]
    fn empty_table_has_header() {
        let mut buf = Vec::new();
        write_csv::<f64, _>(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "bound_name,n,eps,sigma,value_bits,rate\n"
        );
    }
}
