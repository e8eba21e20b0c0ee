use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The closed set of quantity names that may appear in a sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantity {
    CrossCov,
    EN,
    GenSsl,
    GenSlN,
    GenSlNm,
    SelectedThreshold,
    SklDiff,
    LogLambdaTerm,
    AssembledGen,
    AssemblyResidual,
    GenDefinition,
    GenDefinitionDraw,
    CrossCovBacksolved,
    SgldMean,
    PosteriorMean,
    SgldVariance,
    PosteriorVariance,
    GradCheckQuadratic,
    GradCheckLogistic,
    NTimesGen,
    WStarLambdaNorm,
    EmpiricalGen,
    NTimesEmpiricalGen,
    FitFailures,
    ExcessBias,
    ExcessVariance,
    ExcessTotal,
}

impl Quantity {
    pub const ALL: [Quantity; 27] = [
        Quantity::CrossCov,
        Quantity::EN,
        Quantity::GenSsl,
        Quantity::GenSlN,
        Quantity::GenSlNm,
        Quantity::SelectedThreshold,
        Quantity::SklDiff,
        Quantity::LogLambdaTerm,
        Quantity::AssembledGen,
        Quantity::AssemblyResidual,
        Quantity::GenDefinition,
        Quantity::GenDefinitionDraw,
        Quantity::CrossCovBacksolved,
        Quantity::SgldMean,
        Quantity::PosteriorMean,
        Quantity::SgldVariance,
        Quantity::PosteriorVariance,
        Quantity::GradCheckQuadratic,
        Quantity::GradCheckLogistic,
        Quantity::NTimesGen,
        Quantity::WStarLambdaNorm,
        Quantity::EmpiricalGen,
        Quantity::NTimesEmpiricalGen,
        Quantity::FitFailures,
        Quantity::ExcessBias,
        Quantity::ExcessVariance,
        Quantity::ExcessTotal,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::CrossCov => "cross_cov",
            Quantity::EN => "e_n",
            Quantity::GenSsl => "gen_ssl",
            Quantity::GenSlN => "gen_sl_n",
            Quantity::GenSlNm => "gen_sl_nm",
            Quantity::SelectedThreshold => "selected_threshold",
            Quantity::SklDiff => "skl_diff",
            Quantity::LogLambdaTerm => "log_lambda_term",
            Quantity::AssembledGen => "assembled_gen",
            Quantity::AssemblyResidual => "assembly_residual",
            Quantity::GenDefinition => "gen_definition",
            Quantity::GenDefinitionDraw => "gen_definition_draw",
            Quantity::CrossCovBacksolved => "cross_cov_backsolved",
            Quantity::SgldMean => "sgld_mean",
            Quantity::PosteriorMean => "posterior_mean",
            Quantity::SgldVariance => "sgld_variance",
            Quantity::PosteriorVariance => "posterior_variance",
            Quantity::GradCheckQuadratic => "grad_check_quadratic",
            Quantity::GradCheckLogistic => "grad_check_logistic",
            Quantity::NTimesGen => "n_times_gen",
            Quantity::WStarLambdaNorm => "w_star_lambda_norm",
            Quantity::EmpiricalGen => "empirical_gen",
            Quantity::NTimesEmpiricalGen => "n_times_empirical_gen",
            Quantity::FitFailures => "fit_failures",
            Quantity::ExcessBias => "excess_bias",
            Quantity::ExcessVariance => "excess_variance",
            Quantity::ExcessTotal => "excess_total",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Quantity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .iter()
            .copied()
            .find(|q| q.as_str() == s)
            .ok_or_else(|| Error::invalid("quantity", format!("unknown quantity {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sweep_variable: f64,
    pub quantity: Quantity,
    pub value: f64,
    /// Present for Monte-Carlo estimates.
    pub std_err: Option<f64>,
    pub n: Option<usize>,
    pub m: Option<usize>,
}

/// One experiment's output table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Name of the swept variable, used as the plot's x label.
    pub sweep_label: String,
    pub rows: Vec<SweepRow>,
}

pub const CSV_HEADER: [&str; 6] = ["sweep_variable", "quantity", "value", "std_err", "n", "m"];

/// 17 significant digits; round-trips every finite `f64`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

impl SweepResult {
    pub fn new(sweep_label: impl Into<String>) -> Self {
        SweepResult {
            sweep_label: sweep_label.into(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: SweepRow) {
        self.rows.push(row);
    }

    /// Stable sort by sweep variable.
    pub fn sort(&mut self) {
        self.rows
            .sort_by(|a, b| a.sweep_variable.total_cmp(&b.sweep_variable));
    }

    pub fn series(&self, q: Quantity) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.quantity == q)
    }

    /// Quantities present, in first-appearance order.
    pub fn quantities(&self) -> Vec<Quantity> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.quantity) {
                out.push(r.quantity);
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        let opt_usize = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                format_float(r.sweep_variable),
                r.quantity.as_str().to_string(),
                format_float(r.value),
                r.std_err.map(format_float).unwrap_or_default(),
                opt_usize(r.n),
                opt_usize(r.m),
            ])?;
        }
        w.flush().map_err(|e| Error::Csv(e.into()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv<R: Read>(input: R, sweep_label: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let header = rdr.headers()?.clone();
        if header.iter().ne(CSV_HEADER.iter().copied()) {
            return Err(Error::invalid(
                "csv",
                format!("unexpected header {header:?}"),
            ));
        }
        let mut out = SweepResult::new(sweep_label);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let row = i + 2;
            let num = |col: usize| -> Result<f64> {
                rec[col].parse().map_err(|_| Error::ParseField {
                    row,
                    column: col,
                    value: rec[col].to_string(),
                })
            };
            let opt_num = |col: usize| -> Result<Option<f64>> {
                if rec[col].is_empty() {
                    Ok(None)
                } else {
                    num(col).map(Some)
                }
            };
            let opt_int = |col: usize| -> Result<Option<usize>> {
                if rec[col].is_empty() {
                    return Ok(None);
                }
                rec[col].parse().map(Some).map_err(|_| Error::ParseField {
                    row,
                    column: col,
                    value: rec[col].to_string(),
                })
            };
            out.push(SweepRow {
                sweep_variable: num(0)?,
                quantity: rec[1].parse()?,
                value: num(2)?,
                std_err: opt_num(3)?,
                n: opt_int(4)?,
                m: opt_int(5)?,
            });
        }
        Ok(out)
    }

    pub fn read_csv_file(path: &Path, sweep_label: impl Into<String>) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::read_csv(f, sweep_label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SweepResult {
        let mut s = SweepResult::new("lambda");
        s.push(SweepRow {
            sweep_variable: 3.0,
            quantity: Quantity::GenSsl,
            value: 0.1,
            std_err: Some(1e-3),
            n: Some(5),
            m: Some(15),
        });
        s.push(SweepRow {
            sweep_variable: 0.0,
            quantity: Quantity::GenSlN,
            value: 0.8,
            std_err: None,
            n: Some(5),
            m: Some(0),
        });
        s.push(SweepRow {
            sweep_variable: 0.5,
            quantity: Quantity::SelectedThreshold,
            value: 1.0 / 3.0,
            std_err: None,
            n: None,
            m: None,
        });
        s.sort();
        s
    }

    #[test]
    fn vocabulary_round_trips() {
        for q in Quantity::ALL {
            assert_eq!(q.as_str().parse::<Quantity>().unwrap(), q);
        }
        assert!("bogus".parse::<Quantity>().is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample();
        let text = s.to_csv_string();
        assert!(text.starts_with("sweep_variable,quantity,value,std_err,n,m\n"));
        assert!(text.contains("3.3333333333333331e-1"));
        let back = SweepResult::read_csv(text.as_bytes(), "lambda").unwrap();
        assert_eq!(back, s);
        assert_eq!(back.to_csv_string(), text);
    }

    #[test]
    fn sorted_by_sweep_variable() {
        let s = sample();
        let xs: Vec<f64> = s.rows.iter().map(|r| r.sweep_variable).collect();
        assert_eq!(xs, vec![0.0, 0.5, 3.0]);
    }
}
