//! Flat CSV tables shared by the dynamics and growth outputs.

use std::path::Path;

use crate::error::{Error, Result};

use super::config::Case;

/// Leading key columns of every table.
pub const KEY_COLUMNS: [&str; 4] = ["case", "L", "realization", "T0"];

/// Value columns for the given nQEE window sizes.
pub fn value_columns(n_list: &[usize]) -> Vec<String> {
    let mut cols = vec!["t".to_string(), "S_HC".into()];
    cols.extend(n_list.iter().map(|n| format!("S_{n}Q")));
    cols.push("S_W".into());
    cols.push("r_HC".into());
    cols.extend(n_list.iter().map(|n| format!("r_{n}Q")));
    cols.push("r_W".into());
    cols.extend(
        [
            "m_av",
            "G_av",
            "S_HC_pred_gge",
            "S_W_pred_gge",
            "S_W_pred_scrooge",
            "S_W_pred_scrooge_stderr",
            "S_HC_0",
            "S_W_0",
            "dS_HC",
            "dS_W",
        ]
        .map(String::from),
    );
    cols
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    /// `None` on aggregate rows.
    pub realization: Option<usize>,
    pub t0: f64,
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub case: Case,
    pub n_sites: usize,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

fn fmt_cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

impl ResultTable {
    pub fn new(case: Case, n_sites: usize, columns: Vec<String>) -> Self {
        Self { case, n_sites, columns, rows: Vec::new() }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn value(&self, row: usize, column: &str) -> Option<f64> {
        self.rows.get(row)?.values[self.column_index(column)?]
    }

    pub fn column(&self, name: &str) -> Vec<Option<f64>> {
        let Some(k) = self.column_index(name) else {
            return vec![None; self.rows.len()];
        };
        self.rows.iter().map(|r| r.values[k]).collect()
    }

    pub fn header(&self) -> Vec<String> {
        KEY_COLUMNS.iter().map(|s| s.to_string()).chain(self.columns.iter().cloned()).collect()
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for r in &self.rows {
            let mut rec = vec![
                self.case.label().to_string(),
                self.n_sites.to_string(),
                r.realization.map(|k| k.to_string()).unwrap_or_default(),
                format!("{:?}", r.t0),
            ];
            rec.extend(r.values.iter().map(|&v| fmt_cell(v)));
            w.write_record(&rec)?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_bytes()?)?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
        if header.len() < KEY_COLUMNS.len() || header[..4] != KEY_COLUMNS {
            return Err(Error::InvalidInput(format!("{} lacks the key columns", path.display())));
        }
        let parse = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| Error::InvalidInput(format!("bad number {s:?}")))
            }
        };
        let mut table: Option<ResultTable> = None;
        for rec in r.records() {
            let rec = rec?;
            let t = table.get_or_insert_with(|| ResultTable {
                case: rec[0].parse().unwrap_or(Case::I),
                n_sites: rec[1].parse().unwrap_or(0),
                columns: header[4..].to_vec(),
                rows: Vec::new(),
            });
            let realization = if rec[2].is_empty() {
                None
            } else {
                Some(rec[2].parse().map_err(|_| Error::InvalidInput("bad realization".into()))?)
            };
            let t0 = parse(&rec[3])?.ok_or_else(|| Error::InvalidInput("missing T0".into()))?;
            let values = rec.iter().skip(4).map(parse).collect::<Result<Vec<_>>>()?;
            t.rows.push(Row { realization, t0, values });
        }
        table.ok_or_else(|| Error::InvalidInput(format!("{} has no rows", path.display())))
    }

    /// Mean over realizations for each `T0`, in first-appearance order. A
    /// cell is averaged only when every realization has it. Adds
    /// `n_realizations` and standard errors of the growth columns.
    pub fn aggregate(&self) -> ResultTable {
        let mut t0s: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !t0s.contains(&r.t0) {
                t0s.push(r.t0);
            }
        }
        let mut columns = self.columns.clone();
        columns.extend(["n_realizations", "dS_HC_stderr", "dS_W_stderr"].map(String::from));
        let growth: Vec<Option<usize>> = ["dS_HC", "dS_W"].iter().map(|c| self.column_index(c)).collect();

        let rows = t0s
            .into_iter()
            .map(|t0| {
                let group: Vec<&Row> = self.rows.iter().filter(|r| r.t0 == t0).collect();
                let n = group.len() as f64;
                let mut values: Vec<Option<f64>> = (0..self.columns.len())
                    .map(|k| {
                        let vals: Option<Vec<f64>> = group.iter().map(|r| r.values[k]).collect();
                        vals.map(|v| v.iter().sum::<f64>() / n)
                    })
                    .collect();
                values.push(Some(n));
                for g in &growth {
                    values.push(g.and_then(|k| {
                        let v: Vec<f64> = group.iter().map(|r| r.values[k]).collect::<Option<_>>()?;
                        standard_error(&v)
                    }));
                }
                Row { realization: None, t0, values }
            })
            .collect();
        ResultTable { case: self.case, n_sites: self.n_sites, columns, rows }
    }
}

/// Sample standard error of the mean; `None` below two samples.
pub fn standard_error(v: &[f64]) -> Option<f64> {
    if v.len() < 2 {
        return None;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ResultTable {
        let cols = value_columns(&[3]);
        let mut t = ResultTable::new(Case::I, 4, cols.clone());
        for (k, t0) in [(0, 0.0), (0, 1.0), (1, 0.0), (1, 1.0)] {
            let mut values = vec![None; cols.len()];
            values[0] = Some(1e12);
            values[1] = Some(k as f64 + t0);
            let ds = cols.iter().position(|c| c == "dS_HC").unwrap();
            values[ds] = Some(2.0 * k as f64);
            t.rows.push(Row { realization: Some(k), t0, values });
        }
        t
    }

    #[test]
    fn header_layout() {
        let t = table();
        let h = t.header();
        assert_eq!(&h[..6], &["case", "L", "realization", "T0", "t", "S_HC"]);
        assert!(h.contains(&"S_3Q".to_string()) && h.contains(&"r_3Q".to_string()));
        assert!(h.ends_with(&["dS_HC".to_string(), "dS_W".to_string()]));
    }

    #[test]
    fn csv_round_trip() {
        let t = table();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        t.write_csv(&p).unwrap();
        assert_eq!(ResultTable::read_csv(&p).unwrap(), t);
    }

    #[test]
    fn aggregate_means_and_errors() {
        let a = table().aggregate();
        assert_eq!(a.rows.len(), 2);
        assert_eq!(a.value(0, "S_HC"), Some(0.5));
        assert_eq!(a.value(1, "S_HC"), Some(1.5));
        assert_eq!(a.value(0, "n_realizations"), Some(2.0));
        assert_eq!(a.value(0, "dS_HC"), Some(1.0));
        assert!((a.value(0, "dS_HC_stderr").unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(a.value(0, "S_W"), None);
        assert_eq!(a.rows[0].realization, None);
    }

    #[test]
    fn standard_error_small_samples() {
        assert_eq!(standard_error(&[1.0]), None);
        assert!((standard_error(&[1.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
    }
}
