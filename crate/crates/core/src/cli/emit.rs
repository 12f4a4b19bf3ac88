//! Rendering of experiment results as CSV or markdown tables laid out like
//! the published tables.

use crate::benchmarks::{convergence_ratios, BenchmarkResult, ParameterPoint, SpectraResult};

use super::config::OutputFormat;

/// Parameter spanning the columns of an error table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiotColumn {
    RInv,
    Lambda,
    AlphaP,
}

impl BiotColumn {
    /// Column parameter of Biot error tables 1, 2 and 3.
    pub fn for_table(table: u8) -> Self {
        match table {
            2 => BiotColumn::Lambda,
            3 => BiotColumn::AlphaP,
            _ => BiotColumn::RInv,
        }
    }
}

/// Results of one experiment, ready to be tabulated.
#[derive(Debug, Clone)]
pub enum ExperimentResults {
    Errors { column: BiotColumn, results: Vec<BenchmarkResult> },
    BiotMinres(Vec<BenchmarkResult>),
    Barenblatt(Vec<BenchmarkResult>),
    FourNetwork(Vec<BenchmarkResult>),
    Spectra(Vec<SpectraResult>),
    Converge(Vec<BenchmarkResult>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// `2.1E-1`: scientific notation with two significant digits.
pub fn fmt_sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{x:.1E}")
}

/// Parameter value as a column head: `0`, `1E4`, `1E-8`, else [`fmt_sci`].
pub fn fmt_value(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if v > 0.0 {
        let k = v.log10().round();
        if (10f64.powi(k as i32) - v).abs() <= 1e-12 * v {
            return format!("1E{}", k as i32);
        }
    }
    fmt_sci(v)
}

/// Average residual reduction factor with two decimals, `<0.01` below.
pub fn fmt_factor(f: f64) -> String {
    if f < 0.005 {
        "<0.01".into()
    } else {
        format!("{f:.2}")
    }
}

fn fmt_h(n: usize) -> String {
    format!("1/{n}")
}

/// Distinct values in order of first appearance.
fn distinct<T: PartialEq>(it: impl Iterator<Item = T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for v in it {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn biot(p: &ParameterPoint) -> (f64, f64, f64) {
    match p {
        ParameterPoint::Biot(m) => (m.alpha_p, m.lambda, m.r1_inv),
        _ => (f64::NAN, f64::NAN, f64::NAN),
    }
}

/// Splits a parameter point into `(row key, column value)` for the MinRes
/// layouts.
fn minres_key(p: &ParameterPoint) -> (Vec<f64>, f64) {
    match p {
        ParameterPoint::Biot(m) => (vec![m.alpha_p, m.lambda], m.r1_inv),
        ParameterPoint::Barenblatt(b) => (vec![b.beta, b.k2_scale], b.k1_scale),
        ParameterPoint::FourNetwork(f) => (vec![f.lambda_scale, f.k_scale], f.k3_scale),
    }
}

fn errors_table(column: BiotColumn, results: &[BenchmarkResult]) -> Table {
    let names = ["alpha_p", "lambda", "r_inv"];
    let col_idx = match column {
        BiotColumn::AlphaP => 0,
        BiotColumn::Lambda => 1,
        BiotColumn::RInv => 2,
    };
    let key = |r: &BenchmarkResult| {
        let (a, l, ri) = biot(&r.point);
        [a, l, ri]
    };
    let columns = distinct(results.iter().map(|r| key(r)[col_idx].to_bits()));
    // other parameters only get a column of their own when they vary
    let extra: Vec<usize> = (0..3)
        .filter(|&k| k != col_idx && distinct(results.iter().map(|r| key(r)[k].to_bits())).len() > 1)
        .collect();

    let mut header = vec!["h".to_string()];
    header.extend(extra.iter().map(|&k| names[k].to_string()));
    header.push("norm".into());
    header.extend(columns.iter().map(|b| fmt_value(f64::from_bits(*b))));

    let row_keys = distinct(results.iter().map(|r| {
        let k = key(r);
        (r.n_subdiv, extra.iter().map(|&e| k[e].to_bits()).collect::<Vec<_>>())
    }));
    let mut rows = Vec::new();
    for (n, ex) in row_keys {
        let cell = |col: u64| {
            results.iter().find(|r| {
                let k = key(r);
                r.n_subdiv == n
                    && k[col_idx].to_bits() == col
                    && extra.iter().zip(&ex).all(|(&e, &b)| k[e].to_bits() == b)
            })
        };
        for (norm, pick) in [("P", 0usize), ("V", 1), ("U", 2)] {
            let mut row = vec![fmt_h(n)];
            row.extend(ex.iter().map(|b| fmt_value(f64::from_bits(*b))));
            row.push(norm.into());
            for &c in &columns {
                row.push(match cell(c).and_then(|r| r.errors) {
                    Some(e) => fmt_sci([e.p, e.v, e.u][pick]),
                    None => String::new(),
                });
            }
            rows.push(row);
        }
    }
    Table { header, rows }
}

fn minres_table(results: &[BenchmarkResult], row_names: [&str; 2], col_label: impl Fn(f64) -> String) -> Table {
    let columns = distinct(results.iter().map(|r| minres_key(&r.point).1.to_bits()));
    let mut header = vec!["h".to_string(), row_names[0].into(), row_names[1].into()];
    for &c in &columns {
        let l = col_label(f64::from_bits(c));
        header.push(format!("{l} iters"));
        header.push(format!("{l} factor"));
    }
    let row_keys = distinct(results.iter().map(|r| {
        let (k, _) = minres_key(&r.point);
        (r.n_subdiv, k[0].to_bits(), k[1].to_bits())
    }));
    let mut rows = Vec::new();
    for (n, a, b) in row_keys {
        let mut row = vec![fmt_h(n), fmt_value(f64::from_bits(a)), fmt_value(f64::from_bits(b))];
        for &c in &columns {
            let hit = results.iter().find(|r| {
                let (k, col) = minres_key(&r.point);
                r.n_subdiv == n && k[0].to_bits() == a && k[1].to_bits() == b && col.to_bits() == c
            });
            match hit {
                Some(r) => {
                    row.push(r.iterations.to_string());
                    row.push(fmt_factor(r.factor));
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        rows.push(row);
    }
    Table { header, rows }
}

fn spectra_table(results: &[SpectraResult]) -> Table {
    let header = ["h", "networks", "lambda", "r_inv", "alpha_p", "kappa", "min_abs_eig", "max_abs_eig"]
        .map(String::from)
        .to_vec();
    let rows = results
        .iter()
        .map(|r| {
            let p = &r.point;
            vec![
                fmt_h(p.n_subdiv),
                p.networks.to_string(),
                fmt_value(p.lambda),
                fmt_value(p.r_inv),
                fmt_value(p.alpha_p),
                format!("{:.3E}", r.kappa),
                format!("{:.3E}", r.min_abs),
                format!("{:.3E}", r.max_abs),
            ]
        })
        .collect();
    Table { header, rows }
}

fn converge_table(results: &[BenchmarkResult]) -> Table {
    let header = ["h", "alpha_p", "lambda", "r_inv", "ratio_P", "ratio_V", "ratio_U"]
        .map(String::from)
        .to_vec();
    let mut ratios = convergence_ratios(results);
    // group by parameter point, coarse mesh first
    let order = distinct(ratios.iter().map(|(p, _, _)| {
        let (a, l, r) = biot(p);
        (a.to_bits(), l.to_bits(), r.to_bits())
    }));
    ratios.sort_by_key(|(p, n, _)| {
        let (a, l, r) = biot(p);
        let pos = order.iter().position(|k| *k == (a.to_bits(), l.to_bits(), r.to_bits()));
        (pos, *n)
    });
    let rows = ratios
        .iter()
        .map(|(p, n, q)| {
            let (a, l, r) = biot(p);
            vec![
                fmt_h(*n),
                fmt_value(a),
                fmt_value(l),
                fmt_value(r),
                format!("{:.2}", q[0]),
                format!("{:.2}", q[1]),
                format!("{:.2}", q[2]),
            ]
        })
        .collect();
    Table { header, rows }
}

fn scale_label(symbol: &'static str) -> impl Fn(f64) -> String {
    move |v| if v == 1.0 { symbol.to_string() } else { format!("{symbol}*{}", fmt_value(v)) }
}

/// Lays out results in the row/column order of the published tables.
pub fn build_table(results: &ExperimentResults) -> Table {
    match results {
        ExperimentResults::Errors { column, results } => errors_table(*column, results),
        ExperimentResults::BiotMinres(r) => minres_table(r, ["alpha_p", "lambda"], fmt_value),
        ExperimentResults::Barenblatt(r) => minres_table(r, ["beta", "K2_scale"], scale_label("K1")),
        ExperimentResults::FourNetwork(r) => minres_table(r, ["lambda_scale", "K_scale"], scale_label("K3")),
        ExperimentResults::Spectra(r) => spectra_table(r),
        ExperimentResults::Converge(r) => converge_table(r),
    }
}

pub fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).expect("in-memory write");
            for row in &table.rows {
                w.write_record(row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
        }
        OutputFormat::Markdown => {
            let line = |cells: &[String]| {
                let escaped: Vec<String> = cells.iter().map(|c| c.replace('|', "\\|")).collect();
                format!("| {} |\n", escaped.join(" | "))
            };
            let mut out = line(&table.header);
            out.push_str(&format!("|{}\n", "---|".repeat(table.header.len())));
            for row in &table.rows {
                out.push_str(&line(row));
            }
            out
        }
    }
}

pub fn emit_table(results: &ExperimentResults, format: OutputFormat) -> String {
    render(&build_table(results), format)
}
