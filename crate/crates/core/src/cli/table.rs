//! KL-divergence tables: each analytic approximation against simulation on
//! the 0.01..0.99 reliability grid.

use super::grid::db_to_linear;
use crate::error::{Error, Result};
use crate::geometry::{ChannelModel, NetworkModel};
use crate::metadist::{meta_curve, CurveOptions, InterferenceMode, Method, ProposedOptions, QuadratureSpec};
use crate::simkit::{kl_divergence, simulate_meta_multi, KlConvention, SimulationConfig};
use serde::Serialize;
use std::f64::consts::PI;

pub const TABLE_THETAS_DB: [f64; 3] = [-10.0, 0.0, 12.0];

/// An analytic method compared against simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TableRowKind {
    /// `prop|exact`
    Proposed,
    /// `beta|exact`
    Beta,
    /// `prop(PPP)|exact`: the line-Cox model with planar interference.
    ProposedPppApprox,
    /// Thomas-type comparison; not implemented.
    Tppp,
}

impl TableRowKind {
    pub fn label(&self) -> &'static str {
        match self {
            TableRowKind::Proposed => "prop|exact",
            TableRowKind::Beta => "beta|exact",
            TableRowKind::ProposedPppApprox => "prop(PPP)|exact",
            TableRowKind::Tppp => "TPPP|exact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableColumn {
    pub label: String,
    pub model: NetworkModel,
    pub channel: ChannelModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub number: u8,
    pub title: &'static str,
    pub columns: Vec<TableColumn>,
    pub rows: Vec<TableRowKind>,
}

fn channel(alpha: f64) -> ChannelModel {
    ChannelModel { alpha, pt: 10.0, sigma2: 1e-9 }
}

pub fn table_spec(number: u8) -> Result<TableSpec> {
    let col = |label: String, model: NetworkModel, alpha: f64| TableColumn { label, model, channel: channel(alpha) };
    Ok(match number {
        1 => {
            let mut columns: Vec<_> = [2.5, 3.0, 3.5, 4.0]
                .iter()
                .map(|&a| col(format!("alpha={a},lambda=1"), NetworkModel::Ppp { lambda: 1.0 }, a))
                .collect();
            columns.extend(
                [0.1, 0.5, 5.0, 10.0]
                    .iter()
                    .map(|&l| col(format!("alpha=4,lambda={l}"), NetworkModel::Ppp { lambda: l }, 4.0)),
            );
            TableSpec { number, title: "PPP", columns, rows: vec![TableRowKind::Proposed, TableRowKind::Beta] }
        }
        2 => TableSpec {
            number,
            title: "Poisson bipolar, lambda=10",
            columns: [15, 30, 45, 60, 75, 100, 125, 150]
                .iter()
                .map(|&m| col(format!("R={m}m"), NetworkModel::Bipolar { lambda: 10.0, r: m as f64 / 1000.0 }, 4.0))
                .collect(),
            rows: vec![TableRowKind::Proposed, TableRowKind::Beta],
        },
        3 => TableSpec {
            number,
            title: "Matern cluster, lambda=1",
            columns: (0..7)
                .map(|i| {
                    let m = 100 + 50 * i;
                    col(format!("rc={m}m"), NetworkModel::Mcp { lambda: 1.0, rc: m as f64 / 1000.0 }, 4.0)
                })
                .collect(),
            rows: vec![TableRowKind::Proposed, TableRowKind::Beta],
        },
        4 => TableSpec {
            number,
            title: "Poisson line Cox",
            columns: vec![
                col("lambda_l=1.6/pi,lambda_p=1".into(), NetworkModel::Plcp { lambda_l: 1.6 / PI, lambda_p: 1.0 }, 4.0),
                col("lambda_l=8/pi,lambda_p=0.2".into(), NetworkModel::Plcp { lambda_l: 8.0 / PI, lambda_p: 0.2 }, 4.0),
            ],
            rows: vec![TableRowKind::Proposed, TableRowKind::ProposedPppApprox, TableRowKind::Tppp],
        },
        n => return Err(Error::domain(format!("no table {n}; choose 1-4"))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub column: String,
    pub row: TableRowKind,
    pub theta_db: f64,
    /// `None` for comparisons outside this crate's scope.
    pub value: Option<f64>,
}

/// KL entries of one column at the three table thresholds.
pub fn evaluate_column(
    col: &TableColumn,
    rows: &[TableRowKind],
    sim: &SimulationConfig,
    quad: &QuadratureSpec,
    convention: KlConvention,
) -> Result<Vec<TableEntry>> {
    let thetas: Vec<f64> = TABLE_THETAS_DB.iter().map(|&d| db_to_linear(d)).collect();
    let gammas = &sim.gamma_grid;
    let empirical = simulate_meta_multi(&col.model, &col.channel, &thetas, sim)?;
    let mut out = Vec::new();
    for &row in rows {
        let curve = match row {
            TableRowKind::Tppp => None,
            TableRowKind::Beta => Some(meta_curve(&col.model, &col.channel, Method::Beta, &thetas, gammas, quad, &CurveOptions::default())?),
            TableRowKind::Proposed | TableRowKind::ProposedPppApprox => {
                let interference = if row == TableRowKind::Proposed { InterferenceMode::Plcp } else { InterferenceMode::PppApprox };
                let opts = CurveOptions { proposed: ProposedOptions { interference, zero_mean_field: false }, ..Default::default() };
                Some(meta_curve(&col.model, &col.channel, Method::Proposed, &thetas, gammas, quad, &opts)?)
            }
        };
        for (i, &db) in TABLE_THETAS_DB.iter().enumerate() {
            let value = match &curve {
                None => None,
                Some(c) => {
                    let a = &c.values[i * gammas.len()..(i + 1) * gammas.len()];
                    Some(kl_divergence(a, &empirical[i].ccdf, convention)?)
                }
            };
            out.push(TableEntry { column: col.label.clone(), row, theta_db: db, value });
        }
    }
    Ok(out)
}

pub fn evaluate_table(spec: &TableSpec, sim: &SimulationConfig, quad: &QuadratureSpec, convention: KlConvention) -> Result<Vec<TableEntry>> {
    let mut out = Vec::new();
    for c in &spec.columns {
        out.extend(evaluate_column(c, &spec.rows, sim, quad, convention)?);
    }
    Ok(out)
}

fn cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "n/a (out of scope)".into(),
    }
}

/// Fixed-width text layout: one line per (row, θ), one column per setting.
pub fn format_table(spec: &TableSpec, entries: &[TableEntry]) -> String {
    let mut lines = vec![vec![format!("Table {} ({})", spec.number, spec.title)]];
    lines[0].extend(spec.columns.iter().map(|c| c.label.clone()));
    for &row in &spec.rows {
        for &db in &TABLE_THETAS_DB {
            let mut l = vec![format!("D_KL,{} (theta={db} dB)", row.label())];
            for c in &spec.columns {
                let e = entries.iter().find(|e| e.column == c.label && e.row == row && e.theta_db == db);
                l.push(e.map_or_else(|| "-".into(), |e| cell(e.value)));
            }
            lines.push(l);
        }
    }
    let ncol = lines[0].len();
    let widths: Vec<usize> = (0..ncol).map(|j| lines.iter().map(|l| l[j].chars().count()).max().unwrap_or(0)).collect();
    let mut s = String::new();
    for l in &lines {
        let cells: Vec<String> = l.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        s.push_str(cells.join("  ").trim_end());
        s.push('\n');
    }
    s
}

pub fn table_csv(spec: &TableSpec, entries: &[TableEntry]) -> String {
    let mut s = String::from("table,column,row,theta_db,value\n");
    for e in entries {
        let v = match e.value {
            Some(x) => format!("{x}"),
            None => "\"n/a (out of scope)\"".into(),
        };
        s.push_str(&format!("{},{},{},{},{v}\n", spec.number, e.column, e.row.label(), e.theta_db));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs() {
        assert_eq!(table_spec(1).unwrap().columns.len(), 8);
        assert_eq!(table_spec(2).unwrap().columns.len(), 8);
        assert_eq!(table_spec(3).unwrap().columns.len(), 7);
        let t4 = table_spec(4).unwrap();
        assert_eq!(t4.columns.len(), 2);
        assert!(t4.rows.contains(&TableRowKind::Tppp));
        assert!(table_spec(5).is_err());
        for n in 1..=4 {
            for c in table_spec(n).unwrap().columns {
                c.model.validate().unwrap();
                c.channel.validate().unwrap();
            }
        }
    }

    #[test]
    fn out_of_scope_cells_are_labelled() {
        let spec = table_spec(4).unwrap();
        let entries: Vec<TableEntry> = spec
            .columns
            .iter()
            .flat_map(|c| TABLE_THETAS_DB.map(|db| TableEntry { column: c.label.clone(), row: TableRowKind::Tppp, theta_db: db, value: None }))
            .collect();
        let text = format_table(&spec, &entries);
        assert_eq!(text.matches("n/a (out of scope)").count(), 6);
        assert!(table_csv(&spec, &entries).contains("TPPP|exact,-10,\"n/a (out of scope)\""));
    }
}
