//! Rendering of the correlation matrix: a human table (weeks down, one
//! column group per centrality kind with the three trait fields) and flat
//! machine-readable rows.

use std::collections::BTreeSet;

use dinet_core::metrics::CentralityKind;
use dinet_core::stats::{TableCell, TraitField};

/// Human-readable matrix; rho printed with 3 decimals plus the star tier.
pub fn render_table(cells: &[TableCell], kinds: &[CentralityKind]) -> String {
    let weeks: BTreeSet<u32> = cells.iter().map(|c| c.week()).collect();
    let col_width = 12usize;
    let mut out = String::new();

    out.push_str(&format!("{:>4} |", "W"));
    for kind in kinds {
        for field in TraitField::ALL {
            out.push_str(&format!(
                "{:>width$}",
                format!("{}-{}", kind.short_name().to_uppercase(), field.name()),
                width = col_width
            ));
        }
        out.push_str(" |");
    }
    out.push('\n');
    let rule_len = 5 + kinds.len() * (col_width * TraitField::ALL.len() + 2);
    out.push_str(&"-".repeat(rule_len));
    out.push('\n');

    for week in weeks {
        out.push_str(&format!("{week:>4} |"));
        for kind in kinds {
            for field in TraitField::ALL {
                let cell = cells
                    .iter()
                    .find(|c| c.week() == week && c.kind() == *kind && c.field() == field);
                let text = match cell.and_then(|c| c.result()) {
                    Some(r) => format!("{:.3}{}", r.rho, r.stars),
                    None => "-".to_string(),
                };
                out.push_str(&format!("{text:>col_width$}"));
            }
            out.push_str(" |");
        }
        out.push('\n');
    }
    out.push_str("stars: * P<0.1, ** P<0.05, *** P<0.01; - undefined\n");
    out
}

/// Flat rows: kind,week,field,n,rho,p_value,stars (full precision).
pub fn render_csv(cells: &[TableCell]) -> String {
    let mut out = String::from("kind,week,field,n,rho,p_value,stars\n");
    for cell in cells {
        match cell.result() {
            Some(r) => out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.kind,
                r.week,
                r.field.name(),
                r.n,
                r.rho,
                r.p_value,
                r.stars
            )),
            None => out.push_str(&format!(
                "{},{},{},,,,\n",
                cell.kind(),
                cell.week(),
                cell.field().name()
            )),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use dinet_core::stats::CorrelationResult;

    #[test]
    fn table_renders_defined_and_undefined_cells() {
        let cells = vec![
            TableCell::Defined(CorrelationResult {
                kind: CentralityKind::Degree,
                week: 11,
                field: TraitField::F1,
                n: 30,
                rho: 0.169,
                p_value: 0.37,
                stars: "",
            }),
            TableCell::Undefined {
                kind: CentralityKind::Degree,
                week: 11,
                field: TraitField::DeltaF,
                n: 30,
                reason: dinet_core::stats::UndefinedReason::ConstantSeries,
            },
        ];
        let table = render_table(&cells, &[CentralityKind::Degree]);
        assert!(table.contains("0.169"));
        assert!(table.contains("DC-F1"));
        let csv = render_csv(&cells);
        assert!(csv.lines().count() == 3);
        assert!(csv.contains("dc,11,dF,,,,"));
    }
}
