//! Free-format MPS export for cross-checking a model in other solvers.

use std::collections::HashSet;
use std::io::{self, Write};

use super::{MilpModel, Relation, VarKind, VariableIndex};

const OBJECTIVE_ROW: &str = "obj";

/// Writes `model` in free MPS. Column names come from `index` when given,
/// otherwise `x0, x1, ...`. The objective offset is written as the negated
/// right-hand side of the objective row, the convention most readers share.
pub fn write_mps(model: &MilpModel, index: Option<&VariableIndex>, mut out: impl Write) -> io::Result<()> {
    let col_names: Vec<String> = match index {
        Some(ix) => ix.keys().iter().map(|k| k.to_string()).collect(),
        None => (0..model.variables.len()).map(|i| format!("x{i}")).collect(),
    };
    let mut seen = HashSet::new();
    let row_names: Vec<String> = model
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let ok = !c.name.is_empty() && !c.name.contains(char::is_whitespace) && c.name != OBJECTIVE_ROW;
            if ok && seen.insert(c.name.clone()) {
                c.name.clone()
            } else {
                format!("r{i}")
            }
        })
        .collect();

    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.variables.len()];
    for (r, c) in model.constraints.iter().enumerate() {
        for &(v, coef) in &c.terms {
            columns[v.0].push((r, coef));
        }
    }

    writeln!(out, "NAME mgplan")?;
    writeln!(out, "ROWS")?;
    writeln!(out, " N {OBJECTIVE_ROW}")?;
    for (c, name) in model.constraints.iter().zip(&row_names) {
        let sense = match c.relation {
            Relation::Le => 'L',
            Relation::Eq => 'E',
            Relation::Ge => 'G',
        };
        writeln!(out, " {sense} {name}")?;
    }

    writeln!(out, "COLUMNS")?;
    let mut in_integer_block = false;
    for (i, v) in model.variables.iter().enumerate() {
        let binary = v.kind == VarKind::Binary;
        if binary != in_integer_block {
            let tag = if binary { "INTORG" } else { "INTEND" };
            writeln!(out, "    MARKER 'MARKER' '{tag}'")?;
            in_integer_block = binary;
        }
        let name = &col_names[i];
        writeln!(out, "    {name} {OBJECTIVE_ROW} {}", v.cost)?;
        for &(r, coef) in &columns[i] {
            writeln!(out, "    {name} {} {coef}", row_names[r])?;
        }
    }
    if in_integer_block {
        writeln!(out, "    MARKER 'MARKER' 'INTEND'")?;
    }

    writeln!(out, "RHS")?;
    if model.objective_offset != 0.0 {
        writeln!(out, "    RHS {OBJECTIVE_ROW} {}", -model.objective_offset)?;
    }
    for (c, name) in model.constraints.iter().zip(&row_names) {
        if c.rhs != 0.0 {
            writeln!(out, "    RHS {name} {}", c.rhs)?;
        }
    }

    writeln!(out, "BOUNDS")?;
    for (v, name) in model.variables.iter().zip(&col_names) {
        let (lo, up) = (v.lower, v.upper);
        if lo == up {
            writeln!(out, " FX BND {name} {lo}")?;
            continue;
        }
        match (lo.is_finite(), up.is_finite()) {
            (false, false) => writeln!(out, " FR BND {name}")?,
            (false, true) => {
                writeln!(out, " MI BND {name}")?;
                writeln!(out, " UP BND {name} {up}")?;
            }
            (true, false) => {
                if lo != 0.0 || v.kind == VarKind::Binary {
                    writeln!(out, " LO BND {name} {lo}")?;
                }
                writeln!(out, " PL BND {name}")?;
            }
            (true, true) => {
                writeln!(out, " LO BND {name} {lo}")?;
                writeln!(out, " UP BND {name} {up}")?;
            }
        }
    }
    writeln!(out, "ENDATA")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_sections_in_order() {
        let mut m = MilpModel::default();
        let x = m.add_variable(VarKind::Continuous, 0.0, f64::INFINITY);
        let y = m.add_variable(VarKind::Binary, 0.0, 1.0);
        m.add_cost(x, 1.5);
        m.objective_offset = 2.0;
        m.add_constraint("link", vec![(x, 1.0), (y, -3.0)], Relation::Le, 0.0);
        let mut buf = Vec::new();
        write_mps(&m, None, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let order = ["NAME", "ROWS", "COLUMNS", "INTORG", "INTEND", "RHS", "BOUNDS", "ENDATA"];
        let positions: Vec<usize> = order.iter().map(|s| text.find(s).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("RHS obj -2"));
        assert!(text.contains(" L link"));
        assert!(text.contains("x1 link -3"));
    }
}
