//! Free-format MPS reading and writing.
//!
//! Sections: NAME, ROWS (N/L/G/E), COLUMNS with INTORG/INTEND markers, RHS,
//! optional RANGES, optional BOUNDS (UP, LO, FX, BV, MI, PL, UI, LI),
//! ENDATA. On ingestion every row is normalized to `>=` orientation
//! (equalities and ranged rows expand to two rows). Default variable
//! bounds are `[0, +inf)` for both continuous and integer columns; BV
//! implies `[0, 1]`.

use std::collections::HashMap;

use crate::model::{MilpModel, SparseRow};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowSense {
    Objective,
    Less,
    Greater,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Start,
    Name,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    End,
}

struct RawRow {
    name: String,
    sense: RowSense,
    entries: Vec<(usize, f64)>,
    rhs: f64,
    range: Option<f64>,
}

/// Parses free-format MPS text into a normalized model.
pub fn parse_mps(text: &str) -> Result<MilpModel> {
    let mut section = Section::Start;
    let mut name = String::new();

    let mut rows: Vec<RawRow> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut objective_row: Option<usize> = None;

    let mut col_names: Vec<String> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut objective: Vec<f64> = Vec::new();
    let mut integer: Vec<bool> = Vec::new();
    let mut lower: Vec<f64> = Vec::new();
    let mut upper: Vec<f64> = Vec::new();
    // upper bound explicitly set (distinguishes default +inf for integers)
    let mut in_integer_block = false;

    let parse_val = |tok: &str, line_no: usize| -> Result<f64> {
        tok.parse::<f64>()
            .map_err(|_| Error::parse(line_no, format!("bad numeric value '{tok}'")))
    };

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw_line.trim().is_empty() || raw_line.starts_with('*') {
            continue;
        }
        let is_header = !raw_line.starts_with(' ') && !raw_line.starts_with('\t');
        let tokens: Vec<&str> = raw_line.split_whitespace().collect();
        if is_header {
            section = match tokens[0] {
                "NAME" => {
                    if tokens.len() > 1 {
                        name = tokens[1].to_string();
                    }
                    Section::Name
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::End,
                other => {
                    return Err(Error::parse(line_no, format!("unknown section '{other}'")))
                }
            };
            if section == Section::End {
                break;
            }
            continue;
        }
        match section {
            Section::Start | Section::Name | Section::End => {
                return Err(Error::parse(line_no, "data line outside any section"));
            }
            Section::Rows => {
                if tokens.len() != 2 {
                    return Err(Error::parse(line_no, "ROWS line needs sense and name"));
                }
                let sense = match tokens[0] {
                    "N" => RowSense::Objective,
                    "L" => RowSense::Less,
                    "G" => RowSense::Greater,
                    "E" => RowSense::Equal,
                    s => return Err(Error::parse(line_no, format!("unknown row sense '{s}'"))),
                };
                let rname = tokens[1].to_string();
                if row_index.contains_key(&rname) {
                    return Err(Error::parse(line_no, format!("duplicate row name '{rname}'")));
                }
                if sense == RowSense::Objective {
                    if objective_row.is_some() {
                        return Err(Error::parse(line_no, "duplicate objective (N) row"));
                    }
                    objective_row = Some(rows.len());
                }
                row_index.insert(rname.clone(), rows.len());
                rows.push(RawRow {
                    name: rname,
                    sense,
                    entries: Vec::new(),
                    rhs: 0.0,
                    range: None,
                });
            }
            Section::Columns => {
                if tokens.len() >= 3 && tokens[1] == "'MARKER'" {
                    match tokens[2] {
                        "'INTORG'" => in_integer_block = true,
                        "'INTEND'" => in_integer_block = false,
                        m => {
                            return Err(Error::parse(line_no, format!("unknown marker '{m}'")))
                        }
                    }
                    continue;
                }
                if tokens.len() < 3 || tokens.len() % 2 == 0 {
                    return Err(Error::parse(line_no, "COLUMNS line needs column and row/value pairs"));
                }
                let cname = tokens[0];
                let j = *col_index.entry(cname.to_string()).or_insert_with(|| {
                    col_names.push(cname.to_string());
                    objective.push(0.0);
                    integer.push(false);
                    lower.push(0.0);
                    upper.push(f64::INFINITY);
                    col_names.len() - 1
                });
                if in_integer_block {
                    integer[j] = true;
                }
                for pair in tokens[1..].chunks(2) {
                    let r = *row_index
                        .get(pair[0])
                        .ok_or_else(|| Error::parse(line_no, format!("undeclared row '{}'", pair[0])))?;
                    let v = parse_val(pair[1], line_no)?;
                    rows[r].entries.push((j, v));
                }
            }
            Section::Rhs => {
                if tokens.len() < 3 || tokens.len() % 2 == 0 {
                    return Err(Error::parse(line_no, "RHS line needs set name and row/value pairs"));
                }
                for pair in tokens[1..].chunks(2) {
                    let r = *row_index
                        .get(pair[0])
                        .ok_or_else(|| Error::parse(line_no, format!("undeclared row '{}'", pair[0])))?;
                    rows[r].rhs = parse_val(pair[1], line_no)?;
                }
            }
            Section::Ranges => {
                if tokens.len() < 3 || tokens.len() % 2 == 0 {
                    return Err(Error::parse(line_no, "RANGES line needs set name and row/value pairs"));
                }
                for pair in tokens[1..].chunks(2) {
                    let r = *row_index
                        .get(pair[0])
                        .ok_or_else(|| Error::parse(line_no, format!("undeclared row '{}'", pair[0])))?;
                    if rows[r].sense == RowSense::Objective {
                        return Err(Error::parse(line_no, "RANGES entry on objective (N) row"));
                    }
                    rows[r].range = Some(parse_val(pair[1], line_no)?);
                }
            }
            Section::Bounds => {
                let kind = tokens[0];
                let needs_value = matches!(kind, "UP" | "LO" | "FX" | "UI" | "LI");
                let expected = if needs_value { 4 } else { 3 };
                if tokens.len() != expected {
                    return Err(Error::parse(line_no, format!("malformed {kind} bound line")));
                }
                let j = *col_index
                    .get(tokens[2])
                    .ok_or_else(|| Error::parse(line_no, format!("undeclared column '{}'", tokens[2])))?;
                match kind {
                    "UP" => upper[j] = parse_val(tokens[3], line_no)?,
                    "LO" => lower[j] = parse_val(tokens[3], line_no)?,
                    "FX" => {
                        let v = parse_val(tokens[3], line_no)?;
                        lower[j] = v;
                        upper[j] = v;
                    }
                    "BV" => {
                        integer[j] = true;
                        lower[j] = 0.0;
                        upper[j] = 1.0;
                    }
                    "MI" => lower[j] = f64::NEG_INFINITY,
                    "PL" => upper[j] = f64::INFINITY,
                    "UI" => {
                        integer[j] = true;
                        upper[j] = parse_val(tokens[3], line_no)?;
                    }
                    "LI" => {
                        integer[j] = true;
                        lower[j] = parse_val(tokens[3], line_no)?;
                    }
                    k => return Err(Error::parse(line_no, format!("unknown bound type '{k}'"))),
                }
            }
        }
    }

    let obj_row = objective_row
        .ok_or_else(|| Error::parse(0, "no objective (N) row declared"))?;
    for &(j, v) in &rows[obj_row].entries {
        objective[j] += v;
    }

    // Normalize every constraint row to >= orientation.
    let mut norm_rows = Vec::new();
    let mut norm_rhs = Vec::new();
    let mut norm_names = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        if i == obj_row {
            continue;
        }
        let sparse = SparseRow::new(row.entries.clone());
        let mut push = |r: SparseRow, b: f64, nm: String| {
            norm_rows.push(r);
            norm_rhs.push(b);
            norm_names.push(nm);
        };
        match row.sense {
            RowSense::Objective => unreachable!(),
            RowSense::Greater => {
                push(sparse.clone(), row.rhs, row.name.clone());
                if let Some(rg) = row.range {
                    // r <= ax <= r + |range|
                    push(sparse.scaled(-1.0), -(row.rhs + rg.abs()), format!("{}#rng", row.name));
                }
            }
            RowSense::Less => {
                push(sparse.scaled(-1.0), -row.rhs, row.name.clone());
                if let Some(rg) = row.range {
                    // r - |range| <= ax <= r
                    push(sparse.clone(), row.rhs - rg.abs(), format!("{}#rng", row.name));
                }
            }
            RowSense::Equal => {
                let (lo, hi) = match row.range {
                    None => (row.rhs, row.rhs),
                    Some(rg) if rg >= 0.0 => (row.rhs, row.rhs + rg),
                    Some(rg) => (row.rhs + rg, row.rhs),
                };
                push(sparse.clone(), lo, row.name.clone());
                push(sparse.scaled(-1.0), -hi, format!("{}#ub", row.name));
            }
        }
    }

    MilpModel::new(name, objective, norm_rows, norm_rhs, lower, upper, integer)
        .map_err(|e| match e {
            Error::Contract(msg) => Error::parse(0, format!("inconsistent model: {msg}")),
            other => other,
        })?
        .with_names(col_names, norm_names)
}

/// Writes a normalized model back out as free-format MPS (all rows G,
/// integrality via INTORG/INTEND markers).
pub fn write_mps(model: &MilpModel) -> String {
    let mut out = String::new();
    let push = |out: &mut String, s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    push(&mut out, format!("NAME {}", model.name));
    push(&mut out, "ROWS".to_string());
    push(&mut out, " N  obj".to_string());
    for rn in model.row_names() {
        push(&mut out, format!(" G  {rn}"));
    }
    push(&mut out, "COLUMNS".to_string());
    let mut marker_open = false;
    let mut marker_count = 0;
    for j in 0..model.num_vars() {
        if model.is_integer(j) != marker_open {
            marker_count += 1;
            let kind = if model.is_integer(j) { "'INTORG'" } else { "'INTEND'" };
            push(&mut out, format!("    M{marker_count}  'MARKER'  {kind}"));
            marker_open = model.is_integer(j);
        }
        let cname = &model.var_names()[j];
        let c = model.objective()[j];
        if c != 0.0 {
            push(&mut out, format!("    {cname}  obj  {c:.17}"));
        }
        for (i, row) in model.rows().iter().enumerate() {
            if let Ok(pos) = row.indices.binary_search(&j) {
                push(
                    &mut out,
                    format!("    {cname}  {}  {:.17}", model.row_names()[i], row.values[pos]),
                );
            }
        }
        // columns with no entries anywhere still need their name recorded
        if c == 0.0 && model.rows().iter().all(|r| r.indices.binary_search(&j).is_err()) {
            push(&mut out, format!("    {cname}  obj  0"));
        }
    }
    if marker_open {
        marker_count += 1;
        push(&mut out, format!("    M{marker_count}  'MARKER'  'INTEND'"));
    }
    push(&mut out, "RHS".to_string());
    for (i, &b) in model.rhs().iter().enumerate() {
        if b != 0.0 {
            push(&mut out, format!("    rhs  {}  {b:.17}", model.row_names()[i]));
        }
    }
    push(&mut out, "BOUNDS".to_string());
    for j in 0..model.num_vars() {
        let cname = &model.var_names()[j];
        let (l, u) = (model.lower()[j], model.upper()[j]);
        if l == u {
            push(&mut out, format!(" FX bnd  {cname}  {l:.17}"));
            continue;
        }
        if l == f64::NEG_INFINITY {
            push(&mut out, format!(" MI bnd  {cname}"));
        } else if l != 0.0 {
            push(&mut out, format!(" LO bnd  {cname}  {l:.17}"));
        }
        if u.is_finite() {
            push(&mut out, format!(" UP bnd  {cname}  {u:.17}"));
        }
    }
    push(&mut out, "ENDATA".to_string());
    out
}
