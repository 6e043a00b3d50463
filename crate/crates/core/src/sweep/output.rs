use std::fmt::Write;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed float format for CSV cells: 17 significant digits, scientific.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_owned()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else {
        format!("{x:.16e}")
    }
}

pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(x) => fmt_f64(*x),
            Cell::Int(n) => n.to_string(),
            // keep cells single-field without a quoting layer
            Cell::Text(s) => s.replace([',', '\n', '\r'], ";"),
        }
    }
}

/// CSV document with a `#` comment block, a column header and rows.
/// Lines end in `\n`.
pub struct CsvTable {
    comments: Vec<String>,
    columns: Vec<(&'static str, &'static str)>,
    rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(command: &str, config_hash: &str, columns: Vec<(&'static str, &'static str)>) -> Self {
        let comments = vec![
            format!("scatter-entangle {VERSION}"),
            format!("command: {command}"),
            format!("config_sha256: {config_hash}"),
        ];
        Self { comments, columns, rows: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            writeln!(out, "# {c}").unwrap();
        }
        writeln!(out, "# columns:").unwrap();
        for (name, desc) in &self.columns {
            writeln!(out, "#   {name}: {desc}").unwrap();
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.0).collect();
        writeln!(out, "{}", header.join(",")).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}
