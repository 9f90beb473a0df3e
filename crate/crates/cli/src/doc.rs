//! Output documents with fixed field order and fixed-precision numbers.

/// A JSON value whose objects keep insertion order.
#[derive(Debug, Clone, PartialEq)]
pub enum Doc {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Doc>),
    Obj(Vec<(String, Doc)>),
}

impl Doc {
    pub fn obj() -> Self {
        Doc::Obj(Vec::new())
    }

    /// Builder-style field insertion; panics if `self` is not an object.
    pub fn with(mut self, key: &str, value: impl Into<Doc>) -> Self {
        match &mut self {
            Doc::Obj(fields) => fields.push((key.to_string(), value.into())),
            _ => panic!("with() on a non-object"),
        }
        self
    }

    pub fn render_json(&self, precision: usize) -> String {
        let mut out = String::new();
        self.write_json(&mut out, precision, 0);
        out.push('\n');
        out
    }

    fn write_json(&self, out: &mut String, precision: usize, indent: usize) {
        let pad = |n: usize| "  ".repeat(n);
        match self {
            Doc::Null => out.push_str("null"),
            Doc::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Doc::Int(i) => out.push_str(&i.to_string()),
            Doc::Num(x) => match fixed(*x, precision) {
                Some(s) => out.push_str(&s),
                None => out.push_str("null"),
            },
            Doc::Str(s) => out.push_str(&serde_json::to_string(s).expect("string serialisation")),
            Doc::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    item.write_json(out, precision, indent + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push(']');
            }
            Doc::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (k, v)) in fields.iter().enumerate() {
                    out.push_str(&pad(indent + 1));
                    out.push_str(&serde_json::to_string(k).expect("key serialisation"));
                    out.push_str(": ");
                    v.write_json(out, precision, indent + 1);
                    out.push_str(if i + 1 < fields.len() { ",\n" } else { "\n" });
                }
                out.push_str(&pad(indent));
                out.push('}');
            }
        }
    }
}

impl From<f64> for Doc {
    fn from(x: f64) -> Self {
        Doc::Num(x)
    }
}

impl From<bool> for Doc {
    fn from(b: bool) -> Self {
        Doc::Bool(b)
    }
}

impl From<usize> for Doc {
    fn from(i: usize) -> Self {
        Doc::Int(i as i64)
    }
}

impl From<&str> for Doc {
    fn from(s: &str) -> Self {
        Doc::Str(s.to_string())
    }
}

impl From<String> for Doc {
    fn from(s: String) -> Self {
        Doc::Str(s)
    }
}

impl<T: Into<Doc>> From<Option<T>> for Doc {
    fn from(v: Option<T>) -> Self {
        v.map_or(Doc::Null, Into::into)
    }
}

impl From<Vec<Doc>> for Doc {
    fn from(v: Vec<Doc>) -> Self {
        Doc::Arr(v)
    }
}

/// `x` with exactly `precision` decimals; `None` for non-finite values.
/// Negative zero prints as zero.
pub fn fixed(x: f64, precision: usize) -> Option<String> {
    if !x.is_finite() {
        return None;
    }
    let s = format!("{x:.precision$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        Some(s[1..].to_string())
    } else {
        Some(s)
    }
}

/// Comma-separated table with a mandatory header row.
#[derive(Debug, Clone)]
pub struct Csv {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl Csv {
    pub fn new(header: &[&'static str]) -> Self {
        Csv { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, cells: Vec<Cell>, precision: usize) {
        assert_eq!(cells.len(), self.header.len(), "row width");
        self.rows.push(
            cells
                .into_iter()
                .map(|c| match c {
                    Cell::Num(x) => fixed(x, precision).unwrap_or_default(),
                    Cell::Text(s) => s,
                    Cell::Empty => String::new(),
                })
                .collect(),
        );
    }

    pub fn render(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 input")
    }
}
