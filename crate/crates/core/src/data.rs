//! Numeric CSV datasets, model formulas, and the vendored example data.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const READING_SKILLS: &str = include_str!("../data/reading_skills.csv");

/// Rectangular table of named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn new(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::Data(format!("{} names for {} columns", names.len(), columns.len())));
        }
        if let Some(c) = columns.first() {
            if columns.iter().any(|d| d.len() != c.len()) {
                return Err(Error::Data("columns have different lengths".into()));
            }
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Data(format!("duplicate column `{a}`")));
            }
        }
        Ok(Self { names, columns })
    }

    /// Comma-separated with a mandatory header; every cell must parse as a
    /// finite number.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let names: Vec<String> =
            rdr.headers().map_err(|e| Error::Data(e.to_string()))?.iter().map(str::to_owned).collect();
        if names.is_empty() || names.iter().any(String::is_empty) {
            return Err(Error::Data("header row is missing or has empty names".into()));
        }
        let mut columns = vec![Vec::new(); names.len()];
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Data(e.to_string()))?;
            for (j, cell) in rec.iter().enumerate() {
                let v: f64 = cell.parse().map_err(|_| {
                    Error::Data(format!("row {}, column `{}`: `{cell}` is not a number", row + 1, names[j]))
                })?;
                if !v.is_finite() {
                    return Err(Error::Data(format!(
                        "row {}, column `{}`: missing or non-finite value",
                        row + 1,
                        names[j]
                    )));
                }
                columns[j].push(v);
            }
        }
        Self::new(names, columns)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let f = std::fs::File::open(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
        Self::from_reader(f)
    }

    /// Writes with the shortest representation that round-trips exactly.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(&self.names).map_err(|e| Error::Data(e.to_string()))?;
        for i in 0..self.nrows() {
            wtr.write_record(self.columns.iter().map(|c| c[i].to_string())).map_err(|e| Error::Data(e.to_string()))?;
        }
        wtr.flush().map_err(|e| Error::Data(e.to_string()))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn nrows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|j| self.columns[j].as_slice())
            .ok_or_else(|| Error::Data(format!("no column named `{name}`")))
    }

    /// The 44-row reading accuracy data.
    pub fn reading_skills() -> Self {
        Self::from_reader(READING_SKILLS.as_bytes()).expect("vendored data parses")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Intercept,
    Column(String),
}

/// `response ~ term + term ...` or `~ term + ...`. The intercept is always
/// included; a lone `1` gives the intercept-only model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    pub response: Option<String>,
    pub terms: Vec<Term>,
}

impl Formula {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { chars: src.char_indices().collect(), pos: 0, len: src.len() };
        p.skip_ws();
        let response = if p.peek() == Some('~') { None } else { Some(p.ident()?) };
        p.skip_ws();
        p.expect('~')?;
        let mut terms = vec![Term::Intercept];
        loop {
            p.skip_ws();
            let t = if p.peek() == Some('1') {
                let at = p.offset();
                p.pos += 1;
                if p.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
                    return Err(Error::Parse { position: at, message: "expected `1` or a column name".into() });
                }
                Term::Intercept
            } else {
                Term::Column(p.ident()?)
            };
            if !terms.contains(&t) {
                terms.push(t);
            }
            p.skip_ws();
            match p.peek() {
                None => break,
                Some('+') => p.pos += 1,
                Some(c) => {
                    return Err(Error::Parse {
                        position: p.offset(),
                        message: format!("unexpected `{c}`; expected `+`"),
                    })
                }
            }
        }
        Ok(Self { response, terms })
    }

    /// Design matrix and column names; the intercept column comes first.
    pub fn design(&self, data: &Dataset) -> Result<(DMatrix<f64>, Vec<String>)> {
        let n = data.nrows();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        let mut names = Vec::new();
        for t in &self.terms {
            match t {
                Term::Intercept => {
                    cols.push(vec![1.0; n]);
                    names.push("(Intercept)".to_string());
                }
                Term::Column(c) => {
                    cols.push(data.column(c)?.to_vec());
                    names.push(c.clone());
                }
            }
        }
        Ok((DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]), names))
    }

    pub fn response<'d>(&self, data: &'d Dataset) -> Result<&'d [f64]> {
        let name = self.response.as_deref().ok_or_else(|| Error::Config("formula has no response".into()))?;
        data.column(name)
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |c| c.0)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => {
                Err(Error::Parse { position: self.offset(), message: format!("expected `{want}`, found `{c}`") })
            }
            None => Err(Error::Parse { position: self.offset(), message: format!("expected `{want}`") }),
        }
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '.' => self.pos += 1,
            Some(c) => {
                return Err(Error::Parse {
                    position: self.offset(),
                    message: format!("expected a column name, found `{c}`"),
                })
            }
            None => return Err(Error::Parse { position: self.offset(), message: "expected a column name".into() }),
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
            self.pos += 1;
        }
        Ok(self.chars[start..self.pos].iter().map(|c| c.1).collect())
    }
}
