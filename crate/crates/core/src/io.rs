//! Plain CSV output with fixed 12-significant-digit number formatting.

use std::io::{self, Write};

/// `x` rounded to 12 significant digits, printed in its shortest form.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("float round-trips through its own formatting");
    // normalize -0
    format!("{}", rounded + 0.0)
}

pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Self {
            out,
            columns: header.len(),
        })
    }

    pub fn row(&mut self, values: &[f64]) -> io::Result<()> {
        debug_assert_eq!(values.len(), self.columns);
        let line: Vec<String> = values.iter().map(|v| format_number(*v)).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    /// A row whose leading columns are text.
    pub fn mixed_row(&mut self, text: &[&str], values: &[f64]) -> io::Result<()> {
        debug_assert_eq!(text.len() + values.len(), self.columns);
        let mut line: Vec<String> = text.iter().map(|s| s.to_string()).collect();
        line.extend(values.iter().map(|v| format_number(*v)));
        writeln!(self.out, "{}", line.join(","))
    }

    /// A row of preformatted fields.
    pub fn text_row<S: AsRef<str>>(&mut self, fields: &[S]) -> io::Result<()> {
        debug_assert_eq!(fields.len(), self.columns);
        let line: Vec<&str> = fields.iter().map(|f| f.as_ref()).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(format_number(0.1), "0.1");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(std::f64::consts::PI * 1e10), "31415926535.9");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(format_number(1.234e-20), "0.00000000000000000001234");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn writes_header_and_rows() {
        let mut buf = Vec::new();
        {
            let mut w = CsvWriter::new(&mut buf, &["a", "b"]).unwrap();
            w.row(&[1.0, 0.5]).unwrap();
            w.mixed_row(&["x"], &[2.0]).unwrap();
        }
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0.5\nx,2\n");
    }
}
