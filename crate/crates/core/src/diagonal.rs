//! Diagonalization over digit streams with a recursive digit.
//!
//! A matrix lists binary expansions of numbers in `[0, 1)`, one per row.
//! The anti-diagonal stream flips the `n`-th digit of the `n`-th row. When
//! the anti-diagonal is itself listed as row `m`, its `m`-th digit is defined
//! as the flip of itself: finding it requires finding it again. That digit is
//! `r`, and the rest of the stream is computed normally.

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Digit {
    Zero,
    One,
    R,
}

impl Digit {
    /// `1 - x`, with the recursive digit left in place.
    pub fn flip(self) -> Digit {
        match self {
            Digit::Zero => Digit::One,
            Digit::One => Digit::Zero,
            Digit::R => Digit::R,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Digit::Zero => '0',
            Digit::One => '1',
            Digit::R => 'r',
        }
    }

    pub fn from_char(c: char) -> Option<Digit> {
        match c {
            '0' => Some(Digit::Zero),
            '1' => Some(Digit::One),
            'r' => Some(Digit::R),
            _ => None,
        }
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DiagError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("row `{0}` is listed more than once")]
    DuplicateRow(String),
    #[error("a matrix may contain at most one anti-diagonal row")]
    MultipleAntidiagonals,
    #[error("no row named `{0}`")]
    UnknownRow(String),
    #[error("row {row} is out of range for a matrix of {rows} rows")]
    RowOutOfRange { row: usize, rows: usize },
    #[error("at least one digit must be rendered")]
    NoDigits,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowKind {
    /// Finitely many digits, continued with zeros.
    Explicit(Vec<Digit>),
    /// The anti-diagonal of the enclosing matrix.
    Antidiagonal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub kind: RowKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitMatrix {
    rows: Vec<Row>,
}

impl DigitMatrix {
    pub fn new(rows: Vec<Row>) -> Result<Self, DiagError> {
        let mut names = BTreeSet::new();
        for row in &rows {
            if !names.insert(row.name.as_str()) {
                return Err(DiagError::DuplicateRow(row.name.clone()));
            }
        }
        if rows.iter().filter(|r| r.kind == RowKind::Antidiagonal).count() > 1 {
            return Err(DiagError::MultipleAntidiagonals);
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row_index(&self, name: &str) -> Result<usize, DiagError> {
        self.rows
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| DiagError::UnknownRow(name.to_string()))
    }

    pub fn antidiagonal_index(&self) -> Option<usize> {
        self.rows.iter().position(|r| r.kind == RowKind::Antidiagonal)
    }

    /// Digit `col` of row `row`. Rows past the end of the matrix count as all
    /// zeros when the anti-diagonal reaches them.
    pub fn digit_at(&self, row: usize, col: usize) -> Result<Digit, DiagError> {
        let r = self.rows.get(row).ok_or(DiagError::RowOutOfRange {
            row,
            rows: self.rows.len(),
        })?;
        Ok(match &r.kind {
            RowKind::Explicit(digits) => digits.get(col).copied().unwrap_or(Digit::Zero),
            // the only self-reference possible with a single anti-diagonal row
            RowKind::Antidiagonal if col == row => Digit::R,
            RowKind::Antidiagonal if col >= self.rows.len() => Digit::Zero.flip(),
            RowKind::Antidiagonal => self.digit_at(col, col)?.flip(),
        })
    }

    /// The row as a numeral: `"0."` followed by its leading digits. `digits`
    /// counts every digit written, the integer `0` included, so `digits = 8`
    /// shows seven places after the point.
    pub fn render_stream(&self, row: usize, digits: usize) -> Result<String, DiagError> {
        if digits == 0 {
            return Err(DiagError::NoDigits);
        }
        let mut out = String::from("0.");
        for col in 0..digits - 1 {
            out.push(self.digit_at(row, col)?.as_char());
        }
        if digits == 1 {
            // validate the row even when no fractional digit is shown
            self.digit_at(row, 0)?;
        }
        Ok(out)
    }
}

/// Parses the line-oriented matrix format:
///
/// ```text
/// # comment
/// row a: 0110
/// row d: antidiagonal
/// ```
pub fn parse_matrix(text: &str) -> Result<DigitMatrix, DiagError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |message: String| DiagError::Syntax { line, message };
        let rest = content
            .strip_prefix("row")
            .filter(|r| r.starts_with(char::is_whitespace))
            .ok_or_else(|| syntax("expected `row <name>: <digits>`".into()))?;
        let (name, spec) = rest
            .split_once(':')
            .ok_or_else(|| syntax("expected `:` after the row name".into()))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(syntax(format!("invalid row name `{name}`")));
        }
        let spec = spec.trim();
        let kind = if spec == "antidiagonal" {
            RowKind::Antidiagonal
        } else {
            let digits = spec
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| Digit::from_char(c).ok_or_else(|| syntax(format!("`{c}` is not one of 0, 1, r"))))
                .collect::<Result<Vec<_>, _>>()?;
            RowKind::Explicit(digits)
        };
        rows.push(Row {
            name: name.to_string(),
            kind,
        });
    }
    DigitMatrix::new(rows)
}

/// Solves `x = update(x)` for a self-referential digit by climbing from `R`.
/// `update` is expected to be monotone (it maps `R` to `R` or to a digit it
/// then keeps); anything that never settles is left at `R`.
pub fn solve_reflexive(update: impl Fn(Digit) -> Digit) -> Digit {
    let mut x = Digit::R;
    for _ in 0..3 {
        let next = update(x);
        if next == x {
            return x;
        }
        x = next;
    }
    Digit::R
}

/// `x = 1 - x` over `{0, 1}`: the value is defined only through itself.
pub fn solve_reflexive_equation() -> Digit {
    solve_reflexive(Digit::flip)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Digit::*;

    fn explicit(name: &str, digits: &str) -> Row {
        Row {
            name: name.into(),
            kind: RowKind::Explicit(digits.chars().map(|c| Digit::from_char(c).unwrap()).collect()),
        }
    }

    fn anti(name: &str) -> Row {
        Row {
            name: name.into(),
            kind: RowKind::Antidiagonal,
        }
    }

    fn small() -> DigitMatrix {
        DigitMatrix::new(vec![explicit("a", "010"), explicit("b", "11"), anti("d")]).unwrap()
    }

    #[test]
    fn self_included_antidiagonal() {
        let m = small();
        assert_eq!(m.digit_at(2, 2), Ok(R));
        assert_eq!(m.digit_at(2, 0), Ok(One));
        assert_eq!(m.digit_at(2, 1), Ok(Zero));
        // beyond the listed rows the diagonal is zero, so the flip is one
        assert_eq!(m.digit_at(2, 3), Ok(One));
        assert_eq!(m.render_stream(2, 5), Ok("0.10r1".into()));
    }

    #[test]
    fn padding_and_errors() {
        let m = small();
        assert_eq!(m.digit_at(1, 7), Ok(Zero));
        assert_eq!(m.digit_at(3, 0), Err(DiagError::RowOutOfRange { row: 3, rows: 3 }));
        assert_eq!(m.render_stream(0, 0), Err(DiagError::NoDigits));
        assert_eq!(m.render_stream(5, 1), Err(DiagError::RowOutOfRange { row: 5, rows: 3 }));
        assert_eq!(m.render_stream(0, 1), Ok("0.".into()));
        let zero = DigitMatrix::new(vec![explicit("z", "")]).unwrap();
        assert_eq!(zero.render_stream(0, 4), Ok("0.000".into()));
    }

    #[test]
    fn numeral_counts_the_leading_zero() {
        let m = DigitMatrix::new(vec![explicit("x", "10r0110")]).unwrap();
        assert_eq!(m.render_stream(0, 7), Ok("0.10r011".into()));
        assert_eq!(m.render_stream(0, 8), Ok("0.10r0110".into()));
    }

    #[test]
    fn reflexive_equations() {
        assert_eq!(solve_reflexive_equation(), R);
        assert_eq!(solve_reflexive(|x| x), R);
        assert_eq!(solve_reflexive(|_| One), One);
        assert_eq!(R.flip(), R);
    }

    #[test]
    fn matrix_validation() {
        assert_eq!(
            DigitMatrix::new(vec![anti("a"), anti("b")]),
            Err(DiagError::MultipleAntidiagonals)
        );
        assert_eq!(
            DigitMatrix::new(vec![explicit("a", "1"), explicit("a", "0")]),
            Err(DiagError::DuplicateRow("a".into()))
        );
        assert_eq!(small().row_index("q"), Err(DiagError::UnknownRow("q".into())));
    }

    #[test]
    fn parses_matrix_text() {
        let m = parse_matrix("# demo\nrow a: 0 1 0\n\nrow b: 11   # trailing\nrow d: antidiagonal\n").unwrap();
        assert_eq!(m, small());
        assert_eq!(m.row_index("d"), Ok(2));
        assert!(matches!(
            parse_matrix("row a: 012"),
            Err(DiagError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_matrix("\nrows a: 0"),
            Err(DiagError::Syntax { line: 2, .. })
        ));
        assert!(matches!(parse_matrix("row a 0"), Err(DiagError::Syntax { .. })));
        assert!(matches!(parse_matrix("row : 0"), Err(DiagError::Syntax { .. })));
    }
}
