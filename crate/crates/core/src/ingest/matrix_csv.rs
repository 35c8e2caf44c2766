use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use super::IngestError;
use crate::graph::WeightedDigraph;

/// Reads a square weight matrix.
///
/// Layout: a header row holding an empty cell followed by the `n` vertex
/// labels, then `n` rows each holding the row label and `n` non-negative
/// numbers. Row `i`, column `j` is the flow from vertex `i` to vertex `j`.
/// Row labels must repeat the header labels in the same order.
pub fn parse_matrix_csv<R: Read>(input: R) -> Result<WeightedDigraph, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r?,
        None => return Err(IngestError::MalformedHeader("empty input".into())),
    };
    if header.get(0) != Some("") {
        return Err(IngestError::MalformedHeader(
            "first header cell must be empty".into(),
        ));
    }
    let labels: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    if labels.is_empty() {
        return Err(IngestError::MalformedHeader("no vertex labels".into()));
    }
    if let Some(k) = labels.iter().position(String::is_empty) {
        return Err(IngestError::MalformedHeader(format!(
            "label in column {} is empty",
            k + 1
        )));
    }
    let n = labels.len();

    let mut weights = DMatrix::<f64>::zeros(n, n);
    let mut rows = 0;
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        if record.len() != n + 1 {
            return Err(IngestError::RowLengthMismatch {
                line,
                expected: n + 1,
                found: record.len(),
            });
        }
        if rows >= n {
            return Err(IngestError::RowCountMismatch {
                expected: n,
                found: rows + 1,
            });
        }
        let label = &record[0];
        if label != labels[rows] {
            return Err(IngestError::LabelMismatch {
                line,
                expected: labels[rows].clone(),
                found: label.to_owned(),
            });
        }
        for (j, cell) in record.iter().skip(1).enumerate() {
            let value: f64 = match cell.parse() {
                Ok(v) if f64::is_finite(v) => v,
                _ => {
                    return Err(IngestError::NonNumericCell {
                        line,
                        column: j + 1,
                        cell: cell.to_owned(),
                    })
                }
            };
            if value < 0.0 {
                return Err(IngestError::NegativeWeight {
                    line,
                    column: j + 1,
                    value,
                });
            }
            weights[(rows, j)] = value;
        }
        rows += 1;
    }
    if rows != n {
        return Err(IngestError::RowCountMismatch {
            expected: n,
            found: rows,
        });
    }
    Ok(WeightedDigraph::from_parts(labels, weights)?)
}

pub fn read_matrix_csv<P: AsRef<Path>>(path: P) -> Result<WeightedDigraph, IngestError> {
    parse_matrix_csv(File::open(path)?)
}

/// Writes a graph in the layout read by [`parse_matrix_csv`]. Numbers use the
/// shortest representation that parses back to the same `f64`.
pub fn write_matrix_csv<W: Write>(g: &WeightedDigraph, out: W) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::new()];
    header.extend(g.labels().iter().cloned());
    w.write_record(&header)?;
    for (i, label) in g.labels().iter().enumerate() {
        let mut row = vec![label.clone()];
        row.extend((0..g.n()).map(|j| g.weight(i, j).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_two_cycle() {
        let g = parse_matrix_csv(",a,b\na,0,1\nb,1,0\n".as_bytes()).unwrap();
        assert_eq!(g.labels(), ["a", "b"]);
        assert_eq!(g.to_rows(), vec![vec![0., 1.], vec![1., 0.]]);
    }

    #[test]
    fn tolerates_spaces_quotes_and_blank_lines() {
        let g = parse_matrix_csv(" ,\"x,1\", y\n\"x,1\", 0.5 ,2e3\n\ny,0,1\n".as_bytes()).unwrap();
        assert_eq!(g.labels(), ["x,1", "y"]);
        assert_eq!(g.to_rows(), vec![vec![0.5, 2000.], vec![0., 1.]]);
    }

    #[test]
    fn header_errors() {
        for bad in ["", "a,b\n", ",\n", ",a,,b\n"] {
            assert!(
                matches!(
                    parse_matrix_csv(bad.as_bytes()),
                    Err(IngestError::MalformedHeader(_))
                ),
                "{bad:?}"
            );
        }
        assert!(matches!(
            parse_matrix_csv(",a,a\na,0,0\na,0,0\n".as_bytes()),
            Err(IngestError::Graph(_))
        ));
    }

    #[test]
    fn row_errors() {
        let short = parse_matrix_csv(",a,b\na,0\nb,1,0\n".as_bytes());
        assert!(matches!(
            short,
            Err(IngestError::RowLengthMismatch {
                line: 2,
                expected: 3,
                found: 2
            })
        ));
        let nan = parse_matrix_csv(",a,b\na,0,x\nb,1,0\n".as_bytes());
        assert!(matches!(
            nan,
            Err(IngestError::NonNumericCell { column: 2, .. })
        ));
        let inf = parse_matrix_csv(",a\na,inf\n".as_bytes());
        assert!(matches!(inf, Err(IngestError::NonNumericCell { .. })));
        let neg = parse_matrix_csv(",a,b\na,0,-1\nb,1,0\n".as_bytes());
        assert!(matches!(neg, Err(IngestError::NegativeWeight { value, .. }) if value == -1.0));
        let label = parse_matrix_csv(",a,b\nb,0,1\na,1,0\n".as_bytes());
        assert!(matches!(label, Err(IngestError::LabelMismatch { .. })));
        let missing = parse_matrix_csv(",a,b\na,0,1\n".as_bytes());
        assert!(matches!(
            missing,
            Err(IngestError::RowCountMismatch {
                expected: 2,
                found: 1
            })
        ));
        let extra = parse_matrix_csv(",a\na,1\na,1\n".as_bytes());
        assert!(matches!(extra, Err(IngestError::RowCountMismatch { .. })));
    }

    #[test]
    fn industry_sized_matrix() {
        use crate::ingest::IndustryTable;
        let codes: Vec<&str> = IndustryTable::codes().collect();
        let mut text = String::from(",") + &codes.join(",") + "\n";
        for (i, c) in codes.iter().enumerate() {
            let row: Vec<String> = (0..45).map(|j| ((i * 7 + j) % 5).to_string()).collect();
            text += &format!("{c},{}\n", row.join(","));
        }
        let g = parse_matrix_csv(text.as_bytes()).unwrap();
        assert_eq!(g.n(), 45);
        assert_eq!(g.labels()[5], "D10T12");
        // 44 values in one row
        let cut = text.replacen(",0\n", "\n", 1);
        assert!(matches!(
            parse_matrix_csv(cut.as_bytes()),
            Err(IngestError::RowLengthMismatch {
                expected: 46,
                found: 45,
                ..
            })
        ));
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(
            n in 1usize..6,
            raw in proptest::collection::vec(0.0f64..1e12, 36),
        ) {
            let rows: Vec<Vec<f64>> = (0..n).map(|i| raw[i * 6..i * 6 + n].to_vec()).collect();
            let g = WeightedDigraph::from_unlabeled(rows).unwrap();
            let mut buf = Vec::new();
            write_matrix_csv(&g, &mut buf).unwrap();
            let back = parse_matrix_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
