use std::io::Write;

use super::IngestError;
use crate::graph::{VertexSet, WeightedDigraph};
use crate::influence::InfluenceReport;

const NODE_WIDTH: (f64, f64) = (0.3, 2.0);
const PEN_WIDTH: (f64, f64) = (0.5, 5.0);

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn lerp((lo, hi): (f64, f64), t: f64) -> f64 {
    lo + (hi - lo) * t
}

/// Dense rank of each value among the distinct values, scaled to `[0, 1]`.
/// A single distinct value maps to 1.
fn rank_fractions(values: &[f64]) -> Vec<f64> {
    let mut distinct: Vec<f64> = values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    let top = distinct.len().saturating_sub(1);
    values
        .iter()
        .map(|v| {
            if top == 0 {
                return 1.0;
            }
            let r = distinct
                .iter()
                .rposition(|d| *d <= *v + 1e-12 * v.abs().max(1.0))
                .unwrap_or(0);
            r as f64 / top as f64
        })
        .collect()
}

/// DOT rendering of the subgraph induced by `cluster`, with node width by
/// influence rank and pen width by arc weight. `report` must hold the
/// influences of the induced subgraph, in cluster order.
pub fn emit_dot<W: Write>(
    g: &WeightedDigraph,
    cluster: &VertexSet,
    report: &InfluenceReport,
    out: W,
) -> Result<(), IngestError> {
    emit_dot_named(g, cluster, report, "cyclicality", out)
}

pub fn emit_dot_named<W: Write>(
    g: &WeightedDigraph,
    cluster: &VertexSet,
    report: &InfluenceReport,
    name: &str,
    mut out: W,
) -> Result<(), IngestError> {
    let sub = g.restrict_to(cluster)?;
    let n = sub.n();
    if report.per_vertex.len() != n {
        return Err(IngestError::ReportMismatch {
            expected: n,
            found: report.per_vertex.len(),
        });
    }

    writeln!(out, "digraph {} {{", quote(name))?;
    writeln!(
        out,
        "  graph [label={}];",
        quote(&format!("cyclicality {:.6}", report.cyclicality))
    )?;
    writeln!(out, "  node [shape=circle, fixedsize=true];")?;
    let widths = rank_fractions(&report.per_vertex);
    for (i, label) in sub.labels().iter().enumerate() {
        writeln!(
            out,
            "  {} [width={:.3}, tooltip={}];",
            quote(label),
            lerp(NODE_WIDTH, widths[i]),
            quote(&format!("{:.6}", report.per_vertex[i]))
        )?;
    }

    let arcs: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| sub.has_arc(i, j))
        .map(|(i, j)| (i, j, sub.weight(i, j)))
        .collect();
    let (wmin, wmax) = arcs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), a| {
        (lo.min(a.2), hi.max(a.2))
    });
    for (i, j, w) in arcs {
        let t = if wmax > wmin {
            (w - wmin) / (wmax - wmin)
        } else {
            1.0
        };
        writeln!(
            out,
            "  {} -> {} [penwidth={:.3}, label={}];",
            quote(&sub.labels()[i]),
            quote(&sub.labels()[j]),
            lerp(PEN_WIDTH, t),
            quote(&format!("{w}"))
        )?;
    }
    writeln!(out, "}}")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::influence::influence_vector;
    use crate::spectral::SpectralOptions;

    fn render(g: &WeightedDigraph) -> String {
        let all = VertexSet::full(g.n());
        let report = influence_vector(g, &SpectralOptions::default()).unwrap();
        let mut buf = Vec::new();
        emit_dot(g, &all, &report, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn symmetric_cycle() {
        let g = WeightedDigraph::from_weight_matrix(
            vec!["a", "b", "c"],
            vec![vec![0., 1., 0.], vec![0., 0., 1.], vec![1., 0., 0.]],
        )
        .unwrap();
        let text = render(&g);
        assert_eq!(text.matches("[width=2.000").count(), 3);
        assert_eq!(text.matches("penwidth=5.000").count(), 3);
        assert!(text.contains("\"c\" -> \"a\""));
        assert_eq!(text, render(&g));
    }

    #[test]
    fn loops_get_rank_extremes() {
        let g =
            WeightedDigraph::from_weight_matrix(vec!["p", "q"], vec![vec![2., 0.], vec![0., 1.]])
                .unwrap();
        let text = render(&g);
        assert!(text.contains("\"p\" [width=2.000"));
        assert!(text.contains("\"q\" [width=0.300"));
        assert!(text.contains("\"p\" -> \"p\" [penwidth=5.000"));
        assert!(text.contains("\"q\" -> \"q\" [penwidth=0.500"));
    }

    #[test]
    fn labels_are_escaped() {
        let g = WeightedDigraph::from_weight_matrix(vec!["a\"b"], vec![vec![1.]]).unwrap();
        assert!(render(&g).contains("\"a\\\"b\""));
    }

    #[test]
    fn report_must_match_cluster() {
        let g = WeightedDigraph::from_unlabeled(vec![vec![1.0; 3]; 3]).unwrap();
        let report = influence_vector(&g, &SpectralOptions::default()).unwrap();
        let err = emit_dot(&g, &VertexSet::new([0, 1]), &report, Vec::new()).unwrap_err();
        assert!(matches!(
            err,
            IngestError::ReportMismatch {
                expected: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn rank_fraction_values() {
        assert_eq!(
            rank_fractions(&[0.5, 0.0, 0.25, 0.5]),
            vec![1.0, 0.0, 0.5, 1.0]
        );
        assert_eq!(rank_fractions(&[0.3, 0.3]), vec![1.0, 1.0]);
    }
}
