//! Perron root and Perron vectors of non-negative matrices.
//!
//! The radius of a general non-negative matrix is the largest radius over its
//! irreducible diagonal blocks (its strongly connected components). Each block
//! of size three or more is solved by power iteration on `B + σI`; the shift
//! makes every irreducible block primitive and moves all eigenvalues by the
//! same amount. Convergence is measured on the Collatz-Wielandt bracket
//!
//! ```text
//! min_i (Bx)_i / x_i  <=  ρ(B)  <=  max_i (Bx)_i / x_i      (x > 0)
//! ```
//!
//! so a converged result is certified to the requested relative tolerance.
//! When the power phase stalls (small spectral gap), the remaining iterations
//! switch to Noda's shifted inverse iteration, which keeps the iterate
//! positive and converges superlinearly.

use nalgebra::{DMatrix, DVector};

use crate::graph::WeightedDigraph;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectralError {
    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },
    #[error("matrix is not irreducible")]
    NotIrreducible,
    #[error("trace of W^{power} is not representable")]
    Overflow { power: usize },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("matrix power must be at least 1")]
    InvalidPower,
}

/// Solver settings shared by every radius computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    /// Relative width of the Collatz-Wielandt bracket at which to stop.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl SpectralOptions {
    pub fn with_tol(tol: f64) -> Self {
        SpectralOptions {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<(), SpectralError> {
        if self.tol > 0.0 && self.tol.is_finite() {
            Ok(())
        } else {
            Err(SpectralError::InvalidTolerance(self.tol))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResult {
    pub radius: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final relative bracket width; zero for closed forms.
    pub residual: f64,
}

impl SpectralResult {
    fn exact(radius: f64) -> Self {
        SpectralResult {
            radius,
            iterations: 0,
            converged: true,
            residual: 0.0,
        }
    }
}

/// Normalized Perron vectors of an irreducible matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PerronPair {
    pub radius: f64,
    /// Positive right eigenvector with entries summing to one.
    pub right: Vec<f64>,
    /// Positive left eigenvector scaled so that `left · right = 1`.
    pub left: Vec<f64>,
}

/// Min/max of a family of sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumBounds {
    pub min: f64,
    pub max: f64,
}

pub fn row_sum_bounds(g: &WeightedDigraph) -> SumBounds {
    sum_bounds(g.weights().row_iter().map(|r| r.sum()))
}

pub fn column_sum_bounds(g: &WeightedDigraph) -> SumBounds {
    sum_bounds(g.weights().column_iter().map(|c| c.sum()))
}

fn sum_bounds(sums: impl Iterator<Item = f64>) -> SumBounds {
    sums.fold(
        SumBounds {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        },
        |b, s| SumBounds {
            min: b.min.min(s),
            max: b.max.max(s),
        },
    )
}

/// Largest eigenvalue of `[[a, b], [c, d]]` for non-negative entries.
pub fn spectral_radius_2x2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let k = pow2_scale(a.max(b).max(c).max(d));
    let (a, b, c, d) = (a / k, b / k, c / k, d / k);
    0.5 * (a + d + ((a - d) * (a - d) + 4.0 * b * c).sqrt()) * k
}

/// Power of two near `m`, used to rescale closed forms without rounding.
pub(crate) fn pow2_scale(m: f64) -> f64 {
    if m > 0.0 && m.is_finite() {
        m.log2().floor().exp2()
    } else {
        1.0
    }
}

/// `ρ(W)` of the graph's weight matrix.
pub fn spectral_radius(
    g: &WeightedDigraph,
    opts: &SpectralOptions,
) -> Result<SpectralResult, SpectralError> {
    opts.validate()?;
    let w = g.weights();
    match g.n() {
        0 => return Ok(SpectralResult::exact(0.0)),
        1 => return Ok(SpectralResult::exact(w[(0, 0)])),
        2 => {
            return Ok(SpectralResult::exact(spectral_radius_2x2(
                w[(0, 0)],
                w[(0, 1)],
                w[(1, 0)],
                w[(1, 1)],
            )))
        }
        _ => {}
    }

    let comps = g.strongly_connected_components();
    if comps.len() == 1 {
        let (radius, _, iterations, residual) = iterate_block(w, opts)?;
        return Ok(SpectralResult {
            radius,
            iterations,
            converged: true,
            residual,
        });
    }

    let mut out = SpectralResult::exact(0.0);
    for comp in comps {
        let idx = comp.indices();
        let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| w[(idx[a], idx[b])]);
        let (radius, iterations, residual) = match idx.len() {
            1 => (block[(0, 0)], 0, 0.0),
            2 => (
                spectral_radius_2x2(block[(0, 0)], block[(0, 1)], block[(1, 0)], block[(1, 1)]),
                0,
                0.0,
            ),
            _ => {
                let budget = SpectralOptions {
                    max_iter: opts.max_iter.saturating_sub(out.iterations),
                    ..*opts
                };
                let (r, _, it, res) = iterate_block(&block, &budget)?;
                (r, it, res)
            }
        };
        out.radius = out.radius.max(radius);
        out.iterations += iterations;
        out.residual = out.residual.max(residual);
    }
    Ok(out)
}

/// Right and left Perron vectors of an irreducible graph.
pub fn perron_vectors(
    g: &WeightedDigraph,
    opts: &SpectralOptions,
) -> Result<PerronPair, SpectralError> {
    opts.validate()?;
    if !g.is_irreducible() {
        return Err(SpectralError::NotIrreducible);
    }
    let w = g.weights();
    if g.n() == 1 {
        return Ok(PerronPair {
            radius: w[(0, 0)],
            right: vec![1.0],
            left: vec![1.0],
        });
    }
    let (radius, right, _, _) = iterate_block(w, opts)?;
    let (_, left, _, _) = iterate_block(&w.transpose(), opts)?;
    let right = &right / right.sum();
    let left = &left / left.dot(&right);
    Ok(PerronPair {
        radius,
        right: right.iter().copied().collect(),
        left: left.iter().copied().collect(),
    })
}

/// `(Tr(W^m))^(1/m)`, computed with per-step rescaling so that intermediate
/// powers never overflow.
pub fn trace_radius_estimate(g: &WeightedDigraph, m: usize) -> Result<f64, SpectralError> {
    if m == 0 {
        return Err(SpectralError::InvalidPower);
    }
    let n = g.n();
    if n == 0 {
        return Ok(0.0);
    }
    let w = g.weights();
    let mut p = DMatrix::<f64>::identity(n, n);
    let mut log_scale = 0.0;
    for _ in 0..m {
        p = &p * w;
        let s = p.amax();
        if !s.is_finite() {
            return Err(SpectralError::Overflow { power: m });
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        p /= s;
        log_scale += s.ln();
    }
    let t = p.trace();
    if t == 0.0 {
        return Ok(0.0);
    }
    let est = ((t.ln() + log_scale) / m as f64).exp();
    if est.is_finite() {
        Ok(est)
    } else {
        Err(SpectralError::Overflow { power: m })
    }
}

/// Iterations of plain shifted power iteration before switching to Noda steps.
fn power_phase_len(n: usize) -> usize {
    200 + 20 * n
}

struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    fn of(b: &DMatrix<f64>, x: &DVector<f64>) -> (Bracket, DVector<f64>) {
        let y = b * x;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for (yi, xi) in y.iter().zip(x.iter()) {
            let r = yi / xi;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        (Bracket { lo, hi }, y)
    }

    fn width(&self) -> f64 {
        if self.hi > 0.0 && self.lo.is_finite() {
            (self.hi - self.lo) / self.hi
        } else {
            f64::INFINITY
        }
    }

    fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Perron root and (unnormalized) positive eigenvector of an irreducible
/// block with at least two vertices.
fn iterate_block(
    b: &DMatrix<f64>,
    opts: &SpectralOptions,
) -> Result<(f64, DVector<f64>, usize, f64), SpectralError> {
    let n = b.nrows();
    let max_diag = b.diagonal().max();
    let mean_row_sum = b.sum() / n as f64;
    let shift = max_diag + mean_row_sum;

    let mut x = DVector::from_element(n, 1.0 / n as f64);
    let mut iterations = 0;
    let mut noda = false;

    loop {
        let (bracket, y) = Bracket::of(b, &x);
        let residual = bracket.width();
        if residual <= opts.tol {
            return Ok((bracket.mid(), x, iterations, residual));
        }
        if iterations >= opts.max_iter {
            return Err(SpectralError::NotConverged {
                iterations,
                residual,
            });
        }
        iterations += 1;

        if !noda && iterations > power_phase_len(n) {
            noda = true;
        }
        if noda {
            if let Some(next) = noda_step(b, &x, bracket.hi) {
                x = next;
                continue;
            }
            // positivity lost to rounding; finish with power steps
            noda = false;
        }
        let mut next = y + &x * shift;
        let s = next.sum();
        next /= s;
        x = next;
    }
}

/// Solves `(μI - B) z = x` with `μ` the current upper bound; for irreducible
/// `B` and `μ > ρ(B)` the solution is strictly positive.
fn noda_step(b: &DMatrix<f64>, x: &DVector<f64>, mu: f64) -> Option<DVector<f64>> {
    let n = b.nrows();
    let a = DMatrix::identity(n, n) * mu - b;
    let z = a.lu().solve(x)?;
    if z.iter().all(|&v| v > 0.0 && v.is_finite()) {
        let s = z.sum();
        Some(z / s)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: Vec<Vec<f64>>) -> WeightedDigraph {
        WeightedDigraph::from_unlabeled(m).unwrap()
    }

    fn rho(m: Vec<Vec<f64>>) -> f64 {
        spectral_radius(&g(m), &SpectralOptions::default())
            .unwrap()
            .radius
    }

    fn cycle(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if j == (i + 1) % n { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn radius_examples() {
        assert!((rho(cycle(3)) - 1.0).abs() < 1e-12);
        assert!((rho(vec![vec![1.0; 3]; 3]) - 3.0).abs() < 1e-12);
        assert_eq!(rho(vec![vec![0., 2.], vec![8., 0.]]), 4.0);
        assert_eq!(
            rho(vec![vec![0., 1., 0.], vec![0., 0., 1.], vec![0., 0., 0.]]),
            0.0
        );
        assert_eq!(rho(vec![]), 0.0);
        assert_eq!(rho(vec![vec![7.]]), 7.0);
    }

    #[test]
    fn closed_form_2x2() {
        assert_eq!(spectral_radius_2x2(0., 1., 1., 0.), 1.0);
        assert_eq!(spectral_radius_2x2(2., 0., 0., 1.), 2.0);
        assert_eq!(spectral_radius_2x2(1., 1., 1., 1.), 2.0);
    }

    #[test]
    fn long_cycle_converges() {
        // period-40 matrix: power iteration without shift would oscillate
        let r = spectral_radius(&g(cycle(40)), &SpectralOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.radius - 1.0).abs() < 1e-11);
    }

    #[test]
    fn weak_coupling_uses_noda_phase() {
        // two 3-cycles of radius 1 and 1-1e-7 joined by tiny arcs in both directions
        let mut m = vec![vec![0.0; 6]; 6];
        m[0][1] = 1.0;
        m[1][2] = 1.0;
        m[2][0] = 1.0;
        let w = (1.0f64 - 1e-7).powi(3);
        m[3][4] = w;
        m[4][5] = 1.0;
        m[5][3] = 1.0;
        m[0][3] = 1e-9;
        m[3][0] = 1e-9;
        let r = spectral_radius(&g(m), &SpectralOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.residual <= 1e-12);
        assert!(r.iterations < 10_000, "iterations {}", r.iterations);
        assert!((r.radius - 1.0).abs() < 1e-8);
    }

    #[test]
    fn not_converged_is_reported() {
        let m = vec![vec![1., 2., 0.], vec![0., 1., 3.], vec![4., 0., 1.5]];
        let opts = SpectralOptions {
            tol: 1e-15,
            max_iter: 1,
        };
        assert!(matches!(
            spectral_radius(&g(m), &opts),
            Err(SpectralError::NotConverged { iterations: 1, .. })
        ));
    }

    #[test]
    fn invalid_tolerance() {
        let opts = SpectralOptions::with_tol(0.0);
        assert_eq!(
            spectral_radius(&g(cycle(3)), &opts),
            Err(SpectralError::InvalidTolerance(0.0))
        );
    }

    #[test]
    fn reducible_takes_max_block() {
        // 3-cycle scaled by 2 feeding into a loop of weight 1.5
        let m = vec![
            vec![0., 2., 0., 1.],
            vec![0., 0., 2., 0.],
            vec![2., 0., 0., 0.],
            vec![0., 0., 0., 1.5],
        ];
        assert!((rho(m) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn perron_vector_examples() {
        let opts = SpectralOptions::default();
        let p = perron_vectors(&g(cycle(3)), &opts).unwrap();
        for v in &p.right {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
        let p = perron_vectors(&g(vec![vec![1.0; 2]; 2]), &opts).unwrap();
        for (r, l) in p.right.iter().zip(&p.left) {
            assert!((r - 0.5).abs() < 1e-12);
            assert!((l - 1.0).abs() < 1e-12);
        }
        assert_eq!(
            perron_vectors(
                &g(vec![vec![0., 1., 0.], vec![0., 0., 1.], vec![0., 0., 0.]]),
                &opts
            ),
            Err(SpectralError::NotIrreducible)
        );
        let p = perron_vectors(&g(vec![vec![3.]]), &opts).unwrap();
        assert_eq!(
            (p.radius, p.right.clone(), p.left.clone()),
            (3.0, vec![1.0], vec![1.0])
        );
    }

    #[test]
    fn sum_bounds_of_chain() {
        let gr = g(vec![vec![0., 1., 0.], vec![0., 0., 1.], vec![0., 0., 0.]]);
        assert_eq!(row_sum_bounds(&gr), SumBounds { min: 0.0, max: 1.0 });
        assert_eq!(column_sum_bounds(&gr), SumBounds { min: 0.0, max: 1.0 });
    }

    // Oracle for the trace estimate: naive unscaled matrix powers.
    fn naive_trace_root(m: &[Vec<f64>], k: usize) -> f64 {
        let n = m.len();
        let mut p: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for _ in 0..k {
            p = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|l| p[i][l] * m[l][j]).sum())
                        .collect()
                })
                .collect();
        }
        let t: f64 = (0..n).map(|i| p[i][i]).sum();
        t.powf(1.0 / k as f64)
    }

    #[test]
    fn trace_estimate_examples() {
        let ones = vec![vec![1.0; 3]; 3];
        // Tr(J^5) = 3^5, so the estimate is exactly 3
        assert!((naive_trace_root(&ones, 5) - 3.0).abs() < 1e-12);
        assert!((trace_radius_estimate(&g(ones), 5).unwrap() - 3.0).abs() < 1e-12);

        let c = cycle(3);
        assert!(
            (trace_radius_estimate(&g(c.clone()), 3).unwrap() - 3f64.powf(1.0 / 3.0)).abs() < 1e-12
        );
        assert!((trace_radius_estimate(&g(c.clone()), 3).unwrap() - 1.44225).abs() < 1e-5);
        let e300 = trace_radius_estimate(&g(c.clone()), 300).unwrap();
        assert!((e300 - naive_trace_root(&c, 300)).abs() < 1e-12);
        assert!((e300 - 1.0037).abs() < 1e-4);
        assert_eq!(trace_radius_estimate(&g(c), 4).unwrap(), 0.0);

        let d = vec![vec![2., 0.], vec![0., 1.]];
        let e = trace_radius_estimate(&g(d.clone()), 20).unwrap();
        assert!((e - naive_trace_root(&d, 20)).abs() < 1e-12);
        assert!((e - 2.0).abs() < 1e-4);

        assert_eq!(
            trace_radius_estimate(&g(cycle(3)), 0),
            Err(SpectralError::InvalidPower)
        );
    }

    #[test]
    fn trace_estimate_handles_large_powers_without_overflow() {
        let big = vec![vec![1e30; 3]; 3];
        let e = trace_radius_estimate(&g(big), 400).unwrap();
        assert!((e / 3e30 - 1.0).abs() < 1e-10);
    }
}
