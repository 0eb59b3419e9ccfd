//! Graph Laplacian, its spectrum, and the algebraic connectivity λ₂.
//!
//! Tolerances are absolute and scale with the spectral radius bound: the
//! default is `1e-9 · max(1, 2·d_max)`, since every Laplacian eigenvalue
//! lies in `[0, 2·d_max]`.

use std::io::Write;

use num_rational::Ratio;

use crate::eigen::{symmetric_eigen, symmetric_eigenvalues, Eigen, SymmetricMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;

pub const RELATIVE_TOLERANCE: f64 = 1e-9;

pub fn default_tolerance(g: &Graph) -> f64 {
    let d_max = g.min_max_degree().map_or(0, |(_, hi)| hi);
    RELATIVE_TOLERANCE * (2.0 * d_max as f64).max(1.0)
}

/// `L = D − A`.
pub fn laplacian(g: &Graph) -> SymmetricMatrix {
    let n = g.node_count();
    let mut l = SymmetricMatrix::zeros(n);
    for v in 0..n {
        l.set_sym(v, v, g.neighbors(v).len() as f64);
    }
    for (u, v) in g.edges() {
        l.set_sym(u, v, -1.0);
    }
    l
}

/// Ascending Laplacian eigenvalues plus the tolerance they were checked at.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub tolerance: f64,
}

impl LaplacianSpectrum {
    /// λ₂, clamped at zero. `None` for graphs with fewer than two nodes.
    pub fn algebraic_connectivity(&self) -> Option<f64> {
        self.eigenvalues.get(1).map(|&x| x.max(0.0))
    }

    /// CSV rows `graph_id,index,eigenvalue` (1-based index), with header.
    pub fn write_csv<W: Write>(&self, graph_id: &str, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["graph_id", "index", "eigenvalue"])?;
        for (i, x) in self.eigenvalues.iter().enumerate() {
            out.write_record([graph_id, &(i + 1).to_string(), &x.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn validate(g: &Graph, values: &[f64], tol: f64) -> Result<()> {
    let n = g.node_count();
    if n == 0 {
        return Ok(());
    }
    let d_max = g.min_max_degree()?.1 as f64;
    let first = values[0];
    if first.abs() > tol {
        return Err(Error::SpectrumCheck(format!(
            "smallest eigenvalue {first:e} is not within {tol:e} of zero"
        )));
    }
    let last = values[n - 1];
    if last > 2.0 * d_max + tol {
        return Err(Error::SpectrumCheck(format!(
            "largest eigenvalue {last} exceeds 2·d_max = {}",
            2.0 * d_max
        )));
    }
    let trace = 2.0 * g.edge_count() as f64;
    let sum: f64 = values.iter().sum();
    if (sum - trace).abs() > n as f64 * tol {
        return Err(Error::SpectrumCheck(format!(
            "eigenvalue sum {sum} differs from trace {trace}"
        )));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    Ok(())
}

/// Full Laplacian spectrum, validated against `λ₁ ≈ 0`, `λ_N ≤ 2·d_max`
/// and the trace identity.
pub fn laplacian_spectrum(g: &Graph, tol: f64) -> Result<LaplacianSpectrum> {
    check_tol(tol)?;
    let eigenvalues = symmetric_eigenvalues(&laplacian(g))?;
    validate(g, &eigenvalues, tol)?;
    Ok(LaplacianSpectrum {
        eigenvalues,
        tolerance: tol,
    })
}

/// Eigenpairs of the Laplacian, for callers that need residuals or vectors.
pub fn laplacian_eigen(g: &Graph, tol: f64) -> Result<Eigen> {
    check_tol(tol)?;
    let eig = symmetric_eigen(&laplacian(g))?;
    validate(g, &eig.values, tol)?;
    Ok(eig)
}

/// Second-smallest Laplacian eigenvalue, clamped to be non-negative.
/// Defined only for graphs with at least two nodes.
pub fn algebraic_connectivity(g: &Graph, tol: f64) -> Result<f64> {
    if g.node_count() < 2 {
        return Err(Error::TooFewNodes {
            required: 2,
            found: g.node_count(),
        });
    }
    let spectrum = laplacian_spectrum(g, tol)?;
    Ok(spectrum.algebraic_connectivity().expect("n >= 2"))
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Checks `i²/(2·d_max) ≤ λ₂ ≤ 2·i` with `10·tol` slack on each side.
/// The left side is taken as 0 on edgeless graphs.
pub fn cheeger_sandwich_check(g: &Graph, lambda2: f64, i_exact: Ratio<u64>, tol: f64) -> bool {
    let d_max = g.min_max_degree().map_or(0, |(_, hi)| hi);
    let i = ratio_f64(i_exact);
    let lower = if d_max == 0 {
        0.0
    } else {
        i * i / (2.0 * d_max as f64)
    };
    let slack = 10.0 * tol;
    lower <= lambda2 + slack && lambda2 <= 2.0 * i + slack
}

/// Checks that λ₂ does not drop when `plus_edge` adds one edge to `g`.
pub fn monotone_lambda2_check(g: &Graph, plus_edge: &Graph) -> Result<bool> {
    let one_apart = g.node_count() == plus_edge.node_count()
        && plus_edge.edge_count() == g.edge_count() + 1
        && g.edges().all(|(u, v)| plus_edge.has_edge(u, v));
    if !one_apart {
        return Err(Error::NotOneEdgeApart);
    }
    let tol = default_tolerance(plus_edge);
    let before = algebraic_connectivity(g, tol)?;
    let after = algebraic_connectivity(plus_edge, tol)?;
    Ok(after >= before - 10.0 * tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_fig1;
    use nalgebra::DMatrix;

    fn rows(m: &SymmetricMatrix) -> Vec<Vec<f64>> {
        (0..m.dim()).map(|i| m.row(i).to_vec()).collect()
    }

    fn oracle_lambda2(g: &Graph) -> f64 {
        let l = laplacian(g);
        let n = l.dim();
        let dm = DMatrix::from_fn(n, n, |i, j| l.get(i, j));
        let mut vals: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals[1]
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(
            rows(&laplacian(&Graph::path(2))),
            vec![vec![1.0, -1.0], vec![-1.0, 1.0]]
        );
        assert_eq!(
            rows(&laplacian(&Graph::complete(3))),
            vec![
                vec![2.0, -1.0, -1.0],
                vec![-1.0, 2.0, -1.0],
                vec![-1.0, -1.0, 2.0]
            ]
        );
        assert_eq!(rows(&laplacian(&Graph::edgeless(3))), vec![vec![0.0; 3]; 3]);
        let l = laplacian(&gen_fig1(16, 2).unwrap().into_graph());
        for i in 0..16 {
            assert_eq!(l.row(i).iter().sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn lambda2_examples() {
        let tol = 1e-9;
        assert!((algebraic_connectivity(&Graph::path(2), tol).unwrap() - 2.0).abs() < tol);
        let two_triangles = Graph::complete(3).disjoint_union(&Graph::complete(3));
        assert!(algebraic_connectivity(&two_triangles, tol).unwrap().abs() < tol);
        let k5 = Graph::complete(5);
        let oracle = oracle_lambda2(&k5);
        assert!((oracle - 5.0).abs() < 1e-10);
        assert!(
            (algebraic_connectivity(&k5, default_tolerance(&k5)).unwrap() - oracle).abs() < 1e-8
        );
        assert!(matches!(
            algebraic_connectivity(&Graph::edgeless(1), tol),
            Err(Error::TooFewNodes { .. })
        ));
        assert!(algebraic_connectivity(&k5, 0.0).is_err());
    }

    #[test]
    fn cheeger_examples() {
        let k3 = Graph::complete(3);
        assert!(cheeger_sandwich_check(
            &k3,
            3.0,
            Ratio::from_integer(2),
            1e-9
        ));
        let fig1 = gen_fig1(16, 1).unwrap().into_graph();
        let tol = default_tolerance(&fig1);
        let l2 = algebraic_connectivity(&fig1, tol).unwrap();
        assert!(l2 <= 1.0);
        assert!(cheeger_sandwich_check(&fig1, l2, Ratio::new(1, 2), tol));
        assert!(cheeger_sandwich_check(
            &Graph::edgeless(4),
            0.0,
            Ratio::from_integer(0),
            1e-9
        ));
        assert!(!cheeger_sandwich_check(
            &k3,
            5.0,
            Ratio::from_integer(2),
            1e-9
        ));
    }

    #[test]
    fn monotone_examples() {
        let p3 = Graph::path(3);
        let tri = p3.with_edge(0, 2).unwrap();
        assert!((algebraic_connectivity(&p3, 1e-9).unwrap() - 1.0).abs() < 1e-9);
        assert!((algebraic_connectivity(&tri, 1e-9).unwrap() - 3.0).abs() < 1e-9);
        assert!(monotone_lambda2_check(&p3, &tri).unwrap());

        let split = Graph::complete(3).disjoint_union(&Graph::complete(3));
        assert!(monotone_lambda2_check(&split, &split.with_edge(0, 3).unwrap()).unwrap());

        assert!(matches!(
            monotone_lambda2_check(&p3, &Graph::edgeless(3)),
            Err(Error::NotOneEdgeApart)
        ));
        assert!(monotone_lambda2_check(&p3, &p3).is_err());
    }

    #[test]
    fn spectrum_csv() {
        let spec = laplacian_spectrum(&Graph::path(2), 1e-9).unwrap();
        let mut buf = Vec::new();
        spec.write_csv("p2", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("graph_id,index,eigenvalue"));
        assert!(lines.next().unwrap().starts_with("p2,1,"));
        assert!(lines.next().unwrap().starts_with("p2,2,"));
    }
}
