//! Complex k2 integration contours and their quadrature rules.
//!
//! For gamma <= 0 the contour is the positively oriented boundary of the first
//! quadrant: down the imaginary axis from +i∞ to 0, then out the real axis.
//! For gamma > 0 the reflection coefficient has a pole at i·gamma, and the
//! imaginary-axis segment through it is replaced by the right half of the
//! negatively oriented circle of radius gamma/2 centered at i·gamma, entered
//! at 3i·gamma/2 and left at i·gamma/2.

use num_complex::Complex64;

use crate::error::{Result, UtmError};
use crate::quad::gauss_legendre;

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourKind {
    BoundaryD,
    BoundaryDTilde,
    RealAxis,
}

/// One parametrized piece of a contour, traversed from its first endpoint to
/// its second.
#[derive(Debug, Clone)]
pub enum Piece {
    Segment { a: C64, b: C64 },
    /// k2(θ) = center + radius·e^{iθ}, θ from th0 to th1 (either order).
    Arc { center: C64, radius: f64, th0: f64, th1: f64 },
}

impl Piece {
    pub fn length(&self) -> f64 {
        match self {
            Piece::Segment { a, b } => (b - a).norm(),
            Piece::Arc { radius, th0, th1, .. } => radius * (th1 - th0).abs(),
        }
    }

    pub fn displacement(&self) -> C64 {
        match self {
            Piece::Segment { a, b } => b - a,
            Piece::Arc { center, radius, th0, th1 } => {
                let end = center + radius * C64::new(0.0, *th1).exp();
                let start = center + radius * C64::new(0.0, *th0).exp();
                end - start
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ContourSpec {
    pub kind: ContourKind,
    pub gamma: f64,
}

/// Contour selection: the deformed contour is only needed when the pole
/// i·gamma enters the first quadrant, i.e. gamma > 0.
pub fn select_contour(gamma: f64) -> ContourSpec {
    let kind = if gamma > 0.0 {
        ContourKind::BoundaryDTilde
    } else {
        ContourKind::BoundaryD
    };
    ContourSpec { kind, gamma }
}

pub fn real_axis_contour() -> ContourSpec {
    ContourSpec {
        kind: ContourKind::RealAxis,
        gamma: 0.0,
    }
}

impl ContourSpec {
    /// Ordered pieces after truncating the rays at |k2| = k_max. The junction
    /// points 0, i·gamma/2, 3i·gamma/2 are always piece endpoints.
    pub fn pieces(&self, k_max: f64) -> Result<Vec<Piece>> {
        let i = C64::new(0.0, 1.0);
        match self.kind {
            ContourKind::BoundaryD => Ok(vec![
                Piece::Segment { a: i * k_max, b: C64::new(0.0, 0.0) },
                Piece::Segment { a: C64::new(0.0, 0.0), b: C64::new(k_max, 0.0) },
            ]),
            ContourKind::BoundaryDTilde => {
                let g = self.gamma;
                if k_max <= 1.5 * g {
                    return Err(UtmError::TruncationTooSmall {
                        kmax: k_max,
                        need: 1.5 * g,
                    });
                }
                Ok(vec![
                    Piece::Segment { a: i * k_max, b: i * (1.5 * g) },
                    Piece::Arc {
                        center: i * g,
                        radius: 0.5 * g,
                        th0: std::f64::consts::FRAC_PI_2,
                        th1: -std::f64::consts::FRAC_PI_2,
                    },
                    Piece::Segment { a: i * (0.5 * g), b: C64::new(0.0, 0.0) },
                    Piece::Segment { a: C64::new(0.0, 0.0), b: C64::new(k_max, 0.0) },
                ])
            }
            ContourKind::RealAxis => Ok(vec![Piece::Segment {
                a: C64::new(-k_max, 0.0),
                b: C64::new(k_max, 0.0),
            }]),
        }
    }
}

/// Complex nodes and weights; weights carry the dk2/dθ Jacobian and the
/// orientation sign, so ∫ f(k2) dk2 ≈ Σ w_q f(node_q).
#[derive(Debug, Clone)]
pub struct ContourQuadrature {
    pub nodes: Vec<C64>,
    pub weights: Vec<C64>,
    pub truncation: f64,
    /// index ranges of each contour piece within nodes/weights
    pub piece_spans: Vec<std::ops::Range<usize>>,
}

const NODES_PER_PANEL: usize = 8;
const ARC_NODES: usize = 32;

/// Composite Gauss-Legendre rule over the pieces of one contour. Straight
/// pieces get ceil(length·density/8) 8-node panels; arcs get a single 32-node
/// panel in θ (the only region with curvature).
pub fn quadrature_for_pieces(pieces: &[Piece], nodes_per_unit: f64, k_max: f64) -> ContourQuadrature {
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut piece_spans = Vec::new();
    for piece in pieces {
        let start = nodes.len();
        match piece {
            Piece::Segment { a, b } => {
                let length = (b - a).norm();
                let panels = ((length * nodes_per_unit / NODES_PER_PANEL as f64).ceil() as usize)
                    .max(1);
                let dir = (b - a) / length;
                let (t, w) = gauss_legendre(NODES_PER_PANEL);
                for p in 0..panels {
                    let s0 = length * p as f64 / panels as f64;
                    let s1 = length * (p + 1) as f64 / panels as f64;
                    let mid = 0.5 * (s0 + s1);
                    let half = 0.5 * (s1 - s0);
                    for (ti, wi) in t.iter().zip(w.iter()) {
                        nodes.push(a + dir * (mid + half * ti));
                        weights.push(dir * (half * wi));
                    }
                }
            }
            Piece::Arc { center, radius, th0, th1 } => {
                let (t, w) = gauss_legendre(ARC_NODES);
                let mid = 0.5 * (th0 + th1);
                let half = 0.5 * (th1 - th0);
                for (ti, wi) in t.iter().zip(w.iter()) {
                    let th = mid + half * ti;
                    let e = C64::new(0.0, th).exp();
                    nodes.push(center + radius * e);
                    // dk2 = i·radius·e^{iθ} dθ
                    weights.push(C64::new(0.0, 1.0) * radius * e * (half * wi));
                }
            }
        }
        piece_spans.push(start..nodes.len());
    }
    ContourQuadrature {
        nodes,
        weights,
        truncation: k_max,
        piece_spans,
    }
}

pub fn build_quadrature(
    spec: &ContourSpec,
    k_max: f64,
    nodes_per_unit: f64,
) -> Result<ContourQuadrature> {
    let pieces = spec.pieces(k_max)?;
    Ok(quadrature_for_pieces(&pieces, nodes_per_unit, k_max))
}

impl ContourQuadrature {
    pub fn integrate<F: Fn(C64) -> C64>(&self, f: F) -> C64 {
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(|(&k, &w)| w * f(k))
            .sum()
    }

    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        out.nodes.reverse();
        out.weights.reverse();
        for w in out.weights.iter_mut() {
            *w = -*w;
        }
        let n = out.nodes.len();
        out.piece_spans = self
            .piece_spans
            .iter()
            .rev()
            .map(|r| n - r.end..n - r.start)
            .collect();
        out
    }

    /// CSV dump of (Re k2, Im k2, Re w, Im w) for plotting and debugging.
    pub fn write_csv<P: AsRef<std::path::Path>>(&self, path: P) -> Result<()> {
        let mut out = String::from("re_k2,im_k2,re_w,im_w\n");
        for (k, w) in self.nodes.iter().zip(self.weights.iter()) {
            out.push_str(&format!("{},{},{},{}\n", k.re, k.im, w.re, w.im));
        }
        std::fs::write(path, out)?;
        Ok(())
    }
}
