//! Real-coordinate curvature diagnostics: Christoffel symbols, Riemann,
//! Ricci and Weyl tensors assembled pointwise from exact derivatives of the
//! metric components, and the ASD Weyl operator W⁻ in the basis spanned by
//! {Re(dz∧dw), Im(dz∧dw), κ̂}.

use super::forms::{complex_pairs_to_real, PAIRS};
use super::{fundamental_form, two_form_inner, HermitianMetric};
use crate::field::{sample_lattice, C, FieldError, Point, Result, ScalarField};
use nalgebra::Matrix4;
use rayon::prelude::*;
use std::collections::HashMap;

/// Symmetric index pairs (i ≤ j) for 4×4 symmetric tensors.
const SYM: [(usize, usize); 10] = [
    (0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3),
];

fn sym_idx(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    SYM.iter().position(|&p| p == (a, b)).unwrap()
}

/// Wirtinger combination giving the real-axis derivative ∂_{x_k}.
fn real_derive(f: &ScalarField, axis: usize) -> Result<ScalarField> {
    use crate::expr::Var::*;
    let i = C::new(0.0, 1.0);
    match axis {
        0 => f.derive(Z)?.add(&f.derive(Zt)?),
        1 => f.derive(Z)?.sub(&f.derive(Zt)?)?.scale(i),
        2 => f.derive(W)?.add(&f.derive(Wt)?),
        3 => f.derive(W)?.sub(&f.derive(Wt)?)?.scale(i),
        _ => unreachable!(),
    }
}

/// Diagnostics at a single point.
#[derive(Clone, Debug)]
pub struct PointDiagnostics {
    pub point: [f64; 4],
    /// Frobenius norm of the 3×3 ASD Weyl operator (half-flat detector).
    pub w_minus_norm: f64,
    /// Norm of the trace-free Ricci tensor (Einstein detector).
    pub ricci_tracefree_norm: f64,
    pub scalar_curvature: f64,
    /// Difference of the two W⁻ eigenvalues complementary to the κ̂ direction.
    pub type_d_gap: f64,
    /// Rayleigh quotient of W⁻ on the κ̂ direction.
    pub psi2_proxy: f64,
}

pub struct CurvatureDiagnostics {
    pub samples: Vec<PointDiagnostics>,
}

impl CurvatureDiagnostics {
    pub fn max_w_minus(&self) -> f64 {
        self.samples.iter().map(|s| s.w_minus_norm).fold(0.0, f64::max)
    }
    pub fn max_ricci_tracefree(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.ricci_tracefree_norm)
            .fold(0.0, f64::max)
    }
    pub fn max_type_d_gap(&self) -> f64 {
        self.samples.iter().map(|s| s.type_d_gap).fold(0.0, f64::max)
    }
    pub fn min_abs_psi2(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.psi2_proxy.abs())
            .fold(f64::INFINITY, f64::min)
    }
    pub fn scalar_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.samples {
            lo = lo.min(s.scalar_curvature);
            hi = hi.max(s.scalar_curvature);
        }
        (lo, hi)
    }
}

struct MetricJet {
    /// G entries for the 10 symmetric index pairs.
    g: Vec<ScalarField>,
    /// ∂_k G for k = 0..4.
    d1: Vec<Vec<ScalarField>>,
    /// ∂_k ∂_l G for the 10 symmetric (k, l) pairs.
    d2: Vec<Vec<ScalarField>>,
}

impl MetricJet {
    fn build(metric: &HermitianMetric) -> Result<MetricJet> {
        let gm = metric.to_real_metric()?;
        let g: Vec<ScalarField> = SYM.iter().map(|&(i, j)| gm.at(i, j).clone()).collect();
        let mut d1 = Vec::with_capacity(4);
        for k in 0..4 {
            let mut row = Vec::with_capacity(10);
            for e in &g {
                row.push(real_derive(e, k)?);
            }
            d1.push(row);
        }
        let mut d2 = Vec::with_capacity(10);
        for &(k, l) in &SYM {
            let mut row = Vec::with_capacity(10);
            for e in &d1[k] {
                row.push(real_derive(e, l)?);
            }
            d2.push(row);
        }
        Ok(MetricJet { g, d1, d2 })
    }

    /// Evaluate the full jet at a point; imaginary parts must be numerical
    /// noise on the real slice.
    fn eval(&self, p: &Point) -> Result<(Matrix4<f64>, [[[f64; 4]; 4]; 4], Vec<[[f64; 4]; 4]>)> {
        let mut cache = HashMap::new();
        let mut to_mat = |fields: &Vec<ScalarField>| -> Result<[[f64; 4]; 4]> {
            let mut m = [[0.0; 4]; 4];
            for (q, &(i, j)) in SYM.iter().enumerate() {
                let v = fields[q].eval_cached(p, &mut cache)?;
                m[i][j] = v.re;
                m[j][i] = v.re;
            }
            Ok(m)
        };
        let g0 = to_mat(&self.g)?;
        let mut g = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                g[(i, j)] = g0[i][j];
            }
        }
        let mut d1 = [[[0.0; 4]; 4]; 4];
        for k in 0..4 {
            d1[k] = to_mat(&self.d1[k])?;
        }
        let mut d2 = Vec::with_capacity(10);
        for row in &self.d2 {
            d2.push(to_mat(row)?);
        }
        Ok((g, d1, d2))
    }
}

fn diagnostics_at(metric: &HermitianMetric, jet: &MetricJet, p: &Point) -> Result<PointDiagnostics> {
    let (g, dg, d2g_sym) = jet.eval(p)?;
    let ginv = g
        .try_inverse()
        .ok_or_else(|| FieldError::SingularMatrix(p.x))?;
    let d2g = |m: usize, k: usize| -> &[[f64; 4]; 4] { &d2g_sym[sym_idx(m, k)] };

    // Christoffel symbols of the second kind.
    let mut gamma = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let mut acc = 0.0;
                for l in 0..4 {
                    acc += ginv[(i, l)] * (dg[j][l][k] + dg[k][j][l] - dg[l][j][k]);
                }
                gamma[i][j][k] = 0.5 * acc;
            }
        }
    }
    // ∂_m Γ^i_{jk}, using ∂_m G⁻¹ = −G⁻¹ (∂_m G) G⁻¹.
    let mut dgamma = [[[[0.0; 4]; 4]; 4]; 4];
    for m in 0..4 {
        let mut dginv = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for a in 0..4 {
                    for b in 0..4 {
                        acc -= ginv[(i, a)] * dg[m][a][b] * ginv[(b, j)];
                    }
                }
                dginv[i][j] = acc;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let mut acc = 0.0;
                    for l in 0..4 {
                        acc += dginv[i][l] * (dg[j][l][k] + dg[k][j][l] - dg[l][j][k]);
                        acc += ginv[(i, l)]
                            * (d2g(m, j)[l][k] + d2g(m, k)[j][l] - d2g(m, l)[j][k]);
                    }
                    dgamma[m][i][j][k] = 0.5 * acc;
                }
            }
        }
    }
    // Riemann R^i_{jkl} = ∂_k Γ^i_{lj} − ∂_l Γ^i_{kj} + Γ^i_{km}Γ^m_{lj} − Γ^i_{lm}Γ^m_{kj}.
    let mut riem_up = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut acc = dgamma[k][i][l][j] - dgamma[l][i][k][j];
                    for m in 0..4 {
                        acc += gamma[i][k][m] * gamma[m][l][j] - gamma[i][l][m] * gamma[m][k][j];
                    }
                    riem_up[i][j][k][l] = acc;
                }
            }
        }
    }
    // Lower the first index; Ricci; scalar curvature.
    let mut riem = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut acc = 0.0;
                    for m in 0..4 {
                        acc += g[(i, m)] * riem_up[m][j][k][l];
                    }
                    riem[i][j][k][l] = acc;
                }
            }
        }
    }
    let mut ric = [[0.0; 4]; 4];
    for j in 0..4 {
        for l in 0..4 {
            let mut acc = 0.0;
            for i in 0..4 {
                acc += riem_up[i][j][i][l];
            }
            ric[j][l] = acc;
        }
    }
    let mut rs = 0.0;
    for j in 0..4 {
        for l in 0..4 {
            rs += ginv[(j, l)] * ric[j][l];
        }
    }
    // Weyl tensor in four dimensions.
    let mut weyl = [[[[0.0; 4]; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let schouten = 0.5
                        * (g[(i, k)] * ric[j][l] - g[(i, l)] * ric[j][k] + g[(j, l)] * ric[i][k]
                            - g[(j, k)] * ric[i][l]);
                    let scal = (rs / 6.0) * (g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]);
                    weyl[i][j][k][l] = riem[i][j][k][l] - schouten + scal;
                }
            }
        }
    }

    // Real ASD basis: κ̂ and the real/imaginary parts of dz∧dw.
    let kappa = fundamental_form(metric);
    let kv = kappa.eval_at(p)?;
    let k_real = complex_pairs_to_real(&kv).map(|v| v.re);
    let mut e_dzdw = [C::new(0.0, 0.0); 6];
    e_dzdw[PAIRS.iter().position(|&q| q == (0, 1)).unwrap()] = C::new(1.0, 0.0);
    let dzdw = complex_pairs_to_real(&e_dzdw);
    let b1 = dzdw.map(|v| v.re);
    let b2 = dzdw.map(|v| v.im);

    let inner = |a: &Matrix4<f64>, b: &Matrix4<f64>| -> f64 {
        let ac = a.map(|v| C::new(v, 0.0));
        let bc = b.map(|v| C::new(v, 0.0));
        two_form_inner(&ginv, &ac, &bc).re
    };
    // Gram–Schmidt with κ̂ first so the proxy eigenvalue is well defined.
    let mut basis = vec![k_real, b1, b2];
    let mut ortho: Vec<Matrix4<f64>> = Vec::with_capacity(3);
    for v in basis.drain(..) {
        let mut u = v;
        for e in &ortho {
            let c = inner(&u, e);
            u -= *e * c;
        }
        let n = inner(&u, &u).sqrt();
        if n < 1e-12 {
            return Err(FieldError::Other(format!(
                "degenerate ASD basis at {:?}",
                p.x
            )));
        }
        ortho.push(u / n);
    }
    // Weyl acting on two-forms: (Wβ)_{ij} = ½ C_{ijkl} β^{kl}.
    let apply_weyl = |b: &Matrix4<f64>| -> Matrix4<f64> {
        let mut up = [[0.0; 4]; 4];
        for k in 0..4 {
            for l in 0..4 {
                let mut acc = 0.0;
                for m in 0..4 {
                    for n in 0..4 {
                        acc += ginv[(k, m)] * ginv[(l, n)] * b[(m, n)];
                    }
                }
                up[k][l] = acc;
            }
        }
        let mut out = Matrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = 0.0;
                for k in 0..4 {
                    for l in 0..4 {
                        acc += weyl[i][j][k][l] * up[k][l];
                    }
                }
                out[(i, j)] = 0.5 * acc;
            }
        }
        out
    };
    let mut m = [[0.0; 3]; 3];
    for b in 0..3 {
        let wb = apply_weyl(&ortho[b]);
        for a in 0..3 {
            m[a][b] = inner(&ortho[a], &wb);
        }
    }
    // Symmetrize away roundoff.
    for a in 0..3 {
        for b in (a + 1)..3 {
            let v = 0.5 * (m[a][b] + m[b][a]);
            m[a][b] = v;
            m[b][a] = v;
        }
    }
    let w_norm = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    let psi2 = m[0][0];
    let gap = ((m[1][1] - m[2][2]).powi(2) + 4.0 * m[1][2] * m[1][2]).sqrt();

    let mut tf = 0.0;
    let mut pmat = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            pmat[i][j] = ric[i][j] - 0.25 * rs * g[(i, j)];
        }
    }
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    tf += pmat[i][j] * pmat[k][l] * ginv[(i, k)] * ginv[(j, l)];
                }
            }
        }
    }

    Ok(PointDiagnostics {
        point: p.x,
        w_minus_norm: w_norm,
        ricci_tracefree_norm: tf.max(0.0).sqrt(),
        scalar_curvature: rs,
        type_d_gap: gap,
        psi2_proxy: psi2,
    })
}

/// Evaluate the full diagnostics over an m⁴ sample lattice on the chart.
pub fn curvature_diagnostics(g: &HermitianMetric, m: usize) -> Result<CurvatureDiagnostics> {
    let jet = MetricJet::build(g)?;
    let lattice = sample_lattice(&g.chart, m);
    let samples: Result<Vec<PointDiagnostics>> = lattice
        .par_iter()
        .map(|p| diagnostics_at(g, &jet, p))
        .collect();
    Ok(CurvatureDiagnostics { samples: samples? })
}
