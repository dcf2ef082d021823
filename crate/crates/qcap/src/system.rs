//! Collocation assembly of the charge system S·Σ = V, its direct solve, and
//! capacitance extraction.
//!
//! The unknown is the total surface charge density on every element. Each
//! conductor-face element contributes a potential equation (1 V on the owning
//! conductor's excitation column, 0 elsewhere); each dielectric-interface
//! element contributes a flux-continuity equation with zero right-hand side.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::SegmentKind;
use crate::kernel;
use crate::linalg::{lu_solve, Mat};
use crate::mesh::{Element, Mesh};

/// Vacuum permittivity, F/m.
pub const EPS0: f64 = 8.8541878128e-12;

/// Largest acceptable ‖S·Σ−V‖_inf / ‖V‖_inf after the direct solve.
pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Dense collocation system. `v` holds one excitation column per conductor:
/// row m, column j is 1 exactly when element m lies on conductor j.
#[derive(Clone, Debug)]
pub struct DenseSystem {
    pub s: Mat,
    pub v: Mat,
}

/// Total charge densities, one column per excited conductor (C/m^2).
#[derive(Clone, Debug)]
pub struct ChargeSolution {
    pub sigma: Mat,
}

/// Per-unit-length capacitance matrix, F/m, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacitanceMatrix {
    n_cond: usize,
    data: Vec<f64>,
}

impl CapacitanceMatrix {
    /// Builds a matrix from square row data; panics on ragged input.
    pub fn from_rows(rows: &[Vec<f64>]) -> CapacitanceMatrix {
        let n_cond = rows.len();
        let mut data = Vec::with_capacity(n_cond * n_cond);
        for row in rows {
            assert_eq!(row.len(), n_cond, "capacitance matrix must be square");
            data.extend_from_slice(row);
        }
        CapacitanceMatrix { n_cond, data }
    }

    pub fn n_cond(&self) -> usize {
        self.n_cond
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n_cond + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.n_cond)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Largest entry difference relative to the largest magnitude in `other`.
    pub fn max_rel_diff(&self, other: &CapacitanceMatrix) -> f64 {
        assert_eq!(self.n_cond, other.n_cond);
        let scale = other.max_abs();
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale
    }
}

/// Reported working-set size for an N-element, `n_cond`-conductor solve:
/// the matrix plus one right-hand-side and one solution column per conductor,
/// 8 bytes per entry.
pub fn memory_estimate_bytes(n: usize, n_cond: usize) -> u64 {
    8 * n as u64 * (n as u64 + 2 * n_cond as u64)
}

fn fill_row(
    elements: &[Element],
    grounded: bool,
    m: usize,
    s_row: &mut [f64],
    v_row: &mut [f64],
) -> Result<()> {
    let own = &elements[m];
    let obs = own.midpoint;
    match own.kind {
        SegmentKind::ConductorFace { conductor, .. } => {
            for (n, src) in elements.iter().enumerate() {
                let p = if grounded {
                    kernel::grounded_potential(src, obs)
                } else {
                    kernel::segment_potential(src, obs)
                };
                s_row[n] = p / EPS0;
            }
            v_row[conductor] = 1.0;
        }
        SegmentKind::DielectricInterface { eps_pos, eps_neg } => {
            for (n, src) in elements.iter().enumerate() {
                let f = if grounded {
                    kernel::grounded_field(src, obs)
                } else {
                    kernel::segment_field(src, obs)
                }
                .map_err(|_| Error::EndpointCollision { observer: m, emitter: n })?;
                s_row[n] = -f.dot(own.normal) / EPS0;
            }
            s_row[m] += (eps_pos + eps_neg) / (2.0 * EPS0 * (eps_neg - eps_pos));
        }
    }
    Ok(())
}

/// Builds S and V by midpoint collocation. Rows are independent and filled in
/// parallel; the result does not depend on scheduling. With `grounded` the
/// kernels include the y = 0 image terms (an element's own image contributes
/// to its diagonal entry).
pub fn assemble_system(mesh: &Mesh, grounded: bool) -> Result<DenseSystem> {
    let n = mesh.n();
    let n_cond = mesh.n_cond;
    assert!(n > 0, "cannot assemble an empty mesh");
    let mut s = Mat::zeros(n, n);
    let mut v = Mat::zeros(n, n_cond);
    let elements = &mesh.elements;
    let row_results: Vec<Result<()>> = s
        .as_mut_slice()
        .par_chunks_mut(n)
        .zip(v.as_mut_slice().par_chunks_mut(n_cond))
        .enumerate()
        .map(|(m, (s_row, v_row))| fill_row(elements, grounded, m, s_row, v_row))
        .collect();
    row_results.into_iter().collect::<Result<()>>()?;
    Ok(DenseSystem { s, v })
}

fn residual_ratio(s: &Mat, sigma: &Mat, v: &Mat) -> f64 {
    let n = s.rows();
    let mut worst = 0.0f64;
    let mut v_scale = 0.0f64;
    for r in 0..n {
        for c in 0..v.cols() {
            let mut acc = 0.0;
            for (j, sj) in s.row(r).iter().enumerate() {
                acc += sj * sigma[(j, c)];
            }
            worst = worst.max((acc - v[(r, c)]).abs());
            v_scale = v_scale.max(v[(r, c)].abs());
        }
    }
    if v_scale > 0.0 {
        worst / v_scale
    } else {
        worst
    }
}

/// LU-factors S with scaled partial pivoting and back-substitutes every
/// excitation column, then verifies the residual against [`RESIDUAL_LIMIT`].
pub fn factor_solve(sys: DenseSystem) -> Result<ChargeSolution> {
    let DenseSystem { s, v } = sys;
    let mut lu = s.clone();
    let sigma = lu_solve(&mut lu, &v)?;
    let residual = residual_ratio(&s, &sigma, &v);
    if !(residual <= RESIDUAL_LIMIT) {
        return Err(Error::ResidualTooLarge { residual, limit: RESIDUAL_LIMIT });
    }
    Ok(ChargeSolution { sigma })
}

/// C_ij = sum over conductor-face elements k of conductor i of
/// eps_r(k) · Σ[k][j] · l_k, per 1 V of excitation. The eps_r factor converts
/// total charge density to free charge density on the face.
pub fn extract_capacitance(solution: &ChargeSolution, mesh: &Mesh) -> CapacitanceMatrix {
    let n_cond = mesh.n_cond;
    let mut data = vec![0.0f64; n_cond * n_cond];
    for (k, elem) in mesh.elements.iter().enumerate() {
        if let SegmentKind::ConductorFace { conductor, eps_r } = elem.kind {
            for j in 0..n_cond {
                data[conductor * n_cond + j] += eps_r * solution.sigma[(k, j)] * elem.length;
            }
        }
    }
    CapacitanceMatrix { n_cond, data }
}
