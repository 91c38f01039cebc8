//! Antenna-array geometries and spatial correlation across their elements.
//!
//! Elements are ideal isotropic sample points. All generated geometries lie in
//! the horizontal plane with the reference element at the origin.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::correlation::{scf_multicluster, Displacement};
use crate::error::{Error, Result};
use crate::vmf::{Direction, VmfCluster};

/// Closest two elements may be, in meters.
pub const MIN_ELEMENT_SEPARATION: f64 = 1e-9;

/// Element positions with a designated reference element.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    positions: Vec<Vector3<f64>>,
    reference_index: usize,
    // signed path coordinate of each element, when the generator knows it
    path: Option<Vec<f64>>,
}

impl ArrayGeometry {
    pub fn new(positions: Vec<Vector3<f64>>, reference_index: usize) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Geometry("array has no elements".into()));
        }
        if reference_index >= positions.len() {
            return Err(Error::Geometry(format!(
                "reference index {reference_index} out of range for {} elements",
                positions.len()
            )));
        }
        if let Some(p) = positions.iter().find(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::Geometry(format!("non-finite element position {p:?}")));
        }
        for (i, a) in positions.iter().enumerate() {
            for (j, b) in positions.iter().enumerate().skip(i + 1) {
                if (a - b).norm() < MIN_ELEMENT_SEPARATION {
                    return Err(Error::Geometry(format!("elements {i} and {j} coincide")));
                }
            }
        }
        Ok(ArrayGeometry {
            positions,
            reference_index,
            path: None,
        })
    }

    fn with_path(mut self, path: Vec<f64>) -> Self {
        debug_assert_eq!(path.len(), self.positions.len());
        self.path = Some(path);
        self
    }

    pub fn positions(&self) -> &[Vector3<f64>] {
        &self.positions
    }

    pub fn reference_index(&self) -> usize {
        self.reference_index
    }

    pub fn reference(&self) -> Vector3<f64> {
        self.positions[self.reference_index]
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Signed distance of each element from the reference along the array.
    ///
    /// Generated geometries report their exact path coordinate (arc length on
    /// a circle); otherwise elements are taken as an ordered polyline.
    pub fn path_coordinates(&self) -> Vec<f64> {
        if let Some(path) = &self.path {
            return path.clone();
        }
        let mut cumulative = vec![0.0; self.positions.len()];
        for i in 1..self.positions.len() {
            cumulative[i] = cumulative[i - 1] + (self.positions[i] - self.positions[i - 1]).norm();
        }
        let origin = cumulative[self.reference_index];
        cumulative.iter().map(|c| c - origin).collect()
    }
}

fn check_count(name: &'static str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::domain(name, 0.0, "at least one element"));
    }
    Ok(())
}

fn check_length(name: &'static str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(name, x, "positive finite length"));
    }
    Ok(())
}

/// Signed element indices centered on zero; for even counts the extra
/// element goes on the positive side.
fn centered_indices(n: usize) -> impl Iterator<Item = i64> {
    let low = (n as i64 - 1) / 2;
    (0..n as i64).map(move |i| i - low)
}

/// `n` equispaced elements along `axis`, centered on the reference at the origin.
pub fn linear_array(n: usize, spacing: f64, axis: &Direction) -> Result<ArrayGeometry> {
    check_count("n", n)?;
    check_length("spacing", spacing)?;
    let offsets: Vec<f64> = centered_indices(n).map(|i| i as f64 * spacing).collect();
    let positions = offsets.iter().map(|&s| axis.as_vector() * s).collect();
    let reference = (n - 1) / 2;
    Ok(ArrayGeometry::new(positions, reference)?.with_path(offsets))
}

/// `n` elements evenly spaced on a horizontal circle of radius `radius` that
/// passes through the reference element at the origin.
///
/// The circle is centered at `(0, radius, 0)`; positive path distance runs
/// counterclockwise seen from above.
pub fn circular_array(n: usize, radius: f64) -> Result<ArrayGeometry> {
    check_count("n", n)?;
    check_length("radius", radius)?;
    let step = 2.0 * PI / n as f64;
    let center = Vector3::new(0.0, radius, 0.0);
    let mut positions = Vec::with_capacity(n);
    let mut arcs = Vec::with_capacity(n);
    for j in centered_indices(n) {
        if j == 0 {
            positions.push(Vector3::zeros());
        } else {
            let angle = -FRAC_PI_2 + j as f64 * step;
            positions.push(center + Vector3::new(angle.cos(), angle.sin(), 0.0) * radius);
        }
        arcs.push(j as f64 * step * radius);
    }
    Ok(ArrayGeometry::new(positions, (n - 1) / 2)?.with_path(arcs))
}

/// Horizontal `nx × ny` rectangular grid, row-major in `y`, with the
/// reference element at the origin.
pub fn planar_grid(nx: usize, ny: usize, dx: f64, dy: f64) -> Result<ArrayGeometry> {
    check_count("nx", nx)?;
    check_count("ny", ny)?;
    check_length("dx", dx)?;
    check_length("dy", dy)?;
    let mut positions = Vec::with_capacity(nx * ny);
    for j in centered_indices(ny) {
        for i in centered_indices(nx) {
            positions.push(Vector3::new(i as f64 * dx, j as f64 * dy, 0.0));
        }
    }
    let reference = ((ny - 1) / 2) * nx + (nx - 1) / 2;
    let geometry = ArrayGeometry::new(positions, reference)?;
    if ny == 1 {
        let path = centered_indices(nx).map(|i| i as f64 * dx).collect();
        return Ok(geometry.with_path(path));
    }
    Ok(geometry)
}

/// Hermitian matrix of pairwise correlations between array elements.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<Complex64>,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// Largest `|R_ik − conj(R_ki)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in i..n {
                worst = worst.max((self.entries[(i, k)] - self.entries[(k, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.entries.clone().symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }
}

/// Entry `(i, k)` is the correlation at displacement `p_k − p_i`.
pub fn correlation_matrix(
    geometry: &ArrayGeometry,
    clusters: &[VmfCluster],
    wavelength: f64,
) -> Result<CorrelationMatrix> {
    let n = geometry.len();
    let p = geometry.positions();
    let upper: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|k| scf_multicluster(clusters, &Displacement::from_vector(p[k] - p[i]), wavelength))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    // validates clusters and wavelength for the 1×1 case too
    scf_multicluster(clusters, &Displacement::zero(), wavelength)?;
    let mut entries = DMatrix::from_element(n, n, Complex64::new(1.0, 0.0));
    for (i, row) in upper.iter().enumerate() {
        for (offset, &value) in row.iter().enumerate() {
            let k = i + 1 + offset;
            entries[(i, k)] = value;
            entries[(k, i)] = value.conj();
        }
    }
    Ok(CorrelationMatrix { entries })
}

/// Correlation between the reference element and every element.
pub fn scf_from_reference(
    geometry: &ArrayGeometry,
    clusters: &[VmfCluster],
    wavelength: f64,
) -> Result<Vec<Complex64>> {
    let origin = geometry.reference();
    geometry
        .positions()
        .par_iter()
        .map(|p| scf_multicluster(clusters, &Displacement::from_vector(p - origin), wavelength))
        .collect()
}

/// One point of a correlation curve along a one-dimensional array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSample {
    /// Signed distance along the array from the reference, meters.
    pub distance: f64,
    pub value: Complex64,
}

/// Correlation against the reference as a function of signed path distance.
pub fn scf_along_path(geometry: &ArrayGeometry, clusters: &[VmfCluster], wavelength: f64) -> Result<Vec<PathSample>> {
    let values = scf_from_reference(geometry, clusters, wavelength)?;
    Ok(geometry
        .path_coordinates()
        .into_iter()
        .zip(values)
        .map(|(distance, value)| PathSample { distance, value })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationarityReport {
    pub is_even_in_magnitude: bool,
    /// Largest `||R(s)| − |R(−s)||` over mirrored samples.
    pub max_asymmetry: f64,
}

/// Compares `|R(s)|` with `|R(−s)|` over a curve sampled at mirrored distances.
pub fn stationarity_check(curve: &[PathSample], tol: f64) -> Result<StationarityReport> {
    let scale = curve.iter().fold(0.0f64, |m, p| m.max(p.distance.abs()));
    let match_tol = 1e-9 * scale;
    let mut max_asymmetry = 0.0f64;
    for p in curve.iter().filter(|p| p.distance > match_tol) {
        let mirror = curve
            .iter()
            .find(|q| (q.distance + p.distance).abs() <= match_tol)
            .ok_or(Error::Mismatch(p.distance))?;
        max_asymmetry = max_asymmetry.max((p.value.norm() - mirror.value.norm()).abs());
    }
    for p in curve.iter().filter(|p| p.distance < -match_tol) {
        if !curve.iter().any(|q| (q.distance + p.distance).abs() <= match_tol) {
            return Err(Error::Mismatch(p.distance));
        }
    }
    Ok(StationarityReport {
        is_even_in_magnitude: max_asymmetry < tol,
        max_asymmetry,
    })
}
