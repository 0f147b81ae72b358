//! Formal and Dirichlet Laplacians, Dirichlet heat semigroups and heat
//! kernels along exhaustions.
//!
//! Kernels use the convention `P_t f(x) = Σ_y p_t(x, y) f(y) m(y)`, so
//! `p_t(·, y)` is the evolution of `δ_y / m(y)` and `p_0(x, y) = δ_xy / m(y)`.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::evidence::Evidence;
use crate::graph::{metric_view, ExhaustionSequence, GraphError, SubgraphRegion, Vertex, WeightedGraph};
use crate::values::VertexValues;

/// Relative level above which heat reaching the Dirichlet boundary layer
/// marks an evolution as contaminated by the cut.
pub const CONTAMINATION_LEVEL: f64 = 1e-6;
const MONOTONE_SLACK: f64 = 1e-12;
const MASS_SC_LEVEL: f64 = 0.99;
const MASS_STALL: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("no value at vertex {0}")]
    MissingValue(String),
    #[error("vertex {0} is on the truncation frontier")]
    FrontierContamination(String),
    #[error("region has empty interior")]
    EmptyInterior,
    #[error("initial datum is nonzero at {0}, outside the region interior")]
    UnsupportedVertexInU0(String),
    #[error("times must be nonnegative and increasing")]
    BadTimes,
    #[error("vertex {0} is not in the interior of the first region")]
    VertexOutsideFirstRegion(String),
    #[error("exhaustion monotonicity violated at region {region}: {value} < {previous}")]
    MonotonicityViolation { region: usize, value: f64, previous: f64 },
    #[error("initial datum is negative at {0}")]
    NegativeU0(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `Δ̃f(x) = (1/m(x)) Σ_y b(x,y)(f(x) − f(y))` at each vertex of `at`.
pub fn apply_formal_laplacian<F: VertexValues + ?Sized>(
    g: &WeightedGraph,
    f: &F,
    at: &[Vertex],
) -> Result<Vec<f64>, SpectralError> {
    at.iter()
        .map(|&x| {
            g.check(x)?;
            if g.is_frontier(x) {
                return Err(SpectralError::FrontierContamination(g.name(x).into()));
            }
            let fx = f
                .value(x)
                .ok_or_else(|| SpectralError::MissingValue(g.name(x).into()))?;
            let mut s = 0.0;
            for &(y, b) in g.neighbors(x) {
                let fy = f
                    .value(y)
                    .ok_or_else(|| SpectralError::MissingValue(g.name(y).into()))?;
                s += b * (fx - fy);
            }
            Ok(s / g.measure(x))
        })
        .collect()
}

/// `sqrt(Σ f(x)² m(x))` over all vertices.
pub fn l2_norm<F: VertexValues + ?Sized>(g: &WeightedGraph, f: &F) -> Result<f64, SpectralError> {
    let mut s = 0.0;
    for x in 0..g.len() {
        let v = f
            .value(x)
            .ok_or_else(|| SpectralError::MissingValue(g.name(x).into()))?;
        s += v * v * g.measure(x);
    }
    Ok(s.sqrt())
}

/// Dirichlet Laplacian of a region in the symmetric form `D^{1/2} Δ_n D^{-1/2}`.
#[derive(Debug, Clone)]
pub struct DirichletOperator {
    region: SubgraphRegion,
    host_len: usize,
    interior: Vec<Vertex>,
    position: HashMap<Vertex, usize>,
    measure: Vec<f64>,
    sqrt_measure: Vec<f64>,
    symmetric: DMatrix<f64>,
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
    /// Interior positions adjacent to the region boundary.
    boundary_layer: Vec<usize>,
    names: Vec<String>,
}

pub fn dirichlet_operator(g: &WeightedGraph, region: &SubgraphRegion) -> Result<DirichletOperator, SpectralError> {
    let interior = region.interior.clone();
    if interior.is_empty() {
        return Err(SpectralError::EmptyInterior);
    }
    let n = interior.len();
    let position: HashMap<Vertex, usize> = interior.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let measure: Vec<f64> = interior.iter().map(|&x| g.measure(x)).collect();
    let sqrt_measure: Vec<f64> = measure.iter().map(|m| m.sqrt()).collect();
    let mut symmetric = DMatrix::zeros(n, n);
    let mut boundary_layer = Vec::new();
    for (i, &x) in interior.iter().enumerate() {
        symmetric[(i, i)] = g.total_weight(x) / measure[i];
        let mut at_edge = false;
        for &(y, b) in g.neighbors(x) {
            match position.get(&y) {
                Some(&j) => symmetric[(i, j)] = -b / (sqrt_measure[i] * sqrt_measure[j]),
                None => at_edge = true,
            }
        }
        if at_edge {
            boundary_layer.push(i);
        }
    }
    let eigen = SymmetricEigen::new(symmetric.clone());
    Ok(DirichletOperator {
        region: region.clone(),
        host_len: g.len(),
        interior,
        position,
        measure,
        sqrt_measure,
        symmetric,
        eigen,
        boundary_layer,
        names: g.names().to_vec(),
    })
}

impl DirichletOperator {
    pub fn region(&self) -> &SubgraphRegion {
        &self.region
    }

    pub fn interior(&self) -> &[Vertex] {
        &self.interior
    }

    pub fn position(&self, x: Vertex) -> Option<usize> {
        self.position.get(&x).copied()
    }

    pub fn symmetric_matrix(&self) -> &DMatrix<f64> {
        &self.symmetric
    }

    /// The operator in the original coordinates, `D^{-1/2} S D^{1/2}`.
    pub fn raw_matrix(&self) -> DMatrix<f64> {
        let n = self.interior.len();
        DMatrix::from_fn(n, n, |i, j| {
            self.symmetric[(i, j)] * self.sqrt_measure[j] / self.sqrt_measure[i]
        })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigen.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigen.eigenvectors
    }

    /// Largest entrywise asymmetry relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.symmetric.amax().max(f64::MIN_POSITIVE);
        (&self.symmetric - self.symmetric.transpose()).amax() / scale
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        let scale = self.symmetric.amax().max(1.0);
        self.eigen.eigenvalues.iter().all(|&l| l >= -1e-12 * scale)
    }

    /// Applies `Δ_n` to a vector indexed by interior position.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let w = DVector::from_iterator(u.len(), u.iter().zip(&self.sqrt_measure).map(|(a, s)| a * s));
        let sw = &self.symmetric * w;
        sw.iter().zip(&self.sqrt_measure).map(|(a, s)| a / s).collect()
    }

    fn interior_vector<F: VertexValues + ?Sized>(&self, u0: &F) -> Result<Vec<f64>, SpectralError> {
        for x in 0..self.host_len {
            if let Some(v) = u0.value(x) {
                if v != 0.0 && !self.position.contains_key(&x) {
                    return Err(SpectralError::UnsupportedVertexInU0(self.names[x].clone()));
                }
            }
        }
        Ok(self.interior.iter().map(|&x| u0.value(x).unwrap_or(0.0)).collect())
    }

    fn snapshot(&self, u0: &[f64], t: f64, sup0: f64) -> Snapshot {
        let values = self.evolve_vector(u0, t);
        let mass = values.iter().zip(&self.measure).map(|(a, m)| a * m).sum();
        let l2 = values
            .iter()
            .zip(&self.measure)
            .map(|(a, m)| a * a * m)
            .sum::<f64>()
            .sqrt();
        let edge = self.boundary_layer.iter().map(|&i| values[i].abs()).fold(0.0, f64::max);
        Snapshot {
            contaminated: edge > CONTAMINATION_LEVEL * sup0,
            values,
            mass,
            l2,
            edge,
        }
    }

    /// `e^{-tΔ_n}` applied to a vector indexed by interior position.
    pub fn evolve_vector(&self, u0: &[f64], t: f64) -> Vec<f64> {
        if t == 0.0 {
            return u0.to_vec();
        }
        let q = &self.eigen.eigenvectors;
        let w = DVector::from_iterator(u0.len(), u0.iter().zip(&self.sqrt_measure).map(|(a, s)| a * s));
        let mut c = q.tr_mul(&w);
        for (ci, &l) in c.iter_mut().zip(self.eigen.eigenvalues.iter()) {
            *ci *= (-t * l).exp();
        }
        let v = q * c;
        v.iter().zip(&self.sqrt_measure).map(|(a, s)| a / s).collect()
    }
}

struct Snapshot {
    values: Vec<f64>,
    mass: f64,
    l2: f64,
    edge: f64,
    contaminated: bool,
}

/// `P_t^n u0` on a region across a time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatEvolution {
    pub times: Vec<f64>,
    pub interior: Vec<Vertex>,
    /// `values[k][i]` is `u(interior[i], times[k])`.
    pub values: Vec<Vec<f64>>,
    pub mass: Vec<f64>,
    pub l2norm: Vec<f64>,
    /// Sup of `|u|` over interior vertices adjacent to the region boundary.
    pub boundary_sup: Vec<f64>,
    pub contaminated: Vec<bool>,
}

impl HeatEvolution {
    /// Value at a vertex; zero off the interior.
    pub fn value(&self, k: usize, x: Vertex) -> f64 {
        self.interior.binary_search(&x).map_or(0.0, |i| self.values[k][i])
    }
}

pub fn heat_evolve<F: VertexValues + ?Sized>(
    op: &DirichletOperator,
    u0: &F,
    times: &[f64],
) -> Result<HeatEvolution, SpectralError> {
    if times.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) || times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpectralError::BadTimes);
    }
    let u = op.interior_vector(u0)?;
    let sup0 = u.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut ev = HeatEvolution {
        times: times.to_vec(),
        interior: op.interior.clone(),
        values: Vec::with_capacity(times.len()),
        mass: Vec::with_capacity(times.len()),
        l2norm: Vec::with_capacity(times.len()),
        boundary_sup: Vec::with_capacity(times.len()),
        contaminated: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let snap = op.snapshot(&u, t, sup0);
        ev.mass.push(snap.mass);
        ev.l2norm.push(snap.l2);
        ev.boundary_sup.push(snap.edge);
        ev.contaminated.push(snap.contaminated);
        ev.values.push(snap.values);
    }
    Ok(ev)
}

/// Dirichlet operators for every region of an exhaustion, built in parallel.
pub fn exhaustion_operators(
    g: &WeightedGraph,
    exhaustion: &ExhaustionSequence,
) -> Result<Vec<DirichletOperator>, SpectralError> {
    exhaustion
        .regions
        .par_iter()
        .map(|r| dirichlet_operator(g, r))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelEstimate {
    pub source: Vertex,
    pub target: Vertex,
    pub time: f64,
    pub per_region: Vec<f64>,
    pub limit_estimate: f64,
    pub converged: bool,
    pub gap: f64,
}

fn check_first_region(g: &WeightedGraph, exhaustion: &ExhaustionSequence, x: Vertex) -> Result<(), SpectralError> {
    g.check(x)?;
    if !exhaustion.regions[0].in_interior(x) {
        return Err(SpectralError::VertexOutsideFirstRegion(g.name(x).into()));
    }
    Ok(())
}

fn check_monotone(values: &[f64]) -> Result<(), SpectralError> {
    for (i, w) in values.windows(2).enumerate() {
        if w[1] < w[0] - MONOTONE_SLACK * w[0].abs().max(1.0) {
            return Err(SpectralError::MonotonicityViolation {
                region: i + 1,
                value: w[1],
                previous: w[0],
            });
        }
    }
    Ok(())
}

/// `p_t^n(x, y)` for one operator.
pub fn dirichlet_kernel(op: &DirichletOperator, x: Vertex, y: Vertex, t: f64) -> f64 {
    let (Some(i), Some(j)) = (op.position(x), op.position(y)) else {
        return 0.0;
    };
    if t == 0.0 {
        return if i == j { 1.0 / op.measure[j] } else { 0.0 };
    }
    // Spectral sum in symmetrized form, so p(x,y) and p(y,x) agree bit for bit.
    let q = &op.eigen.eigenvectors;
    let s: f64 = op
        .eigen
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, &l)| (-t * l).exp() * (q[(i, k)] * q[(j, k)]))
        .sum();
    s / (op.sqrt_measure[i] * op.sqrt_measure[j])
}

pub fn kernel_from_operators(
    ops: &[DirichletOperator],
    x: Vertex,
    y: Vertex,
    t: f64,
    tol: f64,
) -> Result<KernelEstimate, SpectralError> {
    let per_region: Vec<f64> = ops.par_iter().map(|op| dirichlet_kernel(op, x, y, t)).collect();
    check_monotone(&per_region)?;
    let limit_estimate = *per_region.last().unwrap_or(&0.0);
    let gap = match per_region.len() {
        0 | 1 => f64::INFINITY,
        n => per_region[n - 1] - per_region[n - 2],
    };
    Ok(KernelEstimate {
        source: x,
        target: y,
        time: t,
        per_region,
        limit_estimate,
        converged: gap < tol,
        gap,
    })
}

pub fn kernel_estimate(
    g: &WeightedGraph,
    exhaustion: &ExhaustionSequence,
    x: Vertex,
    y: Vertex,
    t: f64,
    tol: f64,
) -> Result<KernelEstimate, SpectralError> {
    check_first_region(g, exhaustion, x)?;
    check_first_region(g, exhaustion, y)?;
    let ops = exhaustion_operators(g, exhaustion)?;
    kernel_from_operators(&ops, x, y, t, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassProbe {
    pub time: f64,
    pub masses: Vec<f64>,
    pub contaminated: Vec<bool>,
    /// Evidence for stochastic completeness.
    pub evidence: Evidence,
}

/// Total heat `Σ_y p_t^n(x, y) m(y)` for each region, from `δ_x / m(x)`.
pub fn mass_from_operators(ops: &[DirichletOperator], x: Vertex, t: f64) -> Result<MassProbe, SpectralError> {
    let runs: Vec<(f64, bool)> = ops
        .par_iter()
        .map(|op| {
            let mut u0 = vec![0.0; op.interior.len()];
            let Some(i) = op.position(x) else {
                return Err(SpectralError::VertexOutsideFirstRegion(op.names[x].clone()));
            };
            u0[i] = 1.0 / op.measure[i];
            let snap = op.snapshot(&u0, t, u0[i]);
            Ok((snap.mass, snap.contaminated))
        })
        .collect::<Result<_, SpectralError>>()?;
    let masses: Vec<f64> = runs.iter().map(|r| r.0).collect();
    check_monotone(&masses)?;
    if let Some(&m) = masses.iter().find(|&&m| m > 1.0 + 1e-10) {
        return Err(SpectralError::MonotonicityViolation {
            region: 0,
            value: 1.0,
            previous: m,
        });
    }
    let last = *masses.last().unwrap_or(&0.0);
    let stalled = masses.len() >= 2 && {
        let prev = masses[masses.len() - 2];
        (last - prev) < MASS_STALL * last
    };
    let evidence = if last >= MASS_SC_LEVEL {
        Evidence::Supports
    } else if stalled {
        Evidence::Contradicts
    } else {
        Evidence::Inconclusive
    };
    Ok(MassProbe {
        time: t,
        masses,
        contaminated: runs.iter().map(|r| r.1).collect(),
        evidence,
    })
}

pub fn mass_probe(
    g: &WeightedGraph,
    exhaustion: &ExhaustionSequence,
    x: Vertex,
    t: f64,
) -> Result<MassProbe, SpectralError> {
    check_first_region(g, exhaustion, x)?;
    let ops = exhaustion_operators(g, exhaustion)?;
    mass_from_operators(&ops, x, t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusValue {
    pub radius: usize,
    pub sup: f64,
    /// Inside the buffer next to the region boundary, or beyond the region.
    pub near_cut: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FellerProbe {
    pub time: f64,
    pub region_radius: usize,
    pub profile: Vec<AnnulusValue>,
    pub contaminated: bool,
    /// Evidence for the Feller property.
    pub evidence: Evidence,
}

/// Sphere sups of `P_t^n u0` on the final region of the exhaustion.
pub fn feller_probe<F: VertexValues + ?Sized>(
    g: &WeightedGraph,
    exhaustion: &ExhaustionSequence,
    u0: &F,
    t: f64,
    annuli: &[usize],
    decay_tol: f64,
    buffer: usize,
) -> Result<FellerProbe, SpectralError> {
    let first = &exhaustion.regions[0];
    let mut sup0: f64 = 0.0;
    for x in 0..g.len() {
        if let Some(v) = u0.value(x) {
            if v < 0.0 {
                return Err(SpectralError::NegativeU0(g.name(x).into()));
            }
            if v != 0.0 && !first.in_interior(x) {
                return Err(SpectralError::VertexOutsideFirstRegion(g.name(x).into()));
            }
            sup0 = sup0.max(v);
        }
    }
    let op = dirichlet_operator(g, exhaustion.last())?;
    feller_probe_with(g, exhaustion, &op, u0, t, annuli, decay_tol * sup0, buffer)
}

#[allow(clippy::too_many_arguments)]
fn feller_probe_with<F: VertexValues + ?Sized>(
    g: &WeightedGraph,
    exhaustion: &ExhaustionSequence,
    op: &DirichletOperator,
    u0: &F,
    t: f64,
    annuli: &[usize],
    level: f64,
    buffer: usize,
) -> Result<FellerProbe, SpectralError> {
    let ev = heat_evolve(op, u0, &[t])?;
    let mv = metric_view(g, exhaustion.root)?;
    let region_radius = *exhaustion.radii.last().unwrap_or(&0);
    let profile: Vec<AnnulusValue> = annuli
        .iter()
        .map(|&r| {
            let sup = mv.sphere(r).iter().map(|&x| ev.value(0, x)).fold(0.0, f64::max);
            AnnulusValue {
                radius: r,
                sup,
                near_cut: r + buffer > region_radius,
            }
        })
        .collect();
    let clean: Vec<f64> = profile.iter().filter(|a| !a.near_cut).map(|a| a.sup).collect();
    let evidence = match clean.last() {
        Some(&v) if v < level && !ev.contaminated[0] => Evidence::Supports,
        _ if clean.len() >= 3 => {
            let tail = &clean[clean.len() - 3..];
            let hi = tail.iter().copied().fold(0.0, f64::max);
            let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
            if lo >= level && lo >= 0.5 * hi {
                Evidence::Contradicts
            } else {
                Evidence::Inconclusive
            }
        }
        _ => Evidence::Inconclusive,
    };
    Ok(FellerProbe {
        time: t,
        region_radius,
        profile,
        contaminated: ev.contaminated[0],
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ball_exhaustion, build_graph, region};

    fn path3() -> WeightedGraph {
        build_graph(
            &[("0", "1", 1.0), ("1", "2", 1.0)],
            &[("0", 1.0), ("1", 1.0), ("2", 1.0)],
            &["2"],
        )
        .unwrap()
    }

    fn unit_line(n: usize) -> WeightedGraph {
        let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let edges: Vec<(&str, &str, f64)> = (1..=n)
            .map(|i| (names[i - 1].as_str(), names[i].as_str(), 1.0))
            .collect();
        let measures: Vec<(&str, f64)> = names.iter().map(|s| (s.as_str(), 1.0)).collect();
        build_graph(&edges, &measures, &[names[n].as_str()]).unwrap()
    }

    #[test]
    fn formal_laplacian_examples() {
        let g = unit_line(10);
        let rho: Vec<f64> = (0..=10).map(f64::from).collect();
        assert_eq!(apply_formal_laplacian(&g, &rho, &[5]).unwrap(), vec![0.0]);
        assert_eq!(apply_formal_laplacian(&g, &rho, &[0]).unwrap(), vec![-1.0]);
        let ones = vec![1.0; 11];
        assert!(apply_formal_laplacian(&g, &ones, &[0, 3, 9])
            .unwrap()
            .iter()
            .all(|&v| v == 0.0));
        let partial: Vec<Option<f64>> = (0..=10).map(|i| (i < 5).then_some(1.0)).collect();
        assert!(matches!(
            apply_formal_laplacian(&g, partial.as_slice(), &[4]),
            Err(SpectralError::MissingValue(_))
        ));
        assert!(matches!(
            apply_formal_laplacian(&g, &rho, &[10]),
            Err(SpectralError::FrontierContamination(_))
        ));
    }

    #[test]
    fn hand_assembled_operator() {
        let g = path3();
        let op = dirichlet_operator(&g, &region(&g, [0, 1, 2]).unwrap()).unwrap();
        assert_eq!(op.interior(), &[0, 1]);
        let s = op.symmetric_matrix();
        assert_eq!(s.as_slice(), &[1.0, -1.0, -1.0, 2.0]);
        assert_eq!(&op.raw_matrix(), s);
        let mut ev: Vec<f64> = op.eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let r5 = 5f64.sqrt();
        assert!((ev[0] - (3.0 - r5) / 2.0).abs() < 1e-14);
        assert!((ev[1] - (3.0 + r5) / 2.0).abs() < 1e-14);
        assert!(op.is_positive_semidefinite());
        assert_eq!(
            dirichlet_operator(&g, &region(&g, [1]).unwrap()).err(),
            Some(SpectralError::EmptyInterior)
        );
    }

    #[test]
    fn eigenvector_decays_at_its_rate() {
        let g = path3();
        let op = dirichlet_operator(&g, &region(&g, [0, 1, 2]).unwrap()).unwrap();
        let lam = (3.0 - 5f64.sqrt()) / 2.0;
        // (1 - λ, 1) is annihilated by [1-λ, -1; -1, 2-λ] up to scaling: use the null vector.
        let v = vec![1.0, 1.0 - lam];
        let ev = heat_evolve(&op, &v, &[0.0, 0.5, 2.0]).unwrap();
        assert_eq!(ev.values[0], v);
        for (k, &t) in ev.times.iter().enumerate() {
            for (u, v0) in ev.values[k].iter().zip(&v) {
                assert!((u - v0 * (-t * lam).exp()).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn dirichlet_mass_loss_on_line() {
        let g = unit_line(20);
        let op = dirichlet_operator(&g, &region(&g, 0..=6).unwrap()).unwrap();
        let mut u0 = vec![0.0; g.len()];
        u0[0] = 1.0;
        let ev = heat_evolve(&op, &u0, &[0.0, 0.1, 1.0]).unwrap();
        assert_eq!(ev.mass[0], 1.0);
        assert!(ev.mass[1] < 1.0 && ev.mass[2] < ev.mass[1]);
        let mut outside = vec![0.0; g.len()];
        outside[6] = 1.0;
        assert!(matches!(
            heat_evolve(&op, &outside, &[1.0]),
            Err(SpectralError::UnsupportedVertexInU0(_))
        ));
        assert_eq!(heat_evolve(&op, &u0, &[1.0, 0.5]).err(), Some(SpectralError::BadTimes));
    }

    #[test]
    fn kernel_basics() {
        let g = unit_line(40);
        let ex = ball_exhaustion(&g, 0, &[4, 8, 16, 32], false).unwrap();
        let k0 = kernel_estimate(&g, &ex, 0, 0, 0.0, 1e-8).unwrap();
        assert!(k0.per_region.iter().all(|&p| p == 1.0));
        let k = kernel_estimate(&g, &ex, 0, 0, 1.0, 1e-8).unwrap();
        assert!(k.per_region.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let a = kernel_estimate(&g, &ex, 0, 3, 1.0, 1e-8).unwrap();
        let b = kernel_estimate(&g, &ex, 3, 0, 1.0, 1e-8).unwrap();
        assert!((a.limit_estimate - b.limit_estimate).abs() <= 1e-10 * a.limit_estimate);
        assert!(matches!(
            kernel_estimate(&g, &ex, 0, 5, 1.0, 1e-8),
            Err(SpectralError::VertexOutsideFirstRegion(_))
        ));
    }

    #[test]
    fn l2_examples() {
        let g = path3();
        assert_eq!(l2_norm(&g, &vec![0.0; 3]).unwrap(), 0.0);
        assert_eq!(l2_norm(&g, &vec![1.0, 0.0, 0.0]).unwrap(), 1.0);
        let g2 = build_graph(
            &[("a", "b", 1.0), ("b", "c", 1.0)],
            &[("a", 2.0), ("b", 2.0), ("c", 2.0)],
            &[],
        )
        .unwrap();
        assert!((l2_norm(&g2, &vec![1.0; 3]).unwrap() - 6f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            l2_norm(&g2, &vec![1.0; 2]),
            Err(SpectralError::MissingValue(_))
        ));
    }
}
