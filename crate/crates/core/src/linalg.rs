//! Sample matrices, the covariance transform and a cyclic Jacobi eigensolver.

use std::fmt::Write as _;

use rand::RngCore;

use crate::dist::EntryDistribution;
use crate::error::{dimension, domain, Error, Result};
use crate::rng::stream_rng;

/// Off-diagonal Frobenius tolerance relative to `‖W‖_F`.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// A `k × n` matrix `C` of i.i.d. entries, stored row-major. Row `m` is the
/// length-`n` code of user `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    k: usize,
    n: usize,
    entries: Vec<f64>,
    seed: u64,
    dist: EntryDistribution,
}

impl SampleMatrix {
    /// Draw a fresh matrix from `dist`; identical arguments give identical bits.
    pub fn sample(dist: EntryDistribution, k: usize, n: usize, seed: u64) -> Result<Self> {
        check_dims(k, n)?;
        let mut rng = stream_rng(seed, 0);
        Ok(Self::sample_with(dist, k, n, seed, &mut rng))
    }

    /// Draw using a caller-owned generator; `seed` is only recorded.
    pub fn sample_with<R: RngCore + ?Sized>(
        dist: EntryDistribution,
        k: usize,
        n: usize,
        seed: u64,
        rng: &mut R,
    ) -> Self {
        let mut entries = vec![0.0; k * n];
        for row in entries.chunks_mut(n) {
            dist.fill(rng, row);
        }
        Self {
            k,
            n,
            entries,
            seed,
            dist,
        }
    }

    /// Wrap explicit entries (row-major).
    pub fn from_rows(
        dist: EntryDistribution,
        k: usize,
        n: usize,
        entries: Vec<f64>,
    ) -> Result<Self> {
        check_dims(k, n)?;
        if entries.len() != k * n {
            return Err(dimension(format!(
                "expected {} entries for a {k}x{n} matrix, got {}",
                k * n,
                entries.len()
            )));
        }
        Ok(Self {
            k,
            n,
            entries,
            seed: 0,
            dist,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dist(&self) -> EntryDistribution {
        self.dist
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.entries[m * self.n..(m + 1) * self.n]
    }

    pub fn get(&self, m: usize, i: usize) -> f64 {
        self.entries[m * self.n + i]
    }

    /// `W = (1/n) C Cᵀ`.
    pub fn covariance(&self) -> CovMatrix {
        let (k, n) = (self.k, self.n);
        let inv_n = 1.0 / n as f64;
        let mut w = vec![0.0; k * k];
        for a in 0..k {
            let ra = self.row(a);
            for b in a..k {
                let rb = self.row(b);
                let dot: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
                w[a * k + b] = dot * inv_n;
                w[b * k + a] = dot * inv_n;
            }
        }
        CovMatrix { k, n, data: w }
    }

    /// `⟨x, W x⟩` evaluated as `(1/n) Σ_i S_{x,i}²` with `S_{x,i} = Σ_m x_m C_mi`.
    pub fn quadratic_form(&self, x: &UnitVector) -> Result<f64> {
        if x.dim() != self.k {
            return Err(dimension(format!(
                "direction has {} coordinates, matrix has {} rows",
                x.dim(),
                self.k
            )));
        }
        let mut total = 0.0;
        for i in 0..self.n {
            let s: f64 = (0..self.k).map(|m| x.coords()[m] * self.get(m, i)).sum();
            total += s * s;
        }
        Ok(total / self.n as f64)
    }

    /// `s = Cᵀ z`, the received chip sequence for signal vector `z`.
    pub fn transmit(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.k {
            return Err(dimension(format!(
                "signal has {} entries, matrix has {} rows",
                z.len(),
                self.k
            )));
        }
        let mut s = vec![0.0; self.n];
        for (m, zm) in z.iter().enumerate() {
            for (si, c) in s.iter_mut().zip(self.row(m)) {
                *si += zm * c;
            }
        }
        Ok(s)
    }

    /// `(1/n) C s`, correlation of a chip sequence with every code.
    pub fn correlate(&self, s: &[f64]) -> Result<Vec<f64>> {
        if s.len() != self.n {
            return Err(dimension(format!(
                "chip sequence has {} entries, codes have length {}",
                s.len(),
                self.n
            )));
        }
        let inv_n = 1.0 / self.n as f64;
        Ok((0..self.k)
            .map(|m| self.row(m).iter().zip(s).map(|(c, v)| c * v).sum::<f64>() * inv_n)
            .collect())
    }

    /// Plain CSV layout: a `k,n,seed,dist` header, its value row, then `k`
    /// comma-separated rows of `n` entries.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,n,seed,dist\n");
        let _ = writeln!(out, "{},{},{},{}", self.k, self.n, self.seed, self.dist);
        for m in 0..self.k {
            let row: Vec<String> = self.row(m).iter().map(|v| format!("{v:?}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        if header.trim() != "k,n,seed,dist" {
            return Err(Error::Parse(format!("unexpected header '{header}'")));
        }
        let meta = lines
            .next()
            .ok_or_else(|| Error::Parse("missing metadata row".into()))?;
        let fields: Vec<&str> = meta.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("bad metadata row '{meta}'")));
        }
        let parse_err = |what: &str| Error::Parse(format!("bad {what} in '{meta}'"));
        let k: usize = fields[0].parse().map_err(|_| parse_err("k"))?;
        let n: usize = fields[1].parse().map_err(|_| parse_err("n"))?;
        let seed: u64 = fields[2].parse().map_err(|_| parse_err("seed"))?;
        let dist: EntryDistribution = fields[3].parse()?;
        let mut entries = Vec::with_capacity(k * n);
        for line in lines {
            for v in line.split(',') {
                entries.push(
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad entry '{v}'")))?,
                );
            }
        }
        let mut c = Self::from_rows(dist, k, n, entries)?;
        c.seed = seed;
        Ok(c)
    }
}

fn check_dims(k: usize, n: usize) -> Result<()> {
    if k == 0 || n == 0 {
        return Err(dimension(format!("k and n must be positive (k={k}, n={n})")));
    }
    Ok(())
}

/// Symmetric `k × k` matrix, typically `W = (1/n) C Cᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    k: usize,
    n: usize,
    data: Vec<f64>,
}

impl CovMatrix {
    /// Wrap an explicit symmetric matrix. `n` is the normalizing sample count
    /// (use 1 when the matrix did not come from a sample).
    pub fn new(k: usize, n: usize, data: Vec<f64>) -> Result<Self> {
        if k == 0 || data.len() != k * k {
            return Err(dimension(format!(
                "expected {}x{} entries, got {}",
                k,
                k,
                data.len()
            )));
        }
        for a in 0..k {
            for b in 0..a {
                let (x, y) = (data[a * k + b], data[b * k + a]);
                if (x - y).abs() > 1e-12 * (1.0 + x.abs().max(y.abs())) {
                    return Err(domain(format!("matrix is not symmetric at ({a},{b})")));
                }
            }
        }
        Ok(Self { k, n, data })
    }

    pub fn identity(k: usize) -> Self {
        let mut data = vec![0.0; k * k];
        for i in 0..k {
            data[i * k + i] = 1.0;
        }
        Self { k, n: 1, data }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.k + b]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// `T_W = Σ_i W_ii`; an upper bound for `λ_max` since `W ⪰ 0`.
    pub fn trace(&self) -> f64 {
        (0..self.k).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let k = self.k;
        (0..k)
            .map(|a| {
                self.data[a * k..(a + 1) * k]
                    .iter()
                    .zip(x)
                    .map(|(w, v)| w * v)
                    .sum()
            })
            .collect()
    }

    /// `⟨x, W x⟩`.
    pub fn bilinear(&self, x: &[f64]) -> f64 {
        self.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Full eigendecomposition by cyclic Jacobi rotations.
    pub fn spectrum(&self) -> Result<Spectrum> {
        jacobi(self.k, &self.data)
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Column `j` (stored row-major, `vectors[i * k + j]`) is the eigenvector
    /// of `eigenvalues[j]`.
    vectors: Vec<f64>,
    offdiag_residual: f64,
    sweeps: usize,
}

impl Spectrum {
    /// Build from explicit eigenvalues with the identity as eigenbasis.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let k = eigenvalues.len();
        let mut vectors = vec![0.0; k * k];
        for i in 0..k {
            vectors[i * k + i] = 1.0;
        }
        Self {
            eigenvalues,
            vectors,
            offdiag_residual: 0.0,
            sweeps: 0,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        let k = self.k();
        (0..k).map(|i| self.vectors[i * k + j]).collect()
    }

    pub fn vectors(&self) -> &[f64] {
        &self.vectors
    }

    pub fn offdiag_residual(&self) -> f64 {
        self.offdiag_residual
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    /// Number of eigenvalues below `tol`.
    pub fn count_below(&self, tol: f64) -> usize {
        self.eigenvalues.iter().take_while(|&&l| l < tol).count()
    }

    /// `Q Λ Qᵀ`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let k = self.k();
        let mut out = vec![0.0; k * k];
        for a in 0..k {
            for b in 0..k {
                out[a * k + b] = (0..k)
                    .map(|j| self.vectors[a * k + j] * self.eigenvalues[j] * self.vectors[b * k + j])
                    .sum();
            }
        }
        out
    }

    /// `max |QᵀQ − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let k = self.k();
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in 0..k {
                let dot: f64 = (0..k)
                    .map(|i| self.vectors[i * k + a] * self.vectors[i * k + b])
                    .sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

fn offdiag_norm(k: usize, a: &[f64]) -> f64 {
    let mut s = 0.0;
    for p in 0..k {
        for q in 0..k {
            if p != q {
                s += a[p * k + q] * a[p * k + q];
            }
        }
    }
    s.sqrt()
}

fn jacobi(k: usize, w: &[f64]) -> Result<Spectrum> {
    let mut a = w.to_vec();
    let mut v = vec![0.0; k * k];
    for i in 0..k {
        v[i * k + i] = 1.0;
    }
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOL * norm;
    let mut sweeps = 0;
    let mut off = offdiag_norm(k, &a);
    while off > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * k + p];
                let aqq = a[q * k + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // A ← Jᵀ A J acting on rows/columns p and q.
                for r in 0..k {
                    let arp = a[r * k + p];
                    let arq = a[r * k + q];
                    a[r * k + p] = c * arp - s * arq;
                    a[r * k + q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p * k + r];
                    let aqr = a[q * k + r];
                    a[p * k + r] = c * apr - s * aqr;
                    a[q * k + r] = s * apr + c * aqr;
                }
                a[p * k + q] = 0.0;
                a[q * k + p] = 0.0;
                for r in 0..k {
                    let vrp = v[r * k + p];
                    let vrq = v[r * k + q];
                    v[r * k + p] = c * vrp - s * vrq;
                    v[r * k + q] = s * vrp + c * vrq;
                }
            }
        }
        off = offdiag_norm(k, &a);
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[i * k + i].total_cmp(&a[j * k + j]));
    let eigenvalues = order.iter().map(|&i| a[i * k + i]).collect();
    let mut vectors = vec![0.0; k * k];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..k {
            vectors[r * k + new] = v[r * k + old];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        vectors,
        offdiag_residual: off,
        sweeps,
    })
}

/// Unit-norm direction in `R^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    coords: Vec<f64>,
}

impl UnitVector {
    /// Normalize `v`; fails on an empty or zero vector.
    pub fn normalize(v: Vec<f64>) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if v.is_empty() || !norm.is_finite() || norm == 0.0 {
            return Err(domain("cannot normalize an empty, zero or non-finite vector"));
        }
        Ok(Self {
            coords: v.into_iter().map(|x| x / norm).collect(),
        })
    }

    /// `e_i` in `R^k`.
    pub fn basis(k: usize, i: usize) -> Self {
        let mut coords = vec![0.0; k];
        coords[i] = 1.0;
        Self { coords }
    }

    /// `(1, …, 1, 0, …, 0)/√j` with `j` leading ones.
    pub fn leading_ones(k: usize, j: usize) -> Self {
        assert!(j >= 1 && j <= k);
        let v = 1.0 / (j as f64).sqrt();
        let coords = (0..k).map(|i| if i < j { v } else { 0.0 }).collect();
        Self { coords }
    }

    /// Uniformly random direction.
    pub fn random<R: RngCore + ?Sized>(k: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..k)
                .map(|_| EntryDistribution::Normal.sample(rng))
                .collect();
            if let Ok(u) = Self::normalize(v) {
                return u;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Absolute values sorted in decreasing order. Sign flips and permutations
    /// of the coordinates leave the law of `S_x` unchanged for symmetric
    /// i.i.d. entries.
    pub fn canonical(&self) -> Self {
        let mut coords: Vec<f64> = self.coords.iter().map(|v| v.abs()).collect();
        coords.sort_by(|a, b| b.total_cmp(a));
        Self { coords }
    }
}

/// Free-function forms of the methods above.
pub fn sample_matrix(dist: EntryDistribution, k: usize, n: usize, seed: u64) -> Result<SampleMatrix> {
    SampleMatrix::sample(dist, k, n, seed)
}

pub fn covariance(c: &SampleMatrix) -> CovMatrix {
    c.covariance()
}

pub fn spectrum(w: &CovMatrix) -> Result<Spectrum> {
    w.spectrum()
}

pub fn quadratic_form(c: &SampleMatrix, x: &UnitVector) -> Result<f64> {
    c.quadratic_form(x)
}

/// `T_W`, the trace of `W`.
pub fn trace_stat(w: &CovMatrix) -> f64 {
    w.trace()
}

/// Limits `((1 − √β)₊², (1 + √β)²)` of `λ_min` and `λ_max` when `k/n → β`.
pub fn mp_edges(beta: f64) -> Result<(f64, f64)> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(domain(format!("aspect ratio must be non-negative, got {beta}")));
    }
    let r = beta.sqrt();
    Ok(((1.0 - r).max(0.0).powi(2), (1.0 + r).powi(2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use EntryDistribution::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rademacher_support_and_determinism() {
        let c = SampleMatrix::sample(Rademacher, 2, 4, 99).unwrap();
        assert!(c.entries().iter().all(|&v| v == 1.0 || v == -1.0));
        let d = SampleMatrix::sample(Normal, 3, 3, 5).unwrap();
        assert_eq!(d, SampleMatrix::sample(Normal, 3, 3, 5).unwrap());
        assert_ne!(d, SampleMatrix::sample(Normal, 3, 3, 6).unwrap());
    }

    #[test]
    fn zero_dimensions_rejected() {
        assert!(matches!(
            SampleMatrix::sample(Rademacher, 0, 4, 1),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            SampleMatrix::sample(Rademacher, 2, 0, 1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn uniform_long_row_moments() {
        let c = SampleMatrix::sample(Uniform, 1, 1_000_000, 17).unwrap();
        let n = c.n() as f64;
        let mean = c.entries().iter().sum::<f64>() / n;
        let var = c.entries().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() <= 0.005, "mean {mean}");
        assert!((var - 1.0).abs() <= 0.01, "var {var}");
    }

    #[test]
    fn orthogonal_rows_give_identity() {
        let c = SampleMatrix::from_rows(Rademacher, 2, 2, vec![1.0, 1.0, 1.0, -1.0]).unwrap();
        assert_eq!(c.covariance().data(), &[1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn equal_rows_give_zero_eigenvalue() {
        let c = SampleMatrix::from_rows(
            Rademacher,
            2,
            4,
            vec![1.0, -1.0, 1.0, 1.0, 1.0, -1.0, 1.0, 1.0],
        )
        .unwrap();
        let spec = c.covariance().spectrum().unwrap();
        assert!(spec.min().abs() < 1e-12);
        assert!(approx(spec.max(), 2.0, 1e-12));
    }

    #[test]
    fn single_row_is_mean_square() {
        let c = SampleMatrix::from_rows(Uniform, 1, 3, vec![0.5, -1.0, 1.5]).unwrap();
        let w = c.covariance();
        assert_eq!(w.k(), 1);
        assert!(approx(w.get(0, 0), (0.25 + 1.0 + 2.25) / 3.0, 1e-15));
        let spec = w.spectrum().unwrap();
        assert_eq!(spec.min(), spec.max());
    }

    #[test]
    fn identity_and_rank_one_spectra() {
        let s = CovMatrix::identity(2).spectrum().unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, 1.0]);
        let w = CovMatrix::new(2, 1, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let s = w.spectrum().unwrap();
        assert!(approx(s.eigenvalues()[0], 0.0, 1e-14));
        assert!(approx(s.eigenvalues()[1], 2.0, 1e-14));
    }

    #[test]
    fn wishart_k5_invariants() {
        let c = SampleMatrix::sample(Normal, 5, 12, 2024).unwrap();
        let w = c.covariance();
        let s = w.spectrum().unwrap();
        let sum: f64 = s.eigenvalues().iter().sum();
        assert!(approx(sum, w.trace(), 1e-9));
        assert!(s.orthogonality_defect() <= 1e-9);
        let rec = s.reconstruct();
        let worst = rec
            .iter()
            .zip(w.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-9);
        assert!(s.eigenvalues().windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn non_symmetric_rejected() {
        assert!(CovMatrix::new(2, 1, vec![1.0, 2.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn quadratic_form_paths_agree() {
        for seed in 0..100u64 {
            let c = SampleMatrix::sample(Rademacher, 4, 9, seed).unwrap();
            let x = UnitVector::random(4, &mut stream_rng(seed, 77));
            let q = c.quadratic_form(&x).unwrap();
            let direct = c.covariance().bilinear(x.coords());
            assert!(approx(q, direct, 1e-10));
            assert!(q <= 4.0 + 1e-12);
        }
        let c = SampleMatrix::sample(Normal, 3, 7, 1).unwrap();
        let e1 = UnitVector::basis(3, 0);
        assert!(approx(
            c.quadratic_form(&e1).unwrap(),
            c.covariance().get(0, 0),
            1e-14
        ));
        assert!(c.quadratic_form(&UnitVector::basis(2, 0)).is_err());
    }

    #[test]
    fn rademacher_trace_is_k() {
        let c = SampleMatrix::sample(Rademacher, 6, 10, 3).unwrap();
        assert_eq!(c.covariance().trace(), 6.0);
        assert_eq!(CovMatrix::identity(3).trace(), 3.0);
    }

    #[test]
    fn marchenko_pastur_edges() {
        assert_eq!(mp_edges(0.0).unwrap(), (1.0, 1.0));
        assert_eq!(mp_edges(1.0).unwrap(), (0.0, 4.0));
        let beta = (2f64.sqrt() - 1.0).powi(2);
        let (lo, hi) = mp_edges(beta).unwrap();
        assert!(approx(hi, 2.0, 1e-14));
        assert!(approx(lo, (2.0 - 2f64.sqrt()).powi(2), 1e-14));
        assert!(mp_edges(-0.1).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let c = SampleMatrix::sample(Uniform, 3, 5, 42).unwrap();
        let text = c.to_csv();
        assert!(text.starts_with("k,n,seed,dist\n3,5,42,uniform\n"));
        assert_eq!(SampleMatrix::from_csv(&text).unwrap(), c);
        assert!(SampleMatrix::from_csv("a,b\n").is_err());
    }

    #[test]
    fn canonical_direction() {
        let x = UnitVector::normalize(vec![-0.1, 0.7, -0.3]).unwrap();
        let c = x.canonical();
        assert!(c.coords().iter().all(|&v| v >= 0.0));
        assert!(c.coords().windows(2).all(|p| p[0] >= p[1]));
    }
}
