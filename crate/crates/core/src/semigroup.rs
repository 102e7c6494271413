//! Diagonal generator models with closed-form orbits, resolvents and
//! boundary functions.
//!
//! The sequence space carries the supremum norm, so every operator norm of a
//! diagonal map is the largest modulus over the modes.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rate_functions::{MonotoneFunction, Shape};
use crate::scalar::Real;

const PARALLEL_MODES: usize = 4096;
const POINTS_PER_GAP: usize = 10;

/// Finite diagonal generator `A = diag(λ_1, ..., λ_N)` with `Re λ_n < 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator<T> {
    eigenvalues: Vec<Complex<T>>,
    label: String,
    /// `(Im λ_n, n)` sorted by imaginary part.
    by_ordinate: Vec<(T, usize)>,
}

impl<T: Real> DiagonalOperator<T> {
    pub fn new(eigenvalues: Vec<Complex<T>>, label: impl Into<String>) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(Error::InvalidParameter {
                name: "eigenvalues",
                reason: "need at least one mode".into(),
            });
        }
        for (n, l) in eigenvalues.iter().enumerate() {
            if !(l.re < T::zero()) || !l.im.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "eigenvalues",
                    reason: format!("mode {n} has Re λ = {} (need a finite value below 0)", l.re.as_f64()),
                });
            }
        }
        let mut by_ordinate: Vec<(T, usize)> = eigenvalues.iter().enumerate().map(|(n, l)| (l.im, n)).collect();
        by_ordinate.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        Ok(Self {
            eigenvalues,
            label: label.into(),
            by_ordinate,
        })
    }

    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `dist(is, σ(A))`.
    pub fn spectral_distance(&self, s: T) -> T {
        let start = self.by_ordinate.partition_point(|&(im, _)| im < s);
        let mut best = T::infinity();
        let dist = |n: usize| (Complex::new(T::zero(), s) - self.eigenvalues[n]).norm();
        // Walk outwards from the insertion point while ordinates can still win.
        for &(im, n) in self.by_ordinate[start..].iter() {
            if im - s >= best {
                break;
            }
            best = best.min(dist(n));
        }
        for &(im, n) in self.by_ordinate[..start].iter().rev() {
            if s - im >= best {
                break;
            }
            best = best.min(dist(n));
        }
        best
    }

    /// `‖R(is, A)‖ = 1 / dist(is, σ(A))`.
    pub fn resolvent_norm(&self, s: T) -> Result<T> {
        let d = self.spectral_distance(s);
        if d > T::zero() {
            Ok(d.recip())
        } else {
            Err(Error::SpectralPoint { s: s.as_f64() })
        }
    }

    /// `max(‖R(is, A)‖, ‖R(-is, A)‖)`, the value an envelope of `|s|` must dominate.
    fn symmetric_resolvent(&self, s: T) -> Result<T> {
        Ok(self.resolvent_norm(s)?.max(self.resolvent_norm(-s)?))
    }

    /// Sorted distinct non-negative abscissae `|Im λ_n|` inside `[lo, hi]`.
    fn ordinates_within(&self, lo: T, hi: T) -> Vec<T> {
        let mut out: Vec<T> = self
            .eigenvalues
            .iter()
            .map(|l| l.im.abs())
            .filter(|&v| v >= lo && v <= hi)
            .collect();
        sort_dedup(&mut out);
        out
    }
}

fn sort_dedup<T: Real>(v: &mut Vec<T>) {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * b.abs().max(T::min_positive_value()));
}

/// Which orbit `f(t) = T(t) B x` is observed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind<T> {
    /// `T(t) A^{-1}`.
    Ainv,
    /// `T(t) A R(ω, A)`.
    AROmega,
    /// `T(t) A R(ω, A)²`.
    AROmegaSq,
    /// `T(t) x` for a fixed vector; `None` is the all-ones vector.
    Vector(Option<Vec<T>>),
}

impl<T> OrbitKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            OrbitKind::Ainv => "Ainv",
            OrbitKind::AROmega => "AR_omega",
            OrbitKind::AROmegaSq => "AR_omega_sq",
            OrbitKind::Vector(_) => "vector",
        }
    }
}

/// Scenario generator families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ScenarioFamily<T> {
    /// `λ_n = -n^{-α} + i n`, `n = 1..N`.
    ClusterInfinity { alpha: T, n: usize },
    /// `λ_n = -n^{-β} + i/n`, `n = 1..N`.
    ClusterZero { beta: T, n: usize },
    SingleMode { re: T, im: T },
    /// Both clusters side by side.
    Combined {
        alpha: T,
        beta: T,
        n_infinity: usize,
        n_zero: usize,
    },
}

impl<T: Real> ScenarioFamily<T> {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioFamily::ClusterInfinity { .. } => "cluster_infinity",
            ScenarioFamily::ClusterZero { .. } => "cluster_zero",
            ScenarioFamily::SingleMode { .. } => "single_mode",
            ScenarioFamily::Combined { .. } => "combined",
        }
    }

    /// Eigenvalues and the index range of each cluster.
    fn modes(&self) -> Result<(Vec<Complex<T>>, Vec<Range<usize>>)> {
        let count = |n: usize, name: &'static str| {
            if n == 0 {
                Err(Error::InvalidParameter {
                    name,
                    reason: "need at least one mode".into(),
                })
            } else {
                Ok(n)
            }
        };
        let infinity = |alpha: T, n: usize| -> Result<Vec<Complex<T>>> {
            if !(alpha > T::zero()) {
                return Err(Error::InvalidParameter {
                    name: "alpha",
                    reason: "must be positive".into(),
                });
            }
            Ok((1..=count(n, "n")?)
                .map(|k| {
                    let k = T::from_count(k);
                    Complex::new(-k.powf(-alpha), k)
                })
                .collect())
        };
        let zero = |beta: T, n: usize| -> Result<Vec<Complex<T>>> {
            if !(beta > T::one()) {
                return Err(Error::InvalidParameter {
                    name: "beta",
                    reason: "must exceed 1".into(),
                });
            }
            Ok((1..=count(n, "n")?)
                .map(|k| {
                    let k = T::from_count(k);
                    Complex::new(-k.powf(-beta), k.recip())
                })
                .collect())
        };
        Ok(match self {
            ScenarioFamily::ClusterInfinity { alpha, n } => (infinity(*alpha, *n)?, vec![0..*n]),
            ScenarioFamily::ClusterZero { beta, n } => (zero(*beta, *n)?, vec![0..*n]),
            ScenarioFamily::SingleMode { re, im } => (vec![Complex::new(*re, *im)], vec![0..1]),
            ScenarioFamily::Combined {
                alpha,
                beta,
                n_infinity,
                n_zero,
            } => {
                let mut modes = infinity(*alpha, *n_infinity)?;
                modes.extend(zero(*beta, *n_zero)?);
                (modes, vec![0..*n_infinity, *n_infinity..*n_infinity + *n_zero])
            }
        })
    }
}

impl<T: Real> fmt::Display for ScenarioFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioFamily::ClusterInfinity { alpha, n } => write!(f, "cluster_infinity(alpha={alpha}, N={n})"),
            ScenarioFamily::ClusterZero { beta, n } => write!(f, "cluster_zero(beta={beta}, N={n})"),
            ScenarioFamily::SingleMode { re, im } => write!(f, "single_mode({re}{im:+}i)"),
            ScenarioFamily::Combined {
                alpha,
                beta,
                n_infinity,
                n_zero,
            } => write!(f, "combined(alpha={alpha}, beta={beta}, N={n_infinity}+{n_zero})"),
        }
    }
}

/// An operator together with the orbit under observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    family: ScenarioFamily<T>,
    operator: DiagonalOperator<T>,
    orbit: OrbitKind<T>,
    omega: T,
    clusters: Vec<Range<usize>>,
    /// `f_n(t) = coefficients[n] e^{λ_n t}`.
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> Scenario<T> {
    pub const DEFAULT_OMEGA: f64 = 1.0;

    pub fn new(family: ScenarioFamily<T>, orbit: OrbitKind<T>, omega: T) -> Result<Self> {
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "must be positive and finite".into(),
            });
        }
        let (modes, clusters) = family.modes()?;
        let operator = DiagonalOperator::new(modes, family.to_string())?;
        let w = Complex::new(omega, T::zero());
        let coefficients: Vec<Complex<T>> = match &orbit {
            OrbitKind::Ainv => operator.eigenvalues.iter().map(|l| l.inv()).collect(),
            OrbitKind::AROmega => operator.eigenvalues.iter().map(|l| l / (w - l)).collect(),
            OrbitKind::AROmegaSq => operator
                .eigenvalues
                .iter()
                .map(|l| {
                    let d = w - l;
                    l / (d * d)
                })
                .collect(),
            OrbitKind::Vector(x) => match x {
                None => vec![Complex::new(T::one(), T::zero()); operator.len()],
                Some(x) => {
                    if x.len() != operator.len() {
                        return Err(Error::InvalidParameter {
                            name: "x",
                            reason: format!("vector has {} entries for {} modes", x.len(), operator.len()),
                        });
                    }
                    let norm = x.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                    if !norm.is_finite() {
                        return Err(Error::InvalidParameter {
                            name: "x",
                            reason: "vector must be finite".into(),
                        });
                    }
                    // Scaled to unit sup-norm; the zero vector stays zero.
                    let scale = if norm > T::zero() { norm.recip() } else { T::zero() };
                    x.iter().map(|v| Complex::new(*v * scale, T::zero())).collect()
                }
            },
        };
        Ok(Self {
            family,
            operator,
            orbit,
            omega,
            clusters,
            coefficients,
        })
    }

    /// `ω = 1`.
    pub fn with_default_omega(family: ScenarioFamily<T>, orbit: OrbitKind<T>) -> Result<Self> {
        Self::new(family, orbit, T::lit(Self::DEFAULT_OMEGA))
    }

    pub fn family(&self) -> &ScenarioFamily<T> {
        &self.family
    }

    pub fn operator(&self) -> &DiagonalOperator<T> {
        &self.operator
    }

    pub fn orbit(&self) -> &OrbitKind<T> {
        &self.orbit
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    /// Componentwise orbit `f_n(t)`.
    pub fn orbit_components(&self, t: T) -> Vec<Complex<T>> {
        self.coefficients
            .iter()
            .zip(&self.operator.eigenvalues)
            .map(|(c, l)| c * (l * t).exp())
            .collect()
    }

    fn mode_magnitude(&self, n: usize, t: T) -> T {
        self.coefficients[n].norm() * (self.operator.eigenvalues[n].re * t).exp()
    }

    /// `(n, |f_n(t)|)` for the largest mode.
    pub fn maximising_mode(&self, t: T) -> (usize, T) {
        let pick = |a: (usize, T), b: (usize, T)| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a };
        let n = self.operator.len();
        if n >= PARALLEL_MODES {
            (0..n)
                .into_par_iter()
                .map(|k| (k, self.mode_magnitude(k, t)))
                .reduce(|| (0, T::neg_infinity()), pick)
        } else {
            (0..n).map(|k| (k, self.mode_magnitude(k, t))).fold((0, T::neg_infinity()), pick)
        }
    }

    /// `‖f(t)‖`: the exact operator norm for the operator orbits.
    pub fn orbit_norm(&self, t: T) -> Result<T> {
        if !(t >= T::zero()) || !t.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t",
                reason: format!("need finite t >= 0, got {}", t.as_f64()),
            });
        }
        Ok(self.maximising_mode(t).1)
    }

    /// Errors when the maximising mode sits in the upper half of its cluster,
    /// where truncation of the infinite model would bias the value.
    pub fn check_truncation(&self, t: T) -> Result<()> {
        let (mode, _) = self.maximising_mode(t);
        let cluster = self.clusters.iter().find(|r| r.contains(&mode)).expect("mode in a cluster");
        let position = mode - cluster.start;
        if cluster.len() > 1 && 2 * position >= cluster.len() {
            return Err(Error::TruncationUnsafe {
                t: t.as_f64(),
                mode: position + 1,
                modes: cluster.len(),
            });
        }
        Ok(())
    }

    /// `F^{(j)}(s)` componentwise: `(-i)^j j! c_n / (is - λ_n)^{j+1}`.
    pub fn boundary_function(&self, s: T, j: u32) -> Result<Vec<Complex<T>>> {
        let is = Complex::new(T::zero(), s);
        let mut factor = Complex::new(T::one(), T::zero());
        for k in 1..=j {
            factor = factor * Complex::new(T::zero(), -T::from_count(k as usize));
        }
        self.coefficients
            .iter()
            .zip(&self.operator.eigenvalues)
            .map(|(c, l)| {
                let d = is - l;
                if d.norm() == T::zero() {
                    return Err(Error::SpectralPoint { s: s.as_f64() });
                }
                Ok(factor * c / d.powi(j as i32 + 1))
            })
            .collect()
    }

    /// `‖F^{(j)}(s)‖` in the supremum norm.
    pub fn boundary_norm(&self, s: T, j: u32) -> Result<T> {
        Ok(self.boundary_function(s, j)?.iter().fold(T::zero(), |m, v| m.max(v.norm())))
    }
}

/// How a sampled running maximum is turned into a continuous envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeShape {
    /// Running maximum through every sample, linearly interpolated.
    #[default]
    RunningMax,
    /// Least concave majorant of the running maximum.
    ConcaveMajorant,
}

/// Growth envelope `M(R) >= max(1, sup_{from <= |s| <= R} ‖R(is, A)‖)` sampled on
/// the grid, the eigenvalue ordinates, their midpoints and ten points per gap.
/// Below `from` the envelope is constant.
pub fn resolvent_envelope_growth<T: Real>(
    operator: &DiagonalOperator<T>,
    grid: &[T],
    shape: EnvelopeShape,
    from: T,
) -> Result<MonotoneFunction<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "envelope grid must be non-empty".into(),
        });
    }
    if !(from >= T::zero()) {
        return Err(Error::InvalidParameter {
            name: "from",
            reason: "must be non-negative".into(),
        });
    }
    let top = grid.iter().fold(from, |m, &v| m.max(v.abs()));
    let ordinates = operator.ordinates_within(from, top);
    let mut samples: Vec<T> = grid.iter().map(|v| v.abs()).filter(|&v| v >= from).collect();
    samples.push(from);
    samples.push(top);
    samples.extend(refine(&ordinates));
    sort_dedup(&mut samples);
    let raw = samples
        .par_iter()
        .map(|&s| operator.symmetric_resolvent(s))
        .collect::<Result<Vec<T>>>()?;
    let mut values = Vec::with_capacity(raw.len());
    let mut running = T::one();
    for v in raw {
        running = running.max(v);
        values.push(running);
    }
    let (knots, values) = match shape {
        EnvelopeShape::RunningMax => (samples, values),
        EnvelopeShape::ConcaveMajorant => concave_majorant(&samples, &values),
    };
    MonotoneFunction::tabulated(Shape::Growth, knots, values)
}

/// Decay envelope `m(r) >= max(1, 1/r, sup_{r <= |s| <= 1} ‖R(is, A)‖)` for
/// `r` in `(0, 1]`.
pub fn resolvent_envelope_decay<T: Real>(operator: &DiagonalOperator<T>, grid: &[T]) -> Result<MonotoneFunction<T>> {
    let mut samples: Vec<T> = grid
        .iter()
        .map(|v| v.abs())
        .filter(|&v| v > T::zero() && v <= T::one())
        .collect();
    if samples.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "decay envelope grid needs points in (0, 1]".into(),
        });
    }
    let bottom = samples.iter().copied().fold(T::one(), T::min);
    let ordinates = operator.ordinates_within(bottom, T::one());
    samples.push(T::one());
    samples.extend(refine(&ordinates));
    sort_dedup(&mut samples);
    let raw = samples
        .par_iter()
        .map(|&s| operator.symmetric_resolvent(s))
        .collect::<Result<Vec<T>>>()?;
    // Running maximum from r = 1 downwards; the 1/r clamp is applied at
    // evaluation so it is exact between knots too.
    let mut values = vec![T::zero(); raw.len()];
    let mut running = T::one();
    for i in (0..raw.len()).rev() {
        running = running.max(raw[i]);
        values[i] = running;
    }
    MonotoneFunction::tabulated(Shape::Decay, samples, values)?.with_reciprocal_floor()
}

/// Ordinates, midpoints and `POINTS_PER_GAP` uniform points in every gap.
fn refine<T: Real>(ordinates: &[T]) -> Vec<T> {
    let mut out = ordinates.to_vec();
    for w in ordinates.windows(2) {
        let gap = w[1] - w[0];
        out.push(w[0] + gap * T::lit(0.5));
        for j in 1..=POINTS_PER_GAP {
            out.push(w[0] + gap * T::from_count(j) / T::from_count(POINTS_PER_GAP + 1));
        }
    }
    out
}

/// Upper concave hull of the points `(x_i, y_i)`, `x` increasing.
fn concave_majorant<T: Real>(x: &[T], y: &[T]) -> (Vec<T>, Vec<T>) {
    let mut hull: Vec<usize> = Vec::new();
    for i in 0..x.len() {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // Drop b when it lies on or below the chord from a to i.
            let cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
            if cross >= T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    (hull.iter().map(|&i| x[i]).collect(), hull.iter().map(|&i| y[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rate_functions::MonotoneEval;

    fn single(re: f64, im: f64, orbit: OrbitKind<f64>) -> Scenario<f64> {
        Scenario::with_default_omega(ScenarioFamily::SingleMode { re, im }, orbit).unwrap()
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(single(-1.0, 0.0, OrbitKind::Ainv).orbit_norm(0.0).unwrap(), 1.0);
        let v = single(-1.0, 1.0, OrbitKind::Ainv).orbit_norm(1.0).unwrap();
        assert!((v - (-1f64).exp() / 2f64.sqrt()).abs() < 1e-15);
        assert!((v - 0.260130).abs() < 1e-6);
    }

    #[test]
    fn resolvent_examples() {
        let a = DiagonalOperator::new(vec![Complex::new(-1.0f64, 1.0)], "m").unwrap();
        assert!((a.resolvent_norm(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((a.resolvent_norm(0.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        let s = Scenario::with_default_omega(ScenarioFamily::ClusterInfinity { alpha: 1.0, n: 200 }, OrbitKind::Ainv).unwrap();
        for n in [1usize, 7, 150] {
            let v = s.operator().resolvent_norm(n as f64).unwrap();
            assert!((v - n as f64).abs() < 1e-9 * n as f64);
        }
    }

    #[test]
    fn fast_distance_matches_scan() {
        let s = Scenario::with_default_omega(ScenarioFamily::ClusterZero { beta: 2.0, n: 300 }, OrbitKind::AROmega).unwrap();
        let op = s.operator();
        for k in 0..500 {
            let x = -1.5 + 3.0 * k as f64 / 499.0;
            let scan = op
                .eigenvalues()
                .iter()
                .map(|l| (Complex::new(0.0, x) - l).norm())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(op.spectral_distance(x), scan);
        }
    }

    #[test]
    fn boundary_function_at_single_mode() {
        let s = single(-1.0, 0.0, OrbitKind::Ainv);
        let f0 = s.boundary_function(0.0, 0).unwrap()[0];
        assert!((f0 - Complex::new(-1.0, 0.0)).norm() < 1e-15);
        let f1 = s.boundary_function(0.0, 1).unwrap()[0];
        assert!((f1 - Complex::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn boundary_function_matches_resolvent_formula() {
        // F(s) = (isR(is,A) - I)R(ω,A)x for the AR_omega orbit.
        let s = single(-0.3, 0.7, OrbitKind::AROmega);
        let l = Complex::new(-0.3, 0.7);
        let is = Complex::new(0.0, 1.25);
        let expected = (is / (is - l) - 1.0) / (Complex::new(1.0, 0.0) - l);
        let got = s.boundary_function(1.25, 0).unwrap()[0];
        assert!((got - expected).norm() < 1e-15);
    }

    #[test]
    fn envelope_examples() {
        let one = DiagonalOperator::new(vec![Complex::new(-1.0f64, 1.0)], "m").unwrap();
        let m = resolvent_envelope_growth(&one, &[0.0, 1.0, 2.0], EnvelopeShape::RunningMax, 0.0).unwrap();
        assert_eq!(m.eval(1.0).unwrap(), 1.0);
        assert_eq!(m.eval(0.0).unwrap(), 1.0);

        let c = Scenario::with_default_omega(ScenarioFamily::ClusterInfinity { alpha: 1.0, n: 50 }, OrbitKind::Ainv).unwrap();
        let grid: Vec<f64> = (0..=100).map(|k| k as f64 * 0.5).collect();
        let m = resolvent_envelope_growth(c.operator(), &grid, EnvelopeShape::RunningMax, 0.0).unwrap();
        for r in [1.0, 2.5, 10.0, 33.7, 49.99] {
            let v = m.eval(r).unwrap();
            assert!(v >= r.floor() * (1.0 - 1e-9) && v <= r.floor() + 1.0, "R={r}: {v}");
        }
        let concave = resolvent_envelope_growth(c.operator(), &grid, EnvelopeShape::ConcaveMajorant, 0.0).unwrap();
        for r in [1.0, 2.5, 10.0, 33.7] {
            assert!(concave.eval(r).unwrap() >= m.eval(r).unwrap() * (1.0 - 1e-12));
        }

        let d = single(-1.0, 0.0, OrbitKind::Ainv);
        let m = resolvent_envelope_decay(d.operator(), &[0.01, 0.1, 0.5, 1.0]).unwrap();
        for r in [0.01, 0.3, 1.0] {
            assert!((m.eval(r).unwrap() - (1.0f64).max(1.0 / r)).abs() < 1e-12);
        }
    }

    #[test]
    fn decay_envelope_of_zero_cluster() {
        let c = Scenario::with_default_omega(ScenarioFamily::ClusterZero { beta: 2.0, n: 100 }, OrbitKind::AROmega).unwrap();
        let grid: Vec<f64> = (1..=100).map(|k| 1.0 / k as f64).collect();
        let m = resolvent_envelope_decay(c.operator(), &grid).unwrap();
        // Neighbouring modes lie closer than the real part, so the peak at
        // 1/n sits somewhat above n^2 and approaches it slowly.
        for n in [10usize, 60] {
            let r = 1.0 / n as f64;
            let v = m.eval(r).unwrap();
            let ratio = v / (n * n) as f64;
            assert!((1.0..1.5).contains(&ratio), "n={n}: {v}");
        }
        let rf = crate::rate_functions::RateFunction::new(m, crate::rate_functions::Composition::Logarithmic).unwrap();
        assert!(rf.value(0.5).unwrap().is_finite());
    }

    #[test]
    fn truncation_guard() {
        let s = Scenario::with_default_omega(ScenarioFamily::ClusterInfinity { alpha: 1.0, n: 100 }, OrbitKind::Ainv).unwrap();
        assert!(s.check_truncation(10.0).is_ok());
        assert!(matches!(s.check_truncation(90.0), Err(Error::TruncationUnsafe { .. })));
    }

    #[test]
    fn invalid_families() {
        let bad = ScenarioFamily::ClusterZero { beta: 1.0, n: 10 };
        assert!(Scenario::with_default_omega(bad, OrbitKind::<f64>::AROmega).is_err());
        let bad = ScenarioFamily::SingleMode { re: 0.0, im: 1.0 };
        assert!(Scenario::with_default_omega(bad, OrbitKind::<f64>::Ainv).is_err());
        let good = ScenarioFamily::SingleMode { re: -1.0, im: 1.0 };
        assert!(Scenario::new(good, OrbitKind::<f64>::Ainv, 0.0).is_err());
    }
}
