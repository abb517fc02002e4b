//! The scalar nonlinearities `g, G, α₀, α` and their derivatives.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Closures for a user-defined bundle. Every derivative is supplied by the
/// caller; [`NonlinearityBundle::validate`] cross-checks them by finite
/// differences.
#[derive(Clone)]
pub struct CustomFns {
    pub g: ScalarFn,
    pub dg: ScalarFn,
    pub big_g: ScalarFn,
    pub alpha0: ScalarFn,
    pub dalpha0: ScalarFn,
    pub alpha: ScalarFn,
    pub dalpha: ScalarFn,
    pub ddalpha: ScalarFn,
}

impl fmt::Debug for CustomFns {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("CustomFns")
    }
}

/// Sampled values on an increasing abscissa. Each function is evaluated by
/// cubic Hermite interpolation against its tabulated derivative
/// (`α″` linearly). Outside the table values continue linearly with the end
/// slope, so the derivative identities only hold inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleTable {
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub dg: Vec<f64>,
    pub big_g: Vec<f64>,
    pub alpha0: Vec<f64>,
    pub dalpha0: Vec<f64>,
    pub alpha: Vec<f64>,
    pub dalpha: Vec<f64>,
    pub ddalpha: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Kind {
    Default,
    Table(Arc<BundleTable>),
    Custom(CustomFns),
}

/// `g, G, α₀, α` with `δ_*`, the declared lower bound of `α₀`.
#[derive(Debug, Clone)]
pub struct NonlinearityBundle {
    kind: Kind,
    delta_star: f64,
}

impl NonlinearityBundle {
    /// `g(η) = η − 1`, `G(η) = (η−1)²/2`, `α₀(η) = δ_* + η²`, `α(η) = 1 + η²`.
    ///
    /// ```
    /// use kwcopt::kernel::NonlinearityBundle;
    /// let b = NonlinearityBundle::default_with(1.0);
    /// assert_eq!(b.g(1.0), 0.0);
    /// assert_eq!(b.alpha0(0.0), 1.0);
    /// assert_eq!(b.dalpha(0.0), 0.0);
    /// ```
    pub fn default_with(delta_star: f64) -> Self {
        NonlinearityBundle {
            kind: Kind::Default,
            delta_star,
        }
    }

    pub fn tabulated(table: BundleTable, delta_star: f64) -> Result<Self> {
        let n = table.x.len();
        if n < 2 {
            return Err(Error::Bundle("table needs at least two abscissae".into()));
        }
        if table.x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Bundle("table abscissae must increase strictly".into()));
        }
        let cols = [
            &table.g,
            &table.dg,
            &table.big_g,
            &table.alpha0,
            &table.dalpha0,
            &table.alpha,
            &table.dalpha,
            &table.ddalpha,
        ];
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Bundle("every table column must match the abscissa length".into()));
        }
        Ok(NonlinearityBundle {
            kind: Kind::Table(Arc::new(table)),
            delta_star,
        })
    }

    pub fn custom(fns: CustomFns, delta_star: f64) -> Self {
        NonlinearityBundle {
            kind: Kind::Custom(fns),
            delta_star,
        }
    }

    pub fn delta_star(&self) -> f64 {
        self.delta_star
    }

    pub fn g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Default => x - 1.0,
            Kind::Table(t) => hermite(&t.x, &t.g, &t.dg, x),
            Kind::Custom(c) => (c.g)(x),
        }
    }

    pub fn dg(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Default => 1.0,
            Kind::Table(t) => linear(&t.x, &t.dg, x),
            Kind::Custom(c) => (c.dg)(x),
        }
    }

    #[allow(non_snake_case)]
    pub fn G(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Default => 0.5 * (x - 1.0) * (x - 1.0),
            Kind::Table(t) => hermite(&t.x, &t.big_g, &t.g, x),
            Kind::Custom(c) => (c.big_g)(x),
        }
    }

    pub fn alpha0(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Default => self.delta_star + x * x,
            Kind::Table(t) => hermite(&t.x, &t.alpha0, &t.dalpha0, x),
            Kind::Custom(c) => (c.alpha0)(x),
        }
    }

    pub fn dalpha0(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Default => 2.0 * x,
            Kind::Table(t) => linear(&t.x, &t.dalpha0, x),
            Kind::Custom(c) => (c.dalpha0)(x),
        }
    }

    pub fn alpha(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Default => 1.0 + x * x,
            Kind::Table(t) => hermite(&t.x, &t.alpha, &t.dalpha, x),
            Kind::Custom(c) => (c.alpha)(x),
        }
    }

    pub fn dalpha(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Default => 2.0 * x,
            Kind::Table(t) => hermite(&t.x, &t.dalpha, &t.ddalpha, x),
            Kind::Custom(c) => (c.dalpha)(x),
        }
    }

    pub fn ddalpha(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Default => 2.0,
            Kind::Table(t) => linear(&t.x, &t.ddalpha, x),
            Kind::Custom(c) => (c.ddalpha)(x),
        }
    }

    /// Spot-checks the standing assumptions on `samples` equispaced points of
    /// `[lo, hi]`: `G ≥ 0`, `G′ = g`, `α″ ≥ 0`, `α′(0) = 0`, `α₀ ≥ δ_*`, and
    /// the supplied derivatives against central differences.
    ///
    /// The growth conditions on `g` at ±∞ cannot be sampled and remain the
    /// caller's obligation.
    pub fn validate(&self, lo: f64, hi: f64, samples: usize) -> Result<()> {
        if !(self.delta_star > 0.0) {
            return Err(Error::Bundle(format!("δ_* = {} must be positive", self.delta_star)));
        }
        if !(lo < hi) || samples < 2 {
            return Err(Error::Bundle("empty sampling range".into()));
        }
        if self.dalpha(0.0).abs() > 1e-12 {
            return Err(Error::Bundle(format!("α′(0) = {} is not zero", self.dalpha(0.0))));
        }
        let h = 1e-5 * (hi - lo).max(1.0);
        let fd = |f: &dyn Fn(f64) -> f64, x: f64| (f(x + h) - f(x - h)) / (2.0 * h);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-4 * (1.0 + a.abs().max(b.abs()));
        for k in 0..samples {
            let x = lo + (hi - lo) * k as f64 / (samples - 1) as f64;
            let fail = |what: &str| Err(Error::Bundle(format!("{what} fails at η = {x}")));
            if self.G(x) < -1e-14 {
                return fail("G ≥ 0");
            }
            if self.ddalpha(x) < -1e-14 {
                return fail("α″ ≥ 0");
            }
            if self.alpha0(x) < self.delta_star {
                return fail("α₀ ≥ δ_*");
            }
            if !close(fd(&|s| self.G(s), x), self.g(x)) {
                return fail("G′ = g");
            }
            if !close(fd(&|s| self.g(s), x), self.dg(x)) {
                return fail("g′ consistency");
            }
            if !close(fd(&|s| self.alpha0(s), x), self.dalpha0(x)) {
                return fail("α₀′ consistency");
            }
            if !close(fd(&|s| self.alpha(s), x), self.dalpha(x)) {
                return fail("α′ consistency");
            }
            if !close(fd(&|s| self.dalpha(s), x), self.ddalpha(x)) {
                return fail("α″ consistency");
            }
        }
        Ok(())
    }
}

fn locate(xs: &[f64], x: f64) -> Option<(usize, f64)> {
    let n = xs.len();
    if x <= xs[0] || x >= xs[n - 1] {
        return None;
    }
    let k = xs.partition_point(|&v| v <= x) - 1;
    Some((k, (x - xs[k]) / (xs[k + 1] - xs[k])))
}

fn linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    match locate(xs, x) {
        Some((k, s)) => ys[k] * (1.0 - s) + ys[k + 1] * s,
        None if x <= xs[0] => ys[0],
        None => ys[ys.len() - 1],
    }
}

fn hermite(xs: &[f64], ys: &[f64], ds: &[f64], x: f64) -> f64 {
    let n = xs.len();
    match locate(xs, x) {
        Some((k, s)) => {
            let h = xs[k + 1] - xs[k];
            let (s2, s3) = (s * s, s * s * s);
            ys[k] * (2.0 * s3 - 3.0 * s2 + 1.0)
                + ds[k] * h * (s3 - 2.0 * s2 + s)
                + ys[k + 1] * (-2.0 * s3 + 3.0 * s2)
                + ds[k + 1] * h * (s3 - s2)
        }
        // Linear continuation with the end slope keeps `f′` consistent.
        None if x <= xs[0] => ys[0] + ds[0] * (x - xs[0]),
        None => ys[n - 1] + ds[n - 1] * (x - xs[n - 1]),
    }
}
