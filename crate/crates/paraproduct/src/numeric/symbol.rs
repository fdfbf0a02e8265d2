//! Bump-function multiplier symbols sampled on integer frequencies.
//!
//! Every symbol is `amplitude * P(t)` for a rescaled frequency `t`, where
//! `P` is the profile `ψ(t) = (1 - t²)^{N+1}` on `|t| < 1` (smoothness `N`)
//! or, for symbols vanishing at the origin, `ψ(t) - ψ(2t)`.
//!
//! | kind          | support                         | interval length `|I|` |
//! |---------------|---------------------------------|-----------------------|
//! | `BallBump`    | `|ξ| <= ρ 2^j`                  | `2^{j+1}`             |
//! | `ShiftedBall` | `|ξ| <= ρ 2^{j+M}`              | `2^{j+M+1}`           |
//! | `AnnulusBump` | `λB^j <= |ξ| <= B^{j+1}`, `λ = (B+1)/2` | `B^{j+1} - B^j` |
//!
//! `ρ` is the dilation. Amplitude 1 gives a unit peak; [`SymbolSpec::adapted`]
//! rescales to the largest amplitude with `‖∂^α m‖ <= |I|^{-α}` for `α <= N`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::{check_size, frequency, slot};
use super::NumericError;

pub const DEFAULT_SMOOTHNESS: u32 = 4;
pub const DEFAULT_BASE: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolKind {
    BallBump,
    AnnulusBump,
    ShiftedBall,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    pub scale: i64,
    #[serde(default)]
    pub shift: i64,
    pub base: u32,
    pub vanish_at_origin: bool,
    pub smoothness: u32,
    pub amplitude: f64,
    pub dilation: f64,
}

impl SymbolSpec {
    pub fn ball(scale: i64, vanish_at_origin: bool) -> Self {
        SymbolSpec {
            kind: SymbolKind::BallBump,
            scale,
            shift: 0,
            base: 2,
            vanish_at_origin,
            smoothness: DEFAULT_SMOOTHNESS,
            amplitude: 1.0,
            dilation: 1.0,
        }
    }

    pub fn shifted_ball(scale: i64, shift: i64, vanish_at_origin: bool) -> Self {
        SymbolSpec { kind: SymbolKind::ShiftedBall, shift, ..Self::ball(scale, vanish_at_origin) }
    }

    pub fn annulus(scale: i64, base: u32) -> Self {
        SymbolSpec { kind: SymbolKind::AnnulusBump, base, vanish_at_origin: true, ..Self::ball(scale, true) }
    }

    pub fn with_amplitude(mut self, a: f64) -> Self {
        self.amplitude = a;
        self
    }

    pub fn with_dilation(mut self, rho: f64) -> Self {
        self.dilation = rho;
        self
    }

    pub fn with_scale(mut self, j: i64) -> Self {
        self.scale = j;
        self
    }

    /// Same shape, amplitude set to [`unit_adapted_amplitude`].
    pub fn adapted(self) -> Self {
        let a = unit_adapted_amplitude(&self);
        self.with_amplitude(a)
    }

    fn validate(&self) -> Result<(), NumericError> {
        let bad = |m: &str| Err(NumericError::InvalidSymbol(m.into()));
        if !(self.dilation > 0.0 && self.dilation <= 1.0) {
            return bad("dilation must lie in (0, 1]");
        }
        if !self.amplitude.is_finite() {
            return bad("amplitude must be finite");
        }
        if self.smoothness == 0 {
            return bad("smoothness must be at least 1");
        }
        if self.kind == SymbolKind::AnnulusBump && self.base < 2 {
            return bad("lacunarity base must be at least 2");
        }
        Ok(())
    }

    fn ball_radius(&self) -> f64 {
        let e = match self.kind {
            SymbolKind::ShiftedBall => self.scale + self.shift,
            _ => self.scale,
        };
        2f64.powi(e as i32)
    }

    fn annulus_geometry(&self) -> (f64, f64) {
        let b = self.base as f64;
        let lo = 0.5 * (b + 1.0) * b.powi(self.scale as i32);
        let hi = b.powi(self.scale as i32 + 1);
        let c = 0.5 * (lo + hi);
        (c, 0.5 * (hi - lo) * self.dilation)
    }

    /// Largest `|ξ|` in the support.
    pub fn support_radius(&self) -> f64 {
        match self.kind {
            SymbolKind::AnnulusBump => {
                let (c, h) = self.annulus_geometry();
                c + h
            }
            _ => self.dilation * self.ball_radius(),
        }
    }

    pub fn interval_length(&self) -> f64 {
        match self.kind {
            SymbolKind::AnnulusBump => {
                let b = self.base as f64;
                b.powi(self.scale as i32 + 1) - b.powi(self.scale as i32)
            }
            _ => 2.0 * self.ball_radius(),
        }
    }

    /// Frequency length corresponding to one unit of the profile variable.
    fn profile_unit(&self) -> f64 {
        match self.kind {
            SymbolKind::AnnulusBump => self.annulus_geometry().1,
            _ => self.dilation * self.ball_radius(),
        }
    }

    fn vanishing_profile(&self) -> bool {
        self.vanish_at_origin && self.kind != SymbolKind::AnnulusBump
    }

    /// Continuous symbol at frequency `xi`.
    pub fn value(&self, xi: f64) -> f64 {
        let t = match self.kind {
            SymbolKind::AnnulusBump => {
                let (c, h) = self.annulus_geometry();
                (xi.abs() - c) / h
            }
            _ => xi / self.profile_unit(),
        };
        self.amplitude * profile(self.smoothness, t, self.vanishing_profile())
    }
}

fn psi(order: u32, t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - t * t).powi(order as i32 + 1)
    }
}

pub fn profile(order: u32, t: f64, vanishing: bool) -> f64 {
    if vanishing {
        psi(order, t) - psi(order, 2.0 * t)
    } else {
        psi(order, t)
    }
}

/// Coefficients of `(1 - t²)^{N+1}` by ascending power.
fn psi_coefficients(order: u32) -> Vec<f64> {
    let m = order as usize + 1;
    let mut c = vec![0.0; 2 * m + 1];
    let mut binom = 1.0;
    for k in 0..=m {
        c[2 * k] = if k % 2 == 0 { binom } else { -binom };
        binom = binom * (m - k) as f64 / (k + 1) as f64;
    }
    c
}

fn poly_derivative_at(coef: &[f64], alpha: usize, t: f64) -> f64 {
    let mut acc = 0.0;
    for k in (alpha..coef.len()).rev() {
        let falling: f64 = (k - alpha + 1..=k).map(|x| x as f64).product();
        acc = acc * t + coef[k] * falling;
    }
    acc
}

/// `sup |P^{(α)}|` over the profile's support, by dense sampling of the exact
/// polynomial pieces.
pub fn profile_derivative_sup(order: u32, alpha: u32, vanishing: bool) -> f64 {
    let coef = psi_coefficients(order);
    let a = alpha as usize;
    let samples = 1 << 16;
    let mut best: f64 = 0.0;
    for i in 0..=samples {
        let t = i as f64 / samples as f64;
        let mut d = poly_derivative_at(&coef, a, t);
        if vanishing && t < 0.5 {
            d -= 2f64.powi(alpha as i32) * poly_derivative_at(&coef, a, 2.0 * t);
        }
        best = best.max(d.abs());
    }
    best
}

/// Largest amplitude for which the symbol is adapted with unit constants.
pub fn unit_adapted_amplitude(spec: &SymbolSpec) -> f64 {
    let ratio = spec.interval_length() / spec.profile_unit();
    let v = spec.vanishing_profile();
    let best = (0..=spec.smoothness)
        .map(|a| 1.0 / (profile_derivative_sup(spec.smoothness, a, v) * ratio.powi(a as i32)))
        .fold(f64::INFINITY, f64::min);
    best * (1.0 - 1e-4)
}

/// A symbol sampled on the `N` integer frequencies of the grid, in FFT slot
/// order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mask(pub Vec<Complex64>);

impl Mask {
    pub fn ones(n: usize) -> Self {
        Mask(vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn zeros(n: usize) -> Self {
        Mask(vec![Complex64::new(0.0, 0.0); n])
    }

    /// Indicator of the zero frequency.
    pub fn delta(n: usize) -> Self {
        let mut m = Self::zeros(n);
        m.0[0] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn at(&self, freq: i64) -> Complex64 {
        slot(freq, self.len()).map_or(Complex64::new(0.0, 0.0), |k| self.0[k])
    }

    pub fn at_origin(&self) -> Complex64 {
        self.0[0]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn scaled(&self, c: Complex64) -> Mask {
        Mask(self.0.iter().map(|x| x * c).collect())
    }

    /// `Σ c_k m_k` for masks of one size.
    pub fn combination(terms: &[(Complex64, &Mask)]) -> Result<Mask, NumericError> {
        let n = terms.first().map_or(0, |t| t.1.len());
        let mut out = Mask::zeros(n);
        for (c, m) in terms {
            if m.len() != n {
                return Err(NumericError::SizeMismatch { expected: n, found: m.len() });
            }
            for (o, x) in out.0.iter_mut().zip(&m.0) {
                *o += c * x;
            }
        }
        Ok(out)
    }

    /// Values on `ξ = -N/2, ..., N/2`; the two ends are the same slot.
    pub fn natural_order(&self) -> Vec<Complex64> {
        let n = self.len() as i64;
        (-n / 2..=n / 2).map(|f| self.0[f.rem_euclid(n) as usize]).collect()
    }
}

pub fn build_symbol(spec: &SymbolSpec, n: usize) -> Result<Mask, NumericError> {
    check_size(n)?;
    spec.validate()?;
    let limit = (n / 2) as f64;
    let r = spec.support_radius();
    if r > limit {
        return Err(NumericError::SupportOverflow { scale: spec.scale, radius: r, limit });
    }
    let mut m: Vec<Complex64> = (0..n).map(|k| Complex64::new(spec.value(frequency(k, n) as f64), 0.0)).collect();
    if spec.vanish_at_origin {
        m[0] = Complex64::new(0.0, 0.0);
    }
    Ok(Mask(m))
}

/// `max_ξ |Δ^α m(ξ)| · |I|^α` for `α = 0..=N`, with `Δ` the unit forward
/// difference over the integers (zero outside the grid band).
pub fn derivative_ratios(mask: &Mask, spec: &SymbolSpec) -> Vec<f64> {
    let pad = spec.smoothness as usize + 1;
    let mut v: Vec<f64> = vec![0.0; pad];
    let nat = mask.natural_order();
    // the slot at N/2 is shared by both band ends; keep it on the positive side
    v.push(0.0);
    v.extend(nat[1..].iter().map(|c| c.re));
    v.extend(std::iter::repeat_n(0.0, pad));
    let len = spec.interval_length();
    let mut out = Vec::new();
    for a in 0..=spec.smoothness {
        let sup = v.iter().fold(0.0f64, |s, x| s.max(x.abs()));
        out.push(sup * len.powi(a as i32));
        v = v.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

/// Symbols of one vertex, indexed by scale; scales not present are zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymbolFamily {
    pub masks: BTreeMap<i64, Mask>,
}

impl SymbolFamily {
    /// All scales of `template` whose symbol fits the grid and is not
    /// identically zero on it.
    pub fn lacunary(template: &SymbolSpec, n: usize) -> Result<Self, NumericError> {
        let mut masks = BTreeMap::new();
        for j in -8..=64 {
            match build_symbol(&template.clone().with_scale(j), n) {
                Ok(m) if !m.is_zero() => {
                    masks.insert(j, m);
                }
                Ok(_) => {}
                Err(NumericError::SupportOverflow { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        Ok(SymbolFamily { masks })
    }

    pub fn from_masks(masks: impl IntoIterator<Item = (i64, Mask)>) -> Self {
        SymbolFamily { masks: masks.into_iter().collect() }
    }

    pub fn get(&self, j: i64) -> Option<&Mask> {
        self.masks.get(&j)
    }

    /// Least and greatest scale carrying a nonzero mask.
    pub fn scale_range(&self) -> Option<(i64, i64)> {
        let mut it = self.masks.iter().filter(|(_, m)| !m.is_zero()).map(|(j, _)| *j);
        let lo = it.next()?;
        Some((lo, it.next_back().unwrap_or(lo)))
    }
}
