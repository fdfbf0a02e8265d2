use super::grid::GridFunction;
use super::lambda::pieces;
use super::symbol::SymbolFamily;
use super::NumericError;

/// `(Σ_k |Q_k f|²)^{1/2}` over the scales of the family.
pub fn square_function_samples(family: &SymbolFamily, f: &GridFunction) -> Result<Vec<f64>, NumericError> {
    let mut acc = vec![0.0; f.len()];
    for q in pieces(family, f)?.values() {
        acc.iter_mut().zip(q).for_each(|(a, x)| *a += x.norm_sqr());
    }
    Ok(acc.into_iter().map(f64::sqrt).collect())
}

pub fn square_function(family: &SymbolFamily, f: &GridFunction) -> Result<GridFunction, NumericError> {
    GridFunction::from_real(&square_function_samples(family, f)?)
}

/// Discrete centred maximal function: at each grid point the supremum of the
/// averages of `|f|` over the windows `[x - r, x + r]` (periodic) and over
/// the whole period.
pub fn hl_maximal_samples(f: &GridFunction) -> Vec<f64> {
    let a = f.abs();
    let n = a.len();
    let mut prefix = vec![0.0; 2 * n + 1];
    for i in 0..2 * n {
        prefix[i + 1] = prefix[i] + a[i % n];
    }
    let whole = prefix[n] / n as f64;
    (0..n)
        .map(|x| {
            let mut best = whole;
            for r in 0..n / 2 {
                // window x-r ..= x+r shifted by n to stay non-negative
                let lo = x + n - r;
                let hi = x + n + r + 1;
                let s = if hi <= 2 * n { prefix[hi] - prefix[lo] } else { prefix[2 * n] - prefix[lo] + prefix[hi - 2 * n] };
                best = best.max(s / (2 * r + 1) as f64);
            }
            best
        })
        .collect()
}

pub fn hl_maximal(f: &GridFunction) -> GridFunction {
    GridFunction::from_real(&hl_maximal_samples(f)).expect("same grid")
}
