//! One-dimensional bracketed minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`,
/// stopping once the bracket is narrower than `xtol`. Returns the best
/// abscissa seen and its value.
pub fn golden_min<E, F>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Golden-section search for a maximum.
pub fn golden_max<E, F>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    golden_min(|x| f(x).map(|v| -v), a, b, xtol).map(|(x, v)| (x, -v))
}
