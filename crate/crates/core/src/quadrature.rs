//! Deterministic quadrature helpers.

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Nodes per Gauss–Legendre panel.
pub const PANEL_NODES: usize = 8;

/// Push the 8-point Gauss–Legendre rule for `[a, b]` split into `panels`
/// equal panels onto `out` as `(node, weight)` pairs.
pub fn gauss_legendre_panels(a: f64, b: f64, panels: usize, out: &mut Vec<(f64, f64)>) {
    if b <= a || panels == 0 {
        return;
    }
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + h * p as f64;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            out.push((mid - half * x, half * w));
            out.push((mid + half * x, half * w));
        }
    }
}

/// Composite rule over the pieces delimited by sorted `breaks`, with roughly
/// `total_nodes` nodes spread proportionally to piece length. Every piece
/// gets at least one panel, so integrands smooth on each piece (piecewise
/// constants in particular) are integrated to rounding accuracy.
pub fn piecewise_rule(breaks: &[f64], total_nodes: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if breaks.len() < 2 {
        return out;
    }
    let span = breaks[breaks.len() - 1] - breaks[0];
    if span <= 0.0 {
        return out;
    }
    let panels_total = (total_nodes / PANEL_NODES).max(1) as f64;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b - a <= span * 1e-15 {
            continue;
        }
        let panels = ((b - a) / span * panels_total).ceil().max(1.0) as usize;
        gauss_legendre_panels(a, b, panels, &mut out);
    }
    out
}

/// Sort, deduplicate (to relative tolerance) and clip breakpoints to `[lo, hi]`.
pub fn normalize_breaks(mut pts: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    pts.retain(|p| p.is_finite() && *p >= lo && *p <= hi);
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tol = (hi - lo).abs().max(1.0) * 1e-14;
    pts.dedup_by(|a, b| (*a - *b).abs() <= tol);
    pts
}

/// Merge possibly-overlapping intervals into a sorted disjoint list.
pub fn merge_intervals(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.retain(|(a, b)| b > a);
    iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Cumulative trapezoid integrals of samples `ys` on the (sorted) grid `xs`.
/// Element `k` holds `∫_{xs[0]}^{xs[k]}`.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(xs.len());
    if xs.is_empty() {
        return out;
    }
    out.push(0.0);
    for k in 1..xs.len() {
        acc += 0.5 * (xs[k] - xs[k - 1]) * (ys[k] + ys[k - 1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials() {
        let mut rule = Vec::new();
        gauss_legendre_panels(-1.0, 2.0, 3, &mut rule);
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(7)).sum();
        let exact = (2f64.powi(8) - 1.0) / 8.0;
        assert!((s - exact).abs() < 1e-12);
    }

    #[test]
    fn piecewise_is_exact_for_step_functions() {
        let breaks = normalize_breaks(vec![0.3, 0.7], 0.0, 1.0);
        let rule = piecewise_rule(&breaks, 64);
        let s: f64 = rule
            .iter()
            .map(|(x, w)| w * if (0.3..0.7).contains(x) { 1.0 } else { 0.0 })
            .sum();
        assert!((s - 0.4).abs() < 1e-14);
    }

    #[test]
    fn intervals_merge() {
        let m = merge_intervals(vec![(2.0, 3.0), (0.0, 1.0), (0.5, 1.5), (3.0, 4.0)]);
        assert_eq!(m, vec![(0.0, 1.5), (2.0, 4.0)]);
    }

    #[test]
    fn trapezoid_linear_exact() {
        let xs = [0.0, 0.5, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let c = cumulative_trapezoid(&xs, &ys);
        assert!((c[3] - 12.0).abs() < 1e-12);
    }
}
