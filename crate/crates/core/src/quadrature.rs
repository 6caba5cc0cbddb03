//! Gauss–Kronrod (7, 15) quadrature for small vector-valued integrands.

/// Kronrod abscissae on [0, 1], symmetric about 0; odd indices are the
/// Gauss–Legendre 7-point nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// The 15 nodes of the rule mapped onto `[a, b]`, in ascending order.
pub fn nodes(a: f64, b: f64) -> [f64; 15] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [0.0; 15];
    for k in 0..7 {
        out[k] = c - h * XGK[k];
        out[14 - k] = c + h * XGK[k];
    }
    out[7] = c;
    out
}

/// Combine integrand samples taken at [`nodes`] into the Kronrod estimate and
/// the `|K15 - G7|` error estimate, per component.
pub fn combine<const K: usize>(a: f64, b: f64, values: &[[f64; K]; 15]) -> ([f64; K], [f64; K]) {
    let h = 0.5 * (b - a);
    let mut kron = [0.0; K];
    let mut gauss = [0.0; K];
    for c in 0..K {
        let mut sk = WGK[7] * values[7][c];
        let mut sg = WG[3] * values[7][c];
        for k in 0..7 {
            let pair = values[k][c] + values[14 - k][c];
            sk += WGK[k] * pair;
            if k % 2 == 1 {
                sg += WG[k / 2] * pair;
            }
        }
        kron[c] = h * sk;
        gauss[c] = h * sg;
    }
    let mut err = [0.0; K];
    for c in 0..K {
        err[c] = (kron[c] - gauss[c]).abs();
    }
    (kron, err)
}

/// One application of the 15-point rule.
pub fn gk15<const K: usize, F>(f: &F, a: f64, b: f64) -> ([f64; K], [f64; K])
where
    F: Fn(f64) -> [f64; K],
{
    let xs = nodes(a, b);
    let mut values = [[0.0; K]; 15];
    for (v, &x) in values.iter_mut().zip(xs.iter()) {
        *v = f(x);
    }
    combine(a, b, &values)
}

/// Adaptive bisection until every component's error estimate is below
/// `abs_tol` on each subinterval (scaled by its share of the interval).
pub fn integrate<const K: usize, F>(f: &F, a: f64, b: f64, abs_tol: f64) -> [f64; K]
where
    F: Fn(f64) -> [f64; K],
{
    if b <= a {
        return [0.0; K];
    }
    refine(f, a, b, abs_tol, 48)
}

fn refine<const K: usize, F>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> [f64; K]
where
    F: Fn(f64) -> [f64; K],
{
    let (val, err) = gk15(f, a, b);
    let worst = err.iter().cloned().fold(0.0, f64::max);
    if worst <= tol || depth == 0 || b - a <= 1e-12 * (1.0 + a.abs()) {
        return val;
    }
    let mid = 0.5 * (a + b);
    let left = refine(f, a, mid, 0.5 * tol, depth - 1);
    let right = refine(f, mid, b, 0.5 * tol, depth - 1);
    let mut out = [0.0; K];
    for c in 0..K {
        out[c] = left[c] + right[c];
    }
    out
}
