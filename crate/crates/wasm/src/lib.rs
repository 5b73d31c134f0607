//! Browser demo bindings. The computations live in plain Rust functions
//! (tested natively); the `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

use nngp_core::design::{grid_1d, sobol_1d};
use nngp_core::embed::hypersphere_embed;
use nngp_core::kernels::{pairwise_distances, KernelSpec};
use nngp_core::linalg::DenseMatrix;
use nngp_core::study::{weights_1d, ValidityScanConfig};
use nngp_core::Result;

/// Correlation with the origin along `[0, 1]`: returns `t`, the NNGP
/// correlation and the Matérn 3/2 correlation, each `samples` long, one after
/// the other. Both kernels see the embedded points.
pub fn correlation_curves(
    depth: usize,
    sigma_a: f64,
    sigma_b: f64,
    rho: f64,
    samples: usize,
) -> Result<Vec<f64>> {
    let samples = samples.max(2);
    let t: Vec<f64> = (0..samples)
        .map(|i| i as f64 / (samples - 1) as f64)
        .collect();
    let mut pts = vec![0.0];
    pts.extend(&t);
    let e = hypersphere_embed(&DenseMatrix::column_vector(&pts));
    let k = KernelSpec::nngp(depth, sigma_a, sigma_b, 2)?.gram(&e)?.values;
    let matern = KernelSpec::matern(1.5, rho, 1.0)?;
    let d = pairwise_distances(&e.block(0, 0, 1, 2), &e)?;

    let mut out = t.clone();
    out.extend((1..=samples).map(|j| k[(0, j)] / (k[(0, 0)] * k[(j, j)]).sqrt()));
    let KernelSpec::Matern { nu, rho, .. } = matern else {
        unreachable!()
    };
    out.extend((1..=samples).map(|j| nu.correlation(d[(0, j)] / rho)));
    Ok(out)
}

/// Kriging weights for one prediction location on a 1-D design of `n`
/// points (`sobol` selects the van der Corput design, otherwise a grid).
/// Returns the sorted design points, the NNGP weights and the Matérn 3/2
/// weights, each `n` long.
pub fn point_weights(
    n: usize,
    sobol: bool,
    x_star: f64,
    depth: usize,
    sigma_a: f64,
    sigma_b: f64,
    rho: f64,
    nugget: f64,
) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(nngp_core::Error::Empty("n"));
    }
    let mut x = if sobol { sobol_1d(n) } else { grid_1d(n) };
    x.sort_by(f64::total_cmp);
    let spec = KernelSpec::nngp(depth, sigma_a, sigma_b, 2)?;
    let pair = weights_1d(&x, &[x_star.clamp(0.0, 1.0)], &spec, &[rho], nugget)?;
    let (_, matern) = pair
        .matern
        .first()
        .ok_or(nngp_core::Error::AllThetaInvalid)?;
    let mut out = x;
    out.extend(pair.nngp.weights.row(0));
    out.extend(matern.weights.row(0));
    Ok(out)
}

/// Matérn 3/2 length scale on a log grid over `[0.05, 5]` whose weights are
/// closest (max-abs) to the NNGP weights at `x_star`.
pub fn closest_rho(
    n: usize,
    sobol: bool,
    x_star: f64,
    depth: usize,
    sigma_a: f64,
    sigma_b: f64,
    nugget: f64,
) -> Result<f64> {
    if n == 0 {
        return Err(nngp_core::Error::Empty("n"));
    }
    let mut x = if sobol { sobol_1d(n) } else { grid_1d(n) };
    x.sort_by(f64::total_cmp);
    let spec = KernelSpec::nngp(depth, sigma_a, sigma_b, 2)?;
    let rhos = nngp_core::kernels::logspace(0.05, 5.0, 60);
    let pair = weights_1d(&x, &[x_star.clamp(0.0, 1.0)], &spec, &rhos, nugget)?;
    pair.matern
        .iter()
        .map(|(rho, h)| Ok((*rho, h.weights.sub(&pair.nngp.weights)?.max_abs())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(rho, _)| rho)
        .ok_or(nngp_core::Error::AllThetaInvalid)
}

/// Row-major `grid_res × grid_res` status codes over `(sigma_a, sigma_b)` in
/// `[sigma_min, sigma_max]²` (sigma_a indexes rows): 0 valid, 1 flat,
/// 2 not positive definite.
pub fn validity_grid(
    depth: usize,
    grid_res: usize,
    sigma_min: f64,
    sigma_max: f64,
    n: usize,
) -> Result<Vec<u8>> {
    let cfg = ValidityScanConfig {
        depths: vec![depth],
        grid_res,
        sigma_min,
        sigma_max,
        n,
        ..Default::default()
    };
    Ok(nngp_core::study::scan_validity(&cfg)?
        .iter()
        .map(|c| match (c.is_pd, c.is_flat) {
            (false, _) => 2,
            (true, true) => 1,
            (true, false) => 0,
        })
        .collect())
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = correlationCurves)]
pub fn correlation_curves_js(
    depth: usize,
    sigma_a: f64,
    sigma_b: f64,
    rho: f64,
    samples: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    js(correlation_curves(depth, sigma_a, sigma_b, rho, samples))
}

#[wasm_bindgen(js_name = pointWeights)]
#[allow(clippy::too_many_arguments)]
pub fn point_weights_js(
    n: usize,
    sobol: bool,
    x_star: f64,
    depth: usize,
    sigma_a: f64,
    sigma_b: f64,
    rho: f64,
    nugget: f64,
) -> std::result::Result<Vec<f64>, JsError> {
    js(point_weights(n, sobol, x_star, depth, sigma_a, sigma_b, rho, nugget))
}

#[wasm_bindgen(js_name = closestRho)]
pub fn closest_rho_js(
    n: usize,
    sobol: bool,
    x_star: f64,
    depth: usize,
    sigma_a: f64,
    sigma_b: f64,
    nugget: f64,
) -> std::result::Result<f64, JsError> {
    js(closest_rho(n, sobol, x_star, depth, sigma_a, sigma_b, nugget))
}

#[wasm_bindgen(js_name = validityGrid)]
pub fn validity_grid_js(
    depth: usize,
    grid_res: usize,
    sigma_min: f64,
    sigma_max: f64,
    n: usize,
) -> std::result::Result<Vec<u8>, JsError> {
    js(validity_grid(depth, grid_res, sigma_min, sigma_max, n))
}
