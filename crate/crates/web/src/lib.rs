//! Browser bindings: three JSON-returning operations behind `web/index.html`.
//!
//! The `*_json` functions are plain Rust so they can be tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use serde_json::json;
use topoderiv::config::default_eps;
use topoderiv::expansion::{expand, Route};
use topoderiv::kernels::{laplace_fundamental, Kernel};
use topoderiv::moments::{compute_moments, Shape};
use topoderiv::potentials::{ball_u2_closed, Potential};
use topoderiv::selftest::reference_config;
use topoderiv::verify::DirectCost;
use topoderiv::{CostKind, Dim, Poly};
use wasm_bindgen::prelude::*;

fn dim_of(d: u32) -> Result<Dim, String> {
    Dim::try_from(d as usize).map_err(|e| e.to_string())
}

/// U^(2) of the unit ball with unit jump along a ray: quadrature, closed form
/// and the point-mass value |B|·E outside the ball.
pub fn potential_profile_json(dim: u32, rmax: f64, samples: u32) -> Result<String, String> {
    let dim = dim_of(dim)?;
    if !(rmax > 0.0) || !(2..=2000).contains(&samples) {
        return Err("need rmax > 0 and 2 <= samples <= 2000".into());
    }
    let d = dim.n();
    let shape = Shape::unit_ball(dim);
    let measure = compute_moments(&shape, 0).map_err(|e| e.to_string())?.measure();
    let pot = Potential::new(&shape, Poly::constant(d, 1.0), Kernel::Laplace, 1.0);
    let mut rows = Vec::new();
    for i in 0..samples {
        let r = rmax * (i as f64 + 0.5) / samples as f64;
        let mut x = vec![0.0; d];
        x[0] = r * 0.6;
        x[1] = r * 0.8;
        let far = if r > 1.0 { laplace_fundamental(&x, dim).map(|e| measure * e).ok() } else { None };
        rows.push(json!({"r": r, "quadrature": pot.eval(&x), "closed_form": ball_u2_closed(&x, dim, 1.0), "point_mass": far}));
    }
    Ok(topoderiv::json::to_string(&json!({"dim": d, "measure": measure, "rows": rows})))
}

/// Moments of a polygon given as `[[x, y], ...]`.
pub fn polygon_moments_json(vertices: &str, n_max: u32) -> Result<String, String> {
    let vertices: Vec<[f64; 2]> = serde_json::from_str(vertices).map_err(|e| format!("vertices: {e}"))?;
    let shape = Shape::Polygon { vertices };
    shape.validate().map_err(|e| e.to_string())?;
    let table = compute_moments(&shape, n_max as usize).map_err(|e| e.to_string())?;
    let rows: Vec<_> = table.iter().map(|(e, v)| json!({"exponents": [e[0], e[1]], "value": v})).collect();
    Ok(topoderiv::json::to_string(&json!({
        "measure": table.measure(),
        "symmetric": shape.is_symmetric(),
        "origin_distance": shape.origin_distance(),
        "moments": rows,
    })))
}

/// Unit-disk inclusion at the centre of the unit square: the ledger up to
/// d^5 and direct cost increments on a coarse grid.
pub fn disk_expansion_json(cost: &str, nodes: u32, f1: f64, f2: f64) -> Result<String, String> {
    let cost = match cost {
        "H1" => CostKind::H1,
        "L2" => CostKind::L2,
        _ => return Err(format!("unknown cost {cost:?}")),
    };
    if !(17..=129).contains(&nodes) || nodes.is_multiple_of(2) {
        return Err("nodes must be odd and between 17 and 129".into());
    }
    let mut cfg = reference_config(Dim::Two, cost, nodes as usize, 5);
    cfg.data.f1 = vec![(f1, vec![0, 0])];
    cfg.data.f2 = vec![(f2, vec![0, 0])];
    let p = cfg.build().map_err(|e| e.to_string())?;
    let (base, ledger) = expand(&p, Route::General).map_err(|e| e.to_string())?;
    let dc = DirectCost::new(&p, base.u0);
    let mut rows = Vec::new();
    for &eps in default_eps(1.0).iter().take(5) {
        let direct = dc.delta_j(eps).map_err(|e| e.to_string())?;
        let partial: Vec<f64> = (1..=ledger.order).map(|n| ledger.partial_sum(eps, n)).collect();
        rows.push(json!({"eps": eps, "direct": direct, "partial_sums": partial}));
    }
    Ok(topoderiv::json::to_string(&json!({"h": p.grid.h_max(), "ledger": ledger, "sweep": rows})))
}

#[wasm_bindgen]
pub fn potential_profile(dim: u32, rmax: f64, samples: u32) -> Result<String, JsError> {
    potential_profile_json(dim, rmax, samples).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn polygon_moments(vertices: &str, n_max: u32) -> Result<String, JsError> {
    polygon_moments_json(vertices, n_max).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn disk_expansion(cost: &str, nodes: u32, f1: f64, f2: f64) -> Result<String, JsError> {
    disk_expansion_json(cost, nodes, f1, f2).map_err(|e| JsError::new(&e))
}
