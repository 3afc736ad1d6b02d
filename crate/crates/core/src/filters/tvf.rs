//! Total variation flow: explicit diffusion toward piecewise-constant regions.

use rayon::prelude::*;

use super::plane::{planes_to_image, Plane};
use crate::error::{Error, Result};
use crate::imaging::ImageBuffer;

pub const DEFAULT_DT: f64 = 0.2;
pub const DEFAULT_EPS: f64 = 1e-3 * 255.0;

/// Flux field `∇u / sqrt(|∇u|² + ε²)` with forward differences, zero across the border.
fn flux(u: &Plane, eps: f32) -> (Vec<f32>, Vec<f32>) {
    let (w, h) = (u.width, u.height);
    let eps2 = eps * eps;
    let mut px = vec![0f32; w * h];
    let mut py = vec![0f32; w * h];
    px.par_chunks_mut(w)
        .zip(py.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (rx, ry))| {
            let row = &u.data[y * w..(y + 1) * w];
            let below = (y + 1 < h).then(|| &u.data[(y + 1) * w..(y + 2) * w]);
            for x in 0..w {
                let ux = if x + 1 < w { row[x + 1] - row[x] } else { 0.0 };
                let uy = below.map_or(0.0, |b| b[x] - row[x]);
                let norm = (ux * ux + uy * uy + eps2).sqrt();
                rx[x] = ux / norm;
                ry[x] = uy / norm;
            }
        });
    (px, py)
}

/// One explicit step `u + dt·div(∇u/sqrt(|∇u|²+ε²))` with Neumann boundaries.
pub fn tv_flow_step(u: &Plane, dt: f32, eps: f32) -> Plane {
    let w = u.width;
    let (px, py) = flux(u, eps);
    u.map_rows(|y, row| {
        for x in 0..w {
            let i = y * w + x;
            let mut div = px[i] + py[i];
            if x > 0 {
                div -= px[i - 1];
            }
            if y > 0 {
                div -= py[i - w];
            }
            row[x] = u.data[i] + dt * div;
        }
    })
}

/// Isotropic total variation with forward differences.
pub fn total_variation(u: &Plane) -> f64 {
    let (w, h) = (u.width, u.height);
    let mut tv = 0f64;
    for y in 0..h {
        for x in 0..w {
            let c = u.at(x, y);
            let ux = if x + 1 < w { u.at(x + 1, y) - c } else { 0.0 };
            let uy = if y + 1 < h { u.at(x, y + 1) - c } else { 0.0 };
            tv += ((ux as f64).powi(2) + (uy as f64).powi(2)).sqrt();
        }
    }
    tv
}

fn check(iterations: u32, dt: f64, eps: f64) -> Result<()> {
    if iterations == 0 {
        return Err(Error::invalid("tvf needs at least one iteration"));
    }
    if !(dt > 0.0 && dt <= 0.25) {
        return Err(Error::invalid(format!("tvf dt must be in (0, 0.25], got {dt}")));
    }
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("tvf eps must be > 0, got {eps}")));
    }
    Ok(())
}

/// Runs the flow on each channel and returns the unrounded planes.
pub fn tvf_planes(img: &ImageBuffer, iterations: u32, dt: f64, eps: f64) -> Result<Vec<Plane>> {
    check(iterations, dt, eps)?;
    Ok(Plane::planes(img)
        .into_iter()
        .map(|mut p| {
            for _ in 0..iterations {
                p = tv_flow_step(&p, dt as f32, eps as f32);
            }
            p
        })
        .collect())
}

pub fn tvf(img: &ImageBuffer, iterations: u32, dt: f64, eps: f64) -> Result<ImageBuffer> {
    Ok(planes_to_image(&tvf_planes(img, iterations, dt, eps)?))
}
