//! Named analytic data profiles referenced from run configurations.

use num_complex::Complex64 as C64;
use utm_core::grid::{AxisTag, DataTriple, Grid, GridField};
use utm_core::oracles::GaussianPulse;

use crate::config::DataSection;
use crate::CliError;

pub fn pulse(data: &DataSection) -> GaussianPulse {
    GaussianPulse {
        amplitude: C64::new(data.amplitude, 0.0),
        center: data.center,
        a: data.width,
        velocity: data.velocity,
    }
}

/// Interior forcing: a stationary complex bump fading linearly in time.
fn forcing_field(amplitude: f64, grid: &Grid) -> GridField {
    let mut f = GridField::zeros(
        vec![AxisTag::X1, AxisTag::X2, AxisTag::T],
        vec![grid.x1_nodes(), grid.x2_nodes(), grid.t_nodes()],
    );
    let x1 = grid.x1_nodes();
    let x2 = grid.x2_nodes();
    let t = grid.t_nodes();
    let mut v = f.as3_mut();
    for (i, &a) in x1.iter().enumerate() {
        for (j, &b) in x2.iter().enumerate() {
            let env = (-(a * a) / 4.0 - (b - 8.0) * (b - 8.0) / 4.0).exp();
            for (n, &tn) in t.iter().enumerate() {
                v[[i, j, n]] = amplitude * env * C64::new(1.0 - tn, 0.3 * tn);
            }
        }
    }
    f
}

/// Initial datum + matching Robin trace for the named profile, plus the
/// optional forcing bump.
pub fn data_triple(data: &DataSection, grid: &Grid, gamma: f64) -> Result<DataTriple, CliError> {
    let mut triple = match data.profile.as_str() {
        "zero" => DataTriple::zero(grid),
        "gaussian" => {
            let p = pulse(data);
            DataTriple {
                u0: p.initial_field(grid),
                g: p.robin_datum_field(grid, gamma),
                f: None,
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "profile '{other}' has no interior data"
            )))
        }
    };
    if data.forcing_amplitude != 0.0 {
        triple.f = Some(forcing_field(data.forcing_amplitude, grid));
    }
    Ok(triple)
}

/// Smooth bump supported on (a, b), equal to 1 at the midpoint.
pub fn support_bump(t: f64, a: f64, b: f64) -> f64 {
    if t <= a || t >= b {
        return 0.0;
    }
    let r = (t - a) * (b - t) / (0.25 * (b - a) * (b - a));
    (-0.2 * (1.0 / r - 1.0)).exp()
}

/// Boundary datum for the reduced problem: Gaussian in x1 times a smooth
/// bump supported on (0, 2), sampled on its own axis covering [-1, 3].
pub fn boundary_bump(data: &DataSection, grid: &Grid) -> Result<GridField, CliError> {
    if data.profile != "boundary_bump" && data.profile != "zero" {
        return Err(CliError::Config(format!(
            "profile '{}' is not a boundary datum",
            data.profile
        )));
    }
    let n_axis = 129;
    let t_axis: Vec<f64> = (0..n_axis)
        .map(|j| -1.0 + 4.0 * j as f64 / (n_axis - 1) as f64)
        .collect();
    let x1 = grid.x1_nodes();
    let mut g = GridField::zeros(vec![AxisTag::X1, AxisTag::T], vec![x1.clone(), t_axis.clone()]);
    if data.profile == "zero" {
        return Ok(g);
    }
    let mut v = g.as2_mut();
    for (i, &x) in x1.iter().enumerate() {
        let wx = data.amplitude * (-(x * x) / (data.width * data.width)).exp();
        for (j, &t) in t_axis.iter().enumerate() {
            v[[i, j]] = C64::new(wx * support_bump(t, 0.0, 2.0), 0.0);
        }
    }
    Ok(g)
}
