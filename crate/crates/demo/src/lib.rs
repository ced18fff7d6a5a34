//! Browser bindings for the interactive demo page.
//!
//! Three operations are exposed: the Floquet discriminant / Bloch dispersion
//! over a frequency sweep, the N-period slab transmission spectrum, and a
//! steppable time-domain pulse simulation.  Curves come back as flat
//! `Float64Array` buffers; the page in `www/` draws them on plain canvases.
//!
//! The computational paths return `Result<_, String>` so they stay testable
//! on native targets; the exported wrappers convert errors to `JsValue`.

use wasm_bindgen::prelude::*;

use slabwave_core::potentials::PotentialSpec;
use slabwave_core::scattering::log_transmittance;
use slabwave_core::spectrum::bloch_k;
use slabwave_core::timedomain::{PulseConfig, Simulation};
use slabwave_core::transfer::Frequency;

fn parse_spec(spec_json: &str) -> Result<PotentialSpec, String> {
    PotentialSpec::from_json(spec_json).map_err(|e| e.to_string())
}

fn dispersion_curve_impl(
    spec_json: &str,
    omega_min: f64,
    omega_max: f64,
    samples: usize,
) -> Result<Vec<f64>, String> {
    let spec = parse_spec(spec_json)?;
    if !(omega_min > 0.0 && omega_min < omega_max && samples >= 2) {
        return Err("need 0 < omega_min < omega_max and >= 2 samples".into());
    }
    let mut out = Vec::with_capacity(4 * samples);
    for i in 0..samples {
        let w = omega_min + (omega_max - omega_min) * i as f64 / (samples - 1) as f64;
        let sample = bloch_k(Frequency::real(w).map_err(|e| e.to_string())?, &spec)
            .map_err(|e| e.to_string())?;
        out.push(w);
        out.push(sample.f.re);
        out.push(sample.k.re);
        out.push(sample.k.im);
    }
    Ok(out)
}

fn transmission_curve_impl(
    spec_json: &str,
    periods: u32,
    omega_min: f64,
    omega_max: f64,
    samples: usize,
) -> Result<Vec<f64>, String> {
    let spec = parse_spec(spec_json)?;
    if !(omega_min > 0.0 && omega_min < omega_max && samples >= 2 && periods >= 1) {
        return Err("bad sweep parameters".into());
    }
    let mut out = Vec::with_capacity(2 * samples);
    for i in 0..samples {
        let w = omega_min + (omega_max - omega_min) * i as f64 / (samples - 1) as f64;
        let log_t2 = log_transmittance(w, &spec, periods).map_err(|e| e.to_string())?;
        out.push(w);
        out.push((0.5 * log_t2).exp());
    }
    Ok(out)
}

/// Dispersion sweep: rows of `(omega, F, Re k, Im k)` flattened in order.
#[wasm_bindgen]
pub fn dispersion_curve(
    spec_json: &str,
    omega_min: f64,
    omega_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    dispersion_curve_impl(spec_json, omega_min, omega_max, samples)
        .map_err(|e| JsValue::from_str(&e))
}

/// Transmission spectrum of the N-period slab: rows of `(omega, |t_N|)`.
#[wasm_bindgen]
pub fn transmission_curve(
    spec_json: &str,
    periods: u32,
    omega_min: f64,
    omega_max: f64,
    samples: usize,
) -> Result<Vec<f64>, JsValue> {
    transmission_curve_impl(spec_json, periods, omega_min, omega_max, samples)
        .map_err(|e| JsValue::from_str(&e))
}

fn build_sim(
    amplitude: f64,
    period: f64,
    periods: u32,
    pulse_width: f64,
    resolution: u32,
) -> Result<Simulation, String> {
    let mut cfg = if amplitude == 0.0 {
        PulseConfig::free_pulse(3.0, period, periods, pulse_width).map_err(|e| e.to_string())?
    } else {
        let mut cfg =
            PulseConfig::desk(1, 2.0, amplitude, period, periods).map_err(|e| e.to_string())?;
        cfg.pulse_width = pulse_width;
        cfg.t_end = 2.2 * pulse_width + 2.0 * cfg.transit_time();
        cfg
    };
    cfg.points_per_period = resolution;
    cfg.validate().map_err(|e| e.to_string())?;
    Simulation::new(cfg).map_err(|e| e.to_string())
}

/// Steppable pulse run through a single delta comb.
#[wasm_bindgen]
pub struct PulseSim {
    sim: Simulation,
    stride: usize,
}

impl PulseSim {
    fn build(
        amplitude: f64,
        period: f64,
        periods: u32,
        pulse_width: f64,
        resolution: u32,
    ) -> Result<PulseSim, String> {
        let sim = build_sim(amplitude, period, periods, pulse_width, resolution)?;
        // Cap the sampled field at ~2000 points however long the domain is.
        let stride = (sim.grid.len / 2000).max(1);
        Ok(PulseSim { sim, stride })
    }
}

#[wasm_bindgen]
impl PulseSim {
    /// Build the simulation; `amplitude = 0` gives the free medium.
    #[wasm_bindgen(constructor)]
    pub fn new(
        amplitude: f64,
        period: f64,
        periods: u32,
        pulse_width: f64,
        resolution: u32,
    ) -> Result<PulseSim, JsValue> {
        Self::build(amplitude, period, periods, pulse_width, resolution)
            .map_err(|e| JsValue::from_str(&e))
    }

    pub fn time(&self) -> f64 {
        self.sim.state.time
    }

    pub fn t_end(&self) -> f64 {
        self.sim.cfg.t_end
    }

    pub fn dt(&self) -> f64 {
        self.sim.dt()
    }

    pub fn x_min(&self) -> f64 {
        self.sim.grid.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.sim.grid.x(self.sim.grid.len - 1)
    }

    pub fn slab_length(&self) -> f64 {
        self.sim.cfg.slab_length()
    }

    pub fn steps(&mut self, count: usize) {
        for _ in 0..count {
            if self.sim.state.time >= self.sim.cfg.t_end {
                break;
            }
            self.sim.step();
        }
    }

    /// Decimated field magnitude, rows of `(x, |u|)`.
    pub fn field(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.sim.grid.len / self.stride);
        for i in (0..self.sim.grid.len).step_by(self.stride) {
            out.push(self.sim.grid.x(i));
            out.push(self.sim.state.u_curr[i].norm());
        }
        out
    }

    /// Current energy split: `[t, total, left, slab, right]`.
    pub fn energies(&self) -> Vec<f64> {
        let e = self.sim.energy();
        vec![e.time, e.total, e.left, e.slab, e.right]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COMB: &str =
        r#"{"period":1.0,"amplitude":100.0,"deltas":[{"offset":0.0,"strength":1.0}],"smooth":[]}"#;

    #[test]
    fn curves_have_the_documented_layout() {
        let d = dispersion_curve_impl(COMB, 0.5, 9.5, 64).unwrap();
        assert_eq!(d.len(), 4 * 64);
        assert_eq!(d[0], 0.5);

        let t = transmission_curve_impl(COMB, 8, 0.5, 9.5, 64).unwrap();
        assert_eq!(t.len(), 2 * 64);
        assert!(t
            .iter()
            .skip(1)
            .step_by(2)
            .all(|v| (0.0..=1.0 + 1e-9).contains(v)));
    }

    #[test]
    fn pulse_sim_advances_and_reports() {
        let mut sim = PulseSim::build(30.0, 1.0, 3, 20.0, 24).unwrap();
        let e0 = sim.energies();
        sim.steps(200);
        let e1 = sim.energies();
        assert!(e1[0] > e0[0]);
        assert!((e1[1] - e0[1]).abs() < 1e-3 * e0[1]);
        assert!(!sim.field().is_empty());
    }

    #[test]
    fn bad_inputs_are_reported() {
        assert!(dispersion_curve_impl("{bad", 0.5, 1.0, 4).is_err());
        assert!(transmission_curve_impl(COMB, 0, 0.5, 1.0, 4).is_err());
        assert!(PulseSim::build(30.0, -1.0, 3, 20.0, 24).is_err());
    }
}
