//! Named catalog of initial data and data terms.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fem::{project, FEFunction, Mesh1D, Projection};
use crate::noise::{mix64, UniformStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Zero,
    /// Tent `1 − |2x − 1|`.
    Hat,
    /// `sin(πx)`.
    Sin,
    /// Indicator of `[1/4, 3/4]`.
    Step,
    /// `x`; the Dirichlet projection cuts it off at `x = 1`.
    Ramp,
    /// `Step` plus Gaussian noise at the interior nodes.
    NoisyStep,
}

impl Profile {
    pub const ALL: [Profile; 6] = [
        Profile::Zero,
        Profile::Hat,
        Profile::Sin,
        Profile::Step,
        Profile::Ramp,
        Profile::NoisyStep,
    ];

    /// Pointwise value of the underlying clean profile.
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Profile::Zero => 0.0,
            Profile::Hat => 1.0 - (2.0 * x - 1.0).abs(),
            Profile::Sin => (std::f64::consts::PI * x).sin(),
            Profile::Step | Profile::NoisyStep => {
                if (0.25..=0.75).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Ramp => x,
        }
    }

    /// Maps the profile into the Dirichlet space of `mesh`. Only
    /// `NoisyStep` uses `noise_amplitude` and `noise_seed`.
    pub fn build(
        self,
        mesh: Arc<Mesh1D>,
        projection: Projection,
        noise_amplitude: f64,
        noise_seed: u64,
    ) -> FEFunction {
        let clean = project(|x| self.eval(x), mesh.clone(), projection);
        if self != Profile::NoisyStep || noise_amplitude == 0.0 {
            return clean;
        }
        let stream = UniformStream::new(mix64(noise_seed ^ 0x6e6f_6973_795f_7374));
        let interior: Vec<f64> = clean
            .interior()
            .iter()
            .enumerate()
            .map(|(k, v)| v + noise_amplitude * stream.normal_at(k as u64))
            .collect();
        FEFunction::from_interior(mesh, &interior).expect("interior length matches the mesh")
    }

    pub fn name(self) -> &'static str {
        match self {
            Profile::Zero => "zero",
            Profile::Hat => "hat",
            Profile::Sin => "sin",
            Profile::Step => "step",
            Profile::Ramp => "ramp",
            Profile::NoisyStep => "noisy-step",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Profile::ALL.iter().map(|p| p.name()).collect();
                format!("unknown profile `{s}` (expected one of {})", names.join(", "))
            })
    }
}
