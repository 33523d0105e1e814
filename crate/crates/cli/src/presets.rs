//! Named reproduction recipes, scaled down to run on a desktop.

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub config: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1a",
        summary: "EA overshoot after quenching the ferromagnet, gamma sweep (L=12, window [200, 2000])",
        config: r#"mode = "quench"
probes = ["EA-U1", "CV", "EE", "EEQ"]
region = "third"
description = "Untilted ferromagnet under H1 for gamma = 0.8 ... 0.1. Late-time averages use 2000 samples on [200, 2000] instead of [2000, 40000]."

[hamiltonian]
L = 12
gamma = 0.5
delta1 = 0.4
delta2 = 0.0

[initial]
pattern = "ferromagnetic"

[time]
t_max = 20.0
dt = 0.05
late_window = [200.0, 2000.0]
late_samples = 2000

[sweep]
parameter = "gamma"
values = [0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1]

[[analysis]]
kind = "peak"

[[analysis]]
kind = "late-average"
"#,
    },
    Preset {
        name: "fig2a",
        summary: "Mpemba crossing of tilted ferromagnets (theta = 0.2pi vs 0.5pi), gamma sweep (L=12)",
        config: r#"mode = "quench"
probes = ["EA-U1"]
region = "quarter"
description = "Tilted ferromagnets under H1. Full L = 12 scale; t_max is 60 rather than the full late-time range."

[hamiltonian]
L = 12
gamma = 1.0
delta1 = 0.4
delta2 = 0.0

[initial]
pattern = "ferromagnetic"
tilt_angle_pi = 0.2

[time]
t_max = 60.0
dt = 0.05

[sweep]
parameter = "gamma"
values = [1.0, 0.9, 0.8, 0.6]

[[analysis]]
kind = "crossing"
partner_tilt_angle_pi = 0.5

[[analysis]]
kind = "classify"
"#,
    },
    Preset {
        name: "fig3b",
        summary: "Circuit-averaged EA of the antiferromagnet for several Haar densities, with power-law fit (L=12, 200 realizations)",
        config: r#"mode = "circuit"
probes = ["EA-U1", "CV"]
region = "quarter"
description = "Brick-wall circuits from the antiferromagnet. L = 12 and 200 realizations instead of L = 16 and 5000."

[circuit]
L = 12
p_haar = 0.3
depth_units = 40
master_seed = 20240601
n_realizations = 200

[initial]
pattern = "antiferromagnetic"

[sweep]
parameter = "p-haar"
values = [0.05, 0.1, 0.2, 0.3, 0.5]

[[analysis]]
kind = "peak"

[[analysis]]
kind = "powerlaw"
"#,
    },
    Preset {
        name: "fig4",
        summary: "Circuit EA of tilted ferromagnets (theta = 0.2pi vs 0.5pi), U(1) and Z2 probes (L=12, 200 realizations)",
        config: r#"mode = "circuit"
probes = ["EA-U1", "EA-Z2"]
region = "quarter"
description = "Tilted ferromagnets in doped brick-wall circuits. L = 12 and 200 realizations instead of L = 16 and 5000."

[circuit]
L = 12
p_haar = 0.0
depth_units = 30
master_seed = 20240602
n_realizations = 200

[initial]
pattern = "ferromagnetic"
tilt_angle_pi = 0.2

[sweep]
parameter = "p-haar"
values = [0.0, 0.3, 1.0]

[[analysis]]
kind = "crossing"
partner_tilt_angle_pi = 0.5
"#,
    },
    Preset {
        name: "sm-cv-check",
        summary: "Short-time charge variance against its second-order expansion (L=12)",
        config: r#"mode = "quench"
probes = ["CV"]
description = "Tilted ferromagnet under H1 at L = 12; compares t <= 0.3."

[hamiltonian]
L = 12
gamma = 0.6
delta1 = 0.4
delta2 = 0.0

[initial]
pattern = "ferromagnetic"
tilt_angle_pi = 0.2

[time]
t_max = 0.3
dt = 0.01

[[analysis]]
kind = "cv-oracle"
t_max = 0.3
"#,
    },
    Preset {
        name: "sm-finite-size",
        summary: "Finite-size extrapolation of the peak EA density (L = 8, 10, 12)",
        config: r#"mode = "quench"
probes = ["EA-U1"]
region = "third"
description = "Untilted ferromagnet under H1 at gamma = 0.4. Uses L in {8, 10, 12} instead of {18, 21, 24, 27}; density is peak EA per region site."

[hamiltonian]
L = 12
gamma = 0.4
delta1 = 0.4
delta2 = 0.0

[initial]
pattern = "ferromagnetic"

[time]
t_max = 10.0
dt = 0.02

[sweep]
parameter = "L"
values = [8, 10, 12]

[[analysis]]
kind = "finite-size"
"#,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
