#[allow(dead_code)]
#[path = "../examples/anisotropic_noise.rs"]
mod anisotropic_noise_example;

#[test]
fn anisotropic_noise_example_runs() {
    anisotropic_noise_example::run_example().expect("anisotropic_noise example should run");
}

#[allow(dead_code)]
#[path = "../examples/channel_duality.rs"]
mod channel_duality_example;

#[test]
fn channel_duality_example_runs() {
    channel_duality_example::run_example().expect("channel_duality example should run");
}

#[allow(dead_code)]
#[path = "../examples/chsh_breaking.rs"]
mod chsh_breaking_example;

#[test]
fn chsh_breaking_example_runs() {
    chsh_breaking_example::run_example().expect("chsh_breaking example should run");
}

#[allow(dead_code)]
#[path = "../examples/family_thresholds.rs"]
mod family_thresholds_example;

#[test]
fn family_thresholds_example_runs() {
    family_thresholds_example::run_example().expect("family_thresholds example should run");
}

#[allow(dead_code)]
#[path = "../examples/joint_measurability.rs"]
mod joint_measurability_example;

#[test]
fn joint_measurability_example_runs() {
    joint_measurability_example::run_example().expect("joint_measurability example should run");
}

#[allow(dead_code)]
#[path = "../examples/montecarlo.rs"]
mod montecarlo_example;

#[test]
fn montecarlo_example_runs() {
    montecarlo_example::run_example().expect("montecarlo example should run");
}

#[allow(dead_code)]
#[path = "../examples/threshold_sweep.rs"]
mod threshold_sweep_example;

#[test]
fn threshold_sweep_example_runs() {
    threshold_sweep_example::run_example().expect("threshold_sweep example should run");
}

#[allow(dead_code)]
#[path = "../examples/tripartite_bounds.rs"]
mod tripartite_bounds_example;

#[test]
fn tripartite_bounds_example_runs() {
    tripartite_bounds_example::run_example().expect("tripartite_bounds example should run");
}

#[allow(dead_code)]
#[path = "../examples/verify_suites.rs"]
mod verify_suites_example;

#[test]
fn verify_suites_example_runs() {
    verify_suites_example::run_example().expect("verify_suites example should run");
}

#[allow(dead_code)]
#[path = "../examples/w_gap.rs"]
mod w_gap_example;

#[test]
fn w_gap_example_runs() {
    w_gap_example::run_example().expect("w_gap example should run");
}
