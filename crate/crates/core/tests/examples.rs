macro_rules! example {
    ($module:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(geometry, "geometry.rs");
example!(channel_sampling, "channel_sampling.rs");
example!(closed_forms, "closed_forms.rs");
example!(statistical_beamforming, "statistical_beamforming.rs");
example!(monte_carlo, "monte_carlo.rs");
example!(distributed_vs_centralized, "distributed_vs_centralized.rs");
example!(config_sweep, "config_sweep.rs");

#[test]
fn geometry_example_runs() {
    geometry::run_example().expect("geometry example should run");
}

#[test]
fn channel_sampling_example_runs() {
    channel_sampling::run_example().expect("channel sampling example should run");
}

#[test]
fn closed_forms_example_runs() {
    closed_forms::run_example().expect("closed forms example should run");
}

#[test]
fn statistical_beamforming_example_runs() {
    statistical_beamforming::run_example().expect("beamforming example should run");
}

#[test]
fn monte_carlo_example_runs() {
    monte_carlo::run_example().expect("monte carlo example should run");
}

#[test]
fn distributed_vs_centralized_example_runs() {
    distributed_vs_centralized::run_example().expect("comparison example should run");
}

#[test]
fn config_sweep_example_runs() {
    config_sweep::run_example().expect("config sweep example should run");
}
