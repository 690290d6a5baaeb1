use std::path::{Path, PathBuf};

use balbound::reduction::gramian_count;
use balbound_bench::config::Config;
use balbound_bench::sweep::run_n_sweep;

// Own test binary: nothing else here computes Gramians.
#[test]
fn n_sweep_solves_full_gramians_once() {
    let c = Config::parse(
        "synth.n = 30\nseed = 5\nn_range = 2..12\nk = 10\n",
        Path::new("t"),
        PathBuf::from("."),
    )
    .unwrap();
    let sc = c.scenario().unwrap();
    let before = gramian_count();
    let sweep = run_n_sweep(&sc).unwrap();
    assert_eq!(gramian_count() - before, 1);
    assert_eq!(sweep.rows.len(), 22);
}
