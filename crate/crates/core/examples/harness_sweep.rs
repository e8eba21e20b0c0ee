//! Run a configured experiment through the harness, writing its CSV table
//! and SVG plot, then re-render the plot from the CSV alone.

use ssl_gibbs_lab::harness::{run, svg_from_csv, Experiment, ExperimentConfig};

fn main() -> ssl_gibbs_lab::Result<()> {
    let out = std::env::temp_dir().join("ssl_gibbs_lab_sweep");
    let text = format!(
        "seed = 11\noutput_dir = {:?}\n[mean-gen-sweep]\nsigma = 0.5\nn = 100\ntrials = 100000\n",
        out.display().to_string()
    );
    let cfg = ExperimentConfig::from_toml_str(Experiment::MeanGenSweep, &text, &[])?;
    let art = run(&cfg)?;
    println!("wrote {} and {}", art.csv.display(), art.svg.display());
    let again = svg_from_csv(Experiment::MeanGenSweep, &art.csv)?;
    assert_eq!(again, std::fs::read_to_string(&art.svg).expect("svg"));
    Ok(())
}
