//! Load a labeled dataset from CSV and run the empirical logistic
//! experiment on it instead of synthetic draws.

use std::io::Write;

use ssl_gibbs_lab::ssmle_logistic::{empirical_gen_experiment, DataSource, EmpiricalOptions};
use ssl_gibbs_lab::synthdata::{
    ingest_csv_dataset, sample_labeled, GaussianMixtureSpec, LabelColumn,
};
use ssl_gibbs_lab::RngStream;

fn main() -> ssl_gibbs_lab::Result<()> {
    // Write a small file first so the example is self-contained.
    let spec = GaussianMixtureSpec::ones_direction(3, 1.0)?;
    let data = sample_labeled(&spec, 2_000, &RngStream::new(1, 0))?;
    let path = std::env::temp_dir().join("ssl_gibbs_lab_example.csv");
    let mut f = std::fs::File::create(&path).expect("temp file");
    writeln!(f, "x0,x1,x2,label").unwrap();
    for i in 0..data.len() {
        let x = data.features().row(i);
        let y = if data.labels()[i].sign() > 0.0 { 1 } else { 0 };
        writeln!(f, "{},{},{},{y}", x[0], x[1], x[2]).unwrap();
    }
    drop(f);

    let loaded = ingest_csv_dataset(&path, &LabelColumn::from("label"))?;
    println!("read {} rows of dimension {}", loaded.len(), loaded.dim());

    let opts = EmpiricalOptions {
        n: 200,
        lambda_grid: vec![0.0, 1.0, 5.0],
        repetitions: 10,
        test_size: 500,
        nu: 1e-3,
    };
    for cell in
        empirical_gen_experiment(&DataSource::Dataset(loaded), &opts, &RngStream::new(2, 0))?
    {
        println!(
            "lambda={} m={} gen={:.5} ± {:.5}",
            cell.lambda, cell.m, cell.gen.value, cell.gen.std_err
        );
    }
    std::fs::remove_file(&path).ok();
    Ok(())
}
