//! Drive the sweep commands from a TOML configuration, write CSV and JSON,
//! and read the CSV back.
//!
//! cargo run --example sweep_files

use nh_entangle::sweep::{
    cmd_evolve, cmd_sweep_ratio, read_csv, write_rows, Format, RunConfig, SweepRecord,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = RunConfig::from_toml_str(
        r#"
        system = "2q"
        initial = "nh"
        ratio = 0.5
        tmax = 5.0
        steps = 11
        "#,
    )?;
    let rows = cmd_evolve(&cfg)?;
    let mut csv = Vec::new();
    write_rows(&mut csv, &rows, Format::Csv, "evolve", &cfg)?;
    print!("{}", String::from_utf8(csv.clone())?);
    let back: Vec<SweepRecord> = read_csv(&csv[..])?;
    assert_eq!(back, rows);

    let sweep = RunConfig {
        ratio_range: Some("0:1:0.25".into()),
        system: Some(nh_entangle::model::System::ThreeQubit),
        ..RunConfig::default()
    };
    let rows = cmd_sweep_ratio(&sweep)?;
    write_rows(
        &mut std::io::stdout(),
        &rows,
        Format::Json,
        "sweep-ratio",
        &sweep,
    )?;
    Ok(())
}
