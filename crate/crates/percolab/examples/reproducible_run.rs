//! Runs a CLI experiment from a JSON config twice and compares the manifests.
use percolab::experiment::{run, Command};

fn main() -> percolab::Result<()> {
    let dir = std::env::temp_dir();
    let out = dir.join("percolab_example_tail.csv");
    let cfg = format!(
        r#"{{"command":"tail","family":"tree","degree":3,"radius":10,"p":0.7,"trials":5000,"seed":9,"out":{}}}"#,
        serde_json::to_string(&out)?
    );
    let cmd = Command::from_json(&cfg)?;
    let a = run(&cmd)?;
    let b = run(&cmd)?;
    println!("config hash {}", a.config_sha256);
    println!("output hashes equal: {}", a.outputs[0].sha256 == b.outputs[0].sha256);
    Ok(())
}
