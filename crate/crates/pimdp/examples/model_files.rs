//! Writing, reloading and solving a model file.
//!
//! Models are plain JSON documents with named states and nested label
//! arrays. Labels must be members of the declared scale (matched by exact
//! canonical text, not numeric closeness), and every table row is validated
//! for normalization on load.
//!
//! Run with: `cargo run --example model_files`

use pimdp::modelfile::{load_model, parse_model, save_model, LoadedModel};

const DOOR_MODEL: &str = r#"{
  "kind": "pi-mdp",
  "scale": [0, 0.5, 1],
  "states": ["hall", "door", "outside"],
  "actions": ["wait", "push"],
  "transition": [
    [[1, 0, 0], [0.5, 1, 0]],
    [[0, 1, 0], [0, 0.5, 1]],
    [[0, 0, 1], [0, 0, 1]]
  ],
  "preference": [0, 0, 1],
  "stay_action": "wait"
}"#;

fn main() -> pimdp::Result<()> {
    let loaded = parse_model(DOOR_MODEL)?;
    println!("parsed a {} model", loaded.kind());

    let dir = std::env::temp_dir().join("pimdp-example-models");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("door.json");
    save_model(&loaded, &path)?;
    println!("saved to {}", path.display());

    let reloaded = load_model(&path)?;
    assert_eq!(loaded, reloaded, "the file round-trip is the identity");
    println!("reloaded model is identical");

    let LoadedModel::Mdp(m) = reloaded else {
        unreachable!("declared as pi-mdp");
    };
    let solution = pimdp::mdp::value_iteration(&m.model)?;
    println!("\nsolved in {} sweeps:", solution.iterations);
    let scale = m.model.scale();
    for (s, name) in m.states.iter().enumerate() {
        println!(
            "  {name}: value {}, policy {}",
            scale.label(solution.values[s]),
            m.actions[solution.policy.action(s)]
        );
    }

    // Validation in action: a label that is not on the scale.
    let broken = DOOR_MODEL.replace("[0.5, 1, 0]", "[0.3, 1, 0]");
    match parse_model(&broken) {
        Err(e) => println!("\nrejected a corrupted file: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
