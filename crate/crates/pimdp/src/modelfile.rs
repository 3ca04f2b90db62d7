//! JSON model files.
//!
//! A model file declares its kind, its scale, named states, actions and
//! observations, and nested arrays of scale labels for the tables. Labels
//! are matched to scale members by exact decimal text after canonical
//! formatting (the shortest round-trip form), never by closeness: levels are
//! order-theoretic and an approximate match would corrupt the scale.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::PiMdpModel;
use crate::momdp::{MixedBelief, PiMomdpModel};
use crate::pomdp::PiPomdpModel;
use crate::scale::{make_scale, Level, PossibilityDistribution, PossibilityRow, QualitativeScale};

/// On-disk document, tagged by `kind`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ModelFile {
    #[serde(rename = "pi-mdp")]
    Mdp(MdpFile),
    #[serde(rename = "pi-pomdp")]
    Pomdp(PomdpFile),
    #[serde(rename = "pi-momdp")]
    Momdp(MomdpFile),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MdpFile {
    pub scale: Vec<f64>,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    /// `transition[state][action][next_state]`, as scale labels.
    pub transition: Vec<Vec<Vec<f64>>>,
    /// `preference[state]`.
    pub preference: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stay_action: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PomdpFile {
    #[serde(flatten)]
    pub core: MdpFile,
    pub observations: Vec<String>,
    /// `observation[next_state][action][observation]`.
    pub observation: Vec<Vec<Vec<f64>>>,
    /// `initial_belief[state]`.
    pub initial_belief: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stay_observation: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomdpFile {
    pub scale: Vec<f64>,
    pub visible_states: Vec<String>,
    pub hidden_states: Vec<String>,
    pub actions: Vec<String>,
    pub hidden_observations: Vec<String>,
    /// `transition[visible][hidden][action][next_visible][next_hidden]`.
    pub transition: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
    /// `hidden_observation[next_visible][next_hidden][action][observation]`.
    pub hidden_observation: Vec<Vec<Vec<Vec<f64>>>>,
    /// `preference[visible][hidden]`.
    pub preference: Vec<Vec<f64>>,
    pub initial_visible: String,
    /// `initial_hidden_belief[hidden]`.
    pub initial_hidden_belief: Vec<f64>,
    pub stay_action: String,
    pub stay_observation: String,
}

/// A validated model of the declared kind, with its display names.
#[derive(Clone, Debug, PartialEq)]
pub enum LoadedModel {
    Mdp(LoadedMdp),
    Pomdp(LoadedPomdp),
    Momdp(LoadedMomdp),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedMdp {
    pub model: PiMdpModel,
    pub states: Vec<String>,
    pub actions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedPomdp {
    pub model: PiPomdpModel,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub observations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedMomdp {
    pub model: PiMomdpModel,
    pub visible_states: Vec<String>,
    pub hidden_states: Vec<String>,
    pub actions: Vec<String>,
    pub hidden_observations: Vec<String>,
}

impl LoadedModel {
    pub fn kind(&self) -> &'static str {
        match self {
            LoadedModel::Mdp(_) => "pi-mdp",
            LoadedModel::Pomdp(_) => "pi-pomdp",
            LoadedModel::Momdp(_) => "pi-momdp",
        }
    }
}

/// Canonical text of a label: the shortest form that parses back to the same
/// number.
fn canonical(label: f64) -> String {
    format!("{label}")
}

struct LabelTable<'a> {
    scale: &'a QualitativeScale,
    by_text: HashMap<String, Level>,
}

impl<'a> LabelTable<'a> {
    fn new(scale: &'a QualitativeScale) -> Self {
        let by_text = scale
            .iter()
            .map(|l| (canonical(scale.label(l)), l))
            .collect();
        Self { scale, by_text }
    }

    fn level(&self, label: f64, where_: &str) -> Result<Level> {
        self.by_text.get(&canonical(label)).copied().ok_or_else(|| {
            Error::Validation(format!(
                "{where_}: label {} is not a member of the declared scale",
                canonical(label)
            ))
        })
    }

    fn levels(&self, labels: &[f64], where_: &str) -> Result<Vec<Level>> {
        labels.iter().map(|&x| self.level(x, where_)).collect()
    }

    fn row(&self, labels: &[f64], expected: usize, where_: &str) -> Result<PossibilityRow> {
        if labels.len() != expected {
            return Err(Error::Validation(format!(
                "{where_}: expected {expected} entries, got {}",
                labels.len()
            )));
        }
        let levels = self.levels(labels, where_)?;
        PossibilityRow::from_dense(self.scale, &levels)
            .map_err(|_| Error::Validation(format!("{where_} not normalized")))
    }
}

fn unique_names(names: &[String], what: &str) -> Result<()> {
    if names.is_empty() {
        return Err(Error::Validation(format!("{what} list is empty")));
    }
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::Validation(format!("duplicate {what} name {n:?}")));
        }
    }
    Ok(())
}

fn name_index(names: &[String], name: &str, what: &str) -> Result<usize> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| Error::Validation(format!("unknown {what} name {name:?}")))
}

fn build_mdp(file: &MdpFile) -> Result<LoadedMdp> {
    unique_names(&file.states, "state")?;
    unique_names(&file.actions, "action")?;
    let scale = make_scale(&file.scale)?;
    let labels = LabelTable::new(&scale);
    let ns = file.states.len();
    let na = file.actions.len();
    if file.transition.len() != ns {
        return Err(Error::Validation(format!(
            "transition table has {} state entries, expected {ns}",
            file.transition.len()
        )));
    }
    let mut rows = Vec::with_capacity(ns * na);
    for (s, per_action) in file.transition.iter().enumerate() {
        if per_action.len() != na {
            return Err(Error::Validation(format!(
                "transition[{s}] has {} action entries, expected {na}",
                per_action.len()
            )));
        }
        for (a, row) in per_action.iter().enumerate() {
            rows.push(labels.row(row, ns, &format!("transition row (s={s}, a={a})"))?);
        }
    }
    let preference = labels.levels(&file.preference, "preference")?;
    if preference.len() != ns {
        return Err(Error::Validation(format!(
            "preference has {} entries, expected {ns}",
            preference.len()
        )));
    }
    let stay = file
        .stay_action
        .as_deref()
        .map(|n| name_index(&file.actions, n, "stay action"))
        .transpose()?;
    let model = PiMdpModel::new(scale, ns, na, rows, preference, stay)?;
    Ok(LoadedMdp {
        model,
        states: file.states.clone(),
        actions: file.actions.clone(),
    })
}

fn build_pomdp(file: &PomdpFile) -> Result<LoadedPomdp> {
    let core = build_mdp(&file.core)?;
    unique_names(&file.observations, "observation")?;
    let scale = core.model.scale().clone();
    let labels = LabelTable::new(&scale);
    let ns = core.states.len();
    let na = core.actions.len();
    let no = file.observations.len();
    if file.observation.len() != ns {
        return Err(Error::Validation(format!(
            "observation table has {} state entries, expected {ns}",
            file.observation.len()
        )));
    }
    let mut rows = Vec::with_capacity(ns * na);
    for (s, per_action) in file.observation.iter().enumerate() {
        if per_action.len() != na {
            return Err(Error::Validation(format!(
                "observation[{s}] has {} action entries, expected {na}",
                per_action.len()
            )));
        }
        for (a, row) in per_action.iter().enumerate() {
            rows.push(labels.row(row, no, &format!("observation row (s'={s}, a={a})"))?);
        }
    }
    let initial_levels = labels.levels(&file.initial_belief, "initial_belief")?;
    let initial = PossibilityDistribution::new(&scale, initial_levels)
        .map_err(|_| Error::Validation("initial_belief not normalized".into()))?;
    let stay_obs = file
        .stay_observation
        .as_deref()
        .map(|n| name_index(&file.observations, n, "stay observation"))
        .transpose()?;
    let model = PiPomdpModel::new(core.model, no, rows, initial, stay_obs)?;
    Ok(LoadedPomdp {
        model,
        states: core.states,
        actions: core.actions,
        observations: file.observations.clone(),
    })
}

fn build_momdp(file: &MomdpFile) -> Result<LoadedMomdp> {
    unique_names(&file.visible_states, "visible state")?;
    unique_names(&file.hidden_states, "hidden state")?;
    unique_names(&file.actions, "action")?;
    unique_names(&file.hidden_observations, "hidden observation")?;
    let scale = make_scale(&file.scale)?;
    let labels = LabelTable::new(&scale);
    let nv = file.visible_states.len();
    let nh = file.hidden_states.len();
    let na = file.actions.len();
    let no = file.hidden_observations.len();
    let product = nv * nh;

    let mut transition = vec![None; product * na];
    if file.transition.len() != nv {
        return Err(Error::Validation(format!(
            "transition table has {} visible entries, expected {nv}",
            file.transition.len()
        )));
    }
    for (sv, per_hidden) in file.transition.iter().enumerate() {
        if per_hidden.len() != nh {
            return Err(Error::Validation(format!(
                "transition[{sv}] has {} hidden entries, expected {nh}",
                per_hidden.len()
            )));
        }
        for (sh, per_action) in per_hidden.iter().enumerate() {
            if per_action.len() != na {
                return Err(Error::Validation(format!(
                    "transition[{sv}][{sh}] has {} action entries, expected {na}",
                    per_action.len()
                )));
            }
            for (a, nested) in per_action.iter().enumerate() {
                let where_ = format!("transition row (sv={sv}, sh={sh}, a={a})");
                if nested.len() != nv {
                    return Err(Error::Validation(format!(
                        "{where_}: expected {nv} visible entries"
                    )));
                }
                let mut flat = Vec::with_capacity(product);
                for next in nested {
                    if next.len() != nh {
                        return Err(Error::Validation(format!(
                            "{where_}: expected {nh} hidden entries"
                        )));
                    }
                    flat.extend_from_slice(next);
                }
                transition[(sv * nh + sh) * na + a] = Some(labels.row(&flat, product, &where_)?);
            }
        }
    }

    let mut observation = vec![None; product * na];
    if file.hidden_observation.len() != nv {
        return Err(Error::Validation(format!(
            "hidden_observation table has {} visible entries, expected {nv}",
            file.hidden_observation.len()
        )));
    }
    for (sv, per_hidden) in file.hidden_observation.iter().enumerate() {
        if per_hidden.len() != nh {
            return Err(Error::Validation(format!(
                "hidden_observation[{sv}] has {} hidden entries, expected {nh}",
                per_hidden.len()
            )));
        }
        for (sh, per_action) in per_hidden.iter().enumerate() {
            if per_action.len() != na {
                return Err(Error::Validation(format!(
                    "hidden_observation[{sv}][{sh}] has {} action entries, expected {na}",
                    per_action.len()
                )));
            }
            for (a, row) in per_action.iter().enumerate() {
                let where_ = format!("hidden observation row (sv'={sv}, sh'={sh}, a={a})");
                observation[(sv * nh + sh) * na + a] = Some(labels.row(row, no, &where_)?);
            }
        }
    }

    if file.preference.len() != nv || file.preference.iter().any(|p| p.len() != nh) {
        return Err(Error::Validation(
            "preference must be a visible x hidden table".into(),
        ));
    }
    let mut preference = Vec::with_capacity(product);
    for per_hidden in &file.preference {
        preference.extend(labels.levels(per_hidden, "preference")?);
    }

    let initial_visible = name_index(&file.visible_states, &file.initial_visible, "visible state")?;
    let hidden_levels = labels.levels(&file.initial_hidden_belief, "initial_hidden_belief")?;
    let hidden0 = PossibilityDistribution::new(&scale, hidden_levels)
        .map_err(|_| Error::Validation("initial_hidden_belief not normalized".into()))?;
    let stay_action = name_index(&file.actions, &file.stay_action, "stay action")?;
    let stay_observation = name_index(
        &file.hidden_observations,
        &file.stay_observation,
        "stay observation",
    )?;

    let model = PiMomdpModel::new(
        scale,
        nv,
        nh,
        na,
        no,
        transition.into_iter().map(|r| r.expect("filled")).collect(),
        observation.into_iter().map(|r| r.expect("filled")).collect(),
        preference,
        MixedBelief::new(initial_visible, hidden0),
        stay_action,
        stay_observation,
    )?;
    Ok(LoadedMomdp {
        model,
        visible_states: file.visible_states.clone(),
        hidden_states: file.hidden_states.clone(),
        actions: file.actions.clone(),
        hidden_observations: file.hidden_observations.clone(),
    })
}

/// Parses and fully validates a model document.
pub fn parse_model(text: &str) -> Result<LoadedModel> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    build_model(&file)
}

/// Validates a parsed document.
pub fn build_model(file: &ModelFile) -> Result<LoadedModel> {
    match file {
        ModelFile::Mdp(f) => Ok(LoadedModel::Mdp(build_mdp(f)?)),
        ModelFile::Pomdp(f) => Ok(LoadedModel::Pomdp(build_pomdp(f)?)),
        ModelFile::Momdp(f) => Ok(LoadedModel::Momdp(build_momdp(f)?)),
    }
}

/// Loads a model file from disk.
pub fn load_model(path: &Path) -> Result<LoadedModel> {
    let text = std::fs::read_to_string(path)?;
    parse_model(&text)
}

fn dense_labels(scale: &QualitativeScale, row: &PossibilityRow) -> Vec<f64> {
    row.to_dense().iter().map(|&l| scale.label(l)).collect()
}

/// Serializes a validated model back into its document form; loading the
/// result reproduces the model exactly.
pub fn to_model_file(loaded: &LoadedModel) -> ModelFile {
    match loaded {
        LoadedModel::Mdp(m) => ModelFile::Mdp(mdp_file(m)),
        LoadedModel::Pomdp(p) => {
            let core = LoadedMdp {
                model: p.model.core().clone(),
                states: p.states.clone(),
                actions: p.actions.clone(),
            };
            let scale = p.model.scale();
            ModelFile::Pomdp(PomdpFile {
                core: mdp_file(&core),
                observations: p.observations.clone(),
                observation: (0..p.model.num_states())
                    .map(|s| {
                        (0..p.model.num_actions())
                            .map(|a| dense_labels(scale, p.model.observation_row(s, a)))
                            .collect()
                    })
                    .collect(),
                initial_belief: p
                    .model
                    .initial_belief()
                    .values()
                    .iter()
                    .map(|&l| scale.label(l))
                    .collect(),
                stay_observation: p
                    .model
                    .stay_observation()
                    .map(|o| p.observations[o].clone()),
            })
        }
        LoadedModel::Momdp(m) => ModelFile::Momdp(momdp_file(m)),
    }
}

fn mdp_file(m: &LoadedMdp) -> MdpFile {
    let scale = m.model.scale();
    MdpFile {
        scale: scale.labels().to_vec(),
        states: m.states.clone(),
        actions: m.actions.clone(),
        transition: (0..m.model.num_states())
            .map(|s| {
                (0..m.model.num_actions())
                    .map(|a| dense_labels(scale, m.model.row(s, a)))
                    .collect()
            })
            .collect(),
        preference: m
            .model
            .preferences()
            .iter()
            .map(|&l| scale.label(l))
            .collect(),
        stay_action: m.model.stay_action().map(|a| m.actions[a].clone()),
    }
}

fn momdp_file(m: &LoadedMomdp) -> MomdpFile {
    let model = &m.model;
    let scale = model.scale();
    let nv = model.num_visible_states();
    let nh = model.num_hidden_states();
    let na = model.num_actions();
    MomdpFile {
        scale: scale.labels().to_vec(),
        visible_states: m.visible_states.clone(),
        hidden_states: m.hidden_states.clone(),
        actions: m.actions.clone(),
        hidden_observations: m.hidden_observations.clone(),
        transition: (0..nv)
            .map(|sv| {
                (0..nh)
                    .map(|sh| {
                        (0..na)
                            .map(|a| {
                                let dense =
                                    dense_labels(scale, model.transition_row(sv * nh + sh, a));
                                (0..nv)
                                    .map(|nv_| dense[nv_ * nh..(nv_ + 1) * nh].to_vec())
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
        hidden_observation: (0..nv)
            .map(|sv| {
                (0..nh)
                    .map(|sh| {
                        (0..na)
                            .map(|a| dense_labels(scale, model.observation_row(sv * nh + sh, a)))
                            .collect()
                    })
                    .collect()
            })
            .collect(),
        preference: (0..nv)
            .map(|sv| {
                (0..nh)
                    .map(|sh| scale.label(model.preference_at(sv, sh)))
                    .collect()
            })
            .collect(),
        initial_visible: m.visible_states[model.initial().visible()].clone(),
        initial_hidden_belief: model
            .initial()
            .hidden()
            .values()
            .iter()
            .map(|&l| scale.label(l))
            .collect(),
        stay_action: m.actions[model.stay_action()].clone(),
        stay_observation: m.hidden_observations[model.stay_observation()].clone(),
    }
}

/// Writes a model document to disk as pretty-printed JSON.
pub fn save_model(loaded: &LoadedModel, path: &Path) -> Result<()> {
    let file = to_model_file(loaded);
    let text =
        serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// The grid model as a loadable document, with coordinate names.
pub fn grid_momdp_to_loaded(cfg: &crate::grid::GridConfig) -> Result<LoadedMomdp> {
    let model = crate::grid::build_possibilistic_grid(cfg)?;
    let visible_states = (0..model.num_visible_states())
        .map(|cell| {
            let (x, y) = cfg.coords(cell);
            format!("({x},{y})")
        })
        .collect();
    Ok(LoadedMomdp {
        model,
        visible_states,
        hidden_states: vec!["A1".into(), "A2".into()],
        actions: crate::grid::ACTION_NAMES.iter().map(|s| s.to_string()).collect(),
        hidden_observations: vec![
            "oAA".into(),
            "oAB".into(),
            "oBA".into(),
            "oBB".into(),
            "nothing".into(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_STATE: &str = r#"{
        "kind": "pi-mdp",
        "scale": [0, 1],
        "states": ["s1", "s2"],
        "actions": ["stay", "b"],
        "transition": [
            [[1, 0], [0, 1]],
            [[0, 1], [0, 1]]
        ],
        "preference": [0, 1],
        "stay_action": "stay"
    }"#;

    #[test]
    fn parses_and_validates_a_small_mdp() {
        let loaded = parse_model(TWO_STATE).unwrap();
        let LoadedModel::Mdp(m) = loaded else {
            panic!("expected an mdp");
        };
        assert_eq!(m.model.num_states(), 2);
        assert_eq!(m.model.stay_action(), Some(0));
        assert_eq!(m.states, vec!["s1", "s2"]);
    }

    #[test]
    fn rejects_unnormalized_transition_row() {
        let text = TWO_STATE.replace("[[0, 1], [0, 1]]", "[[0, 0], [0, 1]]");
        let err = parse_model(&text).unwrap_err();
        assert!(err.to_string().contains("(s=1, a=0)"), "got: {err}");
    }

    #[test]
    fn rejects_labels_outside_the_scale() {
        let text = TWO_STATE.replace("\"preference\": [0, 1]", "\"preference\": [0.3, 1]");
        let err = parse_model(&text).unwrap_err();
        assert!(err.to_string().contains("0.3"), "got: {err}");
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_model("{ \"kind\": ").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line") || msg.contains("column"), "got: {msg}");
    }

    #[test]
    fn roundtrip_is_identity() {
        let loaded = parse_model(TWO_STATE).unwrap();
        let text = serde_json::to_string(&to_model_file(&loaded)).unwrap();
        let again = parse_model(&text).unwrap();
        assert_eq!(loaded, again);
    }

    #[test]
    fn grid_roundtrip_is_identity() {
        let cfg = crate::grid::GridConfig {
            g: 3,
            ..Default::default()
        };
        let loaded = LoadedModel::Momdp(grid_momdp_to_loaded(&cfg).unwrap());
        let text = serde_json::to_string(&to_model_file(&loaded)).unwrap();
        let again = parse_model(&text).unwrap();
        assert_eq!(loaded, again);
    }

    #[test]
    fn irrational_labels_survive_the_text_roundtrip() {
        // Shortest round-trip formatting is exact for every f64, including
        // the grid's square-root labels.
        let cfg = crate::grid::GridConfig {
            g: 4,
            ..Default::default()
        };
        let loaded = grid_momdp_to_loaded(&cfg).unwrap();
        for &label in loaded.model.scale().labels() {
            let text = format!("{label}");
            assert_eq!(text.parse::<f64>().unwrap(), label);
        }
    }
}
