//! Scene dataset generation with co-occurrence priors.
//!
//! Each scene draws a category, an object count, per-object difficulties,
//! and labels from the category's frequency vector. The OOD share is
//! steered with a running quota: after scene `s`, the number of OOD objects
//! assigned so far equals `round(fraction * objects_so_far)` wherever the
//! category priors permit, which keeps the realized share within one object
//! of the target and keeps earlier scenes byte-stable when more scenes are
//! requested.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perception::{GroundTruthObject, Scene};
use crate::rng::RngStream;
use crate::taxonomy::LabelTaxonomy;

/// A named scene category: a label frequency vector over all `M` labels and
/// a mean object count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CategoryPrior {
    pub name: String,
    pub label_weights: Vec<f64>,
    pub mean_objects: f64,
}

/// Dataset prior: categories plus the Beta shape of per-object difficulty.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenePrior {
    pub categories: Vec<CategoryPrior>,
    pub difficulty_alpha: f64,
    pub difficulty_beta: f64,
}

impl ScenePrior {
    pub fn validate(&self, taxonomy: &LabelTaxonomy) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::Config("scene prior has no categories".into()));
        }
        for cat in &self.categories {
            if cat.label_weights.len() != taxonomy.num_labels() {
                return Err(Error::DimensionMismatch(format!(
                    "category {:?} has {} weights for {} labels",
                    cat.name,
                    cat.label_weights.len(),
                    taxonomy.num_labels()
                )));
            }
            if cat.label_weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
                return Err(Error::Config(format!(
                    "category {:?} has invalid weights",
                    cat.name
                )));
            }
            if cat.label_weights.iter().sum::<f64>() <= 0.0 {
                return Err(Error::Config(format!(
                    "category {:?} has zero total weight",
                    cat.name
                )));
            }
            if cat.mean_objects < 1.0 {
                return Err(Error::Config(format!(
                    "category {:?} mean object count below 1",
                    cat.name
                )));
            }
        }
        if self.difficulty_alpha <= 0.0 || self.difficulty_beta <= 0.0 {
            return Err(Error::Config("difficulty Beta shapes must be positive".into()));
        }
        Ok(())
    }
}

fn weights_from_pairs(
    taxonomy: &LabelTaxonomy,
    pairs: &[(&str, f64)],
) -> Vec<f64> {
    let mut w = vec![0.0; taxonomy.num_labels()];
    for (name, weight) in pairs {
        let j = taxonomy
            .label_index(name)
            .unwrap_or_else(|| panic!("default prior label {name:?}"));
        w[j] = *weight;
    }
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}

/// The pinned default prior: five categories with distinct co-occurrence
/// structure, each carrying some animal (OOD) mass so any OOD fraction is
/// feasible. Difficulty is Beta(2, 4).
pub fn default_scene_prior(taxonomy: &LabelTaxonomy) -> ScenePrior {
    let street = weights_from_pairs(
        taxonomy,
        &[
            ("person", 0.28),
            ("car", 0.24),
            ("truck", 0.08),
            ("bus", 0.05),
            ("bicycle", 0.07),
            ("motorcycle", 0.05),
            ("traffic light", 0.09),
            ("stop sign", 0.04),
            ("fire hydrant", 0.03),
            ("handbag", 0.03),
            ("dog", 0.02),
            ("bird", 0.02),
        ],
    );
    let sports_field = weights_from_pairs(
        taxonomy,
        &[
            ("person", 0.42),
            ("sports ball", 0.18),
            ("bench", 0.09),
            ("baseball bat", 0.05),
            ("baseball glove", 0.05),
            ("tennis racket", 0.04),
            ("backpack", 0.04),
            ("kite", 0.04),
            ("frisbee", 0.03),
            ("dog", 0.03),
            ("horse", 0.03),
        ],
    );
    let kitchen = weights_from_pairs(
        taxonomy,
        &[
            ("cup", 0.13),
            ("bowl", 0.11),
            ("bottle", 0.09),
            ("fork", 0.07),
            ("knife", 0.07),
            ("spoon", 0.07),
            ("microwave", 0.04),
            ("oven", 0.05),
            ("sink", 0.05),
            ("refrigerator", 0.04),
            ("banana", 0.05),
            ("apple", 0.05),
            ("sandwich", 0.04),
            ("dining table", 0.05),
            ("person", 0.06),
            ("cat", 0.03),
        ],
    );
    let living_room = weights_from_pairs(
        taxonomy,
        &[
            ("chair", 0.13),
            ("couch", 0.12),
            ("tv", 0.09),
            ("remote", 0.06),
            ("book", 0.09),
            ("potted plant", 0.05),
            ("vase", 0.04),
            ("laptop", 0.06),
            ("teddy bear", 0.04),
            ("bed", 0.04),
            ("person", 0.09),
            ("cat", 0.07),
            ("dog", 0.07),
            ("clock", 0.05),
        ],
    );
    let countryside = weights_from_pairs(
        taxonomy,
        &[
            ("horse", 0.11),
            ("sheep", 0.11),
            ("cow", 0.11),
            ("bird", 0.09),
            ("elephant", 0.05),
            ("bear", 0.04),
            ("zebra", 0.05),
            ("giraffe", 0.05),
            ("dog", 0.05),
            ("cat", 0.03),
            ("person", 0.14),
            ("bench", 0.07),
            ("frisbee", 0.04),
            ("truck", 0.06),
        ],
    );
    ScenePrior {
        categories: vec![
            CategoryPrior {
                name: "street".into(),
                label_weights: street,
                mean_objects: 6.0,
            },
            CategoryPrior {
                name: "sports_field".into(),
                label_weights: sports_field,
                mean_objects: 7.0,
            },
            CategoryPrior {
                name: "kitchen".into(),
                label_weights: kitchen,
                mean_objects: 6.0,
            },
            CategoryPrior {
                name: "living_room".into(),
                label_weights: living_room,
                mean_objects: 5.0,
            },
            CategoryPrior {
                name: "countryside".into(),
                label_weights: countryside,
                mean_objects: 6.0,
            },
        ],
        difficulty_alpha: 1.6,
        difficulty_beta: 2.0,
    }
}

struct CategorySplit {
    ood_weights: Vec<f64>,
    known_weights: Vec<f64>,
    ood_mass: f64,
    known_mass: f64,
}

fn split_weights(cat: &CategoryPrior, taxonomy: &LabelTaxonomy) -> CategorySplit {
    let mut ood_weights = vec![0.0; cat.label_weights.len()];
    let mut known_weights = vec![0.0; cat.label_weights.len()];
    for (j, &w) in cat.label_weights.iter().enumerate() {
        if taxonomy.is_ood(j) {
            ood_weights[j] = w;
        } else {
            known_weights[j] = w;
        }
    }
    CategorySplit {
        ood_mass: ood_weights.iter().sum(),
        known_mass: known_weights.iter().sum(),
        ood_weights,
        known_weights,
    }
}

/// Generates `n_scenes` scenes with the OOD object share steered to
/// `ood_fraction`. Scene `s` draws only from the substream tagged `s`, so a
/// longer run extends a shorter one without disturbing it.
pub fn generate_dataset(
    prior: &ScenePrior,
    taxonomy: &LabelTaxonomy,
    n_scenes: usize,
    ood_fraction: f64,
    stream: &RngStream,
) -> Result<Vec<Scene>> {
    if n_scenes == 0 {
        return Err(Error::Config("dataset needs at least one scene".into()));
    }
    if !(0.0..=1.0).contains(&ood_fraction) {
        return Err(Error::Config(format!(
            "ood fraction {ood_fraction} outside [0,1]"
        )));
    }
    prior.validate(taxonomy)?;
    let splits: Vec<CategorySplit> = prior
        .categories
        .iter()
        .map(|c| split_weights(c, taxonomy))
        .collect();

    let mut scenes = Vec::with_capacity(n_scenes);
    let mut total_objects = 0usize;
    let mut assigned_ood = 0usize;
    for s in 0..n_scenes {
        let mut rng = stream.derive(s as u64);
        let category = rng.uniform_usize(prior.categories.len());
        let split = &splits[category];
        let count = (rng.poisson(prior.categories[category].mean_objects) as usize).max(1);
        let difficulties: Vec<f64> = (0..count)
            .map(|_| rng.beta(prior.difficulty_alpha, prior.difficulty_beta))
            .collect();

        total_objects += count;
        // Running quota: how many OOD objects this scene should carry.
        let target = (ood_fraction * total_objects as f64).round() as usize;
        let mut quota = target.saturating_sub(assigned_ood).min(count);
        if split.ood_mass <= 0.0 {
            quota = 0;
        } else if split.known_mass <= 0.0 {
            quota = count;
        }
        assigned_ood += quota;

        let mut slots: Vec<usize> = (0..count).collect();
        rng.shuffle(&mut slots);
        let mut is_ood_slot = vec![false; count];
        for &slot in slots.iter().take(quota) {
            is_ood_slot[slot] = true;
        }

        let mut objects = Vec::with_capacity(count);
        for (i, &difficulty) in difficulties.iter().enumerate() {
            let weights = if is_ood_slot[i] {
                &split.ood_weights
            } else {
                &split.known_weights
            };
            let label = rng.choose_weighted(weights);
            objects.push(GroundTruthObject {
                true_label: label,
                difficulty,
            });
        }
        scenes.push(Scene {
            scene_category: category,
            objects,
        });
    }

    let achieved = assigned_ood as f64 / total_objects as f64;
    if (achieved - ood_fraction).abs() > 1.0 / total_objects as f64 + 1e-12 {
        return Err(Error::Config(format!(
            "ood fraction {ood_fraction} infeasible under the priors (achieved {achieved:.4})"
        )));
    }
    Ok(scenes)
}

/// Generates scenes until at least `min_objects` objects exist (same
/// per-scene substream discipline as [`generate_dataset`]).
pub fn generate_scenes_min_objects(
    prior: &ScenePrior,
    taxonomy: &LabelTaxonomy,
    min_objects: usize,
    ood_fraction: f64,
    stream: &RngStream,
) -> Result<Vec<Scene>> {
    let mean: f64 = prior
        .categories
        .iter()
        .map(|c| c.mean_objects)
        .sum::<f64>()
        / prior.categories.len() as f64;
    let mut n = (min_objects as f64 / mean).ceil() as usize + 1;
    loop {
        let scenes = generate_dataset(prior, taxonomy, n, ood_fraction, stream)?;
        let objects: usize = scenes.iter().map(|s| s.objects.len()).sum();
        if objects >= min_objects {
            return Ok(scenes);
        }
        n += (min_objects - objects) / mean.max(1.0) as usize + 1;
    }
}

/// On-disk dataset schema.
#[derive(Debug, Serialize, Deserialize)]
pub struct SceneFile {
    pub scenes: Vec<Scene>,
}

pub fn save_scenes(scenes: &[Scene], path: &std::path::Path) -> Result<()> {
    let file = SceneFile {
        scenes: scenes.to_vec(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn load_scenes(path: &std::path::Path, taxonomy: &LabelTaxonomy) -> Result<Vec<Scene>> {
    let body = std::fs::read_to_string(path).map_err(|_| Error::MissingFile(path.into()))?;
    let file: SceneFile = serde_json::from_str(&body)?;
    for scene in &file.scenes {
        scene.validate(taxonomy)?;
    }
    Ok(file.scenes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::build_default_taxonomy;

    #[test]
    fn fraction_zero_has_no_ood() {
        let t = build_default_taxonomy();
        let prior = default_scene_prior(&t);
        let scenes =
            generate_dataset(&prior, &t, 300, 0.0, &RngStream::from_seed(1)).unwrap();
        for scene in &scenes {
            for obj in &scene.objects {
                assert!(!t.is_ood(obj.true_label));
            }
        }
    }

    #[test]
    fn fraction_one_is_all_ood() {
        let t = build_default_taxonomy();
        let prior = default_scene_prior(&t);
        let scenes =
            generate_dataset(&prior, &t, 300, 1.0, &RngStream::from_seed(2)).unwrap();
        for scene in &scenes {
            for obj in &scene.objects {
                assert!(t.is_ood(obj.true_label));
            }
        }
    }

    #[test]
    fn fraction_share_is_steered() {
        let t = build_default_taxonomy();
        let prior = default_scene_prior(&t);
        let scenes =
            generate_dataset(&prior, &t, 1000, 0.082, &RngStream::from_seed(3)).unwrap();
        let total: usize = scenes.iter().map(|s| s.objects.len()).sum();
        let ood: usize = scenes
            .iter()
            .flat_map(|s| &s.objects)
            .filter(|o| t.is_ood(o.true_label))
            .count();
        let share = ood as f64 / total as f64;
        assert!(
            (share - 0.082).abs() < 0.005,
            "share {share} at target 0.082"
        );
    }

    #[test]
    fn generation_is_deterministic_and_prefix_stable() {
        let t = build_default_taxonomy();
        let prior = default_scene_prior(&t);
        let stream = RngStream::from_seed(4);
        let a = generate_dataset(&prior, &t, 100, 0.1, &stream).unwrap();
        let b = generate_dataset(&prior, &t, 100, 0.1, &stream).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        // The first 50 scenes of a longer run match the shorter run.
        let c = generate_dataset(&prior, &t, 50, 0.1, &stream).unwrap();
        assert_eq!(
            serde_json::to_string(&a[..50]).unwrap(),
            serde_json::to_string(&c[..]).unwrap()
        );
    }

    #[test]
    fn infeasible_fraction_errors() {
        let t = build_default_taxonomy();
        let mut prior = default_scene_prior(&t);
        // Remove all OOD mass: fraction 1 becomes infeasible.
        for cat in &mut prior.categories {
            for (j, w) in cat.label_weights.iter_mut().enumerate() {
                if t.is_ood(j) {
                    *w = 0.0;
                }
            }
        }
        assert!(generate_dataset(&prior, &t, 50, 1.0, &RngStream::from_seed(5)).is_err());
        // Fraction 0 still works.
        assert!(generate_dataset(&prior, &t, 50, 0.0, &RngStream::from_seed(5)).is_ok());
    }

    #[test]
    fn min_objects_generator_reaches_target() {
        let t = build_default_taxonomy();
        let prior = default_scene_prior(&t);
        let scenes =
            generate_scenes_min_objects(&prior, &t, 500, 0.1, &RngStream::from_seed(6)).unwrap();
        let total: usize = scenes.iter().map(|s| s.objects.len()).sum();
        assert!(total >= 500);
    }

    #[test]
    fn scenes_validate_and_round_trip() {
        let t = build_default_taxonomy();
        let prior = default_scene_prior(&t);
        let scenes = generate_dataset(&prior, &t, 20, 0.1, &RngStream::from_seed(7)).unwrap();
        for scene in &scenes {
            scene.validate(&t).unwrap();
        }
        let dir = std::env::temp_dir().join("semcom_dataset_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("scenes.json");
        save_scenes(&scenes, &path).unwrap();
        let back = load_scenes(&path, &t).unwrap();
        assert_eq!(
            serde_json::to_string(&scenes).unwrap(),
            serde_json::to_string(&back).unwrap()
        );
    }
}
