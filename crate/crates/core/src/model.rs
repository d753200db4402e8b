//! A trainable model is either one base learner or the voting ensemble.
//! Fitted models persist as self-describing JSON documents.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ensemble::{fit_voting_ensemble, EnsembleSpec, VotingEnsemble};
use crate::error::{Error, Result};
use crate::learners::{self, Classifier, LearnerId, LearnerSpec, TrainedModel};
use crate::matrix::LabeledMatrix;

pub const FORMAT: &str = "pdm-model";
pub const FORMAT_VERSION: u32 = 1;
pub const ENSEMBLE_NAME: &str = "ensemble";

/// Name of a trainable model: a learner id or `ensemble`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelName {
    Learner(LearnerId),
    Ensemble,
}

impl ModelName {
    /// The twelve learners followed by the ensemble.
    pub fn all() -> Vec<ModelName> {
        LearnerId::ALL
            .into_iter()
            .map(ModelName::Learner)
            .chain([ModelName::Ensemble])
            .collect()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::Learner(id) => id.as_str(),
            ModelName::Ensemble => ENSEMBLE_NAME,
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ModelName::Learner(id) => id.display_name(),
            ModelName::Ensemble => "Proposed Ensemble Model",
        }
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == ENSEMBLE_NAME {
            Ok(ModelName::Ensemble)
        } else {
            s.parse().map(ModelName::Learner)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "spec", rename_all = "snake_case")]
pub enum ModelSpec {
    Learner(LearnerSpec),
    Ensemble(EnsembleSpec),
}

impl ModelSpec {
    pub fn default_for(name: ModelName) -> ModelSpec {
        match name {
            ModelName::Learner(id) => ModelSpec::Learner(LearnerSpec::default_for(id)),
            ModelName::Ensemble => ModelSpec::Ensemble(EnsembleSpec::default()),
        }
    }

    pub fn name(&self) -> ModelName {
        match self {
            ModelSpec::Learner(s) => ModelName::Learner(s.id()),
            ModelSpec::Ensemble(_) => ModelName::Ensemble,
        }
    }

    pub fn fit(&self, data: &LabeledMatrix, seed: u64) -> Result<Model> {
        match self {
            ModelSpec::Learner(s) => learners::train(s, data, seed).map(Model::Learner),
            ModelSpec::Ensemble(s) => fit_voting_ensemble(data, s, seed).map(Model::Ensemble),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "model", rename_all = "snake_case")]
pub enum Model {
    Learner(TrainedModel),
    Ensemble(VotingEnsemble),
}

impl Model {
    pub fn name(&self) -> ModelName {
        match self {
            Model::Learner(m) => ModelName::Learner(m.id()),
            Model::Ensemble(_) => ModelName::Ensemble,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Model::Learner(m) => m.seed,
            Model::Ensemble(e) => e.seed,
        }
    }

    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        let doc = ModelDocumentRef {
            format: FORMAT,
            version: FORMAT_VERSION,
            model: self,
        };
        serde_json::to_writer(writer, &doc)?;
        Ok(())
    }

    pub fn load<R: Read>(reader: R) -> Result<Model> {
        let doc: ModelDocument = serde_json::from_reader(reader)?;
        if doc.format != FORMAT {
            return Err(Error::ModelFormat(format!("unexpected format tag {:?}", doc.format)));
        }
        if doc.version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!("unsupported version {}", doc.version)));
        }
        Ok(doc.model)
    }
}

impl Classifier for Model {
    fn n_features(&self) -> usize {
        match self {
            Model::Learner(m) => m.n_features(),
            Model::Ensemble(e) => e.n_features(),
        }
    }

    fn score_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Model::Learner(m) => m.score_unchecked(x),
            Model::Ensemble(e) => e.score_unchecked(x),
        }
    }
}

#[derive(Serialize)]
struct ModelDocumentRef<'a> {
    format: &'a str,
    version: u32,
    model: &'a Model,
}

#[derive(Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    model: Model,
}
