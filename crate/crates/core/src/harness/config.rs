//! JSON experiment configs and the named classifier variants.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::classifiers::{ClassifierParams, Criterion, Family, KnnParams, TreeParams};
use crate::data::{
    generate_synthetic, load_table, select_group, GroupId, Schema, SyntheticSpec, Table,
};
use crate::error::{Error, Result};
use crate::evaluation::{
    default_grid, F1Average, PipelineSpec, ResampleScope, DEFAULT_TREE_DEPTHS, DEFAULT_TREE_LEAVES,
};
use crate::feature_selection::{SelectorChoice, SelectorParams};
use crate::resampling::ResampleMethod;
use crate::seed;

/// The nine rows of the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    LogisticRegression,
    GaussianNb,
    ComplementNb,
    Knn,
    Dt,
    KnnImproved,
    DtImproved,
    KnnImpRandover,
    KnnImpSmote,
}

impl Variant {
    pub const ALL: [Variant; 9] = [
        Variant::LogisticRegression,
        Variant::GaussianNb,
        Variant::ComplementNb,
        Variant::Knn,
        Variant::Dt,
        Variant::KnnImproved,
        Variant::DtImproved,
        Variant::KnnImpRandover,
        Variant::KnnImpSmote,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::LogisticRegression => "LogisticRegression",
            Variant::GaussianNb => "GaussianNB",
            Variant::ComplementNb => "ComplementNB",
            Variant::Knn => "KNN",
            Variant::Dt => "DT",
            Variant::KnnImproved => "KNN improved",
            Variant::DtImproved => "DT improved",
            Variant::KnnImpRandover => "KNN imp.randover",
            Variant::KnnImpSmote => "KNN imp.SMOTE",
        }
    }

    pub fn family(self) -> Family {
        match self {
            Variant::LogisticRegression => Family::Logistic,
            Variant::GaussianNb => Family::GaussianNb,
            Variant::ComplementNb => Family::ComplementNb,
            Variant::Knn
            | Variant::KnnImproved
            | Variant::KnnImpRandover
            | Variant::KnnImpSmote => Family::Knn,
            Variant::Dt | Variant::DtImproved => Family::DecisionTree,
        }
    }

    /// Whether the classifier's hyperparameters come from grid search.
    pub fn searched(self) -> bool {
        matches!(
            self,
            Variant::KnnImproved
                | Variant::DtImproved
                | Variant::KnnImpRandover
                | Variant::KnnImpSmote
        )
    }

    pub fn resampler(self) -> Option<ResampleMethod> {
        match self {
            Variant::KnnImpRandover => Some(ResampleMethod::RandomOver),
            Variant::KnnImpSmote => Some(ResampleMethod::Smote),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "LR" {
            return Ok(Variant::LogisticRegression);
        }
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
                Error::Config(format!(
                    "unknown classifier '{s}'; valid classifiers are {}",
                    names.join(", ")
                ))
            })
    }
}

impl Serialize for Variant {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Variant {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// CSV file plus JSON schema sidecar. The schema defaults to
    /// `<path>.schema.json`. Relative paths resolve against the config file.
    Csv {
        path: PathBuf,
        #[serde(default)]
        schema: Option<PathBuf>,
    },
    Synthetic(SyntheticSpec),
}

/// Overrides for the search lattices. Missing axes keep their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub knn_k: Option<Vec<usize>>,
    pub tree_criterion: Option<Vec<Criterion>>,
    /// `null` entries mean unbounded depth.
    pub tree_max_depth: Option<Vec<Option<usize>>>,
    pub tree_min_samples_leaf: Option<Vec<usize>>,
}

impl GridConfig {
    pub fn lattice(&self, family: Family) -> Vec<ClassifierParams> {
        match family {
            Family::Knn => match &self.knn_k {
                Some(ks) => ks
                    .iter()
                    .map(|&k| ClassifierParams::Knn(KnnParams { k }))
                    .collect(),
                None => default_grid(Family::Knn),
            },
            Family::DecisionTree => {
                let criteria = self
                    .tree_criterion
                    .clone()
                    .unwrap_or_else(|| vec![Criterion::Entropy, Criterion::Gini]);
                let depths = self
                    .tree_max_depth
                    .clone()
                    .unwrap_or_else(|| DEFAULT_TREE_DEPTHS.to_vec());
                let leaves = self
                    .tree_min_samples_leaf
                    .clone()
                    .unwrap_or_else(|| DEFAULT_TREE_LEAVES.to_vec());
                let mut grid = Vec::new();
                for &criterion in &criteria {
                    for &max_depth in &depths {
                        for &min_samples_leaf in &leaves {
                            grid.push(ClassifierParams::DecisionTree(TreeParams {
                                criterion,
                                max_depth,
                                min_samples_leaf,
                                ..TreeParams::default()
                            }));
                        }
                    }
                }
                grid
            }
            other => default_grid(other),
        }
    }

    fn check(&self) -> Result<()> {
        let empty = |name: &str, len: Option<usize>| match len {
            Some(0) => Err(Error::Config(format!("grid axis '{name}' is empty"))),
            _ => Ok(()),
        };
        empty("knn_k", self.knn_k.as_ref().map(Vec::len))?;
        empty("tree_criterion", self.tree_criterion.as_ref().map(Vec::len))?;
        empty("tree_max_depth", self.tree_max_depth.as_ref().map(Vec::len))?;
        empty(
            "tree_min_samples_leaf",
            self.tree_min_samples_leaf.as_ref().map(Vec::len),
        )?;
        if self.knn_k.iter().flatten().any(|&k| k == 0) {
            return Err(Error::Config("knn_k values must be at least 1".into()));
        }
        if self.tree_min_samples_leaf.iter().flatten().any(|&l| l == 0) {
            return Err(Error::Config(
                "tree_min_samples_leaf values must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn default_folds() -> usize {
    8
}

fn default_true() -> bool {
    true
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_n_trees() -> usize {
    100
}

fn default_smote_k() -> usize {
    5
}

/// Declarative description of one experiment matrix run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataSource,
    /// Defaults to all eight groups.
    #[serde(default)]
    pub groups: Option<Vec<String>>,
    /// Defaults to all nine variants.
    #[serde(default)]
    pub classifiers: Option<Vec<String>>,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub selector: SelectorChoice,
    /// Features kept by k-best; unset keeps those scoring above the median.
    #[serde(default)]
    pub kbest_k: Option<usize>,
    #[serde(default = "default_n_trees")]
    pub n_trees: usize,
    #[serde(default)]
    pub grids: GridConfig,
    #[serde(default = "default_smote_k")]
    pub smote_k: usize,
    #[serde(default = "default_true")]
    pub scale: bool,
    #[serde(default = "default_true")]
    pub stratified: bool,
    /// Run grid search on its own plan with this many folds instead of the
    /// reporting folds.
    #[serde(default)]
    pub search_folds: Option<usize>,
    #[serde(default)]
    pub f1_average: F1Average,
    #[serde(default)]
    pub resample_scope: ResampleScope,
    /// Concurrent cells; 0 uses every core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parse a config file. Relative data and output paths are rebased onto
    /// the file's directory.
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.rebase(base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let DataSource::Csv { path, schema } = &mut self.data {
            join(path);
            if let Some(s) = schema {
                join(s);
            }
        }
        join(&mut self.out_dir);
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn selector_params(&self) -> SelectorParams {
        SelectorParams {
            choice: self.selector,
            k: self.kbest_k,
            n_trees: self.n_trees,
            ..SelectorParams::default()
        }
    }

    /// Pipeline for a variant. Searched variants start from the family
    /// default and have their classifier replaced by each lattice point.
    pub fn pipeline(&self, variant: Variant) -> PipelineSpec {
        let mut p = PipelineSpec::new(ClassifierParams::default_for(variant.family()));
        p.scale = self.scale;
        p.selector = self.selector_params();
        p.resampler = variant.resampler();
        p.smote_k = self.smote_k;
        p.resample_scope = self.resample_scope;
        p.f1_average = self.f1_average;
        p
    }

    pub fn variants(&self) -> Result<Vec<Variant>> {
        match &self.classifiers {
            None => Ok(Variant::ALL.to_vec()),
            Some(names) => unique(
                names.iter().map(|n| n.parse()).collect::<Result<_>>()?,
                "classifier",
            ),
        }
    }

    pub fn group_ids(&self) -> Result<Vec<GroupId>> {
        match &self.groups {
            None => Ok(GroupId::ALL.to_vec()),
            Some(names) => unique(
                names
                    .iter()
                    .map(|n| n.parse().map_err(|e: Error| Error::Config(e.to_string())))
                    .collect::<Result<_>>()?,
                "group",
            ),
        }
    }

    pub fn load_data(&self) -> Result<Table> {
        match &self.data {
            DataSource::Csv { path, schema } => {
                let schema_path = schema.clone().unwrap_or_else(|| {
                    let mut s = path.clone().into_os_string();
                    s.push(".schema.json");
                    PathBuf::from(s)
                });
                let schema = Schema::from_json_file(&schema_path)?;
                load_table(path, &schema.columns)
            }
            DataSource::Synthetic(spec) => generate_synthetic(spec),
        }
    }

    /// Every check that can run without fitting a model. Errors are
    /// `Error::Config` for bad fields and the loader's own errors for data
    /// problems.
    pub fn validate(&self) -> Result<Experiment> {
        let variants = self.variants()?;
        let groups = self.group_ids()?;
        if variants.is_empty() || groups.is_empty() {
            return Err(Error::Config(
                "at least one classifier and one group are required".into(),
            ));
        }
        if self.folds < 2 {
            return Err(Error::Config(format!(
                "folds must be at least 2, got {}",
                self.folds
            )));
        }
        if self.search_folds.is_some_and(|k| k < 2) {
            return Err(Error::Config("search_folds must be at least 2".into()));
        }
        if self.kbest_k == Some(0) {
            return Err(Error::Config("kbest_k must be at least 1".into()));
        }
        if self.smote_k == 0 || self.n_trees == 0 {
            return Err(Error::Config(
                "smote_k and n_trees must be at least 1".into(),
            ));
        }
        self.grids.check()?;
        let table = self.load_data()?;
        let n = table.n_rows();
        for (name, k) in [
            ("folds", Some(self.folds)),
            ("search_folds", self.search_folds),
        ] {
            if let Some(k) = k.filter(|&k| k > n) {
                return Err(Error::Config(format!(
                    "{name} = {k} exceeds the {n} data rows"
                )));
            }
        }
        for &g in &groups {
            select_group(&table, &g.spec())?;
        }
        // derivation must be total for every addressed cell
        for v in &variants {
            for g in &groups {
                cell_seed(self.seed, *v, *g);
            }
        }
        Ok(Experiment {
            config: self.clone(),
            table,
            variants,
            groups,
        })
    }
}

fn unique<T: PartialEq + fmt::Display>(items: Vec<T>, what: &str) -> Result<Vec<T>> {
    for (i, a) in items.iter().enumerate() {
        if items[..i].contains(a) {
            return Err(Error::Config(format!("{what} '{a}' listed twice")));
        }
    }
    Ok(items)
}

/// Seed of one matrix cell; depends only on the master seed and the cell's
/// coordinates.
pub fn cell_seed(master: u64, variant: Variant, group: GroupId) -> u64 {
    seed::derive(
        master,
        &["cell".into(), variant.name().into(), group.as_str().into()],
    )
}

/// A validated config with its data loaded.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub table: Table,
    pub variants: Vec<Variant>,
    pub groups: Vec<GroupId>,
}
