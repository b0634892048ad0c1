use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::schema::Category;
use super::table::Table;
use crate::error::{Error, Result};

/// The eight variable groupings of the experiment matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupId {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl GroupId {
    pub const ALL: [GroupId; 8] = [
        GroupId::I,
        GroupId::II,
        GroupId::III,
        GroupId::IV,
        GroupId::V,
        GroupId::VI,
        GroupId::VII,
        GroupId::VIII,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GroupId::I => "I",
            GroupId::II => "II",
            GroupId::III => "III",
            GroupId::IV => "IV",
            GroupId::V => "V",
            GroupId::VI => "VI",
            GroupId::VII => "VII",
            GroupId::VIII => "VIII",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            GroupId::I => "Socio-economic",
            GroupId::II => "Psychometric",
            GroupId::III => "Analytical",
            GroupId::IV => "EuroQol.5",
            GroupId::V => "Salamanca screening",
            GroupId::VI => "ACTA",
            GroupId::VII => "All variables",
            GroupId::VIII => "Socio-economic + Psychometric",
        }
    }

    pub fn spec(self) -> GroupSpec {
        use Category::*;
        let psychometric = [
            PsychometricEq5,
            PsychometricSalamanca,
            PsychometricActa,
            PsychometricOther,
        ];
        let cats: Vec<Category> = match self {
            GroupId::I => vec![Socioeconomic],
            GroupId::II => psychometric.to_vec(),
            GroupId::III => vec![Analytical],
            GroupId::IV => vec![PsychometricEq5],
            GroupId::V => vec![PsychometricSalamanca],
            GroupId::VI => vec![PsychometricActa],
            GroupId::VII => GroupId::I
                .categories()
                .into_iter()
                .chain(GroupId::II.categories())
                .chain(GroupId::III.categories())
                .collect(),
            GroupId::VIII => GroupId::I
                .categories()
                .into_iter()
                .chain(GroupId::II.categories())
                .collect(),
        };
        GroupSpec {
            id: self,
            included_categories: cats.into_iter().collect(),
        }
    }

    fn categories(self) -> BTreeSet<Category> {
        self.spec().included_categories
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GroupId::ALL
            .into_iter()
            .find(|g| g.as_str() == s.trim())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown group '{s}'; valid groups are I, II, III, IV, V, VI, VII, VIII"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub id: GroupId,
    pub included_categories: BTreeSet<Category>,
}

/// Keep only the columns whose category belongs to the group, plus the
/// outcome. Column order is preserved.
pub fn select_group(t: &Table, group: &GroupSpec) -> Result<Table> {
    let keep: Vec<usize> = t
        .schema()
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            c.category == Category::Outcome || group.included_categories.contains(&c.category)
        })
        .map(|(i, _)| i)
        .collect();
    if keep.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "group {} selects no feature columns",
            group.id
        )));
    }
    t.select_columns(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unions_hold_by_construction() {
        let cats = |g: GroupId| g.spec().included_categories;
        let all: BTreeSet<_> = cats(GroupId::I)
            .union(&cats(GroupId::II))
            .copied()
            .collect::<BTreeSet<_>>()
            .union(&cats(GroupId::III))
            .copied()
            .collect();
        assert_eq!(cats(GroupId::VII), all);
        assert_eq!(
            cats(GroupId::VIII),
            cats(GroupId::I)
                .union(&cats(GroupId::II))
                .copied()
                .collect()
        );
        for sub in [GroupId::IV, GroupId::V, GroupId::VI] {
            assert!(cats(sub).is_subset(&cats(GroupId::II)));
        }
        assert!(!cats(GroupId::VII).contains(&Category::Outcome));
    }

    #[test]
    fn parse_names() {
        assert_eq!("VIII".parse::<GroupId>().unwrap(), GroupId::VIII);
        let err = "IX".parse::<GroupId>().unwrap_err().to_string();
        assert!(err.contains("I, II, III, IV, V, VI, VII, VIII"));
    }
}
