use std::collections::HashMap;
use std::fmt;

use super::VarId;
use crate::problem::DerClass;

/// Semantic name of a decision variable. Units are positions within their
/// class in [`crate::problem::UnitCatalog`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKey {
    Install { class: DerClass, unit: usize },
    DfgOutput { unit: usize, day: usize, t: usize },
    DfgBlock { unit: usize, day: usize, t: usize, block: usize },
    DfgCommit { unit: usize, day: usize, t: usize },
    DfgStartup { unit: usize, day: usize, t: usize },
    EssCharge { unit: usize, day: usize, t: usize },
    EssDischarge { unit: usize, day: usize, t: usize },
    EssSoc { unit: usize, day: usize, t: usize },
    WindOutput { unit: usize, day: usize, t: usize },
    PvOutput { unit: usize, day: usize, t: usize },
    HvacHeat { house: usize, day: usize, t: usize },
    HvacCool { house: usize, day: usize, t: usize },
    /// Indoor temperature at the end of interval `t`.
    TempIndoor { house: usize, day: usize, t: usize },
    TempMass { house: usize, day: usize, t: usize },
    TempEnvelope { house: usize, day: usize, t: usize },
    /// Positive part of `T^d - T^in`.
    SlackBelow { house: usize, day: usize, t: usize },
    /// Positive part of `T^in - T^d`.
    SlackAbove { house: usize, day: usize, t: usize },
    Shed { house: usize, day: usize, t: usize },
    Pcc { day: usize, t: usize },
    Peak { month_group: u32 },
}

impl fmt::Display for VarKey {
    /// MPS-safe names: no whitespace, at most one bracketed index list.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use VarKey::*;
        match *self {
            Install { class, unit } => {
                let c = match class {
                    DerClass::Wind => "w",
                    DerClass::Pv => "v",
                    DerClass::Dfg => "n",
                    DerClass::Ess => "b",
                };
                write!(f, "delta[{c}{unit}]")
            }
            DfgOutput { unit, day, t } => write!(f, "p_dfg[n{unit},d{day},t{t}]"),
            DfgBlock { unit, day, t, block } => write!(f, "p_blk[n{unit},d{day},t{t},l{block}]"),
            DfgCommit { unit, day, t } => write!(f, "alpha[n{unit},d{day},t{t}]"),
            DfgStartup { unit, day, t } => write!(f, "beta[n{unit},d{day},t{t}]"),
            EssCharge { unit, day, t } => write!(f, "p_ch[b{unit},d{day},t{t}]"),
            EssDischarge { unit, day, t } => write!(f, "p_dis[b{unit},d{day},t{t}]"),
            EssSoc { unit, day, t } => write!(f, "soc[b{unit},d{day},t{t}]"),
            WindOutput { unit, day, t } => write!(f, "p_wt[w{unit},d{day},t{t}]"),
            PvOutput { unit, day, t } => write!(f, "p_pv[v{unit},d{day},t{t}]"),
            HvacHeat { house, day, t } => write!(f, "u_heat[h{house},d{day},t{t}]"),
            HvacCool { house, day, t } => write!(f, "u_cool[h{house},d{day},t{t}]"),
            TempIndoor { house, day, t } => write!(f, "t_in[h{house},d{day},t{t}]"),
            TempMass { house, day, t } => write!(f, "t_mass[h{house},d{day},t{t}]"),
            TempEnvelope { house, day, t } => write!(f, "t_env[h{house},d{day},t{t}]"),
            SlackBelow { house, day, t } => write!(f, "slack1[h{house},d{day},t{t}]"),
            SlackAbove { house, day, t } => write!(f, "slack2[h{house},d{day},t{t}]"),
            Shed { house, day, t } => write!(f, "shed[h{house},d{day},t{t}]"),
            Pcc { day, t } => write!(f, "p_pcc[d{day},t{t}]"),
            Peak { month_group } => write!(f, "p_peak[m{month_group}]"),
        }
    }
}

/// Bijection between [`VarKey`]s and model columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VariableIndex {
    keys: Vec<VarKey>,
    ids: HashMap<VarKey, VarId>,
}

impl VariableIndex {
    /// Registers `key` as the owner of `id`, which must be the next column.
    pub(crate) fn insert(&mut self, key: VarKey, id: VarId) {
        assert_eq!(id.0, self.keys.len(), "columns must be registered in order");
        let previous = self.ids.insert(key, id);
        assert!(previous.is_none(), "duplicate variable key {key}");
        self.keys.push(key);
    }

    pub fn id(&self, key: &VarKey) -> Option<VarId> {
        self.ids.get(key).copied()
    }

    pub fn key(&self, id: VarId) -> VarKey {
        self.keys[id.0]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[VarKey] {
        &self.keys
    }

    /// Value of `key` in a solution vector, or `None` if the model has no such column.
    pub fn value(&self, values: &[f64], key: VarKey) -> Option<f64> {
        self.id(&key).map(|id| values[id.0])
    }
}
