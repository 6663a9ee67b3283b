//! The explicit counterexample families and the objects built from them:
//! the `f/g` and `γ/δ` rules with their single-block distributions and
//! witnesses, the guess-track lift of a pair of rules to any template with
//! a unique word, and the cyclic wrap of an eventually periodic distribution.

mod lift;
mod families;
mod wrap;

pub use lift::{
    induced_base_distribution, lift_counterexample, lift_counterexample_with, template_lift, LiftWitness,
    LiftedRuleSet,
};
pub use families::{
    build_family_distribution, build_family_rules, myhill_preimage, family_witness, FamilyWitness, Placement,
};
pub use wrap::{wrap_distribution, Wrap};

use crate::RuleId;

/// Which pair of rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// `f_n, g_n` over `Z_2`: pre-injective but not surjective.
    Moore,
    /// `γ_n, δ_n` over `Z_2 x Z_2`: surjective but not pre-injective.
    Myhill,
}

impl Family {
    /// Index of the rule forming the distinguished block (`f` or `γ`).
    pub const BLOCK: RuleId = 0;
    /// Index of the surrounding rule (`g` or `δ`).
    pub const FILL: RuleId = 1;

    pub fn name(self) -> &'static str {
        match self {
            Family::Moore => "moore",
            Family::Myhill => "myhill",
        }
    }

    pub fn rule_names(self) -> [&'static str; 2] {
        match self {
            Family::Moore => ["f", "g"],
            Family::Myhill => ["gamma", "delta"],
        }
    }
}
