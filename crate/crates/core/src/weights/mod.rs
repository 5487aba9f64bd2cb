//! Weights on the disk and truncated estimators of their characteristics.

pub mod chain;
pub mod characteristic;
pub mod exponents;
pub mod regularize;
pub mod catalog;

pub use chain::{reg_chain_check, reverse_holder_gain, uup_chain, RegChainReport, ReverseHolderGain, UupReport};
pub use characteristic::{
    apr_and_doubling, apr_and_doubling_with, binfty_characteristic, bp_characteristic, bp_on,
    doubling_constant, localized_maximal_ratio, rh_characteristic, rh_on, weak_rh_check,
    AprDoubling, CharClass, CharacteristicReport, DepthValue, GrowthRule, Verdict, DOUBLING_BOUND,
};
pub use exponents::{Bookkeeping, Ext};
pub use regularize::{regularize, regularize_on};
pub use catalog::{Regularized, Weight};
