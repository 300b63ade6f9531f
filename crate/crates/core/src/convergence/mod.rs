//! Deterministic convergence classifiers computed from a known curve.

mod ccd;
mod crm;

pub use ccd::{ccd_classify, CcdClass, CcdVerdict};
pub use crm::{crm_classify, crm_nominations, funneling_holds, misspec_distance, CrmClass, CrmVerdict, NominationTable};
