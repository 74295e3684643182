//! Lower bounds on the mean absolute deviation of an estimator in terms of
//! the Hellinger distance between two laws, and the bias–MAD trade-off they
//! imply for pointwise estimation in the Gaussian white noise model.
//!
//! ```
//! use madbound::{bounds, measure::{DiscreteMeasure, FiniteRV}};
//!
//! let p = DiscreteMeasure::from_probs(vec![0.5, 0.5]).unwrap();
//! let q = DiscreteMeasure::from_probs(vec![0.9, 0.1]).unwrap();
//! let x = FiniteRV::new(vec![0.0, 1.0]);
//! let report = bounds::check_lemma2(&p, &q, &x, 0.5, 0.1).unwrap();
//! assert!(report.holds);
//! ```

pub mod bounds;
pub mod error;
pub mod frontier;
pub mod gwn_sim;
pub mod holder;
pub mod instance;
pub mod measure;
pub mod numeric;
pub mod witness;

pub use error::{Error, Result};
pub use measure::{DiscreteMeasure, FiniteRV};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/inequalities.md")]
    mod inequalities {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/holder.md")]
    mod holder {}
    #[doc = include_str!("../../../book/src/white_noise.md")]
    mod white_noise {}
    #[doc = include_str!("../../../book/src/frontier.md")]
    mod frontier {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
