//! Walrasian equilibrium prices for multi-unit markets whose buyers have
//! strong gross substitutes valuations.
//!
//! Auctions move prices by ±1 on minimal maximal over- or underdemanded
//! item sets. Those sets come from an optimal solution of a polymatroid sum
//! problem over the buyers' demand sets, found by push-relabel, and a
//! breadth-first search in the resulting exchange graph.
//!
//! ```
//! use walras::auctions::{ascending, AuctionOptions};
//! use walras::model::{Instance, PriceVector};
//! use walras::valuations::Valuation;
//!
//! let inst = Instance::new(
//!     vec![1, 1, 1],
//!     vec![
//!         Valuation::unit_demand(vec![2, 3, 0]),
//!         Valuation::unit_demand(vec![0, 1, 1]),
//!         Valuation::unit_demand(vec![0, 1, 1]),
//!     ],
//! )
//! .unwrap();
//! let (prices, _) = ascending(&inst, PriceVector::zeros(3), AuctionOptions::default()).unwrap();
//! assert_eq!(prices.as_slice(), &[0, 1, 1]);
//! ```

pub mod auctions;
pub mod bruteforce;
pub mod cli;
pub mod demand_sets;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod generate;
pub mod model;
pub mod polymatroid_sum;
pub mod valuations;

pub use error::{Error, Result};
