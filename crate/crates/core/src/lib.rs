//! Lower envelopes of equivalent martingale measures in one-period
//! n-nomial markets, Choquet pricing with belief functions, and exact
//! Dutch-book / no-arbitrage certificates for lower price assessments.
//!
//! Everything is generic over [`Scalar`]: exact [`Rational`] arithmetic for
//! certificates and golden values, `f64`/`f32` for speed. The aliases below
//! fix the scalar for the common cases.
//!
//! ```
//! use martbel::{rat, ExactMarket};
//!
//! let m = ExactMarket::new(vec![rat(4, 1), rat(2, 1), rat(1, 4)], rat(1, 1), rat(20, 1), None).unwrap();
//! let q = m.lower_envelope().unwrap();
//! assert_eq!(q[0b110], rat(84, 105));
//! ```

pub mod approx;
pub mod arbitrage;
pub mod cli;
pub mod error;
pub mod golden;
pub mod io;
pub mod market;
pub mod sample;
pub mod scalar;
pub mod setfunc;
pub mod solver;

pub use approx::{
    default_q0, epsilon_contaminate, solve_inner, solve_strong, ApproxKind, ApproxProblem, ApproxResult, Distance,
    DistanceValue,
};
pub use arbitrage::{
    check_dutch_book, check_no_arbitrage, normalize_two_sided, verify_certificate, Certificate, Portfolio,
    PriceAssessment, Verdict,
};
pub use error::{Error, Result};
pub use market::{MarketModel, NecessityDecomposition, SplitIndex};
pub use scalar::{rat, Rational, Scalar};
pub use setfunc::{CapacityClass, LowerPayoff, RandomVariable, SetFunction, StateSpace, Subset};

pub type ExactSetFunction = SetFunction<Rational>;
pub type ExactRandomVariable = RandomVariable<Rational>;
pub type ExactMarket = MarketModel<Rational>;
pub type ExactAssessment = PriceAssessment<Rational>;
pub type ExactCertificate = Certificate<Rational>;

pub type FloatSetFunction = SetFunction<f64>;
pub type FloatRandomVariable = RandomVariable<f64>;
pub type FloatMarket = MarketModel<f64>;
pub type FloatAssessment = PriceAssessment<f64>;
