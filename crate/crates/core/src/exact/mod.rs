pub mod laurent;
pub mod ncfun;
pub mod ncpoly;
pub mod rational;

pub use laurent::LaurentPoly;
pub use ncfun::NCFun;
pub use ncpoly::NCPoly;
pub use rational::Rational;
