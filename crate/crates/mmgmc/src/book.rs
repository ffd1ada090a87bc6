//! Runs the guide's code snippets as doc-tests so `cargo test` keeps the
//! book in `book/` and the README compiling against the current API.

#[doc = include_str!("../../../README.md")]
#[cfg(doctest)]
pub struct ReadmeSnippets;

#[doc = include_str!("../../../book/src/introduction.md")]
#[cfg(doctest)]
pub struct BookIntroduction;

#[doc = include_str!("../../../book/src/moreau-envelope.md")]
#[cfg(doctest)]
pub struct BookMoreauEnvelope;

#[doc = include_str!("../../../book/src/objective.md")]
#[cfg(doctest)]
pub struct BookObjective;

#[doc = include_str!("../../../book/src/surrogates.md")]
#[cfg(doctest)]
pub struct BookSurrogates;

#[doc = include_str!("../../../book/src/inner-solver.md")]
#[cfg(doctest)]
pub struct BookInnerSolver;

#[doc = include_str!("../../../book/src/mm-iteration.md")]
#[cfg(doctest)]
pub struct BookMmIteration;

#[doc = include_str!("../../../book/src/oracles.md")]
#[cfg(doctest)]
pub struct BookOracles;
