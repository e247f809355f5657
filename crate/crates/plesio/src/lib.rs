//! Plesiohedra from triply periodic scalar fields.
//!
//! Given a field in a small trigonometric expression language, this crate
//! finds its extremal point set, builds the periodic Voronoi cells around
//! those points, measures and classifies the resulting space-filling
//! polyhedra, and screens them against the known space-fillers. The
//! flagship instance is the 12-face cell generated by the minima of the
//! Fischer-Koch S field.
//!
//! ```
//! use plesio::pipeline::{resolve_surface, run_surface, PipelineConfig, Which};
//!
//! let surface = resolve_surface("Fischer-Koch, FKS").unwrap();
//! let report = run_surface(&surface, &[Which::Min], &PipelineConfig::default());
//! let run = report.runs.min.as_ref().unwrap();
//! assert_eq!(run.cells, 12);
//! let cell = &run.classes[0].fingerprint;
//! assert_eq!((cell.faces, cell.vertices, cell.edges), (12, 12, 22));
//! ```
//!
//! The long-form guide lives in `book/`; its code blocks compile and run
//! as doctests of this crate (see the `book` module below), so the guide
//! cannot drift from the API.

pub mod anatomy;
pub mod extrema;
pub mod formula;
pub mod lattice;
pub mod octahedral;
pub mod pipeline;
pub mod tiling;
pub mod voronoi;

pub use formula::{Expr, PeriodicField};

// Run every code block of the book as a doctest.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }
    chapter!(introduction, "../../../book/src/introduction.md");
    chapter!(expressions, "../../../book/src/expressions.md");
    chapter!(catalog, "../../../book/src/catalog.md");
    chapter!(extrema, "../../../book/src/extrema.md");
    chapter!(lattice, "../../../book/src/lattice.md");
    chapter!(voronoi, "../../../book/src/voronoi.md");
    chapter!(anatomy, "../../../book/src/anatomy.md");
    chapter!(tiling, "../../../book/src/tiling.md");
    chapter!(pipeline, "../../../book/src/pipeline.md");
}
