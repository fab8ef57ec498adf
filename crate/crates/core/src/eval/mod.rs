//! Cross-validation, binary metrics and the representation × classifier ×
//! selection grid.

mod folds;
mod grid;
mod metrics;

pub use folds::{group_kfold_split, kfold_split, Folds};
pub use grid::{
    check_fold_contamination, run_grid, CellFit, FoldFit, FoldTask, GridConfig, GridPlan, GridReport,
    GridRow, Selection,
};
pub use metrics::{compute_metrics, from_confusion, Confusion, MetricsReport};
