/** Shapes of the artifacts the training harness emits. */

/** One aggregated line of ptq_summary.csv / training_summary.csv. */
export interface SummaryRow {
  paradigm: string;
  architecture: string;
  dataset: string;
  /** null encodes the "fp32" reference row (no grid). */
  bits: number | null;
  mode: string;
  temperature: number | null;
  mean_test_acc: number;
  var_test_acc: number;
  mean_train_acc: number;
  var_train_acc: number;
  n_trials: number;
}

export interface EpochTrace {
  epoch: number;
  mean_loss: number;
  train_accuracy: number;
  deadlock_fraction: number;
}

/** One persisted trial (records/*.json). Only the fields the plots need. */
export interface RunRecord {
  config: {
    architecture: string;
    dataset: string;
    mode: string;
    seed: number;
    bits: number | null;
    temperature: number | null;
  };
  traces: EpochTrace[];
}

export const FIGURE_KINDS = ["ELBOW", "ACC_VS_BITS", "LOSS_TRACE"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];
