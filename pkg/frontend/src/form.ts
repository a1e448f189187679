import type { JobForm } from "./types.js";

export function defaultForm(): JobForm {
  return {
    mode: "graded",
    zones: 9,
    k: 3,
    t: 1,
    gamma: 10,
    alpha: 10,
    aerial: true,
    conventions: [],
    seed: 0,
    grid_size: 16,
    delta_min: 10,
    palette_size: 64,
    population: 40,
    iterations: 500,
  };
}

export interface FieldErrors {
  [field: string]: string;
}

export function validateForm(form: JobForm): FieldErrors {
  const errors: FieldErrors = {};
  if (!Number.isInteger(form.zones) || form.zones < 2) {
    errors.zones = "zones must be an integer >= 2";
  }
  if (![1, 2, 3].includes(form.k)) {
    errors.k = "k must be 1, 2 or 3";
  }
  if (form.t !== 1 && form.t !== -1) {
    errors.t = "t must be +1 or -1";
  }
  if (!(form.gamma > 0)) {
    errors.gamma = "gamma must be positive";
  }
  if (!(form.alpha > 0)) {
    errors.alpha = "alpha must be positive";
  }
  if (form.mode !== "graded" && form.mode !== "continuous") {
    errors.mode = "mode must be graded or continuous";
  }
  for (const conv of form.conventions) {
    if (!Number.isInteger(conv.zone) || conv.zone < 1 || conv.zone > form.zones) {
      errors.conventions = `convention zone ${conv.zone} outside [1, ${form.zones}]`;
      break;
    }
  }
  return errors;
}

export function isValid(form: JobForm): boolean {
  return Object.keys(validateForm(form)).length === 0;
}

/** The exact params JSON string POSTed to /api/jobs. */
export function serializeForm(form: JobForm): string {
  return JSON.stringify(form);
}

export function deserializeForm(payload: string): JobForm {
  const raw = JSON.parse(payload);
  return { ...defaultForm(), ...raw };
}
