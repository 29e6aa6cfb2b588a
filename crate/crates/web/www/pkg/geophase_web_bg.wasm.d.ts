/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_fringedemo_free: (a: number, b: number) => void;
export const bloch_path: (a: number, b: number, c: number) => [number, number, number, number];
export const fringedemo_gamma: (a: number) => number;
export const fringedemo_gamma_theory: (a: number) => number;
export const fringedemo_reference: (a: number) => [number, number];
export const fringedemo_reference_model: (a: number) => [number, number];
export const fringedemo_sigma_gamma: (a: number) => number;
export const fringedemo_sigma_visibility: (a: number) => number;
export const fringedemo_signal: (a: number) => [number, number];
export const fringedemo_signal_model: (a: number) => [number, number];
export const fringedemo_visibility: (a: number) => number;
export const fringedemo_voltages: (a: number) => [number, number];
export const model_voltages: () => [number, number];
export const path_solid_angle: (a: number, b: number, c: number) => [number, number, number];
export const simulate_fringe: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const theory_curve: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
