/* tslint:disable */
/* eslint-disable */

/**
 * One simulated signal/reference pair and its fits.
 */
export class FringeDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly gamma: number;
    readonly gamma_theory: number;
    readonly reference: Float64Array;
    readonly reference_model: Float64Array;
    readonly sigma_gamma: number;
    readonly sigma_visibility: number;
    readonly signal: Float64Array;
    /**
     * Fitted signal fringe sampled on `model_voltages`.
     */
    readonly signal_model: Float64Array;
    readonly visibility: number;
    readonly voltages: Float64Array;
}

/**
 * Bloch trajectory of |R> through the two half-wave plates, flattened as
 * `[s1, s2, s3, ...]`.
 */
export function bloch_path(theta1_deg: number, theta2_deg: number, steps: number): Float64Array;

/**
 * Dense voltage grid the model curves are sampled on.
 */
export function model_voltages(): Float64Array;

/**
 * Solid angle (radians) enclosed by [`bloch_path`].
 */
export function path_solid_angle(theta1_deg: number, theta2_deg: number, steps: number): number;

/**
 * Simulates the PZT scan for a decoherer-prepared state of purity `r` at
 * `theta1_deg` (theta2 = 0), with `counts_per_point` mean counts, and fits
 * it at the nominal fringe frequency.
 */
export function simulate_fringe(r: number, theta1_deg: number, counts_per_point: number, seed: bigint): FringeDemo;

/**
 * `[theta1_deg, gamma, v, ...]` for `samples` settings across -45..45 deg.
 * Undefined phases are NaN.
 */
export function theory_curve(r: number, samples: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_fringedemo_free: (a: number, b: number) => void;
    readonly bloch_path: (a: number, b: number, c: number) => [number, number, number, number];
    readonly fringedemo_gamma: (a: number) => number;
    readonly fringedemo_gamma_theory: (a: number) => number;
    readonly fringedemo_reference: (a: number) => [number, number];
    readonly fringedemo_reference_model: (a: number) => [number, number];
    readonly fringedemo_sigma_gamma: (a: number) => number;
    readonly fringedemo_sigma_visibility: (a: number) => number;
    readonly fringedemo_signal: (a: number) => [number, number];
    readonly fringedemo_signal_model: (a: number) => [number, number];
    readonly fringedemo_visibility: (a: number) => number;
    readonly fringedemo_voltages: (a: number) => [number, number];
    readonly model_voltages: () => [number, number];
    readonly path_solid_angle: (a: number, b: number, c: number) => [number, number, number];
    readonly simulate_fringe: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly theory_curve: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
