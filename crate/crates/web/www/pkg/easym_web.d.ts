/* tslint:disable */
/* eslint-disable */

/**
 * Abscissae, ordinates and optional error bars.
 */
export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Standard errors, empty for deterministic curves.
     */
    err(): Float64Array;
    x(): Float64Array;
    y(): Float64Array;
}

export function chargeSectors(num_sites: number, gamma: number, pattern_name: string, tilt_pi: number, t: number): Curve;

export function circuitAsymmetry(num_sites: number, p_haar: number, pattern_name: string, tilt_pi: number, region_len: number, depth_units: number, realizations: number, seed: number): Curve;

export function quenchAsymmetry(num_sites: number, gamma: number, pattern_name: string, tilt_pi: number, region_len: number, t_max: number, dt: number): Curve;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly chargeSectors: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly circuitAsymmetry: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly curve_err: (a: number) => [number, number];
    readonly curve_x: (a: number) => [number, number];
    readonly curve_y: (a: number) => [number, number];
    readonly quenchAsymmetry: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
