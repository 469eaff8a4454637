/* tslint:disable */
/* eslint-disable */

/**
 * Flatness report for `y_{x_i x_j} = f_ij`.
 */
export function check_system(f11: string, f12: string, f22: string): string;

/**
 * Dual equation of the family `h(x1, x2, X1, X2, Y) = 0`. Empty inverse
 * strings mean no inverse was supplied.
 */
export function dual_family(h: string, inv_x1: string, inv_x2: string): string;

/**
 * Subgroup and quotient dimensions plus sampled probes for `sl4`, `scale`
 * or `compact`.
 */
export function fibration(group: string, seed: number, samples: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly check_system: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly dual_family: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly fibration: (a: number, b: number, c: number, d: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
