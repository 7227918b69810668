/* tslint:disable */
/* eslint-disable */

/**
 * Capacity curves over a threshold grid in dB.
 */
export class CapacityCurves {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly fixed_kappa: Float64Array;
    readonly fixed_tau: Float64Array;
    readonly fpr: Float64Array;
    readonly gamma_db: Float64Array;
}

/**
 * BS sites, user positions and hexagon outlines as flat `x, y` arrays.
 */
export class Layout {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly bs: Float64Array;
    /**
     * Six vertices per cell.
     */
    readonly cells: Float64Array;
    /**
     * Users cell by cell, `K` users each.
     */
    readonly users: Float64Array;
}

/**
 * Sorted FPR limiting SINRs (dB) and the DOP limit they are compared with.
 */
export class SinrComparison {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly dop_db: number;
    readonly fpr_db: Float64Array;
    readonly p_dop_better: number;
}

export function capacity_curves(seed: bigint, theta: number, kappa: number, beta: number, sigma2_over_pu: number, gamma_min_db: number, gamma_max_db: number, realizations: number): CapacityCurves;

export function compare_sinr(seed: bigint, alpha: number, kappa: number, sigma2_over_pu: number, realizations: number, inner_radius: number, flat_top: boolean): SinrComparison;

export function drop_users(seed: bigint, users_per_cell: number, inner_radius: number, flat_top: boolean): Layout;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_capacitycurves_free: (a: number, b: number) => void;
    readonly __wbg_layout_free: (a: number, b: number) => void;
    readonly __wbg_sinrcomparison_free: (a: number, b: number) => void;
    readonly capacity_curves: (a: bigint, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly capacitycurves_fixed_kappa: (a: number) => [number, number];
    readonly capacitycurves_fixed_tau: (a: number) => [number, number];
    readonly capacitycurves_fpr: (a: number) => [number, number];
    readonly capacitycurves_gamma_db: (a: number) => [number, number];
    readonly compare_sinr: (a: bigint, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
    readonly drop_users: (a: bigint, b: number, c: number, d: number) => [number, number, number];
    readonly layout_bs: (a: number) => [number, number];
    readonly layout_cells: (a: number) => [number, number];
    readonly layout_users: (a: number) => [number, number];
    readonly sinrcomparison_dop_db: (a: number) => number;
    readonly sinrcomparison_fpr_db: (a: number) => [number, number];
    readonly sinrcomparison_p_dop_better: (a: number) => number;
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
