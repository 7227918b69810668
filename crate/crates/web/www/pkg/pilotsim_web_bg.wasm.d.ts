/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_capacitycurves_free: (a: number, b: number) => void;
export const __wbg_layout_free: (a: number, b: number) => void;
export const __wbg_sinrcomparison_free: (a: number, b: number) => void;
export const capacity_curves: (a: bigint, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const capacitycurves_fixed_kappa: (a: number) => [number, number];
export const capacitycurves_fixed_tau: (a: number) => [number, number];
export const capacitycurves_fpr: (a: number) => [number, number];
export const capacitycurves_gamma_db: (a: number) => [number, number];
export const compare_sinr: (a: bigint, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number];
export const drop_users: (a: bigint, b: number, c: number, d: number) => [number, number, number];
export const layout_bs: (a: number) => [number, number];
export const layout_cells: (a: number) => [number, number];
export const layout_users: (a: number) => [number, number];
export const sinrcomparison_dop_db: (a: number) => number;
export const sinrcomparison_fpr_db: (a: number) => [number, number];
export const sinrcomparison_p_dop_better: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
