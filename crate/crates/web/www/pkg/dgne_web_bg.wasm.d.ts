/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_simulation_free: (a: number, b: number) => void;
export const cournot_equilibrium: (a: number, b: number) => [number, number, number, number];
export const simplex_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const simulation_action: (a: number, b: number) => [number, number];
export const simulation_average_regret: (a: number) => [number, number];
export const simulation_average_violation: (a: number) => [number, number];
export const simulation_equilibrium: (a: number, b: number) => [number, number];
export const simulation_horizon: (a: number) => number;
export const simulation_n_players: (a: number) => number;
export const simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number];
export const simulation_sigma: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
