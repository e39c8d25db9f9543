/* tslint:disable */
/* eslint-disable */

/**
 * Result of one distributed run, as flat per-round series.
 */
export class Simulation {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * First coordinate of player `i`'s action (0-based) in every round.
     */
    action(i: number): Float64Array;
    /**
     * `max_i Reg_i(t)/t` for `t = 1..T`.
     */
    average_regret(): Float64Array;
    /**
     * `R_g(t)/t` for `t = 1..T`.
     */
    average_violation(): Float64Array;
    /**
     * Same coordinate of the reference equilibrium.
     */
    equilibrium(i: number): Float64Array;
    horizon(): number;
    n_players(): number;
    /**
     * `game` is `"cournot"` (Euclidean steps) or `"simplex"` (entropic steps).
     */
    constructor(game: string, graph_kind: string, n_players: number, horizon: number, a1: number, a2: number, seed: bigint);
    sigma(): number;
}

/**
 * Cournot equilibrium of round `t` from the solver, followed by the
 * published closed-form profile, each of length `n_players`.
 */
export function cournot_equilibrium(n_players: number, t: number): Float64Array;

/**
 * Repeated entropic mirror steps on the simplex with a fixed linear cost.
 * Returns the points flattened row by row, starting with `center`.
 */
export function simplex_trajectory(center: Float64Array, cost: Float64Array, alpha: number, steps: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_simulation_free: (a: number, b: number) => void;
    readonly cournot_equilibrium: (a: number, b: number) => [number, number, number, number];
    readonly simplex_trajectory: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly simulation_action: (a: number, b: number) => [number, number];
    readonly simulation_average_regret: (a: number) => [number, number];
    readonly simulation_average_violation: (a: number) => [number, number];
    readonly simulation_equilibrium: (a: number, b: number) => [number, number];
    readonly simulation_horizon: (a: number) => number;
    readonly simulation_n_players: (a: number) => number;
    readonly simulation_new: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: bigint) => [number, number, number];
    readonly simulation_sigma: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
