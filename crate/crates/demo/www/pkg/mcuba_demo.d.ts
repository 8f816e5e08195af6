/* tslint:disable */
/* eslint-disable */

/**
 * Probability that a trajectory of `mc` has a prefix accepted by `aut`,
 * by the product linear system and by the subset-chain oracle.
 */
export function analyze_finite(mc: string, aut: string): string;

/**
 * The recurrent-pair procedure on a two-letter coin with `P(a) = num/den`,
 * next to the exact value (deterministic automata) and a sampled estimate.
 */
export function analyze_omega(num: number, den: number, aut: string): string;

/**
 * Structural properties of an automaton with witnesses.
 */
export function check_automaton(aut: string): string;

/**
 * Shipped example inputs, by name, for the page's presets.
 */
export function example(name: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly analyze_finite: (a: number, b: number, c: number, d: number) => [number, number];
    readonly analyze_omega: (a: number, b: number, c: number, d: number) => [number, number];
    readonly check_automaton: (a: number, b: number) => [number, number];
    readonly example: (a: number, b: number) => [number, number];
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
