/* tslint:disable */
/* eslint-disable */

/**
 * Describes which landmarks and zones contain an image point.
 */
export function landmark_at(view: string, x: number, y: number): string;

/**
 * Canonical front and rear layouts in the layout file format.
 */
export function layouts(): string;

/**
 * Renders a synthetic run with the listed faulty criteria and scores it.
 */
export function run_course(seed: bigint, faults: string, noise: number, seconds: number): string;

export function time_score(seconds: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly landmark_at: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly layouts: () => [number, number];
    readonly run_course: (a: bigint, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly time_score: (a: number) => [number, number, number];
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
