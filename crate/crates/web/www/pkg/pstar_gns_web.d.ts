/* tslint:disable */
/* eslint-disable */

/**
 * `φ = Ω_φ^B + s_φ` for the named form and pre-core.
 */
export function decompose(doc: string, form: string, precore: string): string;

/**
 * Canonical text of a shipped fixture (`full2`, `qm2`, `qm2-singular`).
 */
export function fixture(name: string): string | undefined;

/**
 * GNS representation of the named functional over the named subspace.
 */
export function gns(doc: string, functional: string, subspace: string): string;

/**
 * Quasi-regularity of the ips representation, cross-checked against cores of compressions.
 */
export function regularity(doc: string, form: string, precore: string, samples: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly decompose: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly fixture: (a: number, b: number) => [number, number];
    readonly gns: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly regularity: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
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
