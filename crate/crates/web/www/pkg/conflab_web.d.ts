/* tslint:disable */
/* eslint-disable */

/**
 * Full space-time solution of one boundary source, for playback.
 */
export class WaveMovie {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Conformal factor `f` at level `k`.
     */
    factor_frame(k: number): Float64Array;
    /**
     * `u` at level `k`, row-major with `x¹` fastest.
     */
    frame(k: number): Float64Array;
    levels(): number;
    max_abs(): number;
    /**
     * Solves with the first basis source on Γ, on Minkowski (`scaled = false`)
     * or on the rescaled metric.
     */
    constructor(nodes: number, amplitude: number, width: number, scaled: boolean);
    nodes(): number;
    time(k: number): number;
}

/**
 * `R₀₀` at the slab centre and the verdict of the non-isometry certificate.
 */
export function certificate(nodes: number, amplitude: number, width: number): string;

/**
 * Compares `Λ_η` with `Λ_{f²η}` on Γ for a slab moving away from Γ
 * (`toward_gamma = false`) or across it. Returns a JSON object.
 */
export function dn_comparison(nodes: number, amplitude: number, width: number, toward_gamma: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_wavemovie_free: (a: number, b: number) => void;
    readonly certificate: (a: number, b: number, c: number) => [number, number, number, number];
    readonly dn_comparison: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly wavemovie_factor_frame: (a: number, b: number) => [number, number];
    readonly wavemovie_frame: (a: number, b: number) => [number, number];
    readonly wavemovie_levels: (a: number) => number;
    readonly wavemovie_max_abs: (a: number) => number;
    readonly wavemovie_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly wavemovie_nodes: (a: number) => number;
    readonly wavemovie_time: (a: number, b: number) => number;
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
