/* tslint:disable */
/* eslint-disable */

/**
 * A small model trained step by step on a generated pattern graph.
 */
export class PatternTrainer {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Validation `[MRR, Hits@1, Hits@10]`.
     */
    metrics(): Float64Array;
    /**
     * `pattern` is one of the kebab-case pattern names, e.g. `inversion`.
     */
    constructor(pattern: string, n_entities: number, n_facts: number, seed: bigint, dim: number);
    relation_count(): number;
    relation_name(relation: number): string;
    /**
     * Bounds of one relation sector in one dimension, as in
     * [`SectorView::bounds`]; empty when an index is out of range.
     */
    sector_bounds(relation: number, head: boolean, dim: number): Float64Array;
    /**
     * Run `steps` optimizer steps; returns the last batch loss.
     */
    step(steps: number): number;
    steps_done(): bigint;
}

/**
 * One annular sector built from raw (unconstrained) parameters.
 */
export class SectorView {
    free(): void;
    [Symbol.dispose](): void;
    area(): number;
    /**
     * `[lower modulus, upper modulus, phase start, phase end]` of the
     * region; the phase runs counterclockwise from start to end, which are
     * not wrapped.
     */
    bounds(): Float64Array;
    /**
     * Modulus distance plus phase distance for a point in polar form.
     */
    distance(modulus: number, phase: number): number;
    /**
     * Row-major `size x size` grid of distances over the square
     * `[-extent, extent]^2`, with y pointing up.
     */
    distance_field(size: number, extent: number): Float64Array;
    /**
     * Modulus distance at `samples` evenly spaced moduli in `[0, max_modulus]`.
     */
    modulus_profile(max_modulus: number, samples: number): Float64Array;
    constructor(raw_center: number, raw_size: number, raw_phase: number, raw_arc: number, beta: number);
    /**
     * Phase distance at `samples` evenly spaced phases in `[0, 2π]`.
     */
    phase_profile(samples: number): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_patterntrainer_free: (a: number, b: number) => void;
    readonly __wbg_sectorview_free: (a: number, b: number) => void;
    readonly patterntrainer_metrics: (a: number) => [number, number, number, number];
    readonly patterntrainer_new: (a: number, b: number, c: number, d: number, e: bigint, f: number) => [number, number, number];
    readonly patterntrainer_relation_count: (a: number) => number;
    readonly patterntrainer_relation_name: (a: number, b: number) => [number, number];
    readonly patterntrainer_sector_bounds: (a: number, b: number, c: number, d: number) => [number, number];
    readonly patterntrainer_step: (a: number, b: number) => [number, number, number];
    readonly patterntrainer_steps_done: (a: number) => bigint;
    readonly sectorview_area: (a: number) => number;
    readonly sectorview_bounds: (a: number) => [number, number];
    readonly sectorview_distance: (a: number, b: number, c: number) => number;
    readonly sectorview_distance_field: (a: number, b: number, c: number) => [number, number];
    readonly sectorview_modulus_profile: (a: number, b: number, c: number) => [number, number];
    readonly sectorview_new: (a: number, b: number, c: number, d: number, e: number) => number;
    readonly sectorview_phase_profile: (a: number, b: number) => [number, number];
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
